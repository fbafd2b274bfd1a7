//! Path feasibility analysis for static bug analyzer warnings.
//!
//! Static analyzers flag potential bugs as source→sink flows of a target
//! variable (e.g. a pointer assigned NULL that is later dereferenced), but
//! they over-approximate path feasibility and report many false alarms.
//! This crate re-checks each warning by walking its call trace function by
//! function: it extracts the conditional branches that gate reachability of
//! the per-function exit point, asks a pluggable LLM backend for symbolic
//! ranges of the variables and call return values in those conditions, and
//! discharges the accumulated constraints with an SMT solver. A warning
//! whose trace contains a provably infeasible segment is filtered as a
//! false positive; anything the pipeline cannot decide is kept as an alarm.
//!
//! Module map:
//! - [`report`]: analyzer report ingestion (SARIF / Infer / CppCheck) into
//!   the unified [`report::Warning`] model.
//! - [`code`]: C source indexing, function retrieval, and CFG construction.
//! - [`fpe`]: critical-branch extraction and feasible-path conditional
//!   expressions per trace segment.
//! - [`range`]: LLM-driven symbolic range reasoning with a memory cache.
//! - [`smt`]: SMT-LIB2 script generation, solving, and repair.
//! - [`llm`]: prompt catalog and HTTP / replay / scripted mock backends.
//! - [`pipeline`]: per-warning orchestration and verdicts.
//! - [`eval`]: metrics over labeled verdict sets.
//! - [`config`]: run configuration.

pub mod code;
pub mod config;
pub mod eval;
pub mod expr;
pub mod fpe;
pub mod llm;
pub mod pipeline;
pub mod range;
pub mod report;
pub mod smt;
