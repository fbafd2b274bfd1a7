//! C source indexing and retrieval.
//!
//! The index maps function names to their definitions (file, span, body
//! text) across a project root. It backs two consumers: trace resolution
//! (mapping report locations to enclosing functions) and the context
//! retrieval tool used during call-return range reasoning. Parsing is
//! tree-sitter based; files that fail to parse are logged and skipped.

pub mod cfg;
pub mod pathenum;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;
use tree_sitter::{Node, Parser};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("no C function definitions found under {0}")]
    EmptyIndex(PathBuf),
    #[error("function not found: {0}")]
    NotFound(String),
    #[error("ambiguous function name {name}: {count} definitions, no file hint matched")]
    Ambiguous { name: String, count: usize },
    #[error("parse error in {file}:{line}: {msg}")]
    Parse { file: String, line: u32, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A function identity within the project: name plus defining file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionRef {
    pub name: String,
    /// Path relative to the project root.
    pub file: String,
    /// 1-based line of the definition start.
    pub line: u32,
}

/// One function (or function-like macro) definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub name: String,
    pub file: String,
    /// 1-based inclusive span of the whole definition.
    pub start_line: u32,
    pub end_line: u32,
    /// Full definition text, signature included.
    pub text: String,
    /// Parameter names in declaration order.
    pub params: Vec<String>,
    /// True when this entry is a function-like macro, returned by retrieval
    /// so callers can treat the body as a macro expansion rather than C.
    pub is_macro: bool,
}

impl FunctionDef {
    pub fn func_ref(&self) -> FunctionRef {
        FunctionRef {
            name: self.name.clone(),
            file: self.file.clone(),
            line: self.start_line,
        }
    }

    pub fn contains_line(&self, line: u32) -> bool {
        line >= self.start_line && line <= self.end_line
    }
}

/// Immutable index of every function definition under a project root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeIndex {
    pub root: PathBuf,
    /// Function name → definitions (duplicates allowed: static functions).
    pub functions: BTreeMap<String, Vec<FunctionDef>>,
    /// Object-like macro name → definition text.
    pub macros: BTreeMap<String, String>,
    /// Per-file line counts, for location validation.
    pub file_lines: BTreeMap<String, u32>,
}

impl CodeIndex {
    pub fn function_count(&self) -> usize {
        self.functions.values().map(Vec::len).sum()
    }

    /// The function definition enclosing a (file, line) location.
    pub fn enclosing_function(&self, file: &str, line: u32) -> Option<&FunctionDef> {
        self.functions
            .values()
            .flatten()
            .filter(|d| !d.is_macro && d.file == file && d.contains_line(line))
            .min_by_key(|d| d.end_line - d.start_line)
    }

    pub fn line_count(&self, file: &str) -> Option<u32> {
        self.file_lines.get(file).copied()
    }
}

fn c_language() -> tree_sitter::Language {
    tree_sitter_c::LANGUAGE.into()
}

pub(crate) fn new_parser() -> Parser {
    let mut parser = Parser::new();
    parser
        .set_language(&c_language())
        .expect("tree-sitter C grammar version mismatch");
    parser
}

/// Build the index over every `.c`/`.h` file under `root`. `excludes` are
/// substring patterns matched against root-relative paths.
pub fn build_index(root: &Path, excludes: &[String]) -> Result<CodeIndex, CodeError> {
    let mut index = CodeIndex {
        root: root.to_path_buf(),
        functions: BTreeMap::new(),
        macros: BTreeMap::new(),
        file_lines: BTreeMap::new(),
    };
    let mut parser = new_parser();
    for entry in walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
    {
        if !entry.file_type().is_file() {
            continue;
        }
        let ext = entry.path().extension().and_then(|e| e.to_str());
        if !matches!(ext, Some("c") | Some("h")) {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");
        if excludes.iter().any(|pat| rel.contains(pat.as_str())) {
            continue;
        }
        let text = match std::fs::read_to_string(entry.path()) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("skipping unreadable file {rel}: {e}");
                continue;
            }
        };
        index.file_lines.insert(rel.clone(), text.lines().count() as u32);
        match parser.parse(&text, None) {
            Some(tree) => index_file(&mut index, &rel, &text, tree.root_node()),
            None => log::warn!("skipping unparseable file {rel}"),
        }
    }
    if index.functions.is_empty() {
        return Err(CodeError::EmptyIndex(root.to_path_buf()));
    }
    Ok(index)
}

fn index_file(index: &mut CodeIndex, rel: &str, src: &str, root_node: Node) {
    let mut cursor = root_node.walk();
    for node in root_node.children(&mut cursor) {
        match node.kind() {
            "function_definition" => {
                if let Some(def) = extract_function(rel, src, node) {
                    index.functions.entry(def.name.clone()).or_default().push(def);
                }
            }
            "preproc_function_def" => {
                if let Some(def) = extract_macro_fn(rel, src, node) {
                    index.functions.entry(def.name.clone()).or_default().push(def);
                }
            }
            "preproc_def" => {
                if let (Some(name), text) = (
                    node.child_by_field_name("name")
                        .and_then(|n| n.utf8_text(src.as_bytes()).ok()),
                    node.utf8_text(src.as_bytes()).unwrap_or(""),
                ) {
                    index.macros.insert(name.to_string(), text.trim().to_string());
                }
            }
            // Functions nested under preprocessor conditionals still count.
            "preproc_if" | "preproc_ifdef" | "preproc_else" => {
                index_file(index, rel, src, node);
            }
            _ => {}
        }
    }
}

fn extract_function(rel: &str, src: &str, node: Node) -> Option<FunctionDef> {
    let declarator = node.child_by_field_name("declarator")?;
    let (name, params) = declarator_name_params(src, declarator)?;
    let text = node.utf8_text(src.as_bytes()).ok()?.to_string();
    Some(FunctionDef {
        name,
        file: rel.to_string(),
        start_line: node.start_position().row as u32 + 1,
        end_line: node.end_position().row as u32 + 1,
        text,
        params,
        is_macro: false,
    })
}

/// Walk through pointer/attribute wrappers down to the function declarator.
fn declarator_name_params(src: &str, node: Node) -> Option<(String, Vec<String>)> {
    match node.kind() {
        "function_declarator" => {
            let name_node = node.child_by_field_name("declarator")?;
            let name = innermost_identifier(src, name_node)?;
            let mut params = Vec::new();
            if let Some(list) = node.child_by_field_name("parameters") {
                let mut cursor = list.walk();
                for p in list.named_children(&mut cursor) {
                    if p.kind() == "parameter_declaration" {
                        if let Some(d) = p.child_by_field_name("declarator") {
                            if let Some(pname) = innermost_identifier(src, d) {
                                params.push(pname);
                            }
                        }
                    }
                }
            }
            Some((name, params))
        }
        "pointer_declarator" | "parenthesized_declarator" => {
            declarator_name_params(src, node.child_by_field_name("declarator").or_else(|| {
                let mut cursor = node.walk();
                node.named_children(&mut cursor).next()
            })?)
        }
        _ => None,
    }
}

fn innermost_identifier(src: &str, node: Node) -> Option<String> {
    if node.kind() == "identifier" || node.kind() == "field_identifier" {
        return node.utf8_text(src.as_bytes()).ok().map(str::to_string);
    }
    if let Some(inner) = node.child_by_field_name("declarator") {
        return innermost_identifier(src, inner);
    }
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        if let Some(found) = innermost_identifier(src, child) {
            return Some(found);
        }
    }
    None
}

fn extract_macro_fn(rel: &str, src: &str, node: Node) -> Option<FunctionDef> {
    let name = node
        .child_by_field_name("name")?
        .utf8_text(src.as_bytes())
        .ok()?
        .to_string();
    let text = node.utf8_text(src.as_bytes()).ok()?.trim().to_string();
    Some(FunctionDef {
        name,
        file: rel.to_string(),
        start_line: node.start_position().row as u32 + 1,
        end_line: node.end_position().row as u32 + 1,
        text,
        params: Vec::new(),
        is_macro: true,
    })
}

/// Look up a function body by name, the retrieval tool of the reasoning
/// agent. Ambiguity is resolved by `hint_file` (substring match on the
/// relative path); function-like macros are returned with `is_macro` set.
pub fn retrieve_function<'a>(
    index: &'a CodeIndex,
    name: &str,
    hint_file: Option<&str>,
) -> Result<&'a FunctionDef, CodeError> {
    let defs = index
        .functions
        .get(name)
        .ok_or_else(|| CodeError::NotFound(name.to_string()))?;
    if defs.len() == 1 {
        return Ok(&defs[0]);
    }
    if let Some(hint) = hint_file {
        if let Some(d) = defs.iter().find(|d| d.file.contains(hint)) {
            return Ok(d);
        }
    }
    Err(CodeError::Ambiguous { name: name.to_string(), count: defs.len() })
}

// ── Index cache ──────────────────────────────────────────────────────

const INDEX_CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct IndexCacheFile {
    version: u32,
    root: PathBuf,
    /// file → content hash at index time.
    hashes: BTreeMap<String, String>,
    index: CodeIndex,
}

pub fn content_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_encode(&hasher.finalize())
}

pub(crate) fn hex_encode(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Persist an index keyed by the content hashes of its files.
pub fn save_index_cache(index: &CodeIndex, path: &Path) -> Result<(), CodeError> {
    let mut hashes = BTreeMap::new();
    for rel in index.file_lines.keys() {
        let full = index.root.join(rel);
        let bytes = std::fs::read(&full)
            .map_err(|e| CodeError::Io { path: full.clone(), source: e })?;
        hashes.insert(rel.clone(), content_hash(&bytes));
    }
    let cache = IndexCacheFile {
        version: INDEX_CACHE_VERSION,
        root: index.root.clone(),
        hashes,
        index: index.clone(),
    };
    let json = serde_json::to_string(&cache).expect("index serializes");
    std::fs::write(path, json).map_err(|e| CodeError::Io { path: path.to_path_buf(), source: e })
}

/// Load a cached index; returns None when missing, version-mismatched, or
/// stale (any file content hash changed).
pub fn load_index_cache(path: &Path, root: &Path) -> Option<CodeIndex> {
    let bytes = std::fs::read(path).ok()?;
    let cache: IndexCacheFile = serde_json::from_slice(&bytes).ok()?;
    if cache.version != INDEX_CACHE_VERSION || cache.root != root {
        return None;
    }
    for (rel, expected) in &cache.hashes {
        let actual = std::fs::read(root.join(rel)).ok().map(|b| content_hash(&b))?;
        if &actual != expected {
            return None;
        }
    }
    Some(cache.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_tree(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (name, body) in files {
            let path = dir.path().join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).unwrap();
            }
            fs::write(path, body).unwrap();
        }
        dir
    }

    #[test]
    fn indexes_two_functions_in_one_file() {
        let dir = write_tree(&[(
            "a.c",
            "int foo(int x) { return x; }\nstatic void bar(void) { }\n",
        )]);
        let idx = build_index(dir.path(), &[]).unwrap();
        assert_eq!(idx.function_count(), 2);
        assert!(idx.functions.contains_key("foo"));
        assert!(idx.functions.contains_key("bar"));
        assert_eq!(idx.functions["foo"][0].params, vec!["x"]);
    }

    #[test]
    fn duplicate_static_names_both_indexed() {
        let dir = write_tree(&[
            ("a.c", "static int init(void) { return 1; }\n"),
            ("b.c", "static int init(void) { return 2; }\n"),
        ]);
        let idx = build_index(dir.path(), &[]).unwrap();
        assert_eq!(idx.functions["init"].len(), 2);
        let picked = retrieve_function(&idx, "init", Some("a.c")).unwrap();
        assert_eq!(picked.file, "a.c");
        assert!(matches!(
            retrieve_function(&idx, "init", None),
            Err(CodeError::Ambiguous { .. })
        ));
    }

    #[test]
    fn headers_with_only_prototypes_yield_empty_index() {
        let dir = write_tree(&[("a.h", "int foo(int x);\nvoid bar(void);\n")]);
        assert!(matches!(
            build_index(dir.path(), &[]),
            Err(CodeError::EmptyIndex(_))
        ));
    }

    #[test]
    fn retrieve_unknown_is_not_found() {
        let dir = write_tree(&[("a.c", "int foo(void) { return 0; }\n")]);
        let idx = build_index(dir.path(), &[]).unwrap();
        assert!(matches!(
            retrieve_function(&idx, "nope", None),
            Err(CodeError::NotFound(_))
        ));
    }

    #[test]
    fn function_like_macro_flagged() {
        let dir = write_tree(&[(
            "m.c",
            "#define MAX(a, b) ((a) > (b) ? (a) : (b))\nint use(int x) { return MAX(x, 0); }\n",
        )]);
        let idx = build_index(dir.path(), &[]).unwrap();
        let m = retrieve_function(&idx, "MAX", None).unwrap();
        assert!(m.is_macro);
        assert!(m.text.contains("#define"));
    }

    #[test]
    fn enclosing_function_finds_innermost_span() {
        let dir = write_tree(&[(
            "a.c",
            "int one(void) {\n  return 1;\n}\nint two(void) {\n  return 2;\n}\n",
        )]);
        let idx = build_index(dir.path(), &[]).unwrap();
        assert_eq!(idx.enclosing_function("a.c", 2).unwrap().name, "one");
        assert_eq!(idx.enclosing_function("a.c", 5).unwrap().name, "two");
        assert!(idx.enclosing_function("a.c", 99).is_none());
    }

    #[test]
    fn cache_roundtrip_and_staleness() {
        let dir = write_tree(&[("a.c", "int foo(void) { return 0; }\n")]);
        let idx = build_index(dir.path(), &[]).unwrap();
        let cache_path = dir.path().join("index.json");
        save_index_cache(&idx, &cache_path).unwrap();
        let loaded = load_index_cache(&cache_path, dir.path()).unwrap();
        assert_eq!(loaded.function_count(), 1);
        fs::write(dir.path().join("a.c"), "int foo(void) { return 1; }\n").unwrap();
        assert!(load_index_cache(&cache_path, dir.path()).is_none());
    }
}
