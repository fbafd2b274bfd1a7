//! Per-function control-flow graphs with classified conditional and jump
//! nodes.
//!
//! The graph is statement-level: straight-line runs share a basic block,
//! every conditional test ends its block, and every jump terminates its
//! block. Construction records, for each block, the stack of conditional
//! guards (with the arm taken) that syntactically encloses it — branch
//! extraction later reads reachability off the edges and guard orientation
//! off these stacks.
//!
//! Deliberate lowerings:
//! - `switch` becomes a chain of per-arm equality conditions; the default
//!   arm is the final fall-through of the chain.
//! - `&&`/`||` are NOT split into separate branches; a compound condition
//!   is a single node whose expression is handed downstream whole.
//! - loops are not unrolled: the back edge is recorded with its own kind
//!   and a synthetic loop-exit edge from the body end models leaving after
//!   a single iteration, so path extraction sees each loop as a 0-or-1
//!   entry region.
//! - `do/while` enters its body unconditionally (first iteration is not
//!   guarded by the loop condition).

use super::{FunctionDef, FunctionRef};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use tree_sitter::Node;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CondId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JumpId(pub usize);

/// Which arm of a conditional a nested element sits under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    Then,
    Else,
}

/// A conditional guard with the arm taken to get under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuardRef {
    pub cond: CondId,
    pub arm: Arm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondKind {
    If,
    ElseIf,
    Switch,
    While,
    For,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpKind {
    Goto(String),
    Return,
    Break,
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Conditional test held.
    True,
    /// Conditional test failed.
    False,
    /// Straight-line continuation.
    Fall,
    /// Taken by a goto/return/break/continue.
    Jump,
    /// Loop back edge; ignored by path extraction.
    Back,
    /// Synthetic body-end → loop-after edge modeling a single iteration.
    LoopExit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: BlockId,
    pub to: BlockId,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stmt {
    pub line: u32,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasicBlock {
    pub id: BlockId,
    pub stmts: Vec<Stmt>,
    /// Conditional guard stack at block creation, outermost first.
    pub guards: Vec<GuardRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CondNode {
    pub id: CondId,
    pub kind: CondKind,
    /// Condition source text, outer parentheses stripped.
    pub expr: String,
    /// Block whose end evaluates this condition.
    pub block: BlockId,
    pub line: u32,
    /// Guards enclosing this conditional, outermost first.
    pub nesting: Vec<GuardRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpNode {
    pub id: JumpId,
    pub kind: JumpKind,
    /// Block terminated by this jump.
    pub block: BlockId,
    pub line: u32,
    /// Guards enclosing the jump, outermost first.
    pub guards: Vec<GuardRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionCfg {
    pub function: FunctionRef,
    pub blocks: Vec<BasicBlock>,
    pub edges: Vec<Edge>,
    pub cond_nodes: Vec<CondNode>,
    pub jump_nodes: Vec<JumpNode>,
    pub entry: BlockId,
    pub exit: BlockId,
    /// Blocks unreachable from entry (e.g. statements after a return).
    pub dead: BTreeSet<BlockId>,
    pub diagnostics: Vec<String>,
}

impl FunctionCfg {
    pub fn successors(&self, b: BlockId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == b)
    }

    pub fn cond(&self, id: CondId) -> &CondNode {
        &self.cond_nodes[id.0]
    }

    pub fn jump(&self, id: JumpId) -> &JumpNode {
        &self.jump_nodes[id.0]
    }

    pub fn block(&self, id: BlockId) -> &BasicBlock {
        &self.blocks[id.0]
    }

    /// The jump terminating a block, if any.
    pub fn jump_in(&self, b: BlockId) -> Option<&JumpNode> {
        self.jump_nodes.iter().find(|j| j.block == b)
    }

    /// Blocks that touch a source line: statement lines, condition lines,
    /// and jump lines all count. `text_hint` narrows multi-block lines.
    pub fn blocks_at_line(&self, line: u32) -> Vec<BlockId> {
        let mut out = Vec::new();
        for b in &self.blocks {
            if b.stmts.iter().any(|s| s.line == line) {
                out.push(b.id);
            }
        }
        for c in &self.cond_nodes {
            if c.line == line && !out.contains(&c.block) {
                out.push(c.block);
            }
        }
        for j in &self.jump_nodes {
            if j.line == line && !out.contains(&j.block) {
                out.push(j.block);
            }
        }
        out
    }

    pub fn block_at(&self, line: u32, text_hint: Option<&str>) -> Option<BlockId> {
        let candidates = self.blocks_at_line(line);
        if candidates.len() <= 1 {
            return candidates.first().copied();
        }
        if let Some(hint) = text_hint {
            let norm = crate::expr::normalize(hint);
            for &b in &candidates {
                let blk = self.block(b);
                let matches_stmt = blk
                    .stmts
                    .iter()
                    .any(|s| crate::expr::normalize(&s.text).contains(&norm));
                let matches_cond = self
                    .cond_nodes
                    .iter()
                    .any(|c| c.block == b && crate::expr::normalize(&c.expr).contains(&norm));
                if matches_stmt || matches_cond {
                    return Some(b);
                }
            }
        }
        candidates.first().copied()
    }

    /// Statement position of a line within a block, for same-block ordering.
    pub fn stmt_pos(&self, b: BlockId, line: u32) -> Option<usize> {
        self.block(b).stmts.iter().position(|s| s.line == line)
    }
}

/// Build the CFG for one indexed function definition.
pub fn build_cfg(def: &FunctionDef) -> Result<FunctionCfg, super::CodeError> {
    if def.is_macro {
        return Err(super::CodeError::Parse {
            file: def.file.clone(),
            line: def.start_line,
            msg: format!("{} is a macro, not a C function", def.name),
        });
    }
    let mut parser = super::new_parser();
    let tree = parser.parse(&def.text, None).ok_or_else(|| super::CodeError::Parse {
        file: def.file.clone(),
        line: def.start_line,
        msg: "tree-sitter failed to parse function text".into(),
    })?;
    let root = tree.root_node();
    let func_node = find_kind(root, "function_definition").ok_or_else(|| {
        super::CodeError::Parse {
            file: def.file.clone(),
            line: def.start_line,
            msg: "no function definition in text".into(),
        }
    })?;
    let body = func_node.child_by_field_name("body").ok_or_else(|| super::CodeError::Parse {
        file: def.file.clone(),
        line: def.start_line,
        msg: "function has no body".into(),
    })?;
    if body.has_error() {
        return Err(super::CodeError::Parse {
            file: def.file.clone(),
            line: def.start_line + body.start_position().row as u32,
            msg: "syntax error in function body".into(),
        });
    }

    let mut b = Builder {
        src: &def.text,
        base_line: def.start_line,
        blocks: Vec::new(),
        edges: Vec::new(),
        conds: Vec::new(),
        jumps: Vec::new(),
        guard_stack: Vec::new(),
        loop_stack: Vec::new(),
        breakable_stack: Vec::new(),
        labels: HashMap::new(),
        pending_gotos: Vec::new(),
        exit: BlockId(0),
        diagnostics: Vec::new(),
    };
    let entry = b.new_block();
    let exit = b.new_block();
    b.exit = exit;
    let last = b.walk_compound(body, entry);
    if let Some(last) = last {
        b.edge(last, exit, EdgeKind::Fall);
    }
    b.resolve_gotos();

    let mut cfg = FunctionCfg {
        function: def.func_ref(),
        blocks: b.blocks,
        edges: b.edges,
        cond_nodes: b.conds,
        jump_nodes: b.jumps,
        entry,
        exit,
        dead: BTreeSet::new(),
        diagnostics: b.diagnostics,
    };
    mark_dead(&mut cfg);
    Ok(cfg)
}

fn find_kind<'t>(node: Node<'t>, kind: &str) -> Option<Node<'t>> {
    if node.kind() == kind {
        return Some(node);
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if let Some(found) = find_kind(child, kind) {
            return Some(found);
        }
    }
    None
}

fn mark_dead(cfg: &mut FunctionCfg) {
    let mut reachable = BTreeSet::new();
    let mut stack = vec![cfg.entry];
    while let Some(b) = stack.pop() {
        if !reachable.insert(b) {
            continue;
        }
        for e in cfg.edges.iter().filter(|e| e.from == b) {
            stack.push(e.to);
        }
    }
    cfg.dead = cfg
        .blocks
        .iter()
        .map(|b| b.id)
        .filter(|id| !reachable.contains(id))
        .collect();
}

struct LoopCtx {
    after: BlockId,
    /// Where `continue` transfers control in the 0-or-1 iteration model.
    cont_target: BlockId,
}

enum Breakable {
    Loop,
    Switch { after: BlockId },
}

struct Builder<'a> {
    src: &'a str,
    base_line: u32,
    blocks: Vec<BasicBlock>,
    edges: Vec<Edge>,
    conds: Vec<CondNode>,
    jumps: Vec<JumpNode>,
    guard_stack: Vec<GuardRef>,
    loop_stack: Vec<LoopCtx>,
    breakable_stack: Vec<Breakable>,
    labels: HashMap<String, BlockId>,
    pending_gotos: Vec<(BlockId, String, u32)>,
    exit: BlockId,
    diagnostics: Vec<String>,
}

impl<'a> Builder<'a> {
    fn new_block(&mut self) -> BlockId {
        let id = BlockId(self.blocks.len());
        self.blocks.push(BasicBlock { id, stmts: Vec::new(), guards: self.guard_stack.clone() });
        id
    }

    fn edge(&mut self, from: BlockId, to: BlockId, kind: EdgeKind) {
        self.edges.push(Edge { from, to, kind });
    }

    fn text(&self, node: Node) -> String {
        node.utf8_text(self.src.as_bytes()).unwrap_or("").trim().to_string()
    }

    fn line(&self, node: Node) -> u32 {
        self.base_line + node.start_position().row as u32
    }

    fn push_stmt(&mut self, block: BlockId, node: Node) {
        let line = self.line(node);
        let text = self.text(node);
        self.blocks[block.0].stmts.push(Stmt { line, text });
    }

    fn cond_expr_text(&self, node: Node) -> String {
        let raw = self.text(node);
        strip_outer_parens(&raw)
    }

    fn new_cond(&mut self, kind: CondKind, expr: String, block: BlockId, line: u32) -> CondId {
        let id = CondId(self.conds.len());
        self.conds.push(CondNode {
            id,
            kind,
            expr,
            block,
            line,
            nesting: self.guard_stack.clone(),
        });
        id
    }

    fn new_jump(&mut self, kind: JumpKind, block: BlockId, line: u32) -> JumpId {
        let id = JumpId(self.jumps.len());
        self.jumps.push(JumpNode { id, kind, block, line, guards: self.guard_stack.clone() });
        id
    }

    /// Walk the children of a compound statement. Returns the live block
    /// after the last statement, or None when control cannot fall through.
    fn walk_compound(&mut self, node: Node, mut cur: BlockId) -> Option<BlockId> {
        let mut live = true;
        let mut cursor = node.walk();
        let children: Vec<Node> = node.named_children(&mut cursor).collect();
        for child in children {
            if child.kind() == "comment" {
                continue;
            }
            if !live {
                // Unreachable statements still get blocks so later labels
                // inside them resolve; no inbound edge is created.
                cur = self.new_block();
                live = true;
            }
            match self.walk_stmt(child, cur) {
                Some(next) => cur = next,
                None => live = false,
            }
        }
        live.then_some(cur)
    }

    /// Walk one statement from block `cur`; returns the continuation block.
    fn walk_stmt(&mut self, node: Node, cur: BlockId) -> Option<BlockId> {
        match node.kind() {
            "compound_statement" => self.walk_compound(node, cur),
            "if_statement" => self.walk_if(node, cur, false),
            "while_statement" => self.walk_while(node, cur),
            "for_statement" => self.walk_for(node, cur),
            "do_statement" => self.walk_do(node, cur),
            "switch_statement" => self.walk_switch(node, cur),
            "return_statement" => {
                self.push_stmt(cur, node);
                self.new_jump(JumpKind::Return, cur, self.line(node));
                self.edge(cur, self.exit_block(), EdgeKind::Jump);
                None
            }
            "break_statement" => {
                self.push_stmt(cur, node);
                match self.breakable_stack.last() {
                    Some(Breakable::Switch { after }) => {
                        // break out of a switch is plain control transfer,
                        // not a recorded jump node.
                        let after = *after;
                        self.edge(cur, after, EdgeKind::Jump);
                    }
                    Some(Breakable::Loop) => {
                        let after = self.loop_stack.last().map(|l| l.after);
                        self.new_jump(JumpKind::Break, cur, self.line(node));
                        if let Some(after) = after {
                            self.edge(cur, after, EdgeKind::Jump);
                        }
                    }
                    None => {
                        self.diagnostics.push(format!(
                            "break outside loop/switch at line {}",
                            self.line(node)
                        ));
                    }
                }
                None
            }
            "continue_statement" => {
                self.push_stmt(cur, node);
                let target = self.loop_stack.last().map(|l| l.cont_target);
                self.new_jump(JumpKind::Continue, cur, self.line(node));
                match target {
                    Some(t) => self.edge(cur, t, EdgeKind::Jump),
                    None => self.diagnostics.push(format!(
                        "continue outside loop at line {}",
                        self.line(node)
                    )),
                }
                None
            }
            "goto_statement" => {
                self.push_stmt(cur, node);
                let label = node
                    .child_by_field_name("label")
                    .map(|l| self.text(l))
                    .unwrap_or_default();
                self.new_jump(JumpKind::Goto(label.clone()), cur, self.line(node));
                self.pending_gotos.push((cur, label, self.line(node)));
                None
            }
            "labeled_statement" => {
                let label = node
                    .child_by_field_name("label")
                    .map(|l| self.text(l))
                    .unwrap_or_default();
                let block = self.new_block();
                self.edge(cur, block, EdgeKind::Fall);
                self.labels.insert(label, block);
                match node.named_child(1) {
                    Some(inner) if inner.kind() != "comment" => self.walk_stmt(inner, block),
                    _ => Some(block),
                }
            }
            "case_statement" => {
                // Only reachable outside walk_switch for malformed input.
                self.push_stmt(cur, node);
                Some(cur)
            }
            _ => {
                // declaration, expression_statement, empty statements, and
                // anything unmodeled: straight-line.
                self.push_stmt(cur, node);
                Some(cur)
            }
        }
    }

    fn exit_block(&self) -> BlockId {
        self.exit
    }

    fn walk_if(&mut self, node: Node, cur: BlockId, as_elseif: bool) -> Option<BlockId> {
        let cond_node = node.child_by_field_name("condition");
        let expr = cond_node.map(|c| self.cond_expr_text(c)).unwrap_or_default();
        let line = cond_node.map(|c| self.line(c)).unwrap_or_else(|| self.line(node));
        let kind = if as_elseif { CondKind::ElseIf } else { CondKind::If };
        let cond = self.new_cond(kind, expr, cur, line);

        self.guard_stack.push(GuardRef { cond, arm: Arm::Then });
        let then_block = self.new_block();
        self.edge(cur, then_block, EdgeKind::True);
        let then_end = node
            .child_by_field_name("consequence")
            .and_then(|c| self.walk_stmt(c, then_block));
        self.guard_stack.pop();

        let alternative = node
            .child_by_field_name("alternative")
            .map(|alt| if alt.kind() == "else_clause" {
                alt.named_child(0).unwrap_or(alt)
            } else {
                alt
            });

        match alternative {
            Some(alt) => {
                self.guard_stack.push(GuardRef { cond, arm: Arm::Else });
                let else_block = self.new_block();
                self.edge(cur, else_block, EdgeKind::False);
                let else_end = if alt.kind() == "if_statement" {
                    self.walk_if(alt, else_block, true)
                } else {
                    self.walk_stmt(alt, else_block)
                };
                self.guard_stack.pop();
                match (then_end, else_end) {
                    (None, None) => None,
                    (t, e) => {
                        let join = self.new_block();
                        if let Some(t) = t {
                            self.edge(t, join, EdgeKind::Fall);
                        }
                        if let Some(e) = e {
                            self.edge(e, join, EdgeKind::Fall);
                        }
                        Some(join)
                    }
                }
            }
            None => {
                let join = self.new_block();
                self.edge(cur, join, EdgeKind::False);
                if let Some(t) = then_end {
                    self.edge(t, join, EdgeKind::Fall);
                }
                Some(join)
            }
        }
    }

    fn walk_while(&mut self, node: Node, cur: BlockId) -> Option<BlockId> {
        let cond_node = node.child_by_field_name("condition");
        let expr = cond_node.map(|c| self.cond_expr_text(c)).unwrap_or_default();
        let line = cond_node.map(|c| self.line(c)).unwrap_or_else(|| self.line(node));

        let test = self.new_block();
        self.edge(cur, test, EdgeKind::Fall);
        let cond = self.new_cond(CondKind::While, expr, test, line);

        let after = {
            // `after` carries the pre-loop guard stack.
            let b = self.new_block();
            self.edge(test, b, EdgeKind::False);
            b
        };

        self.guard_stack.push(GuardRef { cond, arm: Arm::Then });
        let body = self.new_block();
        self.edge(test, body, EdgeKind::True);
        self.loop_stack.push(LoopCtx { after, cont_target: after });
        self.breakable_stack.push(Breakable::Loop);
        let body_end = node.child_by_field_name("body").and_then(|b| self.walk_stmt(b, body));
        self.breakable_stack.pop();
        self.loop_stack.pop();
        self.guard_stack.pop();

        if let Some(end) = body_end {
            self.edge(end, test, EdgeKind::Back);
            self.edge(end, after, EdgeKind::LoopExit);
        }
        Some(after)
    }

    fn walk_for(&mut self, node: Node, mut cur: BlockId) -> Option<BlockId> {
        if let Some(init) = node.child_by_field_name("initializer") {
            self.push_stmt(cur, init);
        }
        let cond_node = node.child_by_field_name("condition");

        let test = self.new_block();
        self.edge(cur, test, EdgeKind::Fall);
        cur = test;

        let cond = cond_node.map(|c| {
            let expr = self.cond_expr_text(c);
            let line = self.line(c);
            self.new_cond(CondKind::For, expr, test, line)
        });

        let after = self.new_block();
        if cond.is_some() {
            self.edge(test, after, EdgeKind::False);
        }

        if let Some(cond) = cond {
            self.guard_stack.push(GuardRef { cond, arm: Arm::Then });
        }
        let body = self.new_block();
        self.edge(cur, body, if cond.is_some() { EdgeKind::True } else { EdgeKind::Fall });
        self.loop_stack.push(LoopCtx { after, cont_target: after });
        self.breakable_stack.push(Breakable::Loop);
        let mut body_end = node.child_by_field_name("body").and_then(|b| self.walk_stmt(b, body));
        self.breakable_stack.pop();
        self.loop_stack.pop();
        if let Some(end) = body_end {
            if let Some(update) = node.child_by_field_name("update") {
                self.push_stmt(end, update);
            }
            self.edge(end, test, EdgeKind::Back);
            self.edge(end, after, EdgeKind::LoopExit);
            body_end = Some(end);
        }
        let _ = body_end;
        if cond.is_some() {
            self.guard_stack.pop();
        }
        Some(after)
    }

    fn walk_do(&mut self, node: Node, cur: BlockId) -> Option<BlockId> {
        let cond_node = node.child_by_field_name("condition");
        let expr = cond_node.map(|c| self.cond_expr_text(c)).unwrap_or_default();
        let line = cond_node.map(|c| self.line(c)).unwrap_or_else(|| self.line(node));

        let after = self.new_block();
        let test = self.new_block();
        let cond = self.new_cond(CondKind::While, expr, test, line);
        // First entry bypasses the test: body is unguarded by the loop
        // condition.
        let body = self.new_block();
        self.edge(cur, body, EdgeKind::Fall);
        self.loop_stack.push(LoopCtx { after, cont_target: test });
        self.breakable_stack.push(Breakable::Loop);
        let body_end = node.child_by_field_name("body").and_then(|b| self.walk_stmt(b, body));
        self.breakable_stack.pop();
        self.loop_stack.pop();
        if let Some(end) = body_end {
            self.edge(end, test, EdgeKind::Fall);
        }
        let _ = cond;
        self.edge(test, body, EdgeKind::Back);
        self.edge(test, after, EdgeKind::False);
        Some(after)
    }

    fn walk_switch(&mut self, node: Node, cur: BlockId) -> Option<BlockId> {
        let value = node
            .child_by_field_name("condition")
            .map(|c| self.cond_expr_text(c))
            .unwrap_or_default();
        let body = match node.child_by_field_name("body") {
            Some(b) => b,
            None => return Some(cur),
        };
        let after = self.new_block();

        // Collect case arms in source order.
        struct ArmInfo<'t> {
            value: Option<Node<'t>>,
            stmts: Vec<Node<'t>>,
            line: u32,
        }
        let mut arms: Vec<ArmInfo> = Vec::new();
        let mut cursor = body.walk();
        for child in body.named_children(&mut cursor) {
            if child.kind() == "case_statement" {
                let value_node = child.child_by_field_name("value");
                let mut stmts = Vec::new();
                let mut c2 = child.walk();
                for sub in child.named_children(&mut c2) {
                    if Some(sub) != value_node && sub.kind() != "comment" {
                        stmts.push(sub);
                    }
                }
                arms.push(ArmInfo { value: value_node, stmts, line: self.line(child) });
            }
        }
        if arms.is_empty() {
            return Some(after);
        }

        // Chain of equality tests for the non-default arms, in order.
        let mut chain_block = cur;
        let mut cond_ids: Vec<Option<CondId>> = Vec::new();
        let case_indices: Vec<usize> =
            (0..arms.len()).filter(|&i| arms[i].value.is_some()).collect();
        for (seq, &i) in case_indices.iter().enumerate() {
            let arm = &arms[i];
            let vtext = arm.value.map(|v| self.text(v)).unwrap_or_default();
            let expr = format!("({value}) == ({vtext})");
            let kind = if seq == 0 { CondKind::Switch } else { CondKind::ElseIf };
            let cond = self.new_cond(kind, expr, chain_block, arm.line);
            while cond_ids.len() < i {
                cond_ids.push(None);
            }
            cond_ids.push(Some(cond));
            if seq + 1 < case_indices.len() {
                // Guards of the next test block: all previous arms failed.
                self.guard_stack.push(GuardRef { cond, arm: Arm::Else });
                let next_test = self.new_block();
                self.edge(chain_block, next_test, EdgeKind::False);
                chain_block = next_test;
                // The Else guard stays on the stack for subsequent tests
                // and bodies; popped in bulk below.
            }
        }
        while cond_ids.len() < arms.len() {
            cond_ids.push(None);
        }
        // Pop the accumulated Else guards from the chain construction.
        let chain_else_guards = case_indices.len().saturating_sub(1);
        let chain_guards: Vec<GuardRef> =
            self.guard_stack[self.guard_stack.len() - chain_else_guards..].to_vec();
        for _ in 0..chain_else_guards {
            self.guard_stack.pop();
        }

        // Walk arm bodies with their oriented guard stacks.
        self.breakable_stack.push(Breakable::Switch { after });
        let mut arm_entry_blocks: Vec<BlockId> = Vec::new();
        let mut arm_end_blocks: Vec<Option<BlockId>> = Vec::new();
        let mut default_entry: Option<BlockId> = None;
        let mut seq = 0usize;
        for (i, arm) in arms.iter().enumerate() {
            let guards_before = self.guard_stack.len();
            match cond_ids[i] {
                Some(cond) => {
                    // Failed tests of all earlier case arms, then this one held.
                    for g in chain_guards.iter().take(seq) {
                        self.guard_stack.push(*g);
                    }
                    self.guard_stack.push(GuardRef { cond, arm: Arm::Then });
                    seq += 1;
                }
                None => {
                    // Default arm: every case test failed.
                    for g in &chain_guards {
                        self.guard_stack.push(*g);
                    }
                }
            }
            let entry = self.new_block();
            if cond_ids[i].is_none() {
                default_entry = Some(entry);
            }
            let mut end = Some(entry);
            for stmt in &arm.stmts {
                end = match end {
                    Some(blk) => self.walk_stmt(*stmt, blk),
                    None => break,
                };
            }
            arm_entry_blocks.push(entry);
            arm_end_blocks.push(end);
            self.guard_stack.truncate(guards_before);
        }
        self.breakable_stack.pop();

        // True edges from each test into its arm body.
        let mut test_block = cur;
        let mut tests_seen = 0usize;
        for (i, _arm) in arms.iter().enumerate() {
            if let Some(_cond) = cond_ids[i] {
                self.edge(test_block, arm_entry_blocks[i], EdgeKind::True);
                tests_seen += 1;
                if tests_seen < case_indices.len() {
                    // Next test block in the chain.
                    test_block = self
                        .edges
                        .iter()
                        .find(|e| e.from == test_block && e.kind == EdgeKind::False)
                        .map(|e| e.to)
                        .unwrap_or(test_block);
                }
            }
        }
        // Final False edge: to the default arm, else past the switch.
        let final_target = default_entry.unwrap_or(after);
        self.edge(test_block, final_target, EdgeKind::False);

        // Fallthrough between adjacent arms; arms ending in break already
        // jumped to `after`.
        for i in 0..arms.len() {
            if let Some(end) = arm_end_blocks[i] {
                if i + 1 < arms.len() {
                    self.edge(end, arm_entry_blocks[i + 1], EdgeKind::Fall);
                } else {
                    self.edge(end, after, EdgeKind::Fall);
                }
            }
        }
        Some(after)
    }

    fn resolve_gotos(&mut self) {
        let pending = std::mem::take(&mut self.pending_gotos);
        for (from, label, line) in pending {
            match self.labels.get(&label) {
                Some(&target) => {
                    // A goto to a label at or before its own line is a loop;
                    // mark it as a back edge so path extraction skips it.
                    let target_line = self.blocks[target.0]
                        .stmts
                        .first()
                        .map(|s| s.line)
                        .unwrap_or(line + 1);
                    let kind = if target_line <= line { EdgeKind::Back } else { EdgeKind::Jump };
                    self.edge(from, target, kind);
                }
                None => {
                    self.diagnostics
                        .push(format!("goto to unknown label '{label}' at line {line}"));
                    self.edge(from, self.exit, EdgeKind::Jump);
                }
            }
        }
    }
}

fn strip_outer_parens(raw: &str) -> String {
    let t = raw.trim();
    if t.starts_with('(') && t.ends_with(')') {
        // Only strip when the parens actually match each other.
        let inner = &t[1..t.len() - 1];
        let mut depth = 0i32;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return t.to_string();
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner.trim().to_string();
        }
    }
    t.to_string()
}
