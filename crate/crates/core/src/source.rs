//! Python source frontend: parsing, scope-aware name binding, comment
//! extraction, and file discovery.
//!
//! Resolution here is deliberately intra-file and flow-ordered. A name
//! resolves to the latest binding that textually precedes the use site in
//! the enclosing scope chain; anything crossing a file boundary or bound
//! dynamically stays unresolved so downstream rules can hold their fire.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::{parse, Mode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Directory names skipped during file discovery.
pub const IGNORED_DIRS: &[&str] = &[
    ".git",
    "venv",
    ".venv",
    "node_modules",
    "__pycache__",
    "site-packages",
];

/// Maximum number of name-to-name hops followed during constant folding
/// and alias resolution.
pub const MAX_RESOLUTION_HOPS: u32 = 3;

/// Why a file could not be analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Parse,
    Encoding,
    Io,
}

/// A per-file analysis failure. Failures are reported alongside findings
/// and never abort a run.
#[derive(Debug, Clone, Error, Serialize, Deserialize)]
#[error("{path}:{line}:{column}: {message}")]
pub struct FileFailure {
    pub path: String,
    pub kind: FailureKind,
    /// 1-based; 0 when no position applies (encoding/io failures).
    pub line: u32,
    /// 1-based; 0 when no position applies.
    pub column: u32,
    pub message: String,
}

/// One Python file plus the line metrics used for density reporting.
#[derive(Debug, Clone)]
pub struct SourceFile {
    /// Path as reported in findings (relative to the analysis root when
    /// discovered by [`walk_python_files`]).
    pub path: String,
    pub content: String,
    /// Non-blank, non-comment-only lines.
    pub loc: u64,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, content: impl Into<String>) -> Self {
        let content = content.into();
        let loc = count_loc(&content);
        SourceFile {
            path: path.into(),
            content,
            loc,
        }
    }

    /// Reads a file from disk, failing softly on non-UTF-8 content.
    pub fn read(path: &Path, display_path: &str) -> Result<Self, FileFailure> {
        let bytes = std::fs::read(path).map_err(|e| FileFailure {
            path: display_path.to_string(),
            kind: FailureKind::Io,
            line: 0,
            column: 0,
            message: format!("cannot read file: {e}"),
        })?;
        let content = String::from_utf8(bytes).map_err(|_| FileFailure {
            path: display_path.to_string(),
            kind: FailureKind::Encoding,
            line: 0,
            column: 0,
            message: "file is not valid UTF-8".to_string(),
        })?;
        Ok(SourceFile::new(display_path, content))
    }
}

/// Counts non-blank lines whose first non-whitespace character is not `#`.
pub fn count_loc(content: &str) -> u64 {
    content
        .lines()
        .filter(|line| {
            let t = line.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .count() as u64
}

/// A `#` comment outside any string literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    /// 1-based line the comment starts on.
    pub line: u32,
    /// Text after the `#`, untrimmed.
    pub text: String,
}

/// Extracts comments with a small string-aware scanner so that `#` inside
/// string literals (including triple-quoted and raw strings) is ignored.
pub fn scan_comments(content: &str) -> Vec<Comment> {
    let bytes = content.as_bytes();
    let mut comments = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;

    while i < bytes.len() {
        match bytes[i] {
            b'\n' => {
                line += 1;
                i += 1;
            }
            b'#' => {
                let end = memchr_newline(bytes, i);
                comments.push(Comment {
                    line,
                    text: content[i + 1..end].to_string(),
                });
                i = end;
            }
            q @ (b'\'' | b'"') => {
                let triple = i + 2 < bytes.len() && bytes[i + 1] == q && bytes[i + 2] == q;
                i += if triple { 3 } else { 1 };
                line = skip_string(bytes, &mut i, q, triple, line);
            }
            b'\\' => {
                // Line continuation: the escaped newline still counts.
                if i + 1 < bytes.len() && bytes[i + 1] == b'\n' {
                    line += 1;
                }
                i += 2;
            }
            _ => i += 1,
        }
    }
    comments
}

fn memchr_newline(bytes: &[u8], from: usize) -> usize {
    bytes[from..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| from + p)
        .unwrap_or(bytes.len())
}

/// Advances `i` past a string body; returns the updated line counter.
fn skip_string(bytes: &[u8], i: &mut usize, quote: u8, triple: bool, mut line: u32) -> u32 {
    while *i < bytes.len() {
        let b = bytes[*i];
        // A backslash escapes the next character for tokenization purposes
        // even in raw strings (r"\" is unterminated; the backslash stays in
        // the value but still guards the quote).
        if b == b'\\' {
            if *i + 1 < bytes.len() && bytes[*i + 1] == b'\n' {
                line += 1;
            }
            *i += 2;
            continue;
        }
        if b == b'\n' {
            line += 1;
            *i += 1;
            if !triple {
                // Unterminated single-quoted string; the parser would have
                // rejected the file, but stay well-behaved regardless.
                return line;
            }
            continue;
        }
        if b == quote {
            if triple {
                if *i + 2 < bytes.len() && bytes[*i + 1] == quote && bytes[*i + 2] == quote {
                    *i += 3;
                    return line;
                }
                *i += 1;
            } else {
                *i += 1;
                return line;
            }
        } else {
            *i += 1;
        }
    }
    line
}

/// Identifier scopes, one per module / class / function body.
pub type ScopeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScopeKind {
    Module,
    Class(String),
    Function(String),
}

#[derive(Debug)]
pub struct Scope {
    pub id: ScopeId,
    pub parent: Option<ScopeId>,
    pub kind: ScopeKind,
    pub bindings: Vec<Binding>,
}

/// One assignment-like event. `value` is kept only when the bound
/// expression is statically known (plain assignment or `with ... as`);
/// parameters, loop targets, and augmented assignments bind opaquely.
#[derive(Debug, Clone)]
pub struct Binding {
    /// Plain name (`client`) or instance-attribute key (`self.client`).
    pub name: String,
    pub value: Option<ast::Expr>,
    /// Byte offset of the binding statement; flow ordering compares these.
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BindingRef {
    pub scope: ScopeId,
    pub index: usize,
}

/// 1-based line/column lookup by byte offset. Columns count characters.
#[derive(Debug)]
pub struct LineIndex {
    starts: Vec<u32>,
}

impl LineIndex {
    pub fn new(content: &str) -> Self {
        let mut starts = vec![0u32];
        for (i, b) in content.bytes().enumerate() {
            if b == b'\n' {
                starts.push(i as u32 + 1);
            }
        }
        LineIndex { starts }
    }

    pub fn location(&self, content: &str, offset: u32) -> (u32, u32) {
        let line_idx = match self.starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.starts[line_idx] as usize;
        let col = content[start..offset as usize].chars().count() as u32 + 1;
        (line_idx as u32 + 1, col)
    }

    /// Full text of the 1-based line, without its newline.
    pub fn line_text<'a>(&self, content: &'a str, line: u32) -> &'a str {
        let idx = (line - 1) as usize;
        if idx >= self.starts.len() {
            return "";
        }
        let start = self.starts[idx] as usize;
        let end = self
            .starts
            .get(idx + 1)
            .map(|&s| s as usize)
            .unwrap_or(content.len());
        content[start..end].trim_end_matches(['\n', '\r'])
    }
}

/// Scalar Python literal captured for evidence and comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum PyLiteral {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl PyLiteral {
    pub fn from_constant(c: &ast::Constant) -> Option<PyLiteral> {
        match c {
            ast::Constant::None => Some(PyLiteral::None),
            ast::Constant::Bool(b) => Some(PyLiteral::Bool(*b)),
            ast::Constant::Str(s) => Some(PyLiteral::Str(s.clone())),
            ast::Constant::Int(i) => i.try_into().ok().map(PyLiteral::Int),
            ast::Constant::Float(f) => Some(PyLiteral::Float(*f)),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PyLiteral::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Numeric view used by threshold checks (`> 0` and friends).
    pub fn as_number(&self) -> Option<f64> {
        match self {
            PyLiteral::Int(i) => Some(*i as f64),
            PyLiteral::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            PyLiteral::None => serde_json::Value::Null,
            PyLiteral::Bool(b) => serde_json::Value::from(*b),
            PyLiteral::Int(i) => serde_json::Value::from(*i),
            PyLiteral::Float(f) => serde_json::Value::from(*f),
            PyLiteral::Str(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

impl std::fmt::Display for PyLiteral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PyLiteral::None => write!(f, "None"),
            PyLiteral::Bool(true) => write!(f, "True"),
            PyLiteral::Bool(false) => write!(f, "False"),
            PyLiteral::Int(i) => write!(f, "{i}"),
            PyLiteral::Float(v) => write!(f, "{v}"),
            PyLiteral::Str(s) => write!(f, "\"{s}\""),
        }
    }
}

/// Result of folding an expression toward a literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Folded {
    Literal(PyLiteral),
    /// Literal reached through a named constant; the outermost name is kept
    /// so findings can cite it.
    Ref {
        name: String,
        value: PyLiteral,
    },
    /// Present but not statically known.
    Opaque,
}

impl Folded {
    pub fn literal(&self) -> Option<&PyLiteral> {
        match self {
            Folded::Literal(v) | Folded::Ref { value: v, .. } => Some(v),
            Folded::Opaque => None,
        }
    }
}

/// Outcome of resolving a dotted callee chain.
#[derive(Debug, Clone)]
pub enum NameResolution {
    /// Import-qualified path, e.g. `openai.OpenAI().chat.completions.create`.
    /// `client` links to the constructor call when the chain passes through
    /// one (either inline or via a local binding).
    Qualified {
        path: String,
        client: Option<ClientLink>,
    },
    Unresolved,
}

/// Constructor call a resolved chain passed through, with any chained
/// configuration wrappers (e.g. `.with_options(...)`) peeled off in order.
#[derive(Debug, Clone)]
pub struct ClientLink {
    /// The constructor `Call` expression itself.
    pub constructor: ast::ExprCall,
    /// Scope the constructor expression appears in (for folding its kwargs).
    pub scope: ScopeId,
    /// Byte offset to use for flow-ordered lookups inside the constructor.
    pub offset: u32,
    /// `(method_name, call)` wrappers applied to the constructor, outermost last.
    pub wrappers: Vec<(String, ast::ExprCall)>,
}

/// A parsed file with scopes, imports, and comments attached.
#[derive(Debug)]
pub struct SemanticModel {
    pub file: SourceFile,
    pub module: ast::ModModule,
    pub scopes: Vec<Scope>,
    /// Local alias -> fully qualified path (`OpenAI` -> `openai.OpenAI`).
    pub imports: BTreeMap<String, String>,
    /// Modules pulled in via `from m import *`.
    pub wildcard_imports: Vec<String>,
    pub comments: Vec<Comment>,
    pub lines: LineIndex,
    /// Maps a function/class body (by its def's byte range) to its scope.
    scope_by_range: BTreeMap<(u32, u32), ScopeId>,
}

impl SemanticModel {
    pub fn scope(&self, id: ScopeId) -> &Scope {
        &self.scopes[id as usize]
    }

    pub fn binding(&self, r: BindingRef) -> &Binding {
        &self.scopes[r.scope as usize].bindings[r.index]
    }

    /// Scope created for the def/class statement spanning `range`.
    pub fn scope_for_range(&self, range: (u32, u32)) -> Option<ScopeId> {
        self.scope_by_range.get(&range).copied()
    }

    pub fn location(&self, offset: u32) -> (u32, u32) {
        self.lines.location(&self.file.content, offset)
    }

    /// Latest binding of `name` textually preceding `use_offset`, searching
    /// the scope chain outward. Class scopes are skipped for enclosed
    /// functions, mirroring Python's lookup rules.
    pub fn lookup(&self, scope: ScopeId, name: &str, use_offset: u32) -> Option<BindingRef> {
        let mut current = Some(scope);
        let mut first = true;
        while let Some(id) = current {
            let s = self.scope(id);
            let skip = matches!(s.kind, ScopeKind::Class(_)) && !first;
            if !skip {
                let found = s
                    .bindings
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.name == name && b.offset < use_offset)
                    .max_by_key(|(_, b)| b.offset);
                if let Some((index, _)) = found {
                    return Some(BindingRef { scope: id, index });
                }
            }
            current = s.parent;
            first = false;
        }
        None
    }

    /// Last `self.<attr>`-style binding in the nearest enclosing class.
    /// Instance attributes are assigned across methods in no reliable
    /// textual order, so the last write wins regardless of position.
    pub fn lookup_instance_attr(&self, scope: ScopeId, key: &str) -> Option<BindingRef> {
        let mut current = Some(scope);
        while let Some(id) = current {
            let s = self.scope(id);
            if matches!(s.kind, ScopeKind::Class(_)) {
                let found = s
                    .bindings
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.name == key)
                    .max_by_key(|(_, b)| b.offset);
                if let Some((index, _)) = found {
                    return Some(BindingRef { scope: id, index });
                }
                return None;
            }
            current = s.parent;
        }
        None
    }

    /// Folds an expression to a literal, following at most
    /// [`MAX_RESOLUTION_HOPS`] name hops.
    pub fn fold(&self, scope: ScopeId, expr: &ast::Expr, use_offset: u32) -> Folded {
        self.fold_inner(scope, expr, use_offset, MAX_RESOLUTION_HOPS)
    }

    fn fold_inner(&self, scope: ScopeId, expr: &ast::Expr, use_offset: u32, hops: u32) -> Folded {
        match expr {
            ast::Expr::Constant(c) => match PyLiteral::from_constant(&c.value) {
                Some(v) => Folded::Literal(v),
                None => Folded::Opaque,
            },
            ast::Expr::UnaryOp(u) if matches!(u.op, ast::UnaryOp::USub) => {
                match self.fold_inner(scope, &u.operand, use_offset, hops) {
                    Folded::Literal(PyLiteral::Int(i)) => Folded::Literal(PyLiteral::Int(-i)),
                    Folded::Literal(PyLiteral::Float(f)) => Folded::Literal(PyLiteral::Float(-f)),
                    Folded::Ref {
                        name,
                        value: PyLiteral::Int(i),
                    } => Folded::Ref {
                        name,
                        value: PyLiteral::Int(-i),
                    },
                    Folded::Ref {
                        name,
                        value: PyLiteral::Float(f),
                    } => Folded::Ref {
                        name,
                        value: PyLiteral::Float(-f),
                    },
                    _ => Folded::Opaque,
                }
            }
            ast::Expr::Name(n) => {
                if hops == 0 {
                    return Folded::Opaque;
                }
                let Some(bref) = self.lookup(scope, n.id.as_str(), use_offset) else {
                    return Folded::Opaque;
                };
                self.fold_binding(bref, n.id.as_str(), hops)
            }
            ast::Expr::Attribute(a) => {
                if hops == 0 {
                    return Folded::Opaque;
                }
                let Some(chain) = attr_chain(expr) else {
                    return Folded::Opaque;
                };
                if chain.len() == 2 && (chain[0] == "self" || chain[0] == "cls") {
                    let key = format!("{}.{}", chain[0], chain[1]);
                    if let Some(bref) = self.lookup_instance_attr(scope, &key) {
                        return self.fold_binding(bref, a.attr.as_str(), hops);
                    }
                }
                Folded::Opaque
            }
            _ => Folded::Opaque,
        }
    }

    fn fold_binding(&self, bref: BindingRef, name: &str, hops: u32) -> Folded {
        let b = self.binding(bref);
        let Some(value) = &b.value else {
            return Folded::Opaque;
        };
        match self.fold_inner(bref.scope, value, b.offset, hops - 1) {
            Folded::Literal(v) | Folded::Ref { value: v, .. } => Folded::Ref {
                name: name.to_string(),
                value: v,
            },
            Folded::Opaque => Folded::Opaque,
        }
    }

    /// Resolves a Name (or alias chain) to the bound expression, following
    /// plain `a = b` aliases. Returns the final expression plus the name it
    /// was reached through, or `None` when the value is not statically known.
    pub fn resolve_to_expr(
        &self,
        scope: ScopeId,
        expr: &ast::Expr,
        use_offset: u32,
    ) -> Option<(ast::Expr, Option<String>)> {
        let mut current = expr.clone();
        let mut via: Option<String> = None;
        let mut cur_scope = scope;
        let mut cur_offset = use_offset;
        for _ in 0..=MAX_RESOLUTION_HOPS {
            match &current {
                ast::Expr::Name(n) => {
                    let bref = self.lookup(cur_scope, n.id.as_str(), cur_offset)?;
                    let b = self.binding(bref);
                    let value = b.value.as_ref()?;
                    via = Some(n.id.to_string());
                    cur_scope = bref.scope;
                    cur_offset = b.offset;
                    current = value.clone();
                }
                _ => return Some((current, via)),
            }
        }
        None
    }

    /// Resolves a dotted name chain against imports and local bindings.
    pub fn resolve_chain(
        &self,
        scope: ScopeId,
        chain: &[String],
        use_offset: u32,
    ) -> NameResolution {
        self.resolve_chain_inner(scope, chain, use_offset, MAX_RESOLUTION_HOPS)
    }

    fn resolve_chain_inner(
        &self,
        scope: ScopeId,
        chain: &[String],
        use_offset: u32,
        hops: u32,
    ) -> NameResolution {
        let Some(leading) = chain.first() else {
            return NameResolution::Unresolved;
        };
        if let Some(qualified) = self.imports.get(leading) {
            let mut path = qualified.clone();
            for seg in &chain[1..] {
                path.push('.');
                path.push_str(seg);
            }
            return NameResolution::Qualified { path, client: None };
        }
        if (leading == "self" || leading == "cls") && chain.len() >= 2 {
            let key = format!("{}.{}", leading, chain[1]);
            if let Some(bref) = self.lookup_instance_attr(scope, &key) {
                return self.resolve_via_binding(bref, &chain[2..], hops);
            }
            return NameResolution::Unresolved;
        }
        if let Some(bref) = self.lookup(scope, leading, use_offset) {
            return self.resolve_via_binding(bref, &chain[1..], hops);
        }
        NameResolution::Unresolved
    }

    fn resolve_via_binding(&self, bref: BindingRef, rest: &[String], hops: u32) -> NameResolution {
        if hops == 0 {
            return NameResolution::Unresolved;
        }
        let b = self.binding(bref);
        let Some(value) = &b.value else {
            return NameResolution::Unresolved;
        };
        let mut value = value;
        if let ast::Expr::Await(a) = value {
            value = &a.value;
        }
        match value {
            // Alias chains: `c2 = c1` or `chat = openai.chat`.
            ast::Expr::Name(_) | ast::Expr::Attribute(_) => {
                let Some(mut chain) = attr_chain(value) else {
                    return NameResolution::Unresolved;
                };
                chain.extend(rest.iter().cloned());
                self.resolve_chain_inner(bref.scope, &chain, b.offset, hops - 1)
            }
            // Constructor-style binding: `client = OpenAI(...)`, possibly
            // wrapped in chained configuration calls.
            ast::Expr::Call(_) => {
                let (root, wrappers) = peel_call_wrappers(value);
                let Some(chain) = attr_chain(&root.func) else {
                    return NameResolution::Unresolved;
                };
                match self.resolve_chain_inner(bref.scope, &chain, b.offset, hops - 1) {
                    NameResolution::Qualified { path, .. } => {
                        let mut full = format!("{path}()");
                        for seg in rest {
                            full.push('.');
                            full.push_str(seg);
                        }
                        NameResolution::Qualified {
                            path: full,
                            client: Some(ClientLink {
                                constructor: root.clone(),
                                scope: bref.scope,
                                offset: b.offset,
                                wrappers,
                            }),
                        }
                    }
                    NameResolution::Unresolved => NameResolution::Unresolved,
                }
            }
            _ => NameResolution::Unresolved,
        }
    }
}

/// Renders an Attribute/Name chain as segments; `None` when the chain
/// contains anything else (calls, subscripts, literals).
pub fn attr_chain(expr: &ast::Expr) -> Option<Vec<String>> {
    let mut segs = Vec::new();
    let mut cur = expr;
    loop {
        match cur {
            ast::Expr::Attribute(a) => {
                segs.push(a.attr.to_string());
                cur = &a.value;
            }
            ast::Expr::Name(n) => {
                segs.push(n.id.to_string());
                segs.reverse();
                return Some(segs);
            }
            _ => return None,
        }
    }
}

/// Splits `OpenAI(...).with_options(...).with_options(...)` into the root
/// constructor call and the wrapper calls applied to it, outermost last.
pub fn peel_call_wrappers(expr: &ast::Expr) -> (&ast::ExprCall, Vec<(String, ast::ExprCall)>) {
    let mut wrappers = Vec::new();
    let mut cur = expr;
    loop {
        let ast::Expr::Call(call) = cur else {
            unreachable!("peel_call_wrappers requires a call expression");
        };
        if let ast::Expr::Attribute(attr) = call.func.as_ref() {
            if matches!(attr.value.as_ref(), ast::Expr::Call(_)) {
                wrappers.push((attr.attr.to_string(), call.clone()));
                cur = &attr.value;
                continue;
            }
        }
        wrappers.reverse();
        return (call, wrappers);
    }
}

/// Parses a file into a [`SemanticModel`].
pub fn parse_file(file: SourceFile) -> Result<SemanticModel, FileFailure> {
    let parsed = parse(&file.content, Mode::Module, &file.path);
    let lines = LineIndex::new(&file.content);
    let module = match parsed {
        Ok(ast::Mod::Module(m)) => m,
        Ok(_) => unreachable!("Mode::Module always yields a module"),
        Err(err) => {
            let offset = err.offset.to_u32().min(file.content.len() as u32);
            let (line, column) = lines.location(&file.content, offset);
            return Err(FileFailure {
                path: file.path.clone(),
                kind: FailureKind::Parse,
                line,
                column,
                message: format!("syntax error: {}", err.error),
            });
        }
    };

    let comments = scan_comments(&file.content);
    let mut builder = ModelBuilder::default();
    builder.scopes.push(Scope {
        id: 0,
        parent: None,
        kind: ScopeKind::Module,
        bindings: Vec::new(),
    });
    builder.collect_body(&module.body, 0, None);

    Ok(SemanticModel {
        file,
        module,
        scopes: builder.scopes,
        imports: builder.imports,
        wildcard_imports: builder.wildcard_imports,
        comments,
        lines,
        scope_by_range: builder.scope_by_range,
    })
}

#[derive(Default)]
struct ModelBuilder {
    scopes: Vec<Scope>,
    imports: BTreeMap<String, String>,
    wildcard_imports: Vec<String>,
    scope_by_range: BTreeMap<(u32, u32), ScopeId>,
}

impl ModelBuilder {
    fn new_scope(&mut self, parent: ScopeId, kind: ScopeKind, range: (u32, u32)) -> ScopeId {
        let id = self.scopes.len() as ScopeId;
        self.scopes.push(Scope {
            id,
            parent: Some(parent),
            kind,
            bindings: Vec::new(),
        });
        self.scope_by_range.insert(range, id);
        id
    }

    fn bind(&mut self, scope: ScopeId, name: String, value: Option<ast::Expr>, offset: u32) {
        self.scopes[scope as usize].bindings.push(Binding {
            name,
            value,
            offset,
        });
    }

    /// `class_ctx` is the scope receiving `self.<attr>` assignments; it
    /// stays live inside methods and their nested functions.
    fn collect_body(&mut self, body: &[ast::Stmt], scope: ScopeId, class_ctx: Option<ScopeId>) {
        for stmt in body {
            self.collect_stmt(stmt, scope, class_ctx);
        }
    }

    fn collect_stmt(&mut self, stmt: &ast::Stmt, scope: ScopeId, class_ctx: Option<ScopeId>) {
        let offset = stmt.range().start().to_u32();
        match stmt {
            ast::Stmt::Import(im) => {
                for alias in &im.names {
                    let target = alias.name.to_string();
                    match &alias.asname {
                        Some(as_name) => {
                            self.imports.insert(as_name.to_string(), target);
                        }
                        None => {
                            // `import a.b` binds only the root package name.
                            let root = target.split('.').next().unwrap_or(&target).to_string();
                            self.imports.insert(root.clone(), root);
                        }
                    }
                }
            }
            ast::Stmt::ImportFrom(im) => {
                // Relative imports point inside the project, not at a
                // provider package; leave those names unresolved.
                if im.level.map_or(0, |l| l.to_u32()) > 0 {
                    return;
                }
                let Some(module) = &im.module else { return };
                for alias in &im.names {
                    if alias.name.as_str() == "*" {
                        self.wildcard_imports.push(module.to_string());
                        continue;
                    }
                    let local = alias
                        .asname
                        .as_ref()
                        .map(|a| a.to_string())
                        .unwrap_or_else(|| alias.name.to_string());
                    self.imports
                        .insert(local, format!("{}.{}", module, alias.name));
                }
            }
            ast::Stmt::Assign(a) => {
                for target in &a.targets {
                    self.bind_target(target, Some((*a.value).clone()), scope, class_ctx, offset);
                }
            }
            ast::Stmt::AnnAssign(a) => {
                if let Some(value) = &a.value {
                    self.bind_target(&a.target, Some((**value).clone()), scope, class_ctx, offset);
                }
            }
            ast::Stmt::AugAssign(a) => {
                self.bind_target(&a.target, None, scope, class_ctx, offset);
            }
            ast::Stmt::For(f) => {
                self.bind_target(&f.target, None, scope, class_ctx, offset);
                self.collect_body(&f.body, scope, class_ctx);
                self.collect_body(&f.orelse, scope, class_ctx);
            }
            ast::Stmt::AsyncFor(f) => {
                self.bind_target(&f.target, None, scope, class_ctx, offset);
                self.collect_body(&f.body, scope, class_ctx);
                self.collect_body(&f.orelse, scope, class_ctx);
            }
            ast::Stmt::While(w) => {
                self.collect_body(&w.body, scope, class_ctx);
                self.collect_body(&w.orelse, scope, class_ctx);
            }
            ast::Stmt::If(i) => {
                self.collect_body(&i.body, scope, class_ctx);
                self.collect_body(&i.orelse, scope, class_ctx);
            }
            ast::Stmt::With(w) => {
                for item in &w.items {
                    if let Some(var) = &item.optional_vars {
                        // `with Client() as c:` is a constructor binding in
                        // the cases this tool cares about.
                        self.bind_target(
                            var,
                            Some(item.context_expr.clone()),
                            scope,
                            class_ctx,
                            offset,
                        );
                    }
                }
                self.collect_body(&w.body, scope, class_ctx);
            }
            ast::Stmt::AsyncWith(w) => {
                for item in &w.items {
                    if let Some(var) = &item.optional_vars {
                        self.bind_target(
                            var,
                            Some(item.context_expr.clone()),
                            scope,
                            class_ctx,
                            offset,
                        );
                    }
                }
                self.collect_body(&w.body, scope, class_ctx);
            }
            ast::Stmt::Try(t) => {
                self.collect_body(&t.body, scope, class_ctx);
                for handler in &t.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = handler;
                    if let Some(name) = &h.name {
                        self.bind(scope, name.to_string(), None, offset);
                    }
                    self.collect_body(&h.body, scope, class_ctx);
                }
                self.collect_body(&t.orelse, scope, class_ctx);
                self.collect_body(&t.finalbody, scope, class_ctx);
            }
            ast::Stmt::TryStar(t) => {
                self.collect_body(&t.body, scope, class_ctx);
                for handler in &t.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = handler;
                    self.collect_body(&h.body, scope, class_ctx);
                }
                self.collect_body(&t.orelse, scope, class_ctx);
                self.collect_body(&t.finalbody, scope, class_ctx);
            }
            ast::Stmt::Match(m) => {
                for case in &m.cases {
                    self.collect_body(&case.body, scope, class_ctx);
                }
            }
            ast::Stmt::FunctionDef(f) => {
                self.bind(scope, f.name.to_string(), None, offset);
                let range = (f.range().start().to_u32(), f.range().end().to_u32());
                let inner = self.new_scope(scope, ScopeKind::Function(f.name.to_string()), range);
                self.bind_params(inner, &f.args, offset);
                self.collect_body(&f.body, inner, class_ctx);
            }
            ast::Stmt::AsyncFunctionDef(f) => {
                self.bind(scope, f.name.to_string(), None, offset);
                let range = (f.range().start().to_u32(), f.range().end().to_u32());
                let inner = self.new_scope(scope, ScopeKind::Function(f.name.to_string()), range);
                self.bind_params(inner, &f.args, offset);
                self.collect_body(&f.body, inner, class_ctx);
            }
            ast::Stmt::ClassDef(c) => {
                self.bind(scope, c.name.to_string(), None, offset);
                let range = (c.range().start().to_u32(), c.range().end().to_u32());
                let inner = self.new_scope(scope, ScopeKind::Class(c.name.to_string()), range);
                self.collect_body(&c.body, inner, Some(inner));
            }
            _ => {}
        }
    }

    fn bind_params(&mut self, scope: ScopeId, args: &ast::Arguments, offset: u32) {
        let all = args
            .posonlyargs
            .iter()
            .chain(&args.args)
            .chain(&args.kwonlyargs);
        for arg in all {
            self.bind(scope, arg.def.arg.to_string(), None, offset);
        }
        if let Some(a) = &args.vararg {
            self.bind(scope, a.arg.to_string(), None, offset);
        }
        if let Some(a) = &args.kwarg {
            self.bind(scope, a.arg.to_string(), None, offset);
        }
    }

    fn bind_target(
        &mut self,
        target: &ast::Expr,
        value: Option<ast::Expr>,
        scope: ScopeId,
        class_ctx: Option<ScopeId>,
        offset: u32,
    ) {
        match target {
            ast::Expr::Name(n) => self.bind(scope, n.id.to_string(), value, offset),
            ast::Expr::Attribute(a) => {
                if let ast::Expr::Name(base) = a.value.as_ref() {
                    let base_id = base.id.as_str();
                    if base_id == "self" || base_id == "cls" {
                        if let Some(class_scope) = class_ctx {
                            let key = format!("{}.{}", base_id, a.attr);
                            self.bind(class_scope, key, value, offset);
                        }
                    }
                }
            }
            ast::Expr::Tuple(t) => {
                for elt in &t.elts {
                    self.bind_target(elt, None, scope, class_ctx, offset);
                }
            }
            ast::Expr::List(l) => {
                for elt in &l.elts {
                    self.bind_target(elt, None, scope, class_ctx, offset);
                }
            }
            ast::Expr::Starred(s) => {
                self.bind_target(&s.value, None, scope, class_ctx, offset);
            }
            _ => {}
        }
    }
}

/// Recursively finds `.py` files under `root`, skipping [`IGNORED_DIRS`]
/// and never following symlinks. Paths come back sorted and relative to
/// `root` so output is stable across runs and machines.
pub fn walk_python_files(root: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| {
            if e.file_type().is_dir() {
                let name = e.file_name().to_string_lossy();
                !IGNORED_DIRS.contains(&name.as_ref())
            } else {
                true
            }
        })
        .filter_map(Result::ok)
        .filter(|e| {
            e.file_type().is_file() && e.path().extension().map(|x| x == "py").unwrap_or(false)
        })
        .map(|e| {
            e.path()
                .strip_prefix(root)
                .map(Path::to_path_buf)
                .unwrap_or_else(|_| e.path().to_path_buf())
        })
        .collect();
    files.sort();
    files
}
