//! Matches call expressions against the provider registry and normalizes
//! every match into a provider-neutral call-site description.
//!
//! The description answers, per configuration role: is it present, what is
//! its value, and which layer set it (the request call, a chained options
//! call, or the client constructor)? It also records two context facts the
//! rules need: whether the message payload provably lacks a system message,
//! and whether the call's result flows into a parse sink downstream.

use std::collections::{BTreeMap, BTreeSet};

use rustpython_parser::ast::{self, Ranged};
use serde::{Deserialize, Serialize};

use crate::registry::{ParamPath, Provider, ProviderRegistry, Role};
use crate::source::{
    attr_chain, peel_call_wrappers, ClientLink, Folded, NameResolution, PyLiteral, ScopeId,
    SemanticModel,
};

/// How the callee was recognized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchTier {
    /// Callee chain resolved through imports/bindings to a registered path.
    Resolved,
    /// Receiver unknown; the trailing attribute chain matched a signature.
    Suffix,
}

/// Which configuration layer supplied a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Call,
    Options,
    Constructor,
}

/// Resolved value of a configuration role at a call site.
#[derive(Debug, Clone, PartialEq)]
pub enum RoleValue {
    Literal(PyLiteral),
    /// Literal reached through a named constant.
    ConstRef {
        name: String,
        value: PyLiteral,
    },
    /// Present, but the value is not statically known.
    Dynamic,
    /// Affirmatively not provided on any visible layer.
    Absent,
    /// Not provided explicitly, and a `**` expansion (or starred/dynamic
    /// container) could be supplying it. Never treated as absent.
    Spread,
}

impl RoleValue {
    pub fn literal(&self) -> Option<&PyLiteral> {
        match self {
            RoleValue::Literal(v) | RoleValue::ConstRef { value: v, .. } => Some(v),
            _ => None,
        }
    }

    /// Present in some form (explicitly set, even if not statically known).
    pub fn is_present(&self) -> bool {
        matches!(
            self,
            RoleValue::Literal(_) | RoleValue::ConstRef { .. } | RoleValue::Dynamic
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RoleValue::Literal(_) => "literal",
            RoleValue::ConstRef { .. } => "const_ref",
            RoleValue::Dynamic => "dynamic",
            RoleValue::Absent => "absent",
            RoleValue::Spread => "spread",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedRole {
    pub value: RoleValue,
    /// Layer the value was found on; `None` for absent/spread.
    pub layer: Option<LayerKind>,
}

/// What kind of receiver the call was made on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Module-level attribute path; there is no client object, so client
    /// configuration is known to be empty.
    ModulePath,
    /// The chain passes through a recognized client constructor whose
    /// arguments are visible.
    Client,
    /// The receiver could not be resolved; client configuration may exist
    /// but is invisible to this analysis.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessagesState {
    HasSystem,
    NoSystem,
    Unresolved,
}

#[derive(Debug, Clone)]
pub struct MessagesFacts {
    pub state: MessagesState,
    /// Short evidence fragment for findings.
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseSinkKind {
    JsonParse,
    EvalLiteral,
    SchemaValidate,
}

#[derive(Debug, Clone)]
pub struct ParseSink {
    pub kind: ParseSinkKind,
    pub callee: String,
    pub line: u32,
}

#[derive(Debug, Clone, Default)]
pub struct ConsumptionFacts {
    /// Parse sinks the call result reaches within the enclosing function.
    pub sinks: Vec<ParseSink>,
    /// Methods invoked on the (tainted) result, for evidence.
    pub result_methods: Vec<String>,
}

/// A matched, normalized LLM call site.
#[derive(Debug, Clone)]
pub struct CallSite {
    pub provider_id: String,
    pub tier: MatchTier,
    /// Resolved path (resolved tier) or the suffix entry that hit.
    pub matched_path: String,
    /// Callee chain as written, best effort.
    pub raw_callee: String,
    pub receiver: ReceiverKind,
    /// True when some client layer exists but could not be inspected; rules
    /// must not treat absence as proven for roles a client could carry.
    pub client_unresolved: bool,
    pub line: u32,
    pub column: u32,
    pub offset: u32,
    /// Whole call expression with all whitespace removed (fingerprinting).
    pub normalized_text: String,
    /// Trimmed first source line of the call.
    pub snippet: String,
    pub roles: BTreeMap<Role, ResolvedRole>,
    pub messages: MessagesFacts,
    pub consumption: ConsumptionFacts,
}

impl CallSite {
    pub fn role(&self, role: Role) -> Option<&ResolvedRole> {
        self.roles.get(&role)
    }

    pub fn role_value(&self, role: Role) -> Option<&RoleValue> {
        self.roles.get(&role).map(|r| &r.value)
    }
}

/// Finds and normalizes every registered LLM call site in one file.
/// Output is ordered by source position.
pub fn find_call_sites(model: &SemanticModel, registry: &ProviderRegistry) -> Vec<CallSite> {
    let mut scanner = Scanner {
        model,
        registry,
        sites: Vec::new(),
    };
    scanner.process_body(&model.module.body, 0);
    scanner.sites.sort_by_key(|s| s.offset);
    scanner.sites
}

// --- traversal ---------------------------------------------------------------

struct Scanner<'a> {
    model: &'a SemanticModel,
    registry: &'a ProviderRegistry,
    sites: Vec<CallSite>,
}

impl<'a> Scanner<'a> {
    fn process_body(&mut self, body: &'a [ast::Stmt], scope: ScopeId) {
        let mut flat = Vec::new();
        flatten_body(body, &mut flat);

        for (idx, stmt) in flat.iter().enumerate() {
            let mut calls = Vec::new();
            for expr in own_exprs(stmt) {
                collect_calls(expr, &mut calls);
            }
            for call in calls {
                self.try_site(call, scope, &flat, idx);
            }
        }

        // Nested definitions get their own scope and statement context.
        for stmt in &flat {
            match stmt {
                ast::Stmt::FunctionDef(f) => {
                    let range = (f.range().start().to_u32(), f.range().end().to_u32());
                    if let Some(inner) = self.model.scope_for_range(range) {
                        self.process_body(&f.body, inner);
                    }
                }
                ast::Stmt::AsyncFunctionDef(f) => {
                    let range = (f.range().start().to_u32(), f.range().end().to_u32());
                    if let Some(inner) = self.model.scope_for_range(range) {
                        self.process_body(&f.body, inner);
                    }
                }
                ast::Stmt::ClassDef(c) => {
                    let range = (c.range().start().to_u32(), c.range().end().to_u32());
                    if let Some(inner) = self.model.scope_for_range(range) {
                        self.process_body(&c.body, inner);
                    }
                }
                _ => {}
            }
        }
    }

    fn try_site(
        &mut self,
        call: &'a ast::ExprCall,
        scope: ScopeId,
        flat: &[&'a ast::Stmt],
        idx: usize,
    ) {
        let offset = call.range().start().to_u32();
        let (raw, resolution) = resolve_callee(self.model, scope, &call.func, offset);

        let mut matched: Option<(&Provider, MatchTier, String)> = None;
        let mut receiver = ReceiverKind::Unknown;
        if let NameResolution::Qualified { path, client } = &resolution {
            for p in self.registry.providers() {
                if p.matches_resolved(path) {
                    matched = Some((p, MatchTier::Resolved, path.clone()));
                    receiver = if client.is_some() {
                        ReceiverKind::Client
                    } else {
                        ReceiverKind::ModulePath
                    };
                    break;
                }
            }
        }
        // Suffix matching applies when the receiver is genuinely unknown:
        // an unresolved chain, or a plain attribute path rooted in a module
        // this analysis cannot see into (`from app.clients import client`).
        // A chain that passed through a *visible* non-LLM constructor
        // (`sqlite3.connect().…`) is affirmatively not an LLM call and is
        // never signature-matched.
        let suffix_eligible = match &resolution {
            NameResolution::Unresolved => true,
            NameResolution::Qualified { path, .. } => !path.contains("()"),
        };
        if matched.is_none() && suffix_eligible {
            if let Some(raw_chain) = &raw {
                if raw_chain.contains('.') {
                    for p in self.registry.providers() {
                        if let Some(sfx) = p.matches_suffix(raw_chain) {
                            matched = Some((p, MatchTier::Suffix, sfx.to_string()));
                            receiver = ReceiverKind::Unknown;
                            break;
                        }
                    }
                }
            }
        }
        let Some((provider, tier, matched_path)) = matched else {
            return;
        };

        let (line, column) = self.model.location(offset);
        let end = call.range().end().to_u32() as usize;
        let normalized_text: String = self.model.file.content[offset as usize..end]
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let snippet = self
            .model
            .lines
            .line_text(&self.model.file.content, line)
            .trim()
            .to_string();

        let (layers, chain_unresolved) =
            build_layers(self.model, provider, call, scope, offset, &resolution);
        let client_unresolved = matches!(receiver, ReceiverKind::Unknown) || chain_unresolved;

        let mut roles = BTreeMap::new();
        for role in Role::ALL {
            if provider.role_applies(role) {
                roles.insert(role, resolve_role(self.model, provider, role, &layers));
            }
        }

        let messages =
            if provider.role_applies(Role::Messages) || provider.role_applies(Role::SystemText) {
                messages_facts(self.model, provider, &layers, flat, idx)
            } else {
                MessagesFacts {
                    state: MessagesState::Unresolved,
                    note: "message inspection not applicable".to_string(),
                }
            };

        let consumption = consumption_facts(self.model, scope, flat, idx, call);

        self.sites.push(CallSite {
            provider_id: provider.id.clone(),
            tier,
            matched_path,
            raw_callee: raw.unwrap_or_else(|| "<call>".to_string()),
            receiver,
            client_unresolved,
            line,
            column,
            offset,
            normalized_text,
            snippet,
            roles,
            messages,
            consumption,
        });
    }
}

/// Flattens a body into source order, descending into compound statements
/// but not into nested function/class definitions.
fn flatten_body<'a>(body: &'a [ast::Stmt], out: &mut Vec<&'a ast::Stmt>) {
    for stmt in body {
        out.push(stmt);
        match stmt {
            ast::Stmt::If(s) => {
                flatten_body(&s.body, out);
                flatten_body(&s.orelse, out);
            }
            ast::Stmt::For(s) => {
                flatten_body(&s.body, out);
                flatten_body(&s.orelse, out);
            }
            ast::Stmt::AsyncFor(s) => {
                flatten_body(&s.body, out);
                flatten_body(&s.orelse, out);
            }
            ast::Stmt::While(s) => {
                flatten_body(&s.body, out);
                flatten_body(&s.orelse, out);
            }
            ast::Stmt::With(s) => flatten_body(&s.body, out),
            ast::Stmt::AsyncWith(s) => flatten_body(&s.body, out),
            ast::Stmt::Try(s) => {
                flatten_body(&s.body, out);
                for h in &s.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = h;
                    flatten_body(&h.body, out);
                }
                flatten_body(&s.orelse, out);
                flatten_body(&s.finalbody, out);
            }
            ast::Stmt::TryStar(s) => {
                flatten_body(&s.body, out);
                for h in &s.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = h;
                    flatten_body(&h.body, out);
                }
                flatten_body(&s.orelse, out);
                flatten_body(&s.finalbody, out);
            }
            ast::Stmt::Match(s) => {
                for case in &s.cases {
                    flatten_body(&case.body, out);
                }
            }
            _ => {}
        }
    }
}

/// Expressions belonging to the statement itself (not to nested blocks).
/// Decorators and parameter defaults are deliberately excluded.
fn own_exprs(stmt: &ast::Stmt) -> Vec<&ast::Expr> {
    let mut out = Vec::new();
    match stmt {
        ast::Stmt::Assign(s) => out.push(s.value.as_ref()),
        ast::Stmt::AugAssign(s) => out.push(s.value.as_ref()),
        ast::Stmt::AnnAssign(s) => {
            if let Some(v) = &s.value {
                out.push(v.as_ref());
            }
        }
        ast::Stmt::Expr(s) => out.push(s.value.as_ref()),
        ast::Stmt::Return(s) => {
            if let Some(v) = &s.value {
                out.push(v.as_ref());
            }
        }
        ast::Stmt::If(s) => out.push(s.test.as_ref()),
        ast::Stmt::While(s) => out.push(s.test.as_ref()),
        ast::Stmt::For(s) => out.push(s.iter.as_ref()),
        ast::Stmt::AsyncFor(s) => out.push(s.iter.as_ref()),
        ast::Stmt::With(s) => out.extend(s.items.iter().map(|i| &i.context_expr)),
        ast::Stmt::AsyncWith(s) => out.extend(s.items.iter().map(|i| &i.context_expr)),
        ast::Stmt::Raise(s) => {
            if let Some(e) = &s.exc {
                out.push(e.as_ref());
            }
            if let Some(c) = &s.cause {
                out.push(c.as_ref());
            }
        }
        ast::Stmt::Assert(s) => {
            out.push(s.test.as_ref());
            if let Some(m) = &s.msg {
                out.push(m.as_ref());
            }
        }
        ast::Stmt::Delete(s) => out.extend(s.targets.iter()),
        ast::Stmt::Match(s) => out.push(s.subject.as_ref()),
        _ => {}
    }
    out
}

/// Pre-order walk over every sub-expression, skipping lambda bodies (their
/// parameters live in a scope this model does not track).
fn walk_expr<'a>(expr: &'a ast::Expr, f: &mut impl FnMut(&'a ast::Expr)) {
    f(expr);
    match expr {
        ast::Expr::BoolOp(e) => e.values.iter().for_each(|v| walk_expr(v, f)),
        ast::Expr::NamedExpr(e) => {
            walk_expr(&e.target, f);
            walk_expr(&e.value, f);
        }
        ast::Expr::BinOp(e) => {
            walk_expr(&e.left, f);
            walk_expr(&e.right, f);
        }
        ast::Expr::UnaryOp(e) => walk_expr(&e.operand, f),
        ast::Expr::Lambda(_) => {}
        ast::Expr::IfExp(e) => {
            walk_expr(&e.test, f);
            walk_expr(&e.body, f);
            walk_expr(&e.orelse, f);
        }
        ast::Expr::Dict(e) => {
            for k in e.keys.iter().flatten() {
                walk_expr(k, f);
            }
            e.values.iter().for_each(|v| walk_expr(v, f));
        }
        ast::Expr::Set(e) => e.elts.iter().for_each(|v| walk_expr(v, f)),
        ast::Expr::ListComp(e) => {
            walk_expr(&e.elt, f);
            for g in &e.generators {
                walk_expr(&g.iter, f);
                g.ifs.iter().for_each(|i| walk_expr(i, f));
            }
        }
        ast::Expr::SetComp(e) => {
            walk_expr(&e.elt, f);
            for g in &e.generators {
                walk_expr(&g.iter, f);
                g.ifs.iter().for_each(|i| walk_expr(i, f));
            }
        }
        ast::Expr::DictComp(e) => {
            walk_expr(&e.key, f);
            walk_expr(&e.value, f);
            for g in &e.generators {
                walk_expr(&g.iter, f);
                g.ifs.iter().for_each(|i| walk_expr(i, f));
            }
        }
        ast::Expr::GeneratorExp(e) => {
            walk_expr(&e.elt, f);
            for g in &e.generators {
                walk_expr(&g.iter, f);
                g.ifs.iter().for_each(|i| walk_expr(i, f));
            }
        }
        ast::Expr::Await(e) => walk_expr(&e.value, f),
        ast::Expr::Yield(e) => {
            if let Some(v) = &e.value {
                walk_expr(v, f);
            }
        }
        ast::Expr::YieldFrom(e) => walk_expr(&e.value, f),
        ast::Expr::Compare(e) => {
            walk_expr(&e.left, f);
            e.comparators.iter().for_each(|c| walk_expr(c, f));
        }
        ast::Expr::Call(e) => {
            walk_expr(&e.func, f);
            e.args.iter().for_each(|a| walk_expr(a, f));
            e.keywords.iter().for_each(|k| walk_expr(&k.value, f));
        }
        ast::Expr::FormattedValue(e) => walk_expr(&e.value, f),
        ast::Expr::JoinedStr(e) => e.values.iter().for_each(|v| walk_expr(v, f)),
        ast::Expr::Attribute(e) => walk_expr(&e.value, f),
        ast::Expr::Subscript(e) => {
            walk_expr(&e.value, f);
            walk_expr(&e.slice, f);
        }
        ast::Expr::Starred(e) => walk_expr(&e.value, f),
        ast::Expr::List(e) => e.elts.iter().for_each(|v| walk_expr(v, f)),
        ast::Expr::Tuple(e) => e.elts.iter().for_each(|v| walk_expr(v, f)),
        ast::Expr::Slice(e) => {
            if let Some(l) = &e.lower {
                walk_expr(l, f);
            }
            if let Some(u) = &e.upper {
                walk_expr(u, f);
            }
            if let Some(s) = &e.step {
                walk_expr(s, f);
            }
        }
        _ => {}
    }
}

fn collect_calls<'a>(expr: &'a ast::Expr, out: &mut Vec<&'a ast::ExprCall>) {
    walk_expr(expr, &mut |e| {
        if let ast::Expr::Call(c) = e {
            out.push(c);
        }
    });
}

/// Resolves a callee expression: its textual chain (for suffix matching)
/// and its import-qualified resolution (for resolved matching).
pub fn resolve_callee(
    model: &SemanticModel,
    scope: ScopeId,
    callee: &ast::Expr,
    use_offset: u32,
) -> (Option<String>, NameResolution) {
    if let Some(chain) = attr_chain(callee) {
        let raw = chain.join(".");
        let res = model.resolve_chain(scope, &chain, use_offset);
        return (Some(raw), res);
    }

    // Inline constructor chain: `OpenAI(...).chat.completions.create(...)`.
    let mut attrs = Vec::new();
    let mut cur = callee;
    while let ast::Expr::Attribute(a) = cur {
        attrs.push(a.attr.to_string());
        cur = &a.value;
    }
    attrs.reverse();
    let rendered: String = attrs.iter().map(|a| format!(".{a}")).collect();
    let raw = Some(format!("(){rendered}"));

    if let ast::Expr::Call(_) = cur {
        let (root, wrappers) = peel_call_wrappers(cur);
        if let Some(chain) = attr_chain(&root.func) {
            if let NameResolution::Qualified { path, .. } =
                model.resolve_chain(scope, &chain, use_offset)
            {
                let mut full = format!("{path}()");
                for (name, _) in &wrappers {
                    full.push('.');
                    full.push_str(name);
                    full.push_str("()");
                }
                for a in &attrs {
                    full.push('.');
                    full.push_str(a);
                }
                return (
                    raw,
                    NameResolution::Qualified {
                        path: full,
                        client: Some(ClientLink {
                            constructor: root.clone(),
                            scope,
                            offset: use_offset,
                            wrappers,
                        }),
                    },
                );
            }
        }
    }
    (raw, NameResolution::Unresolved)
}

// --- configuration layers -----------------------------------------------------

#[derive(Debug, Clone)]
struct Layer {
    kind: LayerKind,
    call: ast::ExprCall,
    scope: ScopeId,
    offset: u32,
}

/// Builds the ordered configuration layers for a call: the request call,
/// then chained option calls (outermost first), then the constructor.
/// Returns true in the second slot when part of the client chain could not
/// be resolved, i.e. client configuration exists but is invisible.
fn build_layers(
    model: &SemanticModel,
    provider: &Provider,
    call: &ast::ExprCall,
    scope: ScopeId,
    offset: u32,
    resolution: &NameResolution,
) -> (Vec<Layer>, bool) {
    let mut layers = vec![Layer {
        kind: LayerKind::Call,
        call: call.clone(),
        scope,
        offset,
    }];
    let mut unresolved = false;

    let NameResolution::Qualified {
        client: Some(link), ..
    } = resolution
    else {
        return (layers, unresolved);
    };

    let mut current: ClientLink = link.clone();
    for _ in 0..8 {
        for (_, wrapper) in current.wrappers.iter().rev() {
            layers.push(Layer {
                kind: LayerKind::Options,
                call: wrapper.clone(),
                scope: current.scope,
                offset: current.offset,
            });
        }
        let ctor = current.constructor.clone();
        let chainable_method = match ctor.func.as_ref() {
            ast::Expr::Attribute(a) => {
                let m = a.attr.as_str();
                let is_chainable = provider.option_chain_methods.iter().any(|x| x == m)
                    || provider.structured_output_callees.iter().any(|x| x == m);
                is_chainable.then(|| a.value.as_ref().clone())
            }
            _ => None,
        };
        match chainable_method {
            Some(base) => {
                // `llm.with_structured_output(...)`: this call is an options
                // layer; keep digging toward the real constructor.
                layers.push(Layer {
                    kind: LayerKind::Options,
                    call: ctor.clone(),
                    scope: current.scope,
                    offset: current.offset,
                });
                match resolve_client_base(model, current.scope, current.offset, &base) {
                    Some(inner) => current = inner,
                    None => {
                        unresolved = true;
                        return (layers, unresolved);
                    }
                }
            }
            None => {
                layers.push(Layer {
                    kind: LayerKind::Constructor,
                    call: ctor,
                    scope: current.scope,
                    offset: current.offset,
                });
                return (layers, unresolved);
            }
        }
    }
    // Chain deeper than any sane configuration chain: give up, unresolved.
    (layers, true)
}

/// Resolves the base of a chained client-configuration call to its own
/// client link (`llm` in `llm.with_structured_output(...)`).
fn resolve_client_base(
    model: &SemanticModel,
    scope: ScopeId,
    offset: u32,
    base: &ast::Expr,
) -> Option<ClientLink> {
    if let Some(chain) = attr_chain(base) {
        if let NameResolution::Qualified {
            client: Some(link), ..
        } = model.resolve_chain(scope, &chain, offset)
        {
            return Some(link);
        }
        return None;
    }
    if let ast::Expr::Call(_) = base {
        let (root, wrappers) = peel_call_wrappers(base);
        if let Some(chain) = attr_chain(&root.func) {
            if let NameResolution::Qualified { .. } = model.resolve_chain(scope, &chain, offset) {
                return Some(ClientLink {
                    constructor: root.clone(),
                    scope,
                    offset,
                    wrappers,
                });
            }
        }
    }
    None
}

// --- role resolution -----------------------------------------------------------

enum RoleLocation {
    Found {
        expr: ast::Expr,
        layer: LayerKind,
        scope: ScopeId,
        offset: u32,
    },
    /// A container for the role exists but cannot be read statically.
    DynamicContainer {
        layer: LayerKind,
    },
    NotFound {
        obscured: bool,
    },
}

enum Descend {
    Found(ast::Expr),
    Dynamic,
    Obscured,
    Missing,
}

fn locate_role(
    model: &SemanticModel,
    provider: &Provider,
    role: Role,
    layers: &[Layer],
) -> RoleLocation {
    let mut obscured = false;
    for layer in layers {
        for path in provider.role_paths(role) {
            match path {
                ParamPath::CallPositional(n) => {
                    if layer.kind != LayerKind::Call {
                        continue;
                    }
                    match positional(&layer.call, *n) {
                        Descend::Found(expr) => {
                            return RoleLocation::Found {
                                expr,
                                layer: layer.kind,
                                scope: layer.scope,
                                offset: layer.offset,
                            }
                        }
                        Descend::Obscured => obscured = true,
                        _ => {}
                    }
                }
                ParamPath::CtorPositional(n) => {
                    if layer.kind != LayerKind::Constructor {
                        continue;
                    }
                    match positional(&layer.call, *n) {
                        Descend::Found(expr) => {
                            return RoleLocation::Found {
                                expr,
                                layer: layer.kind,
                                scope: layer.scope,
                                offset: layer.offset,
                            }
                        }
                        Descend::Obscured => obscured = true,
                        _ => {}
                    }
                }
                ParamPath::Keyword(segs) => {
                    let kws = &layer.call.keywords;
                    let hit = kws.iter().find(|k| {
                        k.arg
                            .as_ref()
                            .map(|a| a.as_str() == segs[0])
                            .unwrap_or(false)
                    });
                    match hit {
                        Some(k) => match descend(model, layer, &k.value, &segs[1..]) {
                            Descend::Found(expr) => {
                                return RoleLocation::Found {
                                    expr,
                                    layer: layer.kind,
                                    scope: layer.scope,
                                    offset: layer.offset,
                                }
                            }
                            Descend::Dynamic => {
                                return RoleLocation::DynamicContainer { layer: layer.kind }
                            }
                            Descend::Obscured => obscured = true,
                            Descend::Missing => {}
                        },
                        None => {
                            if kws.iter().any(|k| k.arg.is_none()) {
                                obscured = true;
                            }
                        }
                    }
                }
            }
        }
    }
    RoleLocation::NotFound { obscured }
}

fn positional(call: &ast::ExprCall, n: usize) -> Descend {
    let has_star = call
        .args
        .iter()
        .take(n + 1)
        .any(|a| matches!(a, ast::Expr::Starred(_)));
    if has_star {
        return Descend::Obscured;
    }
    match call.args.get(n) {
        Some(expr) => Descend::Found(expr.clone()),
        None => Descend::Missing,
    }
}

/// Walks the remaining path segments through dict literals, config-object
/// constructor keywords, or a resolvable variable holding one of those.
fn descend(model: &SemanticModel, layer: &Layer, expr: &ast::Expr, segs: &[String]) -> Descend {
    if segs.is_empty() {
        return Descend::Found(expr.clone());
    }
    match expr {
        ast::Expr::Dict(d) => {
            let mut opaque_keys = false;
            for (k, v) in d.keys.iter().zip(&d.values) {
                match k {
                    None => opaque_keys = true, // `**merged` inside the dict
                    Some(ast::Expr::Constant(c)) => {
                        if let ast::Constant::Str(s) = &c.value {
                            if s == &segs[0] {
                                return descend(model, layer, v, &segs[1..]);
                            }
                        }
                    }
                    Some(_) => opaque_keys = true,
                }
            }
            if opaque_keys {
                Descend::Obscured
            } else {
                Descend::Missing
            }
        }
        ast::Expr::Call(c) => {
            // Config objects: GenerationConfig(temperature=...), etc.
            for k in &c.keywords {
                match &k.arg {
                    Some(a) if a.as_str() == segs[0] => {
                        return descend(model, layer, &k.value, &segs[1..])
                    }
                    _ => {}
                }
            }
            if c.keywords.iter().any(|k| k.arg.is_none()) {
                Descend::Obscured
            } else {
                Descend::Missing
            }
        }
        ast::Expr::Name(_) => match model.resolve_to_expr(layer.scope, expr, layer.offset) {
            Some((inner, _)) if matches!(inner, ast::Expr::Dict(_) | ast::Expr::Call(_)) => {
                descend(model, layer, &inner, segs)
            }
            _ => Descend::Dynamic,
        },
        _ => Descend::Dynamic,
    }
}

fn resolve_role(
    model: &SemanticModel,
    provider: &Provider,
    role: Role,
    layers: &[Layer],
) -> ResolvedRole {
    match locate_role(model, provider, role, layers) {
        RoleLocation::Found {
            expr,
            layer,
            scope,
            offset,
        } => {
            let value = match model.fold(scope, &expr, offset) {
                Folded::Literal(v) => RoleValue::Literal(v),
                Folded::Ref { name, value } => RoleValue::ConstRef { name, value },
                Folded::Opaque => RoleValue::Dynamic,
            };
            ResolvedRole {
                value,
                layer: Some(layer),
            }
        }
        RoleLocation::DynamicContainer { layer } => ResolvedRole {
            value: RoleValue::Dynamic,
            layer: Some(layer),
        },
        RoleLocation::NotFound { obscured: true } => ResolvedRole {
            value: RoleValue::Spread,
            layer: None,
        },
        RoleLocation::NotFound { obscured: false } => ResolvedRole {
            value: RoleValue::Absent,
            layer: None,
        },
    }
}

// --- message facts -------------------------------------------------------------

enum Elem {
    System,
    Other,
    Unknown,
}

fn messages_facts(
    model: &SemanticModel,
    provider: &Provider,
    layers: &[Layer],
    flat: &[&ast::Stmt],
    idx: usize,
) -> MessagesFacts {
    // An explicit system-text parameter settles the question on its own. A
    // keyword spread that could hide one keeps a "no system" verdict from
    // ever being proven below.
    let mut system_text_obscured = false;
    match locate_role(model, provider, Role::SystemText, layers) {
        RoleLocation::Found {
            expr,
            scope,
            offset,
            ..
        } => match model.fold(scope, &expr, offset) {
            Folded::Literal(v) | Folded::Ref { value: v, .. } => match &v {
                PyLiteral::Str(s) if !s.is_empty() => {
                    return MessagesFacts {
                        state: MessagesState::HasSystem,
                        note: "system text parameter is set".to_string(),
                    }
                }
                PyLiteral::Str(_) | PyLiteral::None => {}
                _ => {
                    return MessagesFacts {
                        state: MessagesState::HasSystem,
                        note: "system text parameter is set".to_string(),
                    }
                }
            },
            Folded::Opaque => {
                return MessagesFacts {
                    state: MessagesState::HasSystem,
                    note: "system text parameter is set dynamically".to_string(),
                }
            }
        },
        RoleLocation::DynamicContainer { .. } => {
            return MessagesFacts {
                state: MessagesState::HasSystem,
                note: "system text parameter is set dynamically".to_string(),
            }
        }
        RoleLocation::NotFound { obscured } => system_text_obscured = obscured,
    }

    let located = locate_role(model, provider, Role::Messages, layers);
    let RoleLocation::Found {
        expr,
        scope,
        offset,
        ..
    } = located
    else {
        return MessagesFacts {
            state: MessagesState::Unresolved,
            note: "message payload not identified".to_string(),
        };
    };

    let var_name = match &expr {
        ast::Expr::Name(n) => Some(n.id.to_string()),
        _ => None,
    };
    let resolved = if var_name.is_some() {
        match model.resolve_to_expr(scope, &expr, offset) {
            Some((inner, _)) => inner,
            None => {
                return MessagesFacts {
                    state: MessagesState::Unresolved,
                    note: "message list variable is not statically resolvable".to_string(),
                }
            }
        }
    } else {
        expr.clone()
    };

    let facts = match &resolved {
        ast::Expr::List(l) => {
            let mut roles_seen: Vec<String> = Vec::new();
            let mut unknown = false;
            let mut has_system = false;
            for elt in &l.elts {
                match classify_message_elem(model, scope, offset, elt, &mut roles_seen) {
                    Elem::System => has_system = true,
                    Elem::Other => {}
                    Elem::Unknown => unknown = true,
                }
            }
            if let Some(name) = &var_name {
                scan_appends(
                    model,
                    scope,
                    offset,
                    name,
                    flat,
                    idx,
                    &mut roles_seen,
                    &mut has_system,
                    &mut unknown,
                );
            }
            if has_system {
                MessagesFacts {
                    state: MessagesState::HasSystem,
                    note: "system-role message present in list".to_string(),
                }
            } else if !unknown {
                let seen = if roles_seen.is_empty() {
                    "none".to_string()
                } else {
                    roles_seen.join(", ")
                };
                MessagesFacts {
                    state: MessagesState::NoSystem,
                    note: format!("message list fully resolved; roles seen: {seen}"),
                }
            } else {
                MessagesFacts {
                    state: MessagesState::Unresolved,
                    note: "message list contains unresolvable entries".to_string(),
                }
            }
        }
        ast::Expr::Constant(c) if matches!(c.value, ast::Constant::Str(_)) => MessagesFacts {
            state: MessagesState::NoSystem,
            note: "prompt is a plain string".to_string(),
        },
        ast::Expr::JoinedStr(_) => MessagesFacts {
            state: MessagesState::NoSystem,
            note: "prompt is a plain string".to_string(),
        },
        _ => MessagesFacts {
            state: MessagesState::Unresolved,
            note: "message payload is not a resolvable list".to_string(),
        },
    };
    if system_text_obscured && facts.state == MessagesState::NoSystem {
        return MessagesFacts {
            state: MessagesState::Unresolved,
            note: "a keyword spread may carry the system text".to_string(),
        };
    }
    facts
}

fn classify_message_elem(
    model: &SemanticModel,
    scope: ScopeId,
    offset: u32,
    elt: &ast::Expr,
    roles_seen: &mut Vec<String>,
) -> Elem {
    match elt {
        ast::Expr::Dict(d) => {
            let mut role_val: Option<String> = None;
            let mut opaque = false;
            for (k, v) in d.keys.iter().zip(&d.values) {
                match k {
                    None => opaque = true,
                    Some(ast::Expr::Constant(c)) => {
                        if let ast::Constant::Str(s) = &c.value {
                            if s == "role" {
                                match model.fold(scope, v, offset).literal() {
                                    Some(PyLiteral::Str(r)) => role_val = Some(r.clone()),
                                    _ => opaque = true,
                                }
                            }
                        }
                    }
                    Some(_) => opaque = true,
                }
            }
            if opaque {
                return Elem::Unknown;
            }
            match role_val {
                Some(r) => {
                    roles_seen.push(r.clone());
                    if r == "system" || r == "developer" {
                        Elem::System
                    } else {
                        Elem::Other
                    }
                }
                // Literal dict without a role key (e.g. content-only parts).
                None => Elem::Other,
            }
        }
        ast::Expr::Tuple(t) => match t.elts.first() {
            Some(first) => match model.fold(scope, first, offset).literal() {
                Some(PyLiteral::Str(r)) => {
                    roles_seen.push(r.clone());
                    if r == "system" || r == "developer" {
                        Elem::System
                    } else {
                        Elem::Other
                    }
                }
                _ => Elem::Unknown,
            },
            None => Elem::Other,
        },
        ast::Expr::Call(c) => {
            let name = match attr_chain(&c.func) {
                Some(chain) => chain.last().cloned().unwrap_or_default(),
                None => return Elem::Unknown,
            };
            match name.as_str() {
                "SystemMessage" | "SystemMessagePromptTemplate" => {
                    roles_seen.push("system".to_string());
                    Elem::System
                }
                "HumanMessage" | "AIMessage" | "UserMessage" | "ToolMessage" => {
                    roles_seen.push(name.to_lowercase().replace("message", ""));
                    Elem::Other
                }
                "ChatMessage" => {
                    let role = c.keywords.iter().find_map(|k| {
                        k.arg.as_ref().filter(|a| a.as_str() == "role").map(|_| {
                            model
                                .fold(scope, &k.value, offset)
                                .literal()
                                .and_then(|l| l.as_str().map(str::to_string))
                        })
                    });
                    match role.flatten() {
                        Some(r) => {
                            roles_seen.push(r.clone());
                            if r == "system" || r == "developer" {
                                Elem::System
                            } else {
                                Elem::Other
                            }
                        }
                        None => Elem::Unknown,
                    }
                }
                _ => Elem::Unknown,
            }
        }
        ast::Expr::Constant(c) if matches!(c.value, ast::Constant::Str(_)) => Elem::Other,
        ast::Expr::Name(_) => match model.resolve_to_expr(scope, elt, offset) {
            Some((inner, _)) if !matches!(inner, ast::Expr::Name(_)) => {
                classify_message_elem(model, scope, offset, &inner, roles_seen)
            }
            _ => Elem::Unknown,
        },
        ast::Expr::Starred(_) => Elem::Unknown,
        _ => Elem::Unknown,
    }
}

/// Accounts for `msgs.append({...})`-style mutation between the list's
/// construction and the call, within the same function body.
#[allow(clippy::too_many_arguments)]
fn scan_appends(
    model: &SemanticModel,
    scope: ScopeId,
    offset: u32,
    var: &str,
    flat: &[&ast::Stmt],
    idx: usize,
    roles_seen: &mut Vec<String>,
    has_system: &mut bool,
    unknown: &mut bool,
) {
    for stmt in flat.iter().take(idx) {
        let ast::Stmt::Expr(es) = stmt else { continue };
        let ast::Expr::Call(c) = es.value.as_ref() else {
            continue;
        };
        let ast::Expr::Attribute(a) = c.func.as_ref() else {
            continue;
        };
        let ast::Expr::Name(base) = a.value.as_ref() else {
            continue;
        };
        if base.id.as_str() != var {
            continue;
        }
        let arg = match a.attr.as_str() {
            "append" => c.args.first(),
            "insert" => c.args.get(1),
            "extend" => {
                match c.args.first() {
                    Some(ast::Expr::List(l)) => {
                        for elt in &l.elts {
                            match classify_message_elem(model, scope, offset, elt, roles_seen) {
                                Elem::System => *has_system = true,
                                Elem::Other => {}
                                Elem::Unknown => *unknown = true,
                            }
                        }
                    }
                    Some(_) => *unknown = true,
                    None => {}
                }
                continue;
            }
            _ => continue,
        };
        match arg {
            Some(elt) => match classify_message_elem(model, scope, offset, elt, roles_seen) {
                Elem::System => *has_system = true,
                Elem::Other => {}
                Elem::Unknown => *unknown = true,
            },
            None => *unknown = true,
        }
    }
}

// --- consumption facts -----------------------------------------------------------

fn consumption_facts(
    model: &SemanticModel,
    scope: ScopeId,
    flat: &[&ast::Stmt],
    idx: usize,
    call: &ast::ExprCall,
) -> ConsumptionFacts {
    let call_range = (call.range().start().to_u32(), call.range().end().to_u32());
    let mut tainted: BTreeSet<String> = BTreeSet::new();
    let mut sinks: Vec<ParseSink> = Vec::new();
    let mut methods: BTreeSet<String> = BTreeSet::new();

    for stmt in flat.iter().skip(idx) {
        // Detect sinks and result methods in this statement's expressions.
        let mut calls = Vec::new();
        for expr in own_exprs(stmt) {
            collect_calls(expr, &mut calls);
        }
        for c in &calls {
            let c_range = (c.range().start().to_u32(), c.range().end().to_u32());
            if c_range == call_range {
                continue;
            }
            if let Some((kind, callee)) = sink_kind(model, scope, c) {
                if args_touch_result(c, &tainted, call_range) {
                    let (line, _) = model.location(c.range().start().to_u32());
                    sinks.push(ParseSink { kind, callee, line });
                }
            }
            if let ast::Expr::Attribute(a) = c.func.as_ref() {
                if expr_base_tainted(&a.value, &tainted, call_range) {
                    methods.insert(a.attr.to_string());
                }
            }
        }

        // Propagate (or kill) taint through assignment-like statements.
        match stmt {
            ast::Stmt::Assign(s) => {
                let src = expr_base_tainted(&s.value, &tainted, call_range);
                for target in &s.targets {
                    update_taint(target, src, &mut tainted);
                }
            }
            ast::Stmt::AnnAssign(s) => {
                if let Some(v) = &s.value {
                    let src = expr_base_tainted(v, &tainted, call_range);
                    update_taint(&s.target, src, &mut tainted);
                }
            }
            ast::Stmt::With(s) => {
                for item in &s.items {
                    if let Some(vars) = &item.optional_vars {
                        if expr_base_tainted(&item.context_expr, &tainted, call_range) {
                            update_taint(vars, true, &mut tainted);
                        }
                    }
                }
            }
            ast::Stmt::AsyncWith(s) => {
                for item in &s.items {
                    if let Some(vars) = &item.optional_vars {
                        if expr_base_tainted(&item.context_expr, &tainted, call_range) {
                            update_taint(vars, true, &mut tainted);
                        }
                    }
                }
            }
            ast::Stmt::For(s) if expr_base_tainted(&s.iter, &tainted, call_range) => {
                update_taint(&s.target, true, &mut tainted);
            }
            ast::Stmt::AsyncFor(s) if expr_base_tainted(&s.iter, &tainted, call_range) => {
                update_taint(&s.target, true, &mut tainted);
            }
            _ => {}
        }
    }

    ConsumptionFacts {
        sinks,
        result_methods: methods.into_iter().collect(),
    }
}

fn update_taint(target: &ast::Expr, tainted_src: bool, tainted: &mut BTreeSet<String>) {
    match target {
        ast::Expr::Name(n) => {
            if tainted_src {
                tainted.insert(n.id.to_string());
            } else {
                tainted.remove(n.id.as_str());
            }
        }
        ast::Expr::Tuple(t) => {
            for elt in &t.elts {
                update_taint(elt, tainted_src, tainted);
            }
        }
        ast::Expr::List(l) => {
            for elt in &l.elts {
                update_taint(elt, tainted_src, tainted);
            }
        }
        ast::Expr::Starred(s) => update_taint(&s.value, tainted_src, tainted),
        _ => {}
    }
}

/// Is this expression rooted in the LLM call result? Peels attribute,
/// subscript, await, and method-call links down to the base.
fn expr_base_tainted(expr: &ast::Expr, tainted: &BTreeSet<String>, call_range: (u32, u32)) -> bool {
    let mut cur = expr;
    loop {
        if let ast::Expr::Call(c) = cur {
            let r = (c.range().start().to_u32(), c.range().end().to_u32());
            if r == call_range {
                return true;
            }
        }
        match cur {
            ast::Expr::Attribute(a) => cur = &a.value,
            ast::Expr::Subscript(s) => cur = &s.value,
            ast::Expr::Await(a) => cur = &a.value,
            ast::Expr::Starred(s) => cur = &s.value,
            ast::Expr::Call(c) => cur = &c.func,
            ast::Expr::Name(n) => return tainted.contains(n.id.as_str()),
            _ => return false,
        }
    }
}

/// Does any argument of this (sink) call carry the result — either the LLM
/// call expression itself or a tainted name anywhere inside an argument?
fn args_touch_result(
    call: &ast::ExprCall,
    tainted: &BTreeSet<String>,
    call_range: (u32, u32),
) -> bool {
    let mut hit = false;
    let mut check = |e: &ast::Expr| {
        if hit {
            return;
        }
        match e {
            ast::Expr::Name(n) if tainted.contains(n.id.as_str()) => hit = true,
            ast::Expr::Call(c) => {
                let r = (c.range().start().to_u32(), c.range().end().to_u32());
                if r == call_range {
                    hit = true;
                }
            }
            _ => {}
        }
    };
    for arg in &call.args {
        walk_expr(arg, &mut check);
    }
    for kw in &call.keywords {
        walk_expr(&kw.value, &mut check);
    }
    hit
}

/// Recognizes parser entry points that consume model output as data.
fn sink_kind(
    model: &SemanticModel,
    scope: ScopeId,
    call: &ast::ExprCall,
) -> Option<(ParseSinkKind, String)> {
    let offset = call.range().start().to_u32();
    let (raw, resolution) = resolve_callee(model, scope, &call.func, offset);
    if let NameResolution::Qualified { path, .. } = &resolution {
        let kind = match path.as_str() {
            "json.loads" | "json.load" => Some(ParseSinkKind::JsonParse),
            "ast.literal_eval" => Some(ParseSinkKind::EvalLiteral),
            _ if path.ends_with("JSONDecoder().decode") => Some(ParseSinkKind::JsonParse),
            _ if path.ends_with(".model_validate_json") || path.ends_with(".parse_raw") => {
                Some(ParseSinkKind::SchemaValidate)
            }
            _ => None,
        };
        if let Some(kind) = kind {
            return Some((kind, raw.unwrap_or_else(|| path.clone())));
        }
    }
    if let Some(raw_chain) = &raw {
        if raw_chain.ends_with(".model_validate_json") || raw_chain.ends_with(".parse_raw") {
            return Some((ParseSinkKind::SchemaValidate, raw_chain.clone()));
        }
    }
    None
}
