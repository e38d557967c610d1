//! UPPAAL export in XTA text format.
//!
//! UPPAAL has no bounded leads-to operator, so the exported network carries
//! an observer: a global clock `z` and a flag `armed`. Edges entering a
//! stimulus location are split on `armed`; the unarmed copy sets the flag and
//! resets `z`. Edges entering a response location clear the flag. The
//! property is then the invariant `A[] (armed imply z <= d)`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use super::FrontendError;
use crate::ta::{ClockConstraint, ClockIndex, Network, SyncDirection, TimedAutomaton};
use crate::verifier::{Query, StateFormula};

const OBSERVER_CLOCK: &str = "z";
const OBSERVER_FLAG: &str = "armed";

const KEYWORDS: &[&str] = &[
    "chan",
    "clock",
    "bool",
    "int",
    "process",
    "state",
    "init",
    "trans",
    "guard",
    "sync",
    "assign",
    "system",
    "urgent",
    "broadcast",
    "commit",
    "committed",
    "const",
    "true",
    "false",
    "imply",
    "and",
    "or",
    "not",
    "void",
    "return",
    "if",
    "else",
    "for",
    "while",
    "do",
    "struct",
    "typedef",
    "select",
    "meta",
    "priority",
    "progress",
    "forall",
    "exists",
    "scalar",
    "default",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UppaalExport {
    pub model: String,
    pub query: String,
}

fn identifier(raw: &str) -> Result<String, FrontendError> {
    let id = raw.replace('.', "_");
    let mut chars = id.chars();
    let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&id.as_str());
    if ok {
        Ok(id)
    } else {
        Err(FrontendError::UnsupportedFeature(format!(
            "`{raw}` is not a valid identifier"
        )))
    }
}

fn local<'a>(a: &TimedAutomaton, name: &'a str) -> &'a str {
    name.strip_prefix(a.name())
        .and_then(|s| s.strip_prefix('.'))
        .unwrap_or(name)
}

/// Location atoms of a disjunction of atoms.
fn atom_set(net: &Network, f: &StateFormula) -> Result<HashSet<(usize, usize)>, FrontendError> {
    let atoms = match f {
        StateFormula::Atom { .. } => vec![f],
        StateFormula::Or(parts) if parts.iter().all(|p| matches!(p, StateFormula::Atom { .. })) => {
            parts.iter().collect()
        }
        StateFormula::And(parts) if parts.len() == 1 => return atom_set(net, &parts[0]),
        _ => {
            return Err(FrontendError::UnsupportedFeature(format!(
                "only disjunctions of locations can be exported, got `{f}`"
            )))
        }
    };
    let resolved = StateFormula::Or(atoms.into_iter().cloned().collect()).resolve(net)?;
    let mut set = HashSet::new();
    collect_atoms(&resolved, &mut set);
    Ok(set)
}

fn collect_atoms(f: &crate::verifier::ResolvedFormula, out: &mut HashSet<(usize, usize)>) {
    use crate::verifier::ResolvedFormula as R;
    match f {
        R::Atom(a, l) => {
            out.insert((*a, *l));
        }
        R::And(parts) | R::Or(parts) => parts.iter().for_each(|p| collect_atoms(p, out)),
    }
}

fn constraint(clocks: &[String], c: &ClockConstraint) -> String {
    c.render(|i: ClockIndex| clocks[i.get() - 1].clone())
}

/// Exports `net` with the observer for `query`.
pub fn export_uppaal(net: &Network, query: &Query) -> Result<UppaalExport, FrontendError> {
    let stim = atom_set(net, &query.stimulus)?;
    let resp = atom_set(net, &query.response)?;

    let mut globals: HashSet<String> = [OBSERVER_CLOCK, OBSERVER_FLAG].iter().map(|s| s.to_string()).collect();
    let mut channels = BTreeSet::new();
    for ch in net.channels() {
        let id = identifier(ch)?;
        if !globals.insert(id.clone()) {
            return Err(FrontendError::UnsupportedFeature(format!(
                "channel `{ch}` clashes with another name"
            )));
        }
        channels.insert(id);
    }
    let mut procs = Vec::new();
    for a in net.automata() {
        let id = identifier(a.name())?;
        if !globals.insert(id.clone()) {
            return Err(FrontendError::UnsupportedFeature(format!(
                "automaton `{}` clashes with another name",
                a.name()
            )));
        }
        procs.push(id);
    }

    let init = net.initial_locations();
    let init_armed = init.iter().enumerate().any(|(a, &l)| stim.contains(&(a, l)))
        && !init.iter().enumerate().any(|(a, &l)| resp.contains(&(a, l)));

    let mut out = String::new();
    let _ = writeln!(
        out,
        "// bounded response observer: {} --> {} within {}",
        query.stimulus, query.response, query.bound
    );
    if !channels.is_empty() {
        let _ = writeln!(out, "chan {};", channels.into_iter().collect::<Vec<_>>().join(", "));
    }
    let _ = writeln!(out, "clock {OBSERVER_CLOCK};");
    let _ = writeln!(out, "bool {OBSERVER_FLAG} = {init_armed};");

    for (ai, a) in net.automata().iter().enumerate() {
        let mut scope: HashSet<String> = globals.clone();
        let clocks = a
            .clock_names()
            .iter()
            .map(|c| {
                let id = identifier(local(a, c))?;
                if !scope.insert(id.clone()) {
                    return Err(FrontendError::UnsupportedFeature(format!(
                        "clock `{c}` clashes with another name"
                    )));
                }
                Ok(id)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let locs = a
            .locations()
            .iter()
            .map(|l| {
                let id = identifier(local(a, &l.id))?;
                if !scope.insert(id.clone()) {
                    return Err(FrontendError::UnsupportedFeature(format!(
                        "location `{}` clashes with another name",
                        l.id
                    )));
                }
                Ok(id)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let _ = writeln!(out, "\nprocess {}() {{", procs[ai]);
        if !clocks.is_empty() {
            let _ = writeln!(out, "clock {};", clocks.join(", "));
        }
        let _ = writeln!(out, "state");
        let n = a.locations().len();
        for (li, l) in a.locations().iter().enumerate() {
            let sep = if li + 1 == n { ";" } else { "," };
            if l.invariant.is_empty() {
                let _ = writeln!(out, "    {}{sep}", locs[li]);
            } else {
                let inv: Vec<_> = l.invariant.iter().map(|c| constraint(&clocks, c)).collect();
                let _ = writeln!(out, "    {} {{ {} }}{sep}", locs[li], inv.join(" && "));
            }
        }
        let _ = writeln!(out, "init {};", locs[a.initial_index()]);

        let mut trans = Vec::new();
        for (k, e) in a.edges().iter().enumerate() {
            let (s, t) = a.endpoints(k);
            let guard: Vec<String> = e.guard.iter().map(|c| constraint(&clocks, c)).collect();
            let sync = e.sync.as_ref().map(|s| {
                let sym = match s.direction {
                    SyncDirection::Emit => '!',
                    SyncDirection::Receive => '?',
                };
                format!("{}{sym}", s.channel.replace('.', "_"))
            });
            let resets: Vec<String> = e
                .resets
                .iter()
                .map(|x| format!("{} = 0", clocks[x.get() - 1]))
                .collect();
            let mut emit = |extra_guard: Option<&str>, extra_assign: &[String]| {
                let mut g = guard.clone();
                g.extend(extra_guard.map(str::to_string));
                let mut asg = resets.clone();
                asg.extend_from_slice(extra_assign);
                let mut body = Vec::new();
                if !g.is_empty() {
                    body.push(format!("guard {};", g.join(" && ")));
                }
                if let Some(s) = &sync {
                    body.push(format!("sync {s};"));
                }
                if !asg.is_empty() {
                    body.push(format!("assign {};", asg.join(", ")));
                }
                let body = if body.is_empty() {
                    String::new()
                } else {
                    format!(" {} ", body.join(" "))
                };
                trans.push(format!("{} -> {} {{{body}}}", locs[s], locs[t]));
            };
            if resp.contains(&(ai, t)) {
                emit(None, &[format!("{OBSERVER_FLAG} = false")]);
            } else if stim.contains(&(ai, t)) {
                emit(
                    Some(&format!("!{OBSERVER_FLAG}")),
                    &[format!("{OBSERVER_FLAG} = true"), format!("{OBSERVER_CLOCK} = 0")],
                );
                emit(Some(OBSERVER_FLAG), &[]);
            } else {
                emit(None, &[]);
            }
        }
        if !trans.is_empty() {
            let _ = writeln!(out, "trans");
            let n = trans.len();
            for (i, t) in trans.iter().enumerate() {
                let _ = writeln!(out, "    {t}{}", if i + 1 == n { ";" } else { "," });
            }
        }
        let _ = writeln!(out, "}}");
    }
    let _ = writeln!(out, "\nsystem {};", procs.join(", "));

    let query = format!(
        "// {} --> {} within {}\nA[] ({OBSERVER_FLAG} imply {OBSERVER_CLOCK} <= {})\n",
        query.stimulus, query.response, query.bound, query.bound
    );
    Ok(UppaalExport { model: out, query })
}

/// Syntax error in an XTA document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct XtaError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XtaLocation {
    pub name: String,
    pub invariant: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XtaTransition {
    pub source: String,
    pub target: String,
    pub guard: Option<String>,
    pub sync: Option<String>,
    pub assign: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XtaProcess {
    pub name: String,
    pub clocks: Vec<String>,
    pub locations: Vec<XtaLocation>,
    pub init: String,
    pub transitions: Vec<XtaTransition>,
}

/// The subset of XTA produced by [`export_uppaal`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct XtaDocument {
    pub channels: Vec<String>,
    pub clocks: Vec<String>,
    pub bools: Vec<String>,
    pub processes: Vec<XtaProcess>,
    pub system: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(&'static str),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const PUNCT: &[&str] = &[
    "->", "&&", "||", "<=", ">=", "==", "!=", "<", ">", "=", "!", "?", "{", "}", "(", ")", ",", ";", "-",
];

impl Lexer {
    fn new(text: &str) -> Result<Self, XtaError> {
        let mut toks = Vec::new();
        for (n, raw_line) in text.lines().enumerate() {
            let line = n + 1;
            let code = raw_line.split("//").next().unwrap_or("");
            let bytes = code.as_bytes();
            let mut i = 0;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_whitespace() {
                    i += 1;
                } else if c.is_ascii_alphabetic() || c == '_' {
                    let start = i;
                    while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    toks.push((Tok::Ident(code[start..i].to_string()), line));
                } else if c.is_ascii_digit() {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let v = code[start..i].parse().map_err(|_| XtaError {
                        line,
                        message: "integer out of range".into(),
                    })?;
                    toks.push((Tok::Int(v), line));
                } else if let Some(p) = PUNCT.iter().find(|p| code[i..].starts_with(**p)) {
                    toks.push((Tok::Punct(p), line));
                    i += p.len();
                } else {
                    return Err(XtaError {
                        line,
                        message: format!("unexpected character `{c}`"),
                    });
                }
            }
        }
        Ok(Lexer { toks, pos: 0 })
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, XtaError> {
        Err(XtaError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_ident(&self, id: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == id)
    }

    fn punct(&mut self, p: &str) -> Result<(), XtaError> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), XtaError> {
        if self.is_ident(k) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    fn ident(&mut self) -> Result<String, XtaError> {
        match self.next() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err("expected identifier")
            }
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, XtaError> {
        let mut ids = vec![self.ident()?];
        while self.is_punct(",") {
            self.pos += 1;
            ids.push(self.ident()?);
        }
        self.punct(";")?;
        Ok(ids)
    }
}

/// Names an expression may refer to.
struct Scope<'a> {
    clocks: Vec<&'a str>,
    bools: &'a [String],
}

impl Scope<'_> {
    fn clock(&self, lx: &Lexer, id: &str) -> Result<(), XtaError> {
        if self.clocks.contains(&id) {
            Ok(())
        } else {
            lx.err(format!("undeclared clock `{id}`"))
        }
    }

    fn flag(&self, lx: &Lexer, id: &str) -> Result<(), XtaError> {
        if self.bools.iter().any(|b| b == id) {
            Ok(())
        } else {
            lx.err(format!("undeclared variable `{id}`"))
        }
    }
}

/// Parses a conjunction of clock constraints and flag tests, returning its
/// source text.
fn conjunction(lx: &mut Lexer, scope: &Scope<'_>) -> Result<String, XtaError> {
    let mut parts = Vec::new();
    loop {
        if lx.is_punct("!") {
            lx.pos += 1;
            let id = lx.ident()?;
            scope.flag(lx, &id)?;
            parts.push(format!("!{id}"));
        } else {
            let id = lx.ident()?;
            let mut lhs = id.clone();
            if lx.is_punct("-") {
                lx.pos += 1;
                let rhs = lx.ident()?;
                scope.clock(lx, &id)?;
                scope.clock(lx, &rhs)?;
                lhs = format!("{id} - {rhs}");
            }
            let op = match lx.peek() {
                Some(Tok::Punct(p)) if ["<", "<=", ">", ">=", "=="].contains(p) => Some(*p),
                _ => None,
            };
            match op {
                Some(op) => {
                    lx.pos += 1;
                    if !lhs.contains(" - ") {
                        scope.clock(lx, &id)?;
                    }
                    let Some(Tok::Int(v)) = lx.next() else {
                        lx.pos -= 1;
                        return lx.err("expected integer constant");
                    };
                    parts.push(format!("{lhs} {op} {v}"));
                }
                None if lhs == id => {
                    scope.flag(lx, &id)?;
                    parts.push(id);
                }
                None => return lx.err("expected comparison"),
            }
        }
        if lx.is_punct("&&") {
            lx.pos += 1;
        } else {
            return Ok(parts.join(" && "));
        }
    }
}

fn assignments(lx: &mut Lexer, scope: &Scope<'_>) -> Result<String, XtaError> {
    let mut parts = Vec::new();
    loop {
        let id = lx.ident()?;
        lx.punct("=")?;
        match lx.next() {
            Some(Tok::Int(0)) => {
                scope.clock(lx, &id)?;
                parts.push(format!("{id} = 0"));
            }
            Some(Tok::Ident(v)) if v == "true" || v == "false" => {
                scope.flag(lx, &id)?;
                parts.push(format!("{id} = {v}"));
            }
            _ => {
                lx.pos -= 1;
                return lx.err("expected `0`, `true` or `false`");
            }
        }
        if lx.is_punct(",") {
            lx.pos += 1;
        } else {
            return Ok(parts.join(", "));
        }
    }
}

fn process(lx: &mut Lexer, doc: &XtaDocument) -> Result<XtaProcess, XtaError> {
    let name = lx.ident()?;
    lx.punct("(")?;
    lx.punct(")")?;
    lx.punct("{")?;
    let mut clocks = Vec::new();
    if lx.is_ident("clock") {
        lx.pos += 1;
        clocks = lx.ident_list()?;
    }
    let scope = Scope {
        clocks: doc.clocks.iter().chain(&clocks).map(String::as_str).collect(),
        bools: &doc.bools,
    };
    lx.keyword("state")?;
    let mut locations = Vec::new();
    loop {
        let loc = lx.ident()?;
        let mut invariant = None;
        if lx.is_punct("{") {
            lx.pos += 1;
            invariant = Some(conjunction(lx, &scope)?);
            lx.punct("}")?;
        }
        if locations.iter().any(|l: &XtaLocation| l.name == loc) {
            return lx.err(format!("duplicate location `{loc}`"));
        }
        locations.push(XtaLocation { name: loc, invariant });
        if lx.is_punct(",") {
            lx.pos += 1;
        } else {
            lx.punct(";")?;
            break;
        }
    }
    let known = |l: &str| locations.iter().any(|x| x.name == l);
    lx.keyword("init")?;
    let init = lx.ident()?;
    if !known(&init) {
        return lx.err(format!("unknown initial location `{init}`"));
    }
    lx.punct(";")?;
    let mut transitions = Vec::new();
    if lx.is_ident("trans") {
        lx.pos += 1;
        loop {
            let source = lx.ident()?;
            lx.punct("->")?;
            let target = lx.ident()?;
            for l in [&source, &target] {
                if !known(l) {
                    return lx.err(format!("unknown location `{l}`"));
                }
            }
            lx.punct("{")?;
            let mut t = XtaTransition {
                source,
                target,
                guard: None,
                sync: None,
                assign: None,
            };
            if lx.is_ident("guard") {
                lx.pos += 1;
                t.guard = Some(conjunction(lx, &scope)?);
                lx.punct(";")?;
            }
            if lx.is_ident("sync") {
                lx.pos += 1;
                let ch = lx.ident()?;
                if !doc.channels.contains(&ch) {
                    return lx.err(format!("undeclared channel `{ch}`"));
                }
                let dir = if lx.is_punct("!") { "!" } else { "?" };
                lx.punct(dir)?;
                lx.punct(";")?;
                t.sync = Some(format!("{ch}{dir}"));
            }
            if lx.is_ident("assign") {
                lx.pos += 1;
                t.assign = Some(assignments(lx, &scope)?);
                lx.punct(";")?;
            }
            lx.punct("}")?;
            transitions.push(t);
            if lx.is_punct(",") {
                lx.pos += 1;
            } else {
                lx.punct(";")?;
                break;
            }
        }
    }
    lx.punct("}")?;
    Ok(XtaProcess {
        name,
        clocks,
        locations,
        init,
        transitions,
    })
}

/// Parses and checks an XTA document of the exported subset.
pub fn parse_xta(text: &str) -> Result<XtaDocument, XtaError> {
    let mut lx = Lexer::new(text)?;
    let mut doc = XtaDocument::default();
    let mut names: HashSet<String> = HashSet::new();
    let fresh = |lx: &Lexer, id: &str, names: &mut HashSet<String>| {
        if names.insert(id.to_string()) {
            Ok(())
        } else {
            lx.err(format!("`{id}` declared twice"))
        }
    };
    while let Some(tok) = lx.peek().cloned() {
        match tok {
            Tok::Ident(k) if k == "chan" => {
                lx.pos += 1;
                for id in lx.ident_list()? {
                    fresh(&lx, &id, &mut names)?;
                    doc.channels.push(id);
                }
            }
            Tok::Ident(k) if k == "clock" => {
                lx.pos += 1;
                for id in lx.ident_list()? {
                    fresh(&lx, &id, &mut names)?;
                    doc.clocks.push(id);
                }
            }
            Tok::Ident(k) if k == "bool" => {
                lx.pos += 1;
                let id = lx.ident()?;
                fresh(&lx, &id, &mut names)?;
                if lx.is_punct("=") {
                    lx.pos += 1;
                    if !(lx.is_ident("true") || lx.is_ident("false")) {
                        return lx.err("expected `true` or `false`");
                    }
                    lx.pos += 1;
                }
                lx.punct(";")?;
                doc.bools.push(id);
            }
            Tok::Ident(k) if k == "process" => {
                lx.pos += 1;
                let p = process(&mut lx, &doc)?;
                fresh(&lx, &p.name, &mut names)?;
                doc.processes.push(p);
            }
            Tok::Ident(k) if k == "system" => {
                lx.pos += 1;
                doc.system = lx.ident_list()?;
                if lx.peek().is_some() {
                    return lx.err("unexpected input after system declaration");
                }
            }
            _ => return lx.err("expected a declaration"),
        }
    }
    if doc.system.is_empty() {
        return lx.err("missing system declaration");
    }
    let mut seen = HashMap::new();
    for s in &doc.system {
        if !doc.processes.iter().any(|p| &p.name == s) {
            return lx.err(format!("system lists unknown process `{s}`"));
        }
        if seen.insert(s, ()).is_some() {
            return lx.err(format!("process `{s}` instantiated twice"));
        }
    }
    Ok(doc)
}
