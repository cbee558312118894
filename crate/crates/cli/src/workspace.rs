//! Line-oriented workspace files.
//!
//! ```text
//! field Q                       # or: field F 7
//! smodule NAME                  # also: nmodule NAME, operad NAME symmetric|nonsymmetric
//! arity 2
//! gen x 0                       # basis element and its degree
//! gen y 0
//! d x = 0                       # differential, a combination like 2*y - 1/3*z
//! eps x = 1                     # augmentation (default 0)
//! eta = x                       # coaugmentation of the current arity
//! act 1 x = y                   # image under the transposition (k k+1); default identity
//! act 1 y = x
//! unit = e                      # operads: unit in arity 1
//! gamma x ; e e = x             # operads: γ(x; e, e); unlisted entries are zero
//! end
//! ```
//!
//! Names are unique within an object and contain no whitespace.

use std::collections::BTreeMap;
use std::fmt;

use dg_operad::dg::DgaModule;
use dg_operad::{Field, Flavor, Matrix, Scalar, SModule, TableOperad, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug)]
pub enum Object {
    Module(SModule),
    Operad(TableOperad),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Module(m) if m.flavor() == Flavor::Nonsymmetric => "nmodule",
            Object::Module(_) => "smodule",
            Object::Operad(_) => "operad",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Workspace {
    pub field: Field,
    pub objects: Vec<(String, Object)>,
}

impl Workspace {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }
}

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

#[derive(Default)]
struct ArityDraft {
    basis: Vec<(String, i64)>,
    d: BTreeMap<usize, Vec<(String, Scalar)>>,
    eps: BTreeMap<usize, Scalar>,
    eta: Option<Vec<(String, Scalar)>>,
    act: BTreeMap<(usize, usize), Vec<(String, Scalar)>>,
}

struct Draft {
    name: String,
    kind: Kind,
    line: usize,
    arities: BTreeMap<usize, ArityDraft>,
    current: Option<usize>,
    unit: Option<Vec<(String, Scalar)>>,
    gammas: Vec<(usize, String, Vec<String>, Vec<(String, Scalar)>)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    SModule,
    NModule,
    Operad(Flavor),
}

struct Parser {
    field: Option<Field>,
    objects: Vec<(String, Object)>,
    draft: Option<Draft>,
    line: usize,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, column, message: message.into() })
}

fn parse_int<T: std::str::FromStr>(tok: Tok<'_>, line: usize, what: &str) -> Result<T, ParseError> {
    tok.text
        .parse()
        .or_else(|_| err(line, tok.column, format!("expected {what}, found '{}'", tok.text)))
}

fn parse_scalar(text: &str, field: &Field, line: usize, column: usize) -> Result<Scalar, ParseError> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let bad = || ParseError { line, column, message: format!("expected a coefficient, found '{text}'") };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    field.from_fraction(num, den).ok_or_else(|| ParseError {
        line,
        column,
        message: format!("denominator of '{text}' vanishes in {field}"),
    })
}

/// `0`, or terms `[-]c*name` / `[-]name` joined by `+` and `-`.
fn parse_combination(toks: &[Tok<'_>], field: &Field, line: usize) -> Result<Vec<(String, Scalar)>, ParseError> {
    if toks.is_empty() {
        return err(line, 0, "missing right-hand side");
    }
    if toks.len() == 1 && toks[0].text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut negative = false;
    let mut expect_term = true;
    for t in toks {
        match t.text {
            "+" | "-" if !expect_term => {
                negative = t.text == "-";
                expect_term = true;
            }
            _ if expect_term => {
                let (mut text, mut neg) = (t.text, negative);
                if let Some(rest) = text.strip_prefix('-') {
                    text = rest;
                    neg = !neg;
                }
                let (coeff, name) = match text.split_once('*') {
                    Some((c, n)) => (parse_scalar(c, field, line, t.column)?, n),
                    None => (field.one(), text),
                };
                if name.is_empty() {
                    return err(line, t.column, "missing basis name");
                }
                let coeff = if neg { -coeff } else { coeff };
                out.push((name.to_string(), coeff));
                negative = false;
                expect_term = false;
            }
            _ => return err(line, t.column, format!("expected '+' or '-', found '{}'", t.text)),
        }
    }
    if expect_term {
        return err(line, toks.last().unwrap().column, "dangling sign");
    }
    Ok(out)
}

fn split_eq<'a, 'b>(toks: &'b [Tok<'a>], line: usize) -> Result<(&'b [Tok<'a>], &'b [Tok<'a>]), ParseError> {
    match toks.iter().position(|t| t.text == "=") {
        Some(p) => Ok((&toks[..p], &toks[p + 1..])),
        None => err(line, toks.last().map(|t| t.column).unwrap_or(1), "expected '='"),
    }
}

impl Parser {
    fn field(&self, column: usize) -> Result<Field, ParseError> {
        self.field.clone().map_or_else(|| err(self.line, column, "no field declared"), Ok)
    }

    fn draft(&mut self, tok: Tok<'_>) -> Result<&mut Draft, ParseError> {
        let line = self.line;
        self.draft
            .as_mut()
            .ok_or_else(|| ParseError { line, column: tok.column, message: format!("'{}' outside an object", tok.text) })
    }

    fn current_arity(&mut self, tok: Tok<'_>) -> Result<&mut ArityDraft, ParseError> {
        let line = self.line;
        let d = self.draft(tok)?;
        match d.current {
            Some(a) => Ok(d.arities.get_mut(&a).unwrap()),
            None => err(line, tok.column, format!("'{}' before any 'arity' line", tok.text)),
        }
    }

    fn index_in_current(&mut self, tok: Tok<'_>) -> Result<usize, ParseError> {
        let line = self.line;
        let a = self.current_arity(tok)?;
        a.basis
            .iter()
            .position(|(n, _)| n == tok.text)
            .ok_or_else(|| ParseError { line, column: tok.column, message: format!("unknown generator '{}' in this arity", tok.text) })
    }

    fn statement(&mut self, toks: &[Tok<'_>]) -> Result<(), ParseError> {
        let line = self.line;
        let head = toks[0];
        match head.text {
            "field" => {
                if self.field.is_some() {
                    return err(line, head.column, "field declared twice");
                }
                let f = match toks.get(1).map(|t| t.text) {
                    Some("Q") if toks.len() == 2 => Field::Rational,
                    Some("F") if toks.len() == 3 => {
                        let p: u64 = parse_int(toks[2], line, "a prime")?;
                        Field::prime(p).or_else(|e| err(line, toks[2].column, e.to_string()))?
                    }
                    _ => return err(line, head.column, "expected 'field Q' or 'field F <prime>'"),
                };
                self.field = Some(f);
            }
            "smodule" | "nmodule" | "operad" => {
                if self.draft.is_some() {
                    return err(line, head.column, "previous object not closed with 'end'");
                }
                self.field(head.column)?;
                let Some(name) = toks.get(1) else {
                    return err(line, head.column, "missing object name");
                };
                if self.objects.iter().any(|(n, _)| n == name.text) {
                    return err(line, name.column, format!("object '{}' defined twice", name.text));
                }
                let kind = match (head.text, toks.get(2).map(|t| t.text)) {
                    ("smodule", None) => Kind::SModule,
                    ("nmodule", None) => Kind::NModule,
                    ("operad", Some("symmetric")) => Kind::Operad(Flavor::Symmetric),
                    ("operad", Some("nonsymmetric")) => Kind::Operad(Flavor::Nonsymmetric),
                    ("operad", _) => return err(line, head.column, "expected 'operad NAME symmetric|nonsymmetric'"),
                    _ => return err(line, toks[2].column, "unexpected token"),
                };
                self.draft = Some(Draft {
                    name: name.text.to_string(),
                    kind,
                    line,
                    arities: BTreeMap::new(),
                    current: None,
                    unit: None,
                    gammas: Vec::new(),
                });
            }
            "arity" => {
                let n: usize = match toks.get(1) {
                    Some(t) if toks.len() == 2 => parse_int(*t, line, "an arity")?,
                    _ => return err(line, head.column, "expected 'arity N'"),
                };
                let d = self.draft(head)?;
                if d.arities.contains_key(&n) {
                    return err(line, toks[1].column, format!("arity {n} declared twice"));
                }
                d.arities.insert(n, ArityDraft::default());
                d.current = Some(n);
            }
            "gen" => {
                if toks.len() != 3 {
                    return err(line, head.column, "expected 'gen NAME DEGREE'");
                }
                let degree: i64 = parse_int(toks[2], line, "a degree")?;
                let name = toks[1];
                let d = self.draft(head)?;
                if d.arities.values().any(|a| a.basis.iter().any(|(n, _)| n == name.text)) {
                    return err(line, name.column, format!("generator '{}' declared twice", name.text));
                }
                self.current_arity(head)?.basis.push((name.text.to_string(), degree));
            }
            "d" | "eps" => {
                let (lhs, rhs) = split_eq(&toks[1..], line)?;
                if lhs.len() != 1 {
                    return err(line, head.column, format!("expected '{} NAME = …'", head.text));
                }
                let i = self.index_in_current(lhs[0])?;
                let field = self.field(head.column)?;
                if head.text == "d" {
                    let v = parse_combination(rhs, &field, line)?;
                    if self.current_arity(head)?.d.insert(i, v).is_some() {
                        return err(line, lhs[0].column, "differential given twice");
                    }
                } else {
                    if rhs.len() != 1 {
                        return err(line, head.column, "expected a single coefficient");
                    }
                    let s = parse_scalar(rhs[0].text, &field, line, rhs[0].column)?;
                    self.current_arity(head)?.eps.insert(i, s);
                }
            }
            "eta" | "unit" => {
                let (lhs, rhs) = split_eq(&toks[1..], line)?;
                if !lhs.is_empty() {
                    return err(line, lhs[0].column, format!("expected '{} = …'", head.text));
                }
                let field = self.field(head.column)?;
                let v = parse_combination(rhs, &field, line)?;
                if head.text == "eta" {
                    self.current_arity(head)?.eta = Some(v);
                } else {
                    let d = self.draft(head)?;
                    if !matches!(d.kind, Kind::Operad(_)) {
                        return err(line, head.column, "'unit' only applies to operads");
                    }
                    d.unit = Some(v);
                }
            }
            "act" => {
                let (lhs, rhs) = split_eq(&toks[1..], line)?;
                if lhs.len() != 2 {
                    return err(line, head.column, "expected 'act K NAME = …'");
                }
                let k: usize = parse_int(lhs[0], line, "a transposition index")?;
                let d = self.draft(head)?;
                if matches!(d.kind, Kind::NModule | Kind::Operad(Flavor::Nonsymmetric)) {
                    return err(line, head.column, "actions only apply to symmetric objects");
                }
                let n = d.current.unwrap_or(0);
                if k == 0 || k >= n {
                    return err(line, lhs[0].column, format!("transposition index must lie in 1..{}", n.saturating_sub(1)));
                }
                let i = self.index_in_current(lhs[1])?;
                let field = self.field(head.column)?;
                let v = parse_combination(rhs, &field, line)?;
                self.current_arity(head)?.act.insert((k, i), v);
            }
            "gamma" => {
                let (lhs, rhs) = split_eq(&toks[1..], line)?;
                let semi = lhs.iter().position(|t| t.text == ";");
                let (Some(semi), Some(top)) = (semi, lhs.first()) else {
                    return err(line, head.column, "expected 'gamma X ; Y1 … Yh = …'");
                };
                if semi != 1 {
                    return err(line, head.column, "expected 'gamma X ; Y1 … Yh = …'");
                }
                let args: Vec<String> = lhs[2..].iter().map(|t| t.text.to_string()).collect();
                let field = self.field(head.column)?;
                let v = parse_combination(rhs, &field, line)?;
                let d = self.draft(head)?;
                if !matches!(d.kind, Kind::Operad(_)) {
                    return err(line, head.column, "'gamma' only applies to operads");
                }
                d.gammas.push((line, top.text.to_string(), args, v));
            }
            "end" => {
                let d = self.draft.take().ok_or_else(|| ParseError {
                    line,
                    column: head.column,
                    message: "'end' without an open object".into(),
                })?;
                let field = self.field(head.column)?;
                let obj = finish(d, &field, line)?;
                self.objects.push(obj);
            }
            other => return err(line, head.column, format!("unknown keyword '{other}'")),
        }
        Ok(())
    }
}

fn resolve(
    terms: &[(String, Scalar)],
    names: &[(String, i64)],
    line: usize,
) -> Result<Vector, ParseError> {
    let mut v = Vector::new();
    for (n, c) in terms {
        let i = names
            .iter()
            .position(|(b, _)| b == n)
            .ok_or_else(|| ParseError { line, column: 0, message: format!("'{n}' is not a basis element of this arity") })?;
        v.add_term(i, c);
    }
    Ok(v)
}

fn finish(d: Draft, field: &Field, end_line: usize) -> Result<(String, Object), ParseError> {
    let max = d.arities.keys().next_back().copied().unwrap_or(0);
    let mut comps = Vec::with_capacity(max + 1);
    let mut actions = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let a = d.arities.get(&n);
        let basis = a.map(|a| a.basis.clone()).unwrap_or_default();
        let dim = basis.len();
        let mut diff = vec![Vector::new(); dim];
        let mut aug = vec![field.zero(); dim];
        let mut eta = None;
        let mut acts = vec![Matrix::identity(dim, field); n.saturating_sub(1)];
        if let Some(a) = a {
            for (&i, terms) in &a.d {
                diff[i] = resolve(terms, &basis, end_line)?;
            }
            for (&i, s) in &a.eps {
                aug[i] = s.clone();
            }
            if let Some(e) = &a.eta {
                eta = Some(resolve(e, &basis, end_line)?);
            }
            for k in 1..n {
                let cols = (0..dim)
                    .map(|i| match a.act.get(&(k, i)) {
                        Some(terms) => resolve(terms, &basis, end_line),
                        None => Ok(Vector::basis(i, field)),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                acts[k - 1] = Matrix::from_columns(dim, cols);
            }
        }
        let comp = DgaModule::new(field.clone(), basis, diff, aug, eta)
            .or_else(|e| err(end_line, 1, format!("arity {n}: {e}")))?;
        comps.push(comp);
        actions.push(acts);
    }
    let symmetric = matches!(d.kind, Kind::SModule | Kind::Operad(Flavor::Symmetric));
    let carrier = if symmetric {
        SModule::new(field.clone(), comps, actions)
    } else {
        SModule::nonsymmetric(field.clone(), comps)
    }
    .or_else(|e| err(d.line, 1, e.to_string()))?;
    let Kind::Operad(_) = d.kind else {
        return Ok((d.name, Object::Module(carrier)));
    };
    let lookup = |name: &str, line: usize| -> Result<(usize, usize), ParseError> {
        for n in 0..=max {
            if let Some(i) = carrier.component(n).index_of(name) {
                return Ok((n, i));
            }
        }
        err(line, 0, format!("unknown generator '{name}'"))
    };
    let unit_terms = d.unit.as_ref().ok_or_else(|| ParseError {
        line: d.line,
        column: 1,
        message: format!("operad '{}' has no unit", d.name),
    })?;
    let unit_names: Vec<(String, i64)> = carrier.component(1).names().iter().map(|n| (n.clone(), 0)).collect();
    let unit = resolve(unit_terms, &unit_names, d.line)?;
    let mut entries = Vec::with_capacity(d.gammas.len());
    for (line, top, args, value) in &d.gammas {
        let (h, x) = lookup(top, *line)?;
        if h != args.len() {
            return err(*line, 0, format!("'{top}' has arity {h} but {} inputs are given", args.len()));
        }
        let mut sig = vec![h];
        let mut tuple = vec![x];
        for a in args {
            let (ai, yi) = lookup(a, *line)?;
            sig.push(ai);
            tuple.push(yi);
        }
        let n: usize = sig[1..].iter().sum();
        if n > max {
            return err(*line, 0, format!("composite of arity {n} exceeds the declared arities"));
        }
        let names: Vec<(String, i64)> = carrier.component(n).names().iter().map(|s| (s.clone(), 0)).collect();
        let v = resolve(value, &names, *line)?;
        entries.push((sig, tuple, v));
    }
    let op = TableOperad::from_tables(d.name.clone(), carrier, unit, entries).or_else(|e| err(end_line, 1, e.to_string()))?;
    Ok((d.name, Object::Operad(op)))
}

/// Parses a whole workspace file.
pub fn parse_workspace(text: &str) -> Result<Workspace, ParseError> {
    let mut p = Parser { field: None, objects: Vec::new(), draft: None, line: 0 };
    for (k, raw) in text.lines().enumerate() {
        p.line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        p.statement(&toks)?;
    }
    if let Some(d) = &p.draft {
        return err(d.line, 1, format!("object '{}' is missing 'end'", d.name));
    }
    let field = p.field.ok_or_else(|| ParseError { line: 1, column: 1, message: "no field declared".into() })?;
    if p.objects.is_empty() {
        return err(p.line.max(1), 1, "no objects declared");
    }
    Ok(Workspace { field, objects: p.objects })
}
