use std::fmt::Write as _;

use dg_operad::free::{FreeOperad, TruncationParams};
use dg_operad::operad::{check_operad, CheckOptions, Forgetful, Symmetrized};
use dg_operad::relations::{check_corollary, check_forget_square, check_free_square, IsoCertificate};
use dg_operad::smodule::{forget_g, free_h, validate_smodule};
use dg_operad::{Error, Execution, Flavor, Operad, SModule, TableOperad, ValidationReport};
use serde_json::{json, Value};

use crate::examples;
use crate::workspace::{parse_workspace, Object, Workspace};

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_TRUNCATION: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(std::path::PathBuf),
    Example(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Show {
    Dims,
    Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Axioms,
    SquareForget,
    SquareFree,
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Validate,
    Free(Show),
    Check(CheckKind),
    Dims,
    Basis,
}

#[derive(Debug, Clone)]
pub struct Request {
    pub verb: Verb,
    pub source: Source,
    pub object: Option<String>,
    pub flavor: Option<Flavor>,
    pub max_arity: Option<usize>,
    pub max_stage: usize,
    pub execution: Execution,
}

/// A failed run that produced no report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn precondition(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PRECONDITION, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Truncation(_) => EXIT_TRUNCATION,
            _ => EXIT_PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

/// The rendered result of a run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

fn load(req: &Request) -> Result<Workspace, Failure> {
    match &req.source {
        Source::Example(name) => {
            let arity = req.max_arity.unwrap_or_else(|| examples::default_arity(name));
            if arity > examples::arity_cap(name) && examples::NAMES.contains(&name.as_str()) {
                return Err(Failure {
                    code: EXIT_TRUNCATION,
                    message: format!("example '{name}' is available up to arity {}", examples::arity_cap(name)),
                });
            }
            examples::example(name, arity).ok_or_else(|| Failure {
                code: EXIT_PARSE,
                message: format!("unknown example '{name}' (expected one of {})", examples::NAMES.join(", ")),
            })
        }
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_PARSE,
                message: format!("{}: {e}", path.display()),
            })?;
            parse_workspace(&text).map_err(|e| Failure {
                code: EXIT_PARSE,
                message: format!("{}: {e}", path.display()),
            })
        }
    }
}

/// The object after the requested change of flavor.
fn convert(obj: &Object, flavor: Option<Flavor>, exec: Execution) -> Object {
    match (obj, flavor) {
        (Object::Module(m), Some(Flavor::Symmetric)) if m.flavor() == Flavor::Nonsymmetric => Object::Module(free_h(m)),
        (Object::Module(m), Some(Flavor::Nonsymmetric)) if m.flavor() == Flavor::Symmetric => Object::Module(forget_g(m)),
        (Object::Operad(p), Some(Flavor::Symmetric)) if p.flavor() == Flavor::Nonsymmetric => {
            Object::Operad(TableOperad::tabulate(&Symmetrized::new(p), exec))
        }
        (Object::Operad(p), Some(Flavor::Nonsymmetric)) if p.flavor() == Flavor::Symmetric => {
            Object::Operad(TableOperad::tabulate(&Forgetful::new(p), exec))
        }
        _ => obj.clone(),
    }
}

fn carrier(obj: &Object) -> &SModule {
    match obj {
        Object::Module(m) => m,
        Object::Operad(p) => p.carrier(),
    }
}

fn object_arity(obj: &Object) -> usize {
    match obj {
        Object::Module(m) => m.max_arity(),
        Object::Operad(p) => p.max_arity(),
    }
}

fn report_json(r: &ValidationReport) -> Value {
    json!({
        "subject": r.subject,
        "valid": r.is_valid(),
        "checked": r.checked,
        "unavailable": r.unavailable,
        "failures": r.failures.iter().map(|f| json!({
            "check": f.check,
            "location": f.location,
            "detail": f.detail,
            "signatures": f.signatures,
        })).collect::<Vec<_>>(),
    })
}

fn dims_table(m: &SModule, max_arity: usize, text: &mut String) -> Value {
    let mut rows = Vec::new();
    for n in 0..=max_arity {
        let c = m.component(n);
        let graded: Vec<String> = c.graded_dims().iter().map(|(d, k)| format!("deg {d}: {k}")).collect();
        if graded.is_empty() {
            let _ = writeln!(text, "arity {n}: {}", c.dim());
        } else {
            let _ = writeln!(text, "arity {n}: {}  [{}]", c.dim(), graded.join(", "));
        }
        rows.push(json!({
            "arity": n,
            "dim": c.dim(),
            "graded": c.graded_dims().iter().map(|(d, k)| json!({"degree": d, "dim": k})).collect::<Vec<_>>(),
        }));
    }
    Value::Array(rows)
}

fn basis_table(m: &SModule, max_arity: usize, text: &mut String) -> Value {
    let mut rows = Vec::new();
    for n in 0..=max_arity {
        let c = m.component(n);
        let _ = writeln!(text, "arity {n}:");
        let mut elems = Vec::new();
        for i in 0..c.dim() {
            let _ = writeln!(text, "  {}  (degree {})", c.name(i), c.degree(i));
            elems.push(json!({"name": c.name(i), "degree": c.degree(i)}));
        }
        rows.push(json!({"arity": n, "basis": elems}));
    }
    Value::Array(rows)
}

fn certificate(c: &IsoCertificate, text: &mut String) -> Value {
    let _ = write!(text, "{}", c.report);
    for (n, (l, r)) in c.left_dims.iter().zip(&c.right_dims).enumerate() {
        let _ = writeln!(text, "arity {n}: {l} = {r}");
    }
    let _ = writeln!(text, "certified: {}", if c.is_certified() { "yes" } else { "no" });
    json!({
        "report": report_json(&c.report),
        "left_dims": c.left_dims,
        "right_dims": c.right_dims,
        "certified": c.is_certified(),
    })
}

fn select<'a>(ws: &'a Workspace, name: Option<&str>) -> Result<(&'a str, &'a Object), Failure> {
    match name {
        None => Ok(ws.objects.first().map(|(n, o)| (n.as_str(), o)).expect("workspaces are nonempty")),
        Some(n) => ws
            .objects
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, o)| (m.as_str(), o))
            .ok_or_else(|| Failure::precondition(format!("no object named '{n}'"))),
    }
}

fn bound(req: &Request, obj: &Object) -> Result<usize, Failure> {
    let stored = object_arity(obj);
    match req.max_arity {
        Some(a) if matches!(obj, Object::Operad(_)) && a > stored => Err(Failure {
            code: EXIT_TRUNCATION,
            message: format!("requested arity {a} exceeds the stored arity {stored}"),
        }),
        Some(a) => Ok(a),
        None => Ok(stored),
    }
}

fn validate_object(name: &str, obj: &Object, max_arity: usize, exec: Execution) -> Vec<ValidationReport> {
    let mut module = validate_smodule(carrier(obj));
    module.subject = format!("{name}: {}", module.subject);
    let mut out = vec![module];
    if let Object::Operad(p) = obj {
        let mut r = check_operad(p, &CheckOptions::new(max_arity).with_execution(exec));
        r.subject = format!("{name}: operad axioms up to arity {max_arity}");
        out.push(r);
    }
    out
}

/// Runs one request to completion.
pub fn run(req: &Request) -> Result<Outcome, Failure> {
    let ws = load(req)?;
    let exec = req.execution;
    let mut text = String::new();
    let mut doc = serde_json::Map::new();
    doc.insert("field".into(), json!(ws.field.to_string()));
    let mut code = EXIT_OK;
    match req.verb {
        Verb::Validate => {
            let chosen: Vec<(&str, &Object)> = match &req.object {
                Some(n) => vec![select(&ws, Some(n))?],
                None => ws.objects.iter().map(|(n, o)| (n.as_str(), o)).collect(),
            };
            let mut reports = Vec::new();
            for (name, obj) in chosen {
                let obj = convert(obj, req.flavor, exec);
                let arity = bound(req, &obj)?;
                for r in validate_object(name, &obj, arity, exec) {
                    let _ = write!(text, "{r}");
                    if !r.is_valid() {
                        code = EXIT_INVALID;
                    }
                    reports.push(report_json(&r));
                }
            }
            doc.insert("reports".into(), Value::Array(reports));
        }
        Verb::Dims | Verb::Basis => {
            let (name, obj) = select(&ws, req.object.as_deref())?;
            let obj = convert(obj, req.flavor, exec);
            let arity = bound(req, &obj)?;
            let m = carrier(&obj);
            let _ = writeln!(text, "{name} ({}, {})", obj.kind(), m.flavor());
            doc.insert("object".into(), json!(name));
            doc.insert("flavor".into(), json!(m.flavor().to_string()));
            let table = if req.verb == Verb::Dims {
                dims_table(m, arity, &mut text)
            } else {
                basis_table(m, arity, &mut text)
            };
            doc.insert(if req.verb == Verb::Dims { "dims" } else { "basis" }.into(), table);
        }
        Verb::Free(show) => {
            let (name, obj) = select(&ws, req.object.as_deref())?;
            let obj = convert(obj, req.flavor, exec);
            let params = TruncationParams::new(req.max_arity.unwrap_or(4), req.max_stage);
            let f = FreeOperad::with_execution(carrier(&obj), params, exec)?;
            let flavor = f.carrier().flavor();
            let _ = writeln!(
                text,
                "F({name}) {flavor}, max arity {}, max stage {}",
                params.max_arity, params.max_stage
            );
            doc.insert("object".into(), json!(name));
            doc.insert("flavor".into(), json!(flavor.to_string()));
            doc.insert("max_arity".into(), json!(params.max_arity));
            doc.insert("max_stage".into(), json!(params.max_stage));
            let table = match show {
                Show::Dims => dims_table(f.carrier(), params.max_arity, &mut text),
                Show::Basis => basis_table(f.carrier(), params.max_arity, &mut text),
            };
            doc.insert(if show == Show::Dims { "dims" } else { "basis" }.into(), table);
        }
        Verb::Check(kind) => {
            let (name, obj) = select(&ws, req.object.as_deref())?;
            let obj = convert(obj, req.flavor, exec);
            doc.insert("object".into(), json!(name));
            let params = TruncationParams::new(req.max_arity.unwrap_or(4), req.max_stage);
            let (valid, value) = match (kind, &obj) {
                (CheckKind::Axioms, Object::Operad(p)) => {
                    let arity = bound(req, &obj)?;
                    let r = check_operad(p, &CheckOptions::new(arity).with_execution(exec));
                    let _ = write!(text, "{r}");
                    (r.is_valid(), report_json(&r))
                }
                (CheckKind::SquareForget, Object::Operad(p)) => {
                    let arity = bound(req, &obj)?;
                    let r = check_forget_square(p, arity)?;
                    let _ = write!(text, "{r}");
                    (r.is_valid(), report_json(&r))
                }
                (CheckKind::Axioms | CheckKind::SquareForget, _) => {
                    return Err(Failure::precondition(format!("'{name}' is a {}, not an operad", obj.kind())));
                }
                (CheckKind::SquareFree, _) => {
                    let c = check_free_square(carrier(&obj), params, exec)?;
                    (c.is_certified(), certificate(&c, &mut text))
                }
                (CheckKind::Corollary, _) => {
                    let c = check_corollary(carrier(&obj), params, exec)?;
                    (c.is_certified(), certificate(&c, &mut text))
                }
            };
            if !valid {
                code = EXIT_INVALID;
            }
            doc.insert("result".into(), value);
        }
    }
    doc.insert("status".into(), json!(if code == EXIT_OK { "pass" } else { "fail" }));
    Ok(Outcome {
        text,
        json: Value::Object(doc),
        code,
    })
}
