//! JSON wire formats. Indices are 1-based on the wire; rationals are `"p/q"` strings.
//! Objects are built as `serde_json::Value`, whose maps keep keys sorted.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::abp::{Abp, EdgeId, Format, LinearLabel, Model};
use crate::concise::ConciseReport;
use crate::deborder::DeborderTrace;
use crate::error::{Error, Result};
use crate::flow::DimReport;
use crate::laurent::LaurentEps;
use crate::nisan::MinimizeTranscript;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::tangent::{Certificate, TangentDims};
use crate::tensor::{LayeredTensor, Monomial};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar + Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarWire {
    Plain(String),
    Int(i64),
    Eps { eps_terms: Vec<(i64, ScalarWire)> },
}

fn wire_to_laurent(w: ScalarWire) -> Result<LaurentEps> {
    match w {
        ScalarWire::Plain(s) => Ok(LaurentEps::constant(parse_rational(&s)?)),
        ScalarWire::Int(n) => Ok(LaurentEps::constant(Rational::from_integer(n.into()))),
        ScalarWire::Eps { eps_terms } => {
            let mut out = LaurentEps::zero();
            for (exp, c) in eps_terms {
                let c = wire_to_laurent(c)?
                    .as_rational()
                    .ok_or_else(|| parse_err("nested eps_terms"))?;
                out.add_term(exp, &c);
            }
            Ok(out)
        }
    }
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        let w = ScalarWire::deserialize(v).map_err(|e| parse_err(e.to_string()))?;
        wire_to_laurent(w)?
            .as_rational()
            .ok_or_else(|| parse_err("expected an epsilon-free rational"))
    }
}

impl JsonScalar for LaurentEps {
    /// ε-free values use the plain rational form.
    fn to_json(&self) -> Value {
        match self.as_rational() {
            Some(r) => r.to_json(),
            None => json!({
                "eps_terms": self
                    .terms()
                    .map(|(e, c)| json!([e, format_rational(c)]))
                    .collect::<Vec<_>>()
            }),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        wire_to_laurent(ScalarWire::deserialize(v).map_err(|e| parse_err(e.to_string()))?)
    }
}

pub fn tensor_to_json<T: JsonScalar>(t: &LayeredTensor<T>) -> Value {
    json!({
        "degree": t.degree(),
        "alphabet_sizes": t.alphabet_sizes(),
        "terms": t
            .terms()
            .map(|(m, c)| json!({
                "monomial": m.0.iter().map(|k| k + 1).collect::<Vec<_>>(),
                "coeff": c.to_json(),
            }))
            .collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
struct TensorWire {
    degree: Option<usize>,
    alphabet_sizes: Vec<usize>,
    terms: Vec<TermWire>,
}

#[derive(Deserialize)]
struct TermWire {
    monomial: Vec<usize>,
    coeff: Value,
}

pub fn tensor_from_json<T: JsonScalar>(v: &Value) -> Result<LayeredTensor<T>> {
    let w = TensorWire::deserialize(v).map_err(|e| parse_err(e.to_string()))?;
    if w.degree.is_some_and(|d| d != w.alphabet_sizes.len()) {
        return Err(parse_err("degree does not match alphabet_sizes"));
    }
    let mut t = LayeredTensor::zero(w.alphabet_sizes);
    for term in w.terms {
        if term.monomial.contains(&0) {
            return Err(parse_err("monomial indices are 1-based"));
        }
        let m = Monomial(term.monomial.iter().map(|k| k - 1).collect());
        t.add_term(m, &T::from_json(&term.coeff)?)?;
    }
    Ok(t)
}

fn label_to_json(abp: &Abp, l: &LinearLabel) -> Value {
    let mut terms = Map::new();
    for (v, c) in &l.terms {
        terms.insert(abp.variables[*v].clone(), c.to_json());
    }
    let mut out = Map::new();
    out.insert("terms".into(), Value::Object(terms));
    if !l.constant.is_zero() {
        out.insert("const".into(), l.constant.to_json());
    }
    Value::Object(out)
}

pub fn abp_to_json(abp: &Abp) -> Value {
    let mut out = Map::new();
    out.insert("format".into(), json!(abp.format.widths()));
    out.insert("model".into(), json!(abp.model.as_str()));
    out.insert("variables".into(), json!(abp.variables));
    if abp.affine {
        out.insert("affine".into(), json!(true));
    }
    if let Some(al) = &abp.alphabets {
        let names: Vec<Vec<&str>> = al
            .iter()
            .map(|a| a.iter().map(|v| abp.variables[*v].as_str()).collect())
            .collect();
        out.insert("alphabets".into(), json!(names));
    }
    let edges: Vec<Value> = abp
        .labels
        .iter()
        .map(|(e, l)| {
            json!({
                "layer": e.layer + 1,
                "from": e.from + 1,
                "to": e.to + 1,
                "label": label_to_json(abp, l),
            })
        })
        .collect();
    out.insert("edges".into(), Value::Array(edges));
    Value::Object(out)
}

#[derive(Deserialize)]
struct AbpWire {
    format: Vec<usize>,
    model: String,
    variables: Vec<String>,
    #[serde(default)]
    affine: bool,
    alphabets: Option<Vec<Vec<String>>>,
    edges: Vec<EdgeWire>,
}

#[derive(Deserialize)]
struct EdgeWire {
    layer: usize,
    from: usize,
    to: usize,
    label: LabelWire,
}

#[derive(Deserialize)]
struct LabelWire {
    #[serde(default)]
    terms: BTreeMap<String, Value>,
    #[serde(rename = "const")]
    constant: Option<Value>,
}

pub fn abp_from_json(v: &Value) -> Result<Abp> {
    let w = AbpWire::deserialize(v).map_err(|e| parse_err(e.to_string()))?;
    let model = match w.model.as_str() {
        "trace" => Model::Trace,
        "single" => Model::Single,
        other => return Err(parse_err(format!("unknown model {other:?}, expected trace or single"))),
    };
    let mut abp = Abp::new(Format::new(w.format)?, model, w.variables);
    abp.affine = w.affine;
    let lookup = |abp: &Abp, name: &str| {
        abp.variable_id(name)
            .ok_or_else(|| parse_err(format!("unknown variable {name:?}")))
    };
    if let Some(al) = w.alphabets {
        abp.alphabets = Some(
            al.iter()
                .map(|a| a.iter().map(|n| lookup(&abp, n)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        );
    }
    for e in w.edges {
        if e.layer == 0 || e.from == 0 || e.to == 0 {
            return Err(parse_err("edge layer/from/to are 1-based"));
        }
        let id = EdgeId::new(e.layer - 1, e.from - 1, e.to - 1);
        let mut label = abp.labels.get(&id).cloned().unwrap_or_default();
        for (name, c) in &e.label.terms {
            label.add_var(lookup(&abp, name)?, &LaurentEps::from_json(c)?);
        }
        if let Some(c) = &e.label.constant {
            label.constant = &label.constant + &LaurentEps::from_json(c)?;
        }
        abp.set_label(id, label);
    }
    let diags = abp.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidAbp(diags.iter().map(ToString::to_string).collect()));
    }
    Ok(abp)
}

pub fn concise_to_json(r: &ConciseReport) -> Value {
    json!({ "concise": r.concise, "mode_ranks": r.mode_ranks })
}

pub fn tangent_dims_to_json(t: &TangentDims) -> Value {
    json!({
        "g0": t.g0,
        "g1": t.g1,
        "g2": t.g2,
        "total": t.total(),
        "stacked_rank": t.stacked,
        "supports_disjoint": t.supports_disjoint,
    })
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    json!({
        "format": c.format.widths(),
        "concise": concise_to_json(&c.concise),
        "dim_T_fcom": c.dim_t_fcom(),
        "dim_T_f0": c.dim_t_f0(),
        "pieces_fcom": tangent_dims_to_json(&c.dims_fcom),
        "pieces_f0": tangent_dims_to_json(&c.dims_f0),
        "separated": c.separated,
        "checks": c.checks.iter().map(|k| json!({
            "name": k.name,
            "passed": k.passed,
            "detail": k.detail,
        })).collect::<Vec<_>>(),
    })
}

pub fn dim_report_to_json(r: &DimReport) -> Value {
    json!({
        "format": r.format.widths(),
        "num_edges": r.num_edges,
        "num_vertices": r.num_vertices,
        "flow_dim": r.flow_dim,
        "dim_T": r.dim_t,
        "dim_T_formula": r.dim_t_formula,
        "incidence_rows_in_kernel": r.incidence_rows_in_kernel,
        "rho_image_rank": r.rho_image_rank,
        "rho_images_are_flows": r.rho_images_are_flows,
        "cycle_flow_rank": r.cycle_flow_rank,
        "prime": r.prime.as_ref().map(|p| json!({
            "incidence_rows_in_kernel": p.incidence_rows_in_kernel,
            "parity_vector_in_kernel": p.parity_vector_in_kernel,
            "parity_vector_independent": p.parity_vector_independent,
            "kernel_witness_rank": p.kernel_witness_rank,
            "dim_T_prime": p.dim,
            "bound": p.bound,
        })),
        "cycle_lengths": r.cycle_lengths.as_ref().map(|h| {
            h.iter().map(|(l, n)| (l.to_string(), json!(n))).collect::<Map<_, _>>()
        }),
        "passed": r.passed(),
    })
}

pub fn deborder_trace_to_json(t: &DeborderTrace) -> Value {
    json!({
        "phase1_final_power": t.phase1_final_power,
        "steps": t.steps.iter().map(|s| json!({
            "kind": s.kind.as_str(),
            "vertex": [s.vertex.0 + 1, s.vertex.1 + 1],
            "exponent": s.exponent,
            "checksum": s.checksum,
        })).collect::<Vec<_>>(),
    })
}

pub fn minimize_transcript_to_json(t: &MinimizeTranscript) -> Value {
    json!({
        "profile": t.profile.ranks,
        "abp": abp_to_json(&t.abp),
        "verified": t.verified,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}
