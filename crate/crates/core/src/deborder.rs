//! Constructive removal of the border for monotone single-(source,sink) ABPs
//! over ℝ[ε, ε⁻¹]₊: only powers of ε are moved between edges, so the graph and
//! the format never change.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::abp::{Abp, LinearLabel, Model};
use crate::error::{Error, Result};
use crate::laurent::LaurentEps;
use crate::tensor::EpsTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Gauge rescale of an inner vertex during phase 1.
    PushNegative,
    /// Closing rescale of the source edges by `ε^i` at the end of phase 1.
    SourceRescale,
    /// Gauge rescale of a non-source leaf of Δ during phase 2.
    LeafRescale,
    /// Division of the source edges by ε at the end of a phase-2 pass.
    SourceDivide,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::PushNegative => "push_negative",
            StepKind::SourceRescale => "source_rescale",
            StepKind::LeafRescale => "leaf_rescale",
            StepKind::SourceDivide => "source_divide",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rewriting step: out-edges of `vertex` were multiplied by `ε^exponent`
/// (in-edges by `ε^-exponent` for gauge steps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeborderStep {
    pub kind: StepKind,
    /// `(vertex layer, index)`, both 0-based; vertex layer 0 is the source.
    pub vertex: (usize, usize),
    pub exponent: i64,
    /// SHA-256 of the evaluation after the step.
    pub checksum: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeborderTrace {
    pub steps: Vec<DeborderStep>,
    /// `i` such that the phase-1 result computes `εⁱ f`.
    pub phase1_final_power: i64,
}

/// Stable digest of an evaluated polynomial.
pub fn tensor_digest(t: &EpsTensor) -> String {
    let mut h = Sha256::new();
    h.update(format!("{:?};", t.alphabet_sizes()));
    for (m, c) in t.terms() {
        h.update(format!("{:?}={};", m.0, c));
    }
    hex::encode(h.finalize())
}

struct Recorder<'a> {
    trace: Option<&'a mut DeborderTrace>,
    /// Expected evaluation of the current ABP.
    value: EpsTensor,
}

impl Recorder<'_> {
    fn step(&mut self, abp: &Abp, kind: StepKind, vertex: (usize, usize), exponent: i64) -> Result<()> {
        let now = abp.evaluate()?;
        assert_eq!(now, self.value, "{kind} at {vertex:?} changed the computed value");
        if let Some(t) = self.trace.as_deref_mut() {
            t.steps.push(DeborderStep {
                kind,
                vertex,
                exponent,
                checksum: tensor_digest(&now),
            });
        }
        Ok(())
    }
}

fn check_input(abp: &Abp) -> Result<()> {
    if abp.model != Model::Single || abp.format.width(0) != 1 {
        return Err(Error::NotSingleModel);
    }
    let diags = abp.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidAbp(diags.iter().map(ToString::to_string).collect()));
    }
    if !abp.is_monotone_eps() {
        return Err(Error::NotMonotoneEps);
    }
    Ok(())
}

fn shift_edges(abp: &mut Abp, edges: &[crate::abp::EdgeId], k: i64) {
    for e in edges {
        let l = abp.labels[e].shift(k);
        abp.set_label(*e, l);
    }
}

/// Multiplies the out-edges of a vertex by `ε^k` and its in-edges by `ε^-k`.
fn gauge(abp: &mut Abp, layer: usize, v: usize, k: i64) {
    let outs = abp.out_edges(layer, v);
    let ins = abp.in_edges(layer, v);
    shift_edges(abp, &outs, k);
    shift_edges(abp, &ins, -k);
}

fn push_impl(mut abp: Abp, rec: &mut Recorder<'_>) -> Result<(Abp, i64)> {
    loop {
        let target = abp
            .labels
            .iter()
            .filter(|(e, l)| e.layer > 0 && l.has_negative_exponent())
            .map(|(e, _)| *e)
            .max_by(|a, b| a.layer.cmp(&b.layer).then(b.cmp(a)));
        let Some(e) = target else { break };
        let k = abp
            .out_edges(e.layer, e.from)
            .iter()
            .filter_map(|o| abp.labels[o].min_exponent())
            .min()
            .map_or(0, |m| -m);
        gauge(&mut abp, e.layer, e.from, k);
        rec.step(&abp, StepKind::PushNegative, (e.layer, e.from), k)?;
    }
    let source = abp.out_edges(0, 0);
    let i = source
        .iter()
        .filter_map(|e| abp.labels[e].min_exponent())
        .min()
        .map_or(0, |m| (-m).max(0));
    if i > 0 {
        shift_edges(&mut abp, &source, i);
        rec.value = rec.value.shift_eps(i);
        rec.step(&abp, StepKind::SourceRescale, (0, 0), i)?;
    }
    Ok((abp, i))
}

/// Phase 1: moves every negative power of ε onto the source edges and then
/// clears them, returning `Γⁱ` (which computes `εⁱ f`) and `i`.
pub fn push_negative_eps_to_source(abp: &Abp) -> Result<(Abp, i64)> {
    check_input(abp)?;
    let mut rec = Recorder {
        trace: None,
        value: abp.evaluate()?,
    };
    push_impl(abp.clone(), &mut rec)
}

/// Vertices reachable from the source through edges that are not ε-edges.
pub fn delta(abp: &Abp) -> BTreeSet<(usize, usize)> {
    let mut seen = BTreeSet::from([(0usize, 0usize)]);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((layer, v)) = stack.pop() {
        for e in abp.out_edges(layer, v) {
            if !abp.labels[&e].is_eps_edge() && seen.insert((layer + 1, e.to)) {
                stack.push((layer + 1, e.to));
            }
        }
    }
    seen
}

fn strip_impl(mut abp: Abp, rec: &mut Recorder<'_>) -> Result<Abp> {
    let d = abp.degree();
    if abp.labels.values().any(LinearLabel::has_negative_exponent) {
        return Err(Error::NegativeExponentPresent);
    }
    if !rec.value.is_divisible_by_eps() {
        return Err(Error::NotDivisibleByEps);
    }
    loop {
        let reach = delta(&abp);
        if reach.contains(&(d, 0)) {
            return Err(Error::SinkReachable);
        }
        let leaf = reach
            .iter()
            .filter(|&&(layer, v)| {
                layer > 0
                    && abp
                        .out_edges(layer, v)
                        .iter()
                        .all(|e| abp.labels[e].is_eps_edge())
            })
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .copied();
        let Some((layer, v)) = leaf else { break };
        gauge(&mut abp, layer, v, -1);
        rec.step(&abp, StepKind::LeafRescale, (layer, v), -1)?;
    }
    let source = abp.out_edges(0, 0);
    shift_edges(&mut abp, &source, -1);
    rec.value = rec.value.shift_eps(-1);
    rec.step(&abp, StepKind::SourceDivide, (0, 0), -1)?;
    Ok(abp)
}

/// Phase 2: turns an ABP computing `εⁱ f` into one computing `εⁱ⁻¹ f`.
pub fn strip_one_eps(abp: &Abp) -> Result<Abp> {
    check_input(abp)?;
    let mut rec = Recorder {
        trace: None,
        value: abp.evaluate()?,
    };
    strip_impl(abp.clone(), &mut rec)
}

/// Full pipeline: a strictly monotone ABP of the same format computing the ε = 0 limit.
pub fn deborder(abp: &Abp) -> Result<Abp> {
    deborder_impl(abp, None)
}

pub fn deborder_traced(abp: &Abp) -> Result<(Abp, DeborderTrace)> {
    let mut trace = DeborderTrace::default();
    let out = deborder_impl(abp, Some(&mut trace))?;
    Ok((out, trace))
}

fn deborder_impl(abp: &Abp, mut trace: Option<&mut DeborderTrace>) -> Result<Abp> {
    check_input(abp)?;
    let value = abp.evaluate()?;
    if value.has_negative_exponent() {
        return Err(Error::OutputHasNegativeEps);
    }
    let limit = value.eval_at_zero()?;
    let pinned: Vec<Vec<usize>> = abp
        .slot_alphabets()
        .into_iter()
        .map(|a| {
            a.into_iter()
                .filter_map(|s| match s {
                    crate::abp::Symbol::Var(v) => Some(v),
                    crate::abp::Symbol::Const => None,
                })
                .collect()
        })
        .collect();
    let mut rec = Recorder {
        trace: trace.as_deref_mut(),
        value,
    };
    let (mut cur, i) = push_impl(abp.clone(), &mut rec)?;
    for _ in 0..i {
        cur = strip_impl(cur, &mut rec)?;
    }
    if let Some(t) = trace {
        t.phase1_final_power = i;
    }
    let mut out = cur.clone();
    out.labels.clear();
    out.alphabets = Some(pinned);
    for (e, l) in &cur.labels {
        out.set_label(*e, l.map_coeffs(|c| LaurentEps::constant(c.coeff(0))));
    }
    debug_assert!(out.is_monotone_strict());
    let got = out.evaluate()?.to_rational().expect("ε-free labels");
    assert!(got.tensor_equal(&limit)?, "debordered ABP lost the limit");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::{EdgeId, Format};
    use crate::laurent::LaurentEps as L;
    use num_traits::One;

    fn path(labels: &[L]) -> Abp {
        let d = labels.len();
        let vars: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        let mut abp = Abp::new(Format::new(vec![1; d]).unwrap(), Model::Single, vars);
        for (i, c) in labels.iter().enumerate() {
            abp.set_label(EdgeId::new(i, 0, 0), LinearLabel::scaled_var(i, c.clone()));
        }
        abp
    }

    fn coeffs(abp: &Abp) -> Vec<L> {
        (0..abp.degree())
            .map(|i| abp.labels[&EdgeId::new(i, 0, 0)].terms[&i].clone())
            .collect()
    }

    #[test]
    fn push_two_edges() {
        let (out, i) = push_negative_eps_to_source(&path(&[L::eps_pow(-1), L::eps()])).unwrap();
        assert_eq!(i, 1);
        assert_eq!(coeffs(&out), vec![L::eps_pow(0), L::eps()]);
    }

    #[test]
    fn push_middle() {
        let input = path(&[L::one(), L::eps_pow(-2), L::one()]);
        let (out, i) = push_negative_eps_to_source(&input).unwrap();
        assert_eq!(i, 2);
        assert_eq!(out.evaluate().unwrap(), input.evaluate().unwrap().shift_eps(2));
        assert!(!out.labels.values().any(LinearLabel::has_negative_exponent));
    }

    #[test]
    fn strip_path() {
        let out = strip_one_eps(&path(&[L::one(), L::eps()])).unwrap();
        assert_eq!(coeffs(&out), vec![L::one(), L::one()]);
        let twice = strip_one_eps(&strip_one_eps(&path(&[L::eps(), L::eps()])).unwrap()).unwrap();
        assert_eq!(coeffs(&twice), vec![L::one(), L::one()]);
        assert_eq!(strip_one_eps(&path(&[L::one(), L::one()])), Err(Error::NotDivisibleByEps));
    }

    #[test]
    fn full_pipeline() {
        let (out, trace) = deborder_traced(&path(&[L::eps_pow(-1), L::eps()])).unwrap();
        assert_eq!(coeffs(&out), vec![L::one(), L::one()]);
        assert_eq!(trace.phase1_final_power, 1);
        assert!(trace.steps.iter().all(|s| s.checksum.len() == 64));
        assert_eq!(
            deborder(&path(&[L::eps_pow(-1), L::one()])),
            Err(Error::OutputHasNegativeEps)
        );
    }

    #[test]
    fn refuses_trace_and_negative() {
        let mut abp = path(&[L::one(), L::one()]);
        abp.model = Model::Trace;
        assert_eq!(deborder(&abp), Err(Error::NotSingleModel));
        let neg = path(&[L::constant(crate::scalar::int(-1)), L::one()]);
        assert_eq!(deborder(&neg), Err(Error::NotMonotoneEps));
    }
}
