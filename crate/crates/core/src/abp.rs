//! Layered algebraic branching programs in the trace and single-(source,sink) models.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentEps;
use crate::scalar::{is_negative, Rational};
use crate::tensor::{EpsTensor, LayeredTensor, Monomial};

/// Layer widths `(w_1, …, w_d)`; the closing layer `d+1` has width `w_1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Format(Vec<usize>);

impl Format {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::InvalidFormat("format must have at least one layer".into()));
        }
        if let Some(i) = widths.iter().position(|&w| w == 0) {
            return Err(Error::InvalidFormat(format!("layer {} has width 0", i + 1)));
        }
        Ok(Self(widths))
    }

    pub fn uniform(width: usize, degree: usize) -> Result<Self> {
        Self::new(vec![width; degree])
    }

    /// Parses comma-separated widths such as `"2,3,2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let widths = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidFormat(format!("bad width {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(widths)
    }

    pub fn widths(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Width of vertex layer `i` (0-based, `i = d` wraps to the first layer).
    pub fn width(&self, i: usize) -> usize {
        self.0[i % self.0.len()]
    }

    pub fn edges_in_layer(&self, layer: usize) -> usize {
        self.width(layer) * self.width(layer + 1)
    }

    pub fn num_edges(&self) -> usize {
        (0..self.degree()).map(|i| self.edges_in_layer(i)).sum()
    }

    /// `Σ w_i`, the vertex count once the last layer is identified with the first.
    pub fn sum_widths(&self) -> usize {
        self.0.iter().sum()
    }

    /// `Π w_i`, the number of valid paths of the complete ABP.
    pub fn num_valid_paths(&self) -> usize {
        self.0.iter().product()
    }

    /// Index of edge `(from, to)` within the alphabet of its layer.
    pub fn edge_index(&self, e: EdgeId) -> usize {
        e.from * self.width(e.layer + 1) + e.to
    }

    pub fn edge_at(&self, layer: usize, index: usize) -> EdgeId {
        let w = self.width(layer + 1);
        EdgeId::new(layer, index / w, index % w)
    }

    /// Offset of layer `layer` in the global edge numbering.
    pub fn edge_offset(&self, layer: usize) -> usize {
        (0..layer).map(|i| self.edges_in_layer(i)).sum()
    }

    pub fn global_edge_index(&self, e: EdgeId) -> usize {
        self.edge_offset(e.layer) + self.edge_index(e)
    }

    pub fn layer_edges(&self, layer: usize) -> impl Iterator<Item = EdgeId> + '_ {
        let (wa, wb) = (self.width(layer), self.width(layer + 1));
        (0..wa).flat_map(move |a| (0..wb).map(move |b| EdgeId::new(layer, a, b)))
    }

    /// All edges in global order (layer-major, then `from`, then `to`).
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.degree()).flat_map(move |i| self.layer_edges(i))
    }

    /// Per-slot alphabet sizes `|E^i|` of the edge-variable tensors.
    pub fn edge_alphabet_sizes(&self) -> Vec<usize> {
        (0..self.degree()).map(|i| self.edges_in_layer(i)).collect()
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Edge `(from → to)` between vertex layers `layer` and `layer + 1`; all indices 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
}

impl EdgeId {
    pub fn new(layer: usize, from: usize, to: usize) -> Self {
        Self { layer, from, to }
    }

    /// Endpoints have equal index parity.
    pub fn is_parity_preserving(&self) -> bool {
        self.from % 2 == self.to % 2
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.from + 1, self.to + 1, self.layer + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Trace,
    Single,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Trace => "trace",
            Model::Single => "single",
        }
    }
}

/// Affine linear form `Σ c_x · x + c_0` with Laurent-in-ε coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LinearLabel {
    pub terms: BTreeMap<usize, LaurentEps>,
    pub constant: LaurentEps,
}

impl LinearLabel {
    pub fn var(v: usize) -> Self {
        Self::scaled_var(v, LaurentEps::constant(Rational::from_integer(1.into())))
    }

    pub fn scaled_var(v: usize, c: LaurentEps) -> Self {
        let mut l = Self::default();
        l.add_var(v, &c);
        l
    }

    pub fn add_var(&mut self, v: usize, c: &LaurentEps) {
        let e = self.terms.entry(v).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &LaurentEps> {
        self.terms.values().chain(std::iter::once(&self.constant))
    }

    /// Multiplies every coefficient by ε^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(v, c)| (*v, c.shift(k))).collect(),
            constant: self.constant.shift(k),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&LaurentEps) -> LaurentEps) -> Self {
        let mut out = Self {
            terms: BTreeMap::new(),
            constant: f(&self.constant),
        };
        for (v, c) in &self.terms {
            out.add_var(*v, &f(c));
        }
        out
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coefficients().filter_map(LaurentEps::min_exponent).min()
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.min_exponent().is_some_and(|e| e < 0)
    }

    /// Every coefficient vanishes at ε = 0.
    pub fn is_eps_edge(&self) -> bool {
        self.min_exponent().is_some_and(|e| e >= 1)
    }
}

/// Symbol of a tensor slot produced by [`Abp::evaluate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Var(usize),
    Const,
}

/// A layered ABP. Absent edges carry the zero label.
#[derive(Clone, Debug, PartialEq)]
pub struct Abp {
    pub format: Format,
    pub model: Model,
    /// Affine labels allowed; evaluation then homogenises with a trailing constant symbol per slot.
    pub affine: bool,
    pub variables: Vec<String>,
    /// Declared per-layer alphabets (variable ids); inferred from the labels when `None`.
    pub alphabets: Option<Vec<Vec<usize>>>,
    pub labels: BTreeMap<EdgeId, LinearLabel>,
}

/// Problems reported by [`Abp::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    ZeroWidth { layer: usize },
    SingleModelWidth { w1: usize },
    LayerOutOfRange { edge: EdgeId },
    FromOutOfRange { edge: EdgeId },
    ToOutOfRange { edge: EdgeId },
    ConstantInHomogeneous { edge: EdgeId },
    UnknownVariable { edge: EdgeId, var: usize },
    VariableOutsideAlphabet { edge: EdgeId, var: usize },
    AlphabetCount { expected: usize, found: usize },
    AlphabetUnknownVariable { layer: usize, var: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::ZeroWidth { layer } => write!(f, "layer {} has width 0", layer + 1),
            Diagnostic::SingleModelWidth { w1 } => {
                write!(f, "single model requires w₁=1 (found w₁={w1})")
            }
            Diagnostic::LayerOutOfRange { edge } => write!(f, "edge {edge}: layer out of range"),
            Diagnostic::FromOutOfRange { edge } => write!(f, "edge {edge}: from-index out of range"),
            Diagnostic::ToOutOfRange { edge } => write!(f, "edge {edge}: to-index out of range"),
            Diagnostic::ConstantInHomogeneous { edge } => {
                write!(f, "edge {edge}: nonzero constant in homogeneous mode")
            }
            Diagnostic::UnknownVariable { edge, var } => {
                write!(f, "edge {edge}: unknown variable id {var}")
            }
            Diagnostic::VariableOutsideAlphabet { edge, var } => {
                write!(f, "edge {edge}: variable id {var} not in the declared alphabet of its layer")
            }
            Diagnostic::AlphabetCount { expected, found } => {
                write!(f, "expected {expected} declared alphabets, found {found}")
            }
            Diagnostic::AlphabetUnknownVariable { layer, var } => {
                write!(f, "alphabet of layer {}: unknown variable id {var}", layer + 1)
            }
        }
    }
}

impl Abp {
    pub fn new(format: Format, model: Model, variables: Vec<String>) -> Self {
        Self {
            format,
            model,
            affine: false,
            variables,
            alphabets: None,
            labels: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.format.degree()
    }

    pub fn variable_id(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Sets a label; a zero label removes the edge.
    pub fn set_label(&mut self, e: EdgeId, label: LinearLabel) {
        if label.is_zero() {
            self.labels.remove(&e);
        } else {
            self.labels.insert(e, label);
        }
    }

    pub fn label(&self, e: EdgeId) -> Option<&LinearLabel> {
        self.labels.get(&e)
    }

    /// Nonzero labels of edges leaving vertex `v` of vertex layer `layer`.
    pub fn out_edges(&self, layer: usize, v: usize) -> Vec<EdgeId> {
        if layer >= self.degree() {
            return Vec::new();
        }
        self.labels
            .range(EdgeId::new(layer, v, 0)..EdgeId::new(layer, v + 1, 0))
            .map(|(e, _)| *e)
            .collect()
    }

    /// Nonzero labels of edges entering vertex `v` of vertex layer `layer` (`1 ≤ layer ≤ d`).
    pub fn in_edges(&self, layer: usize, v: usize) -> Vec<EdgeId> {
        if layer == 0 {
            return Vec::new();
        }
        self.labels
            .keys()
            .filter(|e| e.layer == layer - 1 && e.to == v)
            .copied()
            .collect()
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let widths = self.format.widths();
        for (i, &w) in widths.iter().enumerate() {
            if w == 0 {
                out.push(Diagnostic::ZeroWidth { layer: i });
            }
        }
        if self.model == Model::Single && widths[0] != 1 {
            out.push(Diagnostic::SingleModelWidth { w1: widths[0] });
        }
        let d = self.degree();
        if let Some(al) = &self.alphabets {
            if al.len() != d {
                out.push(Diagnostic::AlphabetCount {
                    expected: d,
                    found: al.len(),
                });
            }
            for (layer, a) in al.iter().enumerate() {
                for &var in a {
                    if var >= self.variables.len() {
                        out.push(Diagnostic::AlphabetUnknownVariable { layer, var });
                    }
                }
            }
        }
        for (&edge, label) in &self.labels {
            if edge.layer >= d {
                out.push(Diagnostic::LayerOutOfRange { edge });
                continue;
            }
            if edge.from >= self.format.width(edge.layer) {
                out.push(Diagnostic::FromOutOfRange { edge });
            }
            if edge.to >= self.format.width(edge.layer + 1) {
                out.push(Diagnostic::ToOutOfRange { edge });
            }
            if !self.affine && !label.constant.is_zero() {
                out.push(Diagnostic::ConstantInHomogeneous { edge });
            }
            for &var in label.terms.keys() {
                if var >= self.variables.len() {
                    out.push(Diagnostic::UnknownVariable { edge, var });
                } else if let Some(al) = self.alphabets.as_ref().and_then(|a| a.get(edge.layer)) {
                    if !al.contains(&var) {
                        out.push(Diagnostic::VariableOutsideAlphabet { edge, var });
                    }
                }
            }
        }
        out
    }

    fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidAbp(diags.iter().map(ToString::to_string).collect()))
        }
    }

    /// The alphabet of every tensor slot produced by [`Abp::evaluate`].
    pub fn slot_alphabets(&self) -> Vec<Vec<Symbol>> {
        (0..self.degree())
            .map(|layer| {
                let vars: Vec<usize> = match self.alphabets.as_ref() {
                    Some(a) => a[layer].clone(),
                    None => {
                        let used: BTreeSet<usize> = self
                            .labels
                            .iter()
                            .filter(|(e, _)| e.layer == layer)
                            .flat_map(|(_, l)| l.terms.keys().copied())
                            .collect();
                        used.into_iter().collect()
                    }
                };
                let mut syms: Vec<Symbol> = vars.into_iter().map(Symbol::Var).collect();
                if self.affine {
                    syms.push(Symbol::Const);
                }
                syms
            })
            .collect()
    }

    /// Expands `tr(M_1 ⋯ M_d)` into a noncommutative polynomial over ℚ[ε, ε⁻¹].
    ///
    /// Each start vertex of the first layer is propagated layer by layer; only
    /// paths that return to the corresponding vertex contribute.
    pub fn evaluate(&self) -> Result<EpsTensor> {
        self.ensure_valid()?;
        let alphabets = self.slot_alphabets();
        let sizes: Vec<usize> = alphabets.iter().map(Vec::len).collect();
        let index: Vec<HashMap<Symbol, usize>> = alphabets
            .iter()
            .map(|a| a.iter().enumerate().map(|(i, s)| (*s, i)).collect())
            .collect();
        let d = self.degree();
        let mut out = LayeredTensor::zero(sizes);
        for start in 0..self.format.width(0) {
            let mut cur: BTreeMap<usize, BTreeMap<Vec<usize>, LaurentEps>> = BTreeMap::new();
            cur.entry(start)
                .or_default()
                .insert(Vec::new(), LaurentEps::one());
            for layer in 0..d {
                let mut next: BTreeMap<usize, BTreeMap<Vec<usize>, LaurentEps>> = BTreeMap::new();
                for (&v, words) in &cur {
                    for e in self.out_edges(layer, v) {
                        if layer == d - 1 && e.to != start {
                            continue;
                        }
                        let label = &self.labels[&e];
                        let symbols = label
                            .terms
                            .iter()
                            .map(|(var, c)| (index[layer][&Symbol::Var(*var)], c))
                            .chain(
                                (!label.constant.is_zero())
                                    .then(|| (index[layer][&Symbol::Const], &label.constant)),
                            );
                        let target = next.entry(e.to).or_default();
                        for (sym, c) in symbols {
                            for (word, wc) in words {
                                let mut w = word.clone();
                                w.push(sym);
                                let prod = wc * c;
                                let entry = target.entry(w).or_default();
                                *entry = &*entry + &prod;
                            }
                        }
                    }
                }
                cur = next;
            }
            if let Some(words) = cur.remove(&start) {
                for (w, c) in words {
                    out.add_term_unchecked(Monomial(w), &c);
                }
            }
        }
        Ok(out)
    }

    /// Numerically evaluates `tr(M_1 ⋯ M_d)` with every variable and ε instantiated.
    pub fn evaluate_numeric(&self, values: &[Rational], eps0: &Rational) -> Rational {
        let d = self.degree();
        let w0 = self.format.width(0);
        let entry = |e: EdgeId| -> Rational {
            self.labels.get(&e).map_or_else(Rational::zero, |l| {
                let mut acc = if l.constant.is_zero() {
                    Rational::zero()
                } else {
                    l.constant.eval(eps0)
                };
                for (v, c) in &l.terms {
                    acc += c.eval(eps0) * &values[*v];
                }
                acc
            })
        };
        // product of layer matrices, row by row, starting from the identity on layer 1
        let mut prod: Vec<Vec<Rational>> = (0..w0)
            .map(|i| (0..w0).map(|j| Rational::from_integer((i == j).into())).collect())
            .collect();
        for layer in 0..d {
            let (wa, wb) = (self.format.width(layer), self.format.width(layer + 1));
            prod = prod
                .iter()
                .map(|row| {
                    (0..wb)
                        .map(|b| {
                            (0..wa)
                                .map(|a| &row[a] * entry(EdgeId::new(layer, a, b)))
                                .fold(Rational::zero(), |x, y| x + y)
                        })
                        .collect()
                })
                .collect();
        }
        (0..w0).map(|i| prod[i][i].clone()).fold(Rational::zero(), |x, y| x + y)
    }

    /// Footnote construction: one copy of the ABP per start vertex, all copies
    /// sharing a merged source and a merged sink. Intermediate layer `i` gets width `w_1 · w_i`.
    pub fn to_single_source_sink(&self) -> Result<Abp> {
        self.ensure_valid()?;
        if self.model == Model::Single || self.format.width(0) == 1 {
            let mut out = self.clone();
            out.model = Model::Single;
            return Ok(out);
        }
        let d = self.degree();
        let w1 = self.format.width(0);
        let mut widths = vec![1];
        widths.extend((1..d).map(|i| w1 * self.format.width(i)));
        let mut out = Abp {
            format: Format::new(widths)?,
            model: Model::Single,
            affine: self.affine,
            variables: self.variables.clone(),
            alphabets: Some(
                self.slot_alphabets()
                    .into_iter()
                    .map(|a| {
                        a.into_iter()
                            .filter_map(|s| match s {
                                Symbol::Var(v) => Some(v),
                                Symbol::Const => None,
                            })
                            .collect()
                    })
                    .collect(),
            ),
            labels: BTreeMap::new(),
        };
        for (&e, label) in &self.labels {
            let copies: Vec<(usize, usize)> = if d == 1 {
                // source → sink directly; only the closing edges of each copy survive
                if e.from == e.to { vec![(0, 0)] } else { vec![] }
            } else if e.layer == 0 {
                vec![(0, e.from * self.format.width(1) + e.to)]
            } else if e.layer == d - 1 {
                vec![(e.to * self.format.width(d - 1) + e.from, 0)]
            } else {
                let (wa, wb) = (self.format.width(e.layer), self.format.width(e.layer + 1));
                (0..w1).map(|s| (s * wa + e.from, s * wb + e.to)).collect()
            };
            for (from, to) in copies {
                let id = EdgeId::new(e.layer, from, to);
                let merged = match out.labels.get(&id) {
                    Some(existing) => add_labels(existing, label),
                    None => label.clone(),
                };
                out.set_label(id, merged);
            }
        }
        Ok(out)
    }

    /// All label coefficients are ε-free nonnegative rationals.
    pub fn is_monotone_strict(&self) -> bool {
        self.labels.values().flat_map(LinearLabel::coefficients).all(|c| {
            c.as_rational().is_some_and(|r| !is_negative(&r))
        })
    }

    /// All label coefficients are nonnegative for every sufficiently small ε > 0.
    pub fn is_monotone_eps(&self) -> bool {
        self.labels
            .values()
            .flat_map(LinearLabel::coefficients)
            .all(LaurentEps::is_nonneg_small_eps)
    }

    /// Lower bound on layer sizes actually used: widths `(w_1, …, w_d, w_1)`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut v = self.format.widths().to_vec();
        v.push(self.format.width(0));
        v
    }
}

fn add_labels(a: &LinearLabel, b: &LinearLabel) -> LinearLabel {
    let mut out = a.clone();
    for (v, c) in &b.terms {
        out.add_var(*v, c);
    }
    out.constant = &out.constant + &b.constant;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn xy_path() -> Abp {
        let mut abp = Abp::new(Format::new(vec![1, 1]).unwrap(), Model::Single, vec!["x".into(), "y".into()]);
        abp.set_label(EdgeId::new(0, 0, 0), LinearLabel::var(0));
        abp.set_label(EdgeId::new(1, 0, 0), LinearLabel::var(1));
        abp
    }

    #[test]
    fn single_path_evaluates_to_one_monomial() {
        let t = xy_path().evaluate().unwrap();
        assert_eq!(t.alphabet_sizes(), &[1, 1]);
        assert_eq!(t.len(), 1);
        assert_eq!(t.coeff(&Monomial(vec![0, 0])), LaurentEps::constant(int(1)));
    }

    #[test]
    fn validate_reports_problems() {
        assert!(xy_path().validate().is_empty());
        let mut abp = xy_path();
        abp.format = Format::new(vec![2, 1]).unwrap();
        let diags = abp.validate();
        assert!(diags.iter().any(|d| d.to_string().contains("single model requires w₁=1")));

        let mut abp = Abp::new(Format::new(vec![2, 2]).unwrap(), Model::Trace, vec!["x".into()]);
        abp.set_label(EdgeId::new(0, 2, 0), LinearLabel::var(0));
        let diags = abp.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].to_string().contains("from-index out of range"));

        let mut abp = xy_path();
        let mut l = LinearLabel::var(0);
        l.constant = LaurentEps::constant(int(1));
        abp.set_label(EdgeId::new(0, 0, 0), l);
        assert!(matches!(abp.validate()[0], Diagnostic::ConstantInHomogeneous { .. }));
        assert!(abp.evaluate().is_err());
        abp.affine = true;
        assert!(abp.validate().is_empty());
    }

    #[test]
    fn monotone_variants() {
        let mut abp = xy_path();
        assert!(abp.is_monotone_strict() && abp.is_monotone_eps());
        abp.set_label(EdgeId::new(0, 0, 0), LinearLabel::scaled_var(0, LaurentEps::constant(int(-1))));
        assert!(!abp.is_monotone_strict() && !abp.is_monotone_eps());
        abp.set_label(EdgeId::new(0, 0, 0), LinearLabel::scaled_var(0, LaurentEps::eps_pow(-1)));
        assert!(!abp.is_monotone_strict() && abp.is_monotone_eps());
    }

    #[test]
    fn affine_evaluation_appends_constant_symbol() {
        let mut abp = xy_path();
        abp.affine = true;
        let mut l = LinearLabel::var(0);
        l.constant = LaurentEps::constant(int(2));
        abp.set_label(EdgeId::new(0, 0, 0), l);
        let t = abp.evaluate().unwrap();
        assert_eq!(t.alphabet_sizes(), &[2, 2]);
        // (x + 2)·y
        assert_eq!(t.coeff(&Monomial(vec![0, 0])), LaurentEps::constant(int(1)));
        assert_eq!(t.coeff(&Monomial(vec![1, 0])), LaurentEps::constant(int(2)));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn format_parsing() {
        assert_eq!(Format::parse("2, 3,2").unwrap().widths(), &[2, 3, 2]);
        assert!(Format::parse("2,0").is_err());
        assert!(Format::parse("").is_err());
        let f = Format::parse("2,3,2").unwrap();
        assert_eq!(f.num_edges(), 16);
        assert_eq!(f.sum_widths(), 7);
        for e in f.edges() {
            assert_eq!(f.edge_at(e.layer, f.edge_index(e)), e);
        }
    }
}
