//! Lie algebra action on `E_1 ⊗ … ⊗ E_d`, the `g₀ ⊕ g₁ ⊕ g₂` split of the
//! tangent space, and the separation certificate built from it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::abp::{EdgeId, Format};
use crate::concise::{is_concise, ConciseReport};
use crate::error::{Error, Result};
use crate::family::{f0, f_com};
use crate::matrix::{SparseMatrix, SparseRow};
use crate::scalar::Rational;
use crate::tensor::{LayeredTensor, Monomial, RationalTensor};

/// `A^{(i)}_{e,e′}`: edge indices are positions within layer `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LieBasisElement {
    pub layer: usize,
    pub from_edge: usize,
    pub to_edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GPieceKind {
    G0,
    G1,
    G2,
}

impl GPieceKind {
    pub const ALL: [GPieceKind; 3] = [GPieceKind::G0, GPieceKind::G1, GPieceKind::G2];

    /// Classifies a same-layer pair by the number of shared vertices.
    pub fn classify(e: EdgeId, e2: EdgeId) -> Self {
        match (e.from == e2.from, e.to == e2.to) {
            (true, true) => GPieceKind::G0,
            (false, false) => GPieceKind::G2,
            _ => GPieceKind::G1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GPieceKind::G0 => "g0",
            GPieceKind::G1 => "g1",
            GPieceKind::G2 => "g2",
        }
    }
}

impl fmt::Display for GPieceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl LieBasisElement {
    pub fn kind(&self, format: &Format) -> GPieceKind {
        GPieceKind::classify(
            format.edge_at(self.layer, self.from_edge),
            format.edge_at(self.layer, self.to_edge),
        )
    }
}

/// All basis elements of the given kind, layer by layer.
pub fn basis(format: &Format, kind: GPieceKind) -> Vec<LieBasisElement> {
    let mut out = Vec::new();
    for layer in 0..format.degree() {
        let n = format.edges_in_layer(layer);
        for from_edge in 0..n {
            for to_edge in 0..n {
                let b = LieBasisElement {
                    layer,
                    from_edge,
                    to_edge,
                };
                if b.kind(format) == kind {
                    out.push(b);
                }
            }
        }
    }
    out
}

fn check_edge_alphabets(f: &RationalTensor, format: &Format) -> Result<()> {
    if f.alphabet_sizes() != format.edge_alphabet_sizes().as_slice() {
        return Err(Error::ShapeMismatch(format!(
            "tensor alphabets {:?} do not match the edge sets of format {format}",
            f.alphabet_sizes()
        )));
    }
    Ok(())
}

/// Rewrites slot `layer` entry `from_edge` into `to_edge`; other monomials vanish.
pub fn lie_action(b: LieBasisElement, f: &RationalTensor) -> Result<RationalTensor> {
    let sizes = f.alphabet_sizes();
    if b.layer >= sizes.len() || b.from_edge >= sizes[b.layer] || b.to_edge >= sizes[b.layer] {
        return Err(Error::ShapeMismatch(format!(
            "basis element {b:?} does not fit alphabets {sizes:?}"
        )));
    }
    let mut out = LayeredTensor::zero(sizes.to_vec());
    for (m, c) in f.terms() {
        if m.0[b.layer] == b.from_edge {
            let mut w = m.0.clone();
            w[b.layer] = b.to_edge;
            out.add_term_unchecked(Monomial(w), c);
        }
    }
    Ok(out)
}

/// Monomials of `f` grouped by (slot, entry), so that every action row is a single rewrite.
struct SlotIndex<'a> {
    groups: Vec<Vec<Vec<(&'a Monomial, &'a Rational)>>>,
}

impl<'a> SlotIndex<'a> {
    fn new(f: &'a RationalTensor) -> Self {
        let mut groups: Vec<Vec<Vec<(&Monomial, &Rational)>>> =
            f.alphabet_sizes().iter().map(|&n| vec![Vec::new(); n]).collect();
        for (m, c) in f.terms() {
            for (slot, &k) in m.0.iter().enumerate() {
                groups[slot][k].push((m, c));
            }
        }
        Self { groups }
    }

    fn row(&self, b: LieBasisElement) -> impl Iterator<Item = (Monomial, &'a Rational)> + '_ {
        self.groups[b.layer][b.from_edge].iter().map(move |(m, c)| {
            let mut w = m.0.clone();
            w[b.layer] = b.to_edge;
            (Monomial(w), *c)
        })
    }
}

/// Rows of one piece over a shared monomial → column map.
struct PieceMatrix {
    rows: Vec<SparseRow>,
    columns: BTreeSet<usize>,
}

fn piece_rows(
    index: &SlotIndex<'_>,
    format: &Format,
    kind: GPieceKind,
    cols: &mut HashMap<Monomial, usize>,
) -> PieceMatrix {
    let mut rows = Vec::new();
    let mut columns = BTreeSet::new();
    for b in basis(format, kind) {
        let mut row = SparseRow::new();
        for (m, c) in index.row(b) {
            let next = cols.len();
            let j = *cols.entry(m).or_insert(next);
            columns.insert(j);
            row.insert(j, c.clone());
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    PieceMatrix { rows, columns }
}

fn rank_of(rows: Vec<SparseRow>, ncols: usize) -> usize {
    SparseMatrix::from_rows(ncols, rows).rank()
}

/// Dimension of `g_kind f`: rank of the stacked action rows.
pub fn g_piece_dim(f: &RationalTensor, kind: GPieceKind, format: &Format) -> Result<usize> {
    check_edge_alphabets(f, format)?;
    let index = SlotIndex::new(f);
    let mut cols = HashMap::new();
    let p = piece_rows(&index, format, kind, &mut cols);
    Ok(rank_of(p.rows, cols.len()))
}

/// The matrix of `g_kind f` with columns indexed by the union of row supports.
pub fn g_piece_matrix(f: &RationalTensor, kind: GPieceKind, format: &Format) -> Result<SparseMatrix> {
    check_edge_alphabets(f, format)?;
    let index = SlotIndex::new(f);
    let mut cols = HashMap::new();
    let p = piece_rows(&index, format, kind, &mut cols);
    Ok(SparseMatrix::from_rows(cols.len(), p.rows))
}

/// Stacked matrices above this many nonzeros skip the full-rank cross-check.
const STACKED_CHECK_LIMIT: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentDims {
    pub g0: usize,
    pub g1: usize,
    pub g2: usize,
    /// Rank of all action rows at once, when small enough to compute.
    pub stacked: Option<usize>,
    /// The three pieces have pairwise disjoint supports.
    pub supports_disjoint: bool,
}

impl TangentDims {
    pub fn total(&self) -> usize {
        self.g0 + self.g1 + self.g2
    }

    pub fn piece(&self, kind: GPieceKind) -> usize {
        match kind {
            GPieceKind::G0 => self.g0,
            GPieceKind::G1 => self.g1,
            GPieceKind::G2 => self.g2,
        }
    }

    /// Direct-sum claim: disjoint supports and, when available, the stacked rank matches.
    pub fn direct_sum_holds(&self) -> bool {
        self.supports_disjoint && self.stacked.is_none_or(|s| s == self.total())
    }
}

pub fn tangent_dim(f: &RationalTensor, format: &Format) -> Result<TangentDims> {
    check_edge_alphabets(f, format)?;
    let index = SlotIndex::new(f);
    let mut cols = HashMap::new();
    let pieces: Vec<PieceMatrix> = GPieceKind::ALL
        .iter()
        .map(|&k| piece_rows(&index, format, k, &mut cols))
        .collect();
    let ncols = cols.len();
    let supports_disjoint = (0..3).all(|a| {
        (a + 1..3).all(|b| pieces[a].columns.is_disjoint(&pieces[b].columns))
    });
    let nnz: usize = pieces.iter().flat_map(|p| &p.rows).map(|r| r.len()).sum();
    let stacked = (nnz <= STACKED_CHECK_LIMIT)
        .then(|| rank_of(pieces.iter().flat_map(|p| p.rows.clone()).collect(), ncols));
    let mut dims = pieces.into_iter().map(|p| rank_of(p.rows, ncols));
    Ok(TangentDims {
        g0: dims.next().unwrap(),
        g1: dims.next().unwrap(),
        g2: dims.next().unwrap(),
        stacked,
        supports_disjoint,
    })
}

/// `Σ_i w_i w_{i+1} (w_i − 1)(w_{i+1} − 1)`.
pub fn g2_formula(format: &Format) -> usize {
    (0..format.degree())
        .map(|i| {
            let (a, b) = (format.width(i), format.width(i + 1));
            a * b * (a - 1) * (b - 1)
        })
        .sum()
}

/// `Σ_i (w_{i−1} + w_{i+1} − 1)(w_i − 1) w_i` with `w_0 = w_d`.
pub fn g1_formula(format: &Format) -> usize {
    let d = format.degree();
    (0..d)
        .map(|i| {
            let w = format.width(i);
            (format.width(i + d - 1) + format.width(i + 1) - 1) * (w - 1) * w
        })
        .sum()
}

/// `|E| − Σ w_i + 1`, the dimension of `g₀ f_com`.
pub fn g0_fcom_formula(format: &Format) -> usize {
    format.num_edges() + 1 - format.sum_widths()
}

/// `|E| − Σ w_i`, the upper bound on the dimension of `g₀ f₀`.
pub fn g0_f0_bound(format: &Format) -> usize {
    format.num_edges() - format.sum_widths()
}

/// For vertex layer `i` and `a ≠ b`, the sum of `A^{(i−1)}_{e,e′} f` over same-start
/// pairs with `e′ → a`, `e → b` equals the sum of `A^{(i)}_{h,h′} f` over same-end
/// pairs with `h` from `a`, `h′` from `b`. Returns both sides.
pub fn boundary_sums(
    f: &RationalTensor,
    format: &Format,
    i: usize,
    a: usize,
    b: usize,
) -> Result<(RationalTensor, RationalTensor)> {
    check_edge_alphabets(f, format)?;
    let d = format.degree();
    let prev = (i + d - 1) % d;
    let sizes = f.alphabet_sizes().to_vec();
    let mut lhs = LayeredTensor::zero(sizes.clone());
    for k in 0..format.width(prev) {
        let e = format.edge_index(EdgeId::new(prev, k, b));
        let e2 = format.edge_index(EdgeId::new(prev, k, a));
        let t = lie_action(LieBasisElement { layer: prev, from_edge: e, to_edge: e2 }, f)?;
        lhs = lhs.add(&t)?;
    }
    let mut rhs = LayeredTensor::zero(sizes);
    for l in 0..format.width(i + 1) {
        let h = format.edge_index(EdgeId::new(i, a, l));
        let h2 = format.edge_index(EdgeId::new(i, b, l));
        let t = lie_action(LieBasisElement { layer: i, from_edge: h, to_edge: h2 }, f)?;
        rhs = rhs.add(&t)?;
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub format: Format,
    pub concise: ConciseReport,
    pub dims_fcom: TangentDims,
    pub dims_f0: TangentDims,
    pub separated: bool,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn dim_t_fcom(&self) -> usize {
        self.dims_fcom.total()
    }

    pub fn dim_t_f0(&self) -> usize {
        self.dims_f0.total()
    }
}

/// Certifies that `f₀` has no ABP of the given format: `f₀` is concise (so it is
/// not in `(End∖G) f_com`) and its orbit is strictly smaller (so it is not in `G f_com`).
pub fn certify_separation(format: &Format) -> Result<Certificate> {
    let d = format.degree();
    if d < 3 || d % 2 == 0 {
        return Err(Error::HypothesisViolated(format!("need odd d >= 3, got d = {d}")));
    }
    if let Some(i) = format.widths().iter().position(|&w| w < 2) {
        return Err(Error::HypothesisViolated(format!(
            "need all widths >= 2, but w{} = {}",
            i + 1,
            format.width(i)
        )));
    }
    let fc = f_com(format);
    let fz = f0(format)?;
    let concise = is_concise(&fz);
    let dims_fcom = tangent_dim(&fc, format)?;
    let dims_f0 = tangent_dim(&fz, format)?;
    let (g0c, g1, g2, bound) = (
        g0_fcom_formula(format),
        g1_formula(format),
        g2_formula(format),
        g0_f0_bound(format),
    );
    let eq = |name: &str, got: usize, want: usize| {
        Check::new(name, got == want, format!("rank {got}, formula {want}"))
    };
    let mut checks = vec![
        Check::new(
            "f0_concise",
            concise.concise,
            format!("mode ranks {:?}, alphabet sizes {:?}", concise.mode_ranks, fz.alphabet_sizes()),
        ),
        eq("g2_fcom_formula", dims_fcom.g2, g2),
        eq("g1_fcom_formula", dims_fcom.g1, g1),
        eq("g0_fcom_formula", dims_fcom.g0, g0c),
        eq("g2_f0_formula", dims_f0.g2, g2),
        eq("g1_f0_formula", dims_f0.g1, g1),
        Check::new(
            "g0_f0_bound",
            dims_f0.g0 <= bound,
            format!("rank {}, bound {bound}", dims_f0.g0),
        ),
        Check::new(
            "direct_sum_fcom",
            dims_fcom.direct_sum_holds(),
            format!("disjoint supports {}, stacked rank {:?}", dims_fcom.supports_disjoint, dims_fcom.stacked),
        ),
        Check::new(
            "direct_sum_f0",
            dims_f0.direct_sum_holds(),
            format!("disjoint supports {}, stacked rank {:?}", dims_f0.supports_disjoint, dims_f0.stacked),
        ),
    ];
    checks.push(Check::new(
        "orbit_dimension_drop",
        dims_f0.total() < dims_fcom.total(),
        format!("dim T_f0 = {} < dim T_fcom = {}", dims_f0.total(), dims_fcom.total()),
    ));
    let separated = checks.iter().all(|c| c.passed);
    Ok(Certificate {
        format: format.clone(),
        concise,
        dims_fcom,
        dims_f0,
        separated,
        checks,
    })
}
