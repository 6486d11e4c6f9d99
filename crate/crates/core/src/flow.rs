//! Flows on the identified digraph `Γ̃`, the path tensors `ψ(e)` and `ψ′(e)`,
//! and exact verification of the dimension statements for `g₀ f_com` and `g₀ f₀`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{One, Zero};

use crate::abp::{Abp, EdgeId, Format};
use crate::error::{Error, Result};
use crate::family::{valid_paths, ValidPath};
use crate::matrix::{SparseMatrix, SparseRow};
use crate::scalar::{int, Rational};
use crate::tensor::{LayeredTensor, RationalTensor};

/// A vertex of `Γ̃`: `(layer, index)`, 0-based; layer `d` is merged into layer 0.
pub type Vertex = (usize, usize);

/// `Γ̃`: the layered graph with first and last vertex layers identified by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentifiedGraph {
    format: Format,
    edges: Vec<EdgeId>,
}

impl IdentifiedGraph {
    /// The complete layered graph of a format.
    pub fn complete(format: &Format) -> Self {
        Self {
            format: format.clone(),
            edges: format.edges().collect(),
        }
    }

    /// The edges carrying nonzero labels in a trace ABP.
    pub fn from_abp(abp: &Abp) -> Self {
        Self {
            format: abp.format.clone(),
            edges: abp.labels.keys().copied().collect(),
        }
    }

    pub fn format(&self) -> &Format {
        &self.format
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let f = &self.format;
        (0..f.degree()).flat_map(|i| (0..f.width(i)).map(move |v| (i, v))).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.format.sum_widths()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn tail(&self, e: EdgeId) -> Vertex {
        (e.layer, e.from)
    }

    pub fn head(&self, e: EdgeId) -> Vertex {
        ((e.layer + 1) % self.format.degree(), e.to)
    }

    fn vertex_index(&self, v: Vertex) -> usize {
        self.format.widths()[..v.0].iter().sum::<usize>() + v.1
    }

    /// Connected as an undirected graph.
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.num_vertices());
        for &e in &self.edges {
            uf.union(self.vertex_index(self.tail(e)), self.vertex_index(self.head(e)));
        }
        uf.components() == 1
    }

    /// Rows `r_v = Σ_in χ(e) − Σ_out χ(e)`, one per vertex, columns in edge order.
    pub fn incidence_matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::new(self.num_vertices(), self.num_edges());
        for (j, &e) in self.edges.iter().enumerate() {
            let (t, h) = (self.vertex_index(self.tail(e)), self.vertex_index(self.head(e)));
            if t != h {
                m.set(h, j, int(1));
                m.set(t, j, int(-1));
            }
        }
        m
    }

    /// The incidence rows as edge vectors, keyed by vertex.
    pub fn incidence_rows(&self) -> Vec<(Vertex, FlowVector)> {
        let mut rows: BTreeMap<Vertex, FlowVector> =
            self.vertices().into_iter().map(|v| (v, FlowVector::default())).collect();
        for &e in &self.edges {
            rows.get_mut(&self.head(e)).unwrap().add(e, &int(1));
            rows.get_mut(&self.tail(e)).unwrap().add(e, &int(-1));
        }
        rows.into_iter().collect()
    }

    /// Stacks edge vectors as rows over this graph's edge order.
    pub fn rows_matrix<'a, I: IntoIterator<Item = &'a FlowVector>>(&self, vectors: I) -> SparseMatrix {
        let pos: HashMap<EdgeId, usize> = self.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let rows = vectors
            .into_iter()
            .map(|v| v.values.iter().map(|(e, c)| (pos[e], c.clone())).collect::<SparseRow>())
            .collect();
        SparseMatrix::from_rows(self.num_edges(), rows)
    }

    pub fn rank_of(&self, vectors: &[FlowVector]) -> usize {
        self.rows_matrix(vectors).rank()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    /// Returns false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// A rational vector on edges. Flows additionally satisfy conservation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowVector {
    pub values: BTreeMap<EdgeId, Rational>,
}

impl FlowVector {
    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> Self {
        let mut v = Self::default();
        for e in edges {
            v.add(e, &int(1));
        }
        v
    }

    pub fn get(&self, e: EdgeId) -> Rational {
        self.values.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&mut self, e: EdgeId, c: &Rational) {
        let entry = self.values.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.values.remove(&e);
        }
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: &Rational, other: &FlowVector) {
        for (e, v) in &other.values {
            self.add(*e, &(c * v));
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::default();
        out.axpy(c, self);
        out
    }

    pub fn sub(&self, other: &FlowVector) -> Self {
        let mut out = self.clone();
        out.axpy(&int(-1), other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &EdgeId> {
        self.values.keys()
    }

    pub fn dot(&self, other: &FlowVector) -> Rational {
        self.values
            .iter()
            .map(|(e, v)| v * other.get(*e))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Inflow equals outflow at every vertex of `g`.
    pub fn is_flow(&self, g: &IdentifiedGraph) -> bool {
        let mut balance: HashMap<Vertex, Rational> = HashMap::new();
        for (e, v) in &self.values {
            *balance.entry(g.head(*e)).or_insert_with(Rational::zero) += v;
            *balance.entry(g.tail(*e)).or_insert_with(Rational::zero) -= v;
        }
        balance.values().all(Zero::is_zero)
    }

    /// Every value is `±1`.
    pub fn is_signed_unit(&self) -> bool {
        self.values.values().all(|v| *v == int(1) || *v == int(-1))
    }
}

/// `χ(p)`: the characteristic flow of the length-`d` cycle of a valid path.
pub fn characteristic_flow(p: &ValidPath) -> FlowVector {
    FlowVector::from_edges(p.edges())
}

pub fn flow_space_dim(g: &IdentifiedGraph) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let dim = g.num_edges() + 1 - g.num_vertices();
    assert_eq!(dim, g.num_edges() - g.incidence_matrix().rank(), "incidence rank disagrees");
    Ok(dim)
}

/// `τ`: all out-edges of the first vertex of every layer, minus the edge closing
/// the first-vertex cycle.
pub fn spanning_tree_tau(format: &Format) -> BTreeSet<EdgeId> {
    let d = format.degree();
    (0..d)
        .flat_map(|i| (0..format.width(i + 1)).map(move |b| EdgeId::new(i, 0, b)))
        .filter(|&e| e != EdgeId::new(d - 1, 0, 0))
        .collect()
}

pub fn is_spanning_tree(g: &IdentifiedGraph, tree: &BTreeSet<EdgeId>) -> bool {
    if tree.len() + 1 != g.num_vertices() || !tree.iter().all(|e| g.edges.contains(e)) {
        return false;
    }
    let mut uf = UnionFind::new(g.num_vertices());
    tree.iter()
        .all(|&e| uf.union(g.vertex_index(g.tail(e)), g.vertex_index(g.head(e))))
}

/// For each non-tree edge `e`, the flow of the cycle formed by `e` (forward) and the tree path back.
pub fn fundamental_cycle_basis(
    g: &IdentifiedGraph,
    tree: &BTreeSet<EdgeId>,
) -> Result<Vec<(EdgeId, FlowVector)>> {
    if !is_spanning_tree(g, tree) {
        return Err(Error::HypothesisViolated("edge set is not a spanning tree".into()));
    }
    let mut adj: HashMap<Vertex, Vec<(EdgeId, Vertex, i64)>> = HashMap::new();
    for &e in tree {
        adj.entry(g.tail(e)).or_default().push((e, g.head(e), 1));
        adj.entry(g.head(e)).or_default().push((e, g.tail(e), -1));
    }
    let mut out = Vec::new();
    for &e in &g.edges {
        if tree.contains(&e) {
            continue;
        }
        let (start, goal) = (g.head(e), g.tail(e));
        let mut prev: HashMap<Vertex, (Vertex, EdgeId, i64)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = BTreeSet::from([start]);
        while let Some(v) = queue.pop_front() {
            if v == goal {
                break;
            }
            for &(te, w, dir) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    prev.insert(w, (v, te, dir));
                    queue.push_back(w);
                }
            }
        }
        let mut flow = FlowVector::from_edges([e]);
        let mut v = goal;
        while v != start {
            let (p, te, dir) = prev[&v];
            flow.add(te, &int(dir));
            v = p;
        }
        out.push((e, flow));
    }
    Ok(out)
}

/// One characteristic flow per directed length-`d` cycle, i.e. per valid path whose edges all exist.
pub fn length_d_cycle_flows(g: &IdentifiedGraph) -> Vec<FlowVector> {
    let present: BTreeSet<EdgeId> = g.edges.iter().copied().collect();
    valid_paths(&g.format)
        .into_iter()
        .filter(|p| p.edges().iter().all(|e| present.contains(e)))
        .map(|p| characteristic_flow(&p))
        .collect()
}

/// `ρ(x_{e_1} ⊗ … ⊗ x_{e_d}) = χ(e_1) + … + χ(e_d)`, extended linearly.
pub fn rho(t: &RationalTensor, format: &Format) -> Result<FlowVector> {
    if t.alphabet_sizes() != format.edge_alphabet_sizes().as_slice() {
        return Err(Error::ShapeMismatch(format!(
            "tensor alphabets {:?} are not the edge sets of format {format}",
            t.alphabet_sizes()
        )));
    }
    let mut out = FlowVector::default();
    for (m, c) in t.terms() {
        for (layer, &k) in m.0.iter().enumerate() {
            out.add(format.edge_at(layer, k), c);
        }
    }
    Ok(out)
}

/// Which valid paths a path tensor sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathSet {
    /// All valid paths.
    All,
    /// Valid paths with exactly one parity-preserving edge.
    OnePreserving,
}

impl PathSet {
    fn admits(&self, p: &ValidPath) -> bool {
        match self {
            PathSet::All => true,
            PathSet::OnePreserving => p.preserving_count() == 1,
        }
    }
}

/// Valid paths of a format, cached for repeated path-tensor queries.
pub struct PathTensors {
    format: Format,
    paths: Vec<ValidPath>,
    set: PathSet,
}

impl PathTensors {
    pub fn new(format: &Format, set: PathSet) -> Self {
        let paths = valid_paths(format).into_iter().filter(|p| set.admits(p)).collect();
        Self {
            format: format.clone(),
            paths,
            set,
        }
    }

    pub fn set(&self) -> PathSet {
        self.set
    }

    pub fn paths(&self) -> &[ValidPath] {
        &self.paths
    }

    fn through(&self, e: EdgeId) -> impl Iterator<Item = &ValidPath> {
        self.paths.iter().filter(move |p| p.contains(e))
    }

    /// `ψ(e)` (or `ψ′(e)`): the sum of path monomials through `e`.
    pub fn psi(&self, e: EdgeId) -> RationalTensor {
        let mut t = LayeredTensor::zero(self.format.edge_alphabet_sizes());
        for p in self.through(e) {
            t.add_term_unchecked(p.monomial(&self.format), &Rational::one());
        }
        t
    }

    pub fn count_through(&self, e: EdgeId) -> usize {
        self.through(e).count()
    }

    /// `ψ̄(e) = ψ(e) / #paths through e`.
    pub fn psi_bar(&self, e: EdgeId) -> RationalTensor {
        let n = self.count_through(e);
        self.psi(e).scale(&Rational::new(1.into(), n.into()))
    }

    /// `Σ_e k_e ψ(e)`.
    pub fn combination(&self, k: &FlowVector) -> RationalTensor {
        let mut t = LayeredTensor::zero(self.format.edge_alphabet_sizes());
        for (e, c) in &k.values {
            t = t.add(&self.psi(*e).scale(c)).expect("same shape");
        }
        t
    }

    pub fn in_kernel(&self, k: &FlowVector) -> bool {
        self.combination(k).is_zero()
    }

    /// Rows `ψ(e)` for every edge, columns indexed by the admitted paths.
    pub fn matrix(&self) -> SparseMatrix {
        let col: HashMap<&ValidPath, usize> = self.paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let rows = self
            .format
            .edges()
            .map(|e| self.through(e).map(|p| (col[p], Rational::one())).collect::<SparseRow>())
            .collect();
        SparseMatrix::from_rows(self.paths.len(), rows)
    }

    /// `dim span{ψ(e)}`.
    pub fn span_dim(&self) -> usize {
        self.matrix().rank()
    }
}

/// `(d−1) Σ_{preserving} χ(e) − Σ_{changing} χ(e)`.
pub fn parity_kernel_vector(format: &Format) -> FlowVector {
    let d = format.degree() as i64;
    let mut v = FlowVector::default();
    for e in format.edges() {
        let c = if e.is_parity_preserving() { d - 1 } else { -1 };
        v.add(e, &int(c));
    }
    v
}

/// The cycle through the first vertex of every layer.
pub fn witness_cycle(format: &Format) -> FlowVector {
    characteristic_flow(&ValidPath {
        vertices: vec![0; format.degree()],
    })
}

fn require_decomposable(format: &Format) -> Result<()> {
    if format.degree() < 3 {
        return Err(Error::HypothesisViolated(format!(
            "cycle decompositions need d >= 3, got d = {}",
            format.degree()
        )));
    }
    Ok(())
}

fn path_with(d: usize, set: &[(usize, usize)]) -> ValidPath {
    let mut vertices = vec![0; d];
    for &(i, v) in set {
        vertices[i] = v;
    }
    ValidPath { vertices }
}

/// Writes the fundamental cycle of a non-tree edge of `τ` as a signed combination
/// of directed length-`d` cycles.
pub fn cycle_decomposition(format: &Format, e: EdgeId) -> Result<Vec<(i64, ValidPath)>> {
    require_decomposable(format)?;
    let d = format.degree();
    if spanning_tree_tau(format).contains(&e) {
        return Err(Error::HypothesisViolated(format!("{e} is a tree edge")));
    }
    let (i, a, b) = (e.layer, e.from, e.to);
    Ok(if i == 0 {
        if b == 0 {
            vec![(1, path_with(d, &[(0, a)]))]
        } else {
            vec![
                (1, path_with(d, &[(0, a), (1, b)])),
                (-1, path_with(d, &[(1, b)])),
                (1, path_with(d, &[])),
            ]
        }
    } else if i == d - 1 && b == 0 {
        vec![(1, path_with(d, &[(d - 1, a)]))]
    } else {
        let next = (i + 1) % d;
        vec![
            (1, path_with(d, &[(i, a), (next, b)])),
            (-1, path_with(d, &[(next, b)])),
        ]
    })
}

fn sum_cycles(terms: &[(i64, ValidPath)]) -> FlowVector {
    let mut v = FlowVector::default();
    for (c, p) in terms {
        v.axpy(&int(*c), &characteristic_flow(p));
    }
    v
}

/// Checks every fundamental flow of `τ` against its length-`d` cycle decomposition.
/// Returns the number of non-tree edges checked.
pub fn verify_cycle_decompositions(format: &Format) -> Result<usize> {
    require_decomposable(format)?;
    let g = IdentifiedGraph::complete(format);
    let basis = fundamental_cycle_basis(&g, &spanning_tree_tau(format))?;
    for (e, flow) in &basis {
        let combo = sum_cycles(&cycle_decomposition(format, *e)?);
        if combo != *flow {
            return Err(Error::HypothesisViolated(format!("decomposition of {e} does not match")));
        }
    }
    Ok(basis.len())
}

fn rho_psi_bar(pt: &PathTensors, e: EdgeId) -> FlowVector {
    rho(&pt.psi_bar(e), &pt.format).expect("edge alphabets")
}

/// The layer-by-layer telescoping sum over `ρ(ψ̄(·))` for a length-`d` cycle, stopping
/// after layer `d−1`:
/// `ρψ̄(e_1) + Σ_{k=2}^{d−1} [ (w−1)/w ρψ̄(e_k) − 1/w Σ_{siblings h} ρψ̄(h) ]`
/// where `w` is the width of the target layer of `e_k`.
pub fn telescoping_partial(pt: &PathTensors, cycle: &ValidPath) -> FlowVector {
    let f = &pt.format;
    let d = f.degree();
    let es = cycle.edges();
    let mut total = rho_psi_bar(pt, es[0]);
    for e in &es[1..d - 1] {
        let w = f.width(e.layer + 1) as i64;
        total.axpy(&Rational::new((w - 1).into(), w.into()), &rho_psi_bar(pt, *e));
        for b in 0..f.width(e.layer + 1) {
            if b != e.to {
                let h = EdgeId::new(e.layer, e.from, b);
                total.axpy(&Rational::new((-1).into(), w.into()), &rho_psi_bar(pt, h));
            }
        }
    }
    total
}

/// What the partial telescoping sum leaves on the closing layer beyond `χ(cycle)`:
/// `R(x, s) = −(δ_{x,c} − 1/w_d)(δ_{s,a} − 1/w_1)` on edge `(x, s)`, where the
/// cycle leaves vertex `c` of the last layer and closes at vertex `a`.
pub fn telescoping_residual(format: &Format, cycle: &ValidPath) -> FlowVector {
    let d = format.degree();
    let (c, a) = (cycle.vertices[d - 1], cycle.vertices[0]);
    let (wd, w1) = (format.width(d - 1) as i64, format.width(0) as i64);
    let delta = |x: usize, y: usize, w: i64| {
        Rational::from_integer(i64::from(x == y).into()) - Rational::new(1.into(), w.into())
    };
    let mut r = FlowVector::default();
    for x in 0..format.width(d - 1) {
        for s in 0..format.width(0) {
            r.add(EdgeId::new(d - 1, x, s), &-(delta(x, c, wd) * delta(s, a, w1)));
        }
    }
    r
}

/// The partial sum completed on the closing layer; equals `χ(cycle)` exactly:
/// adds `ρψ̄(e_d) − 1/w_1 Σ_{h ∈ out(c)} ρψ̄(h) − 1/w_2 Σ_{h ∈ out(a)} ρψ̄(h)
/// + 1/(w_1 w_2) Σ_{h ∈ E^1} ρψ̄(h)`.
pub fn telescoping_complete(pt: &PathTensors, cycle: &ValidPath) -> FlowVector {
    let f = &pt.format;
    let d = f.degree();
    let (c, a) = (cycle.vertices[d - 1], cycle.vertices[0]);
    let (w1, w2) = (f.width(0) as i64, f.width(1) as i64);
    let mut total = telescoping_partial(pt, cycle);
    total.axpy(&int(1), &rho_psi_bar(pt, cycle.edges()[d - 1]));
    for s in 0..f.width(0) {
        total.axpy(&Rational::new((-1).into(), w1.into()), &rho_psi_bar(pt, EdgeId::new(d - 1, c, s)));
    }
    for b in 0..f.width(1) {
        total.axpy(&Rational::new((-1).into(), w2.into()), &rho_psi_bar(pt, EdgeId::new(0, a, b)));
    }
    let inv = Rational::new(1.into(), (w1 * w2).into());
    for h in f.layer_edges(0) {
        total.axpy(&inv, &rho_psi_bar(pt, h));
    }
    total
}

/// All directed cycle lengths up to `max_len` (simple cycles, each counted once
/// from its smallest vertex in layer 0).
pub fn directed_cycle_lengths(g: &IdentifiedGraph, max_len: usize) -> BTreeMap<usize, usize> {
    let mut out_adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for &e in &g.edges {
        out_adj.entry(g.tail(e)).or_default().push(g.head(e));
    }
    let mut hist = BTreeMap::new();
    // every cycle meets layer 0 since edges only advance layers
    for start in 0..g.format.width(0) {
        let root = (0, start);
        let mut on_path = BTreeSet::from([root]);
        let mut stack: Vec<(Vertex, usize)> = vec![(root, 0)];
        while let Some(&(v, next)) = stack.last() {
            let succ = out_adj.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            if next >= succ.len() {
                on_path.remove(&v);
                stack.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let w = succ[next];
            let depth = stack.len();
            if w == root {
                *hist.entry(depth).or_insert(0) += 1;
            } else if depth < max_len && !on_path.contains(&w) && !(w.0 == 0 && w.1 < start) {
                on_path.insert(w);
                stack.push((w, 0));
            }
        }
    }
    hist
}

/// Results for `T' = span{ψ′(e)}` (odd `d` only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeReport {
    pub incidence_rows_in_kernel: bool,
    pub parity_vector_in_kernel: bool,
    /// The witness cycle is orthogonal to every incidence row but not to the parity vector.
    pub parity_vector_independent: bool,
    /// Rank of the incidence rows together with the parity vector (expected `|Ṽ|`).
    pub kernel_witness_rank: usize,
    pub dim: usize,
    pub bound: usize,
}

impl PrimeReport {
    pub fn passed(&self, num_vertices: usize) -> bool {
        self.incidence_rows_in_kernel
            && self.parity_vector_in_kernel
            && self.parity_vector_independent
            && self.kernel_witness_rank == num_vertices
            && self.dim <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub format: Format,
    pub num_edges: usize,
    pub num_vertices: usize,
    pub flow_dim: usize,
    pub dim_t: usize,
    pub dim_t_formula: usize,
    pub incidence_rows_in_kernel: bool,
    /// Rank of `{ρ(ψ(e))}`; equals `flow_dim` when `ρ` maps `T` onto `F`.
    pub rho_image_rank: usize,
    pub rho_images_are_flows: bool,
    /// Rank of the length-`d` cycle flows.
    pub cycle_flow_rank: usize,
    pub prime: Option<PrimeReport>,
    /// Directed cycle lengths found up to `2d`, when the search was run.
    pub cycle_lengths: Option<BTreeMap<usize, usize>>,
}

impl DimReport {
    pub fn passed(&self) -> bool {
        let d = self.format.degree();
        self.dim_t == self.dim_t_formula
            && self.incidence_rows_in_kernel
            && self.rho_image_rank == self.flow_dim
            && self.rho_images_are_flows
            && self.cycle_flow_rank == self.flow_dim
            && self.num_edges - self.dim_t == self.num_vertices - 1
            && self.prime.as_ref().is_none_or(|p| p.passed(self.num_vertices))
            && self
                .cycle_lengths
                .as_ref()
                .is_none_or(|h| h.keys().all(|&l| l % d == 0))
    }
}

/// Formats with at most this many valid paths also run the bounded cycle search.
const CYCLE_SEARCH_LIMIT: usize = 64;

pub fn verify_dim_theorems(format: &Format) -> Result<DimReport> {
    if let Some(i) = format.widths().iter().position(|&w| w < 2) {
        return Err(Error::HypothesisViolated(format!(
            "need all widths >= 2, but w{} = {}",
            i + 1,
            format.width(i)
        )));
    }
    let g = IdentifiedGraph::complete(format);
    let flow_dim = flow_space_dim(&g)?;
    let all = PathTensors::new(format, PathSet::All);
    let rows = g.incidence_rows();
    let incidence_rows_in_kernel = rows.iter().all(|(_, r)| all.in_kernel(r));
    let images: Vec<FlowVector> = format.edges().map(|e| rho(&all.psi(e), format).unwrap()).collect();
    let prime = (format.degree() % 2 == 1).then(|| {
        let pp = PathTensors::new(format, PathSet::OnePreserving);
        let parity = parity_kernel_vector(format);
        let witness = witness_cycle(format);
        let mut kernel: Vec<FlowVector> = rows.iter().map(|(_, r)| r.clone()).collect();
        kernel.push(parity.clone());
        PrimeReport {
            incidence_rows_in_kernel: rows.iter().all(|(_, r)| pp.in_kernel(r)),
            parity_vector_in_kernel: pp.in_kernel(&parity),
            parity_vector_independent: rows.iter().all(|(_, r)| r.dot(&witness).is_zero())
                && !parity.dot(&witness).is_zero(),
            kernel_witness_rank: g.rank_of(&kernel),
            dim: pp.span_dim(),
            bound: format.num_edges() - format.sum_widths(),
        }
    });
    Ok(DimReport {
        format: format.clone(),
        num_edges: g.num_edges(),
        num_vertices: g.num_vertices(),
        flow_dim,
        dim_t: all.span_dim(),
        dim_t_formula: format.num_edges() + 1 - format.sum_widths(),
        incidence_rows_in_kernel,
        rho_image_rank: g.rank_of(&images),
        rho_images_are_flows: images.iter().all(|v| v.is_flow(&g)),
        cycle_flow_rank: g.rank_of(&length_d_cycle_flows(&g)),
        prime,
        cycle_lengths: (format.num_valid_paths() <= CYCLE_SEARCH_LIMIT)
            .then(|| directed_cycle_lengths(&g, 2 * format.degree())),
    })
}
