//! Seeded generators for randomized suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abp::{Abp, EdgeId, Format, LinearLabel, Model};
use crate::laurent::LaurentEps;
use crate::matrix::SparseMatrix;
use crate::scalar::{int, rat, Rational};
use crate::tensor::{mixed_unrank, LayeredTensor, Monomial, RationalTensor};

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    let n: i64 = rng.gen_range(-4..=4);
    let d: i64 = rng.gen_range(1..=3);
    rat(n, d)
}

fn positive_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(1..=5), rng.gen_range(1..=3))
}

/// A nonzero tensor with up to `max_terms` random monomials and small rational coefficients.
pub fn random_tensor(rng: &mut impl Rng, sizes: &[usize], max_terms: usize) -> RationalTensor {
    let total: usize = sizes.iter().product();
    loop {
        let mut t = LayeredTensor::zero(sizes.to_vec());
        for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
            let m = Monomial(mixed_unrank(rng.gen_range(0..total), sizes));
            t.add_term_unchecked(m, &small_rational(rng));
        }
        if !t.is_zero() {
            return t;
        }
    }
}

fn variable_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Random single-(source,sink) ABP over `nvars` shared variables with rational labels.
pub fn random_single_abp(rng: &mut impl Rng, widths: &[usize], nvars: usize, density: f64) -> Abp {
    let mut w = widths.to_vec();
    w[0] = 1;
    random_abp(rng, Format::new(w).expect("positive widths"), Model::Single, nvars, density)
}

/// Random trace-model ABP over `nvars` shared variables with rational labels.
pub fn random_trace_abp(rng: &mut impl Rng, format: &Format, nvars: usize, density: f64) -> Abp {
    random_abp(rng, format.clone(), Model::Trace, nvars, density)
}

fn random_abp(rng: &mut impl Rng, format: Format, model: Model, nvars: usize, density: f64) -> Abp {
    let d = format.degree();
    let mut abp = Abp::new(format.clone(), model, variable_names(nvars));
    abp.alphabets = Some(vec![(0..nvars).collect(); d]);
    for e in format.edges().collect::<Vec<_>>() {
        if !rng.gen_bool(density) {
            continue;
        }
        let mut label = LinearLabel::default();
        for v in 0..nvars {
            if rng.gen_bool(0.6) {
                label.add_var(v, &LaurentEps::constant(small_rational(rng)));
            }
        }
        abp.set_label(e, label);
    }
    abp
}

/// Parameters for ε-monotone single ABPs.
#[derive(Clone, Debug)]
pub struct EpsAbpParams {
    pub widths: Vec<usize>,
    pub nvars: usize,
    pub min_exp: i64,
    pub max_exp: i64,
    pub density: f64,
    pub affine: bool,
}

/// A candidate ε-monotone single ABP: every coefficient has a positive lowest
/// term, sometimes followed by a higher term of either sign. Exponents come from
/// random vertex potentials plus a nonnegative per-edge offset (so many, but not
/// all, candidates have an ε-free limit), clipped to the allowed range.
pub fn random_eps_abp(rng: &mut impl Rng, p: &EpsAbpParams) -> Abp {
    let mut w = p.widths.clone();
    w[0] = 1;
    let format = Format::new(w).expect("positive widths");
    let d = format.degree();
    let potential: Vec<Vec<i64>> = (0..=d)
        .map(|layer| {
            (0..format.width(layer))
                .map(|_| if layer == 0 || layer == d { 0 } else { rng.gen_range(-2..=2) })
                .collect()
        })
        .collect();
    let mut abp = Abp::new(format.clone(), Model::Single, variable_names(p.nvars));
    abp.affine = p.affine;
    abp.alphabets = Some(vec![(0..p.nvars).collect(); d]);
    for e in format.edges().collect::<Vec<_>>() {
        if !rng.gen_bool(p.density) {
            continue;
        }
        let base = potential[e.layer + 1][e.to] - potential[e.layer][e.from];
        let mut label = LinearLabel::default();
        for v in 0..p.nvars {
            if rng.gen_bool(0.6) {
                label.add_var(v, &eps_coeff(rng, base, p));
            }
        }
        if p.affine && rng.gen_bool(0.3) {
            label.constant = eps_coeff(rng, base, p);
        }
        abp.set_label(e, label);
    }
    abp
}

fn eps_coeff(rng: &mut impl Rng, base: i64, p: &EpsAbpParams) -> LaurentEps {
    let shift = i64::from(rng.gen_bool(0.3)) - i64::from(rng.gen_bool(0.05));
    let k = (base + shift).clamp(p.min_exp, p.max_exp);
    let mut c = LaurentEps::monomial(positive_rational(rng), k);
    if rng.gen_bool(0.25) && k < p.max_exp {
        c.add_term(rng.gen_range(k + 1..=p.max_exp), &small_rational(rng));
    }
    c
}

/// Samples candidates until the output is nonzero and free of negative ε-exponents.
pub fn random_deborder_instance(rng: &mut impl Rng, p: &EpsAbpParams, max_attempts: usize) -> Option<Abp> {
    (0..max_attempts).find_map(|_| {
        let abp = random_eps_abp(rng, p);
        let out = abp.evaluate().ok()?;
        (!out.is_zero() && !out.has_negative_exponent()).then_some(abp)
    })
}

fn random_int_matrix(rng: &mut impl Rng, n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect())
        .collect()
}

/// A tuple of square matrices where one randomly chosen slot is singular.
pub fn random_singular_tuple(rng: &mut impl Rng, sizes: &[usize]) -> (Vec<SparseMatrix>, usize) {
    let bad = rng.gen_range(0..sizes.len());
    let tuple = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut m = random_int_matrix(rng, n);
            if i == bad {
                // one row becomes a combination of the others (or zero when n = 1)
                let target = rng.gen_range(0..n);
                let mut row = vec![int(0); n];
                for (j, r) in m.iter().enumerate() {
                    if j != target {
                        let c = int(rng.gen_range(-2..=2));
                        for (x, y) in row.iter_mut().zip(r) {
                            *x += &c * y;
                        }
                    }
                }
                m[target] = row;
            }
            SparseMatrix::from_dense(&m)
        })
        .collect();
    (tuple, bad)
}

/// A tuple of invertible matrices, each a product of random unit triangular factors
/// and a shuffled permutation.
pub fn random_invertible_tuple(rng: &mut impl Rng, sizes: &[usize]) -> Vec<SparseMatrix> {
    sizes
        .iter()
        .map(|&n| {
            let mut lower = SparseMatrix::identity(n);
            let mut upper = SparseMatrix::identity(n);
            for i in 0..n {
                for j in 0..i {
                    lower.set(i, j, int(rng.gen_range(-2..=2)));
                    upper.set(j, i, int(rng.gen_range(-2..=2)));
                }
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut p = SparseMatrix::new(n, n);
            for (i, &j) in perm.iter().enumerate() {
                p.set(i, j, int(1));
            }
            lower.mul(&upper).and_then(|m| m.mul(&p)).expect("square factors")
        })
        .collect()
}

/// A random edge of a format.
pub fn random_edge(rng: &mut impl Rng, format: &Format) -> EdgeId {
    let layer = rng.gen_range(0..format.degree());
    EdgeId::new(layer, rng.gen_range(0..format.width(layer)), rng.gen_range(0..format.width(layer + 1)))
}
