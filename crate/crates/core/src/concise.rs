//! Mode flattenings, conciseness, and the slot-wise action of `End`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::tensor::{mixed_rank, LayeredTensor, Monomial, RationalTensor};

/// `M^j`: rows indexed by slot `j`, columns by the remaining slots in lexicographic order.
pub fn mode_flattening(f: &RationalTensor, j: usize) -> Result<SparseMatrix> {
    let d = f.degree();
    if j >= d {
        return Err(Error::ModeOutOfRange { mode: j, degree: d });
    }
    let sizes = f.alphabet_sizes();
    let rest: Vec<usize> = sizes.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, s)| *s).collect();
    let cols: usize = rest.iter().product();
    let mut m = SparseMatrix::new(sizes[j], cols);
    for (mono, c) in f.terms() {
        let other: Vec<usize> = mono.0.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, k)| *k).collect();
        m.set(mono.0[j], mixed_rank(&other, &rest), c.clone());
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConciseReport {
    pub concise: bool,
    pub mode_ranks: Vec<usize>,
}

impl ConciseReport {
    /// First mode whose flattening is rank deficient.
    pub fn witness_mode(&self, sizes: &[usize]) -> Option<usize> {
        self.mode_ranks.iter().zip(sizes).position(|(r, m)| r < m)
    }
}

pub fn is_concise(f: &RationalTensor) -> ConciseReport {
    let mode_ranks: Vec<usize> = (0..f.degree())
        .map(|j| mode_flattening(f, j).expect("mode in range").rank())
        .collect();
    let concise = mode_ranks.iter().zip(f.alphabet_sizes()).all(|(r, m)| r == m);
    ConciseReport { concise, mode_ranks }
}

/// Applies `(g_1, …, g_d)` slot by slot: `e_k ↦ Σ_l g_i[l][k] e_l` in slot `i`,
/// so that `M^i_{gf} = g_i M^i_f`.
pub fn apply_end(f: &RationalTensor, g: &[SparseMatrix]) -> Result<RationalTensor> {
    let sizes = f.alphabet_sizes().to_vec();
    if g.len() != sizes.len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} matrices, got {}",
            sizes.len(),
            g.len()
        )));
    }
    for (i, (gi, &m)) in g.iter().zip(&sizes).enumerate() {
        if gi.rows() != m || gi.cols() != m {
            return Err(Error::ShapeMismatch(format!(
                "slot {}: expected {m}x{m}, got {}x{}",
                i + 1,
                gi.rows(),
                gi.cols()
            )));
        }
    }
    let mut cur = f.clone();
    for (slot, gi) in g.iter().enumerate() {
        let cols = gi.transpose();
        let mut next = LayeredTensor::zero(sizes.clone());
        for (mono, c) in cur.terms() {
            for (l, v) in cols.row(mono.0[slot]) {
                let mut m = mono.0.clone();
                m[slot] = *l;
                next.add_term_unchecked(Monomial(m), &(c * v));
            }
        }
        cur = next;
    }
    debug_assert!(cur.terms().all(|(_, c)| !c.is_zero()));
    Ok(cur)
}
