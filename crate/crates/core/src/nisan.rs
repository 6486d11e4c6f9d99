//! Prefix/suffix flattenings, their exact ranks, and synthesis of a
//! single-(source,sink) ABP whose layer sizes equal those ranks.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::abp::{Abp, EdgeId, Format, LinearLabel, Model};
use crate::error::{Error, Result};
use crate::laurent::LaurentEps;
use crate::matrix::{EchelonBasis, SparseMatrix, SparseRow};
use crate::scalar::Rational;
use crate::tensor::{mixed_rank, RationalTensor};

/// Flattening ranks `(r_0, …, r_d)`; `r_i` is the minimal size of vertex layer `i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthProfile {
    pub ranks: Vec<usize>,
}

impl WidthProfile {
    /// Largest internal rank, i.e. the single-(source,sink) width of `f`.
    pub fn width(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }
}

/// Matrix `M_i` with rows indexed by prefixes `(k_1..k_i)` and columns by
/// suffixes `(k_{i+1}..k_d)`, both in lexicographic mixed-radix order.
pub fn nisan_flattening(f: &RationalTensor, i: usize) -> Result<SparseMatrix> {
    let d = f.degree();
    if i > d {
        return Err(Error::ModeOutOfRange { mode: i, degree: d });
    }
    let sizes = f.alphabet_sizes();
    let rows: usize = sizes[..i].iter().product();
    let cols: usize = sizes[i..].iter().product();
    let mut m = SparseMatrix::new(rows, cols);
    for (mono, c) in f.terms() {
        let r = mixed_rank(&mono.0[..i], &sizes[..i]);
        let col = mixed_rank(&mono.0[i..], &sizes[i..]);
        m.set(r, col, c.clone());
    }
    Ok(m)
}

pub fn exact_rank(m: &SparseMatrix) -> usize {
    m.rank()
}

pub fn width_profile(f: &RationalTensor) -> Result<WidthProfile> {
    if f.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let ranks = (0..=f.degree())
        .map(|i| nisan_flattening(f, i).map(|m| m.rank()))
        .collect::<Result<Vec<_>>>()?;
    Ok(WidthProfile { ranks })
}

/// Variable names and per-slot alphabets used by [`minimize`]: shared `x1..xn`
/// when every slot has the same size, otherwise `x{slot}_{k}` per slot.
fn minimize_variables(sizes: &[usize]) -> (Vec<String>, Vec<Vec<usize>>) {
    let uniform = sizes.windows(2).all(|w| w[0] == w[1]);
    if uniform {
        let n = sizes[0];
        let names = (1..=n).map(|k| format!("x{k}")).collect();
        (names, vec![(0..n).collect(); sizes.len()])
    } else {
        let mut names = Vec::new();
        let mut alphabets = Vec::new();
        for (slot, &n) in sizes.iter().enumerate() {
            let start = names.len();
            names.extend((1..=n).map(|k| format!("x{}_{}", slot + 1, k)));
            alphabets.push((start..start + n).collect());
        }
        (names, alphabets)
    }
}

/// Builds a single-(source,sink) ABP computing `f` whose vertex layer `i+1`
/// has exactly `rank(M_i)` vertices.
///
/// `B_0 = {f}` and `B_i` (`i ≥ 1`) is the reduced row-echelon basis of the row
/// space of `M_i`. Every `b ∈ B_i` splits as `Σ_k x_k ⊗ b_k` with each `b_k` in
/// the row space of `M_{i+1}`; the coordinates of `b_k` in `B_{i+1}` are the
/// label coefficients of the edges leaving `b`.
pub fn minimize(f: &RationalTensor) -> Result<Abp> {
    if f.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let d = f.degree();
    let sizes = f.alphabet_sizes().to_vec();
    let mut bases: Vec<Vec<SparseRow>> = Vec::with_capacity(d + 1);
    let mut echelons: Vec<Option<EchelonBasis>> = Vec::with_capacity(d + 1);
    let m0 = nisan_flattening(f, 0)?;
    bases.push(vec![m0.row(0).clone()]);
    echelons.push(None);
    for i in 1..=d {
        let m = nisan_flattening(f, i)?;
        let basis = EchelonBasis::from_rows(m.row_iter());
        bases.push(basis.rows().to_vec());
        echelons.push(Some(basis));
    }

    let widths: Vec<usize> = bases[..d].iter().map(Vec::len).collect();
    let (names, alphabets) = minimize_variables(&sizes);
    let mut abp = Abp::new(Format::new(widths)?, Model::Single, names);
    abp.alphabets = Some(alphabets.clone());

    for layer in 0..d {
        let tail: usize = sizes[layer + 1..].iter().product();
        let next = echelons[layer + 1].as_ref().expect("echelon basis for i >= 1");
        for (j, b) in bases[layer].iter().enumerate() {
            let mut slices: BTreeMap<usize, SparseRow> = BTreeMap::new();
            for (&col, v) in b {
                slices
                    .entry(col / tail)
                    .or_default()
                    .insert(col % tail, v.clone());
            }
            let mut labels: BTreeMap<usize, LinearLabel> = BTreeMap::new();
            for (k, slice) in slices {
                let coords = next
                    .coordinates(&slice)
                    .expect("slice lies in the next row space");
                for (t, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        labels
                            .entry(t)
                            .or_default()
                            .add_var(alphabets[layer][k], &LaurentEps::constant(c));
                    }
                }
            }
            for (t, l) in labels {
                abp.set_label(EdgeId::new(layer, j, t), l);
            }
        }
    }
    Ok(abp)
}

/// Output of the `minimize` pipeline.
#[derive(Clone, Debug)]
pub struct MinimizeTranscript {
    pub profile: WidthProfile,
    pub abp: Abp,
    pub verified: bool,
}

/// Minimizes and re-evaluates, recording whether the round trip is exact.
pub fn minimize_verified(f: &RationalTensor) -> Result<MinimizeTranscript> {
    let profile = width_profile(f)?;
    let abp = minimize(f)?;
    let back = abp.evaluate()?;
    let verified = back.to_rational().map_or(Ok(false), |t| t.tensor_equal(f))?
        && abp.format.widths() == &profile.ranks[..f.degree()];
    Ok(MinimizeTranscript {
        profile,
        abp,
        verified,
    })
}

/// Rational label coefficient of a minimized ABP edge for a given variable.
pub fn label_coeff(abp: &Abp, e: EdgeId, var: usize) -> Rational {
    abp.label(e)
        .and_then(|l| l.terms.get(&var))
        .and_then(LaurentEps::as_rational)
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn swap2() -> RationalTensor {
        RationalTensor::from_terms(vec![2, 2], vec![(vec![0, 1], int(1)), (vec![1, 0], int(1))]).unwrap()
    }

    #[test]
    fn flattening_of_swap() {
        let m = nisan_flattening(&swap2(), 1).unwrap();
        assert_eq!(m.to_dense(), vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        let m0 = nisan_flattening(&swap2(), 0).unwrap();
        assert_eq!((m0.rows(), m0.cols()), (1, 4));
        assert_eq!(m0.to_dense()[0], vec![int(0), int(1), int(1), int(0)]);
    }

    #[test]
    fn profiles() {
        assert_eq!(width_profile(&swap2()).unwrap().ranks, vec![1, 2, 1]);
        let cube = RationalTensor::from_terms(vec![1, 1, 1], vec![(vec![0, 0, 0], int(1))]).unwrap();
        assert_eq!(width_profile(&cube).unwrap().ranks, vec![1, 1, 1, 1]);
        assert_eq!(width_profile(&RationalTensor::zero(vec![2])), Err(Error::ZeroTensor));
    }

    #[test]
    fn minimize_swap_roundtrips() {
        let t = minimize_verified(&swap2()).unwrap();
        assert!(t.verified);
        assert_eq!(t.abp.layer_sizes(), vec![1, 2, 1]);
        assert!(matches!(minimize(&RationalTensor::zero(vec![2, 2])), Err(Error::ZeroTensor)));
    }
}
