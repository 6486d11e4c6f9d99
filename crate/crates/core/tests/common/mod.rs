//! Independent reference implementations used to cross-check the library.
//!
//! Nothing here calls the algorithms under test: ranks use plain dense
//! Gaussian elimination, tensors are produced by brute-force path expansion or
//! by explicit matrix products, and path sets are enumerated with nested loops.
#![allow(dead_code)]

use std::collections::BTreeMap;

use abplab::abp::Symbol;
use abplab::{Abp, LaurentEps, Rational, RationalTensor};
use num_traits::{One, Zero};
use rand::Rng;

/// Rank of a dense rational matrix by textbook row reduction.
pub fn dense_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pivot;
                for k in c..cols {
                    let v = &m[rank][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// All vertex sequences `(v_1, …, v_d)` with `v_i < w_i`, lexicographic.
pub fn vertex_sequences(widths: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &w in widths {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..w).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Index of edge `(a, b)` in layer `i`: `a · w_{i+1} + b` with wrap-around.
pub fn local_edge(widths: &[usize], i: usize, a: usize, b: usize) -> usize {
    a * widths[(i + 1) % widths.len()] + b
}

pub fn num_edges(widths: &[usize]) -> usize {
    (0..widths.len())
        .map(|i| widths[i] * widths[(i + 1) % widths.len()])
        .sum()
}

/// Global position of edge `(a, b)` of layer `i` when layers are concatenated.
pub fn global_edge(widths: &[usize], i: usize, a: usize, b: usize) -> usize {
    let off: usize = (0..i).map(|j| widths[j] * widths[(j + 1) % widths.len()]).sum();
    off + local_edge(widths, i, a, b)
}

/// Monomial of the closed path through `vs` over the per-layer edge alphabets.
pub fn path_monomial(widths: &[usize], vs: &[usize]) -> Vec<usize> {
    let d = widths.len();
    (0..d)
        .map(|i| local_edge(widths, i, vs[i], vs[(i + 1) % d]))
        .collect()
}

pub fn preserving_edges(vs: &[usize]) -> usize {
    let d = vs.len();
    (0..d).filter(|&i| vs[i] % 2 == vs[(i + 1) % d] % 2).count()
}

pub fn fcom_oracle(widths: &[usize]) -> BTreeMap<Vec<usize>, Rational> {
    vertex_sequences(widths)
        .iter()
        .map(|vs| (path_monomial(widths, vs), r(1)))
        .collect()
}

pub fn f0_oracle(widths: &[usize]) -> BTreeMap<Vec<usize>, Rational> {
    vertex_sequences(widths)
        .iter()
        .filter(|vs| preserving_edges(vs) == 1)
        .map(|vs| (path_monomial(widths, vs), r(1)))
        .collect()
}

pub fn tensor_map(t: &RationalTensor) -> BTreeMap<Vec<usize>, Rational> {
    t.terms().map(|(m, c)| (m.0.clone(), c.clone())).collect()
}

/// Slot alphabets of an ABP, recomputed from its labels.
pub fn slot_symbols(abp: &Abp) -> Vec<Vec<Symbol>> {
    (0..abp.format.degree())
        .map(|i| {
            let mut vars: Vec<usize> = match &abp.alphabets {
                Some(a) => a[i].clone(),
                None => abp
                    .labels
                    .iter()
                    .filter(|(e, _)| e.layer == i)
                    .flat_map(|(_, l)| l.terms.keys().copied())
                    .collect(),
            };
            vars.sort_unstable();
            vars.dedup();
            let mut s: Vec<Symbol> = vars.into_iter().map(Symbol::Var).collect();
            if abp.affine {
                s.push(Symbol::Const);
            }
            s
        })
        .collect()
}

/// Expands an ABP by enumerating every closed vertex sequence and multiplying labels.
pub fn abp_expand_oracle(abp: &Abp) -> BTreeMap<Vec<usize>, LaurentEps> {
    let widths = abp.format.widths().to_vec();
    let d = widths.len();
    let syms = slot_symbols(abp);
    let mut out: BTreeMap<Vec<usize>, LaurentEps> = BTreeMap::new();
    for vs in vertex_sequences(&widths) {
        let mut words: Vec<(Vec<usize>, LaurentEps)> = vec![(Vec::new(), LaurentEps::one())];
        for i in 0..d {
            let to = vs[(i + 1) % d];
            let Some(label) = abp.labels.get(&abplab::EdgeId::new(i, vs[i], to)) else {
                words.clear();
                break;
            };
            let mut choices: Vec<(usize, LaurentEps)> = label
                .terms
                .iter()
                .map(|(v, c)| (pos(&syms[i], Symbol::Var(*v)), c.clone()))
                .collect();
            if !label.constant.is_zero() {
                choices.push((pos(&syms[i], Symbol::Const), label.constant.clone()));
            }
            words = words
                .iter()
                .flat_map(|(w, c)| {
                    choices.iter().map(move |(s, k)| {
                        let mut w2 = w.clone();
                        w2.push(*s);
                        (w2, c * k)
                    })
                })
                .collect();
        }
        for (w, c) in words {
            let e = out.entry(w).or_default();
            *e = &*e + &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn pos(syms: &[Symbol], s: Symbol) -> usize {
    syms.iter().position(|x| *x == s).expect("symbol in slot alphabet")
}

pub fn eps_tensor_map(t: &abplab::EpsTensor) -> BTreeMap<Vec<usize>, LaurentEps> {
    t.terms().map(|(m, c)| (m.0.clone(), c.clone())).collect()
}

/// Random rational values for every (slot, symbol) pair.
pub fn random_point(rng: &mut impl Rng, sizes: &[usize]) -> Vec<Vec<Rational>> {
    sizes
        .iter()
        .map(|&n| {
            (0..n)
                .map(|_| Rational::new(rng.gen_range(-50..=50).into(), rng.gen_range(1..=7).into()))
                .collect()
        })
        .collect()
}

/// `tr(M_1 ⋯ M_d)` with slot-`i` symbol `s` instantiated to `point[i][s]`, by
/// explicit Laurent matrix products. For the single model the trace is the
/// single (1,1) entry, which coincides.
pub fn abp_matrix_product_oracle(abp: &Abp, point: &[Vec<Rational>]) -> LaurentEps {
    let widths = abp.format.widths();
    let d = widths.len();
    let syms = slot_symbols(abp);
    let mut prod: Vec<Vec<LaurentEps>> = (0..widths[0])
        .map(|a| {
            (0..widths[0])
                .map(|b| if a == b { LaurentEps::one() } else { LaurentEps::zero() })
                .collect()
        })
        .collect();
    for i in 0..d {
        let (wa, wb) = (widths[i], widths[(i + 1) % d]);
        let mut m = vec![vec![LaurentEps::zero(); wb]; wa];
        for (e, l) in abp.labels.iter().filter(|(e, _)| e.layer == i) {
            let mut v = LaurentEps::zero();
            for (var, c) in &l.terms {
                v = &v + &c.scale(&point[i][pos(&syms[i], Symbol::Var(*var))]);
            }
            if !l.constant.is_zero() {
                v = &v + &l.constant.scale(&point[i][pos(&syms[i], Symbol::Const)]);
            }
            m[e.from][e.to] = v;
        }
        prod = prod
            .iter()
            .map(|row| {
                (0..wb)
                    .map(|b| {
                        (0..wa).fold(LaurentEps::zero(), |acc, a| &acc + &(&row[a] * &m[a][b]))
                    })
                    .collect()
            })
            .collect();
    }
    (0..widths[0]).fold(LaurentEps::zero(), |acc, a| &acc + &prod[a][a])
}

/// Evaluates a Laurent-coefficient tensor map at a point, coefficients kept symbolic in ε.
pub fn eps_map_at(t: &BTreeMap<Vec<usize>, LaurentEps>, point: &[Vec<Rational>]) -> LaurentEps {
    let mut acc = LaurentEps::zero();
    for (m, c) in t {
        let mut p = Rational::one();
        for (slot, &s) in m.iter().enumerate() {
            p *= &point[slot][s];
        }
        acc = &acc + &c.scale(&p);
    }
    acc
}

/// Dense prefix/suffix flattening of a tensor split after `i` slots.
pub fn flattening_dense(t: &BTreeMap<Vec<usize>, Rational>, sizes: &[usize], i: usize) -> Vec<Vec<Rational>> {
    let rows: usize = sizes[..i].iter().product();
    let cols: usize = sizes[i..].iter().product();
    let rank_of = |digits: &[usize], radices: &[usize]| {
        digits.iter().zip(radices).fold(0, |acc, (&d, &n)| acc * n + d)
    };
    let mut m = vec![vec![Rational::zero(); cols]; rows];
    for (mono, c) in t {
        m[rank_of(&mono[..i], &sizes[..i])][rank_of(&mono[i..], &sizes[i..])] = c.clone();
    }
    m
}

/// Dense mode-`j` flattening: rows are symbols of slot `j`.
pub fn mode_flattening_dense(t: &BTreeMap<Vec<usize>, Rational>, sizes: &[usize], j: usize) -> Vec<Vec<Rational>> {
    let rest: Vec<usize> = (0..sizes.len()).filter(|&k| k != j).collect();
    let cols: usize = rest.iter().map(|&k| sizes[k]).product();
    let mut m = vec![vec![Rational::zero(); cols]; sizes[j]];
    for (mono, c) in t {
        let col = rest.iter().fold(0, |acc, &k| acc * sizes[k] + mono[k]);
        m[mono[j]][col] = c.clone();
    }
    m
}

/// Rows `ψ(e)` over the columns of the listed closed paths: entry 1 iff the path uses `e`.
pub fn psi_dense(widths: &[usize], paths: &[Vec<usize>]) -> Vec<Vec<Rational>> {
    let d = widths.len();
    let mut rows = vec![vec![Rational::zero(); paths.len()]; num_edges(widths)];
    for (col, vs) in paths.iter().enumerate() {
        for i in 0..d {
            rows[global_edge(widths, i, vs[i], vs[(i + 1) % d])][col] = r(1);
        }
    }
    rows
}

/// Vertex/edge incidence matrix of the identified graph (vertex `(i, a)`; edge
/// `(i, a, b)` runs from `(i, a)` to `(i+1 mod d, b)`).
pub fn incidence_dense(widths: &[usize]) -> Vec<Vec<Rational>> {
    let d = widths.len();
    let voff: Vec<usize> = (0..d).map(|i| widths[..i].iter().sum()).collect();
    let nv: usize = widths.iter().sum();
    let mut m = vec![vec![Rational::zero(); num_edges(widths)]; nv];
    for i in 0..d {
        let j = (i + 1) % d;
        for a in 0..widths[i] {
            for b in 0..widths[j] {
                let e = global_edge(widths, i, a, b);
                m[voff[i] + a][e] -= r(1);
                m[voff[j] + b][e] += r(1);
            }
        }
    }
    m
}

/// Every format of degree `d` with all widths in `choices`.
pub fn all_formats(d: usize, choices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                choices.iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// The 40 formats with `d ∈ {3, 5}` and every width in `{2, 3}`.
pub fn small_formats() -> Vec<Vec<usize>> {
    let mut v = all_formats(3, &[2, 3]);
    v.extend(all_formats(5, &[2, 3]));
    v
}

/// Rank of the full Lie-algebra image of `f`, with every pair of same-layer
/// symbols rewritten by hand and columns ranging over all monomials.
pub fn lie_rank_oracle(f: &RationalTensor) -> usize {
    let sizes = f.alphabet_sizes().to_vec();
    let all = vertex_sequences(&sizes);
    let col = |m: &[usize]| m.iter().zip(&sizes).fold(0, |acc, (&d, &n)| acc * n + d);
    let map = tensor_map(f);
    let mut rows = Vec::new();
    for i in 0..sizes.len() {
        for from in 0..sizes[i] {
            for to in 0..sizes[i] {
                let mut row = vec![Rational::zero(); all.len()];
                for (m, c) in &map {
                    if m[i] == from {
                        let mut w = m.clone();
                        w[i] = to;
                        row[col(&w)] += c;
                    }
                }
                rows.push(row);
            }
        }
    }
    dense_rank(rows)
}
