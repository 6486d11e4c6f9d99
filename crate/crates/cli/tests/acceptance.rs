//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use abplab::concise::{apply_end, is_concise};
use abplab::deborder::deborder_traced;
use abplab::family::{f0, f_com, gamma_prime, valid_paths};
use abplab::flow::{
    characteristic_flow, cycle_decomposition, flow_space_dim, fundamental_cycle_basis, length_d_cycle_flows,
    parity_kernel_vector, rho, spanning_tree_tau, FlowVector, IdentifiedGraph, PathSet, PathTensors,
};
use abplab::nisan::{minimize_verified, width_profile};
use abplab::random::{random_deborder_instance, random_single_abp, random_singular_tuple, random_tensor, seeded, EpsAbpParams};
use abplab::tangent::{g_piece_dim, GPieceKind};
use abplab::{Abp, EdgeId, Format, Rational};
use common::{
    abp_expand_oracle, dense_rank, f0_oracle, flattening_dense, lie_rank_oracle, psi_dense, small_formats, tensor_map,
    vertex_sequences,
};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn fmt(w: &[usize]) -> Format {
    Format::new(w.to_vec()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn num_edges(w: &[usize]) -> usize {
    (0..w.len()).map(|i| w[i] * w[(i + 1) % w.len()]).sum()
}

/// ψ rank equals |E| − Σw + 1 on every format, and the dense oracle agrees.
fn path_tensor_rank() -> Outcome {
    let formats = small_formats();
    for w in &formats {
        let want = num_edges(w) - w.iter().sum::<usize>() + 1;
        let got = PathTensors::new(&fmt(w), PathSet::All).span_dim();
        ensure(got == want, || format!("{w:?}: rank {got}, expected {want}"))?;
        let oracle = dense_rank(psi_dense(w, &vertex_sequences(w)));
        ensure(oracle == want, || format!("{w:?}: dense oracle rank {oracle}"))?;
    }
    Ok(format!("{} formats", formats.len()))
}

/// ψ′ rank ≤ |E| − Σw with the parity vector and incidence rows in its kernel.
fn parity_path_tensor_kernel() -> Outcome {
    let formats: Vec<_> = small_formats().into_iter().filter(|w| w.len() % 2 == 1).collect();
    for w in &formats {
        let format = fmt(w);
        let bound = num_edges(w) - w.iter().sum::<usize>();
        let pp = PathTensors::new(&format, PathSet::OnePreserving);
        let rank = pp.span_dim();
        ensure(rank <= bound, || format!("{w:?}: rank {rank} > {bound}"))?;
        let some: Vec<_> = vertex_sequences(w)
            .into_iter()
            .filter(|vs| common::preserving_edges(vs) == 1)
            .collect();
        let oracle = dense_rank(psi_dense(w, &some));
        ensure(oracle == rank, || format!("{w:?}: dense oracle rank {oracle}, library {rank}"))?;

        let parity = parity_kernel_vector(&format);
        ensure(pp.in_kernel(&parity), || format!("{w:?}: parity vector not in kernel"))?;
        let g = IdentifiedGraph::complete(&format);
        let rows: Vec<FlowVector> = g.incidence_rows().into_iter().map(|(_, v)| v).collect();
        ensure(rows.iter().all(|v| pp.in_kernel(v)), || format!("{w:?}: incidence row not in kernel"))?;
        let nv = g.num_vertices();
        ensure(g.rank_of(&rows) == nv - 1, || format!("{w:?}: incidence rank"))?;
        let mut with_parity = rows;
        with_parity.push(parity);
        let k = g.rank_of(&with_parity);
        ensure(k == nv, || format!("{w:?}: kernel witness rank {k}, expected {nv}"))?;
    }
    Ok(format!("{} odd formats", formats.len()))
}

/// `abplab certify-separation --format 2,2,2`, checked against dense Lie-rank oracles.
fn separation_certificate() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_abplab"))
        .args(["certify-separation", "--format", "2,2,2"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(0), || format!("exit status {:?}", out.status))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["separated"] == true, || "not separated".into())?;
    ensure(v["concise"]["concise"] == true, || "f0 not concise".into())?;
    ensure(v["concise"]["mode_ranks"] == serde_json::json!([4, 4, 4]), || "mode ranks not full".into())?;
    let (tc, t0) = (v["dim_T_fcom"].as_u64().unwrap_or(0), v["dim_T_f0"].as_u64().unwrap_or(u64::MAX));
    ensure(tc == 37, || format!("dim T_fcom = {tc}"))?;
    ensure(t0 < tc, || format!("dim T_f0 = {t0} not below {tc}"))?;
    ensure(v["checks"].as_array().is_some_and(|c| c.iter().all(|k| k["passed"] == true)), || {
        "a certificate check failed".into()
    })?;
    let format = fmt(&[2, 2, 2]);
    let (oc, o0) = (lie_rank_oracle(&f_com(&format)), lie_rank_oracle(&f0(&format).unwrap()));
    ensure(oc as u64 == tc && o0 as u64 == t0, || format!("oracle ranks {oc}, {o0}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("binary took {elapsed:?}"))?;
    Ok(format!("dim T_fcom = {tc}, dim T_f0 = {t0}, binary {:.2}s", elapsed.as_secs_f64()))
}

/// g₂ and g₁ ranks equal their closed forms for both tensors on every format.
fn piece_formulas() -> Outcome {
    let formats = small_formats();
    for w in &formats {
        let d = w.len();
        let at = |i: isize| w[i.rem_euclid(d as isize) as usize];
        let g2: usize = (0..d as isize).map(|i| at(i) * at(i + 1) * (at(i) - 1) * (at(i + 1) - 1)).sum();
        let g1: usize = (0..d as isize).map(|i| (at(i - 1) + at(i + 1) - 1) * (at(i) - 1) * at(i)).sum();
        let format = fmt(w);
        for (name, f) in [("f_com", f_com(&format)), ("f0", f0(&format).unwrap())] {
            let r2 = g_piece_dim(&f, GPieceKind::G2, &format).map_err(|e| e.to_string())?;
            let r1 = g_piece_dim(&f, GPieceKind::G1, &format).map_err(|e| e.to_string())?;
            ensure(r2 == g2 && r1 == g1, || format!("{w:?} {name}: g2 {r2}/{g2}, g1 {r1}/{g1}"))?;
        }
    }
    Ok(format!("{} formats x 2 tensors", formats.len()))
}

/// ε = 0 limit of the brute-force expansion; `None` on a pole.
fn oracle_limit(abp: &Abp) -> Option<BTreeMap<Vec<usize>, Rational>> {
    let mut out = BTreeMap::new();
    for (m, c) in abp_expand_oracle(abp) {
        if c.has_negative_exponent() {
            return None;
        }
        let v = c.coeff(0);
        if !v.is_zero() {
            out.insert(m, v);
        }
    }
    Some(out)
}

/// Random monotone ε-ABPs deborder to strictly monotone ABPs of the same format
/// computing the ε = 0 limit.
fn deborder_suite() -> Outcome {
    let mut rng = seeded(2024);
    let shapes = [vec![1, 2, 2], vec![1, 3, 2], vec![1, 3, 3], vec![1, 2, 4], vec![1, 4, 4]];
    let n = 60;
    for k in 0..n {
        let p = EpsAbpParams {
            widths: shapes[k % shapes.len()].clone(),
            nvars: 2,
            min_exp: -3,
            max_exp: 3,
            density: 0.85,
            affine: false,
        };
        let abp = random_deborder_instance(&mut rng, &p, 500).ok_or_else(|| format!("no instance for {:?}", p.widths))?;
        let want = oracle_limit(&abp).ok_or_else(|| format!("case {k}: sampled input has a pole"))?;
        let (out, _) = deborder_traced(&abp).map_err(|e| format!("case {k}: {e}"))?;
        ensure(out.format == abp.format, || format!("case {k}: format changed"))?;
        ensure(out.is_monotone_strict(), || format!("case {k}: output not strictly monotone"))?;
        let mut got = BTreeMap::new();
        for (m, c) in abp_expand_oracle(&out) {
            got.insert(m, c.as_rational().ok_or_else(|| format!("case {k}: output depends on ε"))?);
        }
        ensure(got == want, || format!("case {k}: value differs from the ε = 0 limit"))?;
    }
    Ok(format!("{n} instances, 0 failures"))
}

fn oracle_profile(f: &abplab::RationalTensor) -> Vec<usize> {
    let map = tensor_map(f);
    (0..=f.degree())
        .map(|i| dense_rank(flattening_dense(&map, f.alphabet_sizes(), i)))
        .collect()
}

/// minimize round trip with flattening-rank widths; random ABP widths bound the profile.
fn minimize_round_trip() -> Outcome {
    let mut rng = seeded(2025);
    let n = 60;
    for k in 0..n {
        let d = rng.gen_range(1..=4);
        let sizes: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
        let f = random_tensor(&mut rng, &sizes, 10);
        let t = minimize_verified(&f).map_err(|e| format!("case {k}: {e}"))?;
        let back = t.abp.evaluate().map_err(|e| e.to_string())?.to_rational().ok_or("ε in output")?;
        ensure(tensor_map(&back) == tensor_map(&f), || format!("case {k}: evaluation differs"))?;
        let want = oracle_profile(&f);
        ensure(t.abp.layer_sizes() == want, || format!("case {k}: widths {:?}, ranks {want:?}", t.abp.layer_sizes()))?;
    }
    let mut abps = 0;
    for _ in 0..600 {
        if abps == 40 {
            break;
        }
        let d = rng.gen_range(2..=4);
        let widths: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
        let abp = random_single_abp(&mut rng, &widths, 2, 0.9);
        let Some(f) = abp.evaluate().map_err(|e| e.to_string())?.to_rational() else { continue };
        if f.is_zero() {
            continue;
        }
        let ranks = width_profile(&f).map_err(|e| e.to_string())?.ranks;
        ensure(ranks == oracle_profile(&f), || "profile differs from oracle".into())?;
        ensure(ranks.iter().zip(abp.layer_sizes()).all(|(r, w)| *r <= w), || {
            format!("ranks {ranks:?} exceed widths {:?}", abp.layer_sizes())
        })?;
        abps += 1;
    }
    ensure(abps == 40, || format!("only {abps} nonzero random ABPs"))?;
    Ok(format!("{n} tensors, {abps} random ABPs"))
}

/// f_com and f₀ concise on wide odd formats; f₀ not concise with a width-one
/// layer; singular tuples destroy conciseness.
fn conciseness_triptych() -> Outcome {
    let formats: Vec<_> = small_formats().into_iter().filter(|w| w.len() % 2 == 1).collect();
    for w in &formats {
        let format = fmt(w);
        ensure(is_concise(&f_com(&format)).concise, || format!("{w:?}: f_com not concise"))?;
        ensure(is_concise(&f0(&format).unwrap()).concise, || format!("{w:?}: f0 not concise"))?;
    }
    let thin = [vec![2, 1, 2], vec![3, 1, 3], vec![2, 1, 3], vec![2, 2, 1, 2, 2]];
    for w in &thin {
        ensure(!is_concise(&f0(&fmt(w)).unwrap()).concise, || format!("{w:?}: f0 concise"))?;
    }
    let mut rng = seeded(2026);
    let bases = [f_com(&fmt(&[2, 2, 2])), f_com(&fmt(&[2, 3, 2])), f_com(&fmt(&[3, 3, 3]))];
    for k in 0..20 {
        let f = &bases[k % bases.len()];
        let (g, _) = random_singular_tuple(&mut rng, f.alphabet_sizes());
        let gf = apply_end(f, &g).map_err(|e| e.to_string())?;
        ensure(!is_concise(&gf).concise, || format!("singular tuple {k} kept conciseness"))?;
    }
    Ok(format!("{} concise formats, {} thin formats, 20 singular tuples", formats.len(), thin.len()))
}

fn rho_bar(pt: &PathTensors, format: &Format, e: EdgeId) -> FlowVector {
    rho(&pt.psi_bar(e), format).unwrap()
}

fn frac(n: i64, d: usize) -> Rational {
    Rational::new(n.into(), (d as i64).into())
}

/// Cycle flows span F, the three-cycle decompositions hold, and the telescoping
/// chain over layers 1..d−1 leaves exactly the closing-layer residual R, which the
/// closing-layer correction removes to give χ.
fn cycle_structure() -> Outcome {
    let mut rng = seeded(2027);
    let mut cycles_checked = 0;
    for (w, sample) in [(vec![2, 2, 2], None), (vec![4, 4, 4, 4, 4], Some(5))] {
        let format = fmt(&w);
        let d = w.len();
        let g = IdentifiedGraph::complete(&format);
        let dim = flow_space_dim(&g).map_err(|e| e.to_string())?;
        ensure(dim == num_edges(&w) - w.iter().sum::<usize>() + 1, || format!("{w:?}: flow dim {dim}"))?;
        let span = g.rank_of(&length_d_cycle_flows(&g));
        ensure(span == dim, || format!("{w:?}: cycle flows span {span} of {dim}"))?;

        for (e, flow) in fundamental_cycle_basis(&g, &spanning_tree_tau(&format)).map_err(|e| e.to_string())? {
            let mut sum = FlowVector::default();
            for (c, p) in cycle_decomposition(&format, e).map_err(|e| e.to_string())? {
                sum.axpy(&Rational::from_integer(c.into()), &characteristic_flow(&p));
            }
            ensure(sum == flow, || format!("{w:?}: decomposition of {e:?} differs"))?;
        }

        let pt = PathTensors::new(&format, PathSet::All);
        let mut cycles = valid_paths(&format);
        if let Some(k) = sample {
            cycles.shuffle(&mut rng);
            cycles.truncate(k);
        }
        for p in &cycles {
            let es = p.edges();
            let chi = characteristic_flow(p);
            let mut partial = rho_bar(&pt, &format, es[0]);
            for e in &es[1..d - 1] {
                let wt = w[e.layer + 1];
                partial.axpy(&frac(wt as i64 - 1, wt), &rho_bar(&pt, &format, *e));
                for b in (0..wt).filter(|&b| b != e.to) {
                    partial.axpy(&frac(-1, wt), &rho_bar(&pt, &format, EdgeId::new(e.layer, e.from, b)));
                }
            }
            let (c, a) = (p.vertices[d - 1], p.vertices[0]);
            let mut residual = FlowVector::default();
            for x in 0..w[d - 1] {
                for s in 0..w[0] {
                    let dx = Rational::from_integer(i64::from(x == c).into()) - frac(1, w[d - 1]);
                    let ds = Rational::from_integer(i64::from(s == a).into()) - frac(1, w[0]);
                    residual.add(EdgeId::new(d - 1, x, s), &-(dx * ds));
                }
            }
            ensure(partial.sub(&chi) == residual, || format!("{w:?} {p:?}: residual differs from R"))?;

            let mut full = partial;
            full.axpy(&Rational::from_integer(1.into()), &rho_bar(&pt, &format, es[d - 1]));
            for s in 0..w[0] {
                full.axpy(&frac(-1, w[0]), &rho_bar(&pt, &format, EdgeId::new(d - 1, c, s)));
            }
            for b in 0..w[1] {
                full.axpy(&frac(-1, w[1]), &rho_bar(&pt, &format, EdgeId::new(0, a, b)));
            }
            for h in format.layer_edges(0) {
                full.axpy(&frac(1, w[0] * w[1]), &rho_bar(&pt, &format, h));
            }
            ensure(full == chi, || format!("{w:?} {p:?}: completed chain differs from χ"))?;
            cycles_checked += 1;
        }
    }
    Ok(format!(
        "{cycles_checked} cycles; literal chain leaves residual R, completed chain equals χ"
    ))
}

/// The doubled ABP evaluates to f₀.
fn doubled_abp_equivalence() -> Outcome {
    for (m, d) in [(2, 3), (3, 3), (2, 5)] {
        let g = gamma_prime(m, d).map_err(|e| e.to_string())?;
        let t = g.evaluate().map_err(|e| e.to_string())?.to_rational().ok_or("ε in output")?;
        let want = f0_oracle(&vec![m; d]);
        ensure(tensor_map(&t) == want, || format!("m={m} d={d}: evaluation differs"))?;
        let lib = f0(&fmt(&vec![m; d])).map_err(|e| e.to_string())?;
        ensure(tensor_map(&lib) == want, || format!("m={m} d={d}: f0 generator differs"))?;
    }
    Ok("(2,3), (3,3), (2,5)".into())
}

fn main() {
    type Criterion = (&'static str, Option<u64>, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("path tensor rank = |E| - sum w + 1", Some(30), path_tensor_rank),
        ("parity path tensors: rank bound and kernel", Some(30), parity_path_tensor_kernel),
        ("separation certificate for (2,2,2)", Some(10), separation_certificate),
        ("g2 / g1 closed forms", None, piece_formulas),
        ("monotone deborder suite", None, deborder_suite),
        ("minimize round trip", None, minimize_round_trip),
        ("conciseness triptych", None, conciseness_triptych),
        ("cycle space and telescoping identities", Some(60), cycle_structure),
        ("doubled ABP equals f0", None, doubled_abp_equivalence),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let res = match (res, limit) {
            (Ok(_), Some(l)) if secs >= l as f64 => Err(format!("took {secs:.2}s, limit {l}s")),
            (r, _) => r,
        };
        match res {
            Ok(detail) => println!("PASS {}: {name} ({detail}) [{secs:.2}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why} [{secs:.2}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
