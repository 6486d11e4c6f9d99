//! Generators for the complete layered ABP `Γ_com`, its parity ε-labeling, the
//! limit tensor `f₀` and the doubled width-`2m` ABP `Γ′` that computes `f₀`.

use num_traits::One;

use crate::abp::{Abp, EdgeId, Format, LinearLabel, Model};
use crate::error::{Error, Result};
use crate::laurent::LaurentEps;
use crate::scalar::Rational;
use crate::tensor::{EpsTensor, LayeredTensor, Monomial, RationalTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Preserving,
    Changing,
}

impl ParityClass {
    pub fn of(e: EdgeId) -> Self {
        if e.is_parity_preserving() {
            ParityClass::Preserving
        } else {
            ParityClass::Changing
        }
    }
}

/// A valid path, stored as its vertex indices in layers `1..=d`; the path
/// returns to `vertices[0]` in the closing layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValidPath {
    pub vertices: Vec<usize>,
}

impl ValidPath {
    pub fn edges(&self) -> Vec<EdgeId> {
        let d = self.vertices.len();
        (0..d)
            .map(|i| EdgeId::new(i, self.vertices[i], self.vertices[(i + 1) % d]))
            .collect()
    }

    pub fn preserving_count(&self) -> usize {
        self.edges().iter().filter(|e| e.is_parity_preserving()).count()
    }

    /// The monomial `x_{e_1} ⊗ … ⊗ x_{e_d}` over the per-layer edge alphabets.
    pub fn monomial(&self, format: &Format) -> Monomial {
        Monomial(self.edges().into_iter().map(|e| format.edge_index(e)).collect())
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        let d = self.vertices.len();
        self.vertices[e.layer] == e.from && self.vertices[(e.layer + 1) % d] == e.to
    }
}

/// All `Π w_i` valid paths, in lexicographic vertex order.
pub fn valid_paths(format: &Format) -> Vec<ValidPath> {
    let widths = format.widths();
    let mut out = Vec::with_capacity(format.num_valid_paths());
    let mut cur = vec![0usize; widths.len()];
    loop {
        out.push(ValidPath {
            vertices: cur.clone(),
        });
        let mut k = widths.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < widths[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Name of the variable `x^{(i)}_{(a,b)}` labeling edge `(a,b,i)` (1-based in the name).
pub fn edge_variable_name(e: EdgeId) -> String {
    format!("x{}_{}_{}", e.layer + 1, e.from + 1, e.to + 1)
}

fn edge_variable_abp(format: &Format, label: impl Fn(EdgeId, usize) -> LinearLabel) -> Abp {
    let variables: Vec<String> = format.edges().map(edge_variable_name).collect();
    let mut abp = Abp::new(format.clone(), Model::Trace, variables);
    abp.alphabets = Some(
        (0..format.degree())
            .map(|i| {
                let off = format.edge_offset(i);
                (off..off + format.edges_in_layer(i)).collect()
            })
            .collect(),
    );
    for e in format.edges() {
        abp.set_label(e, label(e, format.global_edge_index(e)));
    }
    abp
}

/// Complete layered trace ABP; edge `(a,b,i)` carries its own variable `x^{(i)}_{(a,b)}`.
pub fn gamma_com(format: &Format) -> Abp {
    edge_variable_abp(format, |_, v| LinearLabel::var(v))
}

/// `f_com` by direct enumeration of valid paths (coefficient 1 each).
pub fn f_com(format: &Format) -> RationalTensor {
    let mut t = LayeredTensor::zero(format.edge_alphabet_sizes());
    for p in valid_paths(format) {
        t.add_term_unchecked(p.monomial(format), &Rational::one());
    }
    t
}

fn require_odd(format: &Format) -> Result<()> {
    if format.degree() % 2 == 0 {
        return Err(Error::EvenDegreeUnsupported(format.degree()));
    }
    Ok(())
}

/// `f₀`: the sum of valid-path monomials whose path has exactly one parity-preserving edge.
pub fn f0(format: &Format) -> Result<RationalTensor> {
    require_odd(format)?;
    let mut t = LayeredTensor::zero(format.edge_alphabet_sizes());
    for p in valid_paths(format) {
        let k = p.preserving_count();
        // an odd closed walk cannot change parity at every step
        assert!(k >= 1, "valid path {:?} has no parity preserving edge", p.vertices);
        if k == 1 {
            t.add_term_unchecked(p.monomial(format), &Rational::one());
        }
    }
    Ok(t)
}

/// `Γ_com` with every parity-preserving label multiplied by ε; it computes `f'_ε`.
pub fn f_eps_abp(format: &Format) -> Abp {
    edge_variable_abp(format, |e, v| {
        if e.is_parity_preserving() {
            LinearLabel::scaled_var(v, LaurentEps::eps())
        } else {
            LinearLabel::var(v)
        }
    })
}

/// `f_ε = f'_ε / ε` as a tensor over ℚ[ε, ε⁻¹].
pub fn f_eps(format: &Format) -> Result<EpsTensor> {
    Ok(f_eps_abp(format).evaluate()?.shift_eps(-1))
}

/// Width-`2m` trace ABP computing `f₀((m,…,m))`.
///
/// Vertex `v` of `Γ_com` becomes `v′ = v` and `v″ = m + v`. Parity-changing edges
/// are duplicated on both copies, parity-preserving edges route `v′ → v″`. In the
/// closing layer the two copies swap indices so that `u′` corresponds to `u″`.
pub fn gamma_prime(m: usize, d: usize) -> Result<Abp> {
    if m < 2 {
        return Err(Error::HypothesisViolated(format!("gamma_prime needs m >= 2, got {m}")));
    }
    let base = Format::uniform(m, d)?;
    require_odd(&base)?;
    let mut abp = gamma_com(&base);
    abp.format = Format::uniform(2 * m, d)?;
    abp.labels.clear();
    let closing = |layer: usize, to: usize| if layer == d - 1 { (to + m) % (2 * m) } else { to };
    for e in base.edges() {
        let var = base.global_edge_index(e);
        if e.is_parity_preserving() {
            let to = closing(e.layer, m + e.to);
            abp.set_label(EdgeId::new(e.layer, e.from, to), LinearLabel::var(var));
        } else {
            let to1 = closing(e.layer, e.to);
            let to2 = closing(e.layer, m + e.to);
            abp.set_label(EdgeId::new(e.layer, e.from, to1), LinearLabel::var(var));
            abp.set_label(EdgeId::new(e.layer, m + e.from, to2), LinearLabel::var(var));
        }
    }
    Ok(abp)
}
