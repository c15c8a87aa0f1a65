//! Levi-Civita geometry at a single point: Christoffel symbols, Riemann,
//! Ricci, Schouten, Weyl and Bach tensors, all as jet tensors.
//!
//! Index conventions: the Riemann tensor `R_abc^d` satisfies
//! `∇_a∇_b ω_c − ∇_b∇_a ω_c = R_abc^d ω_d` and is stored with its
//! contravariant slot first, i.e. entry `[d, a, b, c]`. Ricci is
//! `R_ac = R_abc^b`.

use nalgebra::{Matrix4, SymmetricEigen};
use thiserror::Error;

use crate::expr::EvalError;
use crate::jet::{Jet4, JetError, NVARS};
use crate::tensor::{JetTensor, TensorError};

/// `|det g| < DET_TOLERANCE · (max |g_ab|)^4` counts as degenerate.
pub const DET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("metric is degenerate: det = {det:e}, threshold {threshold:e}")]
    DegenerateMetric { det: f64, threshold: f64 },
    #[error("metric signature {found:?} does not match the declared {expected:?}")]
    SignatureMismatch { expected: [i8; NVARS], found: [i8; NVARS] },
    #[error("conformal factor must be positive, got {0}")]
    NonPositiveConformalFactor(f64),
    #[error("derivative budget exhausted: need degree {needed}, have {available}")]
    BudgetExhausted { needed: usize, available: usize },
    #[error("expected a ({expected_up},{expected_down}) tensor, got {got:?}")]
    Valence {
        expected_up: usize,
        expected_down: usize,
        got: (usize, usize),
    },
}

fn expect_valence(t: &JetTensor, up: usize, down: usize) -> Result<(), GeometryError> {
    if t.valence() != (up, down) {
        return Err(GeometryError::Valence {
            expected_up: up,
            expected_down: down,
            got: t.valence(),
        });
    }
    Ok(())
}

fn expect_degree(t: &JetTensor, needed: usize) -> Result<(), GeometryError> {
    if t.degree() < needed {
        return Err(GeometryError::BudgetExhausted {
            needed,
            available: t.degree(),
        });
    }
    Ok(())
}

/// Metric, inverse and determinant at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    g: JetTensor,
    g_inv: JetTensor,
    det: Jet4,
    signature: [i8; NVARS],
}

/// Determinant of the 3x3 minor of `m` that keeps `rows` and `cols`.
fn minor3(m: &[[Jet4; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> Jet4 {
    let e = |i: usize, j: usize| &m[rows[i]][cols[j]];
    let mut acc = Jet4::zero(m[0][0].base(), m[0][0].degree());
    for (p, sign) in [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)] {
        let term = &(e(0, p[0]) * e(1, p[1])) * e(2, p[2]);
        acc += term.scale(sign);
    }
    acc
}

fn others(i: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for (slot, k) in out.iter_mut().zip((0..4).filter(|&k| k != i)) {
        *slot = k;
    }
    out
}

impl MetricAtPoint {
    /// Validates `g` (symmetric (0,2)), then inverts it by adjugate and
    /// determinant on jets.
    pub fn new(g: JetTensor) -> Result<Self, GeometryError> {
        expect_valence(&g, 0, 2)?;
        let m: [[Jet4; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| *g.get(&[a, b])));
        let cof: [[Jet4; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let c = minor3(&m, others(i), others(j));
                if (i + j) % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
        });
        let mut det = Jet4::zero(g.base(), g.degree());
        for j in 0..NVARS {
            det.add_product(&m[0][j], &cof[0][j]);
        }
        let scale = g.max_abs_value();
        let threshold = DET_TOLERANCE * scale.powi(4);
        if !(det.value().abs() >= threshold) || scale == 0.0 {
            return Err(GeometryError::DegenerateMetric {
                det: det.value(),
                threshold,
            });
        }
        let inv_det = det.recip()?;
        let g_inv = JetTensor::from_fn(2, 0, |i| &cof[i[1]][i[0]] * &inv_det);

        let values = Matrix4::from_fn(|a, b| 0.5 * (m[a][b].value() + m[b][a].value()));
        let mut signature = [0i8; NVARS];
        for (s, ev) in signature.iter_mut().zip(SymmetricEigen::new(values).eigenvalues.iter()) {
            *s = if *ev > 0.0 { 1 } else { -1 };
        }
        signature.sort_unstable();
        Ok(Self {
            g,
            g_inv,
            det,
            signature,
        })
    }

    pub fn g(&self) -> &JetTensor {
        &self.g
    }

    pub fn g_inv(&self) -> &JetTensor {
        &self.g_inv
    }

    pub fn det(&self) -> &Jet4 {
        &self.det
    }

    /// Eigenvalue signs of `g_ab` at the point, ascending.
    pub fn signature(&self) -> [i8; NVARS] {
        self.signature
    }

    pub fn base(&self) -> [f64; NVARS] {
        self.g.base()
    }

    pub fn degree(&self) -> usize {
        self.g.degree()
    }
}

/// `Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db − ∂_d g_bc)`, stored `[a, b, c]`.
pub fn christoffel(metric: &MetricAtPoint) -> Result<JetTensor, GeometryError> {
    let g = metric.g();
    expect_degree(g, 1)?;
    let d = g.degree() - 1;
    // dg[e][a][b] = ∂_e g_ab
    let mut dg = vec![Jet4::zero(g.base(), d); 64];
    for e in 0..NVARS {
        for a in 0..NVARS {
            for b in a..NVARS {
                let v = g.get(&[a, b]).partial(e)?;
                dg[16 * e + 4 * a + b] = v;
                dg[16 * e + 4 * b + a] = v;
            }
        }
    }
    let at = |e: usize, a: usize, b: usize| &dg[16 * e + 4 * a + b];
    let lowered = JetTensor::from_fn(0, 3, |i| {
        let (dd, b, c) = (i[0], i[1], i[2]);
        (&(at(b, dd, c) + at(c, dd, b)) - at(dd, b, c)).scale(0.5)
    });
    let g_inv = metric.g_inv();
    Ok(JetTensor::from_fn(1, 2, |i| {
        let mut acc = Jet4::zero(g.base(), d);
        for dd in 0..NVARS {
            acc.add_product(g_inv.get(&[i[0], dd]), lowered.get(&[dd, i[1], i[2]]));
        }
        acc
    }))
}

/// Curvature of an arbitrary torsion-free connection with coefficients
/// `Γ^d_ac` (stored `[d, a, c]`):
/// `R_abc^d = ∂_b Γ^d_ac − ∂_a Γ^d_bc + Γ^d_be Γ^e_ac − Γ^d_ae Γ^e_bc`.
pub fn riemann(gamma: &JetTensor) -> Result<JetTensor, GeometryError> {
    expect_valence(gamma, 1, 2)?;
    expect_degree(gamma, 1)?;
    let d = gamma.degree() - 1;
    let low = gamma.truncate(d);
    let mut dgamma = Vec::with_capacity(256);
    for e in 0..NVARS {
        for j in gamma.entries() {
            dgamma.push(j.partial(e)?);
        }
    }
    // dgamma[64 e + 16 d + 4 a + c] = ∂_e Γ^d_ac
    let dg = |e: usize, dd: usize, a: usize, c: usize| &dgamma[64 * e + 16 * dd + 4 * a + c];
    let zero = Jet4::zero(gamma.base(), d);
    let mut out = JetTensor::from_fn(1, 3, |i| {
        let (dd, a, b, c) = (i[0], i[1], i[2], i[3]);
        if a >= b {
            return zero;
        }
        let mut acc = dg(b, dd, a, c) - dg(a, dd, b, c);
        for e in 0..NVARS {
            acc.add_product(low.get(&[dd, b, e]), low.get(&[e, a, c]));
            acc -= low.get(&[dd, a, e]) * low.get(&[e, b, c]);
        }
        acc
    });
    // antisymmetry in (a, b) is imposed exactly
    for dd in 0..NVARS {
        for a in 0..NVARS {
            for b in 0..a {
                for c in 0..NVARS {
                    *out.get_mut(&[dd, a, b, c]) = -*out.get(&[dd, b, a, c]);
                }
            }
        }
    }
    Ok(out)
}

/// `R_ac = R_abc^b`.
pub fn ricci(riemann: &JetTensor) -> Result<JetTensor, GeometryError> {
    expect_valence(riemann, 1, 3)?;
    Ok(riemann.contract(0, 2)?)
}

/// Covariant derivative of `t` with connection coefficients `gamma`
/// (`[a, b, c]` for `Γ^a_bc`). The new covariant slot is the first of the
/// covariant block.
pub fn covariant_derivative(t: &JetTensor, gamma: &JetTensor) -> Result<JetTensor, GeometryError> {
    expect_valence(gamma, 1, 2)?;
    expect_degree(t, 1)?;
    let (p, q) = t.valence();
    let rank = p + q;
    let d = (t.degree() - 1).min(gamma.degree());
    let low = t.truncate(d);
    let gam = gamma.truncate(d);
    let mut partials = Vec::with_capacity(NVARS);
    for e in 0..NVARS {
        partials.push(t.map(|j| j.partial(e).expect("degree checked above")));
    }
    let mut src = [0usize; crate::tensor::MAX_RANK];
    Ok(JetTensor::from_fn(p, q + 1, |idx| {
        let e = idx[p];
        src[..p].copy_from_slice(&idx[..p]);
        src[p..rank].copy_from_slice(&idx[p + 1..]);
        let mut acc = *partials[e].get(&src[..rank]);
        for slot in 0..rank {
            let keep = src[slot];
            for f in 0..NVARS {
                src[slot] = f;
                if slot < p {
                    acc.add_product(gam.get(&[keep, e, f]), low.get(&src[..rank]));
                } else {
                    acc -= gam.get(&[f, e, keep]) * low.get(&src[..rank]);
                }
            }
            src[slot] = keep;
        }
        acc
    }))
}

/// Everything the Levi-Civita connection of `g` yields at one point.
#[derive(Debug, Clone)]
pub struct GeometryFrame {
    pub metric: MetricAtPoint,
    pub christoffel: JetTensor,
    /// `R_abc^d` stored `[d, a, b, c]`.
    pub riemann: JetTensor,
    pub ricci: JetTensor,
    pub scalar: Jet4,
    pub schouten: JetTensor,
    /// `C_abc^d` stored `[d, a, b, c]`.
    pub weyl: JetTensor,
    /// `C_abcd = C_abc^e g_ed`.
    pub weyl_lowered: JetTensor,
    /// `C^abcd`, all slots raised.
    pub weyl_raised: JetTensor,
    /// `C_abcd C^abcd`.
    pub weyl_scalar: Jet4,
}

impl GeometryFrame {
    pub fn new(metric: MetricAtPoint) -> Result<Self, GeometryError> {
        let christoffel = christoffel(&metric)?;
        let riemann = riemann(&christoffel)?;
        let ricci = ricci(&riemann)?;
        let d = riemann.degree();
        let g = metric.g().truncate(d);
        let g_inv = metric.g_inv().truncate(d);
        let scalar = ricci.trace_with(&g_inv)?;
        let sixth = scalar.scale(1.0 / 6.0);
        let schouten = JetTensor::from_fn(0, 2, |i| (ricci.get(i) - &(g.get(i) * &sixth)).scale(0.5));
        // L^d_b = g^de L_eb
        let schouten_mixed = schouten.raise(0, &g_inv)?;
        let delta = JetTensor::kronecker(g.base(), d);
        let weyl = JetTensor::from_fn(1, 3, |i| {
            let (dd, a, b, c) = (i[0], i[1], i[2], i[3]);
            let mut acc = *riemann.get(i);
            acc -= schouten_mixed.get(&[dd, b]) * g.get(&[a, c]);
            acc += schouten_mixed.get(&[dd, a]) * g.get(&[b, c]);
            acc -= delta.get(&[dd, b]) * schouten.get(&[a, c]);
            acc += delta.get(&[dd, a]) * schouten.get(&[b, c]);
            acc
        });
        let weyl_lowered = JetTensor::from_fn(0, 4, |i| {
            let mut acc = Jet4::zero(g.base(), d);
            for e in 0..NVARS {
                acc.add_product(weyl.get(&[e, i[0], i[1], i[2]]), g.get(&[e, i[3]]));
            }
            acc
        });
        // [d; a, b, c] -> [d, a, b, c] -> reorder to [a, b, c, d]
        let raised = weyl.raise(1, &g_inv)?.raise(2, &g_inv)?.raise(3, &g_inv)?;
        let weyl_raised = raised.permute(&[1, 2, 3, 0])?;
        let mut weyl_scalar = Jet4::zero(g.base(), d);
        for (x, y) in weyl_lowered.entries().iter().zip(weyl_raised.entries()) {
            weyl_scalar.add_product(x, y);
        }
        Ok(Self {
            metric,
            christoffel,
            riemann,
            ricci,
            scalar,
            schouten,
            weyl,
            weyl_lowered,
            weyl_raised,
            weyl_scalar,
        })
    }

    pub fn base(&self) -> [f64; NVARS] {
        self.metric.base()
    }

    /// `∇_e T` using this frame's Levi-Civita connection.
    pub fn covariant_derivative(&self, t: &JetTensor) -> Result<JetTensor, GeometryError> {
        covariant_derivative(t, &self.christoffel)
    }

    /// `R_abcd = R_abc^e g_ed`.
    pub fn riemann_lowered(&self) -> JetTensor {
        let g = self.metric.g();
        JetTensor::from_fn(0, 4, |i| {
            let mut acc = Jet4::zero(g.base(), self.riemann.degree());
            for e in 0..NVARS {
                acc.add_product(self.riemann.get(&[e, i[0], i[1], i[2]]), g.get(&[e, i[3]]));
            }
            acc
        })
    }

    /// `γ + γ²` with `γ` the largest Christoffel value or first derivative:
    /// the size of the terms that cancel when curvature is assembled, and so
    /// the reference for rounding noise in anything built from it.
    pub fn ingredient_scale(&self) -> f64 {
        let gamma = self.christoffel.truncate(1).max_abs();
        gamma + gamma * gamma
    }

    /// `R_abcd R^abcd`.
    pub fn kretschmann(&self) -> Result<Jet4, GeometryError> {
        let g_inv = self.metric.g_inv();
        let raised = self
            .riemann
            .raise(1, g_inv)?
            .raise(2, g_inv)?
            .raise(3, g_inv)?
            .permute(&[1, 2, 3, 0])?;
        let lowered = self.riemann_lowered();
        let mut acc = Jet4::zero(self.base(), raised.degree());
        for (x, y) in lowered.entries().iter().zip(raised.entries()) {
            acc.add_product(x, y);
        }
        Ok(acc)
    }

    /// `B_bc = ∇^a∇^d C_abdc − ½ R^ad C_abcd`, values only (degree 0).
    pub fn bach(&self) -> Result<JetTensor, GeometryError> {
        let g_inv = self.metric.g_inv();
        // ∇_e C_abdc stored [e, a, b, d, c]
        let dc = self.covariant_derivative(&self.weyl_lowered)?;
        let div = JetTensor::from_fn(0, 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            let mut acc = Jet4::zero(self.base(), dc.degree());
            for e in 0..NVARS {
                for d in 0..NVARS {
                    acc.add_product(g_inv.get(&[e, d]), dc.get(&[e, a, b, d, c]));
                }
            }
            acc
        });
        let ddiv = self.covariant_derivative(&div)?;
        let ricci_up = self.ricci.raise(0, g_inv)?.raise(1, g_inv)?;
        let w = &self.weyl_lowered;
        Ok(JetTensor::from_fn(0, 2, |i| {
            let (b, c) = (i[0], i[1]);
            let mut acc = Jet4::zero(self.base(), 0);
            for a in 0..NVARS {
                for f in 0..NVARS {
                    acc.add_product(g_inv.get(&[f, a]), ddiv.get(&[f, a, b, c]));
                }
                for d in 0..NVARS {
                    acc -= (ricci_up.get(&[a, d]) * w.get(&[a, b, c, d])).scale(0.5);
                }
            }
            acc
        }))
    }
}
