//! The Λ-field, the conformal pseudo-differential and the C-connection.

use thiserror::Error;

use crate::curvature::{covariant_derivative, riemann, GeometryError, GeometryFrame};
use crate::definition::MetricDefinition;
use crate::expr::ScalarExpr;
use crate::jet::{Jet4, NVARS};
use crate::tensor::JetTensor;

/// Weyl components at or below this multiple of the curvature scale built
/// from the Christoffel symbols are treated as rounding noise.
pub const WEYL_NOISE: f64 = 1e-9;
/// `|C·C|` below this fraction of `Σ |C_abcd C^abcd|` is a cancellation to zero.
pub const WEYL_CANCELLATION: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Weyl tensor vanishes at the point (C·C = {cdotc:e}); the test does not apply")]
    DegenerateWeyl { cdotc: f64 },
    #[error(transparent)]
    Definition(#[from] crate::definition::DefinitionError),
    #[error("rank parameter must be positive")]
    ZeroRank,
}

/// `Some(C·C)` when the Weyl tensor is numerically zero at the frame's point.
pub fn weyl_degeneracy(frame: &GeometryFrame) -> Option<f64> {
    let cdotc = frame.weyl_scalar.value();
    if frame.weyl.max_abs_value() <= WEYL_NOISE * frame.ingredient_scale() {
        return Some(cdotc);
    }
    let magnitude: f64 = frame
        .weyl_lowered
        .entries()
        .iter()
        .zip(frame.weyl_raised.entries())
        .map(|(a, b)| (a.value() * b.value()).abs())
        .sum();
    (cdotc.abs() < WEYL_CANCELLATION * magnitude || magnitude == 0.0).then_some(cdotc)
}

/// `Λ_d = 8 C_d^amp ∇_[m L_p]a / (C·C)`, degree 1.
pub fn lambda_field(frame: &GeometryFrame) -> Result<JetTensor, ConformalError> {
    if let Some(cdotc) = weyl_degeneracy(frame) {
        return Err(ConformalError::DegenerateWeyl { cdotc });
    }
    let g_inv = frame.metric.g_inv();
    // ∇_m L_pa stored [m, p, a]
    let curl = frame.covariant_derivative(&frame.schouten)?.antisymmetrize(&[0, 1]).map_err(GeometryError::from)?;
    let d = curl.degree();
    let g_inv = g_inv.truncate(d);
    // raise all three slots once, instead of three slots of the Weyl tensor
    let curl_up = JetTensor::from_fn(3, 0, |i| {
        let (m, p, a) = (i[0], i[1], i[2]);
        let mut acc = Jet4::zero(frame.base(), d);
        for x in 0..NVARS {
            for y in 0..NVARS {
                let gg = g_inv.get(&[m, x]) * g_inv.get(&[p, y]);
                for z in 0..NVARS {
                    acc.add_product(&(&gg * g_inv.get(&[a, z])), curl.get(&[x, y, z]));
                }
            }
        }
        acc
    });
    let factor = frame.weyl_scalar.truncate(d).recip().map_err(GeometryError::from)?.scale(8.0);
    let w = &frame.weyl_lowered;
    Ok(JetTensor::from_fn(0, 1, |i| {
        let mut acc = Jet4::zero(frame.base(), d);
        for a in 0..NVARS {
            for m in 0..NVARS {
                for p in 0..NVARS {
                    acc.add_product(w.get(&[i[0], a, m, p]), curl_up.get(&[m, p, a]));
                }
            }
        }
        &acc * &factor
    }))
}

/// The coefficient tensors `M^c_ba` and `M̄^c_ba`, stored `[c, b, a]` with
/// `b` the differentiation slot:
///
/// `M^c_ba = ((s+N)/N) Λ_b δ_a^c + Λ_a δ_b^c − g_ab g^cd Λ_d`
/// `M̄^c_ba = ((s−N)/N) Λ_b δ_a^c − Λ_a δ_b^c + g_ab g^cd Λ_d`
pub fn m_coefficients(
    lambda: &JetTensor,
    g: &JetTensor,
    g_inv: &JetTensor,
    rank: usize,
    weight: i32,
) -> Result<(JetTensor, JetTensor), ConformalError> {
    if rank == 0 {
        return Err(ConformalError::ZeroRank);
    }
    let n = rank as f64;
    let s = weight as f64;
    let lambda_up = lambda.raise(0, g_inv).map_err(GeometryError::from)?;
    let d = lambda.degree();
    let zero = Jet4::zero(lambda.base(), d);
    let build = |first: f64, sign: f64| {
        JetTensor::from_fn(1, 2, |i| {
            let (c, b, a) = (i[0], i[1], i[2]);
            let mut acc = zero;
            if a == c {
                acc += lambda.get(&[b]).scale(first);
            }
            if b == c {
                acc += lambda.get(&[a]).scale(sign);
            }
            acc -= (g.get(&[a, b]) * lambda_up.get(&[c])).scale(sign);
            acc
        })
    };
    Ok((build((s + n) / n, 1.0), build((s - n) / n, -1.0)))
}

/// `D_a K` for a weight-`s` tensor `K`, with the rank parameter `N = p + q`.
/// Scalars use `∇_a w + s Λ_a w`. Slot layout follows
/// [`covariant_derivative`].
pub fn pseudo_differential(
    k: &JetTensor,
    weight: i32,
    frame: &GeometryFrame,
    lambda: &JetTensor,
) -> Result<JetTensor, ConformalError> {
    pseudo_differential_with_rank(k, weight, k.rank(), frame, lambda)
}

/// [`pseudo_differential`] with an explicit rank parameter in the `(s±N)/N`
/// factors.
pub fn pseudo_differential_with_rank(
    k: &JetTensor,
    weight: i32,
    rank: usize,
    frame: &GeometryFrame,
    lambda: &JetTensor,
) -> Result<JetTensor, ConformalError> {
    let nabla = frame.covariant_derivative(k)?;
    let (p, q) = k.valence();
    if p + q == 0 {
        let w = k.get(&[]);
        return Ok(JetTensor::from_fn(0, 1, |i| {
            nabla.get(i) + &(lambda.get(i) * w).scale(weight as f64)
        }));
    }
    let (m, m_bar) = m_coefficients(lambda, frame.metric.g(), frame.metric.g_inv(), rank, weight)?;
    let total = p + q;
    let mut src = [0usize; crate::tensor::MAX_RANK];
    Ok(JetTensor::from_fn(p, q + 1, |idx| {
        let a = idx[p];
        src[..p].copy_from_slice(&idx[..p]);
        src[p..total].copy_from_slice(&idx[p + 1..]);
        let mut acc = *nabla.get(idx);
        for slot in 0..total {
            let keep = src[slot];
            for c in 0..NVARS {
                src[slot] = c;
                let coeff = if slot < p {
                    m_bar.get(&[keep, a, c])
                } else {
                    m.get(&[c, a, keep])
                };
                acc.add_product(coeff, k.get(&src[..total]));
            }
            src[slot] = keep;
        }
        acc
    }))
}

/// Quantities of the C-connection at one point.
#[derive(Debug, Clone)]
pub struct CFrame {
    /// `Λ_d`, degree 1.
    pub lambda: JetTensor,
    /// `g^cd g_ab Λ_d − δ_b^c Λ_a − δ_a^c Λ_b`, stored `[c, a, b]`.
    pub transition: JetTensor,
    /// Levi-Civita coefficients plus the transition tensor.
    pub total: JetTensor,
    /// `𝒞_b Λ_c` stored `[b, c]`.
    pub c_lambda: JetTensor,
    /// Curvature of 𝒞 from the explicit expansion in Λ and `𝒞Λ`.
    pub c_riemann: JetTensor,
    /// Curvature of 𝒞 from the transition tensor:
    /// `R + 2 T^d_e[a T^e_b]c − 2 𝒞_[a T^d_b]c`.
    pub c_riemann_generic: JetTensor,
    /// `𝓡_ab = 𝓡_adb^d`.
    pub c_ricci: JetTensor,
    pub c_scalar: f64,
}

impl CFrame {
    pub fn new(frame: &GeometryFrame, lambda: JetTensor) -> Result<Self, ConformalError> {
        let base = frame.base();
        let d1 = lambda.degree().min(1);
        let lambda1 = lambda.truncate(d1);
        let g = frame.metric.g().truncate(d1);
        let g_inv = frame.metric.g_inv().truncate(d1);
        let lambda_up = lambda1.raise(0, &g_inv).map_err(GeometryError::from)?;
        let transition = JetTensor::from_fn(1, 2, |i| {
            let (c, a, b) = (i[0], i[1], i[2]);
            let mut acc = g.get(&[a, b]) * lambda_up.get(&[c]);
            if b == c {
                acc -= lambda1.get(&[a]);
            }
            if a == c {
                acc -= lambda1.get(&[b]);
            }
            acc
        });
        let total = frame.christoffel.truncate(d1).add(&transition).map_err(GeometryError::from)?;
        let c_lambda = covariant_derivative(&lambda1, &total)?;

        let r = frame.riemann.truncate(0);
        let g0 = g.truncate(0);
        let g_inv0 = g_inv.truncate(0);
        let l0 = lambda1.truncate(0);
        let lu0 = lambda_up.truncate(0);
        let lambda_sq = {
            let mut acc = Jet4::zero(base, 0);
            for a in 0..NVARS {
                acc.add_product(l0.get(&[a]), lu0.get(&[a]));
            }
            acc
        };
        // x_bc = Λ_b Λ_c − g_bc Λ·Λ − 𝒞_b Λ_c
        let x = JetTensor::from_fn(0, 2, |i| {
            let (b, c) = (i[0], i[1]);
            &(&(l0.get(&[b]) * l0.get(&[c])) - &(g0.get(&[b, c]) * &lambda_sq)) - c_lambda.get(&[b, c])
        });
        // g^de 𝒞_a Λ_e stored [d, a]
        let c_lambda_up = JetTensor::from_fn(1, 1, |i| {
            let mut acc = Jet4::zero(base, 0);
            for e in 0..NVARS {
                acc.add_product(g_inv0.get(&[i[0], e]), c_lambda.get(&[i[1], e]));
            }
            acc
        });
        let c_riemann = JetTensor::from_fn(1, 3, |i| {
            let (d, a, b, c) = (i[0], i[1], i[2], i[3]);
            let mut acc = *r.get(i);
            acc -= lu0.get(&[d]) * &(&(l0.get(&[b]) * g0.get(&[a, c])) - &(l0.get(&[a]) * g0.get(&[b, c])));
            if d == a {
                acc += x.get(&[b, c]);
            }
            if d == b {
                acc -= x.get(&[a, c]);
            }
            if d == c {
                acc += c_lambda.get(&[a, b]) - c_lambda.get(&[b, a]);
            }
            acc -= g0.get(&[c, b]) * c_lambda_up.get(&[d, a]);
            acc += g0.get(&[c, a]) * c_lambda_up.get(&[d, b]);
            acc
        });

        // 𝒞_a T^d_bc stored [d, a, b, c]
        let c_transition = covariant_derivative(&transition, &total)?;
        let t0 = transition.truncate(0);
        let c_riemann_generic = JetTensor::from_fn(1, 3, |i| {
            let (d, a, b, c) = (i[0], i[1], i[2], i[3]);
            let mut acc = *r.get(i);
            for e in 0..NVARS {
                acc.add_product(t0.get(&[d, e, a]), t0.get(&[e, b, c]));
                acc -= t0.get(&[d, e, b]) * t0.get(&[e, a, c]);
            }
            acc -= c_transition.get(&[d, a, b, c]) - c_transition.get(&[d, b, a, c]);
            acc
        });

        let c_ricci = c_riemann.contract(0, 2).map_err(GeometryError::from)?;
        let c_scalar = c_ricci.trace_with(&g_inv0).map_err(GeometryError::from)?.value();
        Ok(Self {
            lambda,
            transition,
            total,
            c_lambda,
            c_riemann,
            c_riemann_generic,
            c_ricci,
            c_scalar,
        })
    }

    /// Curvature of 𝒞 computed directly from its total coefficients.
    pub fn c_riemann_direct(&self) -> Result<JetTensor, ConformalError> {
        Ok(riemann(&self.total)?)
    }
}

/// A physical metric `g̃`, the conformal factor `Θ`, and the unphysical
/// metric `g = Θ² g̃`, evaluated at one point.
#[derive(Debug, Clone)]
pub struct ConformalPair {
    pub unphysical: GeometryFrame,
    pub physical: GeometryFrame,
    pub theta: Jet4,
    /// `Υ_a = ∂_a Θ / Θ`.
    pub upsilon: JetTensor,
}

impl ConformalPair {
    pub fn new(physical: &MetricDefinition, theta: ScalarExpr, point: [f64; NVARS]) -> Result<Self, ConformalError> {
        let scaled = physical.with_conformal_factor(theta.clone())?;
        let seeds = Jet4::seeds(point, crate::jet::MAX_DEGREE).map_err(GeometryError::from)?;
        let theta = theta.eval_on_jets(&seeds, physical.params()).map_err(GeometryError::from)?;
        if !(theta.value() > 0.0) {
            return Err(GeometryError::NonPositiveConformalFactor(theta.value()).into());
        }
        let inv = theta.recip().map_err(GeometryError::from)?;
        let partials: Vec<Jet4> = (0..NVARS)
            .map(|i| theta.partial(i))
            .collect::<Result<_, _>>()
            .map_err(GeometryError::from)?;
        let upsilon = JetTensor::from_fn(0, 1, |i| &partials[i[0]] * &inv);
        Ok(Self {
            unphysical: GeometryFrame::new(scaled.metric_at(point)?)?,
            physical: GeometryFrame::new(physical.metric_at(point)?)?,
            theta,
            upsilon,
        })
    }
}

/// Conformal weights `s` (with `Q̃ = Θ^s Q` and `g = Θ² g̃`) of the
/// concomitants the test suites rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concomitant {
    Metric,
    InverseMetric,
    WeylMixed,
    WeylLowered,
    WeylScalar,
    Bach,
}

impl Concomitant {
    pub fn weight(self) -> i32 {
        match self {
            Concomitant::Metric => -2,
            Concomitant::InverseMetric => 2,
            Concomitant::WeylMixed => 0,
            Concomitant::WeylLowered => -2,
            Concomitant::WeylScalar => 4,
            Concomitant::Bach => 2,
        }
    }
}
