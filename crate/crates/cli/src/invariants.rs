//! Identities that must hold for any metric, evaluated numerically at a
//! point. Each check returns a normalized residual.

use cgeom_core::conformal::{lambda_field, CFrame, Concomitant, ConformalError, ConformalPair};
use cgeom_core::einstein::PointAnalysis;
use cgeom_core::jet::Jet4;
use cgeom_core::tensor::{normalized_difference, relative_difference};
use cgeom_core::{GeometryError, GeometryFrame, JetTensor, MetricDefinition, ScalarExpr};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Covector fields drawn per point for the commutator check.
pub const COVECTOR_SAMPLES: usize = 10;
const SEED: u64 = 0x5eed;
/// Fraction of the Christoffel ingredient scale added to curvature
/// denominators, so flat metrics compare rounding noise to something
/// other than rounding noise.
const CURVATURE_FLOOR: f64 = 1e-4;

fn curvature_scale(frame: &GeometryFrame) -> f64 {
    frame.riemann.max_abs() + CURVATURE_FLOOR * frame.ingredient_scale()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Commutator,
    FirstBianchi,
    RicciSymmetry,
    WeylTraces,
    Metricity,
    WeylSquare,
    LambdaShift,
    ConnectionInvariance,
    CurvatureInvariance,
    CurvaturePaths,
    ECrosscheck,
    CLambdaCrosscheck,
    BachRescaling,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::Commutator,
        CheckKind::FirstBianchi,
        CheckKind::RicciSymmetry,
        CheckKind::WeylTraces,
        CheckKind::Metricity,
        CheckKind::WeylSquare,
        CheckKind::LambdaShift,
        CheckKind::ConnectionInvariance,
        CheckKind::CurvatureInvariance,
        CheckKind::CurvaturePaths,
        CheckKind::ECrosscheck,
        CheckKind::CLambdaCrosscheck,
        CheckKind::BachRescaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Commutator => "riemann-commutator",
            CheckKind::FirstBianchi => "first-bianchi",
            CheckKind::RicciSymmetry => "ricci-symmetry",
            CheckKind::WeylTraces => "weyl-trace-free",
            CheckKind::Metricity => "metricity",
            CheckKind::WeylSquare => "weyl-square-identity",
            CheckKind::LambdaShift => "lambda-shift",
            CheckKind::ConnectionInvariance => "c-connection-invariance",
            CheckKind::CurvatureInvariance => "c-curvature-invariance",
            CheckKind::CurvaturePaths => "c-curvature-paths",
            CheckKind::ECrosscheck => "e-crosscheck",
            CheckKind::CLambdaCrosscheck => "c-lambda-crosscheck",
            CheckKind::BachRescaling => "bach-rescaling",
        }
    }

    pub fn limit(self) -> f64 {
        match self {
            CheckKind::Commutator | CheckKind::WeylTraces | CheckKind::WeylSquare | CheckKind::CurvaturePaths => 1e-10,
            CheckKind::FirstBianchi | CheckKind::RicciSymmetry | CheckKind::Metricity => 1e-11,
            CheckKind::ECrosscheck | CheckKind::CLambdaCrosscheck => 1e-9,
            CheckKind::LambdaShift
            | CheckKind::ConnectionInvariance
            | CheckKind::CurvatureInvariance
            | CheckKind::BachRescaling => 1e-8,
        }
    }

    /// Whether the check needs a non-vanishing Weyl tensor.
    pub fn needs_weyl(self) -> bool {
        !matches!(
            self,
            CheckKind::Commutator
                | CheckKind::FirstBianchi
                | CheckKind::RicciSymmetry
                | CheckKind::WeylTraces
                | CheckKind::Metricity
                | CheckKind::WeylSquare
                | CheckKind::BachRescaling
        )
    }
}

/// Random cubic polynomial covector field about `base`.
pub fn random_covector(base: [f64; 4], rng: &mut impl Rng) -> JetTensor {
    let x = Jet4::seeds(base, 4).expect("maximal degree");
    JetTensor::from_fn(0, 1, |_| {
        let mut acc = Jet4::constant(rng.gen_range(-1.0..1.0), base, 4);
        for i in 0..4 {
            acc += x[i].scale(rng.gen_range(-1.0..1.0));
            for j in i..4 {
                acc += (&x[i] * &x[j]).scale(rng.gen_range(-1.0..1.0));
                for k in j..4 {
                    acc += (&(&x[i] * &x[j]) * &x[k]).scale(rng.gen_range(-0.3..0.3));
                }
            }
        }
        acc
    })
}

/// `∇_a∇_b ω_c − ∇_b∇_a ω_c` against `R_abc^d ω_d`.
pub fn commutator_residual(frame: &GeometryFrame, omega: &JetTensor) -> Result<f64, GeometryError> {
    let d2 = frame.covariant_derivative(&frame.covariant_derivative(omega)?)?;
    let comm = JetTensor::from_fn(0, 3, |i| d2.get(i) - d2.get(&[i[1], i[0], i[2]]));
    let rhs = JetTensor::from_fn(0, 3, |i| {
        let mut acc = Jet4::zero(frame.base(), 2);
        for d in 0..4 {
            acc.add_product(frame.riemann.get(&[d, i[0], i[1], i[2]]), omega.get(&[d]));
        }
        acc
    });
    Ok(relative_difference(&comm, &rhs, d2.max_abs() + rhs.max_abs()))
}

pub fn first_bianchi_residual(frame: &GeometryFrame) -> f64 {
    let r = &frame.riemann;
    let cyclic = JetTensor::from_fn(1, 3, |i| {
        let (d, a, b, c) = (i[0], i[1], i[2], i[3]);
        &(r.get(&[d, a, b, c]) + r.get(&[d, b, c, a])) + r.get(&[d, c, a, b])
    });
    cyclic.max_abs() / curvature_scale(frame).max(f64::MIN_POSITIVE)
}

pub fn ricci_symmetry_residual(frame: &GeometryFrame) -> Result<f64, GeometryError> {
    let transposed = frame.ricci.permute(&[1, 0])?;
    Ok(relative_difference(&frame.ricci, &transposed, curvature_scale(frame)))
}

/// Largest trace of the Weyl tensor over every slot pair.
pub fn weyl_trace_residual(frame: &GeometryFrame) -> Result<f64, GeometryError> {
    let scale = frame.weyl.max_abs().max(curvature_scale(frame));
    let mut worst = 0.0f64;
    for down in 1..4 {
        worst = worst.max(frame.weyl.contract(0, down)?.max_abs());
    }
    let raised = frame.weyl_lowered.raise(0, frame.metric.g_inv())?;
    for down in 2..4 {
        worst = worst.max(raised.contract(0, down)?.max_abs());
    }
    Ok(worst / scale)
}

/// `∇g`, relative to `|g| |Γ|`.
pub fn metricity_residual(frame: &GeometryFrame) -> Result<f64, GeometryError> {
    let g = frame.metric.g();
    let dg = frame.covariant_derivative(g)?;
    Ok(dg.max_abs() / (g.max_abs() * frame.christoffel.max_abs().max(1.0)))
}

/// `C_abmp C^dbmp − ¼ δ_a^d C·C`.
pub fn weyl_square_residual(frame: &GeometryFrame) -> f64 {
    let base = frame.base();
    let lhs = JetTensor::from_fn(1, 1, |i| {
        let (d, a) = (i[0], i[1]);
        let mut acc = Jet4::zero(base, 2);
        for b in 0..4 {
            for m in 0..4 {
                for p in 0..4 {
                    acc.add_product(frame.weyl_lowered.get(&[a, b, m, p]), frame.weyl_raised.get(&[d, b, m, p]));
                }
            }
        }
        acc
    });
    let rhs = JetTensor::kronecker(base, 2).scale_by(&frame.weyl_scalar.scale(0.25));
    let scale = lhs.max_abs().max(rhs.max_abs()) + curvature_scale(frame).powi(2);
    relative_difference(&lhs, &rhs, scale)
}

/// `Λ(Θ²g̃) − Λ(g̃) − Υ`.
pub fn lambda_shift_residual(pair: &ConformalPair) -> Result<f64, ConformalError> {
    let unphys = lambda_field(&pair.unphysical)?;
    let phys = lambda_field(&pair.physical)?;
    let ups = pair.upsilon.truncate(1);
    let scale = unphys.max_abs().max(phys.max_abs()) + ups.max_abs();
    let shift = unphys.sub(&phys).map_err(GeometryError::from)?;
    Ok(relative_difference(&shift, &ups, scale))
}

/// Differences of the C-connection coefficients and of its curvature
/// between `g̃` and `Θ²g̃`.
pub fn c_connection_invariance(pair: &ConformalPair) -> Result<(f64, f64), ConformalError> {
    let u = CFrame::new(&pair.unphysical, lambda_field(&pair.unphysical)?)?;
    let p = CFrame::new(&pair.physical, lambda_field(&pair.physical)?)?;
    Ok((
        normalized_difference(&u.total, &p.total),
        normalized_difference(&u.c_riemann, &p.c_riemann),
    ))
}

/// Largest disagreement between the three ways of computing the
/// C-connection curvature.
pub fn c_curvature_paths_residual(cframe: &CFrame) -> Result<f64, ConformalError> {
    let scale = cframe.c_riemann.max_abs();
    let direct = cframe.c_riemann_direct()?;
    Ok(relative_difference(&cframe.c_riemann, &cframe.c_riemann_generic, scale)
        .max(relative_difference(&cframe.c_riemann, &direct, scale)))
}

/// `B(g̃) − Θ^k B(Θ²g̃)`, relative to `|B|` plus the squared curvature
/// scale, so that metrics with vanishing Bach tensor compare noise to
/// curvature rather than to noise.
pub fn bach_rescaling_residual(pair: &ConformalPair, k: i32) -> Result<f64, GeometryError> {
    let phys = pair.physical.bach()?;
    let unphys = pair.unphysical.bach()?;
    let rescaled = unphys.scale_by(&pair.theta.truncate(0).powi(k)?);
    let curvature = pair.physical.riemann_lowered().max_abs_value() + CURVATURE_FLOOR * pair.physical.ingredient_scale();
    let scale = phys.max_abs().max(rescaled.max_abs()) + curvature * curvature;
    Ok(relative_difference(&phys, &rescaled, scale))
}

/// Outcome of one check at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckOutcome {
    Residual(f64),
    /// Not applicable because the Weyl tensor vanishes.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointChecks {
    pub point: [f64; 4],
    /// `Err` holds the reason the point could not be evaluated at all.
    pub checks: Result<Vec<(CheckKind, CheckOutcome)>, String>,
}

/// Runs every check at `point`, using `theta` for the conformal ones.
pub fn check_point(def: &MetricDefinition, theta: &ScalarExpr, point: [f64; 4]) -> PointChecks {
    PointChecks {
        point,
        checks: run_checks(def, theta, point).map_err(|e| e.to_string()),
    }
}

fn run_checks(
    def: &MetricDefinition,
    theta: &ScalarExpr,
    point: [f64; 4],
) -> Result<Vec<(CheckKind, CheckOutcome)>, ConformalError> {
    let pair = ConformalPair::new(def, theta.clone(), point)?;
    let frame = &pair.physical;
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut commutator = 0.0f64;
    for _ in 0..COVECTOR_SAMPLES {
        commutator = commutator.max(commutator_residual(frame, &random_covector(point, &mut rng))?);
    }

    let mut out = vec![
        (CheckKind::Commutator, commutator),
        (CheckKind::FirstBianchi, first_bianchi_residual(frame)),
        (CheckKind::RicciSymmetry, ricci_symmetry_residual(frame)?),
        (CheckKind::WeylTraces, weyl_trace_residual(frame)?),
        (CheckKind::Metricity, metricity_residual(frame)?),
        (CheckKind::WeylSquare, weyl_square_residual(frame)),
        (CheckKind::BachRescaling, bach_rescaling_residual(&pair, Concomitant::Bach.weight())?),
    ];
    let degenerate = match PointAnalysis::new(frame.clone()) {
        Ok(analysis) => {
            let (connection, curvature) = c_connection_invariance(&pair)?;
            out.extend([
                (CheckKind::LambdaShift, lambda_shift_residual(&pair)?),
                (CheckKind::ConnectionInvariance, connection),
                (CheckKind::CurvatureInvariance, curvature),
                (CheckKind::CurvaturePaths, c_curvature_paths_residual(&analysis.cframe)?),
                (CheckKind::ECrosscheck, analysis.residuals.crosscheck),
                (CheckKind::CLambdaCrosscheck, analysis.residuals.c_lambda_crosscheck),
            ]);
            false
        }
        Err(ConformalError::DegenerateWeyl { .. }) => true,
        Err(e) => return Err(e),
    };
    let mut results: Vec<_> = out.into_iter().map(|(k, r)| (k, CheckOutcome::Residual(r))).collect();
    if degenerate {
        results.extend(
            CheckKind::ALL
                .into_iter()
                .filter(|k| k.needs_weyl())
                .map(|k| (k, CheckOutcome::Skipped)),
        );
    }
    results.sort_by_key(|(k, _)| CheckKind::ALL.iter().position(|x| x == k));
    Ok(results)
}
