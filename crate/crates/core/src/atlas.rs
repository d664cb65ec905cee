//! Reconstruction of the classified domains.
//!
//! For an outer polynomial p of degree at most 2, the conformal map
//! psi(z) = integral_0^z dw / p(w) sends the closed unit disc onto
//!   * a disc when p is a square of a degree <= 1 polynomial (psi is Mobius),
//!   * a logarithmic oval when p has a single simple root a (psi = log(z-a)
//!     up to scale and shift),
//!   * an affine image of a logarithmic oval when p has two distinct roots
//!     (reduced to the single-log case through a disc automorphism).
//! Pulling the flat metric back through psi induces the boundary factor
//! e^{-2 phi} = |p|^2, which is exactly the vanishing class of the
//! disc commutator criterion.

use crate::curve::PlanarCurve;
use crate::disc::ConformalBoundaryFactor;
use crate::error::{Error, Result};
use crate::fejer_riesz::OuterPolynomial;
use crate::fft;
use crate::fourier::grid_angles;
use crate::tol;
use num_complex::Complex64;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Disc,
    LogOval,
    TwoLogReduced,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Disc => "disc",
            CaseTag::LogOval => "log_oval",
            CaseTag::TwoLogReduced => "two_log_reduced",
        }
    }
}

/// z -> (a z + b) / (c z + d).
#[derive(Debug, Clone, Copy)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": [self.a.re, self.a.im],
            "b": [self.b.re, self.b.im],
            "c": [self.c.re, self.c.im],
            "d": [self.d.re, self.d.im],
        })
    }
}

/// Reduction of the two-root case to the single-log case through the disc
/// automorphism mu(z) = (z + 1/b)/(z/b + 1) after rotating the second root
/// onto the positive real axis.
#[derive(Debug, Clone)]
pub struct Case3Reduction {
    /// Rotation angle omega = arg(b); the disc is precomposed with z -> e^{i omega} z.
    pub rotation: f64,
    /// Rotated roots: a_rot = a e^{-i omega}, b_rot = |b| > 1 real.
    pub a_rot: Complex64,
    pub b_rot: f64,
    pub mu: MobiusMap,
    /// Center of the reduced single-log map: c0 = (1 - a_rot b_rot)/(a_rot - b_rot).
    pub reduced_center: Complex64,
    /// |c0| > 1, the canonical oval parameter of the reduced map.
    pub canonical_param: f64,
    /// Prefactor 1/(a_rot - b_rot) of the reduced log.
    pub scale: Complex64,
}

/// Rotate + automorphism reduction of psi(z) = (1/(a-b)) log((z-a)/(z-b)).
///
/// The composed map satisfies
///   psi(e^{i omega} mu(z)) = scale' * [ log(z - c0) + const ],
/// so the image of the disc is an affine image of the logarithmic oval with
/// parameter |c0|.
pub fn case3_reduce(a: Complex64, b: Complex64) -> Result<Case3Reduction> {
    if a.norm() <= 1.0 || b.norm() <= 1.0 {
        return Err(Error::OuterViolation { modulus: a.norm().min(b.norm()) });
    }
    let sep = (a - b).norm() / a.norm().max(b.norm());
    if sep <= tol::ROOT_COINCIDE_REL {
        return Err(Error::Parameter(
            "coincident roots: the map is Mobius and belongs to the disc case".into(),
        ));
    }
    let rotation = b.arg();
    let phase = Complex64::from_polar(1.0, -rotation);
    let a_rot = a * phase;
    let b_rot = b.norm();
    let mu = MobiusMap {
        a: Complex64::ONE,
        b: Complex64::new(1.0 / b_rot, 0.0),
        c: Complex64::new(1.0 / b_rot, 0.0),
        d: Complex64::ONE,
    };
    let denom = a_rot - b_rot;
    let reduced_center = (Complex64::ONE - a_rot * b_rot) / denom;
    let canonical_param = reduced_center.norm();
    debug_assert!(canonical_param > 1.0);
    Ok(Case3Reduction {
        rotation,
        a_rot,
        b_rot,
        mu,
        reduced_center,
        canonical_param,
        scale: denom.inv(),
    })
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub case: CaseTag,
    /// Present when the root separation sits in the ambiguous band: the
    /// alternative classification is reported instead of silently choosing.
    pub borderline_alternative: Option<CaseTag>,
    /// Mobius map of the disc case.
    pub mobius: Option<MobiusMap>,
    /// Canonical oval parameter |a| of the single-root case.
    pub oval_param: Option<f64>,
    /// Reduction data of the two-root case.
    pub reduction: Option<Case3Reduction>,
    /// Boundary curve psi(unit circle).
    pub curve: PlanarCurve,
}

impl ReconstructionResult {
    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.as_str(),
            "borderline_alternative": self.borderline_alternative.map(CaseTag::as_str),
            "oval_param": self.oval_param,
            "reduced_param": self.reduction.as_ref().map(|r| r.canonical_param),
            "mobius": self.mobius.as_ref().map(MobiusMap::to_json),
            "samples": self.curve.len(),
        })
    }
}

/// Continuous logarithm along a sampled nonvanishing closed path. The start
/// argument is atan2 mapped into (0, 2pi]; successive samples unwrap by the
/// principal argument of the ratio. Errors if the path winds around zero
/// (the log could not close up).
fn unwrapped_log(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let first = values[0];
    if first.norm() == 0.0 {
        return Err(Error::CurveGeometry("log of zero".into()));
    }
    let mut arg = first.arg();
    if arg <= 0.0 {
        arg += std::f64::consts::TAU;
    }
    let mut out = Vec::with_capacity(values.len());
    out.push(Complex64::new(first.norm().ln(), arg));
    let mut prev = first;
    let mut total = arg;
    for &v in &values[1..] {
        if v.norm() == 0.0 {
            return Err(Error::CurveGeometry("log of zero".into()));
        }
        total += (v / prev).arg();
        out.push(Complex64::new(v.norm().ln(), total));
        prev = v;
    }
    let closing = (values[0] / prev).arg();
    let winding = (total + closing - arg) / std::f64::consts::TAU;
    if winding.round().abs() > 0.1 || (winding - winding.round()).abs() > 1e-6 {
        return Err(Error::CurveGeometry(format!(
            "path winds {winding:.3} times around zero; log does not close"
        )));
    }
    Ok(out)
}

/// ln|w| + i arg(w) with the argument mapped into (0, 2pi]; avoids the signed
/// -pi/+pi ambiguity of the principal branch for branch constants.
fn ln_arg_positive(w: Complex64) -> Complex64 {
    let mut arg = w.arg();
    if arg <= 0.0 {
        arg += std::f64::consts::TAU;
    }
    Complex64::new(w.norm().ln(), arg)
}

/// Sampled boundary curve of psi(z) = integral_0^z dw/p(w) on the unit circle.
/// Tangents are the exact i e^{i theta} / p(e^{i theta}).
fn sample_psi_curve(p: &OuterPolynomial, m: usize) -> Result<PlanarCurve> {
    let angles = grid_angles(m);
    let circle: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let lead = p.leading();
    let points: Vec<Complex64> = match p.degree() {
        0 => circle.iter().map(|&z| z / lead).collect(),
        1 => {
            let a = p.roots()[0];
            let shifted: Vec<Complex64> = circle.iter().map(|&z| z - a).collect();
            let logs = unwrapped_log(&shifted)?;
            let base = ln_arg_positive(-a); // fixes psi(0) = 0 up to a branch constant
            logs.into_iter().map(|u| (u - base) / lead).collect()
        }
        2 => {
            let (a, b) = (p.roots()[0], p.roots()[1]);
            let sep = (a - b).norm() / a.norm().max(b.norm());
            if sep <= tol::ROOT_COINCIDE_REL {
                let gamma = 0.5 * (a + b);
                circle
                    .iter()
                    .map(|&z| (-(z - gamma).inv() - gamma.inv()) / lead)
                    .collect()
            } else {
                let ratios: Vec<Complex64> = circle.iter().map(|&z| (z - a) / (z - b)).collect();
                let logs = unwrapped_log(&ratios)?;
                let pref = (lead * (a - b)).inv();
                let base = ln_arg_positive(a / b);
                logs.into_iter().map(|u| (u - base) * pref).collect()
            }
        }
        _ => unreachable!("guarded by reconstruct"),
    };
    let tangents: Vec<Complex64> = angles
        .iter()
        .map(|&t| {
            let z = Complex64::from_polar(1.0, t);
            Complex64::new(0.0, 1.0) * z / p.eval(z)
        })
        .collect();
    PlanarCurve::from_samples(points, tangents)
}

/// Classify an outer polynomial of degree <= 2 by its root structure and
/// sample the boundary of the image domain.
pub fn reconstruct(p: &OuterPolynomial, samples: usize) -> Result<ReconstructionResult> {
    if p.degree() > 2 {
        return Err(Error::Degree { degree: p.degree(), max: 2 });
    }
    for r in p.roots() {
        if r.norm() <= 1.0 {
            return Err(Error::OuterViolation { modulus: r.norm() });
        }
    }
    let curve = sample_psi_curve(p, samples)?;
    let lead = p.leading();
    match p.degree() {
        0 => Ok(ReconstructionResult {
            case: CaseTag::Disc,
            borderline_alternative: None,
            mobius: Some(MobiusMap {
                a: lead.inv(),
                b: Complex64::ZERO,
                c: Complex64::ZERO,
                d: Complex64::ONE,
            }),
            oval_param: None,
            reduction: None,
            curve,
        }),
        1 => Ok(ReconstructionResult {
            case: CaseTag::LogOval,
            borderline_alternative: None,
            mobius: None,
            oval_param: Some(p.roots()[0].norm()),
            reduction: None,
            curve,
        }),
        _ => {
            let (a, b) = (p.roots()[0], p.roots()[1]);
            let sep = (a - b).norm() / a.norm().max(b.norm());
            if sep <= tol::ROOT_COINCIDE_REL {
                // psi(z) = (1/lead)(-1/(z-gamma) - 1/gamma) = -z / (lead gamma (z - gamma))
                let gamma = 0.5 * (a + b);
                Ok(ReconstructionResult {
                    case: CaseTag::Disc,
                    borderline_alternative: None,
                    mobius: Some(MobiusMap {
                        a: -Complex64::ONE,
                        b: Complex64::ZERO,
                        c: lead * gamma,
                        d: -lead * gamma * gamma,
                    }),
                    oval_param: None,
                    reduction: None,
                    curve,
                })
            } else {
                let reduction = case3_reduce(a, b)?;
                let borderline = if sep <= tol::BORDERLINE_REL { Some(CaseTag::Disc) } else { None };
                Ok(ReconstructionResult {
                    case: CaseTag::TwoLogReduced,
                    borderline_alternative: borderline,
                    mobius: None,
                    oval_param: None,
                    reduction: Some(reduction),
                    curve,
                })
            }
        }
    }
}

/// Boundary curve of the logarithmic oval log(e^{i theta} - a), a > 1, with
/// the branch continuous on the left half plane (log(-3) = ln 3 + i pi).
pub fn log_oval_boundary(a: f64, m: usize) -> Result<PlanarCurve> {
    if a <= 1.0 {
        return Err(Error::Parameter(format!("oval parameter must exceed 1, got {a}")));
    }
    let circle: Vec<Complex64> = grid_angles(m)
        .into_iter()
        .map(|t| Complex64::from_polar(1.0, t) - a)
        .collect();
    let logs = unwrapped_log(&circle)?;
    let mut it = logs.into_iter();
    PlanarCurve::from_map(
        m,
        move |_| it.next().unwrap(),
        |t| {
            let z = Complex64::from_polar(1.0, t);
            Complex64::new(0.0, 1.0) * z / (z - a)
        },
    )
}

/// Boundary conformal factor induced by pulling the flat metric back through
/// psi: e^{-2 phi} = |p|^2 on the circle, i.e. phi = -log |p(e^{i theta})|.
pub fn induced_conformal_factor(
    p: &OuterPolynomial,
    max_order: usize,
) -> Result<ConformalBoundaryFactor> {
    let grid = fft::good_len(4 * max_order + 6);
    let phi: Vec<f64> = grid_angles(grid)
        .into_iter()
        .map(|t| -p.abs_on_circle(t).ln())
        .collect();
    ConformalBoundaryFactor::from_samples(&phi, max_order)
}

/// The affine factor A with psi(circle) = A * log(. - c0)(circle) + const for a
/// degree-2 outer polynomial with distinct roots: A = 1/(lead e^{i omega} (a_rot - b_rot)).
pub fn reduced_affine_factor(p: &OuterPolynomial, red: &Case3Reduction) -> Complex64 {
    (p.leading() * Complex64::from_polar(1.0, red.rotation) * (red.a_rot - red.b_rot)).inv()
}

/// The reduced single-log curve sampled at the parameters aligned with
/// [`reconstruct`]'s curve: for each node theta the matching disc point is
/// zeta = mu^{-1}(e^{-i omega} e^{i theta}), and the reference point is
/// A * log(zeta - c0) up to one additive constant. Sample j of the result
/// corresponds to sample j of the reconstructed curve exactly, so sampled
/// Hausdorff distances between the two are free of polyline-resolution error.
pub fn reduced_reference_curve(
    p: &OuterPolynomial,
    red: &Case3Reduction,
    m: usize,
) -> Result<PlanarCurve> {
    let aff = reduced_affine_factor(p, red);
    let phase = Complex64::from_polar(1.0, -red.rotation);
    let b = Complex64::new(red.b_rot, 0.0);
    let zeta: Vec<Complex64> = grid_angles(m)
        .into_iter()
        .map(|t| {
            let w = phase * Complex64::from_polar(1.0, t);
            (Complex64::ONE - w * b) / (w - b) // mu^{-1}
        })
        .collect();
    let shifted: Vec<Complex64> = zeta.iter().map(|&z| z - red.reduced_center).collect();
    let logs = unwrapped_log(&shifted)?;
    let points: Vec<Complex64> = logs.into_iter().map(|u| u * aff).collect();
    // tangents by spectral differentiation of the sampled parametrization
    let curve = PlanarCurve::from_points(points)?;
    Ok(curve)
}
