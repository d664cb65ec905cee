//! The acceptance suite: one function per criterion, each returning a
//! structured pass/fail result with the measured numbers.
//!
//! Tolerances are pinned here. Strictly-positive non-commutation levels are
//! regression constants measured once by this implementation and frozen with
//! a factor-3 band; the inequalities against the commuting baselines are the
//! primary assertions.

use crate::atlas;
use crate::curve;
use crate::cylinder::{self, CylinderSpec};
use crate::disc::{self, ConformalBoundaryFactor};
use crate::fejer_riesz::{self, LaurentSymmetricPoly, OuterPolynomial};
use crate::fourier::grid_angles;
use crate::obstruction;
use crate::oracle::{self, ChargeLayout, DomainSpec};
use crate::tol;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::time::Instant;

/// Frozen regression constants (non-commutation levels measured by this
/// implementation at the stated discretizations).
pub mod regression {
    /// Oracle commutator, ellipse with semi-axes (2, 1), M = 512, n_max = 16.
    pub const ELLIPSE_REL: f64 = 3.72e-4;
    /// Oracle commutator, smoothed square, M = 512, n_max = 16.
    pub const SQUARE_REL: f64 = 1.31e-3;
    /// Cylinder commutator, phi0 = 0.1 cos theta, H = 1, (N, W) = (128, 32).
    pub const CYLINDER_PERTURBED_REL: f64 = 1.12e-5;
    /// Disc commutator norms for e^{-2phi} = |z-2|^2 + 0.1 cos(k theta),
    /// k = 3, 4, 5 at (N, W) = (256, 64).
    pub const DISC_PERTURBED_NORMS: [f64; 3] = [4.472136e-1, 1.341641e0, 3.0];
    /// Band factor allowed around a frozen order-of-magnitude value.
    pub const BAND: f64 = 3.0;
    /// Relative band around a frozen deterministic norm.
    pub const NORM_BAND: f64 = 1e-2;
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub runtime_s: f64,
}

impl CriterionResult {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
            "runtime_s": self.runtime_s,
        })
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.runtime_s
        )
    }
}

struct Check {
    passed: bool,
    details: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { passed: true, details: Vec::new() }
    }

    fn assert(&mut self, cond: bool, msg: String) {
        if !cond {
            self.passed = false;
            self.details.push(format!("FAIL: {msg}"));
        }
    }

    fn note(&mut self, msg: String) {
        self.details.push(msg);
    }
}

fn finish(id: usize, name: &'static str, start: Instant, check: Check) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed: check.passed,
        details: check.details,
        runtime_s: start.elapsed().as_secs_f64(),
    }
}

fn random_outer_roots(rng: &mut ChaCha8Rng, degree: usize, min_r: f64, max_r: f64) -> Vec<Complex64> {
    (0..degree)
        .map(|_| {
            Complex64::from_polar(
                rng.random_range(min_r..=max_r),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect()
}

/// 1. Exact bracket identity on |n|, |k| <= 50.
pub fn criterion_1_bracket(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let mut worst: Option<(i64, i64)> = None;
    for n in -50i64..=50 {
        for k in -50i64..=50 {
            let b = disc::bracket(n, k);
            let vacuous = (n >= 0 && k <= n) || (n <= 0 && k >= n);
            let expect = if vacuous {
                0
            } else {
                let (n_, k_) = (n as i128, k as i128);
                -n_.abs() * (k_ - n_) * (k_ - 2 * n_)
            };
            if b.vacuous != vacuous || b.value != expect {
                worst = Some((n, k));
            }
        }
    }
    check.assert(worst.is_none(), format!("bracket mismatch at {worst:?}"));
    check.note(
        "bracket equals -|n|(k-n)(k-2n) on the non-vacuous cone and 0 on the vacuous cone, \
         in exact integer arithmetic"
            .into(),
    );
    finish(1, "bracket identity (exact)", start, check)
}

/// 2. Forward direction: induced factors of random outer polynomials of
/// degree <= 2 commute at (256, 64) and refine cleanly to 512.
pub fn criterion_2_forward(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    let mut worst_low = 0.0f64;
    let mut worst_high = 0.0f64;
    for trial in 0..50 {
        let degree = match rng.random_range(0..10) {
            0 => 0,
            1..=4 => 1,
            _ => 2,
        };
        let p = if degree == 0 {
            OuterPolynomial::constant(rng.random_range(0.5..2.0)).unwrap()
        } else {
            let roots = random_outer_roots(&mut rng, degree, 1.2, 5.0);
            OuterPolynomial::from_roots(&roots, Complex64::new(rng.random_range(0.5..2.0), 0.0))
                .unwrap()
        };
        let factor = match atlas::induced_conformal_factor(&p, 512) {
            Ok(f) => f,
            Err(e) => {
                check.assert(false, format!("trial {trial}: factor construction failed: {e}"));
                continue;
            }
        };
        let low = disc::commutator_window_disc(&factor, 256, 64).unwrap();
        let high = disc::commutator_window_disc(&factor, 512, 64).unwrap();
        let (rl, rh) = (low.relative(), high.relative());
        worst_low = worst_low.max(rl);
        worst_high = worst_high.max(rh);
        check.assert(
            rl <= 1e-8,
            format!("trial {trial} (deg {degree}): relative norm {rl:.3e} at (256,64)"),
        );
        check.assert(
            rh <= rl || rh <= tol::COMMUTATOR_FLOOR_REL,
            format!("trial {trial}: refinement {rl:.3e} -> {rh:.3e} neither decreased nor at floor"),
        );
    }
    check.note(format!(
        "50 factors: worst relative commutator {worst_low:.3e} at (256,64), {worst_high:.3e} at (512,64)"
    ));
    finish(2, "exact-criterion forward direction (disc)", start, check)
}

/// 3. Reverse direction: a cos(k theta) perturbation of the symbol produces a
/// commutator three orders above the unperturbed run, stable under N -> 2N.
pub fn criterion_3_reverse(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let grid = 4096;
    let base_phi: Vec<f64> = grid_angles(grid)
        .into_iter()
        .map(|t| {
            let z = Complex64::new(t.cos() - 2.0, t.sin());
            -z.norm().ln()
        })
        .collect();
    let base_factor = ConformalBoundaryFactor::from_samples(&base_phi, 512).unwrap();
    let base_low = disc::commutator_window_disc(&base_factor, 256, 64).unwrap();
    check.note(format!("unperturbed norm {:.3e} (rel {:.3e})", base_low.norm, base_low.relative()));
    for (i, k) in [3usize, 4, 5].into_iter().enumerate() {
        let phi: Vec<f64> = grid_angles(grid)
            .into_iter()
            .map(|t| {
                let z = Complex64::new(t.cos() - 2.0, t.sin());
                -0.5 * (z.norm_sqr() + 0.1 * (k as f64 * t).cos()).ln()
            })
            .collect();
        let factor = ConformalBoundaryFactor::from_samples(&phi, 512).unwrap();
        let low = disc::commutator_window_disc(&factor, 256, 64).unwrap();
        let high = disc::commutator_window_disc(&factor, 512, 64).unwrap();
        check.assert(
            low.norm >= 1e3 * base_low.norm.max(1e-300),
            format!("k={k}: perturbed norm {:.3e} not >= 1e3 x base {:.3e}", low.norm, base_low.norm),
        );
        check.assert(
            (high.norm - low.norm).abs() <= 0.1 * low.norm,
            format!("k={k}: norm drifted {:.3e} -> {:.3e} under refinement", low.norm, high.norm),
        );
        let frozen = regression::DISC_PERTURBED_NORMS[i];
        check.assert(
            (low.norm - frozen).abs() <= regression::NORM_BAND * frozen,
            format!("k={k}: norm {:.6e} left the frozen regression value {frozen:.6e}", low.norm),
        );
        check.note(format!(
            "k={k}: norm {:.6e} (rel {:.3e}), refined {:.6e}, frozen {frozen:.6e}",
            low.norm,
            low.relative(),
            high.norm
        ));
    }
    finish(3, "exact-criterion reverse direction (disc)", start, check)
}

/// 4. Fejér–Riesz roundtrip on random outer polynomials of degree <= 8 plus
/// loud rejection of boundary roots.
pub fn criterion_4_fejer_riesz(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let degree = rng.random_range(1..=8usize);
        let roots = random_outer_roots(&mut rng, degree, 1.1, 5.0);
        let lead = Complex64::new(rng.random_range(0.2..2.0), 0.0);
        let p = OuterPolynomial::from_roots(&roots, lead).unwrap();
        let w = p.abs_squared_symbol();
        match fejer_riesz::factorize(&w, tol::TOL_CIRCLE) {
            Ok(phat) => {
                let mut max_w = 0.0f64;
                let mut err = 0.0f64;
                for theta in grid_angles(512) {
                    max_w = max_w.max(w.eval(theta).abs());
                    err = err.max((phat.abs_on_circle(theta) - p.abs_on_circle(theta)).abs());
                }
                worst = worst.max(err / max_w);
                check.assert(
                    err <= 1e-10 * max_w,
                    format!("trial {trial} (deg {degree}): roundtrip error {err:.3e} vs max {max_w:.3e}"),
                );
            }
            Err(e) => check.assert(false, format!("trial {trial}: factorization failed: {e}")),
        }
    }
    check.note(format!("100 roundtrips: worst relative modulus error {worst:.3e}"));
    for radius in [1.0 + 1e-8, 1.0 - 1e-8] {
        let root = Complex64::new(radius, 0.0);
        // symbol of |z - r|^2 built by exact convolution
        let w = LaurentSymmetricPoly::new(vec![-root.conj(), Complex64::new(radius * radius + 1.0, 0.0), -root])
            .unwrap();
        let res = fejer_riesz::factorize(&w, tol::TOL_CIRCLE);
        let rejected = matches!(
            res,
            Err(crate::Error::BoundaryRoot { .. }) | Err(crate::Error::Positivity { .. })
        );
        check.assert(rejected, format!("root radius {radius} was not rejected: {res:?}"));
    }
    finish(4, "Fejér–Riesz roundtrip and boundary-root rejection", start, check)
}

/// 5. Classification loop: the shifted-cosine symbol reconstructs the a = 2
/// logarithmic oval, and the (3, 2) two-root case matches its reduced
/// single-log curve after gauge alignment.
pub fn criterion_5_classification(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let w = LaurentSymmetricPoly::from_interleaved_real(&[5.0, -2.0, -2.0]).unwrap();
    match fejer_riesz::factorize(&w, tol::TOL_CIRCLE) {
        Ok(p) => match atlas::reconstruct(&p, 512) {
            Ok(r) => {
                check.assert(
                    r.case == atlas::CaseTag::LogOval,
                    format!("expected log_oval, got {}", r.case.as_str()),
                );
                if let Some(a) = r.oval_param {
                    check.assert((a - 2.0).abs() <= 1e-8, format!("oval parameter {a} != 2"));
                    check.note(format!("oval parameter recovered as {a:.12}"));
                }
            }
            Err(e) => check.assert(false, format!("reconstruct failed: {e}")),
        },
        Err(e) => check.assert(false, format!("factorize failed: {e}")),
    }
    let p = OuterPolynomial::from_roots(
        &[Complex64::new(3.0, 0.0), Complex64::new(2.0, 0.0)],
        Complex64::ONE,
    )
    .unwrap();
    match atlas::reconstruct(&p, 512) {
        Ok(r) => {
            check.assert(r.case == atlas::CaseTag::TwoLogReduced, "case mismatch".into());
            let red = r.reduction.as_ref().unwrap();
            check.assert(
                (red.canonical_param - 5.0).abs() < 1e-10,
                format!("reduced parameter {} != 5", red.canonical_param),
            );
            let reference = atlas::reduced_reference_curve(&p, red, 512).unwrap();
            let aligned =
                reference.affine(Complex64::ONE, r.curve.centroid() - reference.centroid());
            let d = r.curve.hausdorff(&aligned);
            let diam = r.curve.diameter();
            check.assert(
                d <= 1e-8 * diam,
                format!("Hausdorff {d:.3e} vs 1e-8 x diameter {diam:.3e}"),
            );
            check.note(format!("(3,2) reduces to oval parameter 5; Hausdorff {d:.3e}, diameter {diam:.3e}"));
        }
        Err(e) => check.assert(false, format!("reconstruct failed: {e}")),
    }
    finish(5, "classification loop (factorize -> reconstruct)", start, check)
}

fn oracle_commutator(domain: &DomainSpec, n_max: usize) -> crate::Result<oracle::OracleCommutator> {
    let layout = ChargeLayout::build(domain, tol::MFS_OFFSET)?;
    oracle::commutator_norm_oracle(domain, &layout, n_max, tol::SVD_CUTOFF)
}

/// 6. Oracle corroboration: discs and logarithmic ovals commute at solver
/// accuracy; an ellipse and a smoothed square do not.
///
/// The disc's measured commutator sits at machine zero (discrete rotational
/// symmetry cancels the solver error structurally), so the comparison
/// baseline for the ovals is the disc's solver-certified level: the larger of
/// its measured relative commutator and its worst boundary residual.
pub fn criterion_6_oracle(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let m = 512;
    let n_max = 16;
    let disc_domain =
        DomainSpec::new(curve::circle(Complex64::ZERO, 1.0, m).unwrap(), vec![]).unwrap();
    let disc = match oracle_commutator(&disc_domain, n_max) {
        Ok(v) => v,
        Err(e) => {
            check.assert(false, format!("disc oracle failed: {e}"));
            return finish(6, "oracle corroboration of the planar classification", start, check);
        }
    };
    let disc_rel = disc.relative();
    let baseline = disc_rel.max(disc.worst_residual);
    check.assert(disc_rel <= 1e-6, format!("disc relative commutator {disc_rel:.3e} > 1e-6"));
    check.note(format!(
        "disc relative commutator {disc_rel:.3e}; solver-certified baseline {baseline:.3e}"
    ));
    for a in [1.5, 2.0, 5.0] {
        let oval = DomainSpec::new(atlas::log_oval_boundary(a, m).unwrap(), vec![]).unwrap();
        match oracle_commutator(&oval, n_max) {
            Ok(c) => {
                let rel = c.relative();
                check.assert(
                    rel <= 10.0 * baseline,
                    format!("oval a={a}: relative {rel:.3e} > 10 x baseline {baseline:.3e}"),
                );
                check.note(format!("oval a={a}: relative {rel:.3e}"));
            }
            Err(e) => check.assert(false, format!("oval a={a} oracle failed: {e}")),
        }
    }
    let ellipse = DomainSpec::new(curve::ellipse(2.0, 1.0, m).unwrap(), vec![]).unwrap();
    let square = DomainSpec::new(curve::smoothed_square(0.1, m).unwrap(), vec![]).unwrap();
    for (name, domain, frozen) in [
        ("ellipse(2:1)", &ellipse, regression::ELLIPSE_REL),
        ("smoothed square", &square, regression::SQUARE_REL),
    ] {
        match oracle_commutator(domain, n_max) {
            Ok(c) => {
                let rel = c.relative();
                check.assert(
                    rel >= 100.0 * baseline,
                    format!("{name}: relative {rel:.3e} not >= 100 x baseline {baseline:.3e}"),
                );
                check.assert(
                    rel >= frozen / regression::BAND && rel <= frozen * regression::BAND,
                    format!("{name}: relative {rel:.3e} outside frozen band around {frozen:.3e}"),
                );
                check.note(format!("{name}: relative {rel:.3e} (frozen {frozen:.3e})"));
            }
            Err(e) => check.assert(false, format!("{name} oracle failed: {e}")),
        }
    }
    finish(6, "oracle corroboration of the planar classification", start, check)
}

/// 7. Oracle/spectral cross-validation on the a = 2 logarithmic oval.
pub fn criterion_7_cross_validation(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let m = 512;
    let n_max = 16;
    let oval_curve = atlas::log_oval_boundary(2.0, m).unwrap();
    let domain = DomainSpec::new(oval_curve, vec![]).unwrap();
    let layout = ChargeLayout::build(&domain, tol::MFS_OFFSET).unwrap();
    match oracle::dtn_matrix(&domain, &layout, n_max, tol::SVD_CUTOFF) {
        Ok(sampled) => {
            let from_oracle = sampled.to_frequency_operator().unwrap();
            let phi: Vec<f64> = grid_angles(2048)
                .into_iter()
                .map(|t| {
                    let z = Complex64::new(t.cos() - 2.0, t.sin());
                    -z.norm().ln()
                })
                .collect();
            let factor = ConformalBoundaryFactor::from_samples(&phi, 64).unwrap();
            let spectral = disc::dtn_conformal_disc(&factor, 64).unwrap();
            let mut diff_sq = 0.0;
            let mut scale_sq = 0.0;
            for k in -(n_max as i64)..=(n_max as i64) {
                for n in -(n_max as i64)..=(n_max as i64) {
                    diff_sq += (from_oracle.at(k, n) - spectral.at(k, n)).norm_sqr();
                    scale_sq += spectral.at(k, n).norm_sqr();
                }
            }
            let rel = (diff_sq / scale_sq).sqrt();
            check.assert(rel <= 1e-6, format!("window disagreement {rel:.3e} > 1e-6"));
            check.note(format!(
                "oracle DtN matches e^(-phi) Lambda_0 to {rel:.3e} on the window (worst residual {:.3e})",
                sampled.worst_residual
            ));
        }
        Err(e) => check.assert(false, format!("oracle DtN failed: {e}")),
    }
    finish(7, "oracle/spectral DtN cross-validation (log oval)", start, check)
}

/// 8. Cylinder: flat and equal-constant specs commute to rounding, a
/// perturbed circle does not, and the flat blocks match separation of
/// variables at H = 1.
pub fn criterion_8_cylinder(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let order = 128;
    let window = 32;
    let height = 1.0;

    let flat = CylinderSpec::flat(height, order).unwrap();
    let flat_c = cylinder::commutator_window_cylinder(&flat, order, window).unwrap();
    check.assert(
        flat_c.relative() <= 1e-12,
        format!("flat relative commutator {:.3e} > 1e-12", flat_c.relative()),
    );

    let constant = CylinderSpec::new(
        height,
        ConformalBoundaryFactor::constant(0.37, order).unwrap(),
        ConformalBoundaryFactor::constant(0.37, order).unwrap(),
    )
    .unwrap();
    let const_c = cylinder::commutator_window_cylinder(&constant, order, window).unwrap();
    check.assert(
        const_c.relative() <= 1e-12,
        format!("locally constant relative commutator {:.3e} > 1e-12", const_c.relative()),
    );
    check.note(format!(
        "flat rel {:.3e}; equal constants rel {:.3e}",
        flat_c.relative(),
        const_c.relative()
    ));

    let grid = 2048;
    let phi0: Vec<f64> = grid_angles(grid).into_iter().map(|t| 0.1 * t.cos()).collect();
    let perturbed = CylinderSpec::new(
        height,
        ConformalBoundaryFactor::from_samples(&phi0, order).unwrap(),
        ConformalBoundaryFactor::constant(0.0, order).unwrap(),
    )
    .unwrap();
    let pert_c = cylinder::commutator_window_cylinder(&perturbed, order, window).unwrap();
    check.assert(
        pert_c.norm >= 1e3 * flat_c.norm.max(1e-300) && pert_c.relative() >= 1e3 * flat_c.relative().max(1e-300),
        format!("perturbed norm {:.3e} not 1e3 above flat {:.3e}", pert_c.norm, flat_c.norm),
    );
    check.assert(
        pert_c.relative() >= regression::CYLINDER_PERTURBED_REL / regression::BAND
            && pert_c.relative() <= regression::CYLINDER_PERTURBED_REL * regression::BAND,
        format!(
            "perturbed relative {:.3e} outside frozen band around {:.3e}",
            pert_c.relative(),
            regression::CYLINDER_PERTURBED_REL
        ),
    );
    check.note(format!("perturbed (0.1 cos) rel {:.3e}", pert_c.relative()));

    // separation-of-variables blocks at H = 1
    let dtn = cylinder::flat_cylinder_dtn(height, 4).unwrap();
    let coth = 1.0 / height.tanh();
    let sinh_inv = 1.0 / height.sinh();
    let block_checks = [
        (dtn.at(0, 0, 0, 0).re, 1.0 / height, "n=0 same"),
        (dtn.at(0, 0, 1, 0).re, -1.0 / height, "n=0 cross"),
        (dtn.at(1, 0, 0, 0).re, -1.0 / height, "n=0 cross'"),
        (dtn.at(1, 0, 1, 0).re, 1.0 / height, "n=0 same'"),
        (dtn.at(0, 1, 0, 1).re, coth, "n=1 same"),
        (dtn.at(0, 1, 1, 1).re, -sinh_inv, "n=1 cross"),
        (dtn.at(0, -1, 0, -1).re, coth, "n=-1 same"),
    ];
    for (got, expect, label) in block_checks {
        check.assert(
            (got - expect).abs() <= 1e-12 * expect.abs(),
            format!("{label}: {got} vs {expect}"),
        );
    }
    finish(8, "cylinder operators and criterion", start, check)
}

/// 9. Obstruction table, verified by direct inequality evaluation.
pub fn criterion_9_obstruction(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let direct = |g: i64, k: i64| -> Option<u64> {
        (1..100_000i64).find(|&m| 2 - 2 * g + m * (k - 2) > k).map(|m| m as u64)
    };
    for g in 0..=6i64 {
        for k in 1..=8i64 {
            let got = obstruction::euler_min_violation(g as u64, k as u64);
            let expect = direct(g, k);
            check.assert(got == expect, format!("(g,k)=({g},{k}): {got:?} vs direct {expect:?}"));
        }
    }
    let table = [
        ((0u64, 3u64), Some(2u64)),
        ((1, 3), Some(4)),
        ((0, 4), Some(2)),
        ((0, 2), None),
        ((2, 5), Some(3)),
    ];
    for ((g, k), expect) in table {
        let got = obstruction::euler_min_violation(g, k);
        check.assert(got == expect, format!("(g,k)=({g},{k}): {got:?} vs {expect:?}"));
    }
    check.note(
        "spec criterion lists (0,4)->1 and (2,5)->2; direct evaluation of 2-2g+m(k-2) > k \
         (the criterion's own verification rule) gives 2 and 3, which the implementation \
         reproduces — see the decisions ledger"
            .into(),
    );
    finish(9, "Euler-characteristic obstruction table", start, check)
}

/// 10. Flat-disc spectral identity: the boundary Laplacian equals the square
/// of the DtN map.
pub fn criterion_10_flat_identity(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    for order in [16usize, 256] {
        let flat = ConformalBoundaryFactor::constant(0.0, order).unwrap();
        let lap = disc::boundary_laplacian_disc(&flat, order).unwrap();
        let dtn = disc::dtn_flat_disc(order);
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        let oi = order as i64;
        for k in -oi..=oi {
            for n in -oi..=oi {
                let d2 = dtn.at(k, k).norm_sqr(); // diagonal
                let expect = if k == n { Complex64::new(d2, 0.0) } else { Complex64::ZERO };
                diff = diff.max((lap.at(k, n) - expect).norm());
                scale = scale.max(expect.norm());
            }
        }
        check.assert(
            diff <= 1e-12 * scale,
            format!("order {order}: max deviation {diff:.3e} vs scale {scale:.3e}"),
        );
        check.note(format!("order {order}: max entry deviation {diff:.3e}"));
    }
    finish(10, "flat-disc identity: boundary Laplacian = DtN^2", start, check)
}

/// 11. Normalized logarithmic ovals converge to the unit circle as a grows.
pub fn criterion_11_oval_limit(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::new();
    let m = 1024;
    let unit = curve::circle(Complex64::ZERO, 1.0, m).unwrap();
    let mut last = f64::INFINITY;
    for a in [10.0, 100.0, 1000.0] {
        let oval = atlas::log_oval_boundary(a, m).unwrap();
        let shift = -Complex64::new(a.ln(), std::f64::consts::PI);
        let normalized = oval.affine(Complex64::new(a, 0.0), shift * a);
        let d = normalized.hausdorff(&unit);
        check.assert(d <= 5.0 / a, format!("a={a}: Hausdorff {d:.3e} > 5/a"));
        check.assert(d < last, format!("a={a}: distance {d:.3e} did not decrease from {last:.3e}"));
        check.note(format!("a={a}: normalized Hausdorff distance {d:.4e} (bound {:.1e})", 5.0 / a));
        last = d;
    }
    finish(11, "logarithmic ovals limit to the disc", start, check)
}

pub fn run_selected(ids: &[usize], seed: u64) -> Vec<CriterionResult> {
    let table: [(usize, fn(u64) -> CriterionResult); 11] = [
        (1, criterion_1_bracket),
        (2, criterion_2_forward),
        (3, criterion_3_reverse),
        (4, criterion_4_fejer_riesz),
        (5, criterion_5_classification),
        (6, criterion_6_oracle),
        (7, criterion_7_cross_validation),
        (8, criterion_8_cylinder),
        (9, criterion_9_obstruction),
        (10, criterion_10_flat_identity),
        (11, criterion_11_oval_limit),
    ];
    table
        .iter()
        .filter(|(id, _)| ids.contains(id))
        .map(|(_, f)| f(seed))
        .collect()
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    run_selected(&(1..=11).collect::<Vec<_>>(), seed)
}

/// Summary report over a set of criterion results.
pub fn summary_json(results: &[CriterionResult], seed: u64) -> Value {
    json!({
        "seed": seed,
        "total": results.len(),
        "passed": results.iter().filter(|r| r.passed).count(),
        "all_passed": results.iter().all(|r| r.passed),
        "criteria": results.iter().map(CriterionResult::to_json).collect::<Vec<_>>(),
    })
}
