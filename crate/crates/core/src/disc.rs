//! Dirichlet-to-Neumann map, boundary Laplacian, and their commutator on a
//! conformally flat disc, assembled in the truncated Fourier basis.
//!
//! With boundary conformal factor phi, the operators are
//!   Lambda_phi = e^{-phi} Lambda_0,           Lambda_0 = |n| on mode n,
//!   Delta_phi  = -e^{-2phi} (d^2/dtheta^2 - phi' d/dtheta),
//! and the commutator [Delta_phi, Lambda_phi] vanishes exactly when the
//! Fourier coefficients of e^{-2phi} vanish for |k| >= 3.

use crate::error::{Error, Result};
use crate::fft;
use crate::fourier::BoundarySignal;
use crate::operator::{ColsMat, FrequencyOperator, ToeplitzKernel};
use crate::tol;
use num_complex::Complex64;

/// Boundary trace of a log-conformal factor phi together with the derived
/// signals e^{-phi}, e^{-2phi} and phi' that the operator assemblies consume.
///
/// phi is taken pointwise on the grid; the exponentials are computed pointwise
/// and then analyzed, never by coefficient-domain exponentiation.
#[derive(Debug, Clone)]
pub struct ConformalBoundaryFactor {
    phi: BoundarySignal,
    exp_minus_phi: BoundarySignal,
    exp_minus_2phi: BoundarySignal,
    phi_prime: BoundarySignal,
    max_order: usize,
    grid: usize,
}

impl ConformalBoundaryFactor {
    /// Build from phi samples on an equispaced grid. `max_order` is the largest
    /// operator truncation order the factor will be used at; the derived
    /// signals are analyzed on an alias-safe internal grid, which doubles until
    /// the cached exponentials reproduce the pointwise values to CACHE_REL
    /// (the exponential widens the spectrum of phi by an amount the operator
    /// order alone does not determine).
    pub fn from_samples(phi_samples: &[f64], max_order: usize) -> Result<Self> {
        if max_order == 0 || max_order > tol::MAX_ORDER {
            return Err(Error::Parameter(format!(
                "operator order must be in 1..={}, got {max_order}",
                tol::MAX_ORDER
            )));
        }
        let m0 = phi_samples.len();
        if m0 < 4 {
            return Err(Error::Parameter("need at least 4 phi samples".into()));
        }
        // band-limited interpolant of the given samples is the working truth
        let order0 = (m0 - 2) / 2;
        let base = BoundarySignal::analyze(phi_samples, order0)?;
        Self::from_base_signal(&base, max_order, m0)
    }

    /// Build from an existing signal.
    pub fn from_signal(phi: &BoundarySignal, max_order: usize) -> Result<Self> {
        Self::from_base_signal(phi, max_order, 2 * phi.order() + 2)
    }

    /// Constant factor phi == c.
    pub fn constant(c: f64, max_order: usize) -> Result<Self> {
        let grid = fft::good_len(4 * max_order + 6);
        Self::from_resolved_values(&vec![c; grid], max_order, grid)
    }

    fn from_base_signal(base: &BoundarySignal, max_order: usize, min_grid: usize) -> Result<Self> {
        const GRID_CAP: usize = 1 << 17;
        let mut grid = fft::good_len((4 * max_order + 6).max(min_grid));
        loop {
            let phi_vals = base.synthesize_grid(grid)?;
            match Self::from_resolved_values(&phi_vals, max_order, grid) {
                Ok(factor) => return Ok(factor),
                Err(e @ (Error::CacheConsistency { .. } | Error::MetricPositivity { .. })) => {
                    if grid >= GRID_CAP {
                        return Err(e);
                    }
                    grid *= 2;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn from_resolved_values(phi_vals: &[f64], max_order: usize, grid: usize) -> Result<Self> {
        let sig_order = grid / 2 - 1;
        let e1: Vec<f64> = phi_vals.iter().map(|&p| (-p).exp()).collect();
        let e2: Vec<f64> = phi_vals.iter().map(|&p| (-2.0 * p).exp()).collect();
        let phi = BoundarySignal::analyze(phi_vals, sig_order)?;
        let exp_minus_phi = BoundarySignal::analyze(&e1, sig_order)?;
        let exp_minus_2phi = BoundarySignal::analyze(&e2, sig_order)?;
        let phi_prime = phi.derivative();

        // metric positivity on the grid
        let e2_synth = exp_minus_2phi.synthesize_grid(grid)?;
        let min_value = e2_synth.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_value <= 0.0 {
            return Err(Error::MetricPositivity { min_value });
        }
        // cached signals must agree with the pointwise exponentials; deviation
        // is measured relative to each signal's scale, matching the module's
        // zero-test convention
        let e1_synth = exp_minus_phi.synthesize_grid(grid)?;
        let scale1 = e1.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
        let scale2 = e2.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
        let mut max_rel_dev = 0.0f64;
        for j in 0..grid {
            let d1 = (e1_synth[j] - e1[j]).abs() / scale1;
            let d2 = (e2_synth[j] - e2[j]).abs() / scale2;
            max_rel_dev = max_rel_dev.max(d1).max(d2);
        }
        if max_rel_dev > tol::CACHE_REL {
            return Err(Error::CacheConsistency { max_rel_dev });
        }
        Ok(Self { phi, exp_minus_phi, exp_minus_2phi, phi_prime, max_order, grid })
    }

    pub fn phi(&self) -> &BoundarySignal {
        &self.phi
    }

    pub fn exp_minus_phi(&self) -> &BoundarySignal {
        &self.exp_minus_phi
    }

    pub fn exp_minus_2phi(&self) -> &BoundarySignal {
        &self.exp_minus_2phi
    }

    pub fn phi_prime(&self) -> &BoundarySignal {
        &self.phi_prime
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Induced boundary length of the metric e^{2 phi} g0: integral of e^{phi}.
    pub fn induced_length(&self) -> f64 {
        let vals = self.phi.synthesize_grid(self.grid).expect("validated signal");
        let mean: f64 = vals.iter().map(|&p| p.exp()).sum::<f64>() / self.grid as f64;
        std::f64::consts::TAU * mean
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order == 0 || order > self.max_order {
            return Err(Error::Window { window: order, order: self.max_order, limit: self.max_order });
        }
        Ok(())
    }
}

/// Dirichlet-to-Neumann map of the flat unit disc: diagonal |n|.
pub fn dtn_flat_disc(order: usize) -> FrequencyOperator {
    FrequencyOperator::diagonal(order, |n| Complex64::new(n.unsigned_abs() as f64, 0.0))
}

/// Pointwise multiplication by f as a Toeplitz matrix on the truncated basis.
pub fn multiplication_operator(f: &BoundarySignal, order: usize) -> FrequencyOperator {
    FrequencyOperator::toeplitz(order, |j| f.coeff(j))
}

/// Lambda_phi = (multiplication by e^{-phi}) o Lambda_0.
pub fn dtn_conformal_disc(factor: &ConformalBoundaryFactor, order: usize) -> Result<FrequencyOperator> {
    factor.check_order(order)?;
    let e1 = factor.exp_minus_phi();
    Ok(FrequencyOperator::from_fn(order, |k, n| {
        e1.coeff(k - n) * n.unsigned_abs() as f64
    }))
}

/// Fill the columns |j| <= col_order of K = -(D^2 - M_{phi'} D), where D is the
/// diagonal multiplier in: K(m, j) = m^2 delta_{mj} + i j c_{phi'}(m - j).
fn k_cols(phi_prime: &BoundarySignal, row_order: usize, col_order: usize) -> ColsMat {
    ColsMat::from_fn(row_order, col_order, |m, j| {
        let mut v = phi_prime.coeff(m - j) * Complex64::new(0.0, j as f64);
        if m == j {
            v += Complex64::new((m * m) as f64, 0.0);
        }
        v
    })
}

/// Apply K = -(D^2 - M_{phi'} D) to a block of columns at row order `order`.
fn k_apply(phi_prime: &BoundarySignal, x: &ColsMat, order: usize) -> ColsMat {
    let mut dx = x.clone();
    dx.row_scale(|m| Complex64::new(0.0, m as f64));
    let engine = ToeplitzKernel::from_signal(phi_prime, order, order);
    let mut out = engine.apply(&dx);
    let mut sq = x.clone();
    sq.row_scale(|m| Complex64::new((m * m) as f64, 0.0));
    out.add_assign(&sq);
    out
}

/// Boundary Laplacian of the metric e^{2 phi} g0 on the circle:
/// -M_{e^{-2phi}} (D^2 - M_{phi'} D), assembled dense at the given order.
pub fn boundary_laplacian_disc(
    factor: &ConformalBoundaryFactor,
    order: usize,
) -> Result<FrequencyOperator> {
    factor.check_order(order)?;
    let cols = k_cols(factor.phi_prime(), order, order);
    let engine = ToeplitzKernel::from_signal(factor.exp_minus_2phi(), order, order);
    Ok(engine.apply(&cols).into_operator())
}

/// Windowed commutator of the boundary Laplacian and the DtN map, with the
/// scale of the windowed products for relative comparisons.
#[derive(Debug, Clone)]
pub struct CommutatorWindow {
    pub block: FrequencyOperator,
    pub norm: f64,
    pub scale: f64,
}

impl CommutatorWindow {
    pub fn relative(&self) -> f64 {
        self.norm / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Assemble C = [Delta_phi, Lambda_phi] at truncation order `order` and return
/// its block restricted to |k|, |n| <= window. Windowing discards the
/// truncation edge artifacts; the window may not exceed order/2.
///
/// The block is evaluated by reassociating the truncated matrix products into
/// Toeplitz convolutions, which yields the same entries as a dense assembly.
pub fn commutator_window_disc(
    factor: &ConformalBoundaryFactor,
    order: usize,
    window: usize,
) -> Result<CommutatorWindow> {
    factor.check_order(order)?;
    if window == 0 || window > order / 2 {
        return Err(Error::Window { window, order, limit: order / 2 });
    }
    let e1 = factor.exp_minus_phi();
    let e2 = factor.exp_minus_2phi();
    let dphi = factor.phi_prime();

    // (Delta Lambda)[win] = M_{e2}[win,:] (K (Lambda[:,win]))
    let lambda_cols = ColsMat::from_fn(order, window, |m, j| {
        e1.coeff(m - j) * j.unsigned_abs() as f64
    });
    let k_lambda = k_apply(dphi, &lambda_cols, order);
    let t1 = ToeplitzKernel::from_signal(e2, order, window).apply(&k_lambda);

    // (Lambda Delta)[win] = M_{e1}[win,:] (|m| . (M_{e2} K[:,win]))
    let kc = k_cols(dphi, order, window);
    let mut delta_cols = ToeplitzKernel::from_signal(e2, order, order).apply(&kc);
    delta_cols.row_scale(|m| Complex64::new(m.unsigned_abs() as f64, 0.0));
    let t2 = ToeplitzKernel::from_signal(e1, order, window).apply(&delta_cols);

    let scale = t1.frobenius().max(t2.frobenius());
    let mut block = t1;
    block.sub_assign(&t2);
    let norm = block.frobenius();
    Ok(CommutatorWindow { block: block.into_operator(), norm, scale })
}

/// Windowed Frobenius norm of [Delta_phi, Lambda_phi].
pub fn commutator_norm_disc(
    factor: &ConformalBoundaryFactor,
    order: usize,
    window: usize,
) -> Result<f64> {
    Ok(commutator_window_disc(factor, order, window)?.norm)
}

/// Exact-criterion residual: max |c_{e^{-2phi}}(k)| over |k| >= 3. The
/// commutator vanishes exactly when this is zero.
pub fn criterion_residual(factor: &ConformalBoundaryFactor) -> f64 {
    factor.exp_minus_2phi().tail_max(3).expect("factor band always exceeds 3")
}

/// Commutator verdict by refinement: relative windowed norms at the given
/// order and at twice the order must both sit below the tolerance, and the
/// refined norm must not grow (beyond the rounding floor).
#[derive(Debug, Clone)]
pub struct RefinementVerdict {
    pub norm_low: f64,
    pub norm_high: f64,
    pub rel_low: f64,
    pub rel_high: f64,
    pub commuting: bool,
}

pub fn refinement_verdict_disc(
    factor: &ConformalBoundaryFactor,
    order: usize,
    window: usize,
    rel_tol: f64,
) -> Result<RefinementVerdict> {
    let low = commutator_window_disc(factor, order, window)?;
    let high = commutator_window_disc(factor, 2 * order, window)?;
    let (rel_low, rel_high) = (low.relative(), high.relative());
    let commuting = rel_low <= rel_tol
        && rel_high <= rel_tol
        && (rel_high <= rel_low || rel_high <= tol::COMMUTATOR_FLOOR_REL);
    Ok(RefinementVerdict { norm_low: low.norm, norm_high: high.norm, rel_low, rel_high, commuting })
}

/// Exact coefficient bracket from the mode-by-mode expansion of the
/// commutator:
///
///   B(n, k) = |n| (-k^2/2 + 3kn/2 - n^2) - |k - n| (-n^2 + nk/2),
///
/// evaluated in integer arithmetic (the value is always an integer). The
/// statement "B(n,k) * c(k) = 0" is vacuous when (n >= 0 and k <= n) or
/// (n <= 0 and k >= n), where B vanishes identically; on the complementary
/// cone B(n, k) = -|n| (k - n)(k - 2n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketValue {
    pub value: i128,
    pub vacuous: bool,
}

pub fn bracket(n: i64, k: i64) -> BracketValue {
    let (n, k) = (n as i128, k as i128);
    // doubled to stay in integers; the half-integer terms cancel pairwise
    let doubled = n.abs() * (-k * k + 3 * k * n - 2 * n * n) - (k - n).abs() * (-2 * n * n + n * k);
    debug_assert_eq!(doubled % 2, 0);
    let vacuous = (n >= 0 && k <= n) || (n <= 0 && k >= n);
    BracketValue { value: doubled / 2, vacuous }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::grid_angles;

    fn oval_factor(a: f64, max_order: usize) -> ConformalBoundaryFactor {
        // sample densely enough to resolve phi itself, independently of the
        // operator order
        let m = fft::good_len(4 * max_order + 6).max(2048);
        let phi: Vec<f64> = grid_angles(m)
            .into_iter()
            .map(|t| {
                let z = Complex64::new(t.cos() - a, t.sin());
                -z.norm().ln()
            })
            .collect();
        ConformalBoundaryFactor::from_samples(&phi, max_order).unwrap()
    }

    #[test]
    fn dtn_flat_examples() {
        let op = dtn_flat_disc(2);
        for (n, expect) in [(-2i64, 2.0), (-1, 1.0), (0, 0.0), (1, 1.0), (2, 2.0)] {
            assert_eq!(op.at(n, n), Complex64::new(expect, 0.0));
        }
        // action on a constant vanishes; on cos 3theta it multiplies by 3
        let op3 = dtn_flat_disc(3);
        let mut constant = vec![Complex64::ZERO; 7];
        constant[3] = Complex64::ONE;
        assert!(op3.apply(&constant).iter().all(|c| c.norm() < 1e-15));
        let mut cos3 = vec![Complex64::ZERO; 7];
        cos3[0] = Complex64::new(0.5, 0.0);
        cos3[6] = Complex64::new(0.5, 0.0);
        let out = op3.apply(&cos3);
        assert!((out[0] - Complex64::new(1.5, 0.0)).norm() < 1e-15);
        assert!((out[6] - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn multiplication_operator_examples() {
        let m = 64;
        let one = BoundarySignal::constant(1.0, m);
        let id = multiplication_operator(&one, 3);
        for k in -3i64..=3 {
            for n in -3i64..=3 {
                let expect = if k == n { Complex64::ONE } else { Complex64::ZERO };
                assert!((id.at(k, n) - expect).norm() < 1e-15);
            }
        }
        // cos theta acting on the constant mode spreads to modes +-1 with weight 1/2
        let cos = BoundarySignal::analyze(
            &grid_angles(m).iter().map(|t| t.cos()).collect::<Vec<_>>(),
            2,
        )
        .unwrap();
        let op = multiplication_operator(&cos, 2);
        let mut e0 = vec![Complex64::ZERO; 5];
        e0[2] = Complex64::ONE;
        let out = op.apply(&e0);
        assert!((out[1] - Complex64::new(0.5, 0.0)).norm() < 1e-13);
        assert!((out[3] - Complex64::new(0.5, 0.0)).norm() < 1e-13);

        let f = BoundarySignal::analyze(
            &grid_angles(m).iter().map(|t| 5.0 - 4.0 * t.cos()).collect::<Vec<_>>(),
            3,
        )
        .unwrap();
        let op = multiplication_operator(&f, 3);
        for k in -3i64..=3 {
            for n in -3i64..=3 {
                let expect = match k - n {
                    0 => 5.0,
                    1 | -1 => -2.0,
                    _ => 0.0,
                };
                assert!((op.at(k, n) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dtn_conformal_flat_and_constant() {
        let flat = ConformalBoundaryFactor::constant(0.0, 8).unwrap();
        let op = dtn_conformal_disc(&flat, 8).unwrap();
        let reference = dtn_flat_disc(8);
        for k in -8i64..=8 {
            for n in -8i64..=8 {
                assert!((op.at(k, n) - reference.at(k, n)).norm() < 1e-12);
            }
        }
        let half = ConformalBoundaryFactor::constant(2.0f64.ln(), 8).unwrap();
        let op = dtn_conformal_disc(&half, 8).unwrap();
        for n in -8i64..=8 {
            let expect = 0.5 * n.unsigned_abs() as f64;
            assert!((op.at(n, n) - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dtn_conformal_oval_action_matches_pointwise_oracle() {
        // phi = -log|e^{i theta} - 2|: Lambda_phi e^{i theta} should have the
        // coefficients of |e^{i theta} - 2| e^{i theta}.
        let order = 16;
        let factor = oval_factor(2.0, order);
        let op = dtn_conformal_disc(&factor, order).unwrap();
        let dim = 2 * order + 1;
        let mut e1 = vec![Complex64::ZERO; dim];
        e1[order + 1] = Complex64::ONE;
        let out = op.apply(&e1);
        // oracle: pointwise evaluation and quadrature at high resolution
        let m = 512;
        for k in -(order as i64)..=(order as i64) {
            let mut acc = Complex64::ZERO;
            for t in grid_angles(m) {
                let z = Complex64::new(t.cos() - 2.0, t.sin());
                let val = z.norm() * Complex64::new(0.0, t).exp();
                acc += val * Complex64::new(0.0, -(k as f64) * t).exp();
            }
            acc /= m as f64;
            let got = out[(k + order as i64) as usize];
            assert!((got - acc).norm() < 1e-10, "k={k} got={got} oracle={acc}");
        }
    }

    #[test]
    fn boundary_laplacian_flat_and_constant() {
        let flat = ConformalBoundaryFactor::constant(0.0, 8).unwrap();
        let lap = boundary_laplacian_disc(&flat, 8).unwrap();
        for k in -8i64..=8 {
            for n in -8i64..=8 {
                let expect = if k == n { (n * n) as f64 } else { 0.0 };
                assert!((lap.at(k, n) - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
        let c = 0.35;
        let scaled = ConformalBoundaryFactor::constant(c, 8).unwrap();
        let lap = boundary_laplacian_disc(&scaled, 8).unwrap();
        for n in -8i64..=8 {
            let expect = (-2.0 * c).exp() * (n * n) as f64;
            assert!((lap.at(n, n) - Complex64::new(expect, 0.0)).norm() < 1e-10);
        }
        // kills constants for any phi
        let oval = oval_factor(1.5, 8);
        let lap = boundary_laplacian_disc(&oval, 8).unwrap();
        let mut e0 = vec![Complex64::ZERO; 17];
        e0[8] = Complex64::ONE;
        let out = lap.apply(&e0);
        let scale = lap.max_abs();
        assert!(out.iter().all(|c| c.norm() < 1e-12 * scale));
    }

    #[test]
    fn commutator_window_matches_naive_dense_assembly() {
        let order = 24;
        let window = 8;
        let factor = oval_factor(1.7, order);
        let fast = commutator_window_disc(&factor, order, window).unwrap();

        let delta = boundary_laplacian_disc(&factor, order).unwrap();
        let lambda = dtn_conformal_disc(&factor, order).unwrap();
        let commutator = delta.compose(&lambda).sub(&lambda.compose(&delta));
        let naive_norm = commutator.frobenius_window(window).unwrap();
        let scale = delta.compose(&lambda).frobenius_window(window).unwrap();
        assert!(
            (fast.norm - naive_norm).abs() <= 1e-10 * scale.max(1.0),
            "fast={} naive={}",
            fast.norm,
            naive_norm
        );
        let wi = window as i64;
        let block = commutator.window_block(window).unwrap();
        for k in -wi..=wi {
            for n in -wi..=wi {
                assert!((fast.block.at(k, n) - block.at(k, n)).norm() <= 1e-10 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn commutator_vanishes_flat_and_for_low_degree_symbols() {
        let flat = ConformalBoundaryFactor::constant(0.0, 64).unwrap();
        let w = commutator_window_disc(&flat, 64, 16).unwrap();
        assert!(w.relative() < 1e-13);

        let oval = oval_factor(2.0, 64);
        let w = commutator_window_disc(&oval, 64, 16).unwrap();
        assert!(w.relative() < 1e-10, "rel = {}", w.relative());
    }

    #[test]
    fn commutator_nonzero_for_high_harmonic_symbol() {
        // e^{-2phi} = 1 + (1/5) cos 3theta
        let m = 1024;
        let phi: Vec<f64> = grid_angles(m)
            .into_iter()
            .map(|t| -0.5 * (1.0 + 0.2 * (3.0 * t).cos()).ln())
            .collect();
        let factor = ConformalBoundaryFactor::from_samples(&phi, 128).unwrap();
        let flat = ConformalBoundaryFactor::constant(0.0, 128).unwrap();
        let perturbed = commutator_window_disc(&factor, 128, 32).unwrap();
        let baseline = commutator_window_disc(&flat, 128, 32).unwrap();
        assert!(perturbed.norm > 1e3 * baseline.norm.max(1e-300));
        assert!(perturbed.relative() > 1e3 * baseline.relative().max(1e-300));
    }

    #[test]
    fn criterion_examples() {
        let flat = ConformalBoundaryFactor::constant(0.0, 16).unwrap();
        assert!(criterion_residual(&flat) < 1e-14);

        let oval = oval_factor(2.0, 16);
        assert!(criterion_residual(&oval) < 1e-12);

        let m = 512;
        let phi: Vec<f64> = grid_angles(m)
            .into_iter()
            .map(|t| -0.5 * (1.0 + 0.2 * (3.0 * t).cos()).ln())
            .collect();
        let factor = ConformalBoundaryFactor::from_samples(&phi, 16).unwrap();
        assert!((criterion_residual(&factor) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn factor_depends_only_on_boundary_trace() {
        // same trace delivered as raw samples and as a signal: identical operators
        let m = 256;
        let phi: Vec<f64> = grid_angles(m).into_iter().map(|t| 0.2 * t.cos() - 0.1 * (2.0 * t).sin()).collect();
        let f1 = ConformalBoundaryFactor::from_samples(&phi, 16).unwrap();
        let sig = BoundarySignal::analyze(&phi, 32).unwrap();
        let f2 = ConformalBoundaryFactor::from_signal(&sig, 16).unwrap();
        let a = dtn_conformal_disc(&f1, 16).unwrap();
        let b = dtn_conformal_disc(&f2, 16).unwrap();
        let scale = a.max_abs();
        for k in -16i64..=16 {
            for n in -16i64..=16 {
                assert!((a.at(k, n) - b.at(k, n)).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn unresolvable_phi_is_rejected_and_wide_factors_resolve() {
        // overflow of the exponential cannot be repaired by refinement
        let m = 64;
        let phi: Vec<f64> = grid_angles(m).into_iter().map(|t| 400.0 * (3.0 * t).cos()).collect();
        assert!(ConformalBoundaryFactor::from_samples(&phi, 8).is_err());

        // a slowly decaying factor at small operator order needs internal grid
        // refinement but must succeed
        let factor = oval_factor(1.2, 4);
        assert!(factor.grid() > 64);
        assert!(criterion_residual(&factor) < 1e-11);
    }

    #[test]
    fn bracket_exact_identity() {
        for n in -50i64..=50 {
            for k in -50i64..=50 {
                let b = bracket(n, k);
                let vacuous = (n >= 0 && k <= n) || (n <= 0 && k >= n);
                assert_eq!(b.vacuous, vacuous);
                if vacuous {
                    assert_eq!(b.value, 0, "n={n} k={k}");
                } else {
                    let (n_, k_) = (n as i128, k as i128);
                    let closed = -n_.abs() * (k_ - n_) * (k_ - 2 * n_);
                    assert_eq!(b.value, closed, "n={n} k={k}");
                }
            }
        }
        // spec'd spot values
        assert_eq!(bracket(1, 3), BracketValue { value: -2, vacuous: false });
        assert_eq!(bracket(2, 1), BracketValue { value: 0, vacuous: true });
        for k in -10..=10 {
            assert_eq!(bracket(0, k).value, 0);
        }
    }

    #[test]
    fn flat_disc_laplacian_is_dtn_squared() {
        for order in [16usize, 64] {
            let flat = ConformalBoundaryFactor::constant(0.0, order).unwrap();
            let lap = boundary_laplacian_disc(&flat, order).unwrap();
            let dtn = dtn_flat_disc(order);
            let dtn2 = dtn.compose(&dtn);
            let scale = lap.max_abs().max(1.0);
            for k in -(order as i64)..=(order as i64) {
                for n in -(order as i64)..=(order as i64) {
                    assert!((lap.at(k, n) - dtn2.at(k, n)).norm() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn windowed_dtn_spectrum_is_real() {
        use nalgebra::{Complex, DMatrix};
        let order = 96;
        let window = 24;
        let factor = oval_factor(2.0, order);
        let lambda = dtn_conformal_disc(&factor, order).unwrap();
        let block = lambda.window_block(window).unwrap();
        let dim = block.dim();
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            let c = block.at(i as i64 - window as i64, j as i64 - window as i64);
            Complex::new(c.re, c.im)
        });
        let schur = mat.try_schur(1e-14, 10_000).expect("schur convergence");
        let tri = schur.unpack().1;
        let mut max_abs = 0.0f64;
        let mut max_im = 0.0f64;
        for i in 0..dim {
            max_abs = max_abs.max(tri[(i, i)].norm());
            max_im = max_im.max(tri[(i, i)].im.abs());
        }
        assert!(max_im <= 1e-8 * max_abs, "max_im={max_im} max_abs={max_abs}");
    }

    #[test]
    fn dtn_similar_to_hermitian_under_weight_conjugation() {
        // M_{e^{-phi/2}} Lambda_0 M_{e^{-phi/2}} is exactly Hermitian and its
        // window agrees with the conjugated Lambda_phi up to truncation decay.
        let order = 96;
        let window = 16;
        let a = 2.0;
        let m = fft::good_len(4 * order + 6);
        let half: Vec<f64> = grid_angles(m)
            .into_iter()
            .map(|t| {
                let z = Complex64::new(t.cos() - a, t.sin());
                z.norm().sqrt().ln()
            }) // e^{-phi/2} = |z|^{1/2} since phi = -log|z|
            .collect();
        let exp_half: Vec<f64> = half.iter().map(|&v| v.exp()).collect();
        let exp_half_sig = BoundarySignal::analyze(&exp_half, m / 2 - 1).unwrap();
        let mh = multiplication_operator(&exp_half_sig, order);
        let sym = mh.compose(&dtn_flat_disc(order)).compose(&mh);
        let wi = window as i64;
        let scale = sym.max_abs();
        for k in -wi..=wi {
            for n in -wi..=wi {
                assert!((sym.at(k, n) - sym.at(n, k).conj()).norm() <= 1e-12 * scale);
            }
        }
        // conjugated Lambda_phi: M_{e^{phi/2}} Lambda_phi M_{e^{-phi/2}}
        let inv_half: Vec<f64> = exp_half.iter().map(|&v| 1.0 / v).collect();
        let inv_half_sig = BoundarySignal::analyze(&inv_half, m / 2 - 1).unwrap();
        let minv = multiplication_operator(&inv_half_sig, order);
        let factor = oval_factor(a, order);
        let lambda = dtn_conformal_disc(&factor, order).unwrap();
        let conj = minv.compose(&lambda).compose(&mh);
        for k in -wi..=wi {
            for n in -wi..=wi {
                assert!(
                    (conj.at(k, n) - sym.at(k, n)).norm() <= 1e-8 * scale,
                    "k={k} n={n}"
                );
            }
        }
    }
}
