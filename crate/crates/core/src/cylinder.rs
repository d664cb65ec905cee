//! DtN map, boundary Laplacian, and commutator on flat and conformally flat
//! cylinders with two boundary circles.
//!
//! On the flat cylinder of radius 1 and height H the harmonic extension of
//! e^{in theta} from one circle (zero on the other) is explicit, giving the
//! per-frequency DtN block
//!   [[ |n| coth(|n|H), -|n|/sinh(|n|H) ],
//!    [ -|n|/sinh(|n|H), |n| coth(|n|H) ]]
//! for n != 0 and [[1/H, -1/H], [-1/H, 1/H]] for n = 0, in the outward-normal
//! convention. Conformal factors act per circle: Lambda_phi = e^{-phi} Lambda_0
//! and the boundary Laplacian is -e^{-2phi}(d^2 - phi' d) on each circle.

use crate::disc::ConformalBoundaryFactor;
use crate::error::{Error, Result};
use crate::fourier::BoundarySignal;
use crate::operator::{ColsMat, ToeplitzKernel};
use crate::tol;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::io::Write;

/// Flat cylinder of height H with boundary conformal traces on the two
/// circles (h = 0 and h = H).
#[derive(Debug, Clone)]
pub struct CylinderSpec {
    height: f64,
    factor0: ConformalBoundaryFactor,
    factor_h: ConformalBoundaryFactor,
}

impl CylinderSpec {
    pub fn new(
        height: f64,
        factor0: ConformalBoundaryFactor,
        factor_h: ConformalBoundaryFactor,
    ) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::Parameter(format!("cylinder height must be positive, got {height}")));
        }
        Ok(Self { height, factor0, factor_h })
    }

    pub fn flat(height: f64, max_order: usize) -> Result<Self> {
        Self::new(
            height,
            ConformalBoundaryFactor::constant(0.0, max_order)?,
            ConformalBoundaryFactor::constant(0.0, max_order)?,
        )
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn factor0(&self) -> &ConformalBoundaryFactor {
        &self.factor0
    }

    pub fn factor_h(&self) -> &ConformalBoundaryFactor {
        &self.factor_h
    }

    /// Induced lengths of the two boundary circles.
    pub fn circle_lengths(&self) -> (f64, f64) {
        (self.factor0.induced_length(), self.factor_h.induced_length())
    }

    fn max_order(&self) -> usize {
        self.factor0.max_order().min(self.factor_h.max_order())
    }
}

/// Flat per-frequency DtN coefficients (d_same, d_cross) evaluated through
/// scaled exponentials so that nH up to ~1e4 neither overflows nor loses the
/// limits coth -> 1, 1/sinh -> 0.
fn flat_coefficients(n: i64, height: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0 / height, -1.0 / height);
    }
    let x = n.unsigned_abs() as f64 * height;
    let q = (-2.0 * x).exp();
    let coth = (1.0 + q) / (1.0 - q);
    let inv_sinh = 2.0 * (-x).exp() / (1.0 - q);
    let scale = n.unsigned_abs() as f64;
    (scale * coth, -scale * inv_sinh)
}

/// Dense operator on the doubled coefficient space: frequencies -N..N on the
/// circle at h = 0 followed by frequencies -N..N on the circle at h = H.
#[derive(Debug, Clone)]
pub struct TwoCircleOperator {
    order: usize,
    window: usize,
    /// Row-major over the doubled index (circle, frequency).
    data: Vec<Complex64>,
}

impl TwoCircleOperator {
    pub fn zeros(order: usize) -> Self {
        let dim = 2 * (2 * order + 1);
        Self { order, window: order / 2, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        2 * (2 * self.order + 1)
    }

    fn idx(&self, circle: usize, k: i64) -> usize {
        debug_assert!(circle < 2 && k.abs() <= self.order as i64);
        circle * (2 * self.order + 1) + (k + self.order as i64) as usize
    }

    pub fn at(&self, circle_out: usize, k: i64, circle_in: usize, n: i64) -> Complex64 {
        self.data[self.idx(circle_out, k) * self.dim() + self.idx(circle_in, n)]
    }

    pub fn at_mut(&mut self, circle_out: usize, k: i64, circle_in: usize, n: i64) -> &mut Complex64 {
        let dim = self.dim();
        let r = self.idx(circle_out, k);
        let c = self.idx(circle_in, n);
        &mut self.data[r * dim + c]
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        assert_eq!(x.len(), dim);
        (0..dim)
            .map(|i| self.data[i * dim..(i + 1) * dim].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order);
        let dim = self.dim();
        let mut out = Self::zeros(self.order);
        for i in 0..dim {
            for t in 0..dim {
                let a = self.data[i * dim + t];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &rhs.data[t * dim..(t + 1) * dim];
                let dst = &mut out.data[i * dim..(i + 1) * dim];
                for j in 0..dim {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    /// Frobenius norm over entries with both frequencies in |.| <= w
    /// (all four circle blocks).
    pub fn frobenius_window(&self, w: usize) -> Result<f64> {
        if w > self.order {
            return Err(Error::Window { window: w, order: self.order, limit: self.order });
        }
        let wi = w as i64;
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for k in -wi..=wi {
                    for n in -wi..=wi {
                        acc += self.at(a, k, b, n).norm_sqr();
                    }
                }
            }
        }
        Ok(acc.sqrt())
    }

    /// CSV export with a component-ordering header.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "# order={} window={} components=circle0,circleH layout=row-major re,im pairs",
            self.order, self.window
        )?;
        let dim = self.dim();
        for i in 0..dim {
            let row = &self.data[i * dim..(i + 1) * dim];
            let mut line = String::new();
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:.17e},{:.17e}", c.re, c.im));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "window": self.window,
            "components": ["circle0", "circleH"],
            "layout": "row-major",
            "entries": self.data.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
        })
    }
}

/// Flat-cylinder DtN map: per-frequency 2x2 blocks, no coupling between
/// different frequencies.
pub fn flat_cylinder_dtn(height: f64, order: usize) -> Result<TwoCircleOperator> {
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::Parameter(format!("cylinder height must be positive, got {height}")));
    }
    let mut op = TwoCircleOperator::zeros(order);
    for n in -(order as i64)..=(order as i64) {
        let (same, cross) = flat_coefficients(n, height);
        *op.at_mut(0, n, 0, n) = Complex64::new(same, 0.0);
        *op.at_mut(0, n, 1, n) = Complex64::new(cross, 0.0);
        *op.at_mut(1, n, 0, n) = Complex64::new(cross, 0.0);
        *op.at_mut(1, n, 1, n) = Complex64::new(same, 0.0);
    }
    Ok(op)
}

fn check_order(spec: &CylinderSpec, order: usize) -> Result<()> {
    if order == 0 || order > spec.max_order() {
        return Err(Error::Window { window: order, order: spec.max_order(), limit: spec.max_order() });
    }
    Ok(())
}

/// Lambda_phi on the doubled space: block (a, b) has entries
/// c_{e^{-phi_a}}(k - n) d_{ab}(n).
pub fn dtn_conformal_cylinder(spec: &CylinderSpec, order: usize) -> Result<TwoCircleOperator> {
    check_order(spec, order)?;
    let mut op = TwoCircleOperator::zeros(order);
    let e1 = [spec.factor0.exp_minus_phi(), spec.factor_h.exp_minus_phi()];
    let oi = order as i64;
    for n in -oi..=oi {
        let (same, cross) = flat_coefficients(n, spec.height);
        for k in -oi..=oi {
            for a in 0..2 {
                let c = e1[a].coeff(k - n);
                *op.at_mut(a, k, a, n) += c * same;
                *op.at_mut(a, k, 1 - a, n) += c * cross;
            }
        }
    }
    Ok(op)
}

/// Boundary Laplacian on the doubled space: block diagonal, each circle with
/// its own factor.
pub fn boundary_laplacian_cylinder(spec: &CylinderSpec, order: usize) -> Result<TwoCircleOperator> {
    check_order(spec, order)?;
    let mut op = TwoCircleOperator::zeros(order);
    for (a, factor) in [(0usize, &spec.factor0), (1, &spec.factor_h)] {
        let lap = crate::disc::boundary_laplacian_disc(factor, order)?;
        let oi = order as i64;
        for k in -oi..=oi {
            for n in -oi..=oi {
                *op.at_mut(a, k, a, n) = lap.at(k, n);
            }
        }
    }
    Ok(op)
}

/// Windowed commutator report for the cylinder.
#[derive(Debug, Clone)]
pub struct CylinderCommutator {
    pub norm: f64,
    pub scale: f64,
}

impl CylinderCommutator {
    pub fn relative(&self) -> f64 {
        self.norm / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Windowed Frobenius norm of [Delta_phi, Lambda_phi] on the doubled space,
/// assembled blockwise through the same reassociated Toeplitz products as the
/// disc path.
pub fn commutator_window_cylinder(
    spec: &CylinderSpec,
    order: usize,
    window: usize,
) -> Result<CylinderCommutator> {
    check_order(spec, order)?;
    if window == 0 || window > order / 2 {
        return Err(Error::Window { window, order, limit: order / 2 });
    }
    let factors = [&spec.factor0, &spec.factor_h];
    let e1: Vec<&BoundarySignal> = factors.iter().map(|f| f.exp_minus_phi()).collect();
    let e2: Vec<&BoundarySignal> = factors.iter().map(|f| f.exp_minus_2phi()).collect();
    let dphi: Vec<&BoundarySignal> = factors.iter().map(|f| f.phi_prime()).collect();
    let coeff = |n: i64| flat_coefficients(n, spec.height);

    // Delta_b columns |j| <= window, shared across output blocks
    let mut delta_cols: Vec<ColsMat> = Vec::with_capacity(2);
    for b in 0..2 {
        let kc = ColsMat::from_fn(order, window, |m, j| {
            let mut v = dphi[b].coeff(m - j) * Complex64::new(0.0, j as f64);
            if m == j {
                v += Complex64::new((m * m) as f64, 0.0);
            }
            v
        });
        delta_cols.push(ToeplitzKernel::from_signal(e2[b], order, order).apply(&kc));
    }

    let mut norm_sq = 0.0;
    let mut scale_sq = 0.0;
    for a in 0..2 {
        let t_e2_win = ToeplitzKernel::from_signal(e2[a], order, window);
        let t_e1_win = ToeplitzKernel::from_signal(e1[a], order, window);
        let t_dphi = ToeplitzKernel::from_signal(dphi[a], order, order);
        for b in 0..2 {
            // Lambda_ab columns: c_{e1_a}(m - j) d_ab(j)
            let lambda_cols = ColsMat::from_fn(order, window, |m, j| {
                let (same, cross) = coeff(j);
                let d = if a == b { same } else { cross };
                e1[a].coeff(m - j) * d
            });
            // K_a Lambda_ab
            let mut dx = lambda_cols.clone();
            dx.row_scale(|m| Complex64::new(0.0, m as f64));
            let mut k_lambda = t_dphi.apply(&dx);
            let mut sq = lambda_cols;
            sq.row_scale(|m| Complex64::new((m * m) as f64, 0.0));
            k_lambda.add_assign(&sq);
            let t1 = t_e2_win.apply(&k_lambda);

            // Lambda_ab Delta_b: row-scale Delta_b columns by d_ab(m)
            let mut scaled = delta_cols[b].clone();
            scaled.row_scale(|m| {
                let (same, cross) = coeff(m);
                Complex64::new(if a == b { same } else { cross }, 0.0)
            });
            let t2 = t_e1_win.apply(&scaled);

            scale_sq += t1.frobenius().powi(2).max(t2.frobenius().powi(2));
            let mut block = t1;
            block.sub_assign(&t2);
            norm_sq += block.frobenius().powi(2);
        }
    }
    Ok(CylinderCommutator { norm: norm_sq.sqrt(), scale: scale_sq.sqrt() })
}

/// Per-circle exact-criterion residuals: max |c_{e^{-2phi}}(k)| over |k| >= 1.
/// Both vanish exactly when phi is locally constant on the boundary.
pub fn criterion_doubly_connected(spec: &CylinderSpec) -> (f64, f64) {
    let t0 = spec.factor0.exp_minus_2phi().tail_max(1).expect("band exceeds 1");
    let th = spec.factor_h.exp_minus_2phi().tail_max(1).expect("band exceeds 1");
    (t0, th)
}

/// Refinement verdict for the cylinder commutator.
pub fn refinement_verdict_cylinder(
    spec: &CylinderSpec,
    order: usize,
    window: usize,
    rel_tol: f64,
) -> Result<crate::disc::RefinementVerdict> {
    let low = commutator_window_cylinder(spec, order, window)?;
    let high = commutator_window_cylinder(spec, 2 * order, window)?;
    let (rel_low, rel_high) = (low.relative(), high.relative());
    let commuting = rel_low <= rel_tol
        && rel_high <= rel_tol
        && (rel_high <= rel_low || rel_high <= tol::COMMUTATOR_FLOOR_REL);
    Ok(crate::disc::RefinementVerdict {
        norm_low: low.norm,
        norm_high: high.norm,
        rel_low,
        rel_high,
        commuting,
    })
}
