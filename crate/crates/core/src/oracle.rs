//! Independent DtN computation for smooth planar domains by least-squares
//! collocation with fundamental solutions.
//!
//! Harmonic functions are represented as sums of point-source potentials
//! log|x - q| with sources placed outside the domain (outside the outer
//! curve, inside each hole) plus one explicit constant. Coefficients come
//! from a truncated-SVD least squares fit on boundary collocation nodes; the
//! boundary residual, not the condition number, is the accuracy gate. The
//! solver never sees a conformal factor, which makes it an independent check
//! on the spectral assemblies.

use crate::curve::PlanarCurve;
use crate::error::{Error, Result};
use crate::fft;
use crate::fourier::grid_angles;
use crate::operator::FrequencyOperator;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

/// A planar domain: one positively oriented outer curve plus zero or more
/// negatively oriented hole curves, pairwise disjoint at sample resolution.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    outer: PlanarCurve,
    holes: Vec<PlanarCurve>,
}

impl DomainSpec {
    pub fn new(outer: PlanarCurve, holes: Vec<PlanarCurve>) -> Result<Self> {
        if !outer.is_positively_oriented() {
            return Err(Error::CurveGeometry("outer curve must be positively oriented".into()));
        }
        if outer.self_intersects() {
            return Err(Error::CurveGeometry("outer curve self-intersects".into()));
        }
        for (i, hole) in holes.iter().enumerate() {
            if hole.is_positively_oriented() {
                return Err(Error::CurveGeometry(format!(
                    "hole {i} must be negatively oriented"
                )));
            }
            if hole.self_intersects() {
                return Err(Error::CurveGeometry(format!("hole {i} self-intersects")));
            }
            if !outer.contains_point(hole.centroid()) {
                return Err(Error::CurveGeometry(format!("hole {i} is not inside the outer curve")));
            }
            if outer.clearance(hole) <= 0.0 {
                return Err(Error::CurveGeometry(format!("hole {i} touches the outer curve")));
            }
        }
        for i in 0..holes.len() {
            for j in (i + 1)..holes.len() {
                if holes[i].clearance(&holes[j]) <= 0.0
                    || holes[i].contains_point(holes[j].centroid())
                    || holes[j].contains_point(holes[i].centroid())
                {
                    return Err(Error::CurveGeometry(format!("holes {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { outer, holes })
    }

    pub fn outer(&self) -> &PlanarCurve {
        &self.outer
    }

    pub fn holes(&self) -> &[PlanarCurve] {
        &self.holes
    }

    /// Outer curve first, then holes.
    pub fn components(&self) -> impl Iterator<Item = &PlanarCurve> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn n_components(&self) -> usize {
        1 + self.holes.len()
    }

    pub fn total_samples(&self) -> usize {
        self.components().map(|c| c.len()).sum()
    }

    /// Smallest distance between distinct boundary components.
    pub fn clearance(&self) -> f64 {
        let curves: Vec<&PlanarCurve> = self.components().collect();
        let mut best = f64::INFINITY;
        for i in 0..curves.len() {
            for j in (i + 1)..curves.len() {
                best = best.min(curves[i].clearance(curves[j]));
            }
        }
        best
    }
}

/// Point sources for the fundamental-solutions representation.
#[derive(Debug, Clone)]
pub struct ChargeLayout {
    sources: Vec<Complex64>,
    per_curve: Vec<usize>,
    offset_factor: f64,
}

impl ChargeLayout {
    /// Default layout: one source per two collocation nodes (an overdetermined
    /// least squares, so the boundary residual remains a meaningful accuracy
    /// certificate), offset along the outward normal by `offset_factor` local
    /// source spacings, capped at a fraction of the curve-to-curve clearance.
    pub fn build(domain: &DomainSpec, offset_factor: f64) -> Result<Self> {
        let counts: Vec<usize> = domain.components().map(|c| (c.len() / 2).max(8)).collect();
        Self::build_with_counts(domain, offset_factor, &counts)
    }

    /// Explicit per-curve source counts. Sources snap to sample nodes, so the
    /// ring is uniform exactly when the count divides the node count.
    pub fn build_with_counts(
        domain: &DomainSpec,
        offset_factor: f64,
        counts: &[usize],
    ) -> Result<Self> {
        if !(offset_factor > 0.0) {
            return Err(Error::Layout("offset factor must be positive".into()));
        }
        if counts.len() != domain.n_components() {
            return Err(Error::Layout(format!(
                "expected {} source counts, got {}",
                domain.n_components(),
                counts.len()
            )));
        }
        let clearance = domain.clearance();
        let cap = if clearance.is_finite() {
            tol::MFS_OFFSET_CLEARANCE_CAP * clearance
        } else {
            f64::INFINITY
        };
        let mut sources = Vec::new();
        let mut per_curve = Vec::new();
        for (curve, &count) in domain.components().zip(counts) {
            let m = curve.len();
            if count < 4 || count > m {
                return Err(Error::Layout(format!(
                    "source count {count} out of range for a curve with {m} nodes"
                )));
            }
            let normals = curve.outward_normals();
            let step = std::f64::consts::TAU / count as f64;
            for s in 0..count {
                let j = s * m / count;
                let spacing = curve.tangents()[j].norm() * step;
                let offset = (offset_factor * spacing).min(cap);
                sources.push(curve.points()[j] + normals[j] * offset);
            }
            per_curve.push(count);
        }
        let layout = Self { sources, per_curve, offset_factor };
        layout.validate(domain)?;
        Ok(layout)
    }

    fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let mut idx = 0;
        for (c, curve) in domain.components().enumerate() {
            for _ in 0..self.per_curve[c] {
                let q = self.sources[idx];
                idx += 1;
                if c == 0 {
                    // outer sources must lie outside the closure of the domain
                    if domain.outer.contains_point(q) {
                        return Err(Error::Layout(format!(
                            "outer source {idx} fell inside the domain"
                        )));
                    }
                } else {
                    // hole sources must lie inside the hole
                    if !curve.contains_point(q) {
                        return Err(Error::Layout(format!(
                            "hole source {idx} fell outside its hole"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sources(&self) -> &[Complex64] {
        &self.sources
    }

    pub fn offset_factor(&self) -> f64 {
        self.offset_factor
    }
}

/// Factorized collocation system: representation coefficients for arbitrary
/// boundary data through one truncated SVD.
///
/// The geometry is normalized internally (centroid to the origin, scaled to
/// unit radius) before assembling the log-kernel matrix; the logarithm's
/// scale covariance is absorbed by the explicit constant column, and the
/// normalization keeps the system well conditioned for small or off-center
/// domains.
pub struct MfsSolver {
    /// collocation points in normalized coordinates
    points: Vec<Complex64>,
    normals: Vec<Complex64>,
    /// arclength quadrature weight per collocation node (original coordinates)
    weights: Vec<f64>,
    per_curve: Vec<usize>,
    /// sources in normalized coordinates
    sources: Vec<Complex64>,
    center: Complex64,
    radius: f64,
    u: DMatrix<f64>,
    singular: DVector<f64>,
    v_t: DMatrix<f64>,
    matrix: DMatrix<f64>,
    pub rank: usize,
    pub cutoff: f64,
    accuracy_gate: f64,
}

/// One solved Dirichlet problem: interior evaluator plus boundary output.
#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    coeffs: Vec<f64>,
    constant: f64,
    /// sources in the solver's normalized coordinates
    sources: Vec<Complex64>,
    center: Complex64,
    radius: f64,
    /// Outward normal derivative at the collocation nodes (all components,
    /// concatenated in component order).
    pub normal_derivative: Vec<f64>,
    /// Max boundary residual relative to the data amplitude.
    pub residual: f64,
}

impl HarmonicSolution {
    /// Evaluate the harmonic representation at an interior point.
    pub fn eval(&self, x: Complex64) -> f64 {
        let xn = (x - self.center) / self.radius;
        let mut acc = self.constant;
        for (c, q) in self.coeffs.iter().zip(&self.sources) {
            acc += c * (xn - q).norm().ln();
        }
        acc
    }
}

impl MfsSolver {
    pub fn new(domain: &DomainSpec, layout: &ChargeLayout, svd_cutoff: f64) -> Result<Self> {
        Self::with_accuracy_gate(domain, layout, svd_cutoff, tol::MFS_ACCURACY)
    }

    pub fn with_accuracy_gate(
        domain: &DomainSpec,
        layout: &ChargeLayout,
        svd_cutoff: f64,
        accuracy_gate: f64,
    ) -> Result<Self> {
        let mut points = Vec::new();
        let mut normals = Vec::new();
        let mut weights = Vec::new();
        let mut per_curve = Vec::new();
        for curve in domain.components() {
            let step = std::f64::consts::TAU / curve.len() as f64;
            points.extend_from_slice(curve.points());
            normals.extend(curve.outward_normals());
            weights.extend(curve.speeds().iter().map(|s| s * step));
            per_curve.push(curve.len());
        }
        // normalize geometry: centroid to origin, unit radius
        let center = points.iter().sum::<Complex64>() / points.len() as f64;
        let radius = points
            .iter()
            .map(|p| (p - center).norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let points: Vec<Complex64> = points.iter().map(|p| (p - center) / radius).collect();
        let sources: Vec<Complex64> =
            layout.sources().iter().map(|q| (q - center) / radius).collect();
        let n_rows = points.len();
        let n_src = sources.len();
        let matrix = DMatrix::<f64>::from_fn(n_rows, n_src + 1, |i, j| {
            if j == n_src {
                1.0
            } else {
                (points[i] - sources[j]).norm().ln()
            }
        });
        let svd = matrix.clone().svd(true, true);
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > svd_cutoff * sigma_max)
            .count();
        if rank == 0 || sigma_max == 0.0 {
            return Err(Error::Layout("rank collapse in the collocation system".into()));
        }
        Ok(Self {
            points,
            normals,
            weights,
            per_curve,
            sources,
            center,
            radius,
            u: svd.u.expect("requested"),
            singular: svd.singular_values,
            v_t: svd.v_t.expect("requested"),
            matrix,
            rank,
            cutoff: svd_cutoff,
            accuracy_gate,
        })
    }

    pub fn n_collocation(&self) -> usize {
        self.points.len()
    }

    pub fn per_curve(&self) -> &[usize] {
        &self.per_curve
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Solve the Dirichlet problem for sample data at the collocation nodes.
    pub fn solve(&self, data: &[f64]) -> Result<HarmonicSolution> {
        if data.len() != self.points.len() {
            return Err(Error::Parse(format!(
                "data length {} does not match {} collocation nodes",
                data.len(),
                self.points.len()
            )));
        }
        let f = DVector::from_column_slice(data);
        let mut y = self.u.ad_mul(&f); // U^T f
        let sigma_max = self.singular.max();
        for (i, v) in y.iter_mut().enumerate() {
            let s = self.singular[i];
            *v = if s > self.cutoff * sigma_max { *v / s } else { 0.0 };
        }
        let c = self.v_t.ad_mul(&y); // V Sigma^+ U^T f
        let reproduced = &self.matrix * &c;
        let amplitude = data.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
        let residual = (0..data.len())
            .map(|i| (reproduced[i] - data[i]).abs())
            .fold(0.0f64, f64::max)
            / amplitude;
        if residual > self.accuracy_gate {
            return Err(Error::AccuracyFailure {
                residual,
                gate: self.accuracy_gate,
            });
        }
        let n_src = self.sources.len();
        let coeffs: Vec<f64> = c.iter().take(n_src).cloned().collect();
        let constant = c[n_src];
        // analytic normal derivative of the representation:
        // grad log|x - q| = (x - q)/|x - q|^2; the 1/radius undoes the
        // geometric normalization
        let normal_derivative: Vec<f64> = (0..self.points.len())
            .map(|i| {
                let x = self.points[i];
                let nu = self.normals[i];
                let mut acc = 0.0;
                for (w, q) in coeffs.iter().zip(&self.sources) {
                    let d = x - q;
                    acc += w * (d.re * nu.re + d.im * nu.im) / d.norm_sqr();
                }
                acc / self.radius
            })
            .collect();
        Ok(HarmonicSolution {
            coeffs,
            constant,
            sources: self.sources.clone(),
            center: self.center,
            radius: self.radius,
            normal_derivative,
            residual,
        })
    }

    /// Complex data as two real solves.
    fn solve_complex(&self, data: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let re: Vec<f64> = data.iter().map(|c| c.re).collect();
        let im: Vec<f64> = data.iter().map(|c| c.im).collect();
        let sol_re = self.solve(&re)?;
        let sol_im = self.solve(&im)?;
        let out = sol_re
            .normal_derivative
            .iter()
            .zip(&sol_im.normal_derivative)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Ok((out, sol_re.residual.max(sol_im.residual)))
    }

    fn component_range(&self, c: usize) -> std::ops::Range<usize> {
        let start: usize = self.per_curve[..c].iter().sum();
        start..start + self.per_curve[c]
    }
}

/// Dirichlet solve from explicit per-component boundary data.
pub fn solve_dirichlet(
    domain: &DomainSpec,
    layout: &ChargeLayout,
    data_per_component: &[Vec<f64>],
    svd_cutoff: f64,
) -> Result<HarmonicSolution> {
    if data_per_component.len() != domain.n_components() {
        return Err(Error::Parse(format!(
            "expected data for {} components, got {}",
            domain.n_components(),
            data_per_component.len()
        )));
    }
    let solver = MfsSolver::new(domain, layout, svd_cutoff)?;
    let mut flat = Vec::with_capacity(domain.total_samples());
    for (curve, data) in domain.components().zip(data_per_component) {
        if curve.len() != data.len() {
            return Err(Error::Parse("component data length mismatch".into()));
        }
        flat.extend_from_slice(data);
    }
    solver.solve(&flat)
}

/// The sampled DtN map projected to per-component Fourier windows, together
/// with solve diagnostics and the factorized solver for sample-level use.
pub struct SampledDtN {
    pub n_max: usize,
    /// (n_components * (2 n_max + 1))^2 row-major; component-major index
    /// (component, frequency).
    matrix: Vec<Complex64>,
    n_components: usize,
    pub worst_residual: f64,
    pub rank: usize,
    pub weighted_asymmetry: f64,
    pub solver: MfsSolver,
}

impl SampledDtN {
    fn block_dim(&self) -> usize {
        self.n_components * (2 * self.n_max + 1)
    }

    fn idx(&self, component: usize, k: i64) -> usize {
        component * (2 * self.n_max + 1) + (k + self.n_max as i64) as usize
    }

    pub fn at(&self, c_out: usize, m: i64, c_in: usize, k: i64) -> Complex64 {
        self.matrix[self.idx(c_out, m) * self.block_dim() + self.idx(c_in, k)]
    }

    /// Single-component window as a dense frequency operator.
    pub fn to_frequency_operator(&self) -> Result<FrequencyOperator> {
        if self.n_components != 1 {
            return Err(Error::Parse("multi-component DtN has no single-window form".into()));
        }
        let n = self.n_max;
        let mut op = FrequencyOperator::zeros(n);
        for m in -(n as i64)..=(n as i64) {
            for k in -(n as i64)..=(n as i64) {
                *op.at_mut(m, k) = self.at(0, m, 0, k);
            }
        }
        Ok(op)
    }

    pub fn diagnostics_json(&self) -> Value {
        json!({
            "n_max": self.n_max,
            "components": self.n_components,
            "worst_residual": self.worst_residual,
            "rank": self.rank,
            "weighted_asymmetry": self.weighted_asymmetry,
        })
    }
}

/// Fourier projection of per-component samples onto |m| <= n_max.
fn project_window(samples: &[Complex64], n_max: usize) -> Vec<Complex64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    fft::forward(&mut buf);
    let scale = 1.0 / m as f64;
    let mut out = Vec::with_capacity(2 * n_max + 1);
    for k in -(n_max as i64)..=(n_max as i64) {
        let idx = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
        out.push(buf[idx] * scale);
    }
    out
}

/// Assemble the windowed DtN matrix column by column: Dirichlet data
/// e^{ik theta} on one component (zero elsewhere), outward normal derivative
/// projected back to the per-component windows.
pub fn dtn_matrix(
    domain: &DomainSpec,
    layout: &ChargeLayout,
    n_max: usize,
    svd_cutoff: f64,
) -> Result<SampledDtN> {
    for curve in domain.components() {
        if n_max > curve.len() / 4 {
            return Err(Error::Window { window: n_max, order: curve.len() / 4, limit: curve.len() / 4 });
        }
    }
    let solver = MfsSolver::new(domain, layout, svd_cutoff)?;
    let ncomp = domain.n_components();
    let band = 2 * n_max + 1;
    let dim = ncomp * band;
    let mut matrix = vec![Complex64::ZERO; dim * dim];
    let mut weighted = vec![Complex64::ZERO; dim * dim];
    let mut worst_residual = 0.0f64;
    let total = solver.n_collocation();

    for (c_in, curve) in domain.components().enumerate() {
        let range = solver.component_range(c_in);
        let angles = grid_angles(curve.len());
        for k in -(n_max as i64)..=(n_max as i64) {
            let mut data = vec![Complex64::ZERO; total];
            for (j, &t) in angles.iter().enumerate() {
                data[range.start + j] = Complex64::new(0.0, k as f64 * t).exp();
            }
            let (g, residual) = solver.solve_complex(&data)?;
            worst_residual = worst_residual.max(residual);
            let col = c_in * band + (k + n_max as i64) as usize;
            for (c_out, out_curve) in domain.components().enumerate() {
                let out_range = solver.component_range(c_out);
                let projected = project_window(&g[out_range.clone()], n_max);
                for (row_off, &value) in projected.iter().enumerate() {
                    matrix[(c_out * band + row_off) * dim + col] = value;
                }
                // weighted pairing integral of the raw samples for the
                // symmetry diagnostic
                let out_angles = grid_angles(out_curve.len());
                for m in -(n_max as i64)..=(n_max as i64) {
                    let mut acc = Complex64::ZERO;
                    for (j, &t) in out_angles.iter().enumerate() {
                        let phase = Complex64::new(0.0, -(m as f64) * t).exp();
                        acc += phase * g[out_range.start + j] * solver.weights[out_range.start + j];
                    }
                    let row = c_out * band + (m + n_max as i64) as usize;
                    weighted[row * dim + col] = acc;
                }
            }
        }
    }
    // Hermitian deviation of the weighted pairing
    let mut asym = 0.0f64;
    let mut scale = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let a = weighted[r * dim + c];
            let b = weighted[c * dim + r].conj();
            asym += (a - b).norm_sqr();
            scale += a.norm_sqr();
        }
    }
    let weighted_asymmetry = (asym.sqrt()) / scale.sqrt().max(1e-300);
    let rank = solver.rank;
    Ok(SampledDtN {
        n_max,
        matrix,
        n_components: ncomp,
        worst_residual,
        rank,
        weighted_asymmetry,
        solver,
    })
}

/// Spectral derivative of periodic complex samples (shared helper).
fn periodic_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut buf = values.to_vec();
    fft::forward(&mut buf);
    let half = m / 2;
    for (idx, v) in buf.iter_mut().enumerate() {
        let k = if idx <= half { idx as i64 } else { idx as i64 - m as i64 };
        let k = if 2 * idx == m { 0 } else { k };
        *v *= Complex64::new(0.0, k as f64);
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / m as f64;
    buf.into_iter().map(|v| v * scale).collect()
}

/// Apply the boundary Laplacian -w^{-1} d/dtheta (w^{-1} d/dtheta .) of a
/// curve (w = |dz/dtheta|) to samples, pseudospectrally at full resolution.
pub fn curve_laplacian_apply(curve: &PlanarCurve, values: &[Complex64]) -> Vec<Complex64> {
    let speeds = curve.speeds();
    let d1 = periodic_derivative(values);
    let b: Vec<Complex64> = d1.iter().zip(&speeds).map(|(v, w)| v / w).collect();
    let d2 = periodic_derivative(&b);
    d2.iter().zip(&speeds).map(|(v, w)| -v / w).collect()
}

/// Windowed matrix of the curve's boundary Laplacian: assembled at a higher
/// internal order through the conformal-disc machinery (phi = log |dz/dtheta|)
/// and restricted to |k|, |n| <= n_max.
pub fn boundary_laplacian_curve(curve: &PlanarCurve, n_max: usize) -> Result<FrequencyOperator> {
    let internal = (4 * n_max).max(16);
    let phi: Vec<f64> = curve.speeds().iter().map(|w| w.ln()).collect();
    let factor = crate::disc::ConformalBoundaryFactor::from_samples(&phi, internal)?;
    let lap = crate::disc::boundary_laplacian_disc(&factor, internal)?;
    lap.window_block(n_max)
}

/// Windowed commutator of the curve Laplacian and the oracle DtN map.
///
/// Each column applies both operators at full sample resolution (solves for
/// Lambda, pseudospectral differentiation for the Laplacian) and only the
/// final column is projected to the window, so no compression error enters.
#[derive(Debug)]
pub struct OracleCommutator {
    pub norm: f64,
    pub scale: f64,
    pub worst_residual: f64,
}

impl OracleCommutator {
    pub fn relative(&self) -> f64 {
        self.norm / self.scale.max(f64::MIN_POSITIVE)
    }
}

pub fn commutator_norm_oracle(
    domain: &DomainSpec,
    layout: &ChargeLayout,
    n_max: usize,
    svd_cutoff: f64,
) -> Result<OracleCommutator> {
    for curve in domain.components() {
        if n_max > curve.len() / 4 {
            return Err(Error::Window { window: n_max, order: curve.len() / 4, limit: curve.len() / 4 });
        }
    }
    let solver = MfsSolver::new(domain, layout, svd_cutoff)?;
    let total = solver.n_collocation();
    let curves: Vec<&PlanarCurve> = domain.components().collect();
    let mut norm_sq = 0.0;
    let mut scale_dl_sq = 0.0;
    let mut scale_ld_sq = 0.0;
    let mut worst_residual = 0.0f64;

    for (c_in, curve) in curves.iter().enumerate() {
        let range = solver.component_range(c_in);
        let angles = grid_angles(curve.len());
        for k in -(n_max as i64)..=(n_max as i64) {
            let mut f = vec![Complex64::ZERO; total];
            for (j, &t) in angles.iter().enumerate() {
                f[range.start + j] = Complex64::new(0.0, k as f64 * t).exp();
            }
            // Delta (Lambda f): solve, then differentiate per component
            let (g, r1) = solver.solve_complex(&f)?;
            let mut delta_g = vec![Complex64::ZERO; total];
            for (c_out, out_curve) in curves.iter().enumerate() {
                let out_range = solver.component_range(c_out);
                let part = curve_laplacian_apply(out_curve, &g[out_range.clone()]);
                delta_g[out_range].copy_from_slice(&part);
            }
            // Lambda (Delta f): differentiate the data, then solve
            let mut h = vec![Complex64::ZERO; total];
            let part = curve_laplacian_apply(curve, &f[range.clone()]);
            h[range.clone()].copy_from_slice(&part);
            let (lambda_h, r2) = solver.solve_complex(&h)?;
            worst_residual = worst_residual.max(r1).max(r2);

            for (c_out, _) in curves.iter().enumerate() {
                let out_range = solver.component_range(c_out);
                let p_dl = project_window(&delta_g[out_range.clone()], n_max);
                let p_ld = project_window(&lambda_h[out_range.clone()], n_max);
                for (a, b) in p_dl.iter().zip(&p_ld) {
                    norm_sq += (a - b).norm_sqr();
                    scale_dl_sq += a.norm_sqr();
                    scale_ld_sq += b.norm_sqr();
                }
            }
        }
    }
    Ok(OracleCommutator {
        norm: norm_sq.sqrt(),
        scale: scale_dl_sq.max(scale_ld_sq).sqrt(),
        worst_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{circle, ellipse};

    fn unit_disc(m: usize) -> DomainSpec {
        DomainSpec::new(circle(Complex64::ZERO, 1.0, m).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn disc_dirichlet_solve_matches_separation_of_variables() {
        let m = 256;
        let domain = unit_disc(m);
        let layout = ChargeLayout::build(&domain, tol::MFS_OFFSET).unwrap();
        let data: Vec<f64> = grid_angles(m).into_iter().map(|t| (3.0 * t).cos()).collect();
        let sol = solve_dirichlet(&domain, &layout, &[data], tol::SVD_CUTOFF).unwrap();
        // normal derivative of r^3 cos 3theta at r = 1 is 3 cos 3theta
        for (j, t) in grid_angles(m).into_iter().enumerate() {
            let expect = 3.0 * (3.0 * t).cos();
            assert!(
                (sol.normal_derivative[j] - expect).abs() <= 1e-8,
                "j={j}: {} vs {expect}",
                sol.normal_derivative[j]
            );
        }
        // interior value r^3 cos 3theta
        let x = Complex64::from_polar(0.5, 0.7);
        let expect = 0.5f64.powi(3) * (3.0 * 0.7f64).cos();
        assert!((sol.eval(x) - expect).abs() < 1e-9);

        // constant data extends to a constant: zero normal derivative
        let ones = vec![1.0; m];
        let sol = solve_dirichlet(&domain, &layout, &[ones], tol::SVD_CUTOFF).unwrap();
        for v in &sol.normal_derivative {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn annulus_dirichlet_solve_matches_separation_of_variables() {
        let m = 256;
        let outer = circle(Complex64::ZERO, 2.0, m).unwrap();
        let hole = circle(Complex64::ZERO, 1.0, m).unwrap().reversed();
        let domain = DomainSpec::new(outer, vec![hole]).unwrap();
        let layout = ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[m, m]).unwrap();
        // data cos theta on the outer circle, zero on the inner:
        // u = (2/3 r - 2/(3r)) cos theta, du/dr|_{r=2} = 2/3 + 1/6 = 5/6
        let outer_data: Vec<f64> = grid_angles(m).into_iter().map(|t| t.cos()).collect();
        let inner_data = vec![0.0; m];
        let sol = solve_dirichlet(&domain, &layout, &[outer_data, inner_data], tol::SVD_CUTOFF)
            .unwrap();
        for (j, t) in grid_angles(m).into_iter().enumerate() {
            let expect = 5.0 / 6.0 * t.cos();
            assert!(
                (sol.normal_derivative[j] - expect).abs() <= 1e-7,
                "outer j={j}: {} vs {expect}",
                sol.normal_derivative[j]
            );
        }
        // hole boundary: outward normal of the domain points toward the center,
        // -du/dr at r=1 with u = (2/3)(r - 1/r) cos: du/dr|_1 = 2/3 + 2/3 = 4/3
        for (j, t) in grid_angles(m).into_iter().enumerate() {
            // hole curve is reversed: node j sits at angle -t
            let expect = -(4.0 / 3.0) * (-t).cos();
            let got = sol.normal_derivative[m + j];
            assert!((got - expect).abs() <= 1e-7, "inner j={j}: {got} vs {expect}");
        }
    }

    #[test]
    fn annulus_with_log_data_uses_hole_charges() {
        // u = log r is harmonic in the annulus but needs the hole log sources
        let m = 192;
        let outer = circle(Complex64::ZERO, 2.0, m).unwrap();
        let hole = circle(Complex64::ZERO, 1.0, m).unwrap().reversed();
        let domain = DomainSpec::new(outer, vec![hole]).unwrap();
        let layout = ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[m, m]).unwrap();
        let outer_data = vec![2.0f64.ln(); m];
        let inner_data = vec![0.0; m];
        let sol = solve_dirichlet(&domain, &layout, &[outer_data, inner_data], tol::SVD_CUTOFF)
            .unwrap();
        // du/dr = 1/r: outer normal derivative 1/2; inner -(1) (outward = -d/dr)
        for j in 0..m {
            assert!((sol.normal_derivative[j] - 0.5).abs() < 1e-7);
            assert!((sol.normal_derivative[m + j] + 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn dtn_matrix_on_disc_is_diagonal_frequency() {
        let m = 256;
        let domain = unit_disc(m);
        let layout = ChargeLayout::build(&domain, tol::MFS_OFFSET).unwrap();
        let dtn = dtn_matrix(&domain, &layout, 8, tol::SVD_CUTOFF).unwrap();
        for mfreq in -8i64..=8 {
            for k in -8i64..=8 {
                let v = dtn.at(0, mfreq, 0, k);
                let expect = if mfreq == k {
                    Complex64::new(k.unsigned_abs() as f64, 0.0)
                } else {
                    Complex64::ZERO
                };
                assert!((v - expect).norm() <= 1e-7, "m={mfreq} k={k}: {v}");
            }
        }
        assert!(dtn.worst_residual < 1e-8);
        assert!(dtn.weighted_asymmetry < 1e-6);
    }

    #[test]
    fn thin_annulus_has_cross_component_coupling_and_rotational_block_structure() {
        let m = 256;
        let outer = circle(Complex64::ZERO, 1.0, m).unwrap();
        let hole = circle(Complex64::ZERO, 0.7, m).unwrap().reversed();
        let domain = DomainSpec::new(outer, vec![hole]).unwrap();
        let layout = ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[m, m]).unwrap();
        let dtn = dtn_matrix(&domain, &layout, 6, tol::SVD_CUTOFF).unwrap();
        // cross blocks are substantial
        let mut cross = 0.0f64;
        for mfreq in -6i64..=6 {
            for k in -6i64..=6 {
                cross = cross.max(dtn.at(0, mfreq, 1, k).norm());
            }
        }
        assert!(cross > 1e-3, "cross coupling {cross}");
        // rotational symmetry: no coupling between distinct |frequencies|
        for mfreq in -6i64..=6 {
            for k in -6i64..=6 {
                if mfreq.abs() != k.abs() {
                    for a in 0..2 {
                        for b in 0..2 {
                            assert!(
                                dtn.at(a, mfreq, b, k).norm() <= 1e-7,
                                "a={a} b={b} m={mfreq} k={k}"
                            );
                        }
                    }
                }
            }
        }
        assert!(dtn.weighted_asymmetry < 1e-6);
    }

    #[test]
    fn curve_laplacian_matches_scaling_on_circles() {
        let unit = circle(Complex64::ZERO, 1.0, 64).unwrap();
        let lap = boundary_laplacian_curve(&unit, 6).unwrap();
        for n in -6i64..=6 {
            for k in -6i64..=6 {
                let expect = if n == k { (n * n) as f64 } else { 0.0 };
                assert!((lap.at(k, n) - Complex64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
        let two = circle(Complex64::ZERO, 2.0, 64).unwrap();
        let lap = boundary_laplacian_curve(&two, 6).unwrap();
        for n in -6i64..=6 {
            let expect = (n * n) as f64 / 4.0;
            assert!((lap.at(n, n) - Complex64::new(expect, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn curve_laplacian_matches_conformal_assembly_on_log_oval() {
        let m = 512;
        let oval = crate::atlas::log_oval_boundary(2.0, m).unwrap();
        let lap_curve = boundary_laplacian_curve(&oval, 8).unwrap();
        // the same operator through the conformal factor phi = -log|e^{it}-2|
        let phi: Vec<f64> = grid_angles(m)
            .into_iter()
            .map(|t| {
                let z = Complex64::new(t.cos() - 2.0, t.sin());
                -z.norm().ln()
            })
            .collect();
        let factor = crate::disc::ConformalBoundaryFactor::from_samples(&phi, 32).unwrap();
        let lap_disc = crate::disc::boundary_laplacian_disc(&factor, 32)
            .unwrap()
            .window_block(8)
            .unwrap();
        let scale = lap_disc.max_abs();
        for k in -8i64..=8 {
            for n in -8i64..=8 {
                assert!(
                    (lap_curve.at(k, n) - lap_disc.at(k, n)).norm() <= 1e-8 * scale,
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn commutator_oracle_disc_vs_ellipse() {
        let m = 256;
        let n_max = 8;
        let disc = unit_disc(m);
        let layout = ChargeLayout::build(&disc, tol::MFS_OFFSET).unwrap();
        let base = commutator_norm_oracle(&disc, &layout, n_max, tol::SVD_CUTOFF).unwrap();
        assert!(base.relative() < 1e-6, "disc rel {}", base.relative());

        let ell = DomainSpec::new(ellipse(2.0, 1.0, m).unwrap(), vec![]).unwrap();
        let layout = ChargeLayout::build(&ell, tol::MFS_OFFSET).unwrap();
        let e = commutator_norm_oracle(&ell, &layout, n_max, tol::SVD_CUTOFF).unwrap();
        assert!(
            e.relative() > 100.0 * base.relative(),
            "ellipse rel {} vs disc rel {}",
            e.relative(),
            base.relative()
        );
    }

    #[test]
    fn layout_validation_and_errors() {
        let m = 64;
        let domain = unit_disc(m);
        assert!(ChargeLayout::build(&domain, -1.0).is_err());
        let layout = ChargeLayout::build(&domain, tol::MFS_OFFSET).unwrap();
        assert_eq!(layout.sources().len(), m / 2);
        assert!(ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[m + 1]).is_err());
        assert!(ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[2]).is_err());
        // all sources strictly outside
        for q in layout.sources() {
            assert!(q.norm() > 1.0);
        }
        // orientation validation
        let cw = circle(Complex64::ZERO, 1.0, m).unwrap().reversed();
        assert!(DomainSpec::new(cw, vec![]).is_err());
        let ccw_hole = circle(Complex64::ZERO, 0.5, m).unwrap();
        assert!(DomainSpec::new(circle(Complex64::ZERO, 1.0, m).unwrap(), vec![ccw_hole]).is_err());
    }

    #[test]
    fn solve_rejects_wrong_lengths_and_detects_bad_accuracy() {
        let m = 64;
        let domain = unit_disc(m);
        let layout = ChargeLayout::build(&domain, tol::MFS_OFFSET).unwrap();
        let solver = MfsSolver::new(&domain, &layout, tol::SVD_CUTOFF).unwrap();
        assert!(solver.solve(&vec![0.0; m + 1]).is_err());
        // data far beyond the representable band fails the accuracy gate
        let sparse = ChargeLayout::build_with_counts(&domain, tol::MFS_OFFSET, &[m / 4]).unwrap();
        let solver = MfsSolver::new(&domain, &sparse, tol::SVD_CUTOFF).unwrap();
        let rough: Vec<f64> = (0..m).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let err = solver.solve(&rough);
        assert!(matches!(err, Err(Error::AccuracyFailure { .. })), "{err:?}");
    }
}
