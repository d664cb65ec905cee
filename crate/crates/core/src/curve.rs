//! Sampled smooth closed boundary curves.
//!
//! A curve is sampled at M equispaced parameter nodes theta_j = 2 pi j / M
//! with tangents dz/dtheta. Positively oriented curves enclose their interior
//! counterclockwise; hole boundaries are traversed clockwise so the domain
//! stays on the left.

use crate::error::{Error, Result};
use crate::fft;
use crate::fourier::grid_angles;
use num_complex::Complex64;
use std::io::{BufRead, Write};

#[derive(Debug, Clone)]
pub struct PlanarCurve {
    points: Vec<Complex64>,
    tangents: Vec<Complex64>,
}

impl PlanarCurve {
    /// Sample a closed map and its parameter derivative at M nodes.
    pub fn from_map(
        m: usize,
        mut map: impl FnMut(f64) -> Complex64,
        mut deriv: impl FnMut(f64) -> Complex64,
    ) -> Result<Self> {
        if m < 8 {
            return Err(Error::CurveGeometry(format!("need at least 8 samples, got {m}")));
        }
        let angles = grid_angles(m);
        let points: Vec<Complex64> = angles.iter().map(|&t| map(t)).collect();
        let tangents: Vec<Complex64> = angles.iter().map(|&t| deriv(t)).collect();
        let curve = Self { points, tangents };
        curve.validate()?;
        Ok(curve)
    }

    /// Build from sample points alone; tangents come from spectral
    /// differentiation of the sampled parametrization.
    pub fn from_points(points: Vec<Complex64>) -> Result<Self> {
        let m = points.len();
        if m < 8 {
            return Err(Error::CurveGeometry(format!("need at least 8 samples, got {m}")));
        }
        let tangents = spectral_derivative(&points);
        let curve = Self { points, tangents };
        curve.validate()?;
        Ok(curve)
    }

    /// Build from precomputed samples and tangents at equispaced nodes.
    pub fn from_samples(points: Vec<Complex64>, tangents: Vec<Complex64>) -> Result<Self> {
        if points.len() != tangents.len() {
            return Err(Error::CurveGeometry("points/tangents length mismatch".into()));
        }
        if points.len() < 8 {
            return Err(Error::CurveGeometry(format!("need at least 8 samples, got {}", points.len())));
        }
        let curve = Self { points, tangents };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        if self.points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::CurveGeometry("non-finite sample".into()));
        }
        let min_speed = self.tangents.iter().map(|t| t.norm()).fold(f64::INFINITY, f64::min);
        let scale = self.tangents.iter().map(|t| t.norm()).fold(0.0, f64::max);
        if min_speed <= 1e-12 * scale.max(1e-300) {
            return Err(Error::CurveGeometry(format!("vanishing tangent (min speed {min_speed:.3e})")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    /// |dz/dtheta| at each node (arclength element per unit parameter).
    pub fn speeds(&self) -> Vec<f64> {
        self.tangents.iter().map(|t| t.norm()).collect()
    }

    /// Outward unit normals for a boundary that keeps the domain on its left.
    pub fn outward_normals(&self) -> Vec<Complex64> {
        self.tangents
            .iter()
            .map(|t| {
                let unit = t / t.norm();
                Complex64::new(unit.im, -unit.re) // -i * unit tangent
            })
            .collect()
    }

    /// Trapezoidal arclength: (2 pi / M) sum |dz/dtheta|.
    pub fn arclength(&self) -> f64 {
        let m = self.len() as f64;
        std::f64::consts::TAU / m * self.speeds().iter().sum::<f64>()
    }

    /// Polyline arclength from the samples themselves.
    pub fn polyline_length(&self) -> f64 {
        let m = self.len();
        (0..m).map(|j| (self.points[(j + 1) % m] - self.points[j]).norm()).sum()
    }

    /// Signed area via the shoelace rule: positive iff counterclockwise.
    pub fn signed_area(&self) -> f64 {
        let m = self.len();
        let mut acc = 0.0;
        for j in 0..m {
            let a = self.points[j];
            let b = self.points[(j + 1) % m];
            acc += a.re * b.im - b.re * a.im;
        }
        0.5 * acc
    }

    pub fn is_positively_oriented(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// Reverse the traversal direction (flips orientation).
    pub fn reversed(&self) -> Self {
        let m = self.len();
        let mut points = Vec::with_capacity(m);
        let mut tangents = Vec::with_capacity(m);
        for j in 0..m {
            let src = (m - j) % m;
            points.push(self.points[src]);
            tangents.push(-self.tangents[src]);
        }
        Self { points, tangents }
    }

    /// Arclength-weighted centroid.
    pub fn centroid(&self) -> Complex64 {
        let speeds = self.speeds();
        let total: f64 = speeds.iter().sum();
        let mut acc = Complex64::ZERO;
        for (p, w) in self.points.iter().zip(&speeds) {
            acc += p * *w;
        }
        acc / total
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d = d.max((self.points[i] - self.points[j]).norm());
            }
        }
        d
    }

    /// Apply z -> a*z + b.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Self {
        Self {
            points: self.points.iter().map(|&p| a * p + b).collect(),
            tangents: self.tangents.iter().map(|&t| a * t).collect(),
        }
    }

    /// True if any two non-adjacent segments of the sample polyline intersect.
    pub fn self_intersects(&self) -> bool {
        let m = self.len();
        for i in 0..m {
            let (a1, a2) = (self.points[i], self.points[(i + 1) % m]);
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue; // adjacent around the seam
                }
                let (b1, b2) = (self.points[j], self.points[(j + 1) % m]);
                if segments_intersect(a1, a2, b1, b2) {
                    return true;
                }
            }
        }
        false
    }

    /// Distance from a point to the closed sample polyline.
    pub fn distance_to_point(&self, p: Complex64) -> f64 {
        let m = self.len();
        let mut best = f64::INFINITY;
        for j in 0..m {
            let d = point_segment_distance(p, self.points[j], self.points[(j + 1) % m]);
            best = best.min(d);
        }
        best
    }

    /// Symmetric Hausdorff distance between the two sample polylines.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        let forward = self
            .points
            .iter()
            .map(|&p| other.distance_to_point(p))
            .fold(0.0f64, f64::max);
        let backward = other
            .points
            .iter()
            .map(|&p| self.distance_to_point(p))
            .fold(0.0f64, f64::max);
        forward.max(backward)
    }

    /// Even-odd test against the sample polygon.
    pub fn contains_point(&self, p: Complex64) -> bool {
        let m = self.len();
        let mut inside = false;
        for j in 0..m {
            let a = self.points[j];
            let b = self.points[(j + 1) % m];
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Minimal sample distance to another curve.
    pub fn clearance(&self, other: &Self) -> f64 {
        let mut best = f64::INFINITY;
        for &p in &self.points {
            best = best.min(other.distance_to_point(p));
        }
        for &p in &other.points {
            best = best.min(self.distance_to_point(p));
        }
        best
    }

    /// Translate the centroid to the origin and scale the arclength to 2 pi
    /// (the gauge in which a unit circle is fixed).
    pub fn normalize_gauge(&self) -> Self {
        let c = self.centroid();
        let s = std::f64::consts::TAU / self.arclength();
        self.affine(Complex64::new(s, 0.0), -c * s)
    }

    /// CSV rows theta, re z, im z with a header line.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "theta,re,im")?;
        for (t, p) in grid_angles(self.len()).into_iter().zip(&self.points) {
            writeln!(out, "{t:.17e},{:.17e},{:.17e}", p.re, p.im)?;
        }
        Ok(())
    }

    /// Read the CSV format written by [`write_csv`]; tangents are rebuilt
    /// spectrally.
    pub fn read_csv(input: impl BufRead) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if lineno == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
                continue; // header
            }
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "curve CSV line {} must have 3 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let re: f64 = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            points.push(Complex64::new(re, im));
        }
        Self::from_points(points)
    }

    /// Standalone SVG polyline through the samples (presentation only).
    pub fn write_svg(&self, mut out: impl Write) -> std::io::Result<()> {
        let min_x = self.points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
        let max_x = self.points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        let min_y = self.points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
        let max_y = self.points.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * ((max_x - min_x).max(max_y - min_y)).max(1e-9);
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
            min_x - pad,
            min_y - pad,
            (max_x - min_x) + 2.0 * pad,
            (max_y - min_y) + 2.0 * pad
        )?;
        let mut d = String::new();
        for (i, p) in self.points.iter().enumerate() {
            d.push_str(if i == 0 { "M" } else { "L" });
            d.push_str(&format!("{:.8},{:.8} ", p.re, p.im));
        }
        d.push('Z');
        writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="black" stroke-width="{:.6}"/>"#,
            0.004 * (max_x - min_x).max(max_y - min_y).max(1e-9)
        )?;
        writeln!(out, "</svg>")
    }
}

/// Spectral derivative of periodic complex samples.
fn spectral_derivative(points: &[Complex64]) -> Vec<Complex64> {
    let m = points.len();
    let mut buf = points.to_vec();
    fft::forward(&mut buf);
    let half = m / 2;
    for (idx, v) in buf.iter_mut().enumerate() {
        let k = if idx <= half { idx as i64 } else { idx as i64 - m as i64 };
        let k = if 2 * idx == m { 0 } else { k }; // drop the unpaired Nyquist mode
        *v *= Complex64::new(0.0, k as f64);
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / m as f64;
    buf.into_iter().map(|v| v * scale).collect()
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_intersect(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (p - a).norm();
    }
    let t = ((p.re - a.re) * ab.re + (p.im - a.im) * ab.im) / denom;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Counterclockwise circle of the given radius and center.
pub fn circle(center: Complex64, radius: f64, m: usize) -> Result<PlanarCurve> {
    if radius <= 0.0 {
        return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
    }
    PlanarCurve::from_map(
        m,
        |t| center + Complex64::from_polar(radius, t),
        |t| Complex64::from_polar(radius, t) * Complex64::new(0.0, 1.0),
    )
}

/// Axis-aligned ellipse with semi-axes (a, b).
pub fn ellipse(a: f64, b: f64, m: usize) -> Result<PlanarCurve> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::Parameter("ellipse semi-axes must be positive".into()));
    }
    PlanarCurve::from_map(
        m,
        |t| Complex64::new(a * t.cos(), b * t.sin()),
        |t| Complex64::new(-a * t.sin(), b * t.cos()),
    )
}

/// Smooth rounded square: r(theta) = 1 - amp cos(4 theta) bulges along the
/// diagonals like a square with rounded corners.
pub fn smoothed_square(amp: f64, m: usize) -> Result<PlanarCurve> {
    if !(0.0..0.25).contains(&amp) {
        return Err(Error::Parameter("rounding amplitude must be in [0, 0.25)".into()));
    }
    PlanarCurve::from_map(
        m,
        |t| Complex64::from_polar(1.0 - amp * (4.0 * t).cos(), t),
        |t| {
            let r = 1.0 - amp * (4.0 * t).cos();
            let dr = 4.0 * amp * (4.0 * t).sin();
            (Complex64::new(dr, 0.0) + Complex64::new(0.0, r)) * Complex64::from_polar(1.0, t)
        },
    )
}
