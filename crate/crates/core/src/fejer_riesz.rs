//! Constructive Fejér–Riesz factorization.
//!
//! Given a trigonometric polynomial w(theta) = sum a_k e^{ik theta} that is
//! real and strictly positive on the circle, produce the outer polynomial p
//! (all roots strictly outside the closed unit disc) with |p(e^{i theta})|^2 =
//! w(theta). Construction: form q(z) = z^n w(z), find the 2n roots, which come
//! in pairs alpha and 1/conj(alpha), keep the outside members, and set
//! c = w(1) / prod |1 - alpha_k|^2, p = sqrt(c) * prod (z - alpha_k).

use crate::error::{Error, Result};
use crate::fourier::{grid_angles, BoundarySignal};
use crate::tol;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

/// Laurent polynomial sum_{|k| <= n} a_k z^k with conj(a_k) = a_{-k}
/// (real-valued on the circle).
#[derive(Debug, Clone)]
pub struct LaurentSymmetricPoly {
    degree: usize,
    /// a_{-n}..a_n at index k + n.
    coeffs: Vec<Complex64>,
}

impl LaurentSymmetricPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Parse("coefficient vector must have odd length".into()));
        }
        let degree = coeffs.len() / 2;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut max_dev = 0.0f64;
        for k in 0..=degree {
            max_dev = max_dev.max((coeffs[degree + k].conj() - coeffs[degree - k]).norm());
        }
        if max_dev > tol::ZERO_REL.max(1e-14) * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SymmetryViolation { max_dev, scale });
        }
        Ok(Self { degree, coeffs })
    }

    /// Real symmetric input a_0, a_1, a_{-1}, a_2, a_{-2}, ...
    pub fn from_interleaved_real(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.len() % 2 == 0 {
            return Err(Error::Parse(
                "expected odd count: c0, c1, c-1, c2, c-2, ...".into(),
            ));
        }
        let degree = values.len() / 2;
        let mut coeffs = vec![Complex64::ZERO; 2 * degree + 1];
        coeffs[degree] = Complex64::new(values[0], 0.0);
        for k in 1..=degree {
            coeffs[degree + k] = Complex64::new(values[2 * k - 1], 0.0);
            coeffs[degree - k] = Complex64::new(values[2 * k], 0.0);
        }
        Self::new(coeffs)
    }

    /// Adopt the band of a signal, trimming coefficients below the trim
    /// threshold from the top.
    pub fn from_signal(sig: &BoundarySignal) -> Result<Self> {
        let n = sig.order() as i64;
        let coeffs: Vec<Complex64> = (-n..=n).map(|k| sig.coeff(k)).collect();
        let poly = Self { degree: sig.order(), coeffs };
        Ok(poly.trimmed())
    }

    /// Drop trailing coefficient pairs below TRIM_REL * max|a_k|.
    pub fn trimmed(&self) -> Self {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let thresh = tol::TRIM_REL * scale;
        let mut n = self.degree;
        while n > 0
            && self.coeffs[self.degree + n].norm() <= thresh
            && self.coeffs[self.degree - n].norm() <= thresh
        {
            n -= 1;
        }
        let coeffs = self.coeffs[self.degree - n..=self.degree + n].to_vec();
        Self { degree: n, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree as i64;
        if k < -n || k > n {
            Complex64::ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Value at e^{i theta} (real by symmetry).
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.coeffs[self.degree].re;
        for k in 1..=self.degree {
            let (s, c) = (k as f64 * theta).sin_cos();
            let e = Complex64::new(c, s);
            acc += 2.0 * (self.coeffs[self.degree + k] * e).re;
        }
        acc
    }

    /// w(1) = sum a_k.
    pub fn at_one(&self) -> f64 {
        self.coeffs.iter().sum::<Complex64>().re
    }
}

/// Polynomial with all roots strictly outside the closed unit disc, stored as
/// ascending coefficients plus its root list.
#[derive(Debug, Clone)]
pub struct OuterPolynomial {
    /// Ascending degree.
    coeffs: Vec<Complex64>,
    roots: Vec<Complex64>,
}

impl OuterPolynomial {
    /// Build from roots and a leading coefficient; rejects roots inside or on
    /// the closed unit disc.
    pub fn from_roots(roots: &[Complex64], leading: Complex64) -> Result<Self> {
        if leading.norm() == 0.0 {
            return Err(Error::Parameter("leading coefficient must be nonzero".into()));
        }
        for r in roots {
            if r.norm() <= 1.0 {
                return Err(Error::OuterViolation { modulus: r.norm() });
            }
        }
        let mut coeffs = vec![leading];
        for &r in roots {
            // multiply the ascending representation by (z - r)
            let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] -= c * r;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        Ok(Self { coeffs, roots: roots.to_vec() })
    }

    pub fn constant(value: f64) -> Result<Self> {
        if value <= 0.0 {
            return Err(Error::Positivity { context: "constant factor", value });
        }
        Ok(Self { coeffs: vec![Complex64::new(value, 0.0)], roots: vec![] })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// |p(e^{i theta})|.
    pub fn abs_on_circle(&self, theta: f64) -> f64 {
        self.eval(Complex64::new(0.0, theta).exp()).norm()
    }

    /// Coefficients of |p(e^{i theta})|^2 as a Laurent symmetric polynomial
    /// (exact convolution of the coefficients).
    pub fn abs_squared_symbol(&self) -> LaurentSymmetricPoly {
        let n = self.degree();
        let mut coeffs = vec![Complex64::ZERO; 2 * n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in self.coeffs.iter().enumerate() {
                coeffs[(i as i64 - j as i64 + n as i64) as usize] += a * b.conj();
            }
        }
        LaurentSymmetricPoly { degree: n, coeffs }
    }

    /// JSON: ascending [re, im] pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| json!([c.re, c.im])).collect())
    }
}

/// Roots of a monic polynomial given ascending coefficients (constant first,
/// excluding the leading 1), via the companion matrix.
fn companion_roots(monic_tail: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = monic_tail.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let mat = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -monic_tail[i]
        } else if i == j + 1 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    let schur = mat
        .try_schur(1e-14, 100_000)
        .ok_or_else(|| Error::Eigen("companion Schur iteration did not converge".into()))?;
    let tri = schur.unpack().1;
    Ok((0..n).map(|i| tri[(i, i)]).collect())
}

fn poly_eval(coeffs_ascending: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &c in coeffs_ascending.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// One Newton step per root against the original polynomial.
fn refine_roots(coeffs_ascending: &[Complex64], roots: &mut [Complex64]) {
    let deriv: Vec<Complex64> = coeffs_ascending
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect();
    for r in roots.iter_mut() {
        let dp = poly_eval(&deriv, *r);
        if dp.norm() > 1e-300 {
            let step = poly_eval(coeffs_ascending, *r) / dp;
            if step.norm() < 0.5 * (1.0 + r.norm()) {
                *r -= step;
            }
        }
    }
}

/// Partition roots into pairs (alpha, 1/conj(alpha)) and return the outside
/// members. Roots within tol_circle of the unit circle are rejected first.
pub fn pair_roots(roots: &[Complex64], tol_circle: f64) -> Result<Vec<Complex64>> {
    for r in roots {
        let dist = (r.norm() - 1.0).abs();
        if dist <= tol_circle {
            return Err(Error::BoundaryRoot { re: r.re, im: r.im, distance: dist });
        }
    }
    if roots.len() % 2 != 0 {
        return Err(Error::Pairing { unpaired: roots.len(), mismatch: f64::INFINITY });
    }
    let mut outside: Vec<Complex64> = roots.iter().copied().filter(|r| r.norm() > 1.0).collect();
    let inside: Vec<Complex64> = roots.iter().copied().filter(|r| r.norm() < 1.0).collect();
    if outside.len() != inside.len() {
        return Err(Error::Pairing {
            unpaired: outside.len().abs_diff(inside.len()),
            mismatch: f64::INFINITY,
        });
    }
    // deterministic order, then nearest-partner matching (tolerates clusters
    // from multiple roots)
    outside.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut used = vec![false; inside.len()];
    let mut worst = 0.0f64;
    for alpha in &outside {
        let mut best: Option<(usize, f64)> = None;
        for (i, beta) in inside.iter().enumerate() {
            if used[i] {
                continue;
            }
            let mismatch = (beta * alpha.conj() - Complex64::ONE).norm();
            if best.map_or(true, |(_, m)| mismatch < m) {
                best = Some((i, mismatch));
            }
        }
        let (i, mismatch) = best.expect("counts match");
        if mismatch > tol::PAIRING_TOL {
            return Err(Error::Pairing { unpaired: 2, mismatch });
        }
        used[i] = true;
        worst = worst.max(mismatch);
    }
    let _ = worst;
    Ok(outside)
}

/// Constructive factorization; see module docs. `tol_circle` is the guard band
/// around the unit circle (the positivity hypothesis is an open condition, so
/// near-circle roots are rejected loudly).
pub fn factorize(w: &LaurentSymmetricPoly, tol_circle: f64) -> Result<OuterPolynomial> {
    let w = w.trimmed();
    let n = w.degree();

    // strict positivity on a 16n-point grid (and at z = 1)
    let grid = 16 * n.max(1);
    let mut min_val = f64::INFINITY;
    for theta in grid_angles(grid) {
        min_val = min_val.min(w.eval(theta));
    }
    if min_val <= 0.0 {
        return Err(Error::Positivity { context: "symbol on circle", value: min_val });
    }
    let w_one = w.at_one();
    if w_one <= 0.0 {
        return Err(Error::Positivity { context: "w(1)", value: w_one });
    }

    if n == 0 {
        return OuterPolynomial::constant(w.coeff(0).re.sqrt());
    }

    // q(z) = z^n w(z): ascending coefficients b_j = a_{j-n}, j = 0..2n
    let q: Vec<Complex64> = (0..=2 * n).map(|j| w.coeff(j as i64 - n as i64)).collect();
    let lead = q[2 * n];
    let monic_tail: Vec<Complex64> = q[..2 * n].iter().map(|&c| c / lead).collect();
    let mut roots = companion_roots(&monic_tail)?;
    refine_roots(&q, &mut roots);

    for r in &roots {
        let dist = (r.norm() - 1.0).abs();
        if dist <= tol_circle {
            return Err(Error::BoundaryRoot { re: r.re, im: r.im, distance: dist });
        }
    }
    let outside = pair_roots(&roots, tol_circle)?;

    let denom: f64 = outside.iter().map(|a| (Complex64::ONE - a).norm_sqr()).product();
    let c = w_one / denom;
    if c <= 0.0 {
        return Err(Error::Positivity { context: "normalization constant", value: c });
    }
    let p = OuterPolynomial::from_roots(&outside, Complex64::new(c.sqrt(), 0.0))?;

    // sanity: |p|^2 must reproduce the input on a dense grid
    let check = 16 * n.max(4);
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for theta in grid_angles(check) {
        let wv = w.eval(theta);
        let pv = p.abs_on_circle(theta).powi(2);
        residual = residual.max((wv - pv).abs());
        scale = scale.max(wv.abs());
    }
    if residual > tol::FACTOR_RESIDUAL_GUARD * scale {
        return Err(Error::FactorResidual { residual, guard: tol::FACTOR_RESIDUAL_GUARD * scale });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_shifted_cosine() {
        // w = 5 - 2z - 2z^{-1} = |z - 2|^2 on the circle
        let w = LaurentSymmetricPoly::from_interleaved_real(&[5.0, -2.0, -2.0]).unwrap();
        let p = factorize(&w, tol::TOL_CIRCLE).unwrap();
        assert_eq!(p.degree(), 1);
        assert!((p.coeffs()[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((p.coeffs()[1] - Complex64::ONE).norm() < 1e-12);
        assert!((p.roots()[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn factorize_identity_and_two_plus_cosine() {
        let one = LaurentSymmetricPoly::from_interleaved_real(&[1.0]).unwrap();
        let p = factorize(&one, tol::TOL_CIRCLE).unwrap();
        assert_eq!(p.degree(), 0);
        assert!((p.coeffs()[0] - Complex64::ONE).norm() < 1e-14);

        // w = 2 + cos theta: q(z) = z^2/2 + 2z + 1/2, roots -2 +- sqrt(3)
        let w = LaurentSymmetricPoly::from_interleaved_real(&[2.0, 0.5, 0.5]).unwrap();
        let p = factorize(&w, tol::TOL_CIRCLE).unwrap();
        assert_eq!(p.degree(), 1);
        let root = p.roots()[0];
        assert!((root - Complex64::new(-2.0 - 3.0f64.sqrt(), 0.0)).norm() < 1e-10);
        let c = (3.0 / (12.0 + 6.0 * 3.0f64.sqrt())).sqrt();
        assert!((p.leading() - Complex64::new(c, 0.0)).norm() < 1e-10);
        for theta in grid_angles(64) {
            let expect = 2.0 + theta.cos();
            assert!((p.abs_on_circle(theta).powi(2) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_roots_examples() {
        let out = pair_roots(
            &[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)],
            tol::TOL_CIRCLE,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0] - Complex64::new(2.0, 0.0)).norm() < 1e-15);

        // 1/conj(3i) = i/3: {3i, i/3} pairs with outside member 3i
        let out = pair_roots(
            &[Complex64::new(0.0, 3.0), Complex64::new(0.0, 1.0 / 3.0)],
            tol::TOL_CIRCLE,
        )
        .unwrap();
        assert!((out[0] - Complex64::new(0.0, 3.0)).norm() < 1e-15);

        // {3i, -i/3} is NOT a reciprocal-conjugate pair
        let err = pair_roots(
            &[Complex64::new(0.0, 3.0), Complex64::new(0.0, -1.0 / 3.0)],
            tol::TOL_CIRCLE,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Pairing { .. }));

        // inside the guard band
        let err = pair_roots(&[Complex64::new(1.001, 0.0)], 0.01).unwrap_err();
        assert!(matches!(err, Error::BoundaryRoot { .. }));
    }

    #[test]
    fn factorize_rejects_boundary_roots_and_nonpositive_symbols() {
        // |z - r|^2 with r = 1 + 1e-8: root inside the default guard band
        for radius in [1.0 + 1e-8, 1.0 - 1e-8] {
            let p = OuterPolynomial {
                coeffs: vec![Complex64::new(-radius, 0.0), Complex64::ONE],
                roots: vec![Complex64::new(radius, 0.0)],
            };
            let w = p.abs_squared_symbol();
            let err = factorize(&w, tol::TOL_CIRCLE).unwrap_err();
            assert!(
                matches!(err, Error::BoundaryRoot { .. }) || matches!(err, Error::Positivity { .. }),
                "got {err:?}"
            );
        }
        // strictly negative somewhere
        let w = LaurentSymmetricPoly::from_interleaved_real(&[1.0, 0.75, 0.75]).unwrap();
        assert!(matches!(factorize(&w, tol::TOL_CIRCLE), Err(Error::Positivity { .. })));
    }

    #[test]
    fn laurent_symmetry_validation() {
        let err = LaurentSymmetricPoly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(2.0, 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn roundtrip_random_outer_polynomials() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..100 {
            let degree = rng.random_range(1..=8usize);
            let roots: Vec<Complex64> = (0..degree)
                .map(|_| {
                    let r = rng.random_range(1.1..=5.0);
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    Complex64::from_polar(r, phase)
                })
                .collect();
            let lead = Complex64::new(rng.random_range(0.2..2.0), 0.0);
            let p = OuterPolynomial::from_roots(&roots, lead).unwrap();
            let w = p.abs_squared_symbol();
            let phat = factorize(&w, tol::TOL_CIRCLE).unwrap();
            assert_eq!(phat.degree(), degree, "trial {trial}");
            let mut max_w = 0.0f64;
            let mut max_err = 0.0f64;
            for theta in grid_angles(512) {
                max_w = max_w.max(w.eval(theta).abs());
                max_err = max_err.max((phat.abs_on_circle(theta) - p.abs_on_circle(theta)).abs());
            }
            assert!(max_err <= 1e-10 * max_w, "trial {trial}: err {max_err} vs {max_w}");
            // the constructed constant is real positive
            assert!(phat.leading().im.abs() < 1e-14);
            assert!(phat.leading().re > 0.0);
        }
    }

    #[test]
    fn degree_is_preserved_by_trim() {
        let w = LaurentSymmetricPoly::from_interleaved_real(&[5.0, -2.0, -2.0, 1e-15, 1e-15])
            .unwrap()
            .trimmed();
        assert_eq!(w.degree(), 1);
    }
}
