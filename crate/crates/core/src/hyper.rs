//! Geometry of the upper half-plane: Möbius action, hyperbolic distance,
//! reduction into the modular fundamental domain, and the two centres of a
//! finite point set (Euclidean centre of mass and hyperbolic centroid).

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::forms::UnimodularMatrix;
use crate::quad::RealQuadratic;

/// A point `t + i u` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UhpPoint {
    pub t: f64,
    pub u: f64,
}

impl UhpPoint {
    pub fn new(t: f64, u: f64) -> Result<Self> {
        if !(u > 0.0) || !t.is_finite() || !u.is_finite() {
            return Err(Error::Domain(format!(
                "({t}, {u}) is not in the upper half-plane"
            )));
        }
        Ok(Self { t, u })
    }

    pub(crate) fn new_unchecked(t: f64, u: f64) -> Self {
        Self { t, u }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.t * self.t + self.u * self.u
    }

    pub fn in_fundamental_domain(&self, eps: f64) -> bool {
        self.t.abs() <= 0.5 + eps && self.norm_sqr() >= 1.0 - eps
    }

    pub fn euclidean_dist(&self, other: &Self) -> f64 {
        (self.t - other.t).hypot(self.u - other.u)
    }
}

/// `(a z + b) / (c z + d)`.
pub fn mobius(m: &UnimodularMatrix, z: UhpPoint) -> UhpPoint {
    let (a, b, c, d) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
    // (a z + b)(c conj(z) + d) / |c z + d|^2
    let den = (c * z.t + d).powi(2) + (c * z.u).powi(2);
    let re = (a * z.t + b) * (c * z.t + d) + a * c * z.u * z.u;
    let im = (a * d - b * c) * z.u;
    UhpPoint::new_unchecked(re / den, im / den)
}

/// Right action `z M := M^{-1}(z)`. The roots of `f(M (x, y))` are the images
/// of the roots of `f` under this action.
pub fn act(z: UhpPoint, m: &UnimodularMatrix) -> UhpPoint {
    mobius(&m.inverse(), z)
}

/// Hyperbolic distance, via `cosh d = 1 + |z - w|^2 / (2 u v)` written in the
/// cancellation-free form `2 asinh(|z - w| / (2 sqrt(u v)))`.
pub fn dist_h(z: UhpPoint, w: UhpPoint) -> f64 {
    let chord = z.euclidean_dist(&w);
    2.0 * (chord / (2.0 * (z.u * w.u).sqrt())).asinh()
}

/// `sum_i (prod_{k != i} y_k / s_{n-1}(y)) x_i`, i.e. the mean of `x`
/// weighted by `1 / y_i`.
pub fn psi(x: &[f64], y: &[f64]) -> Result<f64> {
    let w = psi_weights(y)?;
    if x.len() != w.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(w.iter().zip(x).map(|(w, x)| w * x).sum())
}

/// Convex weights `prod_{k != i} y_k / s_{n-1}(y) = (1 / y_i) / sum_k (1 / y_k)`.
pub fn psi_weights(y: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::Empty("psi weights"));
    }
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("psi weight argument {bad} is not positive")));
    }
    let inv: Vec<f64> = y.iter().map(|v| 1.0 / v).collect();
    let total: f64 = inv.iter().sum();
    Ok(inv.into_iter().map(|v| v / total).collect())
}

/// Coordinatewise arithmetic mean.
pub fn center_of_mass(points: &[UhpPoint]) -> Result<UhpPoint> {
    if points.is_empty() {
        return Err(Error::Empty("point list"));
    }
    let n = points.len() as f64;
    let t = points.iter().map(|p| p.t).sum::<f64>() / n;
    let u = points.iter().map(|p| p.u).sum::<f64>() / n;
    Ok(UhpPoint::new_unchecked(t, u))
}

/// Hyperbolic centroid together with its convex weights and centroid quadratic.
#[derive(Clone, Debug, PartialEq)]
pub struct CentroidResult {
    pub point: UhpPoint,
    pub weights: Vec<f64>,
    pub quadratic: RealQuadratic,
}

/// The point minimising `sum_j ((t - x_j)^2 + (u - y_j)^2) / (u y_j)`, in
/// closed form: `t = psi(x, y)`, `|C|^2 = psi(|alpha|^2, y)`.
pub fn hyperbolic_centroid(points: &[UhpPoint]) -> Result<CentroidResult> {
    if points.is_empty() {
        return Err(Error::Empty("point list"));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.u).collect();
    let weights = psi_weights(&ys)?;
    let t: f64 = weights.iter().zip(points).map(|(w, p)| w * p.t).sum();
    // u^2 = psi((x - t)^2 + y^2, y) = |C|^2 - t^2, evaluated without cancellation.
    let u2: f64 = weights
        .iter()
        .zip(points)
        .map(|(w, p)| w * ((p.t - t).powi(2) + p.u * p.u))
        .sum();
    assert!(u2 > 0.0, "centroid height must be positive");
    let quadratic = weights
        .iter()
        .zip(points)
        .fold(RealQuadratic::new(0.0, 0.0, 0.0), |acc, (w, p)| {
            acc.add_scaled(&RealQuadratic::from_root(*p), *w)
        });
    Ok(CentroidResult {
        point: UhpPoint::new_unchecked(t, u2.sqrt()),
        weights,
        quadratic,
    })
}

/// Centroid of the roots of `prod (X^2 + a_i X Z + b_i Z^2)` computed from the
/// factor coefficients, with `d_i = sqrt(4 b_i - a_i^2)`.
///
/// Evaluates `u^2` by the explicit double-sum formula and checks it against
/// `psi(b, d) - t^2`.
pub fn centroid_from_factors(a: &[f64], b: &[f64]) -> Result<CentroidResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::Empty("factor list"));
    }
    let d = a
        .iter()
        .zip(b)
        .map(|(a, b)| {
            let disc = 4.0 * b - a * a;
            if disc > 0.0 {
                Ok(disc.sqrt())
            } else {
                Err(Error::NotPositiveDefinite)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let weights = psi_weights(&d)?;
    let t = -0.5 * weights.iter().zip(a).map(|(w, a)| w * a).sum::<f64>();
    let norm2: f64 = weights.iter().zip(b).map(|(w, b)| w * b).sum();

    let u2 = centroid_height_sqr(a, &d);
    let u2_alt = norm2 - t * t;
    let scale = norm2.abs().max(1.0);
    if (u2 - u2_alt).abs() > 1e-8 * scale {
        return Err(Error::Domain(format!(
            "centroid height formulas disagree: {u2} vs {u2_alt}"
        )));
    }

    let quadratic = weights
        .iter()
        .zip(a.iter().zip(b))
        .fold(RealQuadratic::new(0.0, 0.0, 0.0), |acc, (w, (a, b))| {
            acc.add_scaled(&RealQuadratic::new(1.0, *a, *b), *w)
        });
    Ok(CentroidResult {
        point: UhpPoint::new_unchecked(t, u2.sqrt()),
        weights,
        quadratic,
    })
}

/// `u^2 = prod d / (4 s^2) * (s * sum d + sum_{i<j} prod_{k != i,j} d_k (a_i - a_j)^2)`
/// where `s = s_{n-1}(d)`.
pub fn centroid_height_sqr(a: &[f64], d: &[f64]) -> f64 {
    let n = d.len();
    let prod_except = |skip: &[usize]| -> f64 {
        d.iter()
            .enumerate()
            .filter(|(k, _)| !skip.contains(k))
            .map(|(_, v)| v)
            .product()
    };
    let s: f64 = (0..n).map(|i| prod_except(&[i])).sum();
    let prod: f64 = d.iter().product();
    let sum_d: f64 = d.iter().sum();
    let mut pair_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pair_sum += prod_except(&[i, j]) * (a[i] - a[j]).powi(2);
        }
    }
    prod / (4.0 * s * s) * (s * sum_d + pair_sum)
}

/// Exact hyperbolic-centroid real part `sum (x_j / y_j) / sum (1 / y_j)` for
/// Gaussian-integer points.
pub fn centroid_t_exact(points: &[(i64, i64)]) -> Ratio<i128> {
    let (num, den) = centroid_t_parts(points);
    Ratio::new(num, den)
}

/// Unreduced numerator and denominator `(sum_i x_i prod_{k != i} y_k, s_{n-1}(y))`.
pub(crate) fn centroid_t_parts(points: &[(i64, i64)]) -> (i128, i128) {
    let mut num = 0i128;
    let mut den = 0i128;
    for (i, &(x, _)) in points.iter().enumerate() {
        let others: i128 = points
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, p)| p.1 as i128)
            .product();
        num += x as i128 * others;
        den += others;
    }
    (num, den)
}

/// Exact centre-of-mass real part.
pub fn center_t_exact(points: &[(i64, i64)]) -> Ratio<i128> {
    let sum: i128 = points.iter().map(|p| p.0 as i128).sum();
    Ratio::new(sum, points.len() as i128)
}

/// Moves `z` into the fundamental domain `|Re z| <= 1/2, |z| >= 1` by
/// alternating integer translations and the inversion `z -> -1/z`.
///
/// Returns `(z', M)` with `z' = act(z, M)`, so the form `f(M (x, y))` has its
/// zero at `z'`. Boundary points are normalised to `Re z' >= 0`.
pub fn reduce_to_fundamental(z: UhpPoint) -> (UhpPoint, UnimodularMatrix) {
    const EPS: f64 = 1e-12;
    let mut w = z;
    let mut m = UnimodularMatrix::IDENTITY;
    for _ in 0..10_000 {
        let k = (w.t + 0.5 - EPS).floor() as i64;
        if k != 0 {
            // act(w, T_k) = w - k
            m = m.compose(&UnimodularMatrix::translation(k));
            w = UhpPoint::new_unchecked(w.t - k as f64, w.u);
        }
        if w.norm_sqr() < 1.0 - EPS {
            // act(w, S^{-1}) = S(w) = -1/w
            m = m.compose(&UnimodularMatrix::INVERSION.inverse());
            w = mobius(&UnimodularMatrix::INVERSION, w);
        } else {
            break;
        }
    }
    // Boundary identifications: Re = -1/2 ~ +1/2 and the arc |z| = 1 with Re < 0.
    if (w.t + 0.5).abs() <= EPS {
        m = m.compose(&UnimodularMatrix::translation(-1));
        w = UhpPoint::new_unchecked(w.t + 1.0, w.u);
    } else if (w.norm_sqr() - 1.0).abs() <= EPS && w.t < -EPS {
        m = m.compose(&UnimodularMatrix::INVERSION.inverse());
        w = mobius(&UnimodularMatrix::INVERSION, w);
    }
    (w, m)
}
