//! Julia quadratic, Julia invariant and the Julia zero map.
//!
//! For a form with real roots `alpha_i` and conjugate pairs `beta_j` the
//! quadratic
//!
//! ```text
//! Q(x, y) = sum t_i^2 (x - alpha_i y)^2 + sum 2 u_j^2 (x - beta_j y)(x - conj(beta_j) y)
//! ```
//!
//! is positive definite, and
//! `theta0 = a0^2 |disc Q|^(n/2) / (prod t_i^2 prod u_j^4)` is minimised over
//! the positive weights. In log-weights `s` the objective is
//! `(n/2) ln G(s) - sum e_k s_k` with `G = -disc(Q) / 4` a sum of exponentials,
//! hence convex; it is constant along the all-ones direction, which is fixed
//! by the normalisation `prod t_i^2 prod u_j^4 = 1`.

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::forms::{BinaryForm, UnimodularMatrix, UpperRootSet, ROOT_TOL};
use crate::hyper::{reduce_to_fundamental, UhpPoint};
use crate::quad::RealQuadratic;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;

/// Positive weights `t_i` (real roots) and `u_j` (conjugate pairs).
#[derive(Clone, Debug, PartialEq)]
pub struct JuliaWeights {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
}

impl JuliaWeights {
    pub fn new(t: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if let Some(bad) = t.iter().chain(&u).find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("Julia weight {bad} is not positive")));
        }
        Ok(Self { t, u })
    }

    pub fn ones(r: usize, s: usize) -> Self {
        Self {
            t: vec![1.0; r],
            u: vec![1.0; s],
        }
    }

    /// Rescaled so that `prod t_i^2 prod u_j^4 = 1`.
    pub fn normalized(&self) -> Self {
        let (mut s, e) = self.to_log();
        let shift = constraint_shift(&s, &e);
        s.iter_mut().for_each(|v| *v += shift);
        Self::from_log(&s, self.t.len())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            t: self.t.iter().map(|v| v * lambda).collect(),
            u: self.u.iter().map(|v| v * lambda).collect(),
        }
    }

    fn to_log(&self) -> (Vec<f64>, Vec<f64>) {
        let s = self.t.iter().chain(&self.u).map(|v| v.ln()).collect();
        let e = exponents(self.t.len(), self.u.len());
        (s, e)
    }

    fn from_log(s: &[f64], r: usize) -> Self {
        Self {
            t: s[..r].iter().map(|v| v.exp()).collect(),
            u: s[r..].iter().map(|v| v.exp()).collect(),
        }
    }
}

/// Outcome of minimising `theta0`.
#[derive(Clone, Debug, PartialEq)]
pub struct JuliaResult {
    pub quadratic: RealQuadratic,
    /// Julia invariant: the minimal value of `theta0`.
    pub theta: f64,
    pub weights: JuliaWeights,
    /// Julia zero map value.
    pub zero: UhpPoint,
    pub iterations: usize,
    /// Norm of the projected gradient of `ln theta0` at `weights`.
    pub grad_norm: f64,
}

/// The quadratic `Q_f` for the given weights.
pub fn q_of_weights(roots: &UpperRootSet, w: &JuliaWeights) -> Result<RealQuadratic> {
    check_signature(roots, w)?;
    let mut q = RealQuadratic::new(0.0, 0.0, 0.0);
    for (alpha, t) in roots.real.iter().zip(&w.t) {
        if !alpha.is_finite() {
            return Err(root_at_infinity());
        }
        q = q.add_scaled(&RealQuadratic::new(1.0, -2.0 * alpha, alpha * alpha), t * t);
    }
    for (beta, u) in roots.upper.iter().zip(&w.u) {
        q = q.add_scaled(&RealQuadratic::from_root(*beta), 2.0 * u * u);
    }
    Ok(q)
}

/// `theta0 = a0^2 |D_f|^(n/2) / (prod t_i^2 prod u_j^4)`, with `a0` the
/// coefficient of `x^n`.
pub fn theta0(f: &BinaryForm, roots: &UpperRootSet, w: &JuliaWeights) -> Result<f64> {
    Ok(log_theta0(f, roots, w)?.exp())
}

fn log_theta0(f: &BinaryForm, roots: &UpperRootSet, w: &JuliaWeights) -> Result<f64> {
    let q = q_of_weights(roots, w)?;
    let disc = q.discriminant().abs();
    if !(disc > 0.0) {
        return Err(Error::Domain("Julia quadratic is degenerate".into()));
    }
    let a0 = leading_coeff(f)?;
    let n = roots.degree() as f64;
    let denom: f64 = w.t.iter().map(|t| 2.0 * t.ln()).sum::<f64>()
        + w.u.iter().map(|u| 4.0 * u.ln()).sum::<f64>();
    Ok(2.0 * a0.abs().ln() + 0.5 * n * disc.ln() - denom)
}

fn leading_coeff(f: &BinaryForm) -> Result<f64> {
    let a0 = f.coeffs()[0].to_f64().unwrap_or(f64::NAN);
    if a0 == 0.0 {
        return Err(root_at_infinity());
    }
    Ok(a0)
}

fn root_at_infinity() -> Error {
    Error::Domain("form has a root at infinity (vanishing x^n coefficient)".into())
}

fn check_signature(roots: &UpperRootSet, w: &JuliaWeights) -> Result<()> {
    if roots.real.len() != w.t.len() {
        return Err(Error::LengthMismatch(roots.real.len(), w.t.len()));
    }
    if roots.upper.len() != w.u.len() {
        return Err(Error::LengthMismatch(roots.upper.len(), w.u.len()));
    }
    Ok(())
}

fn exponents(r: usize, s: usize) -> Vec<f64> {
    std::iter::repeat_n(2.0, r).chain(std::iter::repeat_n(4.0, s)).collect()
}

/// Additive shift `c` with `sum e_k (s_k + c) = 0`.
fn constraint_shift(s: &[f64], e: &[f64]) -> f64 {
    let num: f64 = s.iter().zip(e).map(|(s, e)| s * e).sum();
    -num / e.iter().sum::<f64>()
}

/// `ln theta0` in log-weights, up to the additive constant `2 ln|a0| + (n/2) ln 4`.
struct Objective {
    /// `K_kl = (x_k - x_l)^2 + y_k^2 + y_l^2`
    kernel: DMatrix<f64>,
    /// `m_k = c_k exp(2 s_k)`: `c_k = 1` for real roots, `2` for pairs.
    mass: Vec<f64>,
    e: DVector<f64>,
    half_n: f64,
}

impl Objective {
    fn new(roots: &UpperRootSet) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for &alpha in &roots.real {
            if !alpha.is_finite() {
                return Err(root_at_infinity());
            }
            pts.push((alpha, 0.0));
        }
        pts.extend(roots.upper.iter().map(|p| (p.t, p.u)));
        let dim = pts.len();
        let kernel = DMatrix::from_fn(dim, dim, |k, l| {
            let (xk, yk) = pts[k];
            let (xl, yl) = pts[l];
            (xk - xl).powi(2) + yk * yk + yl * yl
        });
        let mass = std::iter::repeat_n(1.0, roots.real.len())
            .chain(std::iter::repeat_n(2.0, roots.upper.len()))
            .collect();
        Ok(Self {
            kernel,
            mass,
            e: DVector::from_vec(exponents(roots.real.len(), roots.upper.len())),
            half_n: roots.degree() as f64 / 2.0,
        })
    }

    fn masses(&self, s: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            s.len(),
            s.iter().zip(&self.mass).map(|(s, c)| c * (2.0 * s).exp()),
        )
    }

    fn value(&self, s: &DVector<f64>) -> f64 {
        let m = self.masses(s);
        let g = 0.5 * m.dot(&(&self.kernel * &m));
        self.half_n * g.ln() - self.e.dot(s)
    }

    fn gradient_hessian(&self, s: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let m = self.masses(s);
        let km = &self.kernel * &m;
        let g = 0.5 * m.dot(&km);
        let dg = DVector::from_iterator(m.len(), m.iter().zip(km.iter()).map(|(m, k)| 2.0 * m * k));
        let dim = m.len();
        let mut d2g = DMatrix::from_fn(dim, dim, |k, l| 4.0 * m[k] * m[l] * self.kernel[(k, l)]);
        for k in 0..dim {
            d2g[(k, k)] += 4.0 * m[k] * km[k];
        }
        let grad = &dg * (self.half_n / g) - &self.e;
        let hess = (d2g / g - (&dg * dg.transpose()) / (g * g)) * self.half_n;
        (grad, hess)
    }

    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        v - &self.e * (v.dot(&self.e) / self.e.norm_squared())
    }
}

/// Minimises `theta0` starting from unit weights.
pub fn minimize_theta0(f: &BinaryForm, tol: f64) -> Result<JuliaResult> {
    let roots = f.roots_upper(ROOT_TOL)?;
    let start = JuliaWeights::ones(roots.real.len(), roots.upper.len());
    minimize_theta0_from(f, &roots, &start, tol)
}

/// Equality-constrained damped Newton descent on `ln theta0` in log-weights.
pub fn minimize_theta0_from(
    f: &BinaryForm,
    roots: &UpperRootSet,
    start: &JuliaWeights,
    tol: f64,
) -> Result<JuliaResult> {
    check_signature(roots, start)?;
    let (r, s_count) = roots.signature();
    if s_count == 0 && r < 3 {
        return Err(Error::Domain(
            "Julia quadratic needs a non-real root or at least 3 real roots".into(),
        ));
    }
    leading_coeff(f)?;
    let obj = Objective::new(roots)?;
    let dim = r + s_count;

    let (s0, e) = start.to_log();
    let shift = constraint_shift(&s0, &e);
    let mut s = DVector::from_iterator(dim, s0.iter().map(|v| v + shift));
    let mut value = obj.value(&s);

    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        let (grad, hess) = obj.gradient_hessian(&s);
        let pg = obj.project(&grad);
        grad_norm = pg.norm();
        if grad_norm < tol {
            break;
        }
        iterations += 1;

        let mut dir = newton_direction(&hess, &grad, &obj.e)
            .filter(|d| d.dot(&grad) < 0.0)
            .unwrap_or_else(|| -&pg);
        // Keep the iterate on the constraint plane despite round-off.
        dir = obj.project(&dir);
        let slope = dir.dot(&grad);

        // Near the minimum the decrease drops below the round-off of `value`;
        // the slack lets the full Newton step through there instead of
        // shrinking the step until the iterate stops moving.
        let slack = 8.0 * f64::EPSILON * value.abs().max(1.0);
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-12 {
            let trial = &s + &dir * step;
            let v = obj.value(&trial);
            if v.is_finite() && v <= value + 1e-4 * step * slope + slack {
                s = trial;
                value = v;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if !(grad_norm < tol) {
        return Err(Error::NonConvergence {
            what: "theta0 minimisation",
            iterations,
        });
    }

    let weights = JuliaWeights::from_log(s.as_slice(), r);
    let quadratic = q_of_weights(roots, &weights)?;
    let theta = theta0(f, roots, &weights)?;
    let zero = quadratic.zero_map()?;
    Ok(JuliaResult {
        quadratic,
        theta,
        weights,
        zero,
        iterations,
        grad_norm,
    })
}

fn newton_direction(
    hess: &DMatrix<f64>,
    grad: &DVector<f64>,
    e: &DVector<f64>,
) -> Option<DVector<f64>> {
    let dim = grad.len();
    let mut kkt = DMatrix::zeros(dim + 1, dim + 1);
    kkt.view_mut((0, 0), (dim, dim)).copy_from(hess);
    for k in 0..dim {
        kkt[(k, dim)] = e[k];
        kkt[(dim, k)] = e[k];
    }
    let mut rhs = DVector::zeros(dim + 1);
    rhs.rows_mut(0, dim).copy_from(&(-grad));
    let sol = kkt.lu().solve(&rhs)?;
    let d = sol.rows(0, dim).into_owned();
    d.iter().all(|v| v.is_finite()).then_some(d)
}

/// Moves the Julia zero of `f` into the fundamental domain.
pub fn julia_reduce(f: &BinaryForm) -> Result<(BinaryForm, UnimodularMatrix)> {
    let res = minimize_theta0(f, DEFAULT_TOL)?;
    let (_, m) = reduce_to_fundamental(res.zero);
    Ok((f.transform(&m), m))
}
