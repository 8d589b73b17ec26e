//! Integer binary forms, their heights, and the `SL2(Z)` substitution action.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hyper::UhpPoint;

/// Default relative tolerance for classifying numerical roots as real.
pub const ROOT_TOL: f64 = 1e-8;

/// A binary form `c0 x^n + c1 x^(n-1) y + ... + cn y^n` with exact integer
/// coefficients stored in descending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    /// Builds a form from descending-power coefficients.
    ///
    /// Rejects degree 0, the zero form, and forms where both the leading and
    /// trailing coefficients vanish.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidForm("degree must be at least 1".into()));
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::ZeroForm);
        }
        if coeffs[0].is_zero() && coeffs[coeffs.len() - 1].is_zero() {
            return Err(Error::InvalidForm(
                "leading and trailing coefficients are both zero".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    // Results of substitutions on a valid form; skips the end-coefficient check.
    pub(crate) fn from_raw(coeffs: Vec<BigInt>) -> Self {
        debug_assert!(coeffs.len() >= 2);
        Self { coeffs }
    }

    /// Parses comma-separated decimal integers, descending x-power.
    pub fn parse_coeffs(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::InvalidForm(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients in descending powers of `x`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient `a_i` of `x^i y^(n-i)` (ascending x-power indexing).
    pub fn ascending_coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[self.degree() - i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and makes the leading nonzero coefficient positive.
    pub fn primitive(&self) -> Result<Self> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::ZeroForm);
        }
        let lead_negative = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(Signed::is_negative);
        let g = if lead_negative { -g } else { g };
        Ok(Self::from_raw(self.coeffs.iter().map(|c| c / &g).collect()))
    }

    /// Naive height: the largest absolute coefficient of the primitive form.
    pub fn height(&self) -> Result<BigInt> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::ZeroForm);
        }
        let max = self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default();
        Ok(max / g)
    }

    /// Totally complex form `prod (x^2 - 2 x_j x y + (x_j^2 + y_j^2) y^2)` with
    /// roots at the Gaussian integers `x_j + i y_j`.
    pub fn from_upper_roots(roots: &[(i64, i64)]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::Empty("root list"));
        }
        if let Some(&(x, y)) = roots.iter().find(|&&(_, y)| y < 1) {
            return Err(Error::Domain(format!(
                "root {x}+{y}i is not in the upper half-plane"
            )));
        }
        let mut coeffs = vec![BigInt::one()];
        for &(x, y) in roots {
            let q = [
                BigInt::one(),
                BigInt::from(-2 * x),
                BigInt::from(x * x + y * y),
            ];
            coeffs = poly_mul(&coeffs, &q);
        }
        Ok(Self::from_raw(coeffs))
    }

    /// `f(a x + b y, c x + d y)` for `M = [[a, b], [c, d]]`.
    pub fn transform(&self, m: &UnimodularMatrix) -> Self {
        let n = self.degree();
        let l1 = [BigInt::from(m.a), BigInt::from(m.b)];
        let l2 = [BigInt::from(m.c), BigInt::from(m.d)];
        // powers[k] = l^k as a form of degree k
        let pow1 = linear_powers(&l1, n);
        let pow2 = linear_powers(&l2, n);
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = poly_mul(&pow1[n - i], &pow2[i]);
            for (o, t) in out.iter_mut().zip(term) {
                *o += c * t;
            }
        }
        Self::from_raw(out)
    }

    /// `f(x + m y, y)`; moves every root by `-m`.
    pub fn shift(&self, m: i64) -> Self {
        if m == 0 {
            return self.clone();
        }
        // Taylor shift of f(x, 1) by repeated synthetic division.
        let m = BigInt::from(m);
        let mut c = self.coeffs.clone();
        let n = self.degree();
        for i in 0..n {
            for j in 1..=(n - i) {
                let prev = &c[j - 1] * &m;
                c[j] += prev;
            }
        }
        Self::from_raw(c)
    }

    /// Coefficients of `f(u x, v y)` divided by nothing: `c_i u^(n-i) v^i`.
    pub fn scale(&self, u: i64, v: i64) -> Self {
        let n = self.degree();
        let (u, v) = (BigInt::from(u), BigInt::from(v));
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * u.pow((n - i) as u32) * v.pow(i as u32))
            .collect();
        Self::from_raw(coeffs)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Numerical roots of `f(x, 1)`, split into upper-half-plane representatives
    /// of conjugate pairs and real roots. A vanishing leading coefficient
    /// contributes real roots at infinity.
    pub fn roots_upper(&self, tol: f64) -> Result<UpperRootSet> {
        let coeffs = self.to_f64s();
        let n = self.degree();
        let lead_zeros = coeffs.iter().take_while(|c| **c == 0.0).count();
        if lead_zeros > n {
            return Err(Error::ZeroForm);
        }
        let poly = &coeffs[lead_zeros..];
        let exact: Vec<DoubleDouble> = self.coeffs[lead_zeros..]
            .iter()
            .map(DoubleDouble::from_big)
            .collect();
        let mut roots = aberth_roots(&exact, poly)?;
        let rough = roots.clone();
        for (i, z) in roots.iter_mut().enumerate() {
            // A polished root that moved halfway to a neighbour belongs to it; keep the original.
            let gap = rough
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| (w - *z).norm())
                .fold(f64::INFINITY, f64::min);
            let p = polish(&exact, *z);
            if (p - *z).norm() < 0.5 * gap {
                *z = p;
            }
        }

        let mut upper = Vec::new();
        let mut lower = 0usize;
        let mut real = vec![f64::INFINITY; lead_zeros];
        for z in &roots {
            let scale = tol * (1.0 + z.norm());
            if z.im > scale {
                upper.push(UhpPoint::new_unchecked(z.re, z.im));
            } else if z.im < -scale {
                lower += 1;
            } else {
                real.push(z.re);
            }
        }
        if upper.len() != lower || real.len() + 2 * upper.len() != n {
            return Err(Error::NonConvergence {
                what: "conjugate root pairing",
                iterations: 0,
            });
        }
        upper.sort_by(|p, q| p.t.total_cmp(&q.t).then(p.u.total_cmp(&q.u)));
        real.sort_by(f64::total_cmp);

        let sep = tol.sqrt();
        let repeated = roots.iter().enumerate().any(|(i, z)| {
            roots[i + 1..]
                .iter()
                .any(|w| (z - w).norm() <= sep * (1.0 + z.norm()))
        });
        Ok(UpperRootSet {
            upper,
            real,
            repeated,
        })
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn poly_mul(p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn linear_powers(l: &[BigInt; 2], n: usize) -> Vec<Vec<BigInt>> {
    let mut pows = Vec::with_capacity(n + 1);
    pows.push(vec![BigInt::one()]);
    for k in 1..=n {
        let next = poly_mul(&pows[k - 1], l);
        pows.push(next);
    }
    pows
}

/// Simultaneous Aberth-Ehrlich iteration on a polynomial given by descending
/// coefficients with nonzero leading term. Values are computed in
/// double-double so that tight clusters (as produced by large unimodular
/// maps) are still separated.
fn aberth_roots(exact: &[DoubleDouble], coeffs: &[f64]) -> Result<Vec<Complex64>> {
    const MAX_ITER: usize = 500;
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if deg == 1 {
        return Ok(vec![Complex64::new(-monic[1], 0.0)]);
    }

    // Fujiwara-style radius bound for the initial circle.
    let radius = monic[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs().powf(1.0 / (k as f64 + 1.0)))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    let centre = -monic[1] / deg as f64;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, angle)
        })
        .collect();

    let eval = |x: Complex64| eval_dd(exact, x);

    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut max_step = 0.0_f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && z.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonConvergence {
            what: "Aberth root iteration",
            iterations: MAX_ITER,
        });
    }
    Ok(z)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl DoubleDouble {
    fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    fn from_big(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        let rest = BigInt::from_f64(hi).map(|h| n - h);
        let lo = rest.and_then(|r| r.to_f64()).unwrap_or(0.0);
        Self::new(hi, lo)
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        Self::new(s, e + self.lo + o.lo)
    }

    fn mul_f64(self, x: f64) -> Self {
        let p = self.hi * x;
        let e = self.hi.mul_add(x, -p);
        Self::new(p, e + self.lo * x)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

#[derive(Clone, Copy)]
struct ComplexDd {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl ComplexDd {
    const ZERO: Self = Self {
        re: DoubleDouble { hi: 0.0, lo: 0.0 },
        im: DoubleDouble { hi: 0.0, lo: 0.0 },
    };

    fn mul_add(self, x: Complex64, c: Self) -> Self {
        Self {
            re: self.re.mul_f64(x.re).add(self.im.mul_f64(x.im).neg()).add(c.re),
            im: self.re.mul_f64(x.im).add(self.im.mul_f64(x.re)).add(c.im),
        }
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}

/// `(p(x), p'(x))` by Horner's rule in double-double arithmetic, for exact
/// integer coefficients `c` and a double-precision point `x`.
fn eval_dd(c: &[DoubleDouble], x: Complex64) -> (Complex64, Complex64) {
    let mut p = ComplexDd::ZERO;
    let mut dp = ComplexDd::ZERO;
    for &a in c {
        dp = dp.mul_add(x, p);
        p = p.mul_add(
            x,
            ComplexDd {
                re: a,
                im: DoubleDouble { hi: 0.0, lo: 0.0 },
            },
        );
    }
    (p.to_complex(), dp.to_complex())
}

/// Newton steps with an accurately evaluated residual, so that clustered
/// roots are resolved to nearly full double precision.
fn polish(exact: &[DoubleDouble], mut z: Complex64) -> Complex64 {
    for _ in 0..6 {
        let (p, dp) = eval_dd(exact, z);
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// A 2x2 integer matrix `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    /// `S = [[0, -1], [1, 0]]`, acting on the plane as `z -> -1/z`.
    pub const INVERSION: Self = Self {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if (a as i128) * (d as i128) - (b as i128) * (c as i128) != 1 {
            return Err(Error::NotUnimodular(a, b, c, d));
        }
        Ok(Self { a, b, c, d })
    }

    /// `[[1, m], [0, 1]]`; as a substitution this is `x -> x + m y`.
    pub fn translation(m: i64) -> Self {
        Self {
            a: 1,
            b: m,
            c: 0,
            d: 1,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Matrix product `self * rhs`. Substituting by `self` and then by `rhs`
    /// equals substituting by the product.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn as_rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

impl Default for UnimodularMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Roots of a real form: one upper-half-plane point per conjugate pair and
/// the real roots (possibly `+inf` for a vanishing leading coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct UpperRootSet {
    pub upper: Vec<UhpPoint>,
    pub real: Vec<f64>,
    /// Set when two computed roots coincide to working precision.
    pub repeated: bool,
}

impl UpperRootSet {
    /// `(r, s)`: number of real roots and of conjugate pairs.
    pub fn signature(&self) -> (usize, usize) {
        (self.real.len(), self.upper.len())
    }

    pub fn degree(&self) -> usize {
        self.real.len() + 2 * self.upper.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64s(c).unwrap()
    }

    const TRIANGLE: [i64; 7] = [1, -44, 1325, -32280, 480964, -5809376, 47831060];

    #[test]
    fn content_examples() {
        assert_eq!(form(&[2, 4, 6]).content(), BigInt::from(2));
        assert_eq!(form(&TRIANGLE).content(), BigInt::from(1));
        assert_eq!(form(&[-3, -6]).content(), BigInt::from(3));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(form(&[2, 4, 6]).primitive().unwrap(), form(&[1, 2, 3]));
        assert_eq!(form(&[-1, 0, -1]).primitive().unwrap(), form(&[1, 0, 1]));
        assert_eq!(form(&[8, 0, 0, 4]).primitive().unwrap(), form(&[2, 0, 0, 1]));
        assert_eq!(form(&[0, -2, 4]).primitive().unwrap(), form(&[0, 1, -2]));
    }

    #[test]
    fn height_examples() {
        assert_eq!(form(&TRIANGLE).height().unwrap(), BigInt::from(47_831_060));
        assert_eq!(form(&[2, 4, 6]).height().unwrap(), BigInt::from(3));
        assert_eq!(
            form(&TRIANGLE).shift(19).height().unwrap(),
            BigInt::from(447_809)
        );
    }

    #[test]
    fn rejects_invalid_forms() {
        assert!(matches!(BinaryForm::from_i64s(&[0, 0, 0]), Err(Error::ZeroForm)));
        assert!(BinaryForm::from_i64s(&[5]).is_err());
        assert!(BinaryForm::from_i64s(&[0, 1, 0]).is_err());
        assert!(BinaryForm::parse_coeffs("1, x, 2").is_err());
        assert_eq!(BinaryForm::parse_coeffs("1, -2,3").unwrap(), form(&[1, -2, 3]));
    }

    #[test]
    fn from_upper_roots_examples() {
        assert_eq!(BinaryForm::from_upper_roots(&[(0, 1)]).unwrap(), form(&[1, 0, 1]));
        assert_eq!(
            BinaryForm::from_upper_roots(&[(1, 19), (2, 19), (19, 1)]).unwrap(),
            form(&TRIANGLE)
        );
        let pentagon =
            BinaryForm::from_upper_roots(&[(1, 5), (1, 6), (2, 6), (3, 3), (6, 1)]).unwrap();
        assert_eq!(pentagon.degree(), 10);
        assert_eq!(pentagon.coeffs()[10], BigInt::from(25_627_680));
        assert_eq!(pentagon.height().unwrap(), BigInt::from(25_627_680));
        assert!(matches!(
            BinaryForm::from_upper_roots(&[]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn transform_examples() {
        let f = form(&TRIANGLE);
        assert_eq!(f.transform(&UnimodularMatrix::IDENTITY), f);
        let t7 = f.transform(&UnimodularMatrix::translation(7));
        assert_eq!(t7.height().unwrap(), BigInt::from(22_220_090));
        assert_eq!(t7, f.shift(7));
        let t17 = f.transform(&UnimodularMatrix::translation(17));
        assert_eq!(t17.height().unwrap(), BigInt::from(1_807_810));
        // Substitution by S: f(-y, x) reverses coefficients with alternating signs.
        let g = form(&[1, 2, 3]).transform(&UnimodularMatrix::INVERSION);
        assert_eq!(g, form(&[3, -2, 1]));
    }

    #[test]
    fn shift_examples() {
        let f = form(&TRIANGLE);
        let expected = BinaryForm::from_upper_roots(&[(0, 1), (-17, 19), (-18, 19)]).unwrap();
        assert_eq!(f.shift(19), expected);
        assert_eq!(f.shift(0), f);
        let pentagon =
            BinaryForm::from_upper_roots(&[(1, 5), (1, 6), (2, 6), (3, 3), (6, 1)]).unwrap();
        assert_eq!(pentagon.shift(5).height().unwrap(), BigInt::from(2_494_440));
    }

    #[test]
    fn roots_upper_examples() {
        let r = form(&[1, 0, 1]).roots_upper(ROOT_TOL).unwrap();
        assert_eq!(r.signature(), (0, 1));
        assert!((r.upper[0].t).abs() < 1e-12 && (r.upper[0].u - 1.0).abs() < 1e-12);

        let r = form(&TRIANGLE).roots_upper(ROOT_TOL).unwrap();
        let expected = [(1.0, 19.0), (2.0, 19.0), (19.0, 1.0)];
        assert_eq!(r.upper.len(), 3);
        for (p, (x, y)) in r.upper.iter().zip(expected) {
            assert!((p.t - x).abs() < 1e-8 && (p.u - y).abs() < 1e-8, "{p:?}");
        }
        assert!(!r.repeated);

        let r = form(&[1, 0, -1]).roots_upper(ROOT_TOL).unwrap();
        assert_eq!(r.signature(), (2, 0));
        assert!((r.real[0] + 1.0).abs() < 1e-12 && (r.real[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roots_flag_repeats_and_infinity() {
        // (x^2 + y^2)^2
        let r = form(&[1, 0, 2, 0, 1]).roots_upper(ROOT_TOL).unwrap();
        assert!(r.repeated);
        assert_eq!(r.signature(), (0, 2));
        // y (x^2 + y^2): root at infinity
        let r = form(&[0, 1, 0, 1]).roots_upper(ROOT_TOL).unwrap();
        assert_eq!(r.signature(), (1, 1));
        assert!(r.real[0].is_infinite());
    }

    #[test]
    fn unimodular_checks() {
        assert!(UnimodularMatrix::new(2, 1, 1, 1).is_ok());
        assert!(matches!(
            UnimodularMatrix::new(2, 0, 0, 1),
            Err(Error::NotUnimodular(..))
        ));
        let m = UnimodularMatrix::new(2, 3, 1, 2).unwrap();
        assert!(m.compose(&m.inverse()).is_identity());
    }
}
