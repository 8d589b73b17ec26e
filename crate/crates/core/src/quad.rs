//! Binary quadratic forms `[a, b, c] = a x^2 + b x y + c y^2`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::UnimodularMatrix;
use crate::hyper::UhpPoint;

/// Integer binary quadratic form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadraticForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// Parses `"a,b,c"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::InvalidForm(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match <[BigInt; 3]>::try_from(parts) {
            Ok([a, b, c]) => Ok(Self { a, b, c }),
            Err(p) => Err(Error::InvalidForm(format!(
                "a quadratic form needs 3 coefficients, got {}",
                p.len()
            ))),
        }
    }

    /// `b^2 - 4ac`.
    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a.is_positive() && self.discriminant().is_negative()
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    /// `|b| <= a <= c`.
    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c
    }

    /// `Q(a' x + b' y, c' x + d' y)`.
    pub fn transform(&self, m: &UnimodularMatrix) -> Self {
        let (p, q, r, s) = (
            BigInt::from(m.a),
            BigInt::from(m.b),
            BigInt::from(m.c),
            BigInt::from(m.d),
        );
        let (a, b, c) = (&self.a, &self.b, &self.c);
        Self {
            a: a * &p * &p + b * &p * &r + c * &r * &r,
            b: BigInt::from(2) * a * &p * &q + b * (&p * &s + &q * &r) + BigInt::from(2) * c * &r * &s,
            c: a * &q * &q + b * &q * &s + c * &s * &s,
        }
    }

    pub fn to_real(&self) -> RealQuadratic {
        RealQuadratic::new(
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN),
            self.c.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn zero_map(&self) -> Result<UhpPoint> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        self.to_real().zero_map()
    }

    /// Reduces a positive definite form by the translate/flip loop.
    ///
    /// Returns `(Q', M)` with `Q.transform(M) == Q'` and `|b'| <= a' <= c'`;
    /// boundary cases `|b'| = a'` and `a' = c'` have `b' >= 0`.
    pub fn reduce(&self) -> Result<(Self, UnimodularMatrix)> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let mut q = self.clone();
        let mut m = UnimodularMatrix::IDENTITY;
        loop {
            // Bring b into (-a, a] with x -> x + k y, k = round-down of (a - b) / 2a.
            let two_a = BigInt::from(2) * &q.a;
            let k = (&q.a - &q.b).div_floor(&two_a);
            if !k.is_zero() {
                let k = k.to_i64().ok_or_else(|| {
                    Error::Domain("reduction step does not fit in a 64-bit matrix".into())
                })?;
                let t = UnimodularMatrix::translation(k);
                q = q.transform(&t);
                m = m.compose(&t);
            }
            if q.a > q.c || (q.a == q.c && q.b.is_negative()) {
                q = q.transform(&UnimodularMatrix::INVERSION);
                m = m.compose(&UnimodularMatrix::INVERSION);
            } else {
                break;
            }
        }
        Ok((q, m))
    }
}

/// All reduced forms of discriminant `-d`, up to the boundary identifications
/// `[a, b, a] ~ [a, -b, a]` and `[a, a, c] ~ [a, -a, c]`. With `primitive_only`
/// the count is the class number `h(-d)`.
pub fn enumerate_reduced(d: i64, primitive_only: bool) -> Result<Vec<QuadraticForm>> {
    if d <= 0 || !matches!(d % 4, 0 | 3) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let b_max = (d / 3).sqrt();
    let mut out = Vec::new();
    for b in -b_max..=b_max {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b * b + d) / 4;
        let mut a = b.abs().max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                let boundary = b.abs() == a || a == c;
                if !(boundary && b < 0) {
                    let q = QuadraticForm::new(a, b, c);
                    if !primitive_only || q.is_primitive() {
                        out.push(q);
                    }
                }
            }
            a += 1;
        }
    }
    out.sort();
    Ok(out)
}

/// Real binary quadratic form, used for Julia and centroid quadratics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RealQuadratic {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `(x - z y)(x - conj(z) y)`.
    pub fn from_root(z: UhpPoint) -> Self {
        Self::new(1.0, -2.0 * z.t, z.norm_sqr())
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.discriminant() < 0.0
    }

    pub fn add_scaled(&self, other: &Self, w: f64) -> Self {
        Self::new(self.a + w * other.a, self.b + w * other.b, self.c + w * other.c)
    }

    /// `(-b / 2a, sqrt|D| / 2a)`.
    pub fn zero_map(&self) -> Result<UhpPoint> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let two_a = 2.0 * self.a;
        Ok(UhpPoint::new_unchecked(
            -self.b / two_a,
            self.discriminant().abs().sqrt() / two_a,
        ))
    }
}
