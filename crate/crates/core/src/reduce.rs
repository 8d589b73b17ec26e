//! Reduction pipelines: centring by a zero map, integer shift descent and
//! rational scaling.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{BinaryForm, UnimodularMatrix, ROOT_TOL};
use crate::hyper::{center_of_mass, hyperbolic_centroid, reduce_to_fundamental, UhpPoint};
use crate::julia;

pub const DEFAULT_PATIENCE: usize = 3;
pub const DEFAULT_SCALE_BOUND: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Julia,
    Hyperbolic,
    Com,
    ShiftDescent,
    Scaling,
    Full,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Julia => "julia",
            Method::Hyperbolic => "hyperbolic",
            Method::Com => "com",
            Method::ShiftDescent => "shift-descent",
            Method::Scaling => "scaling",
            Method::Full => "full",
        }
    }
}

/// Rounding of half-integers when turning a centre into an integer shift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum TieRule {
    /// Ties away from zero.
    #[default]
    #[value(name = "zero")]
    AwayFromZero,
    /// Ties to the even integer.
    Even,
    /// Ties towards `+inf`.
    Up,
}

impl TieRule {
    pub fn name(self) -> &'static str {
        match self {
            TieRule::AwayFromZero => "away-from-zero",
            TieRule::Even => "half-even",
            TieRule::Up => "half-up",
        }
    }

    fn resolve(self, floor: i64) -> i64 {
        match self {
            TieRule::AwayFromZero => {
                if floor >= 0 {
                    floor + 1
                } else {
                    floor
                }
            }
            TieRule::Even => {
                if floor.is_even() {
                    floor
                } else {
                    floor + 1
                }
            }
            TieRule::Up => floor + 1,
        }
    }
}

/// Nearest integer to `x` with the given tie rule.
pub fn round_shift(x: f64, tie: TieRule) -> i64 {
    let floor = x.floor();
    let frac = x - floor;
    let floor = floor as i64;
    if frac < 0.5 {
        floor
    } else if frac > 0.5 {
        floor + 1
    } else {
        tie.resolve(floor)
    }
}

/// Nearest integer to an exact rational with the given tie rule.
pub fn round_ratio(x: &Ratio<i128>, tie: TieRule) -> i64 {
    let floor = x.floor();
    let frac = x - floor;
    let half = Ratio::new(1, 2);
    let floor = floor.to_integer() as i64;
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => tie.resolve(floor),
    }
}

/// Rounds `x` to `decimals` places the way correctly rounded decimal
/// formatting does: the exact binary value of `x` is rounded half-to-even.
pub fn round_decimals(x: f64, decimals: u32) -> f64 {
    let Some(exact) = BigRational::from_float(x) else {
        return x;
    };
    let scale = BigInt::from(10).pow(decimals);
    let scaled = exact * BigRational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = floor.to_integer();
    if frac > half || (frac == half && k.is_odd()) {
        k += 1;
    }
    k.to_f64().unwrap_or(f64::NAN) / scale.to_f64().unwrap_or(f64::NAN)
}

/// Converts a centre's real part into a shift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShiftRule {
    pub tie: TieRule,
    /// Round the centre to this many decimals before rounding to an integer.
    pub decimals: Option<u32>,
}

impl ShiftRule {
    pub fn new(tie: TieRule) -> Self {
        Self { tie, decimals: None }
    }

    pub fn apply(&self, t: f64) -> i64 {
        match self.decimals {
            Some(d) => round_shift(round_decimals(t, d), self.tie),
            None => round_shift(t, self.tie),
        }
    }
}

/// One stage of a pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub method: Method,
    pub height: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub input: BinaryForm,
    pub output: BinaryForm,
    pub matrix: UnimodularMatrix,
    /// Scaling `x -> (u / v) x` applied after the matrix.
    pub scale: (i64, i64),
    pub method: Method,
    pub input_height: BigInt,
    pub output_height: BigInt,
    pub zero_used: Option<UhpPoint>,
    pub stages: Vec<Stage>,
}

impl ReductionReport {
    fn new(
        input: &BinaryForm,
        output: BinaryForm,
        matrix: UnimodularMatrix,
        method: Method,
        zero_used: Option<UhpPoint>,
    ) -> Result<Self> {
        let output = output.primitive()?;
        let output_height = output.height()?;
        Ok(Self {
            input: input.clone(),
            input_height: input.height()?,
            output,
            output_height,
            matrix,
            scale: (1, 1),
            method,
            zero_used,
            stages: Vec::new(),
        })
    }

    /// Total shift when the matrix is a translation.
    pub fn shift(&self) -> Option<i64> {
        (self.matrix.a == 1 && self.matrix.c == 0 && self.matrix.d == 1).then_some(self.matrix.b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = |f: &BinaryForm| -> Vec<String> {
            f.coeffs().iter().map(ToString::to_string).collect()
        };
        serde_json::json!({
            "method": self.method.name(),
            "input": coeffs(&self.input),
            "output": coeffs(&self.output),
            "matrix": self.matrix.as_rows(),
            "scale": [self.scale.0, self.scale.1],
            "input_height": big_json(&self.input_height),
            "output_height": big_json(&self.output_height),
            "zero_used": self.zero_used.map(|z| [fixed6(z.t), fixed6(z.u)]),
            "stages": self.stages,
        })
    }
}

/// Integer as a JSON number when it fits in 64 bits, else as a decimal string.
pub fn big_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => v.into(),
        None => n.to_string().into(),
    }
}

/// `x` rounded to 6 decimals as a JSON number.
pub fn fixed6(x: f64) -> serde_json::Value {
    serde_json::from_str(&format!("{x:.6}")).unwrap_or(serde_json::Value::Null)
}

/// Moves the hyperbolic centroid of the roots into the fundamental domain.
pub fn reduce_hyperbolic(f: &BinaryForm) -> Result<ReductionReport> {
    let roots = f.roots_upper(ROOT_TOL)?;
    if !roots.real.is_empty() {
        return Err(Error::Domain(
            "hyperbolic reduction needs a form without real roots".into(),
        ));
    }
    let centroid = hyperbolic_centroid(&roots.upper)?;
    let (_, m) = reduce_to_fundamental(centroid.point);
    ReductionReport::new(f, f.transform(&m), m, Method::Hyperbolic, Some(centroid.point))
}

/// Shifts by the rounded real part of the centre of mass of the upper roots.
pub fn reduce_com(f: &BinaryForm, tie: TieRule) -> Result<ReductionReport> {
    let roots = f.roots_upper(ROOT_TOL)?;
    if roots.upper.is_empty() {
        return Err(Error::Domain("form has no non-real roots".into()));
    }
    let com = center_of_mass(&roots.upper)?;
    let k = round_shift(com.t, tie);
    let m = UnimodularMatrix::translation(k);
    ReductionReport::new(f, f.shift(k), m, Method::Com, Some(com))
}

/// Julia reduction by the true minimiser of `theta0`.
pub fn reduce_julia(f: &BinaryForm) -> Result<ReductionReport> {
    let res = julia::minimize_theta0(f, julia::DEFAULT_TOL)?;
    let (_, m) = reduce_to_fundamental(res.zero);
    ReductionReport::new(f, f.transform(&m), m, Method::Julia, Some(res.zero))
}

/// Which unit shifts lower the height.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShiftDirections {
    pub plus: bool,
    pub minus: bool,
}

impl ShiftDirections {
    pub fn symbols(&self) -> Vec<char> {
        let mut out = Vec::new();
        if self.plus {
            out.push('+');
        }
        if self.minus {
            out.push('-');
        }
        out
    }
}

pub fn shift_direction(f: &BinaryForm) -> Result<ShiftDirections> {
    let h = f.height()?;
    Ok(ShiftDirections {
        plus: f.shift(1).height()? < h,
        minus: f.shift(-1).height()? < h,
    })
}

/// Walks integer shifts while the height improves.
///
/// The returned position is locally optimal in the window `+-patience`:
/// no shift by `k` with `1 <= |k| <= patience` from it has smaller height.
pub fn shift_descent(f: &BinaryForm, patience: usize) -> Result<ReductionReport> {
    let f = f.primitive()?;
    let mut heights: BTreeMap<i64, BigInt> = BTreeMap::new();
    let mut height_at = |k: i64| -> Result<BigInt> {
        if let Some(h) = heights.get(&k) {
            return Ok(h.clone());
        }
        let h = f.shift(k).height()?;
        heights.insert(k, h.clone());
        Ok(h)
    };

    let dirs = shift_direction(&f)?;
    let order: [i64; 2] = if dirs.minus && !dirs.plus { [-1, 1] } else { [1, -1] };
    let mut best = 0i64;
    let mut best_h = height_at(0)?;
    'outer: loop {
        for step in order {
            let mut misses = 0;
            let mut pos = best;
            while misses < patience {
                pos += step;
                let h = height_at(pos)?;
                if h < best_h {
                    best = pos;
                    best_h = h;
                    continue 'outer;
                }
                misses += 1;
            }
        }
        break;
    }
    let mut report = ReductionReport::new(
        &f,
        f.shift(best),
        UnimodularMatrix::translation(best),
        Method::ShiftDescent,
        None,
    )?;
    report.input = f;
    Ok(report)
}

/// Largest window scanned by [`shift_window_min`].
pub const MAX_SHIFT_WINDOW: i64 = 200_000;

/// The height-minimising integer shift of `f` over all of `Z`, given that
/// shift 0 already has height `h`. The trailing coefficient of `f(x + k y, y)`
/// is `f(k, 1)`, and `|f(k, 1)| >= |a0| dist(k, [min Re, max Re])^n` over
/// the roots, so only `k` within `(h / |a0|)^(1/n)` of the root span can do
/// better. Ties go to the lexicographically smallest coefficient vector,
/// which depends only on the translation orbit.
///
/// Returns `None` when `a0 = 0` or the window exceeds [`MAX_SHIFT_WINDOW`].
pub fn shift_window_min(f: &BinaryForm) -> Result<Option<(i64, BinaryForm, BigInt)>> {
    let f = f.primitive()?;
    let a0 = f.coeffs()[0].abs();
    if a0.is_zero() {
        return Ok(None);
    }
    let h = f.height()?;
    let roots = f.roots_upper(ROOT_TOL)?;
    let re = roots.upper.iter().map(|p| p.t).chain(roots.real.iter().copied());
    let (lo, hi) = re.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let ratio = h.to_f64().unwrap_or(f64::INFINITY) / a0.to_f64().unwrap_or(f64::INFINITY);
    let reach = ratio.powf(1.0 / f.degree() as f64) + 1.0;
    let (k_lo, k_hi) = ((lo - reach).floor(), (hi + reach).ceil());
    if !(k_lo.is_finite() && k_hi.is_finite()) || k_hi - k_lo > MAX_SHIFT_WINDOW as f64 {
        return Ok(None);
    }
    let mut best: (i64, BinaryForm, BigInt) = (0, f.clone(), h);
    for k in k_lo as i64..=k_hi as i64 {
        let g = f.shift(k);
        let gh = g.height()?;
        if gh < best.2 || (gh == best.2 && g.coeffs() < best.1.coeffs()) {
            best = (k, g, gh);
        }
    }
    Ok(Some(best))
}

/// Largest `d` with `d^i | a_i` for `i = 1..n`, where `a_i` is the
/// coefficient of `x^i y^(n-i)`. Zero coefficients impose no condition.
pub fn weighted_gcd(f: &BinaryForm) -> BigInt {
    let n = f.degree();
    let nonzero: Vec<(u32, BigInt)> = (1..=n)
        .map(|i| (i as u32, f.ascending_coeff(i).abs()))
        .filter(|(_, a)| !a.is_zero())
        .collect();
    let Some(g) = nonzero.iter().map(|(_, a)| a.clone()).reduce(|g, a| g.gcd(&a)) else {
        return BigInt::one();
    };
    let mut q = BigInt::one();
    for p in prime_factors(&g) {
        let e = nonzero
            .iter()
            .map(|(i, a)| valuation(a, &p) / i)
            .min()
            .unwrap_or(0);
        q *= p.pow(e);
    }
    q
}

fn valuation(a: &BigInt, p: &BigInt) -> u32 {
    let mut a = a.clone();
    let mut v = 0;
    while !a.is_zero() && (&a % p).is_zero() {
        a /= p;
        v += 1;
    }
    v
}

/// Distinct prime factors by trial division; a cofactor left after the
/// division limit is returned as if prime.
fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    const LIMIT: u64 = 10_000_000;
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        if (&n % &bp).is_zero() {
            out.push(bp.clone());
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Scaling by the weighted gcd: with `q = wgcd(a_1, ..., a_n)` and
/// `p = gcd(a_0, q)`, returns the primitive form of `f(x / p, y)`.
pub fn scale_lemma(f: &BinaryForm) -> Result<ReductionReport> {
    let f = f.primitive()?;
    let q = weighted_gcd(&f);
    let p = f.ascending_coeff(0).gcd(&q);
    let p = if p.is_zero() { q } else { p };
    let n = f.degree();
    let coeffs = (0..=n)
        .rev()
        .map(|i| f.ascending_coeff(i) / p.pow(i as u32))
        .collect();
    let scaled = BinaryForm::from_raw(coeffs);
    let mut report = ReductionReport::new(
        &f,
        scaled,
        UnimodularMatrix::IDENTITY,
        Method::Scaling,
        None,
    )?;
    report.scale = (1, p.to_i64().unwrap_or(1));
    Ok(report)
}

/// Exhaustive search over `x -> (u / v) x` with `1 <= u, v <= bound`, coprime.
///
/// Ties prefer `u / v = 1`, then the smallest `u + v`, then the smallest `u`.
pub fn scale_search(f: &BinaryForm, bound: i64) -> Result<ReductionReport> {
    let f = f.primitive()?;
    let n = f.degree();
    let lead = f.coeffs()[0].clone();
    let trail = f.coeffs()[n].clone();
    let mut best = (f.height()?, 1i64, 1i64, f.clone());
    for u in 1..=bound.max(1) {
        if !supported_by(u, &trail) {
            continue;
        }
        for v in 1..=bound.max(1) {
            if (u == 1 && v == 1) || u.gcd(&v) != 1 || !supported_by(v, &lead) {
                continue;
            }
            let g = f.scale(u, v).primitive()?;
            let h = g.height()?;
            let better = match h.cmp(&best.0) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => {
                    (best.1, best.2) != (1, 1)
                        && (u + v, u) < (best.1 + best.2, best.1)
                }
                std::cmp::Ordering::Greater => false,
            };
            if better {
                best = (h, u, v, g);
            }
        }
    }
    let (_, u, v, g) = best;
    let mut report = ReductionReport::new(&f, g, UnimodularMatrix::IDENTITY, Method::Scaling, None)?;
    report.scale = (u, v);
    Ok(report)
}

/// True when every prime factor of `k` divides `c` (always true for `c = 0`).
/// Scaling by `k` can only enlarge the content at such primes.
fn supported_by(k: i64, c: &BigInt) -> bool {
    if c.is_zero() {
        return true;
    }
    let c_mod = (c % BigInt::from(k)).to_i64().unwrap_or(0).abs();
    let mut rest = k;
    loop {
        let g = rest.gcd(&c_mod);
        let g = if c_mod == 0 { rest } else { g };
        if g == 1 {
            return rest == 1;
        }
        while rest % g == 0 {
            rest /= g;
        }
        if rest == 1 {
            return true;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimizeOptions {
    pub patience: usize,
    pub scale_bound: i64,
    pub tie: TieRule,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            patience: DEFAULT_PATIENCE,
            scale_bound: DEFAULT_SCALE_BOUND,
            tie: TieRule::default(),
        }
    }
}

/// Full pipeline: centre by the hyperbolic centroid and the centre of mass
/// (Julia zero when all roots are real), descend by shifts from each centre,
/// keep the lower height, then scale.
pub fn minimize(f: &BinaryForm, opts: &MinimizeOptions) -> Result<ReductionReport> {
    let input = f.primitive()?;
    let input_height = input.height()?;
    if input.degree() < 2 {
        return Err(Error::Domain("minimize needs degree at least 2".into()));
    }

    let mut starts = Vec::new();
    match reduce_hyperbolic(&input) {
        Ok(r) => starts.push(r),
        Err(Error::Domain(_)) => {}
        Err(e) => return Err(e),
    }
    match reduce_com(&input, opts.tie) {
        Ok(r) => starts.push(r),
        Err(Error::Domain(_)) => {}
        Err(e) => return Err(e),
    }
    if starts.is_empty() {
        starts.push(reduce_julia(&input)?);
    }

    // Candidate centrings. A centre within rounding noise of a half-integer
    // contributes both neighbouring shifts, so the result does not depend on
    // where along the translation orbit the input sits.
    let mut bases: Vec<(UnimodularMatrix, Method, Option<UhpPoint>)> = Vec::new();
    for start in &starts {
        bases.push((start.matrix, start.method, start.zero_used));
        if let (Some(k), Some(z)) = (start.shift(), start.zero_used) {
            let frac = z.t - z.t.floor();
            if (frac - 0.5).abs() < 1e-9 {
                let other = if z.t > k as f64 { k + 1 } else { k - 1 };
                bases.push((UnimodularMatrix::translation(other), start.method, start.zero_used));
            }
        }
    }

    // Descents always start from a centre, so that the candidates move with
    // the input along its translation orbit.
    let mut best: Option<(UnimodularMatrix, BigInt, ReductionReport, Method, Option<UhpPoint>)> = None;
    for (m, method, zero) in bases {
        let centred = input.transform(&m).primitive()?;
        let centred_h = centred.height()?;
        let descent = shift_descent(&centred, opts.patience)?;
        let better = best
            .as_ref()
            .is_none_or(|(_, _, d, _, _)| descent.output_height < d.output_height);
        if better {
            best = Some((m, centred_h, descent, method, zero));
        }
    }
    let (centre_m, centre_h, descent, centre_method, zero) = best.expect("at least one starting point");

    // Stages never raise the height: a worse centring or descent leaves the
    // current form unchanged.
    let (mut current, mut matrix, mut current_h) = (input.clone(), UnimodularMatrix::IDENTITY, input_height.clone());
    let mut stages = vec![Stage {
        method: Method::Full,
        height: input_height.to_string(),
    }];
    if centre_h <= current_h {
        current = input.transform(&centre_m).primitive()?;
        matrix = centre_m;
        current_h = centre_h;
    }
    stages.push(Stage {
        method: centre_method,
        height: current_h.to_string(),
    });
    if descent.output_height <= current_h {
        current = descent.output.clone();
        matrix = centre_m.compose(&descent.matrix);
        current_h = descent.output_height.clone();
    }
    // The descent is local; the window scan certifies the shift optimum.
    if let Some((k, g, gh)) = shift_window_min(&current)? {
        current = g;
        matrix = matrix.compose(&UnimodularMatrix::translation(k));
        current_h = gh;
    }
    stages.push(Stage {
        method: Method::ShiftDescent,
        height: current_h.to_string(),
    });

    let scaled = scale_search(&current, opts.scale_bound)?;
    stages.push(Stage {
        method: Method::Scaling,
        height: scaled.output_height.to_string(),
    });

    let mut report = ReductionReport::new(&input, scaled.output, matrix, Method::Full, zero)?;
    report.scale = scaled.scale;
    report.stages = stages;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64s(c).unwrap()
    }

    fn triangle() -> BinaryForm {
        BinaryForm::from_upper_roots(&[(1, 19), (2, 19), (19, 1)]).unwrap()
    }

    fn pentagon() -> BinaryForm {
        BinaryForm::from_upper_roots(&[(1, 5), (1, 6), (2, 6), (3, 3), (6, 1)]).unwrap()
    }

    #[test]
    fn rounding_rules() {
        assert_eq!(round_shift(2.5, TieRule::AwayFromZero), 3);
        assert_eq!(round_shift(-2.5, TieRule::AwayFromZero), -3);
        assert_eq!(round_shift(2.5, TieRule::Even), 2);
        assert_eq!(round_shift(-2.5, TieRule::Up), -2);
        assert_eq!(round_shift(2.4999, TieRule::Up), 2);
        assert_eq!(round_ratio(&Ratio::new(-5, 2), TieRule::Even), -2);
        assert_eq!(round_ratio(&Ratio::new(52, 3), TieRule::Up), 17);
        // 0.495 is stored below the tie, 4.125 is an exact binary tie.
        assert_eq!(round_decimals(0.495, 2), 0.49);
        assert_eq!(round_decimals(4.125, 2), 4.12);
        assert_eq!(round_decimals(4.135, 2), 4.13);
        assert_eq!(round_decimals(4.375, 2), 4.38);
        let rule = ShiftRule {
            tie: TieRule::Up,
            decimals: Some(2),
        };
        assert_eq!(rule.apply(2.4951), 3);
        assert_eq!(ShiftRule::new(TieRule::Up).apply(2.4951), 2);
    }

    #[test]
    fn hyperbolic_examples() {
        let r = reduce_hyperbolic(&triangle()).unwrap();
        assert_eq!(r.shift(), Some(17));
        assert_eq!(r.output_height, BigInt::from(1_807_810));
        let r = reduce_hyperbolic(&pentagon()).unwrap();
        assert_eq!(r.shift(), Some(4));
        assert_eq!(r.output_height, BigInt::from(3_060_000));
        let r = reduce_hyperbolic(&form(&[1, 0, 1])).unwrap();
        assert!(r.matrix.is_identity());
        assert!(matches!(reduce_hyperbolic(&form(&[1, 0, -1])), Err(Error::Domain(_))));
    }

    #[test]
    fn com_examples() {
        let r = reduce_com(&triangle(), TieRule::default()).unwrap();
        assert_eq!(r.shift(), Some(7));
        assert_eq!(r.output_height, BigInt::from(22_220_090));
        let r = reduce_com(&pentagon(), TieRule::default()).unwrap();
        assert_eq!(r.shift(), Some(3));
        assert_eq!(r.output_height, BigInt::from(3_862_800));
        let r = reduce_com(&form(&[1, 0, 1]), TieRule::default()).unwrap();
        assert!(r.matrix.is_identity());
        assert!(reduce_com(&form(&[1, 0, -1]), TieRule::default()).is_err());
    }

    #[test]
    fn direction_examples() {
        let d = shift_direction(&triangle().shift(17)).unwrap();
        assert_eq!(d.symbols(), vec!['+']);
        let d = shift_direction(&triangle().shift(19)).unwrap();
        assert!(d.symbols().is_empty());
        assert!(shift_direction(&form(&[1, 0, 1])).unwrap().symbols().is_empty());
    }

    #[test]
    fn descent_examples() {
        let r = shift_descent(&triangle().shift(17), 3).unwrap();
        assert_eq!(r.shift(), Some(2));
        assert_eq!(r.output_height, BigInt::from(447_809));
        let r = shift_descent(&pentagon().shift(4), 3).unwrap();
        assert_eq!(r.shift(), Some(1));
        assert_eq!(r.output_height, BigInt::from(2_494_440));
        let r = shift_descent(&form(&[1, 0, 1]), 3).unwrap();
        assert!(r.matrix.is_identity());
    }

    #[test]
    fn weighted_gcd_definition() {
        // ascending a = (8, 4, 2, 1) -> descending [1, 2, 4, 8]; d^3 | 1 forces 1
        assert_eq!(weighted_gcd(&form(&[1, 2, 4, 8])), BigInt::one());
        // ascending a = (5, 12, 36, 8): d | 12, d^2 | 36, d^3 | 8 -> 2
        assert_eq!(weighted_gcd(&form(&[8, 36, 12, 5])), BigInt::from(2));
        // ascending a = (3, 0, 0, 27): d^3 | 27 -> 3
        assert_eq!(weighted_gcd(&form(&[27, 0, 0, 3])), BigInt::from(3));
    }

    #[test]
    fn scale_lemma_examples() {
        let f = triangle();
        assert_eq!(scale_lemma(&f).unwrap().output, f);
        let f = form(&[1, 2, 4, 8]);
        assert_eq!(scale_lemma(&f).unwrap().output, f);
        let f = form(&[1, 0, 4]);
        assert_eq!(scale_lemma(&f).unwrap().output, f);
        // p divides a_0 and p^i divides a_i, so p > 1 would make f imprimitive:
        // on primitive input the lemma never changes the form.
        let f = form(&[8, 36, 12, 5]);
        assert_eq!(weighted_gcd(&f), BigInt::from(2));
        assert_eq!(scale_lemma(&f).unwrap().output, f);
        // 27 x^3 + 3 y^3 is taken to its primitive part first
        let r = scale_lemma(&form(&[27, 0, 0, 3])).unwrap();
        assert_eq!(r.output, form(&[9, 0, 0, 1]));
    }

    #[test]
    fn scale_search_examples() {
        let r = scale_search(&form(&[1, 0, 4]), 2).unwrap();
        assert_eq!(r.output, form(&[1, 0, 1]));
        assert_eq!(r.scale, (2, 1));
        // x -> x / 2: x^3 / 2 + y^3, cleared to x^3 + 2 y^3
        let r = scale_search(&form(&[4, 0, 0, 1]), 2).unwrap();
        assert_eq!(r.output, form(&[1, 0, 0, 2]));
        assert_eq!(r.scale, (1, 2));
        let r = scale_search(&form(&[1, 1, 1]), 64).unwrap();
        assert_eq!(r.scale, (1, 1));
        assert_eq!(r.output, form(&[1, 1, 1]));
    }

    #[test]
    fn minimize_examples() {
        let opts = MinimizeOptions::default();
        let r = minimize(&triangle(), &opts).unwrap();
        assert_eq!(r.output_height, BigInt::from(447_809));
        assert_eq!(r.shift(), Some(19));
        // shifts alone stop at 2 494 440; x -> 2x then clears a factor 8
        let r = minimize(&pentagon(), &opts).unwrap();
        let descent = r.stages.iter().find(|s| s.method == Method::ShiftDescent).unwrap();
        assert_eq!(descent.height, "2494440");
        assert_eq!(r.scale, (2, 1));
        assert_eq!(r.output_height, BigInt::from(497_102));
        let r = minimize(&form(&[1, 0, 1]), &opts).unwrap();
        assert_eq!(r.output, form(&[1, 0, 1]));
        // all real roots: Julia branch
        let r = minimize(&form(&[1, 0, -7, 0, 6]).shift(40), &opts).unwrap();
        assert!(r.output_height <= r.input_height);
    }

    #[test]
    fn report_json_shape() {
        let r = reduce_hyperbolic(&triangle()).unwrap();
        let v = r.to_json();
        assert_eq!(v["output_height"], 1_807_810);
        assert_eq!(v["method"], "hyperbolic");
        assert_eq!(v["matrix"], serde_json::json!([[1, 17], [0, 1]]));
        assert_eq!(v["input"][6], "47831060");
    }
}
