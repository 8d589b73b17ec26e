//! n-gon databases of totally complex forms with Gaussian-integer roots, and
//! the experiments run over them.
//!
//! Enumeration is in lexicographic order of sorted root sets. Parallel runs
//! partition by the index of the first root and merge partitions back in
//! index order, so output never depends on the worker count.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::binomial;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::forms::{BinaryForm, UpperRootSet};
use crate::hyper::{centroid_t_parts, dist_h, UhpPoint};
use crate::julia::{self, minimize_theta0_from, JuliaWeights};
use crate::reduce::{round_shift, ShiftRule, TieRule};

/// Largest outer radius accepted without `allow_large`.
pub const MAX_R2: i64 = 64;

/// Which lattice points between the two circles are used as roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Region {
    /// `y >= 1` and `1 < x^2 + y^2 <= r2^2`: the upper half-disc without `i`.
    #[default]
    #[value(name = "halfdisc-exclude-i")]
    HalfDiscExcludeI,
    /// As above, restricted to `x >= 1`.
    #[value(name = "positive-re")]
    PositiveRe,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::HalfDiscExcludeI => "halfdisc-exclude-i",
            Region::PositiveRe => "positive-re",
        }
    }

    fn contains(self, x: i64, y: i64, r2: i64) -> bool {
        let n = x * x + y * y;
        let disc = y >= 1 && n > 1 && n <= r2 * r2;
        match self {
            Region::HalfDiscExcludeI => disc,
            Region::PositiveRe => disc && x >= 1,
        }
    }

    fn mirror_symmetric(self) -> bool {
        matches!(self, Region::HalfDiscExcludeI)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeConfig {
    pub r2: i64,
    /// Number of roots per n-gon; the forms have degree `2 k`.
    pub kgon: usize,
    pub region: Region,
}

impl LatticeConfig {
    pub fn new(r2: i64, kgon: usize) -> Result<Self> {
        Self::with_region(r2, kgon, Region::default(), false)
    }

    pub fn with_region(r2: i64, kgon: usize, region: Region, allow_large: bool) -> Result<Self> {
        if r2 < 2 {
            return Err(Error::Domain(format!("outer radius {r2} must be at least 2")));
        }
        if r2 > MAX_R2 && !allow_large {
            return Err(Error::Domain(format!(
                "outer radius {r2} exceeds {MAX_R2}; pass the override to continue"
            )));
        }
        if kgon == 0 {
            return Err(Error::Domain("n-gon size must be positive".into()));
        }
        Ok(Self { r2, kgon, region })
    }

    pub fn points(&self) -> Vec<(i64, i64)> {
        region_points(self.r2, self.region)
    }

    pub fn count(&self) -> u128 {
        binomial(self.points().len() as u128, self.kgon as u128)
    }
}

/// Lattice points of the default region, sorted.
pub fn lattice_points(r2: i64) -> Vec<(i64, i64)> {
    region_points(r2, Region::default())
}

pub fn region_points(r2: i64, region: Region) -> Vec<(i64, i64)> {
    (-r2..=r2)
        .flat_map(|x| (1..=r2).map(move |y| (x, y)))
        .filter(|&(x, y)| region.contains(x, y, r2))
        .collect()
}

/// `pi (r2^2 - r1^2)`.
pub fn gauss_estimate(r1: f64, r2: f64) -> Result<f64> {
    if !(0.0 <= r1 && r1 <= r2) {
        return Err(Error::Domain(format!("need 0 <= r1 <= r2, got {r1}, {r2}")));
    }
    Ok(std::f64::consts::PI * (r2 * r2 - r1 * r1))
}

/// Lexicographic k-subsets of `points`, streamed.
pub fn enumerate_ngons(
    points: &[(i64, i64)],
    k: usize,
) -> impl Iterator<Item = Vec<(i64, i64)>> + '_ {
    (0..points.len()).flat_map(move |first| ngons_with_first(points, k, first))
}

/// The k-subsets whose smallest element is `points[first]`.
pub fn ngons_with_first(
    points: &[(i64, i64)],
    k: usize,
    first: usize,
) -> impl Iterator<Item = Vec<(i64, i64)>> + '_ {
    let head = points[first];
    let rest = &points[first + 1..];
    let tails: Box<dyn Iterator<Item = Vec<(i64, i64)>>> = if k == 0 {
        Box::new(std::iter::empty())
    } else {
        Box::new(rest.iter().copied().combinations(k - 1))
    };
    tails.map(move |tail| {
        let mut v = Vec::with_capacity(k);
        v.push(head);
        v.extend(tail);
        v
    })
}

/// Centre of mass and hyperbolic centroid of Gaussian-integer points.
pub fn centres(roots: &[(i64, i64)]) -> (UhpPoint, UhpPoint) {
    let n = roots.len() as f64;
    let com_t = roots.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let com_u = roots.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let (num, den) = centroid_t_parts(roots);
    let hyp_t = num as f64 / den as f64;
    let inv_sum: f64 = roots.iter().map(|p| 1.0 / p.1 as f64).sum();
    let u2 = roots
        .iter()
        .map(|&(x, y)| ((x as f64 - hyp_t).powi(2) + (y * y) as f64) / y as f64)
        .sum::<f64>()
        / inv_sum;
    (
        UhpPoint { t: com_t, u: com_u },
        UhpPoint {
            t: hyp_t,
            u: u2.sqrt(),
        },
    )
}

/// One database row.
#[derive(Clone, Debug, PartialEq)]
pub struct NGonRecord {
    pub roots: Vec<(i64, i64)>,
    pub coeffs: Vec<BigInt>,
    pub com: (f64, f64),
    pub hyp: (f64, f64),
}

impl NGonRecord {
    pub fn form(&self) -> BinaryForm {
        BinaryForm::from_raw(self.coeffs.clone())
    }

    /// One JSONL line (without the newline). Floats carry 6 decimals.
    pub fn to_json_line(&self) -> String {
        let roots = self
            .roots
            .iter()
            .map(|(x, y)| format!("[{x},{y}]"))
            .join(",");
        let coeffs = self.coeffs.iter().map(|c| format!("\"{c}\"")).join(",");
        format!(
            "{{\"roots\":[{roots}],\"coeffs\":[{coeffs}],\"com\":[{:.6},{:.6}],\"hyp\":[{:.6},{:.6}]}}",
            self.com.0, self.com.1, self.hyp.0, self.hyp.1
        )
    }

    pub fn from_json_line(line: &str) -> std::result::Result<Self, String> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            roots: Vec<[i64; 2]>,
            coeffs: Vec<String>,
            com: [f64; 2],
            hyp: [f64; 2],
        }
        let raw: Raw = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(|e| format!("coefficient {c:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if coeffs.len() != 2 * raw.roots.len() + 1 {
            return Err(format!(
                "{} coefficients for {} roots",
                coeffs.len(),
                raw.roots.len()
            ));
        }
        Ok(Self {
            roots: raw.roots.iter().map(|r| (r[0], r[1])).collect(),
            coeffs,
            com: (raw.com[0], raw.com[1]),
            hyp: (raw.hyp[0], raw.hyp[1]),
        })
    }
}

pub fn build_record(roots: &[(i64, i64)]) -> Result<NGonRecord> {
    let mut roots = roots.to_vec();
    roots.sort_unstable();
    let form = BinaryForm::from_upper_roots(&roots)?;
    let (com, hyp) = centres(&roots);
    Ok(NGonRecord {
        coeffs: form.coeffs().to_vec(),
        roots,
        com: (com.t, com.u),
        hyp: (hyp.t, hyp.u),
    })
}

pub fn write_db(records: &[NGonRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        writeln!(w, "{}", r.to_json_line())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_db(path: &Path) -> Result<Vec<NGonRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = NGonRecord::from_json_line(&line).map_err(|msg| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))
}

/// Streams every record of the database to `sink` in canonical order and
/// returns the number of records. Partitions of `workers` first indices are
/// built in parallel and handed to the sink in order.
pub fn generate<F>(config: &LatticeConfig, workers: usize, mut sink: F) -> Result<u64>
where
    F: FnMut(&NGonRecord) -> Result<()>,
{
    let points = config.points();
    let pool = pool(workers)?;
    let batch = workers.max(1) * 2;
    let mut total = 0u64;
    let firsts: Vec<usize> = (0..points.len()).collect();
    for chunk in firsts.chunks(batch) {
        let parts: Vec<Vec<NGonRecord>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&first| {
                    ngons_with_first(&points, config.kgon, first)
                        .map(|roots| build_record(&roots))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for part in parts {
            for rec in &part {
                sink(rec)?;
                total += 1;
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Metric {
    #[default]
    Euclidean,
    Hyperbolic,
}

impl Metric {
    pub fn distance(self, a: UhpPoint, b: UhpPoint) -> f64 {
        match self {
            Metric::Euclidean => a.euclidean_dist(&b),
            Metric::Hyperbolic => dist_h(a, b),
        }
    }
}

/// Height coordinate of the hyperbolic centre used by [`max_distance`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum CentroidHeight {
    /// The closed-form centroid height `sqrt(psi((x - t)^2 + y^2))`.
    #[default]
    Centroid,
    /// The harmonic mean `n / sum(1 / y_i)` of the root heights.
    Harmonic,
}

impl CentroidHeight {
    pub fn name(self) -> &'static str {
        match self {
            CentroidHeight::Centroid => "centroid",
            CentroidHeight::Harmonic => "harmonic",
        }
    }

    /// The hyperbolic centre of `roots` with this height convention.
    pub fn centre(self, roots: &[(i64, i64)], hyp: UhpPoint) -> UhpPoint {
        match self {
            CentroidHeight::Centroid => hyp,
            CentroidHeight::Harmonic => {
                let inv_sum: f64 = roots.iter().map(|p| 1.0 / p.1 as f64).sum();
                UhpPoint::new_unchecked(hyp.t, roots.len() as f64 / inv_sum)
            }
        }
    }
}

/// The n-gon maximising the distance between its centre of mass and its
/// hyperbolic centre, with that distance.
///
/// Ties go to the lexicographically smallest root set. In a mirror-symmetric
/// region every n-gon ties with its reflection `x -> -x`; only the
/// representative with nonnegative real-part sum is considered.
pub fn max_distance(
    config: &LatticeConfig,
    metric: Metric,
    height: CentroidHeight,
    workers: usize,
) -> Result<(NGonRecord, f64)> {
    let points = config.points();
    if points.len() < config.kgon {
        return Err(Error::Empty("n-gons for this configuration"));
    }
    let skip_mirrors = config.region.mirror_symmetric();
    let best_of = |first: usize| -> Option<(f64, Vec<(i64, i64)>)> {
        let mut best: Option<(f64, Vec<(i64, i64)>)> = None;
        for roots in ngons_with_first(&points, config.kgon, first) {
            if skip_mirrors && roots.iter().map(|p| p.0).sum::<i64>() < 0 {
                continue;
            }
            let (com, hyp) = centres(&roots);
            let d = metric.distance(com, height.centre(&roots, hyp));
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, roots));
            }
        }
        best
    };
    let parts: Vec<Option<(f64, Vec<(i64, i64)>)>> =
        pool(workers)?.install(|| (0..points.len()).into_par_iter().map(best_of).collect());
    let mut best: Option<(f64, Vec<(i64, i64)>)> = None;
    for part in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(bd, _)| part.0 > *bd) {
            best = Some(part);
        }
    }
    let (d, roots) = best.ok_or(Error::Empty("n-gons for this configuration"))?;
    Ok((build_record(&roots)?, d))
}

/// Convention for turning the two centres into shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompareConvention {
    pub shift: ShiftRule,
}

impl Default for CompareConvention {
    /// Centres rounded to 2 decimals, then half-up.
    fn default() -> Self {
        Self {
            shift: ShiftRule {
                tie: TieRule::Up,
                decimals: Some(2),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompareStats {
    pub total: u64,
    pub hyperbolic_wins: u64,
    pub julia_wins: u64,
    pub same: u64,
}

impl CompareStats {
    fn merge(self, o: Self) -> Self {
        Self {
            total: self.total + o.total,
            hyperbolic_wins: self.hyperbolic_wins + o.hyperbolic_wins,
            julia_wins: self.julia_wins + o.julia_wins,
            same: self.same + o.same,
        }
    }

    pub fn to_json(&self, config: &LatticeConfig, conv: &CompareConvention) -> serde_json::Value {
        serde_json::json!({
            "total": self.total,
            "hyperbolic": self.hyperbolic_wins,
            "julia": self.julia_wins,
            "same": self.same,
            "tie_convention": conv.shift.tie.name(),
            "centre_decimals": conv.shift.decimals,
            "region": config.region.name(),
            "r2": config.r2,
            "k": config.kgon,
        })
    }
}

/// Outcome of comparing the two centred shifts of one form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Hyperbolic,
    Julia,
    Same,
}

/// Compares `height(shift(f, round(com.t)))` with `height(shift(f, round(hyp.t)))`;
/// equal heights (in particular equal shifts) count as the same result.
pub fn compare_record(
    form: &BinaryForm,
    com_t: f64,
    hyp_t: f64,
    conv: &CompareConvention,
) -> Result<Winner> {
    let kc = conv.shift.apply(com_t);
    let kh = conv.shift.apply(hyp_t);
    if kc == kh {
        return Ok(Winner::Same);
    }
    let hc = form.shift(kc).height()?;
    let hh = form.shift(kh).height()?;
    Ok(match hh.cmp(&hc) {
        std::cmp::Ordering::Less => Winner::Hyperbolic,
        std::cmp::Ordering::Greater => Winner::Julia,
        std::cmp::Ordering::Equal => Winner::Same,
    })
}

pub fn compare_stats(
    config: &LatticeConfig,
    conv: &CompareConvention,
    workers: usize,
) -> Result<CompareStats> {
    let points = config.points();
    let per_first = |first: usize| -> Result<CompareStats> {
        let mut s = CompareStats::default();
        for roots in ngons_with_first(&points, config.kgon, first) {
            let form = BinaryForm::from_upper_roots(&roots)?;
            let (com, hyp) = centres(&roots);
            s.total += 1;
            match compare_record(&form, com.t, hyp.t, conv)? {
                Winner::Hyperbolic => s.hyperbolic_wins += 1,
                Winner::Julia => s.julia_wins += 1,
                Winner::Same => s.same += 1,
            }
        }
        Ok(s)
    };
    let parts: Vec<CompareStats> = pool(workers)?.install(|| {
        (0..points.len())
            .into_par_iter()
            .map(per_first)
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().fold(CompareStats::default(), CompareStats::merge))
}

/// Agreement between the true Julia zero and the centre-of-mass proxy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JuliaComReport {
    pub total: u64,
    /// Records whose rounded Julia-zero real part differs from the rounded
    /// centre-of-mass real part.
    pub differing: u64,
}

impl JuliaComReport {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.differing as f64 / self.total as f64
        }
    }

    pub fn to_json(&self, config: &LatticeConfig, tie: TieRule) -> serde_json::Value {
        serde_json::json!({
            "total": self.total,
            "differing": self.differing,
            "fraction": crate::reduce::fixed6(self.fraction()),
            "tie_convention": tie.name(),
            "region": config.region.name(),
            "r2": config.r2,
            "k": config.kgon,
        })
    }
}

/// For every n-gon, minimises `theta0` on its exact roots and compares the
/// rounded real part of the Julia zero with that of the centre of mass.
pub fn julia_com_report(
    config: &LatticeConfig,
    tie: TieRule,
    workers: usize,
) -> Result<JuliaComReport> {
    let points = config.points();
    let per_first = |first: usize| -> Result<JuliaComReport> {
        let mut rep = JuliaComReport::default();
        for roots in ngons_with_first(&points, config.kgon, first) {
            let form = BinaryForm::from_upper_roots(&roots)?;
            let root_set = UpperRootSet {
                upper: roots
                    .iter()
                    .map(|&(x, y)| UhpPoint::new(x as f64, y as f64))
                    .collect::<Result<_>>()?,
                real: Vec::new(),
                repeated: false,
            };
            let start = JuliaWeights::ones(0, roots.len());
            let jul = minimize_theta0_from(&form, &root_set, &start, julia::DEFAULT_TOL)?;
            let (com, _) = centres(&roots);
            rep.total += 1;
            if round_shift(jul.zero.t, tie) != round_shift(com.t, tie) {
                rep.differing += 1;
            }
        }
        Ok(rep)
    };
    let parts: Vec<JuliaComReport> = pool(workers)?.install(|| {
        (0..points.len())
            .into_par_iter()
            .map(per_first)
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts
        .into_iter()
        .fold(JuliaComReport::default(), |a, b| JuliaComReport {
            total: a.total + b.total,
            differing: a.differing + b.differing,
        }))
}
