//! Avalanche experiments: waves at uniformly random points starting from
//! `0_Ω`, recording the measure of the face each wave changes, plus
//! power-law fitting of the resulting sizes.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{Location, OmegaDomain};
use crate::dynamics::{self, add_monomial};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lattice::LatticeVector;
use crate::scalar::{Mode, Scalar};
use crate::series::TropicalSeries;

/// Sampled coordinates are rationals with this denominator.
pub const SAMPLE_DENOMINATOR: i64 = 1 << 32;
/// Fits need at least this many samples at or above `x_min`.
pub const MIN_TAIL: usize = 50;
const MAX_REJECTIONS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvalancheSample {
    pub index: usize,
    pub point: Point,
    /// `None` when the point landed on the corner locus.
    pub q0: Option<LatticeVector>,
    pub measure: Scalar,
    pub c: Scalar,
    /// Waves applied so far, this one included.
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub samples: Vec<AvalancheSample>,
    pub final_series: TropicalSeries,
}

/// SplitMix64 finaliser; mixes `(seed, index)` into an independent sub-seed.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `index`-th uniform interior point for `seed`: rejection sampling
/// from the bounding box.
pub fn sample_point(domain: &OmegaDomain, seed: u64, index: u64) -> Result<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, index));
    let (lo, hi) = exact_or_approx_bounds(domain);
    for _ in 0..MAX_REJECTIONS {
        let p: Point = match domain.mode() {
            Mode::Exact => lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| {
                    let k = rng.random_range(0..SAMPLE_DENOMINATOR);
                    a + &(&(b - a) * &Scalar::ratio(k, SAMPLE_DENOMINATOR))
                })
                .collect(),
            Mode::Approximate => lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| {
                    let u: f64 = rng.random();
                    Scalar::approx(a.to_f64() + (b.to_f64() - a.to_f64()) * u)
                })
                .collect(),
        };
        if domain.locate(&p) == Location::Interior {
            return Ok(p);
        }
    }
    Err(Error::Resource(format!(
        "no interior sample after {MAX_REJECTIONS} rejections"
    )))
}

fn exact_or_approx_bounds(domain: &OmegaDomain) -> (Vec<Scalar>, Vec<Scalar>) {
    match domain.geometry() {
        Some(g) => g.bounding_box(),
        None => {
            let (lo, hi) = dynamics::approx_bounds(domain);
            (
                lo.into_iter().map(Scalar::approx).collect(),
                hi.into_iter().map(Scalar::approx).collect(),
            )
        }
    }
}

/// Runs `count` waves at random points from `0_Ω`, in index order.
pub fn avalanche_experiment(domain: &Arc<OmegaDomain>, count: usize, seed: u64) -> Result<ExperimentRun> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let mut f = TropicalSeries::zero(domain.clone());
    let mut samples = Vec::with_capacity(count);
    for index in 0..count {
        let p = sample_point(domain, seed, index as u64)?;
        let o = dynamics::wave_outcome(&f, &p)?;
        let (q0, measure) = if o.smooth {
            let r = dynamics::region_measure(&f, &p, o.q0.clone())?;
            (Some(o.q0.clone()), r.measure)
        } else {
            (None, Scalar::zero(f.mode()))
        };
        if o.smooth {
            f = add_monomial(&f, &o.q0, &o.c, &Scalar::one(f.mode()))?;
        }
        samples.push(AvalancheSample {
            index,
            point: p,
            q0,
            measure,
            c: o.c,
            steps: index + 1,
        });
    }
    Ok(ExperimentRun {
        samples,
        final_series: f,
    })
}

/// CSV with decimal columns at 12 significant digits followed by exact
/// columns.
pub fn write_csv(samples: &[AvalancheSample], n: usize, out: &mut impl Write) -> std::io::Result<()> {
    let axes = ["x", "y", "z"];
    let mut header: Vec<String> = vec!["index".into()];
    header.extend(axes.iter().take(n).map(|a| format!("p{a}")));
    header.extend((0..n).map(|k| format!("q{}", k + 1)));
    header.push("measure".into());
    header.push("c".into());
    header.extend(axes.iter().take(n).map(|a| format!("p{a}_exact")));
    header.push("measure_exact".into());
    header.push("c_exact".into());
    writeln!(out, "{}", header.join(","))?;
    for s in samples {
        let mut row: Vec<String> = vec![s.index.to_string()];
        row.extend(s.point.iter().map(|x| x.to_decimal(12)));
        match &s.q0 {
            Some(q) => row.extend(q.coords().iter().map(i64::to_string)),
            None => row.extend((0..n).map(|_| String::new())),
        }
        row.push(s.measure.to_decimal(12));
        row.push(s.c.to_decimal(12));
        row.extend(s.point.iter().map(Scalar::to_string));
        row.push(s.measure.to_string());
        row.push(s.c.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Mle,
    LogBinned,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum XMinPolicy {
    Fixed(f64),
    /// Minimise the KS distance over sample quantiles.
    KsScan,
}

/// Density `∝ x^{-alpha}` for `x >= x_min`.
#[derive(Clone, Debug, Serialize)]
pub struct PowerLawFit {
    pub x_min: f64,
    pub alpha: f64,
    pub n_tail: usize,
    pub ks: f64,
    pub method: FitMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub mle: PowerLawFit,
    pub binned: Option<PowerLawFit>,
    pub samples: usize,
    pub zero_samples: usize,
}

fn tail(samples: &[f64], x_min: f64) -> Result<Vec<f64>> {
    if !(x_min > 0.0) || !x_min.is_finite() {
        return Err(Error::Invalid(format!("x_min {x_min} must be positive")));
    }
    let mut t: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if t.len() < MIN_TAIL {
        return Err(Error::Invalid(format!(
            "only {} samples at or above x_min = {x_min}; need at least {MIN_TAIL}",
            t.len()
        )));
    }
    t.sort_by(f64::total_cmp);
    Ok(t)
}

fn ks_distance(sorted_tail: &[f64], x_min: f64, alpha: f64) -> f64 {
    if !(alpha > 1.0) {
        // Not a normalisable density: maximal distance.
        return 1.0;
    }
    let n = sorted_tail.len() as f64;
    sorted_tail
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let model = 1.0 - (x / x_min).powf(1.0 - alpha);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (model - lo).abs().max((hi - model).abs())
        })
        .fold(0.0, f64::max)
}

fn mle_at(samples: &[f64], x_min: f64) -> Result<PowerLawFit> {
    let t = tail(samples, x_min)?;
    let s: f64 = t.iter().map(|x| (x / x_min).ln()).sum();
    if s <= 0.0 {
        return Err(Error::Invalid("samples have zero log-spread above x_min".into()));
    }
    let alpha = 1.0 + t.len() as f64 / s;
    Ok(PowerLawFit {
        x_min,
        alpha,
        n_tail: t.len(),
        ks: ks_distance(&t, x_min, alpha),
        method: FitMethod::Mle,
    })
}

/// Continuous maximum-likelihood exponent.
pub fn fit_power_law(samples: &[f64], policy: XMinPolicy) -> Result<PowerLawFit> {
    match policy {
        XMinPolicy::Fixed(x) => mle_at(samples, x),
        XMinPolicy::KsScan => {
            let mut pos: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
            pos.sort_by(f64::total_cmp);
            if pos.len() < MIN_TAIL {
                return Err(Error::Invalid(format!(
                    "only {} positive samples; need at least {MIN_TAIL}",
                    pos.len()
                )));
            }
            let last = pos.len() - MIN_TAIL;
            let mut best: Option<PowerLawFit> = None;
            let mut last_err = None;
            for k in 0..50 {
                let x = pos[last * k / 50];
                match mle_at(&pos, x) {
                    Ok(fit) => {
                        if best.as_ref().is_none_or(|b| fit.ks < b.ks) {
                            best = Some(fit);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            best.ok_or_else(|| last_err.expect("scan tried at least one x_min"))
        }
    }
}

/// Least-squares slope of log density against log size over logarithmic
/// bins, for comparison with the MLE.
pub fn fit_log_binned(samples: &[f64], x_min: f64) -> Result<PowerLawFit> {
    let t = tail(samples, x_min)?;
    let x_max = *t.last().unwrap();
    if x_max <= x_min {
        return Err(Error::Invalid("samples have zero log-spread above x_min".into()));
    }
    let bins = ((t.len() as f64).sqrt() as usize).clamp(5, 40);
    let ratio = (x_max / x_min).ln() / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &t {
        let k = (((x / x_min).ln() / ratio) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = t.len() as f64;
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| {
            let a = x_min * (ratio * k as f64).exp();
            let b = x_min * (ratio * (k + 1) as f64).exp();
            ((a * b).sqrt().ln(), (c as f64 / (n * (b - a))).ln())
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::Invalid("fewer than two non-empty bins".into()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let alpha = -sxy / sxx;
    Ok(PowerLawFit {
        x_min,
        alpha,
        n_tail: t.len(),
        ks: ks_distance(&t, x_min, alpha),
        method: FitMethod::LogBinned,
    })
}

/// MLE with the given policy plus the binned slope at the same `x_min`.
pub fn fit_report(samples: &[AvalancheSample], policy: XMinPolicy) -> Result<FitReport> {
    let xs: Vec<f64> = samples.iter().map(|s| s.measure.to_f64()).collect();
    let mle = fit_power_law(&xs, policy)?;
    let binned = fit_log_binned(&xs, mle.x_min).ok();
    Ok(FitReport {
        mle,
        binned,
        samples: xs.len(),
        zero_samples: xs.iter().filter(|&&x| x == 0.0).count(),
    })
}
