//! Log-space least-squares scaling fits and barren-plateau verdicts.
//!
//! All fits are unweighted ordinary least squares on base-2 logarithms.
//! Points are sorted by abscissa before summation, so results do not depend
//! on input order.

use std::fmt;

use crate::error::{Error, Result};

/// Fitted base `b` below which decay counts as exponential.
pub const BPL_BASE_MAX: f64 = 0.9;
/// Goodness of fit the exponential model needs for a BPL verdict.
pub const BPL_MIN_R2: f64 = 0.9;
/// Goodness of fit a nondecaying exponential model needs for a no-BPL verdict.
pub const NO_BPL_MIN_R2: f64 = 0.5;
/// Margin by which a power law in `n` must beat the exponential model to
/// rule out a BPL.
pub const POLY_R2_MARGIN: f64 = 0.05;

pub const DEFAULT_MIN_N: usize = 14;
pub const DEFAULT_MIN_L: usize = 16;
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `y = b L^a`, exponent `a`.
    PowerL,
    /// `y = d 2^(-r n)`, exponent `r`.
    ExpN,
    /// `y = d b^n`, exponent `log2 b`.
    ExpGeneric,
}

impl FitModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitModel::PowerL => "powerL",
            FitModel::ExpN => "expN",
            FitModel::ExpGeneric => "expGeneric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [FitModel::PowerL, FitModel::ExpN, FitModel::ExpGeneric].into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub model: FitModel,
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub points: usize,
    pub domain_filter: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Line {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn ols(points: &[(f64, f64)]) -> Result<Line> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    if pts.iter().all(|p| p.1 == pts[0].1) {
        return Ok(Line { slope: 0.0, intercept: pts[0].1, r_squared: 1.0 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(Line { slope, intercept, r_squared })
}

fn log_points(points: &[(f64, f64)], log_x: bool) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(x, y)| {
            if !(y > 0.0) {
                return Err(Error::NonPositive(y));
            }
            if log_x && !(x > 0.0) {
                return Err(Error::NonPositive(x));
            }
            Ok((if log_x { x.log2() } else { x }, y.log2()))
        })
        .collect()
}

fn check_count(got: usize) -> Result<()> {
    if got < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { needed: MIN_FIT_POINTS, got });
    }
    Ok(())
}

/// Fits `y = b L^a` to the points with `L >= min_l`.
pub fn fit_power_l(points: &[(f64, f64)], min_l: f64) -> Result<ScalingFit> {
    let kept: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= min_l).collect();
    check_count(kept.len())?;
    let line = ols(&log_points(&kept, true)?)?;
    Ok(ScalingFit {
        model: FitModel::PowerL,
        exponent: line.slope,
        prefactor: line.intercept.exp2(),
        r_squared: line.r_squared,
        points: kept.len(),
        domain_filter: format!("L >= {min_l}"),
    })
}

/// Fits `y = d 2^(-r n)` to the points with `n >= min_n`.
pub fn fit_exp_n(points: &[(f64, f64)], min_n: f64) -> Result<ScalingFit> {
    let kept: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= min_n).collect();
    check_count(kept.len())?;
    let line = ols(&log_points(&kept, false)?)?;
    Ok(ScalingFit {
        model: FitModel::ExpN,
        exponent: -line.slope,
        prefactor: line.intercept.exp2(),
        r_squared: line.r_squared,
        points: kept.len(),
        domain_filter: format!("n >= {min_n}"),
    })
}

/// Fits `y = d b^n`; the exponent is `log2 b`.
pub fn fit_exp_generic(points: &[(f64, f64)]) -> Result<ScalingFit> {
    check_count(points.len())?;
    let line = ols(&log_points(points, false)?)?;
    Ok(ScalingFit {
        model: FitModel::ExpGeneric,
        exponent: line.slope,
        prefactor: line.intercept.exp2(),
        r_squared: line.r_squared,
        points: points.len(),
        domain_filter: "all".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Bpl,
    NoBpl,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Bpl => "BPL",
            Verdict::NoBpl => "NoBPL",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BplVerdict {
    pub verdict: Verdict,
    /// `-log2 b` of the exponential fit; positive for decaying data.
    pub decay_rate: f64,
    pub base: f64,
    pub exp_r_squared: f64,
    pub poly_r_squared: f64,
    pub confidence: String,
}

/// Classifies variance data `(n, variance)` as barren or not.
///
/// BPL when the exponential fit has `b < BPL_BASE_MAX` and `R^2 >= BPL_MIN_R2`.
/// Otherwise NoBPL when `b >= 1` with `R^2 >= NO_BPL_MIN_R2`, or when a
/// power law in `n` fits better by more than `POLY_R2_MARGIN`. Anything else
/// is inconclusive.
pub fn classify_bpl(points: &[(f64, f64)]) -> Result<BplVerdict> {
    if points.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: points.len() });
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0 && hi >= 2.0 * lo) {
        return Err(Error::Precondition(format!("n must span a factor of 2, got {lo}..{hi}")));
    }
    let exp = fit_exp_generic(points)?;
    let poly = ols(&log_points(points, true)?)?;
    let base = exp.exponent.exp2();
    let (verdict, confidence) = if base < BPL_BASE_MAX && exp.r_squared >= BPL_MIN_R2 {
        (Verdict::Bpl, format!("b = {base:.4} < {BPL_BASE_MAX}, R^2 = {:.4}", exp.r_squared))
    } else if base >= 1.0 && exp.r_squared >= NO_BPL_MIN_R2 {
        (Verdict::NoBpl, format!("b = {base:.4} >= 1, R^2 = {:.4}", exp.r_squared))
    } else if poly.r_squared > exp.r_squared + POLY_R2_MARGIN {
        (
            Verdict::NoBpl,
            format!("power law R^2 = {:.4} beats exponential R^2 = {:.4}", poly.r_squared, exp.r_squared),
        )
    } else {
        (Verdict::Inconclusive, format!("b = {base:.4}, R^2 = {:.4}", exp.r_squared))
    };
    Ok(BplVerdict {
        verdict,
        decay_rate: -exp.exponent,
        base,
        exp_r_squared: exp.r_squared,
        poly_r_squared: poly.r_squared,
        confidence,
    })
}

/// `r / a`: the depth exponent `c` at which `L^a 2^(-r n)` with `L = 2^(c n)`
/// stops depending on `n`.
pub fn crossover_exponent(a_fit: &ScalingFit, r_fit: &ScalingFit) -> Result<f64> {
    if a_fit.model != FitModel::PowerL {
        return Err(Error::ModelMismatch(format!("expected powerL, got {}", a_fit.model)));
    }
    if r_fit.model != FitModel::ExpN {
        return Err(Error::ModelMismatch(format!("expected expN, got {}", r_fit.model)));
    }
    Ok(r_fit.exponent / a_fit.exponent)
}

/// Which grid coordinate to hold fixed when fitting the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    N,
    L,
}

/// One fit per fixed value of the grouping coordinate over `(n, L, y)`
/// triples. Grouping by `n` fits `PowerL` in `L >= min_l`; grouping by `L`
/// fits `ExpN` in `n >= min_n`. Groups with too few points are skipped.
pub fn fit_groups(data: &[(usize, usize, f64)], by: GroupBy, min_n: usize, min_l: usize) -> Result<Vec<(usize, ScalingFit)>> {
    let mut keys: Vec<usize> = data.iter().map(|&(n, l, _)| if by == GroupBy::N { n } else { l }).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut out = Vec::new();
    for key in keys {
        let fit = match by {
            GroupBy::N => {
                if key < min_n {
                    continue;
                }
                let pts: Vec<(f64, f64)> =
                    data.iter().filter(|d| d.0 == key).map(|d| (d.1 as f64, d.2)).collect();
                fit_power_l(&pts, min_l as f64)
            }
            GroupBy::L => {
                if key < min_l {
                    continue;
                }
                let pts: Vec<(f64, f64)> =
                    data.iter().filter(|d| d.1 == key).map(|d| (d.0 as f64, d.2)).collect();
                fit_exp_n(&pts, min_n as f64)
            }
        };
        match fit {
            Ok(f) => out.push((key, f)),
            Err(Error::InsufficientData { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Mean exponent over per-group fits, reported as a fit of the same model
/// with mean prefactor and the smallest R^2.
pub fn combine_fits(fits: &[(usize, ScalingFit)]) -> Result<ScalingFit> {
    let first = &fits.first().ok_or(Error::InsufficientData { needed: 1, got: 0 })?.1;
    if let Some((_, f)) = fits.iter().find(|(_, f)| f.model != first.model) {
        return Err(Error::ModelMismatch(format!("{} vs {}", first.model, f.model)));
    }
    let m = fits.len() as f64;
    Ok(ScalingFit {
        model: first.model,
        exponent: fits.iter().map(|(_, f)| f.exponent).sum::<f64>() / m,
        prefactor: fits.iter().map(|(_, f)| f.prefactor).sum::<f64>() / m,
        r_squared: fits.iter().map(|(_, f)| f.r_squared).fold(1.0, f64::min),
        points: fits.iter().map(|(_, f)| f.points).sum(),
        domain_filter: format!("mean of {} groups, {}", fits.len(), first.domain_filter),
    })
}
