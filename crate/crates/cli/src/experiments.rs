//! One runner per command. Each returns rows in arbitrary order plus
//! human-readable summary notes and an optional plot.

use std::f64::consts::{PI, TAU};

use bpl_core::analytic;
use bpl_core::dicke::GroverEvaluator;
use bpl_core::estimator;
use bpl_core::scaling::{self, FitModel, GroupBy};
use bpl_core::statevec;
use bpl_core::{CorrelationScheme, CostFamily, EstimateMethod, EstimateRecord, FamilyTag, Target};
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig};
use crate::output::{read_csv, Plot, ResultRow};
use crate::CliError;

/// Largest register evaluated by quadrature in fig3-right; larger ones use Monte Carlo.
pub const QUADRATURE_MAX_N: usize = 24;
/// Fixed impurity levels of the two mixed-state traces in fig2.
pub const FIG2_DELTAS: [f64; 2] = [0.01, 0.10];

#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub notes: Vec<String>,
    pub plot: Option<Plot>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Cost => moments_grid(cfg, Target::Cost),
        Command::Variance => moments_grid(cfg, Target::DerivativeSquared),
        Command::Fig2 => fig2(cfg),
        Command::Fig3Left => fig3_left(cfg),
        Command::Fig3Right => fig3_right(cfg),
        Command::GroverSweep => grover_sweep(cfg),
        Command::QaoaRing => qaoa_ring(cfg),
        Command::Fit => fit(cfg),
        Command::XiSeparable => xi_separable(cfg),
    }
}

pub fn row_from_record(r: &EstimateRecord) -> ResultRow {
    ResultRow {
        family: r.family.tag.as_str().to_string(),
        n: r.family.n,
        l: r.family.layers,
        gamma: r.family.gamma.unwrap_or(0.0),
        delta: r.family.delta.unwrap_or(0.0),
        target: r.target.as_str().to_string(),
        estimate: r.mean,
        stderr: r.stderr,
        samples: r.samples,
        seed: r.seed,
        method: r.method.as_str().to_string(),
    }
}

fn grid(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.n.iter().flat_map(|&n| cfg.layers.iter().map(move |&l| (n, l))).collect()
}

fn moments_grid(cfg: &ExperimentConfig, target: Target) -> Result<Outcome, CliError> {
    let tag = cfg.family.expect("validated");
    let rows = grid(cfg)
        .par_iter()
        .map(|&(n, l)| {
            let family = cfg.family_at(tag, n, l);
            let m = family.num_params();
            let scheme = if cfg.correlated { CorrelationScheme::perfectly_correlated(m) } else { CorrelationScheme::uncorrelated(m) };
            Ok(row_from_record(&estimator::mc_moments(&family, &scheme, target, cfg.samples, cfg.seed)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut plot = Plot { title: format!("{tag} {}", target.as_str()), x_label: "n".into(), ..Default::default() };
    for r in &rows {
        plot.push(format!("L={}", r.l), r.n as f64, r.estimate);
    }
    Ok(Outcome { rows, notes: vec![], plot: Some(plot) })
}

/// Derivative variance of the separable product-state costs: the pure trace
/// and one mixed trace per entry of [`FIG2_DELTAS`].
pub fn fig2(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut families: Vec<(usize, usize, CostFamily)> = Vec::new();
    for &(n, l) in &grid(cfg) {
        families.push((n, l, CostFamily::new(FamilyTag::SeparablePure, n, l)));
        for d in FIG2_DELTAS {
            families.push((n, l, CostFamily::new(FamilyTag::SeparableMixed, n, l).with_delta(d)));
        }
    }
    let rows = families
        .par_iter()
        .map(|(_, l, family)| {
            let rec = estimator::mc_moments(family, &CorrelationScheme::uncorrelated(*l), Target::DerivativeSquared, cfg.samples, cfg.seed)?;
            Ok(row_from_record(&rec))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut plot = Plot { title: "Derivative variance, separable circuits".into(), x_label: "n".into(), ..Default::default() };
    let mut notes = Vec::new();
    let trace_name = |r: &ResultRow| {
        if r.family == FamilyTag::SeparablePure.as_str() {
            format!("pure L={}", r.l)
        } else {
            format!("delta={} L={}", r.delta, r.l)
        }
    };
    let mut traces: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    for r in &rows {
        plot.push(trace_name(r), r.n as f64, r.estimate);
        traces.entry(trace_name(r)).or_default().push((r.n as f64, r.estimate));
    }
    for (name, pts) in &traces {
        match scaling::classify_bpl(pts) {
            Ok(v) => notes.push(format!("{name}: {} ({})", v.verdict.as_str(), v.confidence)),
            Err(e) => notes.push(format!("{name}: not classified ({e})")),
        }
    }
    Ok(Outcome { rows, notes, plot: Some(plot) })
}

/// Second moment of the derivative of the gamma^2 coefficient of the
/// correlated slow Grover cost. Rows carry `gamma = 1`: the estimate is the
/// coefficient of `gamma^4` in `E[(dC/dtheta)^2]`.
pub fn fig3_left(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let rows = grid(cfg)
        .par_iter()
        .map(|&(n, l)| {
            let mut row = row_from_record(&estimator::fig3_left_point(n, l, cfg.samples, cfg.seed)?);
            row.gamma = 1.0;
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut notes = Vec::new();
    if let Ok(r) = mean_fit(&rows, GroupBy::L, cfg.min_n, 0) {
        notes.push(format!("r = {:.4} (mean of per-L expN fits, n >= {})", r.exponent, cfg.min_n));
    }
    Ok(Outcome { plot: Some(plot_by_l(&rows, "Slow Grover gamma^4 coefficient")), rows, notes })
}

/// `E[(dC/dalpha)^2]` of the correlated Grover cost at gamma = pi.
pub fn fig3_right(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let per_n = cfg
        .n
        .par_iter()
        .map(|&n| {
            let (method, count) = if n <= QUADRATURE_MAX_N {
                (EstimateMethod::Quadrature, cfg.nodes)
            } else {
                (EstimateMethod::MonteCarlo, cfg.samples)
            };
            Ok(estimator::grover_exact_second_moments(n, &cfg.layers, method, count, cfg.seed)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let records: Vec<EstimateRecord> = per_n.into_iter().flatten().collect();
    let worst = records.iter().filter_map(|r| r.refinement).fold(0.0, f64::max);
    let rows: Vec<ResultRow> = records.iter().map(row_from_record).collect();
    let mut notes = vec![format!("largest quadrature change under node doubling: {worst:.3e}")];
    let a = mean_fit(&rows, GroupBy::N, 16, 4);
    let r = mean_fit(&rows, GroupBy::L, 14, 0);
    if let Ok(a) = &a {
        notes.push(format!("a = {:.4} (mean of per-n powerL fits, n >= 16, L >= 4)", a.exponent));
    }
    if let Ok(r) = &r {
        notes.push(format!("r = {:.4} (mean of per-L expN fits, n >= 14)", r.exponent));
    }
    if let (Ok(a), Ok(r)) = (&a, &r) {
        if let Ok(c) = scaling::crossover_exponent(a, r) {
            notes.push(format!("crossover exponent r/a = {c:.4}"));
        }
    }
    Ok(Outcome { plot: Some(plot_by_l(&rows, "Grover derivative second moment")), rows, notes })
}

fn plot_by_l(rows: &[ResultRow], title: &str) -> Plot {
    let mut plot = Plot { title: title.into(), x_label: "n".into(), ..Default::default() };
    for r in rows {
        plot.push(format!("L={:02}", r.l), r.n as f64, r.estimate);
    }
    plot
}

/// Mean exponent of per-group fits over `(n, L, estimate)`.
pub fn mean_fit(rows: &[ResultRow], by: GroupBy, min_n: usize, min_l: usize) -> Result<scaling::ScalingFit, CliError> {
    let data: Vec<(usize, usize, f64)> = rows.iter().map(|r| (r.n, r.l, r.estimate)).collect();
    let fits = scaling::fit_groups(&data, by, min_n, min_l)?;
    Ok(scaling::combine_fits(&fits)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub n: usize,
    pub argmin_l: usize,
    pub min_cost: f64,
}

/// Depth limit `ceil(factor * 2^(n/2))`.
pub fn sweep_max_layers(n: usize, factor: f64) -> usize {
    (factor * (n as f64 / 2.0).exp2()).ceil() as usize
}

/// Cost for `L = 1..=max_layers` and the first depth attaining the minimum.
pub fn grover_depth_sweep(n: usize, alpha: f64, gamma: f64, max_layers: usize) -> Result<(Vec<f64>, SweepSummary), CliError> {
    let ev = GroverEvaluator::new(n)?;
    let costs: Vec<f64> = ev.fidelity_sweep(alpha, gamma, max_layers).iter().skip(1).map(|f| 1.0 - f).collect();
    let (idx, &min_cost) = costs
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, c)| match best {
            Some((_, b)) if b <= c => best,
            _ => Some((i, c)),
        })
        .ok_or_else(|| CliError::Validation("empty depth sweep".into()))?;
    Ok((costs, SweepSummary { n, argmin_l: idx + 1, min_cost }))
}

pub fn grover_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let gamma = cfg.gamma.unwrap_or(PI);
    let per_n = cfg
        .n
        .par_iter()
        .map(|&n| {
            let alpha = cfg.alpha.unwrap_or(TAU / n as f64);
            let (costs, summary) = grover_depth_sweep(n, alpha, gamma, sweep_max_layers(n, cfg.lmax_factor))?;
            Ok((costs, summary))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    let mut plot = Plot { title: "Variational Grover cost".into(), x_label: "L".into(), ..Default::default() };
    let base = |n: usize, l: usize, target: &str, estimate: f64| ResultRow {
        family: FamilyTag::GroverExact.as_str().into(),
        n,
        l,
        gamma,
        delta: 0.0,
        target: target.into(),
        estimate,
        stderr: 0.0,
        samples: 0,
        seed: cfg.seed,
        method: "exact".into(),
    };
    for (costs, s) in &per_n {
        for (i, &c) in costs.iter().enumerate() {
            rows.push(base(s.n, i + 1, "cost", c));
            plot.push(format!("n={:02}", s.n), (i + 1) as f64, c);
        }
        rows.push(base(s.n, s.argmin_l, "min-cost", s.min_cost));
    }
    let mut notes: Vec<String> =
        per_n.iter().map(|(_, s)| format!("n = {}: argmin L = {}, min cost = {:.6}", s.n, s.argmin_l, s.min_cost)).collect();
    let pts: Vec<(f64, f64)> = per_n.iter().map(|(_, s)| (s.n as f64, s.argmin_l as f64)).collect();
    if let Ok(f) = scaling::fit_exp_generic(&pts) {
        notes.push(format!("log2(argmin L) slope in n = {:.4} (R^2 = {:.4})", f.exponent, f.r_squared));
    }
    Ok(Outcome { rows, notes, plot: Some(plot) })
}

pub fn qaoa_ring(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let results = grid(cfg)
        .par_iter()
        .map(|&(n, l)| Ok((n, l, statevec::maximize_correlated_qaoa(n, l, cfg.grid, cfg.refinements)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut plot = Plot { title: "Correlated QAOA, ring of disagrees".into(), x_label: "L".into(), ..Default::default() };
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &(n, l, opt) in &results {
        rows.push(ResultRow {
            family: FamilyTag::RodLocal.as_str().into(),
            n,
            l,
            gamma: opt.gamma,
            delta: 0.0,
            target: "max-cost".into(),
            estimate: opt.value,
            stderr: 0.0,
            samples: cfg.grid * cfg.grid,
            seed: 0,
            method: "grid-search".into(),
        });
        plot.push(format!("n={n:02}"), l as f64, opt.value);
        notes.push(format!("n = {n}, L = {l}: max = {:.6} at beta = {:.6}, gamma = {:.6}", opt.value, opt.beta, opt.gamma));
    }
    Ok(Outcome { rows, notes, plot: Some(plot) })
}

pub fn fit(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let input = cfg.input.as_ref().expect("validated");
    let rows: Vec<ResultRow> = read_csv(input)?
        .into_iter()
        .filter(|r| cfg.target.as_ref().is_none_or(|t| &r.target == t))
        .filter(|r| cfg.family.is_none_or(|f| r.family == f.as_str()))
        .collect();
    let data: Vec<(usize, usize, f64)> = rows.iter().map(|r| (r.n, r.l, r.estimate)).collect();
    let fits = match (cfg.model, cfg.per) {
        (FitModel::PowerL, GroupBy::N) | (FitModel::ExpN, GroupBy::L) => scaling::fit_groups(&data, cfg.per, cfg.min_n, cfg.min_l)?,
        (m, _) => return Err(CliError::Validation(format!("model {m} cannot be fitted per {}", if cfg.per == GroupBy::N { "n" } else { "L" }))),
    };
    let family = format!("fit-{}", cfg.model);
    let mk = |n: usize, l: usize, target: &str, estimate: f64, samples: usize| ResultRow {
        family: family.clone(),
        n,
        l,
        gamma: 0.0,
        delta: 0.0,
        target: target.into(),
        estimate,
        stderr: 0.0,
        samples,
        seed: 0,
        method: "ols".into(),
    };
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for (key, f) in &fits {
        let (n, l) = if cfg.per == GroupBy::N { (*key, 0) } else { (0, *key) };
        out.push(mk(n, l, "exponent", f.exponent, f.points));
        out.push(mk(n, l, "r-squared", f.r_squared, f.points));
        notes.push(format!("group {key}: exponent = {:.4}, R^2 = {:.4}, {} points", f.exponent, f.r_squared, f.points));
    }
    let combined = scaling::combine_fits(&fits)?;
    out.push(mk(0, 0, "mean-exponent", combined.exponent, combined.points));
    notes.push(format!("mean exponent = {:.4} over {} groups", combined.exponent, fits.len()));
    Ok(Outcome { rows: out, notes, plot: None })
}

pub fn xi_separable(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let delta = cfg.delta.unwrap_or(0.0);
    let recs = cfg
        .n
        .par_iter()
        .map(|&xi| Ok(estimator::xi_separable_grad_mc(xi, delta, cfg.samples, cfg.seed)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut plot = Plot { title: format!("xi-separable gradient second moment, delta = {delta}"), x_label: "xi".into(), ..Default::default() };
    for rec in &recs {
        let xi = rec.family.n;
        let closed = analytic::variance_xi_separable_m1(xi, delta)?;
        let direct = analytic::variance_xi_separable_m1_direct(xi, delta)?;
        let mc = row_from_record(rec);
        let exact = |method: &str, v: f64| ResultRow { estimate: v, stderr: 0.0, samples: 0, method: method.into(), ..mc.clone() };
        rows.push(exact("closed-form", closed));
        rows.push(exact("direct-integral", direct));
        plot.push("monte carlo", xi as f64, rec.mean);
        plot.push("closed form", xi as f64, closed);
        plot.push("direct integral", xi as f64, direct);
        notes.push(format!(
            "xi = {xi}: mc = {:.6} +- {:.6}, closed form = {closed:.6}, direct integral = {direct:.6}",
            rec.mean, rec.stderr
        ));
        if (closed - direct).abs() > 3.0 * rec.stderr.max(1e-12) {
            notes.push(format!("xi = {xi}: closed form and direct integral disagree by {:.6}", closed - direct));
        }
        rows.push(mc);
    }
    Ok(Outcome { rows, notes, plot: Some(plot) })
}
