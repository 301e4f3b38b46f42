//! Seeded Monte-Carlo and quadrature estimates of cost and gradient moments.
//!
//! Sample `i` of a run with seed `s` draws from the ChaCha8 stream
//! `(s, i)`, values are collected in index order and reduced by pairwise
//! summation, so results do not depend on the rayon worker count.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic;
use crate::dicke::GroverEvaluator;
use crate::domain::{
    AngleSample, CorrelationScheme, CostFamily, EstimateMethod, EstimateRecord, FamilyTag, Target,
};
use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Gradients closer than this many steps to a removable singularity are flagged.
pub const SINGULAR_RADIUS_STEPS: f64 = 10.0;
pub const DEFAULT_QUADRATURE_NODES: usize = 4096;
pub const MIN_SAMPLES: usize = 100;
/// The Grover oracle angle used when a family leaves gamma unset.
pub const GROVER_DEFAULT_GAMMA: f64 = PI;

/// Counter-addressed random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    Analytic,
    CentralFd,
}

/// Which derivative to take: method, finite-difference step and the free
/// parameter (correlation group) to differentiate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSpec {
    pub method: GradientMethod,
    pub step: f64,
    pub coordinate: usize,
}

impl GradientSpec {
    pub fn analytic(coordinate: usize) -> Self {
        Self { method: GradientMethod::Analytic, step: DEFAULT_FD_STEP, coordinate }
    }

    pub fn central_fd(coordinate: usize) -> Self {
        Self { method: GradientMethod::CentralFd, step: DEFAULT_FD_STEP, coordinate }
    }

    /// Analytic where a closed-form derivative exists, central differences otherwise.
    pub fn preferred(family: &CostFamily, coordinate: usize) -> Self {
        if has_analytic_gradient(family.tag) {
            Self::analytic(coordinate)
        } else {
            Self::central_fd(coordinate)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientValue {
    pub value: f64,
    /// Set when the point lies within `SINGULAR_RADIUS_STEPS * step` of a
    /// removable singularity of the closed form.
    pub near_singular: bool,
}

pub fn has_analytic_gradient(tag: FamilyTag) -> bool {
    use FamilyTag::*;
    matches!(tag, SeparablePure | SeparableMixed | SeparableLocal | GroverSlowCorrelated | RodLocal | RodGlobal)
}

/// One i.i.d. uniform value per correlation group on the family's domain.
pub fn sample_angles(family: &CostFamily, scheme: &CorrelationScheme, stream: &RngStream) -> Result<AngleSample> {
    let mut rng = stream.rng();
    draw_angles(family, scheme, &mut rng)
}

fn draw_angles(family: &CostFamily, scheme: &CorrelationScheme, rng: &mut impl Rng) -> Result<AngleSample> {
    let domain = family.domain()?;
    let values = (0..scheme.num_free()).map(|_| domain.from_unit(rng.random::<f64>())).collect();
    AngleSample::new(values, scheme.clone(), domain)
}

fn check_scheme(family: &CostFamily, scheme: &CorrelationScheme) -> Result<()> {
    if scheme.len() != family.num_params() {
        return Err(Error::DimensionMismatch { expected: family.num_params(), got: scheme.len() });
    }
    Ok(())
}

/// Cost of `family` at the materialized parameters of `sample`.
///
/// The ring families take `gamma_k = gamma` in every layer. The J_x/J_y
/// family reads the first `L` parameters as `beta` and the rest as `alpha`.
pub fn evaluate_cost(family: &CostFamily, sample: &AngleSample) -> Result<f64> {
    use FamilyTag::*;
    check_scheme(family, sample.scheme())?;
    let p = sample.expand();
    let sum = || p.iter().sum::<f64>();
    let n = family.n;
    match family.tag {
        SeparablePure => Ok(analytic::cost_separable_pure(sum(), n)),
        SeparableMixed => analytic::cost_separable_mixed(sum(), n, family.delta_or_zero()),
        SeparableLocal => Ok(analytic::cost_separable_local(sum())),
        JxJyAsymptotic => {
            let (beta, alpha) = p.split_at(family.layers);
            Ok(analytic::cost_jxjy_asymptotic(beta.iter().sum(), alpha.iter().sum(), n).value)
        }
        XiSeparableM1 => Err(Error::NotAngleParameterized(family.tag.to_string())),
        GroverSlowGeneral => Ok(analytic::grover_slow_cost_general(&p, gamma_of(family)?, n)?.value),
        GroverSlowCorrelated => {
            Ok(analytic::grover_slow_cost_correlated(p[0], gamma_of(family)?, n, family.layers)?.value)
        }
        GroverExact => {
            let ev = GroverEvaluator::new(n)?;
            Ok(ev.cost(p[0], family.gamma_or(GROVER_DEFAULT_GAMMA), family.layers))
        }
        RodLocal => {
            let gamma = vec![gamma_of(family)?; p.len()];
            Ok(analytic::rod_local_cost_linear(&p, &gamma, n)?.value)
        }
        RodGlobal => Ok(analytic::rod_global_cost_linear(p[0], gamma_of(family)?, n, family.layers)?.value),
    }
}

fn gamma_of(family: &CostFamily) -> Result<f64> {
    family.gamma.ok_or_else(|| Error::Precondition(format!("{} requires gamma", family.tag)))
}

/// `dC / d(free value)` for the group `spec.coordinate`.
pub fn gradient(family: &CostFamily, sample: &AngleSample, spec: &GradientSpec) -> Result<GradientValue> {
    check_scheme(family, sample.scheme())?;
    if !(spec.step > 0.0) {
        return Err(Error::Domain { value: spec.step, domain: "step > 0" });
    }
    let group = sample
        .scheme()
        .groups()
        .get(spec.coordinate)
        .ok_or_else(|| Error::Precondition(format!("coordinate {} has no group", spec.coordinate)))?;
    let near_singular = near_singular(family, sample, spec.step);
    let value = match spec.method {
        GradientMethod::Analytic => analytic_gradient(family, sample, group)?,
        GradientMethod::CentralFd => {
            let v = sample.values()[spec.coordinate];
            let plus = sample.with_free_value(spec.coordinate, v + spec.step);
            let minus = sample.with_free_value(spec.coordinate, v - spec.step);
            if family.tag == FamilyTag::GroverExact {
                // difference the small fidelity rather than a cost close to 1
                let ev = GroverEvaluator::new(family.n)?;
                let g = family.gamma_or(GROVER_DEFAULT_GAMMA);
                let f = |s: &AngleSample| ev.fidelity(s.values()[0], g, family.layers);
                -(f(&plus) - f(&minus)) / (2.0 * spec.step)
            } else {
                (evaluate_cost(family, &plus)? - evaluate_cost(family, &minus)?) / (2.0 * spec.step)
            }
        }
    };
    Ok(GradientValue { value, near_singular })
}

fn analytic_gradient(family: &CostFamily, sample: &AngleSample, group: &[usize]) -> Result<f64> {
    use FamilyTag::*;
    let p = sample.expand();
    let sum: f64 = p.iter().sum();
    let n = family.n;
    // every member of the group shifts the total angle
    let members = group.len() as f64;
    match family.tag {
        SeparablePure => Ok(members * analytic::d_cost_separable_pure(sum, n)),
        SeparableMixed => Ok(members * analytic::d_cost_separable_mixed(sum, n, family.delta_or_zero())?),
        SeparableLocal => Ok(members * analytic::d_cost_separable_local(sum)),
        GroverSlowCorrelated => analytic::d_grover_slow_cost_correlated(p[0], gamma_of(family)?, n, family.layers),
        RodLocal => {
            let gamma = vec![gamma_of(family)?; p.len()];
            group.iter().map(|&i| analytic::d_rod_local_cost_linear(&p, &gamma, n, i)).sum()
        }
        RodGlobal => analytic::d_rod_global_cost_linear(p[0], gamma_of(family)?, n, family.layers),
        _ => Err(Error::NoAnalytic(family.tag.to_string())),
    }
}

fn near_singular(family: &CostFamily, sample: &AngleSample, step: f64) -> bool {
    let radius = SINGULAR_RADIUS_STEPS * step;
    match family.tag {
        FamilyTag::GroverSlowCorrelated => {
            analytic::grover_slow_singular_distance(sample.values()[0], family.n) < radius
        }
        FamilyTag::RodGlobal => analytic::rod_global_singular_distance(sample.values()[0]) < radius,
        _ => false,
    }
}

/// Sum with a balanced reduction tree of fixed shape.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample statistics of the averaged quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    /// Unbiased sample variance.
    pub sample_variance: f64,
    pub stderr: f64,
}

pub fn moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let squares: Vec<f64> = values.iter().map(|y| y * y).collect();
    let second_moment = pairwise_sum(&squares) / n;
    let dev: Vec<f64> = values.iter().map(|y| (y - mean).powi(2)).collect();
    let sample_variance = if values.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
    Moments { mean, second_moment, sample_variance, stderr: (sample_variance / n).sqrt() }
}

/// Families whose derivative has zero mean by the reflection symmetry of the measure.
pub fn zero_mean_derivative(tag: FamilyTag) -> bool {
    use FamilyTag::*;
    matches!(tag, SeparablePure | SeparableMixed | GroverSlowGeneral | GroverSlowCorrelated)
}

/// Per-sample values of `target`, in sample order, plus the number of
/// gradients flagged near a singularity.
pub fn mc_values(
    family: &CostFamily,
    scheme: &CorrelationScheme,
    target: Target,
    spec: &GradientSpec,
    samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, usize)> {
    check_scheme(family, scheme)?;
    family.domain()?;
    let per_sample: Vec<(f64, bool)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample = sample_angles(family, scheme, &RngStream::new(seed, i))?;
            if target == Target::Cost {
                return Ok((evaluate_cost(family, &sample)?, false));
            }
            let g = gradient(family, &sample, spec)?;
            let y = match target {
                Target::Derivative => g.value,
                Target::DerivativeSquared => g.value * g.value,
                Target::AbsDerivative => g.value.abs(),
                Target::Cost => unreachable!(),
            };
            Ok((y, g.near_singular))
        })
        .collect::<Result<_>>()?;
    let flagged = per_sample.iter().filter(|(_, s)| *s).count();
    Ok((per_sample.into_iter().map(|(y, _)| y).collect(), flagged))
}

/// Monte-Carlo moments of `target` with the family's preferred gradient on group 0.
pub fn mc_moments(
    family: &CostFamily,
    scheme: &CorrelationScheme,
    target: Target,
    samples: usize,
    seed: u64,
) -> Result<EstimateRecord> {
    mc_moments_with(family, scheme, target, &GradientSpec::preferred(family, 0), samples, seed)
}

pub fn mc_moments_with(
    family: &CostFamily,
    scheme: &CorrelationScheme,
    target: Target,
    spec: &GradientSpec,
    samples: usize,
    seed: u64,
) -> Result<EstimateRecord> {
    check_samples(samples)?;
    let (values, flagged) = mc_values(family, scheme, target, spec, samples, seed)?;
    if flagged > 0 {
        log::warn!("{flagged} of {samples} {} gradients within {SINGULAR_RADIUS_STEPS} steps of a singularity", family.tag);
    }
    let zero_mean = target == Target::Derivative && zero_mean_derivative(family.tag);
    Ok(mc_record(&values, *family, target, seed, zero_mean))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    Ok(())
}

fn mc_record(values: &[f64], family: CostFamily, target: Target, seed: u64, zero_mean: bool) -> EstimateRecord {
    let m = moments(values);
    EstimateRecord {
        mean: m.mean,
        second_moment: m.second_moment,
        variance: if zero_mean { m.second_moment } else { m.sample_variance },
        stderr: m.stderr,
        samples: values.len(),
        seed,
        family,
        target,
        method: EstimateMethod::MonteCarlo,
        zero_mean_enforced: zero_mean,
        refinement: None,
    }
}

/// `(dC/dalpha)^2` of the correlated Grover cost at `alpha` for every depth
/// `0..=max_layers`, by central differences of the fidelity.
fn grover_squared_derivatives(ev: &GroverEvaluator, alpha: f64, gamma: f64, max_layers: usize) -> Vec<f64> {
    let h = DEFAULT_FD_STEP;
    let plus = ev.fidelity_sweep(alpha + h, gamma, max_layers);
    let minus = ev.fidelity_sweep(alpha - h, gamma, max_layers);
    plus.iter().zip(&minus).map(|(p, m)| ((p - m) / (2.0 * h)).powi(2)).collect()
}

/// `E[(dC/dalpha)^2]` of the correlated Grover cost (gamma = pi) for several depths.
///
/// Quadrature uses the trapezoid rule on `nodes` equispaced points of
/// `[0, 2 pi)` and reports the relative change against `2 * nodes` points in
/// `refinement`; Monte Carlo draws `alpha` uniformly.
pub fn grover_exact_second_moments(
    n: usize,
    layers: &[usize],
    method: EstimateMethod,
    points_or_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateRecord>> {
    let ev = GroverEvaluator::new(n)?;
    let max_layers = layers.iter().copied().max().unwrap_or(0);
    let gamma = GROVER_DEFAULT_GAMMA;
    let family = |l: usize| CostFamily::new(FamilyTag::GroverExact, n, l).with_gamma(gamma);
    match method {
        EstimateMethod::Quadrature => {
            if points_or_samples == 0 {
                return Err(Error::Precondition("quadrature needs at least one node".into()));
            }
            let fine = 2 * points_or_samples;
            let rows: Vec<Vec<f64>> = (0..fine)
                .into_par_iter()
                .map(|i| grover_squared_derivatives(&ev, TAU * i as f64 / fine as f64, gamma, max_layers))
                .collect();
            Ok(layers
                .iter()
                .map(|&l| {
                    let all: Vec<f64> = rows.iter().map(|r| r[l]).collect();
                    let coarse: Vec<f64> = all.iter().step_by(2).copied().collect();
                    let m = moments(&coarse);
                    let fine_mean = pairwise_sum(&all) / fine as f64;
                    let refinement = if m.mean == 0.0 { 0.0 } else { ((fine_mean - m.mean) / m.mean).abs() };
                    EstimateRecord {
                        mean: m.mean,
                        second_moment: m.second_moment,
                        variance: m.second_moment - m.mean * m.mean,
                        stderr: 0.0,
                        samples: points_or_samples,
                        seed,
                        family: family(l),
                        target: Target::DerivativeSquared,
                        method: EstimateMethod::Quadrature,
                        zero_mean_enforced: false,
                        refinement: Some(refinement),
                    }
                })
                .collect())
        }
        EstimateMethod::MonteCarlo => {
            check_samples(points_or_samples)?;
            let rows: Vec<Vec<f64>> = (0..points_or_samples as u64)
                .into_par_iter()
                .map(|i| {
                    let alpha = TAU * RngStream::new(seed, i).rng().random::<f64>();
                    grover_squared_derivatives(&ev, alpha, gamma, max_layers)
                })
                .collect();
            Ok(layers
                .iter()
                .map(|&l| {
                    let values: Vec<f64> = rows.iter().map(|r| r[l]).collect();
                    mc_record(&values, family(l), Target::DerivativeSquared, seed, false)
                })
                .collect())
        }
    }
}

pub fn grover_exact_second_moment(
    n: usize,
    layers: usize,
    method: EstimateMethod,
    points_or_samples: usize,
    seed: u64,
) -> Result<EstimateRecord> {
    Ok(grover_exact_second_moments(n, &[layers], method, points_or_samples, seed)?.remove(0))
}

pub type U2 = [[C64; 2]; 2];

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Ginibre matrix. The
/// triangular factor then has a positive diagonal, which is the phase
/// correction that makes the distribution Haar.
pub fn haar_u2_sample(rng: &mut impl Rng) -> U2 {
    let mut normal = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    };
    let a = [normal(), normal()];
    let b = [normal(), normal()];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let q1 = [a[0] / na, a[1] / na];
    let proj = q1[0].conj() * b[0] + q1[1].conj() * b[1];
    let v = [b[0] - proj * q1[0], b[1] - proj * q1[1]];
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let q2 = [v[0] / nv, v[1] / nv];
    [[q1[0], q2[0]], [q1[1], q2[1]]]
}

/// Monte-Carlo estimate of `(xi^2 / 4) E[<0| W rho W^† |0>^(2 xi - 2)]` over
/// Haar `W`, with `rho = diag(1 - delta, delta)`.
pub fn xi_separable_grad_mc(xi: usize, delta: f64, samples: usize, seed: u64) -> Result<EstimateRecord> {
    if xi == 0 {
        return Err(Error::Precondition("xi must be at least 1".into()));
    }
    crate::domain::check_delta(delta)?;
    check_samples(samples)?;
    let x = xi as f64;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let w = haar_u2_sample(&mut RngStream::new(seed, i).rng());
            let p = (1.0 - delta) * w[0][0].norm_sqr() + delta * w[0][1].norm_sqr();
            x * x / 4.0 * p.powi(2 * xi as i32 - 2)
        })
        .collect();
    let family = CostFamily::new(FamilyTag::XiSeparableM1, xi, 1).with_delta(delta);
    Ok(mc_record(&values, family, Target::DerivativeSquared, seed, false))
}

/// Monte-Carlo `E[(df/dtheta)^2]` over `theta` uniform on `[0, 2 pi)`, where
/// `C = 1 - gamma^2 f(theta) + O(gamma^4)` is the correlated slow Grover cost.
pub fn fig3_left_point(n: usize, layers: usize, samples: usize, seed: u64) -> Result<EstimateRecord> {
    crate::domain::check_slow_grover(n, layers)?;
    check_samples(samples)?;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * RngStream::new(seed, i).rng().random::<f64>();
            analytic::d_grover_slow_coefficient(theta, n, layers).powi(2)
        })
        .collect();
    let family = CostFamily::new(FamilyTag::GroverSlowCorrelated, n, layers);
    Ok(mc_record(&values, family, Target::DerivativeSquared, seed, false))
}
