//! Shared value types: parameter-correlation schemes, angle measures, cost
//! families and Monte-Carlo estimate records.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    Uncorrelated,
    PerfectlyCorrelated,
    LayerCorrelated,
}

/// Partition of the parameter indices `0..m` into equality classes.
///
/// Groups are stored in canonical order (sorted by smallest member, members
/// ascending), which fixes the order of the free values in an [`AngleSample`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationScheme {
    kind: CorrelationKind,
    groups: Vec<Vec<usize>>,
    len: usize,
}

impl CorrelationScheme {
    pub fn uncorrelated(m: usize) -> Self {
        Self {
            kind: CorrelationKind::Uncorrelated,
            groups: (0..m).map(|i| vec![i]).collect(),
            len: m,
        }
    }

    pub fn perfectly_correlated(m: usize) -> Self {
        Self {
            kind: CorrelationKind::PerfectlyCorrelated,
            groups: vec![(0..m).collect()],
            len: m,
        }
    }

    /// Builds a scheme from explicit groups of zero-based indices. The kind is
    /// derived from the partition: one group is perfect correlation, all
    /// singletons is no correlation.
    pub fn layer_correlated(groups: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let mut seen = vec![false; m];
        let mut groups = groups;
        for g in &mut groups {
            if g.is_empty() {
                return Err(Error::InvalidScheme("empty group".into()));
            }
            g.sort_unstable();
            for &i in g.iter() {
                if i >= m {
                    return Err(Error::InvalidScheme(format!("index {i} outside 0..{m}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidScheme(format!("index {i} appears twice")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidScheme(format!("index {i} not covered")));
        }
        groups.sort_unstable_by_key(|g| g[0]);
        let kind = if groups.len() == 1 {
            CorrelationKind::PerfectlyCorrelated
        } else if groups.len() == m {
            CorrelationKind::Uncorrelated
        } else {
            CorrelationKind::LayerCorrelated
        };
        Ok(Self { kind, groups, len: m })
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Number of materialized parameters `M`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of free values (one per group).
    pub fn num_free(&self) -> usize {
        self.groups.len()
    }
}

/// Interval of a uniform angle measure. Exactly one endpoint is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleDomain {
    pub lower: f64,
    pub upper: f64,
    pub periodic: bool,
    pub upper_closed: bool,
}

impl AngleDomain {
    /// `(-pi, pi]`, the measure of the separable-circuit families.
    pub const SYMMETRIC_UPPER_CLOSED: AngleDomain =
        AngleDomain { lower: -PI, upper: PI, periodic: true, upper_closed: true };
    /// `[-pi, pi)`, used for the ring mixer and the J_x/J_y circuit.
    pub const SYMMETRIC_LOWER_CLOSED: AngleDomain =
        AngleDomain { lower: -PI, upper: PI, periodic: true, upper_closed: false };
    /// `[0, 2pi)`, used for the Grover families.
    pub const FULL_TURN: AngleDomain =
        AngleDomain { lower: 0.0, upper: TAU, periodic: true, upper_closed: false };

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.upper_closed {
            x > self.lower && x <= self.upper
        } else {
            x >= self.lower && x < self.upper
        }
    }

    /// Maps `u` in `[0, 1)` onto the domain, respecting which end is closed.
    pub fn from_unit(&self, u: f64) -> f64 {
        if self.upper_closed {
            self.upper - self.width() * u
        } else {
            self.lower + self.width() * u
        }
    }
}

/// Free parameter values plus the scheme that materializes them.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSample {
    values: Vec<f64>,
    scheme: CorrelationScheme,
    domain: AngleDomain,
}

impl AngleSample {
    pub fn new(values: Vec<f64>, scheme: CorrelationScheme, domain: AngleDomain) -> Result<Self> {
        if values.len() != scheme.num_free() {
            return Err(Error::DimensionMismatch { expected: scheme.num_free(), got: values.len() });
        }
        if let Some(&v) = values.iter().find(|v| !domain.contains(**v)) {
            return Err(Error::Domain { value: v, domain: "angle domain" });
        }
        Ok(Self { values, scheme, domain })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scheme(&self) -> &CorrelationScheme {
        &self.scheme
    }

    pub fn domain(&self) -> AngleDomain {
        self.domain
    }

    /// Per-parameter values, group members equal.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.scheme.len()];
        for (g, &v) in self.scheme.groups().iter().zip(&self.values) {
            for &i in g {
                out[i] = v;
            }
        }
        out
    }

    /// Same scheme and domain with one free value replaced; the result may sit
    /// just outside the domain, which is what finite differences need.
    pub(crate) fn with_free_value(&self, group: usize, value: f64) -> Self {
        let mut values = self.values.clone();
        values[group] = value;
        Self { values, scheme: self.scheme.clone(), domain: self.domain }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    SeparablePure,
    SeparableMixed,
    SeparableLocal,
    JxJyAsymptotic,
    XiSeparableM1,
    GroverSlowGeneral,
    GroverSlowCorrelated,
    GroverExact,
    RodLocal,
    RodGlobal,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 10] = [
        FamilyTag::SeparablePure,
        FamilyTag::SeparableMixed,
        FamilyTag::SeparableLocal,
        FamilyTag::JxJyAsymptotic,
        FamilyTag::XiSeparableM1,
        FamilyTag::GroverSlowGeneral,
        FamilyTag::GroverSlowCorrelated,
        FamilyTag::GroverExact,
        FamilyTag::RodLocal,
        FamilyTag::RodGlobal,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::SeparablePure => "separable-pure",
            FamilyTag::SeparableMixed => "separable-mixed",
            FamilyTag::SeparableLocal => "separable-local",
            FamilyTag::JxJyAsymptotic => "jxjy-asymptotic",
            FamilyTag::XiSeparableM1 => "xi-separable-m1",
            FamilyTag::GroverSlowGeneral => "grover-slow-general",
            FamilyTag::GroverSlowCorrelated => "grover-slow-correlated",
            FamilyTag::GroverExact => "grover-exact",
            FamilyTag::RodLocal => "rod-local",
            FamilyTag::RodGlobal => "rod-global",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A cost-function family bound to its size parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostFamily {
    pub tag: FamilyTag,
    pub n: usize,
    pub layers: usize,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
}

impl CostFamily {
    pub fn new(tag: FamilyTag, n: usize, layers: usize) -> Self {
        Self { tag, n, layers, gamma: None, delta: None }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn gamma_or(&self, default: f64) -> f64 {
        self.gamma.unwrap_or(default)
    }

    pub fn delta_or_zero(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        use FamilyTag::*;
        if self.n == 0 {
            return Err(Error::Precondition("n must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            check_delta(d)?;
        }
        match self.tag {
            SeparableMixed | XiSeparableM1 if self.delta.is_none() => {
                Err(Error::Precondition(format!("{} requires delta", self.tag)))
            }
            GroverSlowGeneral | GroverSlowCorrelated => {
                check_slow_grover(self.n, self.layers)?;
                let g = self
                    .gamma
                    .ok_or_else(|| Error::Precondition(format!("{} requires gamma", self.tag)))?;
                if !(g > 0.0 && g < PI) {
                    return Err(Error::Domain { value: g, domain: "(0, pi)" });
                }
                Ok(())
            }
            GroverExact => check_even(self.n),
            RodGlobal => {
                check_even(self.n)?;
                if self.n < 4 {
                    return Err(Error::Precondition("ring global cost needs n >= 4".into()));
                }
                Ok(())
            }
            RodLocal if self.n < 3 => Err(Error::Precondition("ring needs n >= 3".into())),
            _ => Ok(()),
        }
    }

    /// Uniform measure the family's angles are drawn from.
    pub fn domain(&self) -> Result<AngleDomain> {
        use FamilyTag::*;
        match self.tag {
            SeparablePure | SeparableMixed | SeparableLocal => Ok(AngleDomain::SYMMETRIC_UPPER_CLOSED),
            JxJyAsymptotic | RodLocal | RodGlobal => Ok(AngleDomain::SYMMETRIC_LOWER_CLOSED),
            GroverSlowGeneral | GroverSlowCorrelated | GroverExact => Ok(AngleDomain::FULL_TURN),
            XiSeparableM1 => Err(Error::NotAngleParameterized(self.tag.to_string())),
        }
    }

    /// Number of materialized angle parameters.
    pub fn num_params(&self) -> usize {
        use FamilyTag::*;
        match self.tag {
            SeparablePure | SeparableMixed | SeparableLocal | GroverSlowGeneral | RodLocal => self.layers,
            JxJyAsymptotic => 2 * self.layers,
            GroverSlowCorrelated | GroverExact | RodGlobal => 1,
            XiSeparableM1 => 0,
        }
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if (0.0..0.5).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain { value: delta, domain: "[0, 1/2)" })
    }
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n % 2 == 0 && n > 0 {
        Ok(())
    } else {
        Err(Error::Parity(n))
    }
}

pub(crate) fn check_slow_grover(n: usize, layers: usize) -> Result<()> {
    check_even(n)?;
    if layers == 0 || layers % 4 != 0 {
        return Err(Error::Precondition(format!("L = {layers} must be a positive multiple of 4")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Cost,
    Derivative,
    DerivativeSquared,
    AbsDerivative,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Cost => "cost",
            Target::Derivative => "derivative",
            Target::DerivativeSquared => "derivative-squared",
            Target::AbsDerivative => "abs-derivative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    MonteCarlo,
    Quadrature,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::MonteCarlo => "mc",
            EstimateMethod::Quadrature => "quadrature",
        }
    }
}

/// Moments of one averaged quantity.
///
/// `mean` is the average of the target quantity `y`; `second_moment` is the
/// average of `y^2`; `stderr = sqrt(s_y^2 / samples)` with `s_y^2` the
/// unbiased sample variance. When `zero_mean_enforced` is set, `variance`
/// equals `second_moment` because the family's symmetry forces `E[y] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub family: CostFamily,
    pub target: Target,
    pub method: EstimateMethod,
    pub zero_mean_enforced: bool,
    /// Relative change under node doubling, for quadrature records.
    pub refinement: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfectly_correlated_expands_to_copies() {
        let s = AngleSample::new(
            vec![0.7],
            CorrelationScheme::perfectly_correlated(3),
            AngleDomain::SYMMETRIC_UPPER_CLOSED,
        )
        .unwrap();
        assert_eq!(s.expand(), vec![0.7, 0.7, 0.7]);
    }

    #[test]
    fn uncorrelated_expand_is_identity() {
        let s = AngleSample::new(
            vec![0.1, -0.2, 0.3],
            CorrelationScheme::uncorrelated(3),
            AngleDomain::SYMMETRIC_UPPER_CLOSED,
        )
        .unwrap();
        assert_eq!(s.expand(), vec![0.1, -0.2, 0.3]);
    }

    #[test]
    fn partition_expansion() {
        let scheme = CorrelationScheme::layer_correlated(vec![vec![2], vec![0, 2]], 3);
        assert!(matches!(scheme, Err(Error::InvalidScheme(_))));
        let scheme = CorrelationScheme::layer_correlated(vec![vec![2, 0], vec![1]], 3).unwrap();
        assert_eq!(scheme.kind(), CorrelationKind::LayerCorrelated);
        let s = AngleSample::new(vec![1.0, 2.0], scheme, AngleDomain::FULL_TURN).unwrap();
        assert_eq!(s.expand(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(CorrelationScheme::layer_correlated(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(CorrelationScheme::layer_correlated(vec![vec![0]], 2).is_err());
        assert!(CorrelationScheme::layer_correlated(vec![vec![0, 5]], 2).is_err());
        assert!(CorrelationScheme::layer_correlated(vec![vec![], vec![0, 1]], 2).is_err());
    }

    #[test]
    fn derived_kinds() {
        let one = CorrelationScheme::layer_correlated(vec![vec![1, 0]], 2).unwrap();
        assert_eq!(one.kind(), CorrelationKind::PerfectlyCorrelated);
        let all = CorrelationScheme::layer_correlated(vec![vec![1], vec![0]], 2).unwrap();
        assert_eq!(all.kind(), CorrelationKind::Uncorrelated);
    }

    #[test]
    fn domains_respect_closed_endpoint() {
        let d = AngleDomain::SYMMETRIC_UPPER_CLOSED;
        assert!(d.contains(PI) && !d.contains(-PI));
        assert_eq!(d.from_unit(0.0), PI);
        let d = AngleDomain::FULL_TURN;
        assert!(d.contains(0.0) && !d.contains(TAU));
        assert_eq!(d.from_unit(0.0), 0.0);
    }

    #[test]
    fn family_preconditions() {
        let f = CostFamily::new(FamilyTag::GroverSlowCorrelated, 8, 6).with_gamma(0.1);
        assert!(f.validate().is_err());
        let f = CostFamily::new(FamilyTag::GroverSlowCorrelated, 7, 8).with_gamma(0.1);
        assert_eq!(f.validate(), Err(Error::Parity(7)));
        let f = CostFamily::new(FamilyTag::GroverSlowCorrelated, 8, 8).with_gamma(PI);
        assert!(f.validate().is_err());
        let f = CostFamily::new(FamilyTag::SeparableMixed, 3, 4).with_delta(0.5);
        assert!(f.validate().is_err());
        let f = CostFamily::new(FamilyTag::SeparableMixed, 3, 4).with_delta(0.1);
        assert!(f.validate().is_ok());
    }
}
