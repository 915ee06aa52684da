//! Domain model: ordered finite domains, p-boxes, distribution functions,
//! mass functions and gambles.
//!
//! Positions are 1-based in every public index (`A_i = {x_1, ..., x_i}`),
//! vectors are stored 0-based. The virtual position 0 carries `F(x_0) = 0`
//! and is never stored.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_vector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

/// A single broken p-box invariant. Indices are 1-based positions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PBoxViolation {
    #[error("{side} bound has length {found}, domain has {expected} points")]
    LengthMismatch {
        side: Side,
        expected: usize,
        found: usize,
    },
    #[error("{side} bound decreases at position {index}")]
    NonMonotone { side: Side, index: usize },
    #[error("lower bound exceeds upper bound at position {index}")]
    BoundOrderViolated { index: usize },
    #[error("{side} bound is not 1 at the last position")]
    TerminalNotOne { side: Side },
    #[error("{side} bound outside [0, 1] at position {index}")]
    ValueOutOfRange { side: Side, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain must have at least one point")]
    EmptyDomain,
    #[error("duplicate domain label {0:?}")]
    DuplicateLabel(String),
    #[error("domain mismatch: expected {expected} points, found {found}")]
    DomainMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid p-box: {}", join_violations(.0))]
    InvalidPBox(Vec<PBoxViolation>),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

fn join_violations(violations: &[PBoxViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ordered labels `x_1 < ... < x_n`. Only the order is ever used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    labels: Arc<[String]>,
}

impl Domain {
    pub fn new<I, S>(labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Domain {
            labels: labels.into(),
        })
    }

    /// Domain labelled `1, ..., n`.
    pub fn positions(n: usize) -> Self {
        assert!(n >= 1, "domain must have at least one point");
        Domain {
            labels: (1..=n).map(|i| i.to_string()).collect::<Vec<_>>().into(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of 1-based position `i`.
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i - 1]
    }

    fn check_same(&self, other: &Domain) -> Result<(), ModelError> {
        if self == other {
            Ok(())
        } else {
            Err(ModelError::DomainMismatch {
                expected: self.len(),
                found: other.len(),
            })
        }
    }
}

fn check_len(domain: &Domain, values: &[Rational]) -> Result<(), ModelError> {
    if values.len() == domain.len() {
        Ok(())
    } else {
        Err(ModelError::LengthMismatch {
            expected: domain.len(),
            found: values.len(),
        })
    }
}

/// A pair of step CDFs `low <= up` bounding a credal set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PBox {
    domain: Domain,
    low: Vec<Rational>,
    up: Vec<Rational>,
}

fn check_cdf_side(side: Side, values: &[Rational], out: &mut Vec<PBoxViolation>) {
    for (k, v) in values.iter().enumerate() {
        if v.is_negative() || *v > Rational::one() {
            out.push(PBoxViolation::ValueOutOfRange { side, index: k + 1 });
        }
        if k > 0 && *v < values[k - 1] {
            out.push(PBoxViolation::NonMonotone { side, index: k + 1 });
        }
    }
    if values.last().is_some_and(|v| !v.is_one()) {
        out.push(PBoxViolation::TerminalNotOne { side });
    }
}

impl PBox {
    /// Validates the bounds, reporting every violated invariant.
    pub fn new(domain: Domain, low: Vec<Rational>, up: Vec<Rational>) -> Result<Self, ModelError> {
        let n = domain.len();
        let mut violations = Vec::new();
        for (side, values) in [(Side::Lower, &low), (Side::Upper, &up)] {
            if values.len() != n {
                violations.push(PBoxViolation::LengthMismatch {
                    side,
                    expected: n,
                    found: values.len(),
                });
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::InvalidPBox(violations));
        }
        check_cdf_side(Side::Lower, &low, &mut violations);
        check_cdf_side(Side::Upper, &up, &mut violations);
        for (k, (l, u)) in low.iter().zip(&up).enumerate() {
            if l > u {
                violations.push(PBoxViolation::BoundOrderViolated { index: k + 1 });
            }
        }
        if violations.is_empty() {
            Ok(PBox { domain, low, up })
        } else {
            Err(ModelError::InvalidPBox(violations))
        }
    }

    /// P-box on the positional domain `1..=n`.
    pub fn from_bounds(low: Vec<Rational>, up: Vec<Rational>) -> Result<Self, ModelError> {
        if low.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        PBox::new(Domain::positions(low.len()), low, up)
    }

    /// Single distribution: `low = up = F`.
    pub fn precise(cdf: &StepCdf) -> Self {
        PBox {
            domain: cdf.domain.clone(),
            low: cdf.values.clone(),
            up: cdf.values.clone(),
        }
    }

    /// `low = (0, ..., 0, 1)`, `up = (1, ..., 1)`: the full probability simplex.
    pub fn vacuous(domain: Domain) -> Self {
        let n = domain.len();
        let mut low = vec![Rational::zero(); n];
        low[n - 1] = Rational::one();
        PBox {
            domain,
            low,
            up: vec![Rational::one(); n],
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.len()
    }

    pub fn low(&self) -> &[Rational] {
        &self.low
    }

    pub fn up(&self) -> &[Rational] {
        &self.up
    }

    /// `low(x_i)` for 1-based `i`; `low(x_0) = 0`.
    pub fn low_at(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::zero()
        } else {
            self.low[i - 1].clone()
        }
    }

    /// `up(x_i)` for 1-based `i`; `up(x_0) = 0`.
    pub fn up_at(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::zero()
        } else {
            self.up[i - 1].clone()
        }
    }

    /// Whether `values` is a nondecreasing CDF between the bounds.
    pub fn contains(&self, values: &[Rational]) -> bool {
        values.len() == self.n()
            && values
                .iter()
                .enumerate()
                .all(|(k, v)| *v >= self.low[k] && *v <= self.up[k])
            && values.windows(2).all(|w| w[0] <= w[1])
            && values.first().is_none_or(|v| !v.is_negative())
    }
}

impl fmt::Display for PBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "low={} up={}",
            format_vector(&self.low),
            format_vector(&self.up)
        )
    }
}

/// A distribution function on the domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepCdf {
    domain: Domain,
    values: Vec<Rational>,
}

impl PartialOrd for Domain {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Domain {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.labels.cmp(&other.labels)
    }
}

impl StepCdf {
    pub fn new(domain: Domain, values: Vec<Rational>) -> Result<Self, ModelError> {
        check_len(&domain, &values)?;
        if values.first().is_some_and(|v| v.is_negative()) {
            return Err(ModelError::InvariantViolation(
                "distribution function is negative".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(ModelError::InvariantViolation(
                "distribution function is not nondecreasing".into(),
            ));
        }
        if !values[values.len() - 1].is_one() {
            return Err(ModelError::InvariantViolation(
                "distribution function does not end at 1".into(),
            ));
        }
        Ok(StepCdf { domain, values })
    }

    pub fn from_values(values: Vec<Rational>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        StepCdf::new(Domain::positions(values.len()), values)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(domain: Domain, values: Vec<Rational>) -> Self {
        debug_assert!(StepCdf::new(domain.clone(), values.clone()).is_ok());
        StepCdf { domain, values }
    }

    /// Point mass at 1-based position `j`.
    pub fn dirac(domain: Domain, j: usize) -> Self {
        let values = (1..=domain.len())
            .map(|i| {
                if i >= j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        StepCdf { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    /// `F(x_i)` for `i` in `0..=n`, with `F(x_0) = 0`.
    pub fn at(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::zero()
        } else {
            self.values[i - 1].clone()
        }
    }

    pub fn to_mass(&self) -> MassFunction {
        let masses = (1..=self.values.len())
            .map(|i| self.at(i) - self.at(i - 1))
            .collect();
        MassFunction {
            domain: self.domain.clone(),
            masses,
        }
    }

    /// `sum_i alpha_i F(x_i)` with `alpha` the chain decomposition of `h`.
    pub fn expectation(&self, h: &Gamble) -> Result<Rational, ModelError> {
        self.domain.check_same(&h.domain)?;
        let alpha = chain_decompose(h);
        Ok(alpha
            .alpha
            .iter()
            .zip(&self.values)
            .map(|(a, f)| a * f)
            .sum())
    }
}

impl fmt::Display for StepCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.values))
    }
}

/// Probability masses `p_i = F(x_i) - F(x_{i-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MassFunction {
    domain: Domain,
    masses: Vec<Rational>,
}

impl MassFunction {
    pub fn new(domain: Domain, masses: Vec<Rational>) -> Result<Self, ModelError> {
        check_len(&domain, &masses)?;
        if let Some(k) = masses.iter().position(Signed::is_negative) {
            return Err(ModelError::InvariantViolation(format!(
                "negative mass at position {}",
                k + 1
            )));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(ModelError::InvariantViolation(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(MassFunction { domain, masses })
    }

    pub fn from_values(masses: Vec<Rational>) -> Result<Self, ModelError> {
        if masses.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        MassFunction::new(Domain::positions(masses.len()), masses)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn to_cdf(&self) -> StepCdf {
        let mut acc = Rational::zero();
        let values = self
            .masses
            .iter()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect();
        StepCdf {
            domain: self.domain.clone(),
            values,
        }
    }

    /// `sum_i h(x_i) p(x_i)`.
    pub fn expectation(&self, h: &Gamble) -> Result<Rational, ModelError> {
        self.domain.check_same(&h.domain)?;
        Ok(self.masses.iter().zip(&h.values).map(|(p, v)| p * v).sum())
    }
}

/// Either representation of a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    Cdf(StepCdf),
    Mass(MassFunction),
}

impl From<StepCdf> for Distribution {
    fn from(value: StepCdf) -> Self {
        Distribution::Cdf(value)
    }
}

impl From<MassFunction> for Distribution {
    fn from(value: MassFunction) -> Self {
        Distribution::Mass(value)
    }
}

impl Distribution {
    /// Switches representation; converting twice is the identity.
    pub fn convert(&self) -> Distribution {
        match self {
            Distribution::Cdf(f) => Distribution::Mass(f.to_mass()),
            Distribution::Mass(p) => Distribution::Cdf(p.to_cdf()),
        }
    }
}

pub fn expectation(dist: &Distribution, h: &Gamble) -> Result<Rational, ModelError> {
    match dist {
        Distribution::Cdf(f) => f.expectation(h),
        Distribution::Mass(p) => p.expectation(h),
    }
}

/// A real-valued function on the domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gamble {
    domain: Domain,
    values: Vec<Rational>,
}

impl Gamble {
    pub fn new(domain: Domain, values: Vec<Rational>) -> Result<Self, ModelError> {
        check_len(&domain, &values)?;
        Ok(Gamble { domain, values })
    }

    pub fn from_values(values: Vec<Rational>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        Ok(Gamble {
            domain: Domain::positions(values.len()),
            values,
        })
    }

    /// Indicator function of a set of 1-based positions given as a bit mask
    /// (bit `i - 1` set for `x_i`).
    pub fn indicator(domain: Domain, mask: u64) -> Self {
        let values = (0..domain.len())
            .map(|k| {
                if mask >> k & 1 == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Gamble { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn neg(&self) -> Gamble {
        Gamble {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &Gamble) -> Result<Gamble, ModelError> {
        self.domain.check_same(&other.domain)?;
        Ok(Gamble {
            domain: self.domain.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, factor: &Rational) -> Gamble {
        Gamble {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

impl fmt::Display for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.values))
    }
}

/// Coefficients of `h = sum_i alpha_i 1_{A_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCoefficients {
    pub alpha: Vec<Rational>,
}

impl ChainCoefficients {
    /// `h(x_i) = sum_{j >= i} alpha_j`.
    pub fn reconstruct(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        let mut out: Vec<Rational> = self
            .alpha
            .iter()
            .rev()
            .map(|a| {
                acc += a;
                acc.clone()
            })
            .collect();
        out.reverse();
        out
    }
}

pub fn chain_decompose(h: &Gamble) -> ChainCoefficients {
    let v = &h.values;
    let n = v.len();
    let alpha = (0..n)
        .map(|k| {
            if k + 1 < n {
                &v[k] - &v[k + 1]
            } else {
                v[k].clone()
            }
        })
        .collect();
    ChainCoefficients { alpha }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, fracs, ints};

    fn violations(err: ModelError) -> Vec<PBoxViolation> {
        match err {
            ModelError::InvalidPBox(v) => v,
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validates_uniform_lower_bound() {
        let low = fracs(&[(1, 5), (2, 5), (3, 5), (4, 5), (1, 1)]);
        assert!(PBox::from_bounds(low, ints(&[1, 1, 1, 1, 1])).is_ok());
    }

    #[test]
    fn precise_box_is_valid() {
        assert!(PBox::from_bounds(ints(&[0, 1]), ints(&[0, 1])).is_ok());
    }

    #[test]
    fn reports_bound_order() {
        let err = PBox::from_bounds(fracs(&[(1, 2), (1, 1)]), fracs(&[(1, 4), (1, 1)]))
            .unwrap_err();
        assert_eq!(
            violations(err),
            vec![PBoxViolation::BoundOrderViolated { index: 1 }]
        );
    }

    #[test]
    fn reports_every_violation() {
        let err = PBox::from_bounds(
            fracs(&[(1, 2), (1, 4), (3, 4)]),
            fracs(&[(3, 2), (1, 1), (1, 1)]),
        )
        .unwrap_err();
        let v = violations(err);
        assert!(v.contains(&PBoxViolation::NonMonotone {
            side: Side::Lower,
            index: 2
        }));
        assert!(v.contains(&PBoxViolation::TerminalNotOne { side: Side::Lower }));
        assert!(v.contains(&PBoxViolation::ValueOutOfRange {
            side: Side::Upper,
            index: 1
        }));
        assert!(v.contains(&PBoxViolation::NonMonotone {
            side: Side::Upper,
            index: 2
        }));
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn length_mismatch() {
        let err = PBox::new(Domain::positions(3), ints(&[0, 1]), ints(&[1, 1, 1])).unwrap_err();
        assert_eq!(
            violations(err),
            vec![PBoxViolation::LengthMismatch {
                side: Side::Lower,
                expected: 3,
                found: 2
            }]
        );
    }

    #[test]
    fn cdf_to_mass() {
        let f = StepCdf::from_values(fracs(&[(2, 5), (3, 5), (3, 5), (3, 5), (1, 1)])).unwrap();
        assert_eq!(
            f.to_mass().masses(),
            fracs(&[(2, 5), (1, 5), (0, 1), (0, 1), (2, 5)]).as_slice()
        );
    }

    #[test]
    fn dirac_mass_to_cdf() {
        let p = MassFunction::from_values(ints(&[1, 0, 0, 0])).unwrap();
        assert_eq!(p.to_cdf().values(), ints(&[1, 1, 1, 1]).as_slice());
    }

    #[test]
    fn double_conversion_is_identity() {
        let f = StepCdf::from_values(fracs(&[(1, 3), (2, 3), (1, 1)])).unwrap();
        let d = Distribution::from(f.clone());
        let p = d.convert();
        match &p {
            Distribution::Mass(m) => assert_eq!(m.masses(), fracs(&[(1, 3), (1, 3), (1, 3)])),
            other => panic!("expected mass, got {other:?}"),
        }
        assert_eq!(p.convert(), Distribution::Cdf(f));
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(StepCdf::from_values(fracs(&[(1, 2), (1, 3), (1, 1)])).is_err());
        assert!(StepCdf::from_values(fracs(&[(1, 2), (2, 3)])).is_err());
        assert!(MassFunction::from_values(fracs(&[(1, 2), (1, 3)])).is_err());
        assert!(MassFunction::from_values(fracs(&[(3, 2), (-1, 2)])).is_err());
    }

    #[test]
    fn expectations_from_masses() {
        let h = Gamble::from_values(ints(&[1, 2, 3, 3, 1])).unwrap();
        let p1 = MassFunction::from_values(fracs(&[(2, 5), (1, 5), (0, 1), (0, 1), (2, 5)])).unwrap();
        let p2 = MassFunction::from_values(fracs(&[(2, 5), (0, 1), (1, 5), (0, 1), (2, 5)])).unwrap();
        assert_eq!(p1.expectation(&h).unwrap(), frac(6, 5));
        assert_eq!(p2.expectation(&h).unwrap(), frac(7, 5));
        assert_eq!(p1.to_cdf().expectation(&h).unwrap(), frac(6, 5));
    }

    #[test]
    fn constant_gamble_expectation() {
        let h = Gamble::from_values(vec![frac(7, 3); 4]).unwrap();
        let p = MassFunction::from_values(fracs(&[(1, 4), (1, 2), (0, 1), (1, 4)])).unwrap();
        assert_eq!(p.expectation(&h).unwrap(), frac(7, 3));
    }

    #[test]
    fn domain_mismatch() {
        let h = Gamble::from_values(ints(&[1, 2])).unwrap();
        let p = MassFunction::from_values(ints(&[1, 0, 0])).unwrap();
        assert!(matches!(
            p.expectation(&h),
            Err(ModelError::DomainMismatch { .. })
        ));
        let relabelled = Gamble::new(Domain::new(["a", "b", "c"]).unwrap(), ints(&[1, 2, 3])).unwrap();
        assert!(p.expectation(&relabelled).is_err());
    }

    #[test]
    fn chain_decomposition_examples() {
        let h = Gamble::from_values(ints(&[1, 2, 3, 3, 1])).unwrap();
        assert_eq!(chain_decompose(&h).alpha, ints(&[-1, -1, 0, 2, 1]));
        let ind = Gamble::indicator(Domain::positions(5), 0b00111);
        assert_eq!(chain_decompose(&ind).alpha, ints(&[0, 0, 1, 0, 0]));
        let c = Gamble::from_values(ints(&[5, 5, 5])).unwrap();
        assert_eq!(chain_decompose(&c).alpha, ints(&[0, 0, 5]));
    }

    #[test]
    fn domain_rules() {
        assert_eq!(Domain::new(Vec::<String>::new()), Err(ModelError::EmptyDomain));
        assert_eq!(
            Domain::new(["a", "a"]),
            Err(ModelError::DuplicateLabel("a".into()))
        );
        assert_eq!(Domain::positions(3).label(2), "2");
    }
}
