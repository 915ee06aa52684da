//! Brute-force vertex enumeration of p-box credal sets.
//!
//! Candidate distribution functions are enumerated by depth-first search
//! and kept when their active constraints have full rank. Nothing here uses
//! the cone classification; it is the reference the rest of the crate is
//! checked against.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::extremes::{enumerate_extremes, lower_expectation, upper_expectation, ExtremeError, Method};
use crate::model::{Domain, Gamble, PBox, StepCdf};
use crate::rational::{format_vector, frac, Rational};

pub const DEFAULT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("domain of {n} points exceeds the oracle limit of {limit}")]
    DomainTooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Extreme(#[from] ExtremeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Candidates restricted by the range theorem.
    Pruned,
    /// Every lower or upper bound value is a candidate at every position.
    Reference,
}

fn guard(pbox: &PBox, limit: usize) -> Result<(), OracleError> {
    if pbox.n() > limit {
        return Err(OracleError::DomainTooLarge { n: pbox.n(), limit });
    }
    Ok(())
}

/// Values allowed at 1-based position `i` by the range theorem.
pub fn range_candidates(pbox: &PBox, i: usize) -> BTreeSet<Rational> {
    let n = pbox.n();
    let lows = (i..=n).map(|j| pbox.low_at(j));
    let ups = (1..=i).map(|k| pbox.up_at(k));
    lows.chain(ups).collect()
}

/// First position whose value lies outside the range theorem's candidates.
pub fn range_violation(pbox: &PBox, f: &[Rational]) -> Option<usize> {
    (1..=f.len()).find(|&i| !range_candidates(pbox, i).contains(&f[i - 1]))
}

/// First position `i < n` where `F(x_i)` is none of `low(x_i)`, `up(x_i)`,
/// `F(x_{i-1})`, `F(x_{i+1})`.
pub fn local_candidate_violation(pbox: &PBox, f: &[Rational]) -> Option<usize> {
    let n = f.len();
    let at = |i: usize| if i == 0 { Rational::zero() } else { f[i - 1].clone() };
    (1..n).find(|&i| {
        let v = &f[i - 1];
        *v != pbox.low_at(i) && *v != pbox.up_at(i) && *v != at(i - 1) && *v != at(i + 1)
    })
}

// Fraction-free elimination on small integer rows.
fn integer_rank(mut rows: Vec<Vec<i64>>, n: usize) -> usize {
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            if rows[r][c] == 0 {
                continue;
            }
            let (a, b) = (rows[rank][c], rows[r][c]);
            let mut g = 0i64;
            for k in 0..n {
                rows[r][k] = rows[r][k] * a - rows[rank][k] * b;
                g = num_integer::gcd(g, rows[r][k]);
            }
            if g > 1 {
                rows[r].iter_mut().for_each(|v| *v /= g);
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `f` is a vertex: the constraints tight at `f` have rank `n`.
pub fn is_vertex(pbox: &PBox, f: &[Rational]) -> bool {
    let n = f.len();
    let mut rows = vec![vec![1i64; n]];
    for i in 1..=n {
        let prev = if i == 1 { Rational::zero() } else { f[i - 2].clone() };
        if f[i - 1] == pbox.low_at(i) {
            rows.push((1..=n).map(|k| i64::from(k <= i)).collect());
        }
        if f[i - 1] == pbox.up_at(i) {
            rows.push((1..=n).map(|k| i64::from(k > i)).collect());
        }
        if f[i - 1] == prev {
            rows.push((1..=n).map(|k| i64::from(k == i)).collect());
        }
    }
    integer_rank(rows, n) == n
}

fn search(
    pbox: &PBox,
    mode: SearchMode,
    all: &BTreeSet<Rational>,
    prefix: &mut Vec<Rational>,
    out: &mut BTreeSet<Vec<Rational>>,
) {
    let n = pbox.n();
    let i = prefix.len() + 1;
    if i > n {
        if is_vertex(pbox, prefix) {
            out.insert(prefix.clone());
        }
        return;
    }
    let floor = prefix.last().cloned().unwrap_or_else(Rational::zero).max(pbox.low_at(i));
    let ceil = pbox.up_at(i);
    let candidates = match mode {
        SearchMode::Pruned => range_candidates(pbox, i),
        SearchMode::Reference => all.clone(),
    };
    for v in candidates.range(floor..=ceil) {
        if i == n && !v.is_one() {
            continue;
        }
        prefix.push(v.clone());
        search(pbox, mode, all, prefix, out);
        prefix.pop();
    }
}

/// Vertices of the credal set, sorted, with an explicit size guard.
pub fn oracle_extremes_with(
    pbox: &PBox,
    mode: SearchMode,
    limit: usize,
) -> Result<Vec<StepCdf>, OracleError> {
    guard(pbox, limit)?;
    let all: BTreeSet<Rational> = pbox.low().iter().chain(pbox.up()).cloned().collect();
    let mut out = BTreeSet::new();
    search(pbox, mode, &all, &mut Vec::new(), &mut out);
    Ok(out
        .into_iter()
        .map(|f| StepCdf::new(pbox.domain().clone(), f).expect("search keeps valid CDFs"))
        .collect())
}

pub fn oracle_extremes(pbox: &PBox) -> Result<Vec<StepCdf>, OracleError> {
    oracle_extremes_with(pbox, SearchMode::Pruned, DEFAULT_LIMIT)
}

/// Minimum of `sum_i h(x_i) p(x_i)` over the oracle's vertices.
pub fn oracle_lower_expectation_with(
    h: &Gamble,
    pbox: &PBox,
    limit: usize,
) -> Result<Rational, OracleError> {
    let vertices = oracle_extremes_with(pbox, SearchMode::Pruned, limit)?;
    let mut best: Option<Rational> = None;
    for f in vertices {
        let v = f
            .to_mass()
            .expectation(h)
            .map_err(|e| OracleError::Extreme(e.into()))?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("credal set is nonempty"))
}

pub fn oracle_lower_expectation(h: &Gamble, pbox: &PBox) -> Result<Rational, OracleError> {
    oracle_lower_expectation_with(h, pbox, DEFAULT_LIMIT)
}

/// A p-box with bounds on the grid `k / denominator`. Small denominators
/// produce ties and touching bounds.
pub fn random_pbox<R: Rng + ?Sized>(rng: &mut R, n: usize, denominator: i64) -> PBox {
    let mut draw = || {
        let mut v: Vec<i64> = (1..n).map(|_| rng.gen_range(0..=denominator)).collect();
        v.sort_unstable();
        v.push(denominator);
        v
    };
    let (a, b) = (draw(), draw());
    let low = a.iter().zip(&b).map(|(x, y)| frac(*x.min(y), denominator)).collect();
    let up = a.iter().zip(&b).map(|(x, y)| frac(*x.max(y), denominator)).collect();
    PBox::new(Domain::positions(n), low, up).expect("sorted grid bounds are a p-box")
}

/// A gamble with integer values in `-range..=range`.
pub fn random_gamble<R: Rng + ?Sized>(rng: &mut R, domain: &Domain, range: i64) -> Gamble {
    let values = (0..domain.len())
        .map(|_| Rational::from_integer(rng.gen_range(-range..=range).into()))
        .collect();
    Gamble::new(domain.clone(), values).expect("length matches")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub n: usize,
    pub extremes: usize,
    pub trials: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "cross-check: n={} extremes={} trials={} seed={}",
            self.n, self.extremes, self.trials, self.seed
        )?;
        for s in &self.suites {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "  {status} {:<20} checked={}", s.name, s.checked)?;
            if let Some(c) = &s.counterexample {
                writeln!(f, "       counterexample: {c}")?;
            }
        }
        write!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn vectors(points: &[StepCdf]) -> BTreeSet<Vec<Rational>> {
    points.iter().map(|f| f.values().to_vec()).collect()
}

fn first_difference(a: &BTreeSet<Vec<Rational>>, b: &BTreeSet<Vec<Rational>>) -> Option<String> {
    if let Some(x) = a.difference(b).next() {
        return Some(format!("{} found by enumeration only", format_vector(x)));
    }
    b.difference(a)
        .next()
        .map(|x| format!("{} found by the oracle only", format_vector(x)))
}

/// Compares enumeration, expectation bounds and the range properties with
/// the oracle on one p-box.
pub fn cross_check(pbox: &PBox, trials: usize, seed: u64, limit: usize) -> Result<Report, OracleError> {
    guard(pbox, limit)?;
    let oracle = oracle_extremes_with(pbox, SearchMode::Pruned, limit)?;
    let expected = vectors(&oracle);
    let mut suites = Vec::new();

    for method in [Method::Structural, Method::Bfs] {
        let got: Vec<StepCdf> = enumerate_extremes(pbox, method)?
            .into_iter()
            .map(|e| e.cdf)
            .collect();
        suites.push(SuiteResult {
            name: match method {
                Method::Structural => "extremes/structural",
                Method::Bfs => "extremes/bfs",
            },
            checked: got.len(),
            counterexample: first_difference(&vectors(&got), &expected),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bounds = SuiteResult {
        name: "expectation bounds",
        checked: 0,
        counterexample: None,
    };
    for _ in 0..trials {
        let h = random_gamble(&mut rng, pbox.domain(), 10);
        let lower = lower_expectation(&h, pbox)?.0;
        let upper = upper_expectation(&h, pbox)?.0;
        let o_lower = oracle_lower_expectation_with(&h, pbox, limit)?;
        let o_upper = -oracle_lower_expectation_with(&h.neg(), pbox, limit)?;
        bounds.checked += 1;
        if lower != o_lower || upper != o_upper {
            bounds.counterexample = Some(format!(
                "h={} lower {} vs {}, upper {} vs {}",
                format_vector(h.values()),
                lower,
                o_lower,
                upper,
                o_upper
            ));
            break;
        }
    }
    suites.push(bounds);

    let range = oracle
        .iter()
        .find_map(|f| range_violation(pbox, f.values()).map(|i| (f, i)));
    suites.push(SuiteResult {
        name: "range theorem",
        checked: oracle.len(),
        counterexample: range.map(|(f, i)| format!("{f} at x_{i}")),
    });
    let local = oracle
        .iter()
        .find_map(|f| local_candidate_violation(pbox, f.values()).map(|i| (f, i)));
    suites.push(SuiteResult {
        name: "local candidates",
        checked: oracle.len(),
        counterexample: local.map(|(f, i)| format!("{f} at x_{i}")),
    });

    Ok(Report {
        n: pbox.n(),
        extremes: oracle.len(),
        trials,
        seed,
        suites,
    })
}
