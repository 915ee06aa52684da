//! Lower and upper expectations over the extreme points.

use std::collections::{BTreeSet, VecDeque};

use super::{all_adjacent, enumerate_extremes, extreme_from_mesc, ExtremeError, ExtremePoint, Method};
use crate::cone::GeneratorSet;
use crate::model::{Gamble, PBox, StepCdf};
use crate::rational::Rational;

fn check_domain(h: &Gamble, pbox: &PBox) -> Result<(), ExtremeError> {
    if h.domain() != pbox.domain() {
        return Err(ExtremeError::DomainMismatch {
            expected: pbox.n(),
            found: h.n(),
        });
    }
    Ok(())
}

/// Minimum expectation of `h` over the credal set, with the minimizing
/// extreme point that has the lexicographically smallest `F`.
pub fn lower_expectation(h: &Gamble, pbox: &PBox) -> Result<(Rational, ExtremePoint), ExtremeError> {
    check_domain(h, pbox)?;
    let mut best: Option<(Rational, ExtremePoint)> = None;
    for e in enumerate_extremes(pbox, Method::Structural)? {
        let v = e.cdf.expectation(h)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, e));
        }
    }
    Ok(best.expect("a p-box has at least one extreme point"))
}

/// Maximum expectation, by conjugacy with [`lower_expectation`].
pub fn upper_expectation(h: &Gamble, pbox: &PBox) -> Result<(Rational, ExtremePoint), ExtremeError> {
    let (v, e) = lower_expectation(&h.neg(), pbox)?;
    Ok((-v, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub value: Rational,
    pub point: ExtremePoint,
    /// Extreme points visited, starting point first.
    pub path: Vec<StepCdf>,
}

// Witnesses of `cdf` reachable from `start` through same-point swaps.
fn closure(
    start: GeneratorSet,
    cdf: &StepCdf,
    pbox: &PBox,
) -> Result<(BTreeSet<GeneratorSet>, Vec<(GeneratorSet, StepCdf)>), ExtremeError> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut across = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for adj in all_adjacent(&g, pbox)? {
            if adj.cdf == *cdf {
                if seen.insert(adj.set.clone()) {
                    queue.push_back(adj.set);
                }
            } else {
                across.push((adj.set, adj.cdf));
            }
        }
    }
    Ok((seen, across))
}

/// Descends across cross-point edges of the fan while the expectation of
/// `h` strictly decreases. Among equally good neighbours the one with the
/// smallest `F` wins.
pub fn argmin_walk(h: &Gamble, pbox: &PBox, start: &GeneratorSet) -> Result<Walk, ExtremeError> {
    check_domain(h, pbox)?;
    let mut cdf = extreme_from_mesc(start, pbox)?
        .into_extreme()
        .ok_or_else(|| ExtremeError::InfeasibleStart(start.clone()))?;
    let mut value = cdf.expectation(h)?;
    let mut current = start.clone();
    let mut path = vec![cdf.clone()];
    loop {
        let (witnesses, across) = closure(current, &cdf, pbox)?;
        let mut best: Option<(Rational, GeneratorSet, StepCdf)> = None;
        for (g, f) in across {
            let v = f.expectation(h)?;
            if v >= value {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bv, bg, bf)) => (&v, &f, &g) < (bv, bf, bg),
            };
            if better {
                best = Some((v, g, f));
            }
        }
        match best {
            Some((v, g, f)) => {
                value = v;
                current = g;
                path.push(f.clone());
                cdf = f;
            }
            None => {
                return Ok(Walk {
                    value,
                    point: ExtremePoint { cdf, witnesses },
                    path,
                })
            }
        }
    }
}
