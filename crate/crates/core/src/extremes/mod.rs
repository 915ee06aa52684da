//! Extreme points of p-box credal sets, the fan of cones that certifies
//! them, and exact expectation bounds.

mod adjacency;
mod bounds;
mod fan;
mod realize;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::cone::{mesc_catalog, ConeError, Generator, GeneratorSet, MescError};
use crate::model::{ModelError, PBox, StepCdf};

pub use adjacency::{adjacent_mesc, all_adjacent, AdjacencyCase, Adjacent, SwapKind};
pub use bounds::{argmin_walk, lower_expectation, upper_expectation, Walk};
pub use fan::{build_fan, EdgeKind, FanEdge, FanGraph};
pub use realize::{
    closed_form_sources, extreme_from_mesc, solve_active, Infeasibility, Realization, Source,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtremeError {
    #[error("invalid generator set: {0}")]
    InvalidGeneratorSet(#[from] MescError),
    #[error("domain mismatch: expected {expected} points, found {found}")]
    DomainMismatch { expected: usize, found: usize },
    #[error("{0} is not in the family")]
    GeneratorNotInSet(Generator),
    #[error("Ω cannot be replaced")]
    OmegaNotReplaceable,
    #[error("{0} is not feasible for this p-box")]
    InfeasibleInput(GeneratorSet),
    #[error("start family {0} is not feasible for this p-box")]
    InfeasibleStart(GeneratorSet),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Cone(ConeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<ConeError> for ExtremeError {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::InvalidGeneratorSet(m) => ExtremeError::InvalidGeneratorSet(m),
            other => ExtremeError::Cone(other),
        }
    }
}

/// An extreme distribution function with the cones whose union is its
/// normal cone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtremePoint {
    pub cdf: StepCdf,
    pub witnesses: BTreeSet<GeneratorSet>,
}

impl fmt::Display for ExtremePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cdf)?;
        for w in &self.witnesses {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Realize every structural family.
    #[default]
    Structural,
    /// Walk the adjacency graph from the full positive chain.
    Bfs,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "structural" => Ok(Method::Structural),
            "bfs" => Ok(Method::Bfs),
            other => Err(format!("unknown method {other:?} (structural|bfs)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Structural => "structural",
            Method::Bfs => "bfs",
        })
    }
}

/// The full positive chain `{A_1, ..., A_{n-1}, Ω}`, realized by `low`.
pub fn full_chain(n: usize) -> GeneratorSet {
    GeneratorSet::new(n, (1..=n).map(Generator::Prefix)).expect("full chain is canonical")
}

/// Groups feasible families by their extreme point, sorted by `F`.
pub fn group_extremes<I>(realized: I) -> Vec<ExtremePoint>
where
    I: IntoIterator<Item = (GeneratorSet, StepCdf)>,
{
    let mut groups: BTreeMap<StepCdf, BTreeSet<GeneratorSet>> = BTreeMap::new();
    for (g, f) in realized {
        groups.entry(f).or_default().insert(g);
    }
    groups
        .into_iter()
        .map(|(cdf, witnesses)| ExtremePoint { cdf, witnesses })
        .collect()
}

/// Every feasible structural family with its extreme point.
pub fn feasible_mescs(pbox: &PBox) -> Result<Vec<(GeneratorSet, StepCdf)>, ExtremeError> {
    let catalog = mesc_catalog(pbox.n());
    let realized: Result<Vec<_>, ExtremeError> = catalog
        .par_iter()
        .map(|g| Ok(extreme_from_mesc(g, pbox)?.into_extreme().map(|f| (g.clone(), f))))
        .collect();
    Ok(realized?.into_iter().flatten().collect())
}

fn bfs_mescs(pbox: &PBox) -> Result<Vec<(GeneratorSet, StepCdf)>, ExtremeError> {
    let seed = full_chain(pbox.n());
    let seed_cdf = extreme_from_mesc(&seed, pbox)?
        .into_extreme()
        .ok_or_else(|| ExtremeError::SelfCheck("full chain is infeasible".into()))?;
    let mut seen: HashSet<GeneratorSet> = HashSet::from([seed.clone()]);
    let mut out = vec![(seed.clone(), seed_cdf)];
    let mut frontier = vec![seed];
    while !frontier.is_empty() {
        let expanded: Result<Vec<Vec<Adjacent>>, ExtremeError> =
            frontier.par_iter().map(|g| all_adjacent(g, pbox)).collect();
        let mut next = Vec::new();
        for adj in expanded?.into_iter().flatten() {
            if seen.insert(adj.set.clone()) {
                next.push(adj.set.clone());
                out.push((adj.set, adj.cdf));
            }
        }
        next.sort();
        frontier = next;
    }
    out.sort();
    Ok(out)
}

/// All extreme points of the credal set of `pbox`, sorted by `F`.
pub fn enumerate_extremes(pbox: &PBox, method: Method) -> Result<Vec<ExtremePoint>, ExtremeError> {
    let realized = match method {
        Method::Structural => feasible_mescs(pbox)?,
        Method::Bfs => bfs_mescs(pbox)?,
    };
    Ok(group_extremes(realized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;
    use crate::rational::fracs;

    #[test]
    fn precise_has_one_extreme() {
        let f = StepCdf::from_values(fracs(&[(1, 3), (1, 2), (1, 1)])).unwrap();
        let p = PBox::precise(&f);
        for m in [Method::Structural, Method::Bfs] {
            let e = enumerate_extremes(&p, m).unwrap();
            assert_eq!(e.len(), 1);
            assert_eq!(e[0].cdf, f);
        }
    }

    #[test]
    fn vacuous_has_diracs() {
        for n in 1..=5 {
            let d = Domain::positions(n);
            let p = PBox::vacuous(d.clone());
            let expected: Vec<StepCdf> = (1..=n).rev().map(|j| StepCdf::dirac(d.clone(), j)).collect();
            for m in [Method::Structural, Method::Bfs] {
                let got: Vec<StepCdf> = enumerate_extremes(&p, m)
                    .unwrap()
                    .into_iter()
                    .map(|e| e.cdf)
                    .collect();
                assert_eq!(got, expected, "n={n} {m}");
            }
        }
    }

    #[test]
    fn methods_agree_on_example() {
        let p = PBox::from_bounds(
            fracs(&[(1, 5), (1, 5), (3, 5), (4, 5), (1, 1)]),
            fracs(&[(2, 5), (2, 5), (1, 1), (1, 1), (1, 1)]),
        )
        .unwrap();
        let a = enumerate_extremes(&p, Method::Structural).unwrap();
        let b = enumerate_extremes(&p, Method::Bfs).unwrap();
        assert_eq!(a, b);
        let fs: Vec<_> = a.iter().map(|e| e.cdf.values().to_vec()).collect();
        assert!(fs.contains(&fracs(&[(1, 5), (2, 5), (3, 5), (4, 5), (1, 1)])));
        assert!(fs.contains(&fracs(&[(1, 5), (2, 5), (4, 5), (4, 5), (1, 1)])));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("bfs".parse::<Method>().unwrap(), Method::Bfs);
        assert!("dfs".parse::<Method>().is_err());
        assert_eq!(full_chain(3).to_string(), "{A1, A2, Ω}");
    }
}
