//! Moving to neighbouring cones by swapping one generator.

use std::fmt;

use super::realize::{extreme_from_mesc, Realization};
use super::ExtremeError;
use crate::cone::{adjacency_sign_test, mesc_validate, CaseTag, Generator, GeneratorSet};
use crate::model::{PBox, StepCdf};

/// Whether the swapped-out generator is a singleton (`A`) or a chain set
/// (`B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwapKind {
    Singleton,
    Chain,
}

/// Adjacency case label such as `1A` or `3B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdjacencyCase {
    pub case: CaseTag,
    pub kind: SwapKind,
}

impl fmt::Display for AdjacencyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.case {
            CaseTag::Case1 => 1,
            CaseTag::Case2 => 2,
            CaseTag::Case3 => 3,
            CaseTag::Case4 => 4,
        };
        let s = match self.kind {
            SwapKind::Singleton => 'A',
            SwapKind::Chain => 'B',
        };
        write!(f, "{k}{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacent {
    pub set: GeneratorSet,
    pub cdf: StepCdf,
    pub leaving: Generator,
    pub entering: Generator,
    pub case: AdjacencyCase,
}

/// Case label and the window `(a, b]` where replacements for `g` can live.
fn locate(g: &GeneratorSet, out: Generator) -> Result<(AdjacencyCase, usize, usize), ExtremeError> {
    let n = g.n();
    let structure = mesc_validate(g)?;
    match out {
        Generator::Omega => Err(ExtremeError::OmegaNotReplaceable),
        Generator::Singleton(s) => {
            let gap = structure.gap_of(s);
            let case = AdjacencyCase {
                case: gap.case,
                kind: SwapKind::Singleton,
            };
            Ok((case, gap.left, gap.right))
        }
        _ => {
            let (i, _) = out.chain_entry(n).expect("chain member");
            let chain = &structure.chain;
            let j = chain.iter().position(|&(k, _)| k == i).expect("member is in chain");
            let (a, left) = if j == 0 {
                (0, None)
            } else {
                (chain[j - 1].0, Some(chain[j - 1].1))
            };
            let (b, right) = chain[j + 1];
            let case = AdjacencyCase {
                case: CaseTag::from_signs(left, right),
                kind: SwapKind::Chain,
            };
            Ok((case, a, b))
        }
    }
}

/// Replacement candidates for `out`: singletons and chain sets inside its
/// window, before any validity or sign check.
fn local_candidates(out: Generator, a: usize, b: usize) -> Vec<Generator> {
    let mut c: Vec<Generator> = (a + 1..=b).map(Generator::Singleton).collect();
    for d in a + 1..b {
        c.push(Generator::Prefix(d));
        c.push(Generator::CoPrefix(d));
    }
    c.retain(|&x| x != out);
    c
}

/// Every feasible family adjacent to `g` across the facet opposite `out`.
/// More than one result means a borderline configuration.
pub fn adjacent_mesc(
    g: &GeneratorSet,
    out: Generator,
    pbox: &PBox,
) -> Result<Vec<Adjacent>, ExtremeError> {
    let n = g.n();
    let out = out.canonical(n).map_err(ExtremeError::Cone)?;
    if !g.contains(out) {
        return Err(ExtremeError::GeneratorNotInSet(out));
    }
    if extreme_from_mesc(g, pbox)?.extreme().is_none() {
        return Err(ExtremeError::InfeasibleInput(g.clone()));
    }
    let (case, a, b) = locate(g, out)?;
    let mut found: Vec<Adjacent> = Vec::new();
    for incoming in local_candidates(out, a, b) {
        let Ok(entering) = incoming.canonical(n) else {
            continue;
        };
        if entering == out {
            continue;
        }
        let Ok(candidate) = g.replace(out, entering) else {
            continue;
        };
        if mesc_validate(&candidate).is_err() || !adjacency_sign_test(g, &candidate)? {
            continue;
        }
        if let Realization::Extreme(cdf) = extreme_from_mesc(&candidate, pbox)? {
            if found.iter().all(|f| f.set != candidate) {
                found.push(Adjacent {
                    set: candidate,
                    cdf,
                    leaving: out,
                    entering,
                    case,
                });
            }
        }
    }
    found.sort_by(|x, y| x.set.cmp(&y.set));
    Ok(found)
}

/// Adjacent families across every replaceable member of `g`.
pub fn all_adjacent(g: &GeneratorSet, pbox: &PBox) -> Result<Vec<Adjacent>, ExtremeError> {
    let mut out = Vec::new();
    for &m in g.members() {
        if m != Generator::Omega {
            out.extend(adjacent_mesc(g, m, pbox)?);
        }
    }
    Ok(out)
}
