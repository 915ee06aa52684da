//! From a generator family to the extreme distribution function it
//! determines for a given p-box.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use super::ExtremeError;
use crate::cone::{mesc_validate, CaseTag, Generator, GeneratorSet, MescStructure, Sign};
use crate::linalg::Matrix;
use crate::model::{PBox, StepCdf};
use crate::rational::{format_rational, Rational};

/// Where a closed-form value of `F` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Zero,
    Low(usize),
    Up(usize),
}

impl Source {
    fn anchor(index: usize, sign: Option<Sign>) -> Source {
        match sign {
            None => Source::Zero,
            Some(Sign::Pos) => Source::Low(index),
            Some(Sign::Neg) => Source::Up(index),
        }
    }

    pub fn value(self, pbox: &PBox) -> Rational {
        match self {
            Source::Zero => Rational::zero(),
            Source::Low(i) => pbox.low_at(i),
            Source::Up(i) => pbox.up_at(i),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("0"),
            Source::Low(i) => write!(f, "low(x_{i})"),
            Source::Up(i) => write!(f, "up(x_{i})"),
        }
    }
}

/// The realization condition that fails, located in its gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasibility {
    pub left: usize,
    pub right: usize,
    pub case: CaseTag,
    pub position: usize,
    /// Required inequality `lhs >= rhs`.
    pub lhs: Source,
    pub rhs: Source,
    pub lhs_value: Rational,
    pub rhs_value: Rational,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} gap ({}, {}] requires {} >= {} at x_{}, but {} < {}",
            self.case,
            self.left,
            self.right,
            self.lhs,
            self.rhs,
            self.position,
            format_rational(&self.lhs_value),
            format_rational(&self.rhs_value)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    Extreme(StepCdf),
    Infeasible(Infeasibility),
}

impl Realization {
    pub fn extreme(&self) -> Option<&StepCdf> {
        match self {
            Realization::Extreme(f) => Some(f),
            Realization::Infeasible(_) => None,
        }
    }

    pub fn into_extreme(self) -> Option<StepCdf> {
        match self {
            Realization::Extreme(f) => Some(f),
            Realization::Infeasible(_) => None,
        }
    }
}

/// Per-position sources of the closed-form solution: inside a gap with
/// free local index `k`, positions before `k` copy the left anchor and the
/// rest copy the right anchor.
pub fn closed_form_sources(structure: &MescStructure) -> Vec<Source> {
    let mut out = Vec::new();
    for gap in &structure.gaps {
        let left = Source::anchor(gap.left, gap.left_sign);
        let right = Source::anchor(gap.right, Some(gap.right_sign));
        for k in 1..=gap.len() {
            out.push(if k < gap.free { left } else { right });
        }
    }
    out
}

// Inverse of the active-constraint matrix in mass coordinates; rows are
// members. Depends only on the family.
fn active_inverse(g: &GeneratorSet) -> Result<Arc<Matrix>, ExtremeError> {
    static CACHE: OnceLock<Mutex<HashMap<GeneratorSet, Arc<Matrix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("inverse cache").get(g) {
        return Ok(hit.clone());
    }
    let n = g.n();
    let rows: Vec<Vec<Rational>> = g.members().iter().map(|m| m.indicator(n)).collect();
    let inv = Matrix::from_rows(&rows)
        .inverse()
        .ok_or_else(|| ExtremeError::SelfCheck(format!("{g} has a singular constraint matrix")))?;
    let inv = Arc::new(inv);
    let mut guard = cache.lock().expect("inverse cache");
    if guard.len() > 1 << 20 {
        guard.clear();
    }
    guard.insert(g.clone(), inv.clone());
    Ok(inv)
}

fn bound_of(member: Generator, pbox: &PBox) -> Rational {
    match member {
        Generator::Prefix(i) => pbox.low_at(i),
        Generator::CoPrefix(i) => Rational::one() - pbox.up_at(i),
        Generator::Singleton(_) => Rational::zero(),
        Generator::Omega => Rational::one(),
    }
}

/// Solves the active constraints of `g` for the distribution function,
/// without checking feasibility.
pub fn solve_active(g: &GeneratorSet, pbox: &PBox) -> Result<Vec<Rational>, ExtremeError> {
    let inv = active_inverse(g)?;
    let rhs: Vec<Rational> = g.members().iter().map(|&m| bound_of(m, pbox)).collect();
    let masses = inv.mul_vec(&rhs);
    let mut acc = Rational::zero();
    Ok(masses
        .into_iter()
        .map(|p| {
            acc += p;
            acc.clone()
        })
        .collect())
}

/// The extreme point whose normal cone contains the cone of `g`, if the
/// active constraints of `g` are realized inside the p-box.
pub fn extreme_from_mesc(g: &GeneratorSet, pbox: &PBox) -> Result<Realization, ExtremeError> {
    if g.n() != pbox.n() {
        return Err(ExtremeError::DomainMismatch {
            expected: pbox.n(),
            found: g.n(),
        });
    }
    let structure = mesc_validate(g)?;
    let values = solve_active(g, pbox)?;
    let sources = closed_form_sources(&structure);
    for (i, (v, s)) in values.iter().zip(&sources).enumerate() {
        if *v != s.value(pbox) {
            return Err(ExtremeError::SelfCheck(format!(
                "{g}: solved F(x_{}) = {} but the closed form gives {s} = {}",
                i + 1,
                format_rational(v),
                format_rational(&s.value(pbox))
            )));
        }
    }
    if let Some(why) = first_violation(&structure, &sources, pbox) {
        return Ok(Realization::Infeasible(why));
    }
    Ok(Realization::Extreme(StepCdf::new_unchecked(
        pbox.domain().clone(),
        values,
    )))
}

fn first_violation(
    structure: &MescStructure,
    sources: &[Source],
    pbox: &PBox,
) -> Option<Infeasibility> {
    let mut prev = Source::Zero;
    for (idx, &s) in sources.iter().enumerate() {
        let i = idx + 1;
        let checks = [(s, prev), (s, Source::Low(i)), (Source::Up(i), s)];
        for (lhs, rhs) in checks {
            if lhs == rhs {
                continue;
            }
            let (lv, rv) = (lhs.value(pbox), rhs.value(pbox));
            if lv < rv {
                let gap = structure.gap_of(i);
                return Some(Infeasibility {
                    left: gap.left,
                    right: gap.right,
                    case: gap.case,
                    position: i,
                    lhs,
                    rhs,
                    lhs_value: lv,
                    rhs_value: rv,
                });
            }
        }
        prev = s;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{fracs, ints};

    fn pbox(low: &[(i64, i64)], up: &[(i64, i64)]) -> PBox {
        PBox::from_bounds(fracs(low), fracs(up)).unwrap()
    }

    fn fifths() -> PBox {
        pbox(&[(1, 5), (2, 5), (3, 5), (4, 5), (1, 1)], &[(1, 1); 5])
    }

    #[test]
    fn adjacency_example_extreme() {
        let p = pbox(
            &[(1, 5), (1, 5), (3, 5), (4, 5), (1, 1)],
            &[(2, 5), (2, 5), (1, 1), (1, 1), (1, 1)],
        );
        let g = GeneratorSet::parse(5, "A1, A2^c, A3, A4, Ω").unwrap();
        let f = extreme_from_mesc(&g, &p).unwrap().into_extreme().unwrap();
        assert_eq!(f.values(), fracs(&[(1, 5), (2, 5), (3, 5), (4, 5), (1, 1)]));
    }

    #[test]
    fn singleton_flat_fill() {
        let g = GeneratorSet::parse(5, "A1, A4, Ω, {3}, {4}").unwrap();
        let f = extreme_from_mesc(&g, &fifths()).unwrap().into_extreme().unwrap();
        assert_eq!(f.values(), fracs(&[(1, 5), (4, 5), (4, 5), (4, 5), (1, 1)]));
    }

    #[test]
    fn full_chain_gives_lower_bound() {
        let g = GeneratorSet::parse(5, "A1, A2, A3, A4, Ω").unwrap();
        let p = fifths();
        let f = extreme_from_mesc(&g, &p).unwrap().into_extreme().unwrap();
        assert_eq!(f.values(), p.low());
    }

    #[test]
    fn infeasible_names_the_condition() {
        // F(x_1) = up(x_1) = 1/2 exceeds F(x_2) = low(x_2) = 1/4
        let p = pbox(&[(0, 1), (1, 4), (1, 1)], &[(1, 2), (1, 1), (1, 1)]);
        let g = GeneratorSet::parse(3, "A1^c, A2, Ω").unwrap();
        let Realization::Infeasible(why) = extreme_from_mesc(&g, &p).unwrap() else {
            panic!("expected infeasible");
        };
        assert_eq!(why.position, 2);
        assert_eq!((why.lhs, why.rhs), (Source::Low(2), Source::Up(1)));
        assert_eq!(why.case, CaseTag::Case3);
        assert!(why.to_string().contains("low(x_2) >= up(x_1)"), "{why}");
    }

    #[test]
    fn vacuous_diracs() {
        let p = PBox::from_bounds(ints(&[0, 0, 1]), ints(&[1, 1, 1])).unwrap();
        let g = GeneratorSet::parse(3, "A1^c, A2^c, Ω").unwrap();
        let f = extreme_from_mesc(&g, &p).unwrap().into_extreme().unwrap();
        assert_eq!(f.values(), ints(&[1, 1, 1]));
    }

    #[test]
    fn rejects_invalid_family() {
        let g = GeneratorSet::parse(5, "A1, A3^c, A4, Ω, {4}").unwrap();
        assert!(matches!(
            extreme_from_mesc(&g, &fifths()),
            Err(ExtremeError::InvalidGeneratorSet(_))
        ));
    }
}
