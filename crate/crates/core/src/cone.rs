//! Generator families of the simplicial normal cones of p-box credal sets.
//!
//! A p-box credal set is cut out by the constraints `P(A_i) >= low(x_i)`,
//! `P(A_i^c) >= 1 - up(x_i)`, `P({x_i}) >= 0` and `P(Ω) = 1`. Its normal
//! cones are generated by indicators of those sets, with `1_Ω` spanning a
//! lineality direction. A [`GeneratorSet`] is a basis-sized family of such
//! sets; a valid one generates a maximal elementary simplicial cone.
//!
//! Two constraint sets coincide as subsets: `{x_1} = A_1` and
//! `{x_n} = A_{n-1}^c`. Families are stored canonically with those members
//! as chain entries, so equality of [`GeneratorSet`]s is equality of subset
//! families.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{dot, Matrix};
use crate::model::{Domain, Gamble, ModelError};
use crate::rational::Rational;

/// Largest supported domain; subsets are bit masks.
pub const MAX_POINTS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        })
    }
}

/// One constraint set. Indices are 1-based positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `A_i = {x_1, ..., x_i}`
    Prefix(usize),
    /// `A_i^c = {x_{i+1}, ..., x_n}`
    CoPrefix(usize),
    /// `{x_i}`
    Singleton(usize),
    Omega,
}

impl Generator {
    /// Canonical representative of the same subset of a domain with `n`
    /// points.
    pub fn canonical(self, n: usize) -> Result<Generator, ConeError> {
        let out_of_range = || ConeError::IndexOutOfRange { generator: self, n };
        match self {
            Generator::Omega => Ok(Generator::Omega),
            Generator::Prefix(i) if i == 0 || i > n => Err(out_of_range()),
            Generator::Prefix(i) if i == n => Ok(Generator::Omega),
            Generator::Prefix(i) => Ok(Generator::Prefix(i)),
            Generator::CoPrefix(i) if i >= n => Err(out_of_range()),
            Generator::CoPrefix(0) => Ok(Generator::Omega),
            Generator::CoPrefix(i) => Ok(Generator::CoPrefix(i)),
            Generator::Singleton(i) if i == 0 || i > n => Err(out_of_range()),
            Generator::Singleton(_) if n == 1 => Ok(Generator::Omega),
            Generator::Singleton(1) => Ok(Generator::Prefix(1)),
            Generator::Singleton(i) if i == n => Ok(Generator::CoPrefix(n - 1)),
            Generator::Singleton(i) => Ok(Generator::Singleton(i)),
        }
    }

    /// Bit mask of the subset (bit `i - 1` for `x_i`).
    pub fn mask(self, n: usize) -> u64 {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        match self {
            Generator::Omega => full,
            Generator::Prefix(i) => (1u64 << i) - 1,
            Generator::CoPrefix(i) => full & !((1u64 << i) - 1),
            Generator::Singleton(i) => 1u64 << (i - 1),
        }
    }

    /// Chain entry `(index, sign)` for prefix-type members.
    pub fn chain_entry(self, n: usize) -> Option<(usize, Sign)> {
        match self {
            Generator::Prefix(i) => Some((i, Sign::Pos)),
            Generator::CoPrefix(i) => Some((i, Sign::Neg)),
            Generator::Omega => Some((n, Sign::Pos)),
            Generator::Singleton(_) => None,
        }
    }

    fn from_chain_entry(i: usize, sign: Sign, n: usize) -> Generator {
        match sign {
            Sign::Pos if i == n => Generator::Omega,
            Sign::Pos => Generator::Prefix(i),
            Sign::Neg => Generator::CoPrefix(i),
        }
    }

    pub fn indicator(self, n: usize) -> Vec<Rational> {
        let mask = self.mask(n);
        (0..n)
            .map(|k| {
                if mask >> k & 1 == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Generator, ConeError> {
        let t = text.trim();
        let bad = || ConeError::Parse(t.to_string());
        if t == "Ω" || t.eq_ignore_ascii_case("omega") {
            return Ok(Generator::Omega);
        }
        if let Some(inner) = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            return inner.trim().parse().map(Generator::Singleton).map_err(|_| bad());
        }
        let body = t.strip_prefix('A').ok_or_else(bad)?;
        if let Some(idx) = body.strip_suffix("^c") {
            idx.parse().map(Generator::CoPrefix).map_err(|_| bad())
        } else {
            body.parse().map(Generator::Prefix).map_err(|_| bad())
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Prefix(i) => write!(f, "A{i}"),
            Generator::CoPrefix(i) => write!(f, "A{i}^c"),
            Generator::Singleton(i) => write!(f, "{{{i}}}"),
            Generator::Omega => f.write_str("Ω"),
        }
    }
}

/// Which corollary rule forbids a singleton next to a chain set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingletonRule {
    /// `A_i` present forbids `{x_{i+1}}`.
    AfterPrefix,
    /// `A_i^c` present forbids `{x_i}`.
    AtCoPrefix,
}

impl fmt::Display for SingletonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingletonRule::AfterPrefix => "iii",
            SingletonRule::AtCoPrefix => "iv",
        })
    }
}

/// The four ways consecutive chain sets `A ⊂ A'` can appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    /// `(A, A')`
    Case1,
    /// `(A, A'^c)`
    Case2,
    /// `(A^c, A')`
    Case3,
    /// `(A^c, A'^c)`
    Case4,
}

impl CaseTag {
    /// Case of a gap from its anchor signs; `None` marks the empty set `A_0`.
    pub fn from_signs(left: Option<Sign>, right: Sign) -> CaseTag {
        match (left, right) {
            (None, Sign::Pos) | (Some(Sign::Pos), Sign::Pos) => CaseTag::Case1,
            (Some(Sign::Pos), Sign::Neg) => CaseTag::Case2,
            (Some(Sign::Neg), Sign::Pos) => CaseTag::Case3,
            (None, Sign::Neg) | (Some(Sign::Neg), Sign::Neg) => CaseTag::Case4,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self {
            CaseTag::Case1 => 1,
            CaseTag::Case2 => 2,
            CaseTag::Case3 => 3,
            CaseTag::Case4 => 4,
        };
        write!(f, "Case {k}")
    }
}

/// The gap `A'\A = {x_{left+1}, ..., x_right}` between consecutive chain
/// anchors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapCase {
    /// Left anchor index, 0 for the empty set.
    pub left: usize,
    pub left_sign: Option<Sign>,
    pub right: usize,
    pub right_sign: Sign,
    pub case: CaseTag,
    /// Local indices (1-based within the gap) of singletons in the family.
    pub present: Vec<usize>,
    /// The one local index without a singleton.
    pub free: usize,
}

impl GapCase {
    pub fn len(&self) -> usize {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.right == self.left
    }

    /// Global position of local index `k`.
    pub fn position(&self, k: usize) -> usize {
        self.left + k
    }

    /// Missing singleton of a Case 3 gap.
    pub fn missing(&self) -> Option<usize> {
        (self.case == CaseTag::Case3).then_some(self.free)
    }

    pub fn contains(&self, position: usize) -> bool {
        position > self.left && position <= self.right
    }
}

/// Gap decomposition of a valid family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MescStructure {
    pub chain: Vec<(usize, Sign)>,
    pub singletons: Vec<usize>,
    pub gaps: Vec<GapCase>,
}

impl MescStructure {
    /// Gap containing 1-based `position`.
    pub fn gap_of(&self, position: usize) -> &GapCase {
        self.gaps
            .iter()
            .find(|g| g.contains(position))
            .expect("gaps partition the domain")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MescError {
    #[error("Ω is not in the family")]
    OmegaMissing,
    #[error("family has {found} members, a basis needs {expected}")]
    WrongCardinality { expected: usize, found: usize },
    #[error("A{0} appears together with its complement")]
    BothSigns(usize),
    #[error("singleton {{{index}}} is forbidden by rule ({rule})")]
    ForbiddenSingleton { index: usize, rule: SingletonRule },
    #[error("gap ({left}, {right}] does not match the {case} singleton pattern")]
    GapPatternViolation {
        left: usize,
        right: usize,
        case: CaseTag,
    },
    #[error("internal inconsistency: structurally valid family has rank {rank} < {n}")]
    RankDeficient { rank: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("{generator} is out of range for a domain of {n} points")]
    IndexOutOfRange { generator: Generator, n: usize },
    #[error("domain of {0} points exceeds the supported maximum")]
    DomainTooLarge(usize),
    #[error("{0} appears twice in the family")]
    DuplicateMember(Generator),
    #[error("{0} is not in the family")]
    GeneratorNotInSet(Generator),
    #[error("cannot parse generator {0:?}")]
    Parse(String),
    #[error("families share {shared} members, a swap pair shares {expected}")]
    NotSwapPair { shared: usize, expected: usize },
    #[error("shared generators are linearly dependent")]
    DegenerateKernel,
    #[error("invalid generator set: {0}")]
    InvalidGeneratorSet(#[from] MescError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A family of constraint sets in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorSet {
    n: usize,
    members: Vec<Generator>,
}

impl GeneratorSet {
    /// Canonicalizes the members; two entries denoting one subset are a
    /// [`ConeError::DuplicateMember`].
    pub fn new<I>(n: usize, members: I) -> Result<Self, ConeError>
    where
        I: IntoIterator<Item = Generator>,
    {
        if n == 0 || n > MAX_POINTS {
            return Err(ConeError::DomainTooLarge(n));
        }
        let mut set = BTreeSet::new();
        for g in members {
            let c = g.canonical(n)?;
            if !set.insert(c) {
                return Err(ConeError::DuplicateMember(c));
            }
        }
        Ok(GeneratorSet {
            n,
            members: set.into_iter().collect(),
        })
    }

    /// Family from chain entries `(index, sign)` and singleton positions.
    pub fn from_parts(
        n: usize,
        chain: &[(usize, Sign)],
        singletons: &[usize],
    ) -> Result<Self, ConeError> {
        let chain = chain
            .iter()
            .map(|&(i, s)| match s {
                Sign::Pos => Generator::Prefix(i),
                Sign::Neg => Generator::CoPrefix(i),
            });
        GeneratorSet::new(n, chain.chain(singletons.iter().map(|&s| Generator::Singleton(s))))
    }

    /// Parses a comma separated list such as `A1, A2^c, {3}, Ω`.
    pub fn parse(n: usize, text: &str) -> Result<Self, ConeError> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .filter(|s| s.contains(','))
            .unwrap_or(inner);
        let mut members = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (k, ch) in inner.char_indices() {
            match ch {
                '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    members.push(Generator::parse(&inner[start..k])?);
                    start = k + 1;
                }
                _ => {}
            }
        }
        if !inner[start..].trim().is_empty() {
            members.push(Generator::parse(&inner[start..])?);
        }
        GeneratorSet::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Generator] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: Generator) -> bool {
        g.canonical(self.n)
            .is_ok_and(|c| self.members.binary_search(&c).is_ok())
    }

    pub fn has_omega(&self) -> bool {
        self.members.last() == Some(&Generator::Omega)
    }

    /// Chain entries sorted by index, including `(n, +)` for Ω when present.
    pub fn chain(&self) -> Vec<(usize, Sign)> {
        let mut chain: Vec<_> = self
            .members
            .iter()
            .filter_map(|g| g.chain_entry(self.n))
            .collect();
        chain.sort();
        chain
    }

    pub fn singletons(&self) -> Vec<usize> {
        self.members
            .iter()
            .filter_map(|g| match g {
                Generator::Singleton(i) => Some(*i),
                _ => None,
            })
            .collect()
    }

    /// Members as subset bit masks.
    pub fn masks(&self) -> Vec<u64> {
        self.members.iter().map(|g| g.mask(self.n)).collect()
    }

    /// Replaces `out` by `incoming`.
    pub fn replace(&self, out: Generator, incoming: Generator) -> Result<Self, ConeError> {
        let out = out.canonical(self.n)?;
        if !self.members.contains(&out) {
            return Err(ConeError::GeneratorNotInSet(out));
        }
        GeneratorSet::new(
            self.n,
            self.members
                .iter()
                .copied()
                .filter(|g| *g != out)
                .chain(std::iter::once(incoming)),
        )
    }

    /// Members in reading order: chain sets, then Ω, then singletons.
    pub fn display_order(&self) -> Vec<Generator> {
        let mut out: Vec<Generator> = self
            .chain()
            .into_iter()
            .filter(|&(i, _)| i < self.n)
            .map(|(i, s)| Generator::from_chain_entry(i, s, self.n))
            .collect();
        if self.has_omega() {
            out.push(Generator::Omega);
        }
        out.extend(self.singletons().into_iter().map(Generator::Singleton));
        out
    }

    fn indicator_matrix(&self) -> Matrix {
        // columns are members: h = M c
        let mut m = Matrix::zeros(self.n, self.members.len());
        for (c, g) in self.members.iter().enumerate() {
            let mask = g.mask(self.n);
            for r in 0..self.n {
                if mask >> r & 1 == 1 {
                    m.set(r, c, Rational::one());
                }
            }
        }
        m
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.display_order().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn gap_case(
    left: (usize, Option<Sign>),
    right: (usize, Sign),
    singletons: &[usize],
) -> Result<GapCase, MescError> {
    let (a, left_sign) = left;
    let (b, right_sign) = right;
    let case = CaseTag::from_signs(left_sign, right_sign);
    let m = b - a;
    let present: Vec<usize> = singletons
        .iter()
        .filter(|&&s| s > a && s <= b)
        .map(|&s| s - a)
        .collect();
    let violation = MescError::GapPatternViolation {
        left: a,
        right: b,
        case,
    };
    let ok = match case {
        CaseTag::Case1 => present.iter().copied().eq(2..=m),
        CaseTag::Case2 => m == 1 && present.is_empty(),
        CaseTag::Case3 => present.len() + 1 == m,
        CaseTag::Case4 => present.iter().copied().eq(1..m),
    };
    if !ok {
        return Err(violation);
    }
    let free = (1..=m)
        .find(|k| !present.contains(k))
        .expect("exactly one free index");
    Ok(GapCase {
        left: a,
        left_sign,
        right: b,
        right_sign,
        case,
        present,
        free,
    })
}

/// Checks the structural conditions for `g` to generate a maximal
/// elementary simplicial cone and returns its gap decomposition.
pub fn mesc_validate(g: &GeneratorSet) -> Result<MescStructure, MescError> {
    let n = g.n;
    if !g.has_omega() {
        return Err(MescError::OmegaMissing);
    }
    if g.members.len() != n {
        return Err(MescError::WrongCardinality {
            expected: n,
            found: g.members.len(),
        });
    }
    let chain = g.chain();
    if let Some(w) = chain.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(MescError::BothSigns(w[0].0));
    }
    let singletons = g.singletons();
    for &(i, sign) in &chain {
        let (forbidden, rule) = match sign {
            Sign::Pos => (i + 1, SingletonRule::AfterPrefix),
            Sign::Neg => (i, SingletonRule::AtCoPrefix),
        };
        if singletons.contains(&forbidden) {
            return Err(MescError::ForbiddenSingleton {
                index: forbidden,
                rule,
            });
        }
    }
    let mut gaps = Vec::with_capacity(chain.len());
    let mut left = (0, None);
    for &(i, sign) in &chain {
        gaps.push(gap_case(left, (i, sign), &singletons)?);
        left = (i, Some(sign));
    }
    let rank = g.indicator_matrix().rank();
    if rank < n {
        return Err(MescError::RankDeficient { rank, n });
    }
    Ok(MescStructure {
        chain,
        singletons,
        gaps,
    })
}

/// Every singleton that completes `partial` to a valid family.
pub fn singleton_completions(partial: &GeneratorSet) -> Vec<GeneratorSet> {
    (1..=partial.n)
        .filter_map(|s| {
            let candidate = GeneratorSet::new(
                partial.n,
                partial
                    .members
                    .iter()
                    .copied()
                    .chain(std::iter::once(Generator::Singleton(s))),
            )
            .ok()?;
            mesc_validate(&candidate).ok().map(|_| candidate)
        })
        .collect()
}

/// Singleton configurations (global positions) allowed in the gap
/// `(a, b]`, restricted to canonical singletons `2..n-1`.
fn gap_configurations(a: usize, b: usize, case: CaseTag, n: usize) -> Vec<Vec<usize>> {
    let m = b - a;
    let canonical = |s: &usize| *s >= 2 && *s < n;
    let configs: Vec<Vec<usize>> = match case {
        CaseTag::Case1 => vec![(a + 2..=b).collect()],
        CaseTag::Case2 if m == 1 => vec![vec![]],
        CaseTag::Case2 => vec![],
        CaseTag::Case3 => (1..=m)
            .map(|k| (a + 1..=b).filter(|&s| s != a + k).collect())
            .collect(),
        CaseTag::Case4 => vec![(a + 1..b).collect()],
    };
    configs
        .into_iter()
        .filter(|c| c.iter().all(canonical))
        .collect()
}

fn extend_mescs(
    n: usize,
    left: (usize, Option<Sign>),
    chain: &mut Vec<(usize, Sign)>,
    singletons: &mut Vec<usize>,
    out: &mut Vec<GeneratorSet>,
) {
    let (a, left_sign) = left;
    for b in a + 1..=n {
        let signs: &[Sign] = if b == n {
            &[Sign::Pos]
        } else {
            &[Sign::Pos, Sign::Neg]
        };
        for &sign in signs {
            let case = CaseTag::from_signs(left_sign, sign);
            for config in gap_configurations(a, b, case, n) {
                chain.push((b, sign));
                let mark = singletons.len();
                singletons.extend(config);
                if b == n {
                    let g = GeneratorSet::from_parts(n, chain, singletons)
                        .expect("generated families are canonical");
                    debug_assert!(mesc_validate(&g).is_ok(), "generated {g} is invalid");
                    out.push(g);
                } else {
                    extend_mescs(n, (b, Some(sign)), chain, singletons, out);
                }
                singletons.truncate(mark);
                chain.pop();
            }
        }
    }
}

/// All structurally valid families on `n` points, sorted, each exactly once.
pub fn enumerate_mescs(n: usize) -> Vec<GeneratorSet> {
    assert!((1..=MAX_POINTS).contains(&n), "unsupported domain size {n}");
    let mut out = Vec::new();
    extend_mescs(n, (0, None), &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Cached [`enumerate_mescs`].
pub fn mesc_catalog(n: usize) -> Arc<[GeneratorSet]> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<[GeneratorSet]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("catalog lock").get(&n) {
        return hit.clone();
    }
    let fresh: Arc<[GeneratorSet]> = enumerate_mescs(n).into();
    cache
        .lock()
        .expect("catalog lock")
        .entry(n)
        .or_insert(fresh)
        .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

/// Unique expansion `h = sum_B c_B 1_B` over a valid family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeMembership {
    pub membership: Membership,
    /// Coefficients in [`GeneratorSet::members`] order.
    pub coefficients: Vec<(Generator, Rational)>,
}

impl ConeMembership {
    pub fn coefficient(&self, g: Generator) -> Option<&Rational> {
        self.coefficients
            .iter()
            .find(|(m, _)| *m == g)
            .map(|(_, c)| c)
    }
}

/// Locates `h` relative to the cone spanned by `g` plus the line through
/// `1_Ω`. The Ω coefficient is unconstrained.
pub fn cone_contains(h: &Gamble, g: &GeneratorSet) -> Result<ConeMembership, ConeError> {
    if h.n() != g.n {
        return Err(ModelError::DomainMismatch {
            expected: g.n,
            found: h.n(),
        }
        .into());
    }
    mesc_validate(g)?;
    let coefs = g
        .indicator_matrix()
        .solve(h.values())
        .ok_or(MescError::RankDeficient { rank: 0, n: g.n })?;
    let constrained = g
        .members
        .iter()
        .zip(&coefs)
        .filter(|(m, _)| **m != Generator::Omega)
        .map(|(_, c)| c);
    let mut membership = Membership::Interior;
    for c in constrained {
        if c.is_negative() {
            membership = Membership::Outside;
            break;
        }
        if c.is_zero() {
            membership = Membership::Boundary;
        }
    }
    Ok(ConeMembership {
        membership,
        coefficients: g.members.iter().copied().zip(coefs).collect(),
    })
}

/// Decides whether two families sharing `n - 1` members lie on opposite
/// sides of the hyperplane spanned by the shared members.
pub fn adjacency_sign_test(g: &GeneratorSet, other: &GeneratorSet) -> Result<bool, ConeError> {
    if g.n != other.n {
        return Err(ModelError::DomainMismatch {
            expected: g.n,
            found: other.n,
        }
        .into());
    }
    let n = g.n;
    let shared: Vec<Generator> = g
        .members
        .iter()
        .copied()
        .filter(|m| other.members.binary_search(m).is_ok())
        .collect();
    if shared.len() + 1 != n || g.len() != n || other.len() != n {
        return Err(ConeError::NotSwapPair {
            shared: shared.len(),
            expected: n.saturating_sub(1),
        });
    }
    let rows: Vec<Vec<Rational>> = shared.iter().map(|s| s.indicator(n)).collect();
    let t = if rows.is_empty() {
        vec![Rational::one()]
    } else {
        Matrix::from_rows(&rows)
            .kernel_vector()
            .ok_or(ConeError::DegenerateKernel)?
    };
    let leaving = g.members.iter().find(|m| !shared.contains(m)).expect("one leaves");
    let entering = other.members.iter().find(|m| !shared.contains(m)).expect("one enters");
    let a = dot(&leaving.indicator(n), &t);
    let b = dot(&entering.indicator(n), &t);
    Ok((a * b).is_negative())
}

/// Whether `h` is measurable with respect to the chain of `g` and decreases
/// across each chain boundary `i_j` with sign `s(B_j)`: the chain part of
/// the cone's relative interior.
pub fn signed_measurable(h: &Gamble, g: &GeneratorSet) -> bool {
    let chain = g.chain();
    let v = h.values();
    let mut start = 0;
    let mut blocks = Vec::with_capacity(chain.len());
    for &(i, _) in &chain {
        let block = &v[start..i];
        if block.windows(2).any(|w| w[0] != w[1]) {
            return false;
        }
        blocks.push(block[0].clone());
        start = i;
    }
    chain.iter().zip(blocks.windows(2)).all(|(&(_, sign), w)| {
        let drop = &w[0] - &w[1];
        match sign {
            Sign::Pos => drop.is_positive(),
            Sign::Neg => drop.is_negative(),
        }
    })
}

/// Domain-aware indicator gamble of a generator.
pub fn generator_gamble(domain: &Domain, g: Generator) -> Gamble {
    Gamble::indicator(domain.clone(), g.mask(domain.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ints;

    fn set(n: usize, text: &str) -> GeneratorSet {
        GeneratorSet::parse(n, text).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(Generator::Singleton(1).canonical(5).unwrap(), Generator::Prefix(1));
        assert_eq!(Generator::Singleton(5).canonical(5).unwrap(), Generator::CoPrefix(4));
        assert_eq!(Generator::Prefix(5).canonical(5).unwrap(), Generator::Omega);
        assert_eq!(Generator::Singleton(1).canonical(1).unwrap(), Generator::Omega);
        assert!(Generator::CoPrefix(5).canonical(5).is_err());
        assert!(Generator::Prefix(0).canonical(5).is_err());
        assert_eq!(
            GeneratorSet::new(2, [Generator::Singleton(2), Generator::CoPrefix(1)]),
            Err(ConeError::DuplicateMember(Generator::CoPrefix(1)))
        );
    }

    #[test]
    fn parse_and_display() {
        let g = set(5, "{A1, A2^c, A3, A4, Ω}");
        assert_eq!(g.to_string(), "{A1, A2^c, A3, A4, Ω}");
        let g = set(5, "A1, A4, A5, {3}, {4}");
        assert_eq!(g.to_string(), "{A1, A4, Ω, {3}, {4}}");
        assert!(GeneratorSet::parse(5, "A1, B2").is_err());
    }

    #[test]
    fn paper_negative_example_is_rejected() {
        let g = GeneratorSet::from_parts(
            5,
            &[(1, Sign::Pos), (3, Sign::Neg), (4, Sign::Pos), (5, Sign::Pos)],
            &[4],
        )
        .unwrap();
        assert_eq!(
            mesc_validate(&g),
            Err(MescError::GapPatternViolation {
                left: 1,
                right: 3,
                case: CaseTag::Case2
            })
        );
    }

    #[test]
    fn full_chain_is_valid() {
        let g = set(5, "A1, A2, A3, A4, Ω");
        let s = mesc_validate(&g).unwrap();
        assert_eq!(s.gaps.len(), 5);
        assert!(s.gaps.iter().all(|gap| gap.case == CaseTag::Case1 && gap.len() == 1));
    }

    #[test]
    fn forbidden_singleton_after_prefix() {
        let g = set(5, "A1, A2, A3, Ω, {4}");
        assert_eq!(
            mesc_validate(&g),
            Err(MescError::ForbiddenSingleton {
                index: 4,
                rule: SingletonRule::AfterPrefix
            })
        );
        let g = set(5, "A1, A3^c, A4, Ω, {3}");
        assert_eq!(
            mesc_validate(&g),
            Err(MescError::ForbiddenSingleton {
                index: 3,
                rule: SingletonRule::AtCoPrefix
            })
        );
    }

    #[test]
    fn other_failures() {
        assert_eq!(mesc_validate(&set(3, "A1, A2")), Err(MescError::OmegaMissing));
        assert_eq!(
            mesc_validate(&set(3, "A1, Ω")),
            Err(MescError::WrongCardinality { expected: 3, found: 2 })
        );
        assert_eq!(
            mesc_validate(&set(3, "A1, A1^c, Ω")),
            Err(MescError::BothSigns(1))
        );
    }

    #[test]
    fn no_singleton_completes_the_case2_family() {
        let partial = set(5, "A1, A3^c, A4, Ω");
        assert!(singleton_completions(&partial).is_empty());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_mescs(1), vec![set(1, "Ω")]);
        assert_eq!(enumerate_mescs(2), vec![set(2, "A1, Ω"), set(2, "A1^c, Ω")]);
    }

    #[test]
    fn membership_interior_and_outside() {
        let h = Gamble::from_values(ints(&[1, 2, 3, 3, 1])).unwrap();
        let g = set(5, "A1^c, A4, Ω, {3}, {4}");
        let m = cone_contains(&h, &g).unwrap();
        assert_eq!(m.membership, Membership::Interior);
        for gen in g.members() {
            let expected = if *gen == Generator::Omega { 0 } else { 1 };
            assert_eq!(m.coefficient(*gen).unwrap(), &Rational::from_integer(expected.into()));
        }
        let g = set(5, "A1^c, A4, Ω, {2}, {4}");
        assert_eq!(cone_contains(&h, &g).unwrap().membership, Membership::Outside);
    }

    #[test]
    fn omega_is_on_the_boundary() {
        let h = Gamble::from_values(ints(&[1, 1, 1, 1, 1])).unwrap();
        for g in enumerate_mescs(5) {
            assert_eq!(cone_contains(&h, &g).unwrap().membership, Membership::Boundary);
        }
    }

    #[test]
    fn membership_errors() {
        let h = Gamble::from_values(ints(&[1, 2])).unwrap();
        let g = set(5, "A1, A2, A3, A4, Ω");
        assert!(matches!(cone_contains(&h, &g), Err(ConeError::Model(_))));
        let h = Gamble::from_values(ints(&[1, 2, 3, 4, 5])).unwrap();
        let bad = set(5, "A1, A2, A3, Ω, {4}");
        assert!(matches!(
            cone_contains(&h, &bad),
            Err(ConeError::InvalidGeneratorSet(_))
        ));
    }

    #[test]
    fn case_1a_sign_test() {
        // A = A1, A' = A4, excluded singleton {4}; shared {A1, A4, Ω, {3}}
        let g = set(5, "A1, A4, Ω, {3}, {4}");
        let with_b = set(5, "A1, A3, A4, Ω, {3}");
        let with_cc = set(5, "A1, A2^c, A4, Ω, {3}");
        assert!(adjacency_sign_test(&g, &with_b).unwrap());
        assert!(!adjacency_sign_test(&g, &with_cc).unwrap());
        assert!(adjacency_sign_test(&with_b, &g).unwrap());
        assert_eq!(
            adjacency_sign_test(&g, &g),
            Err(ConeError::NotSwapPair { shared: 5, expected: 4 })
        );
    }

    #[test]
    fn signed_measurability_of_generator_sums() {
        let g = set(5, "A1, A2^c, A3, A4, Ω");
        // 1_{A1} + 1_{A2^c} + 1_{A3} + 1_{A4} = (3, 2, 3, 2, 1)
        let h = Gamble::from_values(ints(&[3, 2, 3, 2, 1])).unwrap();
        assert!(signed_measurable(&h, &g));
        let flipped = Gamble::from_values(ints(&[3, 4, 3, 2, 1])).unwrap();
        assert!(!signed_measurable(&flipped, &g));
    }
}
