//! P-boxes on finite ordered domains: exact extreme-point enumeration of
//! their credal sets through the normal-cone classification, the adjacency
//! graph of simplicial normal cones, and natural-extension expectation
//! bounds, with an independent brute-force oracle.

pub mod cone;
pub mod extremes;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rational;

pub use cone::{
    adjacency_sign_test, cone_contains, enumerate_mescs, mesc_validate, CaseTag, ConeError,
    ConeMembership, GapCase, Generator, GeneratorSet, Membership, MescError, MescStructure, Sign,
};
pub use extremes::{
    adjacent_mesc, argmin_walk, build_fan, enumerate_extremes, extreme_from_mesc,
    lower_expectation, upper_expectation, EdgeKind, ExtremeError, ExtremePoint, FanGraph, Method,
    Realization,
};
pub use model::{
    chain_decompose, expectation, ChainCoefficients, Distribution, Domain, Gamble, MassFunction,
    ModelError, PBox, PBoxViolation, Side, StepCdf,
};
pub use oracle::{cross_check, oracle_extremes, oracle_lower_expectation, OracleError, Report};
pub use rational::{parse_rational, Rational};
