//! Weight-function SOS: specifications whose rules compute weight functions,
//! the ULTraSs they induce, and bisimilarity on those systems.
//!
//! The core is generic over the weight carrier; the aliases below fix the
//! carriers used in practice.

pub mod engine;
pub mod equiv;
pub mod frontends;
pub mod interp;
pub mod syntax;
pub mod ultras;
pub mod weights;
pub mod wfsos;

use weights::{Bool, ExtRational, Nat, Rational};

pub type BoolUltras = ultras::Ultras<Bool>;
pub type NatUltras = ultras::Ultras<Nat>;
pub type RatUltras = ultras::Ultras<Rational>;
/// Rates extended with infinity, as in PEPA.
pub type RateUltras = ultras::Ultras<ExtRational>;

pub type BoolSpec = wfsos::WfsosSpec<Bool>;
pub type NatSpec = wfsos::WfsosSpec<Nat>;
pub type RatSpec = wfsos::WfsosSpec<Rational>;
pub type RateSpec = wfsos::WfsosSpec<ExtRational>;
