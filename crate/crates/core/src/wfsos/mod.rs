//! WFSOS rules and specifications: representation, validation, trigger
//! matching and the spec language.

pub mod dsl;
mod rule;
mod spec;

pub use dsl::{parse_spec, print_spec, Format, SpecError};
pub use rule::{
    match_trigger, validate_group, validate_rule, ArgMode, CondOp, MergeGroup, NegPremise, PosPremise, Rule,
    RuleViolation, SideCond, SupportPremise, TotalPremise, Trigger, ViolationKind,
};
pub use spec::WfsosSpec;
