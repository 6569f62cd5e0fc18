//! Exact computation in k-nilpotent products of cyclic groups: Hall basic
//! commutators, collection in free nilpotent groups, Struik normal forms,
//! centers and central quotients, and capability decisions with explicit
//! witness groups.

pub mod basiccomm;
pub mod capability;
pub mod collector;
pub mod expr;
pub mod grouptools;
pub mod nilprod;
pub mod suites;
pub mod valuation;
