//! Brute-force reference oracles for the test suites.
//!
//! Every model built from the pattern constructors uses closed integer
//! constraints only, so enumerating runs at integer time points is exact for
//! minimum and maximum delays and for deadline violations. The oracles here
//! do that enumeration directly on the automata, without zones.

pub mod crossing;
pub mod discrete;
pub mod gen;
pub mod harness;
pub mod runs;
pub mod zones;
