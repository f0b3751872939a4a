//! Permutation-group engine for verifying commutator properties of finite
//! groups: stabilizer chains, backtrack search, group constructions,
//! conjugacy classes and the one-noncommutator verification procedure.
//!
//! The crate is `no_std` and only needs `alloc`. IO, timing and threading live
//! in the companion `noncomm` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod backtrack;
pub mod chain;
pub mod classes;
pub mod groupops;
pub mod machale;
pub mod oracle;
pub mod perm;

pub use chain::{same_group, subgroup_of, GroupOrder, PermGroup, StabilizerChain};
pub use perm::{commutator, CycleType, Perm};
