//! Explicit fixed-order generating sets for symmetric, alternating and
//! mapping class groups, together with the machinery that checks them.

pub mod constructions;
pub mod genus;
pub mod group;
pub mod mcg;
pub mod perm;
pub mod sweep;
pub mod sympl;
