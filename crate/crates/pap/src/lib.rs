//! Engine for the pattern-avoidance game PAP: permutation arithmetic,
//! avoider enumeration, the monotone-forcing sets B_k, Sprague-Grundy
//! solving with symmetry reduction, and the exhaustive finite verifications.

pub mod avoidance;
pub mod bk;
pub mod game;
pub mod inflation;
pub mod pattern_set;
pub mod perm;
pub mod verify;
