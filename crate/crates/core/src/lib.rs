//! Schur multipliers and Lie exterior squares of finite multiplicative Lie
//! algebras, computed exactly.

pub mod group;
pub mod presentation;
pub mod zlinalg;
pub mod exterior;
pub mod mla;
pub mod liesq;
pub mod cohomology;
pub mod verify;
