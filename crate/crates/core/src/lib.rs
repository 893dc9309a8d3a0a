//! Exact computations with quaternion orders over Q, Q(√2) and Q(√5).

pub mod catalog;
pub mod enumerate;
pub mod formulas;
pub mod lattice;
mod linalg;
pub mod numbers;
pub mod perceptive;
pub mod quat;
