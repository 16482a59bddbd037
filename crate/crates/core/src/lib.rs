pub mod anticonc;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod extremal;
pub mod gegenbauer;
pub mod graph;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod rounding;
pub mod solver;
