//! Exact construction and verification of fundamental domains of periodic
//! two-dimensional Klein sails for hyperbolic operators in SL(3, Z).

pub mod commutant;
pub mod exact;
pub mod operator;
pub mod sail;
pub mod sylvester;
pub mod units;
pub mod verifier;
