//! Pfaffian chains and functions of one variable.

pub mod chain;
pub mod constant;
pub mod function;
pub mod poly;
pub mod roots;

pub use chain::{ChainKind, PfaffianChain};
pub use constant::Constant;
pub use function::{inverse_derivative_zero_bound, zero_count_bound, PfaffianFunction};
pub use poly::Poly;
pub use roots::{
    isolate_zeros, isolate_zeros_shifted, sign_partition, slope_trichotomy, Root, RootConfig, SignPartition,
    SignProfile, SlopeLabel, SlopePartition, Zeros,
};
