//! Finite fields F_q and truncated Laurent series over them.

mod fq;
mod proj;
mod series;

pub use fq::{is_prime, make_field, prime_power, Digit, Fq, FqElement, FqSpec};
pub use proj::ProjPoint;
pub use series::{LocalElement, LocalField, DEFAULT_PRECISION};
