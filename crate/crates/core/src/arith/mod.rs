//! Multiplicative number theory.

pub mod euler;
pub mod factor;
pub mod primes;
pub mod sequence;

pub use euler::{euler_log_product, euler_product, EulerProduct};
pub use factor::{
    binomial_u128, divisor_count, factor_table, factorize, generalized_divisor,
    generalized_divisor_table, Exponents, FactorTable, FACTOR_BOUND,
};
pub use primes::{
    first_primes, isqrt, nth_prime, prime_index, prime_pi, primes_up_to, smallest_factor_table,
};
pub use sequence::{
    dirichlet_convolve, dirichlet_power, multiplicative, zeta_power_coeffs,
    zeta_power_coeffs_exact, ArithmeticSequence,
};
