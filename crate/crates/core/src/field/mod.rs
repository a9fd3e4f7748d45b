//! Word-size prime fields, small extension fields, polynomials and the
//! extended totient used in probability reporting.

mod ext;
mod poly;
mod prime;
mod totient;

pub use ext::{ExtElem, ExtField, MAX_EXT_ORDER};
pub use poly::Polynomial;
pub use prime::{is_prime, PrimeField, Representation, MAX_MODULUS};
pub use totient::{distinct_degree_factor_degrees, is_irreducible, totient_phi};
