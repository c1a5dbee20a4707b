use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::Signed;

/// Scalar for the exact linear-algebra kernel.
///
/// Everything downstream (normal forms, lattice arithmetic) is written
/// against this trait, so the kernel also runs on machine integers in
/// unit tests. Production code uses [`crate::Int`] (arbitrary precision);
/// there are intentionally no floating-point instances, since every
/// computation in this crate must be exact.
pub trait ExactInt: Integer + Signed + Clone + From<i64> + Debug + Display + 'static {}

impl<T> ExactInt for T where T: Integer + Signed + Clone + From<i64> + Debug + Display + 'static {}
