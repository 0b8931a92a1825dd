//! Ordered polynomial bases on affine algebraic varieties, directional and
//! principal Chebyshev constants, and transfinite diameter estimates.

pub mod asymptotics;
pub mod chebyshev;
pub mod fekete;
pub mod polycore;
pub mod idealcore;
pub mod infinitybasis;
pub mod linalg;
pub mod lp;
pub mod numeric;
