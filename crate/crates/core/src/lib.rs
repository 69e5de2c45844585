//! Certified `L^1` norms of exponential sums `F(t) = sum_{a in A} e(a t)` over
//! finite sets of integers and lattice points, the structured sets whose
//! norms grow like a product of logarithms, and numerical checks of the
//! inequalities relating the two.
//!
//! * [`sets`], [`poly`]: integer and lattice sets, trigonometric polynomials.
//! * [`kernels`]: Dirichlet, Fejér and flat-top kernels.
//! * [`quadrature`]: FFT grid evaluation and certified norm enclosures.
//! * [`structures`]: progressions, strongly `r`-dimensional sets, certificates.
//! * [`modulus`]: residue classes, the good-modulus ladder, thinning.
//! * [`bounds`]: lower-bound verdicts and empirical constant scans.

pub mod bounds;
pub mod error;
pub mod kernels;
pub mod modulus;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod sets;
pub mod structures;
pub mod util;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{char_e, indicator_poly, recentre, TrigPoly};
pub use quadrature::{GridBudget, NormInterval};
pub use sets::{IntegerSet, LatticeSet};
pub use structures::DimCertificate;
