//! Symbolic regression of isotropic hyperelastic strain-energy functions.
//!
//! Candidate energies `Ψ(I1bar, I2bar, J, η…)` are evolved as expression
//! trees by genetic programming. Each candidate is differentiated numerically
//! with respect to the invariants, turned into nominal stresses for uniaxial
//! tension, pure shear and equibiaxial tension, and scored by the mean
//! absolute error against measured curves.
//!
//! | module | contents |
//! |---|---|
//! | [`expr`] | trees, protected evaluation, parsing, printing, random generation |
//! | [`mechanics`] | loading-mode kinematics, invariants, stresses |
//! | [`fitness`] | data points, prediction, MAE |
//! | [`data`] | CSV I/O, Mooney-Rivlin benchmarks, temperature scaling |
//! | [`gp`] | configuration, selection, variation, the run loop |
//! | [`cli`] | command implementations used by the `hypersr` binary |

pub mod cli;
pub mod data;
pub mod expr;
pub mod fitness;
pub mod gp;
pub mod mechanics;

pub use expr::{ExpressionTree, FunctionSet, Op};
pub use fitness::{DataPoint, Dataset};
pub use gp::{FitResult, GpConfig, Preset};
pub use mechanics::LoadingMode;
