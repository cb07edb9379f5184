//! Communication-avoiding CholeskyQR factorizations of tall-skinny matrices
//! over an in-process message-passing layer.
//!
//! Ranks are async bodies that communicate only through
//! [`comm::Communicator::allreduce_sum`]. The serial backend interleaves them
//! on one thread; the parallel backend gives each rank a thread. Both sum
//! contributions in the same fixed tree order, so results are bitwise
//! identical across backends.
//!
//! ```
//! use cholqr::{harness::{run_factorization, RunConfig}, testbed::generate, Algorithm};
//!
//! let a = generate(200, 10, 1e6, 1).unwrap().matrix;
//! let out = run_factorization(&a, &RunConfig::new(Algorithm::Cqr2, 4));
//! let f = out.factors.unwrap();
//! assert_eq!(f.q.shape(), (200, 10));
//! assert_eq!(out.stats.allreduce_calls, 2);
//! ```

pub mod algos;
pub mod comm;
pub mod cost;
pub mod dense;
pub mod dist;
pub mod harness;
pub mod io;
pub mod par;
pub mod testbed;

pub use algos::{factor, Algorithm, FactorOptions, QrError, QrFactorization, ShiftPolicy};
pub use comm::{Backend, CommError, CommStats, Communicator};
pub use dense::{Matrix, UpperTriangular};
pub use dist::{DistributedMatrix, PanelSpec};
