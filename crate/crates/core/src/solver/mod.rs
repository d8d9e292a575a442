//! Internal numerical machinery: a dense simplex LP solver, an alternating
//! I-projection solver for constrained KL minimization, and the iterative
//! capacity optimizers.

pub mod klmin;
pub mod optim;
pub mod simplex;
