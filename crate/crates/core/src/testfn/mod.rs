//! Compactly supported test functions on the conformal chart, their discrete
//! calculus, and the smeared two-point pairing.

pub mod function;
pub mod generator;
pub mod grid;
pub mod io;
pub mod massive;
pub mod pairing;

pub use function::{bump, decompose, integral, laplace_beltrami, transport, TestFunction};
pub use generator::{BumpSpec, Generator};
pub use grid::{GridSpec, MeasureGrid, Resolution};
pub use massive::{gram_massive, pair_massive, MassiveModes};
pub use pairing::{construct_h, gram_indef, negative_witness, pair_indef, HConstruction, HParams, ModeBasis, Profile};
