//! Isomonodromic Hamiltonian systems of the six Painlevé equations and the
//! Schlesinger system, integrated along complex-time paths together with the
//! logarithm of the Jimbo–Miwa–Ueno tau function and the classical action.

// `!(x <= bound)` keeps NaN on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod integrate;
pub mod schlesinger;
pub mod systems;
pub mod verify;
