//! Exact-arithmetic polyhedral toolkit for single-generator unit-commitment
//! polytopes: base formulations, strong valid inequality families, convex hull
//! assemblies, vertex enumeration, separation routines, and a cutting-plane
//! driver. All arithmetic is over arbitrary-precision rationals; there is no
//! floating point anywhere in this crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cutloop;
pub mod cuts;
pub mod formulation;
pub mod model;
pub mod oracle;
pub mod polycore;
pub mod rational;
pub mod separation;
pub mod verify;

pub use model::{
    DerivedConstants, LinearInequality, ModelError, Point, RegimeClass, Sense, UCInstance, Var,
    VariableSpace,
};
pub use rational::Rat;
