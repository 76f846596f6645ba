//! Exact cohomological obstructions to Anosov diffeomorphisms.
//!
//! The crate models integral cohomology rings of products of spheres, tori
//! and complex projective spaces, the automorphisms a diffeomorphism can
//! induce on them, and the periodic-point growth those automorphisms force
//! through the Lefschetz formula. On top of that sit rule checkers that turn
//! Betti numbers, block decompositions and intersection-form isometries into
//! verdicts of the form "no (transitive) Anosov diffeomorphism".

pub mod error;
pub mod matrix;
pub mod poly;
pub mod lattice;
pub mod graded_ring;
pub mod automorphism;
pub mod lefschetz;
pub mod sphere_products;
pub mod intersection_form;
pub mod toral_oracle;
pub mod verdict;
pub mod cli;

pub use error::Error;
pub use matrix::IntMatrix;
