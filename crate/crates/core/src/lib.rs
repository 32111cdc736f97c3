//! Monomer-dimer model toolkit.
//!
//! Exact partition functions and occupation probabilities on small graphs,
//! linear-time recursions on trees, Galton-Watson and Erdős–Rényi samplers,
//! and a population-dynamics solver for the cavity fixed point with
//! alternating even/odd bounds.
//!
//! The combinatorial core (partition functions, probabilities, covariances)
//! is generic over the scalar type, so the same code runs in `f64`, in exact
//! rational arithmetic ([`Rational`]) and over complex activities
//! ([`Complex`]). Population dynamics is generic over `f32`/`f64`.

pub mod error;
pub mod exact;
pub mod fixed_point;
pub mod graph;
pub mod offspring;
pub mod rng;
pub mod tree;
pub mod validation;

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub use error::{Error, Result};
pub use exact::{ActivityWeights, ExactModel, Matching, MatchingPolynomial};
pub use fixed_point::{FixedPointResult, Population, PressureEstimate};
pub use graph::{Ball, Graph, RootedTree};
pub use offspring::OffspringDistribution;

/// Commutative ring/field element usable by the exact recursions.
///
/// Only the field operations are required, so complex numbers qualify.
pub trait Scalar: Num + Clone + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Clone + Debug + Send + Sync + 'static {}

/// Ordered scalar: floats and exact rationals.
pub trait Real: Scalar + PartialOrd + Signed + ToPrimitive + FromPrimitive {}

impl<T> Real for T where T: Scalar + PartialOrd + Signed + ToPrimitive + FromPrimitive {}

/// Floating-point scalar for the population-dynamics pools.
pub trait FloatScalar:
    num_traits::Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

impl FloatScalar for f32 {}
impl FloatScalar for f64 {}

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Complex activity scalar.
pub type Complex = num_complex::Complex64;

pub type Graph64 = Graph<f64>;
pub type RationalGraph = Graph<Rational>;
pub type RootedTree64 = RootedTree<f64>;
pub type ExactModel64 = ExactModel<f64>;
pub type RationalModel = ExactModel<Rational>;
pub type ComplexModel = ExactModel<Complex>;
pub type Population64 = Population<f64>;
pub type Population32 = Population<f32>;

/// Converts an `f64` to a rational exactly (every finite double is dyadic).
pub fn rational_from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}
