//! GCD tensors, their meet-semilattice generalization, strongly completely
//! positive decompositions and exact determinants.
//!
//! ```
//! use gcdtensor::numtheory::IntegerSet;
//! use gcdtensor::gcdtensor::{build_gcd_tensor, scp_decompose, WeightScheme};
//!
//! let s: IntegerSet = "4,6".parse().unwrap();
//! let t = build_gcd_tensor(&s, 2).unwrap();
//! let d = scp_decompose(&s, 2, &WeightScheme::Phi).unwrap();
//! assert_eq!(d.reconstruct().unwrap(), gcdtensor::AnyTensor::Int(t));
//! ```

pub mod cli;
pub mod determinant;
pub mod error;
pub mod gcdtensor;
pub mod json;
pub mod numtheory;
pub mod poset;
pub mod positivity;
pub mod scalar;
pub mod tensor;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarKind};
pub use tensor::{Matrix, Tensor};

/// A tensor over any of the supported scalar kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Int(Tensor<BigInt>),
    Rational(Tensor<BigRational>),
    Float(Tensor<f64>),
}

impl AnyTensor {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyTensor::Int(_) => ScalarKind::Int,
            AnyTensor::Rational(_) => ScalarKind::Rational,
            AnyTensor::Float(_) => ScalarKind::Float64,
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            AnyTensor::Int(t) => t.shape(),
            AnyTensor::Rational(t) => t.shape(),
            AnyTensor::Float(t) => t.shape(),
        }
    }

    pub fn to_f64(&self) -> Tensor<f64> {
        match self {
            AnyTensor::Int(t) => t.to_f64(),
            AnyTensor::Rational(t) => t.to_f64(),
            AnyTensor::Float(t) => t.clone(),
        }
    }

    /// Exact rational view; `None` for float tensors.
    pub fn to_rational(&self) -> Option<Tensor<BigRational>> {
        match self {
            AnyTensor::Int(t) => Some(t.map(|x| BigRational::from_integer(x.clone()))),
            AnyTensor::Rational(t) => Some(t.clone()),
            AnyTensor::Float(_) => None,
        }
    }
}
