//! GCD tensors and their completely positive decompositions.
//!
//! For a set `S` and a superset `F` that is factor-closed (or GCD-closed),
//! let `E` be the 0/1 matrix with `e[i][j] = 1` iff `f_j | s_i`. Then
//!
//! ```text
//! T[S] = Σ_k w(f_k) · E_k^{⊗m} = diag(w) ×_1 E ×_2 E ... ×_m E
//! ```
//!
//! with `w = Φ` on a factor-closed `F`, `w = Ψ_F` on a GCD-closed `F`, and
//! `w = g * μ` when the entries are replaced by `g(gcd)` for a multiplicative
//! `g`. Every column set spans `R^n` because the columns indexed by `S`
//! itself form a unit lower triangular block.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::determinant::exact_rank;
use crate::error::{usage, Error, Result};
use crate::numtheory::{
    divisors, euler_phi, factor_closure, gcd_closure, generalized_totient, mobius,
    mobius_transform, mobius_transform_f64, IntegerSet,
};
use crate::tensor::{Matrix, Tensor};
use crate::{AnyTensor, Scalar};

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(usage(format!("tensor order must be at least 2, got {order}")));
    }
    Ok(())
}

/// Entries `gcd(s_i1, ..., s_im)` as machine integers, storage order.
fn gcd_entries(s: &IntegerSet, order: usize) -> Result<Vec<u64>> {
    check_order(order)?;
    let n = s.len();
    n.checked_pow(order as u32)
        .filter(|&len| len <= crate::tensor::MAX_ENTRIES)
        .ok_or_else(|| usage(format!("GCD tensor of order {order} on {n} elements is too large")))?;
    let mut acc: Vec<u64> = s.as_slice().to_vec();
    for _ in 1..order {
        let mut next = Vec::with_capacity(acc.len() * n);
        for &a in &acc {
            next.extend(s.iter().map(|x| a.gcd(&x)));
        }
        acc = next;
    }
    Ok(acc)
}

pub fn build_gcd_tensor(s: &IntegerSet, order: usize) -> Result<Tensor<BigInt>> {
    let entries = gcd_entries(s, order)?;
    Tensor::from_vec(
        vec![s.len(); order],
        entries.into_iter().map(BigInt::from).collect(),
    )
}

/// `g[T[S]]`: the GCD tensor with `g` applied to every entry.
pub fn multiplicative_transform<T, G>(s: &IntegerSet, order: usize, g: G) -> Result<Tensor<T>>
where
    T: Scalar,
    G: Fn(u64) -> Result<T>,
{
    let entries = gcd_entries(s, order)?;
    // each distinct gcd value is evaluated once
    let mut cache: Vec<(u64, T)> = Vec::new();
    let mut data = Vec::with_capacity(entries.len());
    for v in entries {
        let val = match cache.iter().find(|(k, _)| *k == v) {
            Some((_, t)) => t.clone(),
            None => {
                let t = g(v)?;
                cache.push((v, t.clone()));
                t
            }
        };
        data.push(val);
    }
    Tensor::from_vec(vec![s.len(); order], data)
}

/// Entrywise power `T[S]^{∘r}` in floating point.
pub fn fractional_power(s: &IntegerSet, order: usize, r: f64) -> Result<Tensor<f64>> {
    check_exponent(r)?;
    multiplicative_transform(s, order, |v| Ok((v as f64).powf(r)))
}

fn check_exponent(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(usage(format!("fractional exponent must be finite and nonnegative, got {r}")));
    }
    Ok(())
}

/// 0/1 matrix relating row labels to column labels, e.g. `f_j | s_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix<L = u64> {
    row_labels: Vec<L>,
    col_labels: Vec<L>,
    bits: Vec<bool>,
}

impl<L: Clone> IncidenceMatrix<L> {
    pub(crate) fn from_fn(
        row_labels: Vec<L>,
        col_labels: Vec<L>,
        mut rel: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut bits = Vec::with_capacity(row_labels.len() * col_labels.len());
        for i in 0..row_labels.len() {
            for j in 0..col_labels.len() {
                bits.push(rel(i, j));
            }
        }
        IncidenceMatrix {
            row_labels,
            col_labels,
            bits,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[L] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[L] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows()).map(|i| u8::from(self.get(i, j))).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u8>> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let data = self
            .bits
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect();
        Matrix::from_vec(self.rows(), self.cols(), data).expect("consistent dimensions")
    }
}

/// `e[i][j] = 1` iff `f[j]` divides `s[i]`. Requires `S ⊆ F`.
pub fn incidence_matrix(s: &IntegerSet, f: &IntegerSet) -> Result<IncidenceMatrix> {
    if let Some(x) = s.iter().find(|&x| !f.contains(x)) {
        return Err(usage(format!("{x} belongs to S but not to F")));
    }
    let rows = s.as_slice().to_vec();
    let cols = f.as_slice().to_vec();
    Ok(IncidenceMatrix::from_fn(rows.clone(), cols.clone(), |i, j| {
        rows[i] % cols[j] == 0
    }))
}

/// Exact arithmetic function used as `g` in `g[T[S]]`.
#[derive(Clone)]
pub struct MultiplicativeFn {
    name: String,
    f: Arc<dyn Fn(u64) -> BigRational + Send + Sync>,
}

impl MultiplicativeFn {
    pub fn new(name: impl Into<String>, f: impl Fn(u64) -> BigRational + Send + Sync + 'static) -> Self {
        MultiplicativeFn {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `g(p) = p^k`.
    pub fn power(k: u32) -> Self {
        MultiplicativeFn::new(format!("power:{k}"), move |p| {
            BigRational::from_integer(num_traits::pow(BigInt::from(p), k as usize))
        })
    }

    /// Sum of divisors.
    pub fn sigma() -> Self {
        MultiplicativeFn::new("sigma", |p| {
            BigRational::from_integer(divisors(p).expect("positive").into_iter().map(BigInt::from).sum())
        })
    }

    pub fn totient() -> Self {
        MultiplicativeFn::new("phi", |p| {
            BigRational::from_integer(euler_phi(p).expect("positive").into())
        })
    }

    pub fn mobius() -> Self {
        MultiplicativeFn::new("mobius", |p| {
            BigRational::from_integer(mobius(p).expect("positive").into())
        })
    }

    /// Parses `power:K`, `sigma`, `phi` or `mobius`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim() {
            "sigma" => Ok(Self::sigma()),
            "phi" => Ok(Self::totient()),
            "mobius" => Ok(Self::mobius()),
            other => {
                let k = other
                    .strip_prefix("power:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| {
                        usage(format!(
                            "unknown function {other:?}; expected power:K, sigma, phi or mobius"
                        ))
                    })?;
                Ok(Self::power(k))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, p: u64) -> BigRational {
        (self.f)(p)
    }

    /// `(g * μ)(k)`.
    pub fn mobius_transform(&self, k: u64) -> Result<BigRational> {
        mobius_transform(|d| self.eval(d), k)
    }
}

impl fmt::Debug for MultiplicativeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MultiplicativeFn").field(&self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum WeightScheme {
    /// `Φ(f)` over the factor closure.
    Phi,
    /// `Ψ_F(f)` over the GCD closure.
    Psi,
    /// `(g * μ)(f)` over the factor closure; decomposes `g[T[S]]`.
    Multiplicative(MultiplicativeFn),
    /// `(p^r * μ)(f)` over the factor closure; decomposes `T[S]^{∘r}`.
    Fractional(f64),
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Phi => write!(f, "phi_factor_closed"),
            WeightScheme::Psi => write!(f, "psi_gcd_closed"),
            WeightScheme::Multiplicative(g) => write!(f, "multiplicative({})", g.name()),
            WeightScheme::Fractional(r) => write!(f, "fractional({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Int(Vec<BigInt>),
    Rational(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Int(w) => w.len(),
            Weights::Rational(w) => w.len(),
            Weights::Float(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Weights::Int(w) => w.iter().map(Scalar::to_f64).collect(),
            Weights::Rational(w) => w.iter().map(Scalar::to_f64).collect(),
            Weights::Float(w) => w.clone(),
        }
    }

    fn signs(&self) -> Vec<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match self {
            Weights::Int(w) => w.iter().map(|x| x.sign_ordering()).collect(),
            Weights::Rational(w) => w.iter().map(|x| x.numer().sign_ordering()).collect(),
            Weights::Float(w) => w
                .iter()
                .map(|x| x.partial_cmp(&0.0).unwrap_or(Ordering::Less))
                .collect(),
        }
    }

    pub fn all_positive(&self) -> bool {
        self.signs().iter().all(|s| s.is_gt())
    }

    fn nonzero_mask(&self) -> Vec<bool> {
        self.signs().iter().map(|s| !s.is_eq()).collect()
    }
}

trait SignOrdering {
    fn sign_ordering(&self) -> std::cmp::Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> std::cmp::Ordering {
        if self.is_positive() {
            std::cmp::Ordering::Greater
        } else if self.is_zero() {
            std::cmp::Ordering::Equal
        } else {
            std::cmp::Ordering::Less
        }
    }
}

/// `Σ_k weights[k] · vectors[k]^{⊗order}`.
#[derive(Debug, Clone)]
pub struct CpDecomposition {
    pub order: usize,
    pub dim: usize,
    pub scheme: String,
    /// Labels `f_k` of the columns, when the decomposition comes from a set.
    pub columns: Vec<u64>,
    pub weights: Weights,
    pub vectors: Vec<Vec<u8>>,
    /// Set when some weight is not positive, so the decomposition is an
    /// identity but not a strong-CP certificate.
    pub certificate_withheld: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankWitness {
    pub rank: usize,
    pub spanning: bool,
}

impl CpDecomposition {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn reconstruct(&self) -> Result<AnyTensor> {
        Ok(match &self.weights {
            Weights::Int(w) => AnyTensor::Int(reconstruct_with(w, &self.vectors, self.order, self.dim)?),
            Weights::Rational(w) => {
                AnyTensor::Rational(reconstruct_with(w, &self.vectors, self.order, self.dim)?)
            }
            Weights::Float(w) => AnyTensor::Float(reconstruct_with(w, &self.vectors, self.order, self.dim)?),
        })
    }

    /// Exact rank of the vectors that carry a nonzero weight.
    pub fn rank_witness(&self) -> RankWitness {
        let mask = self.weights.nonzero_mask();
        let rows: Vec<Vec<BigRational>> = self
            .vectors
            .iter()
            .zip(mask)
            .filter(|(_, keep)| *keep)
            .map(|(v, _)| {
                v.iter()
                    .map(|&b| BigRational::from_integer(BigInt::from(b)))
                    .collect()
            })
            .collect();
        let rank = if rows.is_empty() {
            0
        } else {
            exact_rank(&Matrix::from_rows(rows).expect("equal lengths"))
        };
        RankWitness {
            rank,
            spanning: rank == self.dim,
        }
    }
}

/// Sums `w_k · v_k^{⊗order}`, touching only index tuples drawn from each
/// vector's support.
pub(crate) fn reconstruct_with<T: Scalar, V>(
    weights: &[T],
    vectors: &[V],
    order: usize,
    dim: usize,
) -> Result<Tensor<T>>
where
    V: AsRef<[u8]>,
{
    if weights.len() != vectors.len() {
        return Err(usage("weights and vectors differ in length"));
    }
    let mut data = Tensor::<T>::cubical_zeros(order, dim)?.into_entries();
    let strides: Vec<usize> = (0..order).map(|p| dim.pow((order - 1 - p) as u32)).collect();
    for (w, v) in weights.iter().zip(vectors) {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(usage(format!("vector of length {} in dimension {dim}", v.len())));
        }
        if w.is_zero() {
            continue;
        }
        let support: Vec<usize> = (0..dim).filter(|&i| v[i] != 0).collect();
        if support.is_empty() {
            continue;
        }
        let values: Vec<T> = support.iter().map(|&i| T::from_u64(u64::from(v[i]))).collect();
        let all_ones = values.iter().all(|x| x.is_one());
        let ext = vec![support.len(); order];
        let mut pos = vec![0usize; order];
        loop {
            let flat: usize = pos.iter().zip(&strides).map(|(&p, &s)| support[p] * s).sum();
            let term = if all_ones {
                w.clone()
            } else {
                pos.iter().fold(w.clone(), |acc, &p| acc * values[p].clone())
            };
            data[flat] = data[flat].clone() + term;
            if !crate::tensor::next_index(&mut pos, &ext) {
                break;
            }
        }
    }
    Tensor::from_vec(vec![dim; order], data)
}

/// Strongly CP decomposition of the GCD tensor (or of its transform under
/// the scheme's function). Columns follow the ascending closure of `S`.
pub fn scp_decompose(s: &IntegerSet, order: usize, scheme: &WeightScheme) -> Result<CpDecomposition> {
    check_order(order)?;
    let f = match scheme {
        WeightScheme::Psi => gcd_closure(s),
        _ => factor_closure(s),
    };
    let e = incidence_matrix(s, &f)?;
    let weights = match scheme {
        WeightScheme::Phi => Weights::Int(
            f.iter()
                .map(|x| euler_phi(x).map(BigInt::from))
                .collect::<Result<_>>()?,
        ),
        WeightScheme::Psi => Weights::Int(generalized_totient(&f).integer_values()?),
        WeightScheme::Multiplicative(g) => Weights::Rational(
            f.iter()
                .map(|x| g.mobius_transform(x))
                .collect::<Result<_>>()?,
        ),
        WeightScheme::Fractional(r) => {
            check_exponent(*r)?;
            let r = *r;
            Weights::Float(
                f.iter()
                    .map(|x| mobius_transform_f64(|d| (d as f64).powf(r), x))
                    .collect::<Result<_>>()?,
            )
        }
    };
    let certificate_withheld = !weights.all_positive();
    Ok(CpDecomposition {
        order,
        dim: s.len(),
        scheme: scheme.to_string(),
        columns: f.as_slice().to_vec(),
        weights,
        vectors: e.columns(),
        certificate_withheld,
    })
}

pub fn reconstruct(d: &CpDecomposition) -> Result<AnyTensor> {
    d.reconstruct()
}

pub fn strong_cp_rank_witness(d: &CpDecomposition) -> RankWitness {
    d.rank_witness()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorScheme {
    Phi,
    Psi,
}

/// `T[S] = D ×_1 E ×_2 E ... ×_m E` with `D` diagonal of dimension `|F|`.
#[derive(Debug, Clone)]
pub struct GcdFactorization {
    pub diagonal: Tensor<BigInt>,
    pub incidence: IncidenceMatrix,
}

impl GcdFactorization {
    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        let l = self.incidence.cols();
        let order = self.diagonal.order();
        (0..l).map(|i| self.diagonal.get(&vec![i; order]).clone()).collect()
    }

    pub fn product(&self) -> Result<Tensor<BigInt>> {
        self.diagonal.multi_mode_product(&self.incidence.to_matrix())
    }
}

pub fn factorize(s: &IntegerSet, order: usize, scheme: FactorScheme) -> Result<GcdFactorization> {
    check_order(order)?;
    let (f, weights) = match scheme {
        FactorScheme::Phi => {
            let f = factor_closure(s);
            let w = f
                .iter()
                .map(|x| euler_phi(x).map(BigInt::from))
                .collect::<Result<Vec<_>>>()?;
            (f, w)
        }
        FactorScheme::Psi => {
            let f = gcd_closure(s);
            let w = generalized_totient(&f).integer_values()?;
            (f, w)
        }
    };
    let incidence = incidence_matrix(s, &f)?;
    let diagonal = Tensor::diagonal(&weights, order)?;
    Ok(GcdFactorization {
        diagonal,
        incidence,
    })
}

/// Relative entrywise agreement of two float tensors, scaled by the larger
/// magnitude of each pair (floored at 1).
pub fn max_relative_error(a: &Tensor<f64>, b: &Tensor<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max))
}
