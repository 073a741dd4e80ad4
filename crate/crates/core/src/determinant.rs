//! Exact tensor determinants.
//!
//! The determinant of an order-`m` tensor is the resultant of the `n` forms
//! `F_k(x) = Σ a[k, i2, ..., im] x_i2 ... x_im`. Two oracles are available:
//! the matrix determinant at `m = 2` (fraction-free Bareiss elimination) and
//! the Sylvester resultant of the two binary forms at `n = 2`. Everything
//! else goes through the closed forms `Π base_i^((m-1)^(n-1))`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{shape, usage, Error, Result};
use crate::gcdtensor::{build_gcd_tensor, MultiplicativeFn};
use crate::numtheory::{
    classify_set, euler_phi, generalized_totient, missing_divisor, missing_gcd, IntegerSet,
};
use crate::scalar::{format_rational, Scalar, ScalarKind};
use crate::tensor::{next_index, Matrix, Tensor};

/// Closed-form values whose estimated size exceeds this many bits are kept
/// in factored form only.
pub const MAX_EXPANDED_BITS: u64 = 1 << 20;

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
/// Intermediate divisions are exact for integer input.
pub fn det_matrix_exact<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(shape(format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(T::one());
    }
    let mut a: Vec<Vec<T>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return Ok(T::zero()),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            for j in k + 1..n {
                let v = (row[j].clone() * pivot_row[k].clone()
                    - row[k].clone() * pivot_row[j].clone())
                    / prev.clone();
                row[j] = v;
            }
            row[k] = T::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { T::zero() - det } else { det })
}

/// Rank over the rationals by Gaussian elimination.
pub fn exact_rank(m: &Matrix<BigRational>) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / pivot.clone();
            for j in col..row.len() {
                let v = row[j].clone() - factor.clone() * pivot_row[j].clone();
                row[j] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// The forms `F_1, ..., F_n` of a tensor, each homogeneous of degree `m-1`,
/// keyed by exponent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSystem<T> {
    pub vars: usize,
    pub degree: usize,
    pub forms: Vec<BTreeMap<Vec<u32>, T>>,
}

pub fn polynomial_system<T: Scalar>(t: &Tensor<T>) -> Result<PolynomialSystem<T>> {
    let n = t.cubical_dim()?;
    let m = t.order();
    if m < 2 {
        return Err(usage("polynomial system needs order at least 2"));
    }
    let block = t.len() / n;
    let tail_shape = vec![n; m - 1];
    let mut forms = Vec::with_capacity(n);
    for k in 0..n {
        let row = &t.entries()[k * block..(k + 1) * block];
        let mut form: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        let mut idx = vec![0usize; m - 1];
        let mut pos = 0;
        loop {
            let a = &row[pos];
            if !a.is_zero() {
                let mut exps = vec![0u32; n];
                for &i in &idx {
                    exps[i] += 1;
                }
                let slot = form.entry(exps).or_insert_with(T::zero);
                *slot = slot.clone() + a.clone();
            }
            pos += 1;
            if !next_index(&mut idx, &tail_shape) {
                break;
            }
        }
        form.retain(|_, c| !c.is_zero());
        forms.push(form);
    }
    Ok(PolynomialSystem {
        vars: n,
        degree: m - 1,
        forms,
    })
}

/// Binary form `Σ coeffs[i] x1^(d-i) x2^i` of degree `d = coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForm<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> BinaryForm<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(usage("binary form needs at least one coefficient"));
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Extracts the `k`-th form of a two-variable system.
    pub fn from_system(sys: &PolynomialSystem<T>, k: usize) -> Result<Self> {
        if sys.vars != 2 {
            return Err(usage(format!(
                "Sylvester resultant needs binary forms, system has {} variables",
                sys.vars
            )));
        }
        let form = sys
            .forms
            .get(k)
            .ok_or_else(|| usage(format!("system has no form {k}")))?;
        let d = sys.degree;
        let coeffs = (0..=d)
            .map(|i| {
                form.get(&vec![(d - i) as u32, i as u32])
                    .cloned()
                    .unwrap_or_else(T::zero)
            })
            .collect();
        Ok(BinaryForm { coeffs })
    }
}

/// Sylvester matrix of `f` (degree `d`) and `g` (degree `e`): `e` shifted
/// rows of `f`'s coefficients followed by `d` shifted rows of `g`'s.
pub fn sylvester_matrix<T: Scalar>(f: &BinaryForm<T>, g: &BinaryForm<T>) -> Matrix<T> {
    let d = f.degree();
    let e = g.degree();
    let size = d + e;
    let mut m = Matrix::zeros(size, size);
    for r in 0..e {
        for (j, c) in f.coeffs.iter().enumerate() {
            m.set(r, r + j, c.clone());
        }
    }
    for r in 0..d {
        for (j, c) in g.coeffs.iter().enumerate() {
            m.set(e + r, r + j, c.clone());
        }
    }
    m
}

pub fn sylvester_resultant<T: Scalar>(f: &BinaryForm<T>, g: &BinaryForm<T>) -> Result<T> {
    det_matrix_exact(&sylvester_matrix(f, g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetMethod {
    ClosedFormPhi,
    ClosedFormPsi,
    ClosedFormMultiplicative,
    ClosedFormMeet,
    MatrixBareiss,
    SylvesterResultant,
}

impl DetMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DetMethod::ClosedFormPhi => "closed_form_phi",
            DetMethod::ClosedFormPsi => "closed_form_psi",
            DetMethod::ClosedFormMultiplicative => "closed_form_multiplicative",
            DetMethod::ClosedFormMeet => "closed_form_meet",
            DetMethod::MatrixBareiss => "matrix_bareiss",
            DetMethod::SylvesterResultant => "sylvester_resultant",
        }
    }

    pub fn is_oracle(self) -> bool {
        matches!(self, DetMethod::MatrixBareiss | DetMethod::SylvesterResultant)
    }
}

impl fmt::Display for DetMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Determinant as `Π bases[i]^exponent`, with the expanded value when it is
/// small enough to materialize. Oracle reports carry a single base and
/// exponent 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DetReport {
    pub method: DetMethod,
    pub bases: Vec<BigRational>,
    pub exponent: BigUint,
    pub value: Option<BigRational>,
}

impl DetReport {
    pub fn from_factored(method: DetMethod, bases: Vec<BigRational>, exponent: BigUint) -> Self {
        let value = expand(&bases, &exponent);
        DetReport {
            method,
            bases,
            exponent,
            value,
        }
    }

    fn from_value(method: DetMethod, value: BigRational) -> Self {
        DetReport {
            method,
            bases: vec![value.clone()],
            exponent: BigUint::one(),
            value: Some(value),
        }
    }

    pub fn expanded(&self) -> bool {
        self.value.is_some()
    }

    /// Compares expanded values; `None` if either side is unexpanded.
    pub fn agrees_with(&self, other: &DetReport) -> Option<bool> {
        Some(self.value.as_ref()? == other.value.as_ref()?)
    }

    pub fn value_string(&self) -> Option<String> {
        self.value.as_ref().map(format_rational)
    }
}

/// `(m-1)^(n-1)`.
pub fn det_exponent(order: usize, dim: usize) -> BigUint {
    assert!(order >= 1 && dim >= 1, "order and dimension must be positive");
    num_traits::pow(BigUint::from(order - 1), dim - 1)
}

fn expand(bases: &[BigRational], exponent: &BigUint) -> Option<BigRational> {
    if bases.iter().any(Zero::is_zero) {
        return Some(BigRational::zero());
    }
    let e = exponent.to_u64()?;
    let bits_per_power: u64 = bases
        .iter()
        .map(|b| b.numer().bits() + b.denom().bits())
        .sum();
    if bits_per_power.checked_mul(e)? > MAX_EXPANDED_BITS {
        return None;
    }
    let base: BigRational = bases.iter().cloned().product();
    Some(num_traits::pow(base, e as usize))
}

/// Resultant-based determinant, restricted to `m = 2` or `n = 2`.
pub fn tensor_det_oracle<T: Scalar>(t: &Tensor<T>) -> Result<DetReport> {
    if T::KIND == ScalarKind::Float64 {
        return Err(Error::Unsupported("determinant oracle needs exact scalars".into()));
    }
    let n = t.cubical_dim()?;
    let m = t.order();
    if m < 2 {
        return Err(usage("determinant needs order at least 2"));
    }
    let to_rational = |v: T| v.to_rational().expect("exact scalar");
    if m == 2 {
        let value = det_matrix_exact(&Matrix::from_tensor(t)?)?;
        return Ok(DetReport::from_value(DetMethod::MatrixBareiss, to_rational(value)));
    }
    if n == 2 {
        let sys = polynomial_system(t)?;
        let f1 = BinaryForm::from_system(&sys, 0)?;
        let f2 = BinaryForm::from_system(&sys, 1)?;
        let value = sylvester_resultant(&f1, &f2)?;
        return Ok(DetReport::from_value(DetMethod::SylvesterResultant, to_rational(value)));
    }
    Err(Error::Unsupported(format!(
        "no determinant oracle for order {m} and dimension {n}; only order 2 or dimension 2"
    )))
}

#[derive(Debug, Clone)]
pub enum DetScheme {
    Phi,
    Psi,
    Multiplicative(MultiplicativeFn),
}

/// `Π base(s_i)^((m-1)^(n-1))` with `base` = `Φ` (factor-closed `S`),
/// `Ψ_S` (GCD-closed `S`) or `g * μ` (factor-closed `S`, determinant of
/// `g[T[S]]`).
pub fn det_closed_form(s: &IntegerSet, order: usize, scheme: &DetScheme) -> Result<DetReport> {
    if order < 2 {
        return Err(usage("determinant needs order at least 2"));
    }
    let require_factor_closed = || match missing_divisor(s) {
        Some(d) => Err(Error::NotClosed {
            property: "factor-closed",
            missing: d.to_string(),
        }),
        None => Ok(()),
    };
    let (method, bases) = match scheme {
        DetScheme::Phi => {
            require_factor_closed()?;
            let bases = s
                .iter()
                .map(|x| euler_phi(x).map(|p| BigRational::from_integer(p.into())))
                .collect::<Result<_>>()?;
            (DetMethod::ClosedFormPhi, bases)
        }
        DetScheme::Psi => {
            if let Some(g) = missing_gcd(s) {
                return Err(Error::NotClosed {
                    property: "gcd-closed",
                    missing: g.to_string(),
                });
            }
            (DetMethod::ClosedFormPsi, generalized_totient(s).values().to_vec())
        }
        DetScheme::Multiplicative(g) => {
            require_factor_closed()?;
            let bases = s.iter().map(|x| g.mobius_transform(x)).collect::<Result<_>>()?;
            (DetMethod::ClosedFormMultiplicative, bases)
        }
    };
    Ok(DetReport::from_factored(method, bases, det_exponent(order, s.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Strict,
    Equal,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCase {
    pub set: Vec<u64>,
    pub det: String,
    pub totient_bound: String,
    pub factor_closed: bool,
    pub comparison: Comparison,
}

impl ScanCase {
    /// The case contradicts "det ≥ bound, with equality iff factor-closed".
    pub fn is_counterexample(&self) -> bool {
        match self.comparison {
            Comparison::Violation => true,
            Comparison::Equal => !self.factor_closed,
            Comparison::Strict => self.factor_closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub order: usize,
    pub max_value: u64,
    pub subsets: usize,
    pub strict: usize,
    pub equal: usize,
    pub violations: usize,
    pub equal_factor_closed: usize,
    /// Every case that contradicts the inequality or its equality condition.
    pub counterexamples: Vec<ScanCase>,
}

impl ScanReport {
    pub fn violation_found(&self) -> bool {
        !self.counterexamples.is_empty()
    }
}

fn check_scan_regime(n: usize, order: usize) -> Result<()> {
    let ok = (order == 2 && (1..=8).contains(&n)) || (n == 2 && (2..=6).contains(&order));
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "scan supports order 2 with n <= 8, or n = 2 with order <= 6; got n = {n}, order = {order}"
        )))
    }
}

/// Compares the oracle determinant of `T[S]` with `Π Φ(s_i)^((m-1)^(n-1))`.
pub fn scan_case(s: &IntegerSet, order: usize) -> Result<ScanCase> {
    check_scan_regime(s.len(), order)?;
    let t = build_gcd_tensor(s, order)?;
    let det = tensor_det_oracle(&t)?.value.expect("oracle values are expanded");
    let bases: Vec<BigRational> = s
        .iter()
        .map(|x| euler_phi(x).map(|p| BigRational::from_integer(p.into())))
        .collect::<Result<_>>()?;
    let bound = DetReport::from_factored(DetMethod::ClosedFormPhi, bases, det_exponent(order, s.len()))
        .value
        .expect("small bound");
    let comparison = match det.cmp(&bound) {
        std::cmp::Ordering::Greater => Comparison::Strict,
        std::cmp::Ordering::Equal => Comparison::Equal,
        std::cmp::Ordering::Less => Comparison::Violation,
    };
    Ok(ScanCase {
        set: s.as_slice().to_vec(),
        det: format_rational(&det),
        totient_bound: format_rational(&bound),
        factor_closed: classify_set(s).factor_closed,
        comparison,
    })
}

/// Ascending `n`-subsets of `1..=max`, lexicographic.
pub(crate) fn combinations(max: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if n == 0 || (n as u64) > max {
        return out;
    }
    let mut c: Vec<u64> = (1..=n as u64).collect();
    loop {
        out.push(c.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < max - (n - 1 - i) as u64 {
                break;
            }
        }
        c[i] += 1;
        for j in i + 1..n {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Exhaustive check over every `n`-subset of `{1, ..., max_value}`.
/// Subsets are evaluated in parallel and merged in lexicographic order.
pub fn conjecture_scan(n: usize, order: usize, max_value: u64) -> Result<ScanReport> {
    check_scan_regime(n, order)?;
    if (n as u64) > max_value {
        return Err(usage(format!("cannot pick {n} distinct values from 1..={max_value}")));
    }
    let subsets = combinations(max_value, n);
    let cases = subsets
        .into_par_iter()
        .map(|c| scan_case(&IntegerSet::new(c)?, order))
        .collect::<Result<Vec<_>>>()?;
    let count = |cmp: Comparison| cases.iter().filter(|c| c.comparison == cmp).count();
    Ok(ScanReport {
        n,
        order,
        max_value,
        subsets: cases.len(),
        strict: count(Comparison::Strict),
        equal: count(Comparison::Equal),
        violations: count(Comparison::Violation),
        equal_factor_closed: cases
            .iter()
            .filter(|c| c.comparison == Comparison::Equal && c.factor_closed)
            .count(),
        counterexamples: cases.into_iter().filter(ScanCase::is_counterexample).collect(),
    })
}
