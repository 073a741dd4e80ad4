//! Integer arithmetic functions and set closures.
//!
//! Factorization is trial division, so inputs are capped at [`MAX_ELEMENT`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{usage, Error, Result};

pub const MAX_ELEMENT: u64 = 1_000_000_000;

/// Ordered list of distinct positive integers, each at most [`MAX_ELEMENT`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerSet(Vec<u64>);

impl IntegerSet {
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(usage("integer set must be nonempty"));
        }
        let mut seen = HashSet::with_capacity(elements.len());
        for &e in &elements {
            if e == 0 {
                return Err(usage("integer set elements must be positive"));
            }
            if e > MAX_ELEMENT {
                return Err(usage(format!("element {e} exceeds {MAX_ELEMENT}")));
            }
            if !seen.insert(e) {
                return Err(usage(format!("duplicate element {e}")));
            }
        }
        Ok(IntegerSet(elements))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.contains(&x)
    }

    pub fn position(&self, x: u64) -> Option<usize> {
        self.0.iter().position(|&e| e == x)
    }

    /// Same elements, ascending.
    pub fn sorted(&self) -> IntegerSet {
        let mut v = self.0.clone();
        v.sort_unstable();
        IntegerSet(v)
    }

    /// Reorders by `perm`: element `i` of the result is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<IntegerSet> {
        crate::tensor::check_permutation(perm, self.len())?;
        Ok(IntegerSet(perm.iter().map(|&p| self.0[p]).collect()))
    }

    fn from_btree(s: BTreeSet<u64>) -> IntegerSet {
        IntegerSet(s.into_iter().collect())
    }
}

impl FromStr for IntegerSet {
    type Err = Error;

    /// Comma-separated list, e.g. `"4,6"`.
    fn from_str(s: &str) -> Result<Self> {
        let elements = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| usage(format!("not a positive integer: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntegerSet::new(elements)
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Exact rational values of an arithmetic function on a finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticTable {
    domain: IntegerSet,
    values: Vec<BigRational>,
}

impl ArithmeticTable {
    pub fn new(domain: IntegerSet, values: Vec<BigRational>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(usage("arithmetic table needs one value per element"));
        }
        Ok(ArithmeticTable { domain, values })
    }

    pub fn domain(&self) -> &IntegerSet {
        &self.domain
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn get(&self, element: u64) -> Option<&BigRational> {
        self.domain.position(element).map(|i| &self.values[i])
    }

    /// Values as integers; fails if any value has a nontrivial denominator.
    pub fn integer_values(&self) -> Result<Vec<BigInt>> {
        self.values
            .iter()
            .map(|v| {
                if v.is_integer() {
                    Ok(v.to_integer())
                } else {
                    Err(usage(format!("value {v} is not an integer")))
                }
            })
            .collect()
    }
}

pub fn gcd_many(values: &[u64]) -> Result<u64> {
    let (&first, rest) = values
        .split_first()
        .ok_or_else(|| usage("gcd of an empty list"))?;
    if values.contains(&0) {
        return Err(usage("gcd arguments must be positive"));
    }
    Ok(rest.iter().fold(first, |acc, &v| acc.gcd(&v)))
}

fn check_positive(k: u64) -> Result<()> {
    if k == 0 {
        Err(usage("argument must be a positive integer"))
    } else if k > MAX_ELEMENT {
        Err(usage(format!("argument {k} exceeds {MAX_ELEMENT}")))
    } else {
        Ok(())
    }
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut k: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

/// Positive divisors of `k`, ascending.
pub fn divisors(k: u64) -> Result<Vec<u64>> {
    check_positive(k)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= k {
        if k % d == 0 {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

pub fn euler_phi(k: u64) -> Result<u64> {
    check_positive(k)?;
    Ok(factorize(k)
        .into_iter()
        .fold(k, |acc, (p, _)| acc / p * (p - 1)))
}

pub fn mobius(k: u64) -> Result<i8> {
    check_positive(k)?;
    let f = factorize(k);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// `(f * g)(k) = sum over d | k of f(d) g(k/d)`. A `None` from either
/// function is reported as a usage error.
pub fn dirichlet_convolve<F, G>(f: F, g: G, k: u64) -> Result<BigRational>
where
    F: Fn(u64) -> Option<BigRational>,
    G: Fn(u64) -> Option<BigRational>,
{
    let mut acc = BigRational::zero();
    for d in divisors(k)? {
        let fd = f(d).ok_or_else(|| usage(format!("first function undefined at {d}")))?;
        let gd = g(k / d).ok_or_else(|| usage(format!("second function undefined at {}", k / d)))?;
        acc += fd * gd;
    }
    Ok(acc)
}

/// Minimal factor-closed superset, ascending.
pub fn factor_closure(s: &IntegerSet) -> IntegerSet {
    let mut out = BTreeSet::new();
    for x in s.iter() {
        out.extend(divisors(x).expect("validated element"));
    }
    IntegerSet::from_btree(out)
}

/// Minimal GCD-closed superset, ascending.
pub fn gcd_closure(s: &IntegerSet) -> IntegerSet {
    let mut set: BTreeSet<u64> = s.iter().collect();
    let mut frontier: Vec<u64> = set.iter().copied().collect();
    while !frontier.is_empty() {
        let current: Vec<u64> = set.iter().copied().collect();
        let mut next = Vec::new();
        for &a in &frontier {
            for &b in &current {
                let g = a.gcd(&b);
                if set.insert(g) {
                    next.push(g);
                }
            }
        }
        frontier = next;
    }
    IntegerSet::from_btree(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetClass {
    pub factor_closed: bool,
    pub gcd_closed: bool,
}

pub fn classify_set(s: &IntegerSet) -> SetClass {
    SetClass {
        factor_closed: missing_divisor(s).is_none(),
        gcd_closed: missing_gcd(s).is_none(),
    }
}

/// Smallest divisor of some member that is absent from `s`.
pub fn missing_divisor(s: &IntegerSet) -> Option<u64> {
    factor_closure(s).iter().find(|&d| !s.contains(d))
}

/// Smallest pairwise GCD absent from `s`.
pub fn missing_gcd(s: &IntegerSet) -> Option<u64> {
    let elems = s.as_slice();
    let mut missing: Option<u64> = None;
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            let g = a.gcd(&b);
            if !s.contains(g) && missing.is_none_or(|m| g < m) {
                missing = Some(g);
            }
        }
    }
    missing
}

/// Generalized totient `Psi_S`: `Psi_S(s) = s - sum of Psi_S(t)` over the
/// proper divisors `t` of `s` lying in `S`. Values are listed in the input
/// order of `S`.
pub fn generalized_totient(s: &IntegerSet) -> ArithmeticTable {
    let sorted = s.sorted();
    let mut psi: Vec<(u64, BigInt)> = Vec::with_capacity(sorted.len());
    for x in sorted.iter() {
        let below: BigInt = psi
            .iter()
            .filter(|(t, _)| x % t == 0)
            .map(|(_, v)| v.clone())
            .sum();
        psi.push((x, BigInt::from(x) - below));
    }
    let values = s
        .iter()
        .map(|x| {
            let v = &psi.iter().find(|(t, _)| *t == x).expect("same elements").1;
            BigRational::from_integer(v.clone())
        })
        .collect();
    ArithmeticTable {
        domain: s.clone(),
        values,
    }
}

/// Euler totient on every element of `s`.
pub fn totient_table(s: &IntegerSet) -> ArithmeticTable {
    let values = s
        .iter()
        .map(|x| BigRational::from_integer(euler_phi(x).expect("validated").into()))
        .collect();
    ArithmeticTable {
        domain: s.clone(),
        values,
    }
}

/// `(g * mu)(k)` for an exact arithmetic function `g`.
pub fn mobius_transform<G>(g: G, k: u64) -> Result<BigRational>
where
    G: Fn(u64) -> BigRational,
{
    dirichlet_convolve(
        |d| Some(g(d)),
        |d| mobius(d).ok().map(|m| BigRational::from_integer(m.into())),
        k,
    )
}

/// `(g * mu)(k)` in floating point.
pub fn mobius_transform_f64<G>(g: G, k: u64) -> Result<f64>
where
    G: Fn(u64) -> f64,
{
    let mut acc = 0.0;
    for d in divisors(k)? {
        let mu = mobius(k / d)?;
        if mu != 0 {
            acc += f64::from(mu) * g(d);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> IntegerSet {
        IntegerSet::new(v.to_vec()).unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn gcd_many_examples() {
        assert_eq!(gcd_many(&[4, 6]).unwrap(), 2);
        assert_eq!(gcd_many(&[5]).unwrap(), 5);
        assert_eq!(gcd_many(&[2, 4, 4]).unwrap(), 2);
        assert!(gcd_many(&[]).is_err());
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(7).unwrap(), vec![1, 7]);
        assert_eq!(divisors(36).unwrap(), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert!(divisors(0).is_err());
    }

    #[test]
    fn closures() {
        assert_eq!(factor_closure(&set(&[4, 6])), set(&[1, 2, 3, 4, 6]));
        assert_eq!(factor_closure(&set(&[1, 2, 3, 4])), set(&[1, 2, 3, 4]));
        assert_eq!(factor_closure(&set(&[8])), set(&[1, 2, 4, 8]));
        assert_eq!(gcd_closure(&set(&[4, 6])), set(&[2, 4, 6]));
        assert_eq!(gcd_closure(&set(&[2, 4, 6])), set(&[2, 4, 6]));
        assert_eq!(gcd_closure(&set(&[6, 10, 15])), set(&[1, 2, 3, 5, 6, 10, 15]));
    }

    #[test]
    fn classification() {
        let c = classify_set(&set(&[1, 2, 3, 4, 6]));
        assert!(c.factor_closed && c.gcd_closed);
        let c = classify_set(&set(&[2, 4, 6]));
        assert!(!c.factor_closed && c.gcd_closed);
        assert_eq!(missing_divisor(&set(&[2, 4, 6])), Some(1));
        let c = classify_set(&set(&[4, 6]));
        assert!(!c.factor_closed && !c.gcd_closed);
        assert_eq!(missing_gcd(&set(&[4, 6])), Some(2));
    }

    #[test]
    fn totient_and_mobius_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(6).unwrap(), 2);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(999_999_937).unwrap(), 999_999_936);
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
    }

    #[test]
    fn dirichlet_examples() {
        let id = |d: u64| Some(r(d as i64));
        let mu = |d: u64| mobius(d).ok().map(|m| r(m.into()));
        let phi = |d: u64| euler_phi(d).ok().map(|p| r(p as i64));
        let one = |_: u64| Some(r(1));
        assert_eq!(dirichlet_convolve(id, mu, 6).unwrap(), r(2));
        assert_eq!(dirichlet_convolve(id, mu, 1).unwrap(), r(1));
        assert_eq!(dirichlet_convolve(phi, one, 6).unwrap(), r(6));
        let partial = |d: u64| if d < 3 { Some(r(1)) } else { None };
        assert!(dirichlet_convolve(partial, one, 6).is_err());
    }

    #[test]
    fn generalized_totient_examples() {
        let t = generalized_totient(&set(&[2, 4, 6]));
        assert_eq!(t.values(), &[r(2), r(2), r(4)]);
        assert_eq!(generalized_totient(&set(&[5])).values(), &[r(5)]);
        let fc = set(&[1, 2, 3, 4, 6]);
        assert_eq!(generalized_totient(&fc), totient_table(&fc));
        assert_eq!(generalized_totient(&fc).values(), &[r(1), r(1), r(2), r(2), r(2)]);
        // input order is preserved
        let t = generalized_totient(&set(&[6, 2, 4]));
        assert_eq!(t.values(), &[r(4), r(2), r(2)]);
        assert_eq!(t.get(4), Some(&r(2)));
    }

    #[test]
    fn set_validation() {
        assert!(IntegerSet::new(vec![]).is_err());
        assert!(IntegerSet::new(vec![0, 1]).is_err());
        assert!(IntegerSet::new(vec![2, 2]).is_err());
        assert!(IntegerSet::new(vec![MAX_ELEMENT + 1]).is_err());
        assert_eq!("4, 6".parse::<IntegerSet>().unwrap(), set(&[4, 6]));
        assert!("4,x".parse::<IntegerSet>().is_err());
    }

    #[test]
    fn gauss_and_mobius_inversion_up_to_ten_thousand() {
        for k in 1..=10_000u64 {
            let sum: u64 = divisors(k).unwrap().into_iter().map(|d| euler_phi(d).unwrap()).sum();
            assert_eq!(sum, k);
            let inv = mobius_transform(|d| r(d as i64), k).unwrap();
            assert_eq!(inv, r(euler_phi(k).unwrap() as i64), "k = {k}");
        }
    }

    fn small_set() -> impl Strategy<Value = IntegerSet> {
        proptest::collection::btree_set(1u64..200, 1..6)
            .prop_map(|s| IntegerSet::new(s.into_iter().collect()).unwrap())
    }

    proptest! {
        #[test]
        fn closures_are_closed(s in small_set()) {
            prop_assert!(classify_set(&factor_closure(&s)).factor_closed);
            prop_assert!(classify_set(&gcd_closure(&s)).gcd_closed);
            for x in s.iter() {
                prop_assert!(gcd_closure(&s).contains(x));
            }
        }

        #[test]
        fn factor_closed_psi_is_phi(s in small_set()) {
            let f = factor_closure(&s);
            prop_assert_eq!(generalized_totient(&f), totient_table(&f));
        }

        #[test]
        fn gcd_is_permutation_and_duplication_invariant(
            v in proptest::collection::vec(1u64..10_000, 1..6),
            rot in 0usize..6,
        ) {
            let g = gcd_many(&v).unwrap();
            let mut w = v.clone();
            w.rotate_left(rot % v.len());
            w.push(v[0]);
            w.reverse();
            prop_assert_eq!(gcd_many(&w).unwrap(), g);
        }

        #[test]
        fn factorization_multiplies_back(k in 1u64..1_000_000) {
            let prod: u64 = factorize(k).iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, k);
        }
    }
}
