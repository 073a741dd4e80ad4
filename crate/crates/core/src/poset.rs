//! Finite meet semilattices and meet tensors.
//!
//! Elements carry string labels. The order relation is given as arbitrary
//! `(a, b)` pairs meaning "a is below b"; reflexive and transitive closure
//! are taken on construction, after which antisymmetry and the existence
//! of unique pairwise meets are checked.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;

use crate::determinant::{det_exponent, DetMethod, DetReport};
use crate::error::{usage, Error, Result};
use crate::gcdtensor::{reconstruct_with, IncidenceMatrix};
use crate::scalar::Scalar;
use crate::tensor::{next_index, Tensor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetSemilattice {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// `leq[a * n + b]` iff `a` is below `b`.
    leq: Vec<bool>,
    meet: Vec<usize>,
}

impl MeetSemilattice {
    pub fn new<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self> {
        if elements.is_empty() {
            return Err(usage("a lattice needs at least one element"));
        }
        let labels: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(usage(format!("duplicate element {l:?}")));
            }
        }
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let lookup = |x: &str| {
                index
                    .get(x)
                    .copied()
                    .ok_or_else(|| usage(format!("pair mentions undeclared element {x:?}")))
            };
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::OrderAxiom(format!(
                        "{:?} and {:?} are each below the other",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let lower: Vec<usize> = (0..n).filter(|&c| leq[c * n + a] && leq[c * n + b]).collect();
                let greatest = lower
                    .iter()
                    .copied()
                    .find(|&g| lower.iter().all(|&c| leq[c * n + g]))
                    .ok_or_else(|| Error::NoMeet(labels[a].clone(), labels[b].clone()))?;
                meet[a * n + b] = greatest;
                meet[b * n + a] = greatest;
            }
        }
        Ok(MeetSemilattice {
            labels,
            index,
            leq,
            meet,
        })
    }

    /// Divisibility order on `values`, labelled by their decimal spelling.
    pub fn divisibility(values: &[u64]) -> Result<Self> {
        if values.contains(&0) {
            return Err(usage("divisibility lattice needs positive integers"));
        }
        let labels: Vec<String> = values.iter().map(u64::to_string).collect();
        let mut pairs = Vec::new();
        for (i, &a) in values.iter().enumerate() {
            for (j, &b) in values.iter().enumerate() {
                if i != j && b % a == 0 {
                    pairs.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        MeetSemilattice::new(&labels, &pairs)
    }

    /// All subsets of `atoms` ordered by inclusion, labelled `{}`, `{a}`,
    /// `{a,b}`, ... in binary counting order.
    pub fn subsets(atoms: &[&str]) -> Result<Self> {
        if atoms.len() > 12 {
            return Err(usage("subset lattice limited to 12 atoms"));
        }
        let count = 1usize << atoms.len();
        let labels: Vec<String> = (0..count).map(|mask| subset_label(atoms, mask)).collect();
        let mut pairs = Vec::new();
        for a in 0..count {
            for b in 0..count {
                if a != b && a & b == a {
                    pairs.push((labels[a].clone(), labels[b].clone()));
                }
            }
        }
        MeetSemilattice::new(&labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| usage(format!("unknown element {label:?}")))
    }

    pub(crate) fn indices<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub fn leq(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    pub(crate) fn leq_idx(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    pub(crate) fn meet_idx(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b]
    }

    /// Every related pair `(a, b)` with `a` strictly below `b`.
    pub fn order_pairs(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq_idx(a, b) {
                    out.push((self.labels[a].clone(), self.labels[b].clone()));
                }
            }
        }
        out
    }

    pub fn meet(&self, a: &str, b: &str) -> Result<&str> {
        let m = self.meet_idx(self.index_of(a)?, self.index_of(b)?);
        Ok(&self.labels[m])
    }

    pub fn meet_many<S: AsRef<str>>(&self, items: &[S]) -> Result<&str> {
        let idx = self.indices(items)?;
        let first = *idx.first().ok_or_else(|| usage("meet of an empty list"))?;
        let m = idx[1..].iter().fold(first, |acc, &i| self.meet_idx(acc, i));
        Ok(&self.labels[m])
    }

    /// Smallest meet-closed superset of `s`: the members of `s` in their
    /// given order, followed by added meets in lattice order.
    pub fn meet_closure<S: AsRef<str>>(&self, s: &[S]) -> Result<Vec<String>> {
        let idx = distinct(self, s)?;
        let mut member = vec![false; self.len()];
        idx.iter().for_each(|&i| member[i] = true);
        let mut current = idx.clone();
        loop {
            let mut added = false;
            let snapshot = current.clone();
            for (p, &a) in snapshot.iter().enumerate() {
                for &b in &snapshot[p + 1..] {
                    let m = self.meet_idx(a, b);
                    if !member[m] {
                        member[m] = true;
                        current.push(m);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut extra: Vec<usize> = current[idx.len()..].to_vec();
        extra.sort_unstable();
        Ok(idx
            .into_iter()
            .chain(extra)
            .map(|i| self.labels[i].clone())
            .collect())
    }

    pub fn is_meet_closed<S: AsRef<str>>(&self, s: &[S]) -> Result<bool> {
        Ok(self.missing_meet(&self.indices(s)?).is_none())
    }

    fn missing_meet(&self, idx: &[usize]) -> Option<usize> {
        let mut member = vec![false; self.len()];
        idx.iter().for_each(|&i| member[i] = true);
        for (p, &a) in idx.iter().enumerate() {
            for &b in &idx[p + 1..] {
                let m = self.meet_idx(a, b);
                if !member[m] {
                    return Some(m);
                }
            }
        }
        None
    }

    fn require_meet_closed(&self, idx: &[usize]) -> Result<()> {
        match self.missing_meet(idx) {
            Some(m) => Err(Error::NotClosed {
                property: "meet-closed",
                missing: self.labels[m].clone(),
            }),
            None => Ok(()),
        }
    }

    /// Members of `idx` sorted into a linear extension of the order; among
    /// incomparable elements the earlier position in `idx` goes first.
    fn linear_extension(&self, idx: &[usize]) -> Vec<usize> {
        let mut placed = vec![false; idx.len()];
        let mut out = Vec::with_capacity(idx.len());
        while out.len() < idx.len() {
            let next = (0..idx.len())
                .find(|&p| {
                    !placed[p]
                        && (0..idx.len()).all(|q| placed[q] || q == p || !self.leq_idx(idx[q], idx[p]))
                })
                .expect("a finite partial order has a minimal element");
            placed[next] = true;
            out.push(next);
        }
        out
    }
}

fn subset_label(atoms: &[&str], mask: usize) -> String {
    let parts: Vec<&str> = atoms
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, a)| *a)
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn distinct<S: AsRef<str>>(l: &MeetSemilattice, s: &[S]) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Err(usage("subset must be nonempty"));
    }
    let idx = l.indices(s)?;
    let mut seen = vec![false; l.len()];
    for &i in &idx {
        if std::mem::replace(&mut seen[i], true) {
            return Err(usage(format!("duplicate element {:?}", l.labels[i])));
        }
    }
    Ok(idx)
}

/// A value for every element of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation<T> {
    values: Vec<T>,
}

impl<T: Scalar> Valuation<T> {
    pub fn from_map(l: &MeetSemilattice, map: &BTreeMap<String, T>) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !l.index.contains_key(*k)) {
            return Err(usage(format!("valuation mentions unknown element {k:?}")));
        }
        let values = l
            .labels
            .iter()
            .map(|label| {
                map.get(label)
                    .cloned()
                    .ok_or_else(|| usage(format!("valuation has no value for {label:?}")))
            })
            .collect::<Result<_>>()?;
        Ok(Valuation { values })
    }

    pub fn from_fn(l: &MeetSemilattice, f: impl Fn(&str) -> T) -> Self {
        Valuation {
            values: l.labels.iter().map(|s| f(s)).collect(),
        }
    }

    pub fn get(&self, l: &MeetSemilattice, label: &str) -> Result<&T> {
        Ok(&self.values[l.index_of(label)?])
    }

    fn at(&self, i: usize) -> &T {
        &self.values[i]
    }

    fn check(&self, l: &MeetSemilattice) -> Result<()> {
        if self.values.len() == l.len() {
            Ok(())
        } else {
            Err(usage(format!(
                "valuation has {} values for a lattice of {} elements",
                self.values.len(),
                l.len()
            )))
        }
    }

    pub fn to_map(&self, l: &MeetSemilattice) -> BTreeMap<String, T> {
        l.labels.iter().cloned().zip(self.values.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosetTotientTable<T> {
    /// Members of `S` in the order given.
    pub labels: Vec<String>,
    pub values: Vec<T>,
    /// The evaluation order used.
    pub extension: Vec<String>,
}

impl<T> PosetTotientTable<T> {
    pub fn get(&self, label: &str) -> Option<&T> {
        self.labels.iter().position(|l| l == label).map(|i| &self.values[i])
    }
}

fn totient_indices<T: Scalar>(l: &MeetSemilattice, idx: &[usize], g: &Valuation<T>) -> (Vec<T>, Vec<usize>) {
    let order = l.linear_extension(idx);
    let mut values: Vec<Option<T>> = vec![None; idx.len()];
    for &p in &order {
        let mut v = g.at(idx[p]).clone();
        for (q, w) in values.iter().enumerate() {
            if let Some(w) = w {
                if q != p && l.leq_idx(idx[q], idx[p]) {
                    v = v - w.clone();
                }
            }
        }
        values[p] = Some(v);
    }
    (values.into_iter().map(|v| v.expect("all evaluated")).collect(), order)
}

/// `Ψ_{S,g}(s) = g(s) - Σ Ψ_{S,g}(t)` over `t ∈ S` strictly below `s`.
pub fn poset_totient<T: Scalar, S: AsRef<str>>(
    l: &MeetSemilattice,
    s: &[S],
    g: &Valuation<T>,
) -> Result<PosetTotientTable<T>> {
    g.check(l)?;
    let idx = distinct(l, s)?;
    let (values, order) = totient_indices(l, &idx, g);
    Ok(PosetTotientTable {
        labels: idx.iter().map(|&i| l.labels[i].clone()).collect(),
        values,
        extension: order.into_iter().map(|p| l.labels[idx[p]].clone()).collect(),
    })
}

/// `t[i1..im] = g(s_i1 ∧ ... ∧ s_im)`.
pub fn build_meet_tensor<T: Scalar, S: AsRef<str>>(
    l: &MeetSemilattice,
    s: &[S],
    g: &Valuation<T>,
    order: usize,
) -> Result<Tensor<T>> {
    if order < 2 {
        return Err(usage(format!("order must be at least 2, got {order}")));
    }
    g.check(l)?;
    let idx = distinct(l, s)?;
    let n = idx.len();
    let mut data = Tensor::<T>::cubical_zeros(order, n)?.into_entries();
    let shape = vec![n; order];
    let mut pos = vec![0usize; order];
    let mut flat = 0;
    loop {
        let m = pos[1..].iter().fold(idx[pos[0]], |acc, &p| l.meet_idx(acc, idx[p]));
        data[flat] = g.at(m).clone();
        flat += 1;
        if !next_index(&mut pos, &shape) {
            break;
        }
    }
    Tensor::from_vec(shape, data)
}

/// `Σ_k Ψ_{F,g}(f_k) E_k^{⊗m}` with `e[i][k] = 1` iff `f_k ≤ s_i`; the same
/// data read as `diag(Ψ) ×1 E ⋯ ×m E`. Weights may be zero or negative.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetDecomposition<T> {
    pub order: usize,
    pub weights: Vec<T>,
    pub incidence: IncidenceMatrix<String>,
}

impl<T: Scalar> MeetDecomposition<T> {
    pub fn reconstruct(&self) -> Result<Tensor<T>> {
        reconstruct_with(&self.weights, &self.incidence.columns(), self.order, self.incidence.rows())
    }

    pub fn diagonal(&self) -> Result<Tensor<T>> {
        Tensor::diagonal(&self.weights, self.order)
    }

    /// `D ×1 E ×2 E ⋯ ×m E`.
    pub fn factor_product(&self) -> Result<Tensor<T>> {
        self.diagonal()?.multi_mode_product(&self.incidence.to_matrix())
    }
}

pub fn meet_decompose_factorize<T: Scalar, S: AsRef<str>>(
    l: &MeetSemilattice,
    s: &[S],
    g: &Valuation<T>,
    order: usize,
    f: &[S],
) -> Result<MeetDecomposition<T>> {
    if order < 2 {
        return Err(usage(format!("order must be at least 2, got {order}")));
    }
    g.check(l)?;
    let si = distinct(l, s)?;
    let fi = distinct(l, f)?;
    if let Some(&x) = si.iter().find(|x| !fi.contains(x)) {
        return Err(usage(format!("{:?} belongs to S but not to F", l.labels[x])));
    }
    l.require_meet_closed(&fi)?;
    let (weights, _) = totient_indices(l, &fi, g);
    let incidence = IncidenceMatrix::from_fn(
        si.iter().map(|&i| l.labels[i].clone()).collect(),
        fi.iter().map(|&i| l.labels[i].clone()).collect(),
        |i, k| l.leq_idx(fi[k], si[i]),
    );
    Ok(MeetDecomposition {
        order,
        weights,
        incidence,
    })
}

/// `Π Ψ_{S,g}(s_i)^((m-1)^(n-1))` for meet-closed `S`.
pub fn det_closed_form_meet<S: AsRef<str>>(
    l: &MeetSemilattice,
    s: &[S],
    g: &Valuation<BigRational>,
    order: usize,
) -> Result<DetReport> {
    if order < 2 {
        return Err(usage(format!("order must be at least 2, got {order}")));
    }
    g.check(l)?;
    let idx = distinct(l, s)?;
    l.require_meet_closed(&idx)?;
    let (bases, _) = totient_indices(l, &idx, g);
    Ok(DetReport::from_factored(
        DetMethod::ClosedFormMeet,
        bases,
        det_exponent(order, idx.len()),
    ))
}

/// Integer-valued identity valuation on a divisibility lattice.
pub fn numeric_valuation(l: &MeetSemilattice) -> Result<Valuation<BigRational>> {
    let values = l
        .labels()
        .iter()
        .map(|s| crate::scalar::parse_rational(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Valuation { values })
}

/// Number of atoms in a subset-lattice label such as `{a,b}`.
pub fn cardinality_valuation(l: &MeetSemilattice) -> Valuation<BigRational> {
    Valuation::from_fn(l, |label| {
        let inner = label.trim_start_matches('{').trim_end_matches('}');
        let count = if inner.is_empty() { 0 } else { inner.split(',').count() };
        BigRational::from_integer(count.into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::{det_matrix_exact, tensor_det_oracle};
    use crate::gcdtensor::build_gcd_tensor;
    use crate::numtheory::{generalized_totient, IntegerSet};
    use crate::tensor::Matrix;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn div(values: &[u64]) -> (MeetSemilattice, Valuation<BigRational>) {
        let l = MeetSemilattice::divisibility(values).unwrap();
        let g = numeric_valuation(&l).unwrap();
        (l, g)
    }

    fn ab() -> (MeetSemilattice, Valuation<BigRational>) {
        let l = MeetSemilattice::subsets(&["a", "b"]).unwrap();
        let g = cardinality_valuation(&l);
        (l, g)
    }

    fn labels(v: &[u64]) -> Vec<String> {
        v.iter().map(u64::to_string).collect()
    }

    #[test]
    fn build_examples() {
        let (l, _) = div(&[1, 2, 3, 4, 6, 12]);
        assert_eq!(l.meet("4", "6").unwrap(), "2");
        let chain = MeetSemilattice::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(chain.meet("a", "c").unwrap(), "a");
        assert!(chain.leq("a", "c").unwrap());
        match MeetSemilattice::new(&["x", "y"], &[]) {
            Err(Error::NoMeet(a, b)) => assert_eq!((a.as_str(), b.as_str()), ("x", "y")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn axiom_and_input_errors() {
        assert!(matches!(
            MeetSemilattice::new(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(Error::OrderAxiom(_))
        ));
        assert!(matches!(MeetSemilattice::new(&["a", "a"], &[]), Err(Error::Usage(_))));
        assert!(matches!(MeetSemilattice::new(&["a"], &[("a", "z")]), Err(Error::Usage(_))));
        // two maximal lower bounds: c and d both below a and b, incomparable
        let bowtie = MeetSemilattice::new(
            &["a", "b", "c", "d", "z"],
            &[("c", "a"), ("c", "b"), ("d", "a"), ("d", "b"), ("z", "c"), ("z", "d")],
        );
        assert!(matches!(bowtie, Err(Error::NoMeet(..))));
    }

    #[test]
    fn meet_many_examples() {
        let (l, _) = div(&[1, 2, 3, 4, 6, 12]);
        assert_eq!(l.meet_many(&["4", "6", "12"]).unwrap(), "2");
        assert_eq!(l.meet_many(&["12"]).unwrap(), "12");
        let (s, _) = ab();
        assert_eq!(s.meet_many(&["{a}", "{b}"]).unwrap(), "{}");
        assert!(l.meet_many::<&str>(&[]).is_err());
        assert!(l.meet_many(&["5"]).is_err());
    }

    #[test]
    fn closure_examples() {
        let (l, _) = div(&[1, 2, 3, 4, 6, 12]);
        assert_eq!(l.meet_closure(&["4", "6"]).unwrap(), vec!["4", "6", "2"]);
        assert!(!l.is_meet_closed(&["4", "6"]).unwrap());
        let chain = MeetSemilattice::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(chain.is_meet_closed(&["c", "a"]).unwrap());
        let (s, _) = ab();
        assert_eq!(s.meet_closure(&["{a}", "{b}"]).unwrap(), vec!["{a}", "{b}", "{}"]);
    }

    #[test]
    fn totient_examples() {
        let (l, g) = div(&[1, 2, 3, 4, 6, 12]);
        let t = poset_totient(&l, &["2", "4", "6"], &g).unwrap();
        assert_eq!(t.values, vec![q(2), q(2), q(4)]);
        let (s, g) = ab();
        let t = poset_totient(&s, s.labels(), &g).unwrap();
        assert_eq!(t.get("{}"), Some(&q(0)));
        assert_eq!(t.get("{a}"), Some(&q(1)));
        assert_eq!(t.get("{b}"), Some(&q(1)));
        assert_eq!(t.get("{a,b}"), Some(&q(0)));
        let t = poset_totient(&s, &["{a}"], &g).unwrap();
        assert_eq!(t.values, vec![q(1)]);
    }

    #[test]
    fn extension_respects_order_and_input_ties() {
        let (s, g) = ab();
        let t = poset_totient(&s, &["{a,b}", "{b}", "{a}", "{}"], &g).unwrap();
        assert_eq!(t.extension, vec!["{}", "{b}", "{a}", "{a,b}"]);
    }

    #[test]
    fn meet_tensor_examples() {
        let (s, g) = ab();
        let t = build_meet_tensor(&s, s.labels(), &g, 2).unwrap();
        let expect: Vec<BigRational> = [0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 2].iter().map(|&v| q(v)).collect();
        assert_eq!(t.entries(), expect.as_slice());
        let c = Valuation::from_fn(&s, |_| q(7));
        let t = build_meet_tensor(&s, &["{a}", "{b}"], &c, 3).unwrap();
        assert!(t.entries().iter().all(|v| *v == q(7)));
    }

    #[test]
    fn divisibility_meets_are_gcds() {
        let (l, g) = div(&(1..=12).collect::<Vec<_>>());
        let s = [4u64, 6, 9];
        let t = build_meet_tensor(&l, &labels(&s), &g, 3).unwrap();
        let gcd = build_gcd_tensor(&IntegerSet::new(s.to_vec()).unwrap(), 3).unwrap();
        assert_eq!(t, gcd.map(|x| BigRational::from_integer(x.clone())));
    }

    #[test]
    fn decomposition_examples() {
        let (l, g) = div(&[1, 2, 3, 4, 6, 12]);
        let d = meet_decompose_factorize(&l, &["4", "6"], &g, 2, &["2", "4", "6"]).unwrap();
        assert_eq!(d.weights, vec![q(2), q(2), q(4)]);
        let expect = Tensor::from_vec(vec![2, 2], vec![q(4), q(2), q(2), q(6)]).unwrap();
        assert_eq!(d.reconstruct().unwrap(), expect);
        assert_eq!(d.factor_product().unwrap(), expect);

        let (s, card) = ab();
        let d = meet_decompose_factorize(&s, s.labels(), &card, 2, s.labels()).unwrap();
        assert_eq!(d.reconstruct().unwrap(), build_meet_tensor(&s, s.labels(), &card, 2).unwrap());
        assert!(meet_decompose_factorize(&l, &["4"], &card, 2, &["4"]).is_err());

        let d = meet_decompose_factorize(&l, &["4"], &g, 3, &["4"]).unwrap();
        assert_eq!(d.weights, vec![q(4)]);
        assert_eq!(d.reconstruct().unwrap().entries(), &[q(4)]);

        match meet_decompose_factorize(&l, &["4", "6"], &g, 2, &["4", "6"]) {
            Err(Error::NotClosed { missing, .. }) => assert_eq!(missing, "2"),
            other => panic!("{other:?}"),
        }
        assert!(meet_decompose_factorize(&l, &["4", "6"], &g, 2, &["2", "4"]).is_err());
    }

    #[test]
    fn determinant_examples() {
        let (l, g) = div(&[1, 2, 3, 4, 6, 12]);
        let r = det_closed_form_meet(&l, &["2", "4", "6"], &g, 2).unwrap();
        assert_eq!(r.value, Some(q(16)));
        let (s, g) = ab();
        let r = det_closed_form_meet(&s, s.labels(), &g, 2).unwrap();
        assert_eq!(r.value, Some(q(0)));
        let t = build_meet_tensor(&s, s.labels(), &g, 2).unwrap();
        assert_eq!(det_matrix_exact(&Matrix::from_tensor(&t).unwrap()).unwrap(), q(0));

        let chain = MeetSemilattice::new(&["1", "3", "7"], &[("1", "3"), ("3", "7")]).unwrap();
        let g = numeric_valuation(&chain).unwrap();
        assert_eq!(poset_totient(&chain, chain.labels(), &g).unwrap().values, vec![q(1), q(2), q(4)]);
        let r = det_closed_form_meet(&chain, chain.labels(), &g, 2).unwrap();
        assert_eq!(r.value, Some(q(8)));
        let t = build_meet_tensor(&chain, chain.labels(), &g, 2).unwrap();
        assert_eq!(det_matrix_exact(&Matrix::from_tensor(&t).unwrap()).unwrap(), q(8));

        assert!(matches!(
            det_closed_form_meet(&l, &["4", "6"], &numeric_valuation(&l).unwrap(), 2),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn pair_closed_form_matches_sylvester() {
        let chain = MeetSemilattice::new(&["lo", "hi"], &[("lo", "hi")]).unwrap();
        let g = Valuation::from_fn(&chain, |s| if s == "lo" { q(3) } else { BigRational::new(11.into(), 2.into()) });
        for m in 2..=6 {
            let t = build_meet_tensor(&chain, chain.labels(), &g, m).unwrap();
            let oracle = tensor_det_oracle(&t).unwrap();
            let closed = det_closed_form_meet(&chain, chain.labels(), &g, m).unwrap();
            assert_eq!(oracle.value, closed.value, "m = {m}");
        }
    }

    proptest! {
        #[test]
        fn bridge_to_numtheory(mut v in proptest::collection::btree_set(1u64..=30, 1..=4)) {
            let all: Vec<u64> = (1..=30).collect();
            let (l, g) = div(&all);
            let s: Vec<u64> = std::mem::take(&mut v).into_iter().collect();
            let set = IntegerSet::new(s.clone()).unwrap();
            let m = 2 + s.len() % 2;
            let t = build_meet_tensor(&l, &labels(&s), &g, m).unwrap();
            prop_assert_eq!(t, build_gcd_tensor(&set, m).unwrap().map(|x| BigRational::from_integer(x.clone())));
            let psi = poset_totient(&l, &labels(&s), &g).unwrap();
            prop_assert_eq!(psi.values, generalized_totient(&set).values().to_vec());
        }

        #[test]
        fn meet_many_is_order_free(items in proptest::collection::vec(1u64..=24, 1..=5), rot in 0usize..5) {
            let (l, _) = div(&(1..=24).collect::<Vec<_>>());
            let a = labels(&items);
            let mut b = a.clone();
            b.rotate_left(rot % a.len());
            b.reverse();
            prop_assert_eq!(l.meet_many(&a).unwrap(), l.meet_many(&b).unwrap());
        }
    }
}
