//! Positivity probes for even-order symmetric tensors.
//!
//! Nothing here is a certificate. [`psd_sample_check`] hunts for a vector
//! with `A x^m < 0`; [`extreme_form_on_sphere`] estimates the extremes of
//! `A x^m` on `{Σ |x_i|^m = 1}`, which for even `m` are the extreme
//! H-eigenvalues.

use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Relative threshold below which a form value counts as negative.
pub const VIOLATION_TOLERANCE: f64 = 1e-12;

/// Largest absolute lattice coordinate tried by the sweep.
pub const LATTICE_RADIUS: i64 = 2;

/// Most nonzero coordinates in a lattice probe.
pub const LATTICE_SUPPORT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoViolationFound,
    WitnessFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: Verdict,
    pub witness: Option<Vec<f64>>,
    /// `A x^m` at the witness, unnormalized.
    pub witness_value: Option<f64>,
    /// Same value in exact arithmetic, when the tensor is exact and the
    /// witness came from the integer lattice.
    #[serde(skip)]
    pub witness_value_exact: Option<BigRational>,
    /// Smallest `A x^m / ||x||_m^m` over every probe.
    pub min_normalized_value: f64,
    pub lattice_vectors: usize,
    pub trials: usize,
    pub seed: u64,
}

impl PositivityReport {
    pub fn witness_found(&self) -> bool {
        self.verdict == Verdict::WitnessFound
    }
}

fn check_even<T: Scalar>(t: &Tensor<T>) -> Result<(usize, usize)> {
    let n = t.cubical_dim()?;
    let m = t.order();
    if m < 2 || m % 2 == 1 {
        return Err(usage(format!(
            "positivity probes need even order, got {m}; semidefiniteness is void at odd order"
        )));
    }
    Ok((m, n))
}

fn m_norm_pow(x: &[f64], m: usize) -> f64 {
    x.iter().map(|v| v.abs().powi(m as i32)).sum()
}

fn normalize(x: &mut [f64], m: usize) -> bool {
    let r = m_norm_pow(x, m).powf(1.0 / m as f64);
    if !(r.is_finite() && r > 0.0) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= r);
    true
}

fn gaussian_point(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if normalize(&mut x, m) {
            return x;
        }
    }
}

/// `A x^m` for `x` supported on `support`, summing only over support tuples.
fn sparse_form(t: &Tensor<f64>, support: &[(usize, f64)], m: usize) -> f64 {
    let n = t.shape()[0];
    let k = support.len();
    let mut pick = vec![0usize; m];
    let mut total = 0.0;
    loop {
        let mut flat = 0;
        let mut coef = 1.0;
        for &p in &pick {
            flat = flat * n + support[p].0;
            coef *= support[p].1;
        }
        total += t.entries()[flat] * coef;
        let mut axis = m;
        loop {
            if axis == 0 {
                return total;
            }
            axis -= 1;
            pick[axis] += 1;
            if pick[axis] < k {
                break;
            }
            pick[axis] = 0;
        }
    }
}

/// Primitive integer vectors with at most [`LATTICE_SUPPORT`] nonzeros in
/// `[-R, R]`, first nonzero positive (`x` and `-x` agree at even order).
/// Ordered by support size, then support positions, then values.
fn lattice_vectors(n: usize) -> Vec<Vec<(usize, i64)>> {
    let values: Vec<i64> = (-LATTICE_RADIUS..=LATTICE_RADIUS).filter(|&v| v != 0).collect();
    let mut out = Vec::new();
    for k in 1..=LATTICE_SUPPORT.min(n) {
        for positions in index_combinations(n, k) {
            let mut choice = vec![0usize; k];
            loop {
                let vals: Vec<i64> = choice.iter().map(|&c| values[c]).collect();
                let g = vals.iter().fold(0i64, |g, v| g.gcd(v));
                if vals[0] > 0 && g == 1 {
                    out.push(positions.iter().copied().zip(vals).collect());
                }
                let mut axis = k;
                let done = loop {
                    if axis == 0 {
                        break true;
                    }
                    axis -= 1;
                    choice[axis] += 1;
                    if choice[axis] < values.len() {
                        break false;
                    }
                    choice[axis] = 0;
                };
                if done {
                    break;
                }
            }
        }
    }
    out
}

fn index_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                break;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Probes `A x^m` on a small integer lattice, then on `trials` uniform
/// points of the m-norm sphere.
///
/// A lattice witness is preferred: among lattice vectors below the
/// threshold the one with the most negative raw value is returned, ties to
/// the earliest. Only if the lattice is clean is the first failing sphere
/// sample reported.
pub fn psd_sample_check<T: Scalar>(t: &Tensor<T>, trials: usize, seed: u64) -> Result<PositivityReport> {
    let (m, n) = check_even(t)?;
    let tf = t.to_f64();
    let scale = tf.max_abs_f64();
    let threshold = -VIOLATION_TOLERANCE * scale;
    let mut min_normalized = f64::INFINITY;

    let lattice = lattice_vectors(n);
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in lattice.iter().enumerate() {
        let support: Vec<(usize, f64)> = v.iter().map(|&(p, c)| (p, c as f64)).collect();
        let value = sparse_form(&tf, &support, m);
        let norm = v.iter().map(|&(_, c)| (c.unsigned_abs() as f64).powi(m as i32)).sum::<f64>();
        let normalized = value / norm;
        min_normalized = min_normalized.min(normalized);
        if normalized < threshold && best.is_none_or(|(_, b)| value < b) {
            best = Some((i, value));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sphere_witness: Option<(Vec<f64>, f64)> = None;
    for _ in 0..trials {
        let x = gaussian_point(&mut rng, n, m);
        let value = tf.eval_form(&x)?.value;
        min_normalized = min_normalized.min(value);
        if value < threshold && sphere_witness.is_none() {
            sphere_witness = Some((x, value));
        }
    }

    let (witness, witness_value, witness_value_exact) = match best {
        Some((i, value)) => {
            let mut x = vec![T::zero(); n];
            let mut xf = vec![0.0; n];
            for &(p, c) in &lattice[i] {
                x[p] = if c < 0 {
                    T::zero() - T::from_u64(c.unsigned_abs())
                } else {
                    T::from_u64(c as u64)
                };
                xf[p] = c as f64;
            }
            let exact = if T::KIND.is_exact() {
                t.eval_form(&x)?.value.to_rational()
            } else {
                None
            };
            (Some(xf), Some(value), exact)
        }
        None => match sphere_witness {
            Some((x, value)) => (Some(x), Some(value), None),
            None => (None, None, None),
        },
    };
    Ok(PositivityReport {
        verdict: if witness.is_some() {
            Verdict::WitnessFound
        } else {
            Verdict::NoViolationFound
        },
        witness,
        witness_value,
        witness_value_exact,
        min_normalized_value: min_normalized,
        lattice_vectors: lattice.len(),
        trials,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    Min,
    Max,
}

impl std::str::FromStr for Extremum {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Extremum::Min),
            "max" => Ok(Extremum::Max),
            _ => Err(usage(format!("mode must be min or max, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub step: f64,
}

impl Default for ExtremeOptions {
    fn default() -> Self {
        ExtremeOptions {
            restarts: 64,
            iterations: 500,
            seed: 0,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeFormResult {
    pub mode: Extremum,
    pub value: f64,
    pub vector: Vec<f64>,
    /// Restart that produced the reported vector.
    pub best_restart: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub step: f64,
}

struct Climb {
    value: f64,
    x: Vec<f64>,
}

/// One restart of projected gradient ascent on `sign * A x^m`.
///
/// The gradient `m A x^(m-1)` is projected onto the tangent plane of the
/// sphere at `x` (normal `x^[m-1]`), divided by `scale`, and the trial point
/// is pulled back radially. Steps that do not improve are halved and
/// retried; accepted steps grow by a quarter.
fn climb(t: &Tensor<f64>, m: usize, sign: f64, scale: f64, x0: Vec<f64>, opts: &ExtremeOptions) -> Result<Climb> {
    let mut x = x0;
    let mut fv = t.eval_form(&x)?;
    let mut h = opts.step;
    for _ in 0..opts.iterations {
        let grad: Vec<f64> = fv.partial.iter().map(|g| m as f64 * g).collect();
        let normal: Vec<f64> = x.iter().map(|v| v.signum() * v.abs().powi(m as i32 - 1)).collect();
        let nn: f64 = normal.iter().map(|v| v * v).sum();
        let gn: f64 = grad.iter().zip(&normal).map(|(g, v)| g * v).sum();
        let dir: Vec<f64> = grad
            .iter()
            .zip(&normal)
            .map(|(g, v)| sign * (g - gn / nn * v) / scale)
            .collect();
        if dir.iter().all(|d| d.abs() < 1e-15) {
            break;
        }
        let mut y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + h * d).collect();
        if normalize(&mut y, m) {
            let fy = t.eval_form(&y)?;
            if sign * fy.value > sign * fv.value {
                x = y;
                fv = fy;
                h = (h * 1.25).min(1.0);
                continue;
            }
        }
        h *= 0.5;
        if h < 1e-14 {
            break;
        }
    }
    Ok(Climb { value: fv.value, x })
}

/// Multi-restart estimate of the min or max of `A x^m` on the m-norm
/// sphere. Restart `i` draws its start from a ChaCha8 stream `i` under
/// `seed`, so results do not depend on thread scheduling.
pub fn extreme_form_on_sphere<T: Scalar>(t: &Tensor<T>, mode: Extremum, opts: &ExtremeOptions) -> Result<ExtremeFormResult> {
    let (m, n) = check_even(t)?;
    if !t.is_symmetric() {
        return Err(usage("form optimization needs a symmetric tensor"));
    }
    if opts.restarts == 0 {
        return Err(usage("at least one restart is required"));
    }
    if !(opts.step.is_finite() && opts.step > 0.0) {
        return Err(usage(format!("step must be positive, got {}", opts.step)));
    }
    let tf = t.to_f64();
    let scale = tf.max_abs_f64();
    let sign = match mode {
        Extremum::Min => -1.0,
        Extremum::Max => 1.0,
    };
    let climbs = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let x0 = gaussian_point(&mut rng, n, m);
            if scale == 0.0 {
                return Ok(Climb { value: 0.0, x: x0 });
            }
            climb(&tf, m, sign, scale, x0, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, c) in climbs.iter().enumerate() {
        if sign * c.value > sign * climbs[best].value {
            best = i;
        }
    }
    let Climb { x, .. } = climbs.into_iter().nth(best).expect("nonempty");
    let value = tf.eval_form(&x)?.value;
    Ok(ExtremeFormResult {
        mode,
        value,
        vector: x,
        best_restart: best,
        restarts: opts.restarts,
        iterations: opts.iterations,
        seed: opts.seed,
        step: opts.step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcdtensor::build_gcd_tensor;
    use crate::numtheory::IntegerSet;
    use num_bigint::BigInt;

    /// The order-4, dimension-2 tensor whose entries depend only on how many
    /// indices equal 2: 3, -2, 1, 1, 1.
    fn quartic() -> Tensor<BigInt> {
        let by_count = [3, -2, 1, 1, 1];
        let mut t = Tensor::cubical_zeros(4, 2).unwrap();
        let mut entries = Vec::new();
        t.for_each_indexed(|idx, _| {
            entries.push((idx.to_vec(), by_count[idx.iter().filter(|&&i| i == 1).count()]));
        });
        for (idx, v) in entries {
            t.set(&idx, BigInt::from(v));
        }
        t
    }

    fn squared() -> Tensor<BigInt> {
        let a = quartic();
        a.hadamard(&a).unwrap()
    }

    fn quick() -> ExtremeOptions {
        ExtremeOptions {
            restarts: 16,
            iterations: 400,
            ..ExtremeOptions::default()
        }
    }

    #[test]
    fn lattice_witness_for_the_squared_tensor() {
        let r = psd_sample_check(&squared(), 100, 0).unwrap();
        assert!(r.witness_found());
        assert_eq!(r.witness, Some(vec![1.0, -2.0]));
        assert_eq!(r.witness_value, Some(-15.0));
        assert_eq!(r.witness_value_exact, Some(BigRational::from_integer((-15).into())));
    }

    #[test]
    fn no_witness_for_definite_tensors() {
        assert!(!psd_sample_check(&quartic(), 200, 0).unwrap().witness_found());
        let s = IntegerSet::new(vec![2, 3, 4]).unwrap();
        assert!(!psd_sample_check(&build_gcd_tensor(&s, 4).unwrap(), 200, 1).unwrap().witness_found());
        let z = Tensor::<f64>::cubical_zeros(2, 3).unwrap();
        let r = psd_sample_check(&z, 50, 0).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationFound);
    }

    #[test]
    fn sphere_witness_when_lattice_misses() {
        // negative only in a thin cone around (1,-3), outside the lattice
        let v = [1.0, -3.0];
        let mut t = Tensor::outer_power(&v, 2).unwrap().scale(&-1.0);
        t = t.add(&Tensor::identity(2, 2).unwrap().scale(&9.9)).unwrap();
        let r = psd_sample_check(&t, 2000, 3).unwrap();
        assert!(r.witness_found());
        let w = r.witness.unwrap();
        assert!(t.eval_form(&w).unwrap().value < 0.0);
    }

    #[test]
    fn odd_order_rejected() {
        let t = Tensor::<f64>::cubical_zeros(3, 2).unwrap();
        assert!(psd_sample_check(&t, 1, 0).is_err());
        assert!(extreme_form_on_sphere(&t, Extremum::Min, &quick()).is_err());
    }

    #[test]
    fn lattice_enumeration() {
        let v = lattice_vectors(2);
        assert_eq!(v.len(), 2 + 6);
        assert!(v.contains(&vec![(0, 1), (1, -2)]));
        assert!(!v.contains(&vec![(0, 2), (1, -2)]));
        assert!(!v.contains(&vec![(0, -1), (1, 2)]));
        assert_eq!(index_combinations(4, 2).len(), 6);
    }

    #[test]
    fn quartic_extremes() {
        let min = extreme_form_on_sphere(&quartic(), Extremum::Min, &quick()).unwrap();
        assert!((min.value - 0.5013).abs() < 5e-3, "{}", min.value);
        let sq = squared();
        let min = extreme_form_on_sphere(&sq, Extremum::Min, &quick()).unwrap();
        assert!((min.value - -2.1138).abs() < 5e-3, "{}", min.value);
        let max = extreme_form_on_sphere(&sq, Extremum::Max, &quick()).unwrap();
        assert!((max.value - 20.0391).abs() < 5e-3, "{}", max.value);
        assert!((m_norm_pow(&max.vector, 4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_extremes_are_eigenvalues() {
        let t = Tensor::from_vec(vec![2, 2], vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let min = extreme_form_on_sphere(&t, Extremum::Min, &quick()).unwrap();
        let max = extreme_form_on_sphere(&t, Extremum::Max, &quick()).unwrap();
        assert!((min.value - 1.0).abs() < 1e-9);
        assert!((max.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_and_scale_covariant() {
        let t = squared().to_f64();
        let a = extreme_form_on_sphere(&t, Extremum::Min, &quick()).unwrap();
        let b = extreme_form_on_sphere(&t, Extremum::Min, &quick()).unwrap();
        assert_eq!(a, b);
        let c = 3.5;
        let scaled = extreme_form_on_sphere(&t.scale(&c), Extremum::Min, &quick()).unwrap();
        assert!((scaled.value - c * a.value).abs() <= 1e-9 * (c * a.value).abs());
    }

    #[test]
    fn zero_tensor_extreme_is_zero() {
        let z = Tensor::<f64>::cubical_zeros(4, 2).unwrap();
        assert_eq!(extreme_form_on_sphere(&z, Extremum::Max, &quick()).unwrap().value, 0.0);
    }
}
