//! Brute-force verification oracle: dense eigensolver, seeded sampling of
//! interval models, and randomized enclosure checks of localization regions.
//!
//! Everything here is written independently of the bound formulas it is used
//! to validate, so an error in one side cannot hide in the other.

mod eig;
pub mod rng;

pub use rng::Rng;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{IntervalMatrix, RealMatrix};
use crate::region::Region;

/// Hard cap on the eigensolver input size (the benchmark grid tops out at
/// 2000; anything larger is almost certainly a mistake, not a workload).
pub const SIZE_CAP: usize = 2048;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("QR iteration failed to converge with {remaining} eigenvalues left")]
    NonConvergence { remaining: usize },
    #[error("matrix size {n} exceeds the oracle cap {cap}")]
    SizeCap { n: usize, cap: usize },
}

/// Full spectrum of a real matrix together with a factorization residual.
///
/// `residual` is `‖B Z − Z T‖_F / max(1, ‖B‖_F)` for the real Schur
/// factorization of the balanced matrix `B`; near machine epsilon when the
/// iteration succeeded. Values are sorted by `(re, im)`; complex values come
/// in exactly conjugate pairs.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub residual: f64,
}

impl Spectrum {
    /// Largest real part over the spectrum.
    pub fn max_re(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.re))
    }

    /// Smallest real part over the spectrum.
    pub fn min_re(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.re))
    }
}

fn sort_values(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Computes all eigenvalues with an orthogonal-similarity residual check.
pub fn eigenvalues(m: &RealMatrix) -> Result<Spectrum, OracleError> {
    let n = m.n();
    if n > SIZE_CAP {
        return Err(OracleError::SizeCap { n, cap: SIZE_CAP });
    }
    let mut h = m.as_slice().to_vec();
    eig::balance(n, &mut h);
    let balanced = h.clone();
    let mut z = RealMatrix::identity(n).as_slice().to_vec();
    eig::hessenberg(n, &mut h, Some(&mut z));
    let mut values = eig::francis(n, &mut h, Some(&mut z))?;
    let residual = eig::schur_residual(n, &balanced, &z, &h);
    sort_values(&mut values);
    Ok(Spectrum { values, residual })
}

/// Eigenvalues only, no Schur accumulation and no residual: the cheap path
/// for timing studies and bulk sampling. Identical values to [`eigenvalues`]
/// up to iteration rounding.
pub fn eigenvalues_fast(m: &RealMatrix) -> Result<Vec<Complex64>, OracleError> {
    let n = m.n();
    if n > SIZE_CAP {
        return Err(OracleError::SizeCap { n, cap: SIZE_CAP });
    }
    let mut h = m.as_slice().to_vec();
    eig::balance(n, &mut h);
    eig::hessenberg(n, &mut h, None);
    let mut values = eig::francis(n, &mut h, None)?;
    sort_values(&mut values);
    Ok(values)
}

/// How realizations are drawn from an interval model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleLaw {
    /// Every uncertain entry uniform over its interval.
    Uniform,
    /// Every uncertain entry at a random endpoint of its interval.
    Vertex,
}

/// Draws `count` realizations of `model`, deterministically for a given
/// `(seed, count, law)`. One random draw is consumed per matrix entry in
/// row-major order, so streams are reproducible by construction.
pub fn sample_interval(
    model: &IntervalMatrix,
    seed: u64,
    count: usize,
    law: SampleLaw,
) -> Vec<RealMatrix> {
    let n = model.n();
    let mut rng = Rng::new(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let nominal = model.nominal().get(i, j);
                let delta = if i == j {
                    let (lo, hi) = (model.diag_lo()[i], model.diag_hi()[i]);
                    match law {
                        SampleLaw::Uniform => rng.uniform(lo, hi),
                        SampleLaw::Vertex => {
                            if rng.coin() {
                                hi
                            } else {
                                lo
                            }
                        }
                    }
                } else {
                    let m = model.offdiag_mag().get(i, j);
                    match law {
                        SampleLaw::Uniform => rng.uniform(-m, m),
                        SampleLaw::Vertex => {
                            if rng.coin() {
                                m
                            } else {
                                -m
                            }
                        }
                    }
                };
                data.push(nominal + delta);
            }
        }
        out.push(RealMatrix::from_flat(n, data).expect("sampled entries are finite"));
    }
    out
}

/// One eigenvalue that escaped the region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnclosureViolation {
    pub sample_index: usize,
    pub re: f64,
    pub im: f64,
    /// Positive distance from the region boundary (how far outside).
    pub signed_distance: f64,
}

/// Result of sampling an interval model against a localization region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnclosureReport {
    pub samples: usize,
    pub eigenvalues_checked: usize,
    pub violations: Vec<EnclosureViolation>,
    /// Largest signed distance seen over all checked eigenvalues
    /// (non-positive means everything was enclosed).
    pub max_signed_distance: f64,
    /// Worst eigensolver residual over the samples, as a trust indicator.
    pub max_residual: f64,
}

impl EnclosureReport {
    pub fn enclosed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tolerance below which a positive signed distance is treated as boundary
/// rounding rather than a genuine escape.
const ENCLOSURE_TOL: f64 = 1e-9;

/// Samples `count` realizations and checks that every oracle eigenvalue lies
/// inside `region`.
pub fn enclosure_check(
    model: &IntervalMatrix,
    region: &Region,
    seed: u64,
    count: usize,
    law: SampleLaw,
) -> Result<EnclosureReport, OracleError> {
    let mut report = EnclosureReport {
        samples: count,
        eigenvalues_checked: 0,
        violations: Vec::new(),
        max_signed_distance: f64::NEG_INFINITY,
        max_residual: 0.0,
    };
    for (sample_index, m) in sample_interval(model, seed, count, law).iter().enumerate() {
        let spectrum = eigenvalues(m)?;
        report.max_residual = report.max_residual.max(spectrum.residual);
        for v in &spectrum.values {
            report.eigenvalues_checked += 1;
            let d = region.signed_distance(v.re, v.im);
            report.max_signed_distance = report.max_signed_distance.max(d);
            if d > ENCLOSURE_TOL {
                report.violations.push(EnclosureViolation {
                    sample_index,
                    re: v.re,
                    im: v.im,
                    signed_distance: d,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(rows: &[Vec<f64>]) -> RealMatrix {
        RealMatrix::from_rows(rows).unwrap()
    }

    /// LU determinant with partial pivoting, for cross-checks only.
    fn det(m: &RealMatrix) -> f64 {
        let n = m.n();
        let mut a = m.as_slice().to_vec();
        let mut sign = 1.0;
        for k in 0..n {
            let (mut piv, mut best) = (k, a[k * n + k].abs());
            for i in k + 1..n {
                if a[i * n + k].abs() > best {
                    piv = i;
                    best = a[i * n + k].abs();
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        sign * (0..n).map(|k| a[k * n + k]).product::<f64>()
    }

    /// Characteristic polynomial coefficients (monic, ascending powers) via
    /// determinant interpolation — an independent route to the spectrum.
    fn charpoly(q: &RealMatrix) -> Vec<f64> {
        let n = q.n();
        let points: Vec<f64> = (0..=n).map(|k| k as f64 - n as f64 / 2.0).collect();
        // p(x) = det(xI - Q), fit a degree-n polynomial through n+1 points.
        let vals: Vec<f64> = points
            .iter()
            .map(|&x| {
                let mut m = q.scale(-1.0);
                for i in 0..n {
                    m.set(i, i, m.get(i, i) + x);
                }
                det(&m)
            })
            .collect();
        // Solve the Vandermonde system by Gaussian elimination.
        let dim = n + 1;
        let mut aug = vec![0.0; dim * (dim + 1)];
        for r in 0..dim {
            let mut p = 1.0;
            for c in 0..dim {
                aug[r * (dim + 1) + c] = p;
                p *= points[r];
            }
            aug[r * (dim + 1) + dim] = vals[r];
        }
        for k in 0..dim {
            let piv = (k..dim)
                .max_by(|&a, &b| {
                    aug[a * (dim + 1) + k].abs().total_cmp(&aug[b * (dim + 1) + k].abs())
                })
                .unwrap();
            for j in 0..=dim {
                aug.swap(k * (dim + 1) + j, piv * (dim + 1) + j);
            }
            for i in 0..dim {
                if i != k {
                    let f = aug[i * (dim + 1) + k] / aug[k * (dim + 1) + k];
                    for j in k..=dim {
                        aug[i * (dim + 1) + j] -= f * aug[k * (dim + 1) + j];
                    }
                }
            }
        }
        (0..dim).map(|k| aug[k * (dim + 1) + dim] / aug[k * (dim + 1) + k]).collect()
    }

    fn companion(coeffs: &[f64]) -> RealMatrix {
        // coeffs: monic ascending, length n+1 with coeffs[n] == 1.
        let n = coeffs.len() - 1;
        let mut c = RealMatrix::zeros(n);
        for i in 1..n {
            c.set(i, i - 1, 1.0);
        }
        for i in 0..n {
            c.set(i, n - 1, -coeffs[i] / coeffs[n]);
        }
        c
    }

    fn assert_multiset_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        for va in a {
            let mut best: Option<(usize, f64)> = None;
            for (k, vb) in b.iter().enumerate() {
                if used[k] {
                    continue;
                }
                let d = (va - vb).norm();
                if best.is_none() || d < best.unwrap().1 {
                    best = Some((k, d));
                }
            }
            let (k, d) = best.expect("non-empty");
            assert!(d <= tol, "no match for {va} within {tol}, nearest {d}");
            used[k] = true;
        }
    }

    #[test]
    fn two_by_two_with_known_complex_pair() {
        // Sign-corrected variant of the first worked example: char poly
        // λ² + 3λ + 3.25, roots −1.5 ± i.
        let q = mat(&[vec![-1.0, -2.5], vec![0.5, -2.0]]);
        let s = eigenvalues(&q).unwrap();
        assert!(s.residual < 1e-12);
        assert_relative_eq!(s.values[0].re, -1.5, epsilon = 1e-12);
        assert_relative_eq!(s.values[0].im, -1.0, epsilon = 1e-12);
        assert_relative_eq!(s.values[1].re, -1.5, epsilon = 1e-12);
        assert_relative_eq!(s.values[1].im, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_by_two_with_known_real_pair() {
        // As printed in the source table: char poly λ² + 3λ + 0.75 whose
        // roots are (−3 ± √6)/2 — real, not complex.
        let q = mat(&[vec![-1.0, -2.5], vec![-0.5, -2.0]]);
        let s = eigenvalues(&q).unwrap();
        let expect_hi = (-3.0 + 6.0_f64.sqrt()) / 2.0;
        let expect_lo = (-3.0 - 6.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(s.values[1].re, expect_hi, epsilon = 1e-12);
        assert_relative_eq!(s.values[0].re, expect_lo, epsilon = 1e-12);
        assert_eq!(s.values[0].im, 0.0);
        assert_eq!(s.values[1].im, 0.0);
    }

    #[test]
    fn symmetric_pair_matches_closed_form() {
        // A + Aᵀ for the LTV example: eigenvalues −3 ± √1.25.
        let q = mat(&[vec![-2.0, 0.5], vec![0.5, -4.0]]);
        let s = eigenvalues(&q).unwrap();
        assert_relative_eq!(s.max_re(), -3.0 + 1.25_f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(s.min_re(), -3.0 - 1.25_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn diagonal_and_triangular_spectra_are_the_diagonals() {
        let q = mat(&[
            vec![3.0, 1.0, -2.0],
            vec![0.0, -1.0, 4.0],
            vec![0.0, 0.0, 0.5],
        ]);
        let s = eigenvalues(&q).unwrap();
        let mut expect = [3.0, -1.0, 0.5];
        expect.sort_by(f64::total_cmp);
        for (v, e) in s.values.iter().zip(expect) {
            assert_relative_eq!(v.re, e, epsilon = 1e-12);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn zero_and_identity_matrices() {
        let s = eigenvalues(&RealMatrix::zeros(4)).unwrap();
        assert!(s.values.iter().all(|v| v.re == 0.0 && v.im == 0.0));
        let s = eigenvalues(&RealMatrix::identity(5)).unwrap();
        assert!(s.values.iter().all(|v| (v.re - 1.0).abs() < 1e-14 && v.im == 0.0));
    }

    #[test]
    fn random_matrices_satisfy_trace_det_pairing_and_residual() {
        for seed in 0..200u64 {
            let mut rng = Rng::new(seed);
            let n = 2 + rng.below(7); // 2..=8
            let mut data = vec![0.0; n * n];
            for v in data.iter_mut() {
                *v = rng.uniform(-5.0, 5.0);
            }
            let q = RealMatrix::from_flat(n, data).unwrap();
            let s = eigenvalues(&q).unwrap();
            assert!(s.residual < 1e-10, "residual {} at seed {seed}", s.residual);

            let trace: f64 = (0..n).map(|i| q.get(i, i)).sum();
            let sum: Complex64 = s.values.iter().sum();
            assert_relative_eq!(sum.re, trace, epsilon = 1e-8, max_relative = 1e-8);
            assert!(sum.im.abs() < 1e-8);

            let prod: Complex64 = s.values.iter().product();
            let d = det(&q);
            let scale = d.abs().max(1.0);
            assert!((prod.re - d).abs() / scale < 1e-6, "det mismatch at seed {seed}");
            assert!(prod.im.abs() / scale < 1e-6);

            // Complex eigenvalues must appear in exactly conjugate pairs.
            let mut complex: Vec<_> = s.values.iter().filter(|v| v.im != 0.0).collect();
            while let Some(v) = complex.pop() {
                let pos = complex
                    .iter()
                    .position(|u| u.re == v.re && u.im == -v.im)
                    .expect("conjugate partner present");
                complex.remove(pos);
            }
        }
    }

    #[test]
    fn companion_route_agrees_for_small_matrices() {
        for seed in 0..100u64 {
            let mut rng = Rng::new(1000 + seed);
            let n = 2 + rng.below(3); // 2..=4
            let mut data = vec![0.0; n * n];
            for v in data.iter_mut() {
                *v = rng.uniform(-3.0, 3.0);
            }
            let q = RealMatrix::from_flat(n, data).unwrap();
            let direct = eigenvalues(&q).unwrap().values;
            let through_companion = eigenvalues(&companion(&charpoly(&q))).unwrap().values;
            assert_multiset_close(&direct, &through_companion, 1e-6);
        }
    }

    #[test]
    fn fast_path_matches_full_path() {
        for seed in 0..50u64 {
            let mut rng = Rng::new(7000 + seed);
            let n = 2 + rng.below(11); // 2..=12
            let mut data = vec![0.0; n * n];
            for v in data.iter_mut() {
                *v = rng.uniform(-4.0, 4.0);
            }
            let q = RealMatrix::from_flat(n, data).unwrap();
            let full = eigenvalues(&q).unwrap().values;
            let fast = eigenvalues_fast(&q).unwrap();
            assert_multiset_close(&full, &fast, 1e-8);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_respects_bounds() {
        let q0 = mat(&[vec![-1.0, 0.0], vec![0.0, -1.5]]);
        let mag = mat(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
        let model = IntervalMatrix::new(q0, vec![-1.0, -4.0], vec![1.0, 4.0], mag).unwrap();

        let a = sample_interval(&model, 42, 10, SampleLaw::Uniform);
        let b = sample_interval(&model, 42, 10, SampleLaw::Uniform);
        assert_eq!(a, b);
        for m in &a {
            assert!((-2.0..=0.0).contains(&m.get(0, 0)));
            assert!((-5.5..=2.5).contains(&m.get(1, 1)));
            assert!(m.get(0, 1).abs() <= 2.0);
            assert!(m.get(1, 0).abs() <= 3.0);
        }

        let v = sample_interval(&model, 7, 10, SampleLaw::Vertex);
        for m in &v {
            assert!(m.get(0, 0) == -2.0 || m.get(0, 0) == 0.0);
            assert!(m.get(0, 1).abs() == 2.0);
            assert!(m.get(1, 0).abs() == 3.0);
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let q = RealMatrix::zeros(SIZE_CAP + 1);
        assert!(matches!(
            eigenvalues_fast(&q),
            Err(OracleError::SizeCap { .. })
        ));
    }
}
