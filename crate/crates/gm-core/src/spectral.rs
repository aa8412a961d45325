//! Power iteration with max-normalization, a deflated second eigenpair,
//! the eigengap, and the leading-eigenvector perturbation bound.

use crate::error::{Error, Result};
use crate::matrix::AffinityMatrix;

/// Starting vector of a power iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialVector {
    AllOnes,
    Custom(Vec<f64>),
}

/// Termination settings for the power method. The convergence metric is
/// the infinity norm of the step difference of the max-normalized
/// iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial: InitialVector,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            tolerance: 1e-4,
            max_iterations: 1000,
            initial: InitialVector::AllOnes,
        }
    }
}

impl PowerConfig {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        Ok(PowerConfig {
            tolerance,
            max_iterations,
            initial: InitialVector::AllOnes,
        })
    }

    /// Same settings with a tighter tolerance, used where tests need
    /// near-exact eigenvectors.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn start_vector(&self, n: usize) -> Result<Vec<f64>> {
        match &self.initial {
            InitialVector::AllOnes => Ok(vec![1.0; n]),
            InitialVector::Custom(v) => {
                if v.len() != n {
                    return Err(Error::Dimension(format!(
                        "initial vector has length {} for order {n}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Domain("initial vector has non-finite entries".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Max-normalized approximation of a leading eigenvector together with
/// convergence metadata. After every iteration the largest entry equals
/// exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScores {
    pub values: Vec<f64>,
    /// Eigenvalue estimate associated with `values`.
    pub dominant_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// An (eigenvector, eigenvalue) estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairEstimate {
    pub vector: SpectralScores,
    pub value: f64,
}

fn max_entry(v: &[f64]) -> f64 {
    v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x^(k) = A x^(k-1) / max(A x^(k-1))` from the all-ones vector (or a
/// custom start), stopped when the infinity-norm step difference falls
/// below the tolerance. The returned `dominant_value` is `max(A x)` at
/// the final iterate. Sparse storage costs O(edges) per iteration,
/// dense O(n^2).
///
/// Non-convergence within `max_iterations` is reported through
/// `converged = false`, not as an error; a zero matrix or a
/// non-positive normalizer is.
pub fn power_method(a: &AffinityMatrix, cfg: &PowerConfig) -> Result<SpectralScores> {
    power_iterate_traced(a, cfg, None)
}

/// Power iteration that optionally records every max-normalized iterate.
pub(crate) fn power_iterate_traced(
    a: &AffinityMatrix,
    cfg: &PowerConfig,
    mut trace: Option<&mut Vec<Vec<f64>>>,
) -> Result<SpectralScores> {
    let n = a.order();
    if a.is_zero() {
        return Err(Error::Degenerate("power method on a zero matrix".into()));
    }
    let mut x = cfg.start_vector(n)?;
    let mut z = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    for k in 1..=cfg.max_iterations {
        a.matvec(&x, &mut z);
        let m = max_entry(&z);
        if m <= 0.0 {
            return Err(Error::Breakdown(format!(
                "max of the iterate is {m} at step {k}; cannot normalize"
            )));
        }
        let mut diff = 0.0f64;
        for (xi, &zi) in x.iter_mut().zip(z.iter()) {
            let v = zi / m;
            diff = diff.max((v - *xi).abs());
            *xi = v;
        }
        debug_assert_eq!(max_entry(&x), 1.0);
        if let Some(t) = trace.as_deref_mut() {
            t.push(x.clone());
        }
        iterations = k;
        if diff < cfg.tolerance {
            converged = true;
            break;
        }
    }
    a.matvec(&x, &mut z);
    let dominant_value = max_entry(&z);
    Ok(SpectralScores {
        values: x,
        dominant_value,
        iterations,
        converged,
    })
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = dot(v, v).sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Normalize so the entry of largest magnitude becomes exactly +1
/// (ties: lowest index). Leaves `max(v) == 1` while preserving sign
/// structure, which max-normalization alone cannot do for vectors with
/// negative extremes.
fn extreme_normalize(v: &mut [f64]) -> Result<()> {
    let mut idx = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[idx].abs() {
            idx = k;
        }
    }
    let c = v[idx];
    if c == 0.0 {
        return Err(Error::Breakdown(
            "deflated iterate vanished; remaining spectrum is zero".into(),
        ));
    }
    for x in v.iter_mut() {
        *x /= c;
    }
    Ok(())
}

/// Second eigenpair (largest remaining magnitude) of symmetric `a` by
/// power iteration on the deflated operator
/// `v -> A v - lambda1 (phi^T v) phi`, `phi` the 2-normalized leading
/// eigenvector. The start vector is projected off `phi`; convergence is
/// judged up to a sign flip so negative eigenvalues terminate too. The
/// eigenvalue estimate is the Rayleigh quotient of `a` at the final
/// iterate.
pub fn second_eigenpair(
    a: &AffinityMatrix,
    first: &EigenPairEstimate,
    cfg: &PowerConfig,
) -> Result<EigenPairEstimate> {
    let n = a.order();
    if n < 2 {
        return Err(Error::Degenerate(
            "second eigenpair requires order at least 2".into(),
        ));
    }
    if first.vector.values.len() != n {
        return Err(Error::Dimension(format!(
            "leading eigenvector has length {} for order {n}",
            first.vector.values.len()
        )));
    }
    if a.is_zero() {
        return Err(Error::Degenerate("power method on a zero matrix".into()));
    }
    let phi = l2_normalized(&first.vector.values);
    let lambda1 = first.value;

    let mut v = cfg.start_vector(n)?;
    project_off(&mut v, &phi);
    if v.iter().all(|x| x.abs() <= 1e-12) {
        // start was (numerically) parallel to phi; fall back to the basis
        // vector least aligned with it
        let k = (0..n)
            .min_by(|&i, &j| phi[i].abs().total_cmp(&phi[j].abs()))
            .unwrap();
        v = vec![0.0; n];
        v[k] = 1.0;
        project_off(&mut v, &phi);
    }
    extreme_normalize(&mut v)?;

    let mut z = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    for k in 1..=cfg.max_iterations {
        a.matvec(&v, &mut z);
        let proj = dot(&phi, &v);
        for (zi, &pi) in z.iter_mut().zip(phi.iter()) {
            *zi -= lambda1 * proj * pi;
        }
        extreme_normalize(&mut z)?;
        // the dominant remaining eigenvalue may be negative, flipping the
        // iterate's sign each step
        let diff = inf_norm_diff(&z, &v).min(
            z.iter()
                .zip(v.iter())
                .fold(0.0f64, |m, (a, b)| m.max((a + b).abs())),
        );
        v.copy_from_slice(&z);
        iterations = k;
        if diff < cfg.tolerance {
            converged = true;
            break;
        }
    }
    project_off(&mut v, &phi);
    extreme_normalize(&mut v)?;
    a.matvec(&v, &mut z);
    let lambda2 = dot(&v, &z) / dot(&v, &v);
    Ok(EigenPairEstimate {
        vector: SpectralScores {
            values: v,
            dominant_value: lambda2,
            iterations,
            converged,
        },
        value: lambda2,
    })
}

fn project_off(v: &mut [f64], unit: &[f64]) {
    let c = dot(unit, v);
    for (vi, &ui) in v.iter_mut().zip(unit.iter()) {
        *vi -= c * ui;
    }
}

/// Eigengap `rho = lambda1 - lambda2` from `power_method` and
/// `second_eigenpair`, clamped at zero against rounding on repeated
/// eigenvalues.
pub fn eigengap(a: &AffinityMatrix, cfg: &PowerConfig) -> Result<f64> {
    let scores = power_method(a, cfg)?;
    let first = EigenPairEstimate {
        value: scores.dominant_value,
        vector: scores,
    };
    let second = second_eigenpair(a, &first, cfg)?;
    Ok((first.value - second.value).max(0.0))
}

/// Outcome of the leading-eigenvector perturbation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationBound {
    Bound(f64),
    /// The precondition `sqrt(2) ||E||_F <= rho / 2` fails; the bound
    /// says nothing.
    Inapplicable,
}

/// Bound `||phi - phi~||_2 <= 4 ||E||_F / (rho - sqrt(2) ||E||_F)` on the
/// change of the 2-normalized leading eigenvector under a symmetric
/// perturbation `E`, valid when `sqrt(2) ||E||_F <= rho / 2`.
pub fn perturbation_bound(e_frobenius: f64, rho: f64) -> Result<PerturbationBound> {
    if !(e_frobenius >= 0.0) {
        return Err(Error::Domain(format!(
            "perturbation norm must be non-negative, got {e_frobenius}"
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("eigengap must be positive, got {rho}")));
    }
    let s = std::f64::consts::SQRT_2 * e_frobenius;
    if s <= rho / 2.0 {
        Ok(PerturbationBound::Bound(4.0 * e_frobenius / (rho - s)))
    } else {
        Ok(PerturbationBound::Inapplicable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> AffinityMatrix {
        let n = entries.len();
        let mut data = vec![0.0; n * n];
        for (i, &e) in entries.iter().enumerate() {
            data[i * n + i] = e;
        }
        AffinityMatrix::dense(n, data).unwrap()
    }

    fn two_cycle() -> AffinityMatrix {
        AffinityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn two_cycle_is_a_fixed_point() {
        let s = power_method(&two_cycle(), &PowerConfig::default()).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        assert_eq!(s.dominant_value, 1.0);
        assert_eq!(s.iterations, 1);
        assert!(s.converged);
    }

    #[test]
    fn diagonal_converges_to_dominant_axis() {
        let s = power_method(&diag(&[2.0, 1.0]), &PowerConfig::default()).unwrap();
        assert!(s.converged);
        assert_eq!(s.values[0], 1.0);
        assert!(s.values[1] <= 2.0 * 1e-4);
        assert!((s.dominant_value - 2.0).abs() < 1e-3);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let z = AffinityMatrix::dense(2, vec![0.0; 4]).unwrap();
        assert!(matches!(
            power_method(&z, &PowerConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn negative_start_breaks_down() {
        let mut cfg = PowerConfig::default();
        cfg.initial = InitialVector::Custom(vec![-1.0, -1.0]);
        assert!(matches!(
            power_method(&two_cycle(), &cfg),
            Err(Error::Breakdown(_))
        ));
    }

    #[test]
    fn oscillation_reports_non_convergence() {
        // start off the Perron direction: the 2-cycle swaps the entries
        // forever
        let mut cfg = PowerConfig::default();
        cfg.max_iterations = 50;
        cfg.initial = InitialVector::Custom(vec![1.0, 0.5]);
        let s = power_method(&two_cycle(), &cfg).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 50);
        assert_eq!(max_entry(&s.values), 1.0);
    }

    #[test]
    fn second_pair_of_diagonal() {
        // the deflated direction is only as accurate as the leading
        // vector, so converge that one tightly
        let a = diag(&[3.0, 1.0]);
        let cfg = PowerConfig::default().with_tolerance(1e-12);
        let scores = power_method(&a, &cfg).unwrap();
        let first = EigenPairEstimate {
            value: scores.dominant_value,
            vector: scores,
        };
        let second = second_eigenpair(&a, &first, &cfg).unwrap();
        assert!((second.value - 1.0).abs() < 1e-6);
        assert!(second.vector.values[0].abs() < 1e-6);
        assert_eq!(second.vector.values[1], 1.0);
    }

    #[test]
    fn second_pair_of_two_cycle_is_negative() {
        let a = two_cycle();
        let scores = power_method(&a, &PowerConfig::default()).unwrap();
        let first = EigenPairEstimate {
            value: scores.dominant_value,
            vector: scores,
        };
        let second = second_eigenpair(&a, &first, &PowerConfig::default()).unwrap();
        assert!((second.value + 1.0).abs() < 1e-8);
        let v = &second.vector.values;
        assert!((v[0] + v[1]).abs() < 1e-8, "expected a [1, -1] direction, got {v:?}");
    }

    #[test]
    fn eigengap_examples() {
        assert!((eigengap(&diag(&[3.0, 1.0]), &PowerConfig::default()).unwrap() - 2.0).abs() < 1e-6);
        let eye = diag(&[1.0, 1.0]);
        assert!(eigengap(&eye, &PowerConfig::default()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn perturbation_bound_examples() {
        assert_eq!(
            perturbation_bound(0.0, 1.0).unwrap(),
            PerturbationBound::Bound(0.0)
        );
        match perturbation_bound(0.1, 1.0).unwrap() {
            PerturbationBound::Bound(b) => {
                assert!((b - 0.4 / (1.0 - 0.1 * std::f64::consts::SQRT_2)).abs() < 1e-15);
                assert!((b - 0.46589).abs() < 1e-4);
            }
            PerturbationBound::Inapplicable => panic!("precondition holds"),
        }
        assert_eq!(
            perturbation_bound(0.5, 1.0).unwrap(),
            PerturbationBound::Inapplicable
        );
        assert!(perturbation_bound(-0.1, 1.0).is_err());
        assert!(perturbation_bound(0.1, 0.0).is_err());
    }
}
