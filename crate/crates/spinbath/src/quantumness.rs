//! Nonclassical correlations of the system–ancilla pair.
//!
//! The pair starts in a Bell-diagonal state
//! `ρ = (I + Σᵢ cᵢ σⁱ⊗σⁱ)/4`. Dephasing of the system qubit maps it to an
//! X-form matrix whose off-diagonal blocks carry the decoherence factor;
//! a local phase rotation brings it back to Bell-diagonal form with
//! `c₁|F|, c₂|F|, c₃`. The negativity of quantumness of any Bell-diagonal
//! state is the intermediate value of `{|c₁|, |c₂|, |c₃|}`; an
//! independent route minimizes the trace-norm distance to the measured
//! states over all projective measurements of the system qubit.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::bath::BathParams;
use crate::decoherence::{DecoherenceTrajectory, Engine, PulseConfig};
use crate::error::{Error, Result};

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const X_FORM_TOL: f64 = 1e-10;

/// Bell-diagonal two-qubit state, stored as its three correlation
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    c1: f64,
    c2: f64,
    c3: f64,
}

impl BellDiagonalState {
    /// Validates that the coefficients describe a physical state: each
    /// `|cᵢ| ≤ 1` and the four Bell populations
    /// `(1 ± c₁ ∓ c₂ ± c₃)/4` are nonnegative (to within rounding).
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (name, c) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !c.is_finite() || c.abs() > 1.0 {
                return Err(Error::Config(format!(
                    "{name} must lie in [-1, 1], got {c}"
                )));
            }
        }
        let state = Self { c1, c2, c3 };
        if state.populations().iter().any(|&p| p < -1e-12) {
            return Err(Error::Config(format!(
                "coefficients ({c1}, {c2}, {c3}) give a negative Bell population"
            )));
        }
        Ok(state)
    }

    /// The `(1, −1, 1)` state, a maximally entangled Bell state.
    pub fn maximally_entangled() -> Self {
        Self { c1: 1.0, c2: -1.0, c3: 1.0 }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.c1, self.c2, self.c3)
    }

    /// Populations of the four Bell states.
    pub fn populations(&self) -> [f64; 4] {
        let (c1, c2, c3) = (self.c1, self.c2, self.c3);
        [
            (1.0 + c1 - c2 + c3) / 4.0,
            (1.0 - c1 + c2 + c3) / 4.0,
            (1.0 + c1 + c2 - c3) / 4.0,
            (1.0 - c1 - c2 - c3) / 4.0,
        ]
    }
}

/// Validated 4×4 density matrix of the system–ancilla pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensityMatrix {
    m: Matrix4<Complex64>,
}

impl TwoQubitDensityMatrix {
    /// Accepts a matrix that is Hermitian, unit trace, and positive
    /// semidefinite to within rounding tolerances.
    pub fn from_matrix(m: Matrix4<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).norm();
        if herm > HERMITICITY_TOL {
            return Err(Error::Structure(format!(
                "matrix is not Hermitian: |rho - rho^dag| = {herm:e}"
            )));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Structure(format!("trace must be 1, got {tr}")));
        }
        let min_eig = hermitian_eigenvalues(&m)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::Structure(format!(
                "matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }
}

/// Eigenvalues of a Hermitian 4×4 matrix (real by construction).
fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]]
}

/// Trace norm `‖X‖₁` of a Hermitian matrix: sum of singular values.
fn trace_norm(m: &Matrix4<Complex64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// State of the pair after the system qubit dephased by the factor `f`:
/// an X-form matrix with diagonal `(a, b, b, a)`, inner anti-diagonal
/// `(z, z)` and corners `(w*, w)`, where `a = (1+c₃)/4`, `b = (1−c₃)/4`,
/// `z = (c₁+c₂)|f|/4` and `w = (c₁−c₂)f/4`.
pub fn evolve(state0: &BellDiagonalState, f: Complex64) -> Result<TwoQubitDensityMatrix> {
    let mag = f.norm();
    if mag > 1.0 + crate::decoherence::MAGNITUDE_SLACK {
        return Err(Error::Config(format!(
            "|F| must not exceed 1, got {mag}"
        )));
    }
    let (c1, c2, c3) = state0.coefficients();
    let a = Complex64::new((1.0 + c3) / 4.0, 0.0);
    let b = Complex64::new((1.0 - c3) / 4.0, 0.0);
    let z = Complex64::new((c1 + c2) * mag / 4.0, 0.0);
    let w = f * ((c1 - c2) / 4.0);
    let o = Complex64::new(0.0, 0.0);
    let m = Matrix4::new(
        a, o, o, w.conj(), //
        o, b, z, o, //
        o, z, b, o, //
        w, o, o, a,
    );
    TwoQubitDensityMatrix::from_matrix(m)
}

/// Undoes the dephasing phase by a local z-rotation on both qubits and
/// reads the Bell-diagonal coefficients `(c₁|F|, c₂|F|, c₃)` back off the
/// matrix. Fails with a structure error if the input is not X-form.
pub fn rotate_to_bell_diagonal(
    rho: &TwoQubitDensityMatrix,
    f: Complex64,
) -> Result<BellDiagonalState> {
    let m = rho.matrix();
    for (r, c) in [
        (0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2),
    ] {
        if m[(r, c)].norm() > X_FORM_TOL {
            return Err(Error::Structure(format!(
                "entry ({r}, {c}) = {} breaks the X form",
                m[(r, c)]
            )));
        }
    }
    if (m[(0, 0)] - m[(3, 3)]).norm() > X_FORM_TOL
        || (m[(1, 1)] - m[(2, 2)]).norm() > X_FORM_TOL
        || (m[(1, 2)] - m[(2, 1)].conj()).norm() > X_FORM_TOL
        || m[(1, 2)].im.abs() > X_FORM_TOL
        || (m[(0, 3)] - m[(3, 0)].conj()).norm() > X_FORM_TOL
    {
        return Err(Error::Structure(
            "diagonal or anti-diagonal entries break the X form".into(),
        ));
    }
    let phi = if f.norm() < 1e-14 { 0.0 } else { f.im.atan2(f.re) };
    let w_rotated = m[(3, 0)] * Complex64::from_polar(1.0, -phi);
    if w_rotated.im.abs() > X_FORM_TOL {
        return Err(Error::Structure(format!(
            "corner element retains phase {:e} after rotation",
            w_rotated.im
        )));
    }
    let c3 = 4.0 * m[(0, 0)].re - 1.0;
    let z = m[(1, 2)].re;
    let c1 = 2.0 * (z + w_rotated.re);
    let c2 = 2.0 * (z - w_rotated.re);
    BellDiagonalState::new(c1, c2, c3)
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(c).max(a.min(b))
}

/// Negativity of quantumness of a Bell-diagonal state: the intermediate
/// value of `{|c₁|, |c₂|, |c₃|}`.
pub fn negativity_of_quantumness(state: &BellDiagonalState) -> f64 {
    median3(state.c1.abs(), state.c2.abs(), state.c3.abs())
}

/// Quantumness along a dephasing trajectory, from the closed form:
/// `Q(t) = median(|c₁| |F(t)|, |c₂| |F(t)|, |c₃|)`.
pub fn quantumness_series(state0: &BellDiagonalState, magnitude: &[f64]) -> Vec<f64> {
    let (a1, a2, a3) = (state0.c1.abs(), state0.c2.abs(), state0.c3.abs());
    magnitude
        .iter()
        .map(|&m| median3(a1 * m, a2 * m, a3))
        .collect()
}

/// Post-measurement state for the projective measurement of the system
/// qubit along the Bloch direction `(ϑ, φ)`.
fn measured_state(rho: &Matrix4<Complex64>, theta: f64, phi: f64) -> Matrix4<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = [st * cp, st * sp, ct];
    // projector (I + n.sigma)/2 on the system qubit
    let p_plus = Matrix2::new(
        Complex64::new((1.0 + n[2]) / 2.0, 0.0),
        Complex64::new(n[0] / 2.0, -n[1] / 2.0),
        Complex64::new(n[0] / 2.0, n[1] / 2.0),
        Complex64::new((1.0 - n[2]) / 2.0, 0.0),
    );
    let p_minus = Matrix2::new(l, o, o, l) - p_plus;
    let id2 = Matrix2::new(l, o, o, l);
    let pp = p_plus.kronecker(&id2);
    let pm = p_minus.kronecker(&id2);
    pp * rho * pp + pm * rho * pm
}

/// Trace-norm distance to the measured state for one measurement axis.
fn measurement_distance(rho: &Matrix4<Complex64>, theta: f64, phi: f64) -> f64 {
    trace_norm(&(rho - measured_state(rho, theta, phi)))
}

/// Negativity of quantumness by direct minimization: the smallest
/// trace-norm distance `‖ρ − χ‖₁` to a post-measurement state over
/// rank-1 projective measurements of the system qubit. A 48×96 grid over
/// the Bloch sphere seeds a Nelder-Mead refinement of the best cell
/// (ties keep the earliest cell) down to a 1e-8 spread in the objective;
/// if the refinement stalls the best value found is returned.
pub fn trace_norm_oracle(rho: &TwoQubitDensityMatrix) -> f64 {
    let m = rho.matrix();
    let objective = |theta: f64, phi: f64| measurement_distance(m, theta, phi);

    let (n_theta, n_phi) = (48, 96);
    let mut best = f64::INFINITY;
    let mut best_point = (0.0, 0.0);
    for i in 0..n_theta {
        let theta = i as f64 * std::f64::consts::PI / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = j as f64 * std::f64::consts::TAU / n_phi as f64;
            let d = objective(theta, phi);
            if d < best {
                best = d;
                best_point = (theta, phi);
            }
        }
    }
    let refined = nelder_mead(objective, best_point, 0.05, 1e-8, 400);
    refined.min(best)
}

/// Minimal two-dimensional Nelder-Mead. Returns the best objective value
/// reached within the iteration budget.
fn nelder_mead(
    f: impl Fn(f64, f64) -> f64,
    start: (f64, f64),
    scale: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    let mut simplex = [
        (start.0, start.1),
        (start.0 + scale, start.1),
        (start.0, start.1 + scale),
    ];
    let mut values = [
        f(simplex[0].0, simplex[0].1),
        f(simplex[1].0, simplex[1].1),
        f(simplex[2].0, simplex[2].1),
    ];
    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (lo, mid, hi) = (order[0], order[1], order[2]);
        if values[hi] - values[lo] < tol {
            break;
        }
        let centroid = (
            (simplex[lo].0 + simplex[mid].0) / 2.0,
            (simplex[lo].1 + simplex[mid].1) / 2.0,
        );
        let reflect = (
            centroid.0 + (centroid.0 - simplex[hi].0),
            centroid.1 + (centroid.1 - simplex[hi].1),
        );
        let fr = f(reflect.0, reflect.1);
        if fr < values[lo] {
            let expand = (
                centroid.0 + 2.0 * (centroid.0 - simplex[hi].0),
                centroid.1 + 2.0 * (centroid.1 - simplex[hi].1),
            );
            let fe = f(expand.0, expand.1);
            if fe < fr {
                simplex[hi] = expand;
                values[hi] = fe;
            } else {
                simplex[hi] = reflect;
                values[hi] = fr;
            }
        } else if fr < values[mid] {
            simplex[hi] = reflect;
            values[hi] = fr;
        } else {
            let contract = (
                centroid.0 + 0.5 * (simplex[hi].0 - centroid.0),
                centroid.1 + 0.5 * (simplex[hi].1 - centroid.1),
            );
            let fc = f(contract.0, contract.1);
            if fc < values[hi] {
                simplex[hi] = contract;
                values[hi] = fc;
            } else {
                // shrink toward the best vertex
                for idx in [mid, hi] {
                    simplex[idx] = (
                        simplex[lo].0 + 0.5 * (simplex[idx].0 - simplex[lo].0),
                        simplex[lo].1 + 0.5 * (simplex[idx].1 - simplex[lo].1),
                    );
                    values[idx] = f(simplex[idx].0, simplex[idx].1);
                }
            }
        }
    }
    values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Times where the active branch of the quantumness median switches.
///
/// The median of `{|c₁|m, |c₂|m, |c₃|}` changes branch exactly where
/// `m(t) = |c₃|/|c₁|` or `m(t) = |c₃|/|c₂|`. Crossings are bracketed by
/// sign changes of `m − ratio` on the trajectory grid and refined by
/// bisection on the exact `|F(t)|`, not by differentiating the sampled
/// series.
pub fn detect_sudden_changes(
    params: &BathParams,
    pulses: &PulseConfig,
    state0: &BellDiagonalState,
    traj: &DecoherenceTrajectory,
) -> Result<Vec<f64>> {
    let engine = Engine::new(params, pulses)?;
    let times = traj.times();
    let magnitude = traj.magnitude();
    let a3 = state0.c3.abs();
    let mut roots = Vec::new();
    for &c in &[state0.c1, state0.c2] {
        let a = c.abs();
        if a < 1e-15 {
            continue;
        }
        let ratio = a3 / a;
        for i in 1..times.len() {
            let lo = magnitude[i - 1] - ratio;
            let hi = magnitude[i] - ratio;
            if lo * hi < 0.0 {
                roots.push(bisect_crossing(&engine, ratio, times[i - 1], times[i])?);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn bisect_crossing(engine: &Engine, ratio: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = engine.magnitude(lo)? - ratio;
    let tol = 1e-12 * hi.max(1.0);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = engine.magnitude(mid)? - ratio;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence::{trajectory, TimeGrid};
    use approx::assert_abs_diff_eq;

    fn bell(c1: f64, c2: f64, c3: f64) -> BellDiagonalState {
        BellDiagonalState::new(c1, c2, c3).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(BellDiagonalState::new(1.1, 0.0, 0.0).is_err());
        assert!(BellDiagonalState::new(0.9, -0.9, 0.9).is_err()); // negative population
        assert!(BellDiagonalState::new(0.5, 0.3, 0.9).is_ok());
        let me = BellDiagonalState::maximally_entangled();
        assert!(me.populations().iter().any(|&p| (p - 1.0).abs() < 1e-15));
    }

    #[test]
    fn evolve_identity_channel_recovers_initial_matrix() {
        let s = bell(0.5, 0.3, 0.9);
        let rho = evolve(&s, Complex64::new(1.0, 0.0)).unwrap();
        // expansion of (I + sum_i c_i sigma_i x sigma_i)/4
        let a = (1.0 + 0.9) / 4.0;
        let b = (1.0 - 0.9) / 4.0;
        let z = (0.5 + 0.3) / 4.0;
        let w = (0.5 - 0.3) / 4.0;
        assert_abs_diff_eq!(rho.entry(0, 0).re, a, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 1).re, b, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 2).re, z, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(3, 0).re, w, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 3).re, w, epsilon = 1e-15);
    }

    #[test]
    fn evolve_full_dephasing_kills_coherences() {
        let s = bell(0.5, 0.3, 0.9);
        let rho = evolve(&s, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(rho.entry(1, 2), Complex64::new(0.0, 0.0));
        assert_eq!(rho.entry(3, 0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.475, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.025, epsilon = 1e-15);
    }

    #[test]
    fn evolve_equal_c1_c2_has_no_corner() {
        let s = bell(0.6, 0.6, 0.8);
        let f = Complex64::from_polar(0.5, std::f64::consts::PI / 3.0);
        let rho = evolve(&s, f).unwrap();
        assert_abs_diff_eq!(rho.entry(1, 2).re, 0.15, epsilon = 1e-15);
        assert!(rho.entry(3, 0).norm() < 1e-15);
    }

    #[test]
    fn evolve_rejects_overgrown_factor() {
        let s = bell(0.5, 0.3, 0.9);
        assert!(evolve(&s, Complex64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn rotate_scales_transverse_coefficients() {
        let s = bell(0.9, 0.5, 0.3);
        let f = Complex64::new(0.4, 0.0);
        let back = rotate_to_bell_diagonal(&evolve(&s, f).unwrap(), f).unwrap();
        assert_abs_diff_eq!(back.c1(), 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(back.c2(), 0.20, epsilon = 1e-12);
        assert_abs_diff_eq!(back.c3(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn rotate_handles_complex_factor_and_zero() {
        let s = bell(0.9, 0.5, 0.3);
        let f = Complex64::from_polar(0.7, 2.1);
        let back = rotate_to_bell_diagonal(&evolve(&s, f).unwrap(), f).unwrap();
        assert_abs_diff_eq!(back.c1(), 0.63, epsilon = 1e-12);
        assert_abs_diff_eq!(back.c2(), 0.35, epsilon = 1e-12);
        let zero = Complex64::new(0.0, 0.0);
        let back0 = rotate_to_bell_diagonal(&evolve(&s, zero).unwrap(), zero).unwrap();
        assert_eq!(back0.c1(), 0.0);
        assert_eq!(back0.c2(), 0.0);
        assert_abs_diff_eq!(back0.c3(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn rotate_identity_keeps_coefficients() {
        let s = bell(0.5, 0.3, 0.9);
        let one = Complex64::new(1.0, 0.0);
        let back = rotate_to_bell_diagonal(&evolve(&s, one).unwrap(), one).unwrap();
        assert_abs_diff_eq!(back.c1(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(back.c2(), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(back.c3(), 0.9, epsilon = 1e-12);
    }

    #[test]
    fn third_coefficient_is_conserved_along_a_trajectory() {
        // the recovered c3 is identical (to the bit) at every time
        let s = bell(0.9, 0.3, 0.57);
        let c3_at = |f: Complex64| {
            rotate_to_bell_diagonal(&evolve(&s, f).unwrap(), f)
                .unwrap()
                .c3()
        };
        let reference = c3_at(Complex64::new(1.0, 0.0));
        for &(m, phi) in &[(0.9, 0.3), (0.5, 2.0), (0.2, -1.3), (0.03, 0.0)] {
            assert_eq!(c3_at(Complex64::from_polar(m, phi)), reference);
        }
    }

    #[test]
    fn rotate_rejects_non_x_form() {
        let s = bell(0.5, 0.3, 0.9);
        let one = Complex64::new(1.0, 0.0);
        let mut m = *evolve(&s, one).unwrap().matrix();
        m[(0, 1)] = Complex64::new(0.01, 0.0);
        m[(1, 0)] = Complex64::new(0.01, 0.0);
        let rho = TwoQubitDensityMatrix::from_matrix(m).unwrap();
        assert!(matches!(
            rotate_to_bell_diagonal(&rho, one),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let o = Complex64::new(0.0, 0.0);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        assert!(TwoQubitDensityMatrix::from_matrix(m).is_ok());
        m[(0, 1)] = Complex64::new(0.0, 0.3); // not Hermitian
        assert!(TwoQubitDensityMatrix::from_matrix(m).is_err());
        m[(0, 1)] = o;
        m[(1, 1)] = Complex64::new(0.2, 0.0); // trace != 1
        assert!(TwoQubitDensityMatrix::from_matrix(m).is_err());
        m[(1, 1)] = Complex64::new(0.9, 0.0);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(2, 2)] = Complex64::new(-0.4, 0.0); // negative population
        assert!(TwoQubitDensityMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn median_rule_examples() {
        assert_eq!(negativity_of_quantumness(&bell(0.5, 0.3, 0.9)), 0.5);
        assert_eq!(negativity_of_quantumness(&bell(0.0, 0.0, 0.7)), 0.0);
        assert_eq!(negativity_of_quantumness(&bell(0.42, -0.17, 0.65)), 0.42);
    }

    #[test]
    fn oracle_matches_median_on_reference_states() {
        let one = Complex64::new(1.0, 0.0);
        for (state, expected) in [
            (bell(0.5, 0.3, 0.9), 0.5),
            (bell(1.0, -1.0, 1.0), 1.0),
            (bell(0.42, -0.17, 0.65), 0.42),
        ] {
            let rho = evolve(&state, one).unwrap();
            let q = trace_norm_oracle(&rho);
            assert_abs_diff_eq!(q, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn oracle_vanishes_on_product_state() {
        // rho_S (x) rho_A with a non-trivial system eigenbasis
        let i = Complex64::new(0.0, 1.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        let rho_s = Matrix2::new(r(0.7), r(0.2) + 0.1 * i, r(0.2) - 0.1 * i, r(0.3));
        let rho_a = Matrix2::new(r(0.6), r(0.1), r(0.1), r(0.4));
        let rho = TwoQubitDensityMatrix::from_matrix(rho_s.kronecker(&rho_a)).unwrap();
        assert!(trace_norm_oracle(&rho) < 1e-6);
    }

    #[test]
    fn oracle_is_invariant_under_the_dephasing_phase() {
        // quantum correlations are unchanged by the local z rotation, so
        // the minimization must give the same answer for the X-form state
        // and its Bell-diagonal rotation
        let s = bell(0.7, -0.4, 0.5);
        let f = Complex64::from_polar(0.6, 1.1);
        let rho = evolve(&s, f).unwrap();
        let rotated = rotate_to_bell_diagonal(&rho, f).unwrap();
        let direct = trace_norm_oracle(&rho);
        let via_rotation =
            trace_norm_oracle(&evolve(&rotated, Complex64::new(1.0, 0.0)).unwrap());
        assert_abs_diff_eq!(direct, via_rotation, epsilon = 1e-6);
        assert_abs_diff_eq!(direct, negativity_of_quantumness(&rotated), epsilon = 1e-6);
    }

    #[test]
    fn maximally_entangled_probe_tracks_the_echo() {
        let params = BathParams::with_temperature(60, 1.0, 1.0, 0.2, 0.0, 0.5).unwrap();
        let grid = TimeGrid::uniform(10.0, 101).unwrap();
        let traj = trajectory(&params, &grid, &PulseConfig::off()).unwrap();
        let q = quantumness_series(&BellDiagonalState::maximally_entangled(), traj.magnitude());
        for ((qi, m), l) in q
            .iter()
            .zip(traj.magnitude())
            .zip(traj.loschmidt_echo())
        {
            assert_eq!(qi, m);
            assert_abs_diff_eq!(*qi, l.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn quantumness_envelope_is_monotone_in_magnitude() {
        let s = bell(0.8, 0.4, 0.6);
        let params = BathParams::with_temperature(60, 0.9, 1.0, 0.3, 0.0, 0.5).unwrap();
        let grid = TimeGrid::uniform(20.0, 201).unwrap();
        let traj = trajectory(&params, &grid, &PulseConfig::off()).unwrap();
        let q = quantumness_series(&s, traj.magnitude());
        let mut running_max = 0.0_f64;
        for (qi, &m) in q.iter().zip(traj.magnitude()) {
            running_max = running_max.max(m);
            let envelope = median3(0.8 * running_max, 0.4 * running_max, 0.6);
            assert!(*qi <= envelope + 1e-12);
        }
    }

    #[test]
    fn sudden_changes_absent_when_c3_dominates() {
        let params = BathParams::with_temperature(400, 1.0, 1.0, 0.05, 0.0, 0.5).unwrap();
        let grid = TimeGrid::uniform(50.0, 1001).unwrap();
        let traj = trajectory(&params, &grid, &PulseConfig::off()).unwrap();
        let s = bell(0.5, 0.3, 0.9);
        let changes =
            detect_sudden_changes(&params, &PulseConfig::off(), &s, &traj).unwrap();
        assert!(changes.is_empty(), "{changes:?}");
    }

    #[test]
    fn single_and_double_sudden_changes_at_criticality() {
        let params = BathParams::with_temperature(1200, 1.0, 1.0, 0.05, 0.0, 0.5).unwrap();
        let grid = TimeGrid::uniform(50.0, 2001).unwrap();
        let traj = trajectory(&params, &grid, &PulseConfig::off()).unwrap();
        let engine = Engine::new(&params, &PulseConfig::off()).unwrap();

        let one = detect_sudden_changes(
            &params,
            &PulseConfig::off(),
            &bell(0.9, 0.3, 0.5),
            &traj,
        )
        .unwrap();
        assert_eq!(one.len(), 1, "{one:?}");
        // the change sits where |F| crosses |c3|/|c1|
        let m = engine.magnitude(one[0]).unwrap();
        assert_abs_diff_eq!(m, 0.5 / 0.9, epsilon = 1e-6);

        let two = detect_sudden_changes(
            &params,
            &PulseConfig::off(),
            &bell(0.9, 0.5, 0.3),
            &traj,
        )
        .unwrap();
        assert_eq!(two.len(), 2, "{two:?}");
        assert!(two[0] < two[1]);
    }
}
