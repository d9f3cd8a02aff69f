//! Quasiparticle spectrum of the transverse-field Ising bath.
//!
//! The bath Hamiltonian `J Σ_i (σˣᵢσˣᵢ₊₁ + h σᶻᵢ)` maps onto free fermions
//! with one quasiparticle branch per wavenumber. For each positive mode
//! `k` the excitation energy is `2JΛ_k(h)` with
//!
//! ```text
//! Λ_k(h) = √((cos k + h)² + sin²k),
//! cos θ_k = (cos k + h)/Λ_k,   sin θ_k = sin k/Λ_k,
//! ```
//!
//! and the grid runs over `k = π/N, 3π/N, …, (N−1)π/N` so that modes pair
//! as `±k`. The system qubit shifts the field seen by the bath from `h` to
//! `h̃ = h + ε/J`; everything downstream consumes `Λ` and `θ` at both
//! fields plus the Bogoliubov-angle mismatch `α_k = (θ̃_k − θ_k)/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical parameters of the qubit + Ising-bath model.
///
/// Energies are measured in units of the bath coupling `J`; `beta` is the
/// inverse temperature with the Boltzmann constant set to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    n_spins: usize,
    h: f64,
    j: f64,
    epsilon: f64,
    f: f64,
    beta: f64,
}

impl BathParams {
    /// Validates and builds a parameter set.
    ///
    /// `n_spins` must be even and at least 2: the mode grid pairs `±k`
    /// quasiparticles, and an odd chain would leave an unpaired mode.
    pub fn new(
        n_spins: usize,
        h: f64,
        j: f64,
        epsilon: f64,
        f: f64,
        beta: f64,
    ) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::Config(format!("n_spins must be >= 2, got {n_spins}")));
        }
        if n_spins % 2 != 0 {
            return Err(Error::Config(format!("n_spins must be even, got {n_spins}")));
        }
        for (name, v) in [("h", h), ("j", j), ("epsilon", epsilon), ("f", f), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if j <= 0.0 {
            return Err(Error::Config(format!("j must be positive, got {j}")));
        }
        if beta < 0.0 {
            return Err(Error::Config(format!("beta must be nonnegative, got {beta}")));
        }
        Ok(Self { n_spins, h, j, epsilon, f, beta })
    }

    /// Same as [`BathParams::new`] but with the temperature `T` given
    /// directly (`beta = 1/T`, Boltzmann constant 1). `T` must be positive.
    pub fn with_temperature(
        n_spins: usize,
        h: f64,
        j: f64,
        epsilon: f64,
        f: f64,
        temperature: f64,
    ) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::Config(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Self::new(n_spins, h, j, epsilon, f, 1.0 / temperature)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Field seen by the bath when the qubit occupies its coupled level.
    pub fn h_tilde(&self) -> f64 {
        self.h + self.epsilon / self.j
    }
}

/// Spectral data of one positive mode at the bare field `h` and the
/// qubit-shifted field `h̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    /// Wavenumber in (0, π).
    pub k: f64,
    /// Dimensionless quasiparticle energy `Λ_k(h)`.
    pub lambda: f64,
    /// Bogoliubov angle `θ_k(h)` in radians.
    pub theta: f64,
    /// `Λ_k(h̃)`.
    pub lambda_tilde: f64,
    /// `θ_k(h̃)`.
    pub theta_tilde: f64,
    /// Angle mismatch `α_k = (θ̃_k − θ_k)/2`.
    pub alpha: f64,
}

/// Positive-wavenumber grid `k_m = (2m−1)π/N`, `m = 1…N/2`.
pub fn mode_grid(n_spins: usize) -> Result<Vec<f64>> {
    if n_spins < 2 || n_spins % 2 != 0 {
        return Err(Error::Config(format!(
            "mode grid requires an even bath size >= 2, got {n_spins}"
        )));
    }
    let n = n_spins as f64;
    Ok((1..=n_spins / 2)
        .map(|m| (2 * m - 1) as f64 * PI / n)
        .collect())
}

/// Quasiparticle energy `Λ_k(h)`.
pub fn dispersion(k: f64, h: f64) -> f64 {
    let c = k.cos() + h;
    let s = k.sin();
    (c * c + s * s).sqrt()
}

/// Bogoliubov angle `θ_k(h)`, via the two-argument arctangent of
/// `(sin k, cos k + h)`. The gapless point `Λ_k = 0` takes `θ_k = 0`.
pub fn bogoliubov_angle(k: f64, h: f64) -> f64 {
    if dispersion(k, h) == 0.0 {
        return 0.0;
    }
    k.sin().atan2(k.cos() + h)
}

/// All six spectral quantities for one mode.
pub fn mode_data(k: f64, h: f64, h_tilde: f64) -> ModeData {
    debug_assert!(k > 0.0 && k < PI, "wavenumber must lie in (0, pi)");
    let theta = bogoliubov_angle(k, h);
    let theta_tilde = bogoliubov_angle(k, h_tilde);
    ModeData {
        k,
        lambda: dispersion(k, h),
        theta,
        lambda_tilde: dispersion(k, h_tilde),
        theta_tilde,
        alpha: 0.5 * (theta_tilde - theta),
    }
}

/// Spectral data for the whole grid of a parameter set.
pub fn modes(params: &BathParams) -> Result<Vec<ModeData>> {
    let h = params.h();
    let h_tilde = params.h_tilde();
    Ok(mode_grid(params.n_spins())?
        .into_iter()
        .map(|k| mode_data(k, h, h_tilde))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_n4() {
        let g = mode_grid(4).unwrap();
        assert_eq!(g.len(), 2);
        assert_abs_diff_eq!(g[0], PI / 4.0);
        assert_abs_diff_eq!(g[1], 3.0 * PI / 4.0);
    }

    #[test]
    fn grid_n2_single_mode() {
        let g = mode_grid(2).unwrap();
        assert_eq!(g, vec![PI / 2.0]);
    }

    #[test]
    fn grid_n1200_endpoints() {
        let g = mode_grid(1200).unwrap();
        assert_eq!(g.len(), 600);
        assert_abs_diff_eq!(g[0], PI / 1200.0);
        assert_abs_diff_eq!(g[599], 1199.0 * PI / 1200.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|&k| k > 0.0 && k < PI));
    }

    #[test]
    fn grid_rejects_odd_and_tiny() {
        assert!(mode_grid(5).is_err());
        assert!(mode_grid(1).is_err());
        assert!(mode_grid(0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(BathParams::new(3, 1.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(BathParams::new(4, 1.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BathParams::new(4, 1.0, 1.0, 0.0, 0.0, -0.5).is_err());
        assert!(BathParams::new(4, f64::NAN, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(BathParams::with_temperature(4, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        let p = BathParams::with_temperature(4, 1.0, 2.0, 0.1, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(p.beta(), 2.0);
        assert_abs_diff_eq!(p.h_tilde(), 1.05);
    }

    #[test]
    fn dispersion_closes_at_criticality() {
        // (k = pi/2, h = 0): (0 + 0)^2 + 1 = 1
        assert_abs_diff_eq!(dispersion(PI / 2.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bogoliubov_angle(PI / 2.0, 0.0), PI / 2.0, epsilon = 1e-15);
        // gap closes at (k = pi, h = 1)
        assert_abs_diff_eq!(dispersion(PI, 1.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dispersion_derived_value() {
        // sqrt((cos(pi/3) + 2)^2 + sin^2(pi/3)) = sqrt(6.25 + 0.75) = sqrt(7)
        let m = mode_data(PI / 3.0, 2.0, 2.05);
        assert_abs_diff_eq!(m.lambda, 7.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.lambda, 2.645751311064591, epsilon = 1e-12);
    }

    #[test]
    fn angle_consistency() {
        // cos(theta) * lambda = cos k + h and sin(theta) * lambda = sin k
        for &(k, h) in &[(0.3, 0.0), (1.2, 0.7), (2.9, 1.0), (0.01, 2.4), (3.1, 0.2)] {
            let m = mode_data(k, h, h + 0.07);
            assert_abs_diff_eq!(m.theta.cos() * m.lambda, k.cos() + h, epsilon = 1e-12);
            assert_abs_diff_eq!(m.theta.sin() * m.lambda, k.sin(), epsilon = 1e-12);
            let norm = m.theta.cos().powi(2) + m.theta.sin().powi(2);
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            assert!(m.lambda >= 0.0);
        }
    }

    #[test]
    fn lambda_squared_identity_on_grid() {
        let params = BathParams::new(240, 0.8, 1.0, 0.05, 0.0, 1.0).unwrap();
        for m in modes(&params).unwrap() {
            let target = (m.k.cos() + 0.8).powi(2) + m.k.sin().powi(2);
            assert_abs_diff_eq!(m.lambda * m.lambda, target, epsilon = 1e-12);
        }
    }

    #[test]
    fn gap_minimum_tracks_field_distance() {
        // min_k Lambda_k approaches |h - 1| to within 2*pi/N for N >= 200
        for &h in &[0.2, 0.6, 1.0] {
            let n = 400;
            let min = mode_grid(n)
                .unwrap()
                .into_iter()
                .map(|k| dispersion(k, h))
                .fold(f64::INFINITY, f64::min);
            let bound = 2.0 * PI / n as f64;
            assert!(
                (min - (h - 1.0_f64).abs()).abs() <= bound,
                "h={h}: min={min}, |h-1|={}, bound={bound}",
                (h - 1.0_f64).abs()
            );
        }
    }

    #[test]
    fn grid_cosines_pair_symmetrically() {
        // the multiset {cos k} is symmetric about zero: k and pi - k coexist
        let mut c: Vec<f64> = mode_grid(30).unwrap().iter().map(|k| k.cos()).collect();
        let mut neg: Vec<f64> = c.iter().map(|x| -x).collect();
        c.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        for (a, b) in c.iter().zip(&neg) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }
}
