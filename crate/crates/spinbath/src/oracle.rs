//! Independent verification routes.
//!
//! [`dense_mode_oracle`] recomputes the free decoherence factor without
//! any of the closed-form trigonometry: for every positive mode it builds
//! the two Hamiltonians of the `(k, −k)` fermion pair space as explicit
//! matrices, exponentiates them, and takes the thermal trace
//! `Tr(ρ_k e^{iH↑t} e^{−iH↓t})` directly. Agreement with
//! [`crate::decoherence::decoherence_factor`] therefore checks the
//! dispersion, the Bogoliubov angles, the thermal weights and the
//! per-mode trace algebra at once.
//!
//! The suite runners drive randomized comparisons of both oracle routes
//! (this one and [`crate::quantumness::trace_norm_oracle`]) and are what
//! the `oracle-check` CLI subcommand executes.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bath::{self, BathParams};
use crate::decoherence::decoherence_factor;
use crate::error::{Error, Result};
use crate::quantumness::{
    evolve, negativity_of_quantumness, rotate_to_bell_diagonal, trace_norm_oracle,
    BellDiagonalState,
};

/// Trace of one mode-pair factor in the occupation basis
/// `{|00⟩, |01⟩, |10⟩, |11⟩}` of the `(k, −k)` fermions.
///
/// The pair block couples `|00⟩ ↔ |11⟩`; the singly occupied states are
/// zero modes of both Hamiltonians and carry no thermal weight — the
/// per-mode partition function `2 cosh(2JβΛ_k)` counts the paired doublet
/// with energies `±2JΛ_k` only, so the thermal state is projected onto
/// that sector before normalization.
fn mode_pair_trace(k: f64, params: &BathParams, t: f64) -> Complex64 {
    let j = params.j();
    let (sk, ck) = k.sin_cos();
    let pair = |field: f64| -> Matrix4<Complex64> {
        let a = Complex64::new(2.0 * j * (ck + field), 0.0);
        let b = Complex64::new(2.0 * j * sk, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Matrix4::new(
            -a, z, z, b, //
            z, z, z, z, //
            z, z, z, z, //
            b, z, z, a,
        )
    };
    let h_up = pair(params.h());
    let h_dn = pair(params.h_tilde());

    let mut weights = (h_up * Complex64::new(-params.beta(), 0.0)).exp();
    // parity projection: drop the decoupled single-occupation states
    weights[(1, 1)] = Complex64::new(0.0, 0.0);
    weights[(2, 2)] = Complex64::new(0.0, 0.0);
    let trace = weights.trace();
    let rho = weights / trace;

    let u_up = (h_up * Complex64::new(0.0, t)).exp();
    let u_dn = (h_dn * Complex64::new(0.0, -t)).exp();
    (rho * u_up * u_dn).trace()
}

/// Brute-force `F(t)` from per-mode matrix exponentials.
pub fn dense_mode_oracle(params: &BathParams, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Config(format!("time must be nonnegative, got {t}")));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for k in bath::mode_grid(params.n_spins())? {
        prod *= mode_pair_trace(k, params, t);
    }
    if !prod.is_finite() {
        return Err(Error::Computation {
            t,
            message: "non-finite mode-pair trace in oracle".into(),
        });
    }
    Ok(Complex64::from_polar(1.0, 2.0 * params.f() * t) * prod)
}

/// Outcome of one randomized comparison suite.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} over {} cases, max |deviation| = {:.3e} (tolerance {:.1e})",
            self.name,
            if self.passed() { "ok" } else { "FAILED" },
            self.cases,
            self.max_deviation,
            self.tolerance
        )
    }
}

/// Compares the closed-form decoherence factor against the pair-space
/// oracle on random parameter sets for bath sizes 2, 4 and 6.
pub fn decoherence_suite(
    seed: u64,
    sets_per_size: usize,
    times_per_set: usize,
) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut max_dev: f64 = 0.0;
    for &n in &[2usize, 4, 6] {
        for _ in 0..sets_per_size {
            let h = rng.gen_range(0.0..2.5);
            let j = rng.gen_range(0.5..2.0);
            let eps = rng.gen_range(-0.5..0.5);
            let f = rng.gen_range(-1.0..1.0);
            let beta = rng.gen_range(0.0..3.0);
            let params = BathParams::new(n, h, j, eps, f, beta)?;
            for _ in 0..times_per_set {
                let t = rng.gen_range(0.0..10.0);
                let fast = decoherence_factor(&params, t)?;
                let slow = dense_mode_oracle(&params, t)?;
                max_dev = max_dev.max((fast - slow).norm());
                cases += 1;
            }
        }
    }
    Ok(OracleReport {
        name: "decoherence factor vs pair-space trace",
        cases,
        max_deviation: max_dev,
        tolerance: 1e-9,
    })
}

/// Random Bell-diagonal state: coefficients drawn uniformly in the cube
/// and rejected until the four Bell populations are nonnegative.
pub fn random_bell_diagonal(rng: &mut impl Rng) -> BellDiagonalState {
    loop {
        let c1 = rng.gen_range(-1.0..1.0);
        let c2 = rng.gen_range(-1.0..1.0);
        let c3 = rng.gen_range(-1.0..1.0);
        if let Ok(state) = BellDiagonalState::new(c1, c2, c3) {
            return state;
        }
    }
}

/// Compares the closed-form (median) negativity of quantumness against
/// the trace-norm minimization on random evolved Bell-diagonal states.
pub fn quantumness_suite(seed: u64, states: usize) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..states {
        let state = random_bell_diagonal(&mut rng);
        let magnitude = rng.gen_range(0.0..1.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let f = Complex64::from_polar(magnitude, phase);
        let rho = evolve(&state, f)?;
        let median = negativity_of_quantumness(&rotate_to_bell_diagonal(&rho, f)?);
        let minimized = trace_norm_oracle(&rho);
        max_dev = max_dev.max((median - minimized).abs());
    }
    Ok(OracleReport {
        name: "median rule vs trace-norm minimization",
        cases: states,
        max_deviation: max_dev,
        tolerance: 1e-5,
    })
}
