//! Exact simulator for a qubit dephasing in a thermal transverse-field
//! Ising spin bath.
//!
//! The bath is a periodic Ising chain in a transverse field `h`, held in
//! a thermal state; the qubit couples to it longitudinally and only
//! dephases. The reduced dynamics reduces to a product over the bath's
//! free-fermion modes, which this crate evaluates exactly:
//!
//! * [`bath`] — the quasiparticle mode grid, energies and Bogoliubov
//!   angles,
//! * [`decoherence`] — the decoherence factor `F(t)`, the Loschmidt echo
//!   `L(t) = |F|²`, and the effective factor under a bang-bang pulse
//!   train,
//! * [`quantumness`] — Bell-diagonal system–ancilla states, their
//!   dephasing, the negativity of quantumness (median closed form and a
//!   trace-norm minimization cross-check), and sudden-change detection,
//! * [`nonmarkov`] — revival detection and the non-Markovianity measures
//!   built on it,
//! * [`sweep`] — parallel parameter sweeps with deterministic CSV/JSON
//!   output and figure presets,
//! * [`oracle`] — brute-force verification routes used by tests and the
//!   `oracle-check` CLI subcommand.
//!
//! ```
//! use spinbath::{BathParams, PulseConfig, TimeGrid};
//! use spinbath::decoherence::trajectory;
//!
//! let params = BathParams::with_temperature(200, 1.0, 1.0, 0.05, 0.0, 0.5).unwrap();
//! let grid = TimeGrid::uniform(20.0, 401).unwrap();
//! let traj = trajectory(&params, &grid, &PulseConfig::off()).unwrap();
//! assert!((traj.loschmidt_echo()[0] - 1.0).abs() < 1e-12);
//! ```

pub mod bath;
pub mod decoherence;
pub mod error;
pub mod nonmarkov;
pub mod oracle;
pub mod quantumness;
pub mod sweep;

pub use bath::{BathParams, ModeData};
pub use decoherence::{DecoherenceTrajectory, PulseConfig, TimeGrid};
pub use error::{Error, Result};
pub use quantumness::{BellDiagonalState, TwoQubitDensityMatrix};
