//! Simulation engine for resonant three-level quantum optical amplifiers.
//!
//! The crate covers the full pipeline from operator algebra to observables:
//!
//! - [`hilbert`]: operators, density matrices, and state construction on the
//!   3-level-atom ⊗ truncated-Fock-field space;
//! - [`liouville`]: Hamiltonians (linear and two-photon), thermal bath
//!   dissipators, and the master-equation right-hand side;
//! - [`integrate`]: fixed-step RK4 evolution with health monitoring;
//! - [`thermo`]: heat currents, field power, efficiency, energies, entropies;
//! - [`semiclassical`]: closed-form steady-state currents of the classically
//!   driven amplifier and a null-space steady-state solver;
//! - [`phasespace`]: Husimi-Q and Wigner distributions on phase-space grids.
//!
//! Conventions: ħ = k_B = 1, all frequencies angular, entropies in nats.

pub mod error;
pub mod hilbert;
pub mod integrate;
pub mod liouville;
pub mod phasespace;
pub mod semiclassical;
pub mod thermo;

pub use error::{Error, Result};
pub use hilbert::{
    AtomStateSpec, BuiltState, DensityMatrix, FieldStateSpec, HilbertLayout, Operator, Space,
    Subsystem,
};
pub use integrate::{EvolveOutput, IntegratorConfig, SampleRecord, TimeSeries};
pub use liouville::{AmplifierModel, Bath, BathChannel, Frame, InteractionOrder, Liouvillian};
pub use phasespace::{GridSpec, PhaseSpaceGrid};
pub use semiclassical::{SemiclassicalModel, SteadyCurrents};
pub use thermo::ThermoSample;
