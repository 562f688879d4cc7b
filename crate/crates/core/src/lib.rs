//! Energy-density fluctuations in driven quantum systems.
//!
//! Units: `ħ = k_B = 1` throughout. A formula written with `ħ` reads the same
//! with `ħ` set to one; times are in inverse energy units, temperatures in
//! energy units. Conversions to SI live at the CLI boundary.

pub mod bounds;
pub mod collective_spin;
pub mod error;
pub mod exact_lattice;
pub mod ising_entangle;
pub mod linalg;
pub mod magnus;
pub mod nonequil_observables;
pub mod optimize;
pub mod quad;
pub mod special;

pub use collective_spin::{DriveMode, DriveSchedule, DriveSegment, EnergyDistribution, MomentMethod, SpinSector, WeightedValue};
pub use error::{Error, Result};
pub use exact_lattice::{LatticeSpec, MatrixOperator, QuantumState};
pub use ising_entangle::{CorrelatorMethod, DickeSplit, DomainWallEnsemble, EntropyMethod, Multiplicity, MultiplicityMethod};
pub use nonequil_observables::{CollapseFit, SmearKernel, ViscosityDataset, ViscosityRecord};
