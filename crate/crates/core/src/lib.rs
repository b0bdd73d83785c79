//! Exact thermal reduced density matrices of lower-dimensional subsystems
//! embedded in gapped Dirac-fermion ground states.
//!
//! A free-fermion ground state of a `D`-dimensional Dirac Hamiltonian
//! `H(k) = d(k)·Γ` induces, on any translation-invariant subsystem of
//! dimension `D_s < D`, a reduced density matrix that is exactly thermal
//! with respect to a lower-dimensional Dirac Hamiltonian. This crate
//! computes that mapping — effective subsystem Hamiltonians, entanglement
//! temperatures, correlation spectra — together with topological
//! invariants of the reduced models and particle-number fluctuations.
//!
//! Module map:
//!
//! - [`numerics`]: eigensolver, BZ grids, reductions, quadrature
//! - [`clifford`]: Γ-matrix representations and discrete symmetries
//! - [`models`]: model zoo (QWZ, 4D quantum Hall, SSH stack, continuum Dirac)
//! - [`entmap`]: transverse averaging, effective subsystem Hamiltonians,
//!   entanglement temperatures
//! - [`correlations`]: correlation matrices, spectra, entanglement
//!   Hamiltonian, particle-number variance, time dependence
//! - [`topo`]: ℤ invariants, weak indices, gap scans
//! - [`selftest`]: deterministic invariant suite

pub mod clifford;
pub mod correlations;
pub mod entmap;
pub mod models;
pub mod numerics;
pub mod selftest;
pub mod topo;

pub use correlations::CorrelationMatrix;
pub use entmap::{EshResult, SubsystemSpec};
pub use models::{DiracModel, LatticeGeometry};
pub use numerics::{BzGrid, ComplexMatrix, HermitianMatrix};
