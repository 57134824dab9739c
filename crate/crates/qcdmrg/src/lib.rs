//! Simulation of quantum circuits with grouped-qubit matrix product states.
//!
//! The crate evolves an `N`-qubit state through a gate circuit while keeping
//! it compressed as a matrix product state (MPS) whose tensors each own a
//! *group* of qubits. Every few layers the freshly applied gates are absorbed
//! by a sweep of single-tensor optimizations that maximize the squared
//! overlap with the exact evolution of the current state; the maximized
//! overlaps are recorded as partial fidelities whose product estimates the
//! fidelity of the whole run. Both full-state ("open") evolution and
//! single-amplitude ("closed") evaluation are supported, together with
//! bitstring samplers and the cross-entropy metrics used to benchmark random
//! circuit sampling.
//!
//! The crate ships brute-force oracles (dense state vectors, split-gate
//! enumeration, Schmidt spectra of chaotic states) that bound every
//! approximation at small qubit counts, plus a CLI (`qcdmrg`) that drives
//! reproducible experiments from declarative config files.
//!
//! See the `book/` directory for a guided tour; its code snippets are
//! compiled as doc-tests through the [`guide`] module.

pub mod circuit;
pub mod cli;
pub mod compress;
pub mod exact;
pub mod fidelity;
pub mod gates;
pub mod modes;
pub mod mps;
pub mod sample;
pub mod sandwich;
pub mod sequences;
pub mod tensor;
pub mod topology;

pub mod guide;

pub use tensor::DenseTensor;
