//! Density-operator simulation of single-qubit teleportation through
//! tripartite W, GHZ and GHZ-like channels whose qubits are uniformly
//! accelerated (single-mode Unruh model).
//!
//! Layers, bottom up: [`qmath`] (dense linear algebra, bit convention),
//! [`rindler`] (acceleration and the Unruh map), [`channels`] (channel
//! states, element tables, audit), [`protocol`] (measurement, correction,
//! fidelity) and [`experiments`] (sweeps, comparisons, reports).

pub mod channels;
pub mod experiments;
pub mod protocol;
pub mod qmath;
pub mod report;
pub mod rindler;
