//! Density of states of the Harper operator, its Picard–Fuchs equation,
//! mirror map and modular q-expansions, with exact rational series
//! throughout and floating point only where the quantity is transcendental.

pub mod config;
pub mod elliptic;
pub mod exactseries;
pub mod fermi;
pub mod mirrormap;
pub mod modular;
pub mod monodromy;
pub mod ode;
pub mod verify;
