pub mod acceptance;
pub mod approx;
pub mod cli;
pub mod enclosures;
pub mod gallery;
pub mod matkernel;
pub mod ranges;
pub mod region;
