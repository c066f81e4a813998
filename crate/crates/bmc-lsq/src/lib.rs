//! Simulation and nonparametric estimation for branching Markov chains on
//! binary trees.
//!
//! A branching (bifurcating) Markov chain attaches a real state to every
//! node of the binary tree; each node's two children are drawn jointly from
//! a transition kernel given the parent state. This crate provides:
//!
//! - reproducible tree simulation for an autoregressive kernel with
//!   correlated Gaussian innovations and for an exactly solvable two-point
//!   chain ([`kernels`], [`tree`]);
//! - a regularized least-squares estimator of the transition density over a
//!   Gaussian tensor basis with data-driven centers, using closed-form
//!   overlap integrals ([`basis`], [`estimator`]);
//! - K-fold cross-validation of the regularization and width parameters
//!   ([`selection`]);
//! - evaluable ergodicity-dependent constants and the Bernstein-type tail
//!   bound they enter ([`constants`]);
//! - an experiment harness for error metrics, figure data, tail-frequency
//!   validation, and the convergence-rate sweep ([`experiments`]).
//!
//! The `bmc-lsq` binary wraps these pipelines behind subcommands; the
//! `examples/` directory shows one runnable program per capability.

pub mod basis;
pub mod cli;
pub mod config;
pub mod constants;
pub mod csvio;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod kernels;
pub mod quadrature;
pub mod rng;
pub mod selection;
pub mod tree;

pub use error::{Error, Result};
