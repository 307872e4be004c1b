//! # hslo
//!
//! A toolkit for **heat source layout optimization** (HSLO): place a fixed
//! number of square heat sources on a conducting plate, cooled through one
//! tiny isothermal sink, so that the peak temperature is as low as possible.
//!
//! The crate has five building blocks:
//!
//! * [`thermal`] — the physics. A finite-difference solver for the
//!   steady-state Poisson problem on the square plate, plus the normalized
//!   peak-temperature objective `R_m = (Tmax - T0) / (phi0 * L^2 / k)`.
//! * [`surrogate`] — a uniform [`surrogate::Evaluator`] contract with exact,
//!   coarse-grid, and memoizing implementations, and the absolute-error
//!   metrics used to score a cheap evaluator against the exact one.
//! * [`optim`] — MNSLO, a multimodal neighborhood search. A population is
//!   clustered into groups by layout similarity; each group leader runs a
//!   best-improvement local search over single-source moves and swaps while
//!   an epsilon-archive collects near-optimal layouts.
//! * [`moea`] — a seeded NSGA-II engine over a 12-layer convolutional
//!   backbone encoding (kernel subsets and expansion rates), with an
//!   analytic parameter/FLOP cost model as the second objective.
//! * [`dataset`] — reproducible random layout sampling and a checksummed
//!   binary store of (layout, temperature field) pairs.
//!
//! ## Quick start
//!
//! Solve one layout and compute its objective:
//!
//! ```
//! use hslo::thermal::{DomainSpec, Layout, solve_temperature, normalized_metric};
//!
//! // 40x40 grid over a 4x4 cell board keeps the doc test fast.
//! let spec = DomainSpec {
//!     fine_resolution: 40,
//!     cell_partition: 4,
//!     source_side_m: 0.025,
//!     ..DomainSpec::default()
//! };
//! let layout = Layout::new([(6, 10_000.0), (11, 10_000.0)])?;
//! let field = solve_temperature(&layout, &spec, 1e-8)?;
//! let r_m = normalized_metric(&field, &spec, 10_000.0);
//! assert!(field.max() > spec.sink_temperature_k);
//! assert!(r_m > 0.0);
//! # Ok::<(), hslo::Error>(())
//! ```
//!
//! Search for near-optimal layouts with MNSLO:
//!
//! ```
//! use hslo::optim::{run_mnslo, MnsloConfig};
//! use hslo::surrogate::ExactEvaluator;
//! use hslo::thermal::{DomainSpec, IntensityScheme};
//!
//! let spec = DomainSpec {
//!     fine_resolution: 40,
//!     cell_partition: 4,
//!     source_side_m: 0.025,
//!     ..DomainSpec::default()
//! };
//! let scheme = IntensityScheme::Uniform { count: 3, intensity: 10_000.0 };
//! let evaluator = ExactEvaluator::new(&spec, 1e-8)?;
//! let cfg = MnsloConfig { population_size: 4, group_count: 2, seed: 7, ..MnsloConfig::default() };
//! let result = run_mnslo(&evaluator, &spec, &scheme, &cfg)?;
//! assert_eq!(result.best_fitness, result.archive.best().unwrap().fitness);
//! # Ok::<(), hslo::Error>(())
//! ```
//!
//! The `book/` directory of the repository walks through the model and each
//! algorithm in more detail; its code snippets are kept in sync with the doc
//! tests on the items they describe.

pub mod dataset;
mod error;
pub mod moea;
pub mod optim;
pub mod seeding;
pub mod surrogate;
pub mod thermal;

pub use error::{Error, Result};
