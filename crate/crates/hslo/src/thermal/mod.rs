//! Finite-difference solution of the steady heat-conduction problem and the
//! normalized peak-temperature objective.
//!
//! The domain is a square plate with uniform conductivity. Heat enters
//! through square sources that each fill one cell of a `C x C` partition and
//! leaves through a narrow isothermal sink on one edge; every other boundary
//! segment is adiabatic. [`solve_temperature`] discretizes the Poisson
//! equation with the 5-point stencil (mirror ghost nodes for the adiabatic
//! segments) and solves it to a requested residual tolerance;
//! [`ThermalSolver`] does the same with a cached direct factorization for
//! many-layout workloads.

mod domain;
mod field;
mod raster;
mod solve;

pub use domain::{DomainSpec, IntensityScheme, Layout, SinkEdge, Source, REFERENCE_INTENSITY};
pub use field::{IntensityField, ScalarField, TemperatureField, FIELD_MAGIC, FIELD_VERSION};
pub use raster::rasterize_intensity;
pub use solve::{solve_temperature, ThermalSolver};

/// Normalized peak-temperature metric
/// `R_m = (max T - T0) / (phi0 L² / k)`.
///
/// `reference_intensity` is the normalizing intensity `phi0` (must be
/// positive); the benchmark cases both use [`REFERENCE_INTENSITY`].
///
/// ```
/// use hslo::thermal::{normalized_metric, DomainSpec, TemperatureField};
/// let spec = DomainSpec::default();
/// let mut field = TemperatureField::zeros(2, 2);
/// field.values_mut().fill(298.0);
/// field.set(1, 1, 327.02);
/// assert!((normalized_metric(&field, &spec, 10_000.0) - 0.2902).abs() < 1e-12);
/// ```
pub fn normalized_metric(
    field: &TemperatureField,
    spec: &DomainSpec,
    reference_intensity: f64,
) -> f64 {
    assert!(
        reference_intensity > 0.0,
        "reference intensity must be positive"
    );
    let scale = reference_intensity * spec.side_length_m * spec.side_length_m / spec.conductivity;
    (field.max() - spec.sink_temperature_k) / scale
}
