use crate::error::{Error, Result};
use crate::thermal::domain::{DomainSpec, Layout};
use crate::thermal::field::{IntensityField, TemperatureField};
use crate::thermal::raster::rasterize_intensity;

/// Assembled 5-point operator for the shifted unknowns `u = T - T0`.
///
/// Interior nodes carry the standard stencil `4u_P - u_E - u_W - u_N - u_S =
/// phi h²/k`. Adiabatic boundary nodes mirror the missing neighbor (second
/// order), which doubles the opposite coefficient; each boundary row is then
/// scaled by its volume fraction (1/2 edge, 1/4 corner) so the matrix stays
/// symmetric. Sink nodes are Dirichlet `u = 0`: identity rows with the
/// couplings dropped on both sides.
pub(crate) struct Stencil {
    grid: usize,
    diag: Vec<f64>,
    /// Signed coefficients toward the E, W, N, S neighbors (0 when the
    /// neighbor is off-grid or a sink node).
    nb: Vec<[f64; 4]>,
    sink: Vec<bool>,
    weight: Vec<f64>,
    rhs_scale: f64,
}

const E: usize = 0;
const W: usize = 1;
const N: usize = 2;
const S: usize = 3;

impl Stencil {
    pub fn build(spec: &DomainSpec) -> Result<Self> {
        let grid = spec.fine_resolution;
        let n = grid * grid;
        let mut sink = vec![false; n];
        for p in spec.sink_nodes() {
            sink[p] = true;
        }
        if !sink.iter().any(|&s| s) {
            return Err(Error::Singular(
                "no sink nodes: the Neumann problem has no unique solution".into(),
            ));
        }
        let h = spec.spacing();
        let mut diag = vec![0.0; n];
        let mut nb = vec![[0.0; 4]; n];
        let mut weight = vec![0.0; n];
        for i in 0..grid {
            for j in 0..grid {
                let p = i * grid + j;
                if sink[p] {
                    diag[p] = 1.0;
                    continue;
                }
                let on_grid = [j + 1 < grid, j > 0, i > 0, i + 1 < grid];
                let missing = on_grid.iter().filter(|&&b| !b).count();
                let w = 1.0 / (1 << missing) as f64;
                weight[p] = w;
                diag[p] = 4.0 * w;
                let neighbor = |d: usize| -> usize {
                    match d {
                        E => p + 1,
                        W => p - 1,
                        N => p - grid,
                        _ => p + grid,
                    }
                };
                let opposite = [W, E, S, N];
                for d in 0..4 {
                    if !on_grid[d] {
                        continue;
                    }
                    let q = neighbor(d);
                    if sink[q] {
                        continue; // u_q = 0; dropped symmetrically
                    }
                    let mirrored = if on_grid[opposite[d]] { 1.0 } else { 2.0 };
                    nb[p][d] = -w * mirrored;
                }
            }
        }
        Ok(Stencil {
            grid,
            diag,
            nb,
            sink,
            weight,
            rhs_scale: h * h / spec.conductivity,
        })
    }

    pub fn len(&self) -> usize {
        self.grid * self.grid
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.grid;
        for i in 0..g {
            for j in 0..g {
                let p = i * g + j;
                let c = self.nb[p];
                let mut acc = self.diag[p] * x[p];
                if c[E] != 0.0 {
                    acc += c[E] * x[p + 1];
                }
                if c[W] != 0.0 {
                    acc += c[W] * x[p - 1];
                }
                if c[N] != 0.0 {
                    acc += c[N] * x[p - g];
                }
                if c[S] != 0.0 {
                    acc += c[S] * x[p + g];
                }
                y[p] = acc;
            }
        }
    }

    /// Right-hand side for an intensity field (zero on sink rows).
    pub fn rhs(&self, intensity: &IntensityField) -> Vec<f64> {
        intensity
            .values()
            .iter()
            .enumerate()
            .map(|(p, &phi)| self.weight[p] * phi * self.rhs_scale)
            .collect()
    }

    /// ||b - A x||2 / ||b||2, with 0/0 = 0.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        let mut rr = 0.0;
        let mut bb = 0.0;
        for p in 0..x.len() {
            let r = b[p] - ax[p];
            rr += r * r;
            bb += b[p] * b[p];
        }
        if bb == 0.0 {
            return if rr == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (rr / bb).sqrt()
    }

    /// Original band-matrix entry A[i][j] for j in {i-grid, i-1, i}.
    fn band_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.nb[i][W]
        } else if j + self.grid == i {
            self.nb[i][N]
        } else {
            0.0
        }
    }
}

/// Conjugate gradient on the assembled system. Returns `(u, residual,
/// iterations)`; errors if the iteration budget is exhausted before the
/// relative residual reaches `tol`.
pub(crate) fn solve_cg(st: &Stencil, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64, usize)> {
    let n = st.len();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0.0, 0));
    }
    let target = tol * bnorm;
    let budget = 80 * st.grid + 1000;

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut q = vec![0.0; n];
    let mut rsq: f64 = r.iter().map(|v| v * v).sum();
    let mut iters = 0;
    while iters < budget {
        iters += 1;
        st.apply(&p, &mut q);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if pq <= 0.0 {
            return Err(Error::Singular(
                "conjugate gradient hit a non-positive curvature direction".into(),
            ));
        }
        let alpha = rsq / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        let rsq_new: f64 = r.iter().map(|v| v * v).sum();
        if rsq_new.sqrt() <= 0.5 * target {
            // Recurrence residuals drift; confirm against the true residual
            // and restart from it if the check fails.
            let true_res = st.relative_residual(&x, b);
            if true_res <= tol {
                return Ok((x, true_res, iters));
            }
            let mut ax = vec![0.0; n];
            st.apply(&x, &mut ax);
            for k in 0..n {
                r[k] = b[k] - ax[k];
            }
            rsq = r.iter().map(|v| v * v).sum();
            p.copy_from_slice(&r);
            continue;
        }
        let beta = rsq_new / rsq;
        rsq = rsq_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    Err(Error::Solver {
        message: format!("conjugate gradient exceeded {budget} iterations"),
        residual: st.relative_residual(&x, b),
    })
}

/// Banded Cholesky factorization of the assembled system (half-bandwidth =
/// grid side). Factor once per spec, then each solve is two band sweeps.
pub(crate) struct BandCholesky {
    n: usize,
    band: usize,
    /// Row-major band storage, `band + 1` slots per row; slot `band` is the
    /// diagonal, slot `s` column `row - band + s`.
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(st: &Stencil) -> Result<Self> {
        let n = st.len();
        let band = st.grid;
        let w = band + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(band);
            let (before, current) = l.split_at_mut(i * w);
            let row_i = &mut current[..w];
            for j in lo..=i {
                let start = lo.max(j.saturating_sub(band));
                let si = start + band - i;
                let len = j - start;
                let mut sum = st.band_entry(i, j);
                if len > 0 {
                    let row_j = &before[j * w..j * w + w];
                    let sj = start + band - j;
                    sum -= row_i[si..si + len]
                        .iter()
                        .zip(&row_j[sj..sj + len])
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::Singular(format!(
                            "non-positive pivot {sum:.3e} at row {i}"
                        )));
                    }
                    row_i[band] = sum.sqrt();
                } else {
                    let pivot = before[j * w + band];
                    row_i[j + band - i] = sum / pivot;
                }
            }
        }
        Ok(BandCholesky { n, band, l })
    }

    /// Solves A x = b via L Lᵀ x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, band, w) = (self.n, self.band, self.band + 1);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(band);
            let row = &self.l[i * w..(i + 1) * w];
            let s0 = lo + band - i;
            let mut acc = b[i];
            for (k, &lik) in (lo..i).zip(&row[s0..band]) {
                acc -= lik * y[k];
            }
            y[i] = acc / row[band];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let hi = (i + band).min(n - 1);
            let mut acc = y[i];
            for k in i + 1..=hi {
                // L[k][i] lives in row k at slot i - k + band.
                acc -= self.l[k * w + i + band - k] * x[k];
            }
            x[i] = acc / self.l[i * w + band];
        }
        x
    }
}

fn field_from_shifted(spec: &DomainSpec, u: Vec<f64>) -> TemperatureField {
    let n = spec.fine_resolution;
    let t0 = spec.sink_temperature_k;
    let values = u.into_iter().map(|v| t0 + v).collect();
    TemperatureField::from_values(n, n, values).expect("solver output has grid shape")
}

/// Solves the steady conduction problem by conjugate gradient iteration.
///
/// Dirichlet `T = T0` on the sink nodes, mirror-ghost Neumann elsewhere on
/// the boundary; the relative residual of the assembled system is at most
/// `tol` on success.
///
/// ```
/// use hslo::thermal::{DomainSpec, Layout, solve_temperature};
/// let spec = DomainSpec {
///     fine_resolution: 40, cell_partition: 10, source_side_m: 0.01,
///     sink_width_m: 0.008, ..DomainSpec::default()
/// };
/// let field = solve_temperature(&Layout::empty(), &spec, 1e-8)?;
/// assert!(field.values().iter().all(|&t| t == 298.0));
/// # Ok::<(), hslo::Error>(())
/// ```
pub fn solve_temperature(layout: &Layout, spec: &DomainSpec, tol: f64) -> Result<TemperatureField> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    if spec.sink_nodes().is_empty() {
        return Err(Error::Singular("spec has no sink nodes".into()));
    }
    let intensity = rasterize_intensity(layout, spec)?;
    let st = Stencil::build(spec)?;
    let b = st.rhs(&intensity);
    let (u, _, _) = solve_cg(&st, &b, tol)?;
    Ok(field_from_shifted(spec, u))
}

/// A direct solver with a cached factorization, for workloads that solve the
/// same domain for many layouts (evaluators, dataset generation).
///
/// The factorization is immutable after construction, so a single instance
/// can serve concurrent solves; cloning is not needed.
pub struct ThermalSolver {
    spec: DomainSpec,
    stencil: Stencil,
    chol: BandCholesky,
    tol: f64,
}

impl ThermalSolver {
    pub fn new(spec: &DomainSpec, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        spec.validate()?;
        let stencil = Stencil::build(spec)?;
        let chol = BandCholesky::factor(&stencil)?;
        Ok(ThermalSolver {
            spec: spec.clone(),
            stencil,
            chol,
            tol,
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn solve(&self, layout: &Layout) -> Result<TemperatureField> {
        let intensity = rasterize_intensity(layout, &self.spec)?;
        let b = self.stencil.rhs(&intensity);
        let u = self.chol.solve(&b);
        let residual = self.stencil.relative_residual(&u, &b);
        if residual > self.tol {
            return Err(Error::Solver {
                message: "direct solve failed the residual check".into(),
                residual,
            });
        }
        Ok(field_from_shifted(&self.spec, u))
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};

    use crate::thermal::domain::SinkEdge;

    use super::*;

    fn small_spec(n: usize, c: usize) -> DomainSpec {
        DomainSpec {
            fine_resolution: n,
            cell_partition: c,
            source_side_m: 0.1 / c as f64,
            sink_width_m: 0.008,
            ..DomainSpec::default()
        }
    }

    /// Independent dense assembly: unscaled stencil rows, mirror ghosts,
    /// identity rows on sink nodes, LU solve.
    fn dense_reference(layout: &Layout, spec: &DomainSpec) -> TemperatureField {
        let g = spec.fine_resolution;
        let n = g * g;
        let h = spec.spacing();
        let phi = rasterize_intensity(layout, spec).unwrap();
        let sink: std::collections::HashSet<usize> = spec.sink_nodes().into_iter().collect();
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for i in 0..g {
            for j in 0..g {
                let p = i * g + j;
                if sink.contains(&p) {
                    a[(p, p)] = 1.0;
                    continue;
                }
                a[(p, p)] = 4.0;
                b[p] = phi.get(i, j) * h * h / spec.conductivity;
                let mut couple = |q: usize, amount: f64| {
                    a[(p, q)] -= amount;
                };
                let east = j + 1 < g;
                let west = j > 0;
                let north = i > 0;
                let south = i + 1 < g;
                if east {
                    couple(p + 1, if west { 1.0 } else { 2.0 });
                }
                if west {
                    couple(p - 1, if east { 1.0 } else { 2.0 });
                }
                if north {
                    couple(p - g, if south { 1.0 } else { 2.0 });
                }
                if south {
                    couple(p + g, if north { 1.0 } else { 2.0 });
                }
            }
        }
        let u = a.lu().solve(&b).expect("dense system is nonsingular");
        let values = u.iter().map(|v| spec.sink_temperature_k + v).collect();
        TemperatureField::from_values(g, g, values).unwrap()
    }

    #[test]
    fn zero_sources_give_uniform_sink_temperature() {
        let spec = small_spec(40, 10);
        let field = solve_temperature(&Layout::empty(), &spec, 1e-8).unwrap();
        assert!(field.values().iter().all(|&t| t == 298.0));
    }

    #[test]
    fn doubling_intensity_doubles_the_rise() {
        let spec = small_spec(40, 10);
        let base = Layout::new([(13, 10_000.0), (77, 10_000.0)]).unwrap();
        let double = Layout::new([(13, 20_000.0), (77, 20_000.0)]).unwrap();
        let f1 = solve_temperature(&base, &spec, 1e-10).unwrap();
        let f2 = solve_temperature(&double, &spec, 1e-10).unwrap();
        for (a, b) in f1.values().iter().zip(f2.values()) {
            let rise1 = a - 298.0;
            let rise2 = b - 298.0;
            if rise1.abs() > 0.0 {
                assert!((rise2 - 2.0 * rise1).abs() <= 1e-8 * rise1.abs().max(1.0));
            }
        }
    }

    #[test]
    fn iterative_matches_dense_reference_on_20x20() {
        let spec = small_spec(20, 10);
        let layout = Layout::new([(34, 10_000.0), (67, 10_000.0)]).unwrap();
        let iterative = solve_temperature(&layout, &spec, 1e-12).unwrap();
        let dense = dense_reference(&layout, &spec);
        let max_abs = iterative
            .values()
            .iter()
            .zip(dense.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_abs <= 1e-6, "max abs deviation {max_abs:.3e}");
    }

    #[test]
    fn direct_solver_matches_dense_reference() {
        let spec = small_spec(20, 10);
        let layout = Layout::new([(1, 10_000.0), (55, 4_000.0), (100, 20_000.0)]).unwrap();
        let solver = ThermalSolver::new(&spec, 1e-10).unwrap();
        let direct = solver.solve(&layout).unwrap();
        let dense = dense_reference(&layout, &spec);
        let max_abs = direct
            .values()
            .iter()
            .zip(dense.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_abs <= 1e-8, "max abs deviation {max_abs:.3e}");
    }

    #[test]
    fn direct_and_iterative_agree() {
        let spec = small_spec(40, 10);
        let layout = Layout::new([(5, 10_000.0), (42, 10_000.0), (98, 10_000.0)]).unwrap();
        let solver = ThermalSolver::new(&spec, 1e-10).unwrap();
        let direct = solver.solve(&layout).unwrap();
        let iterative = solve_temperature(&layout, &spec, 1e-12).unwrap();
        let max_abs = direct
            .values()
            .iter()
            .zip(iterative.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_abs <= 1e-6, "max abs deviation {max_abs:.3e}");
    }

    #[test]
    fn superposition_of_disjoint_layouts() {
        let spec = small_spec(40, 10);
        let a = Layout::new([(11, 10_000.0), (53, 6_000.0)]).unwrap();
        let b = Layout::new([(27, 14_000.0), (88, 10_000.0)]).unwrap();
        let both = Layout::new([
            (11, 10_000.0),
            (53, 6_000.0),
            (27, 14_000.0),
            (88, 10_000.0),
        ])
        .unwrap();
        let fa = solve_temperature(&a, &spec, 1e-11).unwrap();
        let fb = solve_temperature(&b, &spec, 1e-11).unwrap();
        let fab = solve_temperature(&both, &spec, 1e-11).unwrap();
        for ((ta, tb), tab) in fa.values().iter().zip(fb.values()).zip(fab.values()) {
            let lhs = tab - 298.0;
            let rhs = (ta - 298.0) + (tb - 298.0);
            assert!((lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn raising_one_intensity_never_cools_any_node() {
        let spec = small_spec(40, 10);
        let before = Layout::new([(30, 10_000.0), (71, 10_000.0)]).unwrap();
        let after = Layout::new([(30, 15_000.0), (71, 10_000.0)]).unwrap();
        let solver = ThermalSolver::new(&spec, 1e-10).unwrap();
        let fb = solver.solve(&before).unwrap();
        let fa = solver.solve(&after).unwrap();
        for (b, a) in fb.values().iter().zip(fa.values()) {
            assert!(a + 1e-8 >= *b);
        }
    }

    #[test]
    fn maximum_principle_holds() {
        let spec = small_spec(40, 10);
        let layout = Layout::new([(64, 12_000.0)]).unwrap();
        let field = solve_temperature(&layout, &spec, 1e-9).unwrap();
        assert!(field.values().iter().all(|&t| t >= 298.0 - 1e-9));
        for p in spec.sink_nodes() {
            assert_eq!(field.values()[p], 298.0);
        }
    }

    #[test]
    fn reflected_layout_gives_reflected_field() {
        // West sink centered at L/2; reflect rows (north-south flip).
        let spec = small_spec(40, 10);
        assert_eq!(spec.sink_edge, SinkEdge::West);
        let layout = Layout::new([(14, 10_000.0), (38, 10_000.0)]).unwrap();
        let reflect_cell = |cell: u32| -> u32 {
            let idx = cell - 1;
            let (r, c) = (idx / 10, idx % 10);
            (9 - r) * 10 + c + 1
        };
        let mirrored =
            Layout::new(layout.sources().iter().map(|s| (reflect_cell(s.cell), s.intensity)))
                .unwrap();
        let solver = ThermalSolver::new(&spec, 1e-10).unwrap();
        let f = solver.solve(&layout).unwrap();
        let g = solver.solve(&mirrored).unwrap();
        let n = spec.fine_resolution;
        for i in 0..n {
            for j in 0..n {
                let a = f.get(i, j);
                let b = g.get(n - 1 - i, j);
                assert!((a - b).abs() <= 1e-7, "mismatch at ({i},{j})");
            }
        }
    }

    #[test]
    fn refinement_shrinks_the_discretization_gap() {
        let layout = Layout::new([(23, 10_000.0), (67, 10_000.0), (95, 10_000.0)]).unwrap();
        let tmax = |n: usize| {
            let spec = small_spec(n, 10);
            ThermalSolver::new(&spec, 1e-10)
                .unwrap()
                .solve(&layout)
                .unwrap()
                .max()
        };
        let t40 = tmax(40);
        let t80 = tmax(80);
        let t160 = tmax(160);
        let gap_coarse = (t80 - t40).abs();
        let gap_fine = (t160 - t80).abs();
        assert!(
            gap_fine < gap_coarse,
            "refinement gap grew: {gap_coarse:.4e} -> {gap_fine:.4e}"
        );
    }

    #[test]
    fn missing_sink_is_a_singular_system() {
        let mut spec = small_spec(40, 10);
        spec.sink_width_m = 1e-6;
        spec.sink_center_fraction = 0.5 + 0.4 / 39.0;
        let err = solve_temperature(&Layout::empty(), &spec, 1e-8).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn sink_on_each_edge_pins_t0_there() {
        for edge in [SinkEdge::North, SinkEdge::South, SinkEdge::East, SinkEdge::West] {
            let spec = DomainSpec {
                sink_edge: edge,
                ..small_spec(40, 10)
            };
            let layout = Layout::new([(45, 10_000.0)]).unwrap();
            let field = solve_temperature(&layout, &spec, 1e-9).unwrap();
            for p in spec.sink_nodes() {
                assert_eq!(field.values()[p], 298.0);
            }
            assert!(field.max() > 298.0);
        }
    }
}
