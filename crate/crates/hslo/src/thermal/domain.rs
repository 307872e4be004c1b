use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Reference intensity `phi0` for the normalized metric, W/m².
///
/// Both benchmark cases normalize by the same 10 kW/m² even when individual
/// sources use other intensities.
pub const REFERENCE_INTENSITY: f64 = 10_000.0;

/// Boundary edge carrying the isothermal sink. All other boundary nodes are
/// adiabatic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinkEdge {
    North,
    South,
    East,
    West,
}

impl fmt::Display for SinkEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SinkEdge::North => "north",
            SinkEdge::South => "south",
            SinkEdge::East => "east",
            SinkEdge::West => "west",
        };
        f.write_str(s)
    }
}

impl FromStr for SinkEdge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "north" => Ok(SinkEdge::North),
            "south" => Ok(SinkEdge::South),
            "east" => Ok(SinkEdge::East),
            "west" => Ok(SinkEdge::West),
            other => Err(Error::Spec(format!("unknown sink edge `{other}`"))),
        }
    }
}

/// Physical and discretization parameters of the layout domain.
///
/// The plate is the square `[0, L]²` with conductivity `k`, discretized on an
/// `N x N` node-centered grid with spacing `h = L / (N - 1)`. Row 0 is the
/// north edge, column 0 the west edge. The domain is partitioned into
/// `C x C` unit cells; each heat source fills exactly one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    /// Side length `L` of the square domain, meters.
    pub side_length_m: f64,
    /// Thermal conductivity `k`, W/(m·K).
    pub conductivity: f64,
    /// Sink temperature `T0`, kelvin.
    pub sink_temperature_k: f64,
    /// Sink width `delta`, meters.
    pub sink_width_m: f64,
    /// Edge carrying the sink.
    pub sink_edge: SinkEdge,
    /// Sink center position along its edge, as a fraction of `L` measured in
    /// the direction of increasing node index.
    pub sink_center_fraction: f64,
    /// Nodes per side of the fine grid, `N`.
    pub fine_resolution: usize,
    /// Unit cells per side, `C`.
    pub cell_partition: usize,
    /// Side length `l` of one heat source, meters. Must equal `L / C`.
    pub source_side_m: f64,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            side_length_m: 0.1,
            conductivity: 1.0,
            sink_temperature_k: 298.0,
            sink_width_m: 0.001,
            sink_edge: SinkEdge::West,
            sink_center_fraction: 0.5,
            fine_resolution: 200,
            cell_partition: 10,
            source_side_m: 0.01,
        }
    }
}

impl DomainSpec {
    /// Checks every spec invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        if !(self.side_length_m > 0.0) {
            return Err(Error::Spec("side length must be positive".into()));
        }
        if !(self.conductivity > 0.0) {
            return Err(Error::Spec("conductivity must be positive".into()));
        }
        if !self.sink_temperature_k.is_finite() {
            return Err(Error::Spec("sink temperature must be finite".into()));
        }
        if !(self.sink_width_m > 0.0) {
            return Err(Error::Spec("sink width must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.sink_center_fraction) {
            return Err(Error::Spec("sink center fraction must lie in [0, 1]".into()));
        }
        if self.cell_partition < 1 {
            return Err(Error::Spec("cell partition must be at least 1".into()));
        }
        if self.fine_resolution < self.cell_partition {
            return Err(Error::Spec(
                "fine resolution must be at least the cell partition".into(),
            ));
        }
        if self.fine_resolution < 2 {
            return Err(Error::Spec("fine resolution must be at least 2".into()));
        }
        if self.fine_resolution % self.cell_partition != 0 {
            return Err(Error::Spec(format!(
                "fine resolution {} not divisible by cell partition {}",
                self.fine_resolution, self.cell_partition
            )));
        }
        let expected_side = self.side_length_m / self.cell_partition as f64;
        if (self.source_side_m - expected_side).abs() > 1e-9 * self.side_length_m {
            return Err(Error::Spec(format!(
                "source side {} must equal L/C = {}",
                self.source_side_m, expected_side
            )));
        }
        if self.sink_nodes().is_empty() {
            return Err(Error::Spec(
                "sink width covers no boundary node; widen the sink or refine the grid".into(),
            ));
        }
        Ok(())
    }

    /// Node spacing `h = L / (N - 1)`.
    pub fn spacing(&self) -> f64 {
        self.side_length_m / (self.fine_resolution - 1) as f64
    }

    /// Total number of unit cells, `C²`.
    pub fn cell_count(&self) -> usize {
        self.cell_partition * self.cell_partition
    }

    /// Fine nodes per cell side, `N / C`.
    pub fn nodes_per_cell(&self) -> usize {
        self.fine_resolution / self.cell_partition
    }

    /// Same domain discretized on a different grid (used by coarse
    /// evaluators). The caller still has to [`validate`](Self::validate).
    pub fn with_resolution(&self, fine_resolution: usize) -> DomainSpec {
        DomainSpec {
            fine_resolution,
            ..self.clone()
        }
    }

    /// Linear node indices (`row * N + col`) held at the sink temperature.
    ///
    /// A boundary node belongs to the sink when its along-edge coordinate is
    /// within `delta / 2` of the sink center. The run is contiguous and, by
    /// [`validate`](Self::validate), nonempty.
    pub fn sink_nodes(&self) -> Vec<usize> {
        let n = self.fine_resolution;
        let h = self.spacing();
        let center = self.sink_center_fraction * self.side_length_m;
        let half = self.sink_width_m / 2.0 + 1e-9 * self.side_length_m;
        let mut nodes = Vec::new();
        for idx in 0..n {
            let coord = idx as f64 * h;
            if (coord - center).abs() <= half {
                let (row, col) = match self.sink_edge {
                    SinkEdge::North => (0, idx),
                    SinkEdge::South => (n - 1, idx),
                    SinkEdge::West => (idx, 0),
                    SinkEdge::East => (idx, n - 1),
                };
                nodes.push(row * n + col);
            }
        }
        nodes
    }
}

/// One placed heat source: a 1-based cell index and a volumetric intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub cell: u32,
    pub intensity: f64,
}

/// A heat source layout: distinct cells with positive intensities.
///
/// The decision vector of the optimization problem. Stored in canonical form
/// (sorted ascending by cell index); equality and hashing act on that form,
/// so two layouts listing the same sources in different orders are equal.
#[derive(Debug, Clone)]
pub struct Layout {
    sources: Vec<Source>,
}

impl Layout {
    /// Builds a layout from `(cell, intensity)` pairs, canonicalizing the
    /// order. Rejects duplicate cells, zero cell indices, and non-positive
    /// or non-finite intensities.
    ///
    /// ```
    /// use hslo::thermal::Layout;
    /// let a = Layout::new([(9, 1.0), (3, 2.0)])?;
    /// let b = Layout::new([(3, 2.0), (9, 1.0)])?;
    /// assert_eq!(a, b);
    /// assert!(Layout::new([(3, 1.0), (3, 1.0)]).is_err());
    /// # Ok::<(), hslo::Error>(())
    /// ```
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut sources: Vec<Source> = entries
            .into_iter()
            .map(|(cell, intensity)| Source { cell, intensity })
            .collect();
        for s in &sources {
            if s.cell == 0 {
                return Err(Error::Layout("cell indices are 1-based; got 0".into()));
            }
            if !(s.intensity > 0.0) || !s.intensity.is_finite() {
                return Err(Error::Layout(format!(
                    "cell {}: intensity must be positive and finite, got {}",
                    s.cell, s.intensity
                )));
            }
        }
        sources.sort_unstable_by_key(|s| s.cell);
        if let Some(w) = sources.windows(2).find(|w| w[0].cell == w[1].cell) {
            return Err(Error::Layout(format!("duplicate cell index {}", w[0].cell)));
        }
        Ok(Layout { sources })
    }

    /// The empty layout (no sources).
    pub fn empty() -> Self {
        Layout { sources: Vec::new() }
    }

    /// Sources in canonical (cell-ascending) order.
    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Cell indices in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = u32> + '_ {
        self.sources.iter().map(|s| s.cell)
    }

    /// Position of `cell` in the canonical order, if occupied.
    pub fn position_of(&self, cell: u32) -> Option<usize> {
        self.sources.binary_search_by_key(&cell, |s| s.cell).ok()
    }

    /// Checks cell indices against the spec's cell grid.
    pub fn validate_against(&self, spec: &DomainSpec) -> Result<()> {
        let max = spec.cell_count() as u32;
        for s in &self.sources {
            if s.cell > max {
                return Err(Error::Layout(format!(
                    "cell index {} out of range 1..={max}",
                    s.cell
                )));
            }
        }
        Ok(())
    }

    /// Copy with the source at canonical position `pos` moved to the empty
    /// cell `new_cell`, keeping its intensity.
    pub(crate) fn with_source_moved(&self, pos: usize, new_cell: u32) -> Layout {
        let mut sources = self.sources.clone();
        sources[pos].cell = new_cell;
        sources.sort_unstable_by_key(|s| s.cell);
        Layout { sources }
    }

    /// Copy with the intensities at canonical positions `a` and `b`
    /// exchanged; the occupied cell set is unchanged.
    pub(crate) fn with_intensities_swapped(&self, a: usize, b: usize) -> Layout {
        let mut sources = self.sources.clone();
        let tmp = sources[a].intensity;
        sources[a].intensity = sources[b].intensity;
        sources[b].intensity = tmp;
        Layout { sources }
    }
}

impl PartialEq for Layout {
    fn eq(&self, other: &Self) -> bool {
        self.sources.len() == other.sources.len()
            && self
                .sources
                .iter()
                .zip(&other.sources)
                .all(|(a, b)| a.cell == b.cell && a.intensity.to_bits() == b.intensity.to_bits())
    }
}

impl Eq for Layout {}

impl Hash for Layout {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for s in &self.sources {
            state.write_u32(s.cell);
            state.write_u64(s.intensity.to_bits());
        }
    }
}

/// How intensities are assigned when sampling random layouts.
#[derive(Debug, Clone, PartialEq)]
pub enum IntensityScheme {
    /// Every source carries the same intensity.
    Uniform { count: usize, intensity: f64 },
    /// Twenty sources, two each at 2000, 4000, ..., 20000 W/m².
    Graded,
}

impl IntensityScheme {
    /// Number of sources a layout under this scheme has.
    pub fn source_count(&self) -> usize {
        match self {
            IntensityScheme::Uniform { count, .. } => *count,
            IntensityScheme::Graded => 20,
        }
    }

    /// The intensity multiset, ascending.
    pub fn intensities(&self) -> Vec<f64> {
        match self {
            IntensityScheme::Uniform { count, intensity } => vec![*intensity; *count],
            IntensityScheme::Graded => (1..=10)
                .flat_map(|i| {
                    let v = 2000.0 * i as f64;
                    [v, v]
                })
                .collect(),
        }
    }

    /// Draws a random layout: `count` distinct cells uniformly without
    /// replacement, then intensities per scheme (the graded multiset is
    /// assigned in a seeded random permutation).
    pub fn sample_layout(&self, spec: &DomainSpec, rng: &mut impl Rng) -> Result<Layout> {
        let cells_total = spec.cell_count();
        let count = self.source_count();
        if count > cells_total {
            return Err(Error::Layout(format!(
                "cannot place {count} sources on {cells_total} cells"
            )));
        }
        let picked = rand::seq::index::sample(rng, cells_total, count);
        let mut intensities = self.intensities();
        if matches!(self, IntensityScheme::Graded) {
            intensities.shuffle(rng);
        }
        Layout::new(
            picked
                .into_iter()
                .map(|i| i as u32 + 1)
                .zip(intensities),
        )
    }
}

impl fmt::Display for IntensityScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntensityScheme::Uniform { count, intensity } => {
                write!(f, "uniform:{count}:{intensity:?}")
            }
            IntensityScheme::Graded => f.write_str("graded"),
        }
    }
}

impl FromStr for IntensityScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "graded" {
            return Ok(IntensityScheme::Graded);
        }
        if let Some(rest) = s.strip_prefix("uniform:") {
            let mut it = rest.splitn(2, ':');
            let count = it
                .next()
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| Error::Format(format!("bad scheme `{s}`")))?;
            let intensity = it
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Format(format!("bad scheme `{s}`")))?;
            if !(intensity > 0.0) || !intensity.is_finite() {
                return Err(Error::Format(format!("bad scheme intensity in `{s}`")));
            }
            return Ok(IntensityScheme::Uniform { count, intensity });
        }
        Err(Error::Format(format!(
            "unknown intensity scheme `{s}` (expected uniform:<count>:<phi> or graded)"
        )))
    }
}
