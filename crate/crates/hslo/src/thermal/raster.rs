use crate::error::Result;
use crate::thermal::domain::{DomainSpec, Layout};
use crate::thermal::field::IntensityField;

/// Expands a layout into the per-node intensity distribution.
///
/// Cell `(r, c)` (0-based, row-major, `cell_index = r*C + c + 1`) covers the
/// fine-node block rows `[r*N/C, (r+1)*N/C)` and the analogous columns; every
/// node in the block gets the source intensity, all other nodes zero.
pub fn rasterize_intensity(layout: &Layout, spec: &DomainSpec) -> Result<IntensityField> {
    spec.validate()?;
    layout.validate_against(spec)?;
    let n = spec.fine_resolution;
    let c = spec.cell_partition;
    let block = spec.nodes_per_cell();
    let mut field = IntensityField::zeros(n, n);
    for source in layout.sources() {
        let idx = (source.cell - 1) as usize;
        let (cell_row, cell_col) = (idx / c, idx % c);
        for i in cell_row * block..(cell_row + 1) * block {
            let base = i * n + cell_col * block;
            for v in &mut field.values_mut()[base..base + block] {
                *v = source.intensity;
            }
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use crate::error::Error;
    use crate::thermal::domain::REFERENCE_INTENSITY;

    use super::*;

    #[test]
    fn empty_layout_rasterizes_to_zero() {
        let spec = DomainSpec::default();
        let field = rasterize_intensity(&Layout::empty(), &spec).unwrap();
        assert!(field.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_source_fills_exactly_its_block() {
        // Cell 1 covers rows 0..20, cols 0..20 on the default 200-grid:
        // 400 nodes, and 0.01 m * 0.01 m * 10 kW/m² = 1 W of total power.
        let spec = DomainSpec::default();
        let layout = Layout::new([(1, REFERENCE_INTENSITY)]).unwrap();
        let field = rasterize_intensity(&layout, &spec).unwrap();
        let mut nonzero = 0;
        for i in 0..200 {
            for j in 0..200 {
                let v = field.get(i, j);
                if i < 20 && j < 20 {
                    assert_eq!(v, REFERENCE_INTENSITY);
                    nonzero += 1;
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
        assert_eq!(nonzero, 400);
        let power = spec.source_side_m * spec.source_side_m * REFERENCE_INTENSITY;
        assert!((power - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nineteen_sources_fill_nineteen_blocks() {
        let cells = [3, 4, 5, 9, 15, 16, 17, 59, 61, 64, 66, 70, 72, 78, 84, 89, 91, 94, 100];
        let spec = DomainSpec::default();
        let layout =
            Layout::new(cells.iter().map(|&c| (c, REFERENCE_INTENSITY))).unwrap();
        let field = rasterize_intensity(&layout, &spec).unwrap();
        let nonzero = field.values().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(nonzero, 19 * 400);
    }

    #[test]
    fn out_of_range_cell_is_rejected() {
        let spec = DomainSpec::default();
        let layout = Layout::new([(101, 1.0)]).unwrap();
        assert!(matches!(
            rasterize_intensity(&layout, &spec),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn block_placement_follows_row_major_cells() {
        let spec = DomainSpec {
            fine_resolution: 40,
            cell_partition: 4,
            source_side_m: 0.025,
            ..DomainSpec::default()
        };
        // Cell 6 is (r=1, c=1): rows 10..20, cols 10..20.
        let layout = Layout::new([(6, 5.0)]).unwrap();
        let field = rasterize_intensity(&layout, &spec).unwrap();
        assert_eq!(field.get(10, 10), 5.0);
        assert_eq!(field.get(19, 19), 5.0);
        assert_eq!(field.get(9, 10), 0.0);
        assert_eq!(field.get(10, 9), 0.0);
        assert_eq!(field.get(20, 10), 0.0);
    }
}
