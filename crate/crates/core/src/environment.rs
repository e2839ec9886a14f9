//! The ward grid: a walled 30x30 lattice with 72 high-touch and 72
//! low-touch surface cells laid out mirror-symmetrically.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const GRID_WIDTH: usize = 30;
pub const GRID_HEIGHT: usize = 30;

/// Rows holding a surface in every surface column.
pub const SURFACE_ROWS: [usize; 12] = [3, 5, 7, 9, 11, 13, 16, 18, 20, 22, 24, 26];
/// High-touch columns; low-touch columns are their mirror images.
pub const HIGH_TOUCH_COLUMNS: [usize; 6] = [3, 5, 7, 9, 11, 13];

pub const SURFACES_PER_KIND: usize = SURFACE_ROWS.len() * HIGH_TOUCH_COLUMNS.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    pub fn chebyshev(self, other: Cell) -> usize {
        self.row.abs_diff(other.row).max(self.col.abs_diff(other.col))
    }

    pub fn mirrored(self) -> Cell {
        Cell::new(self.row, GRID_WIDTH - 1 - self.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceKind {
    HighTouch,
    LowTouch,
}

impl SurfaceKind {
    pub const BOTH: [SurfaceKind; 2] = [SurfaceKind::HighTouch, SurfaceKind::LowTouch];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Floor,
    Wall,
    /// Index into [`Grid::surfaces`].
    Surface(SurfaceKind, usize),
}

impl CellKind {
    pub fn is_walkable(self) -> bool {
        !matches!(self, CellKind::Wall)
    }

    pub fn glyph(self) -> char {
        match self {
            CellKind::Floor => '.',
            CellKind::Wall => '#',
            CellKind::Surface(SurfaceKind::HighTouch, _) => 'H',
            CellKind::Surface(SurfaceKind::LowTouch, _) => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub position: Cell,
    pub contamination: f64,
}

#[derive(Debug, Clone)]
pub struct Grid {
    cells: Vec<CellKind>,
    surfaces: Vec<Surface>,
    walkable: Vec<Cell>,
    by_kind: [Vec<usize>; 2],
}

impl Grid {
    /// Builds the canonical ward: a one-cell wall ring, high-touch surfaces
    /// on the left half and their low-touch mirrors on the right, all clean.
    pub fn generate_layout() -> Grid {
        let mut cells = vec![CellKind::Floor; GRID_WIDTH * GRID_HEIGHT];
        for row in 0..GRID_HEIGHT {
            for col in 0..GRID_WIDTH {
                if row == 0 || col == 0 || row == GRID_HEIGHT - 1 || col == GRID_WIDTH - 1 {
                    cells[row * GRID_WIDTH + col] = CellKind::Wall;
                }
            }
        }

        let mut surfaces = Vec::with_capacity(2 * SURFACES_PER_KIND);
        for &row in &SURFACE_ROWS {
            for &col in &HIGH_TOUCH_COLUMNS {
                let ht = Cell::new(row, col);
                surfaces.push(Surface {
                    kind: SurfaceKind::HighTouch,
                    position: ht,
                    contamination: 0.0,
                });
                surfaces.push(Surface {
                    kind: SurfaceKind::LowTouch,
                    position: ht.mirrored(),
                    contamination: 0.0,
                });
            }
        }
        // Row-major surface order makes indices independent of construction order.
        surfaces.sort_by_key(|s| s.position);

        let mut by_kind = [Vec::new(), Vec::new()];
        for (idx, s) in surfaces.iter().enumerate() {
            cells[s.position.row * GRID_WIDTH + s.position.col] = CellKind::Surface(s.kind, idx);
            by_kind[kind_slot(s.kind)].push(idx);
        }

        let walkable = (0..GRID_HEIGHT)
            .flat_map(|r| (0..GRID_WIDTH).map(move |c| Cell::new(r, c)))
            .filter(|c| cells[c.row * GRID_WIDTH + c.col].is_walkable())
            .collect();

        Grid {
            cells,
            surfaces,
            walkable,
            by_kind,
        }
    }

    pub fn width(&self) -> usize {
        GRID_WIDTH
    }

    pub fn height(&self) -> usize {
        GRID_HEIGHT
    }

    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < GRID_HEIGHT && (col as usize) < GRID_WIDTH
    }

    pub fn kind(&self, cell: Cell) -> CellKind {
        self.cells[cell.row * GRID_WIDTH + cell.col]
    }

    pub fn is_walkable(&self, cell: Cell) -> bool {
        cell.row < GRID_HEIGHT && cell.col < GRID_WIDTH && self.kind(cell).is_walkable()
    }

    /// Every walkable cell in row-major order.
    pub fn walkable_cells(&self) -> &[Cell] {
        &self.walkable
    }

    /// Walkable Moore neighbours of `cell` in row-major order.
    pub fn walkable_neighbors(&self, cell: Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(8);
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, c) = (cell.row as isize + dr, cell.col as isize + dc);
                if !self.in_bounds(r, c) {
                    continue;
                }
                let n = Cell::new(r as usize, c as usize);
                if self.kind(n).is_walkable() {
                    out.push(n);
                }
            }
        }
        out
    }

    pub fn surface_index_at(&self, cell: Cell) -> Option<usize> {
        match self.kind(cell) {
            CellKind::Surface(_, idx) => Some(idx),
            _ => None,
        }
    }

    pub fn surface_at(&self, cell: Cell) -> Option<&Surface> {
        self.surface_index_at(cell).map(|i| &self.surfaces[i])
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn surface(&self, idx: usize) -> &Surface {
        &self.surfaces[idx]
    }

    pub fn surface_mut(&mut self, idx: usize) -> &mut Surface {
        &mut self.surfaces[idx]
    }

    /// Indices of every surface of `kind`, ascending.
    pub fn surfaces_of(&self, kind: SurfaceKind) -> &[usize] {
        &self.by_kind[kind_slot(kind)]
    }

    pub fn total_contamination(&self, kind: SurfaceKind) -> f64 {
        self.surfaces_of(kind)
            .iter()
            .map(|&i| self.surfaces[i].contamination)
            .sum()
    }

    /// Plain-text dump: one glyph per cell, one line per row.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((GRID_WIDTH + 1) * GRID_HEIGHT);
        for row in 0..GRID_HEIGHT {
            for col in 0..GRID_WIDTH {
                out.push(self.kind(Cell::new(row, col)).glyph());
            }
            out.push('\n');
        }
        out
    }
}

fn kind_slot(kind: SurfaceKind) -> usize {
    match kind {
        SurfaceKind::HighTouch => 0,
        SurfaceKind::LowTouch => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_counts() {
        let g = Grid::generate_layout();
        assert_eq!(g.surfaces().len(), 144);
        assert_eq!(g.surfaces_of(SurfaceKind::HighTouch).len(), 72);
        assert_eq!(g.surfaces_of(SurfaceKind::LowTouch).len(), 72);
        assert!(g.surfaces().iter().all(|s| s.contamination == 0.0));
    }

    #[test]
    fn borders_are_walls() {
        let g = Grid::generate_layout();
        for i in 0..30 {
            for c in [Cell::new(0, i), Cell::new(29, i), Cell::new(i, 0), Cell::new(i, 29)] {
                assert_eq!(g.kind(c), CellKind::Wall, "{c}");
            }
        }
        assert_eq!(g.walkable_cells().len(), 28 * 28);
    }

    #[test]
    fn neighbours() {
        let g = Grid::generate_layout();
        assert_eq!(g.walkable_neighbors(Cell::new(10, 10)).len(), 8);
        assert_eq!(
            g.walkable_neighbors(Cell::new(1, 1)),
            vec![Cell::new(1, 2), Cell::new(2, 1), Cell::new(2, 2)]
        );
        assert_eq!(g.walkable_neighbors(Cell::new(1, 10)).len(), 5);
    }

    #[test]
    fn surface_lookup() {
        let g = Grid::generate_layout();
        assert_eq!(g.surface_at(Cell::new(3, 3)).unwrap().kind, SurfaceKind::HighTouch);
        assert_eq!(g.surface_at(Cell::new(3, 26)).unwrap().kind, SurfaceKind::LowTouch);
        assert!(g.surface_at(Cell::new(2, 2)).is_none());
        assert!(g.surface_at(Cell::new(0, 0)).is_none());
    }
}
