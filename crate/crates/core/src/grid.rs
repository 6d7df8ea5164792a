//! Cartesian mesh, ghost-framed cell storage, boundary conditions, and the
//! gradient-aligned decomposition direction.

use alloc::vec;
use alloc::vec::Vec;

use crate::gas::Conserved;
use crate::{Error, Result};

/// Ghost layers around the interior.
///
/// The reconstruction stencil spans two cells on each side, and the first
/// ghost layer is itself reconstructed to supply boundary-face traces, so
/// three layers are needed.
pub const GHOST: usize = 3;

/// Offset added to both gradient components before normalising, so that a
/// vanishing gradient still yields a unit direction.
pub const DIRECTION_EPSILON: f64 = 1e-40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub ghost: usize,
}

impl CartesianGrid {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell per direction"));
        }
        if !(x1 > x0 && y1 > y0) || !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite and increasing"));
        }
        Ok(Self {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
            ghost: GHOST,
        })
    }

    /// Padded extent in x, ghosts included.
    pub fn padded_nx(&self) -> usize {
        self.nx + 2 * self.ghost
    }

    pub fn padded_ny(&self) -> usize {
        self.ny + 2 * self.ghost
    }

    pub fn padded_len(&self) -> usize {
        self.padded_nx() * self.padded_ny()
    }

    /// Storage index of cell `(i, j)`; interior cells run over `0..nx`, `0..ny`.
    #[inline]
    pub fn index(&self, i: isize, j: isize) -> usize {
        let g = self.ghost as isize;
        debug_assert!(i >= -g && i < self.nx as isize + g);
        debug_assert!(j >= -g && j < self.ny as isize + g);
        (j + g) as usize * self.padded_nx() + (i + g) as usize
    }

    pub fn center(&self, i: isize, j: isize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.dx,
            self.y0 + (j as f64 + 0.5) * self.dy,
        )
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Cell averages over the padded grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    grid: CartesianGrid,
    data: Vec<Conserved>,
}

impl CellField {
    pub fn uniform(grid: &CartesianGrid, value: Conserved) -> Self {
        Self {
            grid: *grid,
            data: vec![value; grid.padded_len()],
        }
    }

    /// Interior cells from `f(i, j)`; ghosts are copies of the nearest
    /// interior cell until the first [`fill_ghosts`].
    pub fn from_fn(grid: &CartesianGrid, mut f: impl FnMut(usize, usize) -> Conserved) -> Self {
        let mut field = Self::uniform(grid, Conserved::default());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                field.data[grid.index(i as isize, j as isize)] = f(i, j);
            }
        }
        let (nx, ny, g) = (grid.nx as isize, grid.ny as isize, grid.ghost as isize);
        for j in -g..ny + g {
            for i in -g..nx + g {
                let src = grid.index(i.clamp(0, nx - 1), j.clamp(0, ny - 1));
                field.data[grid.index(i, j)] = field.data[src];
            }
        }
        field
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> Conserved {
        self.data[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, q: Conserved) {
        let k = self.grid.index(i, j);
        self.data[k] = q;
    }

    pub fn as_slice(&self) -> &[Conserved] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Conserved] {
        &mut self.data
    }

    /// Interior cells in row-major order (x fastest).
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, Conserved)> + '_ {
        let g = self.grid;
        (0..g.ny).flat_map(move |j| (0..g.nx).map(move |i| (i, j, self.get(i as isize, j as isize))))
    }

    /// Sum of `U * area` over the interior, per component.
    pub fn total(&self) -> [f64; 4] {
        let area = self.grid.cell_area();
        let mut sum = [0.0; 4];
        for (_, _, q) in self.interior() {
            for k in 0..4 {
                sum[k] += q[k] * area;
            }
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    /// Mirror image with the wall-normal momentum negated.
    Reflective,
    /// Zero-order extrapolation of the nearest interior cell.
    Outflow,
    Dirichlet(Conserved),
    /// Top boundary of the double Mach reflection: post-shock state behind
    /// the exact position of a 60-degree shock that starts at `(x_corner, 0)`
    /// and moves with normal speed `shock_speed`, pre-shock state ahead of it.
    DmrTop {
        x_corner: f64,
        shock_speed: f64,
        pre: Conserved,
        post: Conserved,
    },
    /// Bottom boundary of the double Mach reflection: outflow for
    /// `x <= x_corner`, reflective wall beyond.
    DmrBottom { x_corner: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub west: BoundaryCondition,
    pub east: BoundaryCondition,
    pub south: BoundaryCondition,
    pub north: BoundaryCondition,
}

impl BoundarySpec {
    pub fn periodic() -> Self {
        Self::all(BoundaryCondition::Periodic)
    }

    pub fn all(bc: BoundaryCondition) -> Self {
        Self {
            west: bc,
            east: bc,
            south: bc,
            north: bc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use BoundaryCondition::*;
        let periodic = |b: &BoundaryCondition| matches!(b, Periodic);
        if periodic(&self.west) != periodic(&self.east) {
            return Err(Error::InvalidSpec("periodic west/east must be paired"));
        }
        if periodic(&self.south) != periodic(&self.north) {
            return Err(Error::InvalidSpec("periodic south/north must be paired"));
        }
        for side in [&self.west, &self.east, &self.south] {
            if matches!(side, DmrTop { .. }) {
                return Err(Error::InvalidSpec("DmrTop is only valid on the north side"));
            }
        }
        for side in [&self.west, &self.east, &self.north] {
            if matches!(side, DmrBottom { .. }) {
                return Err(Error::InvalidSpec("DmrBottom is only valid on the south side"));
            }
        }
        Ok(())
    }
}

/// Shock position at height `y` and time `t` for a 60-degree shock line
/// through `(x_corner, 0)` at `t = 0` moving with normal speed `speed`.
pub fn dmr_shock_x(x_corner: f64, speed: f64, y: f64, t: f64) -> f64 {
    x_corner + (y + 2.0 * speed * t) / libm::sqrt(3.0)
}

#[derive(Clone, Copy)]
enum Side {
    West,
    East,
    South,
    North,
}

/// Populates every ghost cell from the interior according to `spec`.
///
/// West/east ghosts are filled for the interior rows first, then south/north
/// ghosts over the full padded width, so corner ghosts follow the y-boundary
/// rule applied to the x-ghost columns.
pub fn fill_ghosts(field: &mut CellField, spec: &BoundarySpec, t: f64) -> Result<()> {
    spec.validate()?;
    let grid = field.grid;
    let (nx, ny, g) = (grid.nx as isize, grid.ny as isize, grid.ghost as isize);
    for j in 0..ny {
        for k in 1..=g {
            let q = ghost_value(field, &spec.west, Side::West, -k, j, k, t);
            field.set(-k, j, q);
            let q = ghost_value(field, &spec.east, Side::East, nx - 1 + k, j, k, t);
            field.set(nx - 1 + k, j, q);
        }
    }
    for i in -g..nx + g {
        for k in 1..=g {
            let q = ghost_value(field, &spec.south, Side::South, i, -k, k, t);
            field.set(i, -k, q);
            let q = ghost_value(field, &spec.north, Side::North, i, ny - 1 + k, k, t);
            field.set(i, ny - 1 + k, q);
        }
    }
    Ok(())
}

/// Value for ghost cell `(i, j)`, which sits `depth` layers outside `side`.
fn ghost_value(
    field: &CellField,
    bc: &BoundaryCondition,
    side: Side,
    i: isize,
    j: isize,
    depth: isize,
    t: f64,
) -> Conserved {
    let grid = &field.grid;
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let nearest = match side {
        Side::West => (0, j),
        Side::East => (nx - 1, j),
        Side::South => (i, 0),
        Side::North => (i, ny - 1),
    };
    let mirror = match side {
        Side::West => (depth - 1, j),
        Side::East => (nx - depth, j),
        Side::South => (i, depth - 1),
        Side::North => (i, ny - depth),
    };
    let reflect = |(si, sj): (isize, isize)| {
        let mut q = field.get(si, sj);
        match side {
            Side::West | Side::East => q[1] = -q[1],
            Side::South | Side::North => q[2] = -q[2],
        }
        q
    };
    match *bc {
        BoundaryCondition::Periodic => match side {
            Side::West => field.get(nx - depth, j),
            Side::East => field.get(depth - 1, j),
            Side::South => field.get(i, ny - depth),
            Side::North => field.get(i, depth - 1),
        },
        BoundaryCondition::Reflective => reflect(mirror),
        BoundaryCondition::Outflow => field.get(nearest.0, nearest.1),
        BoundaryCondition::Dirichlet(q) => q,
        BoundaryCondition::DmrTop {
            x_corner,
            shock_speed,
            pre,
            post,
        } => {
            let (x, y) = grid.center(i, j);
            if x < dmr_shock_x(x_corner, shock_speed, y, t) {
                post
            } else {
                pre
            }
        }
        BoundaryCondition::DmrBottom { x_corner } => {
            let (x, _) = grid.center(i, j);
            if x <= x_corner {
                field.get(nearest.0, nearest.1)
            } else {
                reflect(mirror)
            }
        }
    }
}

/// Scalar whose gradient sets the rotated decomposition direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientScalar {
    #[default]
    Density,
    TotalEnergy,
}

impl GradientScalar {
    #[inline]
    pub fn of(self, q: &Conserved) -> f64 {
        match self {
            Self::Density => q[0],
            Self::TotalEnergy => q[3],
        }
    }
}

/// Central-difference gradient of a padded scalar array.
///
/// Entries on the outermost ghost layer, where the difference would leave the
/// array, are zero.
pub fn central_gradient(grid: &CartesianGrid, values: &[f64]) -> Vec<[f64; 2]> {
    assert_eq!(values.len(), grid.padded_len());
    let (px, py) = (grid.padded_nx(), grid.padded_ny());
    let mut out = vec![[0.0; 2]; values.len()];
    for j in 1..py - 1 {
        for i in 1..px - 1 {
            let k = j * px + i;
            out[k] = [
                (values[k + 1] - values[k - 1]) / (2.0 * grid.dx),
                (values[k + px] - values[k - px]) / (2.0 * grid.dy),
            ];
        }
    }
    out
}

#[inline]
pub(crate) fn gradient_at(field: &CellField, scalar: GradientScalar, i: isize, j: isize) -> (f64, f64) {
    let grid = &field.grid;
    let s = |a: isize, b: isize| scalar.of(&field.get(a, b));
    (
        (s(i + 1, j) - s(i - 1, j)) / (2.0 * grid.dx),
        (s(i, j + 1) - s(i, j - 1)) / (2.0 * grid.dy),
    )
}

/// Unit vector along `(gx + eps, gy + eps)` with `eps = 1e-40`.
#[inline]
pub fn rcd_direction(gx: f64, gy: f64) -> [f64; 2] {
    let a = gx + DIRECTION_EPSILON;
    let b = gy + DIRECTION_EPSILON;
    let norm = libm::sqrt(a * a + b * b);
    [a / norm, b / norm]
}

/// Per-cell decomposition directions over the padded grid (zero vectors on
/// the outermost ghost layer).
pub fn direction_field(field: &CellField, scalar: GradientScalar) -> Vec<[f64; 2]> {
    let values: Vec<f64> = field.as_slice().iter().map(|q| scalar.of(q)).collect();
    let grid = field.grid;
    let (px, py) = (grid.padded_nx(), grid.padded_ny());
    central_gradient(&grid, &values)
        .into_iter()
        .enumerate()
        .map(|(k, [gx, gy])| {
            let (i, j) = (k % px, k / px);
            if i == 0 || j == 0 || i == px - 1 || j == py - 1 {
                [0.0, 0.0]
            } else {
                rcd_direction(gx, gy)
            }
        })
        .collect()
}
