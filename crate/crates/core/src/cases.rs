//! Benchmark problems: the isentropic vortex, the double Mach reflection and
//! the steady shock reflection on a plate.

use core::f64::consts::PI;

use crate::gas::{Conserved, GasModel, Primitive};
use crate::grid::{BoundaryCondition, BoundarySpec, CartesianGrid, CellField};
use crate::Result;

/// Vortex strength used by the isentropic vortex case.
pub const VORTEX_STRENGTH: f64 = 5.0;

/// Half-width of the periodic vortex domain `[-5, 5]^2`.
const VORTEX_HALF_WIDTH: f64 = 5.0;

/// Sub-samples per direction when averaging discontinuous initial data.
const SUBSAMPLES: usize = 4;

const GAUSS3_NODES: [f64; 3] = [-0.387_298_334_620_741_7, 0.0, 0.387_298_334_620_741_7];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    Vortex,
    DoubleMach,
    ShockReflection,
}

/// Everything needed to start a run of a [`Case`].
#[derive(Debug, Clone)]
pub struct CaseSetup {
    pub grid: CartesianGrid,
    pub field: CellField,
    pub boundary: BoundarySpec,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Vortex, Case::DoubleMach, Case::ShockReflection];

    pub fn name(&self) -> &'static str {
        match self {
            Case::Vortex => "vortex",
            Case::DoubleMach => "dmr",
            Case::ShockReflection => "shockref",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// `(x0, x1, y0, y1)`.
    pub fn domain(&self) -> (f64, f64, f64, f64) {
        match self {
            Case::Vortex => (-VORTEX_HALF_WIDTH, VORTEX_HALF_WIDTH, -VORTEX_HALF_WIDTH, VORTEX_HALF_WIDTH),
            Case::DoubleMach | Case::ShockReflection => (0.0, 4.0, 0.0, 1.0),
        }
    }

    pub fn default_grid(&self) -> (usize, usize) {
        match self {
            Case::Vortex => (100, 100),
            Case::DoubleMach => (480, 120),
            Case::ShockReflection => (200, 50),
        }
    }

    pub fn default_t_end(&self) -> f64 {
        match self {
            Case::Vortex => 2.0,
            Case::DoubleMach => 0.28,
            Case::ShockReflection => 15.0,
        }
    }

    pub fn grid(&self, nx: usize, ny: usize) -> Result<CartesianGrid> {
        let (x0, x1, y0, y1) = self.domain();
        CartesianGrid::new(x0, x1, y0, y1, nx, ny)
    }

    pub fn setup(&self, nx: usize, ny: usize, gas: &GasModel) -> Result<CaseSetup> {
        let grid = self.grid(nx, ny)?;
        let (field, boundary) = match self {
            Case::Vortex => (init_vortex(&grid, gas), BoundarySpec::periodic()),
            Case::DoubleMach => init_dmr(&grid, gas),
            Case::ShockReflection => init_shock_reflection(&grid, gas),
        };
        Ok(CaseSetup { grid, field, boundary })
    }
}

/// Average of `f` over cell `(i, j)` with the 3x3 Gauss-Legendre rule.
pub fn gauss_average(grid: &CartesianGrid, i: isize, j: isize, f: impl Fn(f64, f64) -> Conserved) -> Conserved {
    let (xc, yc) = grid.center(i, j);
    let mut sum = [0.0; 4];
    for (a, wa) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
        for (b, wb) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
            let q = f(xc + a * grid.dx, yc + b * grid.dy);
            for k in 0..4 {
                sum[k] += wa * wb * q[k];
            }
        }
    }
    Conserved(sum)
}

/// Average of `f` over cell `(i, j)` from a uniform `4 x 4` sub-sampling.
pub fn subsampled_average(grid: &CartesianGrid, i: isize, j: isize, f: impl Fn(f64, f64) -> Conserved) -> Conserved {
    let (xc, yc) = grid.center(i, j);
    let n = SUBSAMPLES as f64;
    let mut sum = [0.0; 4];
    for a in 0..SUBSAMPLES {
        for b in 0..SUBSAMPLES {
            let x = xc + ((a as f64 + 0.5) / n - 0.5) * grid.dx;
            let y = yc + ((b as f64 + 0.5) / n - 0.5) * grid.dy;
            let q = f(x, y);
            for k in 0..4 {
                sum[k] += q[k];
            }
        }
    }
    Conserved(sum.map(|s| s / (n * n)))
}

/// Mean flow `(1, 1, 1, 1)` plus an isentropic vortex centred at the origin.
pub fn vortex_profile(x: f64, y: f64, gas: &GasModel) -> Primitive {
    let g = gas.gamma();
    let psi = VORTEX_STRENGTH;
    let r2 = x * x + y * y;
    let swirl = psi / (2.0 * PI) * libm::exp(0.5 * (1.0 - r2));
    let dt = -(g - 1.0) * psi * psi / (8.0 * g * PI * PI) * libm::exp(1.0 - r2);
    let temp = 1.0 + dt;
    // Unit entropy: p = rho^gamma and T = p / rho.
    let rho = libm::pow(temp, 1.0 / (g - 1.0));
    Primitive::new(rho, 1.0 - swirl * y, 1.0 + swirl * x, rho * temp)
}

fn wrap_vortex(s: f64) -> f64 {
    let w = 2.0 * VORTEX_HALF_WIDTH;
    s - w * libm::floor((s + VORTEX_HALF_WIDTH) / w)
}

/// Exact vortex solution: the initial profile advected with the mean velocity
/// `(1, 1)` on the periodic domain.
pub fn vortex_exact(x: f64, y: f64, t: f64, gas: &GasModel) -> Primitive {
    vortex_profile(wrap_vortex(x - t), wrap_vortex(y - t), gas)
}

pub fn init_vortex(grid: &CartesianGrid, gas: &GasModel) -> CellField {
    CellField::from_fn(grid, |i, j| {
        gauss_average(grid, i as isize, j as isize, |x, y| {
            gas.conserved_from_primitive(&vortex_profile(x, y, gas))
        })
    })
}

/// Density error norms against exact cell averages.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub l1: f64,
    pub linf: f64,
}

/// `L1 = mean |rho - rho_exact|`, `Linf = max |rho - rho_exact|` over the
/// interior, with exact averages from 3x3 Gauss quadrature of `exact`.
pub fn error_norms(field: &CellField, exact: impl Fn(f64, f64) -> Conserved) -> ErrorReport {
    let grid = *field.grid();
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for (i, j, q) in field.interior() {
        let reference = gauss_average(&grid, i as isize, j as isize, &exact);
        let e = libm::fabs(q[0] - reference[0]);
        sum += e;
        max = max.max(e);
    }
    ErrorReport {
        l1: sum / grid.cell_count() as f64,
        linf: max,
    }
}

pub fn vortex_errors(field: &CellField, t: f64, gas: &GasModel) -> ErrorReport {
    error_norms(field, |x, y| gas.conserved_from_primitive(&vortex_exact(x, y, t, gas)))
}

/// Observed order between errors on grids with `n_coarse` and `n_fine` cells per side.
pub fn convergence_order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    libm::log(e_coarse / e_fine) / libm::log(n_fine as f64 / n_coarse as f64)
}

/// Where the incident ramp shock meets the wall at `t = 0`.
pub const DMR_X_CORNER: f64 = 1.0 / 6.0;
pub const DMR_SHOCK_SPEED: f64 = 10.0;

pub fn dmr_pre_shock() -> Primitive {
    Primitive::new(1.4, 0.0, 0.0, 1.0)
}

pub fn dmr_post_shock() -> Primitive {
    let (s, c) = libm::sincos(PI / 3.0);
    Primitive::new(8.0, 8.25 * s, -8.25 * c, 116.5)
}

pub fn init_dmr(grid: &CartesianGrid, gas: &GasModel) -> (CellField, BoundarySpec) {
    let pre = gas.conserved_from_primitive(&dmr_pre_shock());
    let post = gas.conserved_from_primitive(&dmr_post_shock());
    let state = |x: f64, y: f64| {
        if x > DMR_X_CORNER + y / libm::sqrt(3.0) {
            pre
        } else {
            post
        }
    };
    let field = CellField::from_fn(grid, |i, j| subsampled_average(grid, i as isize, j as isize, state));
    let bc = BoundarySpec {
        west: BoundaryCondition::Dirichlet(post),
        east: BoundaryCondition::Outflow,
        south: BoundaryCondition::DmrBottom { x_corner: DMR_X_CORNER },
        north: BoundaryCondition::DmrTop {
            x_corner: DMR_X_CORNER,
            shock_speed: DMR_SHOCK_SPEED,
            pre,
            post,
        },
    };
    (field, bc)
}

pub fn shockref_inflow(gas: &GasModel) -> Primitive {
    Primitive::new(1.0, 2.9, 0.0, 1.0 / gas.gamma())
}

pub fn shockref_top() -> Primitive {
    Primitive::new(1.69997, 2.61934, -0.50632, 1.52819)
}

pub fn init_shock_reflection(grid: &CartesianGrid, gas: &GasModel) -> (CellField, BoundarySpec) {
    let inflow = gas.conserved_from_primitive(&shockref_inflow(gas));
    let top = gas.conserved_from_primitive(&shockref_top());
    let field = CellField::uniform(grid, inflow);
    let bc = BoundarySpec {
        west: BoundaryCondition::Dirichlet(inflow),
        east: BoundaryCondition::Outflow,
        south: BoundaryCondition::Reflective,
        north: BoundaryCondition::Dirichlet(top),
    };
    (field, bc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn names_round_trip() {
        for c in Case::ALL {
            assert_eq!(Case::from_name(c.name()), Some(c));
        }
        assert_eq!(Case::from_name("sod"), None);
    }

    #[test]
    fn vortex_far_field_and_center() {
        let g = gas();
        let w = vortex_profile(5.0, 5.0, &g);
        for (a, b) in [(w.rho, 1.0), (w.u, 1.0), (w.v, 1.0), (w.p, 1.0)] {
            assert!((a - b).abs() < 1e-9);
        }
        let c = vortex_profile(0.0, 0.0, &g);
        // T = 1 - (gamma-1) psi^2 e / (8 gamma pi^2).
        let t = 1.0 - 0.4 * 25.0 * core::f64::consts::E / (8.0 * 1.4 * PI * PI);
        assert!((c.temperature() - t).abs() < 1e-14);
        assert!((t - 0.754_089_7).abs() < 1e-7);
        assert!((c.rho - libm::pow(t, 2.5)).abs() < 1e-15);
        assert!((c.rho - 0.493_807).abs() < 1e-6);
        assert_eq!((c.u, c.v), (1.0, 1.0));
    }

    #[test]
    fn vortex_is_isentropic() {
        let g = gas();
        for k in 0..200 {
            let x = -5.0 + 0.05 * k as f64;
            let y = 3.0 - 0.037 * k as f64;
            let w = vortex_profile(x, y, &g);
            assert!((w.p / libm::pow(w.rho, 1.4) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn vortex_exact_moves_with_mean_flow() {
        let g = gas();
        for (x, y) in [(0.3, -1.2), (4.9, 4.9), (-4.2, 2.0)] {
            assert_eq!(vortex_exact(x, y, 0.0, &g), vortex_profile(x, y, &g));
            let a = vortex_exact(x, y, 10.0, &g);
            let b = vortex_profile(x, y, &g);
            assert!((a.rho - b.rho).abs() < 1e-12 && (a.u - b.u).abs() < 1e-12);
        }
        assert_eq!(vortex_exact(2.0, 2.0, 2.0, &g), vortex_profile(0.0, 0.0, &g));
    }

    #[test]
    fn error_norm_examples() {
        let g = gas();
        let grid = Case::Vortex.grid(10, 10).unwrap();
        let mut field = init_vortex(&grid, &g);
        let r = vortex_errors(&field, 0.0, &g);
        assert_eq!(r, ErrorReport { l1: 0.0, linf: 0.0 });
        let mut q = field.get(3, 4);
        q[0] += 0.01;
        field.set(3, 4, q);
        let r = vortex_errors(&field, 0.0, &g);
        assert!((r.l1 - 0.01 / 100.0).abs() < 1e-15);
        assert!((r.linf - 0.01).abs() < 1e-15);
    }

    #[test]
    fn order_of_halving() {
        assert!((convergence_order(8.0, 1.0, 50, 100) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn dmr_initial_states() {
        let g = gas();
        let grid = Case::DoubleMach.grid(80, 20).unwrap();
        let (field, bc) = init_dmr(&grid, &g);
        bc.validate().unwrap();
        // Cell centred at (3.025, 0.525) lies ahead of the shock.
        let pre = g.primitive_from_conserved(&field.get(60, 10)).unwrap();
        assert!((pre.rho - 1.4).abs() < 1e-14);
        assert_eq!((pre.u, pre.v), (0.0, 0.0));
        assert!((pre.p - 1.0).abs() < 1e-14);
        // Cell centred at (0.025, 0.075) is behind it.
        let post = g.primitive_from_conserved(&field.get(0, 1)).unwrap();
        assert!((post.u - 8.25 * libm::sqrt(3.0) / 2.0).abs() < 1e-13);
        assert!((post.v + 8.25 / 2.0).abs() < 1e-13);
        assert!((post.rho - 8.0).abs() < 1e-13);
    }

    #[test]
    fn dmr_mixed_cells_hug_the_shock() {
        let g = gas();
        let grid = Case::DoubleMach.grid(80, 20).unwrap();
        let (field, _) = init_dmr(&grid, &g);
        for (i, j, q) in field.interior() {
            let mixed = (q[0] - 1.4).abs() > 1e-12 && (q[0] - 8.0).abs() > 1e-12;
            let (x, y) = grid.center(i as isize, j as isize);
            // Horizontal distance to the line, converted to normal distance.
            let dist = (x - DMR_X_CORNER - y / libm::sqrt(3.0)).abs() * libm::sqrt(3.0) / 2.0;
            if mixed {
                assert!(dist < grid.dx, "cell ({i}, {j})");
            }
        }
    }

    #[test]
    fn shockref_states() {
        let g = gas();
        let grid = Case::ShockReflection.grid(40, 10).unwrap();
        let (field, bc) = init_shock_reflection(&grid, &g);
        let w = g.primitive_from_conserved(&field.get(7, 3)).unwrap();
        assert!((w.rho - 1.0).abs() < 1e-15 && (w.u - 2.9).abs() < 1e-15);
        assert!((w.p - 1.0 / 1.4).abs() < 1e-15);
        match bc.north {
            BoundaryCondition::Dirichlet(q) => {
                let t = g.primitive_from_conserved(&q).unwrap();
                assert!((t.rho - 1.69997).abs() < 1e-14);
                assert!((t.u - 2.61934).abs() < 1e-14);
                assert!((t.v + 0.50632).abs() < 1e-14);
                assert!((t.p - 1.52819).abs() < 1e-13);
            }
            other => panic!("unexpected top boundary {other:?}"),
        }
        assert_eq!(bc.south, BoundaryCondition::Reflective);
    }
}
