//! Third-order WENO reconstruction of a quadratic per cell, and the
//! no/standard/rotated characteristic decomposition pipelines around it.
//!
//! The polynomial lives in local coordinates `xi = (x - x_i)/dx`,
//! `eta = (y - y_j)/dy` on the basis `{1, xi, eta, xi^2 - 1/12, eta^2 - 1/12,
//! xi*eta}`, so coefficient 0 is the cell average. The `xi` modes come from
//! three quadratic row stencils, the `eta` modes from three column stencils,
//! and the cross mode from the four 2x2 corner blocks around the cell.

use crate::gas::{mat_vec, Conserved, GasModel, Mat4, Primitive};
use crate::grid::{gradient_at, rcd_direction, CellField, GradientScalar};
use crate::{Error, Result};

/// Gauss point offset `1/(2 sqrt 3)` along a face in local coordinates.
pub const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionSettings {
    pub epsilon: f64,
    /// Exponent applied to `beta + epsilon` in the nonlinear weights.
    pub power: i32,
    /// Linear weights of the left, central and right row/column stencils.
    pub line_weights: [f64; 3],
    /// Linear weights of the corner blocks, in [`Stencil::corners`] order.
    pub cross_weights: [f64; 4],
    /// Pull a cell's face traces toward its mean when one of them has
    /// non-positive density or pressure.
    pub positivity: bool,
}

impl Default for ReconstructionSettings {
    fn default() -> Self {
        Self {
            epsilon: 1e-40,
            power: 2,
            line_weights: [0.1, 0.8, 0.1],
            cross_weights: [0.25; 4],
            positivity: true,
        }
    }
}

impl ReconstructionSettings {
    pub fn validate(&self) -> Result<()> {
        let group_ok = |w: &[f64]| {
            w.iter().all(|&x| x > 0.0 && x.is_finite())
                && libm::fabs(w.iter().sum::<f64>() - 1.0) < 1e-12
        };
        if !group_ok(&self.line_weights) || !group_ok(&self.cross_weights) {
            return Err(Error::InvalidParameter(
                "linear weights must be positive and sum to 1 per group",
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter("epsilon must be positive"));
        }
        if self.power < 1 {
            return Err(Error::InvalidParameter("smoothness power must be >= 1"));
        }
        Ok(())
    }

    #[inline]
    fn nonlinear<const S: usize>(&self, linear: &[f64; S], beta: &[f64; S]) -> [f64; S] {
        let mut alpha = [0.0; S];
        let mut sum = 0.0;
        for s in 0..S {
            let d = beta[s] + self.epsilon;
            let d = if self.power == 2 { d * d } else { libm::pow(d, self.power as f64) };
            alpha[s] = linear[s] / d;
            sum += alpha[s];
        }
        for a in &mut alpha {
            *a /= sum;
        }
        alpha
    }
}

/// How the reconstruction treats the system's coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecompositionMode {
    /// Componentwise on the conserved variables.
    Ncd,
    /// One characteristic decomposition per face-normal direction.
    Scd,
    /// One decomposition along the local gradient direction.
    Rcd,
    /// One decomposition along a fixed angle (radians).
    FixedAngle(f64),
}

impl DecompositionMode {
    /// Eigensystem constructions per reconstructed cell on a Cartesian grid.
    pub fn decompositions_per_cell(&self) -> u64 {
        match self {
            Self::Ncd => 0,
            Self::Scd => 2,
            Self::Rcd | Self::FixedAngle(_) => 1,
        }
    }
}

/// Quadratic in local coordinates with `N` components per coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPolynomial<const N: usize = 4> {
    pub coeffs: [[f64; N]; 6],
}

impl<const N: usize> CellPolynomial<N> {
    pub fn constant(value: [f64; N]) -> Self {
        let mut coeffs = [[0.0; N]; 6];
        coeffs[0] = value;
        Self { coeffs }
    }

    #[inline]
    pub fn evaluate(&self, xi: f64, eta: f64) -> [f64; N] {
        let basis = [
            1.0,
            xi,
            eta,
            xi * xi - 1.0 / 12.0,
            eta * eta - 1.0 / 12.0,
            xi * eta,
        ];
        let mut out = [0.0; N];
        for (b, c) in basis.iter().zip(&self.coeffs) {
            for k in 0..N {
                out[k] += b * c[k];
            }
        }
        out
    }

    pub fn mean(&self) -> [f64; N] {
        self.coeffs[0]
    }
}

impl CellPolynomial<4> {
    fn transformed(&self, m: &Mat4) -> Self {
        let mut coeffs = [[0.0; 4]; 6];
        for (out, c) in coeffs.iter_mut().zip(&self.coeffs) {
            *out = mat_vec(m, c);
        }
        Self { coeffs }
    }
}

/// The 13 cell averages a reconstruction reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil<const N: usize = 4> {
    /// x offsets -2..=2 on the target row.
    pub row: [[f64; N]; 5],
    /// y offsets -2..=2 on the target column.
    pub col: [[f64; N]; 5],
    /// Diagonal neighbours at (1,1), (-1,1), (-1,-1), (1,-1).
    pub corners: [[f64; N]; 4],
}

const CORNER_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
const CORNER_OFFSETS: [(isize, isize); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

impl<const N: usize> Stencil<N> {
    /// Picks the stencil out of a 5x5 window indexed `[x offset + 2][y offset + 2]`.
    pub fn from_window(window: &[[[f64; N]; 5]; 5]) -> Self {
        let mut st = Self {
            row: [[0.0; N]; 5],
            col: [[0.0; N]; 5],
            corners: [[0.0; N]; 4],
        };
        for k in 0..5 {
            st.row[k] = window[k][2];
            st.col[k] = window[2][k];
        }
        for (c, (di, dj)) in st.corners.iter_mut().zip(CORNER_OFFSETS) {
            *c = window[(di + 2) as usize][(dj + 2) as usize];
        }
        st
    }

    pub fn center(&self) -> [f64; N] {
        self.row[2]
    }

    fn map<const M: usize>(&self, f: impl Fn(&[f64; N]) -> [f64; M]) -> Stencil<M> {
        Stencil {
            row: self.row.each_ref().map(&f),
            col: self.col.each_ref().map(&f),
            corners: self.corners.each_ref().map(&f),
        }
    }
}

pub(crate) fn gather(field: &CellField, i: isize, j: isize) -> Stencil<4> {
    let at = |a: isize, b: isize| field.get(a, b).0;
    Stencil {
        row: [at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j)],
        col: [at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1), at(i, j + 2)],
        corners: CORNER_OFFSETS.map(|(di, dj)| at(i + di, j + dj)),
    }
}

/// WENO combination of the three quadratic line stencils; returns the
/// coefficients of `xi` and `xi^2 - 1/12`.
#[inline]
fn line_modes(u: [f64; 5], s: &ReconstructionSettings) -> (f64, f64) {
    let slope = [
        0.5 * (u[0] - 4.0 * u[1] + 3.0 * u[2]),
        0.5 * (u[3] - u[1]),
        0.5 * (-3.0 * u[2] + 4.0 * u[3] - u[4]),
    ];
    let curv = [
        0.5 * (u[0] - 2.0 * u[1] + u[2]),
        0.5 * (u[3] - 2.0 * u[2] + u[1]),
        0.5 * (u[2] - 2.0 * u[3] + u[4]),
    ];
    // Cell integral of the squared first and second derivatives.
    let beta = [0, 1, 2].map(|k| slope[k] * slope[k] + 13.0 / 3.0 * curv[k] * curv[k]);
    let w = s.nonlinear(&s.line_weights, &beta);
    (
        w[0] * slope[0] + w[1] * slope[1] + w[2] * slope[2],
        w[0] * curv[0] + w[1] * curv[1] + w[2] * curv[2],
    )
}

/// WENO combination of the four corner-block estimates of the `xi*eta` mode.
#[inline]
fn cross_mode(center: f64, row: [f64; 5], col: [f64; 5], corners: [f64; 4], s: &ReconstructionSettings) -> f64 {
    let mut est = [0.0; 4];
    let mut beta = [0.0; 4];
    for (k, (sx, sy)) in CORNER_SIGNS.iter().enumerate() {
        let side_x = if *sx > 0.0 { row[3] } else { row[1] };
        let side_y = if *sy > 0.0 { col[3] } else { col[1] };
        let gx = sx * (side_x - center);
        let gy = sy * (side_y - center);
        let e = sx * sy * (corners[k] - side_x - side_y + center);
        est[k] = e;
        // Bilinear interpolant of the block: gx*xi + gy*eta + e*xi*eta.
        beta[k] = gx * gx + gy * gy + 7.0 / 6.0 * e * e;
    }
    let w = s.nonlinear(&s.cross_weights, &beta);
    w[0] * est[0] + w[1] * est[1] + w[2] * est[2] + w[3] * est[3]
}

/// Componentwise WENO reconstruction.
pub fn reconstruct<const N: usize>(st: &Stencil<N>, s: &ReconstructionSettings) -> CellPolynomial<N> {
    let mut coeffs = [[0.0; N]; 6];
    for c in 0..N {
        let row = st.row.map(|v| v[c]);
        let col = st.col.map(|v| v[c]);
        let (ax, bx) = line_modes(row, s);
        let (ay, by) = line_modes(col, s);
        coeffs[0][c] = row[2];
        coeffs[1][c] = ax;
        coeffs[2][c] = ay;
        coeffs[3][c] = bx;
        coeffs[4][c] = by;
        coeffs[5][c] = cross_mode(row[2], row, col, st.corners.map(|v| v[c]), s);
    }
    CellPolynomial { coeffs }
}

/// Scalar reconstruction from a 5x5 window indexed `[x offset + 2][y offset + 2]`.
pub fn weno_scalar(window: &[[f64; 5]; 5], s: &ReconstructionSettings) -> CellPolynomial<1> {
    let wrapped = window.map(|col| col.map(|v| [v]));
    reconstruct(&Stencil::from_window(&wrapped), s)
}

/// Projects a 5x5 window onto the left eigenvectors of `center` in direction `theta`.
pub fn decompose_averages(
    window: &[[Conserved; 5]; 5],
    center: &Conserved,
    theta: f64,
    gas: &GasModel,
) -> Result<[[[f64; 4]; 5]; 5]> {
    let left = gas.eigensystem(center, theta)?.left;
    Ok(window.map(|col| col.map(|q| mat_vec(&left, &q.0))))
}

/// Project, reconstruct, and transform back along the unit normal `(nx, ny)`.
fn characteristic(
    st: &Stencil<4>,
    center: &Primitive,
    normal: [f64; 2],
    gas: &GasModel,
    s: &ReconstructionSettings,
    stats: &mut ReconstructionStats,
) -> CellPolynomial<4> {
    stats.eigensystems += 1;
    let (right, left) = gas.eigenvectors(center, normal[0], normal[1]);
    let projected = st.map(|v| mat_vec(&left, v));
    reconstruct(&projected, s).transformed(&right)
}

/// Counters for the decomposition work done by reconstructions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReconstructionStats {
    pub cells: u64,
    pub eigensystems: u64,
    /// Cells whose traces were scaled by [`limit_positivity`].
    pub limited: u64,
}

impl ReconstructionStats {
    pub fn merge(&mut self, other: &Self) {
        self.cells += other.cells;
        self.eigensystems += other.eigensystems;
        self.limited += other.limited;
    }
}

/// Physical-space reconstruction of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reconstruction {
    /// One polynomial serves every face (NCD, RCD, fixed angle).
    Single(CellPolynomial),
    /// SCD: one polynomial per face-normal direction.
    PerNormal { x: CellPolynomial, y: CellPolynomial },
}

/// States at the two Gauss points of each face, ordered along the face.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceTraces {
    pub west: [[f64; 4]; 2],
    pub east: [[f64; 4]; 2],
    pub south: [[f64; 4]; 2],
    pub north: [[f64; 4]; 2],
}

impl Reconstruction {
    pub fn x_polynomial(&self) -> &CellPolynomial {
        match self {
            Self::Single(p) => p,
            Self::PerNormal { x, .. } => x,
        }
    }

    pub fn y_polynomial(&self) -> &CellPolynomial {
        match self {
            Self::Single(p) => p,
            Self::PerNormal { y, .. } => y,
        }
    }

    #[inline]
    pub fn traces(&self) -> FaceTraces {
        let px = self.x_polynomial();
        let py = self.y_polynomial();
        let g = GAUSS_OFFSET;
        FaceTraces {
            west: [px.evaluate(-0.5, -g), px.evaluate(-0.5, g)],
            east: [px.evaluate(0.5, -g), px.evaluate(0.5, g)],
            south: [py.evaluate(-g, -0.5), py.evaluate(g, -0.5)],
            north: [py.evaluate(-g, 0.5), py.evaluate(g, 0.5)],
        }
    }
}

impl FaceTraces {
    pub fn points(&self) -> impl Iterator<Item = &[f64; 4]> {
        self.west.iter().chain(&self.east).chain(&self.south).chain(&self.north)
    }

    pub fn points_mut(&mut self) -> impl Iterator<Item = &mut [f64; 4]> {
        self.west
            .iter_mut()
            .chain(&mut self.east)
            .chain(&mut self.south)
            .chain(&mut self.north)
    }
}

const POSITIVITY_FLOOR: f64 = 1e-13;

fn pressure(q: &[f64; 4], gamma: f64) -> f64 {
    (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0])
}

/// Scales all traces toward the physical cell `mean` by one common factor
/// `theta` in `[0, 1]` so that every trace keeps density and pressure above
/// a small floor. Returns whether any scaling happened.
pub fn limit_positivity(traces: &mut FaceTraces, mean: &Conserved, gas: &GasModel) -> bool {
    let gamma = gas.gamma();
    let m = mean.0;
    let rho_floor = POSITIVITY_FLOOR.min(m[0]);
    let p_floor = POSITIVITY_FLOOR.min(pressure(&m, gamma));
    let toward = |q: &[f64; 4], t: f64| -> [f64; 4] { core::array::from_fn(|k| m[k] + t * (q[k] - m[k])) };

    let mut theta: f64 = 1.0;
    for q in traces.points() {
        if q[0] < rho_floor {
            theta = theta.min((m[0] - rho_floor) / (m[0] - q[0]));
        }
    }
    let mut theta_p: f64 = 1.0;
    for q in traces.points() {
        let q = toward(q, theta);
        if q[0] > 0.0 && pressure(&q, gamma) >= p_floor {
            continue;
        }
        // Pressure is concave in the conserved variables, so the admissible
        // part of the segment from the mean is an interval starting at 0.
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let r = toward(&q, mid);
            if r[0] > 0.0 && pressure(&r, gamma) >= p_floor {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        theta_p = theta_p.min(lo);
    }
    theta *= theta_p;
    if theta >= 1.0 {
        return false;
    }
    for q in traces.points_mut() {
        *q = toward(q, theta);
    }
    true
}

/// Reconstructs cell `(i, j)` under `mode`.
///
/// For [`DecompositionMode::Rcd`] the direction is `direction` if given,
/// otherwise it is computed from the central gradient of `scalar` at the cell.
/// Ghosts must be filled.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_cell(
    field: &CellField,
    i: isize,
    j: isize,
    mode: DecompositionMode,
    direction: Option<[f64; 2]>,
    scalar: GradientScalar,
    gas: &GasModel,
    s: &ReconstructionSettings,
    stats: &mut ReconstructionStats,
) -> Result<Reconstruction> {
    let st = gather(field, i, j);
    stats.cells += 1;
    if let DecompositionMode::Ncd = mode {
        return Ok(Reconstruction::Single(reconstruct(&st, s)));
    }
    let center = gas.primitive_from_conserved(&Conserved(st.center()))?;
    Ok(match mode {
        DecompositionMode::Ncd => unreachable!(),
        DecompositionMode::Scd => Reconstruction::PerNormal {
            x: characteristic(&st, &center, [1.0, 0.0], gas, s, stats),
            y: characteristic(&st, &center, [0.0, 1.0], gas, s, stats),
        },
        DecompositionMode::Rcd => {
            let n = direction.unwrap_or_else(|| {
                let (gx, gy) = gradient_at(field, scalar, i, j);
                rcd_direction(gx, gy)
            });
            Reconstruction::Single(characteristic(&st, &center, n, gas, s, stats))
        }
        DecompositionMode::FixedAngle(theta) => {
            let (sn, cs) = libm::sincos(theta);
            Reconstruction::Single(characteristic(&st, &center, [cs, sn], gas, s, stats))
        }
    })
}
