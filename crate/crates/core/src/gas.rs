//! State algebra for the 2D Euler equations of an ideal gas.
//!
//! Conserved variables are `(rho, rho*u, rho*v, rho*e)` with `e` the specific
//! total energy. Directional quantities take either an angle `theta` or the
//! unit normal `(cos theta, sin theta)` directly; the latter avoids the
//! rounding of `cos(pi/2)` on Cartesian faces.

use core::ops::{Index, IndexMut};

use crate::{Error, Result};

pub type Mat4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(transparent)]
pub struct Conserved(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(transparent)]
pub struct Flux(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Eigenvalues and eigenvector matrices of the directional flux Jacobian.
///
/// `lambdas` are ordered `(q - a, q, q, q + a)` with `q` the normal velocity;
/// the columns of `right` are the matching right eigenvectors and `left` is
/// its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub lambdas: [f64; 4],
    pub right: Mat4,
    pub left: Mat4,
}

/// The rotation `T(theta)` acting on the momentum components and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationPair {
    pub forward: Mat4,
    pub inverse: Mat4,
}

impl Index<usize> for Conserved {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Conserved {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.0[k]
    }
}

impl Index<usize> for Flux {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl Primitive {
    pub const fn new(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self { rho, u, v, p }
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.rho.is_finite() && self.p.is_finite()
    }

    /// Squared speed `u^2 + v^2`.
    pub fn kinetic(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn temperature(&self) -> f64 {
        self.p / self.rho
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            Err(Error::InvalidParameter("gamma must be > 1"))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn conserved_from_primitive(&self, w: &Primitive) -> Conserved {
        let e = w.p / ((self.gamma - 1.0) * w.rho) + 0.5 * w.kinetic();
        Conserved([w.rho, w.rho * w.u, w.rho * w.v, w.rho * e])
    }

    pub fn primitive_from_conserved(&self, q: &Conserved) -> Result<Primitive> {
        let [rho, mx, my, energy] = q.0;
        let u = mx / rho;
        let v = my / rho;
        let p = (self.gamma - 1.0) * (energy - 0.5 * rho * (u * u + v * v));
        let w = Primitive { rho, u, v, p };
        if w.is_physical() && u.is_finite() && v.is_finite() {
            Ok(w)
        } else {
            Err(Error::NonPhysicalState { rho, p })
        }
    }

    pub fn sound_speed(&self, w: &Primitive) -> f64 {
        libm::sqrt(self.gamma * w.p / w.rho)
    }

    /// Total specific enthalpy `H = e + p / rho`.
    pub fn enthalpy(&self, w: &Primitive) -> f64 {
        self.gamma / (self.gamma - 1.0) * w.p / w.rho + 0.5 * w.kinetic()
    }

    pub fn physical_flux(&self, q: &Conserved, axis: Axis) -> Result<Flux> {
        let w = self.primitive_from_conserved(q)?;
        Ok(match axis {
            Axis::X => flux_x(q, &w),
            Axis::Y => flux_y(q, &w),
        })
    }

    /// `cos(theta) F1 + sin(theta) F2`.
    pub fn rotated_flux(&self, q: &Conserved, theta: f64) -> Result<Flux> {
        let (s, c) = libm::sincos(theta);
        self.normal_flux(q, c, s)
    }

    pub fn normal_flux(&self, q: &Conserved, nx: f64, ny: f64) -> Result<Flux> {
        let w = self.primitive_from_conserved(q)?;
        Ok(normal_flux_from(q, &w, nx, ny))
    }

    /// `T^{-1} F1(T U)`: the same flux evaluated through rotational invariance.
    pub fn rotated_flux_via_rotation(&self, q: &Conserved, theta: f64) -> Result<Flux> {
        let rot = rotation_pair(theta);
        let turned = Conserved(mat_vec(&rot.forward, &q.0));
        let f = self.physical_flux(&turned, Axis::X)?;
        Ok(Flux(mat_vec(&rot.inverse, &f.0)))
    }

    /// `|u cos(theta) + v sin(theta)| + a`.
    pub fn max_signal_speed(&self, q: &Conserved, theta: f64) -> Result<f64> {
        let w = self.primitive_from_conserved(q)?;
        let (s, c) = libm::sincos(theta);
        Ok(libm::fabs(w.u * c + w.v * s) + self.sound_speed(&w))
    }

    pub fn eigensystem(&self, q: &Conserved, theta: f64) -> Result<EigenSystem> {
        let (s, c) = libm::sincos(theta);
        self.eigensystem_normal(q, c, s)
    }

    /// Eigensystem of `nx A1 + ny A2` for a unit normal `(nx, ny)`.
    pub fn eigensystem_normal(&self, q: &Conserved, nx: f64, ny: f64) -> Result<EigenSystem> {
        let w = self.primitive_from_conserved(q)?;
        let (right, left) = self.eigenvectors(&w, nx, ny);
        let a = self.sound_speed(&w);
        let qn = w.u * nx + w.v * ny;
        Ok(EigenSystem {
            lambdas: [qn - a, qn, qn, qn + a],
            right,
            left,
        })
    }

    /// Right and left eigenvector matrices `R(U, theta) = T^{-1} R(TU)` and
    /// `R^{-1}(U, theta) = R^{-1}(TU) T`, expanded analytically.
    pub(crate) fn eigenvectors(&self, w: &Primitive, nx: f64, ny: f64) -> (Mat4, Mat4) {
        let g1 = self.gamma - 1.0;
        let Primitive { u, v, .. } = *w;
        let a = self.sound_speed(w);
        let k = u * u + v * v;
        let h = self.enthalpy(w);
        let qn = u * nx + v * ny;
        let qt = -u * ny + v * nx;

        let right = [
            [1.0, 1.0, 0.0, 1.0],
            [u - a * nx, u, -ny, u + a * nx],
            [v - a * ny, v, nx, v + a * ny],
            [h - a * qn, 0.5 * k, qt, h + a * qn],
        ];

        let f = g1 / (2.0 * a * a);
        let ag = a / g1;
        let left = [
            [
                f * (ag * qn + 0.5 * k),
                f * (-ag * nx - u),
                f * (-ag * ny - v),
                f,
            ],
            [
                f * (2.0 * a * a / g1 - k),
                f * 2.0 * u,
                f * 2.0 * v,
                -2.0 * f,
            ],
            [-qt, -ny, nx, 0.0],
            [
                f * (-ag * qn + 0.5 * k),
                f * (ag * nx - u),
                f * (ag * ny - v),
                f,
            ],
        ];
        (right, left)
    }

    /// The x-direction flux Jacobian `dF1/dU` written in primitive terms.
    pub fn flux_jacobian(&self, q: &Conserved) -> Result<Mat4> {
        let w = self.primitive_from_conserved(q)?;
        let g = self.gamma;
        let Primitive { u, v, .. } = w;
        let k = w.kinetic();
        let h = self.enthalpy(&w);
        Ok([
            [0.0, 1.0, 0.0, 0.0],
            [0.5 * (g - 1.0) * k - u * u, (3.0 - g) * u, (1.0 - g) * v, g - 1.0],
            [-u * v, v, u, 0.0],
            [
                (0.5 * (g - 1.0) * k - h) * u,
                h - (g - 1.0) * u * u,
                (1.0 - g) * u * v,
                g * u,
            ],
        ])
    }

    /// Directional Jacobian `T^{-1} A(TU) T`.
    pub fn rotated_flux_jacobian(&self, q: &Conserved, theta: f64) -> Result<Mat4> {
        let rot = rotation_pair(theta);
        let a = self.flux_jacobian(&Conserved(mat_vec(&rot.forward, &q.0)))?;
        Ok(mat_mul(&mat_mul(&rot.inverse, &a), &rot.forward))
    }
}

#[inline]
pub(crate) fn flux_x(q: &Conserved, w: &Primitive) -> Flux {
    let mx = q[1];
    Flux([mx, mx * w.u + w.p, mx * w.v, (q[3] + w.p) * w.u])
}

#[inline]
pub(crate) fn flux_y(q: &Conserved, w: &Primitive) -> Flux {
    let my = q[2];
    Flux([my, my * w.u, my * w.v + w.p, (q[3] + w.p) * w.v])
}

#[inline]
pub(crate) fn normal_flux_from(q: &Conserved, w: &Primitive, nx: f64, ny: f64) -> Flux {
    let qn = w.u * nx + w.v * ny;
    let mass = q[0] * qn;
    Flux([
        mass,
        mass * w.u + w.p * nx,
        mass * w.v + w.p * ny,
        (q[3] + w.p) * qn,
    ])
}

pub fn rotation_pair(theta: f64) -> RotationPair {
    let (s, c) = libm::sincos(theta);
    RotationPair {
        forward: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, s, 0.0],
            [0.0, -s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        inverse: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    }
}

#[inline]
pub fn mat_vec(m: &Mat4, x: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
