//! The modular surface `SL2(Z) \ H`: reduction, incomplete Eisenstein series,
//! the scattering determinant and the Eisenstein weight `Phi(t)`.

mod window;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arithbase::gcd;
use crate::error::{Error, Result};
use crate::qfclass::{CMPoint, Mat2};
use crate::quad::{integrate, integrate_real, QuadOpts};
use crate::special::ln_completed_zeta;

pub use window::{CubicSpline, MeanZero, PsiWindow, MEAN_ZERO_TOL};

/// Slack allowed on the unit-circle boundary of the fundamental domain.
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::domain(format!(
                "({x}, {y}) is not in the upper half plane"
            )));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Moebius action `(az + b) / (cz + d)`.
    pub fn act(&self, g: &Mat2) -> UpperHalfPoint {
        let z = self.z();
        let w = (z * g[0][0] as f64 + g[0][1] as f64) / (z * g[1][0] as f64 + g[1][1] as f64);
        UpperHalfPoint { x: w.re, y: w.im }
    }

    pub fn is_reduced(&self) -> bool {
        self.x.abs() <= 0.5 + BOUNDARY_EPS
            && self.x * self.x + self.y * self.y >= 1.0 - BOUNDARY_EPS
    }
}

impl From<&CMPoint> for UpperHalfPoint {
    fn from(p: &CMPoint) -> Self {
        UpperHalfPoint { x: p.x, y: p.y }
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Fundamental-domain representative with `|x| <= 1/2`, `|z| >= 1`, and the
/// matrix `g` with `g z` equal to it. Translations put `x` in `(-1/2, 1/2]`.
pub fn reduce_point(z: UpperHalfPoint) -> Result<(UpperHalfPoint, Mat2)> {
    let mut p = UpperHalfPoint::new(z.x, z.y)?;
    let mut g: Mat2 = [[1, 0], [0, 1]];
    for _ in 0..10_000 {
        let n = (p.x - 0.5).ceil();
        if n != 0.0 {
            if n.abs() > 1e15 {
                return Err(Error::domain("real part too large to reduce"));
            }
            p.x -= n;
            g = mat_mul(&[[1, -(n as i64)], [0, 1]], &g);
        }
        let r2 = p.x * p.x + p.y * p.y;
        if r2 >= 1.0 - 1e-15 {
            return Ok((p, g));
        }
        p = UpperHalfPoint {
            x: -p.x / r2,
            y: p.y / r2,
        };
        g = mat_mul(&[[0, -1], [1, 0]], &g);
    }
    Err(Error::Convergence(
        "point reduction did not terminate".into(),
    ))
}

/// `E_Psi(z) = sum over Gamma_inf \ SL2(Z) of Psi(Im gamma z)`, a finite sum
/// because `Psi` has compact support in `(0, inf)`.
pub fn incomplete_eisenstein(z: UpperHalfPoint, psi: &PsiWindow) -> f64 {
    let (u0, u1) = psi.support();
    let (x, y) = (z.x, z.y);
    let mut total = psi.eval(y);
    let c_max = (1.0 / (y * u0).sqrt()).floor() as i64;
    for c in 1..=c_max {
        let cf = c as f64;
        let r2 = y / u0 - cf * cf * y * y;
        if r2 < 0.0 {
            continue;
        }
        let r = r2.sqrt() + 1e-9;
        let d_lo = (-cf * x - r).ceil() as i64;
        let d_hi = (-cf * x + r).floor() as i64;
        for d in d_lo..=d_hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let t = cf * x + d as f64;
            let v = y / (t * t + cf * cf * y * y);
            if v >= u0 && v <= u1 {
                total += psi.eval(v);
            }
        }
    }
    total
}

/// `phi(s) = sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s))`, evaluated as
/// `-g(2 - 2s) / g(2s)` with `g` the completed zeta function times `(w - 1)`.
pub fn scattering_phi(s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-8 {
        return Err(Error::domain(format!(
            "scattering determinant has a pole at s = 1 (got {s})"
        )));
    }
    let two = Complex64::new(2.0, 0.0);
    let l = ln_completed_zeta(two - 2.0 * s)? - ln_completed_zeta(2.0 * s)?;
    Ok(-l.exp())
}

/// The Eisenstein weight
/// `Phi(t) = (3/pi) Psibar^(-1/2 - it) (Psi^(-1/2 + it) + phi(1/2 + it) Psi^(-1/2 - it))`,
/// where `Psibar^` is the transform of the conjugate window; windows are real so it equals `Psi^`.
pub fn phi_weight(t: f64, psi: &PsiWindow) -> Result<Complex64> {
    if psi.mode() == MeanZero::Off {
        return Err(Error::domain("phi_weight needs a surface mean-zero window"));
    }
    let plus = psi.mellin(Complex64::new(-0.5, t))?;
    let minus = plus.conj();
    let phi = scattering_phi(Complex64::new(0.5, t))?;
    Ok(3.0 / PI * minus * (plus + phi * minus))
}

/// `int_R Phi(t) dt / 2pi` with its truncation point and tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiIntegral {
    pub value: f64,
    pub t_max: f64,
    pub tail_bound: f64,
    pub quad_error: f64,
}

/// Largest truncation point tried before giving up.
pub const PHI_T_LIMIT: f64 = 4000.0;

/// Integrates `Phi` in blocks of width 10 until the geometric tail estimate of
/// `int |Phi|` beyond the last block is below `tail_tol`.
pub fn phi_integral(psi: &PsiWindow, tail_tol: f64) -> Result<PhiIntegral> {
    phi_integral_weighted(psi, |_| 1.0, tail_tol)
}

/// `int_R w(t) Phi(t) dt / 2pi` for a real even weight `w`, with the same tail control
/// applied to `int |w Phi|`.
pub fn phi_integral_weighted<W: Fn(f64) -> f64>(
    psi: &PsiWindow,
    weight: W,
    tail_tol: f64,
) -> Result<PhiIntegral> {
    const BLOCK: f64 = 10.0;
    let opts = QuadOpts {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    let mut value = 0.0;
    let mut quad_error = 0.0;
    let mut prev_abs = f64::INFINITY;
    let mut a = 0.0;
    while a < PHI_T_LIMIT {
        let b = a + BLOCK;
        let failure = std::cell::RefCell::new(None);
        // Real part carries the integral, imaginary part accumulates |Phi| for the tail estimate.
        let q = integrate(
            |t| match phi_weight(t, psi) {
                Ok(v) => {
                    let w = weight(t);
                    Complex64::new(w * v.re, (w * v).norm())
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            a,
            b,
            opts,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let q = q?;
        // Both halves of the real line: int_R Phi = 2 int_0^inf Re Phi.
        value += 2.0 * q.value.re / (2.0 * PI);
        quad_error += 2.0 * q.error / (2.0 * PI);
        let abs_block = 2.0 * q.value.im / (2.0 * PI);
        let ratio = abs_block / prev_abs;
        prev_abs = abs_block;
        a = b;
        if ratio < 0.9 && a >= 20.0 {
            let tail_bound = abs_block * ratio / (1.0 - ratio);
            if tail_bound < tail_tol {
                return Ok(PhiIntegral {
                    value,
                    t_max: a,
                    tail_bound,
                    quad_error,
                });
            }
        }
    }
    Err(Error::Convergence(format!(
        "Phi integral tail still above {tail_tol:e} at t = {PHI_T_LIMIT}"
    )))
}

/// `||E_Psi||^2` against `(3/pi) dx dy / y^2` by quadrature over the fundamental domain.
/// The series vanishes above `max(u1, 1/u0)`, which bounds the domain.
pub fn eisenstein_norm_sq(psi: &PsiWindow) -> Result<f64> {
    let (u0, u1) = psi.support();
    let top = u1.max(1.0 / u0);
    let opts = QuadOpts {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let inner = |x: f64| -> Result<f64> {
        let bottom = (1.0 - x * x).sqrt();
        let f = |y: f64| {
            let e = incomplete_eisenstein(UpperHalfPoint { x, y }, psi);
            e * e / (y * y)
        };
        Ok(integrate_real(f, bottom, top, opts)?.0)
    };
    let failure = std::cell::RefCell::new(None);
    let outer = integrate_real(
        |x| match inner(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        -0.5,
        0.5,
        opts,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // E_Psi(-x + iy) = E_Psi(x + iy), so the integrand is even; no need to exploit it.
    Ok(3.0 / PI * outer.0)
}

/// Axis-parallel box `[x0, x1] x [y0, y1]` inside the fundamental domain; `y1` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRegion {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BoxRegion {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1 && y0 > 0.0) {
            return Err(Error::domain("box must have x0 < x1 and 0 < y0 < y1"));
        }
        if x0 < -0.5 - BOUNDARY_EPS || x1 > 0.5 + BOUNDARY_EPS {
            return Err(Error::domain("box leaves the strip |x| <= 1/2"));
        }
        // the lowest point of the box nearest the imaginary axis must clear the unit circle
        let xn = if x0 <= 0.0 && x1 >= 0.0 {
            0.0
        } else {
            x0.abs().min(x1.abs())
        };
        if xn * xn + y0 * y0 < 1.0 - BOUNDARY_EPS {
            return Err(Error::domain("box dips below the unit circle"));
        }
        Ok(BoxRegion { x0, x1, y0, y1 })
    }

    /// `(3/pi) (x1 - x0) (1/y0 - 1/y1)`.
    pub fn measure(&self) -> f64 {
        3.0 / PI * (self.x1 - self.x0) * (1.0 / self.y0 - 1.0 / self.y1)
    }

    /// Membership of the reduced representative of `z`.
    pub fn indicator(&self, z: UpperHalfPoint) -> Result<bool> {
        let (p, _) = reduce_point(z)?;
        Ok(p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1)
    }
}

pub fn box_measure(b: &BoxRegion) -> f64 {
    b.measure()
}

pub fn box_indicator(z: UpperHalfPoint, b: &BoxRegion) -> Result<bool> {
    b.indicator(z)
}

/// Sum of the measures of `n` inscribed vertical boxes `[x_k, x_{k+1}] x [y_k, inf)`.
pub fn inscribed_box_measure(n: usize) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..n {
        let x0 = -0.5 + k as f64 / n as f64;
        let x1 = -0.5 + (k + 1) as f64 / n as f64;
        let xn = if x0 <= 0.0 && x1 >= 0.0 {
            0.0
        } else {
            x0.abs().min(x1.abs())
        };
        total += BoxRegion::new(x0, x1, (1.0 - xn * xn).sqrt(), f64::INFINITY)?.measure();
    }
    Ok(total)
}
