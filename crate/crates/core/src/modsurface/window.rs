//! Test windows `Psi` on `(0, inf)` and their Mellin transforms.

use std::io::Read;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_real, integrate_with, QuadOpts};

/// Which mean-zero constraints the window satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanZero {
    /// No constraint; the bump itself.
    Off,
    /// `int Psi(y) y^{-2} dy = 0`, equivalently `Psi^(-1) = 0`.
    Surface,
    /// Surface mode together with `int Psi(y) dy = 0`.
    Both,
}

/// Natural cubic spline through `(y, Psi(y))` samples; C^2 inside, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::data(
                "a spline table needs at least 3 (y, value) rows",
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0]))
            || xs[0] <= 0.0
            || ys.iter().any(|v| !v.is_finite())
        {
            return Err(Error::data(
                "spline abscissae must be positive, finite and strictly increasing",
            ));
        }
        // Tridiagonal system for the second derivatives, natural end conditions.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline { xs, ys, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    /// `Psi = beta`.
    Plain,
    /// `Psi(y) = y^2 d/dy [beta(y)(1 + kappa y)]`.
    Derivative { kappa: f64 },
    /// `Psi = S + c2 y^2 beta + c3 y^3 beta`.
    Table {
        spline: CubicSpline,
        c2: f64,
        c3: f64,
    },
}

/// A smooth window supported on `[u0, u1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiWindow {
    u0: f64,
    u1: f64,
    mode: MeanZero,
    profile: Profile,
}

const TIGHT: QuadOpts = QuadOpts {
    abs_tol: 1e-15,
    rel_tol: 1e-15,
    max_intervals: 4000,
};

/// Tolerance for the mean-zero invariants.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

impl PsiWindow {
    /// Bump-derivative window on `[u0, u1]`. `Surface` mode holds exactly by construction.
    pub fn bump(u0: f64, u1: f64, mode: MeanZero) -> Result<Self> {
        if !(u0 > 0.0 && u1 > u0 && u1.is_finite()) {
            return Err(Error::domain(format!(
                "window support [{u0}, {u1}] must satisfy 0 < u0 < u1"
            )));
        }
        let mut w = PsiWindow {
            u0,
            u1,
            mode,
            profile: Profile::Plain,
        };
        w.profile = match mode {
            MeanZero::Off => Profile::Plain,
            MeanZero::Surface => Profile::Derivative { kappa: 0.0 },
            MeanZero::Both => {
                let m1 = w.beta_moment(1.0)?;
                let m2 = w.beta_moment(2.0)?;
                Profile::Derivative { kappa: -m1 / m2 }
            }
        };
        w.check()?;
        Ok(w)
    }

    /// Spline window from samples; corrected by multiples of `y^2 beta`, `y^3 beta`
    /// so the requested mean-zero constraints hold.
    pub fn table(samples: &[(f64, f64)], mode: MeanZero) -> Result<Self> {
        let xs: Vec<f64> = samples.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = samples.iter().map(|p| p.1).collect();
        let spline = CubicSpline::new(xs, ys)?;
        let (u0, u1) = (spline.xs[0], *spline.xs.last().expect("nonempty"));
        let mut w = PsiWindow {
            u0,
            u1,
            mode,
            profile: Profile::Plain,
        };
        let s_surf = w.spline_moment(&spline, -2.0)?;
        let s_line = w.spline_moment(&spline, 0.0)?;
        let (c2, c3) = match mode {
            MeanZero::Off => (0.0, 0.0),
            MeanZero::Surface => (-s_surf / w.beta_moment(0.0)?, 0.0),
            MeanZero::Both => {
                // c2 b0 + c3 b1 = -s_surf ; c2 b2 + c3 b3 = -s_line
                let (b0, b1, b2, b3) = (
                    w.beta_moment(0.0)?,
                    w.beta_moment(1.0)?,
                    w.beta_moment(2.0)?,
                    w.beta_moment(3.0)?,
                );
                let det = b0 * b3 - b1 * b2;
                if det.abs() < 1e-300 {
                    return Err(Error::domain(
                        "degenerate table support for two constraints",
                    ));
                }
                (
                    (-s_surf * b3 + s_line * b1) / det,
                    (-s_line * b0 + s_surf * b2) / det,
                )
            }
        };
        w.profile = Profile::Table { spline, c2, c3 };
        w.check()?;
        Ok(w)
    }

    /// Reads a two-column CSV of `y, Psi(y)` rows (a header row is allowed).
    pub fn from_csv<R: Read>(reader: R, mode: MeanZero) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::data(format!("window csv: {e}")))?;
            if rec.len() != 2 {
                return Err(Error::data(format!(
                    "window csv row {}: expected 2 columns",
                    i + 1
                )));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(y), Ok(v)) => rows.push((y, v)),
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::data(format!(
                        "window csv row {}: not numeric",
                        i + 1
                    )))
                }
            }
        }
        Self::table(&rows, mode)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.u0, self.u1)
    }

    pub fn mode(&self) -> MeanZero {
        self.mode
    }

    /// Short description of the smoothness of the evaluator.
    pub fn smoothness(&self) -> &'static str {
        match self.profile {
            Profile::Table { .. } => "C2 cubic spline plus C-infinity corrections",
            _ => "C-infinity",
        }
    }

    fn beta(&self, y: f64) -> f64 {
        let t = (y - self.u0) / (self.u1 - self.u0);
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        (4.0 - 1.0 / (t * (1.0 - t))).exp()
    }

    fn beta_prime(&self, y: f64) -> f64 {
        let t = (y - self.u0) / (self.u1 - self.u0);
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        let q = t * (1.0 - t);
        self.beta(y) * (1.0 - 2.0 * t) / (q * q) / (self.u1 - self.u0)
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= self.u0 || y >= self.u1 {
            if let Profile::Table { spline, .. } = &self.profile {
                return spline.eval(y);
            }
            return 0.0;
        }
        match &self.profile {
            Profile::Plain => self.beta(y),
            Profile::Derivative { kappa } => {
                y * y * (self.beta_prime(y) * (1.0 + kappa * y) + self.beta(y) * kappa)
            }
            Profile::Table { spline, c2, c3 } => {
                spline.eval(y) + (c2 + c3 * y) * y * y * self.beta(y)
            }
        }
    }

    fn breaks(&self, im: f64) -> Vec<f64> {
        // One panel per half oscillation of y^{i im} keeps the adaptive phase short.
        let cycles = im.abs() * (self.u1 / self.u0).ln() / std::f64::consts::PI;
        let n = (cycles.ceil() as usize).clamp(4, 4096);
        let mut b: Vec<f64> = (1..n)
            .map(|k| self.u0 * (self.u1 / self.u0).powf(k as f64 / n as f64))
            .collect();
        if let Profile::Table { spline, .. } = &self.profile {
            b.extend_from_slice(spline.knots());
        }
        b
    }

    fn beta_moment(&self, k: f64) -> Result<f64> {
        Ok(integrate_real(|y| self.beta(y) * y.powf(k), self.u0, self.u1, TIGHT)?.0)
    }

    fn spline_moment(&self, s: &CubicSpline, k: f64) -> Result<f64> {
        let q = integrate_with(
            |y| Complex64::new(s.eval(y) * y.powf(k), 0.0),
            self.u0,
            self.u1,
            s.knots(),
            TIGHT,
        )?;
        Ok(q.value.re)
    }

    /// `int beta(y) (a + b y) y^w dy` over the support.
    fn beta_mellin(&self, w: Complex64, a: f64, b: f64) -> Result<Complex64> {
        let f = |y: f64| (w * y.ln()).exp() * (self.beta(y) * (a + b * y));
        let opts = QuadOpts {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_intervals: 20_000,
        };
        Ok(integrate_with(f, self.u0, self.u1, &self.breaks(w.im), opts)?.value)
    }

    /// `Psi^(s) = int Psi(y) y^{s-1} dy`.
    pub fn mellin(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match &self.profile {
            Profile::Plain => self.beta_mellin(s - one, 1.0, 0.0),
            // Integrating by parts moves the derivative onto y^{s+1}.
            Profile::Derivative { kappa } => Ok(-(s + one) * self.beta_mellin(s, 1.0, *kappa)?),
            Profile::Table { spline, c2, c3 } => {
                let f = |y: f64| ((s - one) * y.ln()).exp() * spline.eval(y);
                let opts = QuadOpts {
                    abs_tol: 1e-14,
                    rel_tol: 1e-13,
                    max_intervals: 20_000,
                };
                let head = integrate_with(f, self.u0, self.u1, &self.breaks(s.im), opts)?.value;
                Ok(head + self.beta_mellin(s + one, *c2, *c3)?)
            }
        }
    }

    /// `int Psi(y) y^{-2} dy`.
    pub fn surface_mean(&self) -> Result<f64> {
        Ok(self.mellin(Complex64::new(-1.0, 0.0))?.re)
    }

    /// `int Psi(y) dy`.
    pub fn line_mean(&self) -> Result<f64> {
        Ok(self.mellin(Complex64::new(1.0, 0.0))?.re)
    }

    fn check(&self) -> Result<()> {
        let surf = self.surface_mean()?;
        let line = self.line_mean()?;
        let bad = match self.mode {
            MeanZero::Off => None,
            MeanZero::Surface => (surf.abs() > MEAN_ZERO_TOL).then_some(surf),
            MeanZero::Both => {
                (surf.abs().max(line.abs()) > MEAN_ZERO_TOL).then_some(surf.abs().max(line.abs()))
            }
        };
        match bad {
            Some(v) => Err(Error::integrity(format!(
                "window mean-zero constraint off by {v:e}"
            ))),
            None => Ok(()),
        }
    }
}

impl Default for PsiWindow {
    fn default() -> Self {
        PsiWindow::bump(1.0, 2.0, MeanZero::Surface).expect("default window is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mellin_matches_direct_quadrature() {
        for mode in [MeanZero::Off, MeanZero::Surface, MeanZero::Both] {
            let w = PsiWindow::bump(1.0, 2.0, mode).unwrap();
            for s in [c(-0.5, 3.0), c(1.0, 0.0), c(0.25, -7.0)] {
                let direct = integrate_with(
                    |y| ((s - 1.0) * y.ln()).exp() * w.eval(y),
                    1.0,
                    2.0,
                    &[1.25, 1.5, 1.75],
                    TIGHT,
                )
                .unwrap()
                .value;
                assert!(
                    (w.mellin(s).unwrap() - direct).norm() < 1e-11,
                    "{mode:?} {s}"
                );
            }
        }
    }

    #[test]
    fn mean_zero_modes() {
        let w = PsiWindow::default();
        assert!(w.mellin(c(-1.0, 0.0)).unwrap().norm() < 1e-10);
        let both = PsiWindow::bump(1.0, 2.0, MeanZero::Both).unwrap();
        assert!(both.line_mean().unwrap().abs() < 1e-12);
        assert!(both.surface_mean().unwrap().abs() < 1e-12);
        let plain = PsiWindow::bump(1.0, 2.0, MeanZero::Off).unwrap();
        assert!(plain.mellin(c(1.0, 0.0)).unwrap().re > 0.0);
    }

    #[test]
    fn spline_reproduces_cubics_inside() {
        let xs: Vec<f64> = (0..=40).map(|i| 1.0 + i as f64 / 40.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x - 1.0) * (2.0 - x)).collect();
        let s = CubicSpline::new(xs, ys).unwrap();
        // natural end conditions perturb only near the ends
        assert!((s.eval(1.5) - 0.25).abs() < 1e-6);
        assert_eq!(s.eval(0.5), 0.0);
    }

    #[test]
    fn table_window_corrections() {
        let samples: Vec<(f64, f64)> = (0..=64)
            .map(|i| {
                let y = 1.0 + i as f64 / 64.0;
                (y, (std::f64::consts::PI * (y - 1.0)).sin().powi(2))
            })
            .collect();
        let w = PsiWindow::table(&samples, MeanZero::Surface).unwrap();
        assert!(w.surface_mean().unwrap().abs() < 1e-12);
        let w2 = PsiWindow::table(&samples, MeanZero::Both).unwrap();
        assert!(w2.line_mean().unwrap().abs() < 1e-12);
        let csv_text: String = samples.iter().map(|(y, v)| format!("{y},{v}\n")).collect();
        let w3 = PsiWindow::from_csv(format!("y,psi\n{csv_text}").as_bytes(), MeanZero::Surface)
            .unwrap();
        assert!((w3.eval(1.3) - w.eval(1.3)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_support() {
        assert!(PsiWindow::bump(0.0, 1.0, MeanZero::Surface).is_err());
        assert!(PsiWindow::bump(2.0, 1.0, MeanZero::Surface).is_err());
    }
}
