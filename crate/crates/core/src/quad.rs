//! Adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

/// Tolerances and the subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

/// One Kronrod panel: value and |K - G| as the error estimate.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive integration over `[a, b]`, starting from the given
/// breakpoints (endpoints included implicitly).
pub fn integrate_with<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOpts,
) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("quadrature needs a finite interval"));
    }
    if a == b {
        return Ok(Quad {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evals: 0,
        });
    }
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a.min(b) && x < a.max(b))
        .collect();
    inner.sort_by(f64::total_cmp);
    if a > b {
        inner.reverse();
    }
    let mut pts = vec![a];
    pts.extend(inner);
    pts.push(b);
    let mut heap = BinaryHeap::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut evals = 15 * heap.len();
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= tol {
            return Ok(Quad {
                value,
                error,
                evals,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "quadrature on [{a}, {b}] stalled: estimate {value}, error {error:e} > {tol:e} after {evals} evaluations"
            )));
        }
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        evals += 30;
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
        });
        // Re-sum occasionally so cancellation in the running totals cannot drift.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|q| q.value).sum();
            error = heap.iter().map(|q| q.error).sum();
        }
    }
}

pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: QuadOpts) -> Result<Quad> {
    integrate_with(f, a, b, &[], opts)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOpts,
) -> Result<(f64, f64)> {
    let q = integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((q.value.re, q.error))
}
