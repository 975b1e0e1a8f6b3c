//! Complex Gamma and zeta evaluations used on the modular surface.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `log Gamma(z)` for `Re z > 0` (Lanczos, shifted up when `Re z < 1/2`).
/// The imaginary part is some branch of the argument; only `exp` of it is meaningful.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 {
        return Err(Error::domain(format!("ln_gamma needs Re z > 0, got {z}")));
    }
    if z.re < 0.5 {
        return Ok(ln_gamma(z + 1.0)? - z.ln());
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

// B_{2k} / (2k)! for k = 1..=10.
const BERNOULLI_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
];

/// `(w - 1) zeta(w)` by Euler-Maclaurin, valid for `Re w >= 1/2` and smooth across `w = 1`.
pub fn zeta_times_pole(w: Complex64) -> Complex64 {
    let n = 20 + w.norm().ceil() as usize;
    let nf = n as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 1..n {
        s += (-w * (k as f64).ln()).exp();
    }
    let n_pow = (-w * nf.ln()).exp();
    let mut tail = 0.5 * n_pow;
    // rising factorial w (w+1) ... (w+2k-2) times N^{-w-2k+1}
    let mut rising = w;
    let mut npow = n_pow / nf;
    for (k, &b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        if k > 0 {
            let j = 2.0 * k as f64;
            rising *= (w + (j - 1.0)) * (w + j);
            npow /= nf * nf;
        }
        tail += b * rising * npow;
    }
    (w - 1.0) * (s + tail) + n_pow * nf
}

/// `log` of `g(w) = (w - 1) pi^{-w/2} Gamma(w/2) zeta(w)`, the completed zeta
/// function with its pole at 1 removed. Uses `g(w) = (1 - w) g(1 - w) / w` left of 1/2.
pub fn ln_completed_zeta(w: Complex64) -> Result<Complex64> {
    if w.re < 0.5 {
        if w.norm() < 1e-300 {
            return Err(Error::domain("completed zeta has a pole at 0"));
        }
        let one = Complex64::new(1.0, 0.0);
        return Ok((one - w).ln() - w.ln() + ln_completed_zeta(one - w)?);
    }
    let z = zeta_times_pole(w);
    if z.norm() == 0.0 {
        return Err(Error::domain(format!("zeta vanishes at {w}")));
    }
    Ok(z.ln() - 0.5 * w * PI.ln() + ln_gamma(0.5 * w)?)
}
