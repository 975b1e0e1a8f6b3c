//! Harmonic sums of Hecke eigenvalues over small split primes, eigenvalue densities and
//! the pigeonhole chain that combines them with split-prime densities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arithbase::{is_prime, sieve_primes, splitting_type, Discriminant, Splitting};
use crate::error::{Error, Result};
use crate::heckeseries::EigenSource;
use crate::primechar::split_ratio_with;

/// Parameters of the sums `S_D` and `T_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithConfig {
    /// Smallest prime included; must exceed every ramified prime of the sources.
    pub c0: u64,
    /// Exponent of the range `p <= D^c`.
    pub c: BigRational,
    /// Cap on `|lambda(p)|`; `None` is no cap.
    pub b: Option<BigRational>,
}

impl ArithConfig {
    pub fn new(c0: u64, c: BigRational, b: Option<BigRational>) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::domain("exponent c must be positive"));
        }
        if b.as_ref().is_some_and(|b| !b.is_positive()) {
            return Err(Error::domain("cap B must be positive"));
        }
        Ok(ArithConfig { c0, c, b })
    }

    fn check_sources(&self, sources: &[&EigenSource]) -> Result<()> {
        for s in sources {
            if let Some(p) = s.ramified_primes().into_iter().find(|&p| p >= self.c0) {
                return Err(Error::domain(format!(
                    "C0 = {} must exceed the ramified prime {p} of {}",
                    self.c0, s.label
                )));
            }
        }
        Ok(())
    }
}

/// `floor(D^c)` computed exactly.
pub fn power_floor(big_d: u64, c: &BigRational) -> Result<u64> {
    let num = c
        .numer()
        .to_u32()
        .ok_or_else(|| Error::domain("exponent numerator too large"))?;
    let den = c
        .denom()
        .to_u32()
        .ok_or_else(|| Error::domain("exponent denominator too large"))?;
    let v = BigUint::from(big_d).pow(num).nth_root(den);
    v.to_u64()
        .ok_or_else(|| Error::bounds(format!("D^c for D = {big_d} exceeds 64 bits")))
}

/// A harmonic sum over primes, exact and rounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithSum {
    pub exact: BigRational,
    pub value: f64,
    pub primes_used: usize,
    /// `floor(D^c)`.
    pub bound: u64,
}

/// Split primes `C0 <= p <= D^c`, checking every source reaches the range.
fn split_range(
    disc: &Discriminant,
    cfg: &ArithConfig,
    sources: &[&EigenSource],
) -> Result<(u64, Vec<u64>)> {
    cfg.check_sources(sources)?;
    let bound = power_floor(disc.big_d, &cfg.c)?;
    for s in sources {
        if bound > s.precision {
            let mut p = (s.precision + 1).max(cfg.c0);
            while !(is_prime(p) && splitting_type(disc, p) == Splitting::Split) {
                p += 1;
            }
            if p <= bound {
                return Err(Error::data(format!(
                    "{}: eigenvalues stop at {} but the split prime {p} <= D^c = {bound} is needed",
                    s.label, s.precision
                )));
            }
        }
    }
    if bound < cfg.c0.max(2) {
        return Ok((bound, Vec::new()));
    }
    let primes = sieve_primes(bound)?;
    let list = primes
        .range(cfg.c0, bound)
        .iter()
        .copied()
        .filter(|&p| splitting_type(disc, p) == Splitting::Split)
        .collect();
    Ok((bound, list))
}

fn capped(cfg: &ArithConfig, sq: &BigRational) -> bool {
    cfg.b.as_ref().is_none_or(|b| sq <= &(b * b))
}

fn finish(exact: BigRational, primes_used: usize, bound: u64) -> ArithSum {
    let value = exact.to_f64().unwrap_or(f64::NAN);
    ArithSum {
        exact,
        value,
        primes_used,
        bound,
    }
}

/// `S_D = sum (lambda_1(p) - lambda_2(p))^2 / p` over split `C0 <= p <= D^c` with both `|lambda| <= B`.
pub fn s_d(
    src1: &EigenSource,
    src2: &EigenSource,
    disc: &Discriminant,
    cfg: &ArithConfig,
) -> Result<ArithSum> {
    let (bound, primes) = split_range(disc, cfg, &[src1, src2])?;
    let mut acc = BigRational::zero();
    let mut used = 0;
    for p in primes {
        let (l1, l2) = (src1.lambda_sq(p)?, src2.lambda_sq(p)?);
        if !(capped(cfg, &l1) && capped(cfg, &l2)) {
            continue;
        }
        let diff = &l1 + &l2 - src1.lambda_product(src2, p)? * BigRational::from_integer(2.into());
        acc += diff / BigRational::from_integer(p.into());
        used += 1;
    }
    Ok(finish(acc, used, bound))
}

/// `T_D = sum lambda(p)^2 / p` over split `C0 <= p <= D^c` with `|lambda| <= B`.
pub fn t_d(src: &EigenSource, disc: &Discriminant, cfg: &ArithConfig) -> Result<ArithSum> {
    let (bound, primes) = split_range(disc, cfg, &[src])?;
    let mut acc = BigRational::zero();
    let mut used = 0;
    for p in primes {
        let l = src.lambda_sq(p)?;
        if capped(cfg, &l) {
            acc += l / BigRational::from_integer(p.into());
            used += 1;
        }
    }
    Ok(finish(acc, used, bound))
}

/// Which eigenvalue gap a density measures.
#[derive(Debug, Clone, Copy)]
pub enum DensityMode<'a> {
    /// `|lambda_1(p) - lambda_2(p)| >= eps`.
    Pair(&'a EigenSource, &'a EigenSource),
    /// `|lambda(p)| >= eps`.
    Single(&'a EigenSource),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub x: u64,
    pub eps: f64,
    /// `sum_{p <= X, gap >= eps} log p / X`.
    pub value: f64,
    pub count: usize,
    pub primes: usize,
    /// `sum_{p <= X} log p / X`.
    pub theta_ratio: f64,
}

fn gap_sq(mode: DensityMode<'_>, p: u64) -> Result<BigRational> {
    Ok(match mode {
        DensityMode::Pair(a, b) => {
            a.lambda_sq(p)? + b.lambda_sq(p)?
                - a.lambda_product(b, p)? * BigRational::from_integer(2.into())
        }
        DensityMode::Single(a) => a.lambda_sq(p)?,
    })
}

/// Log-weighted density of primes `p <= X` whose eigenvalue gap is at least `eps`,
/// with the comparison done in exact rationals. Ramified primes are included.
pub fn density_report(mode: DensityMode<'_>, eps: f64, x: u64) -> Result<DensityReport> {
    let prec = match mode {
        DensityMode::Pair(a, b) => a.precision.min(b.precision),
        DensityMode::Single(a) => a.precision,
    };
    if x > prec {
        return Err(Error::data(format!(
            "eigenvalues stop at {prec} below X = {x}"
        )));
    }
    let e = BigRational::from_float(eps).ok_or_else(|| Error::domain("eps must be finite"))?;
    let e2 = &e * &e;
    let primes = sieve_primes(x.max(2))?;
    let (mut hit, mut all, mut count) = (0.0, 0.0, 0);
    for &p in primes.range(2, x) {
        let lp = (p as f64).ln();
        all += lp;
        if gap_sq(mode, p)? >= e2 {
            hit += lp;
            count += 1;
        }
    }
    let xf = x as f64;
    Ok(DensityReport {
        x,
        eps,
        value: hit / xf,
        count,
        primes: primes.range(2, x).len(),
        theta_ratio: all / xf,
    })
}

/// One interval `[Z, Z^2]` of the pigeonhole chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PigeonholeBlock {
    pub z: u64,
    /// `sum_{Z <= p <= Z^2} 1/p`.
    pub harmonic: f64,
    /// Share of the harmonic sum on split primes.
    pub split: f64,
    /// Share on primes with `|lambda_1 - lambda_2| >= eps`.
    pub density: f64,
    /// Rankin-Selberg bound `sum (lambda_1^2 + lambda_2^2)/p / (B^2 sum 1/p)` on the share above the cap.
    pub tail_bound: f64,
    /// Observed share with `max |lambda_i| > B`.
    pub tail: f64,
    /// `eps^2 (split + density + (1 - tail_bound) - 2)`.
    pub kappa: f64,
    /// Observed `sum_{split, capped} (lambda_1 - lambda_2)^2 / p / sum 1/p`.
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PigeonholeReport {
    pub big_d: u64,
    pub psi: f64,
    pub blocks: Vec<PigeonholeBlock>,
    /// Every block has `kappa > 0`.
    pub kappa_positive: bool,
    /// Every block has `observed >= kappa`.
    pub consistent: bool,
    /// `sum_blocks observed * harmonic`, the capped `S_D` over the covered range.
    pub s_total: f64,
}

/// Assembles the chain over `[Z, Z^2]` for `Z = X0, X0^2, ...` with `X0 = ceil(D^{1/psi})`
/// while `Z^2 <= D^c`.
pub fn pigeonhole_report(
    src1: &EigenSource,
    src2: &EigenSource,
    disc: &Discriminant,
    psi: f64,
    c: f64,
    eps: f64,
    b: f64,
) -> Result<PigeonholeReport> {
    if !(psi >= 1.0 && c > 0.0 && eps > 0.0 && b > 0.0) {
        return Err(Error::domain("need psi >= 1 and positive c, eps, B"));
    }
    let ld = (disc.big_d as f64).ln();
    let top = (c * ld).exp();
    let mut z = ((ld / psi).exp().ceil() as u64).max(2);
    let mut zs = Vec::new();
    while ((z as f64) * (z as f64)) <= top * (1.0 + 1e-12) {
        zs.push(z);
        z = z
            .checked_mul(z)
            .ok_or_else(|| Error::bounds("block start overflows"))?;
    }
    let hi = zs.last().map_or(2, |&z| z * z);
    let prec = src1.precision.min(src2.precision);
    if hi > prec {
        return Err(Error::data(format!(
            "eigenvalues stop at {prec} below Z^2 = {hi}"
        )));
    }
    let table = sieve_primes(hi.max(2))?;
    let mut blocks = Vec::new();
    for z in zs {
        let sr = split_ratio_with(&table, disc, z)?;
        let (mut h, mut dens, mut rs, mut tail, mut obs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &p in table.range(z, z * z) {
            let w = 1.0 / p as f64;
            let (l1, l2) = (src1.lambda(p)?.value, src2.lambda(p)?.value);
            h += w;
            if (l1 - l2).abs() >= eps {
                dens += w;
            }
            rs += (l1 * l1 + l2 * l2) * w;
            let over = l1.abs().max(l2.abs()) > b;
            if over {
                tail += w;
            }
            if !over && splitting_type(disc, p) == Splitting::Split {
                obs += (l1 - l2) * (l1 - l2) * w;
            }
        }
        let split = sr.ratio.unwrap_or(0.0);
        let (density, tail_bound, tail, observed) = (dens / h, rs / (b * b * h), tail / h, obs / h);
        let kappa = eps * eps * (split + density + (1.0 - tail_bound) - 2.0);
        blocks.push(PigeonholeBlock {
            z,
            harmonic: h,
            split,
            density,
            tail_bound,
            tail,
            kappa,
            observed,
        });
    }
    let kappa_positive = !blocks.is_empty() && blocks.iter().all(|b| b.kappa > 0.0);
    let consistent = blocks.iter().all(|b| b.observed >= b.kappa);
    let s_total = blocks.iter().map(|b| b.observed * b.harmonic).sum();
    Ok(PigeonholeReport {
        big_d: disc.big_d,
        psi,
        blocks,
        kappa_positive,
        consistent,
        s_total,
    })
}

/// Exact rational from a decimal-free `f64` cap, or `None` for infinity.
pub fn cap_from_f64(b: f64) -> Result<Option<BigRational>> {
    if b.is_infinite() && b > 0.0 {
        return Ok(None);
    }
    BigRational::from_float(b)
        .map(Some)
        .ok_or_else(|| Error::domain("cap must be a number or inf"))
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
