//! Split-prime harmonic sums, smoothed character sums over primes, the
//! zero-density dictionary bound and a census of ingested L-function zeros.

use std::io::Read;
use std::path::Path;

use crate::arithbase::{kronecker, sieve_primes, Discriminant, PrimeTable};
use crate::error::{Error, Result};

/// Largest `X^2` accepted (the sieve limit).
pub const MAX_RANGE: u64 = 1_000_000_000;

const FIX_BITS: u32 = 96;

/// `1/p` in fixed point with 96 fractional bits, so partitions of sums are exact.
fn recip_fixed(p: u64) -> u128 {
    let one = 1u128 << FIX_BITS;
    (one + (p as u128) / 2) / p as u128
}

fn fixed_to_f64(v: u128) -> f64 {
    v as f64 / (1u128 << FIX_BITS) as f64
}

/// Harmonic sums over primes `X <= p <= X^2` split by the behaviour of `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatio {
    pub x: u64,
    pub split: f64,
    pub inert: f64,
    pub ramified: f64,
    pub total: f64,
    /// `split / total`; `None` when the prime range is empty.
    pub ratio: Option<f64>,
    /// Fixed-point sums; `split + inert + ramified == total` exactly.
    pub split_fixed: u128,
    pub inert_fixed: u128,
    pub ramified_fixed: u128,
    pub total_fixed: u128,
}

fn range_for(x: u64) -> Result<u64> {
    let hi = x.checked_mul(x).filter(|&h| h <= MAX_RANGE);
    hi.ok_or_else(|| {
        Error::bounds(format!(
            "X^2 for X = {x} exceeds the sieve limit {MAX_RANGE}"
        ))
    })
}

/// Split ratio using a prebuilt prime table that reaches `X^2`.
pub fn split_ratio_with(table: &PrimeTable, disc: &Discriminant, x: u64) -> Result<SplitRatio> {
    let hi = range_for(x)?;
    if table.limit < hi {
        return Err(Error::bounds(format!(
            "prime table stops at {} below X^2 = {hi}",
            table.limit
        )));
    }
    let (mut s, mut i, mut r, mut t) = (0u128, 0u128, 0u128, 0u128);
    for &p in table.range(x, hi) {
        let v = recip_fixed(p);
        t += v;
        match disc.chi(p as i64) {
            1 => s += v,
            0 => r += v,
            _ => i += v,
        }
    }
    Ok(SplitRatio {
        x,
        split: fixed_to_f64(s),
        inert: fixed_to_f64(i),
        ramified: fixed_to_f64(r),
        total: fixed_to_f64(t),
        ratio: (t > 0).then(|| s as f64 / t as f64),
        split_fixed: s,
        inert_fixed: i,
        ramified_fixed: r,
        total_fixed: t,
    })
}

pub fn split_ratio(disc: &Discriminant, x: u64) -> Result<SplitRatio> {
    let hi = range_for(x)?;
    split_ratio_with(&sieve_primes(hi.max(2))?, disc, x)
}

/// Smooth weight equal to 1 on `[1 + eps, 2 - eps]` and 0 outside `[1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWindow {
    pub eps: f64,
}

/// Default transition width.
pub const DEFAULT_EPS: f64 = 0.05;

fn bump_edge(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth step from 0 at `u <= 0` to 1 at `u >= 1`.
fn smooth_step(u: f64) -> f64 {
    let a = bump_edge(u);
    let b = bump_edge(1.0 - u);
    if a + b == 0.0 {
        return 0.0;
    }
    a / (a + b)
}

impl SmoothWindow {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(Error::domain(format!(
                "window width {eps} must lie in (0, 1/4)"
            )));
        }
        Ok(SmoothWindow { eps })
    }

    pub fn eval(&self, t: f64) -> f64 {
        smooth_step((t - 1.0) / self.eps) * smooth_step((2.0 - t) / self.eps)
    }
}

impl Default for SmoothWindow {
    fn default() -> Self {
        SmoothWindow { eps: DEFAULT_EPS }
    }
}

/// The character twisting a prime sum.
#[derive(Debug, Clone, PartialEq)]
pub enum CharSpec {
    /// Every prime weighted by 1.
    Principal,
    /// `chi_{-D}(p)` for a negative fundamental discriminant.
    Kronecker(Discriminant),
    /// A real periodic weight `values[p mod q]`.
    Periodic { q: u64, values: Vec<f64> },
}

impl CharSpec {
    fn at(&self, p: u64) -> f64 {
        match self {
            CharSpec::Principal => 1.0,
            CharSpec::Kronecker(d) => kronecker(d.value(), p as i64) as f64,
            CharSpec::Periodic { q, values } => values[(p % q) as usize],
        }
    }

    pub fn periodic(q: u64, values: Vec<f64>) -> Result<Self> {
        if q == 0 || values.len() as u64 != q {
            return Err(Error::domain("periodic character needs exactly q values"));
        }
        Ok(CharSpec::Periodic { q, values })
    }
}

/// Which prime weight multiplies `chi(p) W(log p / log X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeWeight {
    /// `1/p`.
    Harmonic,
    /// `p^{-1 - 1/log X}`.
    Damped,
}

/// Window applied to `t = log p / log X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Smooth(SmoothWindow),
    /// Indicator of `[1, 2]`.
    Sharp,
}

impl Cutoff {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Cutoff::Smooth(w) => w.eval(t),
            Cutoff::Sharp => f64::from(u8::from((1.0..=2.0).contains(&t))),
        }
    }
}

/// `sum_p chi(p) w(p) W(log p / log X)` over `X <= p <= X^2`, summed in increasing `p`.
pub fn smooth_char_sum_with(
    table: &PrimeTable,
    chi: &CharSpec,
    x: u64,
    cutoff: Cutoff,
    weight: PrimeWeight,
) -> Result<f64> {
    let hi = range_for(x)?;
    if table.limit < hi {
        return Err(Error::bounds(format!(
            "prime table stops at {} below X^2 = {hi}",
            table.limit
        )));
    }
    if x < 2 {
        return Err(Error::domain("X must be at least 2"));
    }
    let lx = (x as f64).ln();
    let mut s = 0.0;
    for &p in table.range(x, hi) {
        let lp = (p as f64).ln();
        let w = match weight {
            PrimeWeight::Harmonic => 1.0 / p as f64,
            PrimeWeight::Damped => (-(1.0 + 1.0 / lx) * lp).exp(),
        };
        s += chi.at(p) * w * cutoff.eval(lp / lx);
    }
    Ok(s)
}

pub fn smooth_char_sum(chi: &CharSpec, x: u64, w: SmoothWindow) -> Result<f64> {
    let hi = range_for(x)?;
    smooth_char_sum_with(
        &sieve_primes(hi.max(2))?,
        chi,
        x,
        Cutoff::Smooth(w),
        PrimeWeight::Harmonic,
    )
}

/// `sum_p W(log p / log X) / p`, written independently of the character path.
pub fn windowed_harmonic_sum(table: &PrimeTable, x: u64, w: SmoothWindow) -> Result<f64> {
    let hi = range_for(x)?;
    let lx = (x as f64).ln();
    Ok(table
        .range(x, hi)
        .iter()
        .map(|&p| w.eval((p as f64).ln() / lx) / p as f64)
        .sum())
}

/// `(Delta / eta)^3 (e^{-Delta} + c_K Delta T^{-K})`.
pub fn zero_theorem_rhs(delta: f64, t: f64, eta: f64, k: u32, c_k: f64) -> Result<f64> {
    if !(delta >= 1.0 && t >= 1.0 && eta > 0.0 && eta <= 0.5 && c_k > 0.0) {
        return Err(Error::domain(
            "need Delta >= 1, T >= 1, 0 < eta <= 1/2 and c_K > 0",
        ));
    }
    Ok((delta / eta).powi(3) * ((-delta).exp() + c_k * delta * t.powi(-(k as i32))))
}

/// The parameter choice `Delta = 10 log(1/eta)`, `T = 1/eta`.
pub fn suggested_parameters(eta: f64) -> (f64, f64) {
    (10.0 * (1.0 / eta).ln(), 1.0 / eta)
}

/// Zeros `beta + i gamma` of an L-function of modulus `q`, read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroData {
    pub q: u64,
    pub zeros: Vec<(f64, f64)>,
    pub provenance: String,
}

impl ZeroData {
    pub fn new(q: u64, zeros: Vec<(f64, f64)>, provenance: &str) -> Result<Self> {
        if let Some(z) = zeros
            .iter()
            .find(|(b, g)| !(*b > 0.0 && *b < 1.0 && g.is_finite()))
        {
            return Err(Error::data(format!(
                "zero {} + {}i lies outside the critical strip",
                z.0, z.1
            )));
        }
        Ok(ZeroData {
            q,
            zeros,
            provenance: provenance.to_string(),
        })
    }

    /// CSV with header `q,beta,gamma`; every row must carry the same modulus.
    pub fn read_csv<R: Read>(r: R, provenance: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let header = rdr
            .headers()
            .map_err(|e| Error::data(format!("line 1: {e}")))?
            .clone();
        if header.iter().collect::<Vec<_>>() != ["q", "beta", "gamma"] {
            return Err(Error::data("line 1: header must be q,beta,gamma"));
        }
        let mut q = None;
        let mut zeros = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::data(format!("line {line}: {e}")))?;
            let bad = || Error::data(format!("line {line}: expected q,beta,gamma numbers"));
            let qq: u64 = rec[0].parse().map_err(|_| bad())?;
            let b: f64 = rec[1].parse().map_err(|_| bad())?;
            let g: f64 = rec[2].parse().map_err(|_| bad())?;
            if *q.get_or_insert(qq) != qq {
                return Err(Error::data(format!("line {line}: modulus changes")));
            }
            zeros.push((b, g));
        }
        let q = q.ok_or_else(|| Error::data("zero file has no rows"))?;
        Self::new(q, zeros, provenance)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        Self::read_csv(f, &path.display().to_string())
    }
}

/// Zeros in the disc `|1 + it - rho| <= r`.
pub fn zero_census(zd: &ZeroData, r: f64, t: f64) -> usize {
    zd.zeros
        .iter()
        .filter(|(b, g)| (1.0 - b).hypot(t - g) <= r)
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFreeReport {
    pub sigma_min: f64,
    pub t_max: f64,
    /// First zero inside the region, if any.
    pub offending: Option<(f64, f64)>,
}

impl ZeroFreeReport {
    pub fn passed(&self) -> bool {
        self.offending.is_none()
    }
}

/// Checks that no zero lies in `Re s >= 1 - 20 psi log psi / log D`, `|Im s| <= 2 psi^2 / log D`.
pub fn zero_free_check(zd: &ZeroData, psi: f64, big_d: f64) -> Result<ZeroFreeReport> {
    if !(psi >= 1.0 && big_d > 1.0) {
        return Err(Error::domain("need psi >= 1 and D > 1"));
    }
    let ld = big_d.ln();
    let sigma_min = 1.0 - 20.0 * psi * psi.ln() / ld;
    let t_max = 2.0 * psi * psi / ld;
    let offending = zd
        .zeros
        .iter()
        .copied()
        .find(|&(b, g)| b >= sigma_min && g.abs() <= t_max);
    Ok(ZeroFreeReport {
        sigma_min,
        t_max,
        offending,
    })
}
