//! The mollifier length schedule `l_1 > l_2 > ...`, with every floor of a logarithm decided
//! by interval bounds that are refined until the floor is unambiguous.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};

const MIN_BITS: u32 = 64;
const MAX_BITS: u32 = 8192;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Rounds down (`up = false`) or up to a multiple of `2^-bits`.
fn round_dyadic(x: &BigRational, bits: u32, up: bool) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() };
    BigRational::new(n.to_integer(), scale)
}

/// Enclosure of `atanh(y)` for `|y| <= 1/3` with error below `2^-bits`.
fn atanh_bounds(y: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let y2 = y * y;
    let mut term = y.clone();
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    // |y|^(2k+1) <= 3^-(2k+1); stop once that is below 2^-(bits+2)
    let n = (bits as u64 + 4) / 3 + 2;
    while k < n {
        sum += &term / BigRational::from_integer((2 * k + 1).into());
        term *= &y2;
        k += 1;
        if k.is_multiple_of(8) {
            // keep the denominators from growing without bound
            sum = round_dyadic(&sum, bits + 16, false);
        }
    }
    // the rounding loses at most n * 2^-(bits+16); the tail is |y|^(2n+1) / ((2n+1)(1 - y^2))
    let tail =
        term.abs() / (BigRational::from_integer((2 * n + 1).into()) * (BigRational::one() - &y2));
    let slack = tail + BigRational::new(BigInt::from(n + 1), BigInt::one() << (bits + 16));
    (
        round_dyadic(&(&sum - &slack), bits, false),
        round_dyadic(&(&sum + &slack), bits, true),
    )
}

/// Enclosure `[lo, hi]` of `ln x` for a positive rational `x`, of width about `2^-bits`.
pub fn ln_bounds(x: &BigRational, bits: u32) -> Result<(BigRational, BigRational)> {
    if !x.is_positive() {
        return Err(Error::domain("logarithm of a non-positive number"));
    }
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow = |e: i64| {
        let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs());
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    let mut m = x / pow(k);
    // bring m into [2/3, 4/3] so that |(m - 1)/(m + 1)| <= 1/7
    while m > rat(4, 3) {
        m /= rat(2, 1);
        k += 1;
    }
    while m < rat(2, 3) {
        m *= rat(2, 1);
        k -= 1;
    }
    let y = (&m - BigRational::one()) / (&m + BigRational::one());
    if k == 0 && y.is_zero() {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let (mlo, mhi) = atanh_bounds(&y, bits + 2);
    let (l2lo, l2hi) = atanh_bounds(&rat(1, 3), bits + extra + 2);
    let two = rat(2, 1);
    let kr = BigRational::from_integer(k.into());
    let (a, b) = if k >= 0 {
        (&kr * &l2lo, &kr * &l2hi)
    } else {
        (&kr * &l2hi, &kr * &l2lo)
    };
    Ok((&two * (a + mlo), &two * (b + mhi)))
}

/// `floor(g)` where `g(bits)` encloses a real that is not an integer, or is an integer
/// exactly hit by both bounds.
fn decide_floor(g: impl Fn(u32) -> Result<(BigRational, BigRational)>) -> Result<BigInt> {
    let mut bits = MIN_BITS;
    while bits <= MAX_BITS {
        let (lo, hi) = g(bits)?;
        let (a, b) = (lo.floor().to_integer(), hi.floor().to_integer());
        if a == b {
            return Ok(a);
        }
        bits *= 2;
    }
    Err(Error::Convergence(format!(
        "floor undecided at {MAX_BITS} bits"
    )))
}

fn scale_interval(
    s: &BigRational,
    (lo, hi): (BigRational, BigRational),
) -> (BigRational, BigRational) {
    if s.is_negative() {
        (s * hi, s * lo)
    } else {
        (s * lo, s * hi)
    }
}

/// `2 floor(30 B^2 ln l)`.
pub fn next_ell(ell: u64, b: &BigRational) -> Result<u64> {
    if ell == 0 {
        return Err(Error::domain("log of zero length"));
    }
    let s = b * b * rat(30, 1);
    let x = BigRational::from_integer(ell.into());
    let f = decide_floor(|bits| Ok(scale_interval(&s, ln_bounds(&x, bits)?)))?;
    let f = f.max(BigInt::zero());
    (f * 2u32)
        .to_u64()
        .ok_or_else(|| Error::bounds("schedule length exceeds 64 bits"))
}

/// Where the top level `L_0` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Level0 {
    /// A synthetic exact value standing in for `log log D`.
    Exact(BigRational),
    /// `log log D` for the given `D`.
    LogLog(u64),
}

fn level0_bounds(l0: &Level0, bits: u32) -> Result<(BigRational, BigRational)> {
    match l0 {
        Level0::Exact(v) => Ok((v.clone(), v.clone())),
        Level0::LogLog(d) => {
            if *d < 3 {
                return Err(Error::domain("log log D needs D >= 3"));
            }
            let (a, b) = ln_bounds(&BigRational::from_integer((*d).into()), bits + 8)?;
            Ok((ln_bounds(&a, bits)?.0, ln_bounds(&b, bits)?.1))
        }
    }
}

/// Whether the size constraint on `c` is enforced or only reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    Strict,
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleFlags {
    /// `0 < c <= 1/16`.
    pub c_small: bool,
    /// `(70 B^2 log c^{-1/2})^2 <= c^{-1/2}`.
    pub c_log: bool,
    /// `l_j > l_{j+1}^2` for every `j <= R`.
    pub squares: bool,
    /// `sum 1/l_j < 2 sqrt c`.
    pub reciprocal_sum: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub b: BigRational,
    pub c: BigRational,
    pub c0: u64,
    pub level0: Level0,
    pub mode: ScheduleMode,
    /// `l_1, ..., l_R`.
    pub ells: Vec<u64>,
    /// `l_{R+1}`.
    pub next: u64,
    /// `1 / l_j^2`, the exponents of `D` bounding the prime intervals `P_j`.
    pub exponents: Vec<BigRational>,
    pub reciprocal_sum: BigRational,
    pub flags: ScheduleFlags,
}

impl Schedule {
    pub fn r(&self) -> usize {
        self.ells.len()
    }

    /// Prime interval of `P_j` (1-based) for a given `D`: `[C0, D^{1/l_1^2}]`, then
    /// `(D^{1/l_{j-1}^2}, D^{1/l_j^2}]`, as integer bounds `lo <= p <= hi`.
    pub fn prime_interval(&self, j: usize, big_d: u64) -> Result<(u64, u64)> {
        if j == 0 || j > self.r() {
            return Err(Error::domain(format!("block {j} outside 1..={}", self.r())));
        }
        let root = |l: u64| -> u64 {
            // D < 2^64, so D^(1/e) < 2 once e >= 64
            match u32::try_from(l as u128 * l as u128) {
                Ok(e) if e < 64 => BigUint::from(big_d)
                    .nth_root(e)
                    .to_u64()
                    .unwrap_or(u64::MAX),
                _ => 1,
            }
        };
        let hi = root(self.ells[j - 1]);
        let lo = if j == 1 {
            self.c0
        } else {
            root(self.ells[j - 2]) + 1
        };
        Ok((lo, hi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let flags = &self.flags;
        json!({
            "B": self.b.to_string(),
            "c": self.c.to_string(),
            "C0": self.c0,
            "mode": format!("{:?}", self.mode).to_lowercase(),
            "ells": self.ells,
            "next": self.next,
            "R": self.r(),
            "exponents": self.exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "reciprocal_sum": self.reciprocal_sum.to_string(),
            "flags": {
                "c_small": flags.c_small,
                "c_log": flags.c_log,
                "squares": flags.squares,
                "reciprocal_sum": flags.reciprocal_sum,
            },
        })
    }
}

/// `(35 B^2 ln(1/c))^4 <= 1/c`, which is the squared form of the log constraint on `c`.
fn c_log_holds(b: &BigRational, c: &BigRational) -> Result<bool> {
    let inv = c.recip();
    let s = b * b * rat(35, 1);
    let mut bits = MIN_BITS;
    while bits <= MAX_BITS {
        let (lo, hi) = scale_interval(&s, ln_bounds(&inv, bits)?);
        let (alo, ahi) = if lo.is_negative() && hi.is_positive() {
            (BigRational::zero(), lo.abs().max(hi.abs()))
        } else {
            (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()))
        };
        if num_traits::pow(ahi, 4) <= inv {
            return Ok(true);
        }
        if num_traits::pow(alo, 4) > inv {
            return Ok(false);
        }
        bits *= 2;
    }
    Ok(false)
}

/// Builds the schedule. The strict mode rejects parameters that violate either size
/// constraint on `c`; the relaxed mode only flags them.
pub fn schedule(
    level0: Level0,
    b: BigRational,
    c: BigRational,
    c0: u64,
    mode: ScheduleMode,
) -> Result<Schedule> {
    if b < BigRational::one() {
        return Err(Error::domain("B must be at least 1"));
    }
    if !c.is_positive() {
        return Err(Error::domain("c must be positive"));
    }
    let c_small = c <= rat(1, 16);
    let c_log = c_log_holds(&b, &c)?;
    if mode == ScheduleMode::Strict && !(c_small && c_log) {
        let which = if !c_small {
            "c <= 1/16"
        } else {
            "(70 B^2 log c^(-1/2))^2 <= c^(-1/2)"
        };
        return Err(Error::domain(format!(
            "strict schedule rejects c = {c}: {which} fails"
        )));
    }
    let s = &b * &b * rat(30, 1);
    let top = decide_floor(|bits| Ok(scale_interval(&s, level0_bounds(&level0, bits)?)))?
        .max(BigInt::zero());
    let l1 = (top * 2u32)
        .to_u64()
        .ok_or_else(|| Error::bounds("l_1 exceeds 64 bits"))?;
    // l > 1/sqrt(c)  <=>  l^2 c > 1
    let above =
        |l: u64| BigRational::from_integer(BigInt::from(l).pow(2)) * &c > BigRational::one();
    let mut ells = Vec::new();
    let mut cur = l1;
    while above(cur) {
        if let Some(&prev) = ells.last() {
            if cur >= prev {
                return Err(Error::domain(format!(
                    "schedule stalls at l = {cur} above 1/sqrt(c)"
                )));
            }
        }
        ells.push(cur);
        cur = next_ell(cur, &b)?;
    }
    if ells.is_empty() {
        return Err(Error::domain(format!(
            "L0 too small: l_1 = {l1} does not exceed 1/sqrt(c)"
        )));
    }
    let next = cur;
    let chain: Vec<u64> = ells.iter().copied().chain([next]).collect();
    let squares = chain
        .windows(2)
        .all(|w| (w[0] as u128) > (w[1] as u128).pow(2));
    let reciprocal_sum: BigRational = ells
        .iter()
        .map(|&l| rat(1, 1) / BigRational::from_integer(l.into()))
        .sum();
    let reciprocal_ok = &reciprocal_sum * &reciprocal_sum < &c * rat(4, 1);
    let exponents = ells
        .iter()
        .map(|&l| BigRational::new(BigInt::one(), BigInt::from(l).pow(2)))
        .collect();
    debug_assert!(ells.iter().all(|l| l.is_even()));
    Ok(Schedule {
        b,
        c,
        c0,
        level0,
        mode,
        ells,
        next,
        exponents,
        reciprocal_sum,
        flags: ScheduleFlags {
            c_small,
            c_log,
            squares,
            reciprocal_sum: reciprocal_ok,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: &BigRational) -> f64 {
        x.to_f64().unwrap()
    }

    #[test]
    fn log_enclosures() {
        for (n, d) in [
            (2i64, 1i64),
            (10, 1),
            (1, 7),
            (1_000_000, 1),
            (600_000_000, 1),
            (355, 113),
            (1, 1),
        ] {
            let x = rat(n, d);
            let want = (n as f64 / d as f64).ln();
            for bits in [64, 200] {
                let (lo, hi) = ln_bounds(&x, bits).unwrap();
                assert!(lo <= hi);
                assert!(f(&lo) <= want + 1e-15 && f(&hi) >= want - 1e-15, "{n}/{d}");
                assert!(f(&(&hi - &lo)) < 1e-17, "{n}/{d} width");
            }
        }
        // ln 2 to 40 digits
        let (lo, hi) = ln_bounds(&rat(2, 1), 160).unwrap();
        let ln2 = "0.6931471805599453094172321214581765680755";
        let scale = BigRational::from_integer(BigInt::from(10u32).pow(40));
        let digits = |x: &BigRational| (x * &scale).floor().to_integer().to_string();
        assert_eq!(digits(&lo), ln2[2..].to_string());
        assert_eq!(digits(&hi), ln2[2..].to_string());
        assert!(ln_bounds(&rat(0, 1), 64).is_err());
    }

    #[test]
    fn next_lengths() {
        let one = rat(1, 1);
        assert_eq!(next_ell(1_000_000, &one).unwrap(), 828);
        assert!(1_000_000u64 > 828 * 828);
        assert_eq!(next_ell(600_000_000, &one).unwrap(), 1212);
        assert_eq!(next_ell(1, &one).unwrap(), 0);
        // 30 ln 2 = 20.79..., 30 * 4 ln 2 = 83.17...
        assert_eq!(next_ell(2, &one).unwrap(), 40);
        assert_eq!(next_ell(2, &rat(2, 1)).unwrap(), 166);
    }

    #[test]
    fn strict_rejects_sixteenth() {
        let r = schedule(
            Level0::Exact(rat(10_000_000, 1)),
            rat(1, 1),
            rat(1, 16),
            11,
            ScheduleMode::Strict,
        );
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(!c_log_holds(&rat(1, 1), &rat(1, 16)).unwrap());
        // B = 1 lengths settle near 350, so c = 1/16 never brings them below 1/sqrt(c)
        let stall = schedule(
            Level0::Exact(rat(10, 1)),
            rat(1, 1),
            rat(1, 16),
            11,
            ScheduleMode::Relaxed,
        );
        assert!(matches!(stall, Err(Error::Domain(m)) if m.contains("stalls")));
        let relaxed = schedule(
            Level0::Exact(rat(100, 1)),
            rat(1, 1),
            rat(1, 1_000_000),
            11,
            ScheduleMode::Relaxed,
        )
        .unwrap();
        // 30 ln 6000 = 260.98...
        assert_eq!((relaxed.ells.clone(), relaxed.next), (vec![6000], 520));
        assert!(
            relaxed.flags.c_small
                && !relaxed.flags.c_log
                && !relaxed.flags.squares
                && relaxed.flags.reciprocal_sum
        );
    }

    #[test]
    fn synthetic_full_schedule() {
        let c = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
        assert!(c_log_holds(&rat(1, 1), &c).unwrap());
        let s = schedule(
            Level0::Exact(rat(10_000_000, 1)),
            rat(1, 1),
            c.clone(),
            11,
            ScheduleMode::Strict,
        )
        .unwrap();
        assert_eq!(s.ells, vec![600_000_000]);
        assert_eq!(s.next, 1212);
        assert!(s.flags.c_small && s.flags.c_log && s.flags.squares && s.flags.reciprocal_sum);
        assert_eq!(
            s.exponents[0],
            BigRational::new(BigInt::one(), BigInt::from(600_000_000u64).pow(2))
        );
        let big = schedule(
            Level0::Exact(rat(1_000_000_000_000, 1)),
            rat(1, 1),
            c,
            11,
            ScheduleMode::Strict,
        )
        .unwrap();
        assert_eq!(big.ells, vec![60_000_000_000_000]);
        assert_eq!(big.next, 2 * (30.0 * 6e13f64.ln()).floor() as u64);
        assert!(big.flags.squares && big.flags.reciprocal_sum);
    }

    #[test]
    fn small_level_is_rejected() {
        let c = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
        let r = schedule(
            Level0::Exact(rat(3, 1)),
            rat(1, 1),
            c,
            11,
            ScheduleMode::Strict,
        );
        assert!(matches!(r, Err(Error::Domain(_))));
        // 30 ln ln 10^6 = 78.77..., so l_1 = 156 sits below 1/sqrt(c) = 200
        let d = schedule(
            Level0::LogLog(1_000_000),
            rat(1, 1),
            rat(1, 40_000),
            11,
            ScheduleMode::Relaxed,
        );
        assert!(matches!(d, Err(Error::Domain(m)) if m.contains("l_1 = 156")));
        let (lo, hi) = level0_bounds(&Level0::LogLog(1_000_000), 64).unwrap();
        assert!(f(&lo) < 2.6257920 && f(&hi) > 2.6257919);
    }

    #[test]
    fn prime_intervals() {
        let c = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
        let s = schedule(
            Level0::Exact(rat(10_000_000, 1)),
            rat(1, 1),
            c,
            11,
            ScheduleMode::Strict,
        )
        .unwrap();
        // D^(1/l_1^2) < 2 for every 64-bit D, so P_1 is empty
        assert_eq!(s.prime_interval(1, u64::MAX).unwrap(), (11, 1));
        assert!(s.prime_interval(2, 100).is_err());
        assert!(s.to_json()["flags"]["squares"].as_bool().unwrap());
    }
}
