//! Exact q-expansions of eta products and the Hecke eigenvalues read off them.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arithbase::{factor, gcd, is_prime};
use crate::error::{Error, Result};
use crate::ntt;

/// Default number of coefficients for the built-in sources.
pub const DEFAULT_PRECISION: usize = 100_000;

/// Range over which built-in sources are Hecke-verified on construction.
pub const HECKE_CHECK_RANGE: usize = 2000;

/// q-expansion `sum_{n >= 1} a_n q^n`; `coeffs[n] = a_n` and `coeffs[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.first().is_some_and(|a| !a.is_zero()) {
            return Err(Error::domain("cusp form expansions have a_0 = 0"));
        }
        Ok(QSeries { coeffs })
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn a(&self, n: usize) -> Option<&BigInt> {
        if n == 0 {
            return None;
        }
        self.coeffs.get(n)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [BigInt] {
        &mut self.coeffs
    }
}

/// `prod_{n >= 1} (1 - q^n)` up to `q^len-1` by the pentagonal number theorem.
fn pentagonal(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = BigInt::one();
    for k in 1i64.. {
        let e1 = (k * (3 * k - 1) / 2) as usize;
        if e1 >= len {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out[e1] += sign;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e2 < len {
            out[e2] += sign;
        }
    }
    out
}

/// Coefficients of `prod_m eta(m tau)^{r_m}` through `q^precision`.
pub fn eta_product(spec: &[(u32, u32)], precision: usize) -> Result<QSeries> {
    if spec.is_empty() || spec.iter().any(|&(m, r)| m == 0 || r == 0) {
        return Err(Error::domain(
            "eta product needs positive levels and exponents",
        ));
    }
    let weight_sum: u64 = spec.iter().map(|&(m, r)| m as u64 * r as u64).sum();
    if !weight_sum.is_multiple_of(24) {
        return Err(Error::domain(format!(
            "sum of m r_m = {weight_sum} is not divisible by 24"
        )));
    }
    let offset = (weight_sum / 24) as usize;
    let mut coeffs = vec![BigInt::zero(); precision + 1];
    if offset > precision {
        return Ok(QSeries { coeffs });
    }
    let len = precision - offset + 1;
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for &(m, r) in spec {
        let base = pentagonal(len.div_ceil(m as usize));
        let mut scaled = vec![BigInt::zero(); len];
        for (i, c) in base.into_iter().enumerate() {
            if i * (m as usize) < len {
                scaled[i * m as usize] = c;
            }
        }
        prod = ntt::multiply(&prod, &ntt::power(&scaled, r, len)?, len)?;
    }
    for (i, c) in prod.into_iter().enumerate() {
        coeffs[i + offset] = c;
    }
    Ok(QSeries { coeffs })
}

#[derive(Debug, Clone, PartialEq)]
pub enum HeckeFailure {
    /// `a_{mn} != a_m a_n` for coprime `m < n`.
    Multiplicative { m: usize, n: usize },
    /// The prime-power recursion fails at `a_{p^{j+1}}`.
    PrimePower { p: usize, j: u32 },
    /// `a_1 != 1`.
    Normalization,
}

impl fmt::Display for HeckeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeFailure::Multiplicative { m, n } => write!(f, "a({m}*{n}) != a({m}) a({n})"),
            HeckeFailure::PrimePower { p, j } => {
                write!(f, "prime-power recursion fails at {p}^{}", j + 1)
            }
            HeckeFailure::Normalization => write!(f, "a(1) != 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeckeReport {
    pub range: usize,
    pub pairs_checked: usize,
    pub powers_checked: usize,
    pub failure: Option<HeckeFailure>,
}

impl HeckeReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks multiplicativity on coprime pairs with `mn <= range` and the
/// prime-power recursion (with `p^{k-1}` dropped at primes dividing the level).
pub fn hecke_verify(s: &QSeries, level: u64, weight: u32, range: usize) -> Result<HeckeReport> {
    if s.precision() < range {
        return Err(Error::data(format!(
            "series precision {} below check range {range}",
            s.precision()
        )));
    }
    let a = |n: usize| &s.coeffs[n];
    let mut report = HeckeReport {
        range,
        pairs_checked: 0,
        powers_checked: 0,
        failure: None,
    };
    if range >= 1 && !a(1).is_one() {
        report.failure = Some(HeckeFailure::Normalization);
        return Ok(report);
    }
    for m in 2..=range {
        for n in m + 1..=range / m {
            if gcd(m as i64, n as i64) != 1 {
                continue;
            }
            report.pairs_checked += 1;
            if *a(m * n) != a(m) * a(n) {
                report.failure = Some(HeckeFailure::Multiplicative { m, n });
                return Ok(report);
            }
        }
    }
    for p in 2..=range {
        if !is_prime(p as u64) {
            continue;
        }
        let ramified = level.is_multiple_of(p as u64);
        let pk1 = BigInt::from(p).pow(weight - 1);
        let mut j = 1u32;
        while let Some(next) = p.checked_pow(j + 1).filter(|&q| q <= range) {
            let pj = p.pow(j);
            let prev = p.pow(j - 1);
            let mut expect = a(p) * a(pj);
            if !ramified {
                expect -= &pk1 * a(prev);
            }
            report.powers_checked += 1;
            if *a(next) != expect {
                report.failure = Some(HeckeFailure::PrimePower { p, j });
                return Ok(report);
            }
            j += 1;
        }
    }
    Ok(report)
}

/// Normalized eigenvalue `a_p / p^{(k-1)/2}` with a flag for primes dividing the level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda {
    pub value: f64,
    pub ramified: bool,
}

/// Hecke eigenvalues at primes for one newform.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSource {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    /// Largest `n` such that every prime up to `n` is present.
    pub precision: u64,
    ap: BTreeMap<u64, BigInt>,
    /// Deligne-bound violations found in external tables.
    pub warnings: Vec<String>,
}

fn deligne_ok(a: &BigInt, p: u64, weight: u32) -> bool {
    a * a <= BigInt::from(4) * BigInt::from(p).pow(weight - 1)
}

impl EigenSource {
    /// Wraps a verified eigenform: Hecke relations up to `HECKE_CHECK_RANGE` and the
    /// Deligne bound at every unramified prime in range are checked here.
    pub fn from_series(label: &str, s: &QSeries, level: u64, weight: u32) -> Result<Self> {
        let range = s.precision().min(HECKE_CHECK_RANGE);
        let report = hecke_verify(s, level, weight, range)?;
        if let Some(f) = report.failure {
            return Err(Error::integrity(format!(
                "{label}: not a Hecke eigenform ({f})"
            )));
        }
        let mut ap = BTreeMap::new();
        for p in 2..=s.precision() {
            if is_prime(p as u64) {
                let a = s.coeffs[p].clone();
                if !level.is_multiple_of(p as u64) && !deligne_ok(&a, p as u64, weight) {
                    return Err(Error::integrity(format!(
                        "{label}: Deligne bound fails at p = {p}"
                    )));
                }
                ap.insert(p as u64, a);
            }
        }
        Ok(EigenSource {
            label: label.to_string(),
            level,
            weight,
            precision: s.precision() as u64,
            ap,
            warnings: Vec::new(),
        })
    }

    /// `Delta = eta^24`, level 1, weight 12.
    pub fn delta(precision: usize) -> Result<Self> {
        Self::from_series("delta", &eta_product(&[(1, 24)], precision)?, 1, 12)
    }

    /// `eta(tau)^8 eta(2 tau)^8`, level 2, weight 8.
    pub fn level2(precision: usize) -> Result<Self> {
        Self::from_series("level2", &eta_product(&[(1, 8), (2, 8)], precision)?, 2, 8)
    }

    /// `eta(tau)^4 eta(5 tau)^4`, level 5, weight 4.
    pub fn level5(precision: usize) -> Result<Self> {
        Self::from_series("level5", &eta_product(&[(1, 4), (5, 4)], precision)?, 5, 4)
    }

    /// Built-in source by name: `delta`, `level2` or `level5`.
    pub fn builtin(name: &str, precision: usize) -> Result<Self> {
        match name {
            "delta" => Self::delta(precision),
            "level2" => Self::level2(precision),
            "level5" => Self::level5(precision),
            other => Err(Error::data(format!("unknown eigenvalue source '{other}'"))),
        }
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.level.is_multiple_of(p)
    }

    pub fn ramified_primes(&self) -> Vec<u64> {
        factor(self.level).into_iter().map(|(p, _)| p).collect()
    }

    pub fn a_p(&self, p: u64) -> Result<&BigInt> {
        self.ap.get(&p).ok_or_else(|| {
            Error::data(format!(
                "{}: no eigenvalue for p = {p} (precision {})",
                self.label, self.precision
            ))
        })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.ap.keys().copied()
    }

    pub fn lambda(&self, p: u64) -> Result<Lambda> {
        let a = self.a_p(p)?.to_f64().expect("finite");
        let value = a / (p as f64).powf((self.weight as f64 - 1.0) / 2.0);
        Ok(Lambda {
            value,
            ramified: self.is_ramified(p),
        })
    }

    /// `lambda(p)^2 = a_p^2 / p^{k-1}` exactly.
    pub fn lambda_sq(&self, p: u64) -> Result<BigRational> {
        let a = self.a_p(p)?;
        Ok(BigRational::new(
            a * a,
            BigInt::from(p).pow(self.weight - 1),
        ))
    }

    /// `lambda_1(p) lambda_2(p)` exactly; needs weights of equal parity.
    pub fn lambda_product(&self, other: &EigenSource, p: u64) -> Result<BigRational> {
        let (k1, k2) = (self.weight, other.weight);
        if (k1 + k2) % 2 != 0 {
            return Err(Error::domain(
                "lambda product is irrational for weights of mixed parity",
            ));
        }
        let num = self.a_p(p)? * other.a_p(p)?;
        Ok(BigRational::new(
            num,
            BigInt::from(p).pow((k1 + k2 - 2) / 2),
        ))
    }

    /// CSV with header `label,level,weight,p,a_p`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::data(format!("writing eigenvalue table: {e}"));
        wtr.write_record(["label", "level", "weight", "p", "a_p"])
            .map_err(io)?;
        for (p, a) in &self.ap {
            wtr.write_record([
                self.label.clone(),
                self.level.to_string(),
                self.weight.to_string(),
                p.to_string(),
                a.to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::data(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let header = rdr
            .headers()
            .map_err(|e| Error::data(format!("line 1: {e}")))?
            .clone();
        if header.iter().collect::<Vec<_>>() != ["label", "level", "weight", "p", "a_p"] {
            return Err(Error::data(
                "line 1: header must be label,level,weight,p,a_p",
            ));
        }
        let mut meta: Option<(String, u64, u32)> = None;
        let mut ap = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::data(format!("line {line}: {e}")))?;
            let bad = |what: &str| Error::data(format!("line {line}: bad {what}"));
            let level: u64 = rec[1].parse().map_err(|_| bad("level"))?;
            let weight: u32 = rec[2].parse().map_err(|_| bad("weight"))?;
            let p: u64 = rec[3].parse().map_err(|_| bad("p"))?;
            let a: BigInt = rec[4].parse().map_err(|_| bad("a_p"))?;
            if level == 0 || weight < 2 {
                return Err(bad("level or weight"));
            }
            if !is_prime(p) {
                return Err(Error::data(format!("line {line}: {p} is not prime")));
            }
            let m = (rec[0].to_string(), level, weight);
            match &meta {
                None => meta = Some(m),
                Some(prev) if *prev != m => {
                    return Err(Error::data(format!(
                        "line {line}: label, level and weight must be constant"
                    )))
                }
                _ => {}
            }
            ap.insert(p, a);
        }
        let (label, level, weight) =
            meta.ok_or_else(|| Error::data("eigenvalue table has no rows"))?;
        // precision: every prime up to it is present
        let mut precision = 1;
        let mut expected = 2u64;
        for &p in ap.keys() {
            if p != expected {
                break;
            }
            precision = p;
            expected = (p + 1..)
                .find(|&q| is_prime(q))
                .expect("primes are infinite");
        }
        let warnings = ap
            .iter()
            .filter(|(&p, a)| level % p != 0 && !deligne_ok(a, p, weight))
            .map(|(p, _)| format!("Deligne bound exceeded at p = {p}"))
            .collect();
        Ok(EigenSource {
            label,
            level,
            weight,
            precision,
            ap,
            warnings,
        })
    }
}

/// `a_p / p^{(k-1)/2}`.
pub fn normalized_lambda(s: &EigenSource, p: u64) -> Result<Lambda> {
    s.lambda(p)
}

/// Reads an eigenvalue table from a CSV file.
pub fn load_table(path: &Path) -> Result<EigenSource> {
    let f =
        std::fs::File::open(path).map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    EigenSource::read_csv(f)
}

/// Fraction of primes `p <= x`, unramified, with `|lambda(p)| <= eps`.
pub fn small_lambda_fraction(s: &EigenSource, x: u64, eps: f64) -> Result<f64> {
    if x > s.precision {
        return Err(Error::data(format!(
            "{}: precision {} below {x}",
            s.label, s.precision
        )));
    }
    let mut total = 0usize;
    let mut small = 0usize;
    for p in s.primes().take_while(|&p| p <= x) {
        if s.is_ramified(p) {
            continue;
        }
        total += 1;
        if s.lambda(p)?.value.abs() <= eps {
            small += 1;
        }
    }
    Ok(small as f64 / total.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_delta(n: usize) -> Vec<BigInt> {
        // prod (1 - q^k)^24 by repeated multiplication by each (1 - q^k)
        let mut c = vec![BigInt::zero(); n];
        c[0] = BigInt::one();
        for k in 1..n {
            for _ in 0..24 {
                for i in (k..n).rev() {
                    let t = c[i - k].clone();
                    c[i] -= t;
                }
            }
        }
        let mut out = vec![BigInt::zero(); n + 1];
        for i in 0..n {
            out[i + 1] = c[i].clone();
        }
        out
    }

    #[test]
    fn delta_coefficients() {
        let s = eta_product(&[(1, 24)], 10).unwrap();
        let a = |n| s.a(n).unwrap().to_i64().unwrap();
        assert_eq!((a(1), a(2), a(3), a(5)), (1, -24, 252, 4830));
        assert_eq!(s.coeffs(), &naive_delta(30)[..11]);
        let s30 = eta_product(&[(1, 24)], 29).unwrap();
        assert_eq!(s30.coeffs(), &naive_delta(29)[..]);
    }

    #[test]
    fn offset_must_be_integral() {
        assert!(eta_product(&[(1, 4)], 10).is_err());
        assert!(eta_product(&[(1, 0), (1, 24)], 10).is_err());
    }

    #[test]
    fn hecke_on_builtin_forms() {
        let delta = eta_product(&[(1, 24)], 2000).unwrap();
        assert!(hecke_verify(&delta, 1, 12, 2000).unwrap().passed());
        let l2 = eta_product(&[(1, 8), (2, 8)], 2000).unwrap();
        let r = hecke_verify(&l2, 2, 8, 2000).unwrap();
        assert!(r.passed() && r.pairs_checked > 1000);
        assert_eq!(l2.a(2).unwrap().pow(2), BigInt::from(64));
        let l5 = eta_product(&[(1, 4), (5, 4)], 2000).unwrap();
        assert!(hecke_verify(&l5, 5, 4, 2000).unwrap().passed());
        assert_eq!(l5.a(5).unwrap().pow(2), BigInt::from(25));
    }

    #[test]
    fn corrupted_series_fails_at_first_pair() {
        let mut s = eta_product(&[(1, 24)], 100).unwrap();
        s.coeffs_mut()[6] += 1;
        let r = hecke_verify(&s, 1, 12, 100).unwrap();
        assert_eq!(r.failure, Some(HeckeFailure::Multiplicative { m: 2, n: 3 }));
        let mut s = eta_product(&[(1, 24)], 100).unwrap();
        s.coeffs_mut()[8] += 1;
        let r = hecke_verify(&s, 1, 12, 100).unwrap();
        assert_eq!(r.failure, Some(HeckeFailure::Multiplicative { m: 3, n: 8 }));
        assert!(EigenSource::from_series("bad", &s, 1, 12).is_err());
        // a range too short for any coprime pair isolates the prime-power check
        let r = hecke_verify(&s, 1, 12, 8).unwrap();
        assert_eq!(r.failure, Some(HeckeFailure::PrimePower { p: 2, j: 2 }));
    }

    #[test]
    fn normalized_values() {
        let d = EigenSource::delta(200).unwrap();
        let l = normalized_lambda(&d, 2).unwrap();
        assert!((l.value + 0.530_330).abs() < 1e-6 && !l.ramified);
        let l2 = EigenSource::level2(2000).unwrap();
        let l5 = EigenSource::level5(2000).unwrap();
        for src in [&d, &l2, &l5] {
            for p in src.primes().filter(|&p| !src.is_ramified(p)) {
                assert!(src.lambda(p).unwrap().value.abs() <= 2.0 + 1e-12);
            }
        }
        let r2 = l2.lambda(2).unwrap();
        assert!(r2.ramified && (r2.value.abs() - 0.5f64.sqrt()).abs() < 1e-14);
        let r5 = l5.lambda(5).unwrap();
        assert!((r5.value.abs() - 0.2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(d.lambda(211), Err(Error::Data(_))));
        let exact = l2.lambda_product(&l5, 7).unwrap().to_f64().unwrap();
        assert!((exact - l2.lambda(7).unwrap().value * l5.lambda(7).unwrap().value).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let d = EigenSource::delta(500).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = EigenSource::read_csv(&buf[..]).unwrap();
        assert_eq!(back.precision, 499);
        for p in d.primes() {
            assert_eq!(back.lambda(p).unwrap(), d.lambda(p).unwrap());
        }
        assert!(back.lambda(503).is_err());
        let bad_header = "label,level,weight,prime,a_p\ndelta,1,12,2,-24\n";
        assert!(
            matches!(EigenSource::read_csv(bad_header.as_bytes()), Err(Error::Data(m)) if m.contains("line 1"))
        );
        let bad_row = "label,level,weight,p,a_p\ndelta,1,12,2,-24\ndelta,1,12,3,x\n";
        assert!(
            matches!(EigenSource::read_csv(bad_row.as_bytes()), Err(Error::Data(m)) if m.contains("line 3"))
        );
        let loud = "label,level,weight,p,a_p\nx,1,12,2,1000000\n";
        assert_eq!(
            EigenSource::read_csv(loud.as_bytes())
                .unwrap()
                .warnings
                .len(),
            1
        );
    }
}
