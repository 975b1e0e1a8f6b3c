//! Exact certificates for the auxiliary polynomial inequalities: the
//! two-variable polynomial `f`, its sum-of-squares witness, the diagonal
//! bounds, the one-variable polynomial `h` and truncated exponentials.

mod poly;
mod sturm;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use poly::{RatPoly1, RatPoly2};
pub use sturm::{sturm_nonneg, SturmCert};

/// Coefficient listings for `u`, the squares making up `c`, `p_1..p_15` and `h`.
pub const DATA: &str = include_str!("../../data/polycert.json");
/// SHA-256 of `DATA`; guards against accidental edits of the transcription.
pub const DATA_SHA256: &str = "d830c3a2f3d51e41ee72581edf503b52585d049cf0e6940ac373439b4635714a";

/// `20^10`, the normalization of `f`.
pub fn scale() -> BigInt {
    BigInt::from(20).pow(10)
}

#[derive(Deserialize)]
struct Square {
    multiplier: String,
    poly: Vec<(u32, u32, String)>,
}

#[derive(Deserialize)]
struct RawData {
    u: Vec<(u32, u32, String)>,
    c_squares: Vec<Square>,
    p: Vec<Vec<(u32, u32, String)>>,
    h: Vec<(usize, String)>,
    h_root: Vec<(usize, String)>,
}

/// Weighted squares `sum m_i q_i^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosWitness {
    pub squares: Vec<(BigRational, RatPoly2)>,
}

impl SosWitness {
    pub fn multipliers_positive(&self) -> bool {
        self.squares.iter().all(|(m, _)| m.is_positive())
    }

    pub fn expand(&self) -> RatPoly2 {
        self.squares
            .iter()
            .fold(RatPoly2::default(), |acc, (m, q)| {
                acc.add(&q.mul(q).scale(m))
            })
    }
}

/// The transcribed polynomial data.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyData {
    pub u: RatPoly2,
    pub c_squares: Vec<(BigRational, RatPoly2)>,
    pub p: Vec<RatPoly2>,
    pub h: RatPoly1,
    pub h_root: RatPoly1,
}

fn parse_rat(s: &str) -> Result<BigRational> {
    s.parse::<BigRational>()
        .map_err(|_| Error::data(format!("bad rational '{s}' in polynomial data")))
}

fn parse_poly2(t: &[(u32, u32, String)]) -> Result<RatPoly2> {
    let terms = t
        .iter()
        .map(|(i, j, c)| Ok(((*i, *j), parse_rat(c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly2::from_terms(terms))
}

fn parse_poly1(t: &[(usize, String)]) -> Result<RatPoly1> {
    let terms = t
        .iter()
        .map(|(k, c)| Ok((*k, parse_rat(c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly1::from_sparse(&terms))
}

/// Parses a data file after checking it against `DATA_SHA256`.
pub fn parse_data(text: &str) -> Result<PolyData> {
    let digest = hex_digest(text.as_bytes());
    if digest != DATA_SHA256 {
        return Err(Error::integrity(format!(
            "polynomial data checksum {digest} != {DATA_SHA256}"
        )));
    }
    let raw: RawData =
        serde_json::from_str(text).map_err(|e| Error::data(format!("polynomial data: {e}")))?;
    if raw.p.len() != 15 {
        return Err(Error::data(format!(
            "expected 15 polynomials p_i, found {}",
            raw.p.len()
        )));
    }
    Ok(PolyData {
        u: parse_poly2(&raw.u)?,
        c_squares: raw
            .c_squares
            .iter()
            .map(|s| Ok((parse_rat(&s.multiplier)?, parse_poly2(&s.poly)?)))
            .collect::<Result<_>>()?,
        p: raw
            .p
            .iter()
            .map(|p| parse_poly2(p))
            .collect::<Result<_>>()?,
        h: parse_poly1(&raw.h)?,
        h_root: parse_poly1(&raw.h_root)?,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn load_data() -> Result<PolyData> {
    parse_data(DATA)
}

impl PolyData {
    pub fn build_u(&self) -> RatPoly2 {
        self.u.clone()
    }

    /// `c = sum m_k s_k^2` over its listed squares.
    pub fn build_c(&self) -> RatPoly2 {
        SosWitness {
            squares: self.c_squares.clone(),
        }
        .expand()
    }

    /// `p_i` for `i` in `1..=15`.
    pub fn build_p(&self, i: usize) -> Result<RatPoly2> {
        self.p
            .get(i.wrapping_sub(1))
            .cloned()
            .ok_or_else(|| Error::bounds(format!("p_{i} does not exist (1..=15)")))
    }

    /// `f = (u(x, y) + u(-x, -y)) / 20^10`.
    pub fn build_f(&self) -> RatPoly2 {
        let s = BigRational::new(BigInt::one(), scale());
        self.u.add(&self.u.reflect()).scale(&s)
    }

    pub fn build_h(&self) -> RatPoly1 {
        self.h.clone()
    }

    /// `Delta(x) = f(x, x)`.
    pub fn build_delta(&self) -> RatPoly1 {
        self.build_f().diagonal()
    }

    /// `2 sum p_i^2 + 6 p_5^2 + c`, with `c` expanded into its listed squares.
    pub fn witness(&self) -> SosWitness {
        let two = BigRational::from_integer(2.into());
        let mut squares: Vec<(BigRational, RatPoly2)> =
            self.p.iter().map(|p| (two.clone(), p.clone())).collect();
        squares.push((BigRational::from_integer(6.into()), self.p[4].clone()));
        squares.extend(self.c_squares.iter().cloned());
        SosWitness { squares }
    }
}

/// `a_{ij} = 0` unless `0 <= i, j <= 4`, or `ij = 0` with `i, j <= 8`.
pub fn support_ok(f: &RatPoly2) -> bool {
    f.terms()
        .all(|(&(i, j), _)| (i <= 4 && j <= 4) || (i * j == 0 && i <= 8 && j <= 8))
}

/// `C(i) = binom(2i, i) - binom(2i, i + 1)`.
pub fn catalan(i: u32) -> BigInt {
    let mut c = BigInt::one();
    for k in 0..i {
        c = c * BigInt::from(2 * (2 * k as u64 + 1)) / BigInt::from(k as u64 + 2);
    }
    c
}

/// `sum a_{2i,2j} C(i) C(j)`.
pub fn catalan_sum2(p: &RatPoly2) -> BigRational {
    p.terms()
        .filter(|(&(i, j), _)| i % 2 == 0 && j % 2 == 0)
        .map(|(&(i, j), a)| a * BigRational::from_integer(catalan(i / 2) * catalan(j / 2)))
        .fold(BigRational::zero(), |s, t| s + t)
}

/// `sum a_{2i} C(i)`.
pub fn catalan_sum1(p: &RatPoly1) -> BigRational {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, a)| a * BigRational::from_integer(catalan(k as u32 / 2)))
        .fold(BigRational::zero(), |s, t| s + t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosReport {
    pub passed: bool,
    pub multipliers_positive: bool,
    pub squares: usize,
    /// `u - witness`; zero exactly when the identity holds.
    pub residual: RatPoly2,
}

pub fn sos_verify(u: &RatPoly2, w: &SosWitness) -> SosReport {
    let residual = u.sub(&w.expand());
    let multipliers_positive = w.multipliers_positive();
    SosReport {
        passed: residual.is_zero() && multipliers_positive,
        multipliers_positive,
        squares: w.squares.len(),
        residual,
    }
}

fn pow10(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(10).pow(e))
}

/// `C(u) = 2 sum |u_ij| / 20^10`, the coefficient bound for `f` and its gradient.
pub fn coefficient_bound(u: &RatPoly2) -> BigRational {
    u.l1_norm() * BigRational::new(2.into(), scale())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearDiagonalReport {
    pub c_u: BigRational,
    pub c_u_expected: BigRational,
    pub small_case: BigRational,
    pub small_expected: BigRational,
    pub large_case: BigRational,
    pub large_expected: BigRational,
    pub floor_cert: SturmCert,
    pub octic_cert: SturmCert,
}

impl NearDiagonalReport {
    pub fn passed(&self) -> bool {
        let one = BigRational::one();
        self.c_u == self.c_u_expected
            && self.c_u < BigRational::from_integer(7.into())
            && self.small_case == self.small_expected
            && self.small_case > one
            && self.large_case == self.large_expected
            && self.large_case > one
            && self.floor_cert.passed
            && self.octic_cert.passed
    }
}

/// Off-diagonal perturbation allowance `10^{-15} * 8 * 7 * (4 + 2 * 6^8)`.
fn perturbation() -> BigRational {
    let six8 = BigRational::from_integer(BigInt::from(6).pow(8));
    (BigRational::from_integer(4.into()) + six8 * BigRational::from_integer(2.into()))
        * BigRational::from_integer(56.into())
        / pow10(15)
}

/// Checks the diagonal bounds `Delta >= 1 + 10^-5` and `Delta >= 10^-6 x^8` by Sturm
/// chains and the two exact case inequalities for `|x - y| <= 10^-15`.
pub fn near_diagonal_cert(data: &PolyData) -> Result<NearDiagonalReport> {
    let delta = data.build_delta();
    let floor = BigRational::one() + BigRational::one() / pow10(5);
    let floor_cert = sturm_nonneg(&delta, &floor)?;
    let mut octic = vec![BigRational::zero(); 9];
    octic[8] = BigRational::one() / pow10(6);
    let octic_cert = sturm_nonneg(&delta.sub(&RatPoly1::new(octic)), &BigRational::zero())?;
    let six8 = BigRational::from_integer(BigInt::from(6).pow(8));
    Ok(NearDiagonalReport {
        c_u: coefficient_bound(&data.u),
        c_u_expected: BigRational::new(1_631_426_159_869i64.into(), 256_000_000_000i64.into()),
        small_case: floor.clone() - perturbation(),
        small_expected: BigRational::new(
            31_250_306_621_337i64.into(),
            31_250_000_000_000i64.into(),
        ),
        large_case: six8 / pow10(6) - perturbation(),
        large_expected: BigRational::new(
            52_487_994_121_337i64.into(),
            31_250_000_000_000i64.into(),
        ),
        floor_cert,
        octic_cert,
    })
}

/// `E_l(x) = sum_{k <= l} x^k / k!`.
pub fn trunc_exp(l: usize) -> RatPoly1 {
    let mut c = Vec::with_capacity(l + 1);
    let mut f = BigInt::one();
    for k in 0..=l {
        if k > 0 {
            f *= k;
        }
        c.push(BigRational::new(BigInt::one(), f.clone()));
    }
    RatPoly1::new(c)
}

/// `E_l(x) E_l(-x)` by direct expansion.
pub fn trunc_exp_product_coeffs(l: usize) -> RatPoly1 {
    let e = trunc_exp(l);
    e.mul(&e.reflect())
}

/// Closed form: 1, zeros through degree `l`, then
/// `a_{l+t} = ((-1)^t + (-1)^l) / ((t + l) (t - 1)! l!)` for `1 <= t <= l`.
pub fn trunc_exp_closed_form(l: usize) -> RatPoly1 {
    let fact = |n: usize| (1..=n).fold(BigInt::one(), |a, k| a * k);
    let mut c = vec![BigRational::zero(); 2 * l + 1];
    c[0] = BigRational::one();
    for t in 1..=l {
        let sign = |e: usize| if e.is_multiple_of(2) { 1i64 } else { -1 };
        let num = BigInt::from(sign(t) + sign(l));
        let den = BigInt::from(t + l) * fact(t - 1) * fact(l);
        c[l + t] = BigRational::new(num, den);
    }
    RatPoly1::new(c)
}

/// Outcome of one certificate for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct CertOutcome {
    pub certificate: String,
    pub passed: bool,
    pub detail: Value,
}

fn rat_json(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn sturm_json(c: &SturmCert) -> Value {
    json!({
        "degree": c.degree,
        "odd_multiplicity_roots": c.odd_multiplicity_roots,
        "distinct_real_roots": c.distinct_real_roots,
        "sturm_length": c.sturm_length,
        "sample": [rat_json(&c.sample.0), rat_json(&c.sample.1)],
        "violations": c.violations.iter().map(|(a, b)| json!([rat_json(a), rat_json(b)])).collect::<Vec<_>>(),
    })
}

/// Runs every certificate in a fixed order.
pub fn run_all() -> Result<Vec<CertOutcome>> {
    let data = load_data()?;
    let f = data.build_f();
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: Value| {
        out.push(CertOutcome {
            certificate: name.to_string(),
            passed,
            detail,
        })
    };

    push("f_support", support_ok(&f), json!({ "terms": f.len() }));
    push("f_even", f == f.reflect(), json!({}));
    let root_sq = data.h_root.mul(&data.h_root);
    push(
        "h_square",
        root_sq == data.h,
        json!({ "h": data.h.to_string() }),
    );

    let cf = catalan_sum2(&f);
    let ch = catalan_sum1(&data.h);
    let half = BigRational::new(1.into(), 2.into());
    let cf_expected = BigRational::new(1_258_136_733_059i64.into(), 2_560_000_000_000i64.into());
    let ch_expected = BigRational::new(34.into(), 81.into());
    push(
        "catalan_f",
        cf == cf_expected && cf < half,
        json!({ "value": rat_json(&cf), "expected": rat_json(&cf_expected) }),
    );
    push(
        "catalan_h",
        ch == ch_expected && ch < half,
        json!({ "value": rat_json(&ch), "expected": rat_json(&ch_expected) }),
    );

    let sos = sos_verify(&data.u, &data.witness());
    push(
        "sos_u",
        sos.passed,
        json!({
            "squares": sos.squares,
            "multipliers_positive": sos.multipliers_positive,
            "residual_terms": sos.residual.len(),
            "residual": sos.residual.terms().map(|(&(i, j), v)| json!([i, j, rat_json(v)])).collect::<Vec<_>>(),
        }),
    );
    let c_sq = SosWitness {
        squares: data.c_squares.clone(),
    };
    push(
        "c_manifest",
        c_sq.multipliers_positive(),
        json!({ "squares": data.c_squares.len() }),
    );

    let nd = near_diagonal_cert(&data)?;
    push(
        "near_diagonal",
        nd.passed(),
        json!({
            "c_u": rat_json(&nd.c_u),
            "c_u_expected": rat_json(&nd.c_u_expected),
            "small_case": rat_json(&nd.small_case),
            "large_case": rat_json(&nd.large_case),
            "delta_floor": sturm_json(&nd.floor_cert),
            "delta_octic": sturm_json(&nd.octic_cert),
        }),
    );

    let mut all = true;
    for l in 0..=24 {
        let p = trunc_exp_product_coeffs(l);
        let ok = p == trunc_exp_closed_form(l)
            && (l % 2 == 1 || p.coeffs().iter().skip(1).all(|a| !a.is_negative()));
        all &= ok;
    }
    push("trunc_exp", all, json!({ "max_l": 24 }));
    Ok(out)
}
