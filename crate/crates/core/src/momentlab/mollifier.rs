//! Short Dirichlet polynomials `E_l(+-Q_j(chi))` over a block of split primes, evaluated
//! directly and as sums over ideals with at most `l` prime factors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::schedule::Schedule;
use crate::arithbase::{is_prime, splitting_type, Splitting};
use crate::error::{Error, Result};
use crate::heckeseries::EigenSource;
use crate::qfclass::{prime_form, ClassChar, ClassGroup};

/// Coefficients of the linear form `Q_j`.
#[derive(Debug, Clone, Copy)]
pub enum MollifierKind<'a> {
    /// `(1/2) (lambda_1(p) - lambda_2(p))`, primes with `max |lambda_i(p)| <= B`.
    Paired(&'a EigenSource, &'a EigenSource),
    /// `alpha lambda(p)`, primes with `|lambda(p)| <= B`.
    Alpha(&'a EigenSource, f64),
}

/// `lambda(p) / sqrt p = a_p / p^{k/2}`, rational for even weight.
fn lambda_over_sqrt(src: &EigenSource, p: u64) -> Result<BigRational> {
    if !src.weight.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "{}: odd weight makes lambda(p)/sqrt(p) irrational",
            src.label
        )));
    }
    Ok(BigRational::new(
        src.a_p(p)?.clone(),
        BigInt::from(p).pow(src.weight / 2),
    ))
}

/// One block `P_j`: split primes, the classes of the two primes above each, and the exact
/// coefficient `gamma_p` with `Q_j(chi) = sum_p gamma_p (chi(p) + chi(pbar))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierBlock {
    pub ell: usize,
    pub primes: Vec<u64>,
    /// Primes left out as non-split or above the cap.
    pub dropped: Vec<u64>,
    pub classes: Vec<(usize, usize)>,
    pub gamma: Vec<BigRational>,
}

impl MollifierBlock {
    pub fn new(
        kind: MollifierKind<'_>,
        g: &ClassGroup,
        primes: &[u64],
        cap: Option<&BigRational>,
        ell: usize,
    ) -> Result<Self> {
        let disc = &g.disc;
        let cap_sq = cap.map(|b| b * b);
        let under = |src: &EigenSource, p: u64| -> Result<bool> {
            Ok(cap_sq
                .as_ref()
                .is_none_or(|b2| src.lambda_sq(p).is_ok_and(|l| &l <= b2)))
        };
        let mut block = MollifierBlock {
            ell,
            primes: Vec::new(),
            dropped: Vec::new(),
            classes: Vec::new(),
            gamma: Vec::new(),
        };
        for &p in primes {
            if !is_prime(p) || splitting_type(disc, p) != Splitting::Split {
                block.dropped.push(p);
                continue;
            }
            let (ok, gamma) = match kind {
                MollifierKind::Paired(a, b) => (
                    under(a, p)? && under(b, p)?,
                    (lambda_over_sqrt(a, p)? - lambda_over_sqrt(b, p)?)
                        / BigRational::from_integer(2.into()),
                ),
                MollifierKind::Alpha(a, alpha) => {
                    let al = BigRational::from_float(alpha)
                        .ok_or_else(|| Error::domain("alpha must be finite"))?;
                    (under(a, p)?, al * lambda_over_sqrt(a, p)?)
                }
            };
            if !ok {
                block.dropped.push(p);
                continue;
            }
            let f = prime_form(disc, p)?;
            let c = g
                .index_of(&f)
                .ok_or_else(|| Error::integrity("prime form missing from the class group"))?;
            block.primes.push(p);
            block.classes.push((c, g.inv(c)));
            block.gamma.push(gamma);
        }
        Ok(block)
    }

    /// Block `j` (1-based) of a schedule for the discriminant of `g`.
    pub fn from_schedule(
        kind: MollifierKind<'_>,
        g: &ClassGroup,
        s: &Schedule,
        j: usize,
    ) -> Result<Self> {
        let (lo, hi) = s.prime_interval(j, g.disc.big_d)?;
        let primes: Vec<u64> = (lo..=hi).filter(|&p| is_prime(p)).collect();
        Self::new(kind, g, &primes, Some(&s.b), s.ells[j - 1] as usize)
    }

    fn sign(i: u8) -> f64 {
        if i.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `(-1)^i Q_j(chi)`, which is real.
    pub fn q(&self, chi: &ClassChar, g: &ClassGroup, i: u8) -> f64 {
        let s: f64 = self
            .classes
            .iter()
            .zip(&self.gamma)
            .map(|(&(c, _), gm)| gm.to_f64().unwrap_or(f64::NAN) * 2.0 * chi.eval(g, c).re)
            .sum();
        Self::sign(i) * s
    }

    /// `E_l((-1)^i Q_j(chi))`.
    pub fn eval(&self, chi: &ClassChar, g: &ClassGroup, i: u8) -> f64 {
        trunc_exp_f64(self.ell, self.q(chi, g, i))
    }

    /// The ideal-sum side `sum_{Omega(n) <= l} prod gamma^e ((-1)^i)^Omega / prod e! chi(n)`.
    pub fn eval_ideals(&self, chi: &ClassChar, g: &ClassGroup, i: u8) -> Complex64 {
        let vars: Vec<(f64, Complex64)> = self
            .classes
            .iter()
            .zip(&self.gamma)
            .flat_map(|(&(c, cb), gm)| {
                let v = Self::sign(i) * gm.to_f64().unwrap_or(f64::NAN);
                [(v, chi.eval(g, c)), (v, chi.eval(g, cb))]
            })
            .collect();
        let mut total = Complex64::zero();
        for_each_exponent(vars.len(), self.ell, &mut |e| {
            let mut term = Complex64::one();
            for (k, &ek) in e.iter().enumerate() {
                let (v, x) = vars[k];
                term *= (x * v).powu(ek) / factorial_f64(ek);
            }
            total += term;
        });
        total
    }

    /// Expands `E_l(s sum gamma_p (Y_p + Y_pbar))` with formal `Y` and the ideal sum, and
    /// compares every coefficient exactly.
    pub fn identity_check(&self, i: u8) -> IdentityCheck {
        let s = if i.is_multiple_of(2) {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        let coeffs: Vec<BigRational> = self
            .gamma
            .iter()
            .flat_map(|gm| [&s * gm, &s * gm])
            .collect();
        let n = coeffs.len();
        // exponential side by repeated multiplication with the linear form
        let mut power: BTreeMap<Vec<u32>, BigRational> =
            BTreeMap::from([(vec![0; n], BigRational::one())]);
        let mut exp_side = power.clone();
        let mut fact = BigInt::one();
        for f in 1..=self.ell {
            let mut next: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
            for (mono, c) in &power {
                for (k, ck) in coeffs.iter().enumerate() {
                    let mut m = mono.clone();
                    m[k] += 1;
                    *next.entry(m).or_insert_with(BigRational::zero) += c * ck;
                }
            }
            power = next;
            fact *= f;
            let inv = BigRational::new(BigInt::one(), fact.clone());
            for (mono, c) in &power {
                *exp_side
                    .entry(mono.clone())
                    .or_insert_with(BigRational::zero) += c * &inv;
            }
        }
        exp_side.retain(|_, c| !c.is_zero());
        let mut ideal_side: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for_each_exponent(n, self.ell, &mut |e| {
            let mut c = BigRational::one();
            for (k, &ek) in e.iter().enumerate() {
                c *= num_traits::pow(coeffs[k].clone(), ek as usize)
                    / BigRational::from_integer(factorial(ek));
            }
            if !c.is_zero() {
                ideal_side.insert(e.to_vec(), c);
            }
        });
        let mismatch = exp_side
            .iter()
            .find(|(m, c)| ideal_side.get(*m) != Some(*c))
            .map(|(m, _)| m.clone())
            .or_else(|| {
                ideal_side
                    .keys()
                    .find(|m| !exp_side.contains_key(*m))
                    .cloned()
            });
        IdentityCheck {
            variables: n,
            ell: self.ell,
            monomials: exp_side.len().max(ideal_side.len()),
            agree: mismatch.is_none(),
            mismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub variables: usize,
    pub ell: usize,
    pub monomials: usize,
    pub agree: bool,
    pub mismatch: Option<Vec<u32>>,
}

/// `sum_{f <= l} x^f / f!`.
pub fn trunc_exp_f64(l: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut s = 1.0;
    for f in 1..=l {
        term *= x / f as f64;
        s += term;
    }
    s
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Calls `f` on every exponent vector of length `n` with total degree at most `max`.
fn for_each_exponent(n: usize, max: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(e: &mut Vec<u32>, k: usize, left: usize, f: &mut dyn FnMut(&[u32])) {
        if k == e.len() {
            f(e);
            return;
        }
        for v in 0..=left {
            e[k] = v as u32;
            rec(e, k + 1, left - v, f);
        }
        e[k] = 0;
    }
    let mut e = vec![0u32; n];
    rec(&mut e, 0, max, f);
}
