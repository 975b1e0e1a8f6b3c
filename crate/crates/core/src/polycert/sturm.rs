//! Global lower bounds for rational univariate polynomials via Sturm chains.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::RatPoly1;
use crate::error::Result;

/// Certificate that `P(x) >= floor` for all real `x`, or the evidence against it.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmCert {
    pub passed: bool,
    /// Degree of `P - floor`.
    pub degree: usize,
    /// Distinct real roots of `P - floor`.
    pub distinct_real_roots: usize,
    /// Distinct real roots of odd multiplicity (sign changes).
    pub odd_multiplicity_roots: usize,
    /// Length of the Sturm chain of the odd-multiplicity part.
    pub sturm_length: usize,
    /// A point where `P - floor` is nonzero, and its value.
    pub sample: (BigRational, BigRational),
    /// Isolating intervals `(a, b]` of roots where `P - floor` changes sign,
    /// or `[x, x]` for a negative sample when there are none.
    pub violations: Vec<(BigRational, BigRational)>,
}

/// Yun's square-free factorization: `q = c * prod_i f_i^i` with pairwise coprime, square-free `f_i`.
fn squarefree_factors(q: &RatPoly1) -> Vec<(usize, RatPoly1)> {
    let d = q.derivative();
    let c = q.gcd(&d);
    let mut w = q.div_rem(&c).0;
    let mut y = d.div_rem(&c).0;
    let mut z = y.sub(&w.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while w.degree() > 0 {
        let g = w.gcd(&z);
        w = w.div_rem(&g).0;
        y = z.div_rem(&g).0;
        z = y.sub(&w.derivative());
        if g.degree() > 0 {
            out.push((i, g));
        }
        i += 1;
    }
    out
}

fn sturm_chain(p: &RatPoly1) -> Vec<RatPoly1> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].div_rem(&chain[n - 1]).1;
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&-BigRational::one()));
    }
    chain
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut v = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

fn sign(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn var_at(chain: &[RatPoly1], x: &BigRational) -> usize {
    variations(chain.iter().map(|p| sign(&p.eval(x))))
}

fn var_at_infinity(chain: &[RatPoly1], positive: bool) -> usize {
    variations(chain.iter().map(|p| {
        let s = sign(&p.lead());
        if positive || p.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    }))
}

/// Roots of the chain's head in `(a, b]`.
fn count_in(chain: &[RatPoly1], a: &BigRational, b: &BigRational) -> usize {
    var_at(chain, a) - var_at(chain, b)
}

/// Cauchy bound: every real root lies in `(-m, m)`.
fn cauchy_bound(p: &RatPoly1) -> BigRational {
    let lead = p.lead().abs();
    let max = p
        .coeffs()
        .iter()
        .map(|a| a.abs() / &lead)
        .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
    max + BigRational::one()
}

/// Disjoint intervals `(a, b]`, one root each, of width at most `2^-10`.
fn isolate(chain: &[RatPoly1]) -> Vec<(BigRational, BigRational)> {
    let m = cauchy_bound(&chain[0]);
    let width = BigRational::new(1.into(), 1024.into());
    let two = BigRational::from_integer(2.into());
    let mut stack = vec![(-m.clone(), m)];
    let mut out = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let n = count_in(chain, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 && &b - &a <= width {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / &two;
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort();
    out
}

/// Certifies `P(x) >= floor` on the real line: `P - floor` must have no real root of
/// odd multiplicity and be positive at one non-root point.
pub fn sturm_nonneg(p: &RatPoly1, floor: &BigRational) -> Result<SturmCert> {
    let q = p.sub(&RatPoly1::constant(floor.clone()));
    let degree = q.degree();
    if degree == 0 {
        let v = q.coeff(0);
        let ok = !v.is_negative();
        let zero = BigRational::zero();
        return Ok(SturmCert {
            passed: ok,
            degree,
            distinct_real_roots: 0,
            odd_multiplicity_roots: 0,
            sturm_length: 0,
            sample: (zero.clone(), v),
            violations: if ok {
                vec![]
            } else {
                vec![(zero.clone(), zero)]
            },
        });
    }
    let factors = squarefree_factors(&q);
    let odd = factors
        .iter()
        .filter(|(i, _)| i % 2 == 1)
        .fold(RatPoly1::constant(BigRational::one()), |acc, (_, f)| {
            acc.mul(f)
        });
    let radical = factors
        .iter()
        .fold(RatPoly1::constant(BigRational::one()), |acc, (_, f)| {
            acc.mul(f)
        });
    let radical_chain = sturm_chain(&radical);
    let distinct_real_roots =
        var_at_infinity(&radical_chain, false) - var_at_infinity(&radical_chain, true);
    let (odd_roots, sturm_length, violations) = if odd.degree() == 0 {
        (0, 1, Vec::new())
    } else {
        let chain = sturm_chain(&odd);
        let n = var_at_infinity(&chain, false) - var_at_infinity(&chain, true);
        (
            n,
            chain.len(),
            if n > 0 { isolate(&chain) } else { Vec::new() },
        )
    };
    let mut x = BigRational::zero();
    let mut v = q.eval(&x);
    while v.is_zero() {
        x += BigRational::one();
        v = q.eval(&x);
    }
    let mut violations = violations;
    if odd_roots == 0 && v.is_negative() {
        violations.push((x.clone(), x.clone()));
    }
    Ok(SturmCert {
        passed: odd_roots == 0 && v.is_positive(),
        degree,
        distinct_real_roots,
        odd_multiplicity_roots: odd_roots,
        sturm_length,
        sample: (x, v),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly1 {
        RatPoly1::new(
            c.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        )
    }

    fn zero() -> BigRational {
        BigRational::zero()
    }

    #[test]
    fn x_squared_minus_one_fails_near_both_roots() {
        let c = sturm_nonneg(&p(&[-1, 0, 1]), &zero()).unwrap();
        assert!(!c.passed);
        assert_eq!(c.odd_multiplicity_roots, 2);
        assert_eq!(c.violations.len(), 2);
        let one = BigRational::one();
        assert!(c.violations[0].0 < -one.clone() && c.violations[0].1 >= -one.clone());
        assert!(c.violations[1].0 < one && c.violations[1].1 >= one);
    }

    #[test]
    fn double_roots_are_allowed() {
        // (x - 1)^2 (x + 2)^2 >= 0 touches zero twice
        let q = p(&[-1, 1])
            .mul(&p(&[-1, 1]))
            .mul(&p(&[2, 1]))
            .mul(&p(&[2, 1]));
        let c = sturm_nonneg(&q, &zero()).unwrap();
        assert!(c.passed);
        assert_eq!((c.distinct_real_roots, c.odd_multiplicity_roots), (2, 0));
        // but not above a positive floor
        assert!(!sturm_nonneg(&q, &BigRational::one()).unwrap().passed);
    }

    #[test]
    fn no_roots_and_negative_definite() {
        assert!(sturm_nonneg(&p(&[1, 0, 1]), &zero()).unwrap().passed);
        let neg = sturm_nonneg(&p(&[-1, 0, -1]), &zero()).unwrap();
        assert!(!neg.passed && neg.violations.len() == 1);
        assert!(
            sturm_nonneg(&p(&[3]), &BigRational::from_integer(2.into()))
                .unwrap()
                .passed
        );
        // odd degree always fails
        assert!(!sturm_nonneg(&p(&[0, 0, 0, 1]), &zero()).unwrap().passed);
    }

    #[test]
    fn triple_root_counts_as_sign_change() {
        let q = p(&[-1, 1])
            .mul(&p(&[-1, 1]))
            .mul(&p(&[-1, 1]))
            .mul(&p(&[3, 0, 1]));
        let c = sturm_nonneg(&q, &zero()).unwrap();
        assert!(!c.passed && c.odd_multiplicity_roots == 1);
    }
}
