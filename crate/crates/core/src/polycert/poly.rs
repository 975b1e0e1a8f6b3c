//! Exact rational polynomials in one and two variables.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense univariate polynomial; `coeffs[k]` multiplies `x^k`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly1 {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RatPoly1 {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly1 { coeffs }
    }

    pub fn from_sparse(terms: &[(usize, BigRational)]) -> Self {
        let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut c = vec![BigRational::zero(); deg + 1];
        for (k, v) in terms {
            c[*k] += v;
        }
        Self::new(c)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![rat(0), rat(1)])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * rat(k as i64))
                .collect(),
        )
    }

    /// Euclidean division `self = q d + r`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dl = d.lead();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::default(), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let t = &r[k + dd] / &dl;
            if !t.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &t * b;
                }
            }
            q[k] = t;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(BigRational::one() / self.lead()))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * x + a.to_f64().unwrap_or(f64::NAN))
    }

    /// Substitutes `-x`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| if k % 2 == 1 { -a.clone() } else { a.clone() })
                .collect(),
        )
    }
}

impl fmt::Display for RatPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| match k {
                0 => format!("{a}"),
                1 => format!("({a}) x"),
                _ => format!("({a}) x^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sparse bivariate polynomial `sum a_{ij} x^i y^j`, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl RatPoly2 {
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigRational)>>(it: I) -> Self {
        let mut p = RatPoly2::default();
        for (k, v) in it {
            p.add_term(k, v);
        }
        p
    }

    fn add_term(&mut self, k: (u32, u32), v: BigRational) {
        let e = self.terms.entry(k).or_insert_with(BigRational::zero);
        *e += v;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, v) in &o.terms {
            r.add_term(*k, v.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, v) in &o.terms {
            r.add_term(*k, -v.clone());
        }
        r
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = RatPoly2::default();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &o.terms {
                r.add_term((i + k, j + l), a * b);
            }
        }
        r
    }

    /// Substitutes `(-x, -y)`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|((i, j), v)| {
            (
                (*i, *j),
                if (i + j) % 2 == 1 {
                    -v.clone()
                } else {
                    v.clone()
                },
            )
        }))
    }

    /// `P(x, x)`.
    pub fn diagonal(&self) -> RatPoly1 {
        RatPoly1::from_sparse(
            &self
                .terms
                .iter()
                .map(|((i, j), v)| ((i + j) as usize, v.clone()))
                .collect::<Vec<_>>(),
        )
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|((i, j), v)| {
                v.to_f64().unwrap_or(f64::NAN) * x.powi(*i as i32) * y.powi(*j as i32)
            })
            .sum()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigRational {
        self.terms
            .values()
            .map(|v| v.abs())
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for RatPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), v)| format!("({v}) x^{i} y^{j}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
