//! Positive definite binary quadratic forms, the form class group and its
//! characters, genus theory and CM points.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arithbase::{self, ext_gcd, factor, kronecker, Discriminant};
use crate::error::{Error, Result};

/// Largest class number handled by [`class_group`].
pub const MAX_CLASS_NUMBER: usize = 1_000_000;

/// The form `a t^2 + b t u + c u^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQF {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// A 2x2 integer matrix `[[m00, m01], [m10, m11]]` acting on column vectors.
pub type Mat2 = [[i64; 2]; 2];

impl BinaryQF {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQF { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, t: i64, u: i64) -> i128 {
        let (a, b, c, t, u) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            t as i128,
            u as i128,
        );
        a * t * t + b * t * u + c * u * u
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.disc() < 0
    }

    pub fn is_primitive(&self) -> bool {
        arithbase::gcd(arithbase::gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The form `f(M (t, u))`.
    pub fn transform(&self, m: &Mat2) -> BinaryQF {
        let (p, q, r, s) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        BinaryQF {
            a: self.eval(p, r) as i64,
            b: (2 * self.a as i128 * p as i128 * q as i128
                + self.b as i128 * (p as i128 * s as i128 + q as i128 * r as i128)
                + 2 * self.c as i128 * r as i128 * s as i128) as i64,
            c: self.eval(q, s) as i64,
        }
    }

    pub fn inverse(&self) -> BinaryQF {
        reduce_form(&BinaryQF::new(self.a, -self.b, self.c))
    }

    /// Root of `a z^2 + b z + c` in the upper half plane.
    pub fn root(&self) -> (f64, f64) {
        let big_d = -(self.disc() as f64);
        (
            -(self.b as f64) / (2.0 * self.a as f64),
            big_d.sqrt() / (2.0 * self.a as f64),
        )
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Reduce a positive definite form, returning the reduced form and the
/// matrix `M` in `SL_2(Z)` with `f(M (t, u)) = reduced(t, u)`.
pub fn reduce(f: &BinaryQF) -> Result<(BinaryQF, Mat2)> {
    if !f.is_positive_definite() {
        return Err(Error::domain(format!(
            "({}, {}, {}) is not positive definite",
            f.a, f.b, f.c
        )));
    }
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    let mut m: Mat2 = [[1, 0], [0, 1]];
    loop {
        if b > a || b <= -a {
            // t -> t + k u moves b into (-a, a]
            let k = (a - b).div_euclid(2 * a);
            let nc = a * k * k + b * k + c;
            b += 2 * a * k;
            c = nc;
            m = mat_mul(&m, &[[1, k as i64], [0, 1]]);
        }
        if a > c || (a == c && b < 0) {
            // (t, u) -> (-u, t)
            (a, b, c) = (c, -b, a);
            m = mat_mul(&m, &[[0, -1], [1, 0]]);
            continue;
        }
        break;
    }
    Ok((BinaryQF::new(a as i64, b as i64, c as i64), m))
}

/// Reduction for forms already known to be positive definite.
pub fn reduce_form(f: &BinaryQF) -> BinaryQF {
    reduce(f).expect("positive definite form").0
}

/// Dirichlet composition of two primitive forms of equal discriminant, reduced.
pub fn compose(f: &BinaryQF, g: &BinaryQF) -> Result<BinaryQF> {
    let disc = f.disc();
    if disc != g.disc() {
        return Err(Error::domain(format!(
            "discriminant mismatch: {} vs {}",
            disc,
            g.disc()
        )));
    }
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let e = (b1 + b2) / 2;
    let (g1, x1, y1) = ext_gcd(a1, a2);
    let (gg, x2, y2) = ext_gcd(g1, e);
    // gg = u a1 + v a2 + w e
    let (u, v, w) = (x2 * x1, x2 * y1, y2);
    let a3 = a1 * a2 / (gg * gg);
    let num = u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc as i128) / 2;
    let b3 = (num / gg).rem_euclid(2 * a3);
    let c3 = (b3 * b3 - disc as i128) / (4 * a3);
    let h = BinaryQF::new(a3 as i64, b3 as i64, c3 as i64);
    debug_assert_eq!(h.disc(), disc);
    Ok(reduce_form(&h))
}

/// All reduced primitive forms of discriminant `-D`, sorted lexicographically.
pub fn reduced_forms(disc: &Discriminant) -> Result<Vec<BinaryQF>> {
    let big_d = disc.big_d as i64;
    let amax = arithbase::isqrt(disc.big_d / 3) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b * b + big_d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + big_d) / (4 * a);
            let f = BinaryQF::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
                if out.len() > MAX_CLASS_NUMBER {
                    return Err(Error::bounds(format!(
                        "class number of -{big_d} exceeds {MAX_CLASS_NUMBER}"
                    )));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The form class group with an invariant-factor decomposition
/// `Z/n_1 x ... x Z/n_k`, `n_1 | n_2 | ... | n_k`.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub disc: Discriminant,
    /// Reduced forms, sorted; index 0 is the principal form.
    pub forms: Vec<BinaryQF>,
    pub cyclic_orders: Vec<u64>,
    /// Indices of the generators of each cyclic factor.
    pub generators: Vec<usize>,
    index: HashMap<BinaryQF, usize>,
    dlog: Vec<Vec<u64>>,
    from_dlog: HashMap<Vec<u64>, usize>,
}

impl ClassGroup {
    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, f: &BinaryQF) -> Option<usize> {
        self.index.get(&reduce(f).ok()?.0).copied()
    }

    /// Exponent vector of element `i` against the generators.
    pub fn dlog(&self, i: usize) -> &[u64] {
        &self.dlog[i]
    }

    pub fn from_exponents(&self, e: &[u64]) -> usize {
        let key: Vec<u64> = e
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(x, n)| x % n)
            .collect();
        self.from_dlog[&key]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let e: Vec<u64> = self.dlog[i]
            .iter()
            .zip(&self.dlog[j])
            .zip(&self.cyclic_orders)
            .map(|((x, y), n)| (x + y) % n)
            .collect();
        self.from_dlog[&e]
    }

    pub fn inv(&self, i: usize) -> usize {
        let e: Vec<u64> = self.dlog[i]
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(x, n)| (n - x) % n)
            .collect();
        self.from_dlog[&e]
    }

    pub fn pow(&self, i: usize, k: i64) -> usize {
        let e: Vec<u64> = self.dlog[i]
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
            .collect();
        self.from_dlog[&e]
    }

    pub fn order_of(&self, i: usize) -> u64 {
        self.dlog[i]
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| n / num_integer::gcd(x, n))
            .fold(1, num_integer::lcm)
    }

    /// Number of elements with `x^2 = 1`.
    pub fn two_torsion(&self) -> usize {
        (0..self.h()).filter(|&i| self.mul(i, i) == 0).count()
    }

    /// Class of the ideal with exponents `(r_p, s_p)`: `[p]^{r - s}` per prime.
    pub fn ideal_class(&self, n: &arithbase::IdealExponents) -> Result<usize> {
        let mut cls = self.identity();
        for (&p, &(r, s)) in &n.exps {
            let f = prime_form(&self.disc, p)?;
            let i = self.index[&f];
            cls = self.mul(cls, self.pow(i, r as i64 - s as i64));
        }
        Ok(cls)
    }

    /// Emit `{"D", "h", "cyclic_orders", "forms"}` with forms sorted.
    pub fn to_json(&self) -> String {
        let forms: Vec<String> = self
            .forms
            .iter()
            .map(|f| format!("[{},{},{}]", f.a, f.b, f.c))
            .collect();
        let orders: Vec<String> = self.cyclic_orders.iter().map(|n| n.to_string()).collect();
        format!(
            "{{\"D\":{},\"h\":{},\"cyclic_orders\":[{}],\"forms\":[{}]}}",
            self.disc.big_d,
            self.h(),
            orders.join(","),
            forms.join(",")
        )
    }
}

/// Compute `Cl_D` and its invariant-factor decomposition by order finding.
pub fn class_group(disc: &Discriminant) -> Result<ClassGroup> {
    let forms = reduced_forms(disc)?;
    let h = forms.len();
    let index: HashMap<BinaryQF, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mul =
        |i: usize, j: usize| -> usize { index[&compose(&forms[i], &forms[j]).expect("same disc")] };
    let pow = |i: usize, mut k: u64| -> usize {
        let (mut acc, mut base) = (0usize, i);
        while k > 0 {
            if k & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            k >>= 1;
        }
        acc
    };

    // Basis of each Sylow subgroup, as (generator, order) with orders decreasing.
    let mut sylow_bases: Vec<Vec<(usize, u64)>> = Vec::new();
    for (p, e) in factor(h as u64) {
        let pe = p.pow(e);
        let cof = h as u64 / pe;
        let mut members: Vec<usize> = (0..h).map(|i| pow(i, cof)).collect();
        members.sort_unstable();
        members.dedup();
        // span: element -> coordinates against the basis so far
        let mut span: HashMap<usize, Vec<u64>> = HashMap::from([(0usize, Vec::new())]);
        let mut basis: Vec<(usize, u64)> = Vec::new();
        while (span.len() as u64) < pe {
            let mut best = (0u32, 0usize);
            for &x in &members {
                let (mut y, mut j) = (x, 0u32);
                while !span.contains_key(&y) {
                    y = pow(y, p);
                    j += 1;
                }
                if j > best.0 {
                    best = (j, x);
                }
            }
            let (j, x) = best;
            let q = p.pow(j);
            let coords = span[&pow(x, q)].clone();
            let mut xp = x;
            for (c, &(b, n)) in coords.iter().zip(&basis) {
                debug_assert_eq!(c % q, 0);
                let k = (n - (c / q) % n) % n;
                xp = mul(xp, pow(b, k));
            }
            let old: Vec<(usize, Vec<u64>)> = span.drain().collect();
            for (s, v) in old {
                let mut cur = s;
                for k in 0..q {
                    let mut w = v.clone();
                    w.push(k);
                    span.insert(cur, w);
                    cur = mul(cur, xp);
                }
            }
            basis.push((xp, q));
        }
        sylow_bases.push(basis);
    }

    // Merge the Sylow bases into invariant factors.
    let rank = sylow_bases.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut generators = Vec::with_capacity(rank);
    let mut cyclic_orders = Vec::with_capacity(rank);
    for i in 0..rank {
        let (mut g, mut n) = (0usize, 1u64);
        for b in &sylow_bases {
            if let Some(&(x, q)) = b.get(i) {
                g = mul(g, x);
                n *= q;
            }
        }
        generators.push(g);
        cyclic_orders.push(n);
    }
    generators.reverse();
    cyclic_orders.reverse();

    let mut dlog = vec![Vec::new(); h];
    let mut from_dlog = HashMap::with_capacity(h);
    let mut exps = vec![0u64; rank];
    let mut cur = 0usize;
    loop {
        dlog[cur] = exps.clone();
        from_dlog.insert(exps.clone(), cur);
        // mixed-radix increment; wrapping a digit multiplies by g^n = 1 in that factor
        let mut k = 0;
        while k < rank {
            cur = mul(cur, generators[k]);
            exps[k] += 1;
            if exps[k] < cyclic_orders[k] {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
        if k == rank {
            break;
        }
    }
    if from_dlog.len() != h {
        return Err(Error::integrity(format!(
            "decomposition of Cl(-{}) covers {} of {} classes",
            disc.big_d,
            from_dlog.len(),
            h
        )));
    }
    Ok(ClassGroup {
        disc: *disc,
        forms,
        cyclic_orders,
        generators,
        index,
        dlog,
        from_dlog,
    })
}

/// A character of `Cl_D`, `chi(g) = exp(2 pi i sum k_i e_i / n_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassChar {
    pub exps: Vec<u64>,
    pub orders: Vec<u64>,
}

impl ClassChar {
    pub fn trivial(g: &ClassGroup) -> Self {
        ClassChar {
            exps: vec![0; g.cyclic_orders.len()],
            orders: g.cyclic_orders.clone(),
        }
    }

    /// Exponent of the group; character values are `N`-th roots of unity.
    pub fn modulus(&self) -> u64 {
        self.orders.last().copied().unwrap_or(1)
    }

    /// `chi(g) = zeta_N^r`, returned as `r`.
    pub fn exponent_at(&self, e: &[u64]) -> u64 {
        let n = self.modulus();
        self.exps
            .iter()
            .zip(e)
            .zip(&self.orders)
            .map(|((&k, &x), &ni)| (k as u128 * x as u128 % ni as u128) * (n / ni) as u128)
            .sum::<u128>() as u64
            % n
    }

    pub fn eval(&self, g: &ClassGroup, i: usize) -> Complex64 {
        let r = self.exponent_at(g.dlog(i));
        Complex64::from_polar(1.0, TAU * r as f64 / self.modulus() as f64)
    }

    /// Values at every class, indexed like `ClassGroup::forms`.
    pub fn table(&self, g: &ClassGroup) -> Vec<Complex64> {
        (0..g.h()).map(|i| self.eval(g, i)).collect()
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.orders)
            .map(|(&k, &n)| n / num_integer::gcd(k, n))
            .fold(1, num_integer::lcm)
    }

    pub fn mul(&self, other: &ClassChar) -> ClassChar {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.orders)
            .map(|((a, b), n)| (a + b) % n)
            .collect();
        ClassChar {
            exps,
            orders: self.orders.clone(),
        }
    }

    pub fn pow(&self, k: u64) -> ClassChar {
        let exps = self
            .exps
            .iter()
            .zip(&self.orders)
            .map(|(a, n)| a * k % n)
            .collect();
        ClassChar {
            exps,
            orders: self.orders.clone(),
        }
    }

    pub fn conj(&self) -> ClassChar {
        let exps = self
            .exps
            .iter()
            .zip(&self.orders)
            .map(|(a, n)| (n - a) % n)
            .collect();
        ClassChar {
            exps,
            orders: self.orders.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }
}

/// The full dual group, in mixed-radix order starting from the trivial character.
pub fn characters(g: &ClassGroup) -> Vec<ClassChar> {
    let orders = &g.cyclic_orders;
    let mut out = Vec::with_capacity(g.h());
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(ClassChar {
            exps: exps.clone(),
            orders: orders.clone(),
        });
        let mut k = 0;
        while k < orders.len() {
            exps[k] += 1;
            if exps[k] < orders[k] {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
        if k == orders.len() {
            return out;
        }
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if arithbase::mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mulm = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| arithbase::mod_pow(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = arithbase::mod_pow(z, q, p);
    let mut t = arithbase::mod_pow(a, q, p);
    let mut r = arithbase::mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulm(tt, tt);
            i += 1;
        }
        let b = arithbase::mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    Some(r)
}

/// Reduced form of the class of the prime ideal above `p` chosen by the
/// smallest nonnegative root `b_p` of `b^2 = -D mod 4p`.
pub fn prime_form(disc: &Discriminant, p: u64) -> Result<BinaryQF> {
    if !arithbase::is_prime(p) || arithbase::splitting_type(disc, p) != arithbase::Splitting::Split
    {
        return Err(Error::domain(format!(
            "{p} does not split in Q(sqrt(-{}))",
            disc.d
        )));
    }
    let big_d = disc.big_d;
    let b = if p == 2 {
        1
    } else {
        let r = sqrt_mod_prime((p - big_d % p) % p, p).expect("split prime has a root");
        // b = +-r mod p with b = D mod 2, in [0, 2p)
        let lift = |x: u64| if x % 2 == big_d % 2 { x } else { x + p };
        lift(r).min(lift(p - r))
    };
    let (p, b) = (p as i64, b as i64);
    let f = BinaryQF::new(p, b, (b * b + big_d as i64) / (4 * p));
    Ok(reduce_form(&f))
}

/// A CM point `tau` in the standard fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMPoint {
    pub x: f64,
    pub y: f64,
    pub form: BinaryQF,
}

/// `(-b + i sqrt(D)) / 2a` for the reduced representative.
pub fn cm_point(f: &BinaryQF) -> Result<CMPoint> {
    let (r, _) = reduce(f)?;
    let (x, y) = r.root();
    Ok(CMPoint { x, y, form: r })
}

/// `[cls] . [f]`, composition then reduction.
pub fn act(cls: &BinaryQF, f: &BinaryQF) -> Result<BinaryQF> {
    compose(cls, f)
}

/// Prime discriminants whose product is `-D`, sorted by absolute value.
pub fn prime_discriminants(disc: &Discriminant) -> Vec<i64> {
    let mut rest = disc.value();
    let mut out = Vec::new();
    for (p, _) in factor(disc.big_d) {
        if p == 2 {
            continue;
        }
        let ps = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        out.push(ps);
        rest /= ps;
    }
    if rest != 1 {
        out.push(rest);
    }
    out.sort_by_key(|x| x.abs());
    out
}

/// Genus characters evaluated at a value of `f` coprime to `D`.
pub fn genus_invariants(f: &BinaryQF) -> Result<Vec<i32>> {
    let disc = Discriminant::from_big_d((-f.disc()) as u64)?;
    if !f.is_primitive() || !f.is_positive_definite() {
        return Err(Error::domain(
            "genus characters need a primitive positive form",
        ));
    }
    let big_d = disc.big_d as i128;
    let mut m = None;
    'search: for r in 1i64.. {
        for x in -r..=r {
            for y in [-r, r] {
                for (t, u) in [(x, y), (y, x)] {
                    if arithbase::gcd(t, u) != 1 {
                        continue;
                    }
                    let v = f.eval(t, u);
                    if num_integer::Integer::gcd(&v, &big_d) == 1 {
                        m = Some(v as i64);
                        break 'search;
                    }
                }
            }
        }
    }
    let m = m.expect("primitive forms represent values coprime to D");
    Ok(prime_discriminants(&disc)
        .into_iter()
        .map(|ps| kronecker(ps, m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithbase::{fundamental_discriminant, sieve_primes};
    use std::collections::{BTreeMap, HashSet};

    fn disc(big_d: u64) -> Discriminant {
        Discriminant::from_big_d(big_d).unwrap()
    }

    fn fundamental_up_to(n: u64) -> Vec<Discriminant> {
        (3..=n)
            .filter_map(|k| Discriminant::from_big_d(k).ok())
            .collect()
    }

    #[test]
    fn reduce_examples() {
        let f = BinaryQF::new(6, 4, 129);
        assert_eq!(reduce(&f).unwrap().0, f);
        assert_eq!(f.disc(), -3080);
        assert_eq!(
            reduce(&BinaryQF::new(1, 0, 1)).unwrap().0,
            BinaryQF::new(1, 0, 1)
        );
        let g = BinaryQF::new(129, 4, 6);
        let (r, m) = reduce(&g).unwrap();
        assert_eq!(r, BinaryQF::new(6, -4, 129));
        assert_eq!(g.transform(&m), r);
        assert_eq!(m[0][0] * m[1][1] - m[0][1] * m[1][0], 1);
        assert!(reduce(&BinaryQF::new(1, 3, 1)).is_err());
        assert!(reduce(&BinaryQF::new(-1, 0, -1)).is_err());
    }

    #[test]
    fn reduce_ties() {
        assert_eq!(
            reduce_form(&BinaryQF::new(2, -2, 3)),
            BinaryQF::new(2, 2, 3)
        );
        assert_eq!(
            reduce_form(&BinaryQF::new(3, -2, 3)),
            BinaryQF::new(3, 2, 3)
        );
    }

    proptest::proptest! {
        #[test]
        fn reduce_witness(a in 1i64..500, b in -800i64..800, k in -30i64..30, l in -30i64..30) {
            let c = (b * b) / (4 * a) + 1 + k.abs();
            let f = BinaryQF::new(a, b, c);
            let g = f.transform(&[[1, k], [0, 1]]).transform(&[[1, 0], [l, 1]]);
            let (r, m) = reduce(&g).unwrap();
            proptest::prop_assert!(r.is_reduced());
            proptest::prop_assert_eq!(g.transform(&m), r);
            proptest::prop_assert_eq!(r.disc(), f.disc());
            proptest::prop_assert_eq!(reduce_form(&f), r);
        }
    }

    #[test]
    fn compose_examples() {
        let f = BinaryQF::new(2, 2, 3);
        assert_eq!(compose(&f, &f).unwrap(), BinaryQF::new(1, 0, 5));
        let id = BinaryQF::new(1, 0, 5);
        assert_eq!(compose(&f, &id).unwrap(), f);
        assert!(compose(&f, &BinaryQF::new(1, 1, 6)).is_err());
        let g = BinaryQF::new(6, 4, 129);
        assert_eq!(
            compose(&g, &BinaryQF::new(6, -4, 129)).unwrap(),
            BinaryQF::new(1, 0, 770)
        );
    }

    #[test]
    fn group_laws_exhaustive() {
        for d in fundamental_up_to(2000) {
            let forms = reduced_forms(&d).unwrap();
            let id = forms[0];
            assert_eq!(id.a, 1);
            for f in &forms {
                assert_eq!(compose(f, &id).unwrap(), *f);
                assert_eq!(compose(f, &BinaryQF::new(f.a, -f.b, f.c)).unwrap(), id);
                for g in &forms {
                    let fg = compose(f, g).unwrap();
                    assert_eq!(fg, compose(g, f).unwrap());
                    assert!(forms.binary_search(&fg).is_ok());
                }
            }
            if forms.len() <= 40 {
                for f in &forms {
                    for g in &forms {
                        for k in &forms {
                            let l = compose(&compose(f, g).unwrap(), k).unwrap();
                            let r = compose(f, &compose(g, k).unwrap()).unwrap();
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_group_examples() {
        let g = class_group(&disc(3080)).unwrap();
        assert_eq!(g.h(), 32);
        assert_eq!(g.cyclic_orders.iter().product::<u64>(), 32);
        assert_eq!(class_group(&disc(4)).unwrap().h(), 1);
        let g23 = class_group(&disc(23)).unwrap();
        assert_eq!(
            g23.forms,
            vec![
                BinaryQF::new(1, 1, 6),
                BinaryQF::new(2, -1, 3),
                BinaryQF::new(2, 1, 3)
            ]
        );
        assert_eq!(g23.cyclic_orders, vec![3]);
        assert!(g.to_json().starts_with("{\"D\":3080,\"h\":32,"));
    }

    #[test]
    fn decomposition_is_consistent() {
        for d in fundamental_up_to(1500)
            .into_iter()
            .chain([disc(3080), disc(4 * 5 * 7 * 11 * 13)])
        {
            let g = class_group(&d).unwrap();
            assert!(g.cyclic_orders.windows(2).all(|w| w[1] % w[0] == 0));
            for i in 0..g.h() {
                for j in 0..g.h().min(12) {
                    let direct = g
                        .index_of(&compose(&g.forms[i], &g.forms[j]).unwrap())
                        .unwrap();
                    assert_eq!(g.mul(i, j), direct);
                }
            }
        }
    }

    #[test]
    fn two_torsion_matches_ambiguous_forms() {
        for d in fundamental_up_to(1200).into_iter().chain([disc(3080)]) {
            let g = class_group(&d).unwrap();
            let ambiguous = g
                .forms
                .iter()
                .filter(|f| f.b == 0 || f.b == f.a || f.a == f.c)
                .count();
            assert_eq!(g.two_torsion(), ambiguous, "D = {}", d.big_d);
        }
        assert_eq!(class_group(&disc(3080)).unwrap().two_torsion(), 8);
    }

    #[test]
    fn characters_orthogonal() {
        for big_d in [3, 20, 23, 3080, 1155, 1599] {
            let g = class_group(&disc(big_d)).unwrap();
            let chars = characters(&g);
            assert_eq!(chars.len(), g.h());
            let tables: Vec<Vec<Complex64>> = chars.iter().map(|c| c.table(&g)).collect();
            for (i, ti) in tables.iter().enumerate() {
                for (j, tj) in tables.iter().enumerate() {
                    let s: Complex64 = ti.iter().zip(tj).map(|(a, b)| a * b.conj()).sum();
                    let expect = if i == j { g.h() as f64 } else { 0.0 };
                    assert!((s - expect).norm() < 1e-10);
                }
            }
            for a in 0..g.h() {
                let s: Complex64 = tables.iter().map(|t| t[a] * t[0].conj()).sum();
                let expect = if a == 0 { g.h() as f64 } else { 0.0 };
                assert!((s - expect).norm() < 1e-10);
            }
            // exact multiplicativity in exponent arithmetic
            for c in &chars {
                for a in 0..g.h() {
                    for b in 0..g.h().min(8) {
                        let n = c.modulus();
                        let lhs = c.exponent_at(g.dlog(g.mul(a, b)));
                        let rhs = (c.exponent_at(g.dlog(a)) + c.exponent_at(g.dlog(b))) % n;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
        let g20 = class_group(&disc(20)).unwrap();
        let vals: Vec<f64> = characters(&g20)
            .iter()
            .map(|c| c.eval(&g20, 1).re)
            .collect();
        assert_eq!(
            vals.iter().map(|v| v.round() as i32).collect::<Vec<_>>(),
            vec![1, -1]
        );
        let g4 = class_group(&disc(4)).unwrap();
        assert_eq!(characters(&g4).len(), 1);
        let g3080 = class_group(&disc(3080)).unwrap();
        assert_eq!(
            characters(&g3080).iter().filter(|c| c.order() <= 2).count(),
            8
        );
    }

    fn represents(f: &BinaryQF, n: i64) -> bool {
        let bound = ((4 * f.c * n) as f64 / -(f.disc() as f64)).sqrt() as i64 + 2;
        (-bound..=bound).any(|t| (-bound..=bound).any(|u| f.eval(t, u) == n as i128))
    }

    #[test]
    fn prime_forms() {
        assert_eq!(prime_form(&disc(4), 5).unwrap(), BinaryQF::new(1, 0, 1));
        let d20 = disc(20);
        assert_eq!(prime_form(&d20, 3).unwrap(), BinaryQF::new(2, 2, 3));
        assert!(represents(&BinaryQF::new(2, 2, 3), 3) && !represents(&BinaryQF::new(1, 0, 5), 3));
        assert_eq!(prime_form(&d20, 29).unwrap(), BinaryQF::new(1, 0, 5));
        assert!(prime_form(&d20, 11).is_err());
        // class of p represents p
        let d = disc(3080);
        for p in sieve_primes(400).unwrap().primes {
            if let Ok(f) = prime_form(&d, p) {
                assert!(represents(&f, p as i64));
            }
        }
        let d7 = disc(7);
        assert_eq!(prime_form(&d7, 2).unwrap(), BinaryQF::new(1, 1, 2));
    }

    #[test]
    fn sqrt_mod() {
        for p in sieve_primes(2000).unwrap().primes.into_iter().skip(1) {
            for a in 0..p.min(60) {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!((0..p).all(|x| x * x % p != a)),
                }
            }
        }
    }

    #[test]
    fn cm_points() {
        let i = cm_point(&BinaryQF::new(1, 0, 1)).unwrap();
        assert!((i.x).abs() < 1e-15 && (i.y - 1.0).abs() < 1e-15);
        let f = BinaryQF::new(6, 4, 129);
        let z = cm_point(&f).unwrap();
        assert!((z.x + 1.0 / 3.0).abs() < 1e-15);
        assert!((z.y - 3080f64.sqrt() / 12.0).abs() < 1e-13);
        let tau = Complex64::new(z.x, z.y);
        assert!((tau * tau * 6.0 + tau * 4.0 + 129.0).norm() < 1e-12);
        for d in fundamental_up_to(2000) {
            for f in reduced_forms(&d).unwrap() {
                let z = cm_point(&f).unwrap();
                assert!(z.x.abs() <= 0.5 + 1e-12 && z.x * z.x + z.y * z.y >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn torsor() {
        for big_d in [23, 3080, 1155, 20020] {
            let Ok(d) = Discriminant::from_big_d(big_d) else {
                continue;
            };
            let forms = reduced_forms(&d).unwrap();
            let f0 = forms[forms.len() / 2];
            let orbit: HashSet<BinaryQF> = forms.iter().map(|a| act(a, &f0).unwrap()).collect();
            assert_eq!(orbit.len(), forms.len());
            assert_eq!(act(&forms[0], &f0).unwrap(), f0);
        }
    }

    #[test]
    fn genus_examples() {
        assert!(genus_invariants(&BinaryQF::new(1, 0, 770))
            .unwrap()
            .iter()
            .all(|&v| v == 1));
        let genus = genus_invariants(&BinaryQF::new(6, 4, 129)).unwrap();
        for f in [(6, -4, 129), (19, 6, 41), (19, -6, 41)] {
            assert_eq!(
                genus_invariants(&BinaryQF::new(f.0, f.1, f.2)).unwrap(),
                genus
            );
        }
        let a = genus_invariants(&BinaryQF::new(1, 0, 5)).unwrap();
        let b = genus_invariants(&BinaryQF::new(2, 2, 3)).unwrap();
        assert_eq!(prime_discriminants(&disc(20)), vec![-4, 5]);
        assert_eq!(a, vec![1, 1]);
        assert_eq!(b, vec![-1, -1]);
        assert_eq!(prime_discriminants(&disc(3080)), vec![5, -7, -8, -11]);
    }

    #[test]
    fn genus_counts() {
        for d in fundamental_up_to(2000).into_iter().chain([disc(3080)]) {
            let forms = reduced_forms(&d).unwrap();
            let t = prime_discriminants(&d).len() as u32;
            let mut genera: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
            for f in &forms {
                *genera.entry(genus_invariants(f).unwrap()).or_default() += 1;
            }
            assert_eq!(genera.len(), 1 << (t - 1), "D = {}", d.big_d);
            assert!(genera.values().all(|&n| n == forms.len() >> (t - 1)));
            if d.big_d == 3080 {
                assert_eq!(genera.len(), 8);
                assert!(genera.values().all(|&n| n == 4));
            }
        }
        assert_eq!(fundamental_discriminant(770).unwrap(), disc(3080));
    }
}
