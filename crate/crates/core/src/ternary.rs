//! Positive definite integral ternary quadratic forms: representations,
//! integral orthogonal groups and orbit classification.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::arithbase::{self, exact_sqrt, factor, is_squarefree};
use crate::error::{Error, Result};

pub type Vec3 = [i64; 3];
pub type Mat3 = [[i64; 3]; 3];

/// Largest `d` accepted by [`represent`].
pub const MAX_REPRESENT: u64 = 10_000_000;

/// `f(x) = x^T G x` stored through the doubled Gram matrix `2G`, which is
/// integral with even diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TernaryQF {
    pub gram2: Mat3,
}

impl TernaryQF {
    pub fn from_doubled_gram(gram2: Mat3) -> Result<Self> {
        let sym = (0..3).all(|i| (0..3).all(|j| gram2[i][j] == gram2[j][i]));
        let even = (0..3).all(|i| gram2[i][i] % 2 == 0);
        let minors = [gram2[0][0] as i128, minor2(&gram2), det3(&gram2)];
        if !sym || !even || minors.iter().any(|&m| m <= 0) {
            return Err(Error::domain(
                "doubled Gram matrix must be symmetric, even and positive definite",
            ));
        }
        Ok(TernaryQF { gram2 })
    }

    pub fn diagonal(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::from_doubled_gram([[2 * a, 0, 0], [0, 2 * b, 0], [0, 0, 2 * c]])
    }

    /// `x_1^2 + x_2^2 + x_3^2`.
    pub fn f1() -> Self {
        TernaryQF {
            gram2: [[2, 0, 0], [0, 2, 0], [0, 0, 2]],
        }
    }

    /// `2 x_1^2 + 5 x_2^2 + 10 x_3^2`.
    pub fn f2() -> Self {
        TernaryQF {
            gram2: [[4, 0, 0], [0, 10, 0], [0, 0, 20]],
        }
    }

    pub fn name(&self) -> Option<&'static str> {
        if *self == Self::f1() {
            Some("f1")
        } else if *self == Self::f2() {
            Some("f2")
        } else {
            None
        }
    }

    pub fn eval(&self, x: &Vec3) -> i128 {
        self.bilinear(x, x) / 2
    }

    /// `b(x, y) = f(x + y) - f(x) - f(y) = x^T (2G) y`.
    pub fn bilinear(&self, x: &Vec3, y: &Vec3) -> i128 {
        let mut s = 0i128;
        for i in 0..3 {
            for j in 0..3 {
                s += x[i] as i128 * self.gram2[i][j] as i128 * y[j] as i128;
            }
        }
        s
    }

    /// Determinant of the Gram matrix `G`, times 8 (i.e. `det(2G)`).
    pub fn det_doubled(&self) -> i128 {
        det3(&self.gram2)
    }

    /// Upper-triangular `R` with `f(v) = |R v|^2`.
    pub fn cholesky(&self) -> [[f64; 3]; 3] {
        let g: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| self.gram2[i][j] as f64 / 2.0).collect())
            .collect();
        let mut r = [[0.0f64; 3]; 3];
        for i in 0..3 {
            let s: f64 = (0..i).map(|k| r[k][i] * r[k][i]).sum();
            r[i][i] = (g[i][i] - s).sqrt();
            for j in i + 1..3 {
                let s: f64 = (0..i).map(|k| r[k][i] * r[k][j]).sum();
                r[i][j] = (g[i][j] - s) / r[i][i];
            }
        }
        r
    }
}

fn minor2(m: &Mat3) -> i128 {
    m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128
}

pub fn det3(m: &Mat3) -> i128 {
    let m: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat_vec(a: &Mat3, x: &Vec3) -> Vec3 {
    let mut out = [0i64; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|j| a[i][j] * x[j]).sum();
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Local admissibility of `d` for `f`.
///
/// The two named forms use their congruence conditions; any other form is
/// tested for solubility of `f(x) = d` modulo a power of every prime
/// dividing `2 det(G)`.
pub fn admissible(f: &TernaryQF, d: u64) -> Result<bool> {
    if !is_squarefree(d) {
        return Err(Error::domain(format!("{d} is not squarefree")));
    }
    if *f == TernaryQF::f1() {
        return Ok(d % 8 != 7);
    }
    if *f == TernaryQF::f2() {
        return Ok(d % 8 != 3 && d % 5 != 1 && d % 5 != 4);
    }
    Ok(locally_soluble(f, d))
}

/// Solubility of `f(x) = d` modulo `p^{v_p(det G) + k}` for every prime
/// `p | 2 det(G)`, with `k = 3` at 2 and `k = 1` otherwise.
pub fn locally_soluble(f: &TernaryQF, d: u64) -> bool {
    LocalResidues::new(f).admits(d)
}

/// Values taken by `f` modulo the prime powers used by [`locally_soluble`].
#[derive(Debug, Clone)]
pub struct LocalResidues {
    tables: Vec<(i64, Vec<bool>)>,
}

impl LocalResidues {
    pub fn new(f: &TernaryQF) -> Self {
        let det8 = f.det_doubled() as u64;
        let fac = factor(det8);
        let mut primes: BTreeSet<u64> = fac.iter().map(|&(p, _)| p).collect();
        primes.insert(2);
        let tables = primes
            .into_iter()
            .map(|p| {
                // det(G) = det(2G) / 8
                let v = fac.iter().find(|(q, _)| *q == p).map_or(0, |&(_, e)| e);
                let e = if p == 2 {
                    v.saturating_sub(3) + 3
                } else {
                    v + 1
                };
                let m = p.pow(e) as i64;
                let mut hit = vec![false; m as usize];
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..m {
                            hit[(f.eval(&[a, b, c]) as i64).rem_euclid(m) as usize] = true;
                        }
                    }
                }
                (m, hit)
            })
            .collect();
        LocalResidues { tables }
    }

    pub fn admits(&self, d: u64) -> bool {
        self.tables
            .iter()
            .all(|(m, hit)| hit[(d % *m as u64) as usize])
    }
}

/// All `x` with `f(x) = d`, sorted lexicographically.
pub fn represent(f: &TernaryQF, d: u64) -> Result<Vec<Vec3>> {
    if d > MAX_REPRESENT {
        return Err(Error::bounds(format!("d = {d} exceeds {MAX_REPRESENT}")));
    }
    let g = &f.gram2;
    let det = f.det_doubled();
    // x_i^2 <= f(x) (G^{-1})_{ii} = 2 d adj(2G)_{ii} / det(2G)
    let adj = |i: usize| -> i128 {
        let idx: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let (a, b) = (idx[0], idx[1]);
        g[a][a] as i128 * g[b][b] as i128 - g[a][b] as i128 * g[b][a] as i128
    };
    let bound = |i: usize| arithbase::isqrt_i128(2 * d as i128 * adj(i) / det).unwrap() as i64;
    let (b0, b1) = (bound(0), bound(1));
    let two_d = 2 * d as i128;
    let a = g[2][2] as i128;
    let mut out: Vec<Vec3> = (-b0..=b0)
        .into_par_iter()
        .flat_map_iter(|x0| {
            let mut local = Vec::new();
            for x1 in -b1..=b1 {
                let (x0w, x1w) = (x0 as i128, x1 as i128);
                // A x2^2 + B x2 + C = 0 for the doubled equation
                let b = 2 * (g[0][2] as i128 * x0w + g[1][2] as i128 * x1w);
                let c = g[0][0] as i128 * x0w * x0w
                    + 2 * g[0][1] as i128 * x0w * x1w
                    + g[1][1] as i128 * x1w * x1w
                    - two_d;
                let disc = b * b - 4 * a * c;
                let Some(s) = exact_sqrt(disc) else { continue };
                let mut roots = vec![-b + s];
                if s != 0 {
                    roots.push(-b - s);
                }
                for r in roots {
                    if r % (2 * a) == 0 {
                        local.push([x0, x1, (r / (2 * a)) as i64]);
                    }
                }
            }
            local
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Finite integral orthogonal group of a ternary form.
#[derive(Debug, Clone)]
pub struct IntOrthGroup {
    pub full: Vec<Mat3>,
    pub rotations: Vec<Mat3>,
    /// The unique index-2 subgroup of the rotations, if there is exactly one.
    pub plus: Option<Vec<Mat3>>,
}

impl IntOrthGroup {
    pub fn get(&self, which: GroupKind) -> Option<&[Mat3]> {
        match which {
            GroupKind::Full => Some(&self.full),
            GroupKind::Rotation => Some(&self.rotations),
            GroupKind::Plus => self.plus.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Full,
    Rotation,
    Plus,
}

/// All `A` in `GL_3(Z)` with `A^T G A = G`, found by matching columns.
pub fn automorphism_group(f: &TernaryQF) -> IntOrthGroup {
    let g = &f.gram2;
    let cols: Vec<Vec<Vec3>> = (0..3)
        .map(|i| represent(f, (g[i][i] / 2) as u64).expect("small norms"))
        .collect();
    let mut full = Vec::new();
    for c0 in &cols[0] {
        for c1 in &cols[1] {
            if f.bilinear(c0, c1) != g[0][1] as i128 {
                continue;
            }
            for c2 in &cols[2] {
                if f.bilinear(c0, c2) != g[0][2] as i128 || f.bilinear(c1, c2) != g[1][2] as i128 {
                    continue;
                }
                let a = transpose(&[*c0, *c1, *c2]);
                debug_assert_eq!(mat_mul(&mat_mul(&transpose(&a), g), &a), *g);
                full.push(a);
            }
        }
    }
    full.sort_unstable();
    let rotations: Vec<Mat3> = full.iter().copied().filter(|a| det3(a) == 1).collect();
    let squares: Vec<Mat3> = rotations.iter().map(|a| mat_mul(a, a)).collect();
    let sq = generated_subgroup(&squares);
    let plus = (sq.len() * 2 == rotations.len()).then_some(sq);
    IntOrthGroup {
        full,
        rotations,
        plus,
    }
}

/// Closure of a set of finite-order matrices under multiplication.
fn generated_subgroup(gens: &[Mat3]) -> Vec<Mat3> {
    let id: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut set: BTreeSet<Mat3> = BTreeSet::from([id]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = mat_mul(&x, g);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// A group orbit of representation vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepOrbit {
    /// Lexicographically smallest member.
    pub rep: Vec3,
    pub orbit: Vec<Vec3>,
    pub stabilizer: usize,
}

/// Partition `points` into orbits of `group`, sorted by representative.
pub fn orbits(points: &[Vec3], group: &[Mat3]) -> Result<Vec<RepOrbit>> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let pos: HashMap<Vec3, usize> = sorted.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut seen = vec![false; sorted.len()];
    let mut out = Vec::new();
    for i in 0..sorted.len() {
        if seen[i] {
            continue;
        }
        let x = sorted[i];
        let mut orbit: Vec<Vec3> = group.iter().map(|a| mat_vec(a, &x)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for y in &orbit {
            let j = *pos
                .get(y)
                .ok_or_else(|| Error::domain("point set is not closed under the group"))?;
            seen[j] = true;
        }
        let stabilizer = group.len() / orbit.len();
        out.push(RepOrbit {
            rep: orbit[0],
            orbit,
            stabilizer,
        });
    }
    Ok(out)
}

/// Projection of `x` to the unit sphere through the Cholesky factor of `f`.
pub fn arg_project(x: &Vec3, f: &TernaryQF) -> Result<[f64; 3]> {
    if *x == [0, 0, 0] {
        return Err(Error::domain("cannot project the zero vector"));
    }
    let r = f.cholesky();
    let mut v = [0.0f64; 3];
    for i in 0..3 {
        v[i] = (i..3).map(|j| r[i][j] * x[j] as f64).sum();
    }
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(v.map(|t| t / n))
}
