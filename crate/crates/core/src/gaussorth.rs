//! Gauss's orthogonal complement map from representation vectors of a
//! ternary form to binary quadratic form classes.

use crate::arithbase::{fundamental_discriminant, gcd};
use crate::error::{Error, Result};
use crate::qfclass::{cm_point, reduce, BinaryQF, CMPoint};
use crate::ternary::{
    admissible, arg_project, automorphism_group, det3, orbits, represent, RepOrbit, TernaryQF, Vec3,
};

/// The restricted form on `x^⊥` and its class.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthResult {
    pub x: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    /// `(f(B), b_f(B, C), f(C))`.
    pub raw: BinaryQF,
    /// Common factor removed from the raw form.
    pub scale: i64,
    /// The rescaled form had discriminant `-4D` (conductor 2) and was
    /// mapped to the maximal order by ideal extension.
    pub extended: bool,
    /// Reduced representative of the class.
    pub form: BinaryQF,
    pub cm: CMPoint,
}

impl OrthResult {
    pub fn rescaled(&self) -> bool {
        self.scale > 1
    }
}

/// A `Z`-basis `(B, C)` of `{y : b_f(x, y) = 0}` with `det[x B C] > 0`.
pub fn orth_basis(x: &Vec3, f: &TernaryQF) -> Result<(Vec3, Vec3)> {
    if gcd(gcd(x[0], x[1]), x[2]) != 1 {
        return Err(Error::domain(format!("{x:?} is not primitive")));
    }
    let mut w = [0i64; 3];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = (0..3).map(|j| f.gram2[i][j] * x[j]).sum();
    }
    // column operations on the row w, tracked in the unimodular matrix u
    let mut u = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    loop {
        let nz: Vec<usize> = (0..3).filter(|&i| w[i] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let piv = *nz.iter().min_by_key(|&&i| w[i].abs()).unwrap();
        for &j in &nz {
            if j == piv {
                continue;
            }
            let q = w[j].div_euclid(w[piv]);
            w[j] -= q * w[piv];
            for row in u.iter_mut() {
                row[j] -= q * row[piv];
            }
        }
    }
    let keep: Vec<usize> = (0..3).filter(|&i| w[i] == 0).collect();
    let col = |j: usize| [u[0][j], u[1][j], u[2][j]];
    let (b, mut c) = (col(keep[0]), col(keep[1]));
    if det3(&[*x, b, c]) < 0 {
        c = c.map(|t| -t);
    }
    Ok((b, c))
}

/// Restricted binary form, divided by its content, with the disc post-check.
pub fn orth_form(x: &Vec3, f: &TernaryQF) -> Result<OrthResult> {
    let d = f.eval(x) as u64;
    let disc = fundamental_discriminant(d)?;
    let (b, c) = orth_basis(x, f)?;
    let raw = BinaryQF::new(
        f.eval(&b) as i64,
        f.bilinear(&b, &c) as i64,
        f.eval(&c) as i64,
    );
    let scale = gcd(gcd(raw.a, raw.b), raw.c);
    let mut scaled = BinaryQF::new(raw.a / scale, raw.b / scale, raw.c / scale);
    let extended = scaled.disc() == 4 * disc.value() && disc.big_d % 4 == 3;
    if extended {
        scaled = extend_conductor_two(&scaled);
    }
    if scaled.disc() != disc.value() {
        return Err(Error::integrity(format!(
            "restricted form at {x:?} has discriminant {} after rescale, expected {}",
            scaled.disc(),
            disc.value()
        )));
    }
    let (form, _) = reduce(&scaled)?;
    let cm = cm_point(&form)?;
    Ok(OrthResult {
        x: *x,
        b,
        c,
        raw,
        scale,
        extended,
        form,
        cm,
    })
}

/// Image of a primitive form of discriminant `-4D`, `D = 3 mod 4`, under
/// extension of ideals from the order of conductor 2 to the maximal order.
fn extend_conductor_two(g: &BinaryQF) -> BinaryQF {
    let candidates = [
        *g,
        BinaryQF::new(g.c, -g.b, g.a),
        BinaryQF::new(g.a + g.b + g.c, g.b + 2 * g.c, g.c),
    ];
    let h = candidates
        .into_iter()
        .find(|h| h.a % 2 != 0)
        .expect("primitive form has an odd value");
    let big_d = -(h.disc() / 4);
    let b0 = h.b / 2;
    let b = if b0 % 2 != 0 { b0 } else { b0 + h.a };
    BinaryQF::new(h.a, b, (b * b + big_d) / (4 * h.a))
}

/// One orbit of `R_f(d)` under `SO_f(Z)` with its form class and sphere point.
#[derive(Debug, Clone)]
pub struct OrthEntry {
    pub orbit: RepOrbit,
    pub result: OrthResult,
    pub arg: [f64; 3],
}

/// `Orth(d)` on every `SO_f(Z)`-orbit, checking well-definedness on each orbit.
pub fn orth_map(d: u64, f: &TernaryQF) -> Result<Vec<OrthEntry>> {
    if !admissible(f, d)? {
        return Err(Error::domain(format!("d = {d} is not admissible")));
    }
    let group = automorphism_group(f);
    let pts = represent(f, d)?;
    let mut out = Vec::new();
    for orbit in orbits(&pts, &group.rotations)? {
        let result = orth_form(&orbit.rep, f)?;
        for y in &orbit.orbit {
            let other = orth_form(y, f)?;
            if other.form != result.form {
                return Err(Error::integrity(format!(
                    "Orth is not constant on the orbit of {:?}: {:?} vs {:?} at {y:?}",
                    orbit.rep, result.form, other.form
                )));
            }
        }
        let arg = arg_project(&orbit.rep, f)?;
        out.push(OrthEntry { orbit, result, arg });
    }
    Ok(out)
}

/// Gauss's eight representatives of `x^2 + y^2 + z^2 = 770` up to sign.
pub const GAUSS_770_REPS: [Vec3; 8] = [
    [15, 16, 17],
    [1, 12, 25],
    [8, 9, 25],
    [4, 15, 23],
    [3, 19, 20],
    [4, 5, 27],
    [9, 17, 20],
    [5, 13, 24],
];

/// The genus of discriminant `-3080` that receives `Orth(770)`.
pub const GAUSS_770_GENUS: [(i64, i64, i64); 4] =
    [(6, 4, 129), (6, -4, 129), (19, 6, 41), (19, -6, 41)];

/// Comparison of `Orth(770)` for the sum of three squares with Gauss's table.
#[derive(Debug, Clone)]
pub struct Gauss770 {
    pub entries: Vec<OrthEntry>,
    /// Orbits hit by the representatives and their negatives; 16 when they match.
    pub orbits_hit: usize,
    /// Every image class lies in the expected genus.
    pub in_genus: bool,
    /// Classes of the two orientations at `(15, 16, 17)`.
    pub orientations: (BinaryQF, BinaryQF),
}

impl Gauss770 {
    pub fn passed(&self) -> bool {
        self.entries.len() == 16
            && self.orbits_hit == 16
            && self.in_genus
            && self.orientations == (BinaryQF::new(6, -4, 129), BinaryQF::new(6, 4, 129))
    }
}

pub fn gauss_770() -> Result<Gauss770> {
    let f = TernaryQF::f1();
    let entries = orth_map(770, &f)?;
    let mut hit: Vec<usize> = GAUSS_770_REPS
        .iter()
        .flat_map(|v| [*v, v.map(|t| -t)])
        .filter_map(|v| entries.iter().position(|e| e.orbit.orbit.contains(&v)))
        .collect();
    hit.sort_unstable();
    hit.dedup();
    let genus: Vec<BinaryQF> = GAUSS_770_GENUS
        .iter()
        .map(|&(a, b, c)| BinaryQF::new(a, b, c))
        .collect();
    let in_genus = entries.iter().all(|e| genus.contains(&e.result.form));
    let r = orth_form(&[15, 16, 17], &f)?;
    let flipped = reduce(&BinaryQF::new(r.raw.a, -r.raw.b, r.raw.c))?.0;
    Ok(Gauss770 {
        orbits_hit: hit.len(),
        in_genus,
        orientations: (r.form, flipped),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithbase::is_squarefree;
    use crate::qfclass::genus_invariants;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Invariant factors of a 3x2 integer matrix from gcds of minors.
    fn smith_invariants(b: &Vec3, c: &Vec3) -> (i64, i64) {
        let d1 = b.iter().chain(c.iter()).fold(0, |g, &t| gcd(g, t));
        let minors = [
            b[0] * c[1] - b[1] * c[0],
            b[0] * c[2] - b[2] * c[0],
            b[1] * c[2] - b[2] * c[1],
        ];
        let d2 = minors.iter().fold(0, |g, &t| gcd(g, t));
        (d1, if d1 == 0 { 0 } else { d2 / d1 })
    }

    #[test]
    fn basis_examples() {
        let f1 = TernaryQF::f1();
        let x = [15, 16, 17];
        let (b, c) = orth_basis(&x, &f1).unwrap();
        assert_eq!(f1.bilinear(&x, &b), 0);
        assert_eq!(f1.bilinear(&x, &c), 0);
        assert!(det3(&[x, b, c]) > 0);
        // change of basis to ((1,-2,1),(8,1,-8)) is unimodular
        let (p, q) = ([1i64, -2, 1], [8i64, 1, -8]);
        let cross = |u: &Vec3, v: &Vec3| {
            [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ]
        };
        let n1 = cross(&b, &c);
        let n2 = cross(&p, &q);
        assert!(n1 == n2 || n1 == n2.map(|t| -t));
        let (b, c) = orth_basis(&[1, 0, 0], &f1).unwrap();
        assert_eq!((b[0], c[0]), (0, 0));
        assert_eq!(smith_invariants(&b, &c), (1, 1));
        assert!(orth_basis(&[2, 4, 6], &f1).is_err());
    }

    proptest! {
        #[test]
        fn basis_is_full_kernel(x in proptest::array::uniform3(-200i64..200)) {
            prop_assume!(gcd(gcd(x[0], x[1]), x[2]) == 1);
            for f in [TernaryQF::f1(), TernaryQF::f2()] {
                let (b, c) = orth_basis(&x, &f).unwrap();
                prop_assert_eq!(f.bilinear(&x, &b), 0);
                prop_assert_eq!(f.bilinear(&x, &c), 0);
                prop_assert_eq!(smith_invariants(&b, &c), (1, 1));
                prop_assert!(det3(&[x, b, c]) > 0);
            }
        }
    }

    #[test]
    fn form_examples() {
        let f1 = TernaryQF::f1();
        let r = orth_form(&[15, 16, 17], &f1).unwrap();
        assert_eq!(r.form, BinaryQF::new(6, -4, 129));
        assert!(!r.rescaled());
        let flipped = BinaryQF::new(r.raw.a, -r.raw.b, r.raw.c);
        assert_eq!(reduce(&flipped).unwrap().0, BinaryQF::new(6, 4, 129));
        let r3 = orth_form(&[1, 1, 1], &f1).unwrap();
        assert!(r3.rescaled() && r3.scale == 2);
        assert_eq!(r3.form, BinaryQF::new(1, 1, 1));
        let other = orth_form(&[1, 12, 25], &f1).unwrap();
        assert_eq!(other.form.disc(), -3080);
        assert_eq!(
            genus_invariants(&other.form).unwrap(),
            genus_invariants(&r.form).unwrap()
        );
    }

    #[test]
    fn gauss_770_golden() {
        assert!(gauss_770().unwrap().passed());
    }

    #[test]
    fn gauss_770_image() {
        let entries = orth_map(770, &TernaryQF::f1()).unwrap();
        assert_eq!(entries.len(), 16);
        let genus: BTreeSet<BinaryQF> = [(6, 4, 129), (6, -4, 129), (19, 6, 41), (19, -6, 41)]
            .iter()
            .map(|&(a, b, c)| BinaryQF::new(a, b, c))
            .collect();
        for e in &entries {
            assert!(genus.contains(&e.result.form), "{:?}", e.result.form);
        }
        let image: BTreeSet<BinaryQF> = entries.iter().map(|e| e.result.form).collect();
        assert_eq!(image, genus);
    }

    #[test]
    fn small_d() {
        let f1 = TernaryQF::f1();
        let e2 = orth_map(2, &f1).unwrap();
        assert_eq!(e2.len(), 1);
        assert_eq!(e2[0].result.form, BinaryQF::new(1, 0, 2));
        let e5 = orth_map(5, &f1).unwrap();
        assert!(e5.iter().all(|e| e.result.form.disc() == -20));
        let img: BTreeSet<BinaryQF> = e5.iter().map(|e| e.result.form).collect();
        assert_eq!(img, BTreeSet::from([BinaryQF::new(1, 0, 5)]));
        assert!(orth_map(7, &f1).is_err());
    }

    #[test]
    fn well_defined_and_genus_law() {
        let f1 = TernaryQF::f1();
        let f2 = TernaryQF::f2();
        for d in (2..=2000u64).filter(|&d| is_squarefree(d)) {
            for f in [&f1, &f2] {
                if !admissible(f, d).unwrap() {
                    continue;
                }
                let entries = orth_map(d, f).unwrap();
                let genera: BTreeSet<Vec<i32>> = entries
                    .iter()
                    .map(|e| genus_invariants(&e.result.form).unwrap())
                    .collect();
                assert!(genera.len() <= 1, "d = {d}, {:?}", f.name());
            }
        }
    }

    #[test]
    fn discriminant_law_to_ten_thousand() {
        let f1 = TernaryQF::f1();
        for d in (2..=10_000u64).filter(|&d| is_squarefree(d) && d % 8 != 7) {
            let pts = represent(&f1, d).unwrap();
            for x in pts.iter().step_by(7) {
                if gcd(gcd(x[0], x[1]), x[2]) == 1 {
                    let r = orth_form(x, &f1).unwrap();
                    assert_eq!(r.scale == 2, d % 8 == 3);
                }
            }
        }
    }

    #[test]
    fn conductor_two_extension() {
        let f2 = TernaryQF::f2();
        let r = orth_form(&[-1, -1, 0], &f2).unwrap();
        assert!(r.extended && r.scale == 10);
        assert_eq!(r.form.disc(), -7);
        let e = extend_conductor_two(&BinaryQF::new(1, 0, 7));
        assert_eq!(reduce(&e).unwrap().0, BinaryQF::new(1, 1, 2));
        // Cl(-92) -> Cl(-23) is a bijection
        let img: BTreeSet<BinaryQF> = [(1, 0, 23), (3, 2, 8), (3, -2, 8)]
            .iter()
            .map(|&(a, b, c)| {
                reduce(&extend_conductor_two(&BinaryQF::new(a, b, c)))
                    .unwrap()
                    .0
            })
            .collect();
        assert_eq!(img.len(), 3);
        assert!(img.iter().all(|f| f.disc() == -23));
    }

    #[test]
    fn orientation_flip_conjugates() {
        let f1 = TernaryQF::f1();
        for x in represent(&f1, 770).unwrap() {
            let r = orth_form(&x, &f1).unwrap();
            let neg = orth_form(&x.map(|t| -t), &f1).unwrap();
            assert_eq!(neg.form, r.form.inverse());
        }
    }
}
