//! Heegner packets on the modular surface, surface test functions and twisted periods.

use num_complex::Complex64;

use crate::arithbase::{Discriminant, IdealExponents};
use crate::error::{Error, Result};
use crate::modsurface::{incomplete_eisenstein, BoxRegion, PsiWindow, UpperHalfPoint};
use crate::qfclass::{characters, class_group, cm_point, ClassChar, ClassGroup};

/// The orbit of a CM point under the class group, indexed by class.
#[derive(Debug, Clone)]
pub struct HeegnerPacket {
    pub disc: Discriminant,
    pub group: ClassGroup,
    /// Class index of the base point.
    pub base: usize,
    /// `points[i]` is the CM point of class `i` times the base, reduced.
    pub points: Vec<UpperHalfPoint>,
}

impl HeegnerPacket {
    pub fn h(&self) -> usize {
        self.points.len()
    }
}

/// Packet of `disc` based at the class with index `base` (0 is the principal class).
pub fn packet(disc: &Discriminant, base: usize) -> Result<HeegnerPacket> {
    packet_in(class_group(disc)?, base)
}

/// Packet for an already computed class group.
pub fn packet_in(group: ClassGroup, base: usize) -> Result<HeegnerPacket> {
    if base >= group.h() {
        return Err(Error::domain(format!(
            "base class {base} out of range (h = {})",
            group.h()
        )));
    }
    let points = (0..group.h())
        .map(|i| cm_point(&group.forms[group.mul(i, base)]).map(|p| UpperHalfPoint::from(&p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HeegnerPacket {
        disc: group.disc,
        group,
        base,
        points,
    })
}

/// A test function on the modular surface with known mean.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceTest {
    Eisenstein(PsiWindow),
    Box(BoxRegion),
    /// Box indicator minus the box measure.
    CenteredBox(BoxRegion),
    Constant(f64),
}

impl SurfaceTest {
    pub fn eval(&self, z: UpperHalfPoint) -> Result<f64> {
        Ok(match self {
            SurfaceTest::Eisenstein(psi) => incomplete_eisenstein(z, psi),
            SurfaceTest::Box(b) => f64::from(u8::from(b.indicator(z)?)),
            SurfaceTest::CenteredBox(b) => f64::from(u8::from(b.indicator(z)?)) - b.measure(),
            SurfaceTest::Constant(c) => *c,
        })
    }

    /// Mean against the probability measure `(3/pi) dx dy / y^2`.
    pub fn mean(&self) -> Result<f64> {
        Ok(match self {
            SurfaceTest::Eisenstein(psi) => 3.0 / std::f64::consts::PI * psi.surface_mean()?,
            SurfaceTest::Box(b) => b.measure(),
            SurfaceTest::CenteredBox(_) => 0.0,
            SurfaceTest::Constant(c) => *c,
        })
    }

    pub fn label(&self) -> String {
        match self {
            SurfaceTest::Eisenstein(_) => "eisenstein".into(),
            SurfaceTest::Box(b) => format!("box[{},{}]x[{},{}]", b.x0, b.x1, b.y0, b.y1),
            SurfaceTest::CenteredBox(b) => format!("cbox[{},{}]x[{},{}]", b.x0, b.x1, b.y0, b.y1),
            SurfaceTest::Constant(c) => format!("const{c}"),
        }
    }

    /// Values at every packet point, indexed by class.
    pub fn values(&self, p: &HeegnerPacket) -> Result<Vec<f64>> {
        p.points.iter().map(|&z| self.eval(z)).collect()
    }
}

/// `W(f, chi) = (1/h) sum_a f([a].x) chi([a])` from the values of `f` on the packet.
pub fn twisted_period_values(vals: &[f64], chi: &ClassChar, g: &ClassGroup) -> Complex64 {
    let s: Complex64 = vals
        .iter()
        .enumerate()
        .map(|(i, &v)| chi.eval(g, i) * v)
        .sum();
    s / vals.len() as f64
}

pub fn twisted_period(f: &SurfaceTest, chi: &ClassChar, p: &HeegnerPacket) -> Result<Complex64> {
    Ok(twisted_period_values(&f.values(p)?, chi, &p.group))
}

/// `W(f, chi)` for every character, in the order of [`characters`].
pub fn all_periods(vals: &[f64], g: &ClassGroup) -> Vec<(ClassChar, Complex64)> {
    characters(g)
        .into_iter()
        .map(|c| {
            let w = twisted_period_values(vals, &c, g);
            (c, w)
        })
        .collect()
}

/// How `p_delta` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `(1/h) sum_a f([a].x) conj f([n][a].x) psi([a])`.
    Folded,
    /// `sum_chi chi(n) W(f, chi psi) conj W(f, chi)`.
    CharacterSum,
}

fn check_disc(n: &IdealExponents, p: &HeegnerPacket) -> Result<()> {
    if n.disc != p.disc {
        return Err(Error::domain(format!(
            "ideal lives in discriminant -{} but the packet in -{}",
            n.disc.big_d, p.disc.big_d
        )));
    }
    Ok(())
}

/// The twisted moment `P^Delta(f (x) f; n, psi)` from values of `f` on the packet.
pub fn p_delta_values(
    vals: &[f64],
    n: &IdealExponents,
    psi: &ClassChar,
    p: &HeegnerPacket,
    route: Route,
) -> Result<Complex64> {
    check_disc(n, p)?;
    let g = &p.group;
    let cls = g.ideal_class(n)?;
    let h = p.h() as f64;
    Ok(match route {
        Route::Folded => {
            let s: Complex64 = (0..p.h())
                .map(|a| psi.eval(g, a) * (vals[a] * vals[g.mul(cls, a)]))
                .sum();
            s / h
        }
        Route::CharacterSum => characters(g)
            .iter()
            .map(|chi| {
                let w1 = twisted_period_values(vals, &chi.mul(psi), g);
                let w2 = twisted_period_values(vals, chi, g);
                chi.eval(g, cls) * w1 * w2.conj()
            })
            .sum(),
    })
}

pub fn p_delta(
    f: &SurfaceTest,
    n: &IdealExponents,
    psi: &ClassChar,
    p: &HeegnerPacket,
    route: Route,
) -> Result<Complex64> {
    p_delta_values(&f.values(p)?, n, psi, p, route)
}

/// Both sides of the Parseval relation
/// `sum_chi W(f1, chi^nu) W(f2, conj chi) = (1/h) sum_a f1([a].x) f2([a]^nu.x)`.
pub fn parseval_sides(v1: &[f64], v2: &[f64], nu: u64, g: &ClassGroup) -> (Complex64, Complex64) {
    let lhs: Complex64 = characters(g)
        .iter()
        .map(|chi| {
            twisted_period_values(v1, &chi.pow(nu), g) * twisted_period_values(v2, &chi.conj(), g)
        })
        .sum();
    let rhs: f64 = (0..g.h())
        .map(|a| v1[a] * v2[g.pow(a, nu as i64)])
        .sum::<f64>()
        / g.h() as f64;
    (lhs, Complex64::new(rhs, 0.0))
}

/// The three forms of the quadratic-character average for `nu = 2`:
/// the plain sum, its average over `psi^2 = 1`, and the inner-averaged form.
pub fn psi_average_sides(v1: &[f64], v2: &[f64], g: &ClassGroup) -> [Complex64; 3] {
    let chars = characters(g);
    let quad: Vec<&ClassChar> = chars.iter().filter(|c| c.pow(2).is_trivial()).collect();
    let m = quad.len() as f64;
    let w = |v: &[f64], c: &ClassChar| twisted_period_values(v, c, g);
    let plain: Complex64 = chars
        .iter()
        .map(|c| w(v1, &c.pow(2)) * w(v2, c).conj())
        .sum();
    let averaged: Complex64 = quad
        .iter()
        .flat_map(|psi| chars.iter().map(move |c| c.mul(psi)))
        .map(|cp| w(v1, &cp.pow(2)) * w(v2, &cp).conj())
        .sum::<Complex64>()
        / m;
    let inner: Complex64 = chars
        .iter()
        .map(|c| {
            let avg: Complex64 = quad
                .iter()
                .map(|psi| w(v2, &c.mul(psi)).conj())
                .sum::<Complex64>()
                / m;
            w(v1, &c.pow(2)) * avg
        })
        .sum();
    [plain, averaged, inner]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithbase::fundamental_discriminant;
    use crate::modsurface::MeanZero;

    fn d(big_d: u64) -> Discriminant {
        Discriminant::from_big_d(big_d).unwrap()
    }

    fn tests() -> Vec<SurfaceTest> {
        vec![
            SurfaceTest::Eisenstein(PsiWindow::default()),
            SurfaceTest::Box(BoxRegion::new(-0.5, 0.5, 1.2, 3.0).unwrap()),
            SurfaceTest::CenteredBox(BoxRegion::new(-0.25, 0.3, 1.0, 1.7).unwrap()),
        ]
    }

    #[test]
    fn small_packets() {
        let p = packet(&d(4), 0).unwrap();
        assert_eq!(p.h(), 1);
        assert!((p.points[0].x).abs() < 1e-15 && (p.points[0].y - 1.0).abs() < 1e-15);
        let big = packet(&fundamental_discriminant(770).unwrap(), 0).unwrap();
        assert_eq!(big.h(), 32);
        for i in 0..32 {
            for j in 0..i {
                let (a, b) = (big.points[i], big.points[j]);
                assert!((a.x - b.x).hypot(a.y - b.y) > 1e-9);
            }
        }
    }

    #[test]
    fn base_change_relabels() {
        let disc = fundamental_discriminant(770).unwrap();
        let p0 = packet(&disc, 0).unwrap();
        let p5 = packet(&disc, 5).unwrap();
        let key = |z: &UpperHalfPoint| ((z.x * 1e9).round() as i64, (z.y * 1e9).round() as i64);
        let mut a: Vec<_> = p0.points.iter().map(key).collect();
        let mut b: Vec<_> = p5.points.iter().map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(packet(&disc, 32).is_err());
    }

    #[test]
    fn trivial_character_and_class_number_one() {
        let p = packet(&d(20), 0).unwrap();
        let f = &tests()[0];
        let vals = f.values(&p).unwrap();
        let w = twisted_period(f, &ClassChar::trivial(&p.group), &p).unwrap();
        assert!((w.re - vals.iter().sum::<f64>() / vals.len() as f64).abs() < 1e-15);
        let one = packet(&d(4), 0).unwrap();
        let w1 = twisted_period(f, &ClassChar::trivial(&one.group), &one).unwrap();
        assert!((w1.re - f.eval(one.points[0]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn parseval_and_psi_average() {
        for big_d in [20, 3080] {
            let p = packet(&d(big_d), 0).unwrap();
            let vals: Vec<Vec<f64>> = tests().iter().map(|t| t.values(&p).unwrap()).collect();
            for v1 in &vals {
                for v2 in &vals {
                    for nu in [1, 2] {
                        let (l, r) = parseval_sides(v1, v2, nu, &p.group);
                        assert!((l - r).norm() < 1e-10, "D {big_d} nu {nu}: {l} vs {r}");
                    }
                    let [a, b, c] = psi_average_sides(v1, v2, &p.group);
                    let (r, _) = parseval_sides(v1, v2, 2, &p.group);
                    assert!(
                        (a - r).norm() < 1e-10 && (b - a).norm() < 1e-10 && (c - a).norm() < 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn p_delta_routes_agree() {
        let disc = d(3080);
        let p = packet(&disc, 0).unwrap();
        let chars = characters(&p.group);
        let n = IdealExponents::new(disc, &[(3, 1, 0), (13, 0, 2)]).unwrap();
        for f in tests() {
            let vals = f.values(&p).unwrap();
            for psi in [&chars[0], &chars[1], &chars[7]] {
                let a = p_delta_values(&vals, &n, psi, &p, Route::Folded).unwrap();
                let b = p_delta_values(&vals, &n, psi, &p, Route::CharacterSum).unwrap();
                assert!((a - b).norm() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn diagonal_and_orthogonality() {
        let disc = d(3080);
        let p = packet(&disc, 0).unwrap();
        let f = SurfaceTest::Eisenstein(PsiWindow::default());
        let vals = f.values(&p).unwrap();
        let sup = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let triv = ClassChar::trivial(&p.group);
        let one = IdealExponents::trivial(disc);
        let v = p_delta_values(&vals, &one, &triv, &p, Route::Folded).unwrap();
        assert!(v.im == 0.0 && v.re >= 0.0 && v.re <= sup * sup);
        let psi = &characters(&p.group)[3];
        let c = SurfaceTest::Constant(2.5);
        assert!(p_delta(&c, &one, psi, &p, Route::Folded).unwrap().norm() < 1e-13);
        assert!(
            p_delta(&c, &one, psi, &p, Route::CharacterSum)
                .unwrap()
                .norm()
                < 1e-13
        );
    }

    #[test]
    fn conjugate_ideal() {
        let disc = d(3080);
        let p = packet(&disc, 0).unwrap();
        let vals = SurfaceTest::Eisenstein(PsiWindow::default())
            .values(&p)
            .unwrap();
        let chars = characters(&p.group);
        let n = IdealExponents::new(disc, &[(3, 2, 0), (19, 1, 0)]).unwrap();
        let nbar = IdealExponents::new(disc, &[(3, 0, 2), (19, 0, 1)]).unwrap();
        let cls = p.group.ideal_class(&n).unwrap();
        for psi in &chars {
            let a = p_delta_values(&vals, &n, psi, &p, Route::Folded).unwrap();
            let b = p_delta_values(&vals, &nbar, psi, &p, Route::Folded).unwrap();
            if psi.is_trivial() {
                assert!((b - a.conj()).norm() < 1e-14);
            }
            // in general the conjugate picks up psi(n)
            assert!((b - psi.eval(&p.group, cls) * a).norm() < 1e-12);
        }
    }

    #[test]
    fn means() {
        let b = BoxRegion::new(-0.5, 0.5, 1.2, 3.0).unwrap();
        assert_eq!(SurfaceTest::Box(b).mean().unwrap(), b.measure());
        assert_eq!(SurfaceTest::CenteredBox(b).mean().unwrap(), 0.0);
        assert!(
            SurfaceTest::Eisenstein(PsiWindow::default())
                .mean()
                .unwrap()
                .abs()
                < 1e-12
        );
        let off = PsiWindow::bump(1.0, 2.0, MeanZero::Off).unwrap();
        assert!(SurfaceTest::Eisenstein(off).mean().unwrap() > 0.0);
    }
}
