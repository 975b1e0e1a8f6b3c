//! Joint Weyl sums over the graph of the orthogonal complement map, pairing sphere
//! harmonics with surface test functions.

use rayon::prelude::*;
use serde::Serialize;

use super::packet::SurfaceTest;
use super::trend::{dyadic_trend, Trend};
use crate::error::Result;
use crate::gaussorth::orth_map;
use crate::modsurface::UpperHalfPoint;
use crate::ternary::{arg_project, TernaryQF};

/// Real spherical harmonic `Y_{l,m}` at a unit vector, normalized to mean square 1 on the sphere.
/// `m > 0` carries `cos(m phi)`, `m < 0` carries `sin(|m| phi)`.
pub fn real_harmonic(l: u32, m: i32, v: &[f64; 3]) -> f64 {
    let am = m.unsigned_abs();
    assert!(am <= l, "order exceeds degree");
    let x = v[2].clamp(-1.0, 1.0);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m, then upward in degree
    let mut pmm = 1.0;
    for k in 1..=am {
        pmm *= (2 * k - 1) as f64 * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut a = pmm;
        let mut b = x * (2 * am + 1) as f64 * pmm;
        for ll in am + 2..=l {
            let c = ((2 * ll - 1) as f64 * x * b - (ll + am - 1) as f64 * a) / (ll - am) as f64;
            a = b;
            b = c;
        }
        b
    };
    let ratio: f64 = (l - am + 1..=l + am)
        .map(|k| k as f64)
        .product::<f64>()
        .recip();
    let norm = ((2 * l + 1) as f64 * ratio * if m == 0 { 1.0 } else { 2.0 }).sqrt();
    let phi = v[1].atan2(v[0]);
    let ang = match m.cmp(&0) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Greater => (am as f64 * phi).cos(),
        std::cmp::Ordering::Less => (am as f64 * phi).sin(),
    };
    norm * plm * ang
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylEntry {
    pub degree: u32,
    pub order: i32,
    pub test: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylTable {
    pub d: u64,
    pub orbits: usize,
    pub entries: Vec<WeylEntry>,
}

impl WeylTable {
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.abs()))
    }
}

/// Averages over the orbits of `R_f(d)` of `Y(Arg) g(tau)`. A harmonic is evaluated on an
/// orbit as its mean over the orbit, which is a function on the quotient of the sphere.
/// Rows: every `(l, m)` with `1 <= l <= max_degree` against each test and the constant 1,
/// then degree 0 against each test minus its mean.
pub fn joint_weyl(
    d: u64,
    f: &TernaryQF,
    max_degree: u32,
    tests: &[SurfaceTest],
) -> Result<WeylTable> {
    let entries_map = orth_map(d, f)?;
    let n = entries_map.len();
    let mut harm: Vec<(u32, i32, Vec<f64>)> = Vec::new();
    let args: Vec<Vec<[f64; 3]>> = entries_map
        .iter()
        .map(|e| {
            e.orbit
                .orbit
                .iter()
                .map(|y| arg_project(y, f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for l in 1..=max_degree {
        for m in -(l as i32)..=l as i32 {
            let vals = args
                .iter()
                .map(|orb| {
                    orb.iter().map(|v| real_harmonic(l, m, v)).sum::<f64>() / orb.len() as f64
                })
                .collect();
            harm.push((l, m, vals));
        }
    }
    let taus: Vec<UpperHalfPoint> = entries_map
        .iter()
        .map(|e| UpperHalfPoint::from(&e.result.cm))
        .collect();
    let mut test_vals: Vec<(String, Vec<f64>, f64)> = vec![("one".into(), vec![1.0; n], 1.0)];
    for t in tests {
        let v = taus
            .iter()
            .map(|&z| t.eval(z))
            .collect::<Result<Vec<_>>>()?;
        test_vals.push((t.label(), v, t.mean()?));
    }
    let mut entries = Vec::new();
    for (l, m, hv) in &harm {
        for (label, gv, _) in &test_vals {
            let value = hv.iter().zip(gv).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            entries.push(WeylEntry {
                degree: *l,
                order: *m,
                test: label.clone(),
                value,
            });
        }
    }
    for (label, gv, mean) in test_vals.iter().skip(1) {
        let value = gv.iter().map(|g| g - mean).sum::<f64>() / n as f64;
        entries.push(WeylEntry {
            degree: 0,
            order: 0,
            test: label.clone(),
            value,
        });
    }
    Ok(WeylTable {
        d,
        orbits: n,
        entries,
    })
}

/// `max |entry|` for each `d`, with the dyadic trend of those maxima.
pub fn weyl_trend(
    ds: &[u64],
    f: &TernaryQF,
    max_degree: u32,
    tests: &[SurfaceTest],
) -> Result<(Vec<(u64, f64)>, Trend)> {
    let maxima: Vec<Result<(u64, f64)>> = ds
        .par_iter()
        .map(|&d| joint_weyl(d, f, max_degree, tests).map(|t| (d, t.max_abs())))
        .collect();
    let mut out = maxima.into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|r| r.0);
    let trend = dyadic_trend(&out);
    Ok((out, trend))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsurface::{BoxRegion, PsiWindow};
    use crate::quad::{integrate_real, QuadOpts};

    #[test]
    fn harmonics_are_orthonormal() {
        let opts = QuadOpts {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 2000,
        };
        let idx: Vec<(u32, i32)> = (0..=4)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
            .collect();
        const NPHI: usize = 24;
        for &(l1, m1) in &idx {
            for &(l2, m2) in &idx {
                let f = |x: f64| {
                    let s = (1.0 - x * x).max(0.0).sqrt();
                    (0..NPHI)
                        .map(|k| {
                            let phi = std::f64::consts::TAU * k as f64 / NPHI as f64;
                            let v = [s * phi.cos(), s * phi.sin(), x];
                            real_harmonic(l1, m1, &v) * real_harmonic(l2, m2, &v)
                        })
                        .sum::<f64>()
                        / NPHI as f64
                };
                let ip = integrate_real(f, -1.0, 1.0, opts).unwrap().0 / 2.0;
                let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10, "({l1},{m1}) ({l2},{m2}): {ip}");
            }
        }
    }

    #[test]
    fn harmonic_values() {
        // Y_{1,0} = sqrt(3) z and Y_{2,2} = sqrt(15)/2 (x^2 - y^2)
        let v = [0.6, 0.0, 0.8];
        assert!((real_harmonic(1, 0, &v) - 3f64.sqrt() * 0.8).abs() < 1e-14);
        assert!((real_harmonic(2, 2, &v) - 15f64.sqrt() / 2.0 * 0.36).abs() < 1e-14);
    }

    fn surface_tests() -> Vec<SurfaceTest> {
        vec![
            SurfaceTest::Eisenstein(PsiWindow::default()),
            SurfaceTest::CenteredBox(BoxRegion::new(-0.5, 0.5, 1.0, 2.0).unwrap()),
            SurfaceTest::CenteredBox(BoxRegion::new(-0.5, 0.0, 2.0, f64::INFINITY).unwrap()),
        ]
    }

    #[test]
    fn gauss_770_table() {
        let t = joint_weyl(770, &TernaryQF::f1(), 4, &surface_tests()).unwrap();
        assert_eq!(t.orbits, 16);
        for e in &t.entries {
            if e.degree == 1 {
                assert!(e.value.abs() < 1e-14, "{e:?}");
            }
        }
        let rows = t.entries.len();
        assert_eq!(rows, (3 + 5 + 7 + 9) * 4 + 3);
        // regression values from the first run
        let get = |l: u32, m: i32, test: &str| {
            t.entries
                .iter()
                .find(|e| e.degree == l && e.order == m && e.test == test)
                .unwrap()
                .value
        };
        assert!((t.max_abs() - 1.332237335603).abs() < 1e-9);
        assert!((get(4, 0, "one") + 0.063739669421).abs() < 1e-9);
        assert!((get(4, 4, "one") + 0.053869852807).abs() < 1e-9);
        assert!((get(4, 0, "eisenstein") - 0.026562170018).abs() < 1e-9);
        assert!((get(0, 0, "cbox[-0.5,0.5]x[1,2]") - 0.022535170724).abs() < 1e-9);
        // the quotient harmonics vanish below degree 4 and at orders not divisible by 4
        let nonzero: Vec<(u32, i32)> = t
            .entries
            .iter()
            .filter(|e| e.degree > 0 && e.value.abs() > 1e-12)
            .map(|e| (e.degree, e.order))
            .collect();
        assert!(
            nonzero.iter().all(|&(l, m)| l == 4 && m % 4 == 0),
            "{nonzero:?}"
        );
    }
}
