//! The subcommands: each declares its keys and writes its outputs through [`Output`].

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use orthlab_core::arithbase::{
    is_squarefree, sieve_primes, splitting_type, Discriminant, Splitting,
};
use orthlab_core::gaussorth::{gauss_770, orth_map};
use orthlab_core::heckeseries::{eta_product, hecke_verify, EigenSource};
use orthlab_core::modsurface::{BoxRegion, PsiWindow};
use orthlab_core::momentlab::{
    density_report, joint_weyl, moment_experiment, offspeed_diagnostics, pigeonhole_report, s_d,
    sample_dyadic, schedule, t_d, weyl_trend, ArithConfig, ArithSum, DensityMode, Level0,
    MollifierBlock, MollifierKind, PsiChoice, ScheduleMode, SurfaceTest, Trend,
};
use orthlab_core::polycert::run_all;
use orthlab_core::primechar::{
    smooth_char_sum_with, split_ratio_with, windowed_harmonic_sum, CharSpec, Cutoff, PrimeWeight,
    SmoothWindow,
};
use orthlab_core::qfclass::{
    characters, class_group, genus_invariants, prime_discriminants, BinaryQF,
};
use orthlab_core::ternary::{admissible, automorphism_group, orbits, represent, TernaryQF};

use crate::config::{key, Key, RunConfig};
use crate::error::CliError;
use crate::output::{num, Output};

pub const REPRESENT: &[Key] = &[
    key("form", "f1", "ternary form: f1 (x^2+y^2+z^2) or f2"),
    key("d", "770", "represented integer"),
];
pub const ORTH: &[Key] = &[
    key("form", "f1", "ternary form: f1 (x^2+y^2+z^2) or f2"),
    key("d", "770", "represented integer"),
    key(
        "gauss770",
        "false",
        "compare d = 770 for f1 with the golden table",
    ),
];
pub const CLASSGROUP: &[Key] = &[key(
    "D",
    "3080",
    "positive D of the fundamental discriminant -D",
)];
pub const WEYL: &[Key] = &[
    key("form", "f1", "ternary form"),
    key("d", "0", "single d for one table; 0 runs the dyadic trend"),
    key("degree", "4", "largest harmonic degree"),
    key("d_min", "4096", "trend range start"),
    key("d_max", "100000", "trend range end"),
    key("per_block", "500", "samples per dyadic block"),
    key("seed", "7", "sampling seed"),
];
pub const MOMENT: &[Key] = &[
    key("p", "3", "prime whose split ideal is the shift"),
    key("psi", "trivial", "twist: trivial or nontrivial"),
    key("d_min", "4096", "smallest D"),
    key("d_max", "100000", "largest D"),
    key(
        "per_block",
        "0",
        "samples per dyadic block; 0 takes every D",
    ),
    key("seed", "1", "sampling seed"),
];
pub const MOLLIFY: &[Key] = &[
    key("task", "schedule", "schedule or identity"),
    key("L0", "10000000", "synthetic top level (rational)"),
    key("loglog_D", "0", "if nonzero, L0 = log log of this D"),
    key("B", "1", "eigenvalue cap (rational)"),
    key("c", "1/1000000000000", "range exponent (rational)"),
    key("C0", "11", "smallest prime"),
    key("strict", "false", "reject c > 1/16"),
    key("D", "3080", "discriminant for identity"),
    key("primes", "13,19", "primes of the block"),
    key("ell", "2", "truncation length"),
    key("kind", "paired", "paired or alpha"),
    key("alpha", "0.25", "coefficient for alpha"),
    key("cap", "none", "cap on |lambda| for identity, or none"),
];
pub const CHARSUM: &[Key] = &[
    key("D", "4", "positive D"),
    key("X", "100", "range is X <= p <= X^2"),
    key("eps", "0.05", "smooth window width"),
];
pub const POLYCERT: &[Key] = &[];
pub const HECKE: &[Key] = &[
    key("source", "level2", "delta, level2 or level5"),
    key("precision", "2000", "series length"),
    key("range", "2000", "Hecke relation check range"),
];
pub const REPORT: &[Key] = &[
    key("kind", "density", "density, sums, pigeonhole or offspeed"),
    key("source1", "level2", "first eigenvalue source"),
    key("source2", "level5", "second eigenvalue source"),
    key("precision", "100000", "eigenvalue precision"),
    key("eps", "0.01", "gap threshold"),
    key("X", "100000", "density range"),
    key("D", "3080", "positive D"),
    key("psi", "8", "pigeonhole start exponent"),
    key("c", "1/2", "range exponent (rational)"),
    key("B", "10", "eigenvalue cap, or none"),
    key("C0", "7", "smallest prime"),
];

pub fn keys_for(command: &str) -> &'static [Key] {
    match command {
        "represent" => REPRESENT,
        "orth" => ORTH,
        "classgroup" => CLASSGROUP,
        "weyl" => WEYL,
        "moment" => MOMENT,
        "mollify" => MOLLIFY,
        "charsum" => CHARSUM,
        "polycert" => POLYCERT,
        "hecke" => HECKE,
        "report" => REPORT,
        _ => &[],
    }
}

fn form(cfg: &RunConfig) -> Result<TernaryQF, CliError> {
    Ok(match cfg.choice("form", &["f1", "f2"])? {
        "f1" => TernaryQF::f1(),
        _ => TernaryQF::f2(),
    })
}

fn disc(cfg: &RunConfig) -> Result<Discriminant, CliError> {
    Ok(Discriminant::from_big_d(cfg.u64("D")?)?)
}

fn bqf(f: &BinaryQF) -> Value {
    json!([f.a, f.b, f.c])
}

fn usize_of(v: u64) -> Result<usize, CliError> {
    usize::try_from(v).map_err(|_| CliError::Usage(format!("{v} is too large")))
}

fn trend_json(t: &Trend) -> Value {
    serde_json::to_value(t).expect("trend serializes")
}

pub fn represent_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let f = form(&cfg)?;
    let d = cfg.u64("d")?;
    let pts = represent(&f, d)?;
    let group = automorphism_group(&f);
    let orbs = orbits(&pts, &group.rotations)?;
    let rows: Vec<Vec<String>> = orbs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut r = vec![i.to_string()];
            r.extend(o.rep.iter().map(|t| t.to_string()));
            r.push(o.orbit.len().to_string());
            r.push(o.stabilizer.to_string());
            r
        })
        .collect();
    out.csv(
        "represent.csv",
        &["orbit", "x", "y", "z", "size", "stabilizer"],
        &rows,
    )
}

pub fn orth_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    if cfg.bool("gauss770")? {
        let g = gauss_770()?;
        let rows: Vec<Value> = g
            .entries
            .iter()
            .map(|e| json!({ "rep": e.orbit.rep, "size": e.orbit.orbit.len(), "form": bqf(&e.result.form) }))
            .collect();
        let passed = g.passed();
        out.json(
            "gauss770.json",
            &json!({
                "d": 770,
                "orbits": rows,
                "orbits_hit": g.orbits_hit,
                "in_genus": g.in_genus,
                "orientations": [bqf(&g.orientations.0), bqf(&g.orientations.1)],
                "passed": passed,
            }),
        )?;
        return if passed {
            Ok(())
        } else {
            Err(CliError::Failed(
                "Orth(770) does not match the golden table".into(),
            ))
        };
    }
    let f = form(&cfg)?;
    let d = cfg.u64("d")?;
    let entries = orth_map(d, &f)?;
    let rows = entries
        .iter()
        .map(|e| {
            Ok(json!({
                "rep": e.orbit.rep,
                "size": e.orbit.orbit.len(),
                "raw": bqf(&e.result.raw),
                "scale": e.result.scale,
                "extended": e.result.extended,
                "form": bqf(&e.result.form),
                "genus": genus_invariants(&e.result.form)?,
                "cm": [e.result.cm.x, e.result.cm.y],
                "arg": e.arg,
            }))
        })
        .collect::<Result<Vec<Value>, CliError>>()?;
    out.json(
        "orth.json",
        &json!({ "d": d, "form": cfg.str("form"), "orbits": rows }),
    )
}

pub fn classgroup_cmd(out: &mut Output) -> Result<(), CliError> {
    let dd = disc(out.config())?;
    let g = class_group(&dd)?;
    let mut v: Value =
        serde_json::from_str(&g.to_json()).map_err(|e| CliError::Data(e.to_string()))?;
    v["two_torsion"] = json!(g.two_torsion());
    v["prime_discriminants"] = json!(prime_discriminants(&dd));
    out.json("classgroup.json", &v)
}

fn weyl_tests() -> Result<Vec<SurfaceTest>, CliError> {
    Ok(vec![
        SurfaceTest::Eisenstein(PsiWindow::default()),
        SurfaceTest::CenteredBox(BoxRegion::new(-0.5, 0.5, 1.0, 2.0)?),
        SurfaceTest::CenteredBox(BoxRegion::new(-0.5, 0.0, 2.0, f64::INFINITY)?),
    ])
}

/// Dyadic block exponents `k` with `[2^k, 2^{k+1})` meeting `[lo, hi]`.
fn block_range(lo: u64, hi: u64) -> Result<(u32, u32), CliError> {
    if lo == 0 || hi < lo {
        return Err(CliError::Usage(format!(
            "need 0 < d_min <= d_max, got {lo}, {hi}"
        )));
    }
    Ok((lo.ilog2(), hi.ilog2() + 1))
}

pub fn weyl_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let f = form(&cfg)?;
    let degree = u32::try_from(cfg.u64("degree")?)
        .map_err(|_| CliError::Usage("degree too large".into()))?;
    let tests = weyl_tests()?;
    let d = cfg.u64("d")?;
    if d != 0 {
        let t = joint_weyl(d, &f, degree, &tests)?;
        let rows: Vec<Vec<String>> = t
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.degree.to_string(),
                    e.order.to_string(),
                    e.test.clone(),
                    num(e.value),
                ]
            })
            .collect();
        return out.csv("weyl.csv", &["degree", "order", "test", "value"], &rows);
    }
    let (lo, hi) = (cfg.u64("d_min")?, cfg.u64("d_max")?);
    let (a, b) = block_range(lo, hi)?;
    let keep =
        |x: u64| x >= lo && x <= hi && is_squarefree(x) && admissible(&f, x).unwrap_or(false);
    let ds = sample_dyadic(
        a,
        b,
        usize_of(cfg.u64("per_block")?)?,
        cfg.u64("seed")?,
        keep,
    );
    let (maxima, trend) = weyl_trend(&ds, &f, degree, &tests)?;
    let rows: Vec<Vec<String>> = maxima
        .iter()
        .map(|(d, m)| vec![d.to_string(), num(*m)])
        .collect();
    out.csv("weyl_trend.csv", &["d", "max_abs"], &rows)?;
    out.json(
        "weyl_trend.json",
        &json!({ "samples": ds.len(), "trend": trend_json(&trend) }),
    )
}

/// Fundamental `D` in `[lo, hi]` at which `p` splits.
pub fn split_discriminants(p: u64, lo: u64, hi: u64) -> Vec<Discriminant> {
    (lo..=hi)
        .into_par_iter()
        .filter_map(|n| Discriminant::from_big_d(n).ok())
        .filter(|d| splitting_type(d, p) == Splitting::Split)
        .collect()
}

pub fn moment_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let p = cfg.u64("p")?;
    let choice = match cfg.choice("psi", &["trivial", "nontrivial"])? {
        "trivial" => PsiChoice::Trivial,
        _ => PsiChoice::FirstNontrivial,
    };
    let (lo, hi) = (cfg.u64("d_min")?, cfg.u64("d_max")?);
    let (a, b) = block_range(lo, hi)?;
    let all = split_discriminants(p, lo, hi);
    let per_block = usize_of(cfg.u64("per_block")?)?;
    let discs = if per_block == 0 {
        all
    } else {
        let keys: std::collections::BTreeSet<u64> = all.iter().map(|d| d.big_d).collect();
        sample_dyadic(a, b, per_block, cfg.u64("seed")?, |n| keys.contains(&n))
            .into_iter()
            .map(Discriminant::from_big_d)
            .collect::<Result<_, _>>()?
    };
    if discs.is_empty() {
        return Err(CliError::Usage(format!(
            "no fundamental D in [{lo}, {hi}] with {p} split"
        )));
    }
    let exp = moment_experiment(&discs, &[(p, 1, 0)], choice, &PsiWindow::default())?;
    let rows: Vec<Vec<String>> = exp
        .rows
        .iter()
        .map(|r| {
            vec![
                r.big_d.to_string(),
                r.h.to_string(),
                num(r.value.re),
                num(r.value.im),
                num(r.main),
                num(r.deviation),
            ]
        })
        .collect();
    out.csv(
        "moment.csv",
        &["D", "h", "re", "im", "main", "deviation"],
        &rows,
    )?;
    out.json(
        "moment.json",
        &json!({ "main_term": exp.main_term, "rows": exp.rows.len(), "skipped": exp.skipped, "trend": trend_json(&exp.trend) }),
    )
}

fn cap(cfg: &RunConfig, k: &str) -> Result<Option<BigRational>, CliError> {
    if cfg.str(k) == "none" {
        Ok(None)
    } else {
        Ok(Some(cfg.rational(k)?))
    }
}

pub fn mollify_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    match cfg.choice("task", &["schedule", "identity"])? {
        "schedule" => {
            let l0 = match cfg.u64("loglog_D")? {
                0 => Level0::Exact(cfg.rational("L0")?),
                d => Level0::LogLog(d),
            };
            let mode = if cfg.bool("strict")? {
                ScheduleMode::Strict
            } else {
                ScheduleMode::Relaxed
            };
            let s = schedule(
                l0,
                cfg.rational("B")?,
                cfg.rational("c")?,
                cfg.u64("C0")?,
                mode,
            )?;
            out.json("schedule.json", &s.to_json())
        }
        _ => {
            let dd = disc(&cfg)?;
            let g = class_group(&dd)?;
            let primes = cfg.u64_list("primes")?;
            let precision = usize_of(primes.iter().copied().max().unwrap_or(2).max(2000))?;
            let ell = usize_of(cfg.u64("ell")?)?;
            let bound = cap(&cfg, "cap")?;
            let (s1, s2) = (
                EigenSource::level2(precision)?,
                EigenSource::level5(precision)?,
            );
            let kind = match cfg.choice("kind", &["paired", "alpha"])? {
                "paired" => MollifierKind::Paired(&s1, &s2),
                _ => MollifierKind::Alpha(&s1, cfg.f64("alpha")?),
            };
            let block = MollifierBlock::new(kind, &g, &primes, bound.as_ref(), ell)?;
            let checks = [block.identity_check(1), block.identity_check(2)];
            let chars = characters(&g);
            let (gap, min_product) = chars
                .par_iter()
                .map(|chi| {
                    let e: Vec<f64> = [1u8, 2].iter().map(|&i| block.eval(chi, &g, i)).collect();
                    let gap = [1u8, 2]
                        .iter()
                        .map(|&i| (block.eval_ideals(chi, &g, i) - block.eval(chi, &g, i)).norm())
                        .fold(0.0, f64::max);
                    (gap, e[0] * e[1])
                })
                .reduce(|| (0.0, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.min(b.1)));
            let agree = checks.iter().all(|c| c.agree);
            out.json(
                "identity.json",
                &json!({
                    "D": dd.big_d,
                    "ell": block.ell,
                    "primes": block.primes,
                    "dropped": block.dropped,
                    "gamma": block.gamma.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "checks": checks,
                    "characters": chars.len(),
                    "max_route_gap": gap,
                    "min_product": min_product,
                    "passed": agree,
                }),
            )?;
            if agree {
                Ok(())
            } else {
                Err(CliError::Failed(
                    "mollifier identity has a mismatched coefficient".into(),
                ))
            }
        }
    }
}

pub fn charsum_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let dd = disc(&cfg)?;
    let x = cfg.u64("X")?;
    let hi = x
        .checked_mul(x)
        .ok_or_else(|| CliError::Usage("X^2 overflows".into()))?;
    let table = sieve_primes(hi.max(2))?;
    let r = split_ratio_with(&table, &dd, x)?;
    let w = SmoothWindow::new(cfg.f64("eps")?)?;
    let twisted = smooth_char_sum_with(
        &table,
        &CharSpec::Kronecker(dd),
        x,
        Cutoff::Smooth(w),
        PrimeWeight::Harmonic,
    )?;
    let principal = smooth_char_sum_with(
        &table,
        &CharSpec::Principal,
        x,
        Cutoff::Smooth(w),
        PrimeWeight::Harmonic,
    )?;
    out.json(
        "charsum.json",
        &json!({
            "D": dd.big_d,
            "X": x,
            "split": r.split,
            "inert": r.inert,
            "ramified": r.ramified,
            "total": r.total,
            "ratio": r.ratio,
            "smooth_twisted": twisted,
            "smooth_principal": principal,
            "windowed_harmonic": windowed_harmonic_sum(&table, x, w)?,
        }),
    )
}

pub fn polycert_cmd(out: &mut Output) -> Result<(), CliError> {
    let outcomes = run_all()?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.certificate.as_str())
        .collect();
    let list: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "certificate": o.certificate, "status": if o.passed { "pass" } else { "fail" }, "detail": o.detail }))
        .collect();
    out.json(
        "polycert.json",
        &json!({ "certificates": list, "passed": failed.is_empty() }),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

/// Eta-product exponents, level and weight.
type EtaSpec = (&'static [(u32, u32)], u64, u32);

fn eta_spec(name: &str) -> Result<EtaSpec, CliError> {
    Ok(match name {
        "delta" => (&[(1, 24)], 1, 12),
        "level2" => (&[(1, 8), (2, 8)], 2, 8),
        "level5" => (&[(1, 4), (5, 4)], 5, 4),
        other => {
            return Err(CliError::Usage(format!(
                "unknown source '{other}'; use delta, level2 or level5"
            )))
        }
    })
}

pub fn hecke_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let name = cfg.str("source").to_string();
    let (spec, level, weight) = eta_spec(&name)?;
    let precision = usize_of(cfg.u64("precision")?)?;
    let range = usize_of(cfg.u64("range")?)?;
    let series = eta_product(spec, precision)?;
    let report = hecke_verify(&series, level, weight, range)?;
    let summary = json!({
        "source": name,
        "level": level,
        "weight": weight,
        "precision": precision,
        "range": report.range,
        "pairs_checked": report.pairs_checked,
        "powers_checked": report.powers_checked,
        "failure": report.failure.as_ref().map(|f| f.to_string()),
        "passed": report.passed(),
    });
    if !report.passed() {
        out.json("hecke.json", &summary)?;
        return Err(CliError::Failed(format!(
            "{name} fails the Hecke relations"
        )));
    }
    let src = EigenSource::from_series(&name, &series, level, weight)?;
    let mut buf = Vec::new();
    src.write_csv(&mut buf)?;
    out.write(&format!("hecke_{name}.csv"), &buf)?;
    out.json("hecke.json", &summary)
}

fn sum_json(s: &ArithSum) -> Value {
    json!({ "exact": s.exact.to_string(), "value": s.value, "primes_used": s.primes_used, "bound": s.bound })
}

pub fn report_cmd(out: &mut Output) -> Result<(), CliError> {
    let cfg = out.config().clone();
    let kind = cfg.choice("kind", &["density", "sums", "pigeonhole", "offspeed"])?;
    let precision = usize_of(cfg.u64("precision")?)?;
    let src1 = EigenSource::builtin(cfg.str("source1"), precision)?;
    let v = match kind {
        "density" => {
            let src2 = EigenSource::builtin(cfg.str("source2"), precision)?;
            let (eps, x) = (cfg.f64("eps")?, cfg.u64("X")?);
            json!({
                "pair": density_report(DensityMode::Pair(&src1, &src2), eps, x)?,
                "single": density_report(DensityMode::Single(&src1), eps, x)?,
            })
        }
        "sums" => {
            let src2 = EigenSource::builtin(cfg.str("source2"), precision)?;
            let dd = disc(&cfg)?;
            let ac = ArithConfig::new(cfg.u64("C0")?, cfg.rational("c")?, cap(&cfg, "B")?)?;
            json!({ "D": dd.big_d, "S_D": sum_json(&s_d(&src1, &src2, &dd, &ac)?), "T_D": sum_json(&t_d(&src1, &dd, &ac)?) })
        }
        "pigeonhole" => {
            let src2 = EigenSource::builtin(cfg.str("source2"), precision)?;
            let dd = disc(&cfg)?;
            let c = cfg.rational("c")?;
            let cf = c
                .to_f64()
                .ok_or_else(|| CliError::Usage("c is not a finite number".into()))?;
            let b = if cfg.str("B") == "none" {
                f64::INFINITY
            } else {
                cfg.f64("B")?
            };
            serde_json::to_value(pigeonhole_report(
                &src1,
                &src2,
                &dd,
                cfg.f64("psi")?,
                cf,
                cfg.f64("eps")?,
                b,
            )?)
            .map_err(|e| CliError::Data(e.to_string()))?
        }
        _ => {
            let dd = disc(&cfg)?;
            let ac = ArithConfig::new(cfg.u64("C0")?, cfg.rational("c")?, cap(&cfg, "B")?)?;
            serde_json::to_value(offspeed_diagnostics(
                &dd,
                &src1,
                &ac,
                &PsiWindow::default(),
            )?)
            .map_err(|e| CliError::Data(e.to_string()))?
        }
    };
    out.json(&format!("report_{kind}.json"), &v)
}
