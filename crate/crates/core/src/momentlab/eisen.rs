//! The Eisenstein main term of the twisted moment and the trend experiment against it.

use num_complex::Complex64;
use rayon::prelude::*;

use super::packet::{p_delta_values, packet, Route, SurfaceTest};
use super::trend::{dyadic_trend, Trend};
use crate::arithbase::{primitive_kernel, tau_star, v_index_f64, Discriminant, IdealExponents};
use crate::error::{Error, Result};
use crate::modsurface::{phi_integral_weighted, MeanZero, PhiIntegral, PsiWindow};
use crate::qfclass::{characters, ClassChar};

/// Tail tolerance used for main terms.
pub const MAIN_TERM_TAIL: f64 = 1e-8;

/// `Lambda_{it}(n) = sqrt(N n*) / V(N n*) tau*_{it}(N n*)`, real for real `t`.
pub fn lambda_it(n_star_norm: u64, t: f64) -> f64 {
    let m = n_star_norm as f64;
    m.sqrt() / v_index_f64(n_star_norm) * tau_star(Complex64::new(t, 0.0), n_star_norm).re
}

/// `int_R Lambda_{it}(n) Phi(t) dt / 2pi` for the trivial twist.
pub fn eisenstein_main_term(n: &IdealExponents, psi: &PsiWindow) -> Result<PhiIntegral> {
    if psi.mode() == MeanZero::Off {
        return Err(Error::domain("main term needs a surface mean-zero window"));
    }
    let m = primitive_kernel(n).norm();
    phi_integral_weighted(psi, |t| lambda_it(m, t), MAIN_TERM_TAIL)
}

/// Which twist `psi` to use for each discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiChoice {
    Trivial,
    /// The first nontrivial character in enumeration order; class number one is skipped.
    FirstNontrivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub big_d: u64,
    pub h: usize,
    pub value: Complex64,
    pub main: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentExperiment {
    pub main_term: f64,
    pub rows: Vec<MomentRow>,
    /// Discriminants skipped because no nontrivial character exists.
    pub skipped: Vec<u64>,
    pub trend: Trend,
}

/// `|P^Delta(E_Psi (x) E_Psi; n, psi) - main term|` over a list of discriminants, where `n`
/// is given as `(p, r, s)` exponents of the chosen prime above `p` and its conjugate.
pub fn moment_experiment(
    discs: &[Discriminant],
    n_spec: &[(u64, u32, u32)],
    choice: PsiChoice,
    psi: &PsiWindow,
) -> Result<MomentExperiment> {
    let f = SurfaceTest::Eisenstein(psi.clone());
    let main_term = match (discs.first(), choice) {
        (Some(d), PsiChoice::Trivial) => {
            eisenstein_main_term(&IdealExponents::new(*d, n_spec)?, psi)?.value
        }
        _ => 0.0,
    };
    let results: Vec<Result<Option<MomentRow>>> = discs
        .par_iter()
        .map(|disc| {
            let n = IdealExponents::new(*disc, n_spec)?;
            let pk = packet(disc, 0)?;
            let twist = match choice {
                PsiChoice::Trivial => ClassChar::trivial(&pk.group),
                PsiChoice::FirstNontrivial => {
                    match characters(&pk.group).into_iter().find(|c| !c.is_trivial()) {
                        Some(c) => c,
                        None => return Ok(None),
                    }
                }
            };
            let vals = f.values(&pk)?;
            let value = p_delta_values(&vals, &n, &twist, &pk, Route::Folded)?;
            Ok(Some(MomentRow {
                big_d: disc.big_d,
                h: pk.h(),
                value,
                main: main_term,
                deviation: (value - main_term).norm(),
            }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (disc, r) in discs.iter().zip(results) {
        match r? {
            Some(row) => rows.push(row),
            None => skipped.push(disc.big_d),
        }
    }
    rows.sort_by_key(|r| r.big_d);
    let trend = dyadic_trend(
        &rows
            .iter()
            .map(|r| (r.big_d, r.deviation))
            .collect::<Vec<_>>(),
    );
    Ok(MomentExperiment {
        main_term,
        rows,
        skipped,
        trend,
    })
}
