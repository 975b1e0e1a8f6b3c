//! Experiments on Heegner packets: twisted periods and moments, joint Weyl sums, the
//! eigenvalue sums over split primes and the mollifier machinery built from them.

pub mod arith;
pub mod eisen;
pub mod mollifier;
pub mod offspeed;
pub mod packet;
pub mod schedule;
pub mod trend;
pub mod weyl;

pub use arith::{
    density_report, pigeonhole_report, s_d, t_d, ArithConfig, ArithSum, DensityMode, DensityReport,
    PigeonholeReport,
};
pub use eisen::{
    eisenstein_main_term, lambda_it, moment_experiment, MomentExperiment, MomentRow, PsiChoice,
};
pub use mollifier::{IdentityCheck, MollifierBlock, MollifierKind};
pub use offspeed::{offspeed_diagnostics, OffspeedReport};
pub use packet::{p_delta, packet, twisted_period, HeegnerPacket, Route, SurfaceTest};
pub use schedule::{schedule, Level0, Schedule, ScheduleMode};
pub use trend::{dyadic_trend, Trend};
pub use weyl::{joint_weyl, weyl_trend, WeylTable};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` keys drawn without replacement from `candidates` with a seeded generator,
/// returned sorted. All candidates are returned when there are too few.
pub fn sample_sorted(candidates: &[u64], count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = if count >= candidates.len() {
        candidates.to_vec()
    } else {
        rand::seq::index::sample(&mut rng, candidates.len(), count)
            .into_iter()
            .map(|i| candidates[i])
            .collect()
    };
    out.sort_unstable();
    out
}

/// Up to `per_block` keys from each dyadic block `[2^k, 2^{k+1})` for `lo_exp <= k < hi_exp`
/// satisfying `keep`, each block with its own seed derived from `seed`.
pub fn sample_dyadic(
    lo_exp: u32,
    hi_exp: u32,
    per_block: usize,
    seed: u64,
    keep: impl Fn(u64) -> bool,
) -> Vec<u64> {
    let mut out = Vec::new();
    for k in lo_exp..hi_exp {
        let cands: Vec<u64> = ((1u64 << k)..(1u64 << (k + 1)))
            .filter(|&x| keep(x))
            .collect();
        out.extend(sample_sorted(
            &cands,
            per_block,
            seed.wrapping_add(k as u64),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let c: Vec<u64> = (0..1000).collect();
        let a = sample_sorted(&c, 20, 5);
        assert_eq!(a, sample_sorted(&c, 20, 5));
        assert_ne!(a, sample_sorted(&c, 20, 6));
        assert_eq!(a.len(), 20);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_sorted(&[3, 1], 5, 0), vec![1, 3]);
        let d = sample_dyadic(4, 7, 3, 1, |x| x % 2 == 1);
        assert_eq!(d.len(), 9);
        assert!(d.iter().all(|x| x % 2 == 1 && (16..128).contains(x)));
    }
}
