//! Exact integer convolution through number-theoretic transforms modulo several
//! primes `c 2^k + 1` and CRT reconstruction.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arithbase::{factor, is_prime, mod_pow};
use crate::error::{Error, Result};

/// Transform lengths up to `2^NTT_LOG` are supported.
pub const NTT_LOG: u32 = 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NttPrime {
    pub p: u64,
    pub root: u64,
}

/// NTT-friendly primes below `2^31`, largest first, with a primitive root each.
pub fn ntt_primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let step = 1u64 << NTT_LOG;
        let mut out = Vec::new();
        let mut c = ((1u64 << 31) - 1) / step;
        while c > 0 {
            let p = c * step + 1;
            if is_prime(p) {
                let qs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
                let root = (2..p)
                    .find(|&g| qs.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
                    .expect("prime has a root");
                out.push(NttPrime { p, root });
            }
            c -= 1;
        }
        out
    })
}

fn ntt(a: &mut [u64], pr: NttPrime, invert: bool) {
    let n = a.len();
    let p = pr.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = mod_pow(pr.root, (p - 1) / len as u64, p);
        if invert {
            w = mod_pow(w, p - 2, p);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % p;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % p;
                lo[k] = if u + v >= p { u + v - p } else { u + v };
                hi[k] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let ninv = mod_pow(n as u64 % p, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * ninv % p;
        }
    }
}

fn residues(a: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    a.iter()
        .map(|x| x.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect()
}

fn max_bits(a: &[BigInt]) -> u64 {
    a.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Exact product of two integer polynomials, truncated to `len` coefficients.
/// The prime count comes from the bound `|c_n| <= min(|a|,|b|) max|a| max|b|`, so the
/// reconstruction is exact, never probabilistic.
pub fn multiply(a: &[BigInt], b: &[BigInt], len: usize) -> Result<Vec<BigInt>> {
    if a.is_empty() || b.is_empty() || len == 0 {
        return Ok(vec![BigInt::zero(); len]);
    }
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let full = a.len() + b.len() - 1;
    let size = full.next_power_of_two();
    if size > 1 << NTT_LOG {
        return Err(Error::bounds(format!(
            "convolution length {full} exceeds 2^{NTT_LOG}"
        )));
    }
    let terms = a.len().min(b.len()) as u64;
    let bound_bits = max_bits(a) + max_bits(b) + (64 - terms.leading_zeros() as u64) + 1;
    let primes = ntt_primes();
    let mut used = 0;
    let mut bits = 0u64;
    while bits <= bound_bits {
        if used == primes.len() {
            return Err(Error::bounds(format!(
                "coefficients of {bound_bits} bits exceed the CRT capacity"
            )));
        }
        bits += 63 - primes[used].p.leading_zeros() as u64;
        used += 1;
    }
    let out_len = full.min(len);
    let per_prime: Vec<Vec<u64>> = primes[..used]
        .par_iter()
        .map(|&pr| {
            let mut fa = residues(a, pr.p);
            let mut fb = residues(b, pr.p);
            fa.resize(size, 0);
            fb.resize(size, 0);
            ntt(&mut fa, pr, false);
            ntt(&mut fb, pr, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = *x * y % pr.p;
            }
            ntt(&mut fa, pr, true);
            fa.truncate(out_len);
            fa
        })
        .collect();
    let mut out = crt_signed(&per_prime, &primes[..used]);
    out.resize(len, BigInt::zero());
    Ok(out)
}

/// Garner reconstruction into the symmetric residue range.
fn crt_signed(res: &[Vec<u64>], primes: &[NttPrime]) -> Vec<BigInt> {
    let k = primes.len();
    // inv[i][j] = p_j^{-1} mod p_i for j < i
    let mut inv = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..i {
            inv[i][j] = mod_pow(primes[j].p % primes[i].p, primes[i].p - 2, primes[i].p);
        }
    }
    let modulus: BigInt = primes.iter().fold(BigInt::one(), |m, pr| m * pr.p);
    let half = &modulus >> 1;
    let n = res[0].len();
    (0..n)
        .into_par_iter()
        .map(|t| {
            let mut digits = vec![0u64; k];
            for i in 0..k {
                let p = primes[i].p;
                let mut x = res[i][t];
                for j in 0..i {
                    x = (x + p - digits[j] % p) % p * inv[i][j] % p;
                }
                digits[i] = x;
            }
            let mut v = BigInt::zero();
            for i in (0..k).rev() {
                v = v * primes[i].p + digits[i];
            }
            if v > half {
                v -= &modulus;
            }
            v
        })
        .collect()
}

/// `a^e` truncated to `len` coefficients by binary powering.
pub fn power(a: &[BigInt], e: u32, len: usize) -> Result<Vec<BigInt>> {
    let mut result = vec![BigInt::zero(); len];
    if len == 0 {
        return Ok(result);
    }
    result[0] = BigInt::one();
    let mut base: Vec<BigInt> = a.iter().take(len).cloned().collect();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = multiply(&result, &base, len)?;
        }
        e >>= 1;
        if e > 0 {
            base = multiply(&base, &base, len)?;
        }
    }
    Ok(result)
}

/// Largest absolute coefficient.
pub fn abs_max(a: &[BigInt]) -> BigInt {
    a.iter().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < len {
                    c[i + j] += x * y;
                }
            }
        }
        c
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primes_are_ntt_friendly() {
        let ps = ntt_primes();
        assert!(ps.len() >= 15);
        for pr in ps {
            assert!(is_prime(pr.p) && (pr.p - 1) % (1 << NTT_LOG) == 0 && pr.p < 1 << 31);
            assert_ne!(mod_pow(pr.root, (pr.p - 1) / 2, pr.p), 1);
        }
    }

    #[test]
    fn large_coefficients_reconstruct() {
        let a: Vec<BigInt> = (0..50)
            .map(|i| BigInt::from(10).pow(40) * (i - 25))
            .collect();
        let b: Vec<BigInt> = (0..70).map(|i| -BigInt::from(7).pow(60) + i).collect();
        assert_eq!(multiply(&a, &b, 119).unwrap(), naive(&a, &b, 119));
        assert_eq!(multiply(&a, &b, 30).unwrap(), naive(&a, &b, 30));
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let a = big(&[1, -1, -1, 0, 0, 1, 0, 1]);
        let mut expect = big(&[1]);
        for _ in 0..7 {
            expect = naive(&expect, &a, 20);
        }
        assert_eq!(power(&a, 7, 20).unwrap(), expect);
    }

    proptest! {
        #[test]
        fn multiplication_is_commutative_and_associative(
            a in prop::collection::vec(-1000i64..1000, 1..40),
            b in prop::collection::vec(-1000i64..1000, 1..40),
            c in prop::collection::vec(-1000i64..1000, 1..40),
        ) {
            let (a, b, c) = (big(&a), big(&b), big(&c));
            let ab = multiply(&a, &b, 60).unwrap();
            prop_assert_eq!(&ab, &multiply(&b, &a, 60).unwrap());
            prop_assert_eq!(&ab, &naive(&a, &b, 60));
            let left = multiply(&ab, &c, 60).unwrap();
            let right = multiply(&a, &multiply(&b, &c, 60).unwrap(), 60).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
