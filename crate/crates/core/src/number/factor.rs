use serde::Serialize;

use super::{gcd, is_prime, mul_mod, small_primes, SMALL_PRIME_LIMIT};
use crate::{Error, Result};

/// A positive integer together with its canonical factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredModulus {
    pub q: u64,
    /// `(ℓ, e)` with `ℓ` strictly increasing and `e ≥ 1`.
    pub factors: Vec<(u64, u32)>,
    pub phi: u64,
    pub omega: u32,
}

impl FactoredModulus {
    /// Builds from a factor list, recomputing `q`, `φ(q)` and `ω(q)`.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut q = 1u64;
        let mut phi = 1u64;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!("prime {} listed twice", w[0].0)));
            }
        }
        for &(l, e) in &factors {
            if e == 0 || !is_prime(l) {
                return Err(Error::invalid(format!("bad factor {l}^{e}")));
            }
            let pe = l.checked_pow(e).ok_or_else(|| Error::invalid("modulus overflows u64"))?;
            q = q.checked_mul(pe).ok_or_else(|| Error::invalid("modulus overflows u64"))?;
            phi *= pe / l * (l - 1);
        }
        let omega = factors.len() as u32;
        Ok(FactoredModulus { q, factors, phi, omega })
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(l, _)| l)
    }

    /// The prime powers `ℓ^e ∥ q`.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(l, e)| (l, e, l.pow(e)))
    }

    /// Unit residues mod `q` in increasing order.
    pub fn units(&self) -> Vec<u64> {
        (0..self.q).filter(|&v| gcd(v, self.q) == 1).collect()
    }
}

/// Canonical factorization of `n ≥ 1`.
///
/// Trial division by the primes below 10^6 settles every `n ≤ 10^12`; larger
/// cofactors are split with Miller–Rabin and Pollard–Brent.
pub fn factor(n: u64) -> Result<FactoredModulus> {
    if n == 0 {
        return Err(Error::invalid("cannot factor 0"));
    }
    let mut factors = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if m < SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT || is_prime(m) {
            factors.push((m, 1));
        } else {
            let mut big = Vec::new();
            split(m, &mut big);
            big.sort_unstable();
            for p in big {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    FactoredModulus::from_factors(factors)
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split(d, out);
    split(n / d, out);
}

fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_factorizations() {
        let f = factor(360).unwrap();
        assert_eq!(f.factors, vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!((f.phi, f.omega), (96, 3));

        let one = factor(1).unwrap();
        assert!(one.factors.is_empty());
        assert_eq!((one.phi, one.omega), (1, 0));

        let p = factor(1_000_000_007).unwrap();
        assert_eq!(p.factors, vec![(1_000_000_007, 1)]);
        assert_eq!(p.phi, 1_000_000_006);
    }

    #[test]
    fn zero_rejected() {
        assert!(matches!(factor(0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn large_semiprime_split() {
        let (a, b) = (1_000_003u64, 4_294_967_311u64);
        let f = factor(a * b).unwrap();
        assert_eq!(f.factors, vec![(a, 1), (b, 1)]);
        let f = factor(a * a * 7).unwrap();
        assert_eq!(f.factors, vec![(7, 1), (a, 2)]);
    }

    #[test]
    fn phi_omega_round_trip() {
        for q in 1..=100_000u64 {
            let f = factor(q).unwrap();
            let rebuilt = FactoredModulus::from_factors(f.factors.clone()).unwrap();
            assert_eq!(rebuilt, f);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn phi_matches_unit_count() {
        for q in 1..=500u64 {
            let f = factor(q).unwrap();
            assert_eq!(f.units().len() as u64, f.phi);
        }
    }
}
