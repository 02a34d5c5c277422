//! Local root counts `ν`, the density `α(q)`, the maximal fibre size `ξ(q)`
//! and reciprocal sums over primes with `gcd(F(p), q) = 1`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::number::{for_each_prime, gcd, inv_mod, log2_iter, mul_mod, CompensatedSum, FactoredModulus};
use crate::poly::IntPoly;
use crate::{Error, Result};

pub const DEFAULT_ROOT_GUARD: u64 = 1_000_000_000;
pub const DEFAULT_XI_GUARD: u64 = 1_000_000;

/// Exact nonnegative rational, serialized as `"num/den"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Ratio<u128>);

impl Exact {
    pub fn new(num: u128, den: u128) -> Self {
        Exact(Ratio::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        self.0.numer().to_f64().unwrap() / self.0.denom().to_f64().unwrap()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let parsed = text
            .split_once('/')
            .and_then(|(n, m)| Some((n.trim().parse::<u128>().ok()?, m.trim().parse::<u128>().ok()?)))
            .filter(|&(_, m)| m != 0);
        parsed.map(|(n, m)| Exact::new(n, m)).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
    }
}

/// Unit roots of `F` modulo `ℓ^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSet {
    pub ell: u64,
    pub e: u32,
    pub modulus: u64,
    pub roots: Vec<u64>,
}

impl RootSet {
    pub fn count(&self) -> u64 {
        self.roots.len() as u64
    }
}

/// Unit roots of `F mod ℓ^e`: roots mod `ℓ` by scanning, then lifted one power
/// at a time. A root with `F'(a) ≢ 0 (mod ℓ)` has exactly one lift (Hensel);
/// any other root is extended by trying all `ℓ` candidates.
pub fn count_unit_roots(f: &IntPoly, ell: u64, e: u32, guard: u64) -> Result<RootSet> {
    if e == 0 {
        return Err(Error::invalid("exponent 0"));
    }
    let modulus = ell
        .checked_pow(e)
        .filter(|&m| m <= guard)
        .ok_or_else(|| Error::guard("ℓ^e", ell.saturating_pow(e), guard))?;
    let mut roots = unit_roots_mod_prime(f, ell);
    let mut m_k = ell;
    for _ in 1..e {
        let m_next = m_k * ell;
        let mut lifted = Vec::with_capacity(roots.len());
        for &a in &roots {
            let slope = f.eval_derivative_mod(a, ell).filter(|&d| d != 0);
            match slope.and_then(|_| f.eval_derivative_mod(a, m_next)).and_then(|d| inv_mod(d, m_next)) {
                Some(inv) => {
                    let fa = f.eval_mod(a, m_next);
                    let step = mul_mod(fa, inv, m_next);
                    lifted.push((a + m_next - step) % m_next);
                }
                None => lifted.extend((0..ell).map(|t| a + t * m_k).filter(|&b| f.eval_mod(b, m_next) == 0)),
            }
        }
        lifted.sort_unstable();
        roots = lifted;
        m_k = m_next;
    }
    Ok(RootSet { ell, e, modulus, roots })
}

/// Units `a mod ℓ` with `F(a) ≡ 0`. Walks the numerator `G` mod `ℓ·Q` by
/// forward differences, so each step costs `D` additions.
fn unit_roots_mod_prime(f: &IntPoly, ell: u64) -> Vec<u64> {
    let Some(big) = ell.checked_mul(f.denom()).filter(|&b| b < 1 << 62) else {
        return (1..ell).filter(|&a| f.eval_mod(a, ell) == 0).collect();
    };
    let d = f.degree() as usize;
    let numerator = |v: u64| {
        let b = big as u128;
        let r = f.coeffs().iter().rev().fold(0u128, |acc, &c| (acc * v as u128 % b + (c as i128).rem_euclid(b as i128) as u128) % b);
        r as u64
    };
    let mut diff: Vec<u64> = (0..=d as u64).map(numerator).collect();
    for k in 1..=d {
        for i in (k..=d).rev() {
            diff[i] = (diff[i] + big - diff[i - 1]) % big;
        }
    }
    let mut roots = Vec::new();
    for a in 0..ell {
        if diff[0] == 0 && a != 0 {
            roots.push(a);
        }
        for k in 0..d {
            diff[k] += diff[k + 1];
            if diff[k] >= big {
                diff[k] -= big;
            }
        }
    }
    roots
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDensity {
    pub ell: u64,
    pub e: u32,
    /// `ν(ℓ)`.
    pub nu: u64,
    /// `ν(ℓ^e)`; `None` when `ℓ^e` is beyond the root guard.
    pub nu_lifted: Option<u64>,
    /// `1 − ν(ℓ)/(ℓ−1)`.
    pub alpha_local: Exact,
    pub admissible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub q: FactoredModulus,
    pub alpha: Exact,
    pub alpha_float: f64,
    pub locals: Vec<LocalDensity>,
    /// Primes with `ν(ℓ) = ℓ − 1`, which force `α(q) = 0`.
    pub zero_primes: Vec<u64>,
    /// `(log log 3q)^{−D}`.
    pub lower_bound_ref: f64,
    /// `α(q)·(log log 3q)^D`; bounded below when `α(q) ≠ 0`.
    pub lower_bound_ratio: f64,
}

impl DensityProfile {
    /// `φ(q)·α(q)`, the number of units `a` with `F(a)` a unit.
    pub fn unit_value_count(&self) -> u128 {
        let n = Ratio::from_integer(self.q.phi as u128) * self.alpha.0;
        debug_assert!(n.is_integer());
        n.to_integer()
    }
}

/// `α(q) = ∏_{ℓ | q} (1 − ν(ℓ)/(ℓ − 1))` with the per-prime breakdown.
pub fn alpha(f: &IntPoly, q: &FactoredModulus) -> Result<DensityProfile> {
    let mut alpha = Ratio::<u128>::one();
    let mut locals = Vec::with_capacity(q.factors.len());
    let mut zero_primes = Vec::new();
    for &(ell, e) in &q.factors {
        let nu = count_unit_roots(f, ell, 1, DEFAULT_ROOT_GUARD)?.count();
        let nu_lifted = match count_unit_roots(f, ell, e, DEFAULT_ROOT_GUARD) {
            Ok(r) => Some(r.count()),
            Err(Error::GuardExceeded { .. }) => None,
            Err(other) => return Err(other),
        };
        let local = Ratio::new((ell - 1 - nu) as u128, (ell - 1) as u128);
        if local.is_zero() {
            zero_primes.push(ell);
        }
        alpha *= local;
        locals.push(LocalDensity {
            ell,
            e,
            nu,
            nu_lifted,
            alpha_local: Exact(local),
            admissible: f.is_admissible(ell),
        });
    }
    let lll = log2_iter(3.0 * q.q as f64);
    let lower_bound_ref = lll.powi(-(f.degree() as i32));
    let alpha_float = Exact(alpha).to_f64();
    Ok(DensityProfile {
        q: q.clone(),
        alpha: Exact(alpha),
        alpha_float,
        locals,
        zero_primes,
        lower_bound_ref,
        lower_bound_ratio: alpha_float / lower_bound_ref,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct XiReport {
    pub q: u64,
    /// Largest number of units `v` with `F(v) ≡ a`, over unit classes `a`.
    pub xi: u64,
    pub class: Option<u64>,
    pub squarefree: bool,
    /// `D^{ω(q)}`.
    pub d_pow_omega: u128,
    /// `ξ(q) ≤ D^{ω(q)}`; only meaningful for squarefree `q`.
    pub within_d_pow_omega: Option<bool>,
    /// `ξ(q) / q^{1 − 1/D}`.
    pub konyagin_c: f64,
}

/// `ξ(q)` by bucketing `F(v)` over the units `v mod q`. Only unit values are
/// bucketed, since the classes that matter are the coprime ones. Ties go to
/// the smallest class.
pub fn xi_max_roots(f: &IntPoly, q: &FactoredModulus, guard: u64) -> Result<XiReport> {
    if q.q > guard {
        return Err(Error::guard("q", q.q, guard));
    }
    let m = q.q;
    let mut unit = vec![m > 1; m as usize];
    unit[0] = m == 1;
    for ell in q.primes() {
        unit.iter_mut().step_by(ell as usize).for_each(|u| *u = false);
    }
    let mut buckets = vec![0u32; m as usize];
    for v in (0..m).filter(|&v| unit[v as usize]) {
        buckets[f.eval_mod(v, m) as usize] += 1;
    }
    let mut xi = 0u64;
    let mut class = None;
    for (a, &c) in buckets.iter().enumerate() {
        if c as u64 > xi && unit[a] {
            xi = c as u64;
            class = Some(a as u64);
        }
    }
    let d = f.degree() as u128;
    let d_pow_omega = d.pow(q.omega);
    let squarefree = q.is_squarefree();
    Ok(XiReport {
        q: m,
        xi,
        class,
        squarefree,
        d_pow_omega,
        within_d_pow_omega: squarefree.then_some(xi as u128 <= d_pow_omega),
        konyagin_c: xi as f64 / (m as f64).powf(1.0 - 1.0 / f.degree() as f64),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeSumReport {
    pub q: u64,
    pub x: f64,
    /// `Σ_{p ≤ x, gcd(F(p), q) = 1} 1/p`.
    pub sum: f64,
    pub alpha: f64,
    /// `α(q)·log log x`.
    pub predicted: f64,
    pub residual: f64,
}

pub fn coprime_value_prime_sum(f: &IntPoly, q: &FactoredModulus, x: f64) -> Result<PrimeSumReport> {
    if x < 3.0 * q.q as f64 {
        return Err(Error::invalid(format!("need x ≥ 3q, got x = {x}, q = {}", q.q)));
    }
    let profile = alpha(f, q)?;
    let mut sum = CompensatedSum::default();
    for_each_prime(x.floor() as u64, |p| {
        if gcd(f.eval_mod(p, q.q), q.q) == 1 {
            sum.add(1.0 / p as f64);
        }
    });
    let predicted = profile.alpha_float * log2_iter(x);
    let sum = sum.value();
    Ok(PrimeSumReport { q: q.q, x, sum, alpha: profile.alpha_float, predicted, residual: sum - predicted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{factor, primes_up_to};

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec()).unwrap()
    }

    fn brute_roots(f: &IntPoly, m: u64) -> Vec<u64> {
        (0..m).filter(|&a| gcd(a, m) == 1 && f.eval_mod(a, m) == 0).collect()
    }

    #[test]
    fn root_examples() {
        let phi = poly(&[-1, 1]);
        assert_eq!(count_unit_roots(&phi, 5, 1, DEFAULT_ROOT_GUARD).unwrap().roots, vec![1]);
        let g = poly(&[1, 0, 1]);
        assert_eq!(count_unit_roots(&g, 5, 1, DEFAULT_ROOT_GUARD).unwrap().roots, vec![2, 3]);
        assert_eq!(count_unit_roots(&g, 5, 2, DEFAULT_ROOT_GUARD).unwrap().roots, vec![7, 18]);
        assert_eq!(brute_roots(&g, 25), vec![7, 18]);
    }

    #[test]
    fn non_simple_roots_branch() {
        // T^2 - 2T + 1 - 9 = (T-4)(T+2): both roots ≡ 1 mod 3, so every lift is non-simple mod 3
        let f = poly(&[-8, -2, 1]);
        for e in 1..=5 {
            let lifted = count_unit_roots(&f, 3, e, DEFAULT_ROOT_GUARD).unwrap();
            assert_eq!(lifted.roots, brute_roots(&f, 3u64.pow(e)), "e = {e}");
        }
        // T^2 has only the non-unit root 0
        assert!(count_unit_roots(&poly(&[0, 0, 1]), 7, 3, DEFAULT_ROOT_GUARD).unwrap().roots.is_empty());
    }

    #[test]
    fn alpha_examples() {
        let phi = poly(&[-1, 1]);
        let a35 = alpha(&phi, &factor(35).unwrap()).unwrap();
        assert_eq!(a35.alpha, Exact::new(5, 8));
        let a2 = alpha(&phi, &factor(2).unwrap()).unwrap();
        assert!(a2.alpha.is_zero());
        assert_eq!(a2.zero_primes, vec![2]);
        let g = poly(&[1, 0, 1]);
        let a15 = alpha(&g, &factor(15).unwrap()).unwrap();
        assert_eq!(a15.alpha, Exact::new(1, 2));
        assert_eq!(a15.unit_value_count(), 4);
        assert_eq!(alpha(&g, &factor(1).unwrap()).unwrap().alpha, Exact::new(1, 1));
    }

    #[test]
    fn xi_examples() {
        let g = poly(&[1, 0, 1]);
        let r = xi_max_roots(&g, &factor(5).unwrap(), DEFAULT_XI_GUARD).unwrap();
        assert_eq!((r.xi, r.class), (2, Some(2)));
        let phi = poly(&[-1, 1]);
        assert_eq!(xi_max_roots(&phi, &factor(7).unwrap(), DEFAULT_XI_GUARD).unwrap().xi, 1);
        let ce = crate::poly::Preset::CounterexampleI(2).poly();
        let r = xi_max_roots(&ce, &factor(35).unwrap(), DEFAULT_XI_GUARD).unwrap();
        assert_eq!(r.within_d_pow_omega, Some(true));
        assert!(r.xi <= 4);
        assert!(xi_max_roots(&ce, &factor(2_000_003).unwrap(), DEFAULT_XI_GUARD).is_err());
    }

    #[test]
    fn prime_sum_trivial_modulus() {
        let phi = poly(&[-1, 1]);
        let r = coprime_value_prime_sum(&phi, &factor(1).unwrap(), 10_000.0).unwrap();
        let all: f64 = primes_up_to(10_000).iter().map(|&p| 1.0 / p as f64).sum();
        assert!((r.sum - all).abs() < 1e-12);
        assert_eq!(r.alpha, 1.0);
        assert!(coprime_value_prime_sum(&phi, &factor(5).unwrap(), 14.0).is_err());
    }

    #[test]
    fn prime_sum_no_exclusions_mod_3() {
        // ν(3) = 0 for T^2 + 1, so every prime is counted
        let g = poly(&[1, 0, 1]);
        let r = coprime_value_prime_sum(&g, &factor(3).unwrap(), 100_000.0).unwrap();
        let mertens: f64 = primes_up_to(100_000).iter().map(|&p| 1.0 / p as f64).sum();
        assert!((r.sum - mertens).abs() < 1e-12);
        // Mertens: Σ 1/p − log log x → 0.2615
        assert!((r.residual - 0.2615).abs() < 0.01);
    }

    #[test]
    fn prime_sum_phi_mod_5_residual_bounded() {
        let phi = poly(&[-1, 1]);
        let r = coprime_value_prime_sum(&phi, &factor(5).unwrap(), 1e6).unwrap();
        let direct: f64 = primes_up_to(1_000_000)
            .iter()
            .filter(|&&p| (p + 4) % 5 != 0)
            .map(|&p| 1.0 / p as f64)
            .sum();
        assert!((r.sum - direct).abs() < 1e-12);
        assert_eq!(r.alpha, 0.75);
        assert!(r.residual.abs() < 1.0);
    }
}
