use std::collections::BTreeMap;

use serde::Serialize;

use super::{for_each_prime, gcd, log2_iter, CompensatedSum};
use crate::{Error, Result};

/// Reciprocal prime sum over one coprime class, against the prediction
/// `log log x / φ(q) + 1/p_{q,a}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProgressionSumReport {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub sum: f64,
    /// Least prime `≡ a (mod q)`, if one lies below `x`.
    pub least_prime: Option<u64>,
    pub predicted: Option<f64>,
    pub residual: Option<f64>,
}

/// Sums `1/p` over `p ≤ x` in every coprime class mod `q` with one pass over
/// the primes. For `q = 1` the single class is keyed `a = 0`.
pub fn progression_prime_sums(x: f64, q: u64) -> Result<BTreeMap<u64, ProgressionSumReport>> {
    if q == 0 {
        return Err(Error::invalid("modulus 0"));
    }
    if !(x >= 3.0 && x >= q as f64) {
        return Err(Error::invalid(format!("need x ≥ max(3, q), got x = {x}, q = {q}")));
    }
    let limit = x.floor() as u64;
    let phi = (0..q).filter(|&a| gcd(a, q) == 1).count() as u64;
    let mut sums: BTreeMap<u64, (CompensatedSum, Option<u64>)> =
        (0..q).filter(|&a| gcd(a, q) == 1).map(|a| (a, Default::default())).collect();
    for_each_prime(limit, |p| {
        if let Some((s, least)) = sums.get_mut(&(p % q)) {
            s.add(1.0 / p as f64);
            least.get_or_insert(p);
        }
    });
    let main = log2_iter(x) / phi as f64;
    Ok(sums
        .into_iter()
        .map(|(a, (s, least))| {
            let sum = s.value();
            let predicted = least.map(|p| main + 1.0 / p as f64);
            let report = ProgressionSumReport {
                x,
                q,
                a,
                sum,
                least_prime: least,
                predicted,
                residual: predicted.map(|pr| sum - pr),
            };
            (a, report)
        })
        .collect())
}

/// Smallest `C` with `|residual| ≤ C · log(3q)/φ(q)` across the given reports.
pub fn fitted_progression_constant<'a>(reports: impl IntoIterator<Item = &'a ProgressionSumReport>) -> f64 {
    reports
        .into_iter()
        .filter_map(|r| {
            let phi = phi_small(r.q) as f64;
            r.residual.map(|res| res.abs() * phi / (3.0 * r.q as f64).ln())
        })
        .fold(0.0, f64::max)
}

fn phi_small(q: u64) -> u64 {
    (0..q).filter(|&a| gcd(a, q) == 1).count() as u64
}
