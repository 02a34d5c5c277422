//! Exact counts of unit tuples `(v_1, …, v_J)` whose values `F(v_i)` are
//! jointly units, hit a product target `w`, or (additively) a sum target.
//!
//! Three independent routes to the product counts: literal enumeration,
//! orthogonality of characters prime power by prime power, and a closed form
//! for linear `F`. They must agree exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{build_character_table, z_chi_all, CharacterTable, ROUNDING_TOLERANCE};
use crate::density::alpha;
use crate::number::{gcd, mul_mod, pow_mod, FactoredModulus};
use crate::poly::IntPoly;
use crate::{Error, Result};

pub const DEFAULT_BRUTE_GUARD: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TupleMethod {
    Brute,
    Character,
    #[serde(rename = "closed-form-linear")]
    Linear,
    /// Every applicable method, required to agree.
    CrossCheck,
}

impl fmt::Display for TupleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TupleMethod::Brute => "brute",
            TupleMethod::Character => "character",
            TupleMethod::Linear => "closed-form-linear",
            TupleMethod::CrossCheck => "cross-check",
        })
    }
}

impl FromStr for TupleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(TupleMethod::Brute),
            "char" | "character" => Ok(TupleMethod::Character),
            "linear" | "closed-form-linear" => Ok(TupleMethod::Linear),
            "cross-check" => Ok(TupleMethod::CrossCheck),
            _ => Err(Error::invalid(format!("unknown method `{s}` (brute|char|linear|cross-check)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VPrimeCount {
    /// `(φ(q)α(q))^J`
    pub formula: u128,
    /// Literal count, when `φ(q)^J` is within the guard.
    pub brute: Option<u128>,
}

/// `#V′_q`: unit tuples with `gcd(F(v_1)⋯F(v_J), q) = 1`.
pub fn count_v_prime(f: &IntPoly, q: &FactoredModulus, j: u32, guard: u64) -> Result<VPrimeCount> {
    let base = alpha(f, q)?.unit_value_count();
    let formula = checked_pow(base, j)?;
    let brute = if within_guard(q.phi, j, guard) {
        let units = q.units();
        let n = enumerate_products(&units, j, q.q, |v| f.eval_mod(v, q.q))
            .iter()
            .enumerate()
            .filter(|&(r, _)| gcd(r as u64, q.q) == 1)
            .map(|(_, &c)| c)
            .sum::<u128>();
        if n != formula {
            return Err(Error::Consistency(format!("#V′ brute {n} ≠ formula {formula} for q = {}", q.q)));
        }
        Some(n)
    } else {
        None
    };
    Ok(VPrimeCount { formula, brute })
}

/// `#V″`: unit tuples with `F(v_1)⋯F(v_J) ≡ w (mod q)` for a unit `w`.
pub fn count_v_double(f: &IntPoly, q: &FactoredModulus, j: u32, w: u64, method: TupleMethod) -> Result<u128> {
    check_odd(q)?;
    let w = w % q.q;
    if gcd(w, q.q) != 1 {
        return Err(Error::invalid(format!("target {w} is not a unit mod {}", q.q)));
    }
    match method {
        TupleMethod::Brute => {
            if !within_guard(q.phi, j, DEFAULT_BRUTE_GUARD) {
                return Err(Error::guard("φ(q)^J for brute enumeration", q.phi.saturating_pow(j) as u128, DEFAULT_BRUTE_GUARD as u128));
            }
            Ok(enumerate_products(&q.units(), j, q.q, |v| f.eval_mod(v, q.q))[w as usize])
        }
        TupleMethod::Character => per_prime_power(q, |ell, e| LocalCharacterSums::new(f, ell, e)?.count(j, w % ell.pow(e))),
        TupleMethod::Linear => per_prime_power(q, |ell, e| linear_local_count(f, ell, e, j, w % ell.pow(e))),
        TupleMethod::CrossCheck => {
            let mut results = vec![(TupleMethod::Character, count_v_double(f, q, j, w, TupleMethod::Character)?)];
            if within_guard(q.phi, j, DEFAULT_BRUTE_GUARD) {
                results.push((TupleMethod::Brute, count_v_double(f, q, j, w, TupleMethod::Brute)?));
            }
            if f.degree() == 1 {
                results.push((TupleMethod::Linear, count_v_double(f, q, j, w, TupleMethod::Linear)?));
            }
            let first = results[0].1;
            if let Some((m, v)) = results.iter().find(|(_, v)| *v != first) {
                return Err(Error::Consistency(format!("#V″ mismatch at q = {}, w = {w}: character {first}, {m} {v}", q.q)));
            }
            Ok(first)
        }
    }
}

/// `#V″` for every unit target at once.
pub fn v_double_distribution(f: &IntPoly, q: &FactoredModulus, j: u32, method: TupleMethod) -> Result<BTreeMap<u64, u128>> {
    check_odd(q)?;
    let units = q.units();
    match method {
        TupleMethod::Brute => {
            if !within_guard(q.phi, j, DEFAULT_BRUTE_GUARD) {
                return Err(Error::guard("φ(q)^J for brute enumeration", q.phi.saturating_pow(j) as u128, DEFAULT_BRUTE_GUARD as u128));
            }
            let all = enumerate_products(&units, j, q.q, |v| f.eval_mod(v, q.q));
            Ok(units.iter().map(|&w| (w, all[w as usize])).collect())
        }
        TupleMethod::Character => {
            let locals: Vec<(u64, LocalCharacterSums)> = q
                .prime_powers()
                .map(|(ell, e, m)| Ok((m, LocalCharacterSums::new(f, ell, e)?)))
                .collect::<Result<_>>()?;
            let mut tables = Vec::with_capacity(locals.len());
            for (m, local) in &locals {
                let mut t = BTreeMap::new();
                for w in (1..*m).filter(|w| w % local.table.ell != 0) {
                    t.insert(w, local.count(j, w)?);
                }
                tables.push((*m, t));
            }
            Ok(units
                .iter()
                .map(|&w| (w, tables.iter().map(|(m, t)| t.get(&(w % m)).copied().unwrap_or(if *m == 1 { 1 } else { 0 })).product()))
                .collect())
        }
        _ => units.iter().map(|&w| Ok((w, count_v_double(f, q, j, w, method)?))).collect(),
    }
}

/// `V″_{ℓ^e,j}` for `j = 0..=J`: tuples of arbitrary residues with
/// `ℓ | v_1, …, v_j` and `F(v_1)⋯F(v_J) ≡ w (mod ℓ^e)`, counted by convolving
/// value histograms over the unit group.
pub fn inclusion_exclusion_terms(f: &IntPoly, ell: u64, e: u32, j: u32, w: u64) -> Result<Vec<u128>> {
    let table = build_character_table(ell, e)?;
    let m = table.modulus;
    let target = table.units.log(w).ok_or_else(|| Error::invalid(format!("{w} is not a unit mod {m}")))?;
    let phi = table.phi as usize;
    let mut on_multiples = vec![0u128; phi];
    let mut on_all = vec![0u128; phi];
    for v in 0..m {
        if let Some(k) = table.units.log(f.eval_mod(v, m)) {
            on_all[k as usize] += 1;
            if v % ell == 0 {
                on_multiples[k as usize] += 1;
            }
        }
    }
    (0..=j)
        .map(|jj| {
            let mut acc = vec![0u128; phi];
            acc[0] = 1;
            for _ in 0..jj {
                acc = cyclic_convolve(&acc, &on_multiples);
            }
            for _ in jj..j {
                acc = cyclic_convolve(&acc, &on_all);
            }
            Ok(acc[target as usize])
        })
        .collect()
}

/// `Σ_j (−1)^j C(J, j) V″_{ℓ^e,j}`.
pub fn inclusion_exclusion_count(f: &IntPoly, ell: u64, e: u32, j: u32, w: u64) -> Result<u128> {
    let terms = inclusion_exclusion_terms(f, ell, e, j, w)?;
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for (jj, &t) in terms.iter().enumerate() {
        let sign = if jj % 2 == 0 { 1 } else { -1 };
        total += sign * binom * t as i128;
        binom = binom * (j as i128 - jj as i128) / (jj as i128 + 1);
    }
    u128::try_from(total).map_err(|_| Error::Consistency(format!("negative inclusion-exclusion total {total}")))
}

fn cyclic_convolve(a: &[u128], b: &[u128]) -> Vec<u128> {
    let n = a.len();
    let mut out = vec![0u128; n];
    for (i, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
        for (k, &y) in b.iter().enumerate().filter(|(_, &y)| y != 0) {
            out[(i + k) % n] += x * y;
        }
    }
    out
}

/// The characters mod `ℓ^e` together with every `Z_χ`.
struct LocalCharacterSums {
    table: CharacterTable,
    z: Vec<Complex64>,
    principal: u128,
}

impl LocalCharacterSums {
    fn new(f: &IntPoly, ell: u64, e: u32) -> Result<Self> {
        let table = build_character_table(ell, e)?;
        let reports = z_chi_all(f, &table)?;
        let principal = reports[0].z_re as u128;
        let z = reports.iter().map(|r| r.z()).collect();
        Ok(LocalCharacterSums { table, z, principal })
    }

    /// `V″_{ℓ^e}(w)` from `φ·V″ = Σ_χ χ̄(w) Z_χ^J`, keeping the principal
    /// term exact and rounding only the rest.
    fn count(&self, j: u32, w: u64) -> Result<u128> {
        let lw = self.table.units.log(w).ok_or_else(|| Error::invalid(format!("{w} is not a unit mod {}", self.table.modulus)))?;
        let phi = self.table.phi;
        let mut rest = Complex64::new(0.0, 0.0);
        for t in 1..phi {
            let k = (phi - (t as u128 * lw as u128 % phi as u128) as u64) % phi;
            rest += self.table.root_of_unity(k) * self.z[t as usize].powu(j);
        }
        let rounded = rest.re.round();
        let residual = (rest.re - rounded).abs().max(rest.im.abs());
        if residual >= ROUNDING_TOLERANCE {
            return Err(Error::Consistency(format!(
                "character sum mod {} has rounding residual {residual:e}",
                self.table.modulus
            )));
        }
        let total = checked_pow(self.principal, j)? as i128 + rounded as i128;
        if total < 0 || total % phi as i128 != 0 {
            return Err(Error::Consistency(format!("φ·V″ = {total} not a nonnegative multiple of φ = {phi}")));
        }
        Ok((total / phi as i128) as u128)
    }
}

/// Exact `V″_{ℓ^e}(w)` for `F = (RT + S)/Q`.
fn linear_local_count(f: &IntPoly, ell: u64, e: u32, j: u32, w: u64) -> Result<u128> {
    if f.degree() != 1 {
        return Err(Error::invalid("closed-form-linear needs deg F = 1"));
    }
    if f.leading() % ell as i64 == 0 {
        return Err(Error::invalid(format!("ℓ = {ell} divides the leading coefficient")));
    }
    let m = ell.pow(e);
    if j == 0 {
        return Ok((w % m == 1 % m) as u128);
    }
    let phi = (ell - 1) as u128 * ell.pow(e - 1) as u128;
    let s = f.constant();
    if s % ell as i64 == 0 {
        return checked_pow(phi, j - 1);
    }
    // product of numerators must hit w·Q^J
    let target = mul_mod(w, pow_mod(f.denom() % m, j as u64, m), m);
    let s_mod = s.rem_euclid(ell as i64) as u64;
    let block = ell.pow(e - 1) as i128;
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for jj in 0..j {
        let sign = if jj % 2 == 0 { 1 } else { -1 };
        total += sign * binom * block.pow(jj) * (phi as i128).pow(j - jj - 1);
        binom = binom * (j - jj) as i128 / (jj + 1) as i128;
    }
    if target % ell == pow_mod(s_mod, j as u64, ell) {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * block.pow(j - 1);
    }
    u128::try_from(total).map_err(|_| Error::Consistency(format!("negative linear count {total}")))
}

fn per_prime_power(q: &FactoredModulus, local: impl Fn(u64, u32) -> Result<u128>) -> Result<u128> {
    let mut total: u128 = 1;
    for &(ell, e) in &q.factors {
        total = total
            .checked_mul(local(ell, e)?)
            .ok_or_else(|| Error::guard("#V″ exceeds u128", u128::MAX, u128::MAX))?;
    }
    Ok(total)
}

fn check_odd(q: &FactoredModulus) -> Result<()> {
    if q.q % 2 == 0 {
        return Err(Error::invalid("multiplicative tuple counts need odd q"));
    }
    Ok(())
}

fn within_guard(phi: u64, j: u32, guard: u64) -> bool {
    phi.checked_pow(j).is_some_and(|n| n <= guard)
}

fn checked_pow(base: u128, j: u32) -> Result<u128> {
    base.checked_pow(j).ok_or(Error::GuardExceeded { what: "tuple count exceeds u128", value: u128::MAX, limit: u128::MAX })
}

/// Literal enumeration of `units^J`: `out[r] = #{tuples : ∏ value(v_i) ≡ r}`.
fn enumerate_products(units: &[u64], j: u32, q: u64, value: impl Fn(u64) -> u64 + Sync) -> Vec<u128> {
    let values: Vec<u64> = units.iter().map(|&v| value(v) % q).collect();
    if j == 0 {
        let mut out = vec![0u128; q as usize];
        out[(1 % q) as usize] = 1;
        return out;
    }
    fn walk(values: &[u64], depth: u32, acc: u64, q: u64, out: &mut [u128]) {
        if depth == 0 {
            out[acc as usize] += 1;
            return;
        }
        for &v in values {
            walk(values, depth - 1, mul_mod(acc, v, q), q, out);
        }
    }
    values
        .par_iter()
        .fold(
            || vec![0u128; q as usize],
            |mut out, &v0| {
                walk(&values, j - 1, v0, q, &mut out);
                out
            },
        )
        .reduce(
            || vec![0u128; q as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleCountReport {
    pub q: u64,
    #[serde(rename = "J")]
    pub j: u32,
    pub w: u64,
    pub v_prime: u128,
    pub v_double: u128,
    pub method: TupleMethod,
    /// `φ(q)·#V″/#V′`
    pub ratio: f64,
    /// `2(4D)^J Σ_{ℓ|q} ℓ^{1−J/(D+1)}`
    pub r_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetRatioReport {
    pub q: u64,
    #[serde(rename = "J")]
    pub j: u32,
    pub method: TupleMethod,
    pub v_prime: u128,
    /// True when `α(q) = 0`: `V′` is empty and there is nothing to mix.
    pub vacuous: bool,
    pub admissible: bool,
    pub rows: Vec<TupleCountReport>,
    pub max_deviation: f64,
    pub r_bound: f64,
}

/// `2(4D)^J Σ_{ℓ|q} ℓ^{1−J/(D+1)}`.
pub fn mixing_bound(f: &IntPoly, q: &FactoredModulus, j: u32) -> f64 {
    let d = f.degree() as f64;
    let sum: f64 = q.primes().map(|ell| (ell as f64).powf(1.0 - j as f64 / (d + 1.0))).sum();
    2.0 * (4.0 * d).powi(j as i32) * sum
}

/// `φ(q)·#V″(w)/#V′` for every unit `w` in `panel` (all units when `None`).
pub fn target_ratios(
    f: &IntPoly,
    q: &FactoredModulus,
    j: u32,
    panel: Option<&[u64]>,
    method: TupleMethod,
) -> Result<TargetRatioReport> {
    check_odd(q)?;
    let v_prime = alpha(f, q)?.unit_value_count();
    let v_prime = checked_pow(v_prime, j)?;
    let r_bound = mixing_bound(f, q, j);
    let admissible = q.primes().all(|ell| f.is_admissible(ell));
    let mut report = TargetRatioReport { q: q.q, j, method, v_prime, vacuous: v_prime == 0, admissible, rows: Vec::new(), max_deviation: 0.0, r_bound };
    if report.vacuous {
        return Ok(report);
    }
    let targets: Vec<u64> = match panel {
        Some(ws) => {
            for &w in ws {
                if gcd(w % q.q, q.q) != 1 {
                    return Err(Error::invalid(format!("target {w} is not a unit mod {}", q.q)));
                }
            }
            ws.iter().map(|w| w % q.q).collect()
        }
        None => q.units(),
    };
    let counts = if method == TupleMethod::CrossCheck || panel.is_some_and(|p| p.len() < 4) {
        targets.iter().map(|&w| Ok((w, count_v_double(f, q, j, w, method)?))).collect::<Result<BTreeMap<_, _>>>()?
    } else {
        v_double_distribution(f, q, j, method)?
    };
    for &w in &targets {
        let v_double = counts[&w];
        let ratio = q.phi as f64 * v_double as f64 / v_prime as f64;
        report.max_deviation = report.max_deviation.max((ratio - 1.0).abs());
        report.rows.push(TupleCountReport { q: q.q, j, w, v_prime, v_double, method, ratio, r_bound });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditiveTupleReport {
    pub q: u64,
    #[serde(rename = "J")]
    pub j: u32,
    pub w: u64,
    /// `#V_q(w)`: unit tuples with `Σ v_j ≡ w`, by enumeration.
    pub v_sum: Option<u128>,
    /// `#V*_q(w)`: unit tuples with `Σ (−1)^{j−1} v_j ≡ w`, by enumeration.
    pub v_alt: Option<u128>,
    /// Ramanujan-sum evaluation, CRT-combined over prime powers.
    pub formula: u128,
    pub parity_factor: u32,
    /// `parity_factor·φ(q)^J/q`
    pub predicted: f64,
}

/// Additive tuple counts for any modulus `q ≥ 1`, even or odd.
pub fn additive_tuple_counts(q: &FactoredModulus, j: u32, w: u64) -> Result<AdditiveTupleReport> {
    let w = w % q.q;
    let mut formula: u128 = 1;
    for (ell, e, m) in q.prime_powers() {
        formula = formula
            .checked_mul(ramanujan_local_count(ell, e, j, w % m)?)
            .ok_or(Error::GuardExceeded { what: "additive count exceeds u128", value: u128::MAX, limit: u128::MAX })?;
    }
    let (v_sum, v_alt) = if within_guard(q.phi, j, DEFAULT_BRUTE_GUARD) {
        let (s, a) = enumerate_sums(&q.units(), j, q.q);
        let (s, a) = (s[w as usize], a[w as usize]);
        if s != a {
            return Err(Error::Consistency(format!("#V = {s} but #V* = {a} at q = {}, w = {w}", q.q)));
        }
        if s != formula {
            return Err(Error::Consistency(format!("#V = {s} but Ramanujan evaluation gives {formula}")));
        }
        (Some(s), Some(a))
    } else {
        (None, None)
    };
    let parity_factor = if q.q % 2 == 1 {
        1
    } else if (j as u64 + w) % 2 == 0 {
        2
    } else {
        0
    };
    let predicted = parity_factor as f64 * (q.phi as f64).powi(j as i32) / q.q as f64;
    Ok(AdditiveTupleReport { q: q.q, j, w, v_sum, v_alt, formula, parity_factor, predicted })
}

/// `[φ^J + Σ_{0<r<ℓ^e} e(−rw/ℓ^e) S_ℓ(r)^J]/ℓ^e`, summed in floating point
/// and rounded.
fn ramanujan_local_count(ell: u64, e: u32, j: u32, w: u64) -> Result<u128> {
    let m = ell.pow(e);
    let phi = (ell - 1) * ell.pow(e - 1);
    let mut s = Complex64::new(0.0, 0.0);
    for r in 1..m {
        let c = crate::characters::ramanujan_sum(ell, e, r)?;
        if c == 0 && j > 0 {
            continue;
        }
        let angle = -std::f64::consts::TAU * ((r as u128 * w as u128 % m as u128) as f64) / m as f64;
        s += Complex64::from_polar(1.0, angle) * (c as f64).powi(j as i32);
    }
    let rounded = s.re.round();
    if (s.re - rounded).abs().max(s.im.abs()) >= ROUNDING_TOLERANCE * rounded.abs().max(1.0) {
        return Err(Error::Consistency(format!("Ramanujan sum mod {m} has residual {}", (s.re - rounded).abs())));
    }
    let total = checked_pow(phi as u128, j)? as i128 + rounded as i128;
    if total < 0 || total % m as i128 != 0 {
        return Err(Error::Consistency(format!("ℓ^e·V = {total} is not a multiple of {m}")));
    }
    Ok((total / m as i128) as u128)
}

/// `[φ^J + (−ℓ^{e−1})^J (ℓ·1_{ℓ|w} − 1)]/ℓ^e`, the Ramanujan evaluation in
/// closed form.
pub fn additive_local_closed_form(ell: u64, e: u32, j: u32, w: u64) -> u128 {
    let m = ell.pow(e) as i128;
    if j == 0 {
        return (w as i128 % m == 0) as u128;
    }
    let phi = ((ell - 1) * ell.pow(e - 1)) as i128;
    let low = -(ell.pow(e - 1) as i128);
    let indicator = if w % ell == 0 { ell as i128 - 1 } else { -1 };
    ((phi.pow(j) + low.pow(j) * indicator) / m) as u128
}

fn enumerate_sums(units: &[u64], j: u32, q: u64) -> (Vec<u128>, Vec<u128>) {
    let mut sum = vec![0u128; q as usize];
    sum[0] = 1;
    let mut alt = sum.clone();
    for step in 0..j {
        let mut next_sum = vec![0u128; q as usize];
        let mut next_alt = vec![0u128; q as usize];
        for r in 0..q as usize {
            for &v in units {
                let neg = (q - v % q) % q;
                next_sum[((r as u64 + v) % q) as usize] += sum[r];
                let signed = if step % 2 == 0 { v % q } else { neg };
                next_alt[((r as u64 + signed) % q) as usize] += alt[r];
            }
        }
        sum = next_sum;
        alt = next_alt;
    }
    (sum, alt)
}

/// `∏_{ℓ^e ∥ q} #V″ mod ℓ^e` at the reduced targets `w mod ℓ^e`, each prime
/// power counted on its own.
pub fn v_double_by_prime_powers(f: &IntPoly, q: &FactoredModulus, j: u32, w: u64, method: TupleMethod) -> Result<u128> {
    let mut total = 1u128;
    for (ell, e, m) in q.prime_powers() {
        let local = FactoredModulus::from_factors(vec![(ell, e)])?;
        total *= count_v_double(f, &local, j, w % m, method)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::factor;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn v_prime_examples() {
        let q5 = factor(5).unwrap();
        let r = count_v_prime(&poly(&[-1, 1]), &q5, 2, DEFAULT_BRUTE_GUARD).unwrap();
        assert_eq!((r.formula, r.brute), (9, Some(9)));
        assert_eq!(count_v_prime(&poly(&[-1, 1]), &q5, 0, DEFAULT_BRUTE_GUARD).unwrap().formula, 1);
        let r = count_v_prime(&poly(&[1, 0, 1]), &factor(7).unwrap(), 2, DEFAULT_BRUTE_GUARD).unwrap();
        assert_eq!((r.formula, r.brute), (36, Some(36)));
        let big = count_v_prime(&poly(&[-1, 1]), &factor(1_000_003).unwrap(), 2, DEFAULT_BRUTE_GUARD).unwrap();
        assert_eq!(big.brute, None);
    }

    #[test]
    fn v_double_examples() {
        let f = poly(&[-1, 1]);
        let q5 = factor(5).unwrap();
        for m in [TupleMethod::Brute, TupleMethod::Character, TupleMethod::Linear, TupleMethod::CrossCheck] {
            assert_eq!(count_v_double(&f, &q5, 2, 1, m).unwrap(), 3, "{m}");
        }
        // ℓ | S: a permutation, so φ^{J−1} for every w
        let g = poly(&[5, 3]);
        let q25 = factor(25).unwrap();
        for w in [1u64, 2, 7, 24] {
            assert_eq!(count_v_double(&g, &q25, 3, w, TupleMethod::Linear).unwrap(), 400);
            assert_eq!(count_v_double(&g, &q25, 3, w, TupleMethod::Brute).unwrap(), 400);
        }
        let q7 = factor(7).unwrap();
        let brute = count_v_double(&f, &q7, 3, 2, TupleMethod::Brute).unwrap();
        assert_eq!(count_v_double(&f, &q7, 3, 2, TupleMethod::Character).unwrap(), brute);
        assert_eq!(inclusion_exclusion_count(&f, 7, 1, 3, 2).unwrap(), brute);
        assert!(count_v_double(&poly(&[1, 0, 1]), &q7, 2, 1, TupleMethod::Linear).is_err());
        assert!(count_v_double(&f, &q5, 2, 0, TupleMethod::Brute).is_err());
        assert!(count_v_double(&f, &factor(4).unwrap(), 2, 1, TupleMethod::Brute).is_err());
    }

    #[test]
    fn targets_partition_v_prime() {
        let f = poly(&[1, 0, 1]);
        let q = factor(49).unwrap();
        let dist = v_double_distribution(&f, &q, 3, TupleMethod::Character).unwrap();
        let v_prime = count_v_prime(&f, &q, 3, 0).unwrap().formula;
        assert_eq!(dist.values().sum::<u128>(), v_prime);
    }

    #[test]
    fn ratio_examples() {
        let f = poly(&[-1, 1]);
        let q5 = factor(5).unwrap();
        let r2 = target_ratios(&f, &q5, 2, None, TupleMethod::Brute).unwrap();
        let w1 = r2.rows.iter().find(|r| r.w == 1).unwrap();
        assert_eq!(w1.v_double, 3);
        assert!((w1.ratio - 4.0 / 3.0).abs() < 1e-12);
        let r8 = target_ratios(&f, &q5, 8, None, TupleMethod::Character).unwrap();
        assert!(r8.max_deviation < r2.max_deviation);

        let q35 = factor(35).unwrap();
        let whole = target_ratios(&f, &q35, 6, None, TupleMethod::Character).unwrap();
        let r5 = target_ratios(&f, &q5, 6, None, TupleMethod::Character).unwrap();
        let r7 = target_ratios(&f, &factor(7).unwrap(), 6, None, TupleMethod::Character).unwrap();
        for row in &whole.rows {
            let a = r5.rows.iter().find(|r| r.w == row.w % 5).unwrap();
            let b = r7.rows.iter().find(|r| r.w == row.w % 7).unwrap();
            assert_eq!(row.v_double * a.v_prime * b.v_prime, a.v_double * b.v_double * row.v_prime);
        }

        let vac = target_ratios(&poly(&[-1, 0, 1]), &factor(3).unwrap(), 2, None, TupleMethod::Brute).unwrap();
        assert!(vac.vacuous && vac.rows.is_empty());
    }

    #[test]
    fn additive_examples() {
        let r = additive_tuple_counts(&factor(5).unwrap(), 2, 0).unwrap();
        assert_eq!((r.v_sum, r.formula), (Some(4), 4));
        let r = additive_tuple_counts(&factor(4).unwrap(), 2, 2).unwrap();
        assert_eq!((r.v_sum, r.parity_factor), (Some(2), 2));
        assert_eq!(r.predicted, 2.0);
        let r = additive_tuple_counts(&factor(4).unwrap(), 2, 1).unwrap();
        assert_eq!((r.v_sum, r.v_alt, r.parity_factor), (Some(0), Some(0), 0));
        for (ell, e) in [(2u64, 3u32), (3, 2), (5, 1), (7, 2)] {
            let m = ell.pow(e);
            for j in 0..5 {
                for w in 0..m {
                    assert_eq!(ramanujan_local_count(ell, e, j, w).unwrap(), additive_local_closed_form(ell, e, j, w));
                }
            }
        }
    }
}
