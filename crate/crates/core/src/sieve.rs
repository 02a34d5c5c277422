//! Range evaluation of polynomially-defined multiplicative functions.
//!
//! Every `n` in a range is factored by a segmented sieve that divides out each
//! base prime `p ≤ √hi` from the multiples of `p` in the segment; whatever is
//! left over is a single large prime. Values `f(n)` are never formed as
//! integers, only their residues mod `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::number::{factor, gcd, isqrt, mul_mod, pow_mod, primes_up_to, reduce_i128};
use crate::poly::IntPoly;
use crate::{Error, Result};

pub const DEFAULT_SIEVE_GUARD: u64 = 100_000_000;
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 16;

/// How `f` behaves on prime powers `p^e`, `e ≥ 2`. Every rule has `f(p) = F(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimePowerRule {
    /// `f(p^e) = F(p)^e`
    CompletelyMultiplicative,
    /// `f(p^e) = F(p^e)`
    PolynomialAtPrimePowers,
    /// `f(p^e) = p^{e−1} F(p)`; with `F = T − 1` this is Euler's `φ`.
    EulerLike,
    /// Explicit values for `e ≥ 2`.
    CustomTable(BTreeMap<(u64, u32), i64>),
}

impl PrimePowerRule {
    pub fn name(&self) -> &'static str {
        match self {
            PrimePowerRule::CompletelyMultiplicative => "completely-multiplicative",
            PrimePowerRule::PolynomialAtPrimePowers => "poly-at-prime-powers",
            PrimePowerRule::EulerLike => "euler-like",
            PrimePowerRule::CustomTable(_) => "custom",
        }
    }
}

impl fmt::Display for PrimePowerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimePowerRule::CustomTable(t) => {
                let body: Vec<String> = t.iter().map(|((p, e), v)| format!("{p}^{e}={v}")).collect();
                write!(f, "custom:{}", body.join(";"))
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for PrimePowerRule {
    type Err = Error;

    /// `completely-multiplicative`, `poly-at-prime-powers`, `euler-like`, or
    /// `custom:p^e=v;p^e=v;…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "completely-multiplicative" | "cm" => return Ok(PrimePowerRule::CompletelyMultiplicative),
            "poly-at-prime-powers" | "pp" => return Ok(PrimePowerRule::PolynomialAtPrimePowers),
            "euler-like" | "euler" => return Ok(PrimePowerRule::EulerLike),
            _ => {}
        }
        let body = s
            .strip_prefix("custom:")
            .ok_or_else(|| Error::invalid(format!("unknown prime-power rule `{s}`")))?;
        let mut table = BTreeMap::new();
        for entry in body.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let parsed = entry.split_once('=').and_then(|(pe, v)| {
                let (p, e) = pe.split_once('^')?;
                Some((p.trim().parse::<u64>().ok()?, e.trim().parse::<u32>().ok()?, v.trim().parse::<i64>().ok()?))
            });
            match parsed {
                Some((p, e, v)) if e >= 2 => {
                    table.insert((p, e), v);
                }
                _ => return Err(Error::invalid(format!("bad custom entry `{entry}` (want p^e=v, e ≥ 2)"))),
            }
        }
        Ok(PrimePowerRule::CustomTable(table))
    }
}

/// A multiplicative function fixed by `F` at primes and a prime-power rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeSpec {
    pub f: IntPoly,
    pub rule: PrimePowerRule,
}

impl MultiplicativeSpec {
    pub fn new(f: IntPoly, rule: PrimePowerRule) -> Self {
        MultiplicativeSpec { f, rule }
    }

    /// Euler-like when `F = T − 1` (so the default model is `φ`), completely
    /// multiplicative otherwise.
    pub fn with_default_rule(f: IntPoly) -> Self {
        let rule = if f.coeffs() == [-1, 1] && f.denom() == 1 {
            PrimePowerRule::EulerLike
        } else {
            PrimePowerRule::CompletelyMultiplicative
        };
        MultiplicativeSpec { f, rule }
    }

    /// Euler's totient.
    pub fn phi() -> Self {
        Self::new(IntPoly::new(vec![-1, 1]).unwrap(), PrimePowerRule::EulerLike)
    }

    pub fn id(&self) -> String {
        format!("{}:{}", self.rule, self.f.id())
    }

    /// `f(p^e) mod q`.
    pub fn prime_power_mod(&self, p: u64, e: u32, q: u64) -> Result<u64> {
        if e == 1 {
            return Ok(self.f.eval_mod(p, q));
        }
        Ok(match &self.rule {
            PrimePowerRule::CompletelyMultiplicative => pow_mod(self.f.eval_mod(p, q), e as u64, q),
            PrimePowerRule::PolynomialAtPrimePowers => {
                let m = q.checked_mul(self.f.denom()).ok_or_else(|| Error::invalid("q·Q overflows"))?;
                self.f.eval_mod(pow_mod(p, e as u64, m), q)
            }
            PrimePowerRule::EulerLike => mul_mod(pow_mod(p, e as u64 - 1, q), self.f.eval_mod(p, q), q),
            PrimePowerRule::CustomTable(t) => {
                let v = t.get(&(p, e)).ok_or(Error::MissingEntry { p, e })?;
                reduce_i128(*v as i128, q)
            }
        })
    }

    /// `f(n) mod q` from an ascending or descending prime-power list.
    pub fn value_mod(&self, prime_powers: &[(u64, u32)], q: u64) -> Result<u64> {
        let mut acc = 1 % q;
        for &(p, e) in prime_powers {
            acc = mul_mod(acc, self.prime_power_mod(p, e, q)?, q);
        }
        Ok(acc)
    }
}

/// `(f(n) mod q, gcd(f(n), q) = 1)`.
pub fn f_mod(spec: &MultiplicativeSpec, n: u64, q: u64) -> Result<(u64, bool)> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if q == 0 {
        return Err(Error::invalid("modulus 0"));
    }
    let value = spec.value_mod(&factor(n)?.factors, q)?;
    Ok((value, gcd(value, q) == 1))
}

/// `J`, `y`, `z` for the convenient-integer classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvenientParams {
    pub x: f64,
    pub delta: f64,
    pub j: u32,
    /// `exp((log x)^{δ/2})`
    pub y: f64,
    /// `x^{1/log log x}`
    pub z: f64,
    pub j_source: JSource,
    /// True when `y` was supplied rather than computed from `(x, δ)`.
    pub y_overridden: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JSource {
    /// `⌊log log log x⌋`
    Computed,
    /// Supplied by the caller.
    Override,
    /// Computed value was 0 and raised to 1.
    Clamped,
}

impl ConvenientParams {
    /// Errors unless `⌊log log log x⌋ ≥ 1`, i.e. `x > e^{e^e} ≈ 3.8·10^6`.
    pub fn new(x: f64, delta: f64) -> Result<Self> {
        let p = Self::build(x, delta, None)?;
        if p.j == 0 {
            return Err(Error::invalid(format!("x = {x} too small for J ≥ 1 (need x > e^(e^e))")));
        }
        Ok(p)
    }

    pub fn with_j(x: f64, delta: f64, j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::invalid("J must be at least 1"));
        }
        Self::build(x, delta, Some(j))
    }

    /// Like [`ConvenientParams::new`] but uses `J = 1` when the computed value is 0.
    pub fn clamped(x: f64, delta: f64) -> Result<Self> {
        let mut p = Self::build(x, delta, None)?;
        if p.j == 0 {
            p.j = 1;
            p.j_source = JSource::Clamped;
        }
        Ok(p)
    }

    pub fn with_y(mut self, y: f64) -> Result<Self> {
        if !(y >= 1.0 && y.is_finite()) {
            return Err(Error::invalid(format!("y = {y} must be a finite value ≥ 1")));
        }
        self.y = y;
        self.y_overridden = true;
        Ok(self)
    }

    pub fn computed_j(x: f64) -> u32 {
        let lll = x.ln().ln().ln();
        if lll.is_finite() && lll >= 1.0 {
            lll.floor() as u32
        } else {
            0
        }
    }

    fn build(x: f64, delta: f64, j: Option<u32>) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(format!("δ = {delta} outside (0, 1]")));
        }
        if !(x > std::f64::consts::E) {
            return Err(Error::invalid(format!("x = {x} too small")));
        }
        let lx = x.ln();
        let y = (lx.powf(delta / 2.0)).exp();
        let z = x.powf(1.0 / lx.ln().max(f64::MIN_POSITIVE));
        let (j, j_source) = match j {
            Some(j) => (j, JSource::Override),
            None => (Self::computed_j(x), JSource::Computed),
        };
        Ok(ConvenientParams { x, delta, j, y, z, j_source, y_overridden: false })
    }
}

/// The factorization of one `n`, largest primes first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationRecord {
    pub n: u64,
    /// `(p, e)` with `p` strictly decreasing.
    pub prime_powers: Vec<(u64, u32)>,
    pub omega_big: u32,
}

impl FactorizationRecord {
    pub fn from_ascending(n: u64, ascending: &[(u64, u32)]) -> Self {
        let prime_powers: Vec<(u64, u32)> = ascending.iter().rev().copied().collect();
        let omega_big = prime_powers.iter().map(|&(_, e)| e).sum();
        FactorizationRecord { n, prime_powers, omega_big }
    }

    pub fn of(n: u64) -> Result<Self> {
        Ok(Self::from_ascending(n, &factor(n)?.factors))
    }

    /// Prime factors with multiplicity, largest first.
    pub fn primes_desc(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_powers.iter().flat_map(|&(p, e)| std::iter::repeat(p).take(e as usize))
    }

    /// `P_k(n)`: the `k`-th largest prime factor with multiplicity, 1 if `Ω(n) < k`.
    pub fn p_k(&self, k: usize) -> u64 {
        assert!(k >= 1, "P_k needs k ≥ 1");
        self.primes_desc().nth(k - 1).unwrap_or(1)
    }

    /// Largest divisor supported on primes `> y`.
    pub fn rough_part(&self, y: f64) -> u64 {
        self.prime_powers.iter().filter(|&&(p, _)| p as f64 > y).map(|&(p, e)| p.pow(e)).product()
    }

    /// Largest divisor supported on primes `≤ y`.
    pub fn smooth_part(&self, y: f64) -> u64 {
        self.prime_powers.iter().filter(|&&(p, _)| p as f64 <= y).map(|&(p, e)| p.pow(e)).product()
    }

    /// Whether `n ≤ x` has `P_1 > ⋯ > P_J > max(y, P(m))` where `n = m·P_J⋯P_1`.
    pub fn is_convenient(&self, params: &ConvenientParams) -> bool {
        self.convenient_split(params).is_some()
    }

    /// `(m, P_1⋯P_J)` for a convenient `n`.
    pub fn convenient_split(&self, params: &ConvenientParams) -> Option<(u64, u64)> {
        if self.n as f64 > params.x {
            return None;
        }
        let j = params.j as usize;
        if self.prime_powers.len() < j {
            return None;
        }
        let top = &self.prime_powers[..j];
        if top.iter().any(|&(_, e)| e != 1) {
            return None;
        }
        if j > 0 && top[j - 1].0 as f64 <= params.y {
            return None;
        }
        let block: u64 = top.iter().map(|&(p, _)| p).product();
        Some((self.n / block, block))
    }

    /// `(A(n) mod q, A*(n) mod q)`.
    pub fn additive_mod(&self, q: u64) -> (u64, u64) {
        let mut sum: i128 = 0;
        let mut alt: i128 = 0;
        for (j, p) in self.primes_desc().enumerate() {
            sum += p as i128;
            alt += if j % 2 == 0 { p as i128 } else { -(p as i128) };
        }
        (reduce_i128(sum, q), reduce_i128(alt, q))
    }
}

/// `L_m = max{y, P(m)}`.
pub fn l_m(m: u64, y: f64) -> f64 {
    let largest = if m <= 1 { 1 } else { factor(m).map(|f| f.primes().last().unwrap_or(1)).unwrap_or(1) };
    (largest as f64).max(y)
}

/// `(A(n) mod q, A*(n) mod q)` with `A(1) = A*(1) = 0`.
pub fn additive_values(n: u64, q: u64) -> Result<(u64, u64)> {
    if q == 0 {
        return Err(Error::invalid("modulus 0"));
    }
    Ok(FactorizationRecord::of(n)?.additive_mod(q))
}

/// Base primes for factoring every `n < hi` in segments.
#[derive(Clone, Debug)]
pub struct RangeFactorizer {
    base: Vec<u64>,
    hi: u64,
    max_distinct: usize,
}

impl RangeFactorizer {
    /// Prepares to factor integers in `[1, hi]`.
    pub fn new(hi: u64) -> Self {
        let base = primes_up_to(isqrt(hi) + 1);
        let mut max_distinct = 0usize;
        let mut primorial = 1u64;
        for p in primes_up_to(100) {
            match primorial.checked_mul(p) {
                Some(v) if v <= hi.max(1) => {
                    primorial = v;
                    max_distinct += 1;
                }
                _ => break,
            }
        }
        RangeFactorizer { base, hi, max_distinct: max_distinct.max(1) }
    }

    pub fn segment_buffer(&self, capacity: usize) -> FactorSegment {
        FactorSegment {
            lo: 1,
            len: 0,
            stride: self.max_distinct,
            rem: vec![0; capacity],
            counts: vec![0; capacity],
            slots: vec![(0, 0); capacity * self.max_distinct],
        }
    }

    /// Factors every `n ∈ [lo, hi]` into `buf`.
    pub fn fill(&self, lo: u64, hi: u64, buf: &mut FactorSegment) {
        assert!(lo >= 1 && hi <= self.hi && lo <= hi);
        let len = (hi - lo + 1) as usize;
        assert!(len <= buf.rem.len(), "segment larger than buffer");
        buf.lo = lo;
        buf.len = len;
        for (i, r) in buf.rem[..len].iter_mut().enumerate() {
            *r = lo + i as u64;
        }
        buf.counts[..len].iter_mut().for_each(|c| *c = 0);
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let mut n = lo.div_ceil(p) * p;
            while n <= hi {
                let i = (n - lo) as usize;
                let mut r = buf.rem[i] / p;
                let mut e = 1u32;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                }
                buf.rem[i] = r;
                buf.push(i, p, e);
                n += p;
            }
        }
        for i in 0..len {
            if buf.rem[i] > 1 {
                let r = buf.rem[i];
                buf.push(i, r, 1);
            }
        }
    }
}

/// Factorizations of a contiguous block of integers, primes ascending.
#[derive(Clone, Debug)]
pub struct FactorSegment {
    lo: u64,
    len: usize,
    stride: usize,
    rem: Vec<u64>,
    counts: Vec<u8>,
    slots: Vec<(u64, u32)>,
}

impl FactorSegment {
    #[inline]
    fn push(&mut self, i: usize, p: u64, e: u32) {
        let c = self.counts[i] as usize;
        self.slots[i * self.stride + c] = (p, e);
        self.counts[i] += 1;
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Ascending `(p, e)` list of the `i`-th integer, `lo + i`.
    #[inline]
    pub fn factors(&self, i: usize) -> &[(u64, u32)] {
        let start = i * self.stride;
        &self.slots[start..start + self.counts[i] as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[(u64, u32)])> + '_ {
        (0..self.len).map(move |i| (self.lo + i as u64, self.factors(i)))
    }
}

/// Splits `[lo, hi]` into segments, runs `work` on each in parallel with a
/// per-worker buffer, and folds the per-segment results with `merge` in
/// segment order. The result depends only on the segmentation, never on the
/// number of threads.
pub fn par_segments<T, W, M>(lo: u64, hi: u64, segment_size: usize, identity: T, work: W, merge: M) -> T
where
    T: Send,
    W: Fn(&FactorSegment) -> T + Send + Sync,
    M: Fn(T, T) -> T,
{
    if hi < lo {
        return identity;
    }
    let factorizer = RangeFactorizer::new(hi);
    let step = segment_size.max(1) as u64;
    let starts: Vec<u64> = (lo..=hi).step_by(step as usize).collect();
    let parts: Vec<T> = starts
        .into_par_iter()
        .map_init(
            || factorizer.segment_buffer(step as usize),
            |buf, s| {
                factorizer.fill(s, (s + step - 1).min(hi), buf);
                work(buf)
            },
        )
        .collect();
    parts.into_iter().fold(identity, merge)
}

/// `P_k(n)` from an ascending factor list.
pub fn p_k_ascending(ascending: &[(u64, u32)], k: u32) -> u64 {
    let mut seen = 0u32;
    for &(p, e) in ascending.iter().rev() {
        seen += e;
        if seen >= k {
            return p;
        }
    }
    1
}

/// The convenient test on an ascending factor list, without building a record.
pub fn is_convenient_ascending(n: u64, ascending: &[(u64, u32)], params: &ConvenientParams) -> bool {
    let j = params.j as usize;
    if n as f64 > params.x || ascending.len() < j {
        return false;
    }
    let top = &ascending[ascending.len() - j..];
    top.iter().all(|&(_, e)| e == 1) && (j == 0 || top[0].0 as f64 > params.y)
}

/// One integer's record from [`sieve_range`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NRecord {
    pub n: u64,
    pub f_mod: u64,
    pub coprime: bool,
    pub factorization: FactorizationRecord,
    pub convenient: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SieveOptions {
    pub segment_size: usize,
    pub guard: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions { segment_size: DEFAULT_SEGMENT_SIZE, guard: DEFAULT_SIEVE_GUARD }
    }
}

/// Streams a record for every `n ∈ [lo, hi]`, in order.
pub fn sieve_range<'a>(
    spec: &'a MultiplicativeSpec,
    lo: u64,
    hi: u64,
    q: u64,
    params: &'a ConvenientParams,
    opts: SieveOptions,
) -> Result<SieveRange<'a>> {
    if lo == 0 {
        return Err(Error::invalid("range must start at 1 or later"));
    }
    if q == 0 {
        return Err(Error::invalid("modulus 0"));
    }
    if hi > opts.guard {
        return Err(Error::guard("sieve range end", hi, opts.guard));
    }
    let factorizer = RangeFactorizer::new(hi.max(1));
    let segment = factorizer.segment_buffer(opts.segment_size.max(1));
    Ok(SieveRange { spec, params, q, next: lo, hi, factorizer, segment, cursor: 0, segment_size: opts.segment_size.max(1) })
}

pub struct SieveRange<'a> {
    spec: &'a MultiplicativeSpec,
    params: &'a ConvenientParams,
    q: u64,
    next: u64,
    hi: u64,
    factorizer: RangeFactorizer,
    segment: FactorSegment,
    cursor: usize,
    segment_size: usize,
}

impl Iterator for SieveRange<'_> {
    type Item = Result<NRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.cursor >= self.segment.len() {
            if self.next > self.hi {
                return None;
            }
            let end = (self.next + self.segment_size as u64 - 1).min(self.hi);
            self.factorizer.fill(self.next, end, &mut self.segment);
            self.next = end + 1;
            self.cursor = 0;
        }
        let i = self.cursor;
        self.cursor += 1;
        let n = self.segment.lo() + i as u64;
        let asc = self.segment.factors(i);
        let f_mod = match self.spec.value_mod(asc, self.q) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let factorization = FactorizationRecord::from_ascending(n, asc);
        let convenient = factorization.is_convenient(self.params);
        Some(Ok(NRecord { n, f_mod, coprime: gcd(f_mod, self.q) == 1, factorization, convenient }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(j: u32, y: f64) -> ConvenientParams {
        ConvenientParams::with_j(1e9, 1.0, j).unwrap().with_y(y).unwrap()
    }

    #[test]
    fn f_mod_examples() {
        let phi = MultiplicativeSpec::phi();
        assert_eq!(f_mod(&phi, 12, 5).unwrap(), (4, true));
        let cm = MultiplicativeSpec::new(IntPoly::new(vec![-1, 1]).unwrap(), PrimePowerRule::CompletelyMultiplicative);
        assert_eq!(f_mod(&cm, 12, 5).unwrap().0, 2);
        let pp = MultiplicativeSpec::new(IntPoly::new(vec![1, 0, 1]).unwrap(), PrimePowerRule::PolynomialAtPrimePowers);
        assert_eq!(f_mod(&pp, 9, 7).unwrap().0, 5);
        assert_eq!(f_mod(&phi, 1, 7).unwrap(), (1, true));
        assert!(f_mod(&phi, 0, 7).is_err());
    }

    #[test]
    fn custom_table_reports_missing_entry() {
        let rule: PrimePowerRule = "custom:2^2=3; 3^2=7".parse().unwrap();
        let spec = MultiplicativeSpec::new(IntPoly::new(vec![1, 1]).unwrap(), rule);
        // σ(4)=7, but the table says 3: f(12) = 3·F(3) = 3·4
        assert_eq!(f_mod(&spec, 12, 100).unwrap().0, 12);
        match f_mod(&spec, 8, 100) {
            Err(Error::MissingEntry { p: 2, e: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!("custom:2^1=3".parse::<PrimePowerRule>().is_err());
        assert!("bogus".parse::<PrimePowerRule>().is_err());
    }

    #[test]
    fn f_at_primes_is_f_of_p_for_every_rule() {
        let f = IntPoly::new(vec![3, -2, 1]).unwrap();
        let rules = [
            PrimePowerRule::CompletelyMultiplicative,
            PrimePowerRule::PolynomialAtPrimePowers,
            PrimePowerRule::EulerLike,
            PrimePowerRule::CustomTable(BTreeMap::new()),
        ];
        for rule in rules {
            let spec = MultiplicativeSpec::new(f.clone(), rule);
            for p in primes_up_to(200) {
                assert_eq!(spec.prime_power_mod(p, 1, 1009).unwrap(), f.eval_mod(p, 1009));
            }
        }
    }

    #[test]
    fn convenient_examples() {
        let p = params(2, 5.0);
        assert!(FactorizationRecord::of(924).unwrap().is_convenient(&p));
        assert_eq!(FactorizationRecord::of(924).unwrap().convenient_split(&p), Some((12, 77)));
        assert!(!FactorizationRecord::of(49).unwrap().is_convenient(&p));
        // 7^2·11: P_1 = 11, P_2 = 7 but 7 repeats
        assert!(!FactorizationRecord::of(539).unwrap().is_convenient(&p));
        // P_2 = 3 ≤ y
        assert!(!FactorizationRecord::of(33).unwrap().is_convenient(&p));
        assert!(!FactorizationRecord::of(13).unwrap().is_convenient(&p));
    }

    #[test]
    fn record_accessors() {
        let r = FactorizationRecord::of(360).unwrap();
        assert_eq!(r.prime_powers, vec![(5, 1), (3, 2), (2, 3)]);
        assert_eq!(r.omega_big, 6);
        assert_eq!((r.p_k(1), r.p_k(2), r.p_k(3), r.p_k(6), r.p_k(7)), (5, 3, 3, 2, 1));
        assert_eq!(r.rough_part(2.5) * r.smooth_part(2.5), 360);
        assert_eq!(r.rough_part(2.5), 45);
        assert_eq!(FactorizationRecord::of(1).unwrap().p_k(1), 1);
        assert_eq!(l_m(12, 2.0), 3.0);
        assert_eq!(l_m(1, 7.5), 7.5);
    }

    #[test]
    fn additive_examples() {
        assert_eq!(additive_values(12, 1000).unwrap(), (7, 3));
        assert_eq!(additive_values(97, 1000).unwrap(), (97, 97));
        assert_eq!(additive_values(360, 7).unwrap(), (3, 3));
        assert_eq!(additive_values(1, 7).unwrap(), (0, 0));
    }

    #[test]
    fn params_guard_and_values() {
        assert_eq!(ConvenientParams::computed_j(1e6), 0);
        assert_eq!(ConvenientParams::computed_j(1e7), 1);
        assert!(ConvenientParams::new(1e6, 1.0).is_err());
        let p = ConvenientParams::new(1e7, 1.0).unwrap();
        assert_eq!(p.j, 1);
        assert!((p.y - (1e7f64).ln().sqrt().exp()).abs() < 1e-9);
        let c = ConvenientParams::clamped(1e5, 1.0).unwrap();
        assert_eq!((c.j, c.j_source), (1, JSource::Clamped));
        assert!(ConvenientParams::new(1e7, 0.0).is_err());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let spec = MultiplicativeSpec::phi();
        let p = params(1, 10.0);
        let records: Vec<NRecord> = sieve_range(&spec, 1, 100_000, 35, &p, SieveOptions { segment_size: 4096, ..Default::default() })
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(records.len(), 100_000);
        for r in &records {
            let direct = FactorizationRecord::of(r.n).unwrap();
            assert_eq!(r.factorization, direct);
            assert_eq!((r.f_mod, r.coprime), f_mod(&spec, r.n, 35).unwrap());
            assert_eq!(r.convenient, direct.is_convenient(&p));
        }
    }

    #[test]
    fn segmentation_is_invisible() {
        let count = |seg: usize| {
            par_segments(
                1,
                200_000,
                seg,
                (0u64, 0u64),
                |s| {
                    s.iter().fold((0, 0), |(a, b), (n, f)| {
                        (a + f.iter().map(|&(_, e)| e as u64).sum::<u64>(), b ^ n.wrapping_mul(f.len() as u64 + 1))
                    })
                },
                |x, y| (x.0 + y.0, x.1 ^ y.1),
            )
        };
        let base = count(200_000);
        for seg in [1, 7, 1000, 65_536] {
            assert_eq!(count(seg), base);
        }
    }

    #[test]
    fn ascending_helpers_agree_with_records() {
        let p = params(2, 5.0);
        for n in 1..20_000u64 {
            let asc = factor(n).unwrap().factors;
            let rec = FactorizationRecord::from_ascending(n, &asc);
            assert_eq!(is_convenient_ascending(n, &asc, &p), rec.is_convenient(&p), "n = {n}");
            for k in 1..5 {
                assert_eq!(p_k_ascending(&asc, k), rec.p_k(k as usize));
            }
        }
    }

    #[test]
    fn guards() {
        let spec = MultiplicativeSpec::phi();
        let p = params(1, 10.0);
        assert!(matches!(
            sieve_range(&spec, 1, 10, 5, &p, SieveOptions { guard: 5, ..Default::default() }),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(sieve_range(&spec, 0, 10, 5, &p, SieveOptions::default()).is_err());
    }
}
