use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::Filter;
use crate::density::{alpha, Exact};
use crate::number::{factor, gcd, CompensatedSum};
use crate::sieve::{
    is_convenient_ascending, p_k_ascending, par_segments, ConvenientParams, MultiplicativeSpec, DEFAULT_SEGMENT_SIZE,
    DEFAULT_SIEVE_GUARD,
};
use crate::{Error, Result};

/// Class counts of `f(n) mod q` over `n ≤ x` for one filter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub scenario: String,
    pub spec: String,
    pub x: u64,
    pub q: u64,
    pub filter: Filter,
    /// `N(q, a)` for every unit `a`, written as `[a, count]` pairs.
    #[serde(with = "class_pairs")]
    pub counts: BTreeMap<u64, u64>,
    /// `#{n ≤ x : gcd(f(n), q) = 1}` among the filtered `n`.
    pub n_coprime: u64,
    pub n_con: u64,
    pub n_inc: u64,
    pub phi: u64,
    /// `max_a |N(q,a)·φ(q)/N_coprime − 1|`; absent when nothing was counted.
    pub discrepancy: Option<f64>,
    /// `½ Σ_a |N(q,a)/N_coprime − 1/φ(q)|`
    pub tv_distance: Option<f64>,
    pub alpha: Exact,
    /// `x/(log x)^{1−α}`
    pub scourfield_pred: f64,
    pub params: ConvenientParams,
    /// All primes of `q` admissible for `F`.
    pub admissible: bool,
    /// `log q / log log x`: the `K` with `q = (log x)^K`.
    pub log_x_exponent: f64,
}

impl DistributionReport {
    pub fn expected(&self) -> f64 {
        self.n_coprime as f64 / self.phi as f64
    }

    /// `N(q,a)·φ(q)/N_coprime`.
    pub fn ratio(&self, a: u64) -> Option<f64> {
        (self.n_coprime > 0).then(|| self.counts.get(&a).copied().unwrap_or(0) as f64 / self.expected())
    }

    fn check_conservation(&self) -> Result<()> {
        let total: u64 = self.counts.values().sum();
        if total != self.n_coprime || self.n_con + self.n_inc != self.n_coprime {
            return Err(Error::Consistency(format!(
                "conservation failed at x = {}, q = {}: Σ N(q,a) = {total}, N_coprime = {}, N_con + N_inc = {}",
                self.x,
                self.q,
                self.n_coprime,
                self.n_con + self.n_inc
            )));
        }
        Ok(())
    }
}

/// JSON object keys are strings, so class maps travel as pair lists.
mod class_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, u64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, u64>, D::Error> {
        Ok(Vec::<(u64, u64)>::deserialize(d)?.into_iter().collect())
    }
}

/// What a distribution run needs beyond the multiplicative function.
#[derive(Clone, Debug)]
pub struct DistributionRequest {
    pub scenario: String,
    pub spec: MultiplicativeSpec,
    pub xs: Vec<u64>,
    pub qs: Vec<u64>,
    pub filters: Vec<Filter>,
    pub delta: f64,
    pub j: Option<u32>,
    pub y: Option<f64>,
    pub segment_size: usize,
    pub guard: u64,
}

impl DistributionRequest {
    pub fn new(spec: MultiplicativeSpec, xs: Vec<u64>, qs: Vec<u64>) -> Self {
        DistributionRequest {
            scenario: "distribution".into(),
            spec,
            xs,
            qs,
            filters: vec![Filter::None],
            delta: 1.0,
            j: None,
            y: None,
            segment_size: DEFAULT_SEGMENT_SIZE,
            guard: DEFAULT_SIEVE_GUARD,
        }
    }

    /// `J` and `y` for one `x`: overrides win, otherwise `J` is computed and
    /// raised to 1 when it would be 0.
    pub fn params(&self, x: u64) -> Result<ConvenientParams> {
        let xf = (x as f64).max(3.0);
        let p = match self.j {
            Some(j) => ConvenientParams::with_j(xf, self.delta, j)?,
            None => ConvenientParams::clamped(xf, self.delta)?,
        };
        match self.y {
            Some(y) => p.with_y(y),
            None => Ok(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Tally {
    classes: Vec<u64>,
    coprime: u64,
    convenient: u64,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.classes.iter_mut().zip(&other.classes).for_each(|(a, b)| *a += b);
        self.coprime += other.coprime;
        self.convenient += other.convenient;
    }
}

/// One sieve pass per `x`, shared by every `(q, filter)` pair.
pub fn run_distribution(req: &DistributionRequest) -> Result<Vec<DistributionReport>> {
    if req.qs.is_empty() || req.xs.is_empty() {
        return Err(Error::invalid("distribution run needs at least one x and one q"));
    }
    if req.qs.contains(&0) {
        return Err(Error::invalid("modulus 0"));
    }
    let mut reports = Vec::new();
    for &x in &req.xs {
        if x > req.guard {
            return Err(Error::guard("x", x as u128, req.guard as u128));
        }
        let params = req.params(x)?;
        let tallies = tally_pass(req, x, &params)?;
        for (qi, &q) in req.qs.iter().enumerate() {
            let fq = factor(q)?;
            let profile = alpha(&req.spec.f, &fq)?;
            let admissible = fq.primes().all(|ell| req.spec.f.is_admissible(ell));
            let units = fq.units();
            for (fi, &filter) in req.filters.iter().enumerate() {
                let t = &tallies[qi * req.filters.len() + fi];
                let counts: BTreeMap<u64, u64> = units.iter().map(|&a| (a, t.classes[a as usize])).collect();
                let (discrepancy, tv_distance) = if t.coprime == 0 {
                    (None, None)
                } else {
                    let n = t.coprime as f64;
                    let phi = fq.phi as f64;
                    let disc = counts.values().map(|&c| (c as f64 * phi / n - 1.0).abs()).fold(0.0, f64::max);
                    let tv = 0.5 * counts.values().map(|&c| (c as f64 / n - 1.0 / phi).abs()).sum::<f64>();
                    (Some(disc), Some(tv))
                };
                let lx = (x as f64).ln();
                let report = DistributionReport {
                    scenario: req.scenario.clone(),
                    spec: req.spec.id(),
                    x,
                    q,
                    filter,
                    counts,
                    n_coprime: t.coprime,
                    n_con: t.convenient,
                    n_inc: t.coprime - t.convenient,
                    phi: fq.phi,
                    discrepancy,
                    tv_distance,
                    alpha: profile.alpha,
                    scourfield_pred: x as f64 / lx.powf(1.0 - profile.alpha_float),
                    params: params.clone(),
                    admissible,
                    log_x_exponent: (q as f64).ln() / lx.ln(),
                };
                report.check_conservation()?;
                reports.push(report);
            }
        }
    }
    Ok(reports)
}

fn tally_pass(req: &DistributionRequest, x: u64, params: &ConvenientParams) -> Result<Vec<Tally>> {
    let degree = req.spec.f.degree();
    let ks: Vec<Option<u32>> = req.filters.iter().map(|f| f.k(degree)).collect();
    let masks: Vec<Vec<bool>> = req.qs.iter().map(|&q| (0..q).map(|a| gcd(a, q) == 1).collect()).collect();
    let empty: Vec<Tally> = req
        .qs
        .iter()
        .flat_map(|&q| req.filters.iter().map(move |_| Tally { classes: vec![0; q as usize], coprime: 0, convenient: 0 }))
        .collect();
    let work = |seg: &crate::sieve::FactorSegment| -> Result<Vec<Tally>> {
        let mut out = empty.clone();
        for (n, asc) in seg.iter() {
            let convenient = is_convenient_ascending(n, asc, params);
            for (qi, &q) in req.qs.iter().enumerate() {
                let v = req.spec.value_mod(asc, q)?;
                if !masks[qi][v as usize] {
                    continue;
                }
                for (fi, filter) in req.filters.iter().enumerate() {
                    let keep = match filter {
                        Filter::None => true,
                        Filter::ConvenientOnly => convenient,
                        _ => p_k_ascending(asc, ks[fi].unwrap()) > q,
                    };
                    if keep {
                        let t = &mut out[qi * req.filters.len() + fi];
                        t.classes[v as usize] += 1;
                        t.coprime += 1;
                        t.convenient += convenient as u64;
                    }
                }
            }
        }
        Ok(out)
    };
    par_segments(1, x, req.segment_size, Ok(empty.clone()), work, |acc, part| {
        let mut acc = acc?;
        for (a, b) in acc.iter_mut().zip(&part?) {
            a.merge(b);
        }
        Ok(acc)
    })
}

/// `N_coprime(x)` against `x/(log x)^{1−α}` and the mean-value ratio
/// `N_coprime / ((x/log x)·exp(Σ_{p≤x} g(p)/p))` with `g = 1_{gcd(f, q) = 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScourfieldRow {
    pub spec: String,
    pub q: u64,
    pub x: u64,
    pub n_coprime: u64,
    pub pred: f64,
    /// `log(N_coprime / pred)`
    pub log_ratio: f64,
    pub prime_sum: f64,
    pub mean_value_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScourfieldFit {
    pub spec: String,
    pub q: u64,
    pub alpha: Exact,
    pub rows: Vec<ScourfieldRow>,
    /// Least-squares slope of `log_ratio` against `log log x`.
    pub slope: f64,
    /// `max − min` of `log_ratio`.
    pub window: f64,
}

/// All `x` values share one sieve pass up to the largest.
pub fn scourfield_fit(spec: &MultiplicativeSpec, q: u64, xs: &[u64]) -> Result<ScourfieldFit> {
    let fq = factor(q)?;
    let profile = alpha(&spec.f, &fq)?;
    if profile.alpha.is_zero() {
        return Err(Error::invalid(format!(
            "α({q}) = 0: every unit is a root of F modulo {:?}, so N_coprime carries no Scourfield main term",
            profile.zero_primes
        )));
    }
    let mut xs: Vec<u64> = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let Some(&top) = xs.last() else {
        return Err(Error::invalid("scourfield fit needs at least one x"));
    };
    if top > DEFAULT_SIEVE_GUARD {
        return Err(Error::guard("x", top as u128, DEFAULT_SIEVE_GUARD as u128));
    }
    if xs[0] < 3 {
        return Err(Error::invalid("scourfield fit needs x ≥ 3"));
    }
    let buckets = xs.len();
    let empty = || Ok((vec![0u64; buckets], vec![CompensatedSum::default(); buckets]));
    let work = |seg: &crate::sieve::FactorSegment| -> Result<(Vec<u64>, Vec<CompensatedSum>)> {
        let (mut counts, mut sums) = empty()?;
        for (n, asc) in seg.iter() {
            let v = spec.value_mod(asc, q)?;
            if gcd(v, q) != 1 {
                continue;
            }
            let b = xs.partition_point(|&x| x < n);
            counts[b] += 1;
            if asc.len() == 1 && asc[0] == (n, 1) {
                sums[b].add(1.0 / n as f64);
            }
        }
        Ok((counts, sums))
    };
    let (counts, sums) = par_segments(1, top, DEFAULT_SEGMENT_SIZE, empty(), work, |acc, part| {
        let (mut c, mut s) = acc?;
        let (pc, ps) = part?;
        c.iter_mut().zip(pc).for_each(|(a, b)| *a += b);
        s.iter_mut().zip(&ps).for_each(|(a, b)| a.merge(b));
        Ok((c, s))
    })?;
    let mut rows = Vec::with_capacity(buckets);
    let (mut n, mut prime_sum) = (0u64, CompensatedSum::default());
    for (i, &x) in xs.iter().enumerate() {
        n += counts[i];
        prime_sum.merge(&sums[i]);
        let lx = (x as f64).ln();
        let pred = x as f64 / lx.powf(1.0 - profile.alpha_float);
        let ps = prime_sum.value();
        rows.push(ScourfieldRow {
            spec: spec.id(),
            q,
            x,
            n_coprime: n,
            pred,
            log_ratio: (n as f64 / pred).ln(),
            prime_sum: ps,
            mean_value_ratio: n as f64 / (x as f64 / lx * ps.exp()),
        });
    }
    let (slope, window) = shape(&rows);
    Ok(ScourfieldFit { spec: spec.id(), q, alpha: profile.alpha, rows, slope, window })
}

fn shape(rows: &[ScourfieldRow]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.x as f64).ln().ln(), r.log_ratio)).collect();
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, hi - lo)
}
