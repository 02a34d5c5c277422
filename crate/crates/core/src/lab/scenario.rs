use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Filter, ScenarioName};
use super::distribution::{run_distribution, DistributionReport, DistributionRequest};
use crate::number::{factor, gcd, primes_up_to};
use crate::poly::Preset;
use crate::sieve::{par_segments, FactorizationRecord, MultiplicativeSpec, PrimePowerRule, DEFAULT_SEGMENT_SIZE, DEFAULT_SIEVE_GUARD};
use crate::{Error, Result};

/// Whether one class outweighs every other unit class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassHighlight {
    pub x: u64,
    pub q: u64,
    pub class: u64,
    pub ratio: Option<f64>,
    pub runner_up: Option<u64>,
    pub runner_up_ratio: Option<f64>,
    pub strictly_largest: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterComparison {
    pub x: u64,
    pub q: u64,
    pub filter: Filter,
    pub unfiltered: Option<f64>,
    pub filtered: Option<f64>,
    pub filtered_not_worse: bool,
}

/// `A(n)` and `A*(n)` class counts over `1 ≤ n ≤ x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditiveDistribution {
    pub x: u64,
    pub q: u64,
    pub sum_counts: Vec<u64>,
    pub alt_counts: Vec<u64>,
    /// `x/q`
    pub expected: f64,
    pub sum_max_deviation: f64,
    pub alt_max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioName,
    pub spec: Option<String>,
    pub distributions: Vec<DistributionReport>,
    pub highlights: Vec<ClassHighlight>,
    pub comparisons: Vec<FilterComparison>,
    pub additive: Vec<AdditiveDistribution>,
}

impl ScenarioReport {
    fn new(scenario: ScenarioName, spec: Option<String>) -> Self {
        ScenarioReport { scenario, spec, distributions: Vec::new(), highlights: Vec::new(), comparisons: Vec::new(), additive: Vec::new() }
    }
}

/// Runs one named scenario with parameters from `cfg`.
pub fn run_scenario(name: ScenarioName, cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let xs = if cfg.x.is_empty() { vec![1_000_000] } else { cfg.x.clone() };
    match name {
        ScenarioName::Distribution => {
            let req = request(cfg, name, cfg.spec_for(cfg.poly()?)?, xs, required_q(cfg)?)?;
            let mut report = ScenarioReport::new(name, Some(req.spec.id()));
            report.distributions = run_distribution(&req)?;
            Ok(report)
        }
        ScenarioName::CounterexampleI => {
            let d = cfg.degree.unwrap_or(2);
            let qs = if cfg.q.is_empty() { vec![default_squarefree(d)] } else { cfg.q.clone() };
            for &q in &qs {
                let fq = factor(q)?;
                if !fq.is_squarefree() || fq.primes().any(|p| p <= d as u64 + 1) {
                    return Err(Error::invalid(format!("q = {q} must be a squarefree product of primes > D + 1 = {}", d + 1)));
                }
            }
            let spec = counterexample_spec(cfg, Preset::CounterexampleI(d))?;
            highlighted(cfg, name, spec, xs, qs, 2)
        }
        ScenarioName::CounterexampleIi => {
            let d = cfg.degree.unwrap_or(2);
            let qs = if cfg.q.is_empty() { vec![5u64.pow(d)] } else { cfg.q.clone() };
            for &q in &qs {
                let root = integer_root(q, d);
                if root.is_none_or(|r| factor(r).map(|f| f.primes().any(|p| p <= d as u64 + 1)).unwrap_or(true)) {
                    return Err(Error::invalid(format!("q = {q} must be q₁^D with every prime of q₁ above D + 1 = {}", d + 1)));
                }
            }
            let spec = counterexample_spec(cfg, Preset::CounterexampleII(d))?;
            highlighted(cfg, name, spec, xs, qs, 1)
        }
        ScenarioName::RestrictedA | ScenarioName::RestrictedB => {
            let filter = if name == ScenarioName::RestrictedA { Filter::LargePrimeDegreePlusTwo } else { Filter::LargePrime(2) };
            let mut req = request(cfg, name, cfg.spec_for(cfg.poly()?)?, xs, required_q(cfg)?)?;
            req.filters = vec![Filter::None, filter];
            let mut report = ScenarioReport::new(name, Some(req.spec.id()));
            report.distributions = run_distribution(&req)?;
            for pair in report.distributions.chunks(2) {
                let (plain, kept) = (&pair[0], &pair[1]);
                report.comparisons.push(FilterComparison {
                    x: plain.x,
                    q: plain.q,
                    filter,
                    unfiltered: plain.discrepancy,
                    filtered: kept.discrepancy,
                    filtered_not_worse: matches!((kept.discrepancy, plain.discrepancy), (Some(a), Some(b)) if a <= b),
                });
            }
            Ok(report)
        }
        ScenarioName::Additive => {
            let qs = if cfg.q.is_empty() { vec![4] } else { cfg.q.clone() };
            let mut report = ScenarioReport::new(name, None);
            for &x in &xs {
                for &q in &qs {
                    report.additive.push(additive_distribution(x, q)?);
                }
            }
            Ok(report)
        }
    }
}

fn required_q(cfg: &ExperimentConfig) -> Result<Vec<u64>> {
    if cfg.q.is_empty() {
        return Err(Error::Config("q list is empty".into()));
    }
    Ok(cfg.q.clone())
}

fn request(cfg: &ExperimentConfig, name: ScenarioName, spec: MultiplicativeSpec, xs: Vec<u64>, qs: Vec<u64>) -> Result<DistributionRequest> {
    let mut req = DistributionRequest::new(spec, xs, qs);
    req.scenario = name.to_string();
    req.delta = cfg.delta();
    req.j = cfg.j;
    req.y = cfg.y;
    if !cfg.filters.is_empty() {
        req.filters = cfg.filters.clone();
    }
    Ok(req)
}

/// The counterexamples are completely multiplicative unless a rule is given.
fn counterexample_spec(cfg: &ExperimentConfig, preset: Preset) -> Result<MultiplicativeSpec> {
    let f = preset.poly();
    match &cfg.rule {
        Some(_) => cfg.spec_for(f),
        None => Ok(MultiplicativeSpec::new(f, PrimePowerRule::CompletelyMultiplicative)),
    }
}

fn highlighted(cfg: &ExperimentConfig, name: ScenarioName, spec: MultiplicativeSpec, xs: Vec<u64>, qs: Vec<u64>, class: u64) -> Result<ScenarioReport> {
    let req = request(cfg, name, spec, xs, qs)?;
    let mut report = ScenarioReport::new(name, Some(req.spec.id()));
    report.distributions = run_distribution(&req)?;
    for d in report.distributions.iter().filter(|d| d.filter == Filter::None) {
        report.highlights.push(highlight(d, class % d.q));
    }
    Ok(report)
}

pub fn highlight(d: &DistributionReport, class: u64) -> ClassHighlight {
    let ratio = d.ratio(class);
    let runner = d
        .counts
        .iter()
        .filter(|(&a, _)| a != class)
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0)))
        .map(|(&a, _)| a);
    let runner_up_ratio = runner.and_then(|a| d.ratio(a));
    let strictly_largest = match (ratio, runner_up_ratio) {
        (Some(r), Some(s)) => r > s,
        (Some(_), None) => true,
        _ => false,
    };
    ClassHighlight { x: d.x, q: d.q, class, ratio, runner_up: runner, runner_up_ratio, strictly_largest }
}

/// Product of the first three primes above `D + 1`.
fn default_squarefree(d: u32) -> u64 {
    primes_up_to(1000).into_iter().filter(|&p| p > d as u64 + 1).take(3).product()
}

fn integer_root(q: u64, d: u32) -> Option<u64> {
    let guess = (q as f64).powf(1.0 / d as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r > 1 && r.checked_pow(d) == Some(q))
}

/// One sieve pass counting `A(n) mod q` and `A*(n) mod q`.
pub fn additive_distribution(x: u64, q: u64) -> Result<AdditiveDistribution> {
    if q == 0 {
        return Err(Error::invalid("modulus 0"));
    }
    if x > DEFAULT_SIEVE_GUARD {
        return Err(Error::guard("x", x as u128, DEFAULT_SIEVE_GUARD as u128));
    }
    let zero = (vec![0u64; q as usize], vec![0u64; q as usize]);
    let (sum_counts, alt_counts) = par_segments(
        1,
        x,
        DEFAULT_SEGMENT_SIZE,
        zero.clone(),
        |seg| {
            let (mut s, mut a) = zero.clone();
            for (n, asc) in seg.iter() {
                let (vs, va) = FactorizationRecord::from_ascending(n, asc).additive_mod(q);
                s[vs as usize] += 1;
                a[va as usize] += 1;
            }
            (s, a)
        },
        |(mut s, mut a), (ps, pa)| {
            s.iter_mut().zip(ps).for_each(|(u, v)| *u += v);
            a.iter_mut().zip(pa).for_each(|(u, v)| *u += v);
            (s, a)
        },
    );
    let expected = x as f64 / q as f64;
    let dev = |c: &[u64]| c.iter().map(|&v| (v as f64 / expected - 1.0).abs()).fold(0.0, f64::max);
    Ok(AdditiveDistribution {
        x,
        q,
        sum_max_deviation: dev(&sum_counts),
        alt_max_deviation: dev(&alt_counts),
        sum_counts,
        alt_counts,
        expected,
    })
}

/// Units `a` mod `q`, for callers that want class labels.
pub fn unit_classes(q: u64) -> Vec<u64> {
    (0..q).filter(|&a| gcd(a, q) == 1).collect()
}
