use wudlab::lab::{run_distribution, DistributionRequest, Filter};
use wudlab::number::factor;
use wudlab::sieve::{sieve_range, ConvenientParams, MultiplicativeSpec, PrimePowerRule, SieveOptions};
use wudlab::poly::IntPoly;

#[test]
fn sum_and_alternating_sum_agree_mod_two() {
    let spec = MultiplicativeSpec::phi();
    let params = ConvenientParams::clamped(1e6, 1.0).unwrap();
    for rec in sieve_range(&spec, 1, 1_000_000, 2, &params, SieveOptions::default()).unwrap() {
        let rec = rec.unwrap();
        let (a, b) = rec.factorization.additive_mod(2);
        assert_eq!(a, b, "n = {}", rec.n);
    }
}

#[test]
fn streamed_values_match_trial_division() {
    let spec = MultiplicativeSpec::new(IntPoly::new(vec![1, 1]).unwrap(), PrimePowerRule::PolynomialAtPrimePowers);
    let params = ConvenientParams::clamped(1e5, 1.0).unwrap();
    let opts = SieveOptions { segment_size: 777, ..Default::default() };
    for rec in sieve_range(&spec, 1, 20_000, 7, &params, opts).unwrap() {
        let rec = rec.unwrap();
        let direct = if rec.n == 1 {
            1
        } else {
            factor(rec.n).unwrap().factors.iter().map(|&(p, e)| (p.pow(e) + 1) % 7).product::<u64>() % 7
        };
        assert_eq!(rec.f_mod, direct, "n = {}", rec.n);
    }
}

#[test]
fn distribution_is_independent_of_segmentation_and_threads() {
    let mut req = DistributionRequest::new(MultiplicativeSpec::phi(), vec![200_000], vec![5, 7, 35]);
    req.filters = vec![Filter::None, Filter::LargePrime(2), Filter::ConvenientOnly];
    let base = run_distribution(&req).unwrap();
    for segment in [1_000, 65_536, 300_000] {
        req.segment_size = segment;
        assert_eq!(run_distribution(&req).unwrap(), base);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    assert_eq!(pool.install(|| run_distribution(&req)).unwrap(), base);
}

#[test]
fn counts_are_conserved() {
    let req = DistributionRequest::new(MultiplicativeSpec::phi(), vec![100_000], vec![5]);
    for r in run_distribution(&req).unwrap() {
        assert_eq!(r.counts.values().sum::<u64>(), r.n_coprime);
        assert_eq!(r.n_con + r.n_inc, r.n_coprime);
    }
}

#[test]
fn convenient_share_is_positive_once_j_is_one() {
    let req = DistributionRequest::new(MultiplicativeSpec::phi(), vec![1_000_000], vec![5]);
    let r = &run_distribution(&req).unwrap()[0];
    assert!(r.n_con > 0 && r.n_inc > 0);
    assert_eq!(r.params.j, 1);
}

#[test]
fn weaker_prime_filter_keeps_more() {
    let spec = MultiplicativeSpec::with_default_rule(IntPoly::new(vec![2, -2, 1]).unwrap());
    let mut req = DistributionRequest::new(spec, vec![300_000], vec![5, 13]);
    req.filters = vec![Filter::LargePrime(2), Filter::LargePrimeDegreePlusTwo];
    let reports = run_distribution(&req).unwrap();
    for q in [5, 13] {
        let get = |f: Filter| reports.iter().find(|r| r.q == q && r.filter == f).unwrap();
        let (weak, strong) = (get(Filter::LargePrime(2)), get(Filter::LargePrimeDegreePlusTwo));
        assert!(weak.n_coprime >= strong.n_coprime);
        for (a, &c) in &strong.counts {
            assert!(weak.counts[a] >= c);
        }
    }
}

#[test]
fn phi_discrepancy_shrinks_with_x() {
    let req = DistributionRequest::new(MultiplicativeSpec::phi(), vec![100_000, 1_000_000, 10_000_000], vec![5, 7, 11]);
    let reports = run_distribution(&req).unwrap();
    for q in [5, 7, 11] {
        let d: Vec<f64> = reports.iter().filter(|r| r.q == q).map(|r| r.discrepancy.unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]), "q = {q}: {d:?}");
    }
}

#[test]
fn mean_value_ratio_is_stable() {
    for q in [5, 7, 35] {
        let fit = wudlab::lab::scourfield_fit(&MultiplicativeSpec::phi(), q, &[10_000, 100_000, 1_000_000]).unwrap();
        let r: Vec<f64> = fit.rows.iter().map(|r| r.mean_value_ratio).collect();
        let (lo, hi) = r.iter().fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!(lo > 0.0 && hi / lo < 1.5, "q = {q}: {r:?}");
    }
}
