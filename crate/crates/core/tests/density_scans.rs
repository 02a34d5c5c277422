use wudlab::density::{count_unit_roots, xi_max_roots, DEFAULT_ROOT_GUARD};
use wudlab::number::{factor, primes_up_to};
use wudlab::poly::IntPoly;

fn panel() -> Vec<IntPoly> {
    [&[-1, 1][..], &[1, 0, 1], &[2, -2, 1], &[2, 0, 0, 1], &[0, 3, -3, 1], &[1, 1, 0, 0, 1]]
        .iter()
        .map(|c| IntPoly::new(c.to_vec()).unwrap())
        .collect()
}

#[test]
fn root_count_at_most_degree() {
    for f in panel() {
        for ell in primes_up_to(10_000).into_iter().filter(|&l| f.is_admissible(l)) {
            let nu = count_unit_roots(&f, ell, 1, DEFAULT_ROOT_GUARD).unwrap().count();
            assert!(nu <= f.degree() as u64, "ν({ell}) = {nu} for {f}");
        }
    }
}

#[test]
fn xi_within_degree_power_for_squarefree_q() {
    for f in panel().into_iter().take(4) {
        for q in (3..=10_000u64).step_by(2) {
            let fq = factor(q).unwrap();
            if !fq.is_squarefree() || !fq.primes().all(|l| f.is_admissible(l)) {
                continue;
            }
            let r = xi_max_roots(&f, &fq, 1 << 20).unwrap();
            assert_eq!(r.within_d_pow_omega, Some(true), "ξ({q}) = {} for {f}", r.xi);
        }
    }
}

/// For squarefree `q` the fibres factor over CRT, so `ξ(q) = ∏ ξ(ℓ)`; this
/// checks every prime factor up to `10^5` and one composite assembled from them.
#[test]
fn xi_multiplies_over_primes() {
    let f = IntPoly::new(vec![1, 0, 1]).unwrap();
    let mut worst = 0;
    for ell in primes_up_to(100_000).into_iter().filter(|&l| f.is_admissible(l)) {
        let xi = xi_max_roots(&f, &factor(ell).unwrap(), 1 << 20).unwrap().xi;
        assert!(xi <= 2, "ξ({ell}) = {xi}");
        worst = worst.max(xi);
    }
    assert_eq!(worst, 2);
    let q = 5 * 13 * 17;
    let xi_q = xi_max_roots(&f, &factor(q).unwrap(), 1 << 20).unwrap().xi;
    let prod: u64 = [5u64, 13, 17].iter().map(|&l| xi_max_roots(&f, &factor(l).unwrap(), 1 << 20).unwrap().xi).product();
    assert_eq!(xi_q, prod);
}
