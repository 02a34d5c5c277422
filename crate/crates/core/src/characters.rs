//! Dirichlet characters modulo odd prime powers, the sums
//! `Z_χ = Σ_v χ_0(v) χ(F(v))`, Ramanujan sums and point counts on
//! `F(x)F(y) = w`.
//!
//! A character is stored as its index `t`: `χ_t(g^k) = e^{2πi·tk/φ}` for the
//! fixed generator `g`. Values stay as exponents until a sum is formed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::number::{gcd, inv_mod, is_prime, unit_group, CompensatedSum, UnitGroupView};
use crate::poly::IntPoly;
use crate::{Error, Result};

pub const DEFAULT_TABLE_GUARD: u64 = 1_000_000;

/// Rounding residual above which an integer recovered from a floating
/// character sum is rejected.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub ell: u64,
    pub e: u32,
    pub modulus: u64,
    pub phi: u64,
    pub units: UnitGroupView,
    conductors: Vec<u64>,
    twiddle: Vec<Complex64>,
}

pub fn build_character_table(ell: u64, e: u32) -> Result<CharacterTable> {
    build_character_table_guarded(ell, e, DEFAULT_TABLE_GUARD)
}

pub fn build_character_table_guarded(ell: u64, e: u32, guard: u64) -> Result<CharacterTable> {
    if ell == 2 {
        return Err(Error::invalid("characters mod 2^e are not supported"));
    }
    if !is_prime(ell) || e == 0 {
        return Err(Error::invalid(format!("need an odd prime power, got {ell}^{e}")));
    }
    let units = unit_group(ell, e, guard)?;
    let phi = units.order;
    // φ(ℓ^k) for k = 0..=e
    let phis: Vec<u64> = (0..=e).map(|k| if k == 0 { 1 } else { (ell - 1) * ell.pow(k - 1) }).collect();
    let conductors = (0..phi)
        .map(|t| {
            let order = phi / gcd(t, phi);
            let e0 = phis.iter().position(|&p| p % order == 0).expect("order divides φ(ℓ^e)");
            ell.pow(e0 as u32)
        })
        .collect();
    let step = std::f64::consts::TAU / phi as f64;
    let twiddle = (0..phi).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect();
    Ok(CharacterTable { ell, e, modulus: units.modulus, phi, units, conductors, twiddle })
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.phi as usize
    }

    pub fn is_empty(&self) -> bool {
        self.phi == 0
    }

    /// `ℓ^{e₀}`, the modulus of the primitive character inducing `χ_t`.
    pub fn conductor(&self, t: u64) -> u64 {
        self.conductors[(t % self.phi) as usize]
    }

    pub fn order(&self, t: u64) -> u64 {
        self.phi / gcd(t % self.phi, self.phi)
    }

    /// `k` with `χ_t(u) = e^{2πik/φ}`, or `None` when `u` is not a unit.
    pub fn exponent(&self, t: u64, u: u64) -> Option<u64> {
        let k = self.units.log(u)?;
        Some(((t as u128 * k as u128) % self.phi as u128) as u64)
    }

    /// `χ_t(u)`, zero off the units.
    pub fn value(&self, t: u64, u: u64) -> Complex64 {
        self.exponent(t, u).map_or(Complex64::new(0.0, 0.0), |k| self.twiddle[k as usize])
    }

    /// `e^{2πik/φ}`.
    pub fn root_of_unity(&self, k: u64) -> Complex64 {
        self.twiddle[(k % self.phi) as usize]
    }

    /// Nontrivial characters whose order divides `k`.
    pub fn count_nontrivial_with_order_dividing(&self, k: u64) -> usize {
        (1..self.phi).filter(|&t| k % self.order(t) == 0).count()
    }

    /// `h[k] = #{units v : F(v) is a unit with discrete log k}`.
    pub fn value_log_histogram(&self, f: &IntPoly) -> Vec<u64> {
        const CHUNK: u64 = 1 << 14;
        let m = self.modulus;
        let phi = self.phi as usize;
        let chunks: Vec<u64> = (0..m).step_by(CHUNK as usize).collect();
        chunks
            .into_par_iter()
            .fold(
                || vec![0u64; phi],
                |mut h, lo| {
                    for v in lo..(lo + CHUNK).min(m) {
                        if v % self.ell == 0 {
                            continue;
                        }
                        if let Some(k) = self.units.log(f.eval_mod(v, m)) {
                            h[k as usize] += 1;
                        }
                    }
                    h
                },
            )
            .reduce(
                || vec![0u64; phi],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }

    /// `Σ_k h[k]·χ_t(g^k)`.
    pub fn sum_histogram(&self, hist: &[u64], t: u64) -> Complex64 {
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        let phi = self.phi as u128;
        for (k, &c) in hist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let z = self.twiddle[((t as u128 * k as u128) % phi) as usize];
            re.add(c as f64 * z.re);
            im.add(c as f64 * z.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// One character sum with its bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZChiReport {
    pub t: u64,
    pub order: u64,
    pub conductor: u64,
    #[serde(rename = "Z_re")]
    pub z_re: f64,
    #[serde(rename = "Z_im")]
    pub z_im: f64,
    pub abs: f64,
    /// `ℓ^{e−e₀}(d−1)ℓ^{e₀(1−1/d)}`, Weil or Cochrane on the primitive part.
    pub bound: Option<f64>,
    /// The weaker uniform `D·ℓ^{e−e₀/(D+1)}`.
    pub uniform_bound: Option<f64>,
    /// Whether the bound applies: `ℓ` admissible and `χ` nonprincipal.
    pub binding: bool,
    pub ok: bool,
}

impl ZChiReport {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }
}

/// `Z_χ` for the single character `χ_t`.
pub fn z_chi(f: &IntPoly, table: &CharacterTable, t: u64) -> Result<ZChiReport> {
    check_poly(f)?;
    let hist = table.value_log_histogram(f);
    Ok(z_report(f, table, &hist, t % table.phi))
}

/// `Z_χ` for every character mod `ℓ^e`, indexed by `t`.
pub fn z_chi_all(f: &IntPoly, table: &CharacterTable) -> Result<Vec<ZChiReport>> {
    check_poly(f)?;
    let hist = table.value_log_histogram(f);
    Ok((0..table.phi).into_par_iter().map(|t| z_report(f, table, &hist, t)).collect())
}

fn check_poly(f: &IntPoly) -> Result<()> {
    if f.degree() == 0 {
        return Err(Error::invalid("F must be nonconstant"));
    }
    Ok(())
}

fn z_report(f: &IntPoly, table: &CharacterTable, hist: &[u64], t: u64) -> ZChiReport {
    let z = if t == 0 {
        Complex64::new(hist.iter().sum::<u64>() as f64, 0.0)
    } else {
        table.sum_histogram(hist, t)
    };
    let conductor = table.conductor(t);
    let binding = t != 0 && f.is_admissible(table.ell);
    let (bound, uniform_bound) = if t == 0 {
        (None, None)
    } else {
        let ell = table.ell as f64;
        let e = table.e as f64;
        let e0 = (conductor as f64).log(ell).round();
        let dd = f.degree() as f64;
        let d = if f.constant() % table.ell as i64 == 0 { dd } else { dd + 1.0 };
        let weil = ell.powf(e - e0) * (d - 1.0) * ell.powf(e0 * (1.0 - 1.0 / d));
        (Some(weil), Some(dd * ell.powf(e - e0 / (dd + 1.0))))
    };
    let abs = z.norm();
    let ok = !binding || bound.is_some_and(|b| abs <= b * (1.0 + 1e-9) + 1e-9);
    ZChiReport { t, order: table.order(t), conductor, z_re: z.re, z_im: z.im, abs, bound, uniform_bound, binding, ok }
}

/// `Σ_{(v,ℓ)=1, v mod ℓ^e} e^{2πirv/ℓ^e}` for `0 < r < ℓ^e`: `−ℓ^{e−1}` when
/// `ℓ^{e−1} ∥ r`, otherwise 0.
pub fn ramanujan_sum(ell: u64, e: u32, r: u64) -> Result<i64> {
    let m = check_ramanujan(ell, e, r)?;
    let low = m / ell;
    Ok(if r % low == 0 && r % m != 0 && (r / low) % ell != 0 { -(low as i64) } else { 0 })
}

/// The same sum evaluated term by term.
pub fn ramanujan_sum_direct(ell: u64, e: u32, r: u64) -> Result<f64> {
    let m = check_ramanujan(ell, e, r)?;
    let mut s = CompensatedSum::default();
    for v in (1..m).filter(|v| v % ell != 0) {
        let k = (r as u128 * v as u128 % m as u128) as f64;
        s.add((std::f64::consts::TAU * k / m as f64).cos());
    }
    Ok(s.value())
}

fn check_ramanujan(ell: u64, e: u32, r: u64) -> Result<u64> {
    if !is_prime(ell) || e == 0 {
        return Err(Error::invalid(format!("need a prime power, got {ell}^{e}")));
    }
    let m = ell
        .checked_pow(e)
        .ok_or_else(|| Error::invalid("prime power overflows"))?;
    if r == 0 || r >= m {
        return Err(Error::invalid(format!("r = {r} outside 0 < r < {m}")));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveCountReport {
    pub ell: u64,
    pub w: u64,
    pub count: u64,
    /// `ℓ + 1 + ½(2D−1)(2D−2)⌊2√ℓ⌋`
    pub bound: u64,
    pub within_bound: bool,
    pub admissible: bool,
}

/// Pairs `(x, y) ∈ F_ℓ²` with `F(x)F(y) = w`, from the value distribution of `F`.
pub fn curve_point_count(f: &IntPoly, ell: u64, w: u64) -> Result<CurveCountReport> {
    let counts = curve_value_counts(f, ell, w)?;
    let w = w % ell;
    let count: u64 = (1..ell)
        .map(|a| counts[a as usize] * counts[(w as u128 * inv_mod(a, ell).unwrap() as u128 % ell as u128) as usize])
        .sum();
    let d = f.degree() as u64;
    let genus_term = (2 * d - 1) * (2 * d - 2) / 2;
    let bound = ell + 1 + genus_term * crate::number::isqrt(4 * ell);
    Ok(CurveCountReport { ell, w, count, bound, within_bound: count <= bound, admissible: f.is_admissible(ell) })
}

/// The same count, walking `y` and looking up how many `x` have `F(x) = w/F(y)`.
pub fn curve_point_count_by_y(f: &IntPoly, ell: u64, w: u64) -> Result<u64> {
    let counts = curve_value_counts(f, ell, w)?;
    let w = w % ell;
    Ok((0..ell)
        .filter_map(|y| inv_mod(f.eval_mod(y, ell), ell))
        .map(|inv| counts[(w as u128 * inv as u128 % ell as u128) as usize])
        .sum())
}

fn curve_value_counts(f: &IntPoly, ell: u64, w: u64) -> Result<Vec<u64>> {
    if !is_prime(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if w % ell == 0 {
        return Err(Error::invalid("w must be a unit mod ℓ"));
    }
    check_poly(f)?;
    let mut counts = vec![0u64; ell as usize];
    for x in 0..ell {
        counts[f.eval_mod(x, ell) as usize] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn table_shapes() {
        let t5 = build_character_table(5, 1).unwrap();
        let orders: Vec<u64> = (0..4).map(|t| t5.order(t)).collect();
        assert_eq!(orders, vec![1, 4, 2, 4]);
        assert_eq!(t5.conductor(0), 1);

        let t9 = build_character_table(3, 2).unwrap();
        assert_eq!(t9.len(), 6);
        let quad = (0..6).find(|&t| t9.order(t) == 2).unwrap();
        assert_eq!(t9.conductor(quad), 3);
        // periodic mod 3 on the units of 9
        for u in [1u64, 2, 4, 5, 7, 8] {
            assert_eq!(t9.exponent(quad, u), t9.exponent(quad, u % 3 + if u % 3 == 1 { 3 } else { 0 }));
        }
        assert_eq!(t9.conductor(1), 9);

        let t7 = build_character_table(7, 1).unwrap();
        assert_eq!(t7.count_nontrivial_with_order_dividing(6), 5);

        assert!(build_character_table(2, 3).is_err());
        assert!(matches!(build_character_table_guarded(101, 3, 1000), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn characters_are_multiplicative() {
        for (ell, e) in [(3u64, 1u32), (5, 2), (7, 2), (11, 1), (31, 1)] {
            let tab = build_character_table(ell, e).unwrap();
            let m = tab.modulus;
            for t in 0..tab.phi {
                for u in (1..m).filter(|u| u % ell != 0) {
                    for v in (1..m).filter(|v| v % ell != 0).step_by(3) {
                        let lhs = tab.exponent(t, u * v % m).unwrap();
                        let rhs = (tab.exponent(t, u).unwrap() + tab.exponent(t, v).unwrap()) % tab.phi;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn z_chi_examples() {
        let tab = build_character_table(5, 1).unwrap();
        let all = z_chi_all(&poly(&[-1, 1]), &tab).unwrap();
        assert_eq!(all[0].z_re, 3.0);
        for r in &all[1..] {
            assert!((r.abs - 1.0).abs() < 1e-12);
            assert!(r.ok && r.binding);
            assert!((r.bound.unwrap() - 5f64.sqrt()).abs() < 1e-12);
        }
        // Z_χ = −χ(4)
        let r = z_chi(&poly(&[-1, 1]), &tab, 1).unwrap();
        assert!((r.z() + tab.value(1, 4)).norm() < 1e-12);

        let tab7 = build_character_table(7, 1).unwrap();
        let all = z_chi_all(&poly(&[1, 0, 1]), &tab7).unwrap();
        for r in &all[1..] {
            assert!(r.abs <= 2.0 * 7f64.powf(2.0 / 3.0));
            assert!(r.ok);
        }
    }

    #[test]
    fn principal_sum_counts_unit_values() {
        let f = poly(&[2, -2, 1]);
        for (ell, e) in [(5u64, 2u32), (7, 2), (11, 1), (13, 2)] {
            let tab = build_character_table(ell, e).unwrap();
            let m = tab.modulus;
            let direct = (0..m).filter(|v| v % ell != 0 && f.eval_mod(*v, m) % ell != 0).count();
            assert_eq!(z_chi(&f, &tab, 0).unwrap().z_re, direct as f64);
        }
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(3, 2, 3).unwrap(), -3);
        assert_eq!(ramanujan_sum(3, 2, 1).unwrap(), 0);
        assert_eq!(ramanujan_sum(5, 1, 2).unwrap(), -1);
        assert_eq!(ramanujan_sum(2, 3, 4).unwrap(), -4);
        assert_eq!(ramanujan_sum(2, 3, 2).unwrap(), 0);
        assert!(ramanujan_sum(3, 2, 9).is_err());
        assert!(ramanujan_sum(3, 2, 0).is_err());
        assert!((ramanujan_sum_direct(3, 2, 3).unwrap() + 3.0).abs() < 1e-9);
    }

    #[test]
    fn curve_examples() {
        let r = curve_point_count(&poly(&[-1, 1]), 7, 1).unwrap();
        assert_eq!((r.count, r.bound, r.within_bound), (6, 8, true));
        assert!(curve_point_count(&poly(&[-1, 1]), 7, 0).is_err());

        let f = poly(&[1, 0, 1]);
        let r = curve_point_count(&f, 11, 3).unwrap();
        assert_eq!(r.bound, 30);
        let brute = (0..11u64).flat_map(|x| (0..11u64).map(move |y| (x, y))).filter(|&(x, y)| f.eval_mod(x, 11) * f.eval_mod(y, 11) % 11 == 3).count();
        assert_eq!(r.count, brute as u64);
        assert_eq!(curve_point_count_by_y(&f, 11, 3).unwrap(), r.count);
    }
}
