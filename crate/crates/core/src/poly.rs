//! Integer (and integer-valued) polynomials `F(T)`.
//!
//! A polynomial is stored as `G(T)/Q` with `G ∈ Z[T]` and `Q ≥ 1`; ordinary
//! integer polynomials have `Q = 1`. The discriminant data `Δ(F)` is exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::number::{factor, is_prime, primes_up_to};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    /// Coefficients of `G`, constant term first; the last one is nonzero.
    coeffs: Vec<i64>,
    /// The denominator `Q`.
    denom: u64,
    /// `Δ(F)`, computed once; `None` for constants.
    delta: Option<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        Self::integer_valued(coeffs, 1)
    }

    /// `G(T)/Q`; rejected unless it maps integers to integers.
    pub fn integer_valued(mut coeffs: Vec<i64>, denom: u64) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("zero polynomial"));
        }
        if denom == 0 {
            return Err(Error::invalid("denominator 0"));
        }
        let mut poly = IntPoly { coeffs, denom, delta: None };
        if poly.degree() > 0 {
            poly.delta = Some(poly.compute_delta()?);
        }
        if denom > 1 {
            // integer-valued iff integral at D+1 consecutive integers
            for k in 0..=poly.degree() as i128 {
                let g = poly.eval_numerator(k).ok_or_else(|| Error::invalid("overflow checking integrality"))?;
                if g % denom as i128 != 0 {
                    return Err(Error::invalid(format!("G({k})/{denom} is not an integer")));
                }
            }
        }
        Ok(poly)
    }

    /// Validates use as a defining polynomial: nonconstant with `Δ(F) ≠ 0`.
    pub fn defining(coeffs: Vec<i64>) -> Result<Self> {
        let p = Self::new(coeffs)?;
        p.check_defining()?;
        Ok(p)
    }

    pub fn check_defining(&self) -> Result<()> {
        if self.degree() == 0 {
            return Err(Error::invalid("defining polynomial must be nonconstant"));
        }
        if self.delta()?.is_zero() {
            return Err(Error::invalid(format!("{self} has Δ(F) = 0 (repeated roots)")));
        }
        Ok(())
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    pub fn constant(&self) -> i64 {
        self.coeffs[0]
    }

    fn eval_numerator(&self, v: i128) -> Option<i128> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i128, |acc, &c| acc.checked_mul(v)?.checked_add(c as i128))
    }

    /// Exact value `F(v)`, if it fits in `i128`.
    pub fn eval(&self, v: i128) -> Option<i128> {
        self.eval_numerator(v).map(|g| g / self.denom as i128)
    }

    /// `F(v) mod m`, in `[0, m)`.
    pub fn eval_mod(&self, v: u64, m: u64) -> u64 {
        debug_assert!(m >= 1);
        if self.denom == 1 && m < 1 << 32 {
            let vr = v % m;
            let mut acc: u64 = 0;
            for &c in self.coeffs.iter().rev() {
                acc = (acc * vr + c.rem_euclid(m as i64) as u64) % m;
            }
            acc
        } else if self.denom == 1 {
            let mi = m as i128;
            let vr = (v % m) as i128;
            let mut acc: i128 = 0;
            for &c in self.coeffs.iter().rev() {
                acc = (acc * vr + c as i128).rem_euclid(mi);
            }
            acc as u64
        } else {
            let big = m as u128 * self.denom as u128;
            let vr = v as u128 % big;
            let mut acc: u128 = 0;
            for &c in self.coeffs.iter().rev() {
                let cr = (c as i128).rem_euclid(big as i128) as u128;
                acc = (mul_mod_u128(acc, vr, big) + cr) % big;
            }
            (acc / self.denom as u128) as u64 % m
        }
    }

    /// `F'(v) mod m` for `Q = 1`, or `None` when `Q` is not invertible mod `m`.
    pub fn eval_derivative_mod(&self, v: u64, m: u64) -> Option<u64> {
        let mi = m as i128;
        let vr = (v % m) as i128;
        let mut acc: i128 = 0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = (acc * vr + (c as i128 % mi) * (k as i128 % mi)).rem_euclid(mi);
        }
        if self.denom == 1 {
            return Some(acc as u64);
        }
        let inv = crate::number::inv_mod(self.denom % m, m)?;
        Some(crate::number::mul_mod(acc as u64, inv, m))
    }

    /// `Δ(F)`: the discriminant of `F` when `F(0) = 0`, else of `T·F(T)`.
    /// For `G/Q` the numerator `G` is used.
    pub fn delta(&self) -> Result<BigInt> {
        self.delta.clone().ok_or_else(|| Error::invalid("constant polynomial"))
    }

    fn compute_delta(&self) -> Result<BigInt> {
        let g: Vec<BigInt> = if self.constant() == 0 {
            self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
        } else {
            std::iter::once(BigInt::zero()).chain(self.coeffs.iter().map(|&c| BigInt::from(c))).collect()
        };
        discriminant(&g)
    }

    /// Whether `ℓ` satisfies the structural admissibility condition:
    /// odd prime, `ℓ ∤ lc(F)`, `ℓ ∤ Δ(F)`, `ℓ > Q`.
    pub fn is_admissible(&self, ell: u64) -> bool {
        let delta = self.delta.as_ref().expect("nonconstant");
        self.admissible_with(ell, delta)
    }

    fn admissible_with(&self, ell: u64, delta: &BigInt) -> bool {
        ell != 2
            && is_prime(ell)
            && ell > self.denom
            && self.leading() % ell as i64 != 0
            && !(delta % BigInt::from(ell)).is_zero()
    }

    /// Every admissible prime `≤ bound`, plus the theoretical constant
    /// `C(F) = max(largest bad prime, (4D)^{2D+2})` for comparison.
    pub fn admissible_primes(&self, bound: u64) -> Result<AdmissiblePrimes> {
        if self.degree() == 0 {
            return Err(Error::invalid("constant polynomial"));
        }
        let delta = self.delta()?;
        let primes = primes_up_to(bound)
            .into_iter()
            .filter(|&l| self.admissible_with(l, &delta))
            .collect();
        let d = self.degree() as u64;
        let structural = BigUint::from(4 * d).pow(2 * self.degree() + 2);
        let bad_product = (BigInt::from(self.leading()) * &delta).abs();
        let largest_bad_prime = bad_product.to_u64().and_then(|v| {
            let mut worst = 2u64.max(largest_prime_at_most(self.denom));
            if v > 1 {
                worst = worst.max(factor(v).ok()?.primes().last().unwrap_or(2));
            }
            Some(worst)
        });
        let theoretical_c = match largest_bad_prime {
            Some(b) => structural.max(BigUint::from(b)),
            None => structural.max(bad_product.magnitude().clone()),
        };
        Ok(AdmissiblePrimes { primes, delta, theoretical_c, largest_bad_prime })
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        let body = self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        if self.denom == 1 {
            format!("[{body}]")
        } else {
            format!("[{body}]/{}", self.denom)
        }
    }
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let (mut a, mut b, mut acc) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

fn largest_prime_at_most(n: u64) -> u64 {
    (2..=n).rev().find(|&p| is_prime(p)).unwrap_or(2)
}

#[derive(Clone, Debug)]
pub struct AdmissiblePrimes {
    pub primes: Vec<u64>,
    pub delta: BigInt,
    pub theoretical_c: BigUint,
    /// `None` when `|lc·Δ|` is too large to factor here.
    pub largest_bad_prime: Option<u64>,
}

/// Discriminant of `g` (coefficients constant-first, exact).
///
/// Uses `disc(g) = (−1)^{n(n−1)/2} Res(g, g′) / lc(g)`; degree one has
/// discriminant 1 by convention.
pub fn discriminant(g: &[BigInt]) -> Result<BigInt> {
    let mut g = g.to_vec();
    while g.last().is_some_and(Zero::is_zero) {
        g.pop();
    }
    let n = g.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::invalid("discriminant of a constant"));
    }
    if n == 1 {
        return Ok(BigInt::one());
    }
    let dg: Vec<BigInt> = g.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
    let res = resultant(&g, &dg);
    let lc = g.last().unwrap();
    let (quot, rem) = res.div_rem(lc);
    if !rem.is_zero() {
        return Err(Error::Consistency("resultant not divisible by leading coefficient".into()));
    }
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -quot } else { quot })
}

/// Sylvester-matrix resultant, determinant by fraction-free Bareiss elimination.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // rows hold coefficients highest degree first
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut mat: Vec<Vec<BigInt>>) -> BigInt {
    let n = mat.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = v / &prev;
            }
        }
        prev = mat[k][k].clone();
    }
    sign * &mat[n - 1][n - 1]
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            let body = match (k, mag) {
                (0, _) => mag.to_string(),
                (1, 1) => "T".into(),
                (1, _) => format!("{mag}T"),
                (_, 1) => format!("T^{k}"),
                _ => format!("{mag}T^{k}"),
            };
            let sign = if c < 0 { "-" } else { "+" };
            if terms.is_empty() {
                terms.push(if c < 0 { format!("-{body}") } else { body });
            } else {
                terms.push(format!("{sign} {body}"));
            }
        }
        let s = terms.join(" ");
        if self.denom == 1 {
            write!(f, "{s}")
        } else {
            write!(f, "({s})/{}", self.denom)
        }
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

/// Named polynomial presets accepted on the command line and in configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `T − 1`
    Phi,
    /// `T + 1`
    Sigma,
    /// `(T−2)(T−4)⋯(T−2D) + 2`
    CounterexampleI(u32),
    /// `(T−1)^D + 1`
    CounterexampleII(u32),
}

impl Preset {
    pub fn poly(self) -> IntPoly {
        match self {
            Preset::Phi => IntPoly::new(vec![-1, 1]).unwrap(),
            Preset::Sigma => IntPoly::new(vec![1, 1]).unwrap(),
            Preset::CounterexampleI(d) => {
                let mut c = vec![1i64];
                for k in 1..=d as i64 {
                    c = mul_linear(&c, -2 * k);
                }
                c[0] += 2;
                IntPoly::new(c).unwrap()
            }
            Preset::CounterexampleII(d) => {
                let mut c = vec![1i64];
                for _ in 0..d {
                    c = mul_linear(&c, -1);
                }
                c[0] += 1;
                IntPoly::new(c).unwrap()
            }
        }
    }
}

/// `c(T)·(T + r)`.
fn mul_linear(c: &[i64], r: i64) -> Vec<i64> {
    let mut out = vec![0i64; c.len() + 1];
    for (k, &a) in c.iter().enumerate() {
        out[k] += a * r;
        out[k + 1] += a;
    }
    out
}

impl FromStr for IntPoly {
    type Err = Error;

    /// Accepts a coefficient list (constant term first), optionally over a
    /// denominator: `[-1, 1]`, `-1,1`, `[0,1,1]/2`; or a preset name:
    /// `phi`, `sigma`, `counterexample-i D=<d>`, `counterexample-ii D=<d>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let mut words = lower.split_whitespace();
        let head = words.next().unwrap_or("");
        let degree_arg = |words: &mut std::str::SplitWhitespace| -> Result<u32> {
            let arg = words.next().ok_or_else(|| Error::invalid(format!("{head} needs D=<d>")))?;
            let d = arg
                .strip_prefix("d=")
                .and_then(|v| v.parse::<u32>().ok())
                .filter(|&d| (1..=12).contains(&d))
                .ok_or_else(|| Error::invalid(format!("bad degree argument `{arg}`")))?;
            Ok(d)
        };
        let preset = match head {
            "phi" => Some(Preset::Phi),
            "sigma" => Some(Preset::Sigma),
            "counterexample-i" => Some(Preset::CounterexampleI(degree_arg(&mut words)?)),
            "counterexample-ii" => Some(Preset::CounterexampleII(degree_arg(&mut words)?)),
            _ => None,
        };
        if let Some(p) = preset {
            if let Some(extra) = words.next() {
                return Err(Error::invalid(format!("unexpected `{extra}` after preset")));
            }
            return Ok(p.poly());
        }
        let (list, denom) = match s.rsplit_once('/') {
            Some((l, d)) => {
                let d = d.trim().parse::<u64>().map_err(|_| Error::invalid(format!("bad denominator in `{s}`")))?;
                (l, d)
            }
            None => (s, 1),
        };
        let list = list.trim().trim_start_matches('[').trim_end_matches(']');
        let coeffs = list
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::invalid(format!("bad coefficient `{t}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        IntPoly::integer_valued(coeffs, denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[1, 0, 1]).eval_mod(3, 5), 0);
        for q in [1u64, 2, 9, 35, 1_000_003] {
            assert_eq!(p(&[-1, 1]).eval_mod(1, q), 0);
        }
        let ce = Preset::CounterexampleI(2).poly();
        assert_eq!(ce.coeffs(), &[10, -6, 1]);
        assert_eq!(ce.eval_mod(2, 35), 2);
        assert_eq!(Preset::CounterexampleII(2).poly().coeffs(), &[2, -2, 1]);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(p(&[1, 0, 1]).delta().unwrap(), BigInt::from(-4));
        assert_eq!(p(&[-1, 1]).delta().unwrap(), BigInt::from(1));
        assert_eq!(p(&[0, 1]).delta().unwrap(), BigInt::from(1));
        // T^2 - 1 has F(0) ≠ 0: disc(T^3 - T) = 4
        assert_eq!(p(&[-1, 0, 1]).delta().unwrap(), BigInt::from(4));
        // repeated root
        assert!(IntPoly::defining(vec![1, 2, 1]).is_err());
        assert!(IntPoly::new(vec![0, 0]).is_err());
    }

    #[test]
    fn discriminant_quadratic_and_cubic_formulas() {
        // b^2 - 4ac and -4p^3 - 27q^2 on a grid
        for a in 1..4i64 {
            for b in -4..5i64 {
                for c in -4..5i64 {
                    let d = discriminant(&[c.into(), b.into(), a.into()]).unwrap();
                    assert_eq!(d, BigInt::from(b * b - 4 * a * c));
                }
            }
        }
        for pp in -5..6i64 {
            for qq in -5..6i64 {
                let d = discriminant(&[qq.into(), pp.into(), 0.into(), 1.into()]).unwrap();
                assert_eq!(d, BigInt::from(-4 * pp * pp * pp - 27 * qq * qq));
            }
        }
    }

    #[test]
    fn admissible_examples() {
        let phi = p(&[-1, 1]);
        let adm = phi.admissible_primes(20).unwrap();
        assert_eq!(adm.primes, vec![3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(adm.theoretical_c, BigUint::from(256u32));
        assert_eq!(p(&[1, 0, 1]).admissible_primes(10).unwrap().primes, vec![3, 5, 7]);
        for l in p(&[3, -1, 0, 2]).admissible_primes(2000).unwrap().primes {
            assert!(!(p(&[3, -1, 0, 2]).delta().unwrap() % BigInt::from(l)).is_zero());
        }
    }

    #[test]
    fn integer_valued_polynomials() {
        let tri: IntPoly = "[0,1,1]/2".parse().unwrap();
        for v in 0..50u64 {
            assert_eq!(tri.eval_mod(v, 7), (v * (v + 1) / 2) % 7);
        }
        assert!("[0,-1,0,1]/6".parse::<IntPoly>().is_ok());
        assert!("[0,1,2]/2".parse::<IntPoly>().is_err());
        assert!("[1,1,1]/2".parse::<IntPoly>().is_err());
        // admissible primes must exceed Q
        let q5: IntPoly = "[0,5,-5]/5".parse().unwrap();
        assert!(!q5.is_admissible(3));
    }

    #[test]
    fn parse_forms() {
        assert_eq!("phi".parse::<IntPoly>().unwrap(), p(&[-1, 1]));
        assert_eq!("sigma".parse::<IntPoly>().unwrap(), p(&[1, 1]));
        assert_eq!("[-1, 1]".parse::<IntPoly>().unwrap(), p(&[-1, 1]));
        assert_eq!("1,0,1".parse::<IntPoly>().unwrap(), p(&[1, 0, 1]));
        assert_eq!("counterexample-i D=3".parse::<IntPoly>().unwrap(), Preset::CounterexampleI(3).poly());
        assert!("counterexample-ii".parse::<IntPoly>().is_err());
        assert!("[1, x]".parse::<IntPoly>().is_err());
        assert_eq!(p(&[1, 0, -3, 2]).to_string(), "2T^3 - 3T^2 + 1");
    }

    fn poly_strategy() -> impl Strategy<Value = IntPoly> {
        (1usize..=5).prop_flat_map(|d| {
            (prop::collection::vec(-9i64..=9, d), prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]))
                .prop_map(|(mut c, lead)| {
                    c.push(lead);
                    IntPoly::new(c).unwrap()
                })
        })
    }

    /// gcd(G, G') over Q by the Euclidean algorithm on rationals.
    fn has_repeated_root(g: &[i64]) -> bool {
        use num_rational::BigRational;
        type Q = BigRational;
        let trim = |mut v: Vec<Q>| {
            while v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            v
        };
        let a: Vec<Q> = g.iter().map(|&c| Q::from_integer(c.into())).collect();
        let b: Vec<Q> = a.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer(k.into())).collect();
        let (mut a, mut b) = (trim(a), trim(b));
        while !b.is_empty() {
            let mut r = a.clone();
            while r.len() >= b.len() && !r.is_empty() {
                let shift = r.len() - b.len();
                let f = r.last().unwrap() / b.last().unwrap();
                for (i, c) in b.iter().enumerate() {
                    r[shift + i] = &r[shift + i] - &f * c;
                }
                r = trim(r);
            }
            a = b;
            b = r;
        }
        a.len() > 1
    }

    proptest! {
        #[test]
        fn crt_compatible_eval(f in poly_strategy(), v in any::<u32>(), m1 in 1u64..500, m2 in 1u64..500) {
            prop_assume!(crate::number::gcd(m1, m2) == 1);
            let full = f.eval_mod(v as u64, m1 * m2);
            prop_assert_eq!(full % m1, f.eval_mod(v as u64, m1));
            prop_assert_eq!(full % m2, f.eval_mod(v as u64, m2));
        }

        #[test]
        fn delta_zero_iff_repeated_root(f in poly_strategy()) {
            let mut g = f.coeffs().to_vec();
            if f.constant() != 0 {
                g.insert(0, 0);
            }
            prop_assert_eq!(f.delta().unwrap().is_zero(), has_repeated_root(&g));
        }
    }
}
