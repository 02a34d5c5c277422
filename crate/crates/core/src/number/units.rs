use super::{factor, is_prime, mul_mod, pow_mod};
use crate::{Error, Result};

pub const DEFAULT_UNIT_GUARD: u64 = 10_000_000;

const NOT_A_UNIT: u32 = u32::MAX;

/// The cyclic group `(Z/ℓ^e)^*` for odd `ℓ`, with a fixed generator and a
/// complete discrete-log table.
#[derive(Clone, Debug)]
pub struct UnitGroupView {
    pub ell: u64,
    pub e: u32,
    pub modulus: u64,
    pub generator: u64,
    pub order: u64,
    log: Vec<u32>,
    powers: Vec<u64>,
}

impl UnitGroupView {
    /// Exponent `r ∈ [0, φ)` with `g^r ≡ u`, or `None` when `u` is not a unit.
    pub fn log(&self, u: u64) -> Option<u64> {
        match self.log[(u % self.modulus) as usize] {
            NOT_A_UNIT => None,
            r => Some(r as u64),
        }
    }

    /// `g^k mod ℓ^e`.
    pub fn pow(&self, k: u64) -> u64 {
        self.powers[(k % self.order) as usize]
    }

    /// Units in generator order: `g^0, g^1, …`.
    pub fn powers(&self) -> &[u64] {
        &self.powers
    }
}

/// Builds the unit group of `ℓ^e`, choosing the smallest generator.
pub fn unit_group(ell: u64, e: u32, guard: u64) -> Result<UnitGroupView> {
    if ell == 2 {
        return Err(Error::invalid("unit group of 2^e is not cyclic; only odd ℓ supported"));
    }
    if e == 0 || !is_prime(ell) {
        return Err(Error::invalid(format!("{ell}^{e} is not an odd prime power")));
    }
    let modulus = ell
        .checked_pow(e)
        .ok_or_else(|| Error::invalid("ℓ^e overflows u64"))?;
    let order = modulus / ell * (ell - 1);
    if order > guard || order >= NOT_A_UNIT as u64 {
        return Err(Error::guard("φ(ℓ^e)", order, guard));
    }
    let order_primes: Vec<u64> = factor(order)?.primes().collect();
    let generator = (2..modulus)
        .find(|&g| {
            g % ell != 0
                && pow_mod(g, order, modulus) == 1
                && order_primes.iter().all(|&p| pow_mod(g, order / p, modulus) != 1)
        })
        .ok_or_else(|| Error::Consistency(format!("no generator found mod {modulus}")))?;

    let mut log = vec![NOT_A_UNIT; modulus as usize];
    let mut powers = Vec::with_capacity(order as usize);
    let mut u = 1u64;
    for k in 0..order {
        log[u as usize] = k as u32;
        powers.push(u);
        u = mul_mod(u, generator, modulus);
    }
    if u != 1 {
        return Err(Error::Consistency(format!("generator {generator} mod {modulus} has wrong order")));
    }
    Ok(UnitGroupView { ell, e, modulus, generator, order, log, powers })
}
