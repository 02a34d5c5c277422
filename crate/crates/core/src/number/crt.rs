use super::{gcd, inv_mod};
use crate::{Error, Result};

/// Solves `x ≡ r_i (mod m_i)` for pairwise coprime `m_i`.
///
/// Returns `(x, M)` with `M = ∏ m_i` and `0 ≤ x < M`.
pub fn crt_solve(residues: &[(u64, u64)]) -> Result<(u64, u64)> {
    for (i, &(_, mi)) in residues.iter().enumerate() {
        if mi == 0 {
            return Err(Error::invalid("modulus 0 in CRT system"));
        }
        for &(_, mj) in &residues[i + 1..] {
            if gcd(mi, mj) != 1 {
                return Err(Error::NotCoprime(mi, mj));
            }
        }
    }
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for &(r, m) in residues {
        let m128 = m as u128;
        let next = modulus
            .checked_mul(m128)
            .filter(|&n| n <= u64::MAX as u128)
            .ok_or_else(|| Error::invalid("CRT modulus overflows u64"))?;
        // x + modulus·k ≡ r (mod m)
        let inv = inv_mod((modulus % m128) as u64, m).expect("coprime moduli") as u128;
        let diff = ((r as u128 % m128) + m128 - x % m128) % m128;
        let k = diff * inv % m128;
        x += modulus * k;
        modulus = next;
    }
    Ok((x as u64, modulus as u64))
}
