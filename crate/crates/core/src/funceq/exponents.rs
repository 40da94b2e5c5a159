use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Writes d = ρ^k with k maximal, returning (ρ, k).
pub fn primitive_root(d: u64) -> (u64, u32) {
    let f = factorize(d);
    let k = f.iter().fold(0u64, |g, &(_, e)| gcd(g, e as u64)) as u32;
    let rho = f.iter().map(|&(p, e)| p.pow(e / k)).product();
    (rho, k)
}

/// Minimal exponents lᵢ with d₁^{l₁} = … = dₙ^{lₙ}, or `None` when the dᵢ
/// are not all powers of one base.
pub fn common_power_exponents(degrees: &[u64]) -> Result<Option<Vec<u128>>> {
    if degrees.is_empty() {
        return Err(Error::Domain("no degrees given".into()));
    }
    if let Some(d) = degrees.iter().find(|&&d| d < 2) {
        return Err(Error::Domain(format!("degree {d} is below 2")));
    }
    let roots: Vec<(u64, u32)> = degrees.iter().map(|&d| primitive_root(d)).collect();
    let r = roots[0].0;
    if roots.iter().any(|&(rho, _)| rho != r) {
        return Ok(None);
    }
    let l = roots
        .iter()
        .fold(1u128, |acc, &(_, k)| acc / gcd_u128(acc, k as u128) * k as u128);
    Ok(Some(roots.iter().map(|&(_, k)| l / k as u128).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(64), (2, 6));
        assert_eq!(primitive_root(36), (6, 2));
        assert_eq!(primitive_root(12), (12, 1));
        assert_eq!(primitive_root(31), (31, 1));
    }
}
