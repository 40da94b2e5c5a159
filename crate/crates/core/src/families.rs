//! Generators for the classical solution families: power maps, Chebyshev
//! polynomials, invariant functions of cyclic and dihedral groups, and Ritt's
//! dihedral identity T_n∘½(z+1/z) = T_n∘½(εz+1/(εz)).

use std::fmt;
use std::str::FromStr;

use crate::algebra::linalg::nullspace;
use crate::algebra::{CycElement, MobiusMap, Polynomial, RationalMap};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Power,
    Chebyshev,
    Zhukovsky,
    DihedralInvariant,
}

impl FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(MapKind::Power),
            "chebyshev" => Ok(MapKind::Chebyshev),
            "zhukovsky" => Ok(MapKind::Zhukovsky),
            "dihedral_invariant" | "dihedral-invariant" => Ok(MapKind::DihedralInvariant),
            _ => Err(Error::Domain(format!("unknown map kind `{s}`"))),
        }
    }
}

/// T_n by the three-term recurrence, normalized by T_n(cos θ) = cos nθ.
pub fn chebyshev_polynomial(n: usize) -> Polynomial {
    let two_z = Polynomial::from_ints(1, &[0, 2]);
    let (mut prev, mut cur) = (Polynomial::one(1), Polynomial::z(1));
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = two_z.mul(&cur).sub(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// ½(z^n + 1/z^n) = (z^{2n} + 1) / (2 z^n)
fn half_sum(n: usize) -> RationalMap {
    let mut num = vec![0i64; 2 * n + 1];
    num[0] = 1;
    num[2 * n] = 1;
    let mut den = vec![0i64; n + 1];
    den[n] = 2;
    RationalMap::new(Polynomial::from_ints(1, &num), Polynomial::from_ints(1, &den))
        .expect("nonzero denominator")
}

pub fn make_map(kind: MapKind, n: usize) -> Result<RationalMap> {
    if n < 1 && kind != MapKind::Zhukovsky {
        return Err(Error::Domain(format!("family parameter must be >= 1, got {n}")));
    }
    Ok(match kind {
        MapKind::Power => RationalMap::monomial(CycElement::one(1), n),
        MapKind::Chebyshev => RationalMap::polynomial(chebyshev_polynomial(n)),
        MapKind::Zhukovsky => half_sum(1),
        MapKind::DihedralInvariant => half_sum(n),
    })
}

/// A finite Möbius group: cyclic C_n of order n, or dihedral D_2n of order
/// 2n generated by z ↦ 1/z and z ↦ ζ_n z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u32),
    Dihedral(u32),
}

impl GroupSpec {
    pub fn order(&self) -> usize {
        match *self {
            GroupSpec::Cyclic(n) => n as usize,
            GroupSpec::Dihedral(n) => 2 * n as usize,
        }
    }

    fn param(&self) -> u32 {
        match *self {
            GroupSpec::Cyclic(n) | GroupSpec::Dihedral(n) => n,
        }
    }

    fn check(&self) -> Result<()> {
        if self.param() < 1 {
            return Err(Error::Domain(format!("{self} needs n >= 1")));
        }
        Ok(())
    }

    pub fn generators(&self) -> Vec<MobiusMap> {
        let n = self.param();
        let rotation = MobiusMap::new(RationalMap::monomial(CycElement::zeta(n), 1))
            .expect("degree one");
        let flip = MobiusMap::new(
            RationalMap::new(Polynomial::one(1), Polynomial::z(1)).expect("nonzero"),
        )
        .expect("degree one");
        match self {
            GroupSpec::Cyclic(_) => vec![rotation],
            GroupSpec::Dihedral(_) => vec![flip, rotation],
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "C{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D{}", 2 * n),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `C<n>` for the cyclic group of order n, `D<2n>` for the dihedral group
    /// of order 2n.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse group `{s}` (expected C<n> or D<2n>)"));
        let (kind, num) = s.split_at(1.min(s.len()));
        let v: u32 = num.parse().map_err(|_| bad())?;
        match kind {
            "C" | "c" if v >= 1 => Ok(GroupSpec::Cyclic(v)),
            "D" | "d" if v >= 2 && v % 2 == 0 => Ok(GroupSpec::Dihedral(v / 2)),
            _ => Err(bad()),
        }
    }
}

/// θ_Γ, certified against every generator of Γ.
pub fn invariant_function(g: GroupSpec) -> Result<RationalMap> {
    g.check()?;
    let theta = match g {
        GroupSpec::Cyclic(n) => RationalMap::monomial(CycElement::one(1), n as usize),
        GroupSpec::Dihedral(n) => half_sum(n as usize),
    };
    for sigma in g.generators() {
        if theta.compose(sigma.as_map())? != theta {
            return Err(Error::Certification(format!(
                "invariant function of {g} is not fixed by {sigma}"
            )));
        }
    }
    Ok(theta)
}

fn is_supported(g: GroupSpec, h: GroupSpec) -> bool {
    match (g, h) {
        (GroupSpec::Cyclic(n), GroupSpec::Cyclic(m)) => n % m == 0,
        (GroupSpec::Dihedral(_), GroupSpec::Dihedral(1)) => true,
        (GroupSpec::Dihedral(n), GroupSpec::Cyclic(m)) => n == m,
        _ => false,
    }
}

/// ψ with θ_G = ψ∘θ_H, solved as a linear system in ψ's coefficients.
pub fn invariant_quotient(g: GroupSpec, h: GroupSpec) -> Result<RationalMap> {
    g.check()?;
    h.check()?;
    if !is_supported(g, h) {
        return Err(Error::UnsupportedPair(format!("{h} in {g}")));
    }
    let theta_g = invariant_function(g)?;
    let theta_h = invariant_function(h)?;
    let k = g.order() / h.order();
    let m = theta_g.order();

    // ψ = P/Q, deg ≤ k. With θ_H = r/s and t_i = r^i s^{k-i}:
    // a·Σ q_i t_i − b·Σ p_i t_i = 0 where θ_G = a/b.
    let (a, b) = (theta_g.num(), theta_g.den());
    let (r, s) = (theta_h.num(), theta_h.den());
    let t: Vec<Polynomial> = (0..=k).map(|i| r.pow(i).mul(&s.pow(k - i))).collect();
    let mut cols: Vec<Polynomial> = t.iter().map(|ti| b.mul(ti).neg()).collect();
    cols.extend(t.iter().map(|ti| a.mul(ti)));
    let nrows = cols.iter().map(|c| c.coeffs().len()).max().unwrap_or(0);
    let rows: Vec<Vec<CycElement>> = (0..nrows)
        .map(|row| cols.iter().map(|c| c.coeff(row).promote(m)).collect())
        .collect();
    let kernel = nullspace(rows, 2 * (k + 1), m);
    if kernel.len() != 1 {
        return Err(Error::SingularSystem(format!(
            "ψ for {h} in {g} has a {}-dimensional solution space",
            kernel.len()
        )));
    }
    let v = &kernel[0];
    let p = Polynomial::from_coeffs(m, v[..=k].to_vec());
    let q = Polynomial::from_coeffs(m, v[k + 1..].to_vec());
    let psi = RationalMap::new(p, q)?;
    if psi.degree() != k || psi.compose(&theta_h)? != theta_g {
        return Err(Error::Certification(format!("quotient map for {h} in {g}")));
    }
    Ok(psi)
}

/// Ritt's triple (T_n, ½(z+1/z), ½(εz+1/(εz))) over Q(ζ_n), ε = ζ_n.
#[derive(Clone, Debug)]
pub struct RittPair {
    pub n: usize,
    pub a: RationalMap,
    pub x: RationalMap,
    pub y: RationalMap,
}

pub fn ritt_pair(n: usize) -> Result<RittPair> {
    ritt_pair_with(n, &|k| RationalMap::polynomial(chebyshev_polynomial(k)))
}

/// As [`ritt_pair`], with the Chebyshev generator supplied by the caller.
pub fn ritt_pair_with(n: usize, chebyshev: &dyn Fn(usize) -> RationalMap) -> Result<RittPair> {
    if n < 2 {
        return Err(Error::Domain(format!("Ritt pair needs n >= 2, got {n}")));
    }
    let m = n as u32;
    let eps = CycElement::zeta(m);
    let eps_inv = CycElement::zeta_pow(m, -1);
    let half = rug::Rational::from((1, 2));
    let y_num = Polynomial::from_coeffs(
        m,
        vec![eps_inv.scale(&half), CycElement::zero(m), eps.scale(&half)],
    );
    let y = RationalMap::new(y_num, Polynomial::z(m))?;
    Ok(RittPair {
        n,
        a: chebyshev(n).promote(m),
        x: half_sum(1).promote(m),
        y,
    })
}
