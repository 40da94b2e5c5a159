//! The curve A(x) = A(y) off the diagonal, its components and genera, and the
//! genus of the Galois closure of A.

mod bivariate;
mod monodromy;
pub mod perm;

use serde::Serialize;

pub use bivariate::{curve_polynomial, BivariatePoly};
pub use monodromy::{monodromy, MonodromyData};
pub use perm::Perm;

use crate::algebra::RationalMap;
use crate::error::{Error, Result};

/// Default cap on the size of the monodromy group.
pub const DEFAULT_GROUP_BOUND: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Points of this component over a generic x.
    pub orbit_size: usize,
    pub genus: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveReport {
    pub degree: usize,
    /// Points of C_A over a generic x, that is d − 1.
    pub fiber_size: usize,
    pub components: Vec<Component>,
}

impl CurveReport {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

/// Genus from Riemann–Hurwitz: 2g − 2 = −2n + Σ ramification.
fn genus_from(n: usize, ramification: usize) -> Result<usize> {
    let twice = ramification as i64 - 2 * n as i64 + 2;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Certification(format!(
            "Riemann–Hurwitz gives 2g = {twice} for a cover of degree {n}"
        )));
    }
    Ok((twice / 2) as usize)
}

/// The action of σ on ordered pairs (i, j), indexed i·d + j.
fn pair_action(sigma: &Perm) -> Perm {
    let d = sigma.len();
    let mut images = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            images.push((sigma.apply(i) * d + sigma.apply(j)) as u32);
        }
    }
    Perm(images)
}

/// Components of C_A as orbits of the monodromy group on ordered pairs of
/// distinct fiber points; each is a cover of the w-line whose local
/// monodromy is the restricted pair action.
pub fn components_from(data: &MonodromyData) -> Result<CurveReport> {
    let d = data.fiber_size;
    let actions: Vec<Perm> = data.permutations.iter().map(pair_action).collect();
    let mut components = Vec::new();
    for orbit in perm::orbits(d * d, &actions) {
        if orbit[0] / d == orbit[0] % d {
            continue;
        }
        let mut ramification = 0;
        for s in &actions {
            let mut seen = vec![false; d * d];
            let mut cycles = 0;
            for &k in &orbit {
                if seen[k] {
                    continue;
                }
                cycles += 1;
                let mut i = k;
                while !seen[i] {
                    seen[i] = true;
                    i = s.apply(i);
                }
            }
            ramification += orbit.len() - cycles;
        }
        components.push(Component {
            orbit_size: orbit.len() / d,
            genus: genus_from(orbit.len(), ramification)?,
        });
    }
    let report = CurveReport {
        degree: d,
        fiber_size: d - 1,
        components,
    };
    let total: usize = report.components.iter().map(|c| c.orbit_size).sum();
    if total != report.fiber_size {
        return Err(Error::Certification(format!(
            "orbit sizes sum to {total}, expected {}",
            report.fiber_size
        )));
    }
    Ok(report)
}

pub fn curve_components(a: &RationalMap, prec: u32, seed: u64) -> Result<CurveReport> {
    components_from(&monodromy(a, prec, seed)?)
}

/// Genus of the Galois closure from the regular action of the monodromy group.
pub fn galois_genus_from(data: &MonodromyData, bound: usize) -> Result<usize> {
    let order = perm::group_order(&data.permutations, bound)?;
    let ramification: usize = data.permutations.iter().map(|s| order - order / s.order()).sum();
    genus_from(order, ramification)
}

pub fn galois_closure_genus(a: &RationalMap, prec: u32, seed: u64) -> Result<usize> {
    galois_closure_genus_bounded(a, prec, seed, DEFAULT_GROUP_BOUND)
}

pub fn galois_closure_genus_bounded(a: &RationalMap, prec: u32, seed: u64, bound: usize) -> Result<usize> {
    galois_genus_from(&monodromy(a, prec, seed)?, bound)
}
