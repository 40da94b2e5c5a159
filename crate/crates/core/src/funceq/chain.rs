use serde::Serialize;

use crate::algebra::RationalMap;
use crate::error::{Error, Result};

/// Checks A∘X₁ = A∘X₂ = … = A∘Xₙ exactly.
pub fn verify_equal_chain(a: &RationalMap, xs: &[RationalMap]) -> Result<bool> {
    let Some((first, rest)) = xs.split_first() else {
        return Err(Error::Precondition("a chain needs at least one member".into()));
    };
    let target = a.compose(first)?;
    for x in rest {
        if a.compose(x)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A verified chain A∘X₁ = … = A∘Xₙ with pairwise distinct members.
#[derive(Clone, Debug)]
pub struct EqualChain {
    a: RationalMap,
    members: Vec<RationalMap>,
}

impl EqualChain {
    pub fn new(a: RationalMap, members: Vec<RationalMap>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Precondition("a chain needs at least two members".into()));
        }
        for (i, x) in members.iter().enumerate() {
            if members[..i].contains(x) {
                return Err(Error::Precondition(format!("chain member {} is repeated", i + 1)));
            }
        }
        if !verify_equal_chain(&a, &members)? {
            return Err(Error::Precondition("A∘Xᵢ are not all equal".into()));
        }
        // distinct Xᵢ take distinct values at a generic point, all in one fiber of A
        if members.len() > a.degree() {
            return Err(Error::Certification(format!(
                "{} distinct members exceed deg A = {}",
                members.len(),
                a.degree()
            )));
        }
        Ok(EqualChain { a, members })
    }

    pub fn a(&self) -> &RationalMap {
        &self.a
    }

    pub fn members(&self) -> &[RationalMap] {
        &self.members
    }
}

/// Outcome of checking Fᵢ∘Fⱼ = Fᵢ∘Fᵢ for all i ≠ j.
#[derive(Clone, Debug, Serialize)]
pub struct MmeSystemReport {
    #[serde(skip)]
    pub maps: Vec<RationalMap>,
    pub pass: bool,
    /// First failing ordered pair, 1-based.
    pub failing_pair: Option<(usize, usize)>,
}

pub fn verify_mme_system(fs: &[RationalMap]) -> Result<MmeSystemReport> {
    if fs.len() < 2 {
        return Err(Error::Precondition("a system needs at least two maps".into()));
    }
    if let Some(i) = fs.iter().position(|f| f.degree() < 1) {
        return Err(Error::Precondition(format!("map {} is constant", i + 1)));
    }
    let mut failing_pair = None;
    'outer: for (i, fi) in fs.iter().enumerate() {
        let diag = fi.compose(fi)?;
        for (j, fj) in fs.iter().enumerate() {
            if i != j && fi.compose(fj)? != diag {
                failing_pair = Some((i + 1, j + 1));
                break 'outer;
            }
        }
    }
    Ok(MmeSystemReport {
        maps: fs.to_vec(),
        pass: failing_pair.is_none(),
        failing_pair,
    })
}

/// Fᵢ = Xᵢ∘A for a verified chain; the resulting system is re-checked.
pub fn build_from_decomposition(a: &RationalMap, xs: &[RationalMap]) -> Result<Vec<RationalMap>> {
    if !verify_equal_chain(a, xs)? {
        return Err(Error::Precondition("A∘Xᵢ are not all equal".into()));
    }
    let fs = xs.iter().map(|x| x.compose(a)).collect::<Result<Vec<_>>>()?;
    if fs.len() >= 2 && fs.iter().all(|f| f.degree() >= 1) {
        let report = verify_mme_system(&fs)?;
        if !report.pass {
            return Err(Error::Certification(format!(
                "constructed maps fail the system at pair {:?}",
                report.failing_pair
            )));
        }
    }
    Ok(fs)
}

/// Checks A^{∘l}∘A^{∘l} = A^{∘l}∘B^{∘l} for l = 1..=lmax, given A∘A = A∘B.
///
/// A∘A^{∘l} = A∘B^{∘l} implies the identity after composing with A^{∘(l-1)}
/// on the left, so that degree-d^{l+1} check is tried first and the full
/// identity is only expanded when it fails.
pub fn iterate_equalization(a: &RationalMap, b: &RationalMap, lmax: usize) -> Result<bool> {
    if lmax < 1 {
        return Err(Error::Domain("lmax must be >= 1".into()));
    }
    if a.compose(a)? != a.compose(b)? {
        return Err(Error::Precondition("A∘A differs from A∘B".into()));
    }
    let (mut al, mut bl) = (a.clone(), b.clone());
    for l in 1..=lmax {
        if l > 1 {
            al = a.compose(&al)?;
            bl = b.compose(&bl)?;
        }
        if a.compose(&al)? == a.compose(&bl)? {
            continue;
        }
        let outer = a.iterate(l)?;
        if outer.compose(&al)? != outer.compose(&bl)? {
            return Ok(false);
        }
    }
    Ok(true)
}
