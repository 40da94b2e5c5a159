use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A permutation of {0, …, n−1}; `self.0[i]` is the image of i.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i as usize >= n || std::mem::replace(&mut seen[i as usize], true) {
                return Err(Error::Domain(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Cycle lengths, including fixed points, in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_type().len()
    }

    pub fn order(&self) -> usize {
        self.cycle_type().into_iter().fold(1, |acc, c| acc / gcd(acc, c) * c)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                seen[start] = true;
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
                first = false;
                i = self.0[i] as usize;
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Orbits of the group generated by `gens` on {0, …, n−1}.
pub fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let i = orbit[k];
            for g in gens {
                let j = g.apply(i);
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Order of the group generated by `gens`, by breadth-first closure.
pub fn group_order(gens: &[Perm], bound: usize) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Ok(1);
    };
    let id = Perm::identity(first.len());
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.then(s);
            if seen.insert(h.clone()) {
                if seen.len() > bound {
                    return Err(Error::GroupTooLarge { bound });
                }
                queue.push_back(h);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_orders() {
        let t = Perm(vec![1, 0, 2, 3]);
        let c = Perm(vec![1, 2, 3, 0]);
        assert_eq!(group_order(&[t.clone(), c.clone()], 100).unwrap(), 24);
        assert_eq!(group_order(&[c.clone()], 100).unwrap(), 4);
        assert!(matches!(group_order(&[t, c], 10), Err(Error::GroupTooLarge { bound: 10 })));
    }

    #[test]
    fn cycles_and_orders() {
        let p = Perm(vec![1, 2, 0, 4, 3, 5]);
        assert_eq!(p.cycle_type(), vec![3, 2, 1]);
        assert_eq!(p.order(), 6);
        assert!(p.then(&p.inverse()).is_identity());
        assert_eq!(format!("{p:?}"), "(0 1 2)(3 4)");
    }
}
