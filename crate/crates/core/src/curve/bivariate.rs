use crate::algebra::{CycElement, RationalMap};

/// Dense bivariate polynomial over Q(ζ_m); `coeffs[i][j]` multiplies x^i y^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    m: u32,
    coeffs: Vec<Vec<CycElement>>,
}

impl BivariatePoly {
    fn trimmed(m: u32, mut coeffs: Vec<Vec<CycElement>>) -> Self {
        for row in coeffs.iter_mut() {
            while row.last().is_some_and(|c| c.is_zero()) {
                row.pop();
            }
        }
        while coeffs.last().is_some_and(|r| r.is_empty()) {
            coeffs.pop();
        }
        BivariatePoly { m, coeffs }
    }

    /// Builds from (i, j, coefficient) triples; unlisted entries are zero.
    pub fn from_terms(m: u32, terms: &[(usize, usize, CycElement)]) -> Self {
        let rows = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let cols = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut coeffs = vec![vec![CycElement::zero(m); cols]; rows];
        for (i, j, c) in terms {
            coeffs[*i][*j] = &coeffs[*i][*j] + &c.promote(m);
        }
        Self::trimmed(m, coeffs)
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn coeff(&self, i: usize, j: usize) -> CycElement {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(|| CycElement::zero(self.m))
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_y(&self) -> usize {
        self.coeffs.iter().map(|r| r.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Nonzero terms as (i, j, coefficient), ordered by i then j.
    pub fn terms(&self) -> Vec<(usize, usize, CycElement)> {
        let mut out = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }

    /// N(y, x).
    pub fn swap(&self) -> Self {
        let terms: Vec<_> = self.terms().into_iter().map(|(i, j, c)| (j, i, c)).collect();
        Self::from_terms(self.m, &terms)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.swap()
    }
}

/// N(x, y) = (p(x)q(y) − p(y)q(x)) / (x − y) for A = p/q.
///
/// With c_ij = p_i q_j − p_j q_i and i > j, the term c_ij (x^i y^j − x^j y^i)
/// divides exactly as c_ij x^j y^j Σ_k x^k y^{i−j−1−k}.
pub fn curve_polynomial(a: &RationalMap) -> BivariatePoly {
    let m = a.order();
    let (p, q) = (a.num(), a.den());
    let d = a.degree();
    let mut terms = Vec::new();
    for i in 0..=d {
        for j in 0..i {
            let c = &(&p.coeff(i) * &q.coeff(j)) - &(&p.coeff(j) * &q.coeff(i));
            if c.is_zero() {
                continue;
            }
            for k in 0..i - j {
                terms.push((j + k, j + (i - j - 1 - k), c.clone()));
            }
        }
    }
    BivariatePoly::from_terms(m, &terms)
}
