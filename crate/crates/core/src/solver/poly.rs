//! Symbolic polynomials over search parameters, used to compile orientation
//! conditions into inequalities `P ≥ margin` whose common terms cancel.

use std::collections::BTreeMap;
use std::collections::btree_map::Entry;

/// Sorted parameter indices; repeated indices are powers.
pub(crate) type Mono = Vec<usize>;

/// Polynomials larger than this are not compiled; the exact check still runs.
pub(crate) const MAX_TERMS: usize = 4096;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Poly(BTreeMap<Mono, i128>);

impl Poly {
    pub(crate) fn constant(c: i128) -> Poly {
        let mut p = Poly::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub(crate) fn var(v: usize) -> Poly {
        let mut p = Poly::default();
        p.add_term(vec![v], 1);
        p
    }

    fn add_term(&mut self, m: Mono, c: i128) {
        if c == 0 {
            return;
        }
        match self.0.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.0.len()
    }

    pub(crate) fn add(&self, other: &Poly, sign: i128) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), sign * c);
        }
        out
    }

    /// `None` once the product grows past [`MAX_TERMS`].
    pub(crate) fn mul(&self, other: &Poly) -> Option<Poly> {
        let mut out = Poly::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                let mut m: Mono = a.iter().chain(b).copied().collect();
                m.sort_unstable();
                out.add_term(m, ca.checked_mul(*cb)?);
            }
            if out.len() > MAX_TERMS {
                return None;
            }
        }
        Some(out)
    }
}

/// Square matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PolyMatrix {
    pub(crate) dim: usize,
    pub(crate) data: Vec<Poly>,
}

impl PolyMatrix {
    pub(crate) fn zero(dim: usize) -> Self {
        PolyMatrix {
            dim,
            data: vec![Poly::default(); dim * dim],
        }
    }

    pub(crate) fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Poly::constant(1);
        }
        m
    }

    pub(crate) fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add(b, 1))
                .collect(),
        }
    }

    pub(crate) fn mul(&self, other: &PolyMatrix) -> Option<PolyMatrix> {
        let d = self.dim;
        let mut out = Self::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Poly::default();
                for k in 0..d {
                    acc = acc.add(&self.data[i * d + k].mul(&other.data[k * d + j])?, 1);
                }
                out.data[i * d + j] = acc;
            }
        }
        Some(out)
    }

    pub(crate) fn apply(&self, v: &[Poly]) -> Option<Vec<Poly>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d).try_fold(Poly::default(), |acc, k| {
                    Some(acc.add(&self.data[i * d + k].mul(&v[k])?, 1))
                })
            })
            .collect()
    }
}

/// `Σ terms ≥ margin` over nonnegative parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Ineq {
    terms: Vec<(i128, Mono)>,
    margin: i128,
}

impl Ineq {
    /// `diff ≥ margin`, or `None` when it holds for every nonnegative assignment.
    pub(crate) fn at_least(diff: &Poly, margin: i128) -> Option<Ineq> {
        let terms: Vec<(i128, Mono)> = diff.0.iter().map(|(m, c)| (*c, m.clone())).collect();
        let constant = diff.0.get(&Vec::new()).copied().unwrap_or(0);
        if terms.iter().all(|(c, _)| *c > 0) && constant >= margin {
            return None;
        }
        Some(Ineq { terms, margin })
    }

    pub(crate) fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|(_, m)| m.iter().copied())
    }

    /// Whether some assignment within `[lo, hi]` may satisfy the inequality;
    /// exact when `lo == hi`.
    ///
    /// Parameters with `lo == hi` are substituted first and the remaining
    /// monomials merged, so terms such as `a·x - x` cancel once `a = 1`.
    /// Each merged monomial is then bounded from above independently.
    pub(crate) fn feasible(&self, lo: &[u64], hi: &[u64]) -> bool {
        let mut residual: Vec<(i128, Mono)> = Vec::with_capacity(self.terms.len());
        for (c, m) in &self.terms {
            let mut coeff = *c;
            let mut rest = Mono::new();
            for &v in m {
                if lo[v] == hi[v] {
                    coeff = coeff.saturating_mul(i128::from(lo[v]));
                } else {
                    rest.push(v);
                }
            }
            if coeff == 0 {
                continue;
            }
            match residual.iter_mut().find(|(_, r)| *r == rest) {
                Some((acc, _)) => *acc = acc.saturating_add(coeff),
                None => residual.push((coeff, rest)),
            }
        }
        let upper = residual.iter().fold(0i128, |acc, (c, m)| {
            let at = if *c > 0 { hi } else { lo };
            acc.saturating_add(
                m.iter()
                    .fold(*c, |p, v| p.saturating_mul(i128::from(at[*v]))),
            )
        });
        upper >= self.margin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_terms_cancel() {
        // (a + b·c) - (c + a) = b·c - c
        let (a, b, c) = (Poly::var(0), Poly::var(1), Poly::var(2));
        let l = a.add(&b.mul(&c).unwrap(), 1);
        let r = c.add(&a, 1);
        let d = l.add(&r, -1);
        assert_eq!(d.len(), 2);
        let ineq = Ineq::at_least(&d, 1).unwrap();
        // b = 1 makes it impossible whatever c is.
        assert!(!ineq.feasible(&[0, 1, 0], &[9, 1, 9]));
        assert!(ineq.feasible(&[0, 1, 0], &[9, 2, 9]));
        assert!(ineq.feasible(&[0, 2, 0], &[9, 2, 9]));
        assert!(!ineq.feasible(&[0, 2, 0], &[9, 2, 0]));
    }

    #[test]
    fn trivially_true_inequalities_vanish() {
        let p = Poly::var(0)
            .mul(&Poly::var(1))
            .unwrap()
            .add(&Poly::constant(2), 1);
        assert_eq!(Ineq::at_least(&p, 2), None);
        assert!(Ineq::at_least(&p, 3).is_some());
        assert!(Ineq::at_least(&Poly::default(), 1).is_some_and(|i| !i.feasible(&[], &[])));
    }

    #[test]
    fn matrix_products_match_numbers() {
        // [[v0, v1], [0, 1]] squared at v0 = 2, v1 = 3 is [[4, 9], [0, 1]].
        let mut m = PolyMatrix::identity(2);
        m.data[0] = Poly::var(0);
        m.data[1] = Poly::var(1);
        let sq = m.mul(&m).unwrap();
        let vals = [2, 3];
        let expect = [4u64, 9, 0, 1];
        for (p, e) in sq.data.iter().zip(expect) {
            let ineq = Ineq::at_least(&p.add(&Poly::constant(e as i128), -1), 0);
            assert!(ineq.is_none_or(|i| i.feasible(&vals, &vals)));
            let ineq = Ineq::at_least(&Poly::constant(e as i128).add(p, -1), 0);
            assert!(ineq.is_none_or(|i| i.feasible(&vals, &vals)));
        }
    }
}
