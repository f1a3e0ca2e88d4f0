use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::group::{FinAbGroup, GroupMap, Lattice, Presentation, Subquotient};
use super::matrix::IntMatrix;
use crate::{Error, Result};

/// Cochain complex of free abelian groups `C^0 -> C^1 -> ... -> C^L`.
///
/// `diffs[k]` is the matrix of `d^k : C^k -> C^{k+1}` (rows index `C^{k+1}`).
#[derive(Clone, Debug)]
pub struct FreeComplex {
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
}

impl FreeComplex {
    pub fn new(ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if ranks.is_empty() || diffs.len() + 1 != ranks.len() {
            return Err(Error::Dimension(
                "a complex needs one differential between consecutive terms".into(),
            ));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.shape() != (ranks[k + 1], ranks[k]) {
                return Err(Error::Dimension(format!("differential {k} has shape {:?}", d.shape())));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(Error::NotAComplex(k - 1));
            }
        }
        Ok(FreeComplex { ranks, diffs })
    }

    /// Top index `L`.
    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    pub fn diff(&self, k: usize) -> &IntMatrix {
        &self.diffs[k]
    }

    pub fn diffs(&self) -> &[IntMatrix] {
        &self.diffs
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// `Hom(C, Z)` reindexed as a cochain complex: term `t` is `C^{L-t}`, maps are transposes.
    pub fn dual(&self) -> FreeComplex {
        let l = self.top();
        let ranks = (0..=l).map(|t| self.ranks[l - t]).collect();
        let diffs = (0..l).map(|t| self.diffs[l - t - 1].transpose()).collect();
        FreeComplex { ranks, diffs }
    }

    pub(crate) fn as_group_complex(&self) -> GroupComplex {
        GroupComplex {
            terms: self.ranks.iter().map(|&r| Presentation::free(r)).collect(),
            maps: self.diffs.clone(),
        }
    }

    /// Mapping cone of multiplication by `c` (as a map `C -> C`).
    pub fn cone_of_scalar(&self, c: &BigInt) -> FreeComplex {
        let g = self.as_group_complex().cone_of_scalar(c);
        FreeComplex {
            ranks: g.terms.iter().map(|t| t.ngens).collect(),
            diffs: g.maps,
        }
    }
}

/// Cochain map between complexes, one matrix per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub maps: Vec<IntMatrix>,
}

impl ChainMap {
    /// Checks shapes and `d' f = f d` against both complexes.
    pub fn check(&self, source: &FreeComplex, target: &FreeComplex) -> Result<()> {
        if source.top() != target.top() || self.maps.len() != source.ranks.len() {
            return Err(Error::Dimension("chain map length mismatch".into()));
        }
        for (k, f) in self.maps.iter().enumerate() {
            if f.shape() != (target.rank(k), source.rank(k)) {
                return Err(Error::Dimension(format!(
                    "chain map component {k} has shape {:?}",
                    f.shape()
                )));
            }
        }
        for k in 0..source.top() {
            if target.diff(k).mul(&self.maps[k]) != self.maps[k + 1].mul(source.diff(k)) {
                return Err(Error::NotAChainMap(k));
            }
        }
        Ok(())
    }

    pub fn compose(&self, inner: &ChainMap) -> ChainMap {
        ChainMap {
            maps: self.maps.iter().zip(&inner.maps).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    /// Transposed chain map between the dual complexes (direction reversed).
    pub fn dual(&self) -> ChainMap {
        ChainMap {
            maps: self.maps.iter().rev().map(IntMatrix::transpose).collect(),
        }
    }
}

/// Cohomology of one degree with the data to express cocycles.
pub struct CohomologyGroup {
    sq: Subquotient,
}

impl CohomologyGroup {
    /// The group, carrying cocycle representatives in `basis_lift`.
    pub fn group(&self) -> &FinAbGroup {
        &self.sq.group
    }

    pub fn representatives(&self) -> &IntMatrix {
        self.sq.gens()
    }

    /// Class of a cocycle in generator coordinates.
    pub fn express(&self, cocycle: &[BigInt]) -> Result<Vec<BigInt>> {
        self.sq.express(cocycle).map_err(|e| match e {
            Error::NotInLattice => Error::NotACocycle,
            e => e,
        })
    }
}

/// `H^k(C)` for every `k`, with cocycle lifts.
pub fn complex_cohomology(c: &FreeComplex) -> Result<Vec<CohomologyGroup>> {
    c.as_group_complex().cohomology()
}

/// Cohomology of one degree only.
pub fn complex_cohomology_at(c: &FreeComplex, k: usize) -> Result<CohomologyGroup> {
    c.as_group_complex().cohomology_at(k)
}

/// Maps induced by `f` on cohomology, given both cohomologies.
pub fn induced_maps(f: &ChainMap, src: &[CohomologyGroup], tgt: &[CohomologyGroup]) -> Result<Vec<GroupMap>> {
    src.iter()
        .zip(tgt)
        .zip(&f.maps)
        .map(|((s, t), m)| induced_map(m, s, t))
        .collect()
}

pub(crate) fn induced_map(f: &IntMatrix, src: &CohomologyGroup, tgt: &CohomologyGroup) -> Result<GroupMap> {
    let reps = src.representatives();
    let mut cols = Vec::with_capacity(reps.cols());
    for j in 0..reps.cols() {
        let image = f.mul_vec(&reps.column(j));
        cols.push(tgt.express(&image)?);
    }
    GroupMap::new(
        src.group(),
        tgt.group(),
        IntMatrix::from_columns(tgt.group().ngens(), &cols),
    )
}

/// Computes both cohomologies and the induced maps.
pub fn induced_on_cohomology(f: &ChainMap, source: &FreeComplex, target: &FreeComplex) -> Result<Vec<GroupMap>> {
    f.check(source, target)?;
    let s = complex_cohomology(source)?;
    let t = complex_cohomology(target)?;
    induced_maps(f, &s, &t)
}

/// Cochain complex of finitely presented abelian groups, maps in generator coordinates.
#[derive(Clone, Debug)]
pub(crate) struct GroupComplex {
    pub terms: Vec<Presentation>,
    pub maps: Vec<IntMatrix>,
}

impl GroupComplex {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn cohomology_at(&self, k: usize) -> Result<CohomologyGroup> {
        let t = &self.terms[k];
        let m = t.ngens;
        let rel = if k == 0 {
            t.rel.clone()
        } else {
            IntMatrix::hstack(m, &[&self.maps[k - 1], &t.rel])
        };
        let sq = if k + 1 < self.terms.len() {
            let a = &self.maps[k];
            let r = &self.terms[k + 1].rel;
            Subquotient::new(Lattice::Kernel { a, r }, &rel)?
        } else {
            Subquotient::new(Lattice::Full(m), &rel)?
        };
        Ok(CohomologyGroup { sq })
    }

    pub fn cohomology(&self) -> Result<Vec<CohomologyGroup>> {
        (0..self.terms.len()).map(|k| self.cohomology_at(k)).collect()
    }

    /// Cone of `c : K -> K`: term `t` is `K^t + K^{t-1}`, `d(a, b) = (da, c a - db)`.
    pub fn cone_of_scalar(&self, c: &BigInt) -> GroupComplex {
        let len = self.terms.len();
        let mut terms = Vec::with_capacity(len + 1);
        for t in 0..=len {
            let a = self.terms.get(t).cloned().unwrap_or_else(|| Presentation::free(0));
            let b = if t == 0 {
                Presentation::free(0)
            } else {
                self.terms[t - 1].clone()
            };
            terms.push(a.direct_sum(&b));
        }
        let mut maps = Vec::with_capacity(len);
        for t in 0..len {
            let (a0, b0) = (self.ngens(t), if t == 0 { 0 } else { self.ngens(t - 1) });
            let (a1, b1) = (self.ngens(t + 1), self.ngens(t));
            let mut m = IntMatrix::zeros(a1 + b1, a0 + b0);
            if t + 1 < len {
                copy_block(&mut m, &self.maps[t], 0, 0, BigInt::one());
            }
            for i in 0..a0 {
                m.set(a1 + i, i, c.clone());
            }
            if t > 0 {
                copy_block(&mut m, &self.maps[t - 1], a1, a0, -BigInt::one());
            }
            maps.push(m);
        }
        GroupComplex { terms, maps }
    }

    fn ngens(&self, t: usize) -> usize {
        self.terms.get(t).map_or(0, |p| p.ngens)
    }

    /// `(id, c)` from the cone of `x` to the cone of `c x`, as matrices per degree.
    pub fn cone_transition(&self, c: &BigInt) -> Vec<IntMatrix> {
        let len = self.terms.len();
        (0..=len)
            .map(|t| {
                let a = self.ngens(t);
                let b = if t == 0 { 0 } else { self.ngens(t - 1) };
                let mut m = IntMatrix::zeros(a + b, a + b);
                for i in 0..a {
                    m.set(i, i, BigInt::one());
                }
                for i in 0..b {
                    m.set(a + i, a + i, c.clone());
                }
                m
            })
            .collect()
    }
}

fn copy_block(dst: &mut IntMatrix, src: &IntMatrix, r0: usize, c0: usize, sign: BigInt) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let x = src.get(i, j);
            if !x.is_zero() {
                dst.set(r0 + i, c0 + j, x * &sign);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn rejects_non_complex() {
        let d0 = m(&[vec![1]]);
        let d1 = m(&[vec![1]]);
        assert!(matches!(
            FreeComplex::new(vec![1, 1, 1], vec![d0, d1]),
            Err(Error::NotAComplex(0))
        ));
    }

    #[test]
    fn multiplication_by_two() {
        let c = FreeComplex::new(vec![1, 1], vec![m(&[vec![2]])]).unwrap();
        let h = complex_cohomology(&c).unwrap();
        assert!(h[0].group().is_zero());
        assert_eq!(h[1].group().to_string(), "Z/2");
        assert_eq!(h[1].express(&[BigInt::from(3)]).unwrap(), vec![BigInt::one()]);
    }

    #[test]
    fn dual_complex_swaps_torsion_degree() {
        let c = FreeComplex::new(vec![1, 1], vec![m(&[vec![2]])]).unwrap();
        let h = complex_cohomology(&c.dual()).unwrap();
        assert_eq!(h[1].group().to_string(), "Z/2");
        assert!(h[0].group().is_zero());
    }

    #[test]
    fn induced_map_of_identity() {
        let c = FreeComplex::new(vec![2, 1], vec![m(&[vec![2, 0]])]).unwrap();
        let f = ChainMap {
            maps: vec![IntMatrix::identity(2), IntMatrix::identity(1)],
        };
        let maps = induced_on_cohomology(&f, &c, &c).unwrap();
        assert!(maps.iter().all(|g| g.matrix().is_identity()));
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let c = FreeComplex::new(vec![1, 1], vec![m(&[vec![1]])]).unwrap();
        let h = complex_cohomology_at(&c, 0).unwrap();
        assert!(matches!(h.express(&[BigInt::one()]), Err(Error::NotACocycle)));
    }

    #[test]
    fn cone_of_two_on_z() {
        let c = FreeComplex::new(vec![1], vec![]).unwrap();
        let cone = c.cone_of_scalar(&BigInt::from(2));
        let h = complex_cohomology(&cone).unwrap();
        assert!(h[0].group().is_zero());
        assert_eq!(h[1].group().to_string(), "Z/2");
    }
}
