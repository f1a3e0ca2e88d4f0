use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::matrix::IntMatrix;
use super::snf::{snf_parts, Track};
use crate::{Error, Result};

/// Finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_k` with `1 < d_1 | d_2 | ... | d_k`.
///
/// Generators are ordered free part first, then torsion. `basis_lift`, when present,
/// holds one column per generator in some ambient lattice (cocycle representatives).
#[derive(Clone)]
pub struct FinAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
    basis_lift: Option<IntMatrix>,
}

impl FinAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        if torsion.iter().any(|d| d <= &BigInt::one()) {
            return Err(Error::Malformed("torsion orders must exceed 1".into()));
        }
        if torsion.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(Error::Malformed("torsion orders must form a divisibility chain".into()));
        }
        Ok(FinAbGroup {
            free_rank,
            torsion,
            basis_lift: None,
        })
    }

    pub fn zero() -> Self {
        FinAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
            basis_lift: None,
        }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
            basis_lift: None,
        }
    }

    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        let d = order.into();
        if d.is_zero() {
            Self::free(1)
        } else if d.magnitude().is_one() {
            Self::zero()
        } else {
            FinAbGroup {
                free_rank: 0,
                torsion: vec![d.abs()],
                basis_lift: None,
            }
        }
    }

    /// `(Z/p)^dim`.
    pub fn elementary(p: u64, dim: usize) -> Self {
        FinAbGroup {
            free_rank: 0,
            torsion: vec![BigInt::from(p); dim],
            basis_lift: None,
        }
    }

    /// Canonical form of `Z^free + sum Z/orders[i]`, orders arbitrary (0 means Z).
    pub fn from_orders(free: usize, orders: &[BigInt]) -> Self {
        let mut extra_free = 0;
        let diag: Vec<BigInt> = orders
            .iter()
            .filter(|d| {
                if d.is_zero() {
                    extra_free += 1;
                }
                !d.is_zero() && !d.magnitude().is_one()
            })
            .map(|d| d.abs())
            .collect();
        let parts = snf_parts(&IntMatrix::diagonal(&diag), Track::default());
        let torsion = parts.diag.into_iter().filter(|d| !d.is_one()).collect();
        FinAbGroup {
            free_rank: free + extra_free,
            torsion,
            basis_lift: None,
        }
    }

    pub fn without_lift(&self) -> Self {
        FinAbGroup {
            free_rank: self.free_rank,
            torsion: self.torsion.clone(),
            basis_lift: None,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn basis_lift(&self) -> Option<&IntMatrix> {
        self.basis_lift.as_ref()
    }

    pub fn ngens(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_zero(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// `None` for a free generator.
    pub fn order_of(&self, gen: usize) -> Option<&BigInt> {
        gen.checked_sub(self.free_rank).map(|k| &self.torsion[k])
    }

    pub fn same_isomorphism_type(&self, other: &FinAbGroup) -> bool {
        self.free_rank == other.free_rank && self.torsion == other.torsion
    }

    /// Number of torsion summands whose order is divisible by `ell`.
    pub fn torsion_count_divisible_by(&self, ell: u64) -> usize {
        let l = BigInt::from(ell);
        self.torsion.iter().filter(|d| (*d % &l).is_zero()).count()
    }

    /// `dim_{F_ell} G[ell]`.
    pub fn ell_torsion_dim(&self, ell: u64) -> usize {
        self.torsion_count_divisible_by(ell)
    }

    pub fn has_torsion_at(&self, ell: u64) -> bool {
        self.torsion_count_divisible_by(ell) > 0
    }

    /// Primes dividing the order of the torsion subgroup.
    pub fn torsion_primes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        if let Some(top) = self.torsion.last() {
            let mut d = top.clone();
            let mut q = BigInt::from(2u32);
            while &q * &q <= d {
                if (&d % &q).is_zero() {
                    out.push(q.to_u64().expect("prime factor fits in u64"));
                    while (&d % &q).is_zero() {
                        d /= &q;
                    }
                }
                q += 1u32;
            }
            if d > BigInt::one() {
                out.push(d.to_u64().expect("prime factor fits in u64"));
            }
        }
        out
    }

    /// Relation matrix (`ngens x #torsion`).
    pub fn relations(&self) -> IntMatrix {
        let mut r = IntMatrix::zeros(self.ngens(), self.torsion.len());
        for (k, d) in self.torsion.iter().enumerate() {
            r.set(self.free_rank + k, k, d.clone());
        }
        r
    }

    pub(crate) fn presentation(&self) -> Presentation {
        Presentation {
            ngens: self.ngens(),
            rel: self.relations(),
        }
    }

    pub fn reduce(&self, v: &mut [BigInt]) {
        for (k, d) in self.torsion.iter().enumerate() {
            let x = &mut v[self.free_rank + k];
            *x = x.mod_floor(d);
        }
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        v.iter().enumerate().all(|(i, x)| match self.order_of(i) {
            None => x.is_zero(),
            Some(d) => (x % d).is_zero(),
        })
    }

    /// Localization at `p`: drops torsion prime to `p` and keeps `p`-parts of the rest.
    /// Returns the localized group and the kept generator indices.
    pub fn localize_at(&self, p: u64) -> (FinAbGroup, Vec<usize>) {
        let pb = BigInt::from(p);
        let mut kept: Vec<usize> = (0..self.free_rank).collect();
        let mut tors = Vec::new();
        for (k, d) in self.torsion.iter().enumerate() {
            let mut part = BigInt::one();
            let mut x = d.clone();
            while (&x % &pb).is_zero() {
                x /= &pb;
                part *= &pb;
            }
            if !part.is_one() {
                kept.push(self.free_rank + k);
                tors.push(part);
            }
        }
        (
            FinAbGroup {
                free_rank: self.free_rank,
                torsion: tors,
                basis_lift: None,
            },
            kept,
        )
    }

    /// Largest `v` with `p^v` dividing some torsion order.
    pub fn max_valuation(&self, p: u64) -> u32 {
        self.torsion.iter().map(|d| valuation(d, p)).max().unwrap_or(0)
    }

    /// Direct sum, canonicalized; returns the group only.
    pub fn direct_sum(&self, other: &FinAbGroup) -> FinAbGroup {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        FinAbGroup::from_orders(self.free_rank + other.free_rank, &orders)
    }
}

pub fn valuation(d: &BigInt, p: u64) -> u32 {
    if d.is_zero() {
        return u32::MAX;
    }
    let pb = BigInt::from(p);
    let mut x = d.abs();
    let mut v = 0;
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

impl PartialEq for FinAbGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_isomorphism_type(other)
    }
}

impl Eq for FinAbGroup {}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("Z/{}", self.torsion[i]));
            } else {
                parts.push(format!("(Z/{})^{}", self.torsion[i], j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Serializable shape of a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupShape {
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl From<&FinAbGroup> for GroupShape {
    fn from(g: &FinAbGroup) -> Self {
        GroupShape {
            free_rank: g.free_rank,
            torsion: g.torsion.iter().map(|d| d.to_string()).collect(),
        }
    }
}

/// `Z^ngens / im(rel)`; not necessarily canonical.
#[derive(Clone, Debug)]
pub(crate) struct Presentation {
    pub ngens: usize,
    pub rel: IntMatrix,
}

impl Presentation {
    pub fn free(n: usize) -> Self {
        Presentation {
            ngens: n,
            rel: IntMatrix::zeros(n, 0),
        }
    }

    pub fn direct_sum(&self, other: &Presentation) -> Presentation {
        let n = self.ngens + other.ngens;
        let q = self.rel.cols() + other.rel.cols();
        let mut rel = IntMatrix::zeros(n, q);
        for i in 0..self.ngens {
            for j in 0..self.rel.cols() {
                rel.set(i, j, self.rel.get(i, j).clone());
            }
        }
        for i in 0..other.ngens {
            for j in 0..other.rel.cols() {
                rel.set(self.ngens + i, self.rel.cols() + j, other.rel.get(i, j).clone());
            }
        }
        Presentation { ngens: n, rel }
    }
}

/// A lattice inside `Z^m`.
pub(crate) enum Lattice<'a> {
    Full(usize),
    /// `{x : a x in im r}`.
    Kernel {
        a: &'a IntMatrix,
        r: &'a IntMatrix,
    },
    /// Column span.
    Span(IntMatrix),
}

enum Solver {
    Identity,
    /// Coordinates are rows `r..` of `vinv * z`; rows `..r` must vanish.
    Unimodular {
        vinv: IntMatrix,
        r: usize,
    },
    /// `y_i = (u z)_i / d_i`; rows past `diag.len()` must vanish.
    Scaled {
        u: IntMatrix,
        diag: Vec<BigInt>,
    },
}

struct LatticeBasis {
    basis: IntMatrix,
    solver: Solver,
}

impl LatticeBasis {
    fn new(lat: Lattice<'_>) -> LatticeBasis {
        match lat {
            Lattice::Full(m) => LatticeBasis {
                basis: IntMatrix::identity(m),
                solver: Solver::Identity,
            },
            Lattice::Kernel { a, r } if r.cols() == 0 => {
                let m = a.cols();
                let parts = snf_parts(
                    a,
                    Track {
                        v: true,
                        v_inv: true,
                        ..Track::default()
                    },
                );
                let rk = parts.rank();
                let v = parts.v.unwrap();
                LatticeBasis {
                    basis: v.submatrix(0..m, rk..m),
                    solver: Solver::Unimodular {
                        vinv: parts.v_inv.unwrap(),
                        r: rk,
                    },
                }
            }
            Lattice::Kernel { a, r } => {
                let m = a.cols();
                let big = IntMatrix::hstack(a.rows(), &[a, r]);
                let parts = snf_parts(
                    &big,
                    Track {
                        v: true,
                        ..Track::default()
                    },
                );
                let rk = parts.rank();
                let v = parts.v.unwrap();
                let gens = v.submatrix(0..m, rk..big.cols());
                Self::span(gens)
            }
            Lattice::Span(g) => Self::span(g),
        }
    }

    fn span(g: IntMatrix) -> LatticeBasis {
        let m = g.rows();
        let parts = snf_parts(
            &g,
            Track {
                u: true,
                u_inv: true,
                ..Track::default()
            },
        );
        let l = parts.rank();
        let uinv = parts.u_inv.unwrap();
        let mut basis = uinv.submatrix(0..m, 0..l);
        for j in 0..l {
            if !parts.diag[j].is_one() {
                for i in 0..m {
                    let x = basis.get(i, j) * &parts.diag[j];
                    basis.set(i, j, x);
                }
            }
        }
        LatticeBasis {
            basis,
            solver: Solver::Scaled {
                u: parts.u.unwrap(),
                diag: parts.diag,
            },
        }
    }

    fn dim(&self) -> usize {
        self.basis.cols()
    }

    fn coords(&self, z: &[BigInt]) -> Result<Vec<BigInt>> {
        match &self.solver {
            Solver::Identity => Ok(z.to_vec()),
            Solver::Unimodular { vinv, r } => {
                let w = vinv.mul_vec(z);
                if w[..*r].iter().any(|x| !x.is_zero()) {
                    return Err(Error::NotInLattice);
                }
                Ok(w[*r..].to_vec())
            }
            Solver::Scaled { u, diag } => {
                let w = u.mul_vec(z);
                if w[diag.len()..].iter().any(|x| !x.is_zero()) {
                    return Err(Error::NotInLattice);
                }
                diag.iter()
                    .zip(&w)
                    .map(|(d, x)| {
                        let (q, rem) = x.div_rem(d);
                        if rem.is_zero() {
                            Ok(q)
                        } else {
                            Err(Error::NotInLattice)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// `L / im(rel)` for a lattice `L` containing the columns of `rel`, in canonical form.
pub(crate) struct Subquotient {
    pub group: FinAbGroup,
    lattice: LatticeBasis,
    /// Rows of the SNF transform selecting generator coordinates.
    to_gens: IntMatrix,
}

impl Subquotient {
    pub fn new(lat: Lattice<'_>, rel: &IntMatrix) -> Result<Subquotient> {
        let lattice = LatticeBasis::new(lat);
        let l = lattice.dim();
        let mut cols = Vec::with_capacity(rel.cols());
        for j in 0..rel.cols() {
            cols.push(lattice.coords(&rel.column(j)).map_err(|_| {
                Error::Internal("relation outside the lattice (not a complex or map ill-defined)".into())
            })?);
        }
        let q = IntMatrix::from_columns(l, &cols);
        let parts = snf_parts(
            &q,
            Track {
                u: true,
                u_inv: true,
                ..Track::default()
            },
        );
        let rq = parts.rank();
        let mut idx: Vec<usize> = (rq..l).collect();
        let mut torsion = Vec::new();
        for (i, d) in parts.diag.iter().enumerate() {
            if !d.is_one() {
                idx.push(i);
                torsion.push(d.clone());
            }
        }
        let uinv = parts.u_inv.unwrap();
        let gens = lattice.basis.mul(&uinv.select_columns(&idx));
        let to_gens = parts.u.unwrap().select_rows(&idx);
        let group = FinAbGroup {
            free_rank: l - rq,
            torsion,
            basis_lift: Some(gens),
        };
        Ok(Subquotient {
            group,
            lattice,
            to_gens,
        })
    }

    pub fn gens(&self) -> &IntMatrix {
        self.group.basis_lift.as_ref().unwrap()
    }

    /// Coordinates of an ambient vector of the lattice in terms of the generators.
    pub fn express(&self, z: &[BigInt]) -> Result<Vec<BigInt>> {
        let y = self.lattice.coords(z)?;
        let mut c = self.to_gens.mul_vec(&y);
        self.group.reduce(&mut c);
        Ok(c)
    }
}

/// Homomorphism of finitely generated abelian groups in generator coordinates.
#[derive(Clone, Debug)]
pub struct GroupMap {
    source: FinAbGroup,
    target: FinAbGroup,
    matrix: IntMatrix,
}

impl GroupMap {
    pub fn new(source: &FinAbGroup, target: &FinAbGroup, mut matrix: IntMatrix) -> Result<Self> {
        if matrix.shape() != (target.ngens(), source.ngens()) {
            return Err(Error::Dimension(format!(
                "map matrix is {:?}, expected {}x{}",
                matrix.shape(),
                target.ngens(),
                source.ngens()
            )));
        }
        for j in 0..matrix.cols() {
            let mut col = matrix.column(j);
            target.reduce(&mut col);
            if let Some(d) = source.order_of(j) {
                let scaled: Vec<BigInt> = col.iter().map(|x| x * d).collect();
                if !target.is_zero_element(&scaled) {
                    return Err(Error::IllDefinedMap(j));
                }
            }
            for (i, x) in col.into_iter().enumerate() {
                matrix.set(i, j, x);
            }
        }
        Ok(GroupMap {
            source: source.without_lift(),
            target: target.without_lift(),
            matrix,
        })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        GroupMap {
            source: g.without_lift(),
            target: g.without_lift(),
            matrix: IntMatrix::identity(g.ngens()),
        }
    }

    pub fn zero(source: &FinAbGroup, target: &FinAbGroup) -> Self {
        GroupMap {
            source: source.without_lift(),
            target: target.without_lift(),
            matrix: IntMatrix::zeros(target.ngens(), source.ngens()),
        }
    }

    /// Multiplication by `c` on `g`.
    pub fn scalar(g: &FinAbGroup, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut m = IntMatrix::identity(g.ngens()).scale(&c);
        for i in 0..g.ngens() {
            if let Some(d) = g.order_of(i) {
                let x = m.get(i, i).mod_floor(d);
                m.set(i, i, x);
            }
        }
        GroupMap {
            source: g.without_lift(),
            target: g.without_lift(),
            matrix: m,
        }
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = self.matrix.mul_vec(v);
        self.target.reduce(&mut out);
        out
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &GroupMap) -> Result<GroupMap> {
        if !inner.target.same_isomorphism_type(&self.source) {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        GroupMap::new(&inner.source, &self.target, self.matrix.mul(&inner.matrix))
    }

    pub fn transpose_shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn kernel(&self) -> Result<(FinAbGroup, GroupMap)> {
        let r = self.target.relations();
        let sq = Subquotient::new(Lattice::Kernel { a: &self.matrix, r: &r }, &self.source.relations())?;
        let inc = GroupMap::new(&sq.group, &self.source, sq.gens().clone())?;
        Ok((sq.group.without_lift(), inc))
    }

    pub fn cokernel(&self) -> Result<(FinAbGroup, GroupMap)> {
        let n = self.target.ngens();
        let rel = IntMatrix::hstack(n, &[&self.matrix, &self.target.relations()]);
        let sq = Subquotient::new(Lattice::Full(n), &rel)?;
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            cols.push(sq.express(&e)?);
        }
        let proj = GroupMap::new(
            &self.target,
            &sq.group,
            IntMatrix::from_columns(sq.group.ngens(), &cols),
        )?;
        Ok((sq.group.without_lift(), proj))
    }

    pub fn image(&self) -> Result<FinAbGroup> {
        let n = self.target.ngens();
        let r = self.target.relations();
        let span = IntMatrix::hstack(n, &[&self.matrix, &r]);
        let sq = Subquotient::new(Lattice::Span(span), &r)?;
        Ok(sq.group.without_lift())
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(self.kernel()?.0.is_zero())
    }

    pub fn is_surjective(&self) -> Result<bool> {
        Ok(self.cokernel()?.0.is_zero())
    }

    /// Keeps the generators that survive localization at `p`.
    pub fn localize_at(&self, p: u64) -> GroupMap {
        let (s, ks) = self.source.localize_at(p);
        let (t, kt) = self.target.localize_at(p);
        let m = self.matrix.select_rows(&kt).select_columns(&ks);
        GroupMap::new(&s, &t, m).expect("localization preserves well-definedness")
    }

    /// Map on Pontryagin duals for maps between finite groups, and on `Hom(-, Z)` for free groups.
    ///
    /// Only valid when both groups are free or both finite with the standard
    /// identification of a cyclic group with its dual.
    pub fn dual(&self) -> Result<GroupMap> {
        // The character 1 -> 1/b of Z/b pulls back along 1 -> c to 1 -> c/b = (c*a/b)/a on Z/a.
        let s = &self.source;
        let t = &self.target;
        let mut m = IntMatrix::zeros(s.ngens(), t.ngens());
        for i in 0..t.ngens() {
            for j in 0..s.ngens() {
                let c = self.matrix.get(i, j);
                let v = match (t.order_of(i), s.order_of(j)) {
                    (None, None) => c.clone(),
                    (Some(b), Some(a)) => {
                        let num = c * a;
                        if !(&num % b).is_zero() {
                            return Err(Error::Internal("non-integral dual entry".into()));
                        }
                        num / b
                    }
                    (Some(_), None) => BigInt::zero(),
                    (None, Some(_)) => {
                        if !c.is_zero() {
                            return Err(Error::Internal("map from torsion to free part is nonzero".into()));
                        }
                        BigInt::zero()
                    }
                };
                m.set(j, i, v);
            }
        }
        GroupMap::new(t, s, m)
    }
}

/// `(ker f, coker f)`.
pub fn kernel_cokernel(f: &GroupMap) -> Result<(FinAbGroup, FinAbGroup)> {
    Ok((f.kernel()?.0, f.cokernel()?.0))
}

/// Coefficient rings for base change of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientRing {
    Rationals,
    PrimeField(u64),
    /// `Z[1/p]`.
    PInverted(u64),
}

/// `G (x) R` described by a dimension (fields) or a group (`Z[1/p]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChangedGroup {
    Dimension(usize),
    Group { free_rank: usize, torsion: Vec<BigInt> },
}

pub fn change_coefficients(g: &FinAbGroup, ring: CoefficientRing) -> ChangedGroup {
    match ring {
        CoefficientRing::Rationals => ChangedGroup::Dimension(g.free_rank),
        CoefficientRing::PrimeField(l) => ChangedGroup::Dimension(g.free_rank + g.torsion_count_divisible_by(l)),
        CoefficientRing::PInverted(p) => {
            let pb = BigInt::from(p);
            let torsion = g
                .torsion
                .iter()
                .map(|d| {
                    let mut x = d.clone();
                    while (&x % &pb).is_zero() {
                        x /= &pb;
                    }
                    x
                })
                .filter(|d| !d.is_one())
                .collect();
            ChangedGroup::Group {
                free_rank: g.free_rank,
                torsion,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(free: usize, tors: &[i64]) -> FinAbGroup {
        FinAbGroup::new(free, tors.iter().map(|&d| BigInt::from(d)).collect()).unwrap()
    }

    #[test]
    fn canonical_form_from_orders() {
        let h = FinAbGroup::from_orders(1, &[BigInt::from(4), BigInt::from(6), BigInt::from(1)]);
        assert_eq!(h, g(1, &[2, 12]));
        assert_eq!(h.to_string(), "Z + Z/2 + Z/12");
        assert_eq!(h.torsion_primes(), vec![2, 3]);
    }

    #[test]
    fn multiplication_by_two_on_z_mod_4() {
        let z4 = g(0, &[4]);
        let f = GroupMap::scalar(&z4, 2);
        let (k, c) = kernel_cokernel(&f).unwrap();
        assert_eq!(k, g(0, &[2]));
        assert_eq!(c, g(0, &[2]));
        assert_eq!(f.image().unwrap(), g(0, &[2]));
    }

    #[test]
    fn ill_defined_map_rejected() {
        let z2 = g(0, &[2]);
        let z = g(1, &[]);
        assert!(GroupMap::new(&z2, &z, IntMatrix::from_rows(&[vec![1]])).is_err());
        assert!(GroupMap::new(&z, &z2, IntMatrix::from_rows(&[vec![1]])).is_ok());
    }

    #[test]
    fn kernel_inclusion_lands_in_kernel() {
        let src = g(2, &[6]);
        let tgt = g(1, &[4]);
        let f = GroupMap::new(&src, &tgt, IntMatrix::from_rows(&[vec![2, 0, 0], vec![1, 2, 2]])).unwrap();
        let (k, inc) = f.kernel().unwrap();
        assert!(f.compose(&inc).unwrap().is_zero());
        let (c, proj) = f.cokernel().unwrap();
        assert!(proj.compose(&f).unwrap().is_zero());
        // rank-nullity over Q
        assert_eq!(k.free_rank() + 1, 2);
        assert_eq!(c.free_rank(), 0);
    }

    #[test]
    fn localization_drops_prime_to_p_torsion() {
        let h = g(1, &[6, 12]);
        let (l, kept) = h.localize_at(2);
        assert_eq!(l, g(1, &[2, 4]));
        assert_eq!(kept, vec![0, 1, 2]);
        let (l3, _) = h.localize_at(5);
        assert_eq!(l3, g(1, &[]));
    }

    #[test]
    fn base_change() {
        let h = g(2, &[2, 6]);
        assert_eq!(
            change_coefficients(&h, CoefficientRing::Rationals),
            ChangedGroup::Dimension(2)
        );
        assert_eq!(
            change_coefficients(&h, CoefficientRing::PrimeField(2)),
            ChangedGroup::Dimension(4)
        );
        assert_eq!(
            change_coefficients(&h, CoefficientRing::PrimeField(3)),
            ChangedGroup::Dimension(3)
        );
        assert_eq!(
            change_coefficients(&h, CoefficientRing::PInverted(2)),
            ChangedGroup::Group {
                free_rank: 2,
                torsion: vec![BigInt::from(3)]
            }
        );
    }

    #[test]
    fn dual_of_inclusion_is_projection() {
        let z2 = g(0, &[2]);
        let z4 = g(0, &[4]);
        let inc = GroupMap::new(&z2, &z4, IntMatrix::from_rows(&[vec![2]])).unwrap();
        let d = inc.dual().unwrap();
        assert_eq!(d.matrix(), &IntMatrix::from_rows(&[vec![1]]));
        assert!(d.is_surjective().unwrap());
    }
}
