//! Window modules: `Z^n`-graded modules recorded by their `2^n` class groups
//! `G_σ` and the variable actions `u_{σ,i}: G_σ -> G_{σ∖i}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::exactlinalg::{
    FinAbGroup, FpMatrix, GroupComplex, GroupMap, GroupShape, IntMatrix, Lattice, MixedAbGroup, MixedShape,
    Presentation, Subquotient,
};
use crate::monomial::DegreeClass;
use crate::{Error, Result};

/// Coefficient descriptor of a window module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum Coefficients {
    Integral,
    /// Module over `F_p[x]`.
    ModPrime(u64),
    /// `p`-primary groups `Z(p^inf)^d + T`.
    Mixed(u64),
}

/// One group of a window module (or of a Koszul cohomology computed from it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Integral(FinAbGroup),
    ModPrime { p: u64, dim: usize },
    Mixed(MixedAbGroup),
}

impl Piece {
    pub fn is_zero(&self) -> bool {
        match self {
            Piece::Integral(g) => g.is_zero(),
            Piece::ModPrime { dim, .. } => *dim == 0,
            Piece::Mixed(g) => g.is_zero(),
        }
    }

    /// Dimension after tensoring with `Q`.
    pub fn rational_rank(&self) -> usize {
        match self {
            Piece::Integral(g) => g.free_rank(),
            _ => 0,
        }
    }

    /// `dim_{F_ell} ker(ell)`.
    pub fn ker_dim(&self, ell: u64) -> usize {
        match self {
            Piece::Integral(g) => g.torsion_count_divisible_by(ell),
            Piece::ModPrime { p, dim } => {
                if *p == ell {
                    *dim
                } else {
                    0
                }
            }
            Piece::Mixed(g) => {
                if g.p() == ell {
                    g.socle_dim()
                } else {
                    0
                }
            }
        }
    }

    /// `dim_{F_ell} coker(ell)`.
    pub fn coker_dim(&self, ell: u64) -> usize {
        match self {
            Piece::Integral(g) => g.free_rank() + g.torsion_count_divisible_by(ell),
            Piece::ModPrime { p, dim } => {
                if *p == ell {
                    *dim
                } else {
                    0
                }
            }
            Piece::Mixed(g) => {
                if g.p() == ell {
                    g.cokernel_of_p_dim()
                } else {
                    0
                }
            }
        }
    }

    /// Primes at which the localization is nonzero without the group being rationally nonzero.
    pub fn torsion_primes(&self) -> Vec<u64> {
        match self {
            Piece::Integral(g) => g.torsion_primes(),
            Piece::ModPrime { p, dim } if *dim > 0 => vec![*p],
            Piece::Mixed(g) if !g.is_zero() => vec![g.p()],
            _ => Vec::new(),
        }
    }

    pub fn shape(&self) -> PieceShape {
        match self {
            Piece::Integral(g) => PieceShape::Integral(g.into()),
            Piece::ModPrime { p, dim } => PieceShape::ModPrime { p: *p, dim: *dim },
            Piece::Mixed(g) => PieceShape::Mixed(g.into()),
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Integral(g) => write!(f, "{g}"),
            Piece::ModPrime { p, dim: 0 } => write!(f, "0 (mod {p})"),
            Piece::ModPrime { p, dim } => write!(f, "F_{p}^{dim}"),
            Piece::Mixed(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceShape {
    Integral(GroupShape),
    ModPrime { p: u64, dim: usize },
    Mixed(MixedShape),
}

type Maps<T> = Vec<Vec<Option<T>>>;

#[derive(Clone, Debug)]
enum Data {
    Integral {
        groups: Vec<FinAbGroup>,
        maps: Maps<GroupMap>,
    },
    ModPrime {
        p: u64,
        dims: Vec<usize>,
        maps: Maps<FpMatrix>,
    },
    /// Groups are recorded through their duals; `dual_maps[σ][i]: D_{σ∖i} -> D_σ`.
    Mixed {
        p: u64,
        trunc: u32,
        groups: Vec<MixedAbGroup>,
        duals: Vec<FinAbGroup>,
        dual_maps: Maps<GroupMap>,
    },
}

/// Finite model of a `Z^n`-graded module whose degree-`a` piece depends only on `{i : a_i < 0}`.
///
/// `x_i` acts as the identity from degree `a` to `a + e_i` unless `a_i = -1`, where it acts by `u_{σ,i}`.
#[derive(Clone, Debug)]
pub struct WindowModule {
    n: usize,
    data: Data,
}

fn check_shape<T>(n: usize, len: usize, maps: &Maps<T>) -> Result<()> {
    if len != 1 << n || maps.len() != 1 << n {
        return Err(Error::Malformed(format!(
            "window module on {n} variables needs {} classes",
            1usize << n
        )));
    }
    for (s, row) in maps.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed("one action slot per variable is required".into()));
        }
        for (i, m) in row.iter().enumerate() {
            if m.is_some() != (s >> i & 1 == 1) {
                return Err(Error::Malformed(format!(
                    "action of x{} at class {:b} present iff x{} in class",
                    i + 1,
                    s,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn subsets_by_size(tau: u32) -> Vec<Vec<u32>> {
    let m = tau.count_ones() as usize;
    let mut out = vec![Vec::new(); m + 1];
    let mut a = 0u32;
    loop {
        out[a.count_ones() as usize].push(a);
        if a == tau {
            break;
        }
        a = (a.wrapping_sub(tau)) & tau;
    }
    for v in &mut out {
        v.sort_unstable();
    }
    out
}

fn koszul_sign(a: u32, i: usize) -> i64 {
    if (a & ((1u32 << i) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> (Vec<usize>, usize) {
    let mut off = Vec::new();
    let mut t = 0;
    for s in sizes {
        off.push(t);
        t += s;
    }
    (off, t)
}

fn paste(dst: &mut IntMatrix, src: &IntMatrix, r0: usize, c0: usize, sign: i64) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let x = src.get(i, j);
            if !x.is_zero() {
                dst.set(r0 + i, c0 + j, x * sign);
            }
        }
    }
}

fn fp_paste(dst: &mut FpMatrix, src: &FpMatrix, r0: usize, c0: usize, sign: i64) {
    let p = src.p();
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let x = src.get(i, j);
            if x != 0 {
                dst.set(r0 + i, c0 + j, if sign > 0 { x } else { p - x });
            }
        }
    }
}

fn direct_sum_presentation(groups: &[&FinAbGroup]) -> Presentation {
    groups
        .iter()
        .fold(Presentation::free(0), |acc, g| acc.direct_sum(&g.presentation()))
}

impl WindowModule {
    /// Validates group maps and commuting squares.
    pub fn integral(n: usize, groups: Vec<FinAbGroup>, maps: Vec<Vec<Option<IntMatrix>>>) -> Result<Self> {
        check_shape(n, groups.len(), &maps)?;
        let groups: Vec<FinAbGroup> = groups.iter().map(FinAbGroup::without_lift).collect();
        let mut gm: Maps<GroupMap> = Vec::with_capacity(1 << n);
        for (s, row) in maps.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (i, m) in row.into_iter().enumerate() {
                out.push(match m {
                    Some(m) => Some(GroupMap::new(&groups[s], &groups[s & !(1 << i)], m)?),
                    None => None,
                });
            }
            gm.push(out);
        }
        let w = WindowModule {
            n,
            data: Data::Integral { groups, maps: gm },
        };
        w.check_commuting()?;
        Ok(w)
    }

    pub(crate) fn integral_unchecked(n: usize, groups: Vec<FinAbGroup>, maps: Maps<GroupMap>) -> Self {
        WindowModule {
            n,
            data: Data::Integral { groups, maps },
        }
    }

    pub fn mod_prime(n: usize, p: u64, dims: Vec<usize>, maps: Vec<Vec<Option<FpMatrix>>>) -> Result<Self> {
        check_shape(n, dims.len(), &maps)?;
        for (s, row) in maps.iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                if let Some(m) = m {
                    if m.p() != p || m.cols() != dims[s] || m.rows() != dims[s & !(1 << i)] {
                        return Err(Error::Malformed(format!(
                            "action of x{} at class {s:b} has the wrong shape",
                            i + 1
                        )));
                    }
                }
            }
        }
        let w = WindowModule {
            n,
            data: Data::ModPrime { p, dims, maps },
        };
        w.check_commuting()?;
        Ok(w)
    }

    /// From Pontryagin duals `D_σ` and dual actions `D_{σ∖i} -> D_σ`.
    pub fn mixed(
        n: usize,
        p: u64,
        trunc: u32,
        duals: Vec<FinAbGroup>,
        dual_maps: Vec<Vec<Option<IntMatrix>>>,
    ) -> Result<Self> {
        check_shape(n, duals.len(), &dual_maps)?;
        let duals: Vec<FinAbGroup> = duals.iter().map(FinAbGroup::without_lift).collect();
        let mut gm: Maps<GroupMap> = Vec::with_capacity(1 << n);
        for (s, row) in dual_maps.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (i, m) in row.into_iter().enumerate() {
                out.push(match m {
                    Some(m) => Some(GroupMap::new(&duals[s & !(1 << i)], &duals[s], m)?),
                    None => None,
                });
            }
            gm.push(out);
        }
        let w = Self::mixed_unchecked(n, p, trunc, duals, gm);
        w.check_commuting()?;
        Ok(w)
    }

    pub(crate) fn mixed_unchecked(
        n: usize,
        p: u64,
        trunc: u32,
        duals: Vec<FinAbGroup>,
        dual_maps: Maps<GroupMap>,
    ) -> Self {
        let groups = duals.iter().map(|d| MixedAbGroup::from_dual(d, p, trunc)).collect();
        WindowModule {
            n,
            data: Data::Mixed {
                p,
                trunc,
                groups,
                duals,
                dual_maps,
            },
        }
    }

    /// The polynomial ring `Z[x_1..x_n]` itself: `Z` at the empty class.
    pub fn polynomial_ring(n: usize) -> Self {
        let groups: Vec<FinAbGroup> = (0..1usize << n)
            .map(|s| {
                if s == 0 {
                    FinAbGroup::free(1)
                } else {
                    FinAbGroup::zero()
                }
            })
            .collect();
        let maps = Self::zero_maps_integral(n, &groups);
        Self::integral_unchecked(n, groups, maps)
    }

    /// Module concentrated in the class `{1..n}` (all actions zero), integral.
    pub(crate) fn concentrated_integral(n: usize, g: FinAbGroup) -> Self {
        let top = (1usize << n) - 1;
        let groups: Vec<FinAbGroup> = (0..1usize << n)
            .map(|s| if s == top { g.without_lift() } else { FinAbGroup::zero() })
            .collect();
        let maps = Self::zero_maps_integral(n, &groups);
        Self::integral_unchecked(n, groups, maps)
    }

    pub(crate) fn concentrated_mod_prime(n: usize, p: u64, dim: usize) -> Self {
        let top = (1usize << n) - 1;
        let dims: Vec<usize> = (0..1usize << n).map(|s| if s == top { dim } else { 0 }).collect();
        let maps = (0..1usize << n)
            .map(|s| {
                (0..n)
                    .map(|i| (s >> i & 1 == 1).then(|| FpMatrix::zeros(p, dims[s & !(1 << i)], dims[s])))
                    .collect()
            })
            .collect();
        WindowModule {
            n,
            data: Data::ModPrime { p, dims, maps },
        }
    }

    pub(crate) fn concentrated_mixed(n: usize, g: &MixedAbGroup) -> Self {
        let top = (1usize << n) - 1;
        let duals: Vec<FinAbGroup> = (0..1usize << n)
            .map(|s| if s == top { g.dual() } else { FinAbGroup::zero() })
            .collect();
        let dual_maps = (0..1usize << n)
            .map(|s| {
                (0..n)
                    .map(|i| (s >> i & 1 == 1).then(|| GroupMap::zero(&duals[s & !(1 << i)], &duals[s])))
                    .collect()
            })
            .collect();
        Self::mixed_unchecked(n, g.p(), g.trunc_exponent(), duals, dual_maps)
    }

    fn zero_maps_integral(n: usize, groups: &[FinAbGroup]) -> Maps<GroupMap> {
        (0..1usize << n)
            .map(|s| {
                (0..n)
                    .map(|i| (s >> i & 1 == 1).then(|| GroupMap::zero(&groups[s], &groups[s & !(1 << i)])))
                    .collect()
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> Coefficients {
        match &self.data {
            Data::Integral { .. } => Coefficients::Integral,
            Data::ModPrime { p, .. } => Coefficients::ModPrime(*p),
            Data::Mixed { p, .. } => Coefficients::Mixed(*p),
        }
    }

    /// Truncation exponent of the mixed finite models, if any.
    pub fn trunc_exponent(&self) -> Option<u32> {
        match &self.data {
            Data::Mixed { trunc, .. } => Some(*trunc),
            _ => None,
        }
    }

    pub fn piece(&self, sigma: DegreeClass) -> Piece {
        let s = sigma.mask() as usize;
        match &self.data {
            Data::Integral { groups, .. } => Piece::Integral(groups[s].clone()),
            Data::ModPrime { p, dims, .. } => Piece::ModPrime { p: *p, dim: dims[s] },
            Data::Mixed { groups, .. } => Piece::Mixed(groups[s].clone()),
        }
    }

    pub fn integral_group(&self, sigma: DegreeClass) -> Option<&FinAbGroup> {
        match &self.data {
            Data::Integral { groups, .. } => Some(&groups[sigma.mask() as usize]),
            _ => None,
        }
    }

    pub fn mixed_group(&self, sigma: DegreeClass) -> Option<&MixedAbGroup> {
        match &self.data {
            Data::Mixed { groups, .. } => Some(&groups[sigma.mask() as usize]),
            _ => None,
        }
    }

    /// `u_{σ,var}` for integral modules.
    pub fn action(&self, sigma: DegreeClass, var: usize) -> Option<&GroupMap> {
        match &self.data {
            Data::Integral { maps, .. } => maps[sigma.mask() as usize].get(var)?.as_ref(),
            _ => None,
        }
    }

    pub fn mod_prime_action(&self, sigma: DegreeClass, var: usize) -> Option<&FpMatrix> {
        match &self.data {
            Data::ModPrime { maps, .. } => maps[sigma.mask() as usize].get(var)?.as_ref(),
            _ => None,
        }
    }

    /// Dual action `D_{σ∖var} -> D_σ` for mixed modules.
    pub fn dual_action(&self, sigma: DegreeClass, var: usize) -> Option<&GroupMap> {
        match &self.data {
            Data::Mixed { dual_maps, .. } => dual_maps[sigma.mask() as usize].get(var)?.as_ref(),
            _ => None,
        }
    }

    pub fn dual_group(&self, sigma: DegreeClass) -> Option<&FinAbGroup> {
        match &self.data {
            Data::Mixed { duals, .. } => Some(&duals[sigma.mask() as usize]),
            _ => None,
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = DegreeClass> {
        (0..1u32 << self.n).map(DegreeClass::from_mask)
    }

    pub fn nonzero_classes(&self) -> Vec<DegreeClass> {
        crate::monomial::all_degree_classes(self.n)
            .into_iter()
            .filter(|&s| !self.piece(s).is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.classes().all(|s| self.piece(s).is_zero())
    }

    /// `u_{σ∖i,j} u_{σ,i} = u_{σ∖j,i} u_{σ,j}` for all `i ≠ j` in `σ`.
    pub fn check_commuting(&self) -> Result<()> {
        let n = self.n;
        for s in 0..1usize << n {
            for i in 0..n {
                for j in i + 1..n {
                    if s >> i & 1 == 0 || s >> j & 1 == 0 {
                        continue;
                    }
                    let (si, sj, sij) = (s & !(1 << i), s & !(1 << j), s & !(1 << i) & !(1 << j));
                    let ok = match &self.data {
                        Data::Integral { groups, maps } => {
                            let a = maps[si][j]
                                .as_ref()
                                .unwrap()
                                .matrix()
                                .mul(maps[s][i].as_ref().unwrap().matrix());
                            let b = maps[sj][i]
                                .as_ref()
                                .unwrap()
                                .matrix()
                                .mul(maps[s][j].as_ref().unwrap().matrix());
                            let t = &groups[sij];
                            (0..a.cols()).all(|c| t.is_zero_element(&a.sub(&b).column(c)))
                        }
                        Data::ModPrime { maps, .. } => {
                            let a = maps[si][j].as_ref().unwrap().mul(maps[s][i].as_ref().unwrap());
                            let b = maps[sj][i].as_ref().unwrap().mul(maps[s][j].as_ref().unwrap());
                            a == b
                        }
                        Data::Mixed { duals, dual_maps, .. } => {
                            // dual square: D_{σ∖ij} -> D_σ both ways
                            let a = dual_maps[s][i]
                                .as_ref()
                                .unwrap()
                                .matrix()
                                .mul(dual_maps[si][j].as_ref().unwrap().matrix());
                            let b = dual_maps[s][j]
                                .as_ref()
                                .unwrap()
                                .matrix()
                                .mul(dual_maps[sj][i].as_ref().unwrap().matrix());
                            let t = &duals[s];
                            (0..a.cols()).all(|c| t.is_zero_element(&a.sub(&b).column(c)))
                        }
                    };
                    if !ok {
                        return Err(Error::Malformed(format!(
                            "actions of x{} and x{} do not commute at class {}",
                            i + 1,
                            j + 1,
                            DegreeClass::from_mask(s as u32)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Inverts `x_var`: every class is replaced by the class without `var`.
    pub fn localize(&self, var: usize) -> WindowModule {
        let n = self.n;
        let strip = |s: usize| s & !(1 << var);
        match &self.data {
            Data::Integral { groups, maps } => {
                let g: Vec<FinAbGroup> = (0..1usize << n).map(|s| groups[strip(s)].clone()).collect();
                let m = (0..1usize << n)
                    .map(|s| {
                        (0..n)
                            .map(|i| {
                                (s >> i & 1 == 1).then(|| {
                                    if i == var {
                                        GroupMap::identity(&g[s])
                                    } else {
                                        maps[strip(s)][i].clone().unwrap()
                                    }
                                })
                            })
                            .collect()
                    })
                    .collect();
                WindowModule {
                    n,
                    data: Data::Integral { groups: g, maps: m },
                }
            }
            Data::ModPrime { p, dims, maps } => {
                let d: Vec<usize> = (0..1usize << n).map(|s| dims[strip(s)]).collect();
                let m = (0..1usize << n)
                    .map(|s| {
                        (0..n)
                            .map(|i| {
                                (s >> i & 1 == 1).then(|| {
                                    if i == var {
                                        let mut e = FpMatrix::zeros(*p, d[s], d[s]);
                                        for k in 0..d[s] {
                                            e.set(k, k, 1);
                                        }
                                        e
                                    } else {
                                        maps[strip(s)][i].clone().unwrap()
                                    }
                                })
                            })
                            .collect()
                    })
                    .collect();
                WindowModule {
                    n,
                    data: Data::ModPrime {
                        p: *p,
                        dims: d,
                        maps: m,
                    },
                }
            }
            Data::Mixed {
                p,
                trunc,
                duals,
                dual_maps,
                ..
            } => {
                let d: Vec<FinAbGroup> = (0..1usize << n).map(|s| duals[strip(s)].clone()).collect();
                let m = (0..1usize << n)
                    .map(|s| {
                        (0..n)
                            .map(|i| {
                                (s >> i & 1 == 1).then(|| {
                                    if i == var {
                                        GroupMap::identity(&d[s])
                                    } else {
                                        dual_maps[strip(s)][i].clone().unwrap()
                                    }
                                })
                            })
                            .collect()
                    })
                    .collect();
                Self::mixed_unchecked(n, *p, *trunc, d, m)
            }
        }
    }

    /// `M` as a module over `F_p[x]`, when every class group is killed by `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Option<WindowModule> {
        let pb = BigInt::from(p);
        match &self.data {
            Data::Integral { groups, maps } => {
                if groups
                    .iter()
                    .any(|g| g.free_rank() > 0 || g.torsion().iter().any(|d| d != &pb))
                {
                    return None;
                }
                let dims = groups.iter().map(FinAbGroup::ngens).collect();
                let m = maps
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|u| u.as_ref().map(|u| FpMatrix::from_int(u.matrix(), p)))
                            .collect()
                    })
                    .collect();
                Some(WindowModule {
                    n: self.n,
                    data: Data::ModPrime { p, dims, maps: m },
                })
            }
            Data::ModPrime { p: q, .. } if *q == p => Some(self.clone()),
            _ => None,
        }
    }

    /// A module over `F_p[x]` regarded over `Z[x]` (class groups `(Z/p)^d`).
    pub fn as_integral(&self) -> Option<WindowModule> {
        let Data::ModPrime { p, dims, maps } = &self.data else {
            return None;
        };
        let groups: Vec<FinAbGroup> = dims.iter().map(|&d| FinAbGroup::elementary(*p, d)).collect();
        let gm = maps
            .iter()
            .enumerate()
            .map(|(s, row)| {
                row.iter()
                    .enumerate()
                    .map(|(i, u)| {
                        u.as_ref().map(|u| {
                            let m = IntMatrix::from_fn(u.rows(), u.cols(), |a, b| BigInt::from(u.get(a, b)));
                            GroupMap::new(&groups[s], &groups[s & !(1 << i)], m).expect("F_p maps are well defined")
                        })
                    })
                    .collect()
            })
            .collect();
        Some(WindowModule {
            n: self.n,
            data: Data::Integral { groups, maps: gm },
        })
    }

    /// Koszul complex on `x_τ` in degree `-1_τ` (after inverting the other variables), integral case.
    pub(crate) fn koszul_integral_complex(&self, tau: DegreeClass) -> Option<GroupComplex> {
        let Data::Integral { groups, maps } = &self.data else {
            return None;
        };
        let t = tau.mask();
        let blocks = subsets_by_size(t);
        let g = |a: u32| &groups[(t & !a) as usize];
        let terms: Vec<Presentation> = blocks
            .iter()
            .map(|bl| direct_sum_presentation(&bl.iter().map(|&a| g(a)).collect::<Vec<_>>()))
            .collect();
        let mut dmaps = Vec::new();
        for k in 0..blocks.len().saturating_sub(1) {
            let (co, nc) = offsets(blocks[k].iter().map(|&a| g(a).ngens()));
            let (ro, nr) = offsets(blocks[k + 1].iter().map(|&a| g(a).ngens()));
            let mut m = IntMatrix::zeros(nr, nc);
            for (ca, &a) in blocks[k].iter().enumerate() {
                for i in tau.indices().filter(|&i| a >> i & 1 == 0) {
                    let ra = blocks[k + 1].binary_search(&(a | 1 << i)).unwrap();
                    let u = maps[(t & !a) as usize][i].as_ref().unwrap();
                    paste(&mut m, u.matrix(), ro[ra], co[ca], koszul_sign(a, i));
                }
            }
            dmaps.push(m);
        }
        Some(GroupComplex { terms, maps: dmaps })
    }

    /// Pontryagin dual of the Koszul complex, reindexed: term `t` is the dual of `K^{m-t}`.
    fn koszul_dual_complex(&self, tau: DegreeClass) -> Option<GroupComplex> {
        let Data::Mixed { duals, dual_maps, .. } = &self.data else {
            return None;
        };
        let t = tau.mask();
        let blocks = subsets_by_size(t);
        let m = blocks.len() - 1;
        let d = |a: u32| &duals[(t & !a) as usize];
        let terms: Vec<Presentation> = (0..=m)
            .map(|s| direct_sum_presentation(&blocks[m - s].iter().map(|&a| d(a)).collect::<Vec<_>>()))
            .collect();
        let mut dmaps = Vec::new();
        for s in 0..m {
            let (co, nc) = offsets(blocks[m - s].iter().map(|&a| d(a).ngens()));
            let (ro, nr) = offsets(blocks[m - s - 1].iter().map(|&b| d(b).ngens()));
            let mut mat = IntMatrix::zeros(nr, nc);
            for (rb, &b) in blocks[m - s - 1].iter().enumerate() {
                for i in tau.indices().filter(|&i| b >> i & 1 == 0) {
                    let ca = blocks[m - s].binary_search(&(b | 1 << i)).unwrap();
                    let u = dual_maps[(t & !b) as usize][i].as_ref().unwrap();
                    paste(&mut mat, u.matrix(), ro[rb], co[ca], koszul_sign(b, i));
                }
            }
            dmaps.push(mat);
        }
        Some(GroupComplex { terms, maps: dmaps })
    }

    fn koszul_fp(&self, tau: DegreeClass) -> Option<(u64, Vec<usize>, Vec<FpMatrix>)> {
        let Data::ModPrime { p, dims, maps } = &self.data else {
            return None;
        };
        let t = tau.mask();
        let blocks = subsets_by_size(t);
        let g = |a: u32| dims[(t & !a) as usize];
        let sizes: Vec<usize> = blocks.iter().map(|bl| bl.iter().map(|&a| g(a)).sum()).collect();
        let mut dmaps = Vec::new();
        for k in 0..blocks.len() - 1 {
            let (co, _) = offsets(blocks[k].iter().map(|&a| g(a)));
            let (ro, _) = offsets(blocks[k + 1].iter().map(|&a| g(a)));
            let mut m = FpMatrix::zeros(*p, sizes[k + 1], sizes[k]);
            for (ca, &a) in blocks[k].iter().enumerate() {
                for i in tau.indices().filter(|&i| a >> i & 1 == 0) {
                    let ra = blocks[k + 1].binary_search(&(a | 1 << i)).unwrap();
                    let u = maps[(t & !a) as usize][i].as_ref().unwrap();
                    fp_paste(&mut m, u, ro[ra], co[ca], koszul_sign(a, i));
                }
            }
            dmaps.push(m);
        }
        Some((*p, sizes, dmaps))
    }

    /// `H^k(x_τ; M)` in degree `-1_τ` for `k = 0..=|τ|`.
    pub fn koszul(&self, tau: DegreeClass) -> Result<Vec<Piece>> {
        match &self.data {
            Data::Integral { .. } => {
                let k = self.koszul_integral_complex(tau).unwrap();
                Ok(k.cohomology()?
                    .iter()
                    .map(|h| Piece::Integral(h.group().without_lift()))
                    .collect())
            }
            Data::ModPrime { .. } => {
                let (p, sizes, d) = self.koszul_fp(tau).unwrap();
                let ranks: Vec<usize> = d.iter().map(FpMatrix::rank).collect();
                Ok((0..sizes.len())
                    .map(|k| {
                        let out = if k < ranks.len() { ranks[k] } else { 0 };
                        let inn = if k > 0 { ranks[k - 1] } else { 0 };
                        Piece::ModPrime {
                            p,
                            dim: sizes[k] - out - inn,
                        }
                    })
                    .collect())
            }
            Data::Mixed { p, trunc, .. } => {
                let e = self.koszul_dual_complex(tau).unwrap();
                let h = e.cohomology()?;
                let m = h.len() - 1;
                Ok((0..=m)
                    .map(|k| Piece::Mixed(MixedAbGroup::from_dual(h[m - k].group(), *p, *trunc)))
                    .collect())
            }
        }
    }

    /// `dim H^i(ell, x_τ; M)` for `i = 0..=|τ|+1` by the two-step rule
    /// `dim coker(ell | H^{i-1}(x;M)) + dim ker(ell | H^i(x;M))`.
    pub fn koszul_with_prime(&self, tau: DegreeClass, ell: u64) -> Result<Vec<usize>> {
        let h = self.koszul(tau)?;
        let m = h.len() - 1;
        Ok((0..=m + 1)
            .map(|i| {
                let c = if i > 0 { h[i - 1].coker_dim(ell) } else { 0 };
                let k = if i <= m { h[i].ker_dim(ell) } else { 0 };
                c + k
            })
            .collect())
    }

    /// Same dimensions from the Koszul complex on `(ell, x_τ)` itself.
    pub fn koszul_with_prime_direct(&self, tau: DegreeClass, ell: u64) -> Result<Vec<usize>> {
        let lb = BigInt::from(ell);
        match &self.data {
            Data::Integral { .. } => {
                let cone = self.koszul_integral_complex(tau).unwrap().cone_of_scalar(&lb);
                cone.cohomology()?
                    .iter()
                    .map(|h| elementary_dim(h.group(), ell))
                    .collect()
            }
            Data::Mixed { p, .. } => {
                let cone = self.koszul_dual_complex(tau).unwrap().cone_of_scalar(&lb);
                let h = cone.cohomology()?;
                let top = h.len() - 1;
                (0..=top)
                    .map(|i| elementary_dim(&h[top - i].group().localize_at(*p).0, ell))
                    .collect()
            }
            Data::ModPrime { p, .. } => {
                let (p, sizes, d) = self.koszul_fp(tau).map(|(_, s, d)| (*p, s, d)).unwrap();
                if ell != p {
                    return Ok(vec![0; sizes.len() + 1]);
                }
                // the cone of multiplication by p = 0 on K
                let len = sizes.len();
                let cs: Vec<usize> = (0..=len)
                    .map(|t| sizes.get(t).copied().unwrap_or(0) + if t > 0 { sizes[t - 1] } else { 0 })
                    .collect();
                let ranks: Vec<usize> = (0..len)
                    .map(|t| {
                        let a = if t < d.len() { d[t].rank() } else { 0 };
                        let b = if t > 0 { d[t - 1].rank() } else { 0 };
                        a + b
                    })
                    .collect();
                Ok((0..=len)
                    .map(|t| {
                        let out = if t < ranks.len() { ranks[t] } else { 0 };
                        let inn = if t > 0 { ranks[t - 1] } else { 0 };
                        cs[t] - out - inn
                    })
                    .collect())
            }
        }
    }

    /// `∩_{i∈τ} ker u_{τ,i}` inside `G_τ` (the socle of the module localized at `P_τ`).
    pub fn socle(&self, tau: DegreeClass) -> Result<Piece> {
        let t = tau.mask() as usize;
        let vars: Vec<usize> = tau.indices().collect();
        match &self.data {
            Data::Integral { groups, maps } => {
                let g = &groups[t];
                if vars.is_empty() {
                    return Ok(Piece::Integral(g.clone()));
                }
                let (a, r) = stacked(g.ngens(), vars.iter().map(|&i| maps[t][i].as_ref().unwrap()));
                let sq = Subquotient::new(Lattice::Kernel { a: &a, r: &r }, &g.relations())?;
                Ok(Piece::Integral(sq.group.without_lift()))
            }
            Data::ModPrime { p, dims, maps } => {
                if vars.is_empty() {
                    return Ok(Piece::ModPrime { p: *p, dim: dims[t] });
                }
                let rows: usize = vars.iter().map(|&i| dims[t & !(1 << i)]).sum();
                let mut st = FpMatrix::zeros(*p, rows, dims[t]);
                let mut r0 = 0;
                for &i in &vars {
                    let u = maps[t][i].as_ref().unwrap();
                    fp_paste(&mut st, u, r0, 0, 1);
                    r0 += u.rows();
                }
                Ok(Piece::ModPrime {
                    p: *p,
                    dim: dims[t] - st.rank(),
                })
            }
            Data::Mixed {
                p,
                trunc,
                duals,
                dual_maps,
                ..
            } => {
                let d = &duals[t];
                if vars.is_empty() {
                    return Ok(Piece::Mixed(MixedAbGroup::from_dual(d, *p, *trunc)));
                }
                let mut blocks: Vec<&IntMatrix> = vars
                    .iter()
                    .map(|&i| dual_maps[t][i].as_ref().unwrap().matrix())
                    .collect();
                let rel = d.relations();
                blocks.push(&rel);
                let all = IntMatrix::hstack(d.ngens(), &blocks);
                let sq = Subquotient::new(Lattice::Full(d.ngens()), &all)?;
                Ok(Piece::Mixed(MixedAbGroup::from_dual(&sq.group, *p, *trunc)))
            }
        }
    }
}

/// `(vstack of map matrices, block diagonal of target relations)`.
pub(crate) fn stacked<'a>(cols: usize, maps: impl Iterator<Item = &'a GroupMap>) -> (IntMatrix, IntMatrix) {
    let maps: Vec<&GroupMap> = maps.collect();
    let a = IntMatrix::vstack(cols, &maps.iter().map(|m| m.matrix()).collect::<Vec<_>>());
    let rows: usize = maps.iter().map(|m| m.target().ngens()).sum();
    let rc: usize = maps.iter().map(|m| m.target().torsion().len()).sum();
    let mut r = IntMatrix::zeros(rows, rc);
    let (mut r0, mut c0) = (0, 0);
    for m in &maps {
        let rel = m.target().relations();
        paste(&mut r, &rel, r0, c0, 1);
        r0 += rel.rows();
        c0 += rel.cols();
    }
    (a, r)
}

fn elementary_dim(g: &FinAbGroup, ell: u64) -> Result<usize> {
    if g.free_rank() > 0 || g.torsion().iter().any(|d| d != &BigInt::from(ell)) {
        return Err(Error::Internal(format!(
            "Koszul cohomology on a prime is not killed by it: {g}"
        )));
    }
    Ok(g.ngens())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_in_size_order() {
        let s = subsets_by_size(0b101);
        assert_eq!(s, vec![vec![0], vec![0b001, 0b100], vec![0b101]]);
    }

    #[test]
    fn koszul_of_polynomial_ring() {
        let s = WindowModule::polynomial_ring(3);
        let h = s.koszul(DegreeClass::full(3)).unwrap();
        let shown: Vec<String> = h.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["0", "0", "0", "Z"]);
        assert_eq!(
            s.koszul_with_prime(DegreeClass::full(3), 2).unwrap(),
            vec![0, 0, 0, 0, 1]
        );
        assert_eq!(
            s.koszul_with_prime_direct(DegreeClass::full(3), 2).unwrap(),
            vec![0, 0, 0, 0, 1]
        );
    }

    #[test]
    fn rejects_noncommuting_actions() {
        let z = FinAbGroup::free(1);
        let groups = vec![z.clone(), z.clone(), z.clone(), z.clone()];
        let one = || Some(IntMatrix::identity(1));
        let two = Some(IntMatrix::from_rows(&[vec![2]]));
        let maps = vec![vec![None, None], vec![one(), None], vec![None, one()], vec![one(), two]];
        assert!(WindowModule::integral(2, groups, maps).is_err());
    }
}
