//! Squarefree monomial ideals, degree classes and simplicial complexes.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactlinalg::{FreeComplex, IntMatrix};
use crate::{Error, Result};

/// Hard ceiling imposed by the bitmask representation and window sizes.
pub const HARD_MAX_VARS: usize = 24;
pub const DEFAULT_MAX_VARS: usize = 14;
/// Generator subsets are enumerated exhaustively by the Čech construction.
pub const MAX_GENERATORS: usize = 24;

/// Subset of `{1..n}`; the negative support of a multidegree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeClass(u32);

impl DegreeClass {
    pub const EMPTY: DegreeClass = DegreeClass(0);

    pub fn from_mask(mask: u32) -> Self {
        DegreeClass(mask)
    }

    /// From 1-based variable indices.
    pub fn from_vars(vars: &[usize]) -> Self {
        DegreeClass(vars.iter().fold(0, |m, &v| m | (1 << (v - 1))))
    }

    /// `{1..n}`.
    pub fn full(n: usize) -> Self {
        DegreeClass(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 0-based variable test.
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn without(self, i: usize) -> Self {
        DegreeClass(self.0 & !(1 << i))
    }

    pub fn with(self, i: usize) -> Self {
        DegreeClass(self.0 | (1 << i))
    }

    pub fn is_subset_of(self, other: DegreeClass) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: DegreeClass) -> Self {
        DegreeClass(self.0 | other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        DegreeClass(!self.0 & DegreeClass::full(n).0)
    }

    /// 0-based indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |i| m >> i & 1 == 1)
    }

    /// 1-based variable numbers.
    pub fn vars(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }
}

impl fmt::Display for DegreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vars().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

impl fmt::Debug for DegreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for DegreeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vars().serialize(s)
    }
}

/// All `2^n` classes, ordered by size and then lexicographically.
pub fn all_degree_classes(n: usize) -> Vec<DegreeClass> {
    let mut v: Vec<DegreeClass> = (0..1u32 << n).map(DegreeClass).collect();
    v.sort_by_key(|c| (c.len(), c.vars()));
    v
}

/// Key realizing the lex monomial order with `x1 > x2 > ...` on squarefree supports.
fn lex_key(mask: u32, n: usize) -> u32 {
    (0..n).fold(0, |k, i| (k << 1) | (mask >> i & 1))
}

/// Squarefree monomial ideal of `Z[x_1..x_n]`, stored by generator supports.
///
/// Generators are minimal and sorted decreasingly in lex order (`x1 > ... > xn`).
/// Equality ignores the name and the radical flag.
#[derive(Clone)]
pub struct MonomialIdeal {
    n: usize,
    gens: Vec<u32>,
    radical_taken: bool,
    name: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealFileIn {
    variables: usize,
    generators: Vec<Vec<u64>>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Serialize)]
struct IdealFileOut<'a> {
    variables: usize,
    generators: Vec<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
}

impl MonomialIdeal {
    /// Builds an ideal from exponent vectors; non-squarefree input is replaced by its radical.
    pub fn from_exponents(n: usize, gens: &[Vec<u64>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("at least one variable is required".into()));
        }
        if n > HARD_MAX_VARS {
            return Err(Error::TooManyVariables { n, max: HARD_MAX_VARS });
        }
        let mut radical_taken = false;
        let mut masks = Vec::with_capacity(gens.len());
        for (k, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(Error::Malformed(format!(
                    "generator {} has {} exponents, expected {n}",
                    k + 1,
                    g.len()
                )));
            }
            let mut m = 0u32;
            for (i, &e) in g.iter().enumerate() {
                if e > 0 {
                    m |= 1 << i;
                }
                if e > 1 {
                    radical_taken = true;
                }
            }
            masks.push(m);
        }
        let mut ideal = Self::from_masks(n, &masks)?;
        ideal.radical_taken = radical_taken;
        Ok(ideal)
    }

    /// From generator supports as 1-based variable lists.
    pub fn from_supports(n: usize, gens: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(gens.len());
        for g in gens {
            let mut m = 0u32;
            for &v in g {
                if v == 0 || v > n {
                    return Err(Error::VariableOutOfRange { index: v, n });
                }
                m |= 1 << (v - 1);
            }
            masks.push(m);
        }
        Self::from_masks(n, &masks)
    }

    pub fn from_masks(n: usize, masks: &[u32]) -> Result<Self> {
        if n == 0 || n > HARD_MAX_VARS {
            return Err(Error::TooManyVariables { n, max: HARD_MAX_VARS });
        }
        if masks.iter().any(|&m| m >> n != 0) {
            return Err(Error::Malformed("generator uses a variable beyond n".into()));
        }
        let mut gens: Vec<u32> = Vec::new();
        let mut sorted = masks.to_vec();
        sorted.sort_by_key(|m| (m.count_ones(), *m));
        sorted.dedup();
        for m in sorted {
            if !gens.iter().any(|&g| g & !m == 0) {
                gens.push(m);
            }
        }
        if gens.len() > MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                r: gens.len(),
                max: MAX_GENERATORS,
            });
        }
        gens.sort_by_key(|&m| std::cmp::Reverse(lex_key(m, n)));
        Ok(MonomialIdeal {
            n,
            gens,
            radical_taken: false,
            name: None,
        })
    }

    pub fn zero(n: usize) -> Self {
        MonomialIdeal {
            n,
            gens: Vec::new(),
            radical_taken: false,
            name: None,
        }
    }

    pub fn unit(n: usize) -> Self {
        MonomialIdeal {
            n,
            gens: vec![0],
            radical_taken: false,
            name: None,
        }
    }

    /// `(x_1, ..., x_n)`.
    pub fn maximal(n: usize) -> Self {
        Self::from_masks(n, &(0..n).map(|i| 1 << i).collect::<Vec<_>>())
            .unwrap()
            .named("maximal")
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Parses the JSON ideal format `{"variables": n, "generators": [[e_1..e_n], ...], "name": ...}`.
    pub fn parse(text: &str) -> Result<Self> {
        let f: IdealFileIn = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let mut ideal = Self::from_exponents(f.variables, &f.generators)?;
        ideal.name = f.name;
        Ok(ideal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&IdealFileOut {
            variables: self.n,
            generators: self.exponent_vectors(),
            name: self.name.as_deref(),
        })
        .expect("ideal serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Generator supports as bitmasks, canonical order.
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn radical_taken(&self) -> bool {
        self.radical_taken
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.contains(&0)
    }

    pub fn exponent_vectors(&self) -> Vec<Vec<u64>> {
        self.gens
            .iter()
            .map(|&m| (0..self.n).map(|i| u64::from(m >> i & 1)).collect())
            .collect()
    }

    /// Union of generator supports over a set of 1-based generator indices.
    pub fn lcm_support(&self, gens: &[usize]) -> Result<DegreeClass> {
        let mut m = 0;
        for &g in gens {
            if g == 0 || g > self.gens.len() {
                return Err(Error::Malformed(format!("generator index {g} out of range")));
            }
            m |= self.gens[g - 1];
        }
        Ok(DegreeClass(m))
    }

    /// Extension to `S_{x_v : v in vars}`: those variables become units.
    pub fn invert_variables(&self, vars: DegreeClass) -> MonomialIdeal {
        let masks: Vec<u32> = self.gens.iter().map(|&m| m & !vars.mask()).collect();
        let mut out = Self::from_masks(self.n, &masks).expect("same variable count");
        out.radical_taken = self.radical_taken;
        out
    }

    /// Relabels variable `i` (0-based) as `perm[i]`.
    pub fn permute_variables(&self, perm: &[usize]) -> MonomialIdeal {
        let masks: Vec<u32> = self
            .gens
            .iter()
            .map(|&m| {
                (0..self.n)
                    .filter(|&i| m >> i & 1 == 1)
                    .fold(0, |acc, i| acc | (1 << perm[i]))
            })
            .collect();
        Self::from_masks(self.n, &masks).expect("permutation keeps shape")
    }

    /// Krull dimension of `k[x]/I`: the largest face of the Stanley–Reisner complex plus one.
    /// `None` for the unit ideal.
    pub fn quotient_dimension(&self) -> Option<usize> {
        if self.is_unit() {
            return None;
        }
        let mut best = 0;
        for f in 0..1u32 << self.n {
            if f.count_ones() as usize > best && self.gens.iter().all(|&g| g & !f != 0) {
                best = f.count_ones() as usize;
            }
        }
        Some(best)
    }

    pub fn height(&self) -> Option<usize> {
        self.quotient_dimension().map(|d| self.n - d)
    }

    /// Stanley–Reisner complex: sets containing no generator support.
    pub fn stanley_reisner_complex(&self) -> SimplicialComplex {
        let faces = (0..1u32 << self.n)
            .filter(|&f| self.gens.iter().all(|&g| g & !f != 0))
            .collect();
        SimplicialComplex { n: self.n, faces }
    }
}

impl PartialEq for MonomialIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.gens == other.gens
    }
}

impl Eq for MonomialIdeal {}

impl std::hash::Hash for MonomialIdeal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.gens.hash(state);
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    DegreeClass(m)
                        .vars()
                        .iter()
                        .map(|v| format!("x{v}"))
                        .collect::<String>()
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in Z[x1..x{}]", self.n)
    }
}

/// Supports of the ten generators in the numbering used for the auxiliary ideals.
pub const REISNER_MU: [[usize; 3]; 10] = [
    [1, 2, 3],
    [1, 2, 4],
    [1, 3, 5],
    [1, 4, 6],
    [1, 5, 6],
    [2, 3, 6],
    [2, 5, 6],
    [2, 4, 5],
    [3, 4, 5],
    [3, 4, 6],
];

/// The ten-generator ideal in `Z[x1..x6]` of the six-vertex projective plane.
pub fn builtin_reisner() -> MonomialIdeal {
    let gens: Vec<Vec<usize>> = REISNER_MU.iter().map(|g| g.to_vec()).collect();
    MonomialIdeal::from_supports(6, &gens).unwrap().named("reisner")
}

/// `(xy, xz, yz)` in `Z[x,y,z]`: three coordinate axes.
pub fn builtin_three_points() -> MonomialIdeal {
    MonomialIdeal::from_supports(3, &[vec![1, 2], vec![1, 3], vec![2, 3]])
        .unwrap()
        .named("three-points")
}

pub fn builtin(name: &str) -> Option<MonomialIdeal> {
    match name {
        "reisner" => Some(builtin_reisner()),
        "three-points" => Some(builtin_three_points()),
        "x1" => Some(MonomialIdeal::from_supports(1, &[vec![1]]).unwrap().named("x1")),
        "x1x2" => Some(MonomialIdeal::from_supports(2, &[vec![1, 2]]).unwrap().named("x1x2")),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["reisner", "three-points", "x1", "x1x2"];

/// Auxiliary ideal from the support argument for the ten-generator example.
#[derive(Clone, Debug)]
pub struct AuxIdeal {
    pub label: String,
    /// 1-based generator numbers in the `REISNER_MU` numbering.
    pub mu: Vec<usize>,
    pub ideal: MonomialIdeal,
    /// Set for the localized ideals: the `mu` generator whose variables are inverted.
    pub inverted: Option<usize>,
}

/// Statement in the source text that disagrees with the definitions it follows.
#[derive(Clone, Debug, Serialize)]
pub struct TextDiscrepancy {
    pub label: String,
    pub stated: Vec<usize>,
    pub by_definition: Vec<usize>,
}

/// `a_j = (mu_{j+1..10})`, `b_j = a_j` with `mu_j` inverted (`1 <= j <= 7`),
/// `c_j = (mu_{1..j-1})`, `d_j = c_j` with `mu_j` inverted (`3 <= j <= 10`).
pub fn auxiliary_ideals() -> (Vec<AuxIdeal>, Vec<TextDiscrepancy>) {
    let mu = |k: usize| REISNER_MU[k - 1].to_vec();
    let mk = |ks: &[usize]| MonomialIdeal::from_supports(6, &ks.iter().map(|&k| mu(k)).collect::<Vec<_>>()).unwrap();
    let mut out = Vec::new();
    for j in 1..=7 {
        let ks: Vec<usize> = (j + 1..=10).collect();
        let a = mk(&ks);
        let b = a.invert_variables(DegreeClass::from_vars(&mu(j)));
        out.push(AuxIdeal {
            label: format!("a_{j}"),
            mu: ks.clone(),
            ideal: a,
            inverted: None,
        });
        out.push(AuxIdeal {
            label: format!("b_{j}"),
            mu: ks,
            ideal: b,
            inverted: Some(j),
        });
    }
    for j in 3..=10 {
        let ks: Vec<usize> = (1..j).collect();
        let c = mk(&ks);
        let d = c.invert_variables(DegreeClass::from_vars(&mu(j)));
        out.push(AuxIdeal {
            label: format!("c_{j}"),
            mu: ks.clone(),
            ideal: c,
            inverted: None,
        });
        out.push(AuxIdeal {
            label: format!("d_{j}"),
            mu: ks,
            ideal: d,
            inverted: Some(j),
        });
    }
    let disc = vec![
        TextDiscrepancy {
            label: "a_7".into(),
            stated: vec![1, 2, 3],
            by_definition: vec![8, 9, 10],
        },
        TextDiscrepancy {
            label: "c_4".into(),
            stated: vec![8, 9, 10],
            by_definition: vec![1, 2, 3],
        },
    ];
    (out, disc)
}

/// Random squarefree ideal with `r` nonzero generators (before minimalization).
pub fn random_squarefree_ideal<R: Rng>(rng: &mut R, n: usize, r: usize) -> MonomialIdeal {
    let masks: Vec<u32> = (0..r).map(|_| rng.gen_range(1..1u32 << n)).collect();
    MonomialIdeal::from_masks(n, &masks).unwrap()
}

/// Finite simplicial complex on vertices `0..n`, stored as its full face set (including the empty face).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    faces: BTreeSet<u32>,
}

impl SimplicialComplex {
    pub fn from_facets(n: usize, facets: &[u32]) -> Self {
        let mut faces = BTreeSet::new();
        for &f in facets {
            let mut s = f;
            loop {
                faces.insert(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & f;
            }
        }
        SimplicialComplex { n, faces }
    }

    /// Complex with no faces at all.
    pub fn void(n: usize) -> Self {
        SimplicialComplex {
            n,
            faces: BTreeSet::new(),
        }
    }

    /// Six-vertex triangulation of the real projective plane.
    pub fn projective_plane() -> Self {
        let facets: Vec<u32> = REISNER_MU.iter().map(|g| DegreeClass::from_vars(g).mask()).collect();
        Self::from_facets(6, &facets)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> impl Iterator<Item = u32> + '_ {
        self.faces.iter().copied()
    }

    pub fn contains(&self, face: u32) -> bool {
        self.faces.contains(&face)
    }

    /// `-1` for `{empty}`, `None` for the void complex.
    pub fn dimension(&self) -> Option<isize> {
        self.faces.iter().map(|f| f.count_ones() as isize - 1).max()
    }

    /// Faces contained in `vertices`.
    pub fn induced(&self, vertices: DegreeClass) -> Self {
        let faces = self
            .faces
            .iter()
            .copied()
            .filter(|f| f & !vertices.mask() == 0)
            .collect();
        SimplicialComplex { n: self.n, faces }
    }

    /// `{[n] - F : F not a face}`.
    pub fn alexander_dual(&self) -> Self {
        let full = DegreeClass::full(self.n).mask();
        let faces = (0..1u32 << self.n)
            .filter(|f| !self.faces.contains(f))
            .map(|f| full & !f)
            .collect();
        SimplicialComplex { n: self.n, faces }
    }

    /// Augmented cochain complex; term `t` is spanned by faces with `t` vertices.
    pub fn reduced_cochain_complex(&self) -> FreeComplex {
        let top = self.n;
        let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
        for &f in &self.faces {
            by_size[f.count_ones() as usize].push(f);
        }
        let ranks: Vec<usize> = by_size.iter().map(Vec::len).collect();
        let diffs = (0..top)
            .map(|t| {
                let target = &by_size[t + 1];
                let mut d = IntMatrix::zeros(target.len(), by_size[t].len());
                for (j, &f) in by_size[t].iter().enumerate() {
                    for v in 0..self.n {
                        if f >> v & 1 == 1 {
                            continue;
                        }
                        let g = f | (1 << v);
                        if let Ok(i) = target.binary_search(&g) {
                            let below = (f & ((1u32 << v) - 1)).count_ones();
                            let s = if below.is_multiple_of(2) {
                                BigInt::one()
                            } else {
                                -BigInt::one()
                            };
                            d.set(i, j, s);
                        }
                    }
                }
                d
            })
            .collect();
        FreeComplex::new(ranks, diffs).expect("coboundary squares to zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_minimality() {
        let i = MonomialIdeal::from_supports(3, &[vec![2, 3], vec![1, 2, 3], vec![1, 2], vec![1, 3]]).unwrap();
        assert_eq!(i.to_string(), "(x1x2, x1x3, x2x3)");
        let r = builtin_reisner();
        assert_eq!(r.num_generators(), 10);
        assert_eq!(r.lcm_support(&[1]).unwrap().vars(), vec![1, 2, 3]);
        assert_eq!(r.lcm_support(&[1, 10]).unwrap().vars(), vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn parse_takes_radical() {
        let i = MonomialIdeal::parse(r#"{"variables": 2, "generators": [[2, 1]]}"#).unwrap();
        assert!(i.radical_taken());
        assert_eq!(i.to_string(), "(x1x2)");
        assert!(MonomialIdeal::parse(r#"{"variables": 2, "generators": [[1]]}"#).is_err());
        assert!(MonomialIdeal::parse(r#"{"variables": 2, "generators": [[-1, 0]]}"#).is_err());
        assert!(MonomialIdeal::parse(r#"{"variables": 2, "generators": [[0, 0]]}"#)
            .unwrap()
            .is_unit());
        assert!(MonomialIdeal::parse(r#"{"variables": 2, "generators": []}"#)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn classes_in_size_then_lex_order() {
        let c: Vec<String> = all_degree_classes(2).iter().map(|c| c.to_string()).collect();
        assert_eq!(c, vec!["{}", "{1}", "{2}", "{1,2}"]);
    }

    #[test]
    fn reisner_dimension_and_symmetry() {
        let r = builtin_reisner();
        assert_eq!(r.quotient_dimension(), Some(3));
        // x1 <-> x3, x4 <-> x6
        assert_eq!(r.permute_variables(&[2, 1, 0, 5, 4, 3]), r);
    }

    #[test]
    fn json_roundtrip() {
        let r = builtin_reisner();
        assert_eq!(MonomialIdeal::parse(&r.to_json()).unwrap(), r);
    }
}
