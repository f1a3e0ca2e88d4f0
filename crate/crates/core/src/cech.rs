//! Graded pieces of Čech complexes of squarefree monomial ideals.
//!
//! For a class `σ` the piece `C(σ)` has basis the generator subsets `F` with
//! `σ ⊆ supp(lcm F)`; multiplication by `x_i` is the inclusion `C(σ) ⊆ C(σ∖i)`.

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::exactlinalg::{induced_map, ChainMap, FreeComplex, GroupComplex, IntMatrix, MixedAbGroup, ReducedComplex};
use crate::lcmod::{Piece, WindowModule};
use crate::monomial::{DegreeClass, MonomialIdeal};
use crate::{Error, Result};

/// Degenerate inputs that yield a trivial complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrivialFlag {
    ZeroIdeal,
    UnitIdeal,
}

/// Graded piece of the Čech complex on the generators of an ideal.
#[derive(Clone, Debug)]
pub struct GradedCechPiece {
    n: usize,
    gens: Vec<u32>,
    sigma: DegreeClass,
    /// `basis[k]`: generator subsets (bitmasks over generator positions) of size `k`, increasing.
    basis: Vec<Vec<u32>>,
    complex: FreeComplex,
    flag: Option<TrivialFlag>,
}

impl GradedCechPiece {
    pub fn sigma(&self) -> DegreeClass {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn complex(&self) -> &FreeComplex {
        &self.complex
    }

    /// Generator supports the complex was built from, in order.
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn basis(&self, k: usize) -> &[u32] {
        &self.basis[k]
    }

    /// 1-based generator positions of basis element `j` in degree `k`.
    pub fn label(&self, k: usize, j: usize) -> Vec<usize> {
        let f = self.basis[k][j];
        (0..self.gens.len())
            .filter(|&g| f >> g & 1 == 1)
            .map(|g| g + 1)
            .collect()
    }

    pub fn flag(&self) -> Option<TrivialFlag> {
        self.flag
    }

    /// Homotopy equivalent complex with all unit entries cancelled.
    pub fn reduced(&self) -> ReducedComplex {
        ReducedComplex::new(&self.complex)
    }
}

fn lcm_mask(gens: &[u32], f: u32) -> u32 {
    gens.iter()
        .enumerate()
        .filter(|(g, _)| f >> g & 1 == 1)
        .fold(0, |m, (_, s)| m | s)
}

/// Čech piece of `I` at `σ`.
pub fn graded_cech(ideal: &MonomialIdeal, sigma: DegreeClass) -> GradedCechPiece {
    let mut piece = graded_cech_from_generators(ideal.n(), ideal.generators(), sigma)
        .expect("canonical ideals have valid generators");
    piece.flag = if ideal.is_zero() {
        Some(TrivialFlag::ZeroIdeal)
    } else if ideal.is_unit() {
        Some(TrivialFlag::UnitIdeal)
    } else {
        None
    };
    piece
}

/// Same construction on an arbitrary (possibly redundant, unordered) generator list.
pub fn graded_cech_from_generators(n: usize, gens: &[u32], sigma: DegreeClass) -> Result<GradedCechPiece> {
    let r = gens.len();
    if r > crate::monomial::MAX_GENERATORS {
        return Err(Error::TooManyGenerators {
            r,
            max: crate::monomial::MAX_GENERATORS,
        });
    }
    if sigma.mask() >> n != 0 || gens.iter().any(|g| g >> n != 0) {
        return Err(Error::Malformed("class or generator outside the variable range".into()));
    }
    let mut basis: Vec<Vec<u32>> = vec![Vec::new(); r + 1];
    for f in 0..1u32 << r {
        if sigma.mask() & !lcm_mask(gens, f) == 0 {
            basis[f.count_ones() as usize].push(f);
        }
    }
    let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
    let diffs = (0..r)
        .map(|k| {
            let (src, tgt) = (&basis[k], &basis[k + 1]);
            let mut d = IntMatrix::zeros(tgt.len(), src.len());
            for (j, &f) in src.iter().enumerate() {
                for g in 0..r {
                    if f >> g & 1 == 1 {
                        continue;
                    }
                    let i = tgt
                        .binary_search(&(f | 1 << g))
                        .expect("supersets of basis elements survive");
                    let below = (f & ((1u32 << g) - 1)).count_ones();
                    d.set(
                        i,
                        j,
                        if below.is_multiple_of(2) {
                            BigInt::one()
                        } else {
                            -BigInt::one()
                        },
                    );
                }
            }
            d
        })
        .collect();
    let complex = FreeComplex::new(ranks, diffs)?;
    Ok(GradedCechPiece {
        n,
        gens: gens.to_vec(),
        sigma,
        basis,
        complex,
        flag: None,
    })
}

/// Basis inclusion `C(σ) -> C(τ)` for `τ ⊆ σ`.
pub fn inclusion_map(source: &GradedCechPiece, target: &GradedCechPiece) -> Result<ChainMap> {
    if source.gens != target.gens || !target.sigma.is_subset_of(source.sigma) {
        return Err(Error::Dimension(
            "inclusion needs the same generators and a smaller class".into(),
        ));
    }
    let maps = source
        .basis
        .iter()
        .zip(&target.basis)
        .map(|(s, t)| {
            let mut m = IntMatrix::zeros(t.len(), s.len());
            for (j, f) in s.iter().enumerate() {
                let i = t.binary_search(f).expect("basis of the larger class is contained");
                m.set(i, j, BigInt::one());
            }
            m
        })
        .collect();
    Ok(ChainMap { maps })
}

/// Multiplication by `x_var` (0-based) from the piece at `σ` to the piece at `σ∖var`.
pub fn action_map(ideal: &MonomialIdeal, sigma: DegreeClass, var: usize) -> Result<ChainMap> {
    if !sigma.contains(var) {
        return Err(Error::VariableNotInClass(var + 1));
    }
    inclusion_map(&graded_cech(ideal, sigma), &graded_cech(ideal, sigma.without(var)))
}

/// Graded piece of the Čech complex of `I + (p)`, with its cohomology as `p`-primary groups.
#[derive(Clone, Debug)]
pub struct ConeWithP {
    pub base: GradedCechPiece,
    pub p: u64,
    pub trunc_exponent: u32,
    /// `cohomology[k] = H^k_{I+pS}(S)_σ`, `k = 0..=r+1`.
    pub cohomology: Vec<MixedAbGroup>,
}

/// Truncation exponent `1 + max v_p` over the integral cohomology of every piece.
pub fn default_trunc_exponent(ideal: &MonomialIdeal, p: u64) -> Result<u32> {
    let mut v = 0;
    for s in crate::monomial::all_degree_classes(ideal.n()) {
        for h in crate::exactlinalg::complex_cohomology(graded_cech(ideal, s).reduced().complex())? {
            v = v.max(h.group().max_valuation(p));
        }
    }
    Ok(v + 1)
}

/// Čech piece of `I + (p)` at `σ`, computed on the chain level through truncated cones.
///
/// `trunc` defaults to [`default_trunc_exponent`]; the result is rechecked at `trunc + 1`.
pub fn cone_with_p(ideal: &MonomialIdeal, sigma: DegreeClass, p: u64, trunc: Option<u32>) -> Result<ConeWithP> {
    check_prime(p)?;
    let base = graded_cech(ideal, sigma);
    let n = match trunc {
        Some(n) => n,
        None => default_trunc_exponent(ideal, p)?,
    };
    let cohomology = stable_p_colimit(&base.reduced().complex().as_group_complex(), p, n)?;
    Ok(ConeWithP {
        base,
        p,
        trunc_exponent: n,
        cohomology,
    })
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `H^t` of `K (x) [Z -> Z[1/p]]` for every `t`, read off at level `n` and rechecked at `n + 1`.
pub(crate) fn stable_p_colimit(k: &GroupComplex, p: u64, n: u32) -> Result<Vec<MixedAbGroup>> {
    let a = p_colimit_at(k, p, n)?;
    let b = p_colimit_at(k, p, n + 1)?;
    for (t, (x, y)) in a.iter().zip(&b).enumerate() {
        if !x.same_isomorphism_type(y) {
            return Err(Error::TruncationUnstable {
                p,
                n,
                detail: format!("degree {t}: {x} at N={n} but {y} at N={}", n + 1),
            });
        }
    }
    Ok(a)
}

/// Image of `H(cone p^n)` in `H(cone p^2n)`: summands of order `p^n` are divisible.
fn p_colimit_at(k: &GroupComplex, p: u64, n: u32) -> Result<Vec<MixedAbGroup>> {
    let c = BigInt::from(p).pow(n);
    let c2 = &c * &c;
    let lo = k.cone_of_scalar(&c);
    let hi = k.cone_of_scalar(&c2);
    let trans = k.cone_transition(&c);
    (0..lo.len())
        .map(|t| {
            let h1 = lo.cohomology_at(t)?;
            let h2 = hi.cohomology_at(t)?;
            let img = induced_map(&trans[t], &h1, &h2)?.image()?;
            let (loc, _) = img.localize_at(p);
            MixedAbGroup::from_finite_model(&loc, p, n).map_err(|_| Error::TruncationUnstable {
                p,
                n,
                detail: format!("degree {t}: image {loc} exceeds the truncation level"),
            })
        })
        .collect()
}

/// Koszul cohomology of a window module on `x_τ`, and on `(p, x_τ)` when `p` is given.
#[derive(Clone, Debug)]
pub struct KoszulCohomology {
    /// `H^k(x_τ; M)` for `k = 0..=|τ|`.
    pub groups: Vec<Piece>,
    /// `dim_{F_p} H^k(p, x_τ; M)` for `k = 0..=|τ|+1`.
    pub with_p: Option<(u64, Vec<usize>)>,
}

/// The `(p, x_τ)` dimensions are produced by the two-step rule and rechecked on the full Koszul complex.
pub fn koszul_on_module(h: &WindowModule, tau: DegreeClass, p: Option<u64>) -> Result<KoszulCohomology> {
    h.check_commuting()?;
    let groups = h.koszul(tau)?;
    let with_p = match p {
        None => None,
        Some(p) => {
            check_prime(p)?;
            let a = h.koszul_with_prime(tau, p)?;
            let b = h.koszul_with_prime_direct(tau, p)?;
            if a != b {
                return Err(Error::Internal(format!(
                    "Koszul dimensions at {p}: {a:?} against {b:?}"
                )));
            }
            Some((p, a))
        }
    };
    Ok(KoszulCohomology { groups, with_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::complex_cohomology;
    use crate::monomial::builtin_reisner;

    fn groups(piece: &GradedCechPiece) -> Vec<String> {
        complex_cohomology(piece.complex())
            .unwrap()
            .iter()
            .map(|h| h.group().to_string())
            .collect()
    }

    #[test]
    fn one_variable() {
        let i = MonomialIdeal::from_supports(1, &[vec![1]]).unwrap();
        assert_eq!(groups(&graded_cech(&i, DegreeClass::from_vars(&[1]))), vec!["0", "Z"]);
        assert_eq!(groups(&graded_cech(&i, DegreeClass::EMPTY)), vec!["0", "0"]);
        let f = action_map(&i, DegreeClass::from_vars(&[1]), 0).unwrap();
        let src = graded_cech(&i, DegreeClass::from_vars(&[1]));
        let tgt = graded_cech(&i, DegreeClass::EMPTY);
        f.check(src.complex(), tgt.complex()).unwrap();
        assert!(action_map(&i, DegreeClass::EMPTY, 0).is_err());
    }

    #[test]
    fn reisner_top_piece() {
        let r = builtin_reisner();
        let h = groups(&graded_cech(&r, DegreeClass::full(6)));
        assert_eq!(h[4], "Z/2");
    }

    #[test]
    fn cone_over_the_base_ring() {
        // S = Z[x1], I = 0: at σ = ∅ the cone is H^1_{(p)}(Z).
        let zero = MonomialIdeal::zero(1);
        let c = cone_with_p(&zero, DegreeClass::EMPTY, 2, None).unwrap();
        assert_eq!(c.cohomology[1].to_string(), "Z(2^inf)");
        assert!(c.cohomology[0].is_zero());
        let x1 = MonomialIdeal::from_supports(1, &[vec![1]]).unwrap();
        let c = cone_with_p(&x1, DegreeClass::from_vars(&[1]), 3, None).unwrap();
        assert_eq!(c.cohomology[2].divisible_corank(), 1);
        assert!(check_prime(4).is_err() && check_prime(1).is_err() && check_prime(97).is_ok());
    }

    #[test]
    fn cone_detects_torsion() {
        let c = FreeComplex::new(vec![1, 1], vec![IntMatrix::from_rows(&[vec![3]])]).unwrap();
        let h = stable_p_colimit(&c.as_group_complex(), 3, 2).unwrap();
        assert_eq!(h[1].to_string(), "Z/3");
        assert!(h[2].is_zero());
        assert!(stable_p_colimit(&c.as_group_complex(), 3, 1).is_err());
    }

    #[test]
    fn koszul_on_the_ring_and_on_reisner() {
        let s = WindowModule::polynomial_ring(3);
        let k = koszul_on_module(&s, DegreeClass::full(3), Some(5)).unwrap();
        let ranks: Vec<usize> = k.groups.iter().map(|g| g.rational_rank()).collect();
        assert_eq!(ranks, vec![0, 0, 0, 1]);
        assert_eq!(k.with_p.unwrap().1, vec![0, 0, 0, 0, 1]);

        let ctx = crate::lcmod::LcContext::new(&builtin_reisner()).unwrap();
        let h4 = ctx.local_cohomology(4).unwrap();
        let k = koszul_on_module(&h4, DegreeClass::full(6), Some(2)).unwrap();
        let dims = k.with_p.unwrap().1;
        // the Z/2 at m has a socle, so H^0(2, x; M) is a line
        assert_eq!(&dims[..3], &[1, 1, 0]);
    }
}
