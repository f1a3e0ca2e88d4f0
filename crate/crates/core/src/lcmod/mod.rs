//! Local cohomology of squarefree monomial ideals as window modules, with
//! supports, associated primes, bad primes and iterated local cohomology.

mod window;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cech::{check_prime, graded_cech, inclusion_map, stable_p_colimit};
use crate::exactlinalg::{
    complex_cohomology, fp_cohomology, induced_map, CohomologyGroup, FinAbGroup, FpCohomology, FpMatrix, GroupMap,
    IntMatrix, Lattice, MixedAbGroup, ReducedComplex, Subquotient,
};
use crate::monomial::{DegreeClass, MonomialIdeal};
use crate::{Error, Result};

pub(crate) use window::stacked;
pub use window::{Coefficients, Piece, PieceShape, WindowModule};

/// Reduced Čech pieces of one ideal with the reduced variable actions between them.
pub struct LcContext {
    ideal: MonomialIdeal,
    reduced: Vec<ReducedComplex>,
    /// `actions[σ][i][k]`: `x_i` on degree `k`, from the piece at `σ` to the piece at `σ∖i`.
    actions: Vec<Vec<Option<Vec<IntMatrix>>>>,
    cohomology: Vec<Vec<CohomologyGroup>>,
    dual_cohomology: OnceLock<Vec<Vec<CohomologyGroup>>>,
}

impl LcContext {
    pub fn new(ideal: &MonomialIdeal) -> Result<LcContext> {
        let n = ideal.n();
        let pieces: Vec<_> = (0..1u32 << n)
            .into_par_iter()
            .map(|s| graded_cech(ideal, DegreeClass::from_mask(s)))
            .collect();
        let reduced: Vec<ReducedComplex> = pieces.par_iter().map(|p| p.reduced()).collect();
        let actions = (0..1usize << n)
            .into_par_iter()
            .map(|s| {
                (0..n)
                    .map(|i| {
                        if s >> i & 1 == 0 {
                            return Ok(None);
                        }
                        let t = s & !(1 << i);
                        let inc = inclusion_map(&pieces[s], &pieces[t])?;
                        Ok(Some(
                            inc.maps
                                .iter()
                                .enumerate()
                                .map(|(k, m)| reduced[s].transfer(k, m, &reduced[t]))
                                .collect(),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let cohomology = reduced
            .par_iter()
            .map(|r| complex_cohomology(r.complex()))
            .collect::<Result<Vec<_>>>()?;
        Ok(LcContext {
            ideal: ideal.clone(),
            reduced,
            actions,
            cohomology,
            dual_cohomology: OnceLock::new(),
        })
    }

    pub fn ideal(&self) -> &MonomialIdeal {
        &self.ideal
    }

    pub fn n(&self) -> usize {
        self.ideal.n()
    }

    /// Length of the Čech complex (number of generators).
    pub fn top(&self) -> usize {
        self.reduced[0].complex().top()
    }

    /// `H^j_I(S)` for one `j`.
    pub fn local_cohomology(&self, j: usize) -> Result<WindowModule> {
        let n = self.n();
        if j > self.top() {
            return Ok(WindowModule::integral_unchecked(
                n,
                vec![FinAbGroup::zero(); 1 << n],
                zero_maps(n, &vec![FinAbGroup::zero(); 1 << n]),
            ));
        }
        let groups: Vec<FinAbGroup> = self.cohomology.iter().map(|h| h[j].group().without_lift()).collect();
        let maps = (0..1usize << n)
            .into_par_iter()
            .map(|s| {
                (0..n)
                    .map(|i| match &self.actions[s][i] {
                        None => Ok(None),
                        Some(a) => {
                            let t = s & !(1 << i);
                            induced_map(&a[j], &self.cohomology[s][j], &self.cohomology[t][j]).map(Some)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowModule::integral_unchecked(n, groups, maps))
    }

    /// `H^j_I(S)` for `j = 0..=#generators`.
    pub fn all_local_cohomology(&self) -> Result<Vec<WindowModule>> {
        (0..=self.top()).map(|j| self.local_cohomology(j)).collect()
    }

    /// `H^j_I(S/pS)`, computed from the Čech complex tensored with `F_p`.
    pub fn local_cohomology_mod_p(&self, j: usize, p: u64) -> Result<WindowModule> {
        check_prime(p)?;
        let n = self.n();
        if j > self.top() {
            return WindowModule::mod_prime(n, p, vec![0; 1 << n], fp_zero_maps(n, p, &vec![0; 1 << n]));
        }
        let coh: Vec<FpCohomology> = self
            .reduced
            .par_iter()
            .map(|r| fp_cohomology(r.complex(), p).swap_remove(j))
            .collect();
        let dims: Vec<usize> = coh.iter().map(FpCohomology::dim).collect();
        let maps = (0..1usize << n)
            .into_par_iter()
            .map(|s| {
                (0..n)
                    .map(|i| match &self.actions[s][i] {
                        None => Ok(None),
                        Some(a) => {
                            let t = s & !(1 << i);
                            let f = FpMatrix::from_int(&a[j], p);
                            let cols = coh[s]
                                .representatives()
                                .iter()
                                .map(|v| coh[t].express(&f.mul_vec(v)))
                                .collect::<Result<Vec<_>>>()?;
                            Ok(Some(FpMatrix::from_columns(p, dims[t], &cols)))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        WindowModule::mod_prime(n, p, dims, maps)
    }

    /// Truncation exponent `1 + max v_p` over all integral pieces.
    pub fn trunc_exponent(&self, p: u64) -> u32 {
        1 + self
            .cohomology
            .iter()
            .flatten()
            .map(|h| h.group().max_valuation(p))
            .max()
            .unwrap_or(0)
    }

    fn duals(&self) -> Result<&Vec<Vec<CohomologyGroup>>> {
        if let Some(d) = self.dual_cohomology.get() {
            return Ok(d);
        }
        let d = self
            .reduced
            .par_iter()
            .map(|r| complex_cohomology(&r.complex().dual()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.dual_cohomology.get_or_init(|| d))
    }

    /// `H^j_{I+pS}(S)` for `j = 0..=#generators+1`.
    ///
    /// Groups and actions come from Pontryagin duals; every class is checked against the
    /// truncated cone computation, which fails with [`Error::TruncationUnstable`] if the
    /// truncation level does not stabilize.
    pub fn local_cohomology_plus_p(&self, p: u64, trunc: Option<u32>) -> Result<Vec<WindowModule>> {
        check_prime(p)?;
        let n = self.n();
        let l = self.top();
        let trunc = trunc.unwrap_or_else(|| self.trunc_exponent(p));
        let duals = self.duals()?;
        let cones: Vec<Vec<MixedAbGroup>> = self
            .reduced
            .par_iter()
            .map(|r| stable_p_colimit(&r.complex().as_group_complex(), p, trunc))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(l + 2);
        for j in 0..=l + 1 {
            if j == 0 {
                let z = vec![FinAbGroup::zero(); 1 << n];
                let maps = dual_zero_maps(n, &z);
                out.push(WindowModule::mixed_unchecked(n, p, trunc, z, maps));
                continue;
            }
            let s_deg = l - (j - 1);
            let groups: Vec<FinAbGroup> = duals.iter().map(|h| h[s_deg].group().without_lift()).collect();
            let maps = (0..1usize << n)
                .into_par_iter()
                .map(|s| {
                    (0..n)
                        .map(|i| match &self.actions[s][i] {
                            None => Ok(None),
                            Some(a) => {
                                let t = s & !(1 << i);
                                induced_map(&a[j - 1].transpose(), &duals[t][s_deg], &duals[s][s_deg]).map(Some)
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let w = WindowModule::mixed_unchecked(n, p, trunc, groups, maps);
            for sigma in w.classes() {
                let a = w.mixed_group(sigma).unwrap();
                let b = &cones[sigma.mask() as usize][j];
                if !a.same_isomorphism_type(b) {
                    return Err(Error::Internal(format!(
                        "H^{j}_(I+{p}S) at class {sigma}: dual route gives {a}, cone route gives {b}"
                    )));
                }
            }
            out.push(w);
        }
        Ok(out)
    }

    /// Primes dividing some torsion coefficient of some `H^j_I(S)_σ`.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut w = BTreeSet::new();
        for h in self.cohomology.iter().flatten() {
            w.extend(h.group().torsion_primes());
        }
        w.into_iter().collect()
    }
}

fn zero_maps(n: usize, groups: &[FinAbGroup]) -> Vec<Vec<Option<GroupMap>>> {
    (0..1usize << n)
        .map(|s| {
            (0..n)
                .map(|i| (s >> i & 1 == 1).then(|| GroupMap::zero(&groups[s], &groups[s & !(1 << i)])))
                .collect()
        })
        .collect()
}

fn dual_zero_maps(n: usize, duals: &[FinAbGroup]) -> Vec<Vec<Option<GroupMap>>> {
    (0..1usize << n)
        .map(|s| {
            (0..n)
                .map(|i| (s >> i & 1 == 1).then(|| GroupMap::zero(&duals[s & !(1 << i)], &duals[s])))
                .collect()
        })
        .collect()
}

fn fp_zero_maps(n: usize, p: u64, dims: &[usize]) -> Vec<Vec<Option<FpMatrix>>> {
    (0..1usize << n)
        .map(|s| {
            (0..n)
                .map(|i| (s >> i & 1 == 1).then(|| FpMatrix::zeros(p, dims[s & !(1 << i)], dims[s])))
                .collect()
        })
        .collect()
}

/// `H^j_I(S)` for `j = 0..=#generators`.
pub fn local_cohomology(ideal: &MonomialIdeal) -> Result<Vec<WindowModule>> {
    LcContext::new(ideal)?.all_local_cohomology()
}

/// `H^j_{I+pS}(S)` for `j = 0..=#generators+1`.
pub fn local_cohomology_plus_p(ideal: &MonomialIdeal, p: u64) -> Result<Vec<WindowModule>> {
    LcContext::new(ideal)?.local_cohomology_plus_p(p, None)
}

/// Primes that are zero divisors on some `H^j_I(S)`.
pub fn bad_primes(ideal: &MonomialIdeal) -> Result<Vec<u64>> {
    Ok(LcContext::new(ideal)?.bad_primes())
}

/// A graded prime `P_τ = (x_i : i ∈ τ)`, plus `(ℓ)` when `characteristic = ℓ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GradedPrime {
    pub tau: DegreeClass,
    pub characteristic: u64,
}

impl GradedPrime {
    pub fn new(tau: DegreeClass, characteristic: u64) -> Self {
        GradedPrime { tau, characteristic }
    }

    /// Height in `Z[x_1..x_n]`.
    pub fn height(&self) -> usize {
        self.tau.len() + usize::from(self.characteristic > 0)
    }

    /// Whether `self ⊆ other` as ideals.
    pub fn is_contained_in(&self, other: &GradedPrime) -> bool {
        self.tau.is_subset_of(other.tau) && (self.characteristic == 0 || self.characteristic == other.characteristic)
    }
}

impl fmt::Display for GradedPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.tau.vars().iter().map(|i| format!("x{i}")).collect();
        let mut parts = xs;
        if self.characteristic > 0 {
            parts.insert(0, self.characteristic.to_string());
        }
        write!(f, "({})", parts.join(", "))
    }
}

/// Graded primes at which a module localizes to something nonzero.
///
/// A characteristic-zero entry `(τ, 0)` implies `(τ, ℓ)` for every `ℓ`; those are not listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportDescriptor {
    pub n: usize,
    pub primes: Vec<GradedPrime>,
}

impl SupportDescriptor {
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, tau: DegreeClass, characteristic: u64) -> bool {
        self.primes
            .iter()
            .any(|q| q.tau == tau && (q.characteristic == characteristic || q.characteristic == 0))
    }

    /// Krull dimension of the support inside `Spec Z[x_1..x_n]`.
    pub fn dim_ambient(&self) -> Option<usize> {
        self.primes.iter().map(|q| self.n + 1 - q.height()).max()
    }

    /// Dimension of the support after localizing at `m = (p, x_1..x_n)`.
    pub fn dim_local(&self, p: u64) -> Option<usize> {
        self.primes
            .iter()
            .filter(|q| q.characteristic == 0 || q.characteristic == p)
            .map(|q| self.n + 1 - q.height())
            .max()
    }

    /// Minimal primes of the support (with characteristic-zero entries taken generically).
    pub fn minimal(&self) -> Vec<GradedPrime> {
        self.primes
            .iter()
            .filter(|q| !self.primes.iter().any(|r| r != *q && r.is_contained_in(q)))
            .copied()
            .collect()
    }
}

/// Support of a window module over graded primes.
pub fn support(h: &WindowModule) -> SupportDescriptor {
    let n = h.n();
    let mut primes = BTreeSet::new();
    for tau in h.classes() {
        let below: Vec<Piece> = h
            .classes()
            .filter(|s| s.is_subset_of(tau))
            .map(|s| h.piece(s))
            .collect();
        if below.iter().any(|g| g.rational_rank() > 0) {
            primes.insert(GradedPrime::new(tau, 0));
            continue;
        }
        for g in &below {
            for l in g.torsion_primes() {
                primes.insert(GradedPrime::new(tau, l));
            }
        }
    }
    let mut primes: Vec<GradedPrime> = primes.into_iter().collect();
    primes.sort_by_key(|q| (q.tau.len(), q.tau.vars(), q.characteristic));
    SupportDescriptor { n, primes }
}

/// `H` with `x_var` (0-based) inverted.
pub fn localize(h: &WindowModule, var: usize) -> WindowModule {
    h.localize(var)
}

/// Where multiplication by `p` fails to be injective or surjective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultPWitness {
    pub class: DegreeClass,
    /// Generator index in the class group and a description of the element.
    pub generator: usize,
    pub element: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultPStatus {
    pub p: u64,
    pub injective: bool,
    pub surjective: bool,
    pub injective_witness: Option<MultPWitness>,
    pub surjective_witness: Option<MultPWitness>,
}

/// Multiplication by `p` on every class group.
pub fn mult_p_status(h: &WindowModule, p: u64) -> MultPStatus {
    let mut inj = None;
    let mut sur = None;
    for sigma in crate::monomial::all_degree_classes(h.n()) {
        let piece = h.piece(sigma);
        if inj.is_none() && piece.ker_dim(p) > 0 {
            inj = Some(kernel_witness(&piece, sigma, p));
        }
        if sur.is_none() && piece.coker_dim(p) > 0 {
            sur = Some(cokernel_witness(&piece, sigma, p));
        }
    }
    MultPStatus {
        p,
        injective: inj.is_none(),
        surjective: sur.is_none(),
        injective_witness: inj,
        surjective_witness: sur,
    }
}

fn kernel_witness(piece: &Piece, class: DegreeClass, p: u64) -> MultPWitness {
    let pb = BigInt::from(p);
    match piece {
        Piece::Integral(g) => {
            let k = g.torsion().iter().position(|d| (d % &pb).is_zero()).unwrap();
            let d = &g.torsion()[k];
            let generator = g.free_rank() + k;
            MultPWitness {
                class,
                generator,
                element: format!("{} * e{generator} (order {p})", d / &pb),
            }
        }
        Piece::ModPrime { .. } => MultPWitness {
            class,
            generator: 0,
            element: "e0".into(),
        },
        Piece::Mixed(g) => {
            if g.divisible_corank() > 0 {
                MultPWitness {
                    class,
                    generator: 0,
                    element: format!("1/{p} in Z({p}^inf) summand 0"),
                }
            } else {
                let d = &g.torsion()[0];
                MultPWitness {
                    class,
                    generator: 0,
                    element: format!("{} * e0 (order {p})", d / &pb),
                }
            }
        }
    }
}

fn cokernel_witness(piece: &Piece, class: DegreeClass, p: u64) -> MultPWitness {
    let pb = BigInt::from(p);
    match piece {
        Piece::Integral(g) => {
            let generator = if g.free_rank() > 0 {
                0
            } else {
                g.free_rank() + g.torsion().iter().position(|d| (d % &pb).is_zero()).unwrap()
            };
            MultPWitness {
                class,
                generator,
                element: format!("e{generator} not in {p}G"),
            }
        }
        Piece::ModPrime { .. } => MultPWitness {
            class,
            generator: 0,
            element: format!("e0 not in {p}G"),
        },
        Piece::Mixed(g) => {
            let generator = g.divisible_corank();
            MultPWitness {
                class,
                generator,
                element: format!("generator of the Z/{} summand not in {p}G", g.torsion()[0]),
            }
        }
    }
}

/// Finite, deduplicated set of associated graded primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssPrimeSet {
    pub primes: Vec<GradedPrime>,
}

impl AssPrimeSet {
    fn from_set(set: BTreeSet<GradedPrime>) -> Self {
        let mut primes: Vec<GradedPrime> = set.into_iter().collect();
        primes.sort_by_key(|q| (q.tau.len(), q.tau.vars(), q.characteristic));
        AssPrimeSet { primes }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, q: &GradedPrime) -> bool {
        self.primes.contains(q)
    }
}

/// Associated primes from the socle of each graded localization: `P` is associated iff `μ^0(P, H) ≠ 0`.
pub fn associated_primes(h: &WindowModule) -> Result<AssPrimeSet> {
    let mut set = BTreeSet::new();
    for tau in h.classes() {
        let s = h.socle(tau)?;
        if s.rational_rank() > 0 {
            set.insert(GradedPrime::new(tau, 0));
        }
        for l in s.torsion_primes() {
            set.insert(GradedPrime::new(tau, l));
        }
    }
    Ok(AssPrimeSet::from_set(set))
}

/// Same set by direct search: an element of some `G_σ`, `σ ⊇ τ`, killed by `x_τ` (and `ℓ`),
/// whose image under the remaining variables survives in `G_τ`.
pub fn associated_primes_by_scan(h: &WindowModule) -> Result<AssPrimeSet> {
    let classes: Vec<DegreeClass> = h.classes().collect();
    let mut set = BTreeSet::new();
    match h.coefficients() {
        Coefficients::Integral => {
            let mut chars: BTreeSet<u64> = BTreeSet::new();
            for &s in &classes {
                chars.extend(h.piece(s).torsion_primes());
            }
            for &tau in &classes {
                for &sigma in classes.iter().filter(|s| tau.is_subset_of(**s)) {
                    let g = h.integral_group(sigma).unwrap();
                    if g.is_zero() {
                        continue;
                    }
                    let u = composite_down(h, sigma, tau)?;
                    let killers: Vec<&GroupMap> = tau.indices().map(|i| h.action(sigma, i).unwrap()).collect();
                    if !set.contains(&GradedPrime::new(tau, 0)) {
                        let k = scan_kernel(g, &killers, None)?;
                        let img = GroupMap::new(&k.0, u.target(), u.matrix().mul(&k.1))?.image()?;
                        if img.free_rank() > 0 {
                            set.insert(GradedPrime::new(tau, 0));
                        }
                    }
                    for &l in &chars {
                        if set.contains(&GradedPrime::new(tau, l)) {
                            continue;
                        }
                        let (kg, lift) = scan_kernel(g, &killers, Some(l))?;
                        let img = u.matrix().mul(&lift);
                        let t = u.target();
                        if (0..kg.ngens()).any(|c| !t.is_zero_element(&img.column(c))) {
                            set.insert(GradedPrime::new(tau, l));
                        }
                    }
                }
            }
        }
        Coefficients::ModPrime(p) | Coefficients::Mixed(p) => {
            // work with the p-socle V_σ = G_σ[p] and the restricted actions over F_p
            let (dims, maps) = p_socle_window(h, p)?;
            for &tau in &classes {
                for &sigma in classes.iter().filter(|s| tau.is_subset_of(**s)) {
                    let d = dims[sigma.mask() as usize];
                    if d == 0 {
                        continue;
                    }
                    let rows: usize = tau.indices().map(|i| dims[sigma.without(i).mask() as usize]).sum();
                    let mut st = FpMatrix::zeros(p, rows, d);
                    let mut r0 = 0;
                    for i in tau.indices() {
                        let u = maps[sigma.mask() as usize][i].as_ref().unwrap();
                        for a in 0..u.rows() {
                            for b in 0..u.cols() {
                                st.set(r0 + a, b, u.get(a, b));
                            }
                        }
                        r0 += u.rows();
                    }
                    let kernel = st.nullspace();
                    let mut cur = sigma;
                    let mut vecs = kernel;
                    for i in sigma.indices().filter(|&i| !tau.contains(i)) {
                        let u = maps[cur.mask() as usize][i].as_ref().unwrap();
                        vecs = vecs.iter().map(|v| u.mul_vec(v)).collect();
                        cur = cur.without(i);
                    }
                    if vecs.iter().any(|v| v.iter().any(|&x| x != 0)) {
                        set.insert(GradedPrime::new(tau, p));
                        break;
                    }
                }
            }
        }
    }
    Ok(AssPrimeSet::from_set(set))
}

/// `U_{σ→τ}`: the actions of the variables in `σ∖τ`, composed in increasing order.
fn composite_down(h: &WindowModule, sigma: DegreeClass, tau: DegreeClass) -> Result<GroupMap> {
    let mut cur = sigma;
    let mut map = GroupMap::identity(h.integral_group(sigma).unwrap());
    for i in sigma.indices().filter(|&i| !tau.contains(i)) {
        map = h.action(cur, i).unwrap().compose(&map)?;
        cur = cur.without(i);
    }
    Ok(map)
}

/// Kernel of `g -> ⊕ targets (+ g via ℓ)` with generator lifts in `g`'s coordinates.
fn scan_kernel(g: &FinAbGroup, maps: &[&GroupMap], ell: Option<u64>) -> Result<(FinAbGroup, IntMatrix)> {
    let mut all: Vec<GroupMap> = maps.iter().map(|m| (*m).clone()).collect();
    if let Some(l) = ell {
        all.push(GroupMap::scalar(g, l));
    }
    if all.is_empty() {
        return Ok((g.without_lift(), IntMatrix::identity(g.ngens())));
    }
    let (a, r) = stacked(g.ngens(), all.iter());
    let sq = Subquotient::new(Lattice::Kernel { a: &a, r: &r }, &g.relations())?;
    Ok((sq.group.without_lift(), sq.gens().clone()))
}

type FpWindow = (Vec<usize>, Vec<Vec<Option<FpMatrix>>>);

/// `G_σ[p]` with the restricted actions, over `F_p`.
fn p_socle_window(h: &WindowModule, p: u64) -> Result<FpWindow> {
    let n = h.n();
    match h.coefficients() {
        Coefficients::ModPrime(_) => {
            let dims = h.classes().map(|s| h.piece(s).ker_dim(p)).collect();
            let maps = (0..1u32 << n)
                .map(|s| {
                    (0..n)
                        .map(|i| h.mod_prime_action(DegreeClass::from_mask(s), i).cloned())
                        .collect()
                })
                .collect();
            Ok((dims, maps))
        }
        Coefficients::Mixed(_) => {
            // G[p] is dual to D/pD; keep generators of D whose order is 0 or divisible by p
            let keep: Vec<Vec<usize>> = h
                .classes()
                .map(|s| {
                    let d = h.dual_group(s).unwrap();
                    let pb = BigInt::from(p);
                    (0..d.ngens())
                        .filter(|&k| k < d.free_rank() || (&d.torsion()[k - d.free_rank()] % &pb).is_zero())
                        .collect()
                })
                .collect();
            let dims: Vec<usize> = keep.iter().map(Vec::len).collect();
            let maps = (0..1usize << n)
                .map(|s| {
                    (0..n)
                        .map(|i| {
                            let dm = h.dual_action(DegreeClass::from_mask(s as u32), i)?;
                            let t = s & !(1 << i);
                            // (D_t/p -> D_s/p)^T : V_s -> V_t
                            let mut m = FpMatrix::zeros(p, dims[t], dims[s]);
                            for (a, &ka) in keep[t].iter().enumerate() {
                                for (b, &kb) in keep[s].iter().enumerate() {
                                    let x = dm.matrix().get(kb, ka);
                                    let r = ((x % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                                    m.set(a, b, u64::try_from(r).unwrap());
                                }
                            }
                            Some(m)
                        })
                        .collect()
                })
                .collect();
            Ok((dims, maps))
        }
        Coefficients::Integral => Err(Error::CoefficientMismatch(
            "integral module has no p-socle window".into(),
        )),
    }
}

/// Which maximal ideal the outer local cohomology is taken at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IteratedAt {
    /// `n = (x_1..x_n)`.
    N,
    /// `m = n + (p)`.
    M(u64),
}

/// How `H^i_m` of an integral module was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IteratedPath {
    Koszul,
    /// `H^i_m = H^1_p H^{i-1}_n`, valid when `H^i_n` has no `p`-torsion.
    Split,
    FullCone,
}

#[derive(Clone, Debug)]
pub struct IteratedLc {
    pub module: WindowModule,
    pub path: IteratedPath,
    /// Whether `H^i_n(H) -> H^i_n(H)[1/p]` is injective (integral input at `m` only).
    pub localization_injective: Option<bool>,
    pub split: Option<MixedAbGroup>,
    pub full_cone: Option<MixedAbGroup>,
}

/// `H^i_n(H)` or `H^i_m(H)` for a window module `H`; the result is concentrated in the class `{1..n}`.
pub fn iterated_lc(h: &WindowModule, at: IteratedAt, i: usize, trunc: Option<u32>) -> Result<IteratedLc> {
    let n = h.n();
    let full = DegreeClass::full(n);
    let k = h.koszul(full)?;
    let koszul_at = |i: usize| k.get(i).cloned();
    let plain = |path| -> Result<IteratedLc> {
        let module = match koszul_at(i) {
            None => zero_like(h),
            Some(Piece::Integral(g)) => WindowModule::concentrated_integral(n, g),
            Some(Piece::ModPrime { p, dim }) => WindowModule::concentrated_mod_prime(n, p, dim),
            Some(Piece::Mixed(g)) => WindowModule::concentrated_mixed(n, &g),
        };
        Ok(IteratedLc {
            module,
            path,
            localization_injective: None,
            split: None,
            full_cone: None,
        })
    };
    match (at, h.coefficients()) {
        (IteratedAt::N, _) => plain(IteratedPath::Koszul),
        (IteratedAt::M(p), Coefficients::ModPrime(q) | Coefficients::Mixed(q)) => {
            if p != q {
                return Err(Error::CoefficientMismatch(format!(
                    "module is {q}-primary but m contains {p}"
                )));
            }
            plain(IteratedPath::Koszul)
        }
        (IteratedAt::M(p), Coefficients::Integral) => {
            check_prime(p)?;
            let kc = h.koszul_integral_complex(full).expect("integral");
            let groups: Vec<FinAbGroup> = k
                .iter()
                .map(|x| match x {
                    Piece::Integral(g) => g.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let trunc = trunc.unwrap_or_else(|| 1 + groups.iter().map(|g| g.max_valuation(p)).max().unwrap_or(0));
            let cone = stable_p_colimit(&kc, p, trunc)?;
            let full_cone = cone.get(i).cloned().unwrap_or_else(|| MixedAbGroup::zero(p, trunc));
            let injective = groups.get(i).is_none_or(|g| !g.has_torsion_at(p));
            let corank = if i > 0 {
                groups.get(i - 1).map_or(0, FinAbGroup::free_rank)
            } else {
                0
            };
            let split = MixedAbGroup::new(p, trunc, corank, Vec::new())?;
            if injective && !split.same_isomorphism_type(&full_cone) {
                return Err(Error::Internal(format!(
                    "split path gives {split}, full cone gives {full_cone}"
                )));
            }
            Ok(IteratedLc {
                module: WindowModule::concentrated_mixed(n, &full_cone),
                path: if injective {
                    IteratedPath::Split
                } else {
                    IteratedPath::FullCone
                },
                localization_injective: Some(injective),
                split: injective.then_some(split),
                full_cone: Some(full_cone),
            })
        }
    }
}

fn zero_like(h: &WindowModule) -> WindowModule {
    let n = h.n();
    match h.coefficients() {
        Coefficients::Integral => WindowModule::concentrated_integral(n, FinAbGroup::zero()),
        Coefficients::ModPrime(p) => WindowModule::concentrated_mod_prime(n, p, 0),
        Coefficients::Mixed(p) => {
            WindowModule::concentrated_mixed(n, &MixedAbGroup::zero(p, h.trunc_exponent().unwrap_or(1)))
        }
    }
}

/// `true` iff an `m`-supported module is injective, i.e. divisible by `p`.
pub fn is_injective_m_supported(h: &WindowModule, p: u64) -> bool {
    mult_p_status(h, p).surjective
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::{builtin_reisner, builtin_three_points};

    #[test]
    fn maximal_ideal_top_cohomology() {
        let m = MonomialIdeal::maximal(3);
        let h = local_cohomology(&m).unwrap();
        for (j, w) in h.iter().enumerate() {
            let nz = w.nonzero_classes();
            if j == 3 {
                assert_eq!(nz, vec![DegreeClass::full(3)]);
                assert_eq!(w.piece(DegreeClass::full(3)).to_string(), "Z");
            } else {
                assert!(nz.is_empty(), "H^{j} = {nz:?}");
            }
        }
        let s = support(&h[3]);
        assert!(s.contains(DegreeClass::full(3), 0) && s.contains(DegreeClass::full(3), 7));
        let a = associated_primes(&h[3]).unwrap();
        assert_eq!(a.primes, vec![GradedPrime::new(DegreeClass::full(3), 0)]);
        assert_eq!(associated_primes_by_scan(&h[3]).unwrap(), a);
    }

    #[test]
    fn three_points() {
        let h = local_cohomology(&builtin_three_points()).unwrap();
        assert_eq!(h[2].piece(DegreeClass::full(3)).to_string(), "Z^2");
        assert!(bad_primes(&builtin_three_points()).unwrap().is_empty());
    }

    #[test]
    fn reisner_top_module() {
        let ctx = LcContext::new(&builtin_reisner()).unwrap();
        assert_eq!(ctx.bad_primes(), vec![2]);
        let h4 = ctx.local_cohomology(4).unwrap();
        assert_eq!(h4.nonzero_classes(), vec![DegreeClass::full(6)]);
        let s = support(&h4);
        assert_eq!(s.primes, vec![GradedPrime::new(DegreeClass::full(6), 2)]);
        let st = mult_p_status(&h4, 2);
        assert!(!st.injective && !st.surjective);
        for v in 3..6 {
            assert!(h4.localize(v).is_zero());
        }
        let a = associated_primes(&h4).unwrap();
        assert_eq!(a.primes, vec![GradedPrime::new(DegreeClass::full(6), 2)]);
        assert_eq!(associated_primes_by_scan(&h4).unwrap(), a);
        let h3 = ctx.local_cohomology(3).unwrap();
        assert!(mult_p_status(&h3, 5).injective);
        assert!(support(&h3).primes.iter().any(|q| q.characteristic == 0));
    }

    #[test]
    fn reisner_plus_two() {
        let ctx = LcContext::new(&builtin_reisner()).unwrap();
        let m = ctx.local_cohomology_plus_p(2, None).unwrap();
        for (j, w) in m.iter().enumerate() {
            assert_eq!(w.is_zero(), j != 4, "j = {j}");
        }
        assert!(!mult_p_status(&m[4], 2).surjective);
    }

    #[test]
    fn first_local_cohomology_of_a_variable() {
        let i = MonomialIdeal::from_supports(2, &[vec![1]]).unwrap();
        let h = local_cohomology(&i).unwrap();
        let st = mult_p_status(&h[1], 3);
        assert!(st.injective && !st.surjective);
        let a = associated_primes(&h[1]).unwrap();
        assert_eq!(a.primes, vec![GradedPrime::new(DegreeClass::from_vars(&[1]), 0)]);
        assert_eq!(associated_primes_by_scan(&h[1]).unwrap(), a);
        assert!(h[1].localize(0).is_zero());
    }

    #[test]
    fn iterated_on_the_ring() {
        let s = WindowModule::polynomial_ring(2);
        for i in 0..=2 {
            let r = iterated_lc(&s, IteratedAt::N, i, None).unwrap();
            assert_eq!(r.module.is_zero(), i != 2);
        }
        let r = iterated_lc(&s, IteratedAt::M(3), 3, None).unwrap();
        assert_eq!(r.path, IteratedPath::Split);
        assert_eq!(r.module.piece(DegreeClass::full(2)).to_string(), "Z(3^inf)");
    }
}
