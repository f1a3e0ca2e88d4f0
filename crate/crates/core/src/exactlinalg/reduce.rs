//! Reduction of a free cochain complex by cancelling unit entries of its differentials.
//!
//! Each cancellation splits off a contractible summand `Z -u-> Z`; the projection
//! and inclusion of the remaining summand are replayed from the recorded steps.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::complex::FreeComplex;
use super::matrix::IntMatrix;

struct Step {
    k: usize,
    a: usize,
    b: usize,
    u: i64,
    /// Column `a` of `d^k` without the pivot, at the time of cancellation.
    alpha: Vec<(usize, i64)>,
    /// Row `b` of `d^k` without the pivot.
    beta: Vec<(usize, i64)>,
}

/// A complex homotopy equivalent to a given one, with the equivalences.
pub struct ReducedComplex {
    original_ranks: Vec<usize>,
    /// Surviving original basis indices per degree.
    alive: Vec<Vec<usize>>,
    complex: FreeComplex,
    steps: Vec<Step>,
}

struct Sparse {
    rows: Vec<BTreeMap<usize, i64>>,
    cols: Vec<BTreeMap<usize, i64>>,
}

impl Sparse {
    fn from_dense(m: &IntMatrix) -> Option<Sparse> {
        let mut rows = vec![BTreeMap::new(); m.rows()];
        let mut cols = vec![BTreeMap::new(); m.cols()];
        for i in 0..m.rows() {
            for (j, x) in m.row(i).iter().enumerate() {
                if !x.is_zero() {
                    let v = x.to_i64()?;
                    rows[i].insert(j, v);
                    cols[j].insert(i, v);
                }
            }
        }
        Some(Sparse { rows, cols })
    }

    fn add(&mut self, i: usize, j: usize, delta: i64) -> Option<()> {
        let cur = self.rows[i].get(&j).copied().unwrap_or(0);
        let v = cur.checked_add(delta)?;
        if v == 0 {
            self.rows[i].remove(&j);
            self.cols[j].remove(&i);
        } else {
            self.rows[i].insert(j, v);
            self.cols[j].insert(i, v);
        }
        Some(())
    }

    fn clear_row(&mut self, i: usize) {
        for (j, _) in std::mem::take(&mut self.rows[i]) {
            self.cols[j].remove(&i);
        }
    }

    fn clear_col(&mut self, j: usize) {
        for (i, _) in std::mem::take(&mut self.cols[j]) {
            self.rows[i].remove(&j);
        }
    }
}

impl ReducedComplex {
    /// Cancels unit entries until none is left. Falls back to the trivial reduction on `i64` overflow.
    pub fn new(c: &FreeComplex) -> ReducedComplex {
        Self::try_reduce(c).unwrap_or_else(|| ReducedComplex {
            original_ranks: c.ranks().to_vec(),
            alive: c.ranks().iter().map(|&r| (0..r).collect()).collect(),
            complex: c.clone(),
            steps: Vec::new(),
        })
    }

    /// The identity reduction.
    pub fn trivial(c: &FreeComplex) -> ReducedComplex {
        ReducedComplex {
            original_ranks: c.ranks().to_vec(),
            alive: c.ranks().iter().map(|&r| (0..r).collect()).collect(),
            complex: c.clone(),
            steps: Vec::new(),
        }
    }

    fn try_reduce(c: &FreeComplex) -> Option<ReducedComplex> {
        let top = c.top();
        let mut d: Vec<Sparse> = c.diffs().iter().map(Sparse::from_dense).collect::<Option<_>>()?;
        let mut alive: Vec<Vec<bool>> = c.ranks().iter().map(|&r| vec![true; r]).collect();
        let mut steps = Vec::new();
        loop {
            let mut progress = false;
            for k in 0..top {
                for a in 0..c.rank(k) {
                    if !alive[k][a] {
                        continue;
                    }
                    let pivot = d[k].cols[a]
                        .iter()
                        .filter(|(_, &v)| v == 1 || v == -1)
                        .min_by_key(|(&b, _)| d[k].rows[b].len())
                        .map(|(&b, &v)| (b, v));
                    let Some((b, u)) = pivot else { continue };
                    let alpha: Vec<(usize, i64)> = d[k].cols[a]
                        .iter()
                        .filter(|(&y, _)| y != b)
                        .map(|(&y, &v)| (y, v))
                        .collect();
                    let beta: Vec<(usize, i64)> = d[k].rows[b]
                        .iter()
                        .filter(|(&x, _)| x != a)
                        .map(|(&x, &v)| (x, v))
                        .collect();
                    for &(y, ay) in &alpha {
                        let s = ay.checked_mul(u)?;
                        for &(x, bx) in &beta {
                            d[k].add(y, x, s.checked_mul(bx)?.checked_neg()?)?;
                        }
                    }
                    d[k].clear_col(a);
                    d[k].clear_row(b);
                    if k > 0 {
                        d[k - 1].clear_row(a);
                    }
                    if k + 1 < top {
                        d[k + 1].clear_col(b);
                    }
                    alive[k][a] = false;
                    alive[k + 1][b] = false;
                    steps.push(Step {
                        k,
                        a,
                        b,
                        u,
                        alpha,
                        beta,
                    });
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let alive: Vec<Vec<usize>> = alive
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect())
            .collect();
        let ranks: Vec<usize> = alive.iter().map(Vec::len).collect();
        let diffs = (0..top)
            .map(|k| {
                let pos: BTreeMap<usize, usize> = alive[k + 1].iter().enumerate().map(|(i, &y)| (y, i)).collect();
                let mut m = IntMatrix::zeros(ranks[k + 1], ranks[k]);
                for (j, &x) in alive[k].iter().enumerate() {
                    for (y, &v) in &d[k].cols[x] {
                        m.set(pos[y], j, BigInt::from(v));
                    }
                }
                m
            })
            .collect();
        let complex = FreeComplex::new(ranks, diffs).ok()?;
        Some(ReducedComplex {
            original_ranks: c.ranks().to_vec(),
            alive,
            complex,
            steps,
        })
    }

    pub fn complex(&self) -> &FreeComplex {
        &self.complex
    }

    pub fn original_ranks(&self) -> &[usize] {
        &self.original_ranks
    }

    /// Projection `C^k -> C'^k` (a chain map inverse up to homotopy to [`lift`](Self::lift)).
    pub fn project(&self, k: usize, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.original_ranks[k]);
        let mut v = v.to_vec();
        for s in &self.steps {
            if s.k == k {
                v[s.a] = BigInt::zero();
            } else if s.k + 1 == k && !v[s.b].is_zero() {
                let c = std::mem::take(&mut v[s.b]) * s.u;
                for &(y, ay) in &s.alpha {
                    v[y] -= &c * ay;
                }
            }
        }
        self.alive[k].iter().map(|&i| v[i].clone()).collect()
    }

    /// Inclusion `C'^k -> C^k`.
    pub fn lift(&self, k: usize, w: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(w.len(), self.alive[k].len());
        let mut v = vec![BigInt::zero(); self.original_ranks[k]];
        for (x, &i) in w.iter().zip(&self.alive[k]) {
            v[i] = x.clone();
        }
        for s in self.steps.iter().rev() {
            if s.k == k {
                let mut acc = BigInt::zero();
                for &(x, bx) in &s.beta {
                    if !v[x].is_zero() {
                        acc += &v[x] * bx;
                    }
                }
                v[s.a] = -acc * s.u;
            }
        }
        v
    }

    /// `project ∘ m ∘ lift` for a map `m` from this complex's degree `k` to `target`'s degree `k`.
    pub fn transfer(&self, k: usize, m: &IntMatrix, target: &ReducedComplex) -> IntMatrix {
        let r = self.alive[k].len();
        let cols: Vec<Vec<BigInt>> = (0..r)
            .map(|j| {
                let mut e = vec![BigInt::zero(); r];
                e[j] = BigInt::from(1);
                target.project(k, &m.mul_vec(&self.lift(k, &e)))
            })
            .collect();
        IntMatrix::from_columns(target.alive[k].len(), &cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::complex_cohomology;

    fn simplex_coboundary(n: usize) -> FreeComplex {
        // augmented cochains of the full simplex on n vertices: acyclic
        let mut basis: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for f in 0..1u32 << n {
            basis[f.count_ones() as usize].push(f);
        }
        let diffs = (0..n)
            .map(|k| {
                let mut m = IntMatrix::zeros(basis[k + 1].len(), basis[k].len());
                for (j, &f) in basis[k].iter().enumerate() {
                    for v in 0..n {
                        if f >> v & 1 == 0 {
                            let i = basis[k + 1].binary_search(&(f | 1 << v)).unwrap();
                            let s = if (f & ((1 << v) - 1)).count_ones() % 2 == 0 {
                                1
                            } else {
                                -1
                            };
                            m.set(i, j, BigInt::from(s));
                        }
                    }
                }
                m
            })
            .collect();
        FreeComplex::new(basis.iter().map(Vec::len).collect(), diffs).unwrap()
    }

    #[test]
    fn acyclic_complex_reduces_to_zero() {
        let c = simplex_coboundary(5);
        let r = ReducedComplex::new(&c);
        assert!(r.complex().is_zero());
    }

    #[test]
    fn torsion_survives_and_maps_are_chain_maps() {
        let d0 = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2], vec![1, 0]]);
        let d1 = IntMatrix::from_rows(&[vec![1, 0, -1]]);
        let c = FreeComplex::new(vec![2, 3, 1], vec![d0, d1]).unwrap();
        let r = ReducedComplex::new(&c);
        let h: Vec<String> = complex_cohomology(r.complex())
            .unwrap()
            .iter()
            .map(|h| h.group().to_string())
            .collect();
        let h0: Vec<String> = complex_cohomology(&c)
            .unwrap()
            .iter()
            .map(|h| h.group().to_string())
            .collect();
        assert_eq!(h, h0);
        for k in 0..r.complex().top() {
            for j in 0..r.complex().rank(k) {
                let mut e = vec![BigInt::zero(); r.complex().rank(k)];
                e[j] = BigInt::from(1);
                let up = c.diff(k).mul_vec(&r.lift(k, &e));
                assert_eq!(up, r.lift(k + 1, &r.complex().diff(k).mul_vec(&e)));
                assert_eq!(r.project(k, &r.lift(k, &e)), e);
            }
        }
    }
}
