//! Linear algebra over a prime field `F_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::complex::FreeComplex;
use super::matrix::IntMatrix;
use crate::{Error, Result};

fn reduce_big(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(p as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(p as i128) as u64
}

/// Dense matrix over `F_p`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_int(m: &IntMatrix, p: u64) -> Self {
        FpMatrix {
            p,
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|x| reduce_big(x, p)).collect(),
        }
    }

    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(p, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x % p;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let p = self.p as u128;
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u128;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j] as u128;
                    let x = &mut out.data[i * other.cols + j];
                    *x = ((*x as u128 + a * b) % p) as u64;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        (0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (a, b) in self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v) {
                    acc += (*a as u128) * (*b as u128);
                }
                (acc % p) as u64
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * self.cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
            }
            let inv = inv_mod(self.data[r * self.cols + c], p);
            for j in c..self.cols {
                let x = &mut self.data[r * self.cols + j];
                *x = ((*x as u128 * inv as u128) % p as u128) as u64;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * self.cols + c];
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let y = self.data[r * self.cols + j];
                    if y != 0 {
                        let x = &mut self.data[i * self.cols + j];
                        *x = ((*x as u128 + (p - f) as u128 * y as u128) % p as u128) as u64;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                let x = a.data[r * a.cols + free];
                v[c] = (p - x) % p;
            }
            out.push(v);
        }
        out
    }
}

/// Cohomology of `C (x) F_p` in one degree.
pub struct FpCohomology {
    p: u64,
    reps: Vec<Vec<u64>>,
    /// Rows of a left inverse of `[boundaries | reps]` that pick the rep coordinates.
    solve: FpMatrix,
    /// Full left inverse of `[boundaries | reps]` and that matrix, for membership checks.
    span_check: (FpMatrix, FpMatrix),
}

impl FpCohomology {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Vec<u64>] {
        &self.reps
    }

    pub fn express(&self, cocycle: &[u64]) -> Result<Vec<u64>> {
        let (inv, basis) = &self.span_check;
        let c = inv.mul_vec(cocycle);
        let back = basis.mul_vec(&c);
        if back.iter().zip(cocycle).any(|(a, b)| a % self.p != b % self.p) {
            return Err(Error::NotACocycle);
        }
        Ok(self.solve.mul_vec(cocycle))
    }
}

/// `H^k(C (x) F_p)` for all `k`, with representatives.
pub fn fp_cohomology(c: &FreeComplex, p: u64) -> Vec<FpCohomology> {
    let l = c.top();
    let diffs: Vec<FpMatrix> = c.diffs().iter().map(|d| FpMatrix::from_int(d, p)).collect();
    (0..=l)
        .map(|k| {
            let m = c.rank(k);
            let cycles: Vec<Vec<u64>> = if k < l {
                diffs[k].nullspace()
            } else {
                (0..m)
                    .map(|i| {
                        let mut e = vec![0; m];
                        e[i] = 1;
                        e
                    })
                    .collect()
            };
            let bounds: Vec<Vec<u64>> = if k == 0 {
                Vec::new()
            } else {
                let d = &diffs[k - 1];
                let piv = d.clone().rref();
                piv.iter()
                    .map(|&j| (0..d.rows).map(|i| d.get(i, j)).collect())
                    .collect()
            };
            let nb = bounds.len();
            let mut all = bounds;
            all.extend(cycles.iter().cloned());
            let piv = FpMatrix::from_columns(p, m, &all).rref();
            debug_assert!(piv[..nb].iter().copied().eq(0..nb));
            let reps: Vec<Vec<u64>> = piv[nb..].iter().map(|&j| all[j].clone()).collect();
            let mut basis_cols: Vec<Vec<u64>> = all[..nb].to_vec();
            basis_cols.extend(reps.iter().cloned());
            let z = basis_cols.len();
            let basis = FpMatrix::from_columns(p, m, &basis_cols);
            let inv = left_inverse(&basis);
            let mut solve = FpMatrix::zeros(p, z - nb, m);
            for i in nb..z {
                for j in 0..m {
                    solve.data[(i - nb) * m + j] = inv.get(i, j);
                }
            }
            FpCohomology {
                p,
                reps,
                solve,
                span_check: (inv, basis),
            }
        })
        .collect()
}

/// Left inverse of a full column rank matrix.
fn left_inverse(a: &FpMatrix) -> FpMatrix {
    let (m, z) = (a.rows, a.cols);
    let mut aug = FpMatrix::zeros(a.p, m, z + m);
    for i in 0..m {
        for j in 0..z {
            aug.data[i * (z + m) + j] = a.get(i, j);
        }
        aug.data[i * (z + m) + z + i] = 1;
    }
    // Row reduce on the first z columns only.
    let mut left = aug;
    let p = a.p;
    let w = z + m;
    let mut r = 0;
    for c in 0..z {
        let piv = (r..m).find(|&i| left.data[i * w + c] != 0).expect("full column rank");
        if piv != r {
            for j in 0..w {
                left.data.swap(piv * w + j, r * w + j);
            }
        }
        let inv = inv_mod(left.data[r * w + c], p);
        for j in 0..w {
            let x = &mut left.data[r * w + j];
            *x = ((*x as u128 * inv as u128) % p as u128) as u64;
        }
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = left.data[i * w + c];
            if f == 0 {
                continue;
            }
            for j in 0..w {
                let y = left.data[r * w + j];
                if y != 0 {
                    let x = &mut left.data[i * w + j];
                    *x = ((*x as u128 + (p - f) as u128 * y as u128) % p as u128) as u64;
                }
            }
        }
        r += 1;
    }
    let mut out = FpMatrix::zeros(p, z, m);
    for i in 0..z {
        for j in 0..m {
            out.data[i * m + j] = left.data[i * w + z + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_mod_p_depends_on_p() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(FpMatrix::from_int(&a, 2).rank(), 1);
        assert_eq!(FpMatrix::from_int(&a, 3).rank(), 1);
        assert_eq!(FpMatrix::from_int(&a, 5).rank(), 2);
    }

    #[test]
    fn cohomology_of_times_two_mod_two() {
        let c = FreeComplex::new(vec![1, 1], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        let h = fp_cohomology(&c, 2);
        assert_eq!(h[0].dim(), 1);
        assert_eq!(h[1].dim(), 1);
        let h3 = fp_cohomology(&c, 3);
        assert_eq!(h3[0].dim() + h3[1].dim(), 0);
    }

    #[test]
    fn nullspace_is_killed() {
        let a = FpMatrix::from_int(&IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]), 7);
        for v in a.nullspace() {
            assert!(a.mul_vec(&v).iter().all(|&x| x == 0));
        }
        assert_eq!(a.nullspace().len(), 2);
    }
}
