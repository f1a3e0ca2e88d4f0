//! Smith normal form with unimodular transforms.
//!
//! The elimination runs on `i64` first and restarts on `BigInt` if any
//! intermediate value overflows, so results are always exact.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::IntMatrix;

pub(crate) trait Entry: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    /// Truncated quotient.
    fn quot(&self, d: &Self) -> Option<Self>;
    fn divides(&self, other: &Self) -> bool;
    fn div_exact(&self, d: &Self) -> Option<Self>;
    /// `(g, s, t)` with `g = s*self + t*other`, `g >= 0`.
    fn ext_gcd(&self, other: &Self) -> Option<(Self, Self, Self)>;
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;

    fn add_mul(&self, c: &Self, x: &Self) -> Option<Self> {
        self.add(&c.mul(x)?)
    }
}

impl Entry for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn add_mul(&self, c: &Self, x: &Self) -> Option<Self> {
        let v = (*self as i128) + (*c as i128) * (*x as i128);
        i64::try_from(v).ok()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn divides(&self, other: &Self) -> bool {
        if *self == 0 {
            return *other == 0;
        }
        (*other as i128) % (*self as i128) == 0
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn ext_gcd(&self, other: &Self) -> Option<(Self, Self, Self)> {
        let (mut r0, mut r1) = (*self as i128, *other as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0.div_euclid(r1);
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 < 0 {
            (r0, s0, t0) = (-r0, -s0, -t0);
        }
        Some((
            i64::try_from(r0).ok()?,
            i64::try_from(s0).ok()?,
            i64::try_from(t0).ok()?,
        ))
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn divides(&self, other: &Self) -> bool {
        if Zero::is_zero(self) {
            return Zero::is_zero(other);
        }
        Zero::is_zero(&(other % self))
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn ext_gcd(&self, other: &Self) -> Option<(Self, Self, Self)> {
        let e = self.extended_gcd(other);
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if Signed::is_negative(&g) {
            g = -g;
            s = -s;
            t = -t;
        }
        Some((g, s, t))
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Which transforms to track.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

impl Track {
    pub const ALL: Track = Track {
        u: true,
        u_inv: true,
        v: true,
        v_inv: true,
    };
}

/// `diag = U * A * V`, transforms present as requested.
#[derive(Clone, Debug)]
pub(crate) struct SnfParts {
    pub diag: Vec<BigInt>,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

impl SnfParts {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

struct Overflow;

type Step<T = ()> = Result<T, Overflow>;

fn ok<T>(x: Option<T>) -> Step<T> {
    x.ok_or(Overflow)
}

struct Buf<T> {
    w: usize,
    h: usize,
    d: Vec<T>,
}

impl<T: Entry> Buf<T> {
    fn identity(n: usize) -> Self {
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            d[i * n + i] = T::one();
        }
        Buf { w: n, h: n, d }
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.d[i * self.w + j]
    }

    /// row_i += c * row_k
    fn row_add(&mut self, i: usize, k: usize, c: &T) -> Step {
        let w = self.w;
        let (ri, rk) = pair_mut(&mut self.d, w, i, k);
        for (x, y) in ri.iter_mut().zip(rk.iter()) {
            if !y.is_zero() {
                *x = ok(x.add_mul(c, y))?;
            }
        }
        Ok(())
    }

    /// col_j += c * col_k
    fn col_add(&mut self, j: usize, k: usize, c: &T) -> Step {
        let w = self.w;
        for r in 0..self.h {
            let y = &self.d[r * w + k];
            if !y.is_zero() {
                let v = ok(self.d[r * w + j].add_mul(c, y))?;
                self.d[r * w + j] = v;
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.w {
                self.d.swap(i * self.w + j, k * self.w + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j != k {
            for r in 0..self.h {
                self.d.swap(r * self.w + j, r * self.w + k);
            }
        }
    }

    fn neg_row(&mut self, i: usize) -> Step {
        for j in 0..self.w {
            let v = ok(self.d[i * self.w + j].neg())?;
            self.d[i * self.w + j] = v;
        }
        Ok(())
    }

    fn neg_col(&mut self, j: usize) -> Step {
        for r in 0..self.h {
            let v = ok(self.d[r * self.w + j].neg())?;
            self.d[r * self.w + j] = v;
        }
        Ok(())
    }

    /// (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    fn combine_rows(&mut self, i: usize, j: usize, m: &[T; 4]) -> Step {
        for col in 0..self.w {
            let x = self.d[i * self.w + col].clone();
            let y = self.d[j * self.w + col].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.d[i * self.w + col] = ok(ok(m[0].mul(&x))?.add_mul(&m[1], &y))?;
            self.d[j * self.w + col] = ok(ok(m[2].mul(&x))?.add_mul(&m[3], &y))?;
        }
        Ok(())
    }

    /// (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
    fn combine_cols(&mut self, i: usize, j: usize, m: &[T; 4]) -> Step {
        for r in 0..self.h {
            let x = self.d[r * self.w + i].clone();
            let y = self.d[r * self.w + j].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.d[r * self.w + i] = ok(ok(m[0].mul(&x))?.add_mul(&m[1], &y))?;
            self.d[r * self.w + j] = ok(ok(m[2].mul(&x))?.add_mul(&m[3], &y))?;
        }
        Ok(())
    }

    fn into_matrix(self) -> IntMatrix {
        IntMatrix::from_raw(self.h, self.w, self.d.iter().map(Entry::to_big).collect())
    }
}

fn pair_mut<T>(d: &mut [T], w: usize, i: usize, k: usize) -> (&mut [T], &[T]) {
    assert_ne!(i, k);
    if i < k {
        let (lo, hi) = d.split_at_mut(k * w);
        (&mut lo[i * w..(i + 1) * w], &hi[..w])
    } else {
        let (lo, hi) = d.split_at_mut(i * w);
        (&mut hi[..w], &lo[k * w..(k + 1) * w])
    }
}

struct Work<T> {
    a: Buf<T>,
    u: Option<Buf<T>>,
    u_inv: Option<Buf<T>>,
    v: Option<Buf<T>>,
    v_inv: Option<Buf<T>>,
}

impl<T: Entry> Work<T> {
    fn row_add(&mut self, i: usize, k: usize, c: &T) -> Step {
        self.a.row_add(i, k, c)?;
        if let Some(u) = &mut self.u {
            u.row_add(i, k, c)?;
        }
        if let Some(ui) = &mut self.u_inv {
            ui.col_add(k, i, &ok(c.neg())?)?;
        }
        Ok(())
    }

    fn col_add(&mut self, j: usize, k: usize, c: &T) -> Step {
        self.a.col_add(j, k, c)?;
        if let Some(v) = &mut self.v {
            v.col_add(j, k, c)?;
        }
        if let Some(vi) = &mut self.v_inv {
            vi.row_add(k, j, &ok(c.neg())?)?;
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap_rows(i, k);
        if let Some(u) = &mut self.u {
            u.swap_rows(i, k);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        self.a.swap_cols(j, k);
        if let Some(v) = &mut self.v {
            v.swap_cols(j, k);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap_rows(j, k);
        }
    }

    fn neg_row(&mut self, i: usize) -> Step {
        self.a.neg_row(i)?;
        if let Some(u) = &mut self.u {
            u.neg_row(i)?;
        }
        if let Some(ui) = &mut self.u_inv {
            ui.neg_col(i)?;
        }
        Ok(())
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let a = &self.a;
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.h {
            for j in t..a.w {
                let x = a.at(i, j);
                if x.is_zero() {
                    continue;
                }
                if x.is_unit() {
                    return Some((i, j));
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(a.at(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn diagonalize(&mut self) -> Step<usize> {
        let (m, n) = (self.a.h, self.a.w);
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.find_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if self.a.at(i, t).is_zero() {
                        continue;
                    }
                    let q = ok(self.a.at(i, t).quot(self.a.at(t, t)))?;
                    if !q.is_zero() {
                        self.row_add(i, t, &ok(q.neg())?)?;
                    }
                    if !self.a.at(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if self.a.at(t, j).is_zero() {
                        continue;
                    }
                    let q = ok(self.a.at(t, j).quot(self.a.at(t, t)))?;
                    if !q.is_zero() {
                        self.col_add(j, t, &ok(q.neg())?)?;
                    }
                    if !self.a.at(t, j).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
                // Some remainder is smaller than the pivot: move it into place.
                let mut best: Option<(usize, usize)> = None;
                for i in t + 1..m {
                    let x = self.a.at(i, t);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(self.a.at(bi, bj))) {
                        best = Some((i, t));
                    }
                }
                for j in t + 1..n {
                    let x = self.a.at(t, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(self.a.at(bi, bj))) {
                        best = Some((t, j));
                    }
                }
                let (bi, bj) = best.expect("unclean pivot row or column has a nonzero entry");
                self.swap_rows(t, bi);
                self.swap_cols(t, bj);
            }
            t += 1;
        }
        Ok(t)
    }

    /// Replace the diagonal pair (a, b) at positions i < j by (gcd, lcm).
    fn fix_pair(&mut self, i: usize, j: usize) -> Step {
        let a = self.a.at(i, i).clone();
        let b = self.a.at(j, j).clone();
        if a.divides(&b) {
            return Ok(());
        }
        let (g, s, t) = ok(a.ext_gcd(&b))?;
        let ag = ok(a.div_exact(&g))?;
        let bg = ok(b.div_exact(&g))?;
        let nbg = ok(bg.neg())?;
        let nt = ok(t.neg())?;
        if let Some(u) = &mut self.u {
            u.combine_rows(i, j, &[s.clone(), t.clone(), nbg.clone(), ag.clone()])?;
        }
        if let Some(ui) = &mut self.u_inv {
            ui.combine_cols(i, j, &[ag.clone(), bg.clone(), nt.clone(), s.clone()])?;
        }
        let tbg = ok(t.mul(&bg))?;
        let sag = ok(s.mul(&ag))?;
        if let Some(v) = &mut self.v {
            v.combine_cols(i, j, &[T::one(), T::one(), ok(tbg.neg())?, sag.clone()])?;
        }
        if let Some(vi) = &mut self.v_inv {
            vi.combine_rows(i, j, &[sag, tbg, ok(T::one().neg())?, T::one()])?;
        }
        let l = ok(ag.mul(&b))?;
        let w = self.a.w;
        self.a.d[i * w + i] = g;
        self.a.d[j * w + j] = l;
        Ok(())
    }

    fn run(&mut self) -> Step<usize> {
        let r = self.diagonalize()?;
        for i in 0..r {
            if self.a.at(i, i).is_negative() {
                self.neg_row(i)?;
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                self.fix_pair(i, j)?;
            }
        }
        Ok(r)
    }
}

fn run_typed<T: Entry>(a: &IntMatrix, track: Track) -> Option<SnfParts> {
    let (m, n) = a.shape();
    let mut d = Vec::with_capacity(m * n);
    for x in a.data() {
        d.push(T::from_big(x)?);
    }
    let mut w = Work {
        a: Buf { w: n, h: m, d },
        u: track.u.then(|| Buf::identity(m)),
        u_inv: track.u_inv.then(|| Buf::identity(m)),
        v: track.v.then(|| Buf::identity(n)),
        v_inv: track.v_inv.then(|| Buf::identity(n)),
    };
    let r = w.run().ok()?;
    let diag = (0..r).map(|i| w.a.at(i, i).to_big()).collect();
    Some(SnfParts {
        diag,
        u: w.u.map(Buf::into_matrix),
        u_inv: w.u_inv.map(Buf::into_matrix),
        v: w.v.map(Buf::into_matrix),
        v_inv: w.v_inv.map(Buf::into_matrix),
    })
}

pub(crate) fn snf_parts(a: &IntMatrix, track: Track) -> SnfParts {
    if let Some(p) = run_typed::<i64>(a, track) {
        return p;
    }
    run_typed::<BigInt>(a, track).expect("BigInt elimination cannot overflow")
}

/// Smith normal form `D = U * A * V` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub a: IntMatrix,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero diagonal entries, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Checks every law of the decomposition. Used by tests and the oracle suite.
    pub fn verify(&self) -> bool {
        let (m, n) = self.a.shape();
        let prod = self.u.mul(&self.a).mul(&self.v);
        if prod != self.d {
            return false;
        }
        if !self.u.mul(&self.u_inv).is_identity() || !self.v.mul(&self.v_inv).is_identity() {
            return false;
        }
        if !self.u.det().magnitude().is_one() || !self.v.det().magnitude().is_one() {
            return false;
        }
        for i in 0..m {
            for j in 0..n {
                let x = self.d.get(i, j);
                let expect_nonzero = i == j && i < self.rank();
                if expect_nonzero == Zero::is_zero(x) {
                    return false;
                }
            }
        }
        let f = &self.invariant_factors;
        f.iter().all(|x| x.is_positive()) && f.windows(2).all(|w| Zero::is_zero(&(&w[1] % &w[0])))
    }
}

pub fn snf(a: &IntMatrix) -> SnfDecomposition {
    let parts = snf_parts(a, Track::ALL);
    let (m, n) = a.shape();
    let mut d = IntMatrix::zeros(m, n);
    for (i, x) in parts.diag.iter().enumerate() {
        d.set(i, i, x.clone());
    }
    SnfDecomposition {
        a: a.clone(),
        d,
        u: parts.u.unwrap(),
        v: parts.v.unwrap(),
        u_inv: parts.u_inv.unwrap(),
        v_inv: parts.v_inv.unwrap(),
        invariant_factors: parts.diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_known_forms() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = snf(&a);
        assert!(s.verify());
        let f: Vec<i64> = s.invariant_factors.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(f, vec![2, 6, 12]);

        let b = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = snf(&b);
        assert!(s.verify());
        assert_eq!(s.invariant_factors, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn degenerate_shapes() {
        for (m, n) in [(0, 0), (0, 3), (3, 0), (2, 2)] {
            let s = snf(&IntMatrix::zeros(m, n));
            assert!(s.verify());
            assert_eq!(s.rank(), 0);
        }
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big: BigInt = BigInt::from(i64::MAX) * 3 + 1;
        let a = IntMatrix::from_rows(&[vec![big.clone(), BigInt::from(i64::MAX)], vec![BigInt::from(2), big]]);
        let s = snf(&a);
        assert!(s.verify());
        assert_eq!(
            s.invariant_factors.iter().product::<BigInt>().magnitude(),
            a.det().magnitude()
        );
    }
}
