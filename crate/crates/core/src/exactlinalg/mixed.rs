use std::fmt;

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;

use super::group::{valuation, FinAbGroup};
use crate::{Error, Result};

/// `p`-primary group `Z(p^inf)^d + T` with `T` a finite `p`-group.
///
/// Internally this is the Pontryagin dual `Z_(p)^d + T`. `trunc_exponent` is the
/// `N` of the finite model `(Z/p^N)^d + T`.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedAbGroup {
    p: u64,
    trunc_exponent: u32,
    divisible_corank: usize,
    torsion: Vec<BigInt>,
}

impl MixedAbGroup {
    pub fn new(p: u64, trunc_exponent: u32, divisible_corank: usize, mut torsion: Vec<BigInt>) -> Result<Self> {
        for d in &torsion {
            let v = valuation(d, p);
            if v == 0 || &BigInt::from(p).pow(v) != d {
                return Err(Error::Malformed(format!("{d} is not a positive power of {p}")));
            }
        }
        torsion.sort();
        Ok(MixedAbGroup {
            p,
            trunc_exponent,
            divisible_corank,
            torsion,
        })
    }

    pub fn zero(p: u64, trunc_exponent: u32) -> Self {
        MixedAbGroup {
            p,
            trunc_exponent,
            divisible_corank: 0,
            torsion: Vec::new(),
        }
    }

    /// From a Pontryagin dual presented over `Z`; localizes at `p` first.
    pub fn from_dual(dual: &FinAbGroup, p: u64, trunc_exponent: u32) -> Self {
        let (loc, _) = dual.localize_at(p);
        MixedAbGroup {
            p,
            trunc_exponent,
            divisible_corank: loc.free_rank(),
            torsion: loc.torsion().to_vec(),
        }
    }

    /// Reads a finite model `X[p^N]`: summands of order `p^N` are divisible, smaller ones torsion.
    pub fn from_finite_model(model: &FinAbGroup, p: u64, n: u32) -> Result<Self> {
        if model.free_rank() > 0 {
            return Err(Error::Internal("finite model has a free part".into()));
        }
        let top = BigInt::from(p).pow(n);
        let mut d = 0;
        let mut torsion = Vec::new();
        for o in model.torsion() {
            if o == &top {
                d += 1;
            } else if o < &top && &BigInt::from(p).pow(valuation(o, p)) == o {
                torsion.push(o.clone());
            } else {
                return Err(Error::Internal(format!(
                    "finite model summand of order {o} at level p^{n}"
                )));
            }
        }
        MixedAbGroup::new(p, n, d, torsion)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn trunc_exponent(&self) -> u32 {
        self.trunc_exponent
    }

    pub fn divisible_corank(&self) -> usize {
        self.divisible_corank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn with_trunc(&self, n: u32) -> Self {
        MixedAbGroup {
            trunc_exponent: n,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.divisible_corank == 0 && self.torsion.is_empty()
    }

    pub fn is_divisible(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn same_isomorphism_type(&self, other: &MixedAbGroup) -> bool {
        self.p == other.p && self.divisible_corank == other.divisible_corank && self.torsion == other.torsion
    }

    pub fn dual(&self) -> FinAbGroup {
        FinAbGroup::new(self.divisible_corank, self.torsion.clone()).expect("p-power chain")
    }

    /// `dim_{F_p} ker(p)`.
    pub fn socle_dim(&self) -> usize {
        self.divisible_corank + self.torsion.len()
    }

    /// `dim_{F_p} coker(p)`; zero iff multiplication by `p` is surjective.
    pub fn cokernel_of_p_dim(&self) -> usize {
        self.torsion.len()
    }

    /// Whether every torsion exponent is below the truncation exponent.
    pub fn is_stable(&self) -> bool {
        self.torsion.iter().all(|d| valuation(d, self.p) < self.trunc_exponent)
    }

    /// `(Z/p^N)^d + T`.
    pub fn finite_model(&self) -> Result<FinAbGroup> {
        if !self.is_stable() {
            return Err(Error::TruncationUnstable {
                p: self.p,
                n: self.trunc_exponent,
                detail: format!("torsion {self} reaches the truncation level"),
            });
        }
        let top = BigInt::from(self.p).pow(self.trunc_exponent);
        let mut orders = self.torsion.clone();
        orders.extend(std::iter::repeat_n(top, self.divisible_corank));
        Ok(FinAbGroup::new(0, orders).expect("sorted p-powers"))
    }
}

impl fmt::Display for MixedAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.divisible_corank {
            0 => {}
            1 => parts.push(format!("Z({}^inf)", self.p)),
            d => parts.push(format!("Z({}^inf)^{d}", self.p)),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MixedAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [N={}]", self.trunc_exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedShape {
    pub p: u64,
    pub divisible_corank: usize,
    pub torsion: Vec<String>,
    pub trunc_exponent: u32,
}

impl From<&MixedAbGroup> for MixedShape {
    fn from(g: &MixedAbGroup) -> Self {
        MixedShape {
            p: g.p,
            divisible_corank: g.divisible_corank,
            torsion: g.torsion.iter().map(|d| d.to_string()).collect(),
            trunc_exponent: g.trunc_exponent,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_and_back() {
        let g = MixedAbGroup::new(2, 3, 2, vec![BigInt::from(2), BigInt::from(4)]).unwrap();
        let m = g.finite_model().unwrap();
        assert_eq!(m.to_string(), "Z/2 + Z/4 + (Z/8)^2");
        assert_eq!(MixedAbGroup::from_finite_model(&m, 2, 3).unwrap(), g);
        assert_eq!(g.to_string(), "Z(2^inf)^2 + Z/2 + Z/4");
    }

    #[test]
    fn unstable_truncation_detected() {
        let g = MixedAbGroup::new(3, 1, 0, vec![BigInt::from(3)]).unwrap();
        assert!(!g.is_stable());
        assert!(matches!(g.finite_model(), Err(Error::TruncationUnstable { .. })));
    }

    #[test]
    fn from_dual_localizes() {
        let d = FinAbGroup::new(1, vec![BigInt::from(6)]).unwrap();
        let g = MixedAbGroup::from_dual(&d, 3, 2);
        assert_eq!(g.divisible_corank(), 1);
        assert_eq!(g.torsion(), &[BigInt::from(3)]);
        assert_eq!(g.socle_dim(), 2);
        assert_eq!(g.cokernel_of_p_dim(), 1);
    }
}
