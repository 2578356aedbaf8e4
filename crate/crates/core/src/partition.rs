//! Integer partitions and the admissible degree sequence of the associated
//! exceptional Hermite family.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated integer partition `λ_1 ≥ λ_2 ≥ … ≥ λ_r ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: &[i64]) -> Result<Self> {
        for (index, &value) in parts.iter().enumerate() {
            if value < 1 {
                return Err(Error::NonPositivePart { index, value });
            }
        }
        for (index, w) in parts.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(Error::NonIncreasingViolation { index, value: w[0], next: w[1] });
            }
        }
        Ok(Partition { parts: parts.iter().map(|&p| p as u32).collect() })
    }

    /// The empty partition; routes every construction to the classical case.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// `λ = (ν, ν)`.
    pub fn double(nu: u32) -> Self {
        if nu == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![nu, nu] }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`
    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// `r`
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Even length with equal consecutive pairs; vacuously true for `()`.
    pub fn is_even(&self) -> bool {
        self.parts.len() % 2 == 0 && self.parts.chunks(2).all(|c| c[0] == c[1])
    }

    pub fn require_even(&self) -> Result<()> {
        if self.is_even() {
            Ok(())
        } else {
            Err(Error::NotEvenPartition { parts: self.parts.clone() })
        }
    }

    /// Degrees `|λ| + λ_i − i` removed from the sequence.
    pub fn excluded_degrees(&self) -> Vec<usize> {
        let size = self.size();
        self.parts.iter().enumerate().map(|(i, &p)| size + p as usize - (i + 1)).collect()
    }

    /// Smallest admissible degree, `|λ| − r`.
    pub fn min_degree(&self) -> usize {
        self.size() - self.len()
    }

    pub fn is_admissible(&self, n: usize) -> bool {
        n >= self.min_degree() && !self.excluded_degrees().contains(&n)
    }

    /// `N_λ ∩ [0, n_max]`.
    pub fn degree_set(&self, n_max: usize) -> BTreeSet<usize> {
        (self.min_degree()..=n_max).filter(|&n| self.is_admissible(n)).collect()
    }

    /// Hermite indices `λ_j + r − j` for `j = r, …, 1`, in Wronskian order.
    pub fn hermite_indices(&self) -> Vec<usize> {
        let r = self.len();
        (1..=r).rev().map(|j| self.parts[j - 1] as usize + r - j).collect()
    }
}

impl TryFrom<Vec<i64>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Partition::new(&v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_partitions() {
        let p = Partition::new(&[1, 1]).unwrap();
        assert_eq!((p.size(), p.len(), p.is_even()), (2, 2, true));
        let e = Partition::new(&[]).unwrap();
        assert_eq!((e.size(), e.len(), e.is_even()), (0, 0, true));
        let q = Partition::new(&[2, 1]).unwrap();
        assert_eq!((q.size(), q.len(), q.is_even()), (3, 2, false));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Partition::new(&[1, 2]), Err(Error::NonIncreasingViolation { index: 0, .. })));
        assert!(matches!(Partition::new(&[2, 0]), Err(Error::NonPositivePart { index: 1, value: 0 })));
        assert!(matches!(Partition::new(&[-1]), Err(Error::NonPositivePart { .. })));
    }

    #[test]
    fn degree_sets() {
        let v = |p: &[i64], n| Partition::new(p).unwrap().degree_set(n).into_iter().collect::<Vec<_>>();
        assert_eq!(v(&[1, 1], 5), vec![0, 3, 4, 5]);
        assert_eq!(v(&[], 4), vec![0, 1, 2, 3, 4]);
        assert_eq!(v(&[2, 2], 7), vec![2, 3, 6, 7]);
    }

    #[test]
    fn hermite_indices_follow_wronskian_order() {
        assert_eq!(Partition::new(&[1, 1]).unwrap().hermite_indices(), vec![1, 2]);
        assert_eq!(Partition::new(&[3, 2, 2]).unwrap().hermite_indices(), vec![2, 3, 5]);
    }

    #[test]
    fn json_is_a_plain_array() {
        let p = Partition::new(&[2, 2]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,2]");
        let q: Partition = serde_json::from_str("[1,1]").unwrap();
        assert_eq!(q, Partition::double(1));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }

    fn arb_partition() -> impl Strategy<Value = Partition> {
        proptest::collection::vec(1i64..6, 0..5).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn degree_set_cardinality(p in arb_partition(), extra in 0usize..10) {
            let lam1 = p.parts().first().copied().unwrap_or(0) as usize;
            let n_max = (p.size() + lam1).saturating_sub(1) + extra;
            prop_assert_eq!(p.degree_set(n_max).len(), n_max + 1 - p.size());
        }

        #[test]
        fn degree_set_monotone(p in arb_partition(), a in 0usize..20, b in 0usize..20) {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(p.degree_set(lo).is_subset(&p.degree_set(hi)));
        }
    }
}
