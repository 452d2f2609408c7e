use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use super::{sieve, FactorIntError};

/// Signed prime-exponent vector: the multiplicative content of a rational
/// number `∏ p^e`, kept sparse and canonical.
///
/// Canonical means primes strictly increasing and no zero exponents, so two
/// vectors describe the same rational exactly when they compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpVec {
    entries: Vec<(u64, i64)>,
}

impl ExpVec {
    pub fn zero() -> Self {
        ExpVec::default()
    }

    /// Builds a canonical vector from arbitrary `(prime, exponent)` pairs.
    /// Repeated primes are summed; every key must be prime.
    pub fn from_entries<I>(entries: I) -> Result<Self, FactorIntError>
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let mut raw: Vec<(u64, i64)> = entries.into_iter().collect();
        let table = sieve::shared_table(sieve::DEFAULT_SIEVE_LIMIT);
        if let Some(&(p, _)) = raw.iter().find(|(p, _)| !table.is_prime(*p)) {
            return Err(FactorIntError::NotPrime(p));
        }
        raw.sort_unstable_by_key(|&(p, _)| p);
        let mut entries: Vec<(u64, i64)> = Vec::with_capacity(raw.len());
        for (p, e) in raw {
            match entries.last_mut() {
                Some((q, acc)) if *q == p => *acc += e,
                _ => entries.push((p, e)),
            }
        }
        entries.retain(|&(_, e)| e != 0);
        Ok(ExpVec { entries })
    }

    /// Entries must already be canonical.
    pub(crate) fn from_canonical(entries: Vec<(u64, i64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, e)| e != 0));
        ExpVec { entries }
    }

    /// Exponent vector of a positive integer.
    pub fn of_integer(n: u64) -> Self {
        let table = sieve::table_for_factoring(n);
        let entries = table
            .factorize(n)
            .into_iter()
            .map(|(p, e)| (p, i64::from(e)))
            .collect();
        ExpVec::from_canonical(entries)
    }

    pub fn entries(&self) -> &[(u64, i64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// True when every exponent is non-negative, i.e. the vector is an integer.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|&(_, e)| e > 0)
    }

    /// Largest prime carrying a positive exponent.
    pub fn largest_positive_prime(&self) -> Option<u64> {
        self.entries
            .iter()
            .rev()
            .find(|&&(_, e)| e > 0)
            .map(|&(p, _)| p)
    }

    fn merge(&self, other: &ExpVec, sign: i64) -> ExpVec {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    i += 1;
                    j += 1;
                    (p, e + sign * f)
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    i += 1;
                    (p, e)
                }
                (Some(_), Some(&(q, f))) | (None, Some(&(q, f))) => {
                    j += 1;
                    (q, sign * f)
                }
                (Some(&(p, e)), None) => {
                    i += 1;
                    (p, e)
                }
                (None, None) => unreachable!(),
            };
            if next.1 != 0 {
                out.push(next);
            }
        }
        ExpVec { entries: out }
    }
}

impl Add for &ExpVec {
    type Output = ExpVec;
    fn add(self, rhs: &ExpVec) -> ExpVec {
        self.merge(rhs, 1)
    }
}

impl Sub for &ExpVec {
    type Output = ExpVec;
    fn sub(self, rhs: &ExpVec) -> ExpVec {
        self.merge(rhs, -1)
    }
}

impl Add for ExpVec {
    type Output = ExpVec;
    fn add(self, rhs: ExpVec) -> ExpVec {
        &self + &rhs
    }
}

impl Sub for ExpVec {
    type Output = ExpVec;
    fn sub(self, rhs: ExpVec) -> ExpVec {
        &self - &rhs
    }
}

impl AddAssign<&ExpVec> for ExpVec {
    fn add_assign(&mut self, rhs: &ExpVec) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&ExpVec> for ExpVec {
    fn sub_assign(&mut self, rhs: &ExpVec) {
        *self = &*self - rhs;
    }
}

impl Neg for ExpVec {
    type Output = ExpVec;
    fn neg(mut self) -> ExpVec {
        for (_, e) in &mut self.entries {
            *e = -*e;
        }
        self
    }
}

impl<'a> std::iter::Sum<&'a ExpVec> for ExpVec {
    fn sum<I: Iterator<Item = &'a ExpVec>>(iter: I) -> ExpVec {
        iter.fold(ExpVec::zero(), |acc, v| &acc + v)
    }
}

impl std::iter::Sum for ExpVec {
    fn sum<I: Iterator<Item = ExpVec>>(iter: I) -> ExpVec {
        iter.fold(ExpVec::zero(), |acc, v| &acc + &v)
    }
}

impl fmt::Display for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}:{e}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_entries_canonicalizes() {
        let v = ExpVec::from_entries([(5, 1), (2, 3), (5, -1), (3, 0), (2, 1)]).unwrap();
        assert_eq!(v.entries(), &[(2, 4)]);
        assert_eq!(
            ExpVec::from_entries([(4, 1)]),
            Err(FactorIntError::NotPrime(4))
        );
    }

    #[test]
    fn accessors() {
        let v = ExpVec::from_entries([(2, 2), (7, -1), (5, 3)]).unwrap();
        assert_eq!(v.exponent(5), 3);
        assert_eq!(v.exponent(3), 0);
        assert!(!v.is_integral());
        assert_eq!(v.largest_positive_prime(), Some(5));
        assert_eq!(v.to_string(), "{2:2, 5:3, 7:-1}");
        assert_eq!(ExpVec::of_integer(720).entries(), &[(2, 4), (3, 2), (5, 1)]);
        assert!(ExpVec::of_integer(1).is_zero());
    }

    fn arb_expvec() -> impl Strategy<Value = ExpVec> {
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
        proptest::collection::vec((0usize..primes.len(), -6i64..=6), 0..8).prop_map(move |raw| {
            ExpVec::from_entries(raw.into_iter().map(|(i, e)| (primes[i], e))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn addition_is_a_commutative_group(a in arb_expvec(), b in arb_expvec(), c in arb_expvec()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(-(a.clone()), &ExpVec::zero() - &a);
            let sum = &a + &b;
            prop_assert!(sum.entries().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(sum.entries().iter().all(|&(_, e)| e != 0));
        }
    }
}
