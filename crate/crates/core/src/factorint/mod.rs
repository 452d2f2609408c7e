//! Prime-side integer arithmetic.
//!
//! Every factorial identity in this crate is decided on [`ExpVec`]s built
//! with Legendre's formula, so no factorial is ever multiplied out here
//! except in [`delta`], which also returns the literal block product.

mod expvec;
mod sieve;

pub use expvec::ExpVec;
pub use sieve::{
    largest_prime_factor_table, radical_table, shared_table, smallest_prime_factor_table,
    PrimeTable, DEFAULT_SIEVE_LIMIT,
};

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorIntError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("argument must be at least {min}, got {got}")]
    TooSmall { min: u64, got: u64 },
}

/// Exponent of the prime `p` in `n!`: `Σ_{e≥1} ⌊n/p^e⌋`.
pub fn vp_factorial(n: u64, p: u64) -> Result<u64, FactorIntError> {
    if !sieve::table_for_factoring(p).is_prime(p) {
        return Err(FactorIntError::NotPrime(p));
    }
    Ok(legendre(n, p))
}

#[inline]
pub(crate) fn legendre(mut n: u64, p: u64) -> u64 {
    let mut total = 0;
    while n >= p {
        n /= p;
        total += n;
    }
    total
}

/// Exponent vector of `n!`; empty for `n <= 1`.
pub fn factorial_expvec(n: u64) -> ExpVec {
    let table = shared_table(n);
    factorial_expvec_with(&table, n)
}

pub(crate) fn factorial_expvec_with(table: &PrimeTable, n: u64) -> ExpVec {
    let entries = table
        .primes_up_to(n)
        .iter()
        .map(|&p| (p, legendre(n, p) as i64))
        .collect();
    ExpVec::from_canonical(entries)
}

/// Product of the distinct primes dividing `a`; `radical(1) = 1`.
pub fn radical(a: u64) -> Result<u64, FactorIntError> {
    if a == 0 {
        return Err(FactorIntError::TooSmall { min: 1, got: 0 });
    }
    Ok(sieve::table_for_factoring(a)
        .factorize(a)
        .iter()
        .map(|&(p, _)| p)
        .product())
}

/// Largest prime factor of `n`, with the convention `P(1) = 1`.
pub fn largest_prime_factor(n: u64) -> Result<u64, FactorIntError> {
    if n == 0 {
        return Err(FactorIntError::TooSmall { min: 1, got: 0 });
    }
    Ok(sieve::table_for_factoring(n)
        .factorize(n)
        .last()
        .map_or(1, |&(p, _)| p))
}

/// The block `Δ(m, k) = m(m+1)⋯(m+k−1)` and its exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delta {
    pub m: u64,
    pub k: u64,
    pub value: BigUint,
    pub vec: ExpVec,
}

pub fn delta(m: u64, k: u64) -> Result<Delta, FactorIntError> {
    if m == 0 {
        return Err(FactorIntError::TooSmall { min: 1, got: m });
    }
    if k == 0 {
        return Err(FactorIntError::TooSmall { min: 1, got: k });
    }
    let value = (m..m + k).fold(BigUint::from(1u32), |acc, x| acc * x);
    Ok(Delta {
        m,
        k,
        value,
        vec: delta_expvec(m, k),
    })
}

/// Exponent vector of `Δ(m, k)` as `(m+k−1)! / (m−1)!`.
pub fn delta_expvec(m: u64, k: u64) -> ExpVec {
    debug_assert!(m >= 1 && k >= 1);
    let top = m + k - 1;
    let table = shared_table(top);
    &factorial_expvec_with(&table, top) - &factorial_expvec_with(&table, m - 1)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

fn primes_up_to_real(nu: f64) -> Vec<u64> {
    if !(nu >= 2.0) {
        return Vec::new();
    }
    let bound = nu.floor() as u64;
    shared_table(bound).primes_up_to(bound).to_vec()
}

/// Chebyshev's `θ(ν) = Σ_{p ≤ ν} log p`; zero below 2.
pub fn theta(nu: f64) -> f64 {
    primes_up_to_real(nu)
        .into_iter()
        .map(|p| (p as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// `Σ_{p ≤ ν} (log p)/p`; zero below 2.
pub fn mertens_log_sum(nu: f64) -> f64 {
    primes_up_to_real(nu)
        .into_iter()
        .map(|p| (p as f64).ln() / p as f64)
        .collect::<CompensatedSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive, Zero};

    fn trial_factor(mut n: u64) -> Vec<(u64, i64)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn big_factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, i| acc * i)
    }

    #[test]
    fn vp_factorial_examples() {
        assert_eq!(vp_factorial(10, 2), Ok(5 + 2 + 1));
        assert_eq!(vp_factorial(5, 7), Ok(0));
        assert_eq!(vp_factorial(100, 5), Ok(20 + 4));
        assert_eq!(vp_factorial(0, 2), Ok(0));
        assert_eq!(vp_factorial(10, 6), Err(FactorIntError::NotPrime(6)));
        assert_eq!(vp_factorial(10, 1), Err(FactorIntError::NotPrime(1)));
    }

    #[test]
    fn factorial_expvec_examples() {
        assert!(factorial_expvec(0).is_zero());
        assert!(factorial_expvec(1).is_zero());
        assert_eq!(factorial_expvec(6).entries(), trial_factor(720).as_slice());
        assert_eq!(
            factorial_expvec(10).entries(),
            trial_factor(3_628_800).as_slice()
        );
        assert_eq!(
            factorial_expvec(10).entries(),
            &[(2, 8), (3, 4), (5, 2), (7, 1)]
        );
    }

    #[test]
    fn factorial_expvec_recurrence() {
        let mut prev = factorial_expvec(1);
        for n in 2..=1000 {
            let next = factorial_expvec(n);
            assert_eq!(next, &prev + &ExpVec::of_integer(n), "n = {n}");
            prev = next;
        }
    }

    #[test]
    fn legendre_against_literal_factorial() {
        for n in [0u64, 1, 2, 7, 30, 57] {
            let mut f = big_factorial(n);
            for &p in shared_table(60).primes_up_to(n) {
                let mut e = 0;
                while (&f % p).is_zero() {
                    f /= p;
                    e += 1;
                }
                assert_eq!(vp_factorial(n, p), Ok(e));
            }
            assert!(f.is_one());
        }
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(1), Ok(1));
        assert_eq!(radical(720), Ok(30));
        assert_eq!(radical(13), Ok(13));
        assert!(radical(0).is_err());
    }

    #[test]
    fn radical_laws() {
        for a in 1..300u64 {
            let ra = radical(a).unwrap();
            assert_eq!(radical(ra), Ok(ra));
            for b in 1..60u64 {
                let rab = radical(a * b).unwrap();
                assert_eq!((ra * radical(b).unwrap()) % rab, 0);
            }
        }
    }

    #[test]
    fn largest_prime_factor_examples() {
        assert_eq!(largest_prime_factor(1), Ok(1));
        assert_eq!(largest_prime_factor(24), Ok(3));
        let primorial_19: u64 = [2, 3, 5, 7, 11, 13, 17, 19].iter().product();
        assert_eq!(primorial_19, 9_699_690);
        assert_eq!(largest_prime_factor(primorial_19), Ok(19));
        assert_eq!(largest_prime_factor(primorial_19 * 23), Ok(23));
        assert_eq!(largest_prime_factor(1_000_003 * 2), Ok(1_000_003));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(5, 3).unwrap().value.to_u64(), Some(210));
        assert_eq!(delta(17, 1).unwrap().value.to_u64(), Some(17));
        let d = delta(15, 2).unwrap();
        assert_eq!(d.value.to_u64(), Some(240));
        assert_eq!(d.vec, &factorial_expvec(5) + &factorial_expvec(2));
        assert!(delta(0, 3).is_err());
        assert!(delta(3, 0).is_err());
        assert!(delta(1, 1).unwrap().vec.is_zero());
    }

    #[test]
    fn delta_expvec_matches_factorization_of_product() {
        for m in 1..40u64 {
            for k in 1..8u64 {
                let d = delta(m, k).unwrap();
                let lit: Vec<(u64, i64)> = trial_factor(d.value.to_u64().unwrap());
                assert_eq!(d.vec.entries(), lit.as_slice(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn delta_quotient_identity_wide() {
        for m in (1..=1000u64).step_by(37) {
            for k in (1..=1000u64).step_by(53) {
                let v = delta_expvec(m, k);
                assert_eq!(v, &factorial_expvec(m + k - 1) - &factorial_expvec(m - 1));
                assert!(v.is_integral() || v.is_zero());
            }
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(1.5), 0.0);
        assert_eq!(theta(1.0), 0.0);
        assert!((theta(2.0) - 2f64.ln()).abs() < 1e-15);
        assert!((theta(10.0) - 210f64.ln()).abs() < 1e-12);
        assert!((theta(10.0) - 5.347_107_530_717_468).abs() < 1e-12);
    }

    #[test]
    fn mertens_examples() {
        assert_eq!(mertens_log_sum(1.9), 0.0);
        let direct3 = 2f64.ln() / 2.0 + 3f64.ln() / 3.0;
        assert!((mertens_log_sum(3.0) - direct3).abs() < 1e-15);
        assert!((direct3 - 0.712_77).abs() < 1e-5);
        let direct10 = direct3 + 5f64.ln() / 5.0 + 7f64.ln() / 7.0;
        assert!((mertens_log_sum(10.0) - direct10).abs() < 1e-15);
        assert!((direct10 - 1.312_652).abs() < 1e-6);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs: Vec<f64> = std::iter::once(1e16)
            .chain(std::iter::repeat(1.0).take(1000))
            .collect();
        let s: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(s.value(), 1e16 + 1000.0);
    }
}
