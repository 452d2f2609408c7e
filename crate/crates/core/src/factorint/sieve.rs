use std::sync::{Arc, OnceLock, RwLock};

/// Limit of the process-wide table before any extension.
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

/// All primes up to `limit`, produced by a sieve of Eratosthenes.
///
/// Tables are immutable. Growing one means building a new table with
/// [`PrimeTable::extended_to`]; the old one stays valid for whoever holds it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let n = usize::try_from(limit).expect("sieve limit does not fit in memory");
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        PrimeTable { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `<= bound`, which must not exceed the table limit.
    pub fn primes_up_to(&self, bound: u64) -> &[u64] {
        debug_assert!(bound <= self.limit);
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }

    /// Number of primes `<= bound` (the prime-counting function).
    pub fn pi(&self, bound: u64) -> usize {
        self.primes_up_to(bound.min(self.limit)).len()
    }

    /// Index of `p` within the table, if it is a tabulated prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    /// A new table that covers at least `limit`. Returns a clone when this
    /// table is already large enough.
    pub fn extended_to(&self, limit: u64) -> PrimeTable {
        if limit <= self.limit {
            self.clone()
        } else {
            PrimeTable::new(limit.max(self.limit.saturating_mul(2)))
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            self.primes.binary_search(&n).is_ok()
        } else {
            is_prime_by_trial(n, self)
        }
    }

    /// Prime factorization of `n >= 1` by trial division, primes ascending.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1, "factorize requires n >= 1");
        let mut out = Vec::new();
        for &p in &self.primes {
            if p.saturating_mul(p) > n {
                break;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        // Past the table: keep going with odd trial divisors.
        let mut d = (self.limit + 1) | 1;
        while d.saturating_mul(d) <= n {
            if n % d == 0 {
                let mut e = 0;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                out.push((d, e));
            }
            d += 2;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }
}

fn is_prime_by_trial(n: u64, table: &PrimeTable) -> bool {
    if n < 2 {
        return false;
    }
    let f = table.factorize(n);
    f.len() == 1 && f[0] == (n, 1)
}

static SHARED: OnceLock<RwLock<Arc<PrimeTable>>> = OnceLock::new();

/// The process-wide table, grown (by replacement) to cover `limit`.
pub fn shared_table(limit: u64) -> Arc<PrimeTable> {
    let cell = SHARED.get_or_init(|| RwLock::new(Arc::new(PrimeTable::new(DEFAULT_SIEVE_LIMIT))));
    {
        let current = cell.read().expect("prime table lock poisoned");
        if current.limit() >= limit {
            return Arc::clone(&current);
        }
    }
    let mut slot = cell.write().expect("prime table lock poisoned");
    if slot.limit() < limit {
        *slot = Arc::new(slot.extended_to(limit));
    }
    Arc::clone(&slot)
}

/// Table whose limit is at least `sqrt(n)`, enough to factor `n` without
/// falling back to odd trial division.
pub(crate) fn table_for_factoring(n: u64) -> Arc<PrimeTable> {
    let root = n.isqrt() + 1;
    shared_table(root.min(DEFAULT_SIEVE_LIMIT * 100))
}

/// `lpf[n]` = largest prime factor of `n` for `n <= limit`, with `lpf[1] = 1`
/// and `lpf[0] = 0`.
pub fn largest_prime_factor_table(limit: usize) -> Vec<u64> {
    let mut lpf = vec![0u64; limit + 1];
    if limit >= 1 {
        lpf[1] = 1;
    }
    for p in 2..=limit {
        if lpf[p] != 0 {
            continue;
        }
        let mut m = p;
        while m <= limit {
            lpf[m] = p as u64;
            m += p;
        }
    }
    lpf
}

/// `spf[n]` = smallest prime factor of `n` for `2 <= n <= limit`;
/// `spf[0] = spf[1] = 0`.
pub fn smallest_prime_factor_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for p in 2..=limit {
        if spf[p] != 0 {
            continue;
        }
        let mut m = p;
        while m <= limit {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
            m += p;
        }
    }
    spf
}

/// `rad[n]` = product of the distinct primes dividing `n`, for `n <= limit`.
pub fn radical_table(limit: usize) -> Vec<u64> {
    let mut rad = vec![1u64; limit + 1];
    let mut seen = vec![false; limit + 1];
    if limit >= 1 {
        rad[0] = 0;
    }
    for p in 2..=limit {
        if seen[p] {
            continue;
        }
        let mut m = p;
        while m <= limit {
            seen[m] = true;
            rad[m] *= p as u64;
            m += p;
        }
    }
    rad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_matches_trial_division() {
        let table = PrimeTable::new(20_000);
        let naive: Vec<u64> = (0..=20_000).filter(|&n| naive_is_prime(n)).collect();
        assert_eq!(table.primes(), &naive[..]);
    }

    #[test]
    fn small_limits() {
        assert!(PrimeTable::new(0).primes().is_empty());
        assert!(PrimeTable::new(1).primes().is_empty());
        assert_eq!(PrimeTable::new(2).primes(), &[2]);
        assert_eq!(PrimeTable::new(10).primes(), &[2, 3, 5, 7]);
    }

    #[test]
    fn extension_builds_a_new_table() {
        let small = PrimeTable::new(100);
        let big = small.extended_to(1000);
        assert_eq!(small.limit(), 100);
        assert!(big.limit() >= 1000);
        assert_eq!(big.primes_up_to(100), small.primes());
        assert_eq!(big.pi(1000), 168);
    }

    #[test]
    fn factorization_beyond_table() {
        let table = PrimeTable::new(10);
        assert_eq!(table.factorize(1), vec![]);
        assert_eq!(table.factorize(720), vec![(2, 4), (3, 2), (5, 1)]);
        assert_eq!(table.factorize(13 * 13 * 101), vec![(13, 2), (101, 1)]);
        assert!(table.is_prime(1_000_003));
        assert!(!table.is_prime(1_000_001));
    }

    #[test]
    fn scan_tables() {
        let lpf = largest_prime_factor_table(30);
        assert_eq!(&lpf[1..=12], &[1, 2, 3, 2, 5, 3, 7, 2, 3, 5, 11, 3]);
        let rad = radical_table(30);
        assert_eq!(&rad[1..=12], &[1, 2, 3, 2, 5, 6, 7, 2, 3, 10, 11, 6]);
        assert_eq!(rad[30], 30);
        let spf = smallest_prime_factor_table(30);
        assert_eq!(&spf[2..=10], &[2, 3, 2, 5, 2, 7, 2, 3, 2]);
        assert_eq!(spf[29], 29);
    }
}
