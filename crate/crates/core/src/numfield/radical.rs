use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

/// A squarefree positive integer tagging one square-root basis element.
///
/// Stored as its sorted prime factors together with the product so that
/// ordering follows the integer value. `1` (no primes) tags the rational part.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radical {
    value: BigUint,
    primes: Vec<u64>,
}

impl Radical {
    pub fn one() -> Self {
        Radical {
            value: BigUint::one(),
            primes: Vec::new(),
        }
    }

    /// Builds a radical from distinct primes. The caller guarantees primality.
    pub(crate) fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        let value = primes
            .iter()
            .fold(BigUint::one(), |acc, &p| acc * BigUint::from(p));
        Radical { value, primes }
    }

    pub fn is_one(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn contains(&self, prime: u64) -> bool {
        self.primes.binary_search(&prime).is_ok()
    }

    /// `sqrt(self) * sqrt(other) = factor * sqrt(result)`.
    pub fn mul(&self, other: &Radical) -> (Radical, BigUint) {
        let mut merged = Vec::with_capacity(self.primes.len() + other.primes.len());
        let mut factor = BigUint::one();
        let (mut i, mut j) = (0, 0);
        while i < self.primes.len() && j < other.primes.len() {
            let (a, b) = (self.primes[i], other.primes[j]);
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    merged.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    factor *= BigUint::from(a);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.primes[i..]);
        merged.extend_from_slice(&other.primes[j..]);
        let value = merged
            .iter()
            .fold(BigUint::one(), |acc, &p| acc * BigUint::from(p));
        (
            Radical {
                value,
                primes: merged,
            },
            factor,
        )
    }

    /// The radical with `prime` removed (the caller checks membership).
    pub(crate) fn without(&self, prime: u64) -> Radical {
        Radical::from_primes(self.primes.iter().copied().filter(|&p| p != prime).collect())
    }
}

impl fmt::Debug for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sqrt({})", self.value)
    }
}

/// Splits `n = root^2 * squarefree` by trial division.
pub fn square_decompose(mut n: u64) -> (u64, Vec<u64>) {
    let mut root = 1u64;
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            root *= d.pow(e / 2);
            if e % 2 == 1 {
                primes.push(d);
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        primes.push(n);
    }
    (root, primes)
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && square_decompose(n).0 == 1
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
