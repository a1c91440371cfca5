use rand::Rng;

use super::{stream_rng, Role};
use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// `Σ_{i<n} ⌊(a·i + b) / m⌋` in `O(log m)`.
pub fn floor_sum(n: u64, m: u64, a: u64, b: u64) -> u128 {
    let (mut n, mut m, mut a, mut b) = (n as u128, m as u128, a as u128, b as u128);
    let mut acc = 0u128;
    loop {
        if a >= m {
            acc += n * n.saturating_sub(1) / 2 * (a / m);
            a %= m;
        }
        if b >= m {
            acc += n * (b / m);
            b %= m;
        }
        let y_max = a * n + b;
        if y_max < m {
            return acc;
        }
        n = y_max / m;
        b = y_max % m;
        std::mem::swap(&mut m, &mut a);
    }
}

/// `H(x) = (a·x + b) mod p` with `p` prime, `p > dim`, `a` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoUniversalHash {
    a: u64,
    b: u64,
    p: u64,
    dim: u64,
}

impl TwoUniversalHash {
    /// Draws `(a, b)` for the smallest prime above `dim`.
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let p = next_prime_above(dim as u64);
        let mut rng = stream_rng(seed, Role::Hash, 0);
        let a = loop {
            let a = rng.random_range(1..p);
            if a % 2 == 1 {
                break a;
            }
        };
        let b = rng.random_range(0..p);
        Ok(Self {
            a,
            b,
            p,
            dim: dim as u64,
        })
    }

    pub fn with_params(dim: usize, a: u64, b: u64, p: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !is_prime(p) || p <= dim as u64 {
            return Err(Error::InvalidParameter(format!(
                "modulus {p} must be a prime above {dim}"
            )));
        }
        if a == 0 || a >= p || a % 2 == 0 || b >= p {
            return Err(Error::InvalidParameter(format!(
                "need odd a in [1,{p}) and b in [0,{p}), got a={a}, b={b}"
            )));
        }
        Ok(Self {
            a,
            b,
            p,
            dim: dim as u64,
        })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn eval(&self, x: usize) -> Result<u64> {
        if x as u64 >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: x,
                dim: self.dim as usize,
            });
        }
        Ok(self.eval_unchecked(x as u64))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: u64) -> u64 {
        ((self.a as u128 * x as u128 + self.b as u128) % self.p as u128) as u64
    }

    /// Position of `H(x)` in the sorted list of `H(0), …, H(dim−1)`.
    ///
    /// This is the permutation of `[0, dim)` induced by ordering indices by hash value.
    pub fn rank(&self, x: usize) -> Result<usize> {
        let t = self.eval(x)?;
        let below = floor_sum(self.dim, self.p, self.a, self.b) + self.dim as u128
            - floor_sum(self.dim, self.p, self.a, self.b + self.p - t);
        Ok(below as usize)
    }
}
