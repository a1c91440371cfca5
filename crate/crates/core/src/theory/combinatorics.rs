use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// `C(n, k)`, zero whenever `n < 0`, `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// `C(n, k)` in floating point, zero outside the valid range.
pub fn binomial_f64(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Table of `H(k, n | d)`: placements of `n` items into `k` bins of width `d`
/// leaving no bin empty.
#[derive(Debug, Clone)]
pub struct HTable {
    width: usize,
    rows: Vec<Vec<BigUint>>,
}

impl HTable {
    /// All `H(k, n | d)` for `k ≤ max_bins`, `n ≤ max_items`.
    ///
    /// `H(0, n) = [n = 0]`; for `k ≥ 1` the recursion is
    /// `H(k, n) = Σ_j C(d, j) · H(k−1, n−j)` over `max(1, n−(k−1)d) ≤ j ≤ min(d, n−k+1)`.
    pub fn new(max_bins: usize, max_items: usize, width: usize) -> Self {
        let choose: Vec<BigUint> = (0..=width).map(|j| binomial(width as i64, j as i64)).collect();
        let mut rows = vec![(0..=max_items)
            .map(|n| if n == 0 { BigUint::one() } else { BigUint::zero() })
            .collect::<Vec<_>>()];
        for k in 1..=max_bins {
            let prev = &rows[k - 1];
            let row = (0..=max_items)
                .map(|n| {
                    let lo = 1.max(n.saturating_sub((k - 1) * width));
                    let hi = width.min((n + 1).saturating_sub(k));
                    let mut acc = BigUint::zero();
                    for j in lo..=hi {
                        if !prev[n - j].is_zero() {
                            acc += &choose[j] * &prev[n - j];
                        }
                    }
                    acc
                })
                .collect();
            rows.push(row);
        }
        Self { width, rows }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, bins: usize, items: usize) -> &BigUint {
        &self.rows[bins][items]
    }
}

/// Single value of `H(k, n | d)`.
pub fn h_count(k: usize, n: usize, d: usize) -> BigUint {
    HTable::new(k, n, d).get(k, n).clone()
}

/// `Σ_ℓ (−1)^ℓ C(k, ℓ) C((k−ℓ)d, n)`: surjective placements by inclusion-exclusion.
pub fn surjective_placements(k: usize, n: usize, d: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for l in 0..=k {
        let term = BigInt::from(binomial(k as i64, l as i64) * binomial(((k - l) * d) as i64, n as i64));
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(-1, 0), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(100, 50).to_string(), "100891344545564193334812497256");
        assert!((binomial_f64(30, 12) - 86_493_225.0).abs() < 1e-6);
    }

    #[test]
    fn h_examples() {
        for n in 1..=4 {
            assert_eq!(h_count(1, n, 4), binomial(4, n as i64));
        }
        assert_eq!(h_count(1, 0, 4), BigUint::zero());
        assert_eq!(h_count(3, 2, 4), BigUint::zero());
        assert_eq!(h_count(2, 2, 2), BigUint::from(4u32));
    }

    #[test]
    fn h_matches_inclusion_exclusion() {
        for k in 1..=5 {
            for d in 1..=5 {
                let table = HTable::new(k, k * d, d);
                for n in 0..=k * d {
                    assert_eq!(
                        BigInt::from(table.get(k, n).clone()),
                        surjective_placements(k, n, d),
                        "k={k} n={n} d={d}"
                    );
                }
            }
        }
    }
}
