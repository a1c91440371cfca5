use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::combinatorics::binomial;

/// One admissible term: `(l0, l2, g0, g1, s)` together with the derived
/// counts and the seven numerator binomial arguments.
struct Term {
    weight_num: [i64; 2],
    weight_den: [i64; 2],
    binomials: [(i64, i64); 7],
}

/// Enumerates the feasible `(l0, l2, g0, g1)` and the inner index `s` of the
/// pair-collision sum for `1 ≤ a′ < f′ < d`.
///
/// `l`, `g`, `h` count the pairs `(q, q+1)` whose first coordinate lies in
/// the intersection, the empty part and the symmetric difference, split by
/// the type of the second coordinate.
fn for_each_term(a: i64, f: i64, d: i64, mut visit: impl FnMut(Term)) {
    let e = d - f;
    for l0 in 0..=a {
        for l2 in 0..=(a - l0) {
            let l1 = a - l0 - l2;
            for g0 in 0..=e {
                for g1 in 0..=(e - g0) {
                    let g2 = e - g0 - g1;
                    let h0 = a - l0 - g0;
                    let h1 = (f - a) - l1 - g1;
                    let h2 = e - l2 - g2;
                    if h0 < 0 || h1 < 0 || h2 < 0 {
                        continue;
                    }
                    for s in 0..e {
                        let n2 = e - s - g1;
                        let n1 = g0 - n2;
                        let n3 = l2 - g0 + n2;
                        let n4 = l1 - n2;
                        visit(Term {
                            weight_num: [l0, a * (g0 + l2)],
                            weight_den: [f + g0 + g1, (f + g0 + g1) * f],
                            binomials: [
                                (e, s),
                                (f - a - 1, e - s - 1),
                                (s, n1),
                                (e - s, n2),
                                (e - s, n3),
                                (f - a - (e - s), n4),
                                (a - 1, a - l1 - l2),
                            ],
                        });
                    }
                }
            }
        }
    }
}

/// Trivial cases shared by both evaluators, as `(numerator, denominator)`.
fn special_case(a: i64, f: i64, d: i64) -> Option<(i64, i64)> {
    if a == 0 {
        Some((0, 1))
    } else if a == f {
        Some((1, 1))
    } else if f == d {
        Some((a * (a - 1), d * (d - 1)))
    } else {
        None
    }
}

fn check(a_p: usize, f_p: usize, d: usize) {
    assert!(
        a_p <= f_p && f_p <= d && f_p >= 1,
        "need a′ ≤ f′ ≤ d, f′ ≥ 1 (got {a_p}, {f_p}, {d})"
    );
}

/// Probability that two circulant slots one shift apart both collide on a
/// bin holding `f_p` occupied offsets, `a_p` of them shared, out of `d`.
pub fn e_tilde_exact(a_p: usize, f_p: usize, d: usize) -> BigRational {
    check(a_p, f_p, d);
    let (a, f, d) = (a_p as i64, f_p as i64, d as i64);
    if let Some((n, m)) = special_case(a, f, d) {
        return BigRational::new(n.into(), m.into());
    }
    let den = BigInt::from(binomial(d - a - 1, d - f - 1) * binomial(d - 1, a));
    let mut total = BigRational::zero();
    for_each_term(a, f, d, |t| {
        let num = t
            .binomials
            .iter()
            .fold(BigInt::one(), |acc, &(n, k)| acc * BigInt::from(binomial(n, k)));
        if num.is_zero() {
            return;
        }
        let w = BigRational::new(t.weight_num[0].into(), t.weight_den[0].into())
            + BigRational::new(t.weight_num[1].into(), t.weight_den[1].into());
        total += w * BigRational::new(num, den.clone());
    });
    clamp(total)
}

fn clamp(x: BigRational) -> BigRational {
    if x < BigRational::zero() {
        BigRational::zero()
    } else if x > BigRational::one() {
        BigRational::one()
    } else {
        x
    }
}

/// Floating-point [`e_tilde_exact`], evaluated in log space.
pub fn e_tilde(a_p: usize, f_p: usize, d: usize) -> f64 {
    check(a_p, f_p, d);
    let (a, f, di) = (a_p as i64, f_p as i64, d as i64);
    if let Some((n, m)) = special_case(a, f, di) {
        return n as f64 / m as f64;
    }
    let lf = LnFactorial::new(d);
    let ln_den = lf.ln_binomial(di - a - 1, di - f - 1) + lf.ln_binomial(di - 1, a);
    let mut total = 0.0;
    for_each_term(a, f, di, |t| {
        let mut ln = -ln_den;
        for &(n, k) in &t.binomials {
            if n < 0 || k < 0 || k > n {
                return;
            }
            ln += lf.ln_binomial(n, k);
        }
        let w = t.weight_num[0] as f64 / t.weight_den[0] as f64 + t.weight_num[1] as f64 / t.weight_den[1] as f64;
        total += w * ln.exp();
    });
    total.clamp(0.0, 1.0)
}

struct LnFactorial(Vec<f64>);

impl LnFactorial {
    fn new(n: usize) -> Self {
        let mut t = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        t.push(0.0);
        for i in 1..=n {
            acc += (i as f64).ln();
            t.push(acc);
        }
        Self(t)
    }

    fn ln_binomial(&self, n: i64, k: i64) -> f64 {
        let (n, k) = (n as usize, k as usize);
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::distributions::to_f64;

    #[test]
    fn saturated_and_trivial() {
        assert_eq!(e_tilde_exact(5, 5, 5), BigRational::one());
        assert_eq!(e_tilde(0, 3, 6), 0.0);
        assert_eq!(e_tilde_exact(2, 4, 4), BigRational::new(2.into(), 12.into()));
    }

    #[test]
    fn float_matches_exact() {
        for d in 2..=12 {
            for f in 1..=d {
                for a in 0..=f {
                    let x = to_f64(&e_tilde_exact(a, f, d));
                    let y = e_tilde(a, f, d);
                    assert!((x - y).abs() < 1e-12, "d={d} a={a} f={f}: {x} vs {y}");
                    assert!((0.0..=1.0).contains(&y));
                }
            }
        }
    }

    #[test]
    fn below_independent_product_bound() {
        // Two slots on the same bin see overlapping orders, but never more
        // correlated than a single slot.
        for d in 3..=10 {
            for f in 1..d {
                for a in 1..f {
                    let e = e_tilde(a, f, d);
                    assert!(e <= a as f64 / f as f64 + 1e-12);
                }
            }
        }
    }
}
