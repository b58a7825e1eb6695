//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

/// Removes squares of `p` from `n` so that `v_p(n) ≤ 1`.
pub fn strip_square_factors(mut n: i64, p: i64) -> i64 {
    while n % (p * p) == 0 {
        n /= p * p;
    }
    n
}

/// Solvability of `x0² = a x1² + b x2²` in Q_p (or R when `p` is `None`)
/// by searching primitive solutions modulo `p^k`, with `k = 3` for odd `p`
/// and `k = 7` for `p = 2`. Returns the Hilbert symbol.
pub fn brute_hilbert(a: i64, b: i64, p: Option<u64>) -> i8 {
    let Some(p) = p else {
        let solvable = [(1, 0), (0, 1), (1, 1)].iter().any(|&(x1, x2)| a * x1 * x1 + b * x2 * x2 >= 0);
        return if solvable { 1 } else { -1 };
    };
    let p = p as i64;
    let k = if p == 2 { 7 } else { 3 };
    let m = p.pow(k);
    let a = strip_square_factors(a, p).rem_euclid(m);
    let b = strip_square_factors(b, p).rem_euclid(m);
    let mut square = vec![false; m as usize];
    for x in 0..m {
        square[(x * x % m) as usize] = true;
    }
    let rhs = |x1: i64, x2: i64| ((a * (x1 * x1 % m) + b * (x2 * x2 % m)) % m) as usize;
    // a primitive solution can be scaled to x1 = 1, or to x2 = 1 with p | x1
    let found = (0..m).any(|x2| square[rhs(1, x2)]) || (0..m).step_by(p as usize).any(|x1| square[rhs(x1, 1)]);
    if found {
        1
    } else {
        -1
    }
}

/// Roots of an integer polynomial (constant term first) modulo `p`.
pub fn roots_mod(coeffs: &[i64], p: u64) -> Vec<u64> {
    let p = p as i128;
    (0..p)
        .filter(|&r| coeffs.iter().rev().fold(0i128, |acc, &c| (acc * r + c as i128).rem_euclid(p)) == 0)
        .map(|r| r as u64)
        .collect()
}
