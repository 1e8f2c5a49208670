//! Small number-theoretic helpers on machine integers.

use num_integer::Integer;

/// Least nonnegative residue of `x` modulo `n`.
#[inline]
pub fn reduce(x: i64, n: u64) -> u64 {
    x.rem_euclid(n as i64) as u64
}

/// Multiplicative inverse of `a` modulo `n`, if it exists.
pub fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (a as i64).extended_gcd(&(n as i64));
    if e.gcd != 1 {
        return None;
    }
    Some(reduce(e.x, n))
}

/// All `x` in `[0, n)` with `a·x ≡ b (mod n)`.
///
/// There are either no solutions or exactly `gcd(a, n)` of them, spaced `n / gcd` apart.
pub fn solve_linear_congruence(a: u64, b: u64, n: u64) -> Vec<u64> {
    let a = a % n;
    let b = b % n;
    let g = a.gcd(&n);
    if b % g != 0 {
        return Vec::new();
    }
    let step = n / g;
    let x0 = match inverse_mod(a / g, step) {
        Some(inv) => ((b / g) as u128 * inv as u128 % step as u128) as u64,
        None => return Vec::new(),
    };
    (0..g).map(|t| x0 + t * step).collect()
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
///
/// # Panics
/// If `n` is even or zero.
pub fn jacobi_symbol(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus, got {n}");
    let mut a = reduce(a, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
