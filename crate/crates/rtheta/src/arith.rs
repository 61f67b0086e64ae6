//! Small integer number theory: Jacobi/Kronecker symbols and Dirichlet
//! characters in Conrey labelling.

use num_integer::Integer;

/// Jacobi symbol `(m/n)` for odd `n > 0`.
pub fn jacobi(m: i64, n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = m.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
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

/// Kronecker symbol `(a/n)` for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    result * jacobi(a, n)
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn is_primitive_root(g: u64, p: u64) -> bool {
    factor(p - 1).iter().all(|&(r, _)| pow_mod(g, (p - 1) / r, p) != 1)
}

/// Conrey's generator for odd prime powers: the least primitive root mod `p`,
/// replaced by `g + p` if it fails to generate modulo `p²`.
fn conrey_generator(p: u64, k: u32) -> u64 {
    let g = (2..p).find(|&g| is_primitive_root(g, p)).unwrap_or(1);
    if k >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

fn discrete_log(g: u64, x: u64, m: u64) -> Option<u64> {
    let mut acc = 1 % m;
    for e in 0..m {
        if acc == x % m {
            return Some(e);
        }
        acc = acc * g % m;
    }
    None
}

/// Value of the Conrey character `χ_q(a, n)` as an exact fraction of a turn:
/// returns `None` when `gcd(n, q) > 1` (value 0), else `Some((num, den))`
/// with `χ = e^{2πi·num/den}`.
pub fn conrey_phase(q: u64, a: u64, n: i64) -> Option<(u64, u64)> {
    let n = n.rem_euclid(q as i64) as u64;
    if n.gcd(&q) != 1 || a.gcd(&q) != 1 {
        return None;
    }
    // Accumulate phases as a fraction with common denominator.
    let mut num: u64 = 0;
    let mut den: u64 = 1;
    let mut add = |n2: u64, d2: u64| {
        let l = den.lcm(&d2);
        num = (num * (l / den) + n2 * (l / d2)) % l;
        den = l;
    };
    for (p, k) in factor(q) {
        let pk = p.pow(k);
        let (am, nm) = (a % pk, n % pk);
        if p == 2 {
            if k == 1 {
                continue;
            }
            // n ≡ ε·5^α mod 2^k
            let split = |x: u64| -> (u64, u64) {
                let eps_neg = x % 4 == 3;
                let y = if eps_neg { pk - x } else { x };
                let alpha = if k >= 3 { discrete_log(5, y, pk).unwrap_or(0) } else { 0 };
                (eps_neg as u64, alpha)
            };
            let (ea, aa) = split(am);
            let (en, an) = split(nm);
            add(ea * en, 2);
            if k >= 3 {
                add(aa * an % (1 << (k - 2)), 1 << (k - 2));
            }
        } else {
            let g = conrey_generator(p, k);
            let phi = pk / p * (p - 1);
            let ia = discrete_log(g, am, pk).unwrap_or(0);
            let in_ = discrete_log(g, nm, pk).unwrap_or(0);
            add(ia * in_ % phi, phi);
        }
    }
    Some((num, den))
}
