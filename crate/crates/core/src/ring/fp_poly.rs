//! Polynomials over the prime field `F_p`, just enough to pick moduli.
//!
//! Polynomials are coefficient vectors, low degree first, with no trailing zeros.

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

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
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

/// `(p, r)` with `q = p^r`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = prime_factors(q as u128);
    if f.len() != 1 {
        return None;
    }
    let p = f[0] as u64;
    let mut r = 0;
    let mut v = q;
    while v % p == 0 {
        v /= p;
        r += 1;
    }
    Some((p, r))
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = inv_mod(*b.last().expect("nonzero divisor"), p);
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let c = a.last().unwrap() * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - c * bi % p) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^{p^i} mod f` for `i = 1..=k`.
fn frobenius_powers(f: &[u64], p: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(k);
    let mut cur = poly_rem(&[0, 1], f, p);
    for _ in 0..k {
        // cur <- cur^p
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        cur = acc;
        out.push(cur.clone());
    }
    out
}

/// Irreducibility over `F_p` for a monic `f` (low degree first).
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.iter().map(|&c| c % p).collect());
    let deg = f.len().saturating_sub(1);
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // f is irreducible iff gcd(x^{p^i} - x, f) = 1 for i <= deg/2.
    for xp in frobenius_powers(&f, p, deg / 2) {
        let mut h = xp;
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        let g = poly_gcd(&f, &trim(h), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible polynomial of degree `deg` over `F_p` whose
/// lower coefficients `(c_0, ..., c_{deg-1})` minimize `Σ c_i p^i`.
/// Returned low degree first with the leading 1.
pub fn smallest_irreducible(p: u64, deg: usize) -> Vec<u64> {
    let mut code: u128 = 0;
    loop {
        let mut f = Vec::with_capacity(deg + 1);
        let mut v = code;
        for _ in 0..deg {
            f.push((v % p as u128) as u64);
            v /= p as u128;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        code += 1;
    }
}
