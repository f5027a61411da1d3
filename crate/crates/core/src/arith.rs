//! Small integer helpers: primality, factorization, prime-power splitting,
//! binomial coefficients mod p, and polynomial arithmetic over F_p used while
//! constructing a field.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

/// Splits `q = p^e` into `(p, e)`; `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let ps = prime_factors(q);
    if ps.len() != 1 {
        return None;
    }
    let p = ps[0];
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    Some((p, e))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// C(n, k) mod p for prime p, by Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..ki {
            num = num * ((ni - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        // p prime and den < p nonzero, so Fermat inversion applies.
        acc = acc * num % p * pow_mod_u64(den, p - 2, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

/// Polynomials over F_p, little-endian coefficient vectors with no trailing
/// zeros (the zero polynomial is the empty vector).
pub(crate) mod fp_poly {
    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = super::pow_mod_u64(m[dm], p - 2, p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                let t = &mut r[shift + i];
                *t = (*t + p - c * mi % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    pub fn pow_mod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Poly {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            exp >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Rabin's irreducibility test for a monic `f` of degree `d >= 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = (f.len() - 1) as u64;
        if d == 1 {
            return true;
        }
        let x: Poly = vec![0, 1];
        // x^(p^k) mod f by repeated p-th powering.
        let frob = |k: u64| {
            let mut t = rem(&x, f, p);
            for _ in 0..k {
                t = pow_mod(&t, p, f, p);
            }
            t
        };
        if sub(&frob(d), &x, p) != Vec::<u64>::new() {
            return false;
        }
        for r in super::prime_factors(d) {
            let t = sub(&frob(d / r), &x, p);
            if gcd(f, &t, p).len() != 1 {
                return false;
            }
        }
        true
    }
}
