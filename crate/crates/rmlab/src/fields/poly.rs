//! Dense polynomial arithmetic over the prime field F_p, used only to
//! construct the tower modulus and to multiply when no discrete-log
//! tables are available. Coefficients are little-endian residues mod p.

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn deg(v: &[u64]) -> isize {
    v.len() as isize - 1
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + (p - lead) * mi % p) % p;
            }
        }
        r.pop();
    }
    trim(&mut r);
    r
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(a: &[u64], mut k: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = rem(a, m, p);
    let mut acc = vec![1u64];
    while k > 0 {
        if k & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        k >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for i in 0..len {
        let ai = a.get(i).copied().unwrap_or(0);
        let bi = b.get(i).copied().unwrap_or(0);
        out[i] = (ai + p - bi) % p;
    }
    trim(&mut out);
    out
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    // p is prime and small; Fermat.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // make b monic for rem()
        let lead = *b.last().unwrap();
        if lead != 1 {
            let li = inv_mod_p(lead, p);
            for c in b.iter_mut() {
                *c = *c * li % p;
            }
        }
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn prime_factors(mut n: usize) -> Vec<usize> {
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

/// Irreducibility over F_p of a monic polynomial of degree d, by the
/// standard Frobenius criterion: x^{p^d} = x mod f, and for every prime
/// r | d, gcd(x^{p^{d/r}} - x, f) = 1.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    // h_k = x^{p^k} mod f, computed by iterated p-th powers
    let mut h = x.clone();
    let mut frob_pow = vec![Vec::new(); d + 1];
    frob_pow[0] = h.clone();
    for item in frob_pow.iter_mut().take(d + 1).skip(1) {
        h = powmod(&h, p as u128, f, p);
        *item = h.clone();
    }
    if frob_pow[d] != rem(&x, f, p) {
        return false;
    }
    for r in prime_factors(d) {
        let diff = sub(&frob_pow[d / r], &x, p);
        let g = gcd(&diff, f, p);
        if deg(&g) > 0 {
            return false;
        }
    }
    true
}
