//! The field tower F_p ⊆ F_q ⊆ F_{q^{n/2}} ⊆ F_{q^n}.
//!
//! Every level lives inside a single quotient F_p[t]/(modulus) of degree
//! e·n over F_p; the subfield of relative degree m | n is the fixed set of
//! the q^m-power Frobenius. Elements cross the API boundary as the integer
//! encoding Σ c_i p^i of their coordinate vector (c_0, ..., c_{e·n-1}).
//!
//! For fields of size up to 2^24 a discrete-log table pair (exp/log over a
//! fixed generator) is built at construction, making multiplication,
//! inversion, Frobenius and square roots O(1). All scan-heavy modules rely
//! on this path.

mod poly;

use crate::error::{Error, Result};

/// Fields up to this size get exp/log tables.
const TABLE_LIMIT: u64 = 1 << 24;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of the tower, tagged with the subfield level it was declared
/// at: level m means the element lies in F_{q^m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    enc: u64,
    level: usize,
}

impl FieldElement {
    pub fn encoding(&self) -> u64 {
        self.enc
    }

    pub fn level(&self) -> usize {
        self.level
    }
}

struct DlogTables {
    /// exp[k] = encoding of g^k, duplicated to 2(size-1) entries so that
    /// a sum of two logs indexes directly.
    exp: Vec<u64>,
    /// log[enc] for enc in 1..size; log[0] is a sentinel.
    log: Vec<u32>,
}

/// Immutable context for one tower. Safe to share across threads.
pub struct FieldContext {
    p: u64,
    e: usize,
    n: usize,
    deg: usize,
    q: u64,
    size: u64,
    modulus: Vec<u64>,
    tables: Option<DlogTables>,
}

impl FieldContext {
    /// Deterministically builds the tower for q = p^e and top relative
    /// degree n: the modulus is the first monic irreducible of degree e·n
    /// over F_p in encoding order. p = 2 is accepted (the codes module
    /// works in even characteristic); geometry operations reject it.
    pub fn build_tower(p: u64, e: usize, n: usize) -> Result<FieldContext> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || n == 0 {
            return Err(Error::InvalidParameter("e and n must be positive".into()));
        }
        let deg = e * n;
        let size = (p as u128).checked_pow(deg as u32).ok_or(Error::FieldTooLarge(u128::MAX))?;
        if size > u64::MAX as u128 {
            return Err(Error::FieldTooLarge(size));
        }
        let size = size as u64;
        let q = p.pow(e as u32);

        let modulus = Self::first_irreducible(p, deg);
        let mut ctx = FieldContext { p, e, n, deg, q, size, modulus, tables: None };
        if size <= TABLE_LIMIT {
            ctx.build_tables();
        }
        Ok(ctx)
    }

    fn first_irreducible(p: u64, deg: usize) -> Vec<u64> {
        if deg == 1 {
            // t itself is the first monic irreducible of degree 1
            return vec![0, 1];
        }
        let mut k = 0u64;
        loop {
            let mut f = vec![0u64; deg + 1];
            let mut v = k;
            for c in f.iter_mut().take(deg) {
                *c = v % p;
                v /= p;
            }
            f[deg] = 1;
            if poly::is_irreducible(&f, p) {
                return f;
            }
            k += 1;
        }
    }

    fn build_tables(&mut self) {
        let ord = self.size - 1;
        // factor the group order, then search a generator in encoding order
        let mut factors = Vec::new();
        let mut r = ord;
        let mut d = 2u64;
        while d * d <= r {
            if r % d == 0 {
                factors.push(d);
                while r % d == 0 {
                    r /= d;
                }
            }
            d += 1;
        }
        if r > 1 {
            factors.push(r);
        }
        let gen = (1..self.size)
            .find(|&g| {
                factors.iter().all(|&f| self.pow_poly(g, (ord / f) as u128) != 1)
            })
            .expect("cyclic group has a generator");

        let mut exp = vec![0u64; 2 * ord as usize];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = 1u64;
        for k in 0..ord as usize {
            exp[k] = cur;
            exp[k + ord as usize] = cur;
            log[cur as usize] = k as u32;
            cur = self.mul_poly(cur, gen);
        }
        debug_assert_eq!(cur, 1);
        self.tables = Some(DlogTables { exp, log });
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// q = p^e
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Total size p^{e·n} of the top field.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Size q^m of the level-m subfield.
    pub fn level_size(&self, m: usize) -> u64 {
        self.q.pow(m as u32)
    }

    /// Modulus coefficients over F_p, little-endian, monic of degree e·n.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    // ---- raw encoding arithmetic (hot paths) ----

    pub(crate) fn digits(&self, mut enc: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.deg];
        for d in out.iter_mut() {
            *d = enc % self.p;
            enc /= self.p;
        }
        out
    }

    pub(crate) fn from_digits(&self, digits: &[u64]) -> u64 {
        let mut enc = 0u64;
        for &d in digits.iter().rev() {
            enc = enc * self.p + d % self.p;
        }
        enc
    }

    #[inline]
    pub(crate) fn add_raw(&self, mut a: u64, mut b: u64) -> u64 {
        let p = self.p;
        let mut out = 0u64;
        let mut place = 1u64;
        while a != 0 || b != 0 {
            let s = (a % p + b % p) % p;
            out += s * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub(crate) fn neg_raw(&self, mut a: u64) -> u64 {
        let p = self.p;
        let mut out = 0u64;
        let mut place = 1u64;
        while a != 0 {
            let d = a % p;
            if d != 0 {
                out += (p - d) * place;
            }
            place *= p;
            a /= p;
        }
        out
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize],
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let pa = self.digits(a);
        let pb = self.digits(b);
        let prod = poly::mulmod(&pa, &pb, &self.modulus, self.p);
        self.from_digits(&prod)
    }

    fn pow_poly(&self, a: u64, k: u128) -> u64 {
        let pa = self.digits(a);
        let r = poly::powmod(&pa, k, &self.modulus, self.p);
        self.from_digits(&r)
    }

    pub(crate) fn inv_raw(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[a as usize] as u64;
                let ord = self.size - 1;
                Ok(t.exp[((ord - l) % ord) as usize])
            }
            None => Ok(self.pow_poly(a, (self.size - 2) as u128)),
        }
    }

    pub(crate) fn pow_raw(&self, a: u64, k: u128) -> u64 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let ord = (self.size - 1) as u128;
        let k = (k % ord) as u64;
        match &self.tables {
            Some(t) => {
                let l = t.log[a as usize] as u128;
                t.exp[((l * k as u128) % ord) as usize]
            }
            None => self.pow_poly(a, k as u128),
        }
    }

    /// x^{q^i}; i is reduced mod n.
    #[inline]
    pub(crate) fn frob_raw(&self, a: u64, i: usize) -> u64 {
        if a == 0 {
            return 0;
        }
        let i = i % self.n;
        if i == 0 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                let ord = self.size - 1;
                let qi = self.mod_pow_u64(self.q % ord, i as u64, ord);
                let l = t.log[a as usize] as u128;
                t.exp[((l * qi as u128) % ord as u128) as usize]
            }
            None => {
                let qi = (self.q as u128).pow(i as u32);
                self.pow_poly(a, qi)
            }
        }
    }

    /// x^{p^t}: the t-th power of the absolute Frobenius; t mod e·n.
    pub(crate) fn frob_p_raw(&self, a: u64, t: usize) -> u64 {
        if a == 0 {
            return 0;
        }
        let t = t % self.deg;
        let ord = self.size - 1;
        let pt = self.mod_pow_u64(self.p % ord, t as u64, ord);
        match &self.tables {
            Some(tb) => {
                let l = tb.log[a as usize] as u128;
                tb.exp[((l * pt as u128) % ord as u128) as usize]
            }
            None => self.pow_poly(a, pt as u128),
        }
    }

    fn mod_pow_u64(&self, mut base: u64, mut k: u64, m: u64) -> u64 {
        let mut acc = 1u128;
        let mut b = base as u128 % m as u128;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * b % m as u128;
            }
            b = b * b % m as u128;
            k >>= 1;
        }
        base = acc as u64;
        base
    }

    /// Smallest level m | n whose subfield contains the element.
    pub(crate) fn level_raw(&self, a: u64) -> usize {
        for m in 1..=self.n {
            if self.n % m == 0 && self.frob_raw(a, m) == a {
                return m;
            }
        }
        self.n
    }

    // ---- public element API ----

    /// Wraps an encoding at its minimal level.
    pub fn element(&self, enc: u64) -> Result<FieldElement> {
        if enc >= self.size {
            return Err(Error::InvalidParameter(format!(
                "encoding {enc} out of range for field of size {}",
                self.size
            )));
        }
        Ok(FieldElement { enc, level: self.level_raw(enc) })
    }

    /// Wraps an encoding declared at level m, verifying q^m-Frobenius
    /// fixedness.
    pub fn element_at(&self, enc: u64, m: usize) -> Result<FieldElement> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        let x = self.element(enc)?;
        if m % x.level != 0 {
            return Err(Error::InvalidParameter(format!(
                "element {enc} is not fixed by the q^{m}-Frobenius"
            )));
        }
        Ok(FieldElement { enc, level: m })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { enc: 0, level: 1 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { enc: 1, level: 1 }
    }

    fn relevel(&self, enc: u64, a: &FieldElement, b: &FieldElement) -> FieldElement {
        // smallest level containing both operands
        let lcm = a.level * b.level / gcd_usize(a.level, b.level);
        let lvl = self.level_raw(enc);
        let lvl = if lcm % lvl == 0 { lvl } else { lcm };
        FieldElement { enc, level: lvl }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.relevel(self.add_raw(a.enc, b.enc), &a, &b)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.relevel(self.sub_raw(a.enc, b.enc), &a, &b)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement { enc: self.neg_raw(a.enc), level: a.level }
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.relevel(self.mul_raw(a.enc, b.enc), &a, &b)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let bi = self.inv_raw(b.enc)?;
        Ok(self.relevel(self.mul_raw(a.enc, bi), &a, &b))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        Ok(FieldElement { enc: self.inv_raw(a.enc)?, level: a.level })
    }

    pub fn pow(&self, a: FieldElement, k: u128) -> FieldElement {
        let enc = self.pow_raw(a.enc, k);
        FieldElement { enc, level: self.level_raw(enc).max(1) }
    }

    /// x ↦ x^{q^i}.
    pub fn frobenius(&self, a: FieldElement, i: usize) -> FieldElement {
        FieldElement { enc: self.frob_raw(a.enc, i), level: a.level }
    }

    /// x ↦ x^{p^t} (absolute Frobenius power).
    pub fn frobenius_p(&self, a: FieldElement, t: usize) -> FieldElement {
        let enc = self.frob_p_raw(a.enc, t);
        FieldElement { enc, level: self.level_raw(enc) }
    }

    /// N_{q^n / q^m}(x) = Π_k x^{q^{m·k}}, landing at level m.
    pub fn relative_norm(&self, x: FieldElement, m: usize) -> Result<FieldElement> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        let mut acc = 1u64;
        for k in 0..self.n / m {
            acc = self.mul_raw(acc, self.frob_raw(x.enc, m * k));
        }
        debug_assert_eq!(self.frob_raw(acc, m), acc);
        Ok(FieldElement { enc: acc, level: self.level_raw(acc).max(1) })
    }

    /// N_{q^hi / q^lo}(x) for x in F_{q^hi} and lo | hi | n.
    pub fn relative_norm_between(
        &self,
        x: FieldElement,
        hi: usize,
        lo: usize,
    ) -> Result<FieldElement> {
        if hi % lo != 0 {
            return Err(Error::NotADivisor(lo, hi));
        }
        if self.n % hi != 0 {
            return Err(Error::NotADivisor(hi, self.n));
        }
        let mut acc = 1u64;
        for k in 0..hi / lo {
            acc = self.mul_raw(acc, self.frob_raw(x.enc, lo * k));
        }
        Ok(FieldElement { enc: acc, level: self.level_raw(acc).max(1) })
    }

    /// Tr_{q^n / q^m}(x) = Σ_k x^{q^{m·k}}.
    pub fn relative_trace(&self, x: FieldElement, m: usize) -> Result<FieldElement> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        let mut acc = 0u64;
        for k in 0..self.n / m {
            acc = self.add_raw(acc, self.frob_raw(x.enc, m * k));
        }
        Ok(FieldElement { enc: acc, level: self.level_raw(acc).max(1) })
    }

    pub(crate) fn norm_raw(&self, x: u64, m: usize) -> u64 {
        let mut acc = 1u64;
        for k in 0..self.n / m {
            acc = self.mul_raw(acc, self.frob_raw(x, m * k));
        }
        acc
    }

    pub(crate) fn is_square_raw(&self, x: u64, m: usize) -> Result<bool> {
        if self.p == 2 || x == 0 {
            return Ok(true);
        }
        let qm = self.level_size(m);
        Ok(self.pow_raw(x, ((qm - 1) / 2) as u128) == 1)
    }

    /// Squareness of x relative to F_{q^m} (x must lie in F_{q^m}).
    pub fn is_square_at(&self, x: FieldElement, m: usize) -> Result<bool> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        if m % x.level != 0 {
            return Err(Error::InvalidParameter(format!(
                "element {} does not lie in the level-{m} subfield",
                x.enc
            )));
        }
        if self.p == 2 {
            return Ok(true);
        }
        if x.enc == 0 {
            return Ok(true);
        }
        let qm = self.level_size(m);
        Ok(self.pow_raw(x.enc, ((qm - 1) / 2) as u128) == 1)
    }

    /// Squareness at the element's declared level.
    pub fn is_square(&self, x: FieldElement) -> Result<bool> {
        self.is_square_at(x, x.level)
    }

    /// Square root inside F_{q^m}; of the two roots, the one with smaller
    /// encoding is returned.
    pub fn sqrt_at(&self, x: FieldElement, m: usize) -> Result<FieldElement> {
        if !self.is_square_at(x, m)? {
            return Err(Error::NotASquare(x.enc, m));
        }
        if x.enc == 0 {
            return Ok(self.zero());
        }
        if self.p == 2 {
            let qm = self.level_size(m) as u128;
            let r = self.pow_raw(x.enc, qm / 2);
            return Ok(FieldElement { enc: r, level: m });
        }
        let t = self.tables.as_ref().ok_or(Error::NoTables(self.size))?;
        let ord = self.size - 1;
        let l = t.log[x.enc as usize] as u64;
        let half = if l % 2 == 0 { l / 2 } else { (l + ord) / 2 };
        let r = t.exp[half as usize];
        let r2 = self.neg_raw(r);
        let enc = r.min(r2);
        debug_assert_eq!(self.mul_raw(enc, enc), x.enc);
        Ok(FieldElement { enc, level: m })
    }

    pub fn sqrt(&self, x: FieldElement) -> Result<FieldElement> {
        self.sqrt_at(x, x.level)
    }

    /// All q^m encodings of the level-m subfield, sorted ascending.
    pub fn subfield_elements(&self, m: usize) -> Result<Vec<u64>> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        let t = self.tables.as_ref().ok_or(Error::NoTables(self.size))?;
        let qm = self.level_size(m);
        let step = ((self.size - 1) / (qm - 1)) as usize;
        let mut out = Vec::with_capacity(qm as usize);
        out.push(0u64);
        for k in 0..(qm - 1) as usize {
            out.push(t.exp[k * step]);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// First non-square of F_{q^m} in encoding order.
    pub fn find_nonsquare(&self, m: usize) -> Result<FieldElement> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let qm = self.level_size(m);
        let exp = ((qm - 1) / 2) as u128;
        for enc in self.subfield_elements(m)? {
            if enc != 0 && self.pow_raw(enc, exp) != 1 {
                return Ok(FieldElement { enc, level: m });
            }
        }
        unreachable!("odd-order field has non-squares")
    }

    /// Moore matrix of ξ for the extension F_{q^m}/F_q: entry (i, j) is
    /// ξ^{q^{(i+j) mod m}}.
    pub fn moore_matrix(&self, xi: FieldElement, m: usize) -> Result<MooreMatrix> {
        if self.n % m != 0 {
            return Err(Error::NotADivisor(m, self.n));
        }
        let orbit: Vec<u64> = (0..m).map(|i| self.frob_raw(xi.enc, i)).collect();
        let entries: Vec<u64> =
            (0..m * m).map(|ij| orbit[(ij / m + ij % m) % m]).collect();
        let det = self.det_raw(&entries, m)?;
        Ok(MooreMatrix {
            dim: m,
            entries: entries
                .iter()
                .map(|&enc| FieldElement { enc, level: m })
                .collect(),
            det: FieldElement { enc: det, level: self.level_raw(det).max(1) },
        })
    }

    /// First ξ of F_{q^m} (encoding order) whose Frobenius orbit is an
    /// F_q-basis, together with its Moore matrix.
    pub fn find_normal_element(&self, m: usize) -> Result<(FieldElement, MooreMatrix)> {
        for enc in self.subfield_elements(m)? {
            if enc == 0 {
                continue;
            }
            let xi = FieldElement { enc, level: m };
            let mm = self.moore_matrix(xi, m)?;
            if mm.det.enc != 0 {
                return Ok((xi, mm));
            }
        }
        unreachable!("normal elements always exist")
    }

    /// Determinant of a row-major matrix of raw encodings.
    pub(crate) fn det_raw(&self, entries: &[u64], dim: usize) -> Result<u64> {
        let mut m = entries.to_vec();
        let mut det = 1u64;
        for col in 0..dim {
            let pivot = (col..dim).find(|&r| m[r * dim + col] != 0);
            let Some(pr) = pivot else {
                return Ok(0);
            };
            if pr != col {
                for c in 0..dim {
                    m.swap(pr * dim + c, col * dim + c);
                }
                det = self.neg_raw(det);
            }
            let pv = m[col * dim + col];
            det = self.mul_raw(det, pv);
            let pinv = self.inv_raw(pv)?;
            for r in col + 1..dim {
                let factor = self.mul_raw(m[r * dim + col], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..dim {
                    let sub = self.mul_raw(factor, m[col * dim + c]);
                    m[r * dim + c] = self.sub_raw(m[r * dim + c], sub);
                }
            }
        }
        Ok(det)
    }
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

/// Moore matrix witness for normality of ξ.
pub struct MooreMatrix {
    pub dim: usize,
    pub entries: Vec<FieldElement>,
    pub det: FieldElement,
}
