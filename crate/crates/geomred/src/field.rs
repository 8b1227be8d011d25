//! Exact arithmetic in GF(p^e), including subfield embeddings GF(q) into GF(q^m).
//!
//! Elements are stored by their canonical code: the mixed-radix value
//! `sum(c_i * p^i)` of the coefficient vector `(c_0, ..., c_{e-1})` of the
//! polynomial representative. The modulus is the first monic primitive
//! polynomial of degree `e` in low-degree-first lexicographic order, so field
//! construction is reproducible across runs.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

/// Orders up to this bound get exp/log tables for multiplication.
const LOG_TABLE_CAP: u64 = 1 << 16;
/// Orders up to this bound get a full addition table.
const ADD_TABLE_CAP: u64 = 1 << 10;
/// Default cap on the field order accepted by [`FieldCtx::new`].
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {order} exceeds the cap {cap}")]
    CapExceeded { order: u128, cap: u64 },
    #[error("GF({big}) is not an extension of GF({small})")]
    IncompatibleOrders { small: u64, big: u64 },
    #[error("no root of the subfield modulus exists in the extension (internal error)")]
    NoRoot,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// An element of a finite field, identified by its canonical code.
///
/// The code only has meaning relative to the owning [`FieldCtx`]; mixing
/// elements of different fields is a caller bug.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn from_code(code: u32) -> Self {
        FieldElem(code)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Context for GF(p^e): modulus, generator, and the lookup tables.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    order: u32,
    /// Monic modulus, coefficient list of length e+1, low degree first.
    modulus: Vec<u32>,
    /// The class of x mod modulus; primitive by construction.
    generator: FieldElem,
    /// exp[i] = generator^i for i in 0..order-1 (empty above LOG_TABLE_CAP).
    exp: Vec<u32>,
    /// log[code] for nonzero codes (log[0] is unused).
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    neg_table: Vec<u32>,
}

impl FieldCtx {
    /// Builds GF(p^e) with the default order cap.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        Self::with_cap(p, e, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(p: u32, e: u32, cap: u64) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrime(p as u64));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order128 = (p as u128).pow(e);
        if order128 > cap as u128 {
            return Err(FieldError::CapExceeded { order: order128, cap });
        }
        let order = order128 as u32;

        let modulus = least_primitive_modulus(p, e);
        let generator = FieldElem(code_from_digits(&poly_rem(&[0, 1], &modulus, p), p));

        let mut ctx = FieldCtx {
            p,
            e,
            order,
            modulus,
            generator,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
            neg_table: Vec::new(),
        };

        ctx.neg_table = (0..order).map(|c| ctx.raw_neg(c)).collect();
        if (order as u64) <= LOG_TABLE_CAP {
            let mut exp = Vec::with_capacity(order as usize - 1);
            let mut log = vec![0u32; order as usize];
            let mut acc = 1u32;
            for i in 0..(order - 1) {
                exp.push(acc);
                log[acc as usize] = i;
                acc = ctx.raw_mul(acc, ctx.generator.0);
            }
            debug_assert_eq!(acc, 1, "generator order mismatch");
            ctx.exp = exp;
            ctx.log = log;
        }
        if (order as u64) <= ADD_TABLE_CAP {
            let mut table = vec![0u32; (order as usize) * (order as usize)];
            for a in 0..order {
                for b in 0..order {
                    table[(a as usize) * (order as usize) + b as usize] = ctx.raw_add(a, b);
                }
            }
            ctx.add_table = Some(table);
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, low degree first (length e+1, monic).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// Element for an integer of the prime subfield (k < p).
    pub fn from_int(&self, k: u32) -> FieldElem {
        assert!(k < self.p, "from_int argument {k} not below p = {}", self.p);
        FieldElem(k)
    }

    /// All elements in code order (a fixed enumeration order).
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(FieldElem)
    }

    /// Coefficient vector (c_0, ..., c_{e-1}) of an element.
    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut c = a.0;
        let mut out = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> FieldElem {
        debug_assert!(digits.len() <= self.e as usize);
        FieldElem(code_from_digits(digits, self.p))
    }

    /// The spec's element ordering: lexicographic on coefficient vectors,
    /// low-degree coefficient compared first. Used wherever a "smallest"
    /// element is chosen.
    pub fn elem_cmp(&self, a: FieldElem, b: FieldElem) -> Ordering {
        self.digits(a).cmp(&self.digits(b))
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(a.0 < self.order && b.0 < self.order);
        if let Some(t) = &self.add_table {
            return FieldElem(t[(a.0 as usize) * (self.order as usize) + b.0 as usize]);
        }
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        FieldElem(self.raw_add(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        debug_assert!(a.0 < self.order);
        FieldElem(self.neg_table[a.0 as usize])
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(a.0 < self.order && b.0 < self.order);
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if !self.exp.is_empty() {
            let n = (self.order - 1) as u64;
            let idx = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
            return FieldElem(self.exp[idx as usize]);
        }
        FieldElem(self.raw_mul(a.0, b.0))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(!a.is_zero(), "inversion of zero");
        if !self.exp.is_empty() {
            let n = (self.order - 1) as u64;
            let idx = (n - self.log[a.0 as usize] as u64) % n;
            return FieldElem(self.exp[idx as usize]);
        }
        self.pow(a, self.order as u64 - 2)
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElem, mut k: u64) -> FieldElem {
        if k == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> u32 {
        assert!(!a.is_zero(), "order of zero");
        let mut acc = a;
        let mut k = 1;
        while acc != FieldElem::ONE {
            acc = self.mul(acc, a);
            k += 1;
        }
        k
    }

    fn raw_add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.e {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * scale;
            scale = scale.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn raw_neg(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.e {
            let d = (self.p - a % self.p) % self.p;
            out += d * scale;
            scale = scale.wrapping_mul(self.p);
            a /= self.p;
        }
        out
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        let da = digits_from_code(a, self.p, self.e);
        let db = digits_from_code(b, self.p, self.e);
        let prod = poly_mul(&da, &db, self.p);
        code_from_digits(&poly_rem(&prod, &self.modulus, self.p), self.p)
    }
}

/// A fixed ring homomorphism GF(q) -> GF(q^m).
///
/// The small generator is sent to the smallest root (in the element ordering)
/// of the small modulus inside the big field.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    small_order: u32,
    big_order: u32,
    map: Vec<FieldElem>,
    pre: HashMap<u32, u32>,
}

impl SubfieldEmbedding {
    pub fn small_order(&self) -> u32 {
        self.small_order
    }

    pub fn big_order(&self) -> u32 {
        self.big_order
    }

    pub fn apply(&self, a: FieldElem) -> FieldElem {
        self.map[a.code() as usize]
    }

    pub fn image_of_small_generator(&self, small: &FieldCtx) -> FieldElem {
        self.apply(small.generator())
    }

    pub fn preimage(&self, b: FieldElem) -> Option<FieldElem> {
        self.pre.get(&b.code()).copied().map(FieldElem::from_code)
    }

    pub fn contains(&self, b: FieldElem) -> bool {
        self.pre.contains_key(&b.code())
    }
}

/// Constructs the deterministic embedding GF(q) -> GF(q^m).
pub fn embed(small: &FieldCtx, big: &FieldCtx) -> Result<SubfieldEmbedding, FieldError> {
    if small.p != big.p || big.e % small.e != 0 {
        return Err(FieldError::IncompatibleOrders {
            small: small.order as u64,
            big: big.order as u64,
        });
    }

    // Smallest root of the small modulus in the big field, in the element
    // ordering. Roots of a primitive polynomial are conjugates of the small
    // generator, so any of them induces a homomorphism; the ordering pins one.
    let mut candidates: Vec<FieldElem> = big.elements().collect();
    candidates.sort_by(|&a, &b| big.elem_cmp(a, b));
    let mut root = None;
    for x in candidates {
        let mut acc = FieldElem::ZERO;
        for &c in small.modulus.iter().rev() {
            acc = big.add(big.mul(acc, x), big.from_int(c));
        }
        if acc.is_zero() {
            root = Some(x);
            break;
        }
    }
    let root = root.ok_or(FieldError::NoRoot)?;

    // Element a = sum c_j x^j maps to sum c_j root^j.
    let mut map = Vec::with_capacity(small.order as usize);
    let mut pre = HashMap::with_capacity(small.order as usize);
    for a in small.elements() {
        let digs = small.digits(a);
        let mut img = FieldElem::ZERO;
        let mut pw = FieldElem::ONE;
        for &c in &digs {
            img = big.add(img, big.mul(big.from_int(c), pw));
            pw = big.mul(pw, root);
        }
        pre.insert(img.code(), a.code());
        map.push(img);
    }
    debug_assert_eq!(pre.len(), small.order as usize, "embedding not injective");

    Ok(SubfieldEmbedding {
        small_order: small.order,
        big_order: big.order,
        map,
        pre,
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Factors a prime power q = p^f. Errors if q has two prime divisors.
pub fn factor_prime_power(q: u64) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut rem = q;
            let mut f = 0u32;
            while rem % p == 0 {
                rem /= p;
                f += 1;
            }
            if rem != 1 {
                return Err(FieldError::NotPrimePower(q));
            }
            return Ok((p as u32, f));
        }
        p += 1;
    }
    Ok((q as u32, 1))
}

fn code_from_digits(digits: &[u32], p: u32) -> u32 {
    let mut out = 0u32;
    for &d in digits.iter().rev() {
        out = out * p + d;
    }
    out
}

fn digits_from_code(code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut c = code;
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(c % p);
        c /= p;
    }
    out
}

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial m.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead * mc) % p;
                r[idx] = (r[idx] + p * p - sub) % p;
            }
        }
        poly_trim(&mut r);
        if r.len() == shift + dm + 1 {
            // Leading coefficient failed to cancel; cannot happen for monic m.
            unreachable!("non-monic modulus");
        }
    }
    r
}

fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    // Trial division by all monic polynomials of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = digits_from_code64(idx, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits_from_code64(code: u64, p: u32, e: u32) -> Vec<u32> {
    let mut c = code;
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push((c % p as u64) as u32);
        c /= p as u64;
    }
    out
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

/// Order of x modulo f equals p^deg - 1, i.e. f is primitive.
fn x_is_primitive(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    let group = (p as u64).pow(deg) - 1;
    let x = vec![0u32, 1];
    if poly_powmod(&x, group, f, p) != vec![1] {
        return false;
    }
    for r in prime_divisors(group) {
        if poly_powmod(&x, group / r, f, p) == vec![1] {
            return false;
        }
    }
    true
}

fn poly_powmod(a: &[u32], mut k: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u32];
    while k > 0 {
        if k & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
        }
        base = poly_rem(&poly_mul(&base, &base, p), m, p);
        k >>= 1;
    }
    acc
}

/// The lexicographically least (low-degree coefficients compared first) monic
/// primitive polynomial of degree e over Z_p.
fn least_primitive_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        // Lex order on (c_0, ..., c_{e-1}): c_0 is the most significant slot.
        let mut digits = digits_from_code64(idx, p, e);
        digits.reverse();
        let mut f = digits;
        f.push(1);
        if poly_is_irreducible(&f, p) && x_is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("a primitive polynomial of every degree exists");
}
