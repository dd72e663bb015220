//! Dense univariate polynomials over `ℤ` and their factorization over `ℚ`.
//!
//! Factorization follows Zassenhaus: reduce to a monic squarefree
//! polynomial, factor modulo a small prime with Cantor–Zassenhaus, Hensel
//! lift past the Mignotte bound and recombine the lifted factors.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A polynomial in `t` with integer coefficients, lowest degree first and
/// without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ZPoly {
    c: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly { c }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { c: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(a: BigInt) -> Self {
        Self::new(vec![a])
    }

    /// `a·t^k`.
    pub fn monomial(a: BigInt, k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k];
        c.push(a);
        Self::new(c)
    }

    /// `t − a`.
    pub fn linear(a: i64) -> Self {
        Self::from_i64s(&[-a, 1])
    }

    /// Clears denominators of a rational polynomial; returns the integer
    /// polynomial and the positive multiplier used.
    pub fn from_rationals(c: &[BigRational]) -> (Self, BigInt) {
        let den = c.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints = c
            .iter()
            .map(|r| (r * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        (Self::new(ints), den)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.c.last()
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: &BigInt) -> ZPoly {
        Self::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn pow(&self, e: u32) -> ZPoly {
        (0..e).fold(ZPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.c
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + BigRational::from_integer(a.clone()))
    }

    /// `f(a·t)`.
    pub fn compose_scale(&self, a: &BigInt) -> ZPoly {
        let mut pw = BigInt::one();
        let mut c = Vec::with_capacity(self.c.len());
        for x in &self.c {
            c.push(x * &pw);
            pw *= a;
        }
        Self::new(c)
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        Self::new(self.c.iter().map(|x| x / &g).collect())
    }

    pub fn derivative(&self) -> ZPoly {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * BigInt::from(i))
                .collect(),
        )
    }

    /// Quotient when `d` divides `self` in `ℤ[t]`.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let n = self.degree().expect("nonzero");
        if n < dd {
            return None;
        }
        let lc = d.leading().expect("nonzero");
        let mut r = self.c.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qk, rem) = top.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[k + j] -= &qk * dj;
            }
            q[k] = qk;
        }
        r.iter().all(|x| x.is_zero()).then(|| Self::new(q))
    }

    /// Pseudo-remainder `lc(d)^{deg f − deg d + 1}·f mod d`.
    pub fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().expect("nonzero").clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let top = r.leading().expect("nonzero").clone();
            let shifted = ZPoly::monomial(top, rd - dd).mul(d);
            r = r.scale(&lc).sub(&shifted);
        }
        r
    }

    /// Primitive gcd with positive leading coefficient (contents ignored);
    /// `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &ZPoly) -> ZPoly {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a
    }

    /// Product of the distinct irreducible factors, primitive.
    pub fn squarefree_part(&self) -> ZPoly {
        if self.is_constant() {
            return if self.is_zero() { ZPoly::zero() } else { ZPoly::one() };
        }
        let p = self.primitive();
        let g = p.gcd(&p.derivative());
        p.div_exact(&g).expect("gcd divides").primitive()
    }

    /// Largest `k` with `g^k | self`; `g` must be nonconstant and `self`
    /// nonzero.
    pub fn valuation(&self, g: &ZPoly) -> u32 {
        assert!(!self.is_zero(), "valuation of the zero polynomial");
        assert!(!g.is_constant(), "valuation at a constant");
        let g = g.primitive();
        let mut f = self.primitive();
        let mut k = 0;
        while let Some(q) = f.div_exact(&g) {
            f = q;
            k += 1;
        }
        k
    }

    /// Factorization over `ℚ`: a signed integer content and irreducible
    /// primitive factors with positive leading coefficients, sorted.
    pub fn factor(&self) -> Factorization {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut unit = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            unit = -unit;
        }
        let f = self.primitive();
        let mut factors: Vec<(ZPoly, u32)> = Vec::new();
        if !f.is_constant() {
            for g in factor_squarefree(&f.squarefree_part()) {
                let k = f.valuation(&g);
                factors.push((g, k));
            }
        }
        factors.sort_by(|a, b| cmp_poly(&a.0, &b.0));
        Factorization { unit, factors }
    }

    /// Whether the polynomial is irreducible over `ℚ` (nonconstant).
    pub fn is_irreducible(&self) -> bool {
        if self.is_constant() {
            return false;
        }
        let f = self.factor();
        f.factors.len() == 1 && f.factors[0].1 == 1
    }
}

/// Degree first, then coefficients from the top.
pub fn cmp_poly(a: &ZPoly, b: &ZPoly) -> Ordering {
    a.c.len()
        .cmp(&b.c.len())
        .then_with(|| a.c.iter().rev().cmp(b.c.iter().rev()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: BigInt,
    pub factors: Vec<(ZPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> ZPoly {
        self.factors
            .iter()
            .fold(ZPoly::constant(self.unit.clone()), |acc, (g, k)| acc.mul(&g.pow(*k)))
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Arithmetic in `F_p[t]` for an odd prime `p < 2^31`.
mod modp {
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Fp {
        pub p: u64,
    }

    pub type P = Vec<u64>;

    pub fn trim(mut a: P) -> P {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    impl Fp {
        pub fn inv(&self, a: u64) -> u64 {
            self.pow(a, self.p - 2)
        }

        pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
            let mut r = 1;
            a %= self.p;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * a % self.p;
                }
                a = a * a % self.p;
                e >>= 1;
            }
            r
        }

        pub fn sub(&self, a: &P, b: &P) -> P {
            let n = a.len().max(b.len());
            trim(
                (0..n)
                    .map(|i| {
                        (a.get(i).copied().unwrap_or(0) + self.p - b.get(i).copied().unwrap_or(0)) % self.p
                    })
                    .collect(),
            )
        }

        pub fn mul(&self, a: &P, b: &P) -> P {
            if a.is_empty() || b.is_empty() {
                return vec![];
            }
            let mut c = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    c[i + j] = (c[i + j] + x * y) % self.p;
                }
            }
            trim(c)
        }

        pub fn scale(&self, a: &P, k: u64) -> P {
            trim(a.iter().map(|&x| x * k % self.p).collect())
        }

        pub fn monic(&self, a: &P) -> P {
            match a.last() {
                Some(&l) => self.scale(a, self.inv(l)),
                None => vec![],
            }
        }

        pub fn divrem(&self, a: &P, b: &P) -> (P, P) {
            assert!(!b.is_empty(), "division by zero in F_p[t]");
            let mut r = a.clone();
            if r.len() < b.len() {
                return (vec![], r);
            }
            let inv = self.inv(*b.last().expect("nonzero"));
            let mut q = vec![0u64; r.len() - b.len() + 1];
            for k in (0..q.len()).rev() {
                let top = r[k + b.len() - 1] * inv % self.p;
                q[k] = top;
                if top == 0 {
                    continue;
                }
                for (j, &bj) in b.iter().enumerate() {
                    r[k + j] = (r[k + j] + self.p - top * bj % self.p) % self.p;
                }
            }
            (trim(q), trim(r))
        }

        pub fn rem(&self, a: &P, b: &P) -> P {
            self.divrem(a, b).1
        }

        /// Monic gcd.
        pub fn gcd(&self, a: &P, b: &P) -> P {
            let (mut a, mut b) = (a.clone(), b.clone());
            while !b.is_empty() {
                let r = self.rem(&a, &b);
                a = b;
                b = r;
            }
            self.monic(&a)
        }

        /// `(g, s, t)` with `s·a + t·b = g` monic.
        pub fn xgcd(&self, a: &P, b: &P) -> (P, P, P) {
            let (mut r0, mut r1) = (a.clone(), b.clone());
            let (mut s0, mut s1) = (vec![1u64], vec![]);
            let (mut t0, mut t1) = (vec![], vec![1u64]);
            while !r1.is_empty() {
                let (q, r) = self.divrem(&r0, &r1);
                r0 = std::mem::replace(&mut r1, r);
                let s2 = self.sub(&s0, &self.mul(&q, &s1));
                s0 = std::mem::replace(&mut s1, s2);
                let t2 = self.sub(&t0, &self.mul(&q, &t1));
                t0 = std::mem::replace(&mut t1, t2);
            }
            let inv = self.inv(*r0.last().expect("nonzero gcd"));
            (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
        }

        pub fn powmod(&self, a: &P, mut e: u128, m: &P) -> P {
            let mut r = vec![1u64];
            let mut base = self.rem(a, m);
            while e > 0 {
                if e & 1 == 1 {
                    r = self.rem(&self.mul(&r, &base), m);
                }
                base = self.rem(&self.mul(&base, &base), m);
                e >>= 1;
            }
            self.rem(&r, m)
        }

        pub fn derivative(&self, a: &P) -> P {
            trim(
                a.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, &x)| (i as u64 % self.p) * x % self.p)
                    .collect(),
            )
        }
    }
}

use modp::Fp;

fn to_modp(f: &ZPoly, p: u64) -> modp::P {
    let pb = BigInt::from(p);
    modp::trim(
        f.c.iter()
            .map(|x| x.mod_floor(&pb).to_u64().expect("reduced"))
            .collect(),
    )
}

fn from_modp(f: &modp::P) -> ZPoly {
    ZPoly::new(f.iter().map(|&x| BigInt::from(x)).collect())
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Distinct-degree then equal-degree factorization of a monic squarefree
/// polynomial over `F_p`.
fn factor_modp(fp: &Fp, f: &modp::P, rng: &mut ChaCha8Rng) -> Vec<modp::P> {
    let x = vec![0, 1];
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut xp = x.clone();
    let mut d = 1usize;
    while rest.len() > 1 && 2 * d < rest.len() {
        xp = fp.powmod(&xp, fp.p as u128, &rest);
        let g = fp.gcd(&rest, &fp.sub(&xp, &x));
        if g.len() > 1 {
            equal_degree(fp, &g, d, rng, &mut out);
            rest = fp.divrem(&rest, &g).0;
            xp = fp.rem(&xp, &rest);
        }
        d += 1;
    }
    if rest.len() > 1 {
        out.push(fp.monic(&rest));
    }
    out
}

fn equal_degree(fp: &Fp, f: &modp::P, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<modp::P>) {
    let n = f.len() - 1;
    if n == d {
        out.push(fp.monic(f));
        return;
    }
    let e = (fp.p as u128).pow(d as u32).saturating_sub(1) / 2;
    loop {
        let a: modp::P = modp::trim((0..n).map(|_| rng.gen_range(0..fp.p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let b = fp.sub(&fp.powmod(&a, e, f), &vec![1]);
        let g = fp.gcd(f, &b);
        if g.len() > 1 && g.len() < f.len() {
            let h = fp.divrem(f, &g).0;
            equal_degree(fp, &g, d, rng, out);
            equal_degree(fp, &h, d, rng, out);
            return;
        }
    }
}

fn sym_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn reduce(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.c.iter().map(|x| x.mod_floor(m)).collect())
}

/// Lifts `f ≡ Π factors (mod p)` to `mod p^k`; `f` and all factors monic.
fn hensel_lift(f: &ZPoly, factors: &[modp::P], fp: &Fp, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let pk = BigInt::from(fp.p).pow(k);
        return vec![reduce(f, &pk)];
    }
    let mid = factors.len() / 2;
    let g0 = factors[..mid].iter().fold(vec![1u64], |acc, g| fp.mul(&acc, g));
    let h0 = factors[mid..].iter().fold(vec![1u64], |acc, g| fp.mul(&acc, g));
    let (one, s, t) = fp.xgcd(&g0, &h0);
    debug_assert_eq!(one, vec![1]);
    let p = BigInt::from(fp.p);
    let mut g = from_modp(&g0);
    let mut h = from_modp(&h0);
    let mut pj = p.clone();
    for _ in 1..k {
        // e = (f − g·h)/p^j mod p
        let diff = f.sub(&g.mul(&h));
        let e: ZPoly = ZPoly::new(diff.c.iter().map(|x| x / &pj).collect());
        let e = to_modp(&e, fp.p);
        let dg = fp.rem(&fp.mul(&t, &e), &g0);
        let dh = fp.rem(&fp.mul(&s, &e), &h0);
        g = g.add(&from_modp(&dg).scale(&pj));
        h = h.add(&from_modp(&dh).scale(&pj));
        pj *= &p;
    }
    let mut out = hensel_lift(&g, &factors[..mid], fp, k);
    out.extend(hensel_lift(&h, &factors[mid..], fp, k));
    out
}

/// Irreducible factors of a primitive squarefree polynomial.
fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.degree().expect("nonzero");
    if n <= 1 {
        return vec![f.primitive()];
    }
    // Monic transform g(y) = lc^{n−1}·f(y/lc).
    let lc = f.leading().expect("nonzero").clone();
    let mut c = vec![BigInt::one(); n + 1];
    let mut pw = BigInt::one();
    for i in (0..n).rev() {
        c[i] = &f.c[i] * &pw;
        pw *= &lc;
    }
    let g = ZPoly::new(c);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best: Option<(Fp, Vec<modp::P>)> = None;
    let mut tried = 0;
    let mut p = 3u64;
    while tried < 3 {
        p += 2;
        if !is_prime(p) || (p as u128).checked_pow(n as u32).is_none() {
            continue;
        }
        let fp = Fp { p };
        let gp = to_modp(&g, p);
        if fp.gcd(&gp, &fp.derivative(&gp)).len() != 1 {
            continue;
        }
        tried += 1;
        let fs = factor_modp(&fp, &gp, &mut rng);
        if fs.len() == 1 {
            return vec![f.primitive()];
        }
        if best.as_ref().map_or(true, |(_, b)| fs.len() < b.len()) {
            best = Some((fp, fs));
        }
    }
    let (fp, modular) = best.expect("a good prime exists");

    // Mignotte-style bound on coefficients of monic factors of g.
    let norm = g.c.iter().map(|x| x.abs()).max().expect("nonzero") * BigInt::from(n + 1);
    let bound = (BigInt::one() << n) * norm * 2 + 1;
    let pb = BigInt::from(fp.p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(&g, &modular, &fp, k);

    let mut remaining: Vec<ZPoly> = lifted;
    let mut rest = g;
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        let r = remaining.len();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let prod = idx
                .iter()
                .fold(ZPoly::one(), |acc, &i| reduce(&acc.mul(&remaining[i]), &pk));
            let cand = ZPoly::new(prod.c.iter().map(|x| sym_mod(x, &pk)).collect());
            if let Some(q) = rest.div_exact(&cand) {
                found.push(cand);
                rest = q;
                for &i in idx.iter().rev() {
                    remaining.remove(i);
                }
                continue 'outer;
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    size += 1;
                    continue 'outer;
                }
                i -= 1;
                if idx[i] < r - size + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    if !rest.is_constant() {
        found.push(rest);
    }
    // Undo the monic transform: g(lc·t) = lc^{n−1}·f(t).
    found.iter().map(|h| h.compose_scale(&lc).primitive()).collect()
}
