//! Modular summation kernels for the weighted Riemann sums.
//!
//! Every sum is `Σ_{j∈[a,b)} w^j g(j + s)` in `Z/p^K`, together with the
//! normaliser `Σ w^j`. Moduli below 2^63 use Montgomery arithmetic on
//! `u64`, those below 2^127 on `u128`; anything larger falls back to
//! `BigUint`.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

pub(crate) trait ResidueRing: Sync {
    type Elem: Clone + Send + Sync;

    fn elem(&self, x: &BigUint) -> Self::Elem;
    fn to_big(&self, x: &Self::Elem) -> BigUint;
    fn from_u64(&self, x: u64) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Montgomery arithmetic modulo an odd `n < 2^63`, with `R = 2^64`.
#[derive(Clone, Debug)]
pub(crate) struct Mont64 {
    n: u64,
    n_prime: u64,
    r_mod: u64,
    r2_mod: u64,
}

impl Mont64 {
    pub(crate) fn new(n: u64) -> Self {
        assert!(n % 2 == 1 && n < (1u64 << 63) && n > 1);
        let mut inv = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r_mod = ((1u128 << 64) % u128::from(n)) as u64;
        let r2_mod = ((u128::from(r_mod) << 64) % u128::from(n)) as u64;
        Mont64 { n, n_prime: inv.wrapping_neg(), r_mod, r2_mod }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_prime);
        let u = ((t + u128::from(m) * u128::from(self.n)) >> 64) as u64;
        if u >= self.n {
            u - self.n
        } else {
            u
        }
    }

    #[inline]
    fn to_mont(&self, a: u64) -> u64 {
        self.redc(u128::from(a % self.n) * u128::from(self.r2_mod))
    }
}

impl ResidueRing for Mont64 {
    type Elem = u64;

    fn elem(&self, x: &BigUint) -> u64 {
        let r = (x % BigUint::from(self.n)).to_u64().expect("reduced below n");
        self.to_mont(r)
    }

    fn to_big(&self, x: &u64) -> BigUint {
        BigUint::from(self.redc(u128::from(*x)))
    }

    #[inline]
    fn from_u64(&self, x: u64) -> u64 {
        self.to_mont(x)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        self.r_mod
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.redc(u128::from(*a) * u128::from(*b))
    }
}

const LO: u128 = u64::MAX as u128;

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & LO);
    let (b1, b0) = (b >> 64, b & LO);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & LO) + (p10 & LO);
    let lo = (p00 & LO) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd `n < 2^127`, with `R = 2^128`.
#[derive(Clone, Debug)]
pub(crate) struct Mont128 {
    n: u128,
    n_prime: u128,
    r_mod: u128,
    r2_mod: u128,
}

impl Mont128 {
    pub(crate) fn new(n: u128) -> Self {
        assert!(n % 2 == 1 && n < (1u128 << 127) && n > 1);
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r_mod = (u128::MAX % n + 1) % n;
        let mut r2 = r_mod;
        for _ in 0..128 {
            r2 <<= 1;
            if r2 >= n {
                r2 -= n;
            }
        }
        Mont128 { n, n_prime: inv.wrapping_neg(), r_mod, r2_mod: r2 }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_prime);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + u128::from(carry);
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    fn to_mont(&self, a: u128) -> u128 {
        let (hi, lo) = mul_wide(a % self.n, self.r2_mod);
        self.redc(hi, lo)
    }
}

impl ResidueRing for Mont128 {
    type Elem = u128;

    fn elem(&self, x: &BigUint) -> u128 {
        let r = (x % BigUint::from(self.n)).to_u128().expect("reduced below n");
        self.to_mont(r)
    }

    fn to_big(&self, x: &u128) -> BigUint {
        BigUint::from(self.redc(0, *x))
    }

    #[inline]
    fn from_u64(&self, x: u64) -> u128 {
        self.to_mont(u128::from(x))
    }

    fn zero(&self) -> u128 {
        0
    }

    fn one(&self) -> u128 {
        self.r_mod
    }

    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        let (hi, lo) = mul_wide(*a, *b);
        self.redc(hi, lo)
    }
}

/// Plain `BigUint` residues, for moduli too large for [`Mont128`].
#[derive(Clone, Debug)]
pub(crate) struct BigRing {
    m: BigUint,
}

impl BigRing {
    pub(crate) fn new(m: BigUint) -> Self {
        BigRing { m }
    }
}

impl ResidueRing for BigRing {
    type Elem = BigUint;

    fn elem(&self, x: &BigUint) -> BigUint {
        x % &self.m
    }

    fn to_big(&self, x: &BigUint) -> BigUint {
        x.clone()
    }

    fn from_u64(&self, x: u64) -> BigUint {
        BigUint::from(x) % &self.m
    }

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn one(&self) -> BigUint {
        BigUint::from(1u32) % &self.m
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.m
    }
}

/// The integrand after reduction modulo `p^K`.
#[derive(Clone, Debug)]
pub(crate) enum Body<E> {
    /// Integer polynomial, coefficients low to high.
    Poly(Vec<E>),
    /// `χ(x) * poly(x)` with `χ` given by its residues.
    CharPoly { chi: Vec<E>, poly: Vec<E> },
    /// `r^x`.
    Exp(E),
}

#[derive(Clone, Debug)]
pub(crate) struct Plan<E> {
    pub weight: E,
    pub shift: u64,
    pub body: Body<E>,
}

#[inline]
fn horner<R: ResidueRing>(ring: &R, coeffs: &[R::Elem], x: &R::Elem) -> R::Elem {
    let (last, rest) = coeffs.split_last().expect("nonempty polynomial");
    let mut acc = last.clone();
    for c in rest.iter().rev() {
        acc = ring.add(&ring.mul(&acc, x), c);
    }
    acc
}

/// `(Σ_{j∈range} w^j g(j+s), Σ_{j∈range} w^j)`.
pub(crate) fn chunk_sum<R: ResidueRing>(
    ring: &R,
    plan: &Plan<R::Elem>,
    range: Range<u64>,
) -> (R::Elem, R::Elem) {
    let mut wj = ring.pow(&plan.weight, range.start);
    let mut numer = ring.zero();
    let mut norm = ring.zero();
    let one = ring.one();
    match &plan.body {
        Body::Poly(poly) => {
            let mut x = ring.from_u64(range.start + plan.shift);
            for _ in range {
                let v = horner(ring, poly, &x);
                numer = ring.add(&numer, &ring.mul(&wj, &v));
                norm = ring.add(&norm, &wj);
                wj = ring.mul(&wj, &plan.weight);
                x = ring.add(&x, &one);
            }
        }
        Body::CharPoly { chi, poly } => {
            let d = chi.len() as u64;
            let mut x = ring.from_u64(range.start + plan.shift);
            let mut idx = ((range.start + plan.shift) % d) as usize;
            for _ in range {
                let v = ring.mul(&chi[idx], &horner(ring, poly, &x));
                numer = ring.add(&numer, &ring.mul(&wj, &v));
                norm = ring.add(&norm, &wj);
                wj = ring.mul(&wj, &plan.weight);
                x = ring.add(&x, &one);
                idx += 1;
                if idx as u64 == d {
                    idx = 0;
                }
            }
        }
        Body::Exp(r) => {
            let mut rj = ring.pow(r, range.start + plan.shift);
            for _ in range {
                numer = ring.add(&numer, &ring.mul(&wj, &rj));
                norm = ring.add(&norm, &wj);
                wj = ring.mul(&wj, &plan.weight);
                rj = ring.mul(&rj, r);
            }
        }
    }
    (numer, norm)
}

/// Splits `[0, len)` into `workers` contiguous chunks and sums them. The
/// partial sums are combined in chunk order; since the arithmetic is exact
/// the result does not depend on the split.
pub(crate) fn total_sum<R: ResidueRing>(
    ring: &R,
    plan: &Plan<R::Elem>,
    len: u64,
    workers: usize,
) -> (BigUint, BigUint) {
    let workers = workers.max(1) as u64;
    let chunk = len.div_ceil(workers).max(1);
    let ranges: Vec<Range<u64>> = (0..workers)
        .map(|i| (i * chunk).min(len)..((i + 1) * chunk).min(len))
        .filter(|r| !r.is_empty())
        .collect();
    let partials = run_chunks(ring, plan, ranges, workers > 1);
    let (mut numer, mut norm) = (ring.zero(), ring.zero());
    for (a, b) in &partials {
        numer = ring.add(&numer, a);
        norm = ring.add(&norm, b);
    }
    (ring.to_big(&numer), ring.to_big(&norm))
}

#[cfg(feature = "parallel")]
fn run_chunks<R: ResidueRing>(
    ring: &R,
    plan: &Plan<R::Elem>,
    ranges: Vec<Range<u64>>,
    parallel: bool,
) -> Vec<(R::Elem, R::Elem)> {
    use rayon::prelude::*;
    if parallel {
        ranges.into_par_iter().map(|r| chunk_sum(ring, plan, r)).collect()
    } else {
        ranges.into_iter().map(|r| chunk_sum(ring, plan, r)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_chunks<R: ResidueRing>(
    ring: &R,
    plan: &Plan<R::Elem>,
    ranges: Vec<Range<u64>>,
    _parallel: bool,
) -> Vec<(R::Elem, R::Elem)> {
    ranges.into_iter().map(|r| chunk_sum(ring, plan, r)).collect()
}
