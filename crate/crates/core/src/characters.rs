//! Dirichlet characters with values in `Z_p`.
//!
//! Nonzero values are roots of unity of order dividing `p - 1`, realised as
//! powers of Teichmüller lifts. A character remembers how each value was
//! specified so it can be re-evaluated at any precision.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{p_pow, reduce_signed, teichmuller_residue, PAdicNumber, PrimeContext};

/// How a single table entry is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    /// An ordinary integer (in practice 0 or ±1).
    Int {
        int: i64,
    },
    /// `teichmuller(a)^k`.
    TeichPower {
        teich: i64,
        pow: u64,
    },
}

impl ValueSpec {
    pub fn int(i: i64) -> Self {
        ValueSpec::Int { int: i }
    }

    pub fn teich(a: i64, k: u64) -> Self {
        ValueSpec::TeichPower { teich: a, pow: k }
    }

    /// The value modulo `p^k`.
    pub fn residue(&self, p: u64, k: u32) -> Result<BigUint> {
        let m = p_pow(p, k);
        match *self {
            ValueSpec::Int { int } => Ok(reduce_signed(&BigInt::from(int), &m)),
            ValueSpec::TeichPower { teich, pow } => {
                let t = teichmuller_residue(p, teich, k)?;
                Ok(t.modpow(&BigUint::from(pow), &m))
            }
        }
    }

    fn value(&self, ctx: &PrimeContext) -> Result<PAdicNumber> {
        if self.is_zero() {
            return Ok(PAdicNumber::zero(ctx.p()));
        }
        let r = self.residue(ctx.p(), ctx.precision())?;
        Ok(PAdicNumber::from_residue(ctx.p(), &r, ctx.precision(), 0))
    }

    fn is_zero(&self) -> bool {
        matches!(self, ValueSpec::Int { int: 0 })
    }
}

/// On-disk character description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterFile {
    pub modulus: u64,
    pub values: Vec<ValueSpec>,
}

#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    p: u64,
    modulus: u64,
    specs: Vec<ValueSpec>,
    values: Vec<PAdicNumber>,
    order: u64,
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut d = 2;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Least primitive root modulo a prime `n`.
pub fn least_primitive_root(n: u64) -> u64 {
    if n == 2 {
        return 1;
    }
    let factors = prime_factors(n - 1);
    (2..n)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (n - 1) / f, n) != 1))
        .expect("a prime has a primitive root")
}

impl DirichletCharacter {
    /// `χ(a) = (a | d)` for odd squarefree `d` prime to `p`.
    pub fn quadratic(d: u64, ctx: &PrimeContext) -> Result<Self> {
        if d == 0 || d % 2 == 0 || !is_squarefree(d) {
            return Err(Error::InvalidCharacter(format!(
                "quadratic character needs an odd squarefree modulus, got {d}"
            )));
        }
        let specs = (0..d).map(|a| ValueSpec::int(i64::from(jacobi(a as i64, d)))).collect();
        DirichletCharacter::from_table(d, specs, ctx)
    }

    /// Character of exact order `m` modulo the prime `d`, sending the least
    /// primitive root mod `d` to `teichmuller(h)^((p-1)/m)`, `h` the least
    /// primitive root mod `p`.
    pub fn cyclic(d: u64, m: u64, ctx: &PrimeContext) -> Result<Self> {
        let p = ctx.p();
        if !crate::padic::is_prime(d) {
            return Err(Error::InvalidCharacter(format!("modulus {d} is not prime")));
        }
        if d == p {
            return Err(Error::InvalidCharacter(format!("modulus {d} equals p")));
        }
        if m == 0 || (d - 1) % m != 0 {
            return Err(Error::InvalidCharacter(format!(
                "order {m} does not divide d - 1 = {}",
                d - 1
            )));
        }
        if (p - 1) % m != 0 {
            return Err(Error::InvalidCharacter(format!(
                "order {m} does not divide p - 1 = {}; values would leave Z_p",
                p - 1
            )));
        }
        let g = least_primitive_root(d);
        let h = least_primitive_root(p) as i64;
        let step = (p - 1) / m;
        let mut specs = vec![ValueSpec::int(0); d as usize];
        let mut x = 1u64;
        for i in 0..d - 1 {
            let e = (i * step) % (p - 1);
            specs[x as usize] = if e == 0 {
                ValueSpec::int(1)
            } else if 2 * e == p - 1 {
                ValueSpec::int(-1)
            } else {
                ValueSpec::teich(h, e)
            };
            x = x * g % d;
        }
        DirichletCharacter::from_table(d, specs, ctx)
    }

    /// The trivial character of modulus 1 (`χ ≡ 1`).
    pub fn trivial(ctx: &PrimeContext) -> Self {
        DirichletCharacter::from_table(1, vec![ValueSpec::int(1)], ctx)
            .expect("the trivial character is valid")
    }

    /// Validates a full value table.
    pub fn from_table(d: u64, specs: Vec<ValueSpec>, ctx: &PrimeContext) -> Result<Self> {
        let p = ctx.p();
        if d == 0 {
            return Err(Error::InvalidCharacter("modulus must be positive".into()));
        }
        if d.gcd(&p) != 1 {
            return Err(Error::InvalidCharacter(format!(
                "modulus {d} is not prime to p = {p}"
            )));
        }
        if specs.len() as u64 != d {
            return Err(Error::InvalidCharacter(format!(
                "table has {} entries, modulus is {d}",
                specs.len()
            )));
        }
        for (a, s) in specs.iter().enumerate() {
            if (a as u64).gcd(&d) != 1 && !s.is_zero() {
                return Err(Error::InvalidCharacter(format!(
                    "value at non-unit residue {a} must be 0"
                )));
            }
        }
        let values = specs.iter().map(|s| s.value(ctx)).collect::<Result<Vec<_>>>()?;
        let one_index = if d == 1 { 0 } else { 1 };
        if values[one_index] != ctx.one() {
            return Err(Error::InvalidCharacter(format!(
                "chi(1) = {} instead of 1",
                values[one_index]
            )));
        }
        for a in 0..d {
            for b in 0..d {
                let ab = a * b % d;
                let lhs = &values[a as usize] * &values[b as usize];
                let rhs = &values[ab as usize];
                if &lhs != rhs {
                    return Err(Error::NotMultiplicative {
                        a,
                        b,
                        ab,
                        lhs: show(&lhs),
                        rhs: show(rhs),
                    });
                }
            }
        }
        let units: Vec<&PAdicNumber> = (0..d)
            .filter(|a| a.gcd(&d) == 1)
            .map(|a| &values[a as usize])
            .collect();
        let one = ctx.one();
        let order = (1..=p - 1)
            .filter(|m| (p - 1) % m == 0)
            .find(|&m| units.iter().all(|v| v.pow(m) == one))
            .ok_or_else(|| {
                Error::InvalidCharacter(format!(
                    "values are not roots of unity of order dividing p - 1 = {}",
                    p - 1
                ))
            })?;
        Ok(DirichletCharacter { p, modulus: d, specs, values, order })
    }

    pub fn from_file_contents(json: &str, ctx: &PrimeContext) -> Result<Self> {
        let f: CharacterFile = serde_json::from_str(json)?;
        DirichletCharacter::from_table(f.modulus, f.values, ctx)
    }

    pub fn load(path: impl AsRef<Path>, ctx: &PrimeContext) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        DirichletCharacter::from_file_contents(&s, ctx)
    }

    pub fn to_file(&self) -> CharacterFile {
        CharacterFile { modulus: self.modulus, values: self.specs.clone() }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn values(&self) -> &[PAdicNumber] {
        &self.values
    }

    pub fn specs(&self) -> &[ValueSpec] {
        &self.specs
    }

    /// `χ(x mod d)`.
    pub fn evaluate(&self, x: i64) -> PAdicNumber {
        self.values[x.rem_euclid(self.modulus as i64) as usize].clone()
    }

    /// All values reduced modulo `p^k`, recomputed at that precision.
    pub fn residues(&self, k: u32) -> Result<Vec<BigUint>> {
        self.specs.iter().map(|s| s.residue(self.p, k)).collect()
    }
}

fn show(x: &PAdicNumber) -> String {
    match crate::padic::to_small_integer(x) {
        Some(n) if n.abs() < 1_000_000 => n.to_string(),
        _ => x.to_string(),
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus && self.values == other.values
    }
}
