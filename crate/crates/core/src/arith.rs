//! Integer and rational primitives: factorization with a deterministic
//! primality certificate, squarefree splitting, Legendre and Jacobi symbols,
//! Tonelli-Shanks square roots, and the Chinese remainder theorem.
//!
//! Everything is exact.  `Int` is an arbitrary-precision signed integer and
//! `Rat` an arbitrary-precision rational kept in lowest terms with a positive
//! denominator (the representation enforces both invariants on construction).

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// Arbitrary-precision signed integer.
pub type Int = BigInt;

/// Arbitrary-precision rational, always in lowest terms with denominator > 0.
pub type Rat = num_rational::BigRational;

/// Default trial-division bound used by [`factorize`].
pub const DEFAULT_TRIAL_LIMIT: u64 = 1_000_000;

/// Largest modulus accepted by residue-enumeration routines.
pub const MAX_ENUM_MODULUS: u64 = 100_000;

/// Environment variable that overrides the default trial-division bound.
pub const TRIAL_LIMIT_ENV: &str = "TERNARYQ_TRIAL_LIMIT";

static TRIAL_LIMIT: OnceLock<AtomicU64> = OnceLock::new();

fn trial_limit_cell() -> &'static AtomicU64 {
    TRIAL_LIMIT.get_or_init(|| {
        let from_env = std::env::var(TRIAL_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok());
        AtomicU64::new(resolve_trial_limit(None, from_env))
    })
}

/// Precedence for the factoring bound: explicit setting, then the
/// `TERNARYQ_TRIAL_LIMIT` environment variable, then the default.
pub(crate) fn resolve_trial_limit(explicit: Option<u64>, from_env: Option<u64>) -> u64 {
    explicit.or(from_env).unwrap_or(DEFAULT_TRIAL_LIMIT).max(2)
}

/// Current trial-division bound (shared by all factorizations).
pub fn trial_limit() -> u64 {
    trial_limit_cell().load(Ordering::Relaxed)
}

/// Override the trial-division bound for the whole process.
pub fn set_trial_limit(bound: u64) {
    trial_limit_cell().store(bound.max(2), Ordering::Relaxed);
}

/// A signed integer written as `sign * prod(p_i ^ e_i)` with the primes
/// strictly increasing.  Every prime carries a deterministic certificate:
/// it was either found by trial division or passed the Miller-Rabin test
/// with the fixed witness set, which is provably correct below 3.3e24.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// +1 or -1.
    pub sign: i8,
    /// `(prime, exponent)` pairs, primes strictly increasing, exponents >= 1.
    pub factors: Vec<(Int, u32)>,
}

impl Factorization {
    /// Multiply the factorization back together.
    pub fn value(&self) -> Int {
        let mut v = Int::from(self.sign);
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        v
    }

    /// Product of primes with odd exponent, carrying the sign: the unique
    /// squarefree `s` with `value = s * r^2`.
    pub fn squarefree_core(&self) -> Int {
        let mut s = Int::from(self.sign);
        for (p, e) in &self.factors {
            if e % 2 == 1 {
                s *= p;
            }
        }
        s
    }

    /// The positive `r` with `value = squarefree_core * r^2`.
    pub fn square_part_root(&self) -> Int {
        let mut r = Int::one();
        for (p, e) in &self.factors {
            if e / 2 > 0 {
                r *= p.pow(e / 2);
            }
        }
        r
    }

    /// Exponent of `p` in the factorization (0 if absent).
    pub fn exponent_of(&self, p: &Int) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// True when no exponent exceeds 1.
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// The decomposition `n = core * root^2` with `core` a squarefree integer
/// (carrying the sign of `n`) and `root` a positive rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeSplit {
    pub core: Int,
    pub root: Rat,
}

// Below this bound the fixed Miller-Rabin witness set is a proven
// deterministic primality certificate (Sorenson & Webster).
fn mr_certificate_bound() -> &'static Int {
    static BOUND: OnceLock<Int> = OnceLock::new();
    BOUND.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

const MR_WITNESSES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test.  Exact for `|n| < 3.3e24`; the same witness
/// set is still applied above that bound, where [`factorize`] refuses to rely
/// on it (see `FactorLimitExceeded`).
pub fn is_prime(n: &Int) -> bool {
    let n = n.abs();
    if n < Int::from(2) {
        return false;
    }
    for w in MR_WITNESSES {
        let w = Int::from(w);
        if n == w {
            return true;
        }
        if (&n % &w).is_zero() {
            return false;
        }
    }
    // n is odd and > 37 here: Miller-Rabin with the fixed witnesses.
    let one = Int::one();
    let n_minus_1 = &n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for w in MR_WITNESSES {
        let mut x = Int::from(w).modpow(&d, &n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&Int::from(2), &n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factor `n` by trial division up to the process-wide bound, certifying any
/// remaining cofactor deterministically.  Errors with `FactorLimitExceeded`
/// when the cofactor can be neither split nor certified prime.
pub fn factorize(n: &Int) -> Result<Factorization> {
    factorize_with(n, trial_limit())
}

/// [`factorize`] with an explicit trial-division bound.
pub fn factorize_with(n: &Int, bound: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::PreconditionViolated(
            "factorize requires a nonzero integer".into(),
        ));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut v = n.abs();
    let mut factors: Vec<(Int, u32)> = Vec::new();

    // Fast path: almost every input fits in u128.
    if let Some(small) = v.to_u128() {
        let (facs, cofactor) = trial_divide_u128(small, bound);
        for (p, e) in facs {
            factors.push((Int::from(p), e));
        }
        v = Int::from(cofactor);
    } else {
        let mut d = Int::from(2);
        let big_bound = Int::from(bound);
        while d <= big_bound && (&d * &d) <= v {
            let mut e = 0u32;
            while (&v % &d).is_zero() {
                v /= &d;
                e += 1;
            }
            if e > 0 {
                factors.push((d.clone(), e));
            }
            d += if d == Int::from(2) { Int::one() } else { Int::from(2) };
        }
        if (&d * &d) > v && v > Int::one() {
            // Trial division ran past sqrt(v): the remainder is prime.
            factors.push((v.clone(), 1));
            v = Int::one();
        }
    }

    if !v.is_one() {
        resolve_cofactor(v, bound, &mut factors)?;
        factors.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Ok(Factorization { sign, factors })
}

/// Strip all prime factors <= bound (and <= sqrt of the remainder) from `v`.
/// Returns the found factors and the unfactored cofactor (1 when complete).
fn trial_divide_u128(mut v: u128, bound: u64) -> (Vec<(u128, u32)>, u128) {
    let mut factors = Vec::new();
    let bound = bound as u128;
    let mut d: u128 = 2;
    while d <= bound && d * d <= v {
        if v % d == 0 {
            let mut e = 0u32;
            while v % d == 0 {
                v /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if v > 1 && d * d > v {
        factors.push((v, 1));
        v = 1;
    }
    (factors, v)
}

/// Certify a cofactor that survived trial division: it has no prime factor
/// <= bound, so it is prime, a perfect power of a prime, or out of reach.
fn resolve_cofactor(v: Int, bound: u64, factors: &mut Vec<(Int, u32)>) -> Result<()> {
    let certified_prime = |w: &Int| w < mr_certificate_bound() && is_prime(w);
    if certified_prime(&v) {
        factors.push((v, 1));
        return Ok(());
    }
    // Perfect powers p^k slip through trial division when p > bound.
    let max_k = v.bits() as u32;
    for k in 2..=max_k {
        let r = v.nth_root(k);
        if r.pow(k) == v && certified_prime(&r) {
            factors.push((r, k));
            return Ok(());
        }
    }
    Err(Error::FactorLimitExceeded { cofactor: v, bound })
}

/// Split an integer as `core * root^2` with `core` squarefree and signed.
pub fn squarefree_split_int(n: &Int) -> Result<(Int, Int)> {
    let f = factorize(n)?;
    Ok((f.squarefree_core(), f.square_part_root()))
}

/// Split a nonzero rational as `core * root^2` with `core` a squarefree
/// integer carrying the sign and `root` a positive rational.
pub fn squarefree_split(n: &Rat) -> Result<SquarefreeSplit> {
    if n.is_zero() {
        return Err(Error::PreconditionViolated(
            "squarefree_split requires a nonzero rational".into(),
        ));
    }
    // n = p/q in lowest terms, p = n1*r1^2, q = n2*r2^2 (n2, r2 > 0):
    // n = (n1*n2) * (r1 / (n2*r2))^2, and n1*n2 is squarefree since
    // gcd(p, q) = 1.
    let (n1, r1) = squarefree_split_int(n.numer())?;
    let (n2, r2) = squarefree_split_int(n.denom())?;
    Ok(SquarefreeSplit {
        core: &n1 * &n2,
        root: Rat::new(r1, &n2 * &r2),
    })
}

/// Inverse of `a` modulo `m >= 2`, in `[1, m)`.
pub fn inv_mod(a: &Int, m: &Int) -> Result<Int> {
    if *m < Int::from(2) {
        return Err(Error::PreconditionViolated(
            "inv_mod requires a modulus >= 2".into(),
        ));
    }
    let a0 = a.mod_floor(m);
    let eg = a0.extended_gcd(m);
    if !eg.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.clone(),
            modulus: m.clone(),
        });
    }
    Ok(eg.x.mod_floor(m))
}

fn check_odd_prime(p: &Int) -> Result<()> {
    if p.is_even() || !is_prime(p) {
        return Err(Error::InvalidModulus(p.clone()));
    }
    Ok(())
}

/// Legendre symbol (a/p) for an odd prime p: 0 when p | a, otherwise +-1 by
/// Euler's criterion a^((p-1)/2) mod p.
pub fn legendre(a: &Int, p: &Int) -> Result<i32> {
    check_odd_prime(p)?;
    let a0 = a.mod_floor(p);
    if a0.is_zero() {
        return Ok(0);
    }
    let e = (p - Int::one()) >> 1;
    let r = a0.modpow(&e, p);
    Ok(if r.is_one() { 1 } else { -1 })
}

/// Jacobi symbol (m/n) for odd n >= 1, by binary quadratic reciprocity.
/// No factorization of n is needed.
pub fn jacobi(m: &Int, n: &Int) -> Result<i32> {
    if n.is_even() || !n.is_positive() {
        return Err(Error::InvalidModulus(n.clone()));
    }
    let mut a = m.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1i32;
    let three = Int::from(3);
    let five = Int::from(5);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % Int::from(8)).mod_floor(&Int::from(8));
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % Int::from(4)) == three && (&n % Int::from(4)) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { t } else { 0 })
}

/// Square root of `a` modulo an odd prime `p` by Tonelli-Shanks; returns the
/// smaller of the two roots (or 0).  Errors with `NonResidue` when (a/p) = -1.
pub fn sqrt_mod(a: &Int, p: &Int) -> Result<Int> {
    check_odd_prime(p)?;
    let a0 = a.mod_floor(p);
    if a0.is_zero() {
        return Ok(Int::zero());
    }
    if legendre(&a0, p)? == -1 {
        return Err(Error::NonResidue {
            a: a.clone(),
            p: p.clone(),
        });
    }
    let one = Int::one();
    let r = if (p % Int::from(4)) == Int::from(3) {
        // p = 3 mod 4: a^((p+1)/4) is a root.
        let e = (p + &one) >> 2;
        a0.modpow(&e, p)
    } else {
        tonelli_shanks(&a0, p)
    };
    let other = p - &r;
    Ok(r.min(other))
}

fn tonelli_shanks(a: &Int, p: &Int) -> Int {
    let one = Int::one();
    let two = Int::from(2);
    // p - 1 = q * 2^s with q odd.
    let p_minus_1 = p - &one;
    let s = p_minus_1.trailing_zeros().unwrap();
    let q = &p_minus_1 >> s;

    // Smallest quadratic non-residue; its existence makes the search finite.
    let mut z = two.clone();
    while legendre(&z, p).unwrap() != -1 {
        z += 1;
    }

    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        // Least i with t^(2^i) = 1; i < m is guaranteed.
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = t2.modpow(&two, p);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = b.modpow(&two, p);
        }
        m = i;
        c = b.modpow(&two, p);
        t = (&t * &c).mod_floor(p);
        r = (&r * &b).mod_floor(p);
    }
    r
}

/// Chinese remainder theorem for pairwise coprime moduli `>= 1`: returns
/// `(r, M)` with `M` the product of the moduli and `r` in `[0, M)` matching
/// every input residue.
pub fn crt(residues: &[(Int, Int)]) -> Result<(Int, Int)> {
    for (_, m) in residues {
        if !m.is_positive() {
            return Err(Error::PreconditionViolated(
                "crt requires positive moduli".into(),
            ));
        }
    }
    for i in 0..residues.len() {
        for j in (i + 1)..residues.len() {
            let g = residues[i].1.gcd(&residues[j].1);
            if !g.is_one() {
                return Err(Error::ModuliNotCoprime(
                    residues[i].1.clone(),
                    residues[j].1.clone(),
                ));
            }
        }
    }
    let mut r = Int::zero();
    let mut m = Int::one();
    for (ri, mi) in residues {
        if mi.is_one() {
            continue;
        }
        // x = r + m*k with k = (ri - r)/m mod mi.
        let k = ((ri - &r) * inv_mod(&m, mi)?).mod_floor(mi);
        r += &m * k;
        m *= mi;
        r = r.mod_floor(&m);
    }
    Ok((r, m))
}
