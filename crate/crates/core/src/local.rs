//! Solvability of `a x^2 + b y^2 + c z^2 = n` modulo prime powers.
//!
//! For a squarefree pairwise-coprime integer form the local behaviour is
//! finite: at p = 2 the represented residues stabilize at modulus 8 (all
//! coefficients odd) or 16 (one even coefficient), and at an odd prime p
//! dividing a coefficient the only failures sit in unit classes of n/p
//! modulo p.  This module computes those classifications exactly and
//! provides one step of Hensel lifting to climb prime powers.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorize, inv_mod, is_prime, legendre, Int, MAX_ENUM_MODULUS};
use crate::error::Error;
use crate::forms::NormalizedForm;
use crate::Result;

/// Outcome of the mod-8 / mod-16 classification of a normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoAdicClass {
    /// Every residue is represented at the deciding modulus.
    Complete,
    /// All coefficients odd: exactly the residue `-abc mod 8` is missing.
    ExcludedMod8(u8),
    /// One even coefficient: exactly the residue `-abc mod 16` is missing.
    ExcludedMod16(u8),
}

impl TwoAdicClass {
    /// The modulus at which the classification is decided (8, 16), or None
    /// when complete.
    pub fn excluded(&self) -> Option<(u8, u8)> {
        match self {
            TwoAdicClass::Complete => None,
            TwoAdicClass::ExcludedMod8(r) => Some((8, *r)),
            TwoAdicClass::ExcludedMod16(r) => Some((16, *r)),
        }
    }
}

/// An odd prime p dividing one coefficient where the complementary binary
/// form is anisotropic: targets `n = p*m` with `m mod p` in
/// `excluded_unit_residues` are not represented p-adically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeObstruction {
    pub p: Int,
    /// Value of the Legendre symbol of minus the product of the other two
    /// coefficients; always -1 for a recorded obstruction.
    pub symbol: i32,
    /// Units m in [1, p) such that n ≡ p*m (mod p^2) is excluded; exactly
    /// (p-1)/2 of them.
    pub excluded_unit_residues: Vec<Int>,
}

/// A solution of `a x^2 + b y^2 + c z^2 ≡ target (mod modulus)`.
///
/// `target` keeps the caller's full integer so the solution can be lifted
/// to higher powers without ambiguity; the congruence invariant holds for
/// the reduced residue either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModSolution {
    pub modulus: Int,
    pub x: Int,
    pub y: Int,
    pub z: Int,
    pub target: Int,
}

impl ModSolution {
    /// `a x^2 + b y^2 + c z^2` of this solution (not reduced).
    pub fn evaluate(&self, f: &NormalizedForm) -> Int {
        &f.a * &self.x * &self.x + &f.b * &self.y * &self.y + &f.c * &self.z * &self.z
    }
}

fn residue_u8(v: &Int, m: u32) -> u8 {
    v.mod_floor(&Int::from(m)).to_u8().unwrap()
}

/// Classify the two-adic behaviour of a normalized form.
///
/// All coefficients odd: residues mod 8 are complete unless
/// `a ≡ b ≡ c (mod 4)`, in which case exactly `-abc mod 8` is missing.
/// One even coefficient `a`: residues mod 16 are complete unless
/// `b + c ≡ a (mod 8)` or `b + c ≡ 2a (mod 8)`, in which case exactly
/// `-abc mod 16` is missing.
pub fn two_adic_classify(f: &NormalizedForm) -> TwoAdicClass {
    let coeffs = [&f.a, &f.b, &f.c];
    let evens: Vec<usize> = (0..3).filter(|&i| coeffs[i].is_even()).collect();
    let neg_abc = -f.abc();
    match evens.len() {
        0 => {
            let m4: Vec<u8> = coeffs.iter().map(|v| residue_u8(v, 4)).collect();
            if m4[0] == m4[1] && m4[1] == m4[2] {
                TwoAdicClass::ExcludedMod8(residue_u8(&neg_abc, 8))
            } else {
                TwoAdicClass::Complete
            }
        }
        1 => {
            let a = coeffs[evens[0]];
            let odds: Vec<&Int> = (0..3).filter(|i| *i != evens[0]).map(|i| coeffs[i]).collect();
            let bc = odds[0] + odds[1];
            let r = residue_u8(&bc, 8);
            if r == residue_u8(a, 8) || r == residue_u8(&(a * 2), 8) {
                TwoAdicClass::ExcludedMod16(residue_u8(&neg_abc, 16))
            } else {
                TwoAdicClass::Complete
            }
        }
        _ => unreachable!("normalized coefficients are pairwise coprime"),
    }
}

/// Enumerate the odd primes where the form has a p-adic obstruction: p
/// divides a coefficient (say c) and `(-ab/p) = -1`.  The excluded unit
/// residues m satisfy `((c/p) * m / p) = -1`; targets `n ≡ p*m (mod p^2)`
/// with such m are not represented.
pub fn prime_obstructions(f: &NormalizedForm) -> Result<Vec<PrimeObstruction>> {
    let mut out = Vec::new();
    let coeffs = [&f.a, &f.b, &f.c];
    for i in 0..3 {
        let coeff = coeffs[i];
        let other = -(coeffs[(i + 1) % 3] * coeffs[(i + 2) % 3]);
        for (p, _) in factorize(coeff)?.factors {
            if p.is_even() {
                continue;
            }
            if legendre(&other, &p)? == -1 {
                let cofactor = coeff / &p;
                let mut excluded = Vec::new();
                let mut m = Int::one();
                while m < p {
                    if legendre(&(&cofactor * &m), &p)? == -1 {
                        excluded.push(m.clone());
                    }
                    m += 1;
                }
                out.push(PrimeObstruction {
                    p,
                    symbol: -1,
                    excluded_unit_residues: excluded,
                });
            }
        }
    }
    out.sort_by(|a, b| a.p.cmp(&b.p));
    Ok(out)
}

/// Shared table-based enumeration.  `primitive_p`: when set, only count
/// solutions with at least one coordinate not divisible by that prime.
fn enumerate_mod(
    f: &NormalizedForm,
    target: &Int,
    modulus: &Int,
    primitive_p: Option<u64>,
) -> Result<Option<(u64, u64, u64)>> {
    let m = match modulus.to_u64() {
        Some(m) if m >= 1 && m <= MAX_ENUM_MODULUS => m,
        _ => {
            return Err(Error::ModulusTooLarge {
                modulus: modulus.clone(),
                bound: MAX_ENUM_MODULUS,
            })
        }
    };
    if m == 1 {
        return Ok(Some((0, 0, 0)));
    }
    let reduce = |v: &Int| v.mod_floor(modulus).to_u64().unwrap();
    let (a, b, c) = (reduce(&f.a), reduce(&f.b), reduce(&f.c));
    let t = reduce(target);

    let mu = m as usize;
    let sq: Vec<u64> = (0..m).map(|x| x * x % m).collect();
    // Smallest x with a*x^2 ≡ r, and smallest such x coprime to p.
    let mut x_any: Vec<Option<u64>> = vec![None; mu];
    let mut x_unit: Vec<Option<u64>> = vec![None; mu];
    for x in 0..m {
        let r = (a * sq[x as usize] % m) as usize;
        if x_any[r].is_none() {
            x_any[r] = Some(x);
        }
        if let Some(p) = primitive_p {
            if x % p != 0 && x_unit[r].is_none() {
                x_unit[r] = Some(x);
            }
        }
    }
    for y in 0..m {
        let by = b * sq[y as usize] % m;
        for z in 0..m {
            let r = ((t + 2 * m * m - by - c * sq[z as usize] % m) % m) as usize;
            let x = match primitive_p {
                Some(p) if y % p == 0 && z % p == 0 => x_unit[r],
                _ => x_any[r],
            };
            if let Some(x) = x {
                return Ok(Some((x, y, z)));
            }
        }
    }
    Ok(None)
}

/// Search for any solution of `f ≡ target (mod modulus)` by exhaustive
/// enumeration (cost O(modulus^2); the modulus is capped).  Imprimitive
/// solutions count.
pub fn represents_mod(
    f: &NormalizedForm,
    target: &Int,
    modulus: &Int,
) -> Result<Option<ModSolution>> {
    let found = enumerate_mod(f, target, modulus, None)?;
    Ok(found.map(|(x, y, z)| ModSolution {
        modulus: modulus.clone(),
        x: Int::from(x),
        y: Int::from(y),
        z: Int::from(z),
        target: target.clone(),
    }))
}

/// Like [`represents_mod`] at modulus `p^m`, but only accept solutions with
/// some coordinate not divisible by `p` - the ones Hensel lifting can use.
pub fn represents_mod_primitive(
    f: &NormalizedForm,
    target: &Int,
    p: &Int,
    m: u32,
) -> Result<Option<ModSolution>> {
    let modulus = p.pow(m);
    let pu = p.to_u64().ok_or_else(|| Error::ModulusTooLarge {
        modulus: modulus.clone(),
        bound: MAX_ENUM_MODULUS,
    })?;
    let found = enumerate_mod(f, target, &modulus, Some(pu))?;
    Ok(found.map(|(x, y, z)| ModSolution {
        modulus,
        x: Int::from(x),
        y: Int::from(y),
        z: Int::from(z),
        target: target.clone(),
    }))
}

/// One Hensel step: extend a solution mod `p^m` to one mod `p^(m+1)` by
/// adjusting a single coordinate.  For odd p the adjustable coordinates are
/// those with `p` dividing neither coefficient nor value (shift by a
/// multiple of `p^m`), or with `p` dividing the coefficient exactly once
/// but not the value, needing `m >= 2` (shift by a multiple of `p^(m-1)`).
/// For p = 2 an odd coordinate is shifted by `k*2^(m-1)` (odd coefficient,
/// `m >= 3`) or `k*2^(m-2)` (the even coefficient, `m >= 4`), where `k` is
/// the current defect `(f(sol) - target) / 2^m`.
pub fn lift_solution(f: &NormalizedForm, sol: &ModSolution, p: &Int) -> Result<ModSolution> {
    if !is_prime(p) {
        return Err(Error::InvalidModulus(p.clone()));
    }
    // modulus must be a power of p; recover the exponent.
    let mut m = 0u32;
    let mut rest = sol.modulus.clone();
    while (&rest % p).is_zero() {
        rest /= p;
        m += 1;
    }
    if !rest.is_one() || m == 0 {
        return Err(Error::PreconditionViolated(format!(
            "modulus {} is not a positive power of {}",
            sol.modulus, p
        )));
    }
    let pm = &sol.modulus;
    let defect = sol.evaluate(f) - &sol.target;
    if !(&defect % pm).is_zero() {
        return Err(Error::PreconditionViolated(
            "solution does not satisfy its congruence".into(),
        ));
    }
    let k = defect / pm;
    let new_modulus = pm * p;

    let coords = [
        (&f.a, &sol.x, 0usize),
        (&f.b, &sol.y, 1usize),
        (&f.c, &sol.z, 2usize),
    ];
    let build = |idx: usize, w: Int| {
        let mut xyz = [sol.x.clone(), sol.y.clone(), sol.z.clone()];
        xyz[idx] = w.mod_floor(&new_modulus);
        let out = ModSolution {
            modulus: new_modulus.clone(),
            x: xyz[0].clone(),
            y: xyz[1].clone(),
            z: xyz[2].clone(),
            target: sol.target.clone(),
        };
        debug_assert!((out.evaluate(f) - &out.target).mod_floor(&out.modulus).is_zero());
        out
    };

    if p.is_odd() {
        // Unit coefficient, unit coordinate: w += k1 * p^m with
        // k1 = -k / (2*coeff*w) mod p.
        for (coeff, w, idx) in coords {
            if !(coeff % p).is_zero() && !(w % p).is_zero() {
                let inv = inv_mod(&(Int::from(2) * coeff * w), p)?;
                let k1 = (-&k * inv).mod_floor(p);
                return Ok(build(idx, w + k1 * pm));
            }
        }
        // Coefficient divisible by p (exactly once - it is squarefree),
        // unit coordinate: w += k1 * p^(m-1), needs m >= 2.
        if m >= 2 {
            for (coeff, w, idx) in coords {
                if (coeff % p).is_zero() && !(w % p).is_zero() {
                    let c1 = coeff / p;
                    let inv = inv_mod(&(Int::from(2) * c1 * w), p)?;
                    let k1 = (-&k * inv).mod_floor(p);
                    return Ok(build(idx, w + k1 * (pm / p)));
                }
            }
        }
    } else {
        let n_even = coords.iter().filter(|(c, _, _)| c.is_even()).count();
        let min_m = if n_even == 0 { 3 } else { 4 };
        if m < min_m {
            return Err(Error::PreconditionViolated(format!(
                "two-adic lifting needs modulus at least 2^{min_m}, got 2^{m}"
            )));
        }
        // Odd coefficient with odd coordinate: w += k * 2^(m-1).
        for (coeff, w, idx) in coords {
            if coeff.is_odd() && w.is_odd() {
                return Ok(build(idx, w + &k * (pm >> 1)));
            }
        }
        // Even coefficient with odd coordinate: w += k * 2^(m-2).
        for (coeff, w, idx) in coords {
            if coeff.is_even() && w.is_odd() {
                return Ok(build(idx, w + &k * (pm >> 2)));
            }
        }
    }
    Err(Error::NotLiftable {
        x: sol.x.clone(),
        y: sol.y.clone(),
        z: sol.z.clone(),
        modulus: sol.modulus.clone(),
    })
}

/// Decide p-adic solvability of `f = n` for squarefree `n`.
///
/// At p = 2 this reads off [`two_adic_classify`].  At an odd prime not
/// dividing any coefficient every n works.  At an odd prime p dividing one
/// coefficient (say c), targets with p | n fail exactly when `(-ab/p) = -1`
/// and `((n/p)*(c/p)/p) = -1`.
pub fn locally_solvable(f: &NormalizedForm, n: &Int, p: &Int) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::PreconditionViolated(
            "locally_solvable requires a nonzero target".into(),
        ));
    }
    if p.is_even() {
        if *p != Int::from(2) {
            return Err(Error::InvalidModulus(p.clone()));
        }
        return Ok(match two_adic_classify(f) {
            TwoAdicClass::Complete => true,
            TwoAdicClass::ExcludedMod8(r) => residue_u8(n, 8) != r,
            TwoAdicClass::ExcludedMod16(r) => residue_u8(n, 16) != r,
        });
    }
    if !is_prime(p) {
        return Err(Error::InvalidModulus(p.clone()));
    }
    let coeffs = [&f.a, &f.b, &f.c];
    let Some(i) = (0..3).find(|&i| (coeffs[i] % p).is_zero()) else {
        // p is a unit at every coefficient: the form is universal mod p^m.
        return Ok(true);
    };
    if !(n % p).is_zero() {
        return Ok(true);
    }
    let coeff = coeffs[i];
    let other = -(coeffs[(i + 1) % 3] * coeffs[(i + 2) % 3]);
    Ok(legendre(&other, p)? == 1 || legendre(&((n / p) * (coeff / p)), p)? == 1)
}
