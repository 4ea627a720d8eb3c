//! The global decision procedure and witness constructions.
//!
//! `is_represented` decides whether a nonzero rational N is a value of
//! `a x^2 + b y^2 + c z^2` at rational points.  After normalizing the form
//! and replacing N by the squarefree core n of N/lambda, the answer is a
//! conjunction of finitely many checks: a sign condition, the two-adic
//! residue class, and one Legendre-symbol condition per odd prime shared
//! between n and a coefficient.  Nothing else can fail.
//!
//! The same machinery yields congruence classes excluded by a positive
//! form (`excluded_progressions`), a test for integer universality of
//! mixed-sign forms (`universal_over_z`), and explicit witnesses: bounded
//! rational search (`rational_witness`) and the constructive integer
//! witness built from an isotropic vector (`integer_witness`).

use num_integer::{ExtendedGcd, Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, legendre, squarefree_split, Int, Rat};
use crate::error::Error;
use crate::forms::{normalize_with_detail, DiagonalForm, NormalizedForm};
use crate::local::two_adic_classify;
use crate::Result;

/// One reason a target is not represented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The target's sign is outside the range of a definite form.
    SignMismatch,
    /// The squarefree core of the target sits in the excluded two-adic
    /// residue class of the normalized form.
    TwoAdicExclusion { modulus: u8, residue: u8 },
    /// An odd prime p divides both the core n and a coefficient, the
    /// complementary binary form is anisotropic mod p, and the unit part
    /// of n lands in a non-residue class: blocked p-adically.
    PrimeCondition {
        p: Int,
        /// Legendre symbol of minus the product of the other two
        /// coefficients (-1 whenever this failure is reported).
        neg_product_symbol: i32,
        /// Legendre symbol of (n/p)*(coeff/p) (-1 whenever reported).
        unit_symbol: i32,
    },
}

/// Decision outcome: represented, or a complete list of violated
/// conditions (sign first, then two-adic, then primes in increasing order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub represented: bool,
    pub failures: Vec<Failure>,
}

/// A rational point (x, y, z) with f(x, y, z) = target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
    pub target: Rat,
}

impl Witness {
    pub fn satisfies(&self, f: &DiagonalForm) -> bool {
        f.evaluate(&self.x, &self.y, &self.z) == self.target
    }
}

/// A nonzero integer point with f(x0, y0, z0) = 0 and gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicVector {
    pub x0: Int,
    pub y0: Int,
    pub z0: Int,
}

/// The arithmetic progression `residue + k*modulus`, k = 0, 1, 2, ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Progression {
    pub residue: Int,
    pub modulus: Int,
}

impl Progression {
    pub fn member(&self, k: u64) -> Int {
        &self.residue + &self.modulus * Int::from(k)
    }
}

/// Decide rational representability of a nonzero rational `n` by `f`.
pub fn is_represented(f: &DiagonalForm, n: &Rat) -> Result<Verdict> {
    if n.is_zero() {
        return Err(Error::PreconditionViolated(
            "is_represented requires a nonzero target".into(),
        ));
    }
    let nf = crate::forms::normalize(f)?;
    // f represents N iff the normalized form represents N / lambda, and a
    // diagonal form represents a rational iff it represents its squarefree
    // core (scale the point by the square root part).
    let core = squarefree_split(&(n / &nf.lambda))?.core;

    let mut failures = Vec::new();

    let positives = nf.coefficients().iter().filter(|v| v.is_positive()).count();
    if (positives == 3 && core.is_negative()) || (positives == 0 && core.is_positive()) {
        failures.push(Failure::SignMismatch);
    }

    if let Some((modulus, residue)) = two_adic_classify(&nf).excluded() {
        let r = core.mod_floor(&Int::from(modulus)).to_u8().unwrap();
        if r == residue {
            failures.push(Failure::TwoAdicExclusion { modulus, residue });
        }
    }

    // Odd primes dividing both the core and a coefficient.
    let coeffs = nf.coefficients();
    let mut prime_failures = Vec::new();
    for i in 0..3 {
        let coeff = coeffs[i];
        let neg_product = -(coeffs[(i + 1) % 3] * coeffs[(i + 2) % 3]);
        for (p, _) in factorize(coeff)?.factors {
            if p.is_even() || !(&core % &p).is_zero() {
                continue;
            }
            let s1 = legendre(&neg_product, &p)?;
            if s1 == -1 {
                let unit_part = (&core / &p) * (coeff / &p);
                let s2 = legendre(&unit_part, &p)?;
                if s2 == -1 {
                    prime_failures.push(Failure::PrimeCondition {
                        p,
                        neg_product_symbol: s1,
                        unit_symbol: s2,
                    });
                }
            }
        }
    }
    prime_failures.sort_by(|a, b| match (a, b) {
        (Failure::PrimeCondition { p: pa, .. }, Failure::PrimeCondition { p: pb, .. }) => {
            pa.cmp(pb)
        }
        _ => std::cmp::Ordering::Equal,
    });
    failures.extend(prime_failures);

    Ok(Verdict {
        represented: failures.is_empty(),
        failures,
    })
}

/// Congruence classes a positive form misses entirely.
///
/// Always contains the class `-S mod 8*d1*d2*d3*S^2` built from the
/// normalization of `f` (S is the squarefree part of the coefficient
/// product).  For integer coefficients the classical class
/// `-abc mod 8*(abc)^2` — sharpened to `-abc mod (2abc)^2` for a squarefree
/// pairwise-coprime triple with one even entry — is added when distinct.
/// Progressions are sorted by modulus, then residue.
pub fn excluded_progressions(f: &DiagonalForm) -> Result<Vec<Progression>> {
    if !f.is_positive() {
        return Err(Error::PreconditionViolated(
            "excluded_progressions requires positive coefficients".into(),
        ));
    }
    let (_, detail) = normalize_with_detail(f)?;
    let s = &detail.s;
    let modulus = Int::from(8) * &detail.d1 * &detail.d2 * &detail.d3 * s * s;
    let residue = (-s).mod_floor(&modulus);
    let mut out = vec![Progression { residue, modulus }];

    if f.a.is_integer() && f.b.is_integer() && f.c.is_integer() {
        let (a, b, c) = (f.a.to_integer(), f.b.to_integer(), f.c.to_integer());
        let abc = &a * &b * &c;
        let squarefree_coprime = [&a, &b, &c].into_iter().all(|v| {
            factorize(v).map(|f| f.is_squarefree()).unwrap_or(false)
        }) && a.gcd(&b).is_one()
            && a.gcd(&c).is_one()
            && b.gcd(&c).is_one();
        let modulus = if squarefree_coprime && abc.is_even() {
            // One even coefficient: the modulus sharpens to (2abc)^2.
            let m = Int::from(2) * &abc;
            &m * &m
        } else {
            Int::from(8) * &abc * &abc
        };
        let residue = (-&abc).mod_floor(&modulus);
        let prog = Progression { residue, modulus };
        if !out.contains(&prog) {
            out.push(prog);
        }
    }
    out.sort_by(|p, q| (&p.modulus, &p.residue).cmp(&(&q.modulus, &q.residue)));
    Ok(out)
}

fn check_universal_preconditions(f: &DiagonalForm) -> Result<NormalizedForm> {
    for v in [&f.a, &f.b, &f.c] {
        if !v.is_integer() {
            return Err(Error::PreconditionViolated(format!(
                "coefficient {v} is not an integer"
            )));
        }
    }
    let nf = NormalizedForm::from_coprime_squarefree(
        f.a.to_integer(),
        f.b.to_integer(),
        f.c.to_integer(),
    )?;
    if !f.is_indefinite() {
        return Err(Error::PreconditionViolated(
            "coefficients must not all have the same sign".into(),
        ));
    }
    Ok(nf)
}

/// Does a mixed-sign squarefree pairwise-coprime integer form represent
/// every integer over the integers?  True iff no odd prime dividing a
/// coefficient has an anisotropic complementary binary form, and
/// `f ≡ -abc` is solvable two-adically (checked at modulus 16 for even
/// abc, 8 for odd).
pub fn universal_over_z(f: &DiagonalForm) -> Result<bool> {
    let nf = check_universal_preconditions(f)?;
    let coeffs = nf.coefficients();
    for i in 0..3 {
        let neg_product = -(coeffs[(i + 1) % 3] * coeffs[(i + 2) % 3]);
        for (p, _) in factorize(coeffs[i])?.factors {
            if p.is_odd() && legendre(&neg_product, &p)? == -1 {
                return Ok(false);
            }
        }
    }
    let abc = nf.abc();
    let modulus = Int::from(if abc.is_even() { 16 } else { 8 });
    Ok(crate::local::represents_mod(&nf, &-abc, &modulus)?.is_some())
}

/// Find a primitive integer zero of an indefinite form by exhaustive search
/// inside the Holzer bounds |x0| <= sqrt|bc|, |y0| <= sqrt|ac|,
/// |z0| <= sqrt|ab|; a solvable form always has a zero in that box.
/// Returns the lexicographically smallest non-negative solution.
pub fn legendre_isotropic(f: &DiagonalForm) -> Result<IsotropicVector> {
    let nf = check_universal_preconditions(f)?;
    let (a, b, c) = (&nf.a, &nf.b, &nf.c);
    let bx = (b * c).abs().sqrt();
    let by = (a * c).abs().sqrt();
    let bz = (a * b).abs().sqrt();
    let to_u = |v: &Int| v.to_u64().unwrap_or(u64::MAX);
    for xu in 0..=to_u(&bx) {
        let x = Int::from(xu);
        let ax = a * &x * &x;
        for yu in 0..=to_u(&by) {
            let y = Int::from(yu);
            let axy = &ax + b * &y * &y;
            for zu in 0..=to_u(&bz) {
                if xu == 0 && yu == 0 && zu == 0 {
                    continue;
                }
                let z = Int::from(zu);
                if (&axy + c * &z * &z).is_zero() && x.gcd(&y).gcd(&z).is_one() {
                    return Ok(IsotropicVector { x0: x, y0: y, z0: z });
                }
            }
        }
    }
    Err(Error::NoSolution(format!(
        "({}, {}, {}) has no nontrivial rational zero",
        nf.a, nf.b, nf.c
    )))
}

/// a*x + b*y + c*z = gcd(a, b, c) by two extended-gcd steps.
fn ext_gcd3(a: &Int, b: &Int, c: &Int) -> (Int, Int, Int, Int) {
    let ExtendedGcd { gcd: g1, x: u, y: v, .. } = a.extended_gcd(b);
    let ExtendedGcd { gcd: g, x: s, y: w, .. } = g1.extended_gcd(c);
    (g, &s * u, &s * v, w)
}

/// Integer witness for a universal form: constructs (x, y, z) in Z^3 with
/// `f(x, y, z) = n` from an isotropic vector w0 and an auxiliary vector w1
/// with bilinear pairing 1, using `f(k*w0 + w1) = 2k + f(w1)` and parity
/// twists of w1 to match n.
pub fn integer_witness(f: &DiagonalForm, n: &Int) -> Result<Witness> {
    if !universal_over_z(f)? {
        return Err(Error::PreconditionViolated(
            "integer_witness requires a universal form".into(),
        ));
    }
    let nf = check_universal_preconditions(f)?;
    let iso = legendre_isotropic(f)?;
    let w = integer_witness_inner(&nf, &iso, n);
    // The construction is exact by design; verify anyway.
    let value = &nf.a * &w[0] * &w[0] + &nf.b * &w[1] * &w[1] + &nf.c * &w[2] * &w[2];
    assert_eq!(&value, n, "witness construction is exact");
    Ok(Witness {
        x: Rat::from(w[0].clone()),
        y: Rat::from(w[1].clone()),
        z: Rat::from(w[2].clone()),
        target: Rat::from(n.clone()),
    })
}

fn integer_witness_inner(nf: &NormalizedForm, iso: &IsotropicVector, n: &Int) -> [Int; 3] {
    let coeffs = [nf.a.clone(), nf.b.clone(), nf.c.clone()];
    let w0 = [iso.x0.clone(), iso.y0.clone(), iso.z0.clone()];
    // A primitive isotropic vector of a squarefree pairwise-coprime form is
    // pairwise coprime, which makes gcd(a*x0, b*y0, c*z0) = 1.
    debug_assert!(w0[0].gcd(&w0[1]).is_one() || w0[0].gcd(&w0[2]).is_one());
    let (g, x1, y1, z1) = ext_gcd3(
        &(&coeffs[0] * &w0[0]),
        &(&coeffs[1] * &w0[1]),
        &(&coeffs[2] * &w0[2]),
    );
    assert!(g.is_one(), "pairing gcd must be 1 for a primitive zero");
    let mut aux = [x1, y1, z1];

    let eval = |v: &[Int; 3]| -> Int {
        &coeffs[0] * &v[0] * &v[0] + &coeffs[1] * &v[1] * &v[1] + &coeffs[2] * &v[2] * &v[2]
    };
    // aux[i] += coeffs[j]*w0[j]; aux[j] -= coeffs[i]*w0[i].  Leaves the
    // pairing sum(coeffs[i]*w0[i]*aux[i]) unchanged.
    let twist = |aux: &mut [Int; 3], i: usize, j: usize| {
        let di = &coeffs[j] * &w0[j];
        let dj = &coeffs[i] * &w0[i];
        aux[i] += di;
        aux[j] -= dj;
    };

    let even_coeff = (0..3).find(|&i| coeffs[i].is_even());
    match even_coeff {
        None => {
            // All coefficients odd: isotropy forces exactly one even
            // coordinate in w0; twisting there flips the parity of f(aux).
            let i = (0..3).find(|&i| w0[i].is_even()).expect("one even coordinate");
            let j = (i + 1) % 3;
            let mut s = eval(&aux);
            if (&s - n).is_odd() {
                twist(&mut aux, i, j);
                s = eval(&aux);
                debug_assert!((&s - n).is_even());
            }
            let k = (n - s) / 2;
            std::array::from_fn(|t| &aux[t] + &k * &w0[t])
        }
        Some(e) => {
            // One even coefficient; the two odd-coefficient coordinates of
            // w0 are odd.  f(k*w0 + aux) = 2k*pairing + f(aux).
            if n.is_odd() {
                // pairing = 1 makes f(aux) odd automatically.
                let s = eval(&aux);
                debug_assert!(s.is_odd());
                let k = (n - s) / 2;
                std::array::from_fn(|t| &aux[t] + &k * &w0[t])
            } else if n.is_zero() {
                w0
            } else if n.mod_floor(&Int::from(4)) == Int::from(2) {
                // Double the pairing to 2, then force the even-coefficient
                // coordinate odd and the other two even: f(aux) ≡ 2 mod 4
                // and f(k*w0 + aux) = 4k + f(aux).
                for v in aux.iter_mut() {
                    *v *= 2;
                }
                let o1 = (e + 1) % 3;
                let o2 = (e + 2) % 3;
                if aux[e].is_even() {
                    twist(&mut aux, e, o1);
                }
                debug_assert!(aux[e].is_odd());
                // The pairing is even, so aux[o1] and aux[o2] agree in
                // parity; make them both even.
                if aux[o1].is_odd() {
                    twist(&mut aux, o1, o2);
                }
                debug_assert!(aux[o1].is_even() && aux[o2].is_even());
                let s = eval(&aux);
                debug_assert_eq!(s.mod_floor(&Int::from(4)), n.mod_floor(&Int::from(4)));
                let k = (n - s) / 4;
                std::array::from_fn(|t| &aux[t] + &k * &w0[t])
            } else {
                // n ≡ 0 mod 4: represent n/4 and scale the witness by 2.
                let inner = integer_witness_inner(nf, iso, &(n / 4));
                inner.map(|v| v * 2)
            }
        }
    }
}

/// Bounded deterministic search for a rational witness: common denominators
/// t = 1..=max_den in order, numerators 0..=max_num, solving for z.  Only
/// primitive quadruples gcd(x, y, z, t) = 1 are returned, which loses
/// nothing.  `None` means no witness within the bounds, not a proof of
/// non-representability.
pub fn rational_witness(
    f: &DiagonalForm,
    n: &Rat,
    max_den: u32,
    max_num: u64,
) -> Option<Witness> {
    rational_witness_jobs(f, n, max_den, max_num, 1)
}

/// [`rational_witness`] with the denominator sweep partitioned over
/// `jobs` threads.  The result is identical for every job count.
pub fn rational_witness_jobs(
    f: &DiagonalForm,
    n: &Rat,
    max_den: u32,
    max_num: u64,
    jobs: usize,
) -> Option<Witness> {
    let l = f
        .a
        .denom()
        .lcm(f.b.denom())
        .lcm(f.c.denom())
        .lcm(n.denom());
    let lr = Rat::from(l);
    let to_int = |v: &Rat| (v * &lr).to_integer();
    let (a, b, c, m) = (to_int(&f.a), to_int(&f.b), to_int(&f.c), to_int(n));

    let found = match (a.to_i128(), b.to_i128(), c.to_i128(), m.to_i128()) {
        (Some(a), Some(b), Some(c), Some(m))
            if fits_search_budget(a, b, c, m, max_den, max_num) =>
        {
            search_fixed(a, b, c, m, max_den, max_num, jobs.max(1))
        }
        _ => search_big(&a, &b, &c, &m, max_den, max_num),
    };
    found.map(|(t, x, y, z)| Witness {
        x: Rat::new(Int::from(x), Int::from(t)),
        y: Rat::new(Int::from(y), Int::from(t)),
        z: Rat::new(Int::from(z), Int::from(t)),
        target: n.clone(),
    })
}

fn fits_search_budget(a: i128, b: i128, c: i128, m: i128, max_den: u32, max_num: u64) -> bool {
    let num = max_num as i128;
    let den = max_den as i128;
    let coeff_max = a.abs().max(b.abs()).max(c.abs());
    // 4 * (coeff_max*num^2 + |m|*den^2) must stay far from i128 overflow.
    coeff_max
        .checked_mul(num * num)
        .and_then(|v| m.abs().checked_mul(den * den).map(|w| v + w))
        .map(|v| v < i128::MAX / 8)
        .unwrap_or(false)
}

/// Search common denominators from `ts` in ascending order; first hit wins.
fn search_t_list(
    a: i128,
    b: i128,
    c: i128,
    m: i128,
    ts: impl Iterator<Item = u32>,
    max_num: u64,
    stop_above: &std::sync::atomic::AtomicU32,
) -> Option<(u32, u64, u64, u64)> {
    use std::sync::atomic::Ordering;
    // Flip signs so a pruning test exists whenever the form is definite.
    let (a, b, c, m) = if a < 0 && b < 0 && c < 0 {
        (-a, -b, -c, -m)
    } else {
        (a, b, c, m)
    };
    let definite = a > 0 && b > 0 && c > 0;
    for t in ts {
        if t > stop_above.load(Ordering::Relaxed) {
            continue;
        }
        let r = m * (t as i128) * (t as i128);
        if definite && r < 0 {
            continue;
        }
        for x in 0..=max_num {
            let ax = a * (x as i128) * (x as i128);
            if definite && ax > r {
                break;
            }
            let rx = r - ax;
            for y in 0..=max_num {
                let v = rx - b * (y as i128) * (y as i128);
                if definite && v < 0 {
                    break;
                }
                // Need c*z^2 = v with 0 <= z <= max_num.
                let z = if v == 0 {
                    0
                } else if (v > 0) == (c > 0) && v % c == 0 {
                    let q = v / c;
                    let z = q.sqrt() as u64;
                    if (z as i128) * (z as i128) == q && z <= max_num {
                        z
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                if gcd4(x, y, z, t as u64) == 1 {
                    stop_above.fetch_min(t, Ordering::Relaxed);
                    return Some((t, x, y, z));
                }
            }
        }
    }
    None
}

fn search_fixed(
    a: i128,
    b: i128,
    c: i128,
    m: i128,
    max_den: u32,
    max_num: u64,
    jobs: usize,
) -> Option<(u32, u64, u64, u64)> {
    use std::sync::atomic::AtomicU32;
    let stop = AtomicU32::new(u32::MAX);
    if jobs <= 1 || max_den < 2 {
        return search_t_list(a, b, c, m, 1..=max_den, max_num, &stop);
    }
    let jobs = jobs.min(max_den as usize);
    let mut results: Vec<Option<(u32, u64, u64, u64)>> = vec![None; jobs];
    std::thread::scope(|scope| {
        let stop = &stop;
        let mut handles = Vec::new();
        for j in 0..jobs {
            let ts: Vec<u32> = (1..=max_den).filter(|t| (t - 1) as usize % jobs == j).collect();
            handles.push(scope.spawn(move || {
                search_t_list(a, b, c, m, ts.into_iter(), max_num, stop)
            }));
        }
        for (j, h) in handles.into_iter().enumerate() {
            results[j] = h.join().expect("search worker panicked");
        }
    });
    // Smallest denominator wins; each worker already returns its own best.
    results.into_iter().flatten().min_by_key(|r| r.0)
}

/// Arbitrary-precision fallback for coefficients too large for the fast
/// path; same search order, sequential.
fn search_big(
    a: &Int,
    b: &Int,
    c: &Int,
    m: &Int,
    max_den: u32,
    max_num: u64,
) -> Option<(u32, u64, u64, u64)> {
    let definite = a.is_positive() && b.is_positive() && c.is_positive();
    let negdef = a.is_negative() && b.is_negative() && c.is_negative();
    let flip = if negdef { -Int::one() } else { Int::one() };
    let (a, b, c, m) = (a * &flip, b * &flip, c * &flip, m * &flip);
    let definite = definite || negdef;
    for t in 1..=max_den {
        let r = &m * Int::from(t) * Int::from(t);
        if definite && r.is_negative() {
            continue;
        }
        for x in 0..=max_num {
            let ax = &a * Int::from(x) * Int::from(x);
            if definite && ax > r {
                break;
            }
            let rx = &r - ax;
            for y in 0..=max_num {
                let v = &rx - &b * Int::from(y) * Int::from(y);
                if definite && v.is_negative() {
                    break;
                }
                let z: u64 = if v.is_zero() {
                    0
                } else if v.is_positive() == c.is_positive() && (&v % &c).is_zero() {
                    let q = &v / &c;
                    let z = q.sqrt();
                    if &z * &z == q {
                        match z.to_u64() {
                            Some(z) if z <= max_num => z,
                            _ => continue,
                        }
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                if gcd4(x, y, z, t as u64) == 1 {
                    return Some((t, x, y, z));
                }
            }
        }
    }
    None
}

fn gcd4(x: u64, y: u64, z: u64, t: u64) -> u64 {
    x.gcd(&y).gcd(&z.gcd(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn df(a: i64, b: i64, c: i64) -> DiagonalForm {
        DiagonalForm::from_ints(a, b, c).unwrap()
    }

    fn int(n: i64) -> Int {
        Int::from(n)
    }

    fn ri(n: i64) -> Rat {
        Rat::from(Int::from(n))
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(int(n), int(d))
    }

    #[test]
    fn gauss_form_verdicts() {
        let f = df(1, 1, 1);
        assert!(is_represented(&f, &ri(3)).unwrap().represented);
        assert!(is_represented(&f, &ri(6)).unwrap().represented);
        let v = is_represented(&f, &ri(7)).unwrap();
        assert!(!v.represented);
        assert_eq!(
            v.failures,
            vec![Failure::TwoAdicExclusion { modulus: 8, residue: 7 }]
        );
        // 28 = 4*7 and 63 = 9*7 both have core 7.
        assert!(!is_represented(&f, &ri(28)).unwrap().represented);
        assert!(!is_represented(&f, &ri(63)).unwrap().represented);
        // Negative targets fail on sign (and land in the excluded class).
        let v = is_represented(&f, &ri(-1)).unwrap();
        assert!(!v.represented);
        assert!(v.failures.contains(&Failure::SignMismatch));
    }

    #[test]
    fn ramanujan_form_verdicts() {
        let f = df(1, 1, 10);
        assert!(is_represented(&f, &ri(3)).unwrap().represented);
        let v = is_represented(&f, &ri(6)).unwrap();
        assert_eq!(
            v.failures,
            vec![Failure::TwoAdicExclusion { modulus: 16, residue: 6 }]
        );
        // 4^m scaling: 24 and 96 have core 6.
        assert!(!is_represented(&f, &ri(24)).unwrap().represented);
        assert!(!is_represented(&f, &ri(96)).unwrap().represented);
        // 390 ≡ 6 mod 16.
        assert!(!is_represented(&f, &ri(390)).unwrap().represented);
    }

    #[test]
    fn prime_condition_verdicts() {
        let f = df(1, 1, 7);
        let v = is_represented(&f, &ri(21)).unwrap();
        assert!(!v.represented);
        assert_eq!(v.failures.len(), 1);
        match &v.failures[0] {
            Failure::PrimeCondition { p, neg_product_symbol, unit_symbol } => {
                assert_eq!(p, &int(7));
                assert_eq!(*neg_product_symbol, -1);
                assert_eq!(*unit_symbol, -1);
            }
            other => panic!("expected PrimeCondition, got {other:?}"),
        }
        assert!(is_represented(&f, &ri(14)).unwrap().represented);

        // Rational target: 21/4 has the same core as 21.
        assert!(!is_represented(&f, &rat(21, 4)).unwrap().represented);
        assert!(is_represented(&f, &rat(14, 9)).unwrap().represented);
    }

    #[test]
    fn transported_verdicts() {
        // (2, 6, 15) normalizes to (3, 1, 10) with lambda = 6; the member
        // 1195 of its excluded progression transports to core
        // 7170 = 2*3*5*239, which violates the two-adic class (7170 ≡ 2
        // mod 16) and the prime conditions at 3 and 5 simultaneously.
        let f = df(2, 6, 15);
        let v = is_represented(&f, &ri(1195)).unwrap();
        assert!(!v.represented);
        assert_eq!(
            v.failures,
            vec![
                Failure::TwoAdicExclusion { modulus: 16, residue: 2 },
                Failure::PrimeCondition {
                    p: int(3),
                    neg_product_symbol: -1,
                    unit_symbol: -1
                },
                Failure::PrimeCondition {
                    p: int(5),
                    neg_product_symbol: -1,
                    unit_symbol: -1
                },
            ]
        );
        assert!(is_represented(&f, &ri(23)).unwrap().represented);
    }

    #[test]
    fn zero_target_rejected() {
        assert!(matches!(
            is_represented(&df(1, 1, 1), &ri(0)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn excluded_progression_examples() {
        let p = excluded_progressions(&df(1, 1, 1)).unwrap();
        assert_eq!(p, vec![Progression { residue: int(7), modulus: int(8) }]);

        let p = excluded_progressions(&df(1, 1, 10)).unwrap();
        assert_eq!(
            p,
            vec![
                Progression { residue: int(390), modulus: int(400) },
                Progression { residue: int(790), modulus: int(800) },
            ]
        );

        let p = excluded_progressions(&df(2, 6, 15)).unwrap();
        assert_eq!(
            p,
            vec![
                Progression { residue: int(1195), modulus: int(1200) },
                Progression { residue: int(259_020), modulus: int(259_200) },
            ]
        );

        // Both routes produce the same class here: deduplicated.
        let p = excluded_progressions(&df(1, 1, 3)).unwrap();
        assert_eq!(p, vec![Progression { residue: int(69), modulus: int(72) }]);

        assert!(excluded_progressions(&df(1, 1, -1)).is_err());
    }

    #[test]
    fn excluded_progressions_rational_coefficients() {
        // (1/2, 3, 5): S = squarefree part of 15/2 = 30.
        let f = DiagonalForm::new(rat(1, 2), ri(3), ri(5)).unwrap();
        let progs = excluded_progressions(&f).unwrap();
        assert_eq!(progs.len(), 1);
        assert_eq!(progs[0].modulus, int(8) * int(900));
        assert_eq!(progs[0].residue, int(7200) - int(30));
        // First few members really are not represented.
        for k in 0..3 {
            let n = Rat::from(progs[0].member(k));
            assert!(!is_represented(&f, &n).unwrap().represented, "member {k}");
        }
    }

    #[test]
    fn universality_examples() {
        assert!(universal_over_z(&df(1, 1, -1)).unwrap());
        assert!(universal_over_z(&df(2, 3, -5)).unwrap());
        assert!(universal_over_z(&df(1, 1, -2)).unwrap());
        // (-1/3) = -1 blocks universality at 3.
        assert!(!universal_over_z(&df(1, 1, -3)).unwrap());

        // Preconditions.
        assert!(universal_over_z(&df(1, 1, 3)).is_err()); // definite
        assert!(universal_over_z(&df(1, 4, -1)).is_err()); // 4 not squarefree
        assert!(universal_over_z(&df(2, 6, -15)).is_err()); // not coprime
        assert!(universal_over_z(
            &DiagonalForm::new(rat(1, 2), ri(1), ri(-1)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn isotropic_examples() {
        let v = legendre_isotropic(&df(1, 1, -2)).unwrap();
        assert_eq!((v.x0, v.y0, v.z0), (int(1), int(1), int(1)));

        let v = legendre_isotropic(&df(2, 3, -5)).unwrap();
        assert_eq!((v.x0, v.y0, v.z0), (int(1), int(1), int(1)));

        let v = legendre_isotropic(&df(1, 1, -1)).unwrap();
        assert_eq!(
            &df(1, 1, -1).evaluate(
                &Rat::from(v.x0.clone()),
                &Rat::from(v.y0.clone()),
                &Rat::from(v.z0.clone())
            ),
            &ri(0)
        );

        // x^2 + y^2 = 3 z^2 has no rational solutions.
        assert!(matches!(
            legendre_isotropic(&df(1, 1, -3)),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn integer_witness_examples() {
        let f = df(2, 3, -5);
        let w = integer_witness(&f, &int(15)).unwrap();
        assert!(w.satisfies(&f));
        assert!(w.x.is_integer() && w.y.is_integer() && w.z.is_integer());

        let f = df(1, 1, -1);
        for n in [7i64, 8, -5, 0, 1, -100] {
            let w = integer_witness(&f, &int(n)).unwrap();
            assert!(w.satisfies(&f), "n={n}");
            assert!(w.x.is_integer() && w.y.is_integer() && w.z.is_integer());
        }

        // Even coefficient: every residue class of n mod 4 plus zero.
        let f = df(1, 1, -2);
        for n in [-9i64, -6, -4, -1, 0, 1, 2, 3, 4, 6, 8, 16, 50] {
            let w = integer_witness(&f, &int(n)).unwrap();
            assert!(w.satisfies(&f), "n={n}");
        }

        assert!(integer_witness(&df(1, 1, -3), &int(5)).is_err());
        assert!(integer_witness(&df(1, 1, 3), &int(5)).is_err());
    }

    #[test]
    fn rational_witness_examples() {
        // The Ramanujan form represents 3 with denominator 2.
        let f = df(1, 1, 10);
        let w = rational_witness(&f, &ri(3), 2, 10).unwrap();
        assert_eq!((w.x, w.y, w.z), (rat(1, 2), rat(1, 2), rat(1, 2)));

        // 6 is excluded: no witness at any bound.
        assert!(rational_witness(&f, &ri(6), 8, 60).is_none());

        // Indefinite form, integer witness found at t = 1.
        let f = df(1, 1, -1);
        let w = rational_witness(&f, &ri(7), 4, 30).unwrap();
        assert!(w.satisfies(&f));
        assert_eq!(w.target, ri(7));
    }

    #[test]
    fn rational_witness_is_deterministic_across_jobs() {
        let f = df(2, 3, -5);
        for n in [-14i64, -7, 1, 11, 30] {
            let w1 = rational_witness_jobs(&f, &ri(n), 12, 80, 1);
            let w3 = rational_witness_jobs(&f, &ri(n), 12, 80, 3);
            let w8 = rational_witness_jobs(&f, &ri(n), 12, 80, 8);
            assert_eq!(w1, w3, "n={n}");
            assert_eq!(w1, w8, "n={n}");
        }
    }

    #[test]
    fn rational_witness_respects_primitivity_and_bounds() {
        let f = df(1, 1, 1);
        let w = rational_witness(&f, &ri(3), 6, 40).unwrap();
        assert!(w.satisfies(&f));
        let g = w
            .x
            .denom()
            .lcm(w.y.denom())
            .lcm(w.z.denom());
        assert!(g <= int(6));
        // Excluded target: the sweep must exhaust quietly.
        assert!(rational_witness(&f, &ri(7), 6, 40).is_none());
    }

    proptest! {
        // Verdicts are invariant under square scaling of the target and
        // permutation of the coefficients.
        #[test]
        fn verdict_invariances(
            sel in 0usize..6,
            n in -60i64..60,
            t in 1i64..8,
        ) {
            prop_assume!(n != 0);
            let forms = [
                (1i64, 1, 1), (1, 1, 10), (1, 2, 3), (1, 1, 7),
                (2, 3, -5), (1, 2, -5),
            ];
            let (a, b, c) = forms[sel];
            let f = df(a, b, c);
            let base = is_represented(&f, &ri(n)).unwrap().represented;

            let scaled = is_represented(&f, &ri(n * t * t)).unwrap().represented;
            prop_assert_eq!(base, scaled, "square scaling by {}", t);

            let perm = df(b, c, a);
            let permuted = is_represented(&perm, &ri(n)).unwrap().represented;
            prop_assert_eq!(base, permuted, "cyclic permutation");

            // Rescaling the form and target together changes nothing.
            let resc = df(a * t, b * t, c * t);
            let rescaled = is_represented(&resc, &ri(n * t)).unwrap().represented;
            prop_assert_eq!(base, rescaled, "rescaling by {}", t);
        }

        // Any witness the bounded search finds satisfies the form exactly,
        // and the verdict must agree.
        #[test]
        fn witness_soundness(sel in 0usize..6, n in -40i64..40) {
            prop_assume!(n != 0);
            let forms = [
                (1i64, 1, 1), (1, 1, 10), (1, 2, 3), (1, 1, 7),
                (2, 3, -5), (1, 2, -5),
            ];
            let (a, b, c) = forms[sel];
            let f = df(a, b, c);
            if let Some(w) = rational_witness(&f, &ri(n), 6, 48) {
                prop_assert!(w.satisfies(&f));
                prop_assert!(is_represented(&f, &ri(n)).unwrap().represented);
            }
        }
    }
}
