//! Brute-force cross-checks for the decision machinery.
//!
//! Everything here recomputes answers from first principles — exhaustive
//! residue sweeps and blind rational point searches — without touching the
//! lifting or search code it is meant to confirm.  The implementations are
//! deliberately naive: their value is that they can only be wrong in ways
//! unrelated to how the fast paths are wrong.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{Int, Rat};
use crate::decide::{excluded_progressions, is_represented, Progression, Witness};
use crate::error::Error;
use crate::forms::{normalize, DiagonalForm, NormalizedForm};
use crate::local::two_adic_classify;
use crate::Result;

/// Largest modulus accepted by [`residues_represented`]; the sweep is
/// cubic in the modulus.
pub const ORACLE_ENUM_MODULUS: u64 = 512;

/// Denominator bound used by [`crosscheck_progression`].
pub const CROSSCHECK_MAX_DEN: u32 = 4;
/// Numerator bound used by [`crosscheck_progression`].
pub const CROSSCHECK_MAX_NUM: u64 = 40;

/// Which residues a form attains modulo m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueReport {
    pub modulus: u64,
    /// Residues attained by some (x, y, z), ascending.
    pub represented: Vec<u64>,
    /// The complement, ascending.
    pub missing: Vec<u64>,
}

/// Enumerate every value of the form modulo `modulus` by a full cubic
/// sweep of x, y, z over 0..modulus.
pub fn residues_represented(f: &NormalizedForm, modulus: &Int) -> Result<ResidueReport> {
    let m = match modulus.to_u64() {
        Some(m) if m >= 1 && m <= ORACLE_ENUM_MODULUS => m,
        _ => {
            return Err(Error::ModulusTooLarge {
                modulus: modulus.clone(),
                bound: ORACLE_ENUM_MODULUS,
            })
        }
    };
    let reduce = |v: &Int| v.mod_floor(modulus).to_u64().unwrap();
    let (a, b, c) = (reduce(&f.a), reduce(&f.b), reduce(&f.c));
    let mut hit = vec![false; m as usize];
    for x in 0..m {
        let ax = a * x % m * x % m;
        for y in 0..m {
            let axy = (ax + b * y % m * y) % m;
            for z in 0..m {
                hit[((axy + c * z % m * z) % m) as usize] = true;
            }
        }
    }
    let represented = (0..m).filter(|&r| hit[r as usize]).collect();
    let missing = (0..m).filter(|&r| !hit[r as usize]).collect();
    Ok(ResidueReport { modulus: m, represented, missing })
}

/// Blind search for a rational point with f(x, y, z) = n.
///
/// Clears denominators to A x^2 + B y^2 + C z^2 = M t^2 and walks integer
/// triples outward in shells of growing max-norm h = 0..=max_num, testing
/// every denominator t = 1..=max_den at each point.  Returns the first
/// primitive hit; `None` means the bounds are exhausted.
///
/// Panics if the integerized inputs are too large for 128-bit arithmetic;
/// this is a testing oracle for desk-sized forms, not a general search.
pub fn brute_rational(f: &DiagonalForm, n: &Rat, max_den: u32, max_num: u64) -> Option<Witness> {
    let l = f
        .a
        .denom()
        .lcm(f.b.denom())
        .lcm(f.c.denom())
        .lcm(n.denom());
    let lr = Rat::from(l);
    let as_i128 = |v: &Rat| {
        (v * &lr)
            .to_integer()
            .to_i128()
            .expect("oracle coefficients must fit in 128 bits")
    };
    let (a, b, c, m) = (as_i128(&f.a), as_i128(&f.b), as_i128(&f.c), as_i128(n));
    let h_max = max_num as i128;
    let coeff_max = a.abs().max(b.abs()).max(c.abs());
    assert!(
        coeff_max
            .checked_mul(h_max * h_max)
            .and_then(|v| m.abs().checked_mul((max_den as i128) * (max_den as i128)).map(|w| v.max(w)))
            .map(|v| v < i128::MAX / 8)
            .unwrap_or(false),
        "oracle inputs exceed the 128-bit search budget"
    );

    let targets: Vec<i128> = (1..=max_den as i128).map(|t| m * t * t).collect();
    let check = |x: u64, y: u64, z: u64| -> Option<Witness> {
        if x == 0 && y == 0 && z == 0 {
            return None;
        }
        let v = a * (x as i128) * (x as i128)
            + b * (y as i128) * (y as i128)
            + c * (z as i128) * (z as i128);
        for (i, tv) in targets.iter().enumerate() {
            let t = i as u64 + 1;
            if v == *tv && x.gcd(&y).gcd(&z.gcd(&t)) == 1 {
                return Some(Witness {
                    x: Rat::new(Int::from(x), Int::from(t)),
                    y: Rat::new(Int::from(y), Int::from(t)),
                    z: Rat::new(Int::from(z), Int::from(t)),
                    target: n.clone(),
                });
            }
        }
        None
    };

    for h in 0..=max_num {
        // The three faces of the shell max(x, y, z) = h, each point once.
        for y in 0..=h {
            for z in 0..=h {
                if let Some(w) = check(h, y, z) {
                    return Some(w);
                }
            }
        }
        for x in 0..h {
            for z in 0..=h {
                if let Some(w) = check(x, h, z) {
                    return Some(w);
                }
            }
        }
        for x in 0..h {
            for y in 0..h {
                if let Some(w) = check(x, y, h) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Outcome of spot-checking an excluded progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub progression: Progression,
    /// How many members were examined.
    pub tested: u32,
    /// Members the decision procedure claims represented, or for which the
    /// blind search found a witness.  Empty means the progression held up.
    pub counterexamples: Vec<Int>,
}

impl CrosscheckReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Verify the first `count` members of a claimed excluded progression two
/// ways: the decision procedure must reject each member, and the blind
/// search at bounds ([`CROSSCHECK_MAX_DEN`], [`CROSSCHECK_MAX_NUM`]) must
/// come up empty.
pub fn crosscheck_progression(
    f: &DiagonalForm,
    progression: &Progression,
    count: u32,
) -> Result<CrosscheckReport> {
    let mut counterexamples = Vec::new();
    let mut tested = 0;
    let mut k = if progression.residue.is_zero() { 1 } else { 0 };
    while tested < count {
        let member = progression.member(k);
        k += 1;
        tested += 1;
        let verdict = is_represented(f, &Rat::from(member.clone()))?;
        let witness = brute_rational(
            f,
            &Rat::from(member.clone()),
            CROSSCHECK_MAX_DEN,
            CROSSCHECK_MAX_NUM,
        );
        if verdict.represented || witness.is_some() {
            counterexamples.push(member);
        }
    }
    Ok(CrosscheckReport {
        progression: progression.clone(),
        tested,
        counterexamples,
    })
}

/// Status of one internal consistency check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Ok,
    Failed,
    /// The check does not apply to this form (reason in `detail`).
    Skipped,
}

/// One named check with a human-readable explanation of what was seen.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// Result of [`verify_form`]; `ok` means no check failed (skips allowed).
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub ok: bool,
}

/// Residues mod 32 that must be missed by a form whose excluded two-adic
/// class is `r mod m`: the class itself and its 4^a-multiples while
/// 4^a * m still divides 32.
fn expected_missing_mod_32(m: u8, r: u8) -> Vec<u64> {
    let mut out = Vec::new();
    let mut scale = 1u64;
    while scale * m as u64 <= 32 {
        let mut v = scale * r as u64;
        while v < 32 {
            out.push(v);
            v += scale * m as u64;
        }
        scale *= 4;
    }
    out.sort_unstable();
    out
}

/// Re-derive the form's headline facts by brute force and report every
/// disagreement.  Checks: the normalization transport identity, the
/// two-adic classification against full residue sweeps (at the classified
/// modulus and at 32), and — for positive forms — `count` members of each
/// claimed excluded progression.
pub fn verify_form(f: &DiagonalForm, count: u32) -> Result<VerifyReport> {
    let mut checks = Vec::new();

    let nf = normalize(f)?;
    let diag = nf.as_diagonal();
    // Transport: f(u1 x, u2 y, u3 z) = lambda * normalized(x, y, z) at a
    // point with all terms active.
    let (one, two, three) = (
        Rat::from(Int::one()),
        Rat::from(Int::from(2)),
        Rat::from(Int::from(3)),
    );
    let lhs = f.evaluate(&(&nf.u1 * &one), &(&nf.u2 * &two), &(&nf.u3 * &three));
    let rhs = &nf.lambda * diag.evaluate(&one, &two, &three);
    checks.push(VerifyCheck {
        name: "normalize_transport",
        status: if lhs == rhs { CheckStatus::Ok } else { CheckStatus::Failed },
        detail: format!(
            "({}, {}, {}) ~ lambda {} times ({}, {}, {})",
            f.a, f.b, f.c, nf.lambda, nf.a, nf.b, nf.c
        ),
    });

    let class = two_adic_classify(&nf);
    let check = match class.excluded() {
        Some((m, r)) => {
            let sweep = residues_represented(&nf, &Int::from(m))?;
            let at_modulus = sweep.missing == vec![r as u64];
            let sweep32 = residues_represented(&nf, &Int::from(32))?;
            let stable = sweep32.missing == expected_missing_mod_32(m, r);
            VerifyCheck {
                name: "two_adic_residues",
                status: if at_modulus && stable { CheckStatus::Ok } else { CheckStatus::Failed },
                detail: format!(
                    "excluded class {r} mod {m}; sweep missing {:?} mod {m}, {:?} mod 32",
                    sweep.missing, sweep32.missing
                ),
            }
        }
        None => {
            let mut missing = Vec::new();
            for m in [8i64, 16, 32] {
                missing.extend(residues_represented(&nf, &Int::from(m))?.missing);
            }
            VerifyCheck {
                name: "two_adic_residues",
                status: if missing.is_empty() { CheckStatus::Ok } else { CheckStatus::Failed },
                detail: format!("complete class; sweeps mod 8, 16, 32 missing {missing:?}"),
            }
        }
    };
    checks.push(check);

    if f.is_positive() {
        let progressions = excluded_progressions(f)?;
        for progression in &progressions {
            let report = crosscheck_progression(f, progression, count)?;
            checks.push(VerifyCheck {
                name: "excluded_progression",
                status: if report.ok() { CheckStatus::Ok } else { CheckStatus::Failed },
                detail: format!(
                    "{} mod {}: {} members rejected, counterexamples {:?}",
                    progression.residue, progression.modulus, report.tested,
                    report.counterexamples
                ),
            });
        }
    } else {
        checks.push(VerifyCheck {
            name: "excluded_progression",
            status: CheckStatus::Skipped,
            detail: "form is not positive; no progressions are claimed".into(),
        });
    }

    let ok = checks.iter().all(|c| c.status != CheckStatus::Failed);
    Ok(VerifyReport { checks, ok })
}
