//! Ternary quadratic forms over the rationals: general forms with cross
//! terms, diagonal forms, diagonalization by iterated completion of squares,
//! and the reduction of a diagonal form to a squarefree pairwise-coprime
//! integer form.
//!
//! Normalization is the workhorse: every diagonal form `a x^2 + b y^2 + c z^2`
//! with nonzero rational coefficients represents exactly the same rationals
//! as `lambda * (a' x^2 + b' y^2 + c' z^2)` where `a', b', c'` are squarefree
//! pairwise-coprime integers and `lambda > 0` is rational.  The rescaling is
//! witnessed coordinate-wise: `a * u1^2 = lambda * a'` and so on, so value
//! sets transport exactly.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, squarefree_split, Int, Rat};
use crate::error::Error;
use crate::Result;

/// `a x^2 + b y^2 + c z^2` with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl DiagonalForm {
    /// Rejects zero coefficients (the form would be degenerate).
    pub fn new(a: Rat, b: Rat, c: Rat) -> Result<Self> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(DiagonalForm { a, b, c })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self> {
        DiagonalForm::new(
            Rat::from(Int::from(a)),
            Rat::from(Int::from(b)),
            Rat::from(Int::from(c)),
        )
    }

    pub fn evaluate(&self, x: &Rat, y: &Rat, z: &Rat) -> Rat {
        &self.a * x * x + &self.b * y * y + &self.c * z * z
    }

    /// True when all three coefficients are positive.
    pub fn is_positive(&self) -> bool {
        self.a.is_positive() && self.b.is_positive() && self.c.is_positive()
    }

    /// True when the coefficients are not all of one sign.
    pub fn is_indefinite(&self) -> bool {
        let pos = [&self.a, &self.b, &self.c]
            .iter()
            .filter(|v| v.is_positive())
            .count();
        pos != 0 && pos != 3
    }
}

/// General ternary form
/// `q11 x^2 + q22 y^2 + q33 z^2 + q12 xy + q13 xz + q23 yz`
/// with a nonsingular Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryForm {
    pub q11: Rat,
    pub q22: Rat,
    pub q33: Rat,
    pub q12: Rat,
    pub q13: Rat,
    pub q23: Rat,
}

impl TernaryForm {
    /// Rejects forms whose Gram matrix is singular.
    #[allow(clippy::too_many_arguments)]
    pub fn new(q11: Rat, q22: Rat, q33: Rat, q12: Rat, q13: Rat, q23: Rat) -> Result<Self> {
        let f = TernaryForm {
            q11,
            q22,
            q33,
            q12,
            q13,
            q23,
        };
        if f.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(f)
    }

    pub fn from_diagonal(d: &DiagonalForm) -> Self {
        TernaryForm {
            q11: d.a.clone(),
            q22: d.b.clone(),
            q33: d.c.clone(),
            q12: Rat::zero(),
            q13: Rat::zero(),
            q23: Rat::zero(),
        }
    }

    pub fn evaluate(&self, x: &Rat, y: &Rat, z: &Rat) -> Rat {
        &self.q11 * x * x
            + &self.q22 * y * y
            + &self.q33 * z * z
            + &self.q12 * x * y
            + &self.q13 * x * z
            + &self.q23 * y * z
    }

    /// Symmetric Gram matrix (off-diagonal entries are halved coefficients).
    pub fn gram(&self) -> [[Rat; 3]; 3] {
        let half = Rat::new(Int::one(), Int::from(2));
        [
            [
                self.q11.clone(),
                &self.q12 * &half,
                &self.q13 * &half,
            ],
            [
                &self.q12 * &half,
                self.q22.clone(),
                &self.q23 * &half,
            ],
            [
                &self.q13 * &half,
                &self.q23 * &half,
                self.q33.clone(),
            ],
        ]
    }

    /// Determinant of the Gram matrix.
    pub fn det(&self) -> Rat {
        det3(&self.gram())
    }
}

/// Invertible rational change of variables `v -> M v` (row-major matrix).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    pub m: [[Rat; 3]; 3],
}

impl Transform {
    pub fn identity() -> Self {
        let mut m = zero3x3();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Rat::one();
        }
        Transform { m }
    }

    pub fn apply(&self, x: &Rat, y: &Rat, z: &Rat) -> (Rat, Rat, Rat) {
        let v = [x, y, z];
        let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
        for (i, row) in self.m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out[i] += e * v[j];
            }
        }
        let [a, b, c] = out;
        (a, b, c)
    }

    pub fn det(&self) -> Rat {
        det3(&self.m)
    }
}

/// A squarefree pairwise-coprime integer form together with the exact
/// rescaling that relates it to the form it came from: for the original
/// coefficients `(A, B, C)`,
///
/// ```text
/// A * u1^2 = lambda * a,   B * u2^2 = lambda * b,   C * u3^2 = lambda * c,
/// ```
///
/// so `A x^2 + B y^2 + C z^2` represents `N` over the rationals iff
/// `a x^2 + b y^2 + c z^2` represents `N / lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedForm {
    pub a: Int,
    pub b: Int,
    pub c: Int,
    /// Positive rational scale factor.
    pub lambda: Rat,
    pub u1: Rat,
    pub u2: Rat,
    pub u3: Rat,
}

impl NormalizedForm {
    /// Wrap a triple that is already squarefree and pairwise coprime
    /// (`lambda = 1`, trivial rescaling).  Validates both properties.
    pub fn from_coprime_squarefree(a: Int, b: Int, c: Int) -> Result<Self> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(Error::DegenerateForm);
        }
        for v in [&a, &b, &c] {
            if !factorize(v)?.is_squarefree() {
                return Err(Error::PreconditionViolated(format!(
                    "coefficient {v} is not squarefree"
                )));
            }
        }
        for (x, y) in [(&a, &b), (&a, &c), (&b, &c)] {
            if !x.gcd(y).is_one() {
                return Err(Error::PreconditionViolated(format!(
                    "coefficients {x} and {y} are not coprime"
                )));
            }
        }
        Ok(NormalizedForm {
            a,
            b,
            c,
            lambda: Rat::one(),
            u1: Rat::one(),
            u2: Rat::one(),
            u3: Rat::one(),
        })
    }

    pub fn coefficients(&self) -> [&Int; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn abc(&self) -> Int {
        &self.a * &self.b * &self.c
    }

    pub fn as_diagonal(&self) -> DiagonalForm {
        DiagonalForm {
            a: Rat::from(self.a.clone()),
            b: Rat::from(self.b.clone()),
            c: Rat::from(self.c.clone()),
        }
    }
}

/// Intermediate quantities of the normalization pipeline, kept for the
/// congruence-class machinery: `d` is the common squarefree divisor, `d1,
/// d2, d3` the pairwise divisors, and `s` the squarefree part of the
/// coefficient product `A*B*C` (positive when the form is).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeDetail {
    pub d: Int,
    pub d1: Int,
    pub d2: Int,
    pub d3: Int,
    pub s: Int,
}

/// Reduce a diagonal form to squarefree pairwise-coprime integer
/// coefficients; see [`NormalizedForm`] for the exact transport identities.
pub fn normalize(f: &DiagonalForm) -> Result<NormalizedForm> {
    normalize_with_detail(f).map(|(n, _)| n)
}

/// [`normalize`] plus the pipeline intermediates.
pub fn normalize_with_detail(f: &DiagonalForm) -> Result<(NormalizedForm, NormalizeDetail)> {
    // Step 1: strip square parts.  A = a1 * ra^2 with a1 squarefree signed.
    let sa = squarefree_split(&f.a)?;
    let sb = squarefree_split(&f.b)?;
    let sc = squarefree_split(&f.c)?;
    let (a1, b1, c1) = (sa.core, sb.core, sc.core);

    // Step 2: pull out the common divisor, then the three pairwise divisors.
    let d = a1.gcd(&b1).gcd(&c1);
    let a2 = &a1 / &d;
    let b2 = &b1 / &d;
    let c2 = &c1 / &d;
    let d1 = a2.gcd(&b2);
    let d2 = a2.gcd(&c2);
    let d3 = b2.gcd(&c2);
    // a2, b2, c2 are squarefree, which forces d1, d2, d3 pairwise coprime.
    assert!(d1.gcd(&d2).is_one() && d1.gcd(&d3).is_one() && d2.gcd(&d3).is_one());
    let a3 = &a2 / (&d1 * &d2);
    let b3 = &b2 / (&d1 * &d3);
    let c3 = &c2 / (&d2 * &d3);

    // Step 3: redistribute the pairwise divisors.  The products below are
    // squarefree and pairwise coprime, and the whole form has been divided
    // by lambda = d*d1*d2*d3 > 0.
    let a = &a3 * &d3;
    let b = &b3 * &d2;
    let c = &c3 * &d1;
    let lambda = Rat::from(&d * &d1 * &d2 * &d3);
    let u1 = Rat::from(d3.clone()) / &sa.root;
    let u2 = Rat::from(d2.clone()) / &sb.root;
    let u3 = Rat::from(d1.clone()) / &sc.root;

    // The transport identities are exact; anything else is a bug.
    assert_eq!(&f.a * &u1 * &u1, &lambda * Rat::from(a.clone()));
    assert_eq!(&f.b * &u2 * &u2, &lambda * Rat::from(b.clone()));
    assert_eq!(&f.c * &u3 * &u3, &lambda * Rat::from(c.clone()));

    // Squarefree part of A*B*C.  It equals d*a3*b3*c3 up to sign.
    let s = squarefree_split(&(&f.a * &f.b * &f.c))?.core;
    debug_assert_eq!(s.abs(), (&d * &a3 * &b3 * &c3).abs());

    Ok((
        NormalizedForm {
            a,
            b,
            c,
            lambda,
            u1,
            u2,
            u3,
        },
        NormalizeDetail { d, d1, d2, d3, s },
    ))
}

/// Diagonalize a general form by congruence reduction: returns `(g, T)` with
/// `q(T v) = g(v)` identically.  When no diagonal entry is available the
/// reduction swaps variables or substitutes `x -> x + y` to create one.
pub fn diagonalize(q: &TernaryForm) -> Result<(DiagonalForm, Transform)> {
    let mut g = q.gram();
    let mut t = Transform::identity();

    for i in 0..3 {
        if g[i][i].is_zero() {
            if let Some(j) = ((i + 1)..3).find(|&j| !g[j][j].is_zero()) {
                swap_vars(&mut g, &mut t, i, j);
            } else if let Some(j) = ((i + 1)..3).find(|&j| !g[i][j].is_zero()) {
                // All remaining diagonal entries vanish; mixing in variable j
                // turns the cross term into a square: new g[i][i] = 2 g[i][j].
                add_var(&mut g, &mut t, i, j);
            } else {
                // Row i of the active block is zero: the form is singular.
                return Err(Error::DegenerateForm);
            }
        }
        for j in (i + 1)..3 {
            if !g[i][j].is_zero() {
                let f = &g[i][j] / &g[i][i];
                eliminate(&mut g, &mut t, i, j, &f);
            }
        }
    }

    let diag = DiagonalForm::new(g[0][0].clone(), g[1][1].clone(), g[2][2].clone())?;
    // g must now be exactly diagonal.
    debug_assert!(g[0][1].is_zero() && g[0][2].is_zero() && g[1][2].is_zero());
    Ok((diag, t))
}

fn zero3x3() -> [[Rat; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| Rat::zero()))
}

fn det3(m: &[[Rat; 3]; 3]) -> Rat {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

// The three congruence moves.  Each applies G -> E^T G E and T -> T E, so
// the invariant "current G = T^T G0 T" is maintained.

fn swap_vars(g: &mut [[Rat; 3]; 3], t: &mut Transform, i: usize, j: usize) {
    for row in g.iter_mut() {
        row.swap(i, j);
    }
    g.swap(i, j);
    for row in t.m.iter_mut() {
        row.swap(i, j);
    }
}

/// Column/row i += column/row j.
fn add_var(g: &mut [[Rat; 3]; 3], t: &mut Transform, i: usize, j: usize) {
    for r in 0..3 {
        let v = g[r][j].clone();
        g[r][i] += v;
    }
    for c in 0..3 {
        let v = g[j][c].clone();
        g[i][c] += v;
    }
    for row in t.m.iter_mut() {
        let v = row[j].clone();
        row[i] += v;
    }
}

/// Column/row j -= f * column/row i (clears the (i, j) cross entry).
fn eliminate(g: &mut [[Rat; 3]; 3], t: &mut Transform, i: usize, j: usize, f: &Rat) {
    for r in 0..3 {
        let v = &g[r][i] * f;
        g[r][j] -= v;
    }
    for c in 0..3 {
        let v = &g[i][c] * f;
        g[j][c] -= v;
    }
    for row in t.m.iter_mut() {
        let v = &row[i] * f;
        row[j] -= v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn ri(n: i64) -> Rat {
        Rat::from(Int::from(n))
    }

    #[test]
    fn evaluate_diagonal() {
        let f = DiagonalForm::from_ints(1, 1, 10).unwrap();
        assert_eq!(
            f.evaluate(&rat(1, 2), &rat(1, 2), &rat(1, 2)),
            ri(3)
        );
        let f = DiagonalForm::from_ints(2, 3, -5).unwrap();
        assert_eq!(f.evaluate(&ri(1), &ri(1), &ri(1)), ri(0));
    }

    #[test]
    fn evaluate_cross_terms() {
        // x^2 + 2xy + 3y^2 + z^2 at (1, 1, 2) = 1 + 2 + 3 + 4 = 10.
        let q = TernaryForm::new(ri(1), ri(3), ri(1), ri(2), ri(0), ri(0)).unwrap();
        assert_eq!(q.evaluate(&ri(1), &ri(1), &ri(2)), ri(10));
    }

    #[test]
    fn constructors_reject_degenerate_forms() {
        assert!(matches!(
            DiagonalForm::new(ri(1), ri(0), ri(3)),
            Err(Error::DegenerateForm)
        ));
        // x^2 + 2xy + y^2 = (x + y)^2 is singular.
        assert!(matches!(
            TernaryForm::new(ri(1), ri(1), ri(1), ri(2), ri(0), ri(0)),
            Err(Error::DegenerateForm)
        ));
    }

    #[test]
    fn diagonalize_completion_of_squares() {
        // x^2 + 2xy + 3y^2 + z^2 = (x + y)^2 + 2 y^2 + z^2.
        let q = TernaryForm::new(ri(1), ri(3), ri(1), ri(2), ri(0), ri(0)).unwrap();
        let (d, t) = diagonalize(&q).unwrap();
        assert_eq!((d.a.clone(), d.b.clone(), d.c.clone()), (ri(1), ri(2), ri(1)));
        let expected = Transform {
            m: [
                [ri(1), ri(-1), ri(0)],
                [ri(0), ri(1), ri(0)],
                [ri(0), ri(0), ri(1)],
            ],
        };
        assert_eq!(t, expected);
    }

    #[test]
    fn diagonalize_no_square_term() {
        // xy + z^2 has no x^2 or y^2 term; the reduction has to mix
        // variables.  Any valid output satisfies q(T v) = diag(v).
        let q = TernaryForm::new(ri(0), ri(0), ri(1), ri(1), ri(0), ri(0)).unwrap();
        let (d, t) = diagonalize(&q).unwrap();
        assert!(!d.a.is_zero() && !d.b.is_zero() && !d.c.is_zero());
        // Signature must be (+, +, -) in some order: det < 0 for xy + z^2.
        let negatives = [&d.a, &d.b, &d.c]
            .iter()
            .filter(|v| v.is_negative())
            .count();
        assert_eq!(negatives, 1);
        check_roundtrip(&q, &d, &t);
    }

    #[test]
    fn diagonalize_keeps_diagonal_forms_fixed() {
        let q = TernaryForm::from_diagonal(&DiagonalForm::from_ints(1, 1, 10).unwrap());
        let (d, t) = diagonalize(&q).unwrap();
        assert_eq!((d.a.clone(), d.b.clone(), d.c.clone()), (ri(1), ri(1), ri(10)));
        assert_eq!(t, Transform::identity());
    }

    /// q(T v) == d(v) on a deterministic grid of rational points.
    fn check_roundtrip(q: &TernaryForm, d: &DiagonalForm, t: &Transform) {
        for (i, j, k) in [
            (1i64, 0i64, 0i64),
            (0, 1, 0),
            (0, 0, 1),
            (1, 1, 0),
            (1, 0, 1),
            (0, 1, 1),
            (1, 1, 1),
            (2, -3, 5),
            (-1, 7, 2),
        ] {
            let (v1, v2, v3) = (rat(i, 2), rat(j, 3), rat(k, 1));
            let (x, y, z) = t.apply(&v1, &v2, &v3);
            assert_eq!(q.evaluate(&x, &y, &z), d.evaluate(&v1, &v2, &v3));
        }
    }

    #[test]
    fn normalize_redistributes_divisors() {
        // 2 x^2 + 6 y^2 + 15 z^2: d = 1, pairwise divisors (2, 1, 3) feed
        // the output (3, 1, 10) with lambda = 6.
        let f = DiagonalForm::from_ints(2, 6, 15).unwrap();
        let (n, detail) = normalize_with_detail(&f).unwrap();
        assert_eq!((n.a.clone(), n.b.clone(), n.c.clone()),
                   (Int::from(3), Int::from(1), Int::from(10)));
        assert_eq!(n.lambda, ri(6));
        assert_eq!((n.u1.clone(), n.u2.clone(), n.u3.clone()), (ri(3), ri(1), ri(2)));
        assert_eq!(detail.d, Int::from(1));
        assert_eq!(
            (detail.d1, detail.d2, detail.d3),
            (Int::from(2), Int::from(1), Int::from(3))
        );
        assert_eq!(detail.s, Int::from(5)); // 180 = 6^2 * 5
    }

    #[test]
    fn normalize_is_identity_on_normalized_input() {
        let f = DiagonalForm::from_ints(1, 1, 10).unwrap();
        let n = normalize(&f).unwrap();
        assert_eq!((n.a, n.b, n.c), (Int::from(1), Int::from(1), Int::from(10)));
        assert_eq!(n.lambda, ri(1));
        assert_eq!((n.u1, n.u2, n.u3), (ri(1), ri(1), ri(1)));
    }

    #[test]
    fn normalize_strips_rational_squares() {
        // (1/2) x^2 + 3 y^2 + 5 z^2: 1/2 = 2 * (1/2)^2.
        let f = DiagonalForm::new(rat(1, 2), ri(3), ri(5)).unwrap();
        let n = normalize(&f).unwrap();
        assert_eq!((n.a, n.b, n.c), (Int::from(2), Int::from(3), Int::from(5)));
        assert_eq!(n.lambda, ri(1));
        assert_eq!((n.u1, n.u2, n.u3), (ri(2), ri(1), ri(1)));
    }

    #[test]
    fn normalize_handles_signs() {
        // Negative coefficients stay in the cores; lambda stays positive.
        let f = DiagonalForm::from_ints(-4, 6, -10).unwrap();
        let n = normalize(&f).unwrap();
        assert!(n.lambda.is_positive());
        assert!(n.a.is_negative());
        assert!(!n.abc().is_zero());
    }

    #[test]
    fn normalized_form_validation() {
        assert!(NormalizedForm::from_coprime_squarefree(
            Int::from(1),
            Int::from(1),
            Int::from(10)
        )
        .is_ok());
        // 4 is not squarefree.
        assert!(NormalizedForm::from_coprime_squarefree(
            Int::from(4),
            Int::from(1),
            Int::from(3)
        )
        .is_err());
        // 6 and 10 share a factor.
        assert!(NormalizedForm::from_coprime_squarefree(
            Int::from(6),
            Int::from(10),
            Int::from(1)
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn normalize_identities_hold(
            an in -30i64..30, ad in 1i64..6,
            bn in -30i64..30, bd in 1i64..6,
            cn in -30i64..30, cd in 1i64..6,
        ) {
            prop_assume!(an != 0 && bn != 0 && cn != 0);
            let f = DiagonalForm::new(rat(an, ad), rat(bn, bd), rat(cn, cd)).unwrap();
            let n = normalize(&f).unwrap();

            prop_assert!(n.lambda.is_positive());
            prop_assert!(n.u1.is_positive() && n.u2.is_positive() && n.u3.is_positive());
            // Exact transport identities.
            prop_assert_eq!(&f.a * &n.u1 * &n.u1, &n.lambda * Rat::from(n.a.clone()));
            prop_assert_eq!(&f.b * &n.u2 * &n.u2, &n.lambda * Rat::from(n.b.clone()));
            prop_assert_eq!(&f.c * &n.u3 * &n.u3, &n.lambda * Rat::from(n.c.clone()));
            // Output is squarefree and pairwise coprime; re-wrapping it
            // through the validating constructor checks both.
            prop_assert!(NormalizedForm::from_coprime_squarefree(
                n.a.clone(), n.b.clone(), n.c.clone()
            ).is_ok());

            // Idempotence: normalizing the output is the identity.
            let again = normalize(&n.as_diagonal()).unwrap();
            prop_assert_eq!(&again.a, &n.a);
            prop_assert_eq!(&again.b, &n.b);
            prop_assert_eq!(&again.c, &n.c);
            prop_assert_eq!(again.lambda, Rat::one());
        }

        #[test]
        fn diagonalize_roundtrip(
            q11 in -6i64..7, q22 in -6i64..7, q33 in -6i64..7,
            q12 in -6i64..7, q13 in -6i64..7, q23 in -6i64..7,
        ) {
            let q = TernaryForm {
                q11: ri(q11), q22: ri(q22), q33: ri(q33),
                q12: ri(q12), q13: ri(q13), q23: ri(q23),
            };
            prop_assume!(!q.det().is_zero());
            let (d, t) = diagonalize(&q).unwrap();
            prop_assert!(!t.det().is_zero());
            check_roundtrip(&q, &d, &t);
        }
    }
}
