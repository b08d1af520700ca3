//! Coefficient reduction for linear rows over bounded integer variables.
//!
//! Given a row `w` and a box parameter `delta`, [`reduce_vector`] produces
//! an integer row `w_bar` whose entries are bounded in terms of the
//! dimension and `delta` only, such that `sign(w . x) = sign(w_bar . x)`
//! for every integer `x` with `|x|_1 <= delta - 1`. [`reduce_row`] extends
//! this to one-sided rows: `w . x <= b` holds exactly when
//! `w_bar . x <= b_bar` over the whole box `[-delta, delta]^N`. The point
//! is that `b` may be astronomically large while `b_bar` is not.
//!
//! The construction is recursive rounding through simultaneous Diophantine
//! approximation: normalize the row, approximate it by `p/q` with a common
//! small denominator found by lattice basis reduction, recurse on the
//! (strictly smaller-support) remainder, and combine the rounds with a base
//! `C` large enough that earlier rounds dominate later ones. Everything
//! runs in exact rational arithmetic.

use crate::arith::{int, int_pow, to_rat, Int, Rat};
use crate::guard::Guards;
use crate::{Error, Result};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// How a reduced row was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    /// The rounding construction via lattice basis reduction.
    Lattice,
    /// Exhaustive search for a small equivalent row, each candidate checked
    /// against the full box. Only viable when the box is enumerable.
    VerifiedSearch,
}

/// A reduced one-sided row equivalent to the input over `[-delta, delta]^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedRow {
    #[serde(with = "crate::io::int_vec")]
    pub w_bar: Vec<Int>,
    #[serde(with = "crate::io::int_scalar")]
    pub b_bar: Int,
    /// Largest coefficient magnitude actually achieved (including `b_bar`).
    #[serde(with = "crate::io::int_scalar")]
    pub magnitude_bound: Int,
    pub mode: ReductionMode,
}

/// Outcome of an exhaustive sign or equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCheck {
    pub holds: bool,
    /// First point violating the property, in enumeration order.
    pub counterexample: Option<Vec<Int>>,
}

impl SignCheck {
    fn ok() -> Self {
        SignCheck { holds: true, counterexample: None }
    }
    fn bad(x: Vec<Int>) -> Self {
        SignCheck { holds: false, counterexample: Some(x) }
    }
}

fn vec_max_abs(v: &[Int]) -> Int {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Int::zero)
}

/// The coefficient budget this implementation guarantees for
/// [`reduce_vector`] in dimension `n` with parameter `delta`:
/// `(n*delta + 1)^((n+1)^3)`. For [`reduce_row`] on `N` variables the
/// internal call runs in dimension `N + 1` with parameter `N*delta + 2`.
pub fn declared_budget(n: usize, delta: &Int) -> Int {
    let base = Int::from(n as u64) * delta + 1;
    let exp = (n as u64 + 1).pow(3);
    int_pow(&base, exp)
}

/// Reduces `w` so that `sign(w . x) = sign(w_bar . x)` for all integer `x`
/// with `|x|_1 <= delta - 1`. Zero entries stay zero and every entry keeps
/// its sign. The output magnitude stays within [`declared_budget`].
pub fn reduce_vector(w: &[Int], delta: &Int) -> Result<Vec<Int>> {
    if !delta.is_positive() {
        return Err(Error::invalid(format!("box parameter {delta} is not positive")));
    }
    let n = w.len();
    if n == 0 || w.iter().all(Zero::is_zero) {
        return Ok(w.to_vec());
    }
    // delta = 1 tests only x = 0; the sign vector settles the per-entry
    // pattern and is as small as it gets.
    if delta.is_one() {
        return Ok(w.iter().map(Int::signum).collect());
    }
    // Entries this small cannot be improved by the machinery.
    let trivial_cap = int(2) * Int::from(n as u64) * delta;
    if vec_max_abs(w) <= trivial_cap {
        return Ok(w.to_vec());
    }

    // One approximation round per support shrink: normalize, approximate by
    // p/q with |q*v - p| <= 1/big_q, recurse on the remainder. The largest
    // coordinate becomes exact, so at most n rounds happen.
    let big_q = int(2) * Int::from(n as u64) * delta;
    let eps = Rat::new(Int::one(), big_q.clone());
    let mut remainder: Vec<Rat> = w.iter().map(to_rat).collect();
    let mut rounds: Vec<Vec<Int>> = Vec::new();
    while remainder.iter().any(|r| !r.is_zero()) {
        if rounds.len() == n {
            return Err(Error::contract("approximation did not shrink the support".to_string()));
        }
        let norm = remainder.iter().map(|r| r.abs()).max().unwrap();
        let v: Vec<Rat> = remainder.iter().map(|r| r / &norm).collect();
        let (p, q) = approximate(&v, &eps)?;
        let q_rat = to_rat(&q);
        remainder = v
            .iter()
            .zip(&p)
            .map(|(vi, pi)| vi * &q_rat - to_rat(pi))
            .collect();
        for (r, vi) in remainder.iter().zip(&v) {
            if r.abs() > eps {
                return Err(Error::contract("approximation residue exceeds tolerance".to_string()));
            }
            if vi.is_zero() && !r.is_zero() {
                return Err(Error::contract("approximation disturbed a zero entry".to_string()));
            }
        }
        rounds.push(p);
    }

    // Combine rounds with a base big enough that the first nonzero round
    // decides every tested sign: |p . x| <= |p|_inf * (delta - 1) < base.
    let p_norm = rounds.iter().map(|p| vec_max_abs(p)).max().unwrap();
    let base = (delta - 1) * p_norm + 1;
    let mut out = vec![Int::zero(); n];
    for p in &rounds {
        for (acc, pi) in out.iter_mut().zip(p) {
            *acc = &*acc * &base + pi;
        }
    }
    for (a, b) in out.iter().zip(w) {
        if a.signum() != b.signum() {
            return Err(Error::contract("reduction flipped an entry sign".to_string()));
        }
    }
    if vec_max_abs(&out) > declared_budget(n, delta) {
        return Err(Error::contract("reduction exceeded its declared budget".to_string()));
    }
    Ok(out)
}

/// Reduces the one-sided row `w . x <= b` to an equivalent row over the box
/// `[-delta, delta]^N`, via [`reduce_vector`] on the stacked vector `(w, b)`
/// with parameter `N*delta + 2`: for `x` in the box, `(x, -1)` has 1-norm
/// at most `N*delta + 1`, so the sign of `w . x - b` is preserved.
pub fn reduce_row(w: &[Int], b: &Int, delta: &Int) -> Result<ReducedRow> {
    if !delta.is_positive() {
        return Err(Error::invalid(format!("box parameter {delta} is not positive")));
    }
    let n = w.len();
    let delta_ft = Int::from(n as u64) * delta + 2;
    let mut stacked = w.to_vec();
    stacked.push(b.clone());
    let mut bar = reduce_vector(&stacked, &delta_ft)?;
    let b_bar = bar.pop().unwrap();
    let achieved = vec_max_abs(&bar).max(b_bar.abs());
    if achieved > declared_budget(n + 1, &delta_ft) {
        return Err(Error::contract("row reduction exceeded its declared budget".to_string()));
    }
    Ok(ReducedRow { w_bar: bar, b_bar, magnitude_bound: achieved, mode: ReductionMode::Lattice })
}

/// Like [`reduce_row`], but in the requested mode. The search mode tries
/// candidate rows shell by shell of growing magnitude, accepting the first
/// one that is exhaustively equivalent over the box; the identity row
/// guarantees termination when the work guard allows reaching it.
pub fn reduce_row_with(
    w: &[Int],
    b: &Int,
    delta: &Int,
    mode: ReductionMode,
    guards: &Guards,
) -> Result<ReducedRow> {
    match mode {
        ReductionMode::Lattice => reduce_row(w, b, delta),
        ReductionMode::VerifiedSearch => search_row(w, b, delta, guards),
    }
}

/// Exhaustive sign-preservation check of [`reduce_vector`]'s contract over
/// the 1-norm ball `|x|_1 <= delta - 1`, in enumeration order (per
/// coordinate 0, 1, -1, 2, -2, ..., later coordinates varying fastest).
pub fn verify_sign_preservation(
    w: &[Int],
    w_bar: &[Int],
    delta: &Int,
    guards: &Guards,
) -> Result<SignCheck> {
    if w.len() != w_bar.len() {
        return Err(Error::invalid("rows differ in dimension".to_string()));
    }
    check_box_guard(w.len(), delta, guards)?;
    let radius = delta - 1;
    let mut x = vec![Int::zero(); w.len()];
    let check = |x: &[Int]| crate::arith::dot(w, x).signum() == crate::arith::dot(w_bar, x).signum();
    Ok(match walk_ball(&mut x, 0, &radius, &check) {
        None => SignCheck::ok(),
        Some(cx) => SignCheck::bad(cx),
    })
}

/// Exhaustive equivalence check of [`reduce_row`]'s contract over the box
/// `[-delta, delta]^N`, same enumeration order as
/// [`verify_sign_preservation`].
pub fn verify_row_equivalence(
    w: &[Int],
    b: &Int,
    w_bar: &[Int],
    b_bar: &Int,
    delta: &Int,
    guards: &Guards,
) -> Result<SignCheck> {
    if w.len() != w_bar.len() {
        return Err(Error::invalid("rows differ in dimension".to_string()));
    }
    check_box_guard(w.len(), delta, guards)?;
    let mut x = vec![Int::zero(); w.len()];
    let check =
        |x: &[Int]| (crate::arith::dot(w, x) <= *b) == (crate::arith::dot(w_bar, x) <= *b_bar);
    Ok(match walk_box(&mut x, 0, delta, &check) {
        None => SignCheck::ok(),
        Some(cx) => SignCheck::bad(cx),
    })
}

fn check_box_guard(n: usize, delta: &Int, guards: &Guards) -> Result<()> {
    let side = int(2) * delta + 1;
    let points = int_pow(&side, n as u64);
    guards.check(
        "sign check points",
        points.to_u64().unwrap_or(u64::MAX),
        guards.sign_check_points,
    )
}

/// Coordinate values in check order: 0, 1, -1, 2, -2, ...
fn fanned(limit: &Int) -> Vec<Int> {
    let mut vals = vec![Int::zero()];
    let mut v = Int::one();
    while v <= *limit {
        vals.push(v.clone());
        vals.push(-&v);
        v += 1;
    }
    vals
}

fn walk_ball(
    x: &mut Vec<Int>,
    i: usize,
    budget: &Int,
    check: &impl Fn(&[Int]) -> bool,
) -> Option<Vec<Int>> {
    if i == x.len() {
        return if check(x) { None } else { Some(x.clone()) };
    }
    for v in fanned(budget) {
        let rest = budget - v.abs();
        x[i] = v;
        if let Some(cx) = walk_ball(x, i + 1, &rest, check) {
            return Some(cx);
        }
    }
    x[i] = Int::zero();
    None
}

fn walk_box(
    x: &mut Vec<Int>,
    i: usize,
    delta: &Int,
    check: &impl Fn(&[Int]) -> bool,
) -> Option<Vec<Int>> {
    if i == x.len() {
        return if check(x) { None } else { Some(x.clone()) };
    }
    for v in fanned(delta) {
        x[i] = v;
        if let Some(cx) = walk_box(x, i + 1, delta, check) {
            return Some(cx);
        }
    }
    x[i] = Int::zero();
    None
}

/// Shell search used by [`ReductionMode::VerifiedSearch`]: all candidate
/// rows `(w_bar, b_bar)` of max-norm exactly `M` for `M = 0, 1, ...`, each
/// verified over the full box. Work is guarded by the total number of box
/// evaluations.
fn search_row(w: &[Int], b: &Int, delta: &Int, guards: &Guards) -> Result<ReducedRow> {
    if !delta.is_positive() {
        return Err(Error::invalid(format!("box parameter {delta} is not positive")));
    }
    check_box_guard(w.len(), delta, guards)?;
    let side = int(2) * delta + 1;
    let box_points = int_pow(&side, w.len() as u64)
        .to_u64()
        .unwrap_or(u64::MAX);
    let mut work: u64 = 0;
    let input_norm = vec_max_abs(w).max(b.abs());
    let mut shell = Int::zero();
    while shell <= input_norm {
        let mut candidate = vec![-&shell; w.len() + 1];
        loop {
            if vec_max_abs(&candidate) == shell {
                work = work.saturating_add(box_points);
                guards.check("sign check points", work, guards.sign_check_points)?;
                let (wb, bb) = candidate.split_at(w.len());
                let found =
                    verify_row_equivalence(w, b, wb, &bb[0], delta, guards)?;
                if found.holds {
                    return Ok(ReducedRow {
                        w_bar: wb.to_vec(),
                        b_bar: bb[0].clone(),
                        magnitude_bound: shell,
                        mode: ReductionMode::VerifiedSearch,
                    });
                }
            }
            // Odometer step over [-shell, shell]^(N+1).
            let mut i = candidate.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if candidate[i] < shell {
                    candidate[i] += 1;
                    for c in candidate.iter_mut().skip(i + 1) {
                        *c = -&shell;
                    }
                    break;
                }
            }
            if i == 0 && candidate[0] == shell && candidate.iter().skip(1).all(|c| *c == shell) {
                break;
            }
        }
        shell += 1;
    }
    // The identity candidate was in the last shell, so this is unreachable
    // unless the guard rejected earlier.
    Err(Error::contract("search exhausted all shells without a match".to_string()))
}

/// Simultaneous Diophantine approximation: for `v` with `|v|_inf <= 1` find
/// integers `p`, `q > 0` with `|q*v - p|_inf <= eps` and `q` at most
/// `2^ceil(n(n+1)/4) * (1/eps)^n`, via basis reduction on the standard
/// approximation lattice.
fn approximate(v: &[Rat], eps: &Rat) -> Result<(Vec<Int>, Int)> {
    let n = v.len();
    // det = eps^(n+1) / 2^ceil(n(n+1)/4) makes the reduced basis's first
    // vector shorter than eps in 2-norm.
    let two_exp = int_pow(&int(2), ((n * (n + 1) + 3) / 4) as u64);
    let mut det = Rat::one();
    for _ in 0..=n {
        det *= eps;
    }
    let beta = det / to_rat(&two_exp);

    let mut basis: Vec<Vec<Rat>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row = vec![Rat::zero(); n + 1];
        row[i] = Rat::one();
        basis.push(row);
    }
    let mut last: Vec<Rat> = v.iter().map(|vi| -vi).collect();
    last.push(beta.clone());
    basis.push(last);

    lll::reduce(&mut basis);
    let y = &basis[0];

    let q_rat = &y[n] / &beta;
    if !crate::arith::rat_is_int(&q_rat) {
        return Err(Error::contract("approximation denominator is not integral".to_string()));
    }
    let mut q = q_rat.to_integer();
    if q.is_zero() {
        return Err(Error::contract("approximation found a zero denominator".to_string()));
    }
    let flip = q.is_negative();
    if flip {
        q = -q;
    }
    let q_rat = to_rat(&q);
    let mut p = Vec::with_capacity(n);
    for (yi, vi) in y.iter().zip(v) {
        let yi = if flip { -yi } else { yi.clone() };
        let pi = yi + vi * &q_rat;
        if !crate::arith::rat_is_int(&pi) {
            return Err(Error::contract("approximation numerator is not integral".to_string()));
        }
        if (vi * &q_rat - to_rat(&pi.to_integer())).abs() > *eps {
            return Err(Error::contract("approximation misses its tolerance".to_string()));
        }
        p.push(pi.to_integer());
    }
    Ok((p, q))
}

/// Exact-rational lattice basis reduction.
mod lll {
    use crate::arith::{rat, rat_floor, Rat};
    use num_traits::Zero;

    fn dot(a: &[Rat], b: &[Rat]) -> Rat {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Nearest integer, as a rational.
    fn round(r: &Rat) -> Rat {
        Rat::from(rat_floor(&(r + rat(1, 2))))
    }

    /// Gram-Schmidt coefficients and squared norms of the orthogonalized
    /// rows. Rows must be linearly independent.
    fn gso(basis: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let d = basis.len();
        let mut mu = vec![vec![Rat::zero(); d]; d];
        let mut star: Vec<Vec<Rat>> = Vec::with_capacity(d);
        let mut norms: Vec<Rat> = Vec::with_capacity(d);
        for i in 0..d {
            let mut v = basis[i].clone();
            for j in 0..i {
                let m = dot(&basis[i], &star[j]) / &norms[j];
                for (a, b) in v.iter_mut().zip(&star[j]) {
                    *a -= &m * b;
                }
                mu[i][j] = m;
            }
            let n2 = dot(&v, &v);
            assert!(!n2.is_zero(), "dependent rows in basis reduction");
            star.push(v);
            norms.push(n2);
        }
        (mu, norms)
    }

    /// In-place reduction with the classic parameter 3/4. The first output
    /// row has 2-norm at most `2^((d-1)/4) * det^(1/d)`.
    pub fn reduce(basis: &mut [Vec<Rat>]) {
        let d = basis.len();
        if d <= 1 {
            return;
        }
        let delta = rat(3, 4);
        let mut k = 1;
        while k < d {
            for j in (0..k).rev() {
                let (mu, _) = gso(basis);
                let m = round(&mu[k][j]);
                if !m.is_zero() {
                    let row = basis[j].clone();
                    for (a, b) in basis[k].iter_mut().zip(&row) {
                        *a -= &m * b;
                    }
                }
            }
            let (mu, norms) = gso(basis);
            let lhs = &norms[k];
            let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
            if *lhs >= rhs {
                k += 1;
            } else {
                basis.swap(k - 1, k);
                k = k.max(2) - 1;
            }
        }
    }

    #[cfg(test)]
    mod tests {
        use super::*;
        use crate::arith::{int, to_rat};
        use num_traits::Signed;

        fn rows(data: &[&[i64]]) -> Vec<Vec<Rat>> {
            data.iter()
                .map(|r| r.iter().map(|v| to_rat(&int(*v))).collect())
                .collect()
        }

        #[test]
        fn reduces_the_textbook_basis() {
            // Classic example: (1, 1, 1), (-1, 0, 2), (3, 5, 6) reduces to
            // short vectors like (0, 1, 0) and (1, 0, 1).
            let mut b = rows(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
            reduce(&mut b);
            let norm1 = dot(&b[0], &b[0]);
            assert!(norm1 <= rat(1, 1), "first vector too long: {norm1}");
        }

        #[test]
        fn size_reduction_keeps_mu_small() {
            let mut b = rows(&[&[201, 37], &[1648, 297]]);
            reduce(&mut b);
            let (mu, _) = gso(&b);
            assert!(mu[1][0].abs() <= rat(1, 2));
        }

        #[test]
        fn first_vector_meets_the_determinant_bound_squared() {
            let mut b = rows(&[&[12, 0, 1], &[0, 15, 1], &[0, 0, 17]]);
            let det = rat(12 * 15 * 17, 1);
            reduce(&mut b);
            // |b1|^2 <= 2^(d-1) * det^(2/d) squared form, d = 3:
            // |b1|^6 <= 2^6 * det^2.
            let n2 = dot(&b[0], &b[0]);
            let lhs = &n2 * &n2 * &n2;
            let rhs = rat(64, 1) * &det * &det;
            assert!(lhs <= rhs, "{lhs} > {rhs}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;

    fn guards() -> Guards {
        Guards::default()
    }

    #[test]
    fn tiny_rows_pass_through_unchanged() {
        let w = int_vec(&[1, 2]);
        assert_eq!(reduce_vector(&w, &int(3)).unwrap(), w);
        let row = reduce_row(&w, &int(2), &int(3)).unwrap();
        let check =
            verify_row_equivalence(&w, &int(2), &row.w_bar, &row.b_bar, &int(3), &guards())
                .unwrap();
        assert!(check.holds, "counterexample {:?}", check.counterexample);
    }

    #[test]
    fn zeros_stay_zero_and_signs_survive() {
        let w = int_vec(&[0, 5]);
        let bar = reduce_vector(&w, &int(2)).unwrap();
        assert!(bar[0].is_zero());
        assert!(bar[1].is_positive());
        let w = int_vec(&[0, 5_000_000]);
        let bar = reduce_vector(&w, &int(2)).unwrap();
        assert!(bar[0].is_zero());
        assert!(bar[1].is_positive());
    }

    #[test]
    fn large_entries_shrink() {
        let w = int_vec(&[1_000_000, 1]);
        let bar = reduce_vector(&w, &int(2)).unwrap();
        assert!(bar[0].is_positive());
        assert!(bar[1].is_positive());
        assert!(vec_max_abs(&bar) < int(1_000_000), "no reduction: {bar:?}");
        let check = verify_sign_preservation(&w, &bar, &int(2), &guards()).unwrap();
        assert!(check.holds, "counterexample {:?}", check.counterexample);
    }

    #[test]
    fn reduced_rows_stay_equivalent_even_with_huge_rhs() {
        let w = int_vec(&[7_000_000, -3_000_001, 2]);
        let b = int(13_999_999);
        let delta = int(3);
        let row = reduce_row(&w, &b, &delta).unwrap();
        assert_eq!(row.mode, ReductionMode::Lattice);
        assert!(row.magnitude_bound < int(7_000_000));
        let check = verify_row_equivalence(&w, &b, &row.w_bar, &row.b_bar, &delta, &guards())
            .unwrap();
        assert!(check.holds, "counterexample {:?}", check.counterexample);
    }

    #[test]
    fn equalities_reduce_by_preserving_the_full_sign() {
        // sign(w.x - b) survives, so both <= directions hold at once.
        let w = int_vec(&[5_000_000, 1]);
        let b = int(5_000_001);
        let delta = int(2);
        let row = reduce_row(&w, &b, &delta).unwrap();
        let mut x = vec![Int::zero(); 2];
        let check = |x: &[Int]| {
            (crate::arith::dot(&w, x) == b) == (crate::arith::dot(&row.w_bar, x) == row.b_bar)
        };
        assert!(walk_box(&mut x, 0, &delta, &check).is_none());
        // The equality point x = (1, 1) must stay an equality point.
        let x = int_vec(&[1, 1]);
        assert_eq!(crate::arith::dot(&row.w_bar, &x), row.b_bar);
    }

    #[test]
    fn identity_check_always_holds() {
        let w = int_vec(&[2, -3]);
        let check = verify_sign_preservation(&w, &w, &int(3), &guards()).unwrap();
        assert!(check.holds);
    }

    #[test]
    fn sign_flip_is_caught_on_the_first_unit_vector() {
        let w = int_vec(&[1, 1]);
        let bad = int_vec(&[1, -1]);
        let check = verify_sign_preservation(&w, &bad, &int(2), &guards()).unwrap();
        assert!(!check.holds);
        assert_eq!(check.counterexample, Some(int_vec(&[0, 1])));
    }

    #[test]
    fn mixed_sign_rows_get_a_full_ball_check() {
        let w = int_vec(&[2, -3]);
        let cand = int_vec(&[1, -1]);
        // x = (2, 1): 4 - 3 = 1 > 0 vs 2 - 1 = 1 > 0 agrees, but
        // x = (1, 1): -1 < 0 vs 0 disagrees, so the full check decides.
        let check = verify_sign_preservation(&w, &cand, &int(3), &guards()).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn box_guard_rejects_oversized_checks() {
        let w = vec![Int::zero(); 8];
        let err = verify_sign_preservation(&w, &w, &int(4), &guards()).unwrap_err();
        assert!(matches!(err, Error::Guard(_)), "{err}");
    }

    #[test]
    fn verified_search_finds_a_small_equivalent_row() {
        let w = int_vec(&[1_000_000, 1]);
        let b = int(1_000_000);
        let delta = int(1);
        let row =
            reduce_row_with(&w, &b, &delta, ReductionMode::VerifiedSearch, &guards()).unwrap();
        assert_eq!(row.mode, ReductionMode::VerifiedSearch);
        assert!(row.magnitude_bound <= int(1), "search result too big: {row:?}");
        let check = verify_row_equivalence(&w, &b, &row.w_bar, &row.b_bar, &delta, &guards())
            .unwrap();
        assert!(check.holds);
    }

    #[test]
    fn second_reduction_agrees_with_the_first() {
        let w = int_vec(&[9_999_991, -8_888_881]);
        let b = int(1_111_110);
        let delta = int(2);
        let once = reduce_row(&w, &b, &delta).unwrap();
        let twice = reduce_row(&once.w_bar, &once.b_bar, &delta).unwrap();
        let check = verify_row_equivalence(
            &once.w_bar,
            &once.b_bar,
            &twice.w_bar,
            &twice.b_bar,
            &delta,
            &guards(),
        )
        .unwrap();
        assert!(check.holds, "counterexample {:?}", check.counterexample);
    }

    #[test]
    fn budgets_grow_with_dimension_and_box() {
        assert!(declared_budget(2, &int(3)) < declared_budget(3, &int(3)));
        assert!(declared_budget(2, &int(3)) < declared_budget(2, &int(4)));
        // Achieved magnitudes are recorded and stay within the declaration.
        let w = int_vec(&[123_456_789, -987_654_321]);
        let b = int(55);
        let delta = int(2);
        let row = reduce_row(&w, &b, &delta).unwrap();
        let delta_ft = int(2) * delta.clone() + 2;
        assert!(row.magnitude_bound <= declared_budget(3, &delta_ft));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            #[test]
            fn random_rows_reduce_equivalently(
                w in proptest::collection::vec(-1_000_000i64..=1_000_000, 1..=3),
                b in -2_000_000i64..=2_000_000,
                delta in 1i64..=3,
            ) {
                let w: Vec<Int> = w.iter().map(|v| int(*v)).collect();
                let b = int(b);
                let delta = int(delta);
                let row = reduce_row(&w, &b, &delta).unwrap();
                let check = verify_row_equivalence(
                    &w, &b, &row.w_bar, &row.b_bar, &delta, &Guards::default(),
                ).unwrap();
                prop_assert!(check.holds, "counterexample {:?}", check.counterexample);
                let n = w.len();
                let delta_ft = Int::from(n as u64) * &delta + 2;
                prop_assert!(row.magnitude_bound <= declared_budget(n + 1, &delta_ft));
            }

            #[test]
            fn random_vectors_preserve_signs_on_the_ball(
                w in proptest::collection::vec(-100_000i64..=100_000, 1..=3),
                delta in 1i64..=4,
            ) {
                let w: Vec<Int> = w.iter().map(|v| int(*v)).collect();
                let delta = int(delta);
                let bar = reduce_vector(&w, &delta).unwrap();
                let check =
                    verify_sign_preservation(&w, &bar, &delta, &Guards::default()).unwrap();
                prop_assert!(check.holds, "counterexample {:?}", check.counterexample);
                for (a, b) in bar.iter().zip(&w) {
                    prop_assert_eq!(a.signum(), b.signum());
                }
            }
        }
    }
}
