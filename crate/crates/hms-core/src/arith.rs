//! Arbitrary-precision integer and rational aliases plus small helpers.
//!
//! Solver paths never touch floating point: integers are [`Int`]
//! (`num_bigint::BigInt`) and fractions are [`Rat`]
//! (`num_rational::BigRational`, always kept in canonical form with a
//! positive denominator by the backing crate).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand for small integer literals.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for vectors of small integer literals.
pub fn int_vec(vs: &[i64]) -> Vec<Int> {
    vs.iter().map(|&v| Int::from(v)).collect()
}

/// `a mod b` with a result in `[0, b)` for `b > 0`.
pub fn mod_floor(a: &Int, b: &Int) -> Int {
    num_integer::Integer::mod_floor(a, b)
}

/// Shorthand for small rational literals; panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// Embeds an integer into the rationals.
pub fn to_rat(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// `ceil(a / b)` for integers, `b > 0`.
pub fn ceil_div(a: &Int, b: &Int) -> Int {
    assert!(b.is_positive(), "ceil_div requires a positive divisor");
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.is_zero() || a.is_negative() {
        q
    } else {
        q + 1u8
    }
}

/// `floor(a / b)` for integers, `b > 0`.
pub fn floor_div(a: &Int, b: &Int) -> Int {
    assert!(b.is_positive(), "floor_div requires a positive divisor");
    num_integer::Integer::div_floor(a, b)
}

/// Largest integer `<= r`.
pub fn rat_floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

/// Smallest integer `>= r`.
pub fn rat_ceil(r: &Rat) -> Int {
    r.ceil().to_integer()
}

/// True if `r` is an integer.
pub fn rat_is_int(r: &Rat) -> bool {
    r.denom().is_one()
}

/// `max(abs(entry))` over a matrix, `0` for an empty matrix.
pub fn max_abs(rows: &[Vec<Int>]) -> Int {
    let mut best = Int::zero();
    for row in rows {
        for v in row {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
    }
    best
}

/// `base^exp` for a big base and machine-sized exponent.
pub fn int_pow(base: &Int, exp: u64) -> Int {
    let mut acc = Int::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Number of bits in `|v|`; `bit_len(0) == 0`.
pub fn bit_len(v: &Int) -> u64 {
    v.abs().bits()
}

/// Binomial coefficient `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

/// Sum of an integer slice.
pub fn sum(values: &[Int]) -> Int {
    values.iter().fold(Int::zero(), |acc, v| acc + v)
}

/// Inner product of two equally long integer slices.
pub fn dot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Int::zero(), |acc, (x, y)| acc + x * y)
}

/// Inner product of a rational and an integer slice.
pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * to_rat(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_and_floor_division() {
        assert_eq!(ceil_div(&int(7), &int(2)), int(4));
        assert_eq!(ceil_div(&int(8), &int(2)), int(4));
        assert_eq!(ceil_div(&int(-7), &int(2)), int(-3));
        assert_eq!(floor_div(&int(7), &int(2)), int(3));
        assert_eq!(floor_div(&int(-7), &int(2)), int(-4));
    }

    #[test]
    fn powers_and_binomials() {
        assert_eq!(int_pow(&int(15), 5), int(759375));
        assert_eq!(int_pow(&int(3), 0), int(1));
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(2, 1), int(2));
        assert_eq!(binomial(3, 5), int(0));
    }

    #[test]
    fn rational_rounding() {
        assert_eq!(rat_floor(&rat(7, 2)), int(3));
        assert_eq!(rat_ceil(&rat(7, 2)), int(4));
        assert_eq!(rat_floor(&rat(-7, 2)), int(-4));
        assert!(rat_is_int(&rat(4, 2)));
        assert!(!rat_is_int(&rat(1, 3)));
    }

    #[test]
    fn bit_lengths() {
        assert_eq!(bit_len(&int(0)), 0);
        assert_eq!(bit_len(&int(1)), 1);
        assert_eq!(bit_len(&int(8)), 4);
        assert_eq!(bit_len(&int(-12)), 4);
    }
}
