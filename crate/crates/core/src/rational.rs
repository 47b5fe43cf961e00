//! Exact rational helpers shared by the polytope and serialization code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational used for behaviors and vertex coordinates.
pub type Rational = Ratio<i64>;

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational numerator in {s:?}")))?;
    let d: i64 = d
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational denominator in {s:?}")))?;
    if d == 0 {
        return Err(Error::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator/denominator; scale down before dividing
            let bits = r.denom().bits().max(r.numer().bits()) as i64 - 1000;
            let shift = bits.max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Best rational approximation by continued fractions with |x - p/q| <= tol.
pub fn rationalize(x: f64, tol: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Numerical(format!("cannot rationalize {x}")));
    }
    let mut p_prev = BigInt::zero();
    let mut p = BigInt::one();
    let mut q_prev = BigInt::one();
    let mut q = BigInt::zero();
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        let ai = BigInt::from(a as i128);
        let p_next = &ai * &p + &p_prev;
        let q_next = &ai * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        let approx = BigRational::new(p.clone(), q.clone());
        if (big_to_f64(&approx) - x).abs() <= tol {
            return Ok(approx);
        }
        let frac = rem - a;
        if frac.abs() < f64::EPSILON {
            return Ok(approx);
        }
        rem = 1.0 / frac;
    }
    Ok(BigRational::new(p, q))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

pub fn big_lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Divides an integer vector by the gcd of its entries (absolute); zero vectors are left as is.
pub fn primitive_i128(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

pub fn big_abs_gcd<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |g, x| g.gcd(&x.abs()))
}
