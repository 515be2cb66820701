//! Small helpers around exact rationals and integers.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type Z = BigInt;

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn zi(n: i64) -> Z {
    Z::from(n)
}

/// Multiplies a list of rationals by the lcm of their denominators and
/// divides by the gcd of the resulting numerators. Returns the primitive
/// integer list together with the factor `c` such that `ints = c * input`.
pub fn primitive_ints<'a, I>(vals: I) -> (Vec<Z>, Q)
where
    I: IntoIterator<Item = &'a Q> + Clone,
{
    let mut den = Z::one();
    for v in vals.clone() {
        den = den.lcm(v.denom());
    }
    let mut out: Vec<Z> = vals
        .into_iter()
        .map(|v| (v * Q::from_integer(den.clone())).to_integer())
        .collect();
    let g = gcd_all(out.iter());
    let mut scale = Q::from_integer(den);
    if !g.is_zero() && !g.is_one() {
        for x in out.iter_mut() {
            *x = &*x / &g;
        }
        scale /= Q::from_integer(g);
    }
    (out, scale)
}

pub fn gcd_all<'a, I: IntoIterator<Item = &'a Z>>(vals: I) -> Z {
    let mut g = Z::zero();
    for v in vals {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    g.abs()
}

pub fn factorial(k: u32) -> Z {
    (1..=k).fold(Z::one(), |acc, i| acc * Z::from(i))
}

pub fn binomial(n: u32, k: u32) -> Z {
    if k > n {
        return Z::zero();
    }
    let k = k.min(n - k);
    let mut acc = Z::one();
    for i in 0..k {
        acc = acc * Z::from(n - i) / Z::from(i + 1);
    }
    acc
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(v: &Q) -> alloc::string::String {
    use alloc::string::ToString;
    if v.is_integer() {
        v.numer().to_string()
    } else {
        alloc::format!("{}/{}", v.numer(), v.denom())
    }
}
