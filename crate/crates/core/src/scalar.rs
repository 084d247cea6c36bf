//! Real scalars with directed rounding, the substrate under every ball.
//!
//! Two backends implement [`RealScalar`]:
//!
//! * `f64` — hardware floats for working precisions up to 64 bits. Directed
//!   rounding is emulated by relative nudging, which is only valid for
//!   normal-range numbers; magnitudes inside the subnormal range are treated
//!   as a fog between 0 and `f64::MIN_POSITIVE`. Lower bounds round down to 0
//!   there, upper bounds round up to `MIN_POSITIVE`. That keeps the error
//!   model purely relative and keeps every certificate sound: a quantity
//!   whose positivity would rest on subnormal arithmetic simply fails to
//!   certify and the caller escalates precision.
//! * [`Wide`] — software floats with `prec` mantissa bits and an `i64`
//!   exponent, for precisions above 64 bits. Nothing underflows.

use crate::wide::{Dir, Wide};
use std::fmt::{Debug, Display};

pub trait RealScalar: Clone + Debug + Display + PartialOrd {
    fn zero(prec: u32) -> Self;
    fn one(prec: u32) -> Self;
    fn from_i64(v: i64, prec: u32) -> Self;
    /// m * 2^e.
    fn from_dyadic(m: i64, e: i64, prec: u32) -> Self;
    fn prec(&self) -> u32;

    fn add_dir(&self, o: &Self, dir: Dir) -> Self;
    fn sub_dir(&self, o: &Self, dir: Dir) -> Self;
    fn mul_dir(&self, o: &Self, dir: Dir) -> Self;
    fn div_dir(&self, o: &Self, dir: Dir) -> Self;
    fn sqrt_dir(&self, dir: Dir) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    /// Exact scaling by 2^k (up to range handling in the f64 backend).
    fn mul_pow2(&self, k: i64, dir: Dir) -> Self;

    fn is_zero(&self) -> bool;
    fn sign(&self) -> i8;
    /// Upper bound on the rounding error of a `Trunc` operation that produced
    /// this value (one unit in the last place, or the fog ceiling for f64).
    fn ulp_up(&self) -> Self;
    /// True when the value is a reliable strictly-positive certified bound.
    fn certifies_positive(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Decimal mantissa + exponent string, e.g. "3.17e-412".
    fn decimal(&self) -> String;

    fn min_val(&self, o: &Self) -> Self {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }
    fn max_val(&self, o: &Self) -> Self {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }
}

// ---------------------------------------------------------------------------
// Hardware backend.
// ---------------------------------------------------------------------------

const REL_NUDGE: f64 = 2.220446049250313e-16 * 4.0; // 4 * eps, covers 1-ulp nearest rounding

/// Post-rounding nudge toward +inf with subnormal fog handling.
fn up_f64(z: f64) -> f64 {
    debug_assert!(!z.is_nan());
    if z == 0.0 {
        return 0.0;
    }
    if z.abs() < f64::MIN_POSITIVE {
        return if z > 0.0 { f64::MIN_POSITIVE } else { 0.0 };
    }
    if z > 0.0 {
        let r = z * (1.0 + REL_NUDGE);
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    } else {
        z * (1.0 - REL_NUDGE)
    }
}

fn down_f64(z: f64) -> f64 {
    -up_f64(-z)
}

fn dir_f64(z: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Up => up_f64(z),
        Dir::Down => down_f64(z),
        Dir::Trunc => {
            if z.abs() < f64::MIN_POSITIVE {
                0.0
            } else {
                z
            }
        }
    }
}

impl RealScalar for f64 {
    fn zero(_prec: u32) -> Self {
        0.0
    }
    fn one(_prec: u32) -> Self {
        1.0
    }
    fn from_i64(v: i64, _prec: u32) -> Self {
        v as f64
    }
    fn from_dyadic(m: i64, e: i64, _prec: u32) -> Self {
        let f = m as f64 * 2f64.powi(e.clamp(-2000, 2000) as i32);
        if f.abs() < f64::MIN_POSITIVE {
            0.0
        } else {
            f
        }
    }
    fn prec(&self) -> u32 {
        53
    }
    fn add_dir(&self, o: &Self, dir: Dir) -> Self {
        dir_f64(self + o, dir)
    }
    fn sub_dir(&self, o: &Self, dir: Dir) -> Self {
        dir_f64(self - o, dir)
    }
    fn mul_dir(&self, o: &Self, dir: Dir) -> Self {
        dir_f64(self * o, dir)
    }
    fn div_dir(&self, o: &Self, dir: Dir) -> Self {
        dir_f64(self / o, dir)
    }
    fn sqrt_dir(&self, dir: Dir) -> Self {
        dir_f64(self.sqrt(), dir)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn mul_pow2(&self, k: i64, dir: Dir) -> Self {
        dir_f64(self * 2f64.powi(k.clamp(-2000, 2000) as i32), dir)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sign(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn ulp_up(&self) -> Self {
        // Covers nearest-rounding error plus the fog floor.
        self.abs() * (2.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
    fn certifies_positive(&self) -> bool {
        *self >= f64::MIN_POSITIVE
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn decimal(&self) -> String {
        if *self == 0.0 {
            "0".to_string()
        } else {
            format!("{:e}", self)
        }
    }
}

// ---------------------------------------------------------------------------
// Software backend.
// ---------------------------------------------------------------------------

impl RealScalar for Wide {
    fn zero(prec: u32) -> Self {
        Wide::zero(prec)
    }
    fn one(prec: u32) -> Self {
        Wide::from_i64(1, prec)
    }
    fn from_i64(v: i64, prec: u32) -> Self {
        Wide::from_i64(v, prec)
    }
    fn from_dyadic(m: i64, e: i64, prec: u32) -> Self {
        Wide::from_dyadic(m, e, prec)
    }
    fn prec(&self) -> u32 {
        Wide::prec(self)
    }
    fn add_dir(&self, o: &Self, dir: Dir) -> Self {
        Wide::add_dir(self, o, dir)
    }
    fn sub_dir(&self, o: &Self, dir: Dir) -> Self {
        Wide::sub_dir(self, o, dir)
    }
    fn mul_dir(&self, o: &Self, dir: Dir) -> Self {
        Wide::mul_dir(self, o, dir)
    }
    fn div_dir(&self, o: &Self, dir: Dir) -> Self {
        Wide::div_dir(self, o, dir)
    }
    fn sqrt_dir(&self, dir: Dir) -> Self {
        Wide::sqrt_dir(self, dir)
    }
    fn neg(&self) -> Self {
        Wide::neg(self)
    }
    fn abs(&self) -> Self {
        Wide::abs(self)
    }
    fn mul_pow2(&self, k: i64, _dir: Dir) -> Self {
        Wide::mul_pow2(self, k)
    }
    fn is_zero(&self) -> bool {
        Wide::is_zero(self)
    }
    fn sign(&self) -> i8 {
        Wide::sign(self)
    }
    fn ulp_up(&self) -> Self {
        self.ulp()
    }
    fn certifies_positive(&self) -> bool {
        self.sign() > 0
    }
    fn to_f64(&self) -> f64 {
        Wide::to_f64(self)
    }
    fn decimal(&self) -> String {
        self.to_decimal_string(17)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_fog_rules() {
        let tiny = 1e-320f64; // subnormal
        assert_eq!(up_f64(tiny), f64::MIN_POSITIVE);
        assert_eq!(down_f64(tiny), 0.0);
        assert_eq!(down_f64(-tiny), -f64::MIN_POSITIVE);
        assert!(!1e-310f64.certifies_positive());
        assert!(1e-300f64.certifies_positive());
    }

    #[test]
    fn f64_directed_brackets() {
        let a = 0.1f64;
        let b = 0.3f64;
        assert!(a.add_dir(&b, Dir::Down) < a.add_dir(&b, Dir::Up));
        assert!(a.mul_dir(&b, Dir::Down) <= 0.03 && 0.03 <= a.mul_dir(&b, Dir::Up));
    }

    #[test]
    fn wide_matches_f64_on_moderate_values() {
        for (a, b) in [(1.5, 2.25), (3.0, 7.0), (0.125, 0.5)] {
            let wa = Wide::from_f64_exact(a, 80);
            let wb = Wide::from_f64_exact(b, 80);
            assert_eq!(wa.add_dir(&wb, Dir::Trunc).to_f64(), a + b);
            assert_eq!(wa.mul_dir(&wb, Dir::Trunc).to_f64(), a * b);
        }
    }
}
