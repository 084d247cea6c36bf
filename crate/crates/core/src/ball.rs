//! Complex disk balls: a midpoint at working precision plus one error radius.
//!
//! Every operation returns a ball containing all exact results of the inputs
//! ranging over their balls. Midpoints round with `Trunc` and the (at most
//! one ulp per component) rounding error is folded into the radius, which is
//! itself computed with upward rounding throughout.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use crate::wide::Dir;

#[derive(Debug, Clone)]
pub struct Ball<S> {
    pub re: S,
    pub im: S,
    pub rad: S,
}

impl<S: RealScalar> Ball<S> {
    pub fn zero(prec: u32) -> Self {
        Ball {
            re: S::zero(prec),
            im: S::zero(prec),
            rad: S::zero(prec),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Ball {
            re: S::from_i64(v, prec),
            im: S::zero(prec),
            rad: S::zero(prec),
        }
    }

    /// Exact dyadic point m*2^e (+ i*0).
    pub fn from_dyadic(m: i64, e: i64, prec: u32) -> Self {
        Ball {
            re: S::from_dyadic(m, e, prec),
            im: S::zero(prec),
            rad: S::zero(prec),
        }
    }

    pub fn from_parts(re: S, im: S) -> Self {
        let prec = re.prec().max(im.prec());
        Ball {
            re,
            im,
            rad: S::zero(prec),
        }
    }

    pub fn with_rad(re: S, im: S, rad: S) -> Self {
        debug_assert!(rad.sign() >= 0);
        Ball { re, im, rad }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec()).max(self.rad.prec())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.rad.is_zero()
    }

    /// Grow the radius to at least `r`.
    pub fn inflate(&self, r: &S) -> Self {
        Ball {
            re: self.re.clone(),
            im: self.im.clone(),
            rad: self.rad.add_dir(r, Dir::Up),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let re = self.re.add_dir(&o.re, Dir::Trunc);
        let im = self.im.add_dir(&o.im, Dir::Trunc);
        let rad = self
            .rad
            .add_dir(&o.rad, Dir::Up)
            .add_dir(&re.ulp_up(), Dir::Up)
            .add_dir(&im.ulp_up(), Dir::Up);
        Ball { re, im, rad }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Ball {
            re: self.re.neg(),
            im: self.im.neg(),
            rad: self.rad.clone(),
        }
    }

    /// Cheap upper bound for the midpoint modulus: |re| + |im|.
    fn mid_abs1_up(&self) -> S {
        self.re.abs().add_dir(&self.im.abs(), Dir::Up)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (ar, ai, br, bi) = (&self.re, &self.im, &o.re, &o.im);
        let t1 = ar.mul_dir(br, Dir::Trunc);
        let t2 = ai.mul_dir(bi, Dir::Trunc);
        let t3 = ar.mul_dir(bi, Dir::Trunc);
        let t4 = ai.mul_dir(br, Dir::Trunc);
        let re = t1.sub_dir(&t2, Dir::Trunc);
        let im = t3.add_dir(&t4, Dir::Trunc);
        // Midpoint rounding: five Trunc roundings feed each component.
        let mut slack = t1.ulp_up().add_dir(&t2.ulp_up(), Dir::Up);
        slack = slack.add_dir(&t3.ulp_up(), Dir::Up);
        slack = slack.add_dir(&t4.ulp_up(), Dir::Up);
        slack = slack.add_dir(&re.ulp_up(), Dir::Up);
        slack = slack.add_dir(&im.ulp_up(), Dir::Up);
        // |a|*rb + |b|*ra + ra*rb, all upward; |.| via the 1-norm bound.
        let na = self.mid_abs1_up();
        let nb = o.mid_abs1_up();
        let mut rad = na.mul_dir(&o.rad, Dir::Up);
        rad = rad.add_dir(&nb.mul_dir(&self.rad, Dir::Up), Dir::Up);
        rad = rad.add_dir(&self.rad.mul_dir(&o.rad, Dir::Up), Dir::Up);
        rad = rad.add_dir(&slack, Dir::Up);
        Ball { re, im, rad }
    }

    pub fn scale_real(&self, s: &S) -> Self {
        let re = self.re.mul_dir(s, Dir::Trunc);
        let im = self.im.mul_dir(s, Dir::Trunc);
        let rad = self
            .rad
            .mul_dir(&s.abs(), Dir::Up)
            .add_dir(&re.ulp_up(), Dir::Up)
            .add_dir(&im.ulp_up(), Dir::Up);
        Ball { re, im, rad }
    }

    /// Exact scaling by 2^k (exact for the software backend; fog-ruled on f64).
    pub fn scale_pow2(&self, k: i64) -> Self {
        Ball {
            re: self.re.mul_pow2(k, Dir::Trunc),
            im: self.im.mul_pow2(k, Dir::Trunc),
            rad: self.rad.mul_pow2(k, Dir::Up),
        }
    }

    /// z^n by binary powering.
    pub fn pow_ui(&self, n: u64) -> Self {
        let prec = self.prec();
        let mut acc = Ball::from_i64(1, prec);
        if n == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc
    }

    /// Certified upper bound of |z| over the ball.
    pub fn abs_upper(&self) -> S {
        let rr = self.re.mul_dir(&self.re, Dir::Up);
        let ii = self.im.mul_dir(&self.im, Dir::Up);
        let m = rr.add_dir(&ii, Dir::Up).sqrt_dir(Dir::Up);
        m.add_dir(&self.rad, Dir::Up)
    }

    /// Certified lower bound of |z| over the ball (clamped at 0).
    pub fn abs_lower(&self) -> S {
        let rr = self.re.mul_dir(&self.re, Dir::Down);
        let ii = self.im.mul_dir(&self.im, Dir::Down);
        let m = rr.add_dir(&ii, Dir::Down).sqrt_dir(Dir::Down);
        let lo = m.sub_dir(&self.rad, Dir::Down);
        if lo.sign() > 0 {
            lo
        } else {
            S::zero(self.prec())
        }
    }

    /// Lower bound of the midpoint modulus alone.
    pub fn mid_abs_lower(&self) -> S {
        let rr = self.re.mul_dir(&self.re, Dir::Down);
        let ii = self.im.mul_dir(&self.im, Dir::Down);
        rr.add_dir(&ii, Dir::Down).sqrt_dir(Dir::Down)
    }

    pub fn excludes_zero(&self) -> bool {
        self.abs_lower().certifies_positive()
    }

    /// 1/z; fails when the ball does not certifiably exclude 0.
    pub fn inv(&self) -> Result<Self> {
        let lo = self.abs_lower();
        if !lo.certifies_positive() {
            return Err(Error::domain("division by a ball containing zero"));
        }
        let rr = self.re.mul_dir(&self.re, Dir::Trunc);
        let ii = self.im.mul_dir(&self.im, Dir::Trunc);
        let den = rr.add_dir(&ii, Dir::Trunc);
        let re = self.re.div_dir(&den, Dir::Trunc);
        let im = self.im.neg().div_dir(&den, Dir::Trunc);
        // |1/u - 1/m| <= r / (|m| (|m| - r)) for |u - m| <= r < |m|,
        // plus the midpoint rounding slack (den is accurate to ~3 ulps, fold
        // a generous multiple of the component ulps into the radius).
        let mlo = self.mid_abs_lower();
        let denom = mlo.mul_dir(&lo, Dir::Down);
        if !denom.certifies_positive() {
            return Err(Error::precision("reciprocal bound not certifiable"));
        }
        let prop = self.rad.div_dir(&denom, Dir::Up);
        let slack = re
            .ulp_up()
            .add_dir(&im.ulp_up(), Dir::Up)
            .mul_pow2(3, Dir::Up);
        let rad = prop.add_dir(&slack, Dir::Up);
        Ok(Ball { re, im, rad })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Conservative containment test: true implies `other` ⊆ `self`.
    pub fn contains(&self, other: &Self) -> bool {
        let d = self.sub_mid_dist_upper(other);
        d.add_dir(&other.rad, Dir::Up) <= self.rad
    }

    pub fn contains_point(&self, re: &S, im: &S) -> bool {
        let p = Ball::from_parts(re.clone(), im.clone());
        self.contains(&p)
    }

    /// Upper bound of the distance between midpoints.
    pub fn sub_mid_dist_upper(&self, other: &Self) -> S {
        let dr = self.re.sub_dir(&other.re, Dir::Up).abs();
        let dr2 = self.re.sub_dir(&other.re, Dir::Down).abs();
        let dr = dr.max_val(&dr2);
        let di = self.im.sub_dir(&other.im, Dir::Up).abs();
        let di2 = self.im.sub_dir(&other.im, Dir::Down).abs();
        let di = di.max_val(&di2);
        let s = dr
            .mul_dir(&dr, Dir::Up)
            .add_dir(&di.mul_dir(&di, Dir::Up), Dir::Up);
        s.sqrt_dir(Dir::Up)
    }

    /// Lower bound of the distance between midpoints.
    pub fn sub_mid_dist_lower(&self, other: &Self) -> S {
        let d = self.sub(other);
        d.mid_abs_lower()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wide::Wide;

    type B = Ball<Wide>;

    #[test]
    fn exact_integer_add() {
        let a = B::from_i64(1, 64);
        let i = B::with_rad(Wide::zero(64), Wide::from_i64(1, 64), Wide::zero(64));
        let s = a.add(&i);
        assert_eq!(s.re.to_f64(), 1.0);
        assert_eq!(s.im.to_f64(), 1.0);
        assert!(s.rad.is_zero());
    }

    #[test]
    fn abs_lower_of_origin_ball_is_zero() {
        let b = B::with_rad(Wide::zero(64), Wide::zero(64), Wide::from_dyadic(1, -1, 64));
        assert!(b.abs_lower().is_zero());
        assert!(!b.excludes_zero());
    }

    #[test]
    fn division_by_zero_ball_rejected() {
        let z = B::with_rad(
            Wide::from_dyadic(1, -3, 64),
            Wide::zero(64),
            Wide::from_dyadic(1, -2, 64),
        );
        let one = B::from_i64(1, 64);
        assert!(one.div(&z).is_err());
    }

    #[test]
    fn inv_contains_exact() {
        let b = B::from_i64(4, 96);
        let r = b.inv().unwrap();
        assert!((r.re.to_f64() - 0.25).abs() < 1e-20);
        // containment of 1/4 exactly
        assert!(r.contains(&B::from_dyadic(1, -2, 96)));
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let b = B::with_rad(
            Wide::from_dyadic(3, -2, 96),
            Wide::from_dyadic(-1, -3, 96),
            Wide::from_dyadic(1, -30, 96),
        );
        let p = b.pow_ui(5);
        let mut q = B::from_i64(1, 96);
        for _ in 0..5 {
            q = q.mul(&b);
        }
        // Same midpoint up to tiny rounding; p radius within 2x of q's.
        assert!(p.sub_mid_dist_upper(&q).to_f64() < 1e-25);
        assert!(p.rad.to_f64() <= q.rad.to_f64() * 2.0 + 1e-30);
    }
}
