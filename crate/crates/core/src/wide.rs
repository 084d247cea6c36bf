//! Software binary floating point with an unbounded exponent.
//!
//! `Wide` is a sign/magnitude float: `value = sign * mant * 2^exp` with the
//! mantissa normalized to exactly `prec` bits. The exponent is an `i64`, so
//! quantities like 4^-65025 that underflow every hardware format stay
//! representable. All operations support directed rounding, which is what the
//! ball layer needs to keep every certificate an enclosure.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for scalar operations.
///
/// `Down`/`Up` are directed toward -inf/+inf and are exact enclosures.
/// `Trunc` rounds toward zero and is only guaranteed to be within one unit
/// of the last mantissa bit; midpoint arithmetic uses it and compensates the
/// error into the ball radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
    Trunc,
}

#[derive(Debug, Clone)]
pub struct Wide {
    sign: i8, // -1, 0, +1
    mant: BigUint,
    exp: i64,
    prec: u32,
}

const MIN_PREC: u32 = 8;

fn mask(bits: u64) -> BigUint {
    (BigUint::one() << bits) - BigUint::one()
}

impl Wide {
    pub fn zero(prec: u32) -> Self {
        Wide {
            sign: 0,
            mant: BigUint::zero(),
            exp: 0,
            prec: prec.max(MIN_PREC),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// 2^e, exact.
    pub fn two_pow(e: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        Wide {
            sign: 1,
            mant: BigUint::one() << (prec - 1) as u64,
            exp: e - (prec as i64 - 1),
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        if v == 0 {
            return Wide::zero(prec);
        }
        let sign = if v > 0 { 1 } else { -1 };
        let mag = BigUint::from(v.unsigned_abs());
        // Integers wider than prec round toward zero; callers in the pipeline
        // never exceed the working precision with literals.
        normalize(sign, mag, 0, 0, prec, Dir::Trunc)
    }

    /// m * 2^e, exact when |m| fits in the precision.
    pub fn from_dyadic(m: i64, e: i64, prec: u32) -> Self {
        let mut w = Wide::from_i64(m, prec);
        if w.sign != 0 {
            w.exp += e;
        }
        w
    }

    pub fn from_biguint(sign: i8, mag: BigUint, exp: i64, prec: u32, dir: Dir) -> Self {
        if mag.is_zero() || sign == 0 {
            return Wide::zero(prec);
        }
        normalize(sign, mag, exp, 0, prec.max(MIN_PREC), dir)
    }

    /// Exact conversion from f64 (requires a finite input).
    pub fn from_f64_exact(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "from_f64_exact requires finite input");
        if v == 0.0 {
            return Wide::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        normalize(sign, BigUint::from(mant), exp, 0, prec.max(MIN_PREC), Dir::Trunc)
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.sign = -r.sign;
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        if r.sign < 0 {
            r.sign = 1;
        }
        r
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut r = self.clone();
        if r.sign != 0 {
            r.exp += k;
        }
        r
    }

    /// Exponent e with 2^(e-1) <= |x| < 2^e; None for zero.
    pub fn mag_exponent(&self) -> Option<i64> {
        if self.sign == 0 {
            None
        } else {
            Some(self.exp + self.prec as i64)
        }
    }

    /// One unit in the last mantissa place, as an exact positive value.
    pub fn ulp(&self) -> Self {
        if self.sign == 0 {
            // Zero results of Trunc arithmetic are exact.
            Wide::zero(self.prec)
        } else {
            Wide::two_pow(self.exp, self.prec)
        }
    }

    pub fn add_dir(&self, other: &Wide, dir: Dir) -> Self {
        let prec = self.prec.max(other.prec);
        if self.sign == 0 {
            return round_to(other, prec, dir);
        }
        if other.sign == 0 {
            return round_to(self, prec, dir);
        }
        let ta = self.exp + self.prec as i64; // top exponent of |a|
        let tb = other.exp + other.prec as i64;
        let gap_cap = prec as i64 + 4;
        if ta >= tb + gap_cap + other.prec as i64 {
            // b is entirely below a's rounding horizon: fold it into a tail.
            return normalize(
                self.sign,
                self.mant.clone(),
                self.exp,
                self.sign * other.sign,
                prec,
                dir,
            );
        }
        if tb >= ta + gap_cap + self.prec as i64 {
            return normalize(
                other.sign,
                other.mant.clone(),
                other.exp,
                other.sign * self.sign,
                prec,
                dir,
            );
        }
        let e = self.exp.min(other.exp);
        let sa = (self.exp - e) as u64;
        let sb = (other.exp - e) as u64;
        let ia = BigInt::from_biguint(int_sign(self.sign), &self.mant << sa);
        let ib = BigInt::from_biguint(int_sign(other.sign), &other.mant << sb);
        let sum = ia + ib;
        match sum.sign() {
            Sign::NoSign => Wide::zero(prec),
            s => normalize(
                if s == Sign::Plus { 1 } else { -1 },
                sum.magnitude().clone(),
                e,
                0,
                prec,
                dir,
            ),
        }
    }

    pub fn sub_dir(&self, other: &Wide, dir: Dir) -> Self {
        self.add_dir(&other.neg(), dir)
    }

    pub fn mul_dir(&self, other: &Wide, dir: Dir) -> Self {
        let prec = self.prec.max(other.prec);
        if self.sign == 0 || other.sign == 0 {
            return Wide::zero(prec);
        }
        normalize(
            self.sign * other.sign,
            &self.mant * &other.mant,
            self.exp + other.exp,
            0,
            prec,
            dir,
        )
    }

    /// Division; the divisor must be nonzero.
    pub fn div_dir(&self, other: &Wide, dir: Dir) -> Self {
        let prec = self.prec.max(other.prec);
        assert!(other.sign != 0, "division by zero Wide");
        if self.sign == 0 {
            return Wide::zero(prec);
        }
        let sh = (prec as u64 + 3) + other.prec as u64;
        let num = &self.mant << sh;
        let q = &num / &other.mant;
        let exact = &q * &other.mant == num;
        normalize(
            self.sign * other.sign,
            q,
            self.exp - sh as i64 - other.exp,
            if exact { 0 } else { 1 },
            prec,
            dir,
        )
    }

    /// Square root; the input must be >= 0.
    pub fn sqrt_dir(&self, dir: Dir) -> Self {
        assert!(self.sign >= 0, "sqrt of negative Wide");
        if self.sign == 0 {
            return Wide::zero(self.prec);
        }
        let prec = self.prec;
        let want = 2 * (prec as u64 + 3);
        let have = self.mant.bits();
        let mut sh = want.saturating_sub(have);
        if (self.exp - sh as i64) % 2 != 0 {
            sh += 1;
        }
        let t = &self.mant << sh;
        let s = t.sqrt();
        let exact = &s * &s == t;
        normalize(
            1,
            s,
            (self.exp - sh as i64) / 2,
            if exact { 0 } else { 1 },
            prec,
            dir,
        )
    }

    pub fn cmp_value(&self, other: &Wide) -> Ordering {
        match (self.sign, other.sign) {
            (0, 0) => Ordering::Equal,
            (a, b) if a != b => a.cmp(&b),
            (s, _) => {
                let mag = cmp_mag(self, other);
                if s > 0 {
                    mag
                } else {
                    mag.reverse()
                }
            }
        }
    }

    /// Approximate f64 value; saturates on exponent overflow. Plot/report use
    /// only, never part of a certificate.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let top = self.exp + self.prec as i64;
        if top > 1024 {
            return if self.sign > 0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if top < -1070 {
            return 0.0;
        }
        // Take the top 53 bits.
        let drop = self.prec as i64 - 53;
        let (m, e) = if drop > 0 {
            ((&self.mant >> drop as u64).to_u64_digits(), self.exp + drop)
        } else {
            ((&self.mant << (-drop) as u64).to_u64_digits(), self.exp + drop)
        };
        let m = m.first().copied().unwrap_or(0);
        let v = m as f64 * 2f64.powi(e.clamp(-1100, 1100) as i32);
        if self.sign > 0 {
            v
        } else {
            -v
        }
    }

    /// Decimal mantissa/exponent rendering, e.g. "3.1729e-412".
    ///
    /// Always carries an explicit exponent so that magnitudes far below any
    /// native float survive generic JSON tooling.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        let digits = digits.clamp(3, 40) as i64;
        // |x| = mant * 2^exp. Find d10 ~ floor(log10 |x|).
        let top = self.exp + self.prec as i64; // 2^(top-1) <= |x| < 2^top
        // log10(2) ~ 0.30102999566; use a rational overestimate grid.
        let d10 = ((top as i128) * 30103 / 100000) as i64;
        // digits10 = value * 10^(digits - d10), rounded; adjust if off by one.
        let mut k = digits - d10;
        for _ in 0..4 {
            let scaled = scale_decimal(&self.mant, self.exp, k);
            let s = scaled.to_string();
            let len = s.len() as i64;
            if len > digits + 1 {
                k -= len - digits - 1;
                continue;
            }
            if len <= digits {
                k += digits + 1 - len;
                continue;
            }
            // len == digits + 1: first digit, point, rest, exponent = -k + (len - 1)
            let e10 = (len - 1) - k;
            let mantissa = format!("{}.{}", &s[..1], &s[1..]);
            let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
            let sgn = if self.sign < 0 { "-" } else { "" };
            return format!("{}{}e{}", sgn, mantissa, e10);
        }
        // Fallback (should not be reached): crude rendering.
        format!("{}2^{}x{}", if self.sign < 0 { "-" } else { "" }, self.exp, self.mant)
    }
}

/// floor(mant * 2^exp * 10^k) for k chosen by the caller; k may be negative.
fn scale_decimal(mant: &BigUint, exp: i64, k: i64) -> BigUint {
    let mut num = mant.clone();
    let mut den = BigUint::one();
    if k >= 0 {
        num *= BigUint::from(10u32).pow(k as u32);
    } else {
        den *= BigUint::from(10u32).pow((-k) as u32);
    }
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    num / den
}

fn int_sign(s: i8) -> Sign {
    if s > 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn cmp_mag(a: &Wide, b: &Wide) -> Ordering {
    let ta = a.exp + a.mant.bits() as i64;
    let tb = b.exp + b.mant.bits() as i64;
    match ta.cmp(&tb) {
        Ordering::Equal => {
            // Align mantissas to a common exponent.
            if a.exp >= b.exp {
                (&a.mant << (a.exp - b.exp) as u64).cmp(&b.mant)
            } else {
                a.mant.cmp(&(&b.mant << (b.exp - a.exp) as u64))
            }
        }
        o => o,
    }
}

fn round_to(x: &Wide, prec: u32, dir: Dir) -> Wide {
    if x.sign == 0 {
        return Wide::zero(prec);
    }
    if x.prec == prec {
        return x.clone();
    }
    normalize(x.sign, x.mant.clone(), x.exp, 0, prec, dir)
}

/// Normalize a sign/magnitude candidate to `prec` bits, applying directed
/// rounding.
///
/// `fcmp` is the sign of (|exact| - mant*2^exp): +1 when discarded tail mass
/// makes the true magnitude strictly larger, -1 when strictly smaller, 0 when
/// exact. The tail magnitude must be below one unit of the mantissa as given.
fn normalize(sign: i8, mut mant: BigUint, mut exp: i64, mut fcmp: i8, prec: u32, dir: Dir) -> Wide {
    debug_assert!(sign == 1 || sign == -1);
    debug_assert!(!mant.is_zero());
    let nbits = mant.bits();
    let p = prec as u64;
    if nbits > p {
        let drop = nbits - p;
        let low = &mant & mask(drop);
        mant >>= drop;
        exp += drop as i64;
        if !low.is_zero() {
            // Any dropped bit dominates a sub-unit tail of either sign.
            fcmp = 1;
        }
    } else if nbits < p {
        mant <<= p - nbits;
        exp -= (p - nbits) as i64;
    }
    // Decide whether the kept magnitude must be adjusted by one ulp.
    let bump = match dir {
        Dir::Trunc => 0,
        Dir::Down => {
            if sign > 0 {
                if fcmp < 0 {
                    -1
                } else {
                    0
                }
            } else if fcmp > 0 {
                1
            } else {
                0
            }
        }
        Dir::Up => {
            if sign > 0 {
                if fcmp > 0 {
                    1
                } else {
                    0
                }
            } else if fcmp < 0 {
                -1
            } else {
                0
            }
        }
    };
    match bump {
        1 => {
            mant += BigUint::one();
            if mant.bits() > p {
                mant >>= 1u8;
                exp += 1;
            }
        }
        -1 => {
            mant -= BigUint::one();
            if mant.bits() < p {
                // Mantissa was the minimum normalized value; re-extend.
                mant <<= 1u8;
                exp -= 1;
            }
        }
        _ => {}
    }
    Wide { sign, mant, exp, prec }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(17))
    }
}

impl PartialEq for Wide {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: f64) -> Wide {
        Wide::from_f64_exact(v, 64)
    }

    #[test]
    fn exact_small_integers() {
        let a = Wide::from_i64(3, 64);
        let b = Wide::from_i64(5, 64);
        assert_eq!(a.add_dir(&b, Dir::Trunc).to_f64(), 8.0);
        assert_eq!(a.mul_dir(&b, Dir::Trunc).to_f64(), 15.0);
        assert_eq!(a.sub_dir(&b, Dir::Trunc).to_f64(), -2.0);
    }

    #[test]
    fn directed_bracketing_random() {
        // down <= trunc-ish <= up, and the f64 result is inside [down, up]
        // for operations whose exact value is representable in f64's range.
        let mut x: u64 = 0x9E3779B97F4A7C15;
        let mut next = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x as i64 % 1_000_000) as f64 / 997.0 + 0.001
        };
        for _ in 0..2000 {
            let a = next();
            let b = next();
            for (op, exact) in [
                (0u8, a + b),
                (1, a - b),
                (2, a * b),
                (3, a / b),
            ] {
                let (wa, wb) = (w(a), w(b));
                let f = |d: Dir| match op {
                    0 => wa.add_dir(&wb, d),
                    1 => wa.sub_dir(&wb, d),
                    2 => wa.mul_dir(&wb, d),
                    _ => wa.div_dir(&wb, d),
                };
                let lo = f(Dir::Down);
                let hi = f(Dir::Up);
                assert!(lo.cmp_value(&hi) != Ordering::Greater);
                let e = w(exact);
                // f64 arithmetic rounds to nearest, within 1 ulp of exact;
                // widen by 4 ulps of the result scale before comparing.
                let slack = if exact == 0.0 {
                    w(1e-300)
                } else {
                    w(exact.abs() * 1e-15)
                };
                assert!(
                    lo.cmp_value(&e.add_dir(&slack, Dir::Trunc)) != Ordering::Greater,
                    "lo > exact+slack for op {op}: {a} {b}"
                );
                assert!(
                    hi.cmp_value(&e.sub_dir(&slack, Dir::Trunc)) != Ordering::Less,
                    "hi < exact-slack for op {op}: {a} {b}"
                );
            }
        }
    }

    #[test]
    fn division_directed_tight() {
        let a = Wide::from_i64(1, 32);
        let b = Wide::from_i64(3, 32);
        let lo = a.div_dir(&b, Dir::Down);
        let hi = a.div_dir(&b, Dir::Up);
        assert!(lo.cmp_value(&hi) == Ordering::Less);
        // hi - lo == 1 ulp
        let gap = hi.sub_dir(&lo, Dir::Up);
        assert!(gap.cmp_value(&lo.ulp().mul_pow2(1)) != Ordering::Greater);
        assert!(lo.to_f64() < 1.0 / 3.0 + 1e-9 && hi.to_f64() > 1.0 / 3.0 - 1e-9);
    }

    #[test]
    fn sqrt_directed() {
        for v in [2.0f64, 3.0, 0.5, 10.0, 12345.678] {
            let x = w(v);
            let lo = x.sqrt_dir(Dir::Down);
            let hi = x.sqrt_dir(Dir::Up);
            assert!(lo.mul_dir(&lo, Dir::Up).cmp_value(&x) != Ordering::Greater);
            assert!(hi.mul_dir(&hi, Dir::Down).cmp_value(&x) != Ordering::Less);
        }
        // exact square
        let x = Wide::from_i64(49, 64);
        let r = x.sqrt_dir(Dir::Down);
        assert_eq!(r.to_f64(), 7.0);
        assert_eq!(x.sqrt_dir(Dir::Up).to_f64(), 7.0);
    }

    #[test]
    fn huge_exponent_gap_add() {
        let big = Wide::two_pow(100_000, 64);
        let tiny = Wide::two_pow(-100_000, 64);
        let s_up = big.add_dir(&tiny, Dir::Up);
        let s_dn = big.add_dir(&tiny, Dir::Down);
        assert!(s_dn.cmp_value(&big) != Ordering::Less);
        assert!(s_up.cmp_value(&big) == Ordering::Greater);
        let d_dn = big.sub_dir(&tiny, Dir::Down);
        assert!(d_dn.cmp_value(&big) == Ordering::Less);
        let d_up = big.sub_dir(&tiny, Dir::Up);
        assert!(d_up.cmp_value(&big) != Ordering::Greater);
    }

    #[test]
    fn unbounded_exponent_products() {
        // (2^-5000)^2 stays representable and exact.
        let t = Wide::two_pow(-5000, 64);
        let sq = t.mul_dir(&t, Dir::Trunc);
        assert_eq!(sq.mag_exponent(), Some(-9999));
        assert_eq!(sq.cmp_value(&Wide::two_pow(-10_000, 64)), Ordering::Equal);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(w(1.0).to_decimal_string(6), "1e0");
        let s = w(0.001953125).to_decimal_string(8); // 2^-9
        assert!(s.starts_with("1.953125e-3"), "{s}");
        let tiny = Wide::two_pow(-1370, 64); // ~ 3.97e-413
        let s = tiny.to_decimal_string(6);
        assert!(s.ends_with("e-413"), "{s}");
        assert!(s.starts_with("3.9"), "{s}");
        let neg = w(-2.5).to_decimal_string(6);
        assert_eq!(neg, "-2.5e0");
    }

    #[test]
    fn compare_across_precisions() {
        let a = Wide::from_i64(7, 32);
        let b = Wide::from_i64(7, 160);
        assert_eq!(a.cmp_value(&b), Ordering::Equal);
        let c = Wide::from_i64(1, 160).div_dir(&Wide::from_i64(3, 160), Dir::Down);
        let d = Wide::from_i64(1, 32).div_dir(&Wide::from_i64(3, 32), Dir::Up);
        assert_eq!(c.cmp_value(&d), Ordering::Less);
    }
}
