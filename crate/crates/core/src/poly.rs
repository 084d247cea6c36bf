//! Dense univariate polynomials over complex balls.
//!
//! Coefficients are stored lowest degree first. The zero polynomial is the
//! empty coefficient list and reports degree -1. "Structurally nonzero" means
//! the coefficient ball is not the exact zero; degree bookkeeping is based on
//! that notion, so balls that merely contain zero still count as present.

use crate::ball::Ball;
use crate::scalar::RealScalar;
use crate::wide::Dir;

#[derive(Debug, Clone)]
pub struct UniPoly<S> {
    coeffs: Vec<Ball<S>>,
}

impl<S: RealScalar> UniPoly<S> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Ball<S>>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_exact_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// w^n - t for an exact dyadic t (the auxiliary-zero profile).
    pub fn power_minus_dyadic(n: usize, t_m: i64, t_e: i64, prec: u32) -> Self {
        let mut coeffs = vec![Ball::zero(prec); n + 1];
        coeffs[0] = Ball::from_dyadic(t_m, t_e, prec).neg();
        coeffs[n] = Ball::from_i64(1, prec);
        UniPoly { coeffs }
    }

    /// w - c.
    pub fn linear(c: &Ball<S>) -> Self {
        let prec = c.prec();
        UniPoly {
            coeffs: vec![c.neg(), Ball::from_i64(1, prec)],
        }
    }

    pub fn coeffs(&self) -> &[Ball<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&Ball<S>> {
        self.coeffs.get(k)
    }

    /// Index of the last structurally nonzero coefficient; -1 for zero.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        if n == 0 {
            return UniPoly::zero();
        }
        let prec = self
            .coeffs
            .first()
            .map(|c| c.prec())
            .or_else(|| o.coeffs.first().map(|c| c.prec()))
            .unwrap_or(64);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k);
            let b = o.coeffs.get(k);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Ball::zero(prec),
            });
        }
        UniPoly::from_coeffs(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let prec = self.coeffs[0].prec().max(o.coeffs[0].prec());
        let mut out = vec![Ball::zero(prec); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn scale(&self, s: &Ball<S>) -> Self {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn pow(&self, n: u64) -> Self {
        if n == 0 {
            let prec = self.coeffs.first().map(|c| c.prec()).unwrap_or(64);
            return UniPoly {
                coeffs: vec![Ball::from_i64(1, prec)],
            };
        }
        let mut acc: Option<UniPoly<S>> = None;
        let mut base = self.clone();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// Exact coefficient-wise differentiation.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let prec = self.coeffs[0].prec();
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale_real(&S::from_i64(k as i64, prec)))
            .collect();
        UniPoly::from_coeffs(out)
    }

    /// Horner evaluation; containment-sound on ball inputs.
    pub fn eval(&self, z: &Ball<S>) -> Ball<S> {
        let prec = z.prec();
        let mut acc = Ball::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Coarse sup bound on the closed disk of radius r: sum |a_k| r^k.
    pub fn coeff_sum_bound(&self, r: &S) -> S {
        let prec = r.prec();
        let mut acc = S::zero(prec);
        let mut rk = S::one(prec);
        for c in &self.coeffs {
            acc = acc.add_dir(&c.abs_upper().mul_dir(&rk, Dir::Up), Dir::Up);
            rk = rk.mul_dir(r, Dir::Up);
        }
        acc
    }
}

/// Something that can be evaluated (with its derivative) over complex balls.
///
/// The analysis machinery is generic over this so that construction stages
/// can be evaluated in factored form instead of expanding degree-255
/// coefficient lists through every contour refinement.
pub trait BallEval<S: RealScalar> {
    fn eval(&self, z: &Ball<S>) -> Ball<S>;
    fn eval_deriv(&self, z: &Ball<S>) -> Ball<S>;
    /// Structural degree if known (used for sanity checks only).
    fn degree_hint(&self) -> Option<i64> {
        None
    }
}

impl<S: RealScalar> BallEval<S> for UniPoly<S> {
    fn eval(&self, z: &Ball<S>) -> Ball<S> {
        UniPoly::eval(self, z)
    }
    fn eval_deriv(&self, z: &Ball<S>) -> Ball<S> {
        // Horner on the derivative coefficients without materializing it.
        let prec = z.prec();
        let mut acc = Ball::zero(prec);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc.mul(z).add(&c.scale_real(&S::from_i64(k as i64, prec)));
        }
        acc
    }
    fn degree_hint(&self) -> Option<i64> {
        Some(self.degree())
    }
}

/// A construction stage in factored form: scale * (w - lambda)^a * (w^n - t).
///
/// Evaluating this instead of the dense expansion is what keeps high-degree
/// stages affordable inside contour subdivision.
#[derive(Debug, Clone)]
pub struct StageForm<S> {
    pub scale: Ball<S>,
    pub lambda: Ball<S>,
    pub damp_pow: u64,
    pub zero_count: u64,
    /// t, exact: the q-polynomial is w^zero_count - t.
    pub ring_t: Ball<S>,
}

impl<S: RealScalar> StageForm<S> {
    fn q_at(&self, z: &Ball<S>) -> Ball<S> {
        z.pow_ui(self.zero_count).sub(&self.ring_t)
    }
    fn damp_at(&self, z: &Ball<S>) -> Ball<S> {
        z.sub(&self.lambda).pow_ui(self.damp_pow)
    }
}

impl<S: RealScalar> BallEval<S> for StageForm<S> {
    fn eval(&self, z: &Ball<S>) -> Ball<S> {
        self.scale.mul(&self.damp_at(z)).mul(&self.q_at(z))
    }

    fn eval_deriv(&self, z: &Ball<S>) -> Ball<S> {
        let prec = z.prec();
        let zl = z.sub(&self.lambda);
        // a (w-l)^(a-1) q + (w-l)^a q'
        let mut term1 = Ball::zero(prec);
        if self.damp_pow > 0 {
            term1 = zl
                .pow_ui(self.damp_pow - 1)
                .scale_real(&S::from_i64(self.damp_pow as i64, prec))
                .mul(&self.q_at(z));
        }
        let qd = if self.zero_count == 0 {
            Ball::zero(prec)
        } else {
            z.pow_ui(self.zero_count - 1)
                .scale_real(&S::from_i64(self.zero_count as i64, prec))
        };
        let term2 = zl.pow_ui(self.damp_pow).mul(&qd);
        self.scale.mul(&term1.add(&term2))
    }

    fn degree_hint(&self) -> Option<i64> {
        Some(self.damp_pow as i64 + self.zero_count as i64)
    }
}

/// Sum of independently evaluable terms (the truncated series and its tails).
pub struct SumForm<'a, S: RealScalar> {
    pub terms: Vec<&'a dyn BallEval<S>>,
    pub prec: u32,
}

impl<'a, S: RealScalar> BallEval<S> for SumForm<'a, S> {
    fn eval(&self, z: &Ball<S>) -> Ball<S> {
        let mut acc = Ball::zero(self.prec);
        for t in &self.terms {
            acc = acc.add(&t.eval(z));
        }
        acc
    }
    fn eval_deriv(&self, z: &Ball<S>) -> Ball<S> {
        let mut acc = Ball::zero(self.prec);
        for t in &self.terms {
            acc = acc.add(&t.eval_deriv(z));
        }
        acc
    }
    fn degree_hint(&self) -> Option<i64> {
        self.terms.iter().filter_map(|t| t.degree_hint()).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wide::Wide;

    type P = UniPoly<Wide>;
    type B = Ball<Wide>;

    fn b(v: i64) -> B {
        B::from_i64(v, 96)
    }

    #[test]
    fn zero_polynomial_degree_sentinel() {
        assert_eq!(P::zero().degree(), -1);
        let z = P::zero().eval(&b(3));
        assert!(z.is_exact_zero());
    }

    #[test]
    fn eval_at_root_contains_zero() {
        // w^2 + 1 at i
        let p = P::from_coeffs(vec![b(1), b(0), b(1)]);
        let i = B::with_rad(Wide::zero(96), Wide::from_i64(1, 96), Wide::zero(96));
        let v = p.eval(&i);
        assert!(v.abs_lower().is_zero());
        assert!(v.abs_upper().to_f64() < 1e-20);
    }

    #[test]
    fn derivative_rules() {
        // w^3 -> 3w^2
        let p = P::from_coeffs(vec![b(0), b(0), b(0), b(1)]);
        let d = p.derivative();
        assert_eq!(d.degree(), 2);
        assert_eq!(d.coeff(2).unwrap().re.to_f64(), 3.0);
        // constant -> zero
        assert_eq!(P::from_coeffs(vec![b(7)]).derivative().degree(), -1);
        // d/dw (w-2)^4 at 2 contains 0
        let q = P::linear(&b(2)).pow(4);
        let at2 = q.derivative().eval(&b(2));
        assert!(at2.abs_lower().is_zero());
    }

    #[test]
    fn mul_expansion_and_degree_additivity() {
        // (w-2)^2 (w - 1/4) = w^3 - 17/4 w^2 + 5 w - 1
        let p = P::linear(&b(2)).pow(2);
        let q = P::linear(&B::from_dyadic(1, -2, 96));
        let r = p.mul(&q);
        assert_eq!(r.degree(), 3);
        let expect = [
            B::from_i64(-1, 96),
            B::from_i64(5, 96),
            B::from_dyadic(-17, -2, 96),
            B::from_i64(1, 96),
        ];
        for (k, e) in expect.iter().enumerate() {
            let c = r.coeff(k).unwrap();
            assert!(c.sub(e).abs_upper().to_f64() < 1e-25, "coeff {k}");
        }
        // p * 0 = 0
        assert!(p.mul(&P::zero()).is_zero());
    }

    #[test]
    fn stage_form_matches_dense() {
        // 3 * (w-2)^4 * (w^5 - 2^-10)
        let prec = 128;
        let f = StageForm {
            scale: B::from_i64(3, prec),
            lambda: b(2),
            damp_pow: 4,
            zero_count: 5,
            ring_t: B::from_dyadic(1, -10, prec),
        };
        let dense = P::linear(&b(2))
            .pow(4)
            .mul(&P::power_minus_dyadic(5, 1, -10, prec))
            .scale(&B::from_i64(3, prec));
        let z = B::with_rad(
            Wide::from_dyadic(3, -3, prec),
            Wide::from_dyadic(1, -2, prec),
            Wide::zero(prec),
        );
        let a = f.eval(&z);
        let bb = dense.eval(&z);
        assert!(a.sub_mid_dist_upper(&bb).to_f64() < 1e-30);
        let da = f.eval_deriv(&z);
        let db = dense.derivative().eval(&z);
        assert!(da.sub_mid_dist_upper(&db).to_f64() < 1e-28);
    }
}
