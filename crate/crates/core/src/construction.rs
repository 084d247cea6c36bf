//! The iterative stage construction: auxiliary polynomials with prescribed
//! simple zeros, damped and rescaled so that a cascade of certified C1-norm
//! bounds holds, together with the bump profile and the perturbed-embedding
//! sampler built from the truncated series.

use crate::analysis::{
    c1_norm_upper, locate_zeros, stability_radius, RefineOpts, StabilityRadius, ZeroEnclosure,
};
use crate::ball::Ball;
use crate::bipoly::BiPoly;
use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::poly::{BallEval, StageForm, SumForm, UniPoly};
use crate::scalar::RealScalar;
use crate::wide::Dir;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// A total map d -> a_d over the positive integers with a_d >= 1.
#[derive(Clone)]
pub struct SequenceSpec {
    eval: std::sync::Arc<dyn Fn(u64) -> Result<BigUint> + Send + Sync>,
    pub describe: String,
}

impl std::fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SequenceSpec({})", self.describe)
    }
}

impl SequenceSpec {
    pub fn new(
        describe: impl Into<String>,
        eval: impl Fn(u64) -> Result<BigUint> + Send + Sync + 'static,
    ) -> Self {
        SequenceSpec {
            eval: std::sync::Arc::new(eval),
            describe: describe.into(),
        }
    }

    pub fn value(&self, d: u64) -> Result<BigUint> {
        let v = (self.eval)(d)?;
        if v.is_zero_ref() {
            return Err(Error::domain(format!(
                "sequence value a_{} is not positive",
                d
            )));
        }
        Ok(v)
    }

    /// a_d as a construction-sized integer (polynomial degrees must fit).
    pub fn value_usize(&self, d: u64) -> Result<usize> {
        let v = self.value(d)?;
        v.to_usize()
            .filter(|&n| n <= 1 << 20)
            .ok_or_else(|| Error::domain(format!("sequence value a_{} too large to construct", d)))
    }

    /// The transformed sequence b_d = a_{k d} used for general-curve runs.
    pub fn compose_scale(&self, k: u64) -> SequenceSpec {
        let inner = self.clone();
        SequenceSpec::new(format!("{} at {}*d", self.describe, k), move |d| {
            (inner.eval)(k.checked_mul(d).ok_or_else(|| {
                Error::domain("sequence index overflow in b_d = a_{k d}")
            })?)
        })
    }
}

trait IsZeroRef {
    fn is_zero_ref(&self) -> bool;
}
impl IsZeroRef for BigUint {
    fn is_zero_ref(&self) -> bool {
        use num_traits::Zero;
        self.is_zero()
    }
}

/// One construction step.
#[derive(Debug, Clone)]
pub struct Stage<S> {
    pub m: u32,
    /// Auxiliary polynomial with exactly a_{d_{m-1}} simple zeros in B_{1/2}.
    pub q: UniPoly<S>,
    /// The scaled stage polynomial c * (w - lambda)^{2 d_{m-1}} * q.
    pub big_q: UniPoly<S>,
    /// Same polynomial in factored form for fast evaluation.
    pub form: Option<StageForm<S>>,
    pub c: S,
    /// d_m = deg(big_q); d_1 = 1 by convention.
    pub d: u64,
    /// Certified perturbation radius; 1 by convention for stage 1.
    pub delta: S,
    pub a_at_d: BigUint,
    /// Certified C1 bound for big_q on the unit disk (0 for stage 1).
    pub norm_c1: S,
    /// Certified sup bound for big_q on the unit disk (0 for stage 1).
    pub norm_sup: S,
    /// The bound the cascade requires: 2^{-m} min(delta_1..delta_{m-1}).
    pub cascade_cap: S,
    /// Certified enclosures of the stage polynomial's zeros in B.
    pub enclosures: Vec<ZeroEnclosure<S>>,
    pub stability: Option<StabilityRadius<S>>,
}

/// The full truncated construction.
#[derive(Debug, Clone)]
pub struct ConstructionState<S> {
    pub stages: Vec<Stage<S>>,
    pub lambda: Ball<S>,
    pub sequence: SequenceSpec,
    pub truncation: u32,
    pub epsilon: Ball<S>,
    pub prec: u32,
}

/// Mutations used by the failure-injection tests: scale c_m by 2^pow2 after
/// the honest value is computed. The cascade check must then fail.
#[derive(Debug, Clone, Copy)]
pub enum BuildMutation {
    InflateC { stage: u32, pow2: i64 },
}

/// w^n - (1/4)^n: n simple zeros equally spaced on the circle of radius 1/4.
pub fn make_q<S: RealScalar>(zero_count: usize, prec: u32) -> Result<UniPoly<S>> {
    if zero_count == 0 {
        return Err(Error::domain("make_q requires a positive zero count"));
    }
    let n = zero_count;
    Ok(UniPoly::power_minus_dyadic(n, 1, -2 * (n as i64), prec))
}

/// The degree recurrence d_m = 2 d_{m-1} + a_{d_{m-1}} without building
/// anything; used for preflight sizing and reports.
pub fn plan_degrees(seq: &SequenceSpec, truncation: u32) -> Result<Vec<(u64, BigUint)>> {
    let mut out = Vec::new();
    let mut d = 1u64;
    out.push((d, seq.value(d)?));
    for _ in 2..=truncation {
        let a_prev = seq.value_usize(d)? as u64;
        d = d
            .checked_mul(2)
            .and_then(|x| x.checked_add(a_prev))
            .ok_or_else(|| Error::domain("degree recurrence overflow"))?;
        if d > 1 << 22 {
            return Err(Error::domain(format!(
                "stage degree {} too large to construct",
                d
            )));
        }
        out.push((d, seq.value(d)?));
    }
    Ok(out)
}

fn unit_disk<S: RealScalar>(prec: u32) -> Disk<S> {
    Disk::origin(1, 0, prec)
}

/// Build stage m >= 2 given stages 1..m-1.
fn make_stage<S: RealScalar>(
    stages: &[Stage<S>],
    m: u32,
    lambda: &Ball<S>,
    seq: &SequenceSpec,
    prec: u32,
    mutation: Option<&BuildMutation>,
) -> Result<Stage<S>> {
    let prev = stages.last().expect("make_stage needs stage m-1");
    let d_prev = prev.d;
    let zero_count = seq.value_usize(d_prev)?;
    let q = make_q::<S>(zero_count, prec)?;

    // Unscaled product (w - lambda)^{2 d_{m-1}} q, evaluated in factored form.
    let unscaled = StageForm {
        scale: Ball::from_i64(1, prec),
        lambda: lambda.clone(),
        damp_pow: 2 * d_prev,
        zero_count: zero_count as u64,
        ring_t: Ball::from_dyadic(1, -2 * zero_count as i64, prec),
    };
    let disk = unit_disk::<S>(prec);
    let opts = RefineOpts::default();
    let norm_unscaled = c1_norm_upper(&unscaled, &disk, &opts, None)?;
    if !norm_unscaled.certifies_positive() {
        return Err(Error::precision("unscaled stage norm not certifiable"));
    }

    // min over previous deltas; delta_1 = 1 caps the sequence.
    let mut min_delta = stages[0].delta.clone();
    for s in stages.iter().skip(1) {
        min_delta = min_delta.min_val(&s.delta);
    }
    // c_m = 2^{-(m+1)} min_delta / N: half the cascade budget, so the strict
    // inequality below is certifiable with a factor-2 margin.
    let mut c = min_delta
        .mul_pow2(-(m as i64) - 1, Dir::Down)
        .div_dir(&norm_unscaled, Dir::Down);
    if let Some(BuildMutation::InflateC { stage, pow2 }) = mutation {
        if *stage == m {
            c = c.mul_pow2(*pow2, Dir::Up);
        }
    }
    if !c.certifies_positive() {
        return Err(Error::precision("stage scale underflowed the scalar range"));
    }

    let form = StageForm {
        scale: Ball::from_parts(c.clone(), S::zero(prec)),
        lambda: lambda.clone(),
        damp_pow: 2 * d_prev,
        zero_count: zero_count as u64,
        ring_t: Ball::from_dyadic(1, -2 * zero_count as i64, prec),
    };
    let d = 2 * d_prev + zero_count as u64;

    // Certify the cascade inequality with an independent norm bound of the
    // scaled polynomial (this is the check the mutation test must trip).
    let cascade_cap = min_delta.mul_pow2(-(m as i64), Dir::Down);
    let norm_c1 = c1_norm_upper(&form, &disk, &opts, Some(&cascade_cap))?;
    if !(norm_c1 < cascade_cap) {
        return Err(Error::certification(format!(
            "cascade inequality failed at stage {}: |Q|_C1 = {} !< {}",
            m,
            norm_c1.decimal(),
            cascade_cap.decimal()
        )));
    }
    let norm_sup = sup_only(&form, &disk, &opts)?;

    // Zeros of the stage polynomial inside B are exactly the zeros of q
    // (the damping factor has its zero at lambda, outside); certify that and
    // the stability radius.
    let enclosures = locate_zeros(&form, &disk)?;
    if enclosures.len() != zero_count {
        return Err(Error::certification(format!(
            "stage {} has {} certified zeros in B, expected {}",
            m,
            enclosures.len(),
            zero_count
        )));
    }
    let stability = stability_radius(&form, &disk, &enclosures, None, &opts)?;

    // Dense expansion for reports, homogenization and ring arithmetic.
    let damp = UniPoly::linear(lambda).pow(2 * d_prev);
    let big_q = damp.mul(&q).scale(&Ball::from_parts(c.clone(), S::zero(prec)));
    debug_assert_eq!(big_q.degree(), d as i64);

    Ok(Stage {
        m,
        q,
        big_q,
        form: Some(form),
        c,
        d,
        delta: stability.delta.clone(),
        a_at_d: seq.value(d)?,
        norm_c1,
        norm_sup,
        cascade_cap,
        enclosures,
        stability: Some(stability),
    })
}

fn sup_only<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
    opts: &RefineOpts,
) -> Result<S> {
    crate::analysis::sup_norm_upper(f, disk, opts, None)
}

/// Build the full truncated construction.
///
/// Stage 1 is conventional: the zero polynomial with d_1 = 1 and delta_1 = 1.
pub fn build_stages<S: RealScalar>(
    seq: &SequenceSpec,
    truncation: u32,
    lambda: &Ball<S>,
    epsilon: &Ball<S>,
    prec: u32,
    mutation: Option<&BuildMutation>,
) -> Result<ConstructionState<S>> {
    if truncation < 2 {
        return Err(Error::domain("truncation depth must be at least 2"));
    }
    if !lambda.abs_lower().certifies_positive() || !(lambda.abs_lower() > S::one(prec)) {
        return Err(Error::domain("|lambda| > 1 is required (certified)"));
    }
    if !epsilon.re.certifies_positive() || epsilon.im.sign() != 0 {
        return Err(Error::domain("epsilon must be a positive real"));
    }
    // Preflight the whole degree plan so oversized sequences fail fast.
    plan_degrees(seq, truncation)?;

    let stage1 = Stage {
        m: 1,
        q: UniPoly::zero(),
        big_q: UniPoly::zero(),
        form: None,
        c: S::one(prec),
        d: 1,
        delta: S::one(prec),
        a_at_d: seq.value(1)?,
        norm_c1: S::zero(prec),
        norm_sup: S::zero(prec),
        cascade_cap: S::zero(prec),
        enclosures: Vec::new(),
        stability: None,
    };
    let mut stages = vec![stage1];
    for m in 2..=truncation {
        let s = make_stage(&stages, m, lambda, seq, prec, mutation)?;
        stages.push(s);
    }
    Ok(ConstructionState {
        stages,
        lambda: lambda.clone(),
        sequence: seq.clone(),
        truncation,
        epsilon: epsilon.clone(),
        prec,
    })
}

impl<S: RealScalar> ConstructionState<S> {
    pub fn stage(&self, m: u32) -> Result<&Stage<S>> {
        self.stages
            .get((m - 1) as usize)
            .ok_or_else(|| Error::domain(format!("stage {} out of range", m)))
    }

    /// Evaluable for the truncated series phi = sum Q_j, j = 1..=upto.
    pub fn phi_form(&self, upto: u32) -> SumForm<'_, S> {
        let terms: Vec<&dyn BallEval<S>> = self
            .stages
            .iter()
            .take(upto as usize)
            .filter_map(|s| s.form.as_ref().map(|f| f as &dyn BallEval<S>))
            .collect();
        SumForm {
            terms,
            prec: self.prec,
        }
    }

    /// Evaluable for the series tail sum Q_j, j = from..=truncation.
    pub fn tail_form(&self, from: u32) -> SumForm<'_, S> {
        let terms: Vec<&dyn BallEval<S>> = self
            .stages
            .iter()
            .filter(|s| s.m >= from)
            .filter_map(|s| s.form.as_ref().map(|f| f as &dyn BallEval<S>))
            .collect();
        SumForm {
            terms,
            prec: self.prec,
        }
    }

    /// phi evaluated at a point/ball.
    pub fn phi_at(&self, z: &Ball<S>) -> Ball<S> {
        self.phi_form(self.truncation).eval(z)
    }

    /// P_{m} = w2 - epsilon * sum_{j<=m} Q_j(w1); total degree d_m for m >= 2.
    pub fn assemble_curve_poly(&self, m: u32) -> Result<BiPoly<S>> {
        if m < 1 || m > self.truncation {
            return Err(Error::domain(format!("stage {} out of range", m)));
        }
        let prec = self.prec;
        let mut sum = UniPoly::zero();
        for s in self.stages.iter().take(m as usize) {
            sum = sum.add(&s.big_q);
        }
        let scaled = sum.scale(&self.epsilon).neg();
        let mut p = BiPoly::zero();
        p.insert_add((0, 1), Ball::from_i64(1, prec));
        for (i, c) in scaled.coeffs().iter().enumerate() {
            p.insert_add((i as u32, 0), c.clone());
        }
        Ok(p)
    }

    /// Certified upper bounds (sup and C1) of the whole perturbation
    /// epsilon * phi from the stage ledger; both come out below epsilon
    /// because the cascade caps sum below 1.
    pub fn perturbation_bounds(&self) -> (S, S) {
        let prec = self.prec;
        let mut sup = S::zero(prec);
        let mut c1 = S::zero(prec);
        for s in &self.stages {
            sup = sup.add_dir(&s.norm_sup, Dir::Up);
            c1 = c1.add_dir(&s.norm_c1, Dir::Up);
        }
        let eps_up = self.epsilon.abs_upper();
        (sup.mul_dir(&eps_up, Dir::Up), c1.mul_dir(&eps_up, Dir::Up))
    }
}

/// Smooth radial bump: 1 on B_{1/2}, 0 outside B_{2/3}, strictly between on
/// the annulus. The in/out classification is exact (dyadic comparisons of
/// |w|^2 against 1/4 and 4/9); the transition profile itself is plot-grade
/// f64, which is all the sampler needs since no certificate depends on it.
pub fn bump_rho(re: f64, im: f64) -> f64 {
    let r2 = re * re + im * im;
    if r2 * 4.0 <= 1.0 {
        return 1.0;
    }
    if r2 * 9.0 >= 4.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    // g(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}), t = (2/3 - r) / (1/6)
    let t = ((2.0 / 3.0) - r) * 6.0;
    let t = t.clamp(1e-12, 1.0 - 1e-12);
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Classification of a sample point for the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRegion {
    Core,    // |w| <= 1/2: graph of the holomorphic epsilon*phi
    Annulus, // 1/2 < |w| < 2/3
    Outside, // |w| >= 2/3: unperturbed inclusion
}

/// Exact region classification for dyadic grid points: compares |w|^2 with
/// (1/2)^2 and (2/3)^2 in exact arithmetic.
pub fn classify_sample<S: RealScalar>(re: &S, im: &S) -> SampleRegion {
    let prec = re.prec();
    let r2 = re
        .mul_dir(re, Dir::Trunc)
        .add_dir(&im.mul_dir(im, Dir::Trunc), Dir::Trunc);
    // dyadic grid squares are exact; 9 r^2 vs 4 and 4 r^2 vs 1 decide it
    let nine = S::from_i64(9, prec);
    let four = S::from_i64(4, prec);
    if r2.mul_dir(&four, Dir::Trunc) <= S::one(prec) {
        SampleRegion::Core
    } else if r2.mul_dir(&nine, Dir::Trunc) >= four {
        SampleRegion::Outside
    } else {
        SampleRegion::Annulus
    }
}

/// The embedded point over w in the affine chart: (w, epsilon rho(w) phi(w)).
///
/// Exactly (w, epsilon phi(w)) on the closed core disk and exactly (w, 0)
/// outside B_{2/3}; the annulus uses the f64 bump profile.
pub fn sample_embedding<S: RealScalar>(
    state: &ConstructionState<S>,
    re: &S,
    im: &S,
) -> (Ball<S>, Ball<S>) {
    let w = Ball::from_parts(re.clone(), im.clone());
    match classify_sample(re, im) {
        SampleRegion::Outside => (w.clone(), Ball::zero(state.prec)),
        SampleRegion::Core => {
            let phi = state.phi_at(&w);
            (w.clone(), phi.mul(&state.epsilon))
        }
        SampleRegion::Annulus => {
            let rho = bump_rho(re.to_f64(), im.to_f64());
            let phi = state.phi_at(&w);
            // f64 profile value scaled in; fold its quantization into a ball
            let rho_s = S::from_dyadic((rho * (1u64 << 53) as f64) as i64, -53, state.prec);
            (w.clone(), phi.mul(&state.epsilon).scale_real(&rho_s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wide::Wide;

    fn seq_square() -> SequenceSpec {
        SequenceSpec::new("d^2", |d| Ok(BigUint::from(d) * BigUint::from(d)))
    }

    fn seq_id() -> SequenceSpec {
        SequenceSpec::new("d", |d| Ok(BigUint::from(d)))
    }

    #[test]
    fn make_q_profiles() {
        let q = make_q::<Wide>(1, 96).unwrap();
        assert_eq!(q.degree(), 1);
        assert_eq!(q.coeff(0).unwrap().re.to_f64(), -0.25);
        let q3 = make_q::<Wide>(3, 96).unwrap();
        assert_eq!(q3.degree(), 3);
        assert_eq!(q3.coeff(0).unwrap().re.to_f64(), -1.0 / 64.0);
        assert!(make_q::<Wide>(0, 96).is_err());
    }

    #[test]
    fn degree_plan_square_sequence() {
        // a_d = d^2: d = 1, 3, 15, 255
        let plan = plan_degrees(&seq_square(), 4).unwrap();
        let ds: Vec<u64> = plan.iter().map(|(d, _)| *d).collect();
        assert_eq!(ds, vec![1, 3, 15, 255]);
        assert_eq!(plan[2].1, BigUint::from(225u32));
    }

    #[test]
    fn degree_plan_identity_telescopes() {
        // a_d = d: d_m = 3^{m-1}
        let plan = plan_degrees(&seq_id(), 6).unwrap();
        let ds: Vec<u64> = plan.iter().map(|(d, _)| *d).collect();
        assert_eq!(ds, vec![1, 3, 9, 27, 81, 243]);
    }

    #[test]
    fn bump_three_regimes() {
        assert_eq!(bump_rho(0.3, 0.0), 1.0);
        assert_eq!(bump_rho(0.0, 0.9), 0.0);
        let mid = bump_rho(0.58, 0.0);
        assert!(mid > 0.0 && mid < 1.0, "{mid}");
    }

    #[test]
    fn classify_exact_boundaries() {
        let half = Wide::from_dyadic(1, -1, 96);
        assert_eq!(
            classify_sample(&half, &Wide::zero(96)),
            SampleRegion::Core
        );
        let big = Wide::from_dyadic(7, -3, 96); // 0.875
        assert_eq!(
            classify_sample(&big, &Wide::zero(96)),
            SampleRegion::Outside
        );
        let mid = Wide::from_dyadic(19, -5, 96); // 0.59375
        assert_eq!(
            classify_sample(&mid, &Wide::zero(96)),
            SampleRegion::Annulus
        );
    }

    #[test]
    fn minimal_build_m2() {
        let lambda = Ball::from_i64(2, 128);
        let eps = Ball::from_dyadic(1, -10, 128);
        let st =
            build_stages::<Wide>(&seq_square(), 2, &lambda, &eps, 128, None).unwrap();
        assert_eq!(st.stages.len(), 2);
        let s2 = &st.stages[1];
        assert_eq!(s2.d, 3);
        assert_eq!(s2.q.degree(), 1);
        assert!(s2.norm_c1 < s2.cascade_cap);
        assert!(s2.delta.certifies_positive());
        assert_eq!(s2.enclosures.len(), 1);
        // the single zero sits near 1/4
        let z = &s2.enclosures[0];
        assert!((z.disk.center.re.to_f64() - 0.25).abs() < 1e-12);
        // Q_2(0) = c * (0-2)^2 * (0-1/4) = -c
        let v = s2.form.as_ref().unwrap().eval(&Ball::from_i64(0, 128));
        assert!((v.re.to_f64() + s2.c.to_f64()).abs() < s2.c.to_f64() * 1e-10);
    }

    #[test]
    fn lambda_inside_disk_rejected() {
        let lambda = Ball::from_dyadic(1, -1, 128);
        let eps = Ball::from_dyadic(1, -10, 128);
        assert!(build_stages::<Wide>(&seq_square(), 2, &lambda, &eps, 128, None).is_err());
    }
}
