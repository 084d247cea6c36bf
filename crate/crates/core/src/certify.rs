//! Intersection certificates: the reduced scalar equation per stage, tail
//! bounds, certified transversal counts against the homological bound, and
//! the composed general-curve variant.

use crate::analysis::{
    c1_norm_upper, count_zeros_winding, locate_zeros, min_modulus_on_circle, sup_norm_upper,
    RefineOpts, ZeroEnclosure,
};
use crate::ball::Ball;
use crate::bipoly::{homogenize, BiPoly, TriHomPoly};
use crate::construction::ConstructionState;
use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::poly::{BallEval, UniPoly};
use crate::scalar::RealScalar;
use crate::wide::Dir;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// A certified statement that the stage-m curve meets the perturbed surface
/// in exactly `target_count` transversal points over the core disk, against
/// a homological bound of `bezout_bound`.
#[derive(Debug, Clone)]
pub struct IntersectionCertificate<S> {
    pub m: u32,
    pub curve_degree: u64,
    pub target_count: u64,
    pub reduced_poly: UniPoly<S>,
    /// Certified zero enclosures of the reduced equation, each lifted to the
    /// graph point (u, epsilon * phi(u)).
    pub points: Vec<LiftedPoint<S>>,
    pub tail_norm: S,
    pub delta_next: S,
    pub transversal: bool,
    /// Structural: the graph is holomorphic over the core disk, so every
    /// transversal intersection there carries positive orientation.
    pub positively_oriented: bool,
    pub bezout_bound: u64,
    pub violation_num: u64,
    pub violation_den: u64,
    /// Largest enclosure radius among the certified points.
    pub max_enclosure_radius: S,
}

#[derive(Debug, Clone)]
pub struct LiftedPoint<S> {
    pub enclosure: ZeroEnclosure<S>,
    pub second_coord: Ball<S>,
}

/// Result of the tail-bound certification for stage m.
#[derive(Debug, Clone)]
pub struct TailBound<S> {
    pub m: u32,
    pub tail_norm: S,
    pub delta_next: S,
    /// Triangle-inequality bound from the per-stage ledger.
    pub ledger_sum: S,
}

/// The reduced scalar equation for stage m: sum of Q_j for j = m+1..=M.
/// The epsilon factor cancels in the reduction, so this is epsilon-free.
pub fn reduced_equation<S: RealScalar>(
    state: &ConstructionState<S>,
    m: u32,
) -> Result<UniPoly<S>> {
    if m < 1 || m >= state.truncation {
        return Err(Error::domain(format!(
            "reduced equation needs 1 <= m < {}",
            state.truncation
        )));
    }
    let mut sum = UniPoly::zero();
    for s in state.stages.iter().filter(|s| s.m >= m + 1) {
        sum = sum.add(&s.big_q);
    }
    Ok(sum)
}

/// Certify that the C1 norm of sum_{j >= m+2} Q_j stays strictly below
/// delta_{m+1}; vacuous (empty tail) for m = M-1.
pub fn check_tail_bound<S: RealScalar>(
    state: &ConstructionState<S>,
    m: u32,
) -> Result<TailBound<S>> {
    if m < 1 || m >= state.truncation {
        return Err(Error::domain(format!(
            "tail bound needs 1 <= m < {}",
            state.truncation
        )));
    }
    let prec = state.prec;
    let delta_next = state.stage(m + 1)?.delta.clone();
    let mut ledger_sum = S::zero(prec);
    for s in state.stages.iter().filter(|s| s.m >= m + 2) {
        ledger_sum = ledger_sum.add_dir(&s.norm_c1, Dir::Up);
    }
    if m + 2 > state.truncation {
        return Ok(TailBound {
            m,
            tail_norm: S::zero(prec),
            delta_next,
            ledger_sum,
        });
    }
    let tail = state.tail_form(m + 2);
    let disk = Disk::origin(1, 0, prec);
    let tail_norm = c1_norm_upper(&tail, &disk, &RefineOpts::default(), None)?;
    if !(tail_norm < delta_next) {
        return Err(Error::precision(format!(
            "tail bound not certifiable at stage {}: {} !< {}",
            m,
            tail_norm.decimal(),
            delta_next.decimal()
        )));
    }
    Ok(TailBound {
        m,
        tail_norm,
        delta_next,
        ledger_sum,
    })
}

fn localization_radius<S: RealScalar>(prec: u32) -> S {
    // 0.55 rounded down (11/20): solutions must sit well inside the unit disk.
    S::from_i64(11, prec).div_dir(&S::from_i64(20, prec), Dir::Down)
}

/// Count, localize and lift the intersection points for stage m.
pub fn certify_intersections<S: RealScalar>(
    state: &ConstructionState<S>,
    m: u32,
) -> Result<IntersectionCertificate<S>> {
    let tail = check_tail_bound(state, m)?;
    let prec = state.prec;
    let stage_m = state.stage(m)?;
    let target = stage_m
        .a_at_d
        .to_u64()
        .ok_or_else(|| Error::domain("target count does not fit in u64"))?;
    let disk = Disk::origin(1, 0, prec);
    let reduced_form = state.tail_form(m + 1);
    let enclosures = locate_zeros(&reduced_form, &disk)?;
    if enclosures.len() as u64 != target {
        return Err(Error::certification(format!(
            "stage {}: certified count {} differs from target a_d = {}",
            m,
            enclosures.len(),
            target
        )));
    }
    // All solutions must localize near the core disk.
    let locbox = localization_radius::<S>(prec);
    let mut max_rad = S::zero(prec);
    for e in &enclosures {
        let reach = e
            .disk
            .center
            .abs_upper()
            .add_dir(&e.disk.radius, Dir::Up);
        if !(reach <= locbox) {
            return Err(Error::certification(format!(
                "stage {}: a solution enclosure escapes the localization disk",
                m
            )));
        }
        if e.disk.radius > max_rad {
            max_rad = e.disk.radius.clone();
        }
    }
    let transversal = enclosures
        .iter()
        .all(|e| e.derivative_lower_bound.certifies_positive());
    if !transversal {
        return Err(Error::certification(format!(
            "stage {}: a solution is not certifiably transversal",
            m
        )));
    }
    // Lift to the graph.
    let phi = state.phi_form(state.truncation);
    let points = enclosures
        .into_iter()
        .map(|e| {
            let u = e.disk.as_ball();
            let w2 = phi.eval(&u).mul(&state.epsilon);
            LiftedPoint {
                enclosure: e,
                second_coord: w2,
            }
        })
        .collect();
    let reduced_poly = reduced_equation(state, m)?;
    Ok(IntersectionCertificate {
        m,
        curve_degree: stage_m.d,
        target_count: target,
        reduced_poly,
        points,
        tail_norm: tail.tail_norm,
        delta_next: tail.delta_next,
        transversal,
        positively_oriented: true,
        bezout_bound: stage_m.d,
        violation_num: target,
        violation_den: stage_m.d,
        max_enclosure_radius: max_rad,
    })
}

/// Homogenization of the stage-m curve polynomial; degree d_m.
pub fn emit_curve<S: RealScalar>(state: &ConstructionState<S>, m: u32) -> Result<TriHomPoly<S>> {
    let stage = state.stage(m)?;
    let p = state.assemble_curve_poly(m)?;
    let h = homogenize(&p, stage.d as u32)?;
    debug_assert_eq!(h.degree() as u64, stage.d);
    Ok(h)
}

/// A curve accepted for the general composition: its w1-projection is
/// certified unramified of degree k over the closed unit disk.
#[derive(Debug, Clone)]
pub struct GeneralCurveSpec<S> {
    pub r_poly: BiPoly<S>,
    pub k: u64,
    /// Certified lower bound of the ramification resultant on the disk.
    pub resultant_min: S,
    /// Certified bounds of the w2-leading coefficient on the disk.
    pub lead_min: S,
    pub lead_max: S,
    /// Upper bound on |t_i(w1)| over the disk (Cauchy bound on fiber roots).
    pub fiber_root_bound: S,
    /// Certified lower bound of min_{i != l} |t_i - t_l| over the disk.
    pub branch_gap_lower: S,
}

fn certify_nonvanishing_on_unit_disk<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    what: &str,
    prec: u32,
) -> Result<()> {
    if f.degree_hint() == Some(0) {
        // Nonzero constant.
        let v = f.eval(&Ball::from_i64(0, prec));
        if v.abs_lower().certifies_positive() {
            return Ok(());
        }
        return Err(Error::domain(format!("{} vanishes identically", what)));
    }
    for margin_exp in [-6i64, -10, -14] {
        let r = S::one(prec).add_dir(&S::from_dyadic(1, margin_exp, prec), Dir::Up);
        let disk = Disk::new(Ball::zero(prec), r);
        match count_zeros_winding(f, &disk) {
            Ok(0) => return Ok(()),
            Ok(_) => {
                return Err(Error::domain(format!(
                    "{} vanishes over the closed unit disk; choose different affine coordinates",
                    what
                )))
            }
            Err(_) => continue,
        }
    }
    Err(Error::precision(format!(
        "could not certify {} as nonvanishing near the unit circle",
        what
    )))
}

/// Certify that R defines a curve whose projection to the w1-axis is
/// unramified of degree k over the closed unit disk, and compute the
/// quantitative branch-separation data used by the composed certificates.
pub fn validate_general_curve<S: RealScalar>(
    r_poly: &BiPoly<S>,
    prec: u32,
) -> Result<GeneralCurveSpec<S>> {
    let kdeg = r_poly.w2_degree();
    if kdeg < 1 {
        return Err(Error::domain("curve polynomial must depend on w2"));
    }
    let k = kdeg as u64;
    let lead = r_poly.w2_coeff_poly(kdeg as u32, prec);
    certify_nonvanishing_on_unit_disk(&lead, "the w2-leading coefficient", prec)?;
    let res = r_poly.resultant_w2_self_deriv(prec)?;
    certify_nonvanishing_on_unit_disk(&res, "the ramification resultant", prec)?;

    let disk = Disk::origin(1, 0, prec);
    let opts = RefineOpts::default();
    // Zero-free on the closed disk, so boundary minima are disk minima.
    let resultant_min = min_modulus_on_circle(&res, &disk, &opts)?;
    let lead_min = if lead.degree() == 0 {
        lead.coeff(0).unwrap().abs_lower()
    } else {
        min_modulus_on_circle(&lead, &disk, &opts)?
    };
    let lead_max = sup_norm_upper(&lead, &disk, &opts, None)?;
    if !lead_min.certifies_positive() {
        return Err(Error::precision("leading coefficient minimum not certifiable"));
    }
    // Cauchy bound on fiber roots: 1 + max_j sup|coef_j| / min|lead|.
    let one = S::one(prec);
    let mut coef_max = S::zero(prec);
    for j in 0..kdeg as u32 {
        let cj = r_poly.w2_coeff_poly(j, prec);
        let b = cj.coeff_sum_bound(&one);
        if b > coef_max {
            coef_max = b;
        }
    }
    let fiber_root_bound = one.add_dir(&coef_max.div_dir(&lead_min, Dir::Up), Dir::Up);

    // prod_{i<l} (t_i - t_l)^2 = |res| / |lead|^{2k-1}; bounding the other
    // pairs by the diameter 2*root_bound isolates the minimal gap.
    let branch_gap_lower = if k == 1 {
        S::zero(prec) // no pairs; never used
    } else {
        let mut denom = S::one(prec);
        for _ in 0..(2 * k - 1) {
            denom = denom.mul_dir(&lead_max, Dir::Up);
        }
        let diam = fiber_root_bound.mul_pow2(1, Dir::Up);
        let pairs_exp = k * (k - 1) - 2;
        for _ in 0..pairs_exp {
            denom = denom.mul_dir(&diam, Dir::Up);
        }
        let gap2 = resultant_min.div_dir(&denom, Dir::Down);
        gap2.sqrt_dir(Dir::Down)
    };
    if k >= 2 && !branch_gap_lower.certifies_positive() {
        return Err(Error::precision("branch gap lower bound not certifiable"));
    }
    Ok(GeneralCurveSpec {
        r_poly: r_poly.clone(),
        k,
        resultant_min,
        lead_min,
        lead_max,
        fiber_root_bound,
        branch_gap_lower,
    })
}

/// Certificate for the composed curve R(w1, P_m(w1, w2)) against the
/// perturbed general curve.
#[derive(Debug, Clone)]
pub struct GeneralCurveCertificate<S> {
    /// The per-branch scalar certificate (zeros of the reduced equation for
    /// the b-sequence construction).
    pub base: IntersectionCertificate<S>,
    pub k: u64,
    /// k * b_{d_m} certified transversal intersections.
    pub total_count: u64,
    /// Degree of the composed curve: k * d_m.
    pub curve_degree: u64,
    pub branch_gap_lower: S,
    /// Certified sup of the reduced series tail driving cross-branch terms.
    pub tail_sup: S,
    /// Certified admissible epsilon ceiling for cross-branch exclusion.
    pub epsilon_max: S,
    /// Certified lower bound of |dR/dw2| over all lifted points.
    pub branch_derivative_min: S,
    /// One fiber's worth of lifted points per base zero: (u, t_i + eps phi(u)).
    pub lifted: Vec<Vec<Ball<S>>>,
}

pub fn certify_general_curve_intersections<S: RealScalar>(
    spec: &GeneralCurveSpec<S>,
    b_state: &ConstructionState<S>,
    m: u32,
) -> Result<GeneralCurveCertificate<S>> {
    let base = certify_intersections(b_state, m)?;
    let prec = b_state.prec;
    let disk = Disk::origin(1, 0, prec);
    let opts = RefineOpts::default();

    // Cross-branch exclusion: eps * sup |sum_{j>m} Q_j| < branch gap.
    let tail_sup = sup_norm_upper(&b_state.tail_form(m + 1), &disk, &opts, None)?;
    let eps_up = b_state.epsilon.abs_upper();
    if spec.k >= 2 {
        let lhs = eps_up.mul_dir(&tail_sup, Dir::Up);
        if !(lhs < spec.branch_gap_lower) {
            let eps_max = spec
                .branch_gap_lower
                .div_dir(&tail_sup.mul_pow2(1, Dir::Up), Dir::Down);
            return Err(Error::domain(format!(
                "cross-branch exclusion fails: epsilon too large; maximal admissible epsilon ~ {}",
                eps_max.decimal()
            )));
        }
    }
    let epsilon_max = if spec.k >= 2 {
        spec.branch_gap_lower
            .div_dir(&tail_sup.mul_pow2(1, Dir::Up), Dir::Down)
    } else {
        S::one(prec)
    };

    // Fiber roots over each certified base zero, lifted by eps*phi(u).
    let phi = b_state.phi_form(b_state.truncation);
    let fiber_disk_r = spec
        .fiber_root_bound
        .mul_dir(&S::from_dyadic(17, -4, prec), Dir::Up);
    let dr_dw2 = spec.r_poly.deriv_w2();
    let mut lifted = Vec::with_capacity(base.points.len());
    let mut branch_deriv_min: Option<S> = None;
    for pt in &base.points {
        let u = pt.enclosure.disk.as_ball();
        let fiber = spec.r_poly.fiber_poly(&u);
        let fdisk = Disk::new(Ball::zero(prec), fiber_disk_r.clone());
        let roots = locate_zeros(&fiber, &fdisk)?;
        if roots.len() as u64 != spec.k {
            return Err(Error::certification(format!(
                "fiber over a base zero has {} certified roots, expected {}",
                roots.len(),
                spec.k
            )));
        }
        let shift = phi.eval(&u).mul(&b_state.epsilon);
        let mut pts = Vec::with_capacity(roots.len());
        for t in &roots {
            let tball = t.disk.as_ball();
            let dv = dr_dw2.eval(&u, &tball).abs_lower();
            if !dv.certifies_positive() {
                return Err(Error::certification(
                    "dR/dw2 not certifiably nonzero at a lifted point",
                ));
            }
            if branch_deriv_min.as_ref().map_or(true, |m| dv < *m) {
                branch_deriv_min = Some(dv);
            }
            pts.push(tball.add(&shift));
        }
        lifted.push(pts);
    }

    let total = spec
        .k
        .checked_mul(base.target_count)
        .ok_or_else(|| Error::domain("total count overflow"))?;
    Ok(GeneralCurveCertificate {
        k: spec.k,
        total_count: total,
        curve_degree: spec.k * base.curve_degree,
        branch_gap_lower: spec.branch_gap_lower.clone(),
        tail_sup,
        epsilon_max,
        branch_derivative_min: branch_deriv_min.unwrap_or_else(|| S::one(prec)),
        lifted,
        base,
    })
}

/// The composed polynomial R(w1, P_m(w1, w2)); degree k * d_m.
pub fn compose_curve<S: RealScalar>(
    spec: &GeneralCurveSpec<S>,
    state: &ConstructionState<S>,
    m: u32,
) -> Result<BiPoly<S>> {
    let p = state.assemble_curve_poly(m)?;
    let prec = state.prec;
    // Substitute w2 -> P(w1, w2) in R via Horner over the w2-coefficients.
    let kdeg = spec.r_poly.w2_degree();
    let mut acc = BiPoly::zero();
    for j in (0..=kdeg as u32).rev() {
        acc = acc.mul(&p);
        let cj = spec.r_poly.w2_coeff_poly(j, prec);
        for (i, c) in cj.coeffs().iter().enumerate() {
            acc.insert_add((i as u32, 0), c.clone());
        }
    }
    Ok(acc)
}

/// Residual check data for a certified point: |P_m(u, w2virt)| where w2virt
/// is the lifted second coordinate. Used by verification tests.
pub fn residual_at_point<S: RealScalar>(
    state: &ConstructionState<S>,
    m: u32,
    point: &LiftedPoint<S>,
) -> Result<S> {
    let p = state.assemble_curve_poly(m)?;
    let u = point.enclosure.disk.as_ball();
    let v = p.eval(&u, &point.second_coord);
    Ok(v.abs_upper())
}

/// Largest target count expressible; used by reports.
pub fn target_as_biguint(v: u64) -> BigUint {
    BigUint::from(v)
}
