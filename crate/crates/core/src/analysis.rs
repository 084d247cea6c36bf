//! Certified analytic facts on disks: zero counting by the argument
//! principle, zero localization with simple-zero certificates, min-modulus
//! bounds on contours, sup/C1 norm bounds, and quantitative stability radii.

use crate::ball::Ball;
use crate::contour::{circle_pieces, square_pieces, winding_number, Piece, WindingOpts};
use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::poly::BallEval;
use crate::scalar::RealScalar;
use crate::wide::Dir;

/// A disk certified to contain exactly one (simple) zero.
#[derive(Debug, Clone)]
pub struct ZeroEnclosure<S> {
    pub disk: Disk<S>,
    /// Certified positive lower bound of |f'| on a disk containing the
    /// enclosure, witnessing simplicity (and transversality downstream).
    pub derivative_lower_bound: S,
    pub simple: bool,
}

/// Exact number of zeros (with multiplicity) of `f` in the open disk.
///
/// Precondition discharged internally: |f| must certifiably exclude 0 on the
/// boundary circle, otherwise the subdivision fails with PrecisionExhausted.
pub fn count_zeros_winding<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
) -> Result<u64> {
    if f.degree_hint() == Some(-1) {
        return Err(Error::domain("zero counting on the zero polynomial"));
    }
    let pieces = circle_pieces(&disk.center, &disk.radius);
    let w = winding_number(f, &pieces, &WindingOpts::default())?;
    if w < 0 {
        return Err(Error::certification(
            "negative winding number for a polynomial",
        ));
    }
    Ok(w as u64)
}

struct CertifiedZero<S> {
    center: Ball<S>, // point ball
    radius: S,
    cert_radius: S,
    deriv_lower: S,
}

/// Newton iteration from a starting point followed by a linearization
/// certificate: on D(z, rho), |f - (f(z) + f'(z)(w - z))| <= E rho with
/// E = sup |f' - f'(z)|, so (|f'(z)| - E) rho > |f(z)| forces exactly one
/// zero in D, within U/(|f'(z)| - E) of z, with |f'| >= |f'(z)| - E on D.
fn newton_certify<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    start_re: &S,
    start_im: &S,
    scale_hint: &S,
) -> Option<CertifiedZero<S>> {
    let prec = start_re.prec();
    let mut z = Ball::from_parts(start_re.clone(), start_im.clone());
    let mut last_step = scale_hint.clone();
    for _ in 0..64 {
        let fz = f.eval(&z);
        let fpz = f.eval_deriv(&z);
        if !fpz.abs_lower().certifies_positive() {
            return None;
        }
        let step = fz.div(&fpz).ok()?;
        let snorm = step.abs_upper();
        z = Ball::from_parts(
            z.re.sub_dir(&step.re, Dir::Trunc),
            z.im.sub_dir(&step.im, Dir::Trunc),
        );
        let zmag = z.abs_upper().max_val(&S::one(prec));
        last_step = snorm.clone();
        let stop = zmag.mul_pow2(-(prec as i64) + 6, Dir::Up);
        if snorm <= stop {
            break;
        }
    }
    let fz = f.eval(&z);
    let fpz = f.eval_deriv(&z);
    let u = fz.abs_upper();
    let lz = fpz.abs_lower();
    if !lz.certifies_positive() {
        return None;
    }
    // Radius ladder: smallest rho that satisfies the contraction test.
    let floor = z
        .abs_upper()
        .max_val(&S::one(prec))
        .mul_pow2(-(prec as i64) + 4, Dir::Up);
    let mut rho = last_step.max_val(&floor);
    for _ in 0..48 {
        let disk_ball = z.inflate(&rho);
        let e = f.eval_deriv(&disk_ball).sub(&fpz).abs_upper();
        let margin = lz.sub_dir(&e, Dir::Down);
        if margin.certifies_positive() {
            let need = margin.mul_dir(&rho, Dir::Down);
            if need > u {
                let mut r_final = u.div_dir(&margin, Dir::Up);
                if r_final < floor {
                    r_final = floor.clone();
                }
                if r_final > rho {
                    r_final = rho.clone();
                }
                return Some(CertifiedZero {
                    center: z,
                    radius: r_final,
                    cert_radius: rho,
                    deriv_lower: margin,
                });
            }
        }
        rho = rho.mul_pow2(2, Dir::Up);
    }
    None
}

const JITTER_NUM: [i64; 4] = [16, 17, 19, 23];

/// Locate all zeros of `f` in the open disk as pairwise disjoint certified
/// enclosures, each containing exactly one simple zero.
///
/// Recursive square subdivision with winding counts isolates candidates,
/// Newton contraction certifies and shrinks them, and the final census is
/// checked against the boundary count. Multiple or unseparable zeros surface
/// as PrecisionExhausted.
pub fn locate_zeros<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
) -> Result<Vec<ZeroEnclosure<S>>> {
    let n = count_zeros_winding(f, disk)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = disk.center.prec().max(disk.radius.prec());
    let max_depth = 48u32;
    let square_opts = WindingOpts {
        max_depth: 60,
        max_pieces: 30_000,
    };
    // Initial square covers the disk with margin.
    let h0 = disk
        .radius
        .mul_dir(&S::from_dyadic(9, -3, prec), Dir::Up);
    let mut work: Vec<(S, S, S, u32)> =
        vec![(disk.center.re.clone(), disk.center.im.clone(), h0, 0)];
    let mut found: Vec<CertifiedZero<S>> = Vec::new();

    while let Some((cx, cy, h, depth)) = work.pop() {
        // Count zeros in the square, with dyadic jitter when a zero sits on
        // (or too near) the boundary.
        let mut count: Option<i64> = None;
        for num in JITTER_NUM {
            let hj = h.mul_dir(&S::from_dyadic(num, -4, prec), Dir::Up);
            let pieces = square_pieces(&cx, &cy, &hj);
            match winding_number(f, &pieces, &square_opts) {
                Ok(w) => {
                    count = Some(w);
                    break;
                }
                Err(_) => continue,
            }
        }
        let Some(count) = count else {
            if depth >= max_depth {
                return Err(Error::precision(
                    "zero localization: square count unresolvable at depth cap",
                ));
            }
            subdivide_square(&mut work, &cx, &cy, &h, depth);
            continue;
        };
        if count == 0 {
            continue;
        }
        if count == 1 {
            if let Some(cz) = newton_certify(f, &cx, &cy, &h) {
                // Accept only zeros that stayed near this square; otherwise
                // Newton escaped its basin and the square must be split.
                let dx = cz.center.re.sub_dir(&cx, Dir::Up).abs();
                let dy = cz.center.im.sub_dir(&cy, Dir::Up).abs();
                let lim = h.mul_pow2(1, Dir::Up);
                if dx <= lim && dy <= lim {
                    found.push(cz);
                    continue;
                }
            }
        }
        if depth >= max_depth {
            return Err(Error::precision(
                "zero localization: could not isolate a simple zero (multiple zero?)",
            ));
        }
        subdivide_square(&mut work, &cx, &cy, &h, depth);
    }

    // Deterministic order, then merge duplicates: if one certified disk
    // swallows another's enclosure, both certify the same zero.
    found.sort_by(|a, b| {
        a.center
            .re
            .partial_cmp(&b.center.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.center
                    .im
                    .partial_cmp(&b.center.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    let mut unique: Vec<CertifiedZero<S>> = Vec::new();
    'outer: for cz in found {
        for u in &mut unique {
            let d = u.center.sub_mid_dist_upper(&cz.center);
            let inside_u = d.add_dir(&cz.radius, Dir::Up) <= u.cert_radius;
            let inside_c = d.add_dir(&u.radius, Dir::Up) <= cz.cert_radius;
            if inside_u || inside_c {
                if cz.radius < u.radius {
                    *u = cz;
                }
                continue 'outer;
            }
        }
        unique.push(cz);
    }
    // Classify against the open disk.
    let mut inside: Vec<CertifiedZero<S>> = Vec::new();
    for cz in unique {
        let d = cz.center.sub_mid_dist_upper(&disk.center);
        let hi = d.add_dir(&cz.radius, Dir::Up);
        let lo = cz
            .center
            .sub_mid_dist_lower(&disk.center)
            .sub_dir(&cz.radius, Dir::Down);
        if hi < disk.radius {
            inside.push(cz);
        } else if lo > disk.radius {
            // certified outside; drop
        } else {
            return Err(Error::precision(
                "zero localization: enclosure straddles the disk boundary",
            ));
        }
    }
    if inside.len() as u64 != n {
        return Err(Error::precision(format!(
            "zero localization found {} of {} zeros",
            inside.len(),
            n
        )));
    }
    // Disjointness is part of the contract.
    for i in 0..inside.len() {
        for j in i + 1..inside.len() {
            let d = inside[i].center.sub_mid_dist_lower(&inside[j].center);
            let rr = inside[i].radius.add_dir(&inside[j].radius, Dir::Up);
            if !(d > rr) {
                return Err(Error::precision(
                    "zero localization: enclosures not certifiably disjoint",
                ));
            }
        }
    }
    Ok(inside
        .into_iter()
        .map(|cz| ZeroEnclosure {
            disk: Disk::new(cz.center, cz.radius),
            derivative_lower_bound: cz.deriv_lower,
            simple: true,
        })
        .collect())
}

fn subdivide_square<S: RealScalar>(work: &mut Vec<(S, S, S, u32)>, cx: &S, cy: &S, h: &S, depth: u32) {
    let h2 = h.mul_pow2(-1, Dir::Trunc);
    for (sx, sy) in [(-1i64, -1i64), (1, -1), (-1, 1), (1, 1)] {
        let nx = if sx > 0 {
            cx.add_dir(&h2, Dir::Trunc)
        } else {
            cx.sub_dir(&h2, Dir::Trunc)
        };
        let ny = if sy > 0 {
            cy.add_dir(&h2, Dir::Trunc)
        } else {
            cy.sub_dir(&h2, Dir::Trunc)
        };
        work.push((nx, ny, h2.clone(), depth + 1));
    }
}

#[derive(Debug, Clone)]
pub struct RefineOpts {
    pub max_splits: usize,
    /// Stop when the certified bound is within 21/20 of the sampled extremum.
    pub target_num: i64,
    pub target_den: i64,
}

impl Default for RefineOpts {
    fn default() -> Self {
        RefineOpts {
            max_splits: 20_000,
            target_num: 21,
            target_den: 20,
        }
    }
}

/// Certified positive lower bound for min |f| on the circle (adaptive arcs).
pub fn min_modulus_on_circle<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    circle: &Disk<S>,
    opts: &RefineOpts,
) -> Result<S> {
    let prec = circle.center.prec().max(circle.radius.prec());
    let tn = S::from_i64(opts.target_num, prec);
    let td = S::from_i64(opts.target_den, prec);
    let mut arcs: Vec<(Piece<S>, Option<S>)> = circle_pieces(&circle.center, &circle.radius)
        .into_iter()
        .map(|p| (p, None))
        .collect();
    // Upper bound on the true min from point samples at arc starts.
    let mut sample: Option<S> = None;
    let mut evals = |piece: &Piece<S>, sample: &mut Option<S>| -> Option<S> {
        let pt = f.eval(&piece.start_point()).abs_upper();
        if sample.as_ref().map_or(true, |s| pt < *s) {
            *sample = Some(pt);
        }
        let lo = f.eval(&piece.enclosure()).abs_lower();
        if lo.certifies_positive() {
            Some(lo)
        } else {
            None
        }
    };
    for i in 0..arcs.len() {
        arcs[i].1 = evals(&arcs[i].0, &mut sample);
    }
    for _ in 0..opts.max_splits {
        // Find the weakest arc.
        let mut worst = 0usize;
        for i in 1..arcs.len() {
            let better = match (&arcs[i].1, &arcs[worst].1) {
                (None, _) => true,
                (_, None) => false,
                (Some(a), Some(b)) => a < b,
            };
            if better {
                worst = i;
            }
        }
        if let Some(lo) = &arcs[worst].1 {
            // All arcs certified; check quality target.
            let s = sample.clone().unwrap();
            if lo.mul_dir(&tn, Dir::Down) >= s.mul_dir(&td, Dir::Up) {
                return Ok(lo.clone());
            }
            // Check plateau: if even sample can't improve much, accept.
            if lo.mul_pow2(4, Dir::Up) >= s {
                // within 16x; keep refining only while budget allows
            }
        }
        let (piece, _) = arcs.swap_remove(worst);
        let (l, r) = piece.split()?;
        let ll = evals(&l, &mut sample);
        let rl = evals(&r, &mut sample);
        arcs.push((l, ll));
        arcs.push((r, rl));
    }
    // Budget exhausted: still sound if everything certified.
    let mut min: Option<S> = None;
    for (_, lo) in &arcs {
        match lo {
            None => {
                return Err(Error::precision(
                    "min-modulus: could not exclude zero on the circle",
                ))
            }
            Some(v) => {
                if min.as_ref().map_or(true, |m| v < m) {
                    min = Some(v.clone());
                }
            }
        }
    }
    Ok(min.unwrap())
}

/// Certified upper bound for sup |f| on the closed disk.
///
/// For holomorphic f the sup over the closed disk is attained on the
/// boundary, so adaptive boundary arcs with ball evaluation give a sound
/// bound, refined toward the sampled boundary max. `early_accept` allows the
/// caller to stop as soon as the bound is good enough for its purpose.
pub fn sup_norm_upper<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
    opts: &RefineOpts,
    early_accept: Option<&S>,
) -> Result<S> {
    let prec = disk.center.prec().max(disk.radius.prec());
    let tn = S::from_i64(opts.target_num, prec);
    let td = S::from_i64(opts.target_den, prec);
    let mut arcs: Vec<(Piece<S>, S)> = Vec::new();
    let mut sample = S::zero(prec);
    for p in circle_pieces(&disk.center, &disk.radius) {
        let pt = f.eval(&p.start_point()).abs_lower();
        if pt > sample {
            sample = pt;
        }
        let up = f.eval(&p.enclosure()).abs_upper();
        arcs.push((p, up));
    }
    for _ in 0..opts.max_splits {
        let mut worst = 0usize;
        for i in 1..arcs.len() {
            if arcs[i].1 > arcs[worst].1 {
                worst = i;
            }
        }
        let bound = arcs[worst].1.clone();
        if let Some(e) = early_accept {
            if bound <= *e {
                return finite_or_err(bound);
            }
        }
        if bound.mul_dir(&td, Dir::Up) <= sample.mul_dir(&tn, Dir::Down) {
            return finite_or_err(bound);
        }
        let (piece, _) = arcs.swap_remove(worst);
        let (l, r) = piece.split()?;
        for c in [l, r] {
            let pt = f.eval(&c.start_point()).abs_lower();
            if pt > sample {
                sample = pt;
            }
            let up = f.eval(&c.enclosure()).abs_upper();
            arcs.push((c, up));
        }
    }
    let mut max = S::zero(prec);
    for (_, up) in &arcs {
        if *up > max {
            max = up.clone();
        }
    }
    finite_or_err(max)
}

fn finite_or_err<S: RealScalar>(v: S) -> Result<S> {
    if v.to_f64().is_nan() || (v.to_f64().is_infinite() && v.prec() == 53) {
        Err(Error::precision("norm bound overflowed the scalar range"))
    } else {
        Ok(v)
    }
}

/// Adapter exposing the derivative of an evaluable as an evaluable.
pub struct DerivAdapter<'a, F: ?Sized>(pub &'a F);

impl<'a, S: RealScalar, F: BallEval<S> + ?Sized> BallEval<S> for DerivAdapter<'a, F> {
    fn eval(&self, z: &Ball<S>) -> Ball<S> {
        self.0.eval_deriv(z)
    }
    fn eval_deriv(&self, _z: &Ball<S>) -> Ball<S> {
        unimplemented!("second derivatives are not used")
    }
    fn degree_hint(&self) -> Option<i64> {
        self.0.degree_hint().map(|d| (d - 1).max(-1))
    }
}

/// Certified upper bound for max(sup |f|, sup |f'|) on the closed disk.
pub fn c1_norm_upper<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
    opts: &RefineOpts,
    early_accept: Option<&S>,
) -> Result<S> {
    if f.degree_hint() == Some(-1) {
        return Ok(S::zero(disk.center.prec()));
    }
    let s0 = sup_norm_upper(f, disk, opts, early_accept)?;
    let s1 = sup_norm_upper(&DerivAdapter(f), disk, opts, early_accept)?;
    Ok(s0.max_val(&s1))
}

/// Lower bound of |f| over a full disk by recursive covering (not just its
/// boundary); used for derivative witnesses where f is not zero-free-tested.
fn abs_lower_on_disk<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    center: &Ball<S>,
    radius: &S,
    depth: u32,
    budget: &mut usize,
) -> S {
    let prec = center.prec();
    if *budget == 0 {
        return S::zero(prec);
    }
    *budget -= 1;
    let v = f.eval(&center.inflate(radius)).abs_lower();
    if v.certifies_positive() || depth == 0 {
        return v;
    }
    // Cover by four disks of 3/4 radius centered at the quadrant midpoints.
    let r2 = radius.mul_pow2(-1, Dir::Trunc);
    let r34 = radius.mul_dir(&S::from_dyadic(3, -2, prec), Dir::Up);
    let mut min: Option<S> = None;
    for (sx, sy) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
        let c = Ball::from_parts(
            if sx > 0 {
                center.re.add_dir(&r2, Dir::Trunc)
            } else {
                center.re.sub_dir(&r2, Dir::Trunc)
            },
            if sy > 0 {
                center.im.add_dir(&r2, Dir::Trunc)
            } else {
                center.im.sub_dir(&r2, Dir::Trunc)
            },
        )
        .inflate(&center.rad);
        let v = abs_lower_on_disk(f, &c, &r34, depth - 1, budget);
        if !v.certifies_positive() {
            return S::zero(prec);
        }
        if min.as_ref().map_or(true, |m| v < *m) {
            min = Some(v);
        }
    }
    min.unwrap_or_else(|| S::zero(prec))
}

/// The quantitative perturbation radius and the three certified minima
/// behind it.
#[derive(Debug, Clone)]
pub struct StabilityWitness<S> {
    pub boundary_min: S,
    pub circle_min: S,
    pub derivative_min: S,
    pub separation: S,
}

#[derive(Debug, Clone)]
pub struct StabilityRadius<S> {
    pub delta: S,
    pub witness: StabilityWitness<S>,
}

/// delta = 1/2 min( min_{boundary} |f|, min_i min_{|w-z_i|=r} |f|,
/// min_i inf_{|w-z_i|<=r} |f'| ).
///
/// Every C1 perturbation h with max(sup|h|, sup|h'|) <= delta then preserves
/// the zero count in the disk and the simplicity of all zeros: the degree of
/// f+h agrees with f on the outer boundary and on each small circle, the
/// derivative bound keeps each zero nondegenerate with positive Jacobian
/// (|f'| - |h'| >= delta > 0 inside each small disk), and between the circles
/// f+h cannot vanish because the minimum of the zero-free holomorphic f on
/// that region is attained on its boundary, where |f| >= 2 delta > |h|.
pub fn stability_radius<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    disk: &Disk<S>,
    enclosures: &[ZeroEnclosure<S>],
    separation_override: Option<S>,
    opts: &RefineOpts,
) -> Result<StabilityRadius<S>> {
    let prec = disk.center.prec().max(disk.radius.prec());
    let boundary_min = min_modulus_on_circle(f, disk, opts)?;
    if enclosures.is_empty() {
        let delta = boundary_min.mul_pow2(-1, Dir::Down);
        if !delta.certifies_positive() {
            return Err(Error::precision("stability radius not certifiably positive"));
        }
        return Ok(StabilityRadius {
            delta: delta.clone(),
            witness: StabilityWitness {
                boundary_min: boundary_min.clone(),
                circle_min: boundary_min,
                derivative_min: delta.mul_pow2(1, Dir::Down),
                separation: S::zero(prec),
            },
        });
    }
    let r = match separation_override {
        Some(r) => r,
        None => {
            // min( pairwise zero distance, distance from zeros to the
            // boundary ) / 3, from certified enclosures.
            let mut m: Option<S> = None;
            for (i, a) in enclosures.iter().enumerate() {
                let da = a.disk.center.sub_mid_dist_upper(&disk.center);
                let to_edge = disk
                    .radius
                    .sub_dir(&da.add_dir(&a.disk.radius, Dir::Up), Dir::Down);
                if m.as_ref().map_or(true, |mm| to_edge < *mm) {
                    m = Some(to_edge);
                }
                for b in enclosures.iter().skip(i + 1) {
                    let d = a
                        .disk
                        .center
                        .sub_mid_dist_lower(&b.disk.center)
                        .sub_dir(&a.disk.radius.add_dir(&b.disk.radius, Dir::Up), Dir::Down);
                    if m.as_ref().map_or(true, |mm| d < *mm) {
                        m = Some(d);
                    }
                }
            }
            let third = S::from_i64(3, prec);
            m.unwrap().div_dir(&third, Dir::Down)
        }
    };
    if !r.certifies_positive() {
        return Err(Error::precision("separation radius not certifiably positive"));
    }
    for e in enclosures {
        if !(e.disk.radius < r) {
            return Err(Error::precision(
                "separation radius does not dominate enclosure radii",
            ));
        }
    }
    let mut circle_min: Option<S> = None;
    let mut deriv_min: Option<S> = None;
    let deriv = DerivAdapter(f);
    for e in enclosures {
        let c = Disk::new(e.disk.center.clone(), r.clone());
        let cm = min_modulus_on_circle(f, &c, opts)?;
        if circle_min.as_ref().map_or(true, |m| cm < *m) {
            circle_min = Some(cm);
        }
        let mut budget = 4096usize;
        let dm = abs_lower_on_disk(&deriv, &e.disk.center, &r, 6, &mut budget);
        if !dm.certifies_positive() {
            return Err(Error::precision(
                "derivative witness not certifiably positive on a zero disk",
            ));
        }
        if deriv_min.as_ref().map_or(true, |m| dm < *m) {
            deriv_min = Some(dm);
        }
    }
    let circle_min = circle_min.unwrap();
    let deriv_min = deriv_min.unwrap();
    let delta = boundary_min
        .min_val(&circle_min)
        .min_val(&deriv_min)
        .mul_pow2(-1, Dir::Down);
    if !delta.certifies_positive() {
        return Err(Error::precision("stability radius not certifiably positive"));
    }
    Ok(StabilityRadius {
        delta,
        witness: StabilityWitness {
            boundary_min,
            circle_min,
            derivative_min: deriv_min,
            separation: r,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::Ball;
    use crate::poly::UniPoly;
    use crate::wide::Wide;

    type P = UniPoly<Wide>;
    type B = Ball<Wide>;

    fn unit_disk(prec: u32) -> Disk<Wide> {
        Disk::origin(1, 0, prec)
    }

    #[test]
    fn count_three_cube_roots() {
        // w^3 - (1/4)^3 on B_{1/2}: three roots of modulus 1/4.
        let p = P::power_minus_dyadic(3, 1, -6, 96);
        let d = Disk::origin(1, -1, 96);
        assert_eq!(count_zeros_winding(&p, &d).unwrap(), 3);
    }

    #[test]
    fn count_far_root_zero() {
        let p = P::linear(&B::from_i64(2, 96)).pow(6);
        assert_eq!(count_zeros_winding(&p, &unit_disk(96)).unwrap(), 0);
    }

    #[test]
    fn count_rejects_zero_polynomial() {
        let p = P::zero();
        assert!(matches!(
            count_zeros_winding(&p, &unit_disk(96)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn locate_two_simple_roots() {
        // w^2 - 1/16 on B_{1/2}: roots +-1/4.
        let p = P::power_minus_dyadic(2, 1, -4, 96);
        let d = Disk::origin(1, -1, 96);
        let zs = locate_zeros(&p, &d).unwrap();
        assert_eq!(zs.len(), 2);
        for z in &zs {
            assert!(z.simple);
            assert!(z.derivative_lower_bound.certifies_positive());
            let re = z.disk.center.re.to_f64();
            assert!((re.abs() - 0.25).abs() < 1e-12);
            assert!(z.disk.radius.to_f64() < 1e-10);
        }
    }

    #[test]
    fn locate_double_root_exhausts() {
        // w^2 on B_{1/2}: a double zero must be reported as PrecisionExhausted.
        let p = P::from_coeffs(vec![B::zero(96), B::zero(96), B::from_i64(1, 96)]);
        let d = Disk::origin(1, -1, 96);
        assert!(matches!(
            locate_zeros(&p, &d),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn min_modulus_identity_converges() {
        let p = P::from_coeffs(vec![B::zero(96), B::from_i64(1, 96)]);
        let m = min_modulus_on_circle(&p, &unit_disk(96), &RefineOpts::default()).unwrap();
        let v = m.to_f64();
        assert!(v > 0.9 && v <= 1.0, "{v}");
    }

    #[test]
    fn min_modulus_shifted_root() {
        // p = w - 1/4 on |w| = 1/2: true min is 1/4 at w = 1/2.
        let p = P::linear(&B::from_dyadic(1, -2, 96));
        let m = min_modulus_on_circle(&p, &Disk::origin(1, -1, 96), &RefineOpts::default())
            .unwrap();
        assert!(m.to_f64() <= 0.25 && m.to_f64() > 0.2, "{}", m.to_f64());
    }

    #[test]
    fn sup_norm_identity_tight() {
        let p = P::from_coeffs(vec![B::zero(96), B::from_i64(1, 96)]);
        let s = sup_norm_upper(&p, &unit_disk(96), &RefineOpts::default(), None).unwrap();
        assert!(s.to_f64() >= 1.0 && s.to_f64() <= 1.05, "{}", s.to_f64());
        let c1 = c1_norm_upper(&p, &unit_disk(96), &RefineOpts::default(), None).unwrap();
        assert!(c1.to_f64() >= 1.0 && c1.to_f64() <= 1.05);
        // zero polynomial -> 0
        let z = c1_norm_upper(&P::zero(), &unit_disk(96), &RefineOpts::default(), None).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn stability_radius_of_identity() {
        // p = w on the unit disk with explicit separation 1/4:
        // delta = 1/2 min(1, 1/4, 1) = 1/8.
        let p = P::from_coeffs(vec![B::zero(128), B::from_i64(1, 128)]);
        let d = unit_disk(128);
        let zs = locate_zeros(&p, &d).unwrap();
        assert_eq!(zs.len(), 1);
        let sr = stability_radius(
            &p,
            &d,
            &zs,
            Some(Wide::from_dyadic(1, -2, 128)),
            &RefineOpts::default(),
        )
        .unwrap();
        let delta = sr.delta.to_f64();
        assert!(delta <= 0.125 && delta > 0.119, "{delta}");
        // perturb by the constant delta/2: count must stay 1
        let h = sr.delta.mul_pow2(-1, Dir::Down);
        let ph = p.add(&P::from_coeffs(vec![Ball::from_parts(
            h,
            Wide::zero(128),
        )]));
        assert_eq!(count_zeros_winding(&ph, &d).unwrap(), 1);
    }
}
