//! Certified winding numbers along circles and square boundaries.
//!
//! A contour is a cyclic list of pieces (circular arcs or straight segments).
//! Each piece is adaptively bisected until the image of its enclosing ball
//! under the evaluated function excludes zero and subtends an argument width
//! of at most pi/4 (radius <= sin(pi/8) * |midpoint|). The winding number is
//! then read off combinatorially: every image ball is assigned the interval
//! of eighth-plane sectors it can touch, consecutive intervals are lifted to
//! the integer line (the lift is unique because widths stay below a half
//! turn), and the total lift gained around the contour is 8 x the winding
//! number. No transcendental function is ever evaluated, so the scheme works
//! unchanged over both scalar backends.

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::poly::BallEval;
use crate::scalar::RealScalar;
use crate::wide::Dir;

/// sin(pi/8) rounded down: 25079/2^16 = 0.38267... < 0.3826834...
const SUBTEND_NUM: i64 = 25079;
const SUBTEND_EXP: i64 = -16;

#[derive(Debug, Clone)]
pub enum Piece<S> {
    /// Counterclockwise arc of the circle `center + radius * e^{i t}` from
    /// unit direction `a` to `b`; central angle at most a quarter turn.
    Arc {
        center: Ball<S>,
        radius: S,
        a: Ball<S>,
        b: Ball<S>,
    },
    /// Straight segment from `a` to `b`.
    Seg { a: Ball<S>, b: Ball<S> },
}

impl<S: RealScalar> Piece<S> {
    /// A ball containing every point of the piece.
    pub fn enclosure(&self) -> Ball<S> {
        match self {
            Piece::Arc {
                center,
                radius,
                a,
                b,
            } => {
                // Chord midpoint in unit space; the farthest arc points from
                // it are the endpoints (for central angle <= pi/2), at
                // distance half the chord.
                let m = a.add(b).scale_pow2(-1);
                let h = a.sub(b).abs_upper().mul_pow2(-1, Dir::Up);
                let c = center.add(&m.scale_real(radius));
                c.inflate(&radius.mul_dir(&h, Dir::Up))
            }
            Piece::Seg { a, b } => {
                let m = a.add(b).scale_pow2(-1);
                let h = a.sub(b).abs_upper().mul_pow2(-1, Dir::Up);
                m.inflate(&h)
            }
        }
    }

    pub fn start(&self) -> &Ball<S> {
        match self {
            Piece::Arc { a, .. } | Piece::Seg { a, .. } => a,
        }
    }

    /// The start point as a point in the plane (arcs store unit directions).
    pub fn start_point(&self) -> Ball<S> {
        match self {
            Piece::Arc {
                center, radius, a, ..
            } => center.add(&a.scale_real(radius)),
            Piece::Seg { a, .. } => a.clone(),
        }
    }

    pub fn split(&self) -> Result<(Piece<S>, Piece<S>)> {
        match self {
            Piece::Arc {
                center,
                radius,
                a,
                b,
            } => {
                let s = a.add(b);
                let lo = s.abs_lower();
                let hi = s.abs_upper();
                if !lo.certifies_positive() {
                    return Err(Error::precision("arc midpoint direction degenerate"));
                }
                let mid = lo.add_dir(&hi, Dir::Trunc).mul_pow2(-1, Dir::Trunc);
                let rad = hi
                    .sub_dir(&lo, Dir::Up)
                    .mul_pow2(-1, Dir::Up)
                    .add_dir(&mid.ulp_up(), Dir::Up);
                let norm = Ball::with_rad(mid, S::zero(s.prec()), rad);
                let um = s.div(&norm)?;
                Ok((
                    Piece::Arc {
                        center: center.clone(),
                        radius: radius.clone(),
                        a: a.clone(),
                        b: um.clone(),
                    },
                    Piece::Arc {
                        center: center.clone(),
                        radius: radius.clone(),
                        a: um,
                        b: b.clone(),
                    },
                ))
            }
            Piece::Seg { a, b } => {
                let m = a.add(b).scale_pow2(-1);
                Ok((
                    Piece::Seg {
                        a: a.clone(),
                        b: m.clone(),
                    },
                    Piece::Seg { a: m, b: b.clone() },
                ))
            }
        }
    }
}

/// Counterclockwise circle as four quarter arcs.
pub fn circle_pieces<S: RealScalar>(center: &Ball<S>, radius: &S) -> Vec<Piece<S>> {
    let prec = center.prec().max(radius.prec());
    let dirs = [
        (1i64, 0i64),
        (0, 1),
        (-1, 0),
        (0, -1),
    ];
    let units: Vec<Ball<S>> = dirs
        .iter()
        .map(|&(x, y)| {
            Ball::from_parts(S::from_i64(x, prec), S::from_i64(y, prec))
        })
        .collect();
    (0..4)
        .map(|k| Piece::Arc {
            center: center.clone(),
            radius: radius.clone(),
            a: units[k].clone(),
            b: units[(k + 1) % 4].clone(),
        })
        .collect()
}

/// Counterclockwise boundary of the square |Re z - cx| <= h, |Im z - cy| <= h.
pub fn square_pieces<S: RealScalar>(cx: &S, cy: &S, h: &S) -> Vec<Piece<S>> {
    let prec = cx.prec();
    let p = |x: S, y: S| Ball::from_parts(x, y);
    let xm = cx.sub_dir(h, Dir::Trunc);
    let xp = cx.add_dir(h, Dir::Trunc);
    let ym = cy.sub_dir(h, Dir::Trunc);
    let yp = cy.add_dir(h, Dir::Trunc);
    let _ = prec;
    let c1 = p(xp.clone(), ym.clone());
    let c2 = p(xp, yp.clone());
    let c3 = p(xm.clone(), yp);
    let c4 = p(xm, ym);
    vec![
        Piece::Seg {
            a: c1.clone(),
            b: c2.clone(),
        },
        Piece::Seg {
            a: c2,
            b: c3.clone(),
        },
        Piece::Seg {
            a: c3,
            b: c4.clone(),
        },
        Piece::Seg { a: c4, b: c1 },
    ]
}

#[derive(Debug, Clone)]
pub struct WindingOpts {
    pub max_depth: u32,
    pub max_pieces: usize,
}

impl Default for WindingOpts {
    fn default() -> Self {
        WindingOpts {
            max_depth: 72,
            max_pieces: 120_000,
        }
    }
}

/// Sector interval (base octant plus length) a ball's argument can touch.
fn octant_interval<S: RealScalar>(v: &Ball<S>) -> Option<(i64, i64)> {
    let prec = v.prec();
    // Interval signs of x, y, y - x, y + x over the disk ball.
    let sqrt2_up = S::from_dyadic(92682, -16, prec); // 1.41427... >= sqrt(2)
    let r2 = v.rad.mul_dir(&sqrt2_up, Dir::Up);
    let iv = |mid_lo: S, mid_hi: S, r: &S| -> i8 {
        let lo = mid_lo.sub_dir(r, Dir::Down);
        let hi = mid_hi.add_dir(r, Dir::Up);
        if lo.sign() > 0 {
            1
        } else if hi.sign() < 0 {
            -1
        } else {
            0
        }
    };
    let sx = iv(v.re.clone(), v.re.clone(), &v.rad);
    let sy = iv(v.im.clone(), v.im.clone(), &v.rad);
    let d1m = v.im.sub_dir(&v.re, Dir::Down);
    let d1p = v.im.sub_dir(&v.re, Dir::Up);
    let sd1 = iv(d1m, d1p, &r2);
    let d2m = v.im.add_dir(&v.re, Dir::Down);
    let d2p = v.im.add_dir(&v.re, Dir::Up);
    let sd2 = iv(d2m, d2p, &r2);

    // Octant k covers arguments in [k pi/4, (k+1) pi/4].
    let can = |s: i8, want_nonneg: bool| -> bool {
        if want_nonneg {
            s >= 0
        } else {
            s <= 0
        }
    };
    let touch = [
        can(sx, true) && can(sy, true) && can(sd1, false),
        can(sx, true) && can(sy, true) && can(sd1, true),
        can(sx, false) && can(sy, true) && can(sd2, true),
        can(sx, false) && can(sy, true) && can(sd2, false),
        can(sx, false) && can(sy, false) && can(sd1, true),
        can(sx, false) && can(sy, false) && can(sd1, false),
        can(sx, true) && can(sy, false) && can(sd2, false),
        can(sx, true) && can(sy, false) && can(sd2, true),
    ];
    // Minimal cyclic interval covering the touched set.
    let count = touch.iter().filter(|&&t| t).count();
    if count == 0 || count > 4 {
        return None;
    }
    let mut best: Option<(i64, i64)> = None;
    for start in 0..8usize {
        if !touch[start] {
            continue;
        }
        // Walk forward while touched, wrapping.
        let mut len = 1i64;
        while len < 8 && touch[(start + len as usize) % 8] {
            len += 1;
        }
        // Valid cover iff it includes every touched octant.
        if len as usize >= count {
            let covered = (0..len as usize).map(|t| (start + t) % 8);
            let all: Vec<usize> = covered.collect();
            if touch
                .iter()
                .enumerate()
                .all(|(k, &t)| !t || all.contains(&k))
            {
                if best.map_or(true, |(_, l)| len < l) {
                    best = Some((start as i64, len));
                }
            }
        }
    }
    match best {
        Some((b, l)) if l <= 4 => Some((b, l)),
        _ => None,
    }
}

/// Winding number of `f` along the closed contour `pieces` (given in cyclic
/// order), certified by adaptive subdivision plus the octant walk.
pub fn winding_number<S: RealScalar, F: BallEval<S> + ?Sized>(
    f: &F,
    pieces: &[Piece<S>],
    opts: &WindingOpts,
) -> Result<i64> {
    let prec = pieces
        .first()
        .map(|p| p.enclosure().prec())
        .ok_or_else(|| Error::domain("empty contour"))?;
    let subtend = S::from_dyadic(SUBTEND_NUM, SUBTEND_EXP, prec);
    let mut images: Vec<(i64, i64)> = Vec::new();
    let mut budget = opts.max_pieces;

    // Depth-first over each top-level piece keeps pieces in cyclic order.
    let mut stack: Vec<(Piece<S>, u32)> = Vec::new();
    for top in pieces.iter().rev() {
        stack.push((top.clone(), 0));
    }
    while let Some((piece, depth)) = stack.pop() {
        if budget == 0 {
            return Err(Error::precision("winding subdivision budget exhausted"));
        }
        budget -= 1;
        let z = piece.enclosure();
        let v = f.eval(&z);
        let admissible = {
            let mid_lo = v.mid_abs_lower();
            let cap = mid_lo.mul_dir(&subtend, Dir::Down);
            cap.certifies_positive() && v.rad <= cap
        };
        if admissible {
            match octant_interval(&v) {
                Some(oi) => {
                    images.push(oi);
                    continue;
                }
                None => {}
            }
        }
        if depth >= opts.max_depth {
            return Err(Error::precision(
                "contour piece could not exclude zero at maximum depth",
            ));
        }
        let (l, r) = piece.split()?;
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }

    // Octant walk: lift each interval uniquely against the previous one.
    let first = images[0];
    let mut cur = first; // lifted
    for &(base, len) in images.iter().skip(1).chain(std::iter::once(&first)) {
        let (clo, chi) = (cur.0, cur.0 + cur.1 - 1);
        // find t with [base+8t, base+8t+len-1] overlapping [clo, chi]
        let tmin = div_ceil_i64(clo - (base + len - 1), 8);
        let tmax = div_floor_i64(chi - base, 8);
        if tmin > tmax {
            return Err(Error::precision("octant walk lost continuity"));
        }
        if tmax > tmin {
            return Err(Error::precision("octant walk lift ambiguous"));
        }
        cur = (base + 8 * tmin, len);
    }
    let shift = cur.0 - first.0;
    if shift % 8 != 0 {
        return Err(Error::certification(
            "octant walk closed on a non-integer turn",
        ));
    }
    Ok(shift / 8)
}

fn div_floor_i64(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

fn div_ceil_i64(a: i64, b: i64) -> i64 {
    -div_floor_i64(-a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UniPoly;
    use crate::wide::Wide;

    type B = Ball<Wide>;
    type P = UniPoly<Wide>;

    fn unit_circle(prec: u32) -> Vec<Piece<Wide>> {
        circle_pieces(&B::zero(prec), &Wide::from_i64(1, prec))
    }

    #[test]
    fn winding_of_identity_is_one() {
        let p = P::from_coeffs(vec![B::from_i64(0, 96), B::from_i64(1, 96)]);
        let w = winding_number(&p, &unit_circle(96), &WindingOpts::default()).unwrap();
        assert_eq!(w, 1);
    }

    #[test]
    fn winding_counts_multiplicity() {
        // w^3 has winding 3 around the unit circle.
        let p = P::from_coeffs(vec![
            B::from_i64(0, 96),
            B::from_i64(0, 96),
            B::from_i64(0, 96),
            B::from_i64(1, 96),
        ]);
        let w = winding_number(&p, &unit_circle(96), &WindingOpts::default()).unwrap();
        assert_eq!(w, 3);
    }

    #[test]
    fn winding_zero_for_far_root() {
        // (w - 2)^2 has no roots in the unit disk.
        let p = P::linear(&B::from_i64(2, 96)).pow(2);
        let w = winding_number(&p, &unit_circle(96), &WindingOpts::default()).unwrap();
        assert_eq!(w, 0);
    }

    #[test]
    fn winding_on_square() {
        // root at 1/4 inside square [0,1]^2-ish centered (1/2, 0), half 1/2
        let p = P::linear(&B::from_dyadic(1, -2, 96));
        let sq = square_pieces(
            &Wide::from_dyadic(1, -1, 96),
            &Wide::zero(96),
            &Wide::from_dyadic(1, -1, 96),
        );
        assert_eq!(winding_number(&p, &sq, &WindingOpts::default()).unwrap(), 1);
        // and zero when the square misses the root
        let sq2 = square_pieces(
            &Wide::from_i64(2, 96),
            &Wide::zero(96),
            &Wide::from_dyadic(1, -1, 96),
        );
        assert_eq!(winding_number(&p, &sq2, &WindingOpts::default()).unwrap(), 0);
    }

    #[test]
    fn boundary_root_fails_honestly() {
        // root exactly on the contour: must error, never return a count
        let p = P::linear(&B::from_i64(1, 96));
        let r = winding_number(&p, &unit_circle(96), &WindingOpts::default());
        assert!(r.is_err());
    }
}
