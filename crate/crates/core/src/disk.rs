//! Disks in the complex plane.

use crate::ball::Ball;
use crate::scalar::RealScalar;

/// Closed disk (or its boundary circle, by context): center and radius > 0.
#[derive(Debug, Clone)]
pub struct Disk<S> {
    pub center: Ball<S>,
    pub radius: S,
}

impl<S: RealScalar> Disk<S> {
    pub fn new(center: Ball<S>, radius: S) -> Self {
        debug_assert!(radius.sign() > 0);
        Disk { center, radius }
    }

    /// Disk centered at the origin with dyadic radius m*2^e.
    pub fn origin(m: i64, e: i64, prec: u32) -> Self {
        Disk {
            center: Ball::zero(prec),
            radius: S::from_dyadic(m, e, prec),
        }
    }

    /// The whole disk as a single ball.
    pub fn as_ball(&self) -> Ball<S> {
        self.center.inflate(&self.radius)
    }
}
