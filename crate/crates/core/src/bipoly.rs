//! Bivariate polynomials in (w1, w2), trivariate homogeneous forms in
//! [z0, z1, z2], and the affine-chart maps between them.

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::scalar::RealScalar;
use std::collections::BTreeMap;

/// Dense-by-map bivariate polynomial: (i, j) -> coefficient of w1^i w2^j.
#[derive(Debug, Clone)]
pub struct BiPoly<S> {
    terms: BTreeMap<(u32, u32), Ball<S>>,
}

impl<S: RealScalar> BiPoly<S> {
    pub fn zero() -> Self {
        BiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Ball<S>)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if !c.is_exact_zero() {
                map.insert(k, c);
            }
        }
        BiPoly { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Ball<S>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Option<&Ball<S>> {
        self.terms.get(&(i, j))
    }

    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|&(i, j)| (i + j) as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_add(&mut self, key: (u32, u32), c: Ball<S>) {
        match self.terms.remove(&key) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_exact_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                if !c.is_exact_zero() {
                    self.terms.insert(key, c);
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.insert_add(*k, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = BiPoly::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &o.terms {
                r.insert_add((i1 + i2, j1 + j2), c1.mul(c2));
            }
        }
        r
    }

    pub fn eval(&self, w1: &Ball<S>, w2: &Ball<S>) -> Ball<S> {
        let prec = w1.prec().max(w2.prec());
        let mut acc = Ball::zero(prec);
        for ((i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&w1.pow_ui(*i as u64)).mul(&w2.pow_ui(*j as u64)));
        }
        acc
    }

    /// Degree in w2.
    pub fn w2_degree(&self) -> i64 {
        self.terms.keys().map(|&(_, j)| j as i64).max().unwrap_or(-1)
    }

    /// Coefficient of w2^j, as a polynomial in w1.
    pub fn w2_coeff_poly(&self, j: u32, prec: u32) -> UniPoly<S> {
        let deg = self
            .terms
            .keys()
            .filter(|&&(_, jj)| jj == j)
            .map(|&(i, _)| i)
            .max();
        let Some(deg) = deg else {
            return UniPoly::zero();
        };
        let mut coeffs = vec![Ball::zero(prec); deg as usize + 1];
        for ((i, jj), c) in &self.terms {
            if *jj == j {
                coeffs[*i as usize] = c.clone();
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Partial derivative in w2.
    pub fn deriv_w2(&self) -> Self {
        let mut r = BiPoly::zero();
        for ((i, j), c) in &self.terms {
            if *j >= 1 {
                let prec = c.prec();
                r.insert_add((*i, j - 1), c.scale_real(&S::from_i64(*j as i64, prec)));
            }
        }
        r
    }

    /// The fiber polynomial R(w1, .) in w2 at a fixed w1 ball.
    pub fn fiber_poly(&self, w1: &Ball<S>) -> UniPoly<S> {
        let prec = w1.prec();
        let d = self.w2_degree();
        if d < 0 {
            return UniPoly::zero();
        }
        let coeffs = (0..=d as u32)
            .map(|j| self.w2_coeff_poly(j, prec).eval(w1))
            .collect();
        UniPoly::from_coeffs(coeffs)
    }

    /// Resultant in w2 of self and its w2-derivative, as a polynomial in w1.
    ///
    /// The Sylvester determinant is expanded by memoized Laplace expansion
    /// over column masks; fine for the small w2-degrees this library accepts.
    pub fn resultant_w2_self_deriv(&self, prec: u32) -> Result<UniPoly<S>> {
        let k = self.w2_degree();
        if k < 1 {
            return Err(Error::domain("resultant requires positive w2-degree"));
        }
        let k = k as usize;
        if k > 6 {
            return Err(Error::domain(
                "w2-degree above 6 not supported for the ramification certificate",
            ));
        }
        let f: Vec<UniPoly<S>> = (0..=k as u32)
            .map(|j| self.w2_coeff_poly(j, prec))
            .collect();
        let g: Vec<UniPoly<S>> = (1..=k as u32)
            .map(|j| {
                self.w2_coeff_poly(j, prec)
                    .scale(&Ball::from_i64(j as i64, prec))
            })
            .collect();
        // Sylvester matrix of sizes (k-1) rows of f and k rows of g.
        let n = 2 * k - 1;
        let mut rows: Vec<Vec<UniPoly<S>>> = Vec::with_capacity(n);
        for r in 0..k - 1 {
            let mut row = vec![UniPoly::zero(); n];
            for (t, cf) in f.iter().enumerate() {
                row[r + (k - t)] = cf.clone(); // descending order placement
            }
            let _ = row.drain(n..);
            rows.push(row);
        }
        for r in 0..k {
            let mut row = vec![UniPoly::zero(); n];
            for (t, cg) in g.iter().enumerate() {
                row[r + (k - 1 - t)] = cg.clone();
            }
            let _ = row.drain(n..);
            rows.push(row);
        }
        Ok(det_poly_matrix(&rows))
    }
}

/// Determinant of a square matrix of polynomials, memoized over column masks.
fn det_poly_matrix<S: RealScalar>(m: &[Vec<UniPoly<S>>]) -> UniPoly<S> {
    let n = m.len();
    let mut memo: BTreeMap<u32, UniPoly<S>> = BTreeMap::new();
    fn rec<S: RealScalar>(
        m: &[Vec<UniPoly<S>>],
        row: usize,
        mask: u32,
        memo: &mut BTreeMap<u32, UniPoly<S>>,
    ) -> UniPoly<S> {
        let n = m.len();
        if row == n {
            let prec = 64;
            return UniPoly::from_coeffs(vec![Ball::from_i64(1, prec)]);
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = UniPoly::zero();
        let mut sign = 1i64;
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let entry = &m[row][col];
            if !entry.is_zero() {
                let sub = rec(m, row + 1, mask | (1 << col), memo);
                let term = entry.mul(&sub);
                acc = if sign > 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            sign = -sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    rec(m, 0, 0, &mut memo);
    memo.get(&0).cloned().unwrap_or_else(UniPoly::zero)
}

/// Homogeneous trivariate form: (i, j, k) -> coefficient of z0^i z1^j z2^k,
/// with i + j + k equal to the stated degree for every term.
#[derive(Debug, Clone)]
pub struct TriHomPoly<S> {
    terms: BTreeMap<(u32, u32, u32), Ball<S>>,
    degree: u32,
}

impl<S: RealScalar> TriHomPoly<S> {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &Ball<S>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32, k: u32) -> Option<&Ball<S>> {
        self.terms.get(&(i, j, k))
    }
}

/// Substitute w1 = z1/z0, w2 = z2/z0 and clear denominators by z0^target.
pub fn homogenize<S: RealScalar>(p: &BiPoly<S>, target_degree: u32) -> Result<TriHomPoly<S>> {
    let td = p.total_degree();
    if td > target_degree as i64 {
        return Err(Error::domain(format!(
            "target degree {} below total degree {}",
            target_degree, td
        )));
    }
    let mut terms = BTreeMap::new();
    for ((i, j), c) in p.terms() {
        terms.insert((target_degree - i - j, *i, *j), c.clone());
    }
    Ok(TriHomPoly {
        terms,
        degree: target_degree,
    })
}

/// Set z0 = 1; inverse of homogenize when z0 does not divide the form.
pub fn dehomogenize<S: RealScalar>(p: &TriHomPoly<S>) -> BiPoly<S> {
    BiPoly::from_terms(p.terms().map(|(&(_, j, k), c)| ((j, k), c.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wide::Wide;

    type B = Ball<Wide>;

    #[test]
    fn homogenize_basics() {
        // w2, target 1 -> z2
        let p = BiPoly::from_terms([((0u32, 1u32), B::from_i64(1, 64))]);
        let h = homogenize(&p, 1).unwrap();
        assert_eq!(h.degree(), 1);
        assert!(h.coeff(0, 0, 1).is_some());
        assert_eq!(h.terms().count(), 1);

        // w2 - w1^3, target 3 -> z0^2 z2 - z1^3
        let p = BiPoly::from_terms([
            ((0u32, 1u32), B::from_i64(1, 64)),
            ((3u32, 0u32), B::from_i64(-1, 64)),
        ]);
        let h = homogenize(&p, 3).unwrap();
        assert_eq!(h.degree(), 3);
        assert_eq!(h.coeff(2, 0, 1).unwrap().re.to_f64(), 1.0);
        assert_eq!(h.coeff(0, 3, 0).unwrap().re.to_f64(), -1.0);
        // round trip
        let q = dehomogenize(&h);
        assert_eq!(q.total_degree(), 3);
        assert_eq!(q.coeff(0, 1).unwrap().re.to_f64(), 1.0);
        assert_eq!(q.coeff(3, 0).unwrap().re.to_f64(), -1.0);
    }

    #[test]
    fn homogenize_rejects_low_target() {
        let p = BiPoly::from_terms([((3u32, 0u32), B::from_i64(1, 64))]);
        assert!(homogenize(&p, 2).is_err());
    }

    #[test]
    fn quadric_resultant() {
        // R = w2^2 - (w1-3)(w1-4): disc in w2 = 4(w1-3)(w1-4),
        // resultant(R, dR/dw2) = -4(w1-3)(w1-4) up to sign convention.
        let prec = 96;
        let mut r = BiPoly::zero();
        r.insert_add((0, 2), B::from_i64(1, prec));
        // -(w1^2 - 7 w1 + 12)
        r.insert_add((2, 0), B::from_i64(-1, prec));
        r.insert_add((1, 0), B::from_i64(7, prec));
        r.insert_add((0, 0), B::from_i64(-12, prec));
        let res = r.resultant_w2_self_deriv(prec).unwrap();
        assert_eq!(res.degree(), 2);
        // At w1 = 0: fiber w2^2 - 12, roots +-sqrt(12), disc = 48;
        // resultant = a * prod (t_i - s_j) over root pairs = 4 * 12 = 48 in magnitude.
        let v = res.eval(&B::from_i64(0, prec));
        assert!((v.re.to_f64().abs() - 48.0).abs() < 1e-20, "{}", v.re.to_f64());
    }
}
