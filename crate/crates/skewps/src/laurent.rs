//! Truncated arithmetic in the skew Laurent localization
//! `S' = R((z; tau, delta))`, where `y = z^{-1}` satisfies
//! `y r = tau(r) y + delta(r)`.
//!
//! An element is stored as `z^{-shift} * body` with `shift >= 0` and a
//! Right-form body. All coefficient motion across negative powers uses
//! `r z^{-1} = z^{-1} tau^{-1}(r) - delta(tau^{-1}(r))`.

use crate::ring::{Elem, RingRef};
use crate::series::{SkewSeries, Side};
use crate::Error;

/// A truncated Laurent element, known modulo `z^(body precision - shift)`.
///
/// Invariant: `shift < body precision`, and the shift is reduced whenever
/// the body has positive valuation.
#[derive(Clone, Debug)]
pub struct SkewLaurentSeries {
    shift: usize,
    body: SkewSeries,
}

impl SkewLaurentSeries {
    pub fn zero(ring: RingRef, precision: usize) -> Self {
        SkewLaurentSeries {
            shift: 0,
            body: SkewSeries::zero(ring, precision),
        }
    }

    pub fn from_body(shift: usize, body: SkewSeries) -> Self {
        let body = body.to_right_form();
        assert!(
            shift < body.precision(),
            "shift must stay below the body precision"
        );
        let mut f = SkewLaurentSeries { shift, body };
        f.reduce_shift();
        f
    }

    fn reduce_shift(&mut self) {
        let m = self.shift.min(self.body.valuation());
        if m == 0 {
            return;
        }
        let ring = self.body.ring().clone();
        let p = self.body.precision() - m;
        let mut dense = vec![ring.zero(); p];
        for (i, c) in self.body.iter() {
            if i >= m && i - m < p {
                dense[i - m] = c.clone();
            }
        }
        self.shift -= m;
        self.body = SkewSeries::from_coeffs(ring, Side::Right, 0, dense, p);
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn body(&self) -> &SkewSeries {
        &self.body
    }

    pub fn ring(&self) -> &RingRef {
        self.body.ring()
    }

    /// Absolute truncation bound: the element is known modulo `z^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        self.body.precision() as i64 - self.shift as i64
    }

    /// Lowest absolute exponent with a nonzero coefficient, if any.
    pub fn abs_valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.body.valuation() as i64 - self.shift as i64)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Coefficient at absolute exponent `j < abs_prec`.
    pub fn coeff_at(&self, j: i64) -> Elem {
        assert!(j < self.abs_prec(), "coefficient index beyond precision");
        let i = j + self.shift as i64;
        if i < 0 {
            self.ring().zero()
        } else {
            self.body.coeff(i as usize)
        }
    }

    /// Re-express with a shift of at least `s` (absolute precision is kept).
    fn with_shift(&self, s: usize) -> Self {
        if s <= self.shift {
            return self.clone();
        }
        let k = s - self.shift;
        SkewLaurentSeries {
            shift: s,
            body: self.body.shift_up(k),
        }
    }

    /// Equality up to the minimum of the two absolute precisions.
    pub fn eq_min(&self, other: &Self) -> bool {
        let s = self.shift.max(other.shift);
        let a = self.with_shift(s);
        let b = other.with_shift(s);
        a.body.eq_min(&b.body)
    }

    pub fn add(&self, other: &Self) -> Self {
        let s = self.shift.max(other.shift);
        let a = self.with_shift(s);
        let b = other.with_shift(s);
        Self::from_body(s, a.body.add(&b.body))
    }

    pub fn negate(&self) -> Self {
        SkewLaurentSeries {
            shift: self.shift,
            body: self.body.negate(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negate())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        // f g = z^{-s_f} F z^{-s_g} G = z^{-(s_f+s_g)} (H^{s_g} F) G.
        let mut moved = self.body.clone();
        for _ in 0..other.shift {
            moved = push_past_z_inv(&moved);
        }
        let prod = moved.mul(&other.body)?;
        Ok(Self::from_body(self.shift + other.shift, prod))
    }

    /// Two-sided inverse; requires a unit leading coefficient.
    pub fn invert(&self) -> Result<Self, Error> {
        let ring = self.ring().clone();
        let v = self.body.valuation();
        if v >= self.body.precision() {
            return Err(Error::ZeroToPrecision);
        }
        // body = z^v * tilde with tilde of valuation zero; then
        // f = z^{v - shift} * tilde and f^{-1} = tilde^{-1} * z^{shift - v}.
        let p = self.body.precision() - v;
        let mut dense = vec![ring.zero(); p];
        for (i, c) in self.body.iter() {
            if i - v < p {
                dense[i - v] = c.clone();
            }
        }
        let tilde = SkewSeries::from_coeffs(ring.clone(), Side::Right, 0, dense, p);
        let inv = tilde.invert()?;
        if self.shift >= v {
            let k = self.shift - v;
            let zk = SkewSeries::z_power(ring, k, inv.precision() + k);
            Ok(Self::from_body(0, inv.mul(&zk)?))
        } else {
            let m = v - self.shift;
            let mut moved = inv;
            for _ in 0..m {
                moved = push_past_z_inv(&moved);
            }
            Ok(Self::from_body(m, moved))
        }
    }

    /// Rebuild from a termwise image `j -> (j', c')`; `None` drops the
    /// term. Terms landing at or above the absolute precision are cut.
    pub fn map_terms<F>(&self, mut f: F) -> Self
    where
        F: FnMut(i64, &Elem) -> Option<(i64, Elem)>,
    {
        let ring = self.ring().clone();
        let prec = self.abs_prec();
        let mut out: Vec<(i64, Elem)> = Vec::new();
        for (i, c) in self.body.iter() {
            if ring.is_zero(c) {
                continue;
            }
            let j = i as i64 - self.shift as i64;
            if let Some((j2, c2)) = f(j, c) {
                if j2 < prec && !ring.is_zero(&c2) {
                    out.push((j2, c2));
                }
            }
        }
        let min_j = out.iter().map(|(j, _)| *j).min().unwrap_or(0);
        let shift = (-min_j).max(0) as usize;
        let body_prec = (prec + shift as i64) as usize;
        let mut body = SkewSeries::zero(ring.clone(), body_prec);
        for (j, c) in out {
            let i = (j + shift as i64) as usize;
            let prev = body.coeff(i);
            body.set_coeff(i, ring.add(&prev, &c));
        }
        Self::from_body(shift, body)
    }

    pub fn format(&self) -> String {
        let ring = self.ring();
        let mut parts = Vec::new();
        for (i, c) in self.body.iter() {
            if ring.is_zero(c) {
                continue;
            }
            let j = i as i64 - self.shift as i64;
            let cs = ring.format_elem(c);
            let part = match j {
                0 => format!("({cs})"),
                1 => format!("z*({cs})"),
                _ => format!("z^{j}*({cs})"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        format!("{} + O(z^{})", parts.join(" + "), self.abs_prec())
    }
}

/// Rewrite `F z^{-1}` as `z^{-1} H`:
/// `H_k = tau^{-1}(r_k) - delta(tau^{-1}(r_{k-1}))`, same precision.
fn push_past_z_inv(f: &SkewSeries) -> SkewSeries {
    let ring = f.ring().clone();
    let p = f.precision();
    let mut dense = vec![ring.zero(); p];
    for k in 0..p {
        let mut h = ring.tau_inv(&f.coeff(k));
        if k >= 1 {
            let prev = ring.tau_inv(&f.coeff(k - 1));
            h = ring.sub(&h, &ring.delta(&prev));
        }
        dense[k] = h;
    }
    SkewSeries::from_coeffs(ring, Side::Right, 0, dense, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Elem, PolyDeriv, Ring};
    use num_rational::BigRational;

    fn poly_dt() -> RingRef {
        Ring::poly(PolyDeriv::Dt)
    }

    fn int_poly(coeffs: &[i64]) -> Elem {
        Elem::Poly(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer((*c).into()))
                .collect::<Vec<_>>(),
        )
    }

    fn laurent_one(ring: &RingRef, prec: usize) -> SkewLaurentSeries {
        SkewLaurentSeries::from_body(0, SkewSeries::constant(ring.clone(), ring.one(), prec))
    }

    fn z_inv(ring: &RingRef, prec: usize) -> SkewLaurentSeries {
        SkewLaurentSeries::from_body(1, SkewSeries::constant(ring.clone(), ring.one(), prec))
    }

    #[test]
    fn z_times_z_inv_is_one() {
        let r = poly_dt();
        let z = SkewLaurentSeries::from_body(0, SkewSeries::z(r.clone(), 6));
        let y = z_inv(&r, 6);
        let one = laurent_one(&r, 6);
        assert!(z.mul(&y).unwrap().eq_min(&one));
        assert!(y.mul(&z).unwrap().eq_min(&one));
    }

    #[test]
    fn coefficient_past_z_inv() {
        let r = poly_dt();
        // t * z^{-1} = z^{-1} * t - 1
        let t = SkewLaurentSeries::from_body(0, SkewSeries::constant(r.clone(), int_poly(&[0, 1]), 6));
        let y = z_inv(&r, 6);
        let prod = t.mul(&y).unwrap();
        assert_eq!(prod.coeff_at(-1), int_poly(&[0, 1]));
        assert_eq!(prod.coeff_at(0), int_poly(&[-1]));
        assert_eq!(prod.coeff_at(1), int_poly(&[]));
    }

    #[test]
    fn defining_relation() {
        let r = poly_dt();
        // y t = tau(t) y + delta(t) with tau = id, delta = d/dt:
        // z^{-1} t = t z^{-1} + 1
        let t = SkewLaurentSeries::from_body(0, SkewSeries::constant(r.clone(), int_poly(&[0, 1]), 6));
        let y = z_inv(&r, 6);
        let lhs = y.mul(&t).unwrap();
        let rhs = t.mul(&y).unwrap().add(&laurent_one(&r, 6));
        assert!(lhs.eq_min(&rhs));
    }

    #[test]
    fn invert_z_inverse() {
        let r = poly_dt();
        let y = z_inv(&r, 6);
        let inv = y.invert().unwrap();
        let z = SkewLaurentSeries::from_body(0, SkewSeries::z(r.clone(), 6));
        assert!(inv.eq_min(&z));
    }

    #[test]
    fn invert_with_negative_valuation() {
        let r = poly_dt();
        // f = z^{-1} + 1 = z^{-1}(1 + z); f^{-1} = (1+z)^{-1} z = z - z^2 + ...
        let f = z_inv(&r, 6).add(&laurent_one(&r, 6));
        let inv = f.invert().unwrap();
        let one = laurent_one(&r, 6);
        assert!(f.mul(&inv).unwrap().eq_min(&one));
        assert!(inv.mul(&f).unwrap().eq_min(&one));
        assert_eq!(inv.coeff_at(1), int_poly(&[1]));
        assert_eq!(inv.coeff_at(2), int_poly(&[-1]));
    }

    #[test]
    fn invert_positive_valuation() {
        let r = poly_dt();
        // f = z^2, inverse z^{-2}
        let f = SkewLaurentSeries::from_body(0, SkewSeries::z_power(r.clone(), 2, 6));
        let inv = f.invert().unwrap();
        let one = laurent_one(&r, 4);
        assert!(f.mul(&inv).unwrap().eq_min(&one));
        assert!(inv.mul(&f).unwrap().eq_min(&one));
        assert_eq!(inv.abs_valuation(), Some(-2));
    }

    #[test]
    fn invert_rejects_nonunit_leading() {
        let r = poly_dt();
        let t = SkewLaurentSeries::from_body(0, SkewSeries::constant(r.clone(), int_poly(&[0, 1]), 6));
        assert!(matches!(t.invert(), Err(Error::NotUnit(_))));
        let zero = SkewLaurentSeries::zero(r, 6);
        assert!(matches!(zero.invert(), Err(Error::ZeroToPrecision)));
    }

    #[test]
    fn shift_reduction() {
        let r = poly_dt();
        // z^{-2} * (z^2 * t) reduces to plain t
        let body = SkewSeries::monomial(r.clone(), int_poly(&[0, 1]), 2, 6);
        let f = SkewLaurentSeries::from_body(2, body);
        assert_eq!(f.shift(), 0);
        assert_eq!(f.coeff_at(0), int_poly(&[0, 1]));
    }

    #[test]
    fn map_terms_shifts() {
        let r = poly_dt();
        let f = z_inv(&r, 6).add(&laurent_one(&r, 6));
        let g = f.map_terms(|j, c| Some((j - 1, c.clone())));
        assert_eq!(g.coeff_at(-2), int_poly(&[1]));
        assert_eq!(g.coeff_at(-1), int_poly(&[1]));
        assert!(g.ring().is_zero(&g.coeff_at(0)));
    }
}
