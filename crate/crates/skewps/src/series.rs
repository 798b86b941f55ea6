//! Truncated arithmetic in `S = R[[z; tau, delta]]`, `z = y^{-1}`.
//!
//! The canonical storage form is Right: an element is `sum z^i r_i` with
//! coefficients on the right. Left form exists only as an explicit
//! conversion target. All commutation goes through the one-step rule
//! `r z = sum_{i>=1} z^i tau(delta^{i-1}(r))` and its left-sided inverse
//! `z r = sum_{i>=1} tau^{-1}((-delta tau^{-1})^{i-1}(r)) z^i`.

use crate::ring::{Elem, RingRef, MAX_PRECISION};
use crate::Error;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A truncated element of `S`, known modulo `z^precision`.
///
/// Invariants: `valuation <= precision`; the stored coefficients run from
/// `valuation` to `precision - 1`; the leading stored coefficient is
/// nonzero unless the element is zero to precision (then `valuation ==
/// precision` and no coefficients are stored).
#[derive(Clone, Debug)]
pub struct SkewSeries {
    ring: RingRef,
    side: Side,
    valuation: usize,
    coeffs: Vec<Elem>,
    precision: usize,
}

/// Valuation, both initial coefficients, and the (side-independent)
/// constant coefficient of a nonzero series.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub valuation: usize,
    pub initial_right: Elem,
    pub initial_left: Elem,
    pub constant: Elem,
}

/// Outcome of the graded leading-term law check.
#[derive(Clone, Debug, PartialEq)]
pub enum GrLeading {
    Holds,
    Fails(String),
    /// The leading product vanished in `R`; nothing can be concluded.
    Inconclusive,
}

impl SkewSeries {
    pub fn zero(ring: RingRef, precision: usize) -> Self {
        assert!(precision >= 1 && precision <= MAX_PRECISION);
        SkewSeries {
            ring,
            side: Side::Right,
            valuation: precision,
            coeffs: vec![],
            precision,
        }
    }

    pub fn constant(ring: RingRef, r: Elem, precision: usize) -> Self {
        Self::monomial(ring, r, 0, precision)
    }

    /// `r * z^i` as a stored monomial (no commutation happens here).
    pub fn monomial(ring: RingRef, r: Elem, i: usize, precision: usize) -> Self {
        let mut f = Self::zero(ring, precision);
        f.set_coeff(i, r);
        f
    }

    pub fn z(ring: RingRef, precision: usize) -> Self {
        let one = ring.one();
        Self::monomial(ring, one, 1, precision)
    }

    pub fn z_power(ring: RingRef, k: usize, precision: usize) -> Self {
        let one = ring.one();
        Self::monomial(ring, one, k, precision)
    }

    pub fn from_coeffs(
        ring: RingRef,
        side: Side,
        start: usize,
        coeffs: Vec<Elem>,
        precision: usize,
    ) -> Self {
        let mut dense = vec![ring.zero(); precision];
        for (k, c) in coeffs.into_iter().enumerate() {
            if start + k < precision {
                dense[start + k] = c;
            }
        }
        Self::from_dense(ring, side, dense, precision)
    }

    fn from_dense(ring: RingRef, side: Side, dense: Vec<Elem>, precision: usize) -> Self {
        let mut valuation = 0;
        let mut dense = dense;
        dense.truncate(precision);
        while valuation < dense.len() && ring.is_zero(&dense[valuation]) {
            valuation += 1;
        }
        if valuation >= precision {
            return Self {
                ring,
                side,
                valuation: precision,
                coeffs: vec![],
                precision,
            };
        }
        let coeffs = dense.split_off(valuation);
        let mut f = Self {
            ring,
            side,
            valuation,
            coeffs,
            precision,
        };
        // Pad the tail to precision.
        while f.valuation + f.coeffs.len() < precision {
            let z = f.ring.zero();
            f.coeffs.push(z);
        }
        f
    }

    fn to_dense(&self) -> Vec<Elem> {
        let mut dense = vec![self.ring.zero(); self.precision];
        for (i, c) in self.iter() {
            dense[i] = c.clone();
        }
        dense
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn valuation(&self) -> usize {
        self.valuation
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Coefficient at index `i < precision` (zero below the valuation).
    pub fn coeff(&self, i: usize) -> Elem {
        assert!(i < self.precision, "coefficient index beyond precision");
        if i < self.valuation || i - self.valuation >= self.coeffs.len() {
            self.ring.zero()
        } else {
            self.coeffs[i - self.valuation].clone()
        }
    }

    pub fn set_coeff(&mut self, i: usize, e: Elem) {
        assert!(i < self.precision, "coefficient index beyond precision");
        let mut dense = self.to_dense();
        dense[i] = e;
        *self = Self::from_dense(self.ring.clone(), self.side, dense, self.precision);
    }

    /// Stored coefficients with their absolute indices.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Elem)> {
        let v = self.valuation;
        self.coeffs.iter().enumerate().map(move |(k, c)| (v + k, c))
    }

    /// Equality up to the minimum of the two precisions.
    pub fn eq_min(&self, other: &Self) -> bool {
        let a = self.to_right_form();
        let b = other.to_right_form();
        let p = a.precision.min(b.precision);
        (0..p).all(|i| a.coeff(i) == b.coeff(i))
    }

    /// Strict equality: equal precision and equal coefficients.
    pub fn strict_eq(&self, other: &Self) -> bool {
        self.precision == other.precision && self.eq_min(other)
    }

    pub fn add(&self, other: &Self) -> Self {
        let a = self.to_right_form();
        let b = other.to_right_form();
        let p = a.precision.min(b.precision);
        let mut dense = vec![self.ring.zero(); p];
        for (i, slot) in dense.iter_mut().enumerate() {
            *slot = self.ring.add(&a.coeff(i), &b.coeff(i));
        }
        Self::from_dense(self.ring.clone(), Side::Right, dense, p)
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        out.coeffs = out.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negate())
    }

    /// Right multiplication by a coefficient: `(sum z^i r_i) s`.
    pub fn mul_coeff_right(&self, s: &Elem) -> Self {
        let f = self.to_right_form();
        let dense: Vec<Elem> = (0..f.precision)
            .map(|i| self.ring.mul(&f.coeff(i), s))
            .collect();
        Self::from_dense(self.ring.clone(), Side::Right, dense, f.precision)
    }

    /// `z^k * self` for right form; the precision grows with the shift.
    pub fn shift_up(&self, k: usize) -> Self {
        let f = self.to_right_form();
        let p = (f.precision + k).min(MAX_PRECISION);
        let mut dense = vec![self.ring.zero(); p];
        for (i, c) in f.iter() {
            if i + k < p {
                dense[i + k] = c.clone();
            }
        }
        Self::from_dense(self.ring.clone(), Side::Right, dense, p)
    }

    /// The series product. Both operands are brought to Right form; the
    /// result is known modulo `z^min(N_f + v_g, N_g + v_f)`.
    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        let f = self.to_right_form();
        let g = other.to_right_form();
        let p = (f.precision + g.valuation)
            .min(g.precision + f.valuation)
            .min(MAX_PRECISION);
        if p == 0 {
            return Err(Error::DegeneratePrecision);
        }
        let ring = &self.ring;
        let mut result = vec![ring.zero(); p];
        for (a, r) in f.iter() {
            if ring.is_zero(r) || a >= p {
                continue;
            }
            let cap = p - a;
            // cur holds the expansion of r * z^b below z^cap.
            let mut cur = vec![ring.zero(); cap];
            cur[0] = r.clone();
            for b in 0..g.precision {
                if b >= cap {
                    break;
                }
                if b > 0 {
                    cur = mul_z_dense(ring, &cur);
                    if cur.iter().all(|c| ring.is_zero(c)) {
                        break;
                    }
                }
                if b < g.valuation {
                    continue;
                }
                let s = g.coeff(b);
                if ring.is_zero(&s) {
                    continue;
                }
                for (i, c) in cur.iter().enumerate().skip(b) {
                    if !ring.is_zero(c) {
                        let t = ring.mul(c, &s);
                        result[a + i] = ring.add(&result[a + i], &t);
                    }
                }
            }
        }
        Ok(Self::from_dense(ring.clone(), Side::Right, result, p))
    }

    /// Right-form conversion (identity on Right input).
    pub fn to_right_form(&self) -> Self {
        match self.side {
            Side::Right => self.clone(),
            Side::Left => {
                // Horner: f = c_0 + (c_1 + (c_2 + ...) z) z.
                let ring = &self.ring;
                let n = self.precision;
                let mut acc = vec![ring.zero(); n];
                for j in (0..n).rev() {
                    acc = mul_z_dense(ring, &acc);
                    let c = self.coeff(j);
                    acc[0] = ring.add(&acc[0], &c);
                }
                Self::from_dense(ring.clone(), Side::Right, acc, n)
            }
        }
    }

    /// Left-form conversion (identity on Left input).
    pub fn to_left_form(&self) -> Self {
        match self.side {
            Side::Left => self.clone(),
            Side::Right => {
                // Horner: f = r_0 + z (r_1 + z (r_2 + ...)).
                let ring = &self.ring;
                let n = self.precision;
                let mut acc = vec![ring.zero(); n];
                for i in (0..n).rev() {
                    acc = z_mul_left_dense(ring, &acc);
                    let r = self.coeff(i);
                    acc[0] = ring.add(&acc[0], &r);
                }
                Self::from_dense(ring.clone(), Side::Left, acc, n)
            }
        }
    }

    /// True iff the constant coefficient is a unit of `R`.
    pub fn is_unit(&self) -> bool {
        let c = self.to_right_form().coeff(0);
        self.ring.try_invert(&c).is_some()
    }

    /// Two-sided inverse modulo `z^precision`; requires a unit constant
    /// coefficient.
    pub fn invert(&self) -> Result<Self, Error> {
        let f = self.to_right_form();
        let ring = &self.ring;
        let r0 = f.coeff(0);
        let Some(u) = ring.try_invert(&r0) else {
            return Err(Error::NotUnit(format!(
                "constant coefficient {} is not a unit",
                ring.format_elem(&r0)
            )));
        };
        let p = f.precision;
        let mut g_dense = vec![ring.zero(); p];
        g_dense[0] = u.clone();
        // tau^k(u), updated as k advances.
        let mut tau_u = u;
        for k in 1..p {
            tau_u = ring.tau(&tau_u);
            let g = Self::from_dense(ring.clone(), Side::Right, g_dense.clone(), p);
            let h = f.mul(&g)?;
            // defect at z^k relative to 1
            let defect = ring.neg(&h.coeff(k));
            if ring.is_zero(&defect) {
                continue;
            }
            g_dense[k] = ring.mul(&tau_u, &defect);
        }
        Ok(Self::from_dense(ring.clone(), Side::Right, g_dense, p))
    }

    pub fn initial_data(&self) -> Result<InitialData, Error> {
        let right = self.to_right_form();
        if right.valuation >= right.precision {
            return Err(Error::ZeroToPrecision);
        }
        let left = right.to_left_form();
        Ok(InitialData {
            valuation: right.valuation,
            initial_right: right.coeff(right.valuation),
            initial_left: left.coeff(left.valuation),
            constant: right.coeff(0),
        })
    }

    pub fn format(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.iter() {
            if self.ring.is_zero(c) {
                continue;
            }
            let cs = self.ring.format_elem(c);
            let part = match (self.side, i) {
                (_, 0) => format!("({cs})"),
                (Side::Right, 1) => format!("z*({cs})"),
                (Side::Right, _) => format!("z^{i}*({cs})"),
                (Side::Left, 1) => format!("({cs})*z"),
                (Side::Left, _) => format!("({cs})*z^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        format!("{} + O(z^{})", parts.join(" + "), self.precision)
    }

    pub fn to_json(&self, coeff_ring: &RingRef) -> serde_json::Value {
        let side = match self.side {
            Side::Right => "right",
            Side::Left => "left",
        };
        json!({
            "side": side,
            "valuation": self.valuation,
            "precision": self.precision,
            "coeffs": self
                .coeffs
                .iter()
                .map(|c| coeff_ring.elem_to_json(c))
                .collect::<Vec<_>>(),
        })
    }
}

/// Dense right-form multiplication by `z` on the right:
/// each `c` at index `i` contributes `tau(delta^{j-1}(c))` at `i + j`.
fn mul_z_dense(ring: &RingRef, cur: &[Elem]) -> Vec<Elem> {
    let cap = cur.len();
    let mut out = vec![ring.zero(); cap];
    for (i, c) in cur.iter().enumerate() {
        if ring.is_zero(c) {
            continue;
        }
        let mut d = c.clone();
        let mut j = 1;
        while i + j < cap {
            let t = ring.tau(&d);
            out[i + j] = ring.add(&out[i + j], &t);
            d = ring.delta(&d);
            if ring.is_zero(&d) {
                break;
            }
            j += 1;
        }
    }
    out
}

/// Dense left-form multiplication by `z` on the left:
/// each `c` at index `j` contributes `tau^{-1}((-delta tau^{-1})^{i-1}(c))`
/// at `j + i`.
fn z_mul_left_dense(ring: &RingRef, cur: &[Elem]) -> Vec<Elem> {
    let cap = cur.len();
    let mut out = vec![ring.zero(); cap];
    for (j, c) in cur.iter().enumerate() {
        if ring.is_zero(c) {
            continue;
        }
        let mut d = c.clone();
        let mut i = 1;
        while j + i < cap {
            let ti = ring.tau_inv(&d);
            out[j + i] = ring.add(&out[j + i], &ti);
            d = ring.neg(&ring.delta(&ti));
            if ring.is_zero(&d) {
                break;
            }
            i += 1;
        }
    }
    out
}

/// `r * z^b` as a Right-form series, truncated at `z^precision`.
pub fn commute_right(ring: &RingRef, r: &Elem, b: usize, precision: usize) -> SkewSeries {
    assert!(b >= 1 && precision >= 1);
    let mut cur = vec![ring.zero(); precision];
    cur[0] = r.clone();
    for _ in 0..b {
        cur = mul_z_dense(ring, &cur);
    }
    SkewSeries::from_dense(ring.clone(), Side::Right, cur, precision)
}

/// `z * r` as a Left-form series, truncated at `z^precision`.
pub fn commute_left(ring: &RingRef, r: &Elem, precision: usize) -> SkewSeries {
    assert!(precision >= 1);
    let mut cur = vec![ring.zero(); precision];
    cur[0] = r.clone();
    let out = z_mul_left_dense(ring, &cur);
    SkewSeries::from_dense(ring.clone(), Side::Left, out, precision)
}

/// Leading-term law of the associated graded ring `R[x; tau^{-1}]`:
/// `valuation(fg) = v_f + v_g` and
/// `init_right(fg) = tau^{v_g}(init_right f) * init_right g`.
pub fn gr_leading_check(f: &SkewSeries, g: &SkewSeries) -> Result<GrLeading, Error> {
    let ring = f.ring().clone();
    let fr = f.to_right_form();
    let gr = g.to_right_form();
    if fr.valuation() >= fr.precision() || gr.valuation() >= gr.precision() {
        return Err(Error::ZeroToPrecision);
    }
    let a = fr.coeff(fr.valuation());
    let b = gr.coeff(gr.valuation());
    let mut ta = a;
    for _ in 0..gr.valuation() {
        ta = ring.tau(&ta);
    }
    let lead = ring.mul(&ta, &b);
    if ring.is_zero(&lead) {
        return Ok(GrLeading::Inconclusive);
    }
    let prod = fr.mul(&gr)?;
    let expected_val = fr.valuation() + gr.valuation();
    if prod.valuation() != expected_val {
        return Ok(GrLeading::Fails(format!(
            "valuation {} != {}",
            prod.valuation(),
            expected_val
        )));
    }
    if prod.coeff(expected_val) != lead {
        return Ok(GrLeading::Fails(format!(
            "leading coefficient {} != {}",
            ring.format_elem(&prod.coeff(expected_val)),
            ring.format_elem(&lead)
        )));
    }
    Ok(GrLeading::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, Elem, PolyDeriv, Ring};
    use num_rational::BigRational;

    fn poly_dt() -> RingRef {
        Ring::poly(PolyDeriv::Dt)
    }

    fn t_pow(n: usize) -> Elem {
        let mut v = vec![BigRational::from_integer(0.into()); n + 1];
        v[n] = BigRational::from_integer(1.into());
        Elem::Poly(v)
    }

    fn int_poly(coeffs: &[i64]) -> Elem {
        Elem::Poly(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer((*c).into()))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn commute_right_dt_examples() {
        let r = poly_dt();
        // t*z = z*t + z^2
        let f = commute_right(&r, &t_pow(1), 1, 4);
        assert_eq!(f.coeff(0), int_poly(&[]));
        assert_eq!(f.coeff(1), t_pow(1));
        assert_eq!(f.coeff(2), int_poly(&[1]));
        assert_eq!(f.coeff(3), int_poly(&[]));
        // t^2*z = z*t^2 + z^2*2t + z^3*2
        let f = commute_right(&r, &t_pow(2), 1, 5);
        assert_eq!(f.coeff(1), t_pow(2));
        assert_eq!(f.coeff(2), int_poly(&[0, 2]));
        assert_eq!(f.coeff(3), int_poly(&[2]));
        assert_eq!(f.coeff(4), int_poly(&[]));
    }

    #[test]
    fn commute_right_delta_zero_collapses() {
        let r = Ring::poly(PolyDeriv::QScale(rat(2)));
        let f = commute_right(&r, &t_pow(1), 1, 6);
        // t*z = z*tau(t) = z*(2t), nothing above z^1
        assert_eq!(f.coeff(1), int_poly(&[0, 2]));
        for i in 2..6 {
            assert_eq!(f.coeff(i), int_poly(&[]));
        }
    }

    #[test]
    fn commute_left_dt_example() {
        let r = poly_dt();
        // z*t = t*z + (-1)*z^2
        let f = commute_left(&r, &t_pow(1), 4);
        assert_eq!(f.side(), Side::Left);
        assert_eq!(f.coeff(1), t_pow(1));
        assert_eq!(f.coeff(2), int_poly(&[-1]));
        assert_eq!(f.coeff(3), int_poly(&[]));
    }

    #[test]
    fn to_left_form_example() {
        let r = poly_dt();
        // right form z*t converts to left form t*z - 1*z^2
        let f = SkewSeries::monomial(r.clone(), t_pow(1), 1, 4);
        let l = f.to_left_form();
        assert_eq!(l.coeff(1), t_pow(1));
        assert_eq!(l.coeff(2), int_poly(&[-1]));
        // and back
        assert!(l.to_right_form().eq_min(&f));
    }

    #[test]
    fn mul_z_powers() {
        let r = poly_dt();
        let z = SkewSeries::z(r.clone(), 6);
        let z2 = z.mul(&z).unwrap();
        assert_eq!(z2.valuation(), 2);
        assert_eq!(z2.coeff(2), int_poly(&[1]));
    }

    #[test]
    fn mul_matches_commute_right() {
        let r = poly_dt();
        let t = SkewSeries::constant(r.clone(), t_pow(1), 5);
        let z = SkewSeries::z(r.clone(), 5);
        let prod = t.mul(&z).unwrap();
        let expect = commute_right(&r, &t_pow(1), 1, prod.precision());
        assert!(prod.eq_min(&expect));
    }

    #[test]
    fn invert_geometric() {
        let r = Ring::poly(PolyDeriv::QScale(rat(1)));
        // delta = 0, tau = id: (1 + z)^{-1} = 1 - z + z^2 - ...
        let one = SkewSeries::constant(r.clone(), int_poly(&[1]), 6);
        let f = one.add(&SkewSeries::z(r.clone(), 6));
        let g = f.invert().unwrap();
        for i in 0..6 {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.coeff(i), int_poly(&[sign]));
        }
        assert!(f.mul(&g).unwrap().eq_min(&one));
        assert!(g.mul(&f).unwrap().eq_min(&one));
    }

    #[test]
    fn invert_dt_example() {
        let r = poly_dt();
        // (1 + z*t)^{-1} = 1 - z*t + z^2*t^2 + z^3*(t - t^3) + O(z^4)
        let one = SkewSeries::constant(r.clone(), int_poly(&[1]), 4);
        let f = one.add(&SkewSeries::monomial(r.clone(), t_pow(1), 1, 4));
        let g = f.invert().unwrap();
        assert_eq!(g.coeff(0), int_poly(&[1]));
        assert_eq!(g.coeff(1), int_poly(&[0, -1]));
        assert_eq!(g.coeff(2), int_poly(&[0, 0, 1]));
        assert_eq!(g.coeff(3), int_poly(&[0, 1, 0, -1]));
        assert!(f.mul(&g).unwrap().eq_min(&one));
        assert!(g.mul(&f).unwrap().eq_min(&one));
    }

    #[test]
    fn invert_rejects_nonunit() {
        let r = poly_dt();
        let z = SkewSeries::z(r.clone(), 4);
        assert!(matches!(z.invert(), Err(Error::NotUnit(_))));
        assert!(!z.is_unit());
        let t = SkewSeries::constant(r, t_pow(1), 4);
        assert!(!t.is_unit());
    }

    #[test]
    fn initial_data_examples() {
        let r = poly_dt();
        // z^2*t: valuation 2, initial_right t, constant 0
        let f = SkewSeries::monomial(r.clone(), t_pow(1), 2, 6);
        let d = f.initial_data().unwrap();
        assert_eq!(d.valuation, 2);
        assert_eq!(d.initial_right, t_pow(1));
        assert_eq!(d.constant, int_poly(&[]));
        // constant is side-independent
        let l = f.to_left_form();
        assert_eq!(l.initial_data().unwrap().constant, int_poly(&[]));
        // zero to precision errors
        let z = SkewSeries::zero(r, 4);
        assert!(matches!(z.initial_data(), Err(Error::ZeroToPrecision)));
    }

    #[test]
    fn gr_leading_qscale() {
        let r = Ring::poly(PolyDeriv::QScale(rat(2)));
        let f = SkewSeries::monomial(r.clone(), t_pow(1), 1, 8);
        let g = SkewSeries::monomial(r.clone(), t_pow(1), 1, 8);
        // init(fg) = tau(t)*t = 2 t^2
        assert_eq!(gr_leading_check(&f, &g).unwrap(), GrLeading::Holds);
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.valuation(), 2);
        assert_eq!(prod.coeff(2), int_poly(&[0, 0, 2]));
    }

    #[test]
    fn add_and_negate() {
        let r = poly_dt();
        let f = SkewSeries::monomial(r.clone(), t_pow(1), 1, 5);
        let sum = f.add(&f);
        assert_eq!(sum.coeff(1), int_poly(&[0, 2]));
        let zero = f.add(&f.negate());
        assert!(zero.is_zero());
        assert_eq!(zero.valuation(), zero.precision());
    }

    #[test]
    fn mul_precision_rule() {
        let r = poly_dt();
        let f = SkewSeries::monomial(r.clone(), t_pow(1), 2, 6); // v=2, N=6
        let g = SkewSeries::monomial(r.clone(), t_pow(1), 1, 4); // v=1, N=4
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.precision(), (6 + 1).min(4 + 2));
    }
}
