//! The 16-dimensional quotient ring `R = U/Ux^4` with `U = k^4[x; alpha]`,
//! where `alpha` cyclically shifts the four components of `k^4`. Elements
//! are stored as 16 scalars: component `n*4 + j` is the coefficient of
//! `e_{j+1} * xbar^n`.
//!
//! The attached skew derivation is `tau = alpha^{-1}` (with `tau(xbar) =
//! xbar`) and the closed-form `delta` below; `delta` descends from the
//! Laurent-level map `t |-> e x^{-1} t - tau(t) e x^{-1}` with
//! `e = (0,0,0,1)`. The Laurent-level computation is reproduced in the
//! tests and checked against the closed form.

use crate::field::{FieldKind, Scalar};

pub const DIM: usize = 16;

/// A `k^4`-component, i.e. the coefficient of one power of `xbar`.
pub type Vec4 = [Scalar; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct K4Elem {
    /// 16 scalars, `xbar`-power major.
    pub comps: Vec<Scalar>,
}

#[derive(Debug, thiserror::Error)]
#[error("xbar exponent {0} out of range 0..=3")]
pub struct ExponentOutOfRange(pub usize);

pub fn zero(field: &FieldKind) -> K4Elem {
    K4Elem {
        comps: vec![field.zero(); DIM],
    }
}

pub fn one(field: &FieldKind) -> K4Elem {
    let mut e = zero(field);
    for j in 0..4 {
        e.comps[j] = field.one();
    }
    e
}

pub fn is_zero(field: &FieldKind, a: &K4Elem) -> bool {
    a.comps.iter().all(|c| field.is_zero(c))
}

pub fn add(field: &FieldKind, a: &K4Elem, b: &K4Elem) -> K4Elem {
    K4Elem {
        comps: (0..DIM)
            .map(|i| field.add(&a.comps[i], &b.comps[i]))
            .collect(),
    }
}

pub fn neg(field: &FieldKind, a: &K4Elem) -> K4Elem {
    K4Elem {
        comps: a.comps.iter().map(|c| field.neg(c)).collect(),
    }
}

fn component(a: &K4Elem, n: usize) -> Vec4 {
    [
        a.comps[n * 4].clone(),
        a.comps[n * 4 + 1].clone(),
        a.comps[n * 4 + 2].clone(),
        a.comps[n * 4 + 3].clone(),
    ]
}

fn set_component(field: &FieldKind, a: &mut K4Elem, n: usize, v: &Vec4) {
    for j in 0..4 {
        a.comps[n * 4 + j] = field.add(&a.comps[n * 4 + j], &v[j]);
    }
}

/// `alpha(a,b,c,d) = (b,c,d,a)`.
pub fn alpha(v: &Vec4) -> Vec4 {
    [v[1].clone(), v[2].clone(), v[3].clone(), v[0].clone()]
}

pub fn alpha_inv(v: &Vec4) -> Vec4 {
    [v[3].clone(), v[0].clone(), v[1].clone(), v[2].clone()]
}

pub fn alpha_pow(v: &Vec4, k: i64) -> Vec4 {
    let k = k.rem_euclid(4);
    let mut out = v.clone();
    for _ in 0..k {
        out = alpha(&out);
    }
    out
}

fn pointwise(field: &FieldKind, a: &Vec4, b: &Vec4) -> Vec4 {
    [
        field.mul(&a[0], &b[0]),
        field.mul(&a[1], &b[1]),
        field.mul(&a[2], &b[2]),
        field.mul(&a[3], &b[3]),
    ]
}

/// `(c xbar^m)(c' xbar^n) = c alpha^m(c') xbar^{m+n}`, truncated by
/// `xbar^4 = 0`.
pub fn mul(field: &FieldKind, a: &K4Elem, b: &K4Elem) -> K4Elem {
    let mut out = zero(field);
    for m in 0..4 {
        let cm = component(a, m);
        if cm.iter().all(|c| field.is_zero(c)) {
            continue;
        }
        for n in 0..4 - m {
            let cn = component(b, n);
            let prod = pointwise(field, &cm, &alpha_pow(&cn, m as i64));
            set_component(field, &mut out, m + n, &prod);
        }
    }
    out
}

/// `tau = alpha^{-1}` componentwise, `tau(xbar) = xbar`.
pub fn tau(field: &FieldKind, a: &K4Elem) -> K4Elem {
    let mut out = zero(field);
    for n in 0..4 {
        set_component(field, &mut out, n, &alpha_inv(&component(a, n)));
    }
    out
}

pub fn tau_inv(field: &FieldKind, a: &K4Elem) -> K4Elem {
    let mut out = zero(field);
    for n in 0..4 {
        set_component(field, &mut out, n, &alpha(&component(a, n)));
    }
    out
}

fn e_vec(field: &FieldKind) -> Vec4 {
    [field.zero(), field.zero(), field.zero(), field.one()]
}

/// Closed form for the derivation on a single component:
/// `delta(c xbar^n) = alpha^{-1}(c) (e - alpha^n(e)) xbar^{n-1}`, zero for
/// `n = 0`.
pub fn k4_delta(
    field: &FieldKind,
    c: &Vec4,
    n: usize,
) -> Result<K4Elem, ExponentOutOfRange> {
    if n > 3 {
        return Err(ExponentOutOfRange(n));
    }
    let mut out = zero(field);
    if n == 0 {
        return Ok(out);
    }
    let e = e_vec(field);
    let diff = [
        field.sub(&e[0], &alpha_pow(&e, n as i64)[0]),
        field.sub(&e[1], &alpha_pow(&e, n as i64)[1]),
        field.sub(&e[2], &alpha_pow(&e, n as i64)[2]),
        field.sub(&e[3], &alpha_pow(&e, n as i64)[3]),
    ];
    let v = pointwise(field, &alpha_inv(c), &diff);
    set_component(field, &mut out, n - 1, &v);
    Ok(out)
}

pub fn delta(field: &FieldKind, a: &K4Elem) -> K4Elem {
    let mut out = zero(field);
    for n in 1..4 {
        let d = k4_delta(field, &component(a, n), n).expect("n in range");
        out = add(field, &out, &d);
    }
    out
}

/// Unit basis element `e_{j+1} xbar^n`.
pub fn basis(field: &FieldKind, n: usize, j: usize) -> K4Elem {
    let mut e = zero(field);
    e.comps[n * 4 + j] = field.one();
    e
}

/// The element `v = (1,0,0,0) xbar`.
pub fn v_elem(field: &FieldKind) -> K4Elem {
    basis(field, 1, 0)
}

/// `v xbar^2 = (1,0,0,0) xbar^3`.
pub fn v_xbar2(field: &FieldKind) -> K4Elem {
    basis(field, 3, 0)
}

/// Left-multiplication matrix of `r` in the 16-dimensional basis,
/// column `k` holding the coordinates of `r * basis_k`.
fn left_mul_matrix(field: &FieldKind, r: &K4Elem) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![field.zero(); DIM]; DIM];
    for k in 0..DIM {
        let bk = K4Elem {
            comps: (0..DIM)
                .map(|i| if i == k { field.one() } else { field.zero() })
                .collect(),
        };
        let col = mul(field, r, &bk);
        for (i, row) in m.iter_mut().enumerate() {
            row[k] = col.comps[i].clone();
        }
    }
    m
}

/// Two-sided inverse via a 16x16 linear solve, or `None` if `r` is not a
/// unit.
pub fn try_invert(field: &FieldKind, r: &K4Elem) -> Option<K4Elem> {
    let m = left_mul_matrix(field, r);
    let rhs = one(field).comps;
    let s = crate::field::solve_square(field, &m, &rhs)?;
    let s = K4Elem { comps: s };
    // r*s = 1 by construction; a one-sided inverse is two-sided in a
    // finite-dimensional algebra, but check anyway.
    if mul(field, &s, r) == one(field) {
        Some(s)
    } else {
        None
    }
}

/// Coordinate rows spanning the two-sided ideal generated by `g`.
pub fn two_sided_span(field: &FieldKind, g: &K4Elem) -> Vec<Vec<Scalar>> {
    let mut rows = Vec::with_capacity(DIM * DIM);
    for i in 0..DIM {
        let bi = unit_basis(field, i);
        for j in 0..DIM {
            let bj = unit_basis(field, j);
            let prod = mul(field, &mul(field, &bi, g), &bj);
            rows.push(prod.comps);
        }
    }
    rows
}

/// Rows spanning `g * R` (right multiples).
pub fn right_multiples_span(field: &FieldKind, g: &K4Elem) -> Vec<Vec<Scalar>> {
    (0..DIM)
        .map(|i| mul(field, g, &unit_basis(field, i)).comps)
        .collect()
}

/// Rows spanning `R * g` (left multiples).
pub fn left_multiples_span(field: &FieldKind, g: &K4Elem) -> Vec<Vec<Scalar>> {
    (0..DIM)
        .map(|i| mul(field, &unit_basis(field, i), g).comps)
        .collect()
}

fn unit_basis(field: &FieldKind, i: usize) -> K4Elem {
    let mut e = zero(field);
    e.comps[i] = field.one();
    e
}

pub fn format(field: &FieldKind, a: &K4Elem) -> String {
    let mut parts = Vec::new();
    for n in 0..4 {
        let c = component(a, n);
        if c.iter().all(|s| field.is_zero(s)) {
            continue;
        }
        let tuple = format!(
            "({},{},{},{})",
            field.format(&c[0]),
            field.format(&c[1]),
            field.format(&c[2]),
            field.format(&c[3])
        );
        if n == 0 {
            parts.push(tuple);
        } else if n == 1 {
            parts.push(format!("{}*x", tuple));
        } else {
            parts.push(format!("{}*x^{}", tuple, n));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn qq() -> FieldKind {
        FieldKind::Rational
    }

    /// Sparse model of `T = k^4[x^{+-1}; alpha]` for the Laurent-level
    /// cross-check: exponent -> k^4 coefficient.
    type TElem = BTreeMap<i64, Vec4>;

    fn t_mul(field: &FieldKind, a: &TElem, b: &TElem) -> TElem {
        let mut out: TElem = BTreeMap::new();
        for (m, cm) in a {
            for (n, cn) in b {
                let prod = super::pointwise(field, cm, &alpha_pow(cn, *m));
                let entry = out.entry(m + n).or_insert_with(|| {
                    [field.zero(), field.zero(), field.zero(), field.zero()]
                });
                for j in 0..4 {
                    entry[j] = field.add(&entry[j], &prod[j]);
                }
            }
        }
        out.retain(|_, v| v.iter().any(|s| !field.is_zero(s)));
        out
    }

    fn t_sub(field: &FieldKind, a: &TElem, b: &TElem) -> TElem {
        let mut out = a.clone();
        for (n, cn) in b {
            let entry = out.entry(*n).or_insert_with(|| {
                [field.zero(), field.zero(), field.zero(), field.zero()]
            });
            for j in 0..4 {
                entry[j] = field.sub(&entry[j], &cn[j]);
            }
        }
        out.retain(|_, v| v.iter().any(|s| !field.is_zero(s)));
        out
    }

    fn t_tau(field: &FieldKind, a: &TElem) -> TElem {
        // tau = alpha^{-1} on coefficients, tau(x) = x.
        a.iter()
            .map(|(n, c)| (*n, alpha_inv(c)))
            .filter(|(_, v)| v.iter().any(|s| !field.is_zero(s)))
            .collect()
    }

    /// `delta(t) = e x^{-1} t - tau(t) e x^{-1}` computed in `T`.
    fn t_delta(field: &FieldKind, t: &TElem) -> TElem {
        let e_xinv: TElem = [(-1i64, {
            [field.zero(), field.zero(), field.zero(), field.one()]
        })]
        .into_iter()
        .collect();
        let lhs = t_mul(field, &e_xinv, t);
        let rhs = t_mul(field, &t_tau(field, t), &e_xinv);
        t_sub(field, &lhs, &rhs)
    }

    #[test]
    fn closed_form_delta_matches_laurent_computation() {
        let f = qq();
        for n in 0..4usize {
            for j in 0..4usize {
                let mut c = [f.zero(), f.zero(), f.zero(), f.zero()];
                c[j] = f.one();
                let t: TElem = [(n as i64, c.clone())].into_iter().collect();
                let d = t_delta(&f, &t);
                // The Laurent result must live in U (no negative powers).
                assert!(d.keys().all(|k| *k >= 0), "delta left U for n={n} j={j}");
                // Reduce mod x^4 and compare with the closed form.
                let mut reduced = super::zero(&f);
                for (m, cm) in &d {
                    if *m < 4 {
                        set_component(&f, &mut reduced, *m as usize, cm);
                    }
                }
                let closed = k4_delta(&f, &c, n).unwrap();
                assert_eq!(reduced, closed, "mismatch for n={n} j={j}");
            }
        }
    }

    #[test]
    fn delta_on_x4_is_zero_pre_quotient() {
        // alpha^4 = id forces e - alpha^4(e) = 0, so delta(c x^4) = 0 in T.
        let f = qq();
        let c = [f.one(), f.one(), f.one(), f.one()];
        let t: TElem = [(4i64, c)].into_iter().collect();
        assert!(t_delta(&f, &t).is_empty());
    }

    #[test]
    fn delta_examples() {
        let f = qq();
        // n = 0: always zero.
        let any = [f.one(), f.from_i64(2), f.from_i64(-3), f.one()];
        assert!(is_zero(&f, &k4_delta(&f, &any, 0).unwrap()));
        // c = (1,1,1,1), n = 1: (e - alpha(e)) = (0,0,-1,1) at xbar^0.
        let ones = [f.one(), f.one(), f.one(), f.one()];
        let d = k4_delta(&f, &ones, 1).unwrap();
        let mut expected = super::zero(&f);
        expected.comps[2] = f.from_i64(-1);
        expected.comps[3] = f.one();
        assert_eq!(d, expected);
        // Out of range.
        assert!(k4_delta(&f, &ones, 4).is_err());
    }

    #[test]
    fn leibniz_on_all_basis_pairs() {
        let f = qq();
        for i in 0..DIM {
            let a = unit_basis(&f, i);
            for j in 0..DIM {
                let b = unit_basis(&f, j);
                let lhs = delta(&f, &mul(&f, &a, &b));
                let rhs = add(
                    &f,
                    &mul(&f, &tau(&f, &a), &delta(&f, &b)),
                    &mul(&f, &delta(&f, &a), &b),
                );
                assert_eq!(lhs, rhs, "Leibniz failed on basis pair {i},{j}");
            }
        }
    }

    #[test]
    fn invert_examples() {
        let f = qq();
        assert_eq!(try_invert(&f, &one(&f)).unwrap(), one(&f));
        // Idempotent zero-divisor (1,0,0,0) in k^4.
        assert!(try_invert(&f, &basis(&f, 0, 0)).is_none());
        // (1,1,1,1) + xbar is a unit.
        let u = add(&f, &one(&f), &{
            let mut x = super::zero(&f);
            for j in 0..4 {
                x.comps[4 + j] = f.one();
            }
            x
        });
        let inv = try_invert(&f, &u).unwrap();
        assert_eq!(mul(&f, &u, &inv), one(&f));
        assert_eq!(mul(&f, &inv, &u), one(&f));
    }

    #[test]
    fn v_xbar2_nonzero_and_normal() {
        let f = qq();
        let g = v_xbar2(&f);
        assert!(!is_zero(&f, &g));
        let left = left_multiples_span(&f, &g);
        let right = right_multiples_span(&f, &g);
        assert!(crate::field::same_rowspace(&f, &left, &right));
    }
}
