//! Exact base-field scalars (rationals and prime fields) plus the small
//! dense linear algebra used for unit tests and span comparisons in
//! finite-dimensional coefficient rings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The base field a finite-dimensional coefficient ring is defined over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    /// F_p for an odd prime p < 2^31.
    Prime(u64),
}

/// An element of a [`FieldKind`]. `Fp` values are kept reduced mod p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Fp(u64),
}

impl FieldKind {
    pub fn zero(&self) -> Scalar {
        match self {
            FieldKind::Rational => Scalar::Rat(BigRational::zero()),
            FieldKind::Prime(_) => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldKind::Rational => Scalar::Rat(BigRational::one()),
            FieldKind::Prime(_) => Scalar::Fp(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldKind::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldKind::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp(m)
            }
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Scalar {
        match self {
            FieldKind::Rational => Scalar::Rat(r.clone()),
            FieldKind::Prime(p) => {
                let p_big = BigInt::from(*p);
                let num = r.numer().clone() % &p_big;
                let den = r.denom().clone() % &p_big;
                let num = bigint_to_fp(&num, *p);
                let den = bigint_to_fp(&den, *p);
                let den_inv = fp_inv(den, *p).expect("denominator divisible by p");
                Scalar::Fp(mulmod(num, den_inv, *p))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldKind::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldKind::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % p),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldKind::Rational, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldKind::Prime(p), Scalar::Fp(x)) => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldKind::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldKind::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(mulmod(*x, *y, *p)),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (FieldKind::Rational, Scalar::Rat(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(x.recip()))
                }
            }
            (FieldKind::Prime(p), Scalar::Fp(x)) => fp_inv(*x, *p).map(Scalar::Fp),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Fp(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_one(),
            Scalar::Fp(x) => *x == 1,
        }
    }

    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Rat(x) => format_rational(x),
            Scalar::Fp(x) => x.to_string(),
        }
    }

    pub fn parse(&self, text: &str) -> Option<Scalar> {
        match self {
            FieldKind::Rational => parse_rational(text).map(Scalar::Rat),
            FieldKind::Prime(p) => {
                let r = parse_rational(text)?;
                let den = bigint_to_fp(&(r.denom() % BigInt::from(*p)), *p);
                if den == 0 {
                    return None;
                }
                Some(self.from_rational(&r))
            }
        }
    }
}

fn bigint_to_fp(n: &BigInt, p: u64) -> u64 {
    let p_big = BigInt::from(p);
    let mut m = n % &p_big;
    if m.is_negative() {
        m += &p_big;
    }
    let (_, digits) = m.to_u64_digits();
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_inv(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // Fermat: a^(p-2) mod p.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    Some(acc)
}

/// Prints `p/q`, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `p` or `p/q` with optional leading sign.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = text.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(x) => write!(f, "{}", format_rational(x)),
            Scalar::Fp(x) => write!(f, "{}", x),
        }
    }
}

/// Row-reduce `rows` in place to reduced row echelon form; returns the rank.
/// Zero rows are moved to the bottom.
pub fn rref(field: &FieldKind, rows: &mut Vec<Vec<Scalar>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let mut sel = None;
        for r in pivot_row..rows.len() {
            if !field.is_zero(&rows[r][col]) {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        rows.swap(pivot_row, sel);
        let inv = field
            .inv(&rows[pivot_row][col])
            .expect("nonzero field element");
        for c in col..ncols {
            rows[pivot_row][c] = field.mul(&rows[pivot_row][c], &inv);
        }
        for r in 0..rows.len() {
            if r != pivot_row && !field.is_zero(&rows[r][col]) {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let t = field.mul(&rows[pivot_row][c], &factor);
                    rows[r][c] = field.sub(&rows[r][c], &t);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    pivot_row
}

/// Whether `v` lies in the row space of `basis` (given in any form).
pub fn in_rowspace(field: &FieldKind, basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    let mut rows: Vec<Vec<Scalar>> = basis.to_vec();
    let rank = rref(field, &mut rows);
    let mut with = rows[..rank].to_vec();
    with.push(v.to_vec());
    let rank2 = rref(field, &mut with);
    rank2 == rank
}

/// Whether two row sets span the same subspace.
pub fn same_rowspace(field: &FieldKind, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    let mut ra: Vec<Vec<Scalar>> = a.to_vec();
    let mut rb: Vec<Vec<Scalar>> = b.to_vec();
    let rka = rref(field, &mut ra);
    let rkb = rref(field, &mut rb);
    if rka != rkb {
        return false;
    }
    ra.truncate(rka);
    rb.truncate(rkb);
    ra == rb
}

/// Solve the square system `m * x = rhs` over the field; `m` is row-major.
pub fn solve_square(field: &FieldKind, m: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = rhs.len();
    let mut aug: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row = m[i].clone();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    rref(field, &mut aug);
    let mut x = vec![field.zero(); n];
    for row in &aug {
        let lead = row[..n].iter().position(|c| !field.is_zero(c));
        match lead {
            Some(j) => x[j] = row[n].clone(),
            None => {
                if !field.is_zero(&row[n]) {
                    return None; // inconsistent
                }
            }
        }
    }
    // Verify (guards against underdetermined systems).
    for i in 0..n {
        let mut acc = field.zero();
        for j in 0..n {
            acc = field.add(&acc, &field.mul(&m[i][j], &x[j]));
        }
        if acc != rhs[i] {
            return None;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn rational_parse_format_roundtrip() {
        for s in ["3", "-7", "1/2", "-5/3", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn fp_inverse() {
        let f = FieldKind::Prime(101);
        for a in 1..101u64 {
            let inv = f.inv(&Scalar::Fp(a)).unwrap();
            assert!(f.is_one(&f.mul(&Scalar::Fp(a), &inv)));
        }
        assert!(f.inv(&Scalar::Fp(0)).is_none());
    }

    #[test]
    fn solve_small_system() {
        let f = FieldKind::Rational;
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let m = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        let x = solve_square(&f, &m, &[q(3, 1), q(1, 1)]).unwrap();
        assert_eq!(x, vec![q(2, 1), q(1, 1)]);
    }

    #[test]
    fn rowspace_comparison() {
        let f = FieldKind::Rational;
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let b = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        assert!(same_rowspace(&f, &a, &b));
        let c = vec![vec![q(1, 1), q(1, 1)]];
        assert!(!same_rowspace(&f, &a, &c));
        assert!(in_rowspace(&f, &c, &[q(2, 1), q(2, 1)]));
        assert!(!in_rowspace(&f, &c, &[q(2, 1), q(1, 1)]));
    }
}
