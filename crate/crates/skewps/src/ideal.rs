//! Ideal-theoretic finite checks: the induced series ideal `I<<z>>`, the
//! equality `I<<z>> = IS = SI` at truncation, contraction back to `R`, and
//! the coefficient condition on powers of `J = I + <z>`.

use crate::k4;
use crate::report::Report;
use crate::ring::{Elem, Ring, RingRef, SeriesExt};
use crate::series::SkewSeries;
use crate::Error;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A catalogued ideal of a coefficient ring with a decidable membership
/// procedure. Only the principal/monomial cases the checks need.
#[derive(Clone, Debug, PartialEq)]
pub enum IdealSpec {
    Zero,
    Unit,
    /// `<t^j>` in a polynomial ring or its truncated quotient, `j >= 1`.
    PolyPower { j: usize },
    /// Two-sided principal ideal `<g>` in the k4 quotient ring.
    K4Principal { gen: Box<Elem> },
}

impl IdealSpec {
    /// Parse an ideal identifier: `0`, `unit`, `t`, `t^j`, `xbar`.
    pub fn from_id(ring: &RingRef, id: &str) -> Result<IdealSpec, Error> {
        match id {
            "0" => Ok(IdealSpec::Zero),
            "unit" => Ok(IdealSpec::Unit),
            "t" => Ok(IdealSpec::PolyPower { j: 1 }),
            "xbar" => {
                let gen = ring
                    .literal("x")
                    .ok_or_else(|| Error::Invalid("xbar requires a k4 ring".into()))?;
                Ok(IdealSpec::K4Principal { gen: Box::new(gen) })
            }
            _ => {
                if let Some(j) = id.strip_prefix("t^") {
                    let j: usize = j
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad ideal id: {id}")))?;
                    if j == 0 {
                        return Ok(IdealSpec::Unit);
                    }
                    return Ok(IdealSpec::PolyPower { j });
                }
                Err(Error::Invalid(format!("bad ideal id: {id}")))
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            IdealSpec::Zero => "0".into(),
            IdealSpec::Unit => "unit".into(),
            IdealSpec::PolyPower { j: 1 } => "t".into(),
            IdealSpec::PolyPower { j } => format!("t^{j}"),
            IdealSpec::K4Principal { .. } => "xbar".into(),
        }
    }

    pub fn generators(&self, ring: &RingRef) -> Vec<Elem> {
        match self {
            IdealSpec::Zero => vec![],
            IdealSpec::Unit => vec![ring.one()],
            IdealSpec::PolyPower { j } => {
                let mut v = vec![BigRational::zero(); j + 1];
                v[*j] = BigRational::from_integer(1.into());
                vec![Elem::Poly(v)]
            }
            IdealSpec::K4Principal { gen } => vec![(**gen).clone()],
        }
    }

    pub fn member(&self, ring: &RingRef, e: &Elem) -> bool {
        match self {
            IdealSpec::Zero => ring.is_zero(e),
            IdealSpec::Unit => true,
            IdealSpec::PolyPower { j } => match e {
                Elem::Poly(v) => v.iter().take(*j).all(|c| c.is_zero()),
                _ => panic!("polynomial ideal over non-polynomial ring"),
            },
            IdealSpec::K4Principal { gen } => {
                let (Ring::K4(field), Elem::K4(x), Elem::K4(g)) = (&**ring, e, &**gen) else {
                    panic!("k4 ideal over non-k4 ring");
                };
                let span = k4::two_sided_span(field, g);
                crate::field::in_rowspace(field, &span, &x.comps)
            }
        }
    }

    /// `I^k` (with `I^0` the unit ideal).
    pub fn power(&self, k: usize) -> IdealSpec {
        if k == 0 {
            return IdealSpec::Unit;
        }
        match self {
            IdealSpec::Zero => IdealSpec::Zero,
            IdealSpec::Unit => IdealSpec::Unit,
            IdealSpec::PolyPower { j } => IdealSpec::PolyPower { j: j * k },
            IdealSpec::K4Principal { .. } => {
                panic!("powers of the k4 ideal are not catalogued")
            }
        }
    }

    /// A random member: generator times a random ring element (plus a
    /// random left multiple for the noncommutative case).
    pub fn sample_member(&self, ring: &RingRef, rng: &mut ChaCha8Rng) -> Elem {
        match self {
            IdealSpec::Zero => ring.zero(),
            IdealSpec::Unit => ring.sample(rng),
            IdealSpec::PolyPower { .. } => {
                let g = &self.generators(ring)[0];
                ring.mul(g, &ring.sample(rng))
            }
            IdealSpec::K4Principal { gen } => {
                let r = ring.sample(rng);
                let s = ring.sample(rng);
                ring.mul(&ring.mul(&r, gen), &s)
            }
        }
    }
}

/// True iff `tau(g)` and `delta(g)` stay in `I` for every generator.
pub fn check_tau_delta_ideal(ring: &RingRef, spec: &IdealSpec) -> bool {
    spec.generators(ring).iter().all(|g| {
        spec.member(ring, &ring.tau(g)) && spec.member(ring, &ring.delta(g))
    })
}

/// The induced two-sided ideal `I<<z>>` of `S`: every stored coefficient
/// lies in `I`.
pub fn series_ideal_member(f: &SkewSeries, ring: &RingRef, spec: &IdealSpec) -> bool {
    let right = f.to_right_form();
    let ok = right.iter().all(|(_, c)| spec.member(ring, c));
    ok
}

fn sample_ideal_series(
    ring: &RingRef,
    spec: &IdealSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> SkewSeries {
    let mut f = SkewSeries::zero(ring.clone(), n);
    let terms = rng.gen_range(1..=4usize);
    for _ in 0..terms {
        let i = rng.gen_range(0..n);
        f.set_coeff(i, spec.sample_member(ring, rng));
    }
    f
}

fn sample_plain_series(ring: &RingRef, n: usize, rng: &mut ChaCha8Rng) -> SkewSeries {
    let series_ring = Ring::series(ring.clone(), SeriesExt::Trivial, n);
    match series_ring.sample(rng) {
        Elem::Series(s) => *s,
        _ => unreachable!(),
    }
}

/// Exact division of a polynomial coefficient by `t^j`; `None` if some low
/// coefficient survives.
fn divide_poly_power(e: &Elem, j: usize) -> Option<Elem> {
    let Elem::Poly(v) = e else { return None };
    if v.iter().take(j).any(|c| !c.is_zero()) {
        return None;
    }
    Some(Elem::Poly(v.iter().skip(j).cloned().collect::<Vec<_>>()))
}

/// The three inclusions of `I<<z>> = IS = SI`, sampled at precision `n`:
/// (a) products `s * g * s'` with `g` a generator land in `I<<z>>`;
/// (b) every sampled member of `I<<z>>` factors through the generator on
/// the right, verified by an actual series product;
/// (c) membership is side-independent and contracts to `I` in degree zero.
pub fn check_is_equals_ideal(
    ring: &RingRef,
    spec: &IdealSpec,
    n: usize,
    samples: usize,
    seed: u64,
) -> Report {
    let mut report = Report::new("prop2.7", &ring.id(), n, samples, seed);
    report.set_param("ideal", spec.id().into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = spec.generators(ring);

    let mut incl_a = true;
    let mut incl_b = true;
    let mut incl_c = true;
    let mut witness_a = None;
    let mut witness_b = None;
    let mut witness_c = None;

    for _ in 0..samples {
        // (a) IS and SI inclusion into I<<z>>.
        if let Some(g) = gens.first() {
            let s = sample_plain_series(ring, n, &mut rng);
            let s2 = sample_plain_series(ring, n, &mut rng);
            let gc = SkewSeries::constant(ring.clone(), g.clone(), n);
            let prod = s
                .mul(&gc)
                .and_then(|p| p.mul(&s2))
                .expect("sampled product");
            if incl_a && !series_ideal_member(&prod, ring, spec) {
                incl_a = false;
                witness_a = Some(prod.format());
            }
        }

        // (b) members of I<<z>> factor as (series) * g.
        let f = sample_ideal_series(ring, spec, n, &mut rng);
        match spec {
            IdealSpec::PolyPower { j } => {
                let mut h = SkewSeries::zero(ring.clone(), n);
                let mut ok = true;
                for (i, c) in f.clone().iter() {
                    match divide_poly_power(c, *j) {
                        Some(q) => h.set_coeff(i, q),
                        None => ok = false,
                    }
                }
                let g = SkewSeries::constant(ring.clone(), gens[0].clone(), n);
                let back = h.mul(&g).expect("factored product");
                if incl_b && !(ok && back.eq_min(&f)) {
                    incl_b = false;
                    witness_b = Some(f.format());
                }
            }
            IdealSpec::Zero => {
                if incl_b && !f.is_zero() {
                    incl_b = false;
                    witness_b = Some(f.format());
                }
            }
            _ => {
                // Unit ideal: f = f * 1 trivially.
            }
        }

        // (c) side independence and degree-zero contraction.
        let left = f.to_left_form();
        let left_ok = left.iter().all(|(_, c)| spec.member(ring, c));
        let const_ok = spec.member(ring, &f.to_right_form().coeff(0));
        if incl_c && !(left_ok && const_ok) {
            incl_c = false;
            witness_c = Some(f.format());
        }
        // Non-members must stay outside.
        if !matches!(spec, IdealSpec::Unit) {
            let outside = SkewSeries::constant(ring.clone(), ring.one(), n);
            if incl_c && series_ideal_member(&outside, ring, spec) {
                incl_c = false;
                witness_c = Some(outside.format());
            }
        }
    }

    report.push("inclusion-IS-SI", incl_a, witness_a);
    report.push("inclusion-factorization", incl_b, witness_b);
    report.push("contraction", incl_c, witness_c);
    report.finish()
}

/// Coefficient condition on `J^t` for `J = I + <z>`: products of `t`
/// factors drawn from `I` and `{z}` have coefficient `j` in `I^{t-j}` for
/// every `j < t`. One-sided: sampling cannot establish the converse.
pub fn check_star_condition(
    ring: &RingRef,
    spec: &IdealSpec,
    t: usize,
    n: usize,
    samples: usize,
    seed: u64,
) -> Report {
    assert!(t >= 1);
    let mut report = Report::new("star", &ring.id(), n, samples, seed);
    report.set_param("ideal", spec.id().into());
    report.set_param("t", (t as u64).into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let powers: Vec<IdealSpec> = (0..t).map(|j| spec.power(t - j)).collect();
    let mut pass = true;
    let mut witness = None;

    for _ in 0..samples {
        let mut prod = SkewSeries::constant(ring.clone(), ring.one(), n);
        for _ in 0..t {
            let factor = if rng.gen_bool(0.5) {
                SkewSeries::constant(ring.clone(), spec.sample_member(ring, &mut rng), n)
            } else {
                SkewSeries::z(ring.clone(), n)
            };
            prod = prod.mul(&factor).expect("sampled product");
        }
        // Optional outer multiples keep the sample inside the ideal J^t.
        if rng.gen_bool(0.5) {
            let s = sample_plain_series(ring, n, &mut rng);
            prod = s.mul(&prod).expect("outer product");
        }
        for (j, ideal) in powers.iter().enumerate() {
            if j >= prod.precision() {
                break;
            }
            if pass && !ideal.member(ring, &prod.coeff(j)) {
                pass = false;
                witness = Some(format!("coefficient {j} of {}", prod.format()));
            }
        }
    }

    report.push("coefficient-condition", pass, witness);
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::PolyDeriv;

    fn poly_euler() -> RingRef {
        Ring::poly(PolyDeriv::Euler)
    }

    fn t_ideal() -> IdealSpec {
        IdealSpec::PolyPower { j: 1 }
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
    fn tau_delta_stability() {
        let euler = poly_euler();
        assert!(check_tau_delta_ideal(&euler, &t_ideal()));
        let dt = Ring::poly(PolyDeriv::Dt);
        assert!(!check_tau_delta_ideal(&dt, &t_ideal()));
        let k4 = Ring::from_id("k4_quotient").unwrap();
        let xbar = IdealSpec::from_id(&k4, "xbar").unwrap();
        assert!(!check_tau_delta_ideal(&k4, &xbar));
    }

    #[test]
    fn membership_examples() {
        let r = poly_euler();
        let i = t_ideal();
        // z*t + z^2*t^3 is in, 1 + z*t is not
        let mut f = SkewSeries::zero(r.clone(), 6);
        f.set_coeff(1, int_poly(&[0, 1]));
        f.set_coeff(2, int_poly(&[0, 0, 0, 1]));
        assert!(series_ideal_member(&f, &r, &i));
        let mut g = SkewSeries::zero(r.clone(), 6);
        g.set_coeff(0, int_poly(&[1]));
        g.set_coeff(1, int_poly(&[0, 1]));
        assert!(!series_ideal_member(&g, &r, &i));
    }

    #[test]
    fn stable_ideal_absorbs_products() {
        let r = poly_euler();
        let i = t_ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let f = sample_ideal_series(&r, &i, 8, &mut rng);
            let g = sample_plain_series(&r, 8, &mut rng);
            assert!(series_ideal_member(&f.mul(&g).unwrap(), &r, &i));
            assert!(series_ideal_member(&g.mul(&f).unwrap(), &r, &i));
        }
    }

    #[test]
    fn prop_report_passes() {
        let r = poly_euler();
        let rep = check_is_equals_ideal(&r, &t_ideal(), 8, 50, 5);
        assert!(rep.pass, "{:?}", rep);
        // degenerate ideals
        assert!(check_is_equals_ideal(&r, &IdealSpec::Zero, 8, 20, 5).pass);
        assert!(check_is_equals_ideal(&r, &IdealSpec::Unit, 8, 20, 5).pass);
    }

    #[test]
    fn star_condition_small_t() {
        let r = poly_euler();
        for t in 1..=3 {
            let rep = check_star_condition(&r, &t_ideal(), t, 8, 50, 5);
            assert!(rep.pass, "t={t}: {:?}", rep);
        }
    }

    #[test]
    fn quotient_compatibility() {
        // arithmetic over the truncated quotient matches arithmetic over
        // the full ring followed by coefficientwise reduction mod t^3
        let full = poly_euler();
        let trunc = Ring::poly_trunc(3, PolyDeriv::Euler);
        let reduce = |e: &Elem| -> Elem {
            let Elem::Poly(v) = e else { unreachable!() };
            let mut v = v.clone();
            v.truncate(3);
            while v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            Elem::Poly(v)
        };
        let reduce_series = |f: &SkewSeries| -> SkewSeries {
            let mut out = SkewSeries::zero(trunc.clone(), f.precision());
            for (i, c) in f.iter() {
                out.set_coeff(i, reduce(c));
            }
            out
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let f = sample_plain_series(&full, 8, &mut rng);
            let g = sample_plain_series(&full, 8, &mut rng);
            let down = reduce_series(&f.mul(&g).unwrap());
            let up = reduce_series(&f).mul(&reduce_series(&g)).unwrap();
            assert!(down.eq_min(&up));
        }
    }
}
