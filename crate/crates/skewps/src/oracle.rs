//! Independent brute-force verifier. Elements are flattened into formal
//! sums of noncommutative words over z-symbols (one per tower level) and
//! opaque base-ring coefficients, then normalized by the one-step graded
//! rules `u z_l -> z_l tau_l(u) + z_l delta_l(u) z_l`, deleting any word
//! whose per-level z-degree reaches the truncation bound.
//!
//! The normalizer never calls into the series multiplication code; the
//! only shared operations are the base-ring primitives themselves.

use crate::report::Report;
use crate::ring::{rat_pow, Elem, Ring, RingRef, SeriesExt};
use crate::series::SkewSeries;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    /// The z-symbol of tower level `l >= 1`.
    Z(usize),
    /// An opaque element of the base coefficient ring.
    C(Elem),
}

pub type Word = Vec<Atom>;

/// A formal sum of scalar-weighted words.
#[derive(Clone, Debug, Default)]
pub struct FreeTerm {
    pub terms: Vec<(BigRational, Word)>,
}

/// Normal form: fully left-sorted z-word (levels descending, encoded as
/// the multiset of levels) mapped to its collected base coefficient.
pub type NormalForm = BTreeMap<Vec<usize>, Elem>;

#[derive(Clone, Copy, Debug)]
pub enum Strategy {
    Leftmost,
    Random(u64),
}

/// Rewriting context for a chain of series rings: `rings[0]` is the base
/// coefficient ring, `rings[l]` the series ring introducing `z_l`.
pub struct Oracle {
    rings: Vec<RingRef>,
}

fn atom_order(a: &Atom) -> usize {
    match a {
        Atom::C(_) => 0,
        Atom::Z(l) => *l,
    }
}

impl Oracle {
    /// Build the context from a (possibly nested) series ring.
    pub fn for_series(ring: &RingRef) -> Oracle {
        let mut chain = vec![ring.clone()];
        let mut cur = ring.clone();
        while let Ring::Series(s) = &*cur {
            chain.push(s.coeff.clone());
            cur = s.coeff.clone();
        }
        chain.reverse();
        Oracle { rings: chain }
    }

    pub fn depth(&self) -> usize {
        self.rings.len() - 1
    }

    fn base(&self) -> &RingRef {
        &self.rings[0]
    }

    fn level_bound(&self, l: usize) -> usize {
        self.rings[l].precision().unwrap_or(usize::MAX)
    }

    fn overweight(&self, w: &Word) -> bool {
        for l in 1..=self.depth() {
            let count = w.iter().filter(|a| *a == &Atom::Z(l)).count();
            if count >= self.level_bound(l) {
                return true;
            }
        }
        false
    }

    /// Flatten a nested series element into a formal sum of words
    /// `z_m^i ... z_1^j c`.
    pub fn encode(&self, e: &Elem) -> FreeTerm {
        let mut out = FreeTerm::default();
        self.encode_at(e, self.depth(), &mut Vec::new(), &mut out);
        out
    }

    fn encode_at(&self, e: &Elem, level: usize, prefix: &mut Word, out: &mut FreeTerm) {
        if level == 0 {
            if !self.base().is_zero(e) {
                let mut w = prefix.clone();
                w.push(Atom::C(e.clone()));
                out.terms.push((BigRational::one(), w));
            }
            return;
        }
        let Elem::Series(f) = e else {
            panic!("expected a series element at level {level}");
        };
        for (i, c) in f.iter() {
            let before = prefix.len();
            for _ in 0..i {
                prefix.push(Atom::Z(level));
            }
            self.encode_at(c, level - 1, prefix, out);
            prefix.truncate(before);
        }
    }

    /// The skew pair `z_l` commutes with: the base ring's attached pair
    /// for level 1, the level's declared extension above that. Returns
    /// `tau_l(u)` as a formal sum.
    fn atom_tau(&self, l: usize, u: &Atom) -> FreeTerm {
        if l == 1 {
            let Atom::C(a) = u else {
                panic!("no letters below level 1");
            };
            let t = self.base().tau(a);
            return FreeTerm {
                terms: if self.base().is_zero(&t) {
                    vec![]
                } else {
                    vec![(BigRational::one(), vec![Atom::C(t)])]
                },
            };
        }
        let Ring::Series(s) = &*self.rings[l - 1] else {
            unreachable!();
        };
        match &s.ext {
            SeriesExt::Trivial | SeriesExt::Lowering => FreeTerm {
                terms: vec![(BigRational::one(), vec![u.clone()])],
            },
            SeriesExt::WeylSigmaD { q, .. } => {
                if *u == Atom::Z(l - 1) {
                    FreeTerm {
                        terms: vec![(rat_pow(q, -1), vec![Atom::Z(l - 1)])],
                    }
                } else {
                    // sigma is trivial on everything below its own z.
                    FreeTerm {
                        terms: vec![(BigRational::one(), vec![u.clone()])],
                    }
                }
            }
            SeriesExt::TauQ { q } => {
                if *u == Atom::Z(l - 1) {
                    FreeTerm {
                        terms: vec![(q.clone(), vec![Atom::Z(l - 1)])],
                    }
                } else {
                    self.atom_tau(l - 1, u)
                }
            }
        }
    }

    /// `delta_l(u)` as a formal sum; empty means zero.
    fn atom_delta(&self, l: usize, u: &Atom) -> FreeTerm {
        if l == 1 {
            let Atom::C(a) = u else {
                panic!("no letters below level 1");
            };
            let d = self.base().delta(a);
            return FreeTerm {
                terms: if self.base().is_zero(&d) {
                    vec![]
                } else {
                    vec![(BigRational::one(), vec![Atom::C(d)])]
                },
            };
        }
        let Ring::Series(s) = &*self.rings[l - 1] else {
            unreachable!();
        };
        match &s.ext {
            SeriesExt::Trivial | SeriesExt::TauQ { .. } | SeriesExt::Lowering => {
                FreeTerm::default()
            }
            SeriesExt::WeylSigmaD { q, d } => {
                if *u == Atom::Z(l - 1) {
                    // D(z) = -d q^{-1} z^2 at its own level, zero below.
                    FreeTerm {
                        terms: vec![(-(d * rat_pow(q, -1)), vec![Atom::Z(l - 1), Atom::Z(l - 1)])],
                    }
                } else {
                    FreeTerm::default()
                }
            }
        }
    }

    fn violation_positions(&self, w: &Word) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            let a = atom_order(&w[i]);
            let b = atom_order(&w[i + 1]);
            if a < b || (a == 0 && b == 0) {
                out.push(i);
            }
        }
        out
    }

    /// Rewrite to normal form, collecting scalars into base coefficients.
    pub fn normalize(&self, term: FreeTerm, strategy: Strategy) -> NormalForm {
        let mut rng = match strategy {
            Strategy::Leftmost => None,
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        let mut queue: Vec<(BigRational, Word)> = term
            .terms
            .into_iter()
            .filter(|(s, w)| !s.is_zero() && !self.overweight(w))
            .collect();
        let mut done: Vec<(BigRational, Word)> = Vec::new();
        let mut steps = 0usize;
        while let Some((scalar, word)) = queue.pop() {
            steps += 1;
            assert!(steps < 2_000_000, "rewriting did not terminate");
            let positions = self.violation_positions(&word);
            if positions.is_empty() {
                done.push((scalar, word));
                continue;
            }
            let i = match &mut rng {
                None => positions[0],
                Some(r) => positions[r.gen_range(0..positions.len())],
            };
            let (u, v) = (&word[i], &word[i + 1]);
            match (u, v) {
                (Atom::C(a), Atom::C(b)) => {
                    let ab = self.base().mul(a, b);
                    if self.base().is_zero(&ab) {
                        continue;
                    }
                    let mut w = word.clone();
                    w.splice(i..i + 2, [Atom::C(ab)]);
                    queue.push((scalar, w));
                }
                (u, Atom::Z(l)) => {
                    let l = *l;
                    // u z = z tau(u) + z delta(u) z
                    for (s, tw) in self.atom_tau(l, u).terms {
                        let mut w = word[..i].to_vec();
                        w.push(Atom::Z(l));
                        w.extend(tw);
                        w.extend_from_slice(&word[i + 2..]);
                        if !self.overweight(&w) {
                            queue.push((&scalar * s, w));
                        }
                    }
                    for (s, dw) in self.atom_delta(l, u).terms {
                        let mut w = word[..i].to_vec();
                        w.push(Atom::Z(l));
                        w.extend(dw);
                        w.push(Atom::Z(l));
                        w.extend_from_slice(&word[i + 2..]);
                        if !self.overweight(&w) {
                            queue.push((&scalar * s, w));
                        }
                    }
                }
                _ => unreachable!("violation between non-rewritable atoms"),
            }
        }

        let mut nf: NormalForm = BTreeMap::new();
        for (scalar, word) in done {
            let mut zpart: Vec<usize> = Vec::new();
            let mut coeff = self.base().from_rational(&scalar);
            for atom in word {
                match atom {
                    Atom::Z(l) => zpart.push(l),
                    Atom::C(a) => coeff = self.base().mul(&coeff, &a),
                }
            }
            // Descending level order is the canonical reading.
            zpart.sort_unstable_by(|a, b| b.cmp(a));
            let slot = nf.entry(zpart).or_insert_with(|| self.base().zero());
            *slot = self.base().add(slot, &coeff);
        }
        nf.retain(|_, c| !self.base().is_zero(c));
        nf
    }

    /// Rebuild a top-level element from a normal form, using only series
    /// constructors and base addition.
    pub fn decode(&self, nf: &NormalForm) -> Elem {
        let top = self.rings.last().unwrap();
        let mut acc = top.zero();
        for (zpart, coeff) in nf {
            let mut counts = vec![0usize; self.depth() + 1];
            for l in zpart {
                counts[*l] += 1;
            }
            let mut e = coeff.clone();
            for l in 1..=self.depth() {
                e = Elem::Series(Box::new(SkewSeries::monomial(
                    self.rings[l - 1].clone(),
                    e,
                    counts[l],
                    self.level_bound(l),
                )));
            }
            acc = top.add(&acc, &e);
        }
        acc
    }

    /// Concatenation product of two encoded elements.
    pub fn word_product(&self, f: &FreeTerm, g: &FreeTerm) -> FreeTerm {
        let mut out = FreeTerm::default();
        for (sf, wf) in &f.terms {
            for (sg, wg) in &g.terms {
                let mut w = wf.clone();
                w.extend_from_slice(wg);
                out.terms.push((sf * sg, w));
            }
        }
        out
    }
}

/// Differential comparison: the rewritten word product of `f` and `g`
/// must decode to exactly the series product `f g`.
pub fn oracle_compare(ring: &RingRef, f: &Elem, g: &Elem) -> Report {
    let oracle = Oracle::for_series(ring);
    let mut report = Report::new(
        "oracle-diff",
        &ring.id(),
        ring.precision().unwrap_or(0),
        1,
        0,
    );
    let prod_words = oracle.word_product(&oracle.encode(f), &oracle.encode(g));
    let nf = oracle.normalize(prod_words, Strategy::Leftmost);
    let decoded = oracle.decode(&nf);
    let direct = ring.mul(f, g);
    let ok = ring.eq(&decoded, &direct);
    report.push(
        "product-match",
        ok,
        (!ok).then(|| {
            format!(
                "oracle {} vs series {}",
                ring.format_elem(&decoded),
                ring.format_elem(&direct)
            )
        }),
    );
    report.finish()
}

/// Strategy independence: leftmost and randomized rule application agree.
pub fn strategies_agree(ring: &RingRef, term: &FreeTerm, seed: u64) -> bool {
    let oracle = Oracle::for_series(ring);
    let a = oracle.normalize(term.clone(), Strategy::Leftmost);
    let b = oracle.normalize(term.clone(), Strategy::Random(seed));
    if a.len() != b.len() {
        return false;
    }
    a.iter().zip(b.iter()).all(|((wa, ca), (wb, cb))| {
        wa == wb && oracle.base().eq(ca, cb)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k4;
    use crate::ring::PolyDeriv;

    fn dt_series(n: usize) -> RingRef {
        Ring::series(Ring::poly(PolyDeriv::Dt), SeriesExt::Trivial, n)
    }

    fn t_elem() -> Elem {
        Elem::Poly(vec![
            BigRational::zero(),
            BigRational::one(),
        ])
    }

    #[test]
    fn normalize_t_z() {
        let ring = dt_series(4);
        let oracle = Oracle::for_series(&ring);
        // t z -> z t + z^2
        let term = FreeTerm {
            terms: vec![(BigRational::one(), vec![Atom::C(t_elem()), Atom::Z(1)])],
        };
        let nf = oracle.normalize(term, Strategy::Leftmost);
        assert_eq!(nf.len(), 2);
        assert_eq!(nf.get(&vec![1]), Some(&t_elem()));
        assert_eq!(
            nf.get(&vec![1, 1]),
            Some(&Elem::Poly(vec![BigRational::one()]))
        );
    }

    #[test]
    fn normalize_with_zero_delta_collapses() {
        let ring = Ring::series(
            Ring::from_id("poly_qscale:2").unwrap(),
            SeriesExt::Trivial,
            4,
        );
        let oracle = Oracle::for_series(&ring);
        let term = FreeTerm {
            terms: vec![(BigRational::one(), vec![Atom::C(t_elem()), Atom::Z(1)])],
        };
        let nf = oracle.normalize(term, Strategy::Leftmost);
        // t z = z tau(t) = z (2t), nothing above degree one
        assert_eq!(nf.len(), 1);
        assert_eq!(
            nf.get(&vec![1]),
            Some(&Elem::Poly(vec![
                BigRational::zero(),
                BigRational::from_integer(2.into())
            ]))
        );
    }

    #[test]
    fn compare_simple_product() {
        let ring = dt_series(4);
        let f = Elem::Series(Box::new(SkewSeries::constant(
            Ring::poly(PolyDeriv::Dt),
            t_elem(),
            4,
        )));
        let g = Elem::Series(Box::new(SkewSeries::z(Ring::poly(PolyDeriv::Dt), 4)));
        assert!(oracle_compare(&ring, &f, &g).pass);
        assert!(oracle_compare(&ring, &g, &f).pass);
    }

    #[test]
    fn compare_sampled_products_per_ring() {
        for id in [
            "QQ",
            "Fp:101",
            "poly_dt",
            "poly_euler",
            "poly_qscale:2",
            "poly_trunc:4:euler",
            "k4_quotient",
        ] {
            let coeff = Ring::from_id(id).unwrap();
            let ring = Ring::series(coeff, SeriesExt::Trivial, 5);
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..40 {
                let f = ring.sample(&mut rng);
                let g = ring.sample(&mut rng);
                let rep = oracle_compare(&ring, &f, &g);
                assert!(rep.pass, "{id}: {:?}", rep);
            }
        }
    }

    #[test]
    fn compare_weyl_tower() {
        let x_level = Ring::series(
            Ring::rational(),
            SeriesExt::WeylSigmaD {
                q: BigRational::one(),
                d: BigRational::one(),
            },
            6,
        );
        let ring = Ring::series(x_level.clone(), SeriesExt::Trivial, 6);
        let zx = Elem::Series(Box::new(SkewSeries::constant(
            x_level.clone(),
            Elem::Series(Box::new(SkewSeries::z(Ring::rational(), 6))),
            6,
        )));
        let zy = Elem::Series(Box::new(SkewSeries::z(x_level, 6)));
        assert!(oracle_compare(&ring, &zx, &zy).pass);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let f = ring.sample(&mut rng);
            let g = ring.sample(&mut rng);
            assert!(oracle_compare(&ring, &f, &g).pass);
        }
    }

    #[test]
    fn nilpotent_sandwich_vanishes() {
        // v xbar^2 (z^2 v xbar^2) = 0 in the k4 series ring
        let coeff = Ring::from_id("k4_quotient").unwrap();
        let ring = Ring::series(coeff.clone(), SeriesExt::Trivial, 8);
        let w = Elem::K4(k4::v_xbar2(&crate::field::FieldKind::Rational));
        let f = Elem::Series(Box::new(SkewSeries::constant(coeff.clone(), w.clone(), 8)));
        let g = Elem::Series(Box::new(SkewSeries::monomial(coeff, w, 2, 8)));
        let rep = oracle_compare(&ring, &f, &g);
        assert!(rep.pass);
        let prod = ring.mul(&f, &g);
        assert!(ring.is_zero(&prod));
    }

    #[test]
    fn strategy_independence() {
        let ring = dt_series(5);
        let oracle = Oracle::for_series(&ring);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for k in 0..50u64 {
            let f = ring.sample(&mut rng);
            let g = ring.sample(&mut rng);
            let term = oracle.word_product(&oracle.encode(&f), &oracle.encode(&g));
            assert!(strategies_agree(&ring, &term, 1000 + k));
        }
    }
}
