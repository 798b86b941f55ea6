//! Sampled checks of the ring axioms and the skew-derivation laws.
//! Failures are data: each axiom is reported with a witness, never a panic.

use crate::ring::{Elem, RingRef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Axiom {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ring: String,
    pub samples: usize,
    pub seed: u64,
    pub axioms: Vec<Axiom>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }

    pub fn first_failure(&self) -> Option<&Axiom> {
        self.axioms.iter().find(|a| !a.pass)
    }
}

struct AxiomRun<'a> {
    ring: &'a RingRef,
    name: &'static str,
    failure: Option<String>,
}

impl<'a> AxiomRun<'a> {
    fn new(ring: &'a RingRef, name: &'static str) -> Self {
        AxiomRun {
            ring,
            name,
            failure: None,
        }
    }

    fn check(&mut self, lhs: &Elem, rhs: &Elem, inputs: &[&Elem]) {
        if self.failure.is_some() || self.ring.eq(lhs, rhs) {
            return;
        }
        let shown: Vec<String> = inputs.iter().map(|e| self.ring.format_elem(e)).collect();
        self.failure = Some(format!(
            "inputs [{}]: {} != {}",
            shown.join(", "),
            self.ring.format_elem(lhs),
            self.ring.format_elem(rhs)
        ));
    }

    fn finish(self) -> Axiom {
        Axiom {
            name: self.name.to_string(),
            pass: self.failure.is_none(),
            witness: self.failure,
        }
    }
}

/// Sampled ring-axiom suite: additive group laws, associativity,
/// distributivity, identities.
pub fn validate_ring(ring: &RingRef, sample_count: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = ring.one();
    let zero = ring.zero();

    let mut add_assoc = AxiomRun::new(ring, "add-associative");
    let mut add_comm = AxiomRun::new(ring, "add-commutative");
    let mut add_zero = AxiomRun::new(ring, "add-zero-identity");
    let mut add_inv = AxiomRun::new(ring, "add-inverse");
    let mut mul_assoc = AxiomRun::new(ring, "mul-associative");
    let mut dist_l = AxiomRun::new(ring, "distributive-left");
    let mut dist_r = AxiomRun::new(ring, "distributive-right");
    let mut mul_one = AxiomRun::new(ring, "one-identity");
    let mut mul_zero = AxiomRun::new(ring, "zero-annihilates");

    for _ in 0..sample_count {
        let a = ring.sample(&mut rng);
        let b = ring.sample(&mut rng);
        let c = ring.sample(&mut rng);

        add_assoc.check(
            &ring.add(&ring.add(&a, &b), &c),
            &ring.add(&a, &ring.add(&b, &c)),
            &[&a, &b, &c],
        );
        add_comm.check(&ring.add(&a, &b), &ring.add(&b, &a), &[&a, &b]);
        add_zero.check(&ring.add(&a, &zero), &a, &[&a]);
        add_inv.check(&ring.add(&a, &ring.neg(&a)), &zero, &[&a]);
        mul_assoc.check(
            &ring.mul(&ring.mul(&a, &b), &c),
            &ring.mul(&a, &ring.mul(&b, &c)),
            &[&a, &b, &c],
        );
        dist_l.check(
            &ring.mul(&a, &ring.add(&b, &c)),
            &ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c)),
            &[&a, &b, &c],
        );
        dist_r.check(
            &ring.mul(&ring.add(&a, &b), &c),
            &ring.add(&ring.mul(&a, &c), &ring.mul(&b, &c)),
            &[&a, &b, &c],
        );
        mul_one.check(&ring.mul(&a, &one), &a, &[&a]);
        mul_one.check(&ring.mul(&one, &a), &a, &[&a]);
        mul_zero.check(&ring.mul(&a, &zero), &zero, &[&a]);
        mul_zero.check(&ring.mul(&zero, &a), &zero, &[&a]);
    }

    ValidationReport {
        ring: ring.id(),
        samples: sample_count,
        seed,
        axioms: vec![
            add_assoc.finish(),
            add_comm.finish(),
            add_zero.finish(),
            add_inv.finish(),
            mul_assoc.finish(),
            dist_l.finish(),
            dist_r.finish(),
            mul_one.finish(),
            mul_zero.finish(),
        ],
    }
}

/// Sampled checks of the attached `(tau, delta)` pair: tau is a ring
/// automorphism with the given inverse, delta is additive, `delta(1) = 0`,
/// and `delta(ab) = tau(a) delta(b) + delta(a) b`.
pub fn validate_skew_derivation(
    ring: &RingRef,
    sample_count: usize,
    seed: u64,
) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = ring.one();
    let zero = ring.zero();

    let mut tau_add = AxiomRun::new(ring, "tau-additive");
    let mut tau_mul = AxiomRun::new(ring, "tau-multiplicative");
    let mut tau_one = AxiomRun::new(ring, "tau-one");
    let mut tau_round = AxiomRun::new(ring, "tau-inverse-roundtrip");
    let mut delta_add = AxiomRun::new(ring, "delta-additive");
    let mut delta_one = AxiomRun::new(ring, "delta-one-zero");
    let mut leibniz = AxiomRun::new(ring, "delta-leibniz");

    tau_one.check(&ring.tau(&one), &one, &[&one]);
    delta_one.check(&ring.delta(&one), &zero, &[&one]);
    // The inverse law is also pinned on the spanning set.
    for b in ring.spanning_set() {
        tau_round.check(&ring.tau_inv(&ring.tau(&b)), &b, &[&b]);
        tau_round.check(&ring.tau(&ring.tau_inv(&b)), &b, &[&b]);
    }

    for _ in 0..sample_count {
        let a = ring.sample(&mut rng);
        let b = ring.sample(&mut rng);

        tau_add.check(
            &ring.tau(&ring.add(&a, &b)),
            &ring.add(&ring.tau(&a), &ring.tau(&b)),
            &[&a, &b],
        );
        tau_mul.check(
            &ring.tau(&ring.mul(&a, &b)),
            &ring.mul(&ring.tau(&a), &ring.tau(&b)),
            &[&a, &b],
        );
        tau_round.check(&ring.tau_inv(&ring.tau(&a)), &a, &[&a]);
        tau_round.check(&ring.tau(&ring.tau_inv(&a)), &a, &[&a]);
        delta_add.check(
            &ring.delta(&ring.add(&a, &b)),
            &ring.add(&ring.delta(&a), &ring.delta(&b)),
            &[&a, &b],
        );
        leibniz.check(
            &ring.delta(&ring.mul(&a, &b)),
            &ring.add(
                &ring.mul(&ring.tau(&a), &ring.delta(&b)),
                &ring.mul(&ring.delta(&a), &b),
            ),
            &[&a, &b],
        );
    }

    ValidationReport {
        ring: ring.id(),
        samples: sample_count,
        seed,
        axioms: vec![
            tau_add.finish(),
            tau_mul.finish(),
            tau_one.finish(),
            tau_round.finish(),
            delta_add.finish(),
            delta_one.finish(),
            leibniz.finish(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn catalog() -> Vec<RingRef> {
        [
            "QQ",
            "Fp:101",
            "poly_dt",
            "poly_euler",
            "poly_qscale:2",
            "poly_trunc:4:euler",
            "k4_quotient",
            "k4_quotient:Fp:7",
        ]
        .iter()
        .map(|id| Ring::from_id(id).unwrap())
        .collect()
    }

    #[test]
    fn catalog_rings_pass_axioms() {
        for ring in catalog() {
            let rep = validate_ring(&ring, 120, 7);
            assert!(rep.all_pass(), "{}: {:?}", ring.id(), rep.first_failure());
        }
    }

    #[test]
    fn catalog_rings_pass_skew_derivation() {
        for ring in catalog() {
            let rep = validate_skew_derivation(&ring, 120, 7);
            assert!(rep.all_pass(), "{}: {:?}", ring.id(), rep.first_failure());
        }
    }

    #[test]
    fn corrupted_ring_fails_with_witness() {
        let ring = Ring::corrupted(Ring::rational());
        let rep = validate_ring(&ring, 50, 7);
        assert!(!rep.all_pass());
        let fail = rep
            .axioms
            .iter()
            .find(|a| a.name == "mul-associative")
            .unwrap();
        assert!(!fail.pass);
        assert!(fail.witness.is_some());
    }
}
