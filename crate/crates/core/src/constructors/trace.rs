//! Graded trace of a Jordan algebra with known central grading group, and
//! the degree-4 Cayley-Hamilton identity it must satisfy: for trace
//! coefficients built by Newton's formulas,
//!   x^4 + q3(x) x^3 + q2(x) x^2 + q1(x) x + q0(x) 1 = 0.

use super::ConstructError;
use crate::lattice::Subgroup;
use crate::scalar::Scalar;
use crate::torus::identities::{Report, Violation};
use crate::torus::{Element, TorusHandle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Linear map descriptor: t(x) = 4 * (projection of x onto the central
/// support).
#[derive(Clone, Debug)]
pub struct GradedTrace {
    gamma: Subgroup,
}

/// The graded trace of a Jordan handle, read off its central grading group
/// metadata.
pub fn graded_trace(j: &Arc<TorusHandle>) -> Result<GradedTrace, ConstructError> {
    if j.meta().lambda_minus.rank() != 0 {
        return Err(ConstructError::Precondition(
            "graded trace requires the trivial involution".into(),
        ));
    }
    Ok(GradedTrace {
        gamma: j.meta().gamma.clone(),
    })
}

impl GradedTrace {
    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }

    /// t(x): four times the part of x supported on the central lattice.
    pub fn eval(&self, x: &Element) -> Element {
        let four = Scalar::from_int(4);
        let mut out = Element::zero(x.handle());
        for (d, c) in x.terms() {
            if self.gamma.contains(d) {
                out.add_term(d.clone(), c * &four);
            }
        }
        out
    }
}

fn ch4(j: &Arc<TorusHandle>, t: &GradedTrace, x: &Element) -> Element {
    let x2 = x.mul(x);
    let x3 = x2.mul(x);
    let x4 = x3.mul(x);
    let t1 = t.eval(x);
    let t2 = t.eval(&x2);
    let t3 = t.eval(&x3);
    let t4 = t.eval(&x4);
    let half = Scalar::from_ratio(1, 2);
    let sixth = Scalar::from_ratio(1, 6);
    let q3 = t1.neg();
    let q2 = t1.mul(&t1).sub(&t2).scaled(&half);
    let q1 = t1
        .mul(&t2)
        .scaled(&Scalar::from_int(3))
        .sub(&t3.scaled(&Scalar::from_int(2)))
        .sub(&t1.mul(&t1).mul(&t1))
        .scaled(&sixth);
    let q0 = t2
        .mul(&t2)
        .scaled(&Scalar::from_int(3))
        .add(&t1.mul(&t3).scaled(&Scalar::from_int(8)))
        .sub(&t4.scaled(&Scalar::from_int(6)))
        .sub(&t1.mul(&t1).mul(&t2).scaled(&Scalar::from_int(6)))
        .add(&t1.mul(&t1).mul(&t1).mul(&t1))
        .scaled(&Scalar::from_ratio(1, 24));
    let one = Element::one(j);
    x4.add(&q3.mul(&x3))
        .add(&q2.mul(&x2))
        .add(&q1.mul(x))
        .add(&q0.mul(&one))
}

fn random_sum(
    j: &Arc<TorusHandle>,
    pool: &[crate::lattice::Degree],
    rng: &mut ChaCha8Rng,
) -> Element {
    let coeffs = [
        Scalar::from_int(1),
        Scalar::from_int(-1),
        Scalar::from_int(2),
        Scalar::from_ratio(1, 2),
        Scalar::from_int(-3),
    ];
    let n_terms = rng.gen_range(1..=3);
    let mut x = Element::zero(j);
    for _ in 0..n_terms {
        let d = pool[rng.gen_range(0..pool.len())].clone();
        let c = coeffs[rng.gen_range(0..coeffs.len())].clone();
        x.add_term(d, c);
    }
    x
}

/// Evaluate the degree-4 Cayley-Hamilton residual exactly on every
/// homogeneous basis element in the box and on seeded random sums.
pub fn ch4_check(
    j: &Arc<TorusHandle>,
    t: &GradedTrace,
    box_k: i64,
    samples: u64,
    seed: u64,
) -> Result<Report, ConstructError> {
    let pool = j.support_in_box(box_k);
    if pool.is_empty() {
        return Err(ConstructError::Precondition(
            "empty support window for the Cayley-Hamilton check".into(),
        ));
    }
    let mut report = Report {
        identity: "cayley_hamilton_deg4".into(),
        mode: "mixed".into(),
        box_k,
        samples: 0,
        seed,
        violations: Vec::new(),
        violations_truncated: false,
    };
    for d in &pool {
        let x = Element::basis(j, d)?;
        let residual = ch4(j, t, &x);
        report.samples += 1;
        if !residual.is_zero() && report.violations.len() < 25 {
            report.violations.push(Violation {
                degrees: vec![d.0.clone()],
                lhs: residual.to_json(),
                rhs: Element::zero(j).to_json(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_sum(j, &pool, &mut rng);
        let residual = ch4(j, t, &x);
        report.samples += 1;
        if !residual.is_zero() && report.violations.len() < 25 {
            report.violations.push(Violation {
                degrees: x.terms().map(|(d, _)| d.0.clone()).collect(),
                lhs: residual.to_json(),
                rhs: Element::zero(j).to_json(),
            });
        }
    }
    Ok(report)
}

/// Check that t is a trace form (t(x(yz)) = t((xy)z)) and nondegenerate on
/// the window, and that t(1) = 4.
pub fn trace_form_check(
    j: &Arc<TorusHandle>,
    t: &GradedTrace,
    box_k: i64,
    samples: u64,
    seed: u64,
) -> Result<Report, ConstructError> {
    let pool = j.support_in_box(box_k);
    let mut report = Report {
        identity: "trace_form".into(),
        mode: "mixed".into(),
        box_k,
        samples: 0,
        seed,
        violations: Vec::new(),
        violations_truncated: false,
    };
    let mut record = |report: &mut Report, degs: Vec<Vec<i64>>, lhs: String, rhs: String| {
        if report.violations.len() < 25 {
            report.violations.push(Violation {
                degrees: degs,
                lhs: serde_json::Value::String(lhs),
                rhs: serde_json::Value::String(rhs),
            });
        }
    };
    // t(1) = 4
    let one = Element::one(j);
    let four = one.scaled(&Scalar::from_int(4));
    if t.eval(&one) != four {
        record(
            &mut report,
            vec![],
            "t(1)".into(),
            "4".into(),
        );
    }
    // associativity of the trace form on random triples
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_sum(j, &pool, &mut rng);
        let y = random_sum(j, &pool, &mut rng);
        let z = random_sum(j, &pool, &mut rng);
        report.samples += 1;
        let lhs = t.eval(&x.mul(&y.mul(&z)));
        let rhs = t.eval(&x.mul(&y).mul(&z));
        if lhs != rhs {
            record(
                &mut report,
                x.terms().map(|(d, _)| d.0.clone()).collect(),
                format!("{lhs:?}"),
                format!("{rhs:?}"),
            );
        }
    }
    // window nondegeneracy: every basis degree pairs with some window degree
    for d in &pool {
        let x = Element::basis(j, d)?;
        report.samples += 1;
        let paired = pool.iter().any(|e| {
            let y = Element::basis(j, e).expect("window degree");
            !t.eval(&x.mul(&y)).is_zero()
        });
        if !paired {
            record(
                &mut report,
                vec![d.0.clone()],
                "degenerate direction".into(),
                "nonzero pairing".into(),
            );
        }
    }
    Ok(report)
}
