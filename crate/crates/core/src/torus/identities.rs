//! Window-based identity verification for graded algebras with involution.
//!
//! Supports are infinite, so a check runs either exhaustively over all
//! degree tuples in a coordinate box or over seeded random tuples.
//! Multilinearity of every identity makes basis-tuple checking sufficient
//! for the sampled window; reports always record the window parameters.

use super::{Element, TorusError, TorusHandle};
use crate::lattice::{Degree, Subgroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdentityTag {
    Structurable,
    SkewAlternative,
    Associative,
    Alternative,
    CommutativeJordan,
    StridA,
    StridB,
    StridC,
}

impl IdentityTag {
    pub fn parse(name: &str) -> Option<IdentityTag> {
        Some(match name {
            "structurable" => IdentityTag::Structurable,
            "skew_alternative" => IdentityTag::SkewAlternative,
            "associative" => IdentityTag::Associative,
            "alternative" => IdentityTag::Alternative,
            "commutative_jordan" => IdentityTag::CommutativeJordan,
            "strid_a" => IdentityTag::StridA,
            "strid_b" => IdentityTag::StridB,
            "strid_c" => IdentityTag::StridC,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            IdentityTag::Structurable => "structurable",
            IdentityTag::SkewAlternative => "skew_alternative",
            IdentityTag::Associative => "associative",
            IdentityTag::Alternative => "alternative",
            IdentityTag::CommutativeJordan => "commutative_jordan",
            IdentityTag::StridA => "strid_a",
            IdentityTag::StridB => "strid_b",
            IdentityTag::StridC => "strid_c",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            IdentityTag::Structurable => 5,
            IdentityTag::SkewAlternative => 3,
            IdentityTag::Associative => 3,
            IdentityTag::Alternative => 2,
            IdentityTag::CommutativeJordan => 2,
            IdentityTag::StridA | IdentityTag::StridC => 3,
            IdentityTag::StridB => 3,
        }
    }

    /// Slots that must be filled with skew basis elements.
    pub fn skew_slots(&self) -> &'static [usize] {
        match self {
            IdentityTag::SkewAlternative => &[0],
            IdentityTag::StridA | IdentityTag::StridC => &[0, 1],
            IdentityTag::StridB => &[0],
            _ => &[],
        }
    }
}

/// Evaluate both sides of every equation of the identity on basis elements.
fn equations(tag: IdentityTag, xs: &[Element]) -> Vec<(Element, Element)> {
    let zero = Element::zero(xs[0].handle());
    match tag {
        IdentityTag::Structurable => {
            let (x, y, z, w, q) = (&xs[0], &xs[1], &xs[2], &xs[3], &xs[4]);
            let lhs = x.brace(y, &z.brace(w, q)).sub(&z.brace(w, &x.brace(y, q)));
            let rhs = x.brace(y, z).brace(w, q).sub(&z.brace(&y.brace(x, w), q));
            vec![(lhs, rhs)]
        }
        IdentityTag::SkewAlternative => {
            let (s, x, y) = (&xs[0], &xs[1], &xs[2]);
            vec![
                (s.associator(x, y), x.associator(s, y).neg()),
                (x.associator(s, y).neg(), x.associator(y, s)),
            ]
        }
        IdentityTag::Associative => {
            vec![(xs[0].associator(&xs[1], &xs[2]), zero)]
        }
        IdentityTag::Alternative => {
            let (x, y) = (&xs[0], &xs[1]);
            vec![
                (x.associator(x, y), zero.clone()),
                (y.associator(x, x), zero),
            ]
        }
        IdentityTag::CommutativeJordan => {
            let (x, y) = (&xs[0], &xs[1]);
            vec![
                (x.commutator(y), zero.clone()),
                (x.mul(x).associator(y, x), zero),
            ]
        }
        IdentityTag::StridA => {
            let (r, s, x) = (&xs[0], &xs[1], &xs[2]);
            let lhs = r.mul(&s.associator(r, x)).add(&r.associator(&s.mul(r), x));
            vec![(lhs, zero)]
        }
        IdentityTag::StridB => {
            let (r, x, y) = (&xs[0], &xs[1], &xs[2]);
            let lhs = r.mul(r).associator(x, y);
            let rhs = r.associator(&r.mul(x), y).add(&r.mul(&r.associator(x, y)));
            vec![(lhs, rhs)]
        }
        IdentityTag::StridC => {
            let (r, s, x) = (&xs[0], &xs[1], &xs[2]);
            let lhs = r.mul(r).associator(s, x);
            let rhs = r
                .mul(&r.associator(s, x))
                .scaled(&crate::scalar::Scalar::from_int(2))
                .add(&r.associator(&r.commutator(s), x));
            vec![(lhs, rhs)]
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum SampleMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct Sampler {
    pub box_k: i64,
    pub mode: SampleMode,
}

impl Sampler {
    pub fn exhaustive(box_k: i64) -> Sampler {
        Sampler {
            box_k,
            mode: SampleMode::Exhaustive,
        }
    }

    pub fn random(box_k: i64, samples: u64, seed: u64) -> Sampler {
        Sampler {
            box_k,
            mode: SampleMode::Random { samples, seed },
        }
    }
}

#[derive(Clone, Serialize)]
pub struct Violation {
    pub degrees: Vec<Vec<i64>>,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
}

/// Outcome of a window check. `passes` iff no violations were recorded.
#[derive(Clone, Serialize)]
pub struct Report {
    pub identity: String,
    pub mode: String,
    #[serde(rename = "box")]
    pub box_k: i64,
    pub samples: u64,
    pub seed: u64,
    pub violations: Vec<Violation>,
    pub violations_truncated: bool,
}

const MAX_RECORDED_VIOLATIONS: usize = 25;
const MAX_EXHAUSTIVE_TUPLES: u128 = 20_000_000;

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} over box {} ({} samples, seed {}): {}",
            self.identity,
            self.mode,
            self.box_k,
            self.samples,
            self.seed,
            if self.passed() {
                "pass".to_string()
            } else {
                format!("{} violation(s)", self.violations.len())
            }
        )
    }

    fn record(&mut self, degrees: &[Degree], lhs: &Element, rhs: &Element) {
        if self.violations.len() >= MAX_RECORDED_VIOLATIONS {
            self.violations_truncated = true;
            return;
        }
        self.violations.push(Violation {
            degrees: degrees.iter().map(|d| d.0.clone()).collect(),
            lhs: lhs.to_json(),
            rhs: rhs.to_json(),
        });
    }
}

/// Check a named identity over a degree window. Exhaustive mode iterates
/// every admissible tuple in the box; random mode draws seeded tuples.
pub fn check_identity(
    handle: &Arc<TorusHandle>,
    tag: IdentityTag,
    sampler: Sampler,
) -> Result<Report, TorusError> {
    let arity = tag.arity();
    let all = handle.support_in_box(sampler.box_k);
    if all.is_empty() {
        return Err(TorusError::EmptySampler("no support degrees in box".into()));
    }
    let skew: Vec<Degree> = all
        .iter()
        .filter(|d| handle.inv_sign(d) == -1)
        .cloned()
        .collect();
    let pools: Vec<&[Degree]> = (0..arity)
        .map(|slot| {
            if tag.skew_slots().contains(&slot) {
                skew.as_slice()
            } else {
                all.as_slice()
            }
        })
        .collect();
    if pools.iter().any(|p| p.is_empty()) {
        return Err(TorusError::EmptySampler(format!(
            "no skew degrees in box {} for identity {}",
            sampler.box_k,
            tag.name()
        )));
    }

    let mut report = Report {
        identity: tag.name().into(),
        mode: match sampler.mode {
            SampleMode::Exhaustive => "exhaustive".into(),
            SampleMode::Random { .. } => "random".into(),
        },
        box_k: sampler.box_k,
        samples: 0,
        seed: match sampler.mode {
            SampleMode::Random { seed, .. } => seed,
            SampleMode::Exhaustive => 0,
        },
        violations: Vec::new(),
        violations_truncated: false,
    };

    let mut run_tuple = |degs: &[Degree], report: &mut Report| {
        let xs: Vec<Element> = degs
            .iter()
            .map(|d| Element::basis(handle, d).expect("degree from support pool"))
            .collect();
        for (lhs, rhs) in equations(tag, &xs) {
            if lhs != rhs {
                report.record(degs, &lhs, &rhs);
                break;
            }
        }
    };

    match sampler.mode {
        SampleMode::Exhaustive => {
            let total: u128 = pools.iter().map(|p| p.len() as u128).product();
            if total > MAX_EXHAUSTIVE_TUPLES {
                return Err(TorusError::SamplerTooLarge(total));
            }
            let mut idx = vec![0usize; arity];
            loop {
                let degs: Vec<Degree> =
                    idx.iter().enumerate().map(|(s, &i)| pools[s][i].clone()).collect();
                run_tuple(&degs, &mut report);
                report.samples += 1;
                let mut s = 0;
                loop {
                    if s == arity {
                        break;
                    }
                    idx[s] += 1;
                    if idx[s] < pools[s].len() {
                        break;
                    }
                    idx[s] = 0;
                    s += 1;
                }
                if s == arity {
                    break;
                }
            }
        }
        SampleMode::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let degs: Vec<Degree> = pools
                    .iter()
                    .map(|p| p[rng.gen_range(0..p.len())].clone())
                    .collect();
                run_tuple(&degs, &mut report);
                report.samples += 1;
            }
        }
    }
    Ok(report)
}

/// Check that the involution signs and the sign pattern of the structure
/// constants repeat along the generators of `p` over the box.
pub fn verify_periodicity(
    handle: &Arc<TorusHandle>,
    p: &Subgroup,
    box_k: i64,
) -> Result<Report, TorusError> {
    if !p.is_full_rank() {
        return Err(TorusError::EmptySampler(
            "periodicity lattice must have full rank".into(),
        ));
    }
    let mut report = Report {
        identity: "periodicity".into(),
        mode: "exhaustive".into(),
        box_k,
        samples: 0,
        seed: 0,
        violations: Vec::new(),
        violations_truncated: false,
    };
    let supp = handle.support_in_box(box_k);
    let gens: Vec<Degree> = p.basis().collect();
    let mut mismatch = |degs: Vec<Degree>, lhs: String, rhs: String, report: &mut Report| {
        if report.violations.len() >= MAX_RECORDED_VIOLATIONS {
            report.violations_truncated = true;
            return;
        }
        report.violations.push(Violation {
            degrees: degs.iter().map(|d| d.0.clone()).collect(),
            lhs: serde_json::Value::String(lhs),
            rhs: serde_json::Value::String(rhs),
        });
    };
    for g in &gens {
        for l in &supp {
            let shifted = l + g;
            report.samples += 1;
            if !handle.supports(&shifted) {
                mismatch(
                    vec![l.clone(), g.clone()],
                    "in support".into(),
                    "shifted degree left the support".into(),
                    &mut report,
                );
                continue;
            }
            if handle.inv_sign(l) != handle.inv_sign(&shifted) {
                mismatch(
                    vec![l.clone(), g.clone()],
                    format!("inv_sign {}", handle.inv_sign(l)),
                    format!("inv_sign {}", handle.inv_sign(&shifted)),
                    &mut report,
                );
            }
            for m in &supp {
                report.samples += 1;
                let base = handle.coeff(l, m).pattern_sign();
                let moved = handle.coeff(&shifted, m).pattern_sign();
                if base != moved {
                    mismatch(
                        vec![l.clone(), m.clone(), g.clone()],
                        format!("sign {base}"),
                        format!("sign {moved}"),
                        &mut report,
                    );
                }
            }
        }
    }
    Ok(report)
}

/// Window check of the anti-automorphism law on basis elements:
/// coeff(m,l) * inv(l) * inv(m) = coeff(l,m) * inv(l+m).
pub fn verify_involution_law(handle: &Arc<TorusHandle>, box_k: i64) -> Report {
    let mut report = Report {
        identity: "involution_antiautomorphism".into(),
        mode: "exhaustive".into(),
        box_k,
        samples: 0,
        seed: 0,
        violations: Vec::new(),
        violations_truncated: false,
    };
    let supp = handle.support_in_box(box_k);
    for l in &supp {
        for m in &supp {
            report.samples += 1;
            let sum = l + m;
            if !handle.supports(&sum) {
                continue;
            }
            let signs =
                crate::scalar::Scalar::from_int((handle.inv_sign(l) * handle.inv_sign(m)) as i64);
            let lhs = &handle.coeff(m, l) * &signs;
            let rhs = &handle.coeff(l, m)
                * &crate::scalar::Scalar::from_int(handle.inv_sign(&sum) as i64);
            if lhs != rhs && report.violations.len() < MAX_RECORDED_VIOLATIONS {
                report.violations.push(Violation {
                    degrees: vec![l.0.clone(), m.0.clone()],
                    lhs: serde_json::Value::String(lhs.to_string()),
                    rhs: serde_json::Value::String(rhs.to_string()),
                });
            }
        }
    }
    report
}
