//! Semilinear cubic forms with the adjoint identity.
//!
//! A [`CubicPair`] packages a commutative associative base algebra with
//! involution together with a finely graded module carrying a hermitian
//! pairing `h`, a symmetric bi-semilinear product `diamond`, and the cubic
//! form `N(w) = h(w, w diamond w) / 6`. The adjoint is `w^nat = (w diamond
//! w) / 2`; the pair satisfies the adjoint identity when `(w^nat)^nat =
//! N(w) w`, and in that case the algebra on base plus module is the main
//! construction of this crate's class III handles.

pub mod coordinatize;
pub mod matrix;

use crate::constructors::ConstructError;
use crate::lattice::{Degree, Subgroup};
use crate::scalar::Scalar;
use crate::torus::identities::{Report, Violation};
use crate::torus::{CubicTables, Element, FieldTag, HandleKind, Meta, TorusHandle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A hermitian form and cubic form over a base torus, given by per-degree
/// tables on a finely graded module.
#[derive(Clone)]
pub struct CubicPair {
    /// The base algebra: commutative, associative, with involution, graded
    /// by the full group with support inside `lambda_minus`.
    pub e: Arc<TorusHandle>,
    pub lambda_minus: Subgroup,
    pub tables: Arc<dyn CubicTables>,
    pub field: FieldTag,
    /// Construction summary for reports and recipes.
    pub label: String,
}

/// An element of the module part, as a finite sparse map over module
/// degrees.
#[derive(Clone, PartialEq)]
pub struct WElement {
    pub terms: BTreeMap<Degree, Scalar>,
}

impl std::fmt::Debug for WElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("({c})*w{d}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl WElement {
    pub fn zero() -> WElement {
        WElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(deg: Degree) -> WElement {
        let mut terms = BTreeMap::new();
        terms.insert(deg, Scalar::one());
        WElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, deg: Degree, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(deg) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &WElement) -> WElement {
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &WElement) -> WElement {
        self.add(&rhs.scaled(&Scalar::from_int(-1)))
    }

    pub fn scaled(&self, c: &Scalar) -> WElement {
        if c.is_zero() {
            return WElement::zero();
        }
        WElement {
            terms: self
                .terms
                .iter()
                .map(|(d, x)| (d.clone(), x * c))
                .collect(),
        }
    }
}

impl CubicPair {
    pub fn rank(&self) -> usize {
        self.e.rank()
    }

    /// Module degrees with coordinates in [-k, k].
    pub fn w_support_in_box(&self, k: i64) -> Vec<Degree> {
        let n = self.rank();
        let mut out = Vec::new();
        let width = (2 * k + 1) as usize;
        let total = width.pow(n as u32);
        let mut cur = vec![-k; n];
        for _ in 0..total {
            let d = Degree(cur.clone());
            if self.tables.w_supports(&d) {
                out.push(d);
            }
            for i in 0..n {
                cur[i] += 1;
                if cur[i] <= k {
                    break;
                }
                cur[i] = -k;
            }
        }
        out
    }

    /// Left action of a base element on a module element.
    pub fn act(&self, a: &Element, w: &WElement) -> WElement {
        let mut out = WElement::zero();
        for (da, ca) in a.terms() {
            for (dw, cw) in &w.terms {
                let c = self.tables.act(da, dw);
                if !c.is_zero() {
                    out.add_term(da + dw, &(ca * cw) * &c);
                }
            }
        }
        out
    }

    /// The symmetric product `u diamond v` (bi-semilinear over the base;
    /// plain bilinear over the scalars, which the involution fixes).
    pub fn diamond(&self, u: &WElement, v: &WElement) -> WElement {
        let mut out = WElement::zero();
        for (du, cu) in &u.terms {
            for (dv, cv) in &v.terms {
                let c = self.tables.diamond_coeff(du, dv);
                if !c.is_zero() {
                    out.add_term(du + dv, &(cu * cv) * &c);
                }
            }
        }
        out
    }

    /// The hermitian pairing into the base.
    pub fn h(&self, u: &WElement, v: &WElement) -> Element {
        let mut out = Element::zero(&self.e);
        for (du, cu) in &u.terms {
            for (dv, cv) in &v.terms {
                let c = self.tables.h_coeff(du, dv);
                if !c.is_zero() {
                    out.add_term(du + dv, &(cu * cv) * &c);
                }
            }
        }
        out
    }

    /// The adjoint `v^nat = (v diamond v) / 2`.
    pub fn natural(&self, v: &WElement) -> WElement {
        self.diamond(v, v).scaled(&Scalar::from_ratio(1, 2))
    }

    /// The cubic form `N(w) = h(w, w diamond w) / 6`.
    pub fn n_eval(&self, w: &WElement) -> Element {
        self.h(w, &self.diamond(w, w))
            .scaled(&Scalar::from_ratio(1, 6))
    }

    fn random_w(&self, pool: &[Degree], rng: &mut ChaCha8Rng) -> WElement {
        let coeffs = [
            Scalar::from_int(1),
            Scalar::from_int(-1),
            Scalar::from_int(2),
            Scalar::from_ratio(1, 2),
        ];
        let n_terms = rng.gen_range(1..=2);
        let mut w = WElement::zero();
        for _ in 0..n_terms {
            let d = pool[rng.gen_range(0..pool.len())].clone();
            let c = coeffs[rng.gen_range(0..coeffs.len())].clone();
            w.add_term(d, c);
        }
        w
    }

    /// Verify the adjoint identity and each of its five polarizations on
    /// seeded random module elements; all arithmetic is exact.
    pub fn check_adjoint_identity(&self, box_k: i64, samples: u64, seed: u64) -> Report {
        let pool = self.w_support_in_box(box_k);
        let mut report = Report {
            identity: "adjoint".into(),
            mode: "random".into(),
            box_k,
            samples: 0,
            seed,
            violations: Vec::new(),
            violations_truncated: false,
        };
        if pool.is_empty() {
            return report;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut record = |report: &mut Report, tag: &str, hold: bool| {
            if !hold && report.violations.len() < 25 {
                report.violations.push(Violation {
                    degrees: vec![],
                    lhs: serde_json::Value::String(format!("{tag} fails")),
                    rhs: serde_json::Value::String("0".into()),
                });
            }
        };
        for _ in 0..samples {
            report.samples += 1;
            let v = self.random_w(&pool, &mut rng);
            let u = self.random_w(&pool, &mut rng);
            let w = self.random_w(&pool, &mut rng);
            let x = self.random_w(&pool, &mut rng);
            let vn = self.natural(&v);
            let wn = self.natural(&w);
            let nv = self.n_eval(&v);

            // (v^nat)^nat = N(v) v
            let adj = self.natural(&vn).sub(&self.act(&nv, &v));
            record(&mut report, "ADJ", adj.is_zero());
            // ADJ1: (w<>v)<>v^nat = N(v) w + h(w, v^nat) v
            let lhs = self.diamond(&self.diamond(&w, &v), &vn);
            let rhs = self
                .act(&nv, &w)
                .add(&self.act(&self.h(&w, &vn), &v));
            record(&mut report, "ADJ1", lhs == rhs);
            // ADJ2: (w<>u)<>v^nat + (w<>v)<>(u<>v)
            //     = h(u,v^nat) w + h(w,u<>v) v + h(w,v^nat) u
            let lhs = self
                .diamond(&self.diamond(&w, &u), &vn)
                .add(&self.diamond(&self.diamond(&w, &v), &self.diamond(&u, &v)));
            let rhs = self
                .act(&self.h(&u, &vn), &w)
                .add(&self.act(&self.h(&w, &self.diamond(&u, &v)), &v))
                .add(&self.act(&self.h(&w, &vn), &u));
            record(&mut report, "ADJ2", lhs == rhs);
            // ADJ3 (full polarization)
            let lhs = self
                .diamond(&self.diamond(&w, &u), &self.diamond(&x, &v))
                .add(&self.diamond(&self.diamond(&w, &x), &self.diamond(&u, &v)))
                .add(&self.diamond(&self.diamond(&w, &v), &self.diamond(&u, &x)));
            let rhs = self
                .act(&self.h(&u, &self.diamond(&x, &v)), &w)
                .add(&self.act(&self.h(&w, &self.diamond(&u, &x)), &v))
                .add(&self.act(&self.h(&w, &self.diamond(&u, &v)), &x))
                .add(&self.act(&self.h(&w, &self.diamond(&x, &v)), &u));
            record(&mut report, "ADJ3", lhs == rhs);
            // ADJ4: (v<>w)^nat + v^nat<>w^nat = h(w,v^nat) w + h(v,w^nat) v
            let lhs = self
                .natural(&self.diamond(&v, &w))
                .add(&self.diamond(&vn, &wn));
            let rhs = self
                .act(&self.h(&w, &vn), &w)
                .add(&self.act(&self.h(&v, &wn), &v));
            record(&mut report, "ADJ4", lhs == rhs);
            // ADJ5: (u<>v^nat)<>v = N(v)^* u + h(u,v) v^nat
            let lhs = self.diamond(&self.diamond(&u, &vn), &v);
            let rhs = self
                .act(&nv.involution(), &u)
                .add(&self.act(&self.h(&u, &v), &vn));
            record(&mut report, "ADJ5", lhs == rhs);
        }
        report
    }

    /// Structural invariants of the tables themselves over a window:
    /// hermitian symmetry of h, symmetry of diamond, the semilinear action
    /// law, full symmetry of h(u, v diamond w), and per-degree
    /// nondegeneracy of h.
    pub fn check_pair_invariants(&self, box_k: i64) -> Report {
        let mut report = Report {
            identity: "cubic_pair_invariants".into(),
            mode: "exhaustive".into(),
            box_k,
            samples: 0,
            seed: 0,
            violations: Vec::new(),
            violations_truncated: false,
        };
        let w_pool = self.w_support_in_box(box_k);
        let e_pool = self.e.support_in_box(box_k);
        let mut record = |report: &mut Report, degs: Vec<&Degree>, what: &str| {
            if report.violations.len() < 25 {
                report.violations.push(Violation {
                    degrees: degs.iter().map(|d| d.0.clone()).collect(),
                    lhs: serde_json::Value::String(what.into()),
                    rhs: serde_json::Value::String("expected".into()),
                });
            } else {
                report.violations_truncated = true;
            }
        };
        for a in &w_pool {
            for b in &w_pool {
                report.samples += 1;
                // h(u,v)^* = h(v,u): with the sign of the base involution at
                // the value degree.
                let hv = self.tables.h_coeff(a, b);
                let vh = self.tables.h_coeff(b, a);
                let sum = a + b;
                if !hv.is_zero() || !vh.is_zero() {
                    let sign = if self.e.supports(&sum) {
                        Scalar::from_int(self.e.inv_sign(&sum) as i64)
                    } else {
                        Scalar::one()
                    };
                    if &hv * &sign != vh {
                        record(&mut report, vec![a, b], "h is not hermitian");
                    }
                }
                if self.tables.diamond_coeff(a, b) != self.tables.diamond_coeff(b, a) {
                    record(&mut report, vec![a, b], "diamond is not symmetric");
                }
            }
        }
        // (a u) <> v = a^* (u <> v) on basis triples
        for g in &e_pool {
            for a in &w_pool {
                for b in &w_pool {
                    report.samples += 1;
                    let lhs = &self.tables.act(g, a) * &self.tables.diamond_coeff(&(g + a), b);
                    let sign = Scalar::from_int(self.e.inv_sign(g) as i64);
                    let rhs = &(&sign * &self.tables.diamond_coeff(a, b))
                        * &self.tables.act(g, &(a + b));
                    if lhs != rhs {
                        record(&mut report, vec![g, a, b], "diamond is not semilinear");
                    }
                }
            }
        }
        // full symmetry of the trilinear h(u, v <> w)
        let tri = |a: &Degree, b: &Degree, c: &Degree| -> Scalar {
            &self.tables.diamond_coeff(b, c) * &self.tables.h_coeff(a, &(b + c))
        };
        for a in &w_pool {
            for b in &w_pool {
                for c in &w_pool {
                    report.samples += 1;
                    let base = tri(a, b, c);
                    for (x, y, z) in [
                        (a, c, b),
                        (b, a, c),
                        (b, c, a),
                        (c, a, b),
                        (c, b, a),
                    ] {
                        if tri(x, y, z) != base {
                            record(&mut report, vec![a, b, c], "h(u, v<>w) is not symmetric");
                            break;
                        }
                    }
                }
            }
        }
        // per-degree nondegeneracy: every window module degree pairs with
        // its opposite coset
        for a in &w_pool {
            report.samples += 1;
            let paired = e_pool.iter().map(|g| g - a).chain([-a]).any(|b| {
                self.tables.w_supports(&b) && !self.tables.h_coeff(a, &b).is_zero()
            });
            if !paired {
                record(&mut report, vec![a], "h is degenerate at this degree");
            }
        }
        report
    }

    /// Build the algebra on base plus module as a graded handle, after
    /// verifying the torus conditions:
    ///   (i)   the base is a torus on its support lattice,
    ///   (ii)  the module support avoids the base lattice and together they
    ///         generate the full group,
    ///   (iii) 4*Lambda lies in the central grading group of the base,
    ///   (iv)  the adjoint is nonzero wherever twice the degree leaves the
    ///         central group,
    ///   (v)   the cubic form is nonzero and the base involution is
    ///         nontrivial (the class III conditions).
    pub fn build_ahn(&self) -> Result<Arc<TorusHandle>, ConstructError> {
        let n = self.rank();
        let full = Subgroup::full(n);
        // (i)
        let meta = self.e.meta();
        if meta.support_lattice.as_ref() != Some(&self.lambda_minus) {
            return Err(ConstructError::Precondition(
                "condition (i): base support is not the skew lattice".into(),
            ));
        }
        // (ii)
        let box_w = self.w_support_in_box(2);
        if box_w.iter().any(|d| self.lambda_minus.contains(d)) {
            return Err(ConstructError::Precondition(
                "condition (ii): module support meets the base lattice".into(),
            ));
        }
        if self.lambda_minus.join_degrees(&box_w) != full {
            return Err(ConstructError::SupportNotGroup(
                "condition (ii): base lattice and module degrees do not generate the group"
                    .into(),
            ));
        }
        // (iii)
        if !meta.gamma.contains_subgroup(&Subgroup::scaled_full(n, 4)) {
            return Err(ConstructError::Precondition(
                "condition (iii): 4*Lambda is not inside the central grading group".into(),
            ));
        }
        // (iv)
        for d in &box_w {
            if !meta.gamma.contains(&d.scaled(2))
                && self.tables.diamond_coeff(d, d).is_zero()
            {
                return Err(ConstructError::Precondition(format!(
                    "condition (iv): adjoint vanishes at module degree {d} with 2*deg outside \
                     the central group"
                )));
            }
        }
        // (v)
        let mut n_nonzero = false;
        'outer: for b in &box_w {
            for c in &box_w {
                if self.tables.diamond_coeff(b, c).is_zero() {
                    continue;
                }
                for a in &box_w {
                    if !self.tables.h_coeff(a, &(b + c)).is_zero() {
                        n_nonzero = true;
                        break 'outer;
                    }
                }
            }
        }
        if !n_nonzero {
            return Err(ConstructError::Precondition(
                "condition (v): the cubic form vanishes on the window".into(),
            ));
        }
        if meta.lambda_minus.rank() == 0 {
            return Err(ConstructError::Precondition(
                "condition (v): the base involution is trivial".into(),
            ));
        }
        Ok(TorusHandle::new(
            n,
            HandleKind::CubicAlgebra {
                base: self.e.clone(),
                tables: self.tables.clone(),
            },
            Meta {
                field: self.field,
                gamma: meta.gamma.clone(),
                gamma_assoc: meta.gamma.clone(),
                lambda_minus: self.lambda_minus.clone(),
                span: full,
                support_lattice: None,
                nonzero_products: false,
                periodicity_hint: Some(Subgroup::scaled_full(n, 4)),
                recipe: format!("ahn({})", self.label),
            },
        ))
    }
}

/// Table wrapper that flips the sign of one diamond entry class, for
/// mutation testing of the adjoint checks.
pub struct MutatedTables {
    pub inner: Arc<dyn CubicTables>,
    pub flip_left: Degree,
    pub flip_right: Degree,
}

impl CubicTables for MutatedTables {
    fn w_supports(&self, alpha: &Degree) -> bool {
        self.inner.w_supports(alpha)
    }
    fn act(&self, l: &Degree, a: &Degree) -> Scalar {
        self.inner.act(l, a)
    }
    fn h_coeff(&self, a: &Degree, b: &Degree) -> Scalar {
        self.inner.h_coeff(a, b)
    }
    fn diamond_coeff(&self, a: &Degree, b: &Degree) -> Scalar {
        let c = self.inner.diamond_coeff(a, b);
        if (a == &self.flip_left && b == &self.flip_right)
            || (a == &self.flip_right && b == &self.flip_left)
        {
            -&c
        } else {
            c
        }
    }
}

/// Tables read off an existing class III handle: the action, pairing and
/// product are the restriction of the handle's own structure constants,
/// split by whether the product degree lands inside the skew lattice.
pub struct ExtractedTables {
    pub handle: Arc<TorusHandle>,
    pub lambda_minus: Subgroup,
}

impl CubicTables for ExtractedTables {
    fn w_supports(&self, alpha: &Degree) -> bool {
        self.handle.supports(alpha) && !self.lambda_minus.contains(alpha)
    }
    fn act(&self, l: &Degree, a: &Degree) -> Scalar {
        self.handle.coeff(l, a)
    }
    fn h_coeff(&self, a: &Degree, b: &Degree) -> Scalar {
        if self.lambda_minus.contains(&(a + b)) {
            self.handle.coeff(a, b)
        } else {
            Scalar::zero()
        }
    }
    fn diamond_coeff(&self, a: &Degree, b: &Degree) -> Scalar {
        if self.lambda_minus.contains(&(a + b)) {
            Scalar::zero()
        } else {
            self.handle.coeff(a, b)
        }
    }
}
