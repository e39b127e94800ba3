//! The central representation of finely graded algebras with involution.
//!
//! A [`TorusHandle`] describes such an algebra by a canonical basis element
//! per support degree: a support predicate, a structure-constant function
//! `coeff` with `b_l * b_m = coeff(l, m) * b_{l+m}`, and an involution sign
//! per degree. Handles are built recursively from construction recipes and
//! memoize their structure constants. Elements are finite sparse maps from
//! degrees to exact scalars.

pub mod identities;
pub mod invariants;

use crate::lattice::{Degree, Subgroup};
use crate::scalar::Scalar;
use parking_lot::RwLock;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldTag {
    Rationals,
    GaussianRationals,
}

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("elements belong to different handles")]
    HandleMismatch,
    #[error("degree {0} is outside the support")]
    DegreeOutsideSupport(Degree),
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("structure constant vanishes at ({0}, {1})")]
    ZeroProduct(Degree, Degree),
    #[error("operation requires the nonzero-products guarantee, which this handle does not claim")]
    NoNonzeroProductsGuarantee,
    #[error("sampler produced no admissible degrees: {0}")]
    EmptySampler(String),
    #[error("exhaustive sampler too large: {0} tuples")]
    SamplerTooLarge(u128),
}

/// Structure-constant tables of a cubic pair, as consumed by the
/// algebra-on-E-plus-W handle kind: a left action of the base on the module,
/// a hermitian pairing into the base, and a symmetric product on the module.
/// Everything is per-basis-degree; outputs are scalars at the implied degree.
pub trait CubicTables: Send + Sync {
    fn w_supports(&self, alpha: &Degree) -> bool;
    /// b_E(l) . b_W(a) = act(l, a) * b_W(l + a)
    fn act(&self, l: &Degree, a: &Degree) -> Scalar;
    /// h(b_W(a), b_W(b)) = h_coeff(a, b) * b_E(a + b) (zero off the base support)
    fn h_coeff(&self, a: &Degree, b: &Degree) -> Scalar;
    /// b_W(a) diamond b_W(b) = diamond_coeff(a, b) * b_W(a + b)
    fn diamond_coeff(&self, a: &Degree, b: &Degree) -> Scalar;
}

/// Construction recipe of a handle. Structure constants are evaluated
/// recursively along this enum.
pub enum HandleKind {
    /// Laurent algebra: full support, unit structure constants, trivial
    /// involution.
    Laurent,
    /// Laurent algebra whose involution negates the generators flagged in
    /// `skew` (a multiplicative sign character).
    SignedLaurent { skew: Vec<bool> },
    /// Reindex the grading through an injective linear map. `fwd[i]` is the
    /// image of the inner basis vector e_i; `inv_num / inv_den` is the
    /// inverse map.
    Regrade {
        inner: Arc<TorusHandle>,
        fwd: Vec<Degree>,
        inv_num: Vec<Vec<i64>>,
        inv_den: i64,
    },
    /// Doubling along a hermitian central unit mu: the new coset is
    /// gen_deg + supp(inner) with canonical basis u * b_inner.
    CdDouble {
        inner: Arc<TorusHandle>,
        mu_deg: Degree,
        mu_coeff: Scalar,
        gen_deg: Degree,
    },
    /// Same algebra as the inner rank-2 doubling chain, with the involution
    /// that fixes both canonical generators.
    MainInvolution { inner: Arc<TorusHandle> },
    /// Tensor product grading: coordinates concatenate, structure constants
    /// and involution signs multiply.
    Tensor {
        left: Arc<TorusHandle>,
        right: Arc<TorusHandle>,
    },
    /// Symmetrized product (Jordan plus algebra), trivial involution.
    Plus { inner: Arc<TorusHandle> },
    /// Hermitian elements of the inner algebra under the symmetrized
    /// product, trivial involution.
    HermitianPart { inner: Arc<TorusHandle> },
    /// Base-plus-module algebra of a diagonal hermitian form: the base acts
    /// through its opposite product and the module pairs back into the base.
    HermitianForm {
        base: Arc<TorusHandle>,
        rho: Vec<Degree>,
        /// degree of the diagonal value kappa(v_i, v_i); always 2 * rho[i]
        b_degs: Vec<Degree>,
    },
    /// Doubling of a Jordan algebra along the half-trace automorphism theta
    /// (+1 on the central support, -1 elsewhere).
    JordanCd {
        inner: Arc<TorusHandle>,
        sigma0: Degree,
        mu_deg: Degree,
        mu_coeff: Scalar,
        gamma_inner: Subgroup,
    },
    /// Algebra E + W built from cubic-pair tables.
    CubicAlgebra {
        base: Arc<TorusHandle>,
        tables: Arc<dyn CubicTables>,
    },
    /// Restriction to the degrees inside a subgroup (a graded subalgebra).
    Restrict {
        inner: Arc<TorusHandle>,
        lattice: Subgroup,
    },
    /// Corrupted table for mutation testing: flips the sign of every
    /// structure constant whose degree pair reduces mod 2 to the given class.
    MutateSign {
        inner: Arc<TorusHandle>,
        class_left: u64,
        class_right: u64,
    },
}

/// Derived structural metadata carried by every handle.
#[derive(Clone, Debug)]
pub struct Meta {
    pub field: FieldTag,
    /// Support of the centre of the algebra with involution.
    pub gamma: Subgroup,
    /// Support of the centre of the algebra without involution.
    pub gamma_assoc: Subgroup,
    /// Subgroup generated by the skew support.
    pub lambda_minus: Subgroup,
    /// Subgroup generated by the whole support.
    pub span: Subgroup,
    /// When the support is exactly a sublattice, that sublattice.
    pub support_lattice: Option<Subgroup>,
    /// Whether products of nonzero homogeneous elements are guaranteed
    /// nonzero (true for the skew-generated constructions).
    pub nonzero_products: bool,
    /// Sublattice along which the sign pattern of the table is intended to
    /// repeat; checked by the periodicity verifier, never assumed.
    pub periodicity_hint: Option<Subgroup>,
    /// Human-readable construction summary.
    pub recipe: String,
}

static NEXT_HANDLE_ID: AtomicU64 = AtomicU64::new(1);

pub struct TorusHandle {
    id: u64,
    rank: usize,
    kind: HandleKind,
    meta: Meta,
    memo: RwLock<HashMap<(Degree, Degree), Scalar>>,
}

impl std::fmt::Debug for TorusHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TorusHandle#{}(rank {}, {})", self.id, self.rank, self.meta.recipe)
    }
}

impl TorusHandle {
    pub fn new(rank: usize, kind: HandleKind, meta: Meta) -> Arc<TorusHandle> {
        Arc::new(TorusHandle {
            id: NEXT_HANDLE_ID.fetch_add(1, Ordering::Relaxed),
            rank,
            kind,
            meta,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> &HandleKind {
        &self.kind
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn field(&self) -> FieldTag {
        self.meta.field
    }

    fn regrade_preimage(
        inv_num: &[Vec<i64>],
        inv_den: i64,
        deg: &Degree,
    ) -> Option<Degree> {
        let n = inv_num.len();
        let mut out = Vec::with_capacity(n);
        for col in 0..n {
            let mut acc: i64 = 0;
            for (i, c) in deg.0.iter().enumerate() {
                acc += c * inv_num[i][col];
            }
            if acc % inv_den != 0 {
                return None;
            }
            out.push(acc / inv_den);
        }
        Some(Degree(out))
    }

    /// Support predicate.
    pub fn supports(&self, deg: &Degree) -> bool {
        debug_assert_eq!(deg.rank(), self.rank);
        match &self.kind {
            HandleKind::Laurent | HandleKind::SignedLaurent { .. } => true,
            HandleKind::Regrade {
                inner,
                inv_num,
                inv_den,
                ..
            } => Self::regrade_preimage(inv_num, *inv_den, deg)
                .is_some_and(|pre| inner.supports(&pre)),
            HandleKind::CdDouble { inner, gen_deg, .. } => {
                inner.supports(deg) || inner.supports(&(deg - gen_deg))
            }
            HandleKind::MainInvolution { inner } => inner.supports(deg),
            HandleKind::Tensor { left, right } => {
                let (l, r) = deg.split(left.rank());
                left.supports(&l) && right.supports(&r)
            }
            HandleKind::Plus { inner } => inner.supports(deg),
            HandleKind::HermitianPart { inner } => {
                inner.supports(deg) && inner.inv_sign(deg) == 1
            }
            HandleKind::HermitianForm { base, rho, .. } => {
                base.supports(deg) || rho.iter().any(|r| base.supports(&(deg - r)))
            }
            HandleKind::JordanCd { inner, sigma0, .. } => {
                inner.supports(deg) || inner.supports(&(deg - sigma0))
            }
            HandleKind::CubicAlgebra { base, tables } => {
                base.supports(deg) || tables.w_supports(deg)
            }
            HandleKind::Restrict { inner, lattice } => {
                lattice.contains(deg) && inner.supports(deg)
            }
            HandleKind::MutateSign { inner, .. } => inner.supports(deg),
        }
    }

    /// Involution sign of the canonical basis element at `deg`.
    pub fn inv_sign(&self, deg: &Degree) -> i8 {
        debug_assert!(self.supports(deg), "inv_sign outside support: {deg}");
        match &self.kind {
            HandleKind::Laurent => 1,
            HandleKind::SignedLaurent { skew } => {
                let mut parity = 0i64;
                for (c, &s) in deg.0.iter().zip(skew) {
                    if s {
                        parity += c;
                    }
                }
                if parity.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
            HandleKind::Regrade {
                inner,
                inv_num,
                inv_den,
                ..
            } => inner.inv_sign(&Self::regrade_preimage(inv_num, *inv_den, deg).unwrap()),
            HandleKind::CdDouble { inner, .. } => {
                if inner.supports(deg) {
                    inner.inv_sign(deg)
                } else {
                    -1
                }
            }
            HandleKind::MainInvolution { .. } => {
                // fixes both generators; the anti-automorphism law forces
                // sign (-1)^(m*n) at degree (m, n)
                if (deg.0[0] * deg.0[1]).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
            HandleKind::Tensor { left, right } => {
                let (l, r) = deg.split(left.rank());
                left.inv_sign(&l) * right.inv_sign(&r)
            }
            HandleKind::Plus { .. } | HandleKind::HermitianPart { .. } => 1,
            HandleKind::HermitianForm { base, rho, .. } => {
                if base.supports(deg) {
                    base.inv_sign(deg)
                } else {
                    debug_assert!(rho.iter().any(|r| base.supports(&(deg - r))));
                    1
                }
            }
            HandleKind::JordanCd {
                inner,
                sigma0,
                gamma_inner,
                ..
            } => {
                if inner.supports(deg) {
                    1
                } else {
                    let tau = deg - sigma0;
                    if gamma_inner.contains(&tau) {
                        -1
                    } else {
                        1
                    }
                }
            }
            HandleKind::CubicAlgebra { base, .. } => {
                if base.supports(deg) {
                    base.inv_sign(deg)
                } else {
                    1
                }
            }
            HandleKind::Restrict { inner, .. } => inner.inv_sign(deg),
            HandleKind::MutateSign { inner, .. } => inner.inv_sign(deg),
        }
    }

    /// Structure constant: b_l * b_m = coeff(l, m) * b_{l+m}.
    pub fn coeff(&self, l: &Degree, m: &Degree) -> Scalar {
        debug_assert!(self.supports(l), "coeff left degree outside support: {l}");
        debug_assert!(self.supports(m), "coeff right degree outside support: {m}");
        let key = (l.clone(), m.clone());
        if let Some(hit) = self.memo.read().get(&key) {
            return hit.clone();
        }
        let val = self.coeff_compute(l, m);
        self.memo.write().insert(key, val.clone());
        val
    }

    fn coeff_compute(&self, l: &Degree, m: &Degree) -> Scalar {
        match &self.kind {
            HandleKind::Laurent | HandleKind::SignedLaurent { .. } => Scalar::one(),
            HandleKind::Regrade {
                inner,
                inv_num,
                inv_den,
                ..
            } => {
                let pl = Self::regrade_preimage(inv_num, *inv_den, l).unwrap();
                let pm = Self::regrade_preimage(inv_num, *inv_den, m).unwrap();
                inner.coeff(&pl, &pm)
            }
            HandleKind::CdDouble {
                inner,
                mu_deg,
                mu_coeff,
                gen_deg,
            } => {
                let l_base = inner.supports(l);
                let m_base = inner.supports(m);
                match (l_base, m_base) {
                    (true, true) => inner.coeff(l, m),
                    (true, false) => {
                        // a * (u d) = u (conj(a) d)
                        let md = &(m - gen_deg);
                        let sign = Scalar::from_int(inner.inv_sign(l) as i64);
                        sign * inner.coeff(l, md)
                    }
                    (false, true) => {
                        // (u b) * c = u (c b)
                        let lb = &(l - gen_deg);
                        inner.coeff(m, lb)
                    }
                    (false, false) => {
                        // (u b)(u d) = mu * (d conj(b))
                        let lb = &(l - gen_deg);
                        let md = &(m - gen_deg);
                        let sign = Scalar::from_int(inner.inv_sign(lb) as i64);
                        let inner_prod = inner.coeff(md, lb);
                        let mu_mul = inner.coeff(mu_deg, &(lb + md));
                        mu_coeff.clone() * sign * inner_prod * mu_mul
                    }
                }
            }
            HandleKind::MainInvolution { inner } => inner.coeff(l, m),
            HandleKind::Tensor { left, right } => {
                let (l1, r1) = l.split(left.rank());
                let (l2, r2) = m.split(left.rank());
                left.coeff(&l1, &l2) * right.coeff(&r1, &r2)
            }
            HandleKind::Plus { inner } | HandleKind::HermitianPart { inner } => {
                let half = Scalar::from_ratio(1, 2);
                half * (inner.coeff(l, m) + inner.coeff(m, l))
            }
            HandleKind::HermitianForm { base, rho, b_degs } => {
                let decode = |d: &Degree| -> Option<(usize, Degree)> {
                    rho.iter()
                        .enumerate()
                        .find(|(_, r)| base.supports(&(d - *r)))
                        .map(|(i, r)| (i, d - r))
                };
                match (base.supports(l), base.supports(m)) {
                    (true, true) => base.coeff(m, l), // opposite product on the base
                    (true, false) => {
                        let (_, s2) = decode(m).expect("module degree");
                        base.coeff(l, &s2)
                    }
                    (false, true) => {
                        let (_, s1) = decode(l).expect("module degree");
                        let sign = Scalar::from_int(base.inv_sign(m) as i64);
                        sign * base.coeff(m, &s1)
                    }
                    (false, false) => {
                        let (i, s1) = decode(l).expect("module degree");
                        let (j, s2) = decode(m).expect("module degree");
                        if i != j {
                            return Scalar::zero();
                        }
                        let sign = Scalar::from_int(base.inv_sign(&s2) as i64);
                        let first = base.coeff(&s1, &b_degs[i]);
                        let second = base.coeff(&(&s1 + &b_degs[i]), &s2);
                        sign * first * second
                    }
                }
            }
            HandleKind::JordanCd {
                inner,
                sigma0,
                mu_deg,
                mu_coeff,
                gamma_inner,
            } => {
                let theta = |tau: &Degree| -> Scalar {
                    Scalar::from_int(if gamma_inner.contains(tau) { 1 } else { -1 })
                };
                match (inner.supports(l), inner.supports(m)) {
                    (true, true) => inner.coeff(l, m),
                    (true, false) => {
                        // a (s0 d) = s0 (theta(a) d)
                        let t2 = &(m - sigma0);
                        theta(l) * inner.coeff(l, t2)
                    }
                    (false, true) => {
                        // (s0 b) c = s0 theta(theta(b) theta(c))
                        let t1 = &(l - sigma0);
                        theta(t1) * theta(m) * theta(&(t1 + m)) * inner.coeff(t1, m)
                    }
                    (false, false) => {
                        // (s0 b)(s0 d) = mu * theta(b theta(d))
                        let t1 = &(l - sigma0);
                        let t2 = &(m - sigma0);
                        let prod = inner.coeff(t1, t2);
                        let mu_mul = inner.coeff(mu_deg, &(t1 + t2));
                        theta(t2) * theta(&(t1 + t2)) * prod * mu_coeff.clone() * mu_mul
                    }
                }
            }
            HandleKind::CubicAlgebra { base, tables } => {
                match (base.supports(l), base.supports(m)) {
                    (true, true) => base.coeff(l, m),
                    (true, false) => tables.act(l, m),
                    (false, true) => {
                        let sign = Scalar::from_int(base.inv_sign(m) as i64);
                        sign * tables.act(m, l)
                    }
                    (false, false) => {
                        let sum = l + m;
                        if base.supports(&sum) {
                            tables.h_coeff(l, m)
                        } else {
                            tables.diamond_coeff(l, m)
                        }
                    }
                }
            }
            HandleKind::Restrict { inner, .. } => inner.coeff(l, m),
            HandleKind::MutateSign {
                inner,
                class_left,
                class_right,
            } => {
                let c = inner.coeff(l, m);
                if l.mod2_mask() == *class_left && m.mod2_mask() == *class_right {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// All support degrees with coordinates in [-k, k].
    pub fn support_in_box(&self, k: i64) -> Vec<Degree> {
        let mut out = Vec::new();
        let n = self.rank;
        if n == 0 {
            out.push(Degree::zero(0));
            return out;
        }
        let width = (2 * k + 1) as usize;
        let total = width.pow(n as u32);
        let mut cur = vec![-k; n];
        for _ in 0..total {
            let d = Degree(cur.clone());
            if self.supports(&d) {
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

    /// Skew support degrees in the box.
    pub fn skew_support_in_box(&self, k: i64) -> Vec<Degree> {
        self.support_in_box(k)
            .into_iter()
            .filter(|d| self.inv_sign(d) == -1)
            .collect()
    }
}

/// A finite exact linear combination of canonical basis elements.
#[derive(Clone)]
pub struct Element {
    handle: Arc<TorusHandle>,
    terms: BTreeMap<Degree, Scalar>,
}

impl std::fmt::Debug for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("({c})*b{d}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.handle.id == other.handle.id && self.terms == other.terms
    }
}

impl Element {
    pub fn zero(handle: &Arc<TorusHandle>) -> Element {
        Element {
            handle: handle.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(handle: &Arc<TorusHandle>) -> Element {
        Element::basis(handle, &Degree::zero(handle.rank())).expect("unit degree is supported")
    }

    pub fn basis(handle: &Arc<TorusHandle>, deg: &Degree) -> Result<Element, TorusError> {
        if !handle.supports(deg) {
            return Err(TorusError::DegreeOutsideSupport(deg.clone()));
        }
        let mut terms = BTreeMap::new();
        terms.insert(deg.clone(), Scalar::one());
        Ok(Element {
            handle: handle.clone(),
            terms,
        })
    }

    pub fn handle(&self) -> &Arc<TorusHandle> {
        &self.handle
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Degree, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The single (degree, coefficient) pair of a homogeneous element.
    pub fn single_term(&self) -> Result<(Degree, Scalar), TorusError> {
        if self.terms.len() != 1 {
            return Err(TorusError::NotHomogeneous);
        }
        let (d, c) = self.terms.iter().next().unwrap();
        Ok((d.clone(), c.clone()))
    }

    pub fn coeff_at(&self, deg: &Degree) -> Scalar {
        self.terms.get(deg).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, deg: Degree, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(deg);
        match entry {
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

    pub fn scaled(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero(&self.handle);
        }
        Element {
            handle: self.handle.clone(),
            terms: self
                .terms
                .iter()
                .map(|(d, x)| (d.clone(), x * c))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Element) -> Element {
        assert_eq!(self.handle.id, rhs.handle.id, "handle mismatch");
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Element) -> Element {
        self.add(&rhs.scaled(&Scalar::from_int(-1)))
    }

    pub fn neg(&self) -> Element {
        self.scaled(&Scalar::from_int(-1))
    }

    pub fn try_mul(&self, rhs: &Element) -> Result<Element, TorusError> {
        if self.handle.id != rhs.handle.id {
            return Err(TorusError::HandleMismatch);
        }
        let mut out = Element::zero(&self.handle);
        for (dl, cl) in &self.terms {
            for (dm, cm) in &rhs.terms {
                let structure = self.handle.coeff(dl, dm);
                if structure.is_zero() {
                    continue;
                }
                let deg = dl + dm;
                debug_assert!(
                    self.handle.supports(&deg),
                    "nonzero product left the support at {deg}"
                );
                out.add_term(deg, &(cl * cm) * &structure);
            }
        }
        Ok(out)
    }

    /// Bilinear product. Panics on a handle mismatch; use `try_mul` to get
    /// the error value instead.
    pub fn mul(&self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("handle mismatch")
    }

    /// Graded involution: applies the per-degree sign, F-linearly.
    pub fn involution(&self) -> Element {
        Element {
            handle: self.handle.clone(),
            terms: self
                .terms
                .iter()
                .map(|(d, c)| {
                    let s = self.handle.inv_sign(d);
                    (d.clone(), if s == 1 { c.clone() } else { -c })
                })
                .collect(),
        }
    }

    pub fn commutator(&self, rhs: &Element) -> Element {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn associator(&self, y: &Element, z: &Element) -> Element {
        self.mul(y).mul(z).sub(&self.mul(&y.mul(z)))
    }

    /// Triple product {x y z} = (x y*) z + (z y*) x - (z x*) y.
    pub fn brace(&self, y: &Element, z: &Element) -> Element {
        let ys = y.involution();
        let xs = self.involution();
        self.mul(&ys)
            .mul(z)
            .add(&z.mul(&ys).mul(self))
            .sub(&z.mul(&xs).mul(y))
    }

    /// x o y = xy + yx.
    pub fn circ(&self, rhs: &Element) -> Element {
        self.mul(rhs).add(&rhs.mul(self))
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut acc = Element::one(&self.handle);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// JSON rendering: {"terms": [{"degree": [...], "re": "p/q", "im": "p/q"}]}
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(d, c)| {
                serde_json::json!({
                    "degree": d.0,
                    "re": c.re().to_string(),
                    "im": c.im().to_string(),
                })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }
}

/// Inverse of a nonzero homogeneous element: the candidate at the opposite
/// degree is verified to satisfy x y = y x = 1 and [L_x, L_y] = 0 over a
/// degree window before it is returned.
pub fn inverse_homogeneous(x: &Element, window: i64) -> Result<Element, TorusError> {
    let (deg, c) = x.single_term()?;
    let handle = x.handle().clone();
    let opp = -&deg;
    if !handle.supports(&opp) {
        return Err(TorusError::NotInvertible(format!(
            "opposite degree {opp} is outside the support"
        )));
    }
    let pairing = handle.coeff(&deg, &opp);
    if pairing.is_zero() {
        return Err(TorusError::NotInvertible(format!(
            "structure constant at ({deg}, {opp}) vanishes"
        )));
    }
    let y = Element::basis(&handle, &opp)?.scaled(&(&c * &pairing).inv());
    let one = Element::one(&handle);
    if x.mul(&y) != one || y.mul(x) != one {
        return Err(TorusError::NotInvertible(
            "candidate fails x y = y x = 1".into(),
        ));
    }
    for d in handle.support_in_box(window) {
        let z = Element::basis(&handle, &d)?;
        let lhs = x.mul(&y.mul(&z));
        let rhs = y.mul(&x.mul(&z));
        if lhs != rhs {
            return Err(TorusError::NotInvertible(format!(
                "[L_x, L_y] does not vanish at degree {d}"
            )));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors;

    #[test]
    fn unit_multiplies_trivially() {
        let p2 = constructors::laurent(2);
        let one = Element::one(&p2);
        let x = Element::basis(&p2, &Degree(vec![3, -1])).unwrap();
        assert_eq!(one.mul(&x), x);
        assert_eq!(x.mul(&one), x);
    }

    #[test]
    fn laurent_commutes() {
        let p2 = constructors::laurent(2);
        let x = Element::basis(&p2, &Degree(vec![1, 0])).unwrap();
        let y = Element::basis(&p2, &Degree(vec![0, 1])).unwrap();
        assert!(x.commutator(&y).is_zero());
    }

    #[test]
    fn handle_mismatch_is_reported() {
        let a = constructors::laurent(1);
        let b = constructors::laurent(1);
        let x = Element::one(&a);
        let y = Element::one(&b);
        assert!(matches!(x.try_mul(&y), Err(TorusError::HandleMismatch)));
    }

    #[test]
    fn laurent_inverse() {
        let p1 = constructors::laurent(1);
        let t = Element::basis(&p1, &Degree(vec![1])).unwrap();
        let tinv = inverse_homogeneous(&t, 2).unwrap();
        assert_eq!(tinv, Element::basis(&p1, &Degree(vec![-1])).unwrap());
    }
}
