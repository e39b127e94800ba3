//! Builders for every named graded algebra with involution: Laurent tori,
//! doubling chains, tensor products, Jordan plus/hermitian algebras,
//! hermitian-form algebras, and the Jordan doubling. Each builder validates
//! its preconditions, computes the structural metadata (central grading
//! group, skew span, support lattice), and returns an immutable handle.

pub mod recipe;
pub mod trace;

use crate::lattice::{sign_kernel, Degree, LatticeError, Subgroup};
use crate::scalar::Scalar;
use crate::torus::identities::{check_identity, IdentityTag, Sampler};
use crate::torus::{Element, FieldTag, HandleKind, Meta, TorusError, TorusHandle};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("element is not hermitian: {0}")]
    NotHermitian(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("degree arithmetic violated: {0}")]
    BadDegreeArithmetic(String),
    #[error("field tags differ between operands")]
    FieldMismatch,
    #[error("support does not span the expected lattice: {0}")]
    SupportNotGroup(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

type Result<T> = std::result::Result<T, ConstructError>;

/// Laurent algebra on r generators: full support, unit structure constants,
/// trivial involution.
pub fn laurent(r: usize) -> Arc<TorusHandle> {
    TorusHandle::new(
        r,
        HandleKind::Laurent,
        Meta {
            field: FieldTag::Rationals,
            gamma: Subgroup::full(r),
            gamma_assoc: Subgroup::full(r),
            lambda_minus: Subgroup::zero(r),
            span: Subgroup::full(r),
            support_lattice: Some(Subgroup::full(r)),
            nonzero_products: true,
            periodicity_hint: Some(Subgroup::full(r)),
            recipe: format!("laurent({r})"),
        },
    )
}

/// Laurent algebra whose involution negates the generators flagged in
/// `skew`; the sign is the multiplicative character determined by the flags.
pub fn laurent_with_signs(skew: Vec<bool>) -> Arc<TorusHandle> {
    let r = skew.len();
    let full = Subgroup::full(r);
    let handle_sign = |d: &Degree| -> i8 {
        let parity: i64 = d.0.iter().zip(&skew).filter(|(_, &s)| s).map(|(c, _)| *c).sum();
        if parity.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    };
    let gamma = sign_kernel(&full, handle_sign);
    let any_skew = skew.iter().any(|&s| s);
    TorusHandle::new(
        r,
        HandleKind::SignedLaurent { skew: skew.clone() },
        Meta {
            field: FieldTag::Rationals,
            gamma,
            gamma_assoc: Subgroup::full(r),
            lambda_minus: if any_skew {
                Subgroup::full(r)
            } else {
                Subgroup::zero(r)
            },
            span: Subgroup::full(r),
            support_lattice: Some(Subgroup::full(r)),
            nonzero_products: true,
            periodicity_hint: Some(Subgroup::scaled_full(r, 2)),
            recipe: format!("laurent_with_signs({skew:?})"),
        },
    )
}

fn invert_map(fwd: &[Degree]) -> Option<(Vec<Vec<i64>>, i64)> {
    let n = fwd.len();
    // Gauss-Jordan over the rationals on F with F[i][j] = fwd[i][j].
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(BigInt::from(fwd[i].0[j])))
                .chain((0..n).map(|j| {
                    BigRational::from_integer(BigInt::from(if i == j { 1 } else { 0 }))
                }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
    }
    // Common denominator.
    let mut den = BigInt::from(1);
    for row in &m {
        for c in n..2 * n {
            den = num_integer::lcm(den, row[c].denom().abs());
        }
    }
    let num: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = &m[i][n + j] * BigRational::from_integer(den.clone());
                    v.to_integer().to_i64().expect("inverse entry fits i64")
                })
                .collect()
        })
        .collect();
    Some((num, den.to_i64()?))
}

/// Reindex the grading of `inner` through the injective map sending the
/// i-th basis vector to `fwd[i]`.
pub fn regrade(inner: &Arc<TorusHandle>, fwd: Vec<Degree>) -> Result<Arc<TorusHandle>> {
    let n = inner.rank();
    if fwd.len() != n || fwd.iter().any(|d| d.rank() != n) {
        return Err(ConstructError::BadDegreeArithmetic(
            "regrade matrix must be square of the handle rank".into(),
        ));
    }
    let (inv_num, inv_den) = invert_map(&fwd).ok_or_else(|| {
        ConstructError::BadDegreeArithmetic("regrade matrix is singular".into())
    })?;
    let meta = inner.meta();
    let map = |s: &Subgroup| s.image(&fwd);
    let new_meta = Meta {
        field: meta.field,
        gamma: map(&meta.gamma),
        gamma_assoc: map(&meta.gamma_assoc),
        lambda_minus: map(&meta.lambda_minus),
        span: map(&meta.span),
        support_lattice: meta.support_lattice.as_ref().map(map),
        nonzero_products: meta.nonzero_products,
        periodicity_hint: meta.periodicity_hint.as_ref().map(map),
        recipe: format!("regrade({})", meta.recipe),
    };
    Ok(TorusHandle::new(
        n,
        HandleKind::Regrade {
            inner: inner.clone(),
            fwd,
            inv_num,
            inv_den,
        },
        new_meta,
    ))
}

fn centrality_window(rank: usize) -> i64 {
    if rank <= 3 {
        2
    } else {
        1
    }
}

/// Window check that the basis element at `deg` lies in the centre of the
/// algebra with involution (commutes and associates in all slots).
fn check_central(handle: &Arc<TorusHandle>, deg: &Degree, what: &str) -> Result<()> {
    let k = centrality_window(handle.rank());
    let x = Element::basis(handle, deg)?;
    let window = handle.support_in_box(k);
    for d in &window {
        let y = Element::basis(handle, d)?;
        if !x.commutator(&y).is_zero() {
            return Err(ConstructError::NotCentral(format!(
                "{what} fails to commute at degree {d}"
            )));
        }
    }
    for d1 in &window {
        let y = Element::basis(handle, d1)?;
        for d2 in &window {
            let z = Element::basis(handle, d2)?;
            if !x.associator(&y, &z).is_zero()
                || !y.associator(&x, &z).is_zero()
                || !y.associator(&z, &x).is_zero()
            {
                return Err(ConstructError::NotCentral(format!(
                    "{what} fails to associate at degrees ({d1}, {d2})"
                )));
            }
        }
    }
    Ok(())
}

/// Doubling along a hermitian central unit: the doubled algebra lives on
/// supp(inner) plus the shifted coset gen_deg + supp(inner), with canonical
/// basis u * b_inner on the new coset and involution negating it.
pub fn cd_double(
    inner: &Arc<TorusHandle>,
    mu_deg: Degree,
    mu_coeff: Scalar,
    gen_deg: Degree,
) -> Result<Arc<TorusHandle>> {
    let n = inner.rank();
    if mu_deg.rank() != n || gen_deg.rank() != n {
        return Err(ConstructError::BadDegreeArithmetic(
            "degree rank mismatch".into(),
        ));
    }
    if gen_deg.scaled(2) != mu_deg {
        return Err(ConstructError::BadDegreeArithmetic(format!(
            "doubling generator degree {gen_deg} must satisfy 2*deg = {mu_deg}"
        )));
    }
    if !inner.supports(&mu_deg) {
        return Err(ConstructError::BadDegreeArithmetic(format!(
            "mu degree {mu_deg} is outside the inner support"
        )));
    }
    if mu_coeff.is_zero() {
        return Err(ConstructError::NotInvertible("mu coefficient is zero".into()));
    }
    if inner.inv_sign(&mu_deg) != 1 {
        return Err(ConstructError::NotHermitian(format!(
            "mu at {mu_deg} is skew"
        )));
    }
    check_central(inner, &mu_deg, "mu")?;
    let mu = Element::basis(inner, &mu_deg)?.scaled(&mu_coeff);
    crate::torus::inverse_homogeneous(&mu, centrality_window(n))
        .map_err(|e| ConstructError::NotInvertible(format!("mu: {e}")))?;
    let meta = inner.meta();
    let Some(lattice) = meta.support_lattice.clone() else {
        return Err(ConstructError::Precondition(
            "doubling requires a lattice-supported inner algebra".into(),
        ));
    };
    if lattice.contains(&gen_deg) {
        return Err(ConstructError::BadDegreeArithmetic(format!(
            "generator degree {gen_deg} already lies in the inner support"
        )));
    }
    let span = lattice.join_degrees(&[gen_deg.clone()]);
    let trivial_involution = meta.lambda_minus.rank() == 0;
    let commutative_inner = is_commutative_recipe(inner);
    let gamma_assoc = if commutative_inner && trivial_involution {
        span.clone()
    } else {
        sign_kernel(&meta.gamma_assoc, |d| inner.inv_sign(d))
    };
    // The involution negates the whole new coset, so the hermitian part of
    // gamma_assoc can be computed without consulting the new handle.
    let new_sign = |d: &Degree| -> i8 {
        if inner.supports(d) {
            inner.inv_sign(d)
        } else {
            -1
        }
    };
    let gamma = sign_kernel(&gamma_assoc, new_sign);
    let new_handle_field = if mu_coeff.is_real() {
        meta.field
    } else {
        FieldTag::GaussianRationals
    };
    let recipe = format!("cd_double({}, mu@{mu_deg}, gen@{gen_deg})", meta.recipe);
    Ok(TorusHandle::new(
        n,
        HandleKind::CdDouble {
            inner: inner.clone(),
            mu_deg,
            mu_coeff,
            gen_deg,
        },
        Meta {
            field: new_handle_field,
            gamma,
            gamma_assoc,
            lambda_minus: span.clone(),
            span: span.clone(),
            support_lattice: Some(span.clone()),
            nonzero_products: meta.nonzero_products,
            periodicity_hint: Some(span.scaled(2)),
            recipe,
        },
    ))
}

fn is_commutative_recipe(handle: &Arc<TorusHandle>) -> bool {
    match handle.kind() {
        HandleKind::Laurent | HandleKind::SignedLaurent { .. } => true,
        HandleKind::Regrade { inner, .. } | HandleKind::Restrict { inner, .. } => {
            is_commutative_recipe(inner)
        }
        HandleKind::CdDouble { inner, .. } => {
            is_commutative_recipe(inner) && inner.meta().lambda_minus.rank() == 0
        }
        HandleKind::Tensor { left, right } => {
            is_commutative_recipe(left) && is_commutative_recipe(right)
        }
        HandleKind::Plus { .. } | HandleKind::HermitianPart { .. } => true,
        _ => false,
    }
}

/// The doubling chain CD(P(n), t_1, ..., t_n) with its canonical grading:
/// generator i sits at the i-th basis degree and t_i = x_i^2 at twice it.
pub fn cayley(n: usize) -> Result<Arc<TorusHandle>> {
    if n > 3 {
        return Err(ConstructError::Precondition(format!(
            "doubling chains of length {n} > 3 are not alternative"
        )));
    }
    if n == 0 {
        return Ok(laurent(0));
    }
    let base = regrade(
        &laurent(n),
        (0..n).map(|i| Degree::unit(n, i).scaled(2)).collect(),
    )?;
    let mut acc = base;
    for i in 0..n {
        acc = cd_double(
            &acc,
            Degree::unit(n, i).scaled(2),
            Scalar::one(),
            Degree::unit(n, i),
        )?;
    }
    Ok(acc)
}

/// The rank-2 doubling chain with the involution fixing both canonical
/// generators instead of negating them.
pub fn cayley_star2() -> Result<Arc<TorusHandle>> {
    let inner = cayley(2)?;
    let meta = inner.meta().clone();
    let lambda_minus = Subgroup::hnf(
        2,
        &[
            Degree(vec![1, 1]),
            Degree(vec![2, 0]),
            Degree(vec![0, 2]),
        ],
    );
    Ok(TorusHandle::new(
        2,
        HandleKind::MainInvolution { inner },
        Meta {
            field: meta.field,
            gamma: Subgroup::scaled_full(2, 2),
            gamma_assoc: meta.gamma_assoc,
            lambda_minus,
            span: Subgroup::full(2),
            support_lattice: Some(Subgroup::full(2)),
            nonzero_products: true,
            periodicity_hint: Some(Subgroup::scaled_full(2, 2)),
            recipe: "cayley_star2".into(),
        },
    ))
}

/// Tensor product grading: ranks add, structure constants multiply.
pub fn tensor(left: &Arc<TorusHandle>, right: &Arc<TorusHandle>) -> Result<Arc<TorusHandle>> {
    let lm = left.meta();
    let rm = right.meta();
    if lm.field != rm.field {
        return Err(ConstructError::FieldMismatch);
    }
    let n = left.rank() + right.rank();
    let left_skew = lm.lambda_minus.rank() > 0;
    let right_skew = rm.lambda_minus.rank() > 0;
    let lambda_minus = match (left_skew, right_skew) {
        (false, false) => Subgroup::zero(n),
        (true, false) => lm.lambda_minus.direct_sum(&rm.span),
        (false, true) => lm.span.direct_sum(&rm.lambda_minus),
        (true, true) => lm.span.direct_sum(&rm.span),
    };
    Ok(TorusHandle::new(
        n,
        HandleKind::Tensor {
            left: left.clone(),
            right: right.clone(),
        },
        Meta {
            field: lm.field,
            gamma: lm.gamma.direct_sum(&rm.gamma),
            gamma_assoc: lm.gamma_assoc.direct_sum(&rm.gamma_assoc),
            lambda_minus,
            span: lm.span.direct_sum(&rm.span),
            support_lattice: match (&lm.support_lattice, &rm.support_lattice) {
                (Some(a), Some(b)) => Some(a.direct_sum(b)),
                _ => None,
            },
            nonzero_products: lm.nonzero_products && rm.nonzero_products,
            periodicity_hint: match (&lm.periodicity_hint, &rm.periodicity_hint) {
                (Some(a), Some(b)) => Some(a.direct_sum(b)),
                _ => None,
            },
            recipe: format!("tensor({}, {})", lm.recipe, rm.recipe),
        },
    ))
}

pub fn tensor_all(handles: &[Arc<TorusHandle>]) -> Result<Arc<TorusHandle>> {
    let mut iter = handles.iter();
    let first = iter
        .next()
        .ok_or_else(|| ConstructError::Precondition("empty tensor product".into()))?;
    let mut acc = first.clone();
    for h in iter {
        acc = tensor(&acc, h)?;
    }
    Ok(acc)
}

fn require_associative(handle: &Arc<TorusHandle>, what: &str) -> Result<()> {
    let sampler = if handle.rank() <= 2 {
        Sampler::exhaustive(1)
    } else {
        Sampler::random(1, 300, 0)
    };
    let report = check_identity(handle, IdentityTag::Associative, sampler)?;
    if !report.passed() {
        return Err(ConstructError::Precondition(format!(
            "{what} requires an associative algebra; associativity fails in the window"
        )));
    }
    Ok(())
}

/// Jordan plus algebra: the same graded module with the symmetrized product
/// and the trivial involution.
pub fn plus_algebra(inner: &Arc<TorusHandle>) -> Result<Arc<TorusHandle>> {
    require_associative(inner, "plus algebra")?;
    let meta = inner.meta();
    let n = inner.rank();
    Ok(TorusHandle::new(
        n,
        HandleKind::Plus {
            inner: inner.clone(),
        },
        Meta {
            field: meta.field,
            gamma: meta.gamma_assoc.clone(),
            gamma_assoc: meta.gamma_assoc.clone(),
            lambda_minus: Subgroup::zero(n),
            span: meta.span.clone(),
            support_lattice: meta.support_lattice.clone(),
            nonzero_products: false,
            periodicity_hint: meta.periodicity_hint.clone(),
            recipe: format!("plus({})", meta.recipe),
        },
    ))
}

/// Hermitian elements of an associative algebra with involution, as a
/// Jordan algebra under the symmetrized product.
pub fn hermitian_part(inner: &Arc<TorusHandle>) -> Result<Arc<TorusHandle>> {
    require_associative(inner, "hermitian part")?;
    let n = inner.rank();
    let span_small = Subgroup::hnf(n, &hermitian_degrees(inner, 2));
    let span_large = Subgroup::hnf(n, &hermitian_degrees(inner, 3));
    if span_small != span_large {
        return Err(ConstructError::SupportNotGroup(
            "hermitian support span did not stabilize across windows".into(),
        ));
    }
    let meta = inner.meta();
    if span_small != meta.span {
        return Err(ConstructError::SupportNotGroup(format!(
            "hermitian support generates a proper sublattice; regrade the \
             input by that sublattice first (rank {})",
            span_small.rank()
        )));
    }
    let gamma = sign_kernel(&meta.gamma_assoc, |d| inner.inv_sign(d));
    Ok(TorusHandle::new(
        n,
        HandleKind::HermitianPart {
            inner: inner.clone(),
        },
        Meta {
            field: meta.field,
            gamma: gamma.clone(),
            gamma_assoc: gamma,
            lambda_minus: Subgroup::zero(n),
            span: span_small,
            support_lattice: None,
            nonzero_products: false,
            periodicity_hint: meta.periodicity_hint.clone(),
            recipe: format!("hermitian_part({})", meta.recipe),
        },
    ))
}

fn hermitian_degrees(handle: &Arc<TorusHandle>, k: i64) -> Vec<Degree> {
    handle
        .support_in_box(k)
        .into_iter()
        .filter(|d| handle.inv_sign(d) == 1)
        .collect()
}

/// The algebra of a diagonal graded hermitian form over an associative base
/// with involution: base plus a free module with basis v_i at degree rho_i,
/// pairing diagonally back into the base through the elements at 2 rho_i.
/// The base part multiplies through the opposite product.
pub fn hermitian_form_torus(
    base: &Arc<TorusHandle>,
    rho: Vec<Degree>,
    b_degs: Vec<Degree>,
) -> Result<Arc<TorusHandle>> {
    let n = base.rank();
    let meta = base.meta();
    let Some(m) = meta.support_lattice.clone() else {
        return Err(ConstructError::Precondition(
            "hermitian form base must be lattice-supported".into(),
        ));
    };
    if rho.is_empty() {
        return Err(ConstructError::Precondition(
            "at least one module generator is required".into(),
        ));
    }
    if rho.len() != b_degs.len() {
        return Err(ConstructError::Precondition(
            "rho and diagonal degree lists differ in length".into(),
        ));
    }
    require_associative(base, "hermitian form base")?;
    if !m.contains_subgroup(&Subgroup::scaled_full(n, 2)) {
        return Err(ConstructError::Precondition(
            "2*Lambda must lie inside the base support lattice".into(),
        ));
    }
    for (i, r) in rho.iter().enumerate() {
        if m.contains(r) {
            return Err(ConstructError::Precondition(format!(
                "rho[{i}] = {r} lies in the base support lattice"
            )));
        }
        for (j, r2) in rho.iter().enumerate().skip(i + 1) {
            if m.contains(&(r - r2)) {
                return Err(ConstructError::Precondition(format!(
                    "rho[{i}] and rho[{j}] coincide modulo the base support lattice"
                )));
            }
        }
        let two_rho = r.scaled(2);
        if b_degs[i] != two_rho {
            return Err(ConstructError::BadDegreeArithmetic(format!(
                "diagonal value degree {} must equal 2*rho[{i}] = {two_rho}",
                b_degs[i]
            )));
        }
        if !base.supports(&two_rho) {
            return Err(ConstructError::Precondition(format!(
                "2*rho[{i}] = {two_rho} is outside the base support"
            )));
        }
        if base.inv_sign(&two_rho) != 1 {
            return Err(ConstructError::NotHermitian(format!(
                "diagonal value at {two_rho} is skew"
            )));
        }
    }
    if m.join_degrees(&rho) != Subgroup::full(n) {
        return Err(ConstructError::SupportNotGroup(
            "base lattice and module degrees do not generate the full group".into(),
        ));
    }
    let recipe = format!("hermitian_form({}, m={})", meta.recipe, rho.len());
    Ok(TorusHandle::new(
        n,
        HandleKind::HermitianForm {
            base: base.clone(),
            rho,
            b_degs,
        },
        Meta {
            field: meta.field,
            gamma: meta.gamma.clone(),
            gamma_assoc: meta.gamma.clone(),
            lambda_minus: meta.lambda_minus.clone(),
            span: Subgroup::full(n),
            support_lattice: None,
            nonzero_products: false,
            periodicity_hint: Some(Subgroup::scaled_full(n, 2)),
            recipe,
        },
    ))
}

/// Doubling of a Jordan algebra along the automorphism that fixes the
/// central support and negates the rest, with a central scalar mu of degree
/// 2 sigma0. The result lives on supp(J) plus the coset sigma0 + supp(J).
pub fn jordan_cd(
    j: &Arc<TorusHandle>,
    m: &Subgroup,
    sigma0: Degree,
    mu_deg: Degree,
    mu_coeff: Scalar,
) -> Result<Arc<TorusHandle>> {
    let n = j.rank();
    let meta = j.meta();
    if meta.lambda_minus.rank() != 0 {
        return Err(ConstructError::Precondition(
            "doubling input must carry the trivial involution".into(),
        ));
    }
    // supp(J) inside M, checked over a window.
    for d in j.support_in_box(2) {
        if !m.contains(&d) {
            return Err(ConstructError::Precondition(format!(
                "support degree {d} of the Jordan algebra is outside M"
            )));
        }
    }
    if m.index_in_full() != Some(2) {
        return Err(ConstructError::Precondition(
            "M must have index 2 in the grading group".into(),
        ));
    }
    if !meta.gamma.contains_subgroup(&m.scaled(2)) {
        return Err(ConstructError::Precondition(
            "2M must lie in the central grading group of the Jordan algebra".into(),
        ));
    }
    if m.contains(&sigma0) {
        return Err(ConstructError::Precondition(
            "sigma0 must lie outside M".into(),
        ));
    }
    if m.join_degrees(&[sigma0.clone()]) != Subgroup::full(n) {
        return Err(ConstructError::Precondition(
            "M and sigma0 must generate the grading group".into(),
        ));
    }
    if mu_deg != sigma0.scaled(2) {
        return Err(ConstructError::BadDegreeArithmetic(format!(
            "mu degree {mu_deg} must equal 2*sigma0"
        )));
    }
    if !meta.gamma.contains(&mu_deg) || !j.supports(&mu_deg) {
        return Err(ConstructError::NotCentral(format!(
            "mu degree {mu_deg} is not a central support degree"
        )));
    }
    if mu_coeff.is_zero() {
        return Err(ConstructError::NotInvertible("mu coefficient is zero".into()));
    }
    check_central(j, &mu_deg, "mu")?;
    let lambda_minus = meta.gamma.join_degrees(&[sigma0.clone()]);
    Ok(TorusHandle::new(
        n,
        HandleKind::JordanCd {
            inner: j.clone(),
            sigma0: sigma0.clone(),
            mu_deg,
            mu_coeff: mu_coeff.clone(),
            gamma_inner: meta.gamma.clone(),
        },
        Meta {
            field: if mu_coeff.is_real() {
                meta.field
            } else {
                FieldTag::GaussianRationals
            },
            gamma: meta.gamma.clone(),
            gamma_assoc: meta.gamma.clone(),
            lambda_minus,
            span: Subgroup::full(n),
            support_lattice: None,
            nonzero_products: false,
            periodicity_hint: Some(meta.gamma.clone()),
            recipe: format!("jordan_cd({}, sigma0@{sigma0})", meta.recipe),
        },
    ))
}

/// Restriction of a handle to the degrees inside a subgroup, as a graded
/// subalgebra. `gamma` and `lambda_minus` metadata must already lie inside
/// the sublattice.
pub fn restrict(inner: &Arc<TorusHandle>, lattice: Subgroup) -> Result<Arc<TorusHandle>> {
    let n = inner.rank();
    let meta = inner.meta();
    if lattice.ambient_rank() != n {
        return Err(ConstructError::BadDegreeArithmetic(
            "restriction lattice rank mismatch".into(),
        ));
    }
    if !lattice.contains_subgroup(&meta.gamma) {
        return Err(ConstructError::Precondition(
            "restriction would cut through the central grading group".into(),
        ));
    }
    let gamma = meta.gamma.clone();
    let lambda_minus = if lattice.contains_subgroup(&meta.lambda_minus) {
        meta.lambda_minus.clone()
    } else {
        return Err(ConstructError::Precondition(
            "restriction would cut through the skew span".into(),
        ));
    };
    // If every lattice point in a window is supported, the restriction has
    // the lattice itself as its exact support.
    let probe_box: Vec<Degree> = lattice
        .basis()
        .flat_map(|b| vec![b.clone(), b.scaled(-1), b.scaled(2)])
        .collect();
    let lattice_supported = probe_box.iter().all(|d| inner.supports(d));
    Ok(TorusHandle::new(
        n,
        HandleKind::Restrict {
            inner: inner.clone(),
            lattice: lattice.clone(),
        },
        Meta {
            field: meta.field,
            gamma,
            gamma_assoc: meta.gamma_assoc.clone(),
            lambda_minus,
            span: lattice.clone(),
            support_lattice: if lattice_supported {
                Some(lattice.clone())
            } else {
                None
            },
            nonzero_products: meta.nonzero_products,
            periodicity_hint: meta.periodicity_hint.clone(),
            recipe: format!("restrict({})", meta.recipe),
        },
    ))
}

/// Corrupt a handle by flipping the sign of every structure constant whose
/// degree pair reduces mod 2 to the given class. Used for mutation testing:
/// the table's sign pattern repeats along 2*Lambda, so flipping one class of
/// the pattern is the smallest table mutation visible to window checks.
pub fn mutate_sign(
    inner: &Arc<TorusHandle>,
    class_left: &Degree,
    class_right: &Degree,
) -> Arc<TorusHandle> {
    let meta = inner.meta().clone();
    TorusHandle::new(
        inner.rank(),
        HandleKind::MutateSign {
            inner: inner.clone(),
            class_left: class_left.mod2_mask(),
            class_right: class_right.mod2_mask(),
        },
        Meta {
            recipe: format!("mutate_sign({})", meta.recipe),
            ..meta
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_one_squares_generator() {
        let c1 = cayley(1).unwrap();
        let x = Element::basis(&c1, &Degree(vec![1])).unwrap();
        let sq = x.mul(&x);
        assert_eq!(sq, Element::basis(&c1, &Degree(vec![2])).unwrap());
    }

    #[test]
    fn cayley_two_anticommutes() {
        let c2 = cayley(2).unwrap();
        let x1 = Element::basis(&c2, &Degree(vec![1, 0])).unwrap();
        let x2 = Element::basis(&c2, &Degree(vec![0, 1])).unwrap();
        assert_eq!(x2.mul(&x1), x1.mul(&x2).neg());
    }

    #[test]
    fn cayley_involution_signs() {
        let c2 = cayley(2).unwrap();
        assert_eq!(c2.inv_sign(&Degree(vec![1, 0])), -1);
        assert_eq!(c2.inv_sign(&Degree(vec![1, 1])), -1);
        assert_eq!(c2.inv_sign(&Degree(vec![2, 0])), 1);
        let c2s = cayley_star2().unwrap();
        assert_eq!(c2s.inv_sign(&Degree(vec![1, 0])), 1);
        assert_eq!(c2s.inv_sign(&Degree(vec![0, 1])), 1);
        assert_eq!(c2s.inv_sign(&Degree(vec![1, 1])), -1);
    }

    #[test]
    fn tensor_with_point_is_identity_on_tables() {
        let c2 = cayley(2).unwrap();
        let t = tensor(&c2, &laurent(0)).unwrap();
        for l in c2.support_in_box(2) {
            for m in c2.support_in_box(1) {
                assert_eq!(t.coeff(&l, &m), c2.coeff(&l, &m));
                assert_eq!(t.inv_sign(&l), c2.inv_sign(&l));
            }
        }
    }

    #[test]
    fn gamma_metadata_of_chains() {
        let c3 = cayley(3).unwrap();
        assert_eq!(c3.meta().gamma, Subgroup::scaled_full(3, 2));
        assert_eq!(c3.meta().lambda_minus, Subgroup::full(3));
        let c2s = cayley_star2().unwrap();
        assert_eq!(c2s.meta().gamma, Subgroup::scaled_full(2, 2));
        assert!(c2s.meta().lambda_minus.contains(&Degree(vec![1, 1])));
        assert!(!c2s.meta().lambda_minus.contains(&Degree(vec![1, 0])));
    }

    #[test]
    fn plus_of_laurent_is_laurent() {
        let p = laurent(2);
        let plus = plus_algebra(&p).unwrap();
        for l in p.support_in_box(1) {
            for m in p.support_in_box(1) {
                assert_eq!(plus.coeff(&l, &m), p.coeff(&l, &m));
            }
        }
    }

    #[test]
    fn cd_double_rejects_skew_mu() {
        let c1 = cayley(1).unwrap();
        // degree 1 is skew in the chain
        let err = cd_double(
            &c1,
            Degree(vec![1]),
            Scalar::one(),
            Degree(vec![1]),
        );
        assert!(err.is_err());
    }
}
