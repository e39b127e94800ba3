//! Sign invariants of skew-generated tori with full support: the involution
//! sign epsilon per degree, the multiplicative commutator beta, the
//! multiplicative associator alpha, and the seven-fold epsilon product mu.
//! All four descend to the mod-2 reduction of the grading group; the tables
//! built here index them by that finite quotient.

use super::{TorusError, TorusHandle};
use crate::lattice::Degree;
use crate::scalar::Scalar;
use serde::Serialize;
use std::sync::Arc;

fn sign_of(value: &Scalar, l: &Degree, m: &Degree) -> Result<i8, TorusError> {
    if value.is_zero() {
        return Err(TorusError::ZeroProduct(l.clone(), m.clone()));
    }
    if value.is_one() {
        Ok(1)
    } else if (-value).is_one() {
        Ok(-1)
    } else {
        Err(TorusError::NotInvertible(format!(
            "sign invariant is not +-1 at ({l}, {m}): {value}"
        )))
    }
}

pub fn epsilon(handle: &Arc<TorusHandle>, deg: &Degree) -> Result<i8, TorusError> {
    if !handle.supports(deg) {
        return Err(TorusError::DegreeOutsideSupport(deg.clone()));
    }
    Ok(handle.inv_sign(deg))
}

/// x2 x1 = beta(l1, l2) x1 x2 on basis elements.
pub fn beta(handle: &Arc<TorusHandle>, l1: &Degree, l2: &Degree) -> Result<i8, TorusError> {
    let forward = handle.coeff(l1, l2);
    if forward.is_zero() {
        return Err(TorusError::ZeroProduct(l1.clone(), l2.clone()));
    }
    let backward = handle.coeff(l2, l1);
    sign_of(&(&backward * &forward.inv()), l1, l2)
}

/// x1 (x2 x3) = alpha(l1, l2, l3) (x1 x2) x3 on basis elements.
pub fn alpha(
    handle: &Arc<TorusHandle>,
    l1: &Degree,
    l2: &Degree,
    l3: &Degree,
) -> Result<i8, TorusError> {
    let right = &handle.coeff(l2, l3) * &handle.coeff(l1, &(l2 + l3));
    let left = &handle.coeff(l1, l2) * &handle.coeff(&(l1 + l2), l3);
    if left.is_zero() {
        return Err(TorusError::ZeroProduct(l1.clone(), l2.clone()));
    }
    sign_of(&(&right * &left.inv()), l1, l3)
}

/// The seven-fold epsilon product.
pub fn mu3(
    handle: &Arc<TorusHandle>,
    l1: &Degree,
    l2: &Degree,
    l3: &Degree,
) -> Result<i8, TorusError> {
    let mut acc = 1i8;
    for d in [
        l1.clone(),
        l2.clone(),
        l3.clone(),
        l1 + l2,
        l1 + l3,
        l2 + l3,
        &(l1 + l2) + l3,
    ] {
        acc *= epsilon(handle, &d)?;
    }
    Ok(acc)
}

/// The four sign invariants tabulated over the mod-2 quotient of the
/// grading group, with representatives in {0,1}^n.
#[derive(Clone, Serialize)]
pub struct InvariantTable {
    pub rank: usize,
    /// epsilon by mod-2 mask.
    pub eps: Vec<i8>,
    /// beta by (mask1, mask2), row-major.
    pub beta: Vec<i8>,
    /// alpha by (mask1, mask2, mask3).
    pub alpha: Vec<i8>,
    /// mu by (mask1, mask2, mask3).
    pub mu: Vec<i8>,
}

fn rep(rank: usize, mask: u64) -> Degree {
    Degree((0..rank).map(|i| ((mask >> i) & 1) as i64).collect())
}

/// Build the invariant tables. Requires the nonzero-products guarantee and
/// spot-checks that each invariant is unchanged by shifting a representative
/// by twice a basis vector.
pub fn invariant_table(handle: &Arc<TorusHandle>) -> Result<InvariantTable, TorusError> {
    if !handle.meta().nonzero_products {
        return Err(TorusError::NoNonzeroProductsGuarantee);
    }
    let n = handle.rank();
    assert!(n <= 16, "invariant tables need rank <= 16");
    let size = 1usize << n;
    let mut eps = vec![0i8; size];
    for m in 0..size {
        eps[m] = epsilon(handle, &rep(n, m as u64))?;
    }
    let mut beta_t = vec![0i8; size * size];
    for a in 0..size {
        for b in 0..size {
            beta_t[a * size + b] = beta(handle, &rep(n, a as u64), &rep(n, b as u64))?;
        }
    }
    let mut alpha_t = vec![0i8; size * size * size];
    let mut mu_t = vec![0i8; size * size * size];
    for a in 0..size {
        for b in 0..size {
            for c in 0..size {
                let i = (a * size + b) * size + c;
                alpha_t[i] = alpha(handle, &rep(n, a as u64), &rep(n, b as u64), &rep(n, c as u64))?;
                mu_t[i] = eps[a]
                    * eps[b]
                    * eps[c]
                    * eps[a ^ b]
                    * eps[a ^ c]
                    * eps[b ^ c]
                    * eps[a ^ b ^ c];
            }
        }
    }
    // Spot-check mod-2 well-definedness on shifted representatives.
    for i in 0..n.min(3) {
        let shift = Degree::unit(n, i).scaled(2);
        let a = rep(n, 1 % size as u64);
        let b = rep(n, (size as u64 - 1) % size as u64);
        if epsilon(handle, &(&a + &shift))? != epsilon(handle, &a)? {
            return Err(TorusError::NotInvertible(
                "epsilon is not constant mod 2".into(),
            ));
        }
        if alpha(handle, &(&a + &shift), &b, &a)? != alpha(handle, &a, &b, &a)? {
            return Err(TorusError::NotInvertible(
                "alpha is not constant mod 2".into(),
            ));
        }
    }
    Ok(InvariantTable {
        rank: n,
        eps,
        beta: beta_t,
        alpha: alpha_t,
        mu: mu_t,
    })
}

impl InvariantTable {
    fn size(&self) -> usize {
        1usize << self.rank
    }

    pub fn eps_at(&self, a: usize) -> i8 {
        self.eps[a]
    }

    pub fn beta_at(&self, a: usize, b: usize) -> i8 {
        self.beta[a * self.size() + b]
    }

    pub fn alpha_at(&self, a: usize, b: usize, c: usize) -> i8 {
        self.alpha[(a * self.size() + b) * self.size() + c]
    }

    pub fn mu_at(&self, a: usize, b: usize, c: usize) -> i8 {
        self.mu[(a * self.size() + b) * self.size() + c]
    }

    /// Exhaustively verify the multiplicative identities that tie the four
    /// invariants together. Returns the names of the clauses that fail.
    pub fn verify_sign_identities(&self) -> Vec<String> {
        let size = self.size();
        let mut failures = Vec::new();
        let mut fail = |name: &str| {
            if !failures.iter().any(|f| f == name) {
                failures.push(name.to_string());
            }
        };
        // (a) beta symmetric and equal to the epsilon product
        for a in 0..size {
            for b in 0..size {
                let expect = self.eps[a] * self.eps[b] * self.eps[a ^ b];
                if self.beta_at(a, b) != expect || self.beta_at(b, a) != expect {
                    fail("beta_epsilon_product");
                }
            }
        }
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let al = self.alpha_at(a, b, c);
                    // (h) alpha symmetric under reversal
                    if self.alpha_at(c, b, a) != al {
                        fail("alpha_reversal");
                    }
                    // (c) mu as a cyclic alpha product
                    if self.mu_at(a, b, c)
                        != al * self.alpha_at(c, a, b) * self.alpha_at(b, c, a)
                    {
                        fail("mu_cyclic_alpha");
                    }
                    // (e) dependent triples have mu = 1
                    let dependent = a == 0
                        || b == 0
                        || c == 0
                        || a == b
                        || a == c
                        || b == c
                        || (a ^ b) == c;
                    if dependent && self.mu_at(a, b, c) != 1 {
                        fail("mu_dependent");
                    }
                    // (g) alpha equals mu when a slot is skew
                    if (self.eps[a] == -1 || self.eps[b] == -1 || self.eps[c] == -1)
                        && al != self.mu_at(a, b, c)
                    {
                        fail("alpha_mu_skew");
                    }
                }
            }
        }
        // (d) the five-term alpha cocycle
        'outer: for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    for d in 0..size {
                        let prod = self.alpha_at(b, c, d)
                            * self.alpha_at(a ^ b, c, d)
                            * self.alpha_at(a, b ^ c, d)
                            * self.alpha_at(a, b, c ^ d)
                            * self.alpha_at(a, b, c);
                        if prod != 1 {
                            fail("alpha_cocycle");
                            break 'outer;
                        }
                    }
                }
            }
        }
        failures
    }

    /// Largest dimension of a subspace of the mod-2 space on which epsilon
    /// is -1 away from zero, found by exhaustive search.
    pub fn max_anisotropic_dim(&self) -> usize {
        let size = self.size();
        let aniso: Vec<bool> = (0..size).map(|m| self.eps[m] == -1).collect();
        fn extend(
            aniso: &[bool],
            size: usize,
            space: &mut Vec<usize>,
            members: &mut Vec<usize>,
            best: &mut usize,
        ) {
            *best = (*best).max(space.len());
            let start = space.last().map_or(1, |&l| l + 1);
            for cand in start..size {
                if !aniso[cand] {
                    continue;
                }
                if members.iter().any(|&m| m != 0 && !aniso[m ^ cand]) {
                    continue;
                }
                let added: Vec<usize> = members.iter().map(|&m| m ^ cand).collect();
                space.push(cand);
                members.extend(added);
                extend(aniso, size, space, members, best);
                let keep = members.len() / 2;
                members.truncate(keep);
                space.pop();
            }
        }
        let mut best = 0;
        let mut space = Vec::new();
        let mut members = vec![0usize];
        extend(&aniso, size, &mut space, &mut members, &mut best);
        best
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }
}
