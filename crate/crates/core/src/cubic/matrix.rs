//! Pair formulation of the adjoint identity and the 2x2 matrix algebra it
//! generates: a diagonal nondegenerate pairing T between two free modules
//! over a commutative associative base, cubic forms N+ and N- given by
//! their full linearizations, and adjoint maps crossing between the sides.
//! The resulting algebra on (base + base) + (V+ + V-) carries the exchange
//! involution; it is graded but not finely graded, so its identities are
//! checked directly on its own element type rather than through a handle.

use crate::constructors::ConstructError;
use crate::scalar::Scalar;
use crate::torus::{inverse_homogeneous, Element, TorusHandle};
use std::sync::Arc;

/// Full linearization of a cubic form on a free module of finite rank,
/// with values in the base: f(i, j, k) must be symmetric.
pub type TriTable = Arc<dyn Fn(usize, usize, usize) -> Element + Send + Sync>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// The triple (T, N+, N-) on a pair of rank-m free modules over a
/// commutative associative base with trivial involution; the pairing is
/// diagonal with invertible homogeneous diagonal values.
pub struct PairCubicTriple {
    pub k: Arc<TorusHandle>,
    pub rank: usize,
    pub t_diag: Vec<Element>,
    pub n_plus: TriTable,
    pub n_minus: TriTable,
    t_diag_inv: Vec<Element>,
}

impl PairCubicTriple {
    pub fn new(
        k: Arc<TorusHandle>,
        t_diag: Vec<Element>,
        n_plus: TriTable,
        n_minus: TriTable,
    ) -> Result<PairCubicTriple, ConstructError> {
        if k.meta().lambda_minus.rank() != 0 {
            return Err(ConstructError::Precondition(
                "pair base must carry the trivial involution".into(),
            ));
        }
        let rank = t_diag.len();
        let mut t_diag_inv = Vec::with_capacity(rank);
        for t in &t_diag {
            let inv = inverse_homogeneous(t, 1)
                .map_err(|e| ConstructError::NotInvertible(format!("pairing value: {e}")))?;
            t_diag_inv.push(inv);
        }
        // spot-check symmetry of the trilinear tables
        for table in [&n_plus, &n_minus] {
            for i in 0..rank {
                for j in 0..rank {
                    for l in 0..rank {
                        let base = table(i, j, l);
                        if table(j, i, l) != base || table(l, j, i) != base {
                            return Err(ConstructError::Precondition(
                                "cubic form linearization is not symmetric".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(PairCubicTriple {
            k,
            rank,
            t_diag,
            n_plus,
            n_minus,
            t_diag_inv,
        })
    }

    fn table(&self, side: Side) -> &TriTable {
        match side {
            Side::Plus => &self.n_plus,
            Side::Minus => &self.n_minus,
        }
    }

    pub fn zero_coords(&self) -> Vec<Element> {
        (0..self.rank).map(|_| Element::zero(&self.k)).collect()
    }

    /// T(v+, u-) or T(v-, u+): the (symmetrically extended) pairing.
    pub fn pair(&self, v: &[Element], u: &[Element]) -> Element {
        let mut acc = Element::zero(&self.k);
        for i in 0..self.rank {
            acc = acc.add(&self.t_diag[i].mul(&v[i]).mul(&u[i]));
        }
        acc
    }

    /// N_side(v) = f(v,v,v)/6.
    pub fn n_eval(&self, side: Side, v: &[Element]) -> Element {
        let f = self.table(side);
        let mut acc = Element::zero(&self.k);
        for i in 0..self.rank {
            for j in 0..self.rank {
                for l in 0..self.rank {
                    acc = acc.add(&f(i, j, l).mul(&v[i]).mul(&v[j]).mul(&v[l]));
                }
            }
        }
        acc.scaled(&Scalar::from_ratio(1, 6))
    }

    /// The adjoint v -> v^# from one side to the other, solved from
    /// T(u, v^#) = dN|_v(u) through the diagonal pairing.
    pub fn sharp(&self, side: Side, v: &[Element]) -> Vec<Element> {
        let f = self.table(side);
        (0..self.rank)
            .map(|i| {
                let mut acc = Element::zero(&self.k);
                for j in 0..self.rank {
                    for l in 0..self.rank {
                        acc = acc.add(&f(i, j, l).mul(&v[j]).mul(&v[l]));
                    }
                }
                acc.scaled(&Scalar::from_ratio(1, 2)).mul(&self.t_diag_inv[i])
            })
            .collect()
    }

    pub fn cross(&self, side: Side, u: &[Element], v: &[Element]) -> Vec<Element> {
        let sum: Vec<Element> = u.iter().zip(v).map(|(a, b)| a.add(b)).collect();
        let s_sum = self.sharp(side, &sum);
        let s_u = self.sharp(side, u);
        let s_v = self.sharp(side, v);
        s_sum
            .into_iter()
            .zip(s_u.iter().zip(&s_v))
            .map(|(a, (b, c))| a.sub(b).sub(c))
            .collect()
    }

    /// Check (v^#)^# = N(v) v on both sides for the given coordinate
    /// vectors.
    pub fn adjoint_identity_holds(&self, side: Side, v: &[Element]) -> bool {
        let sharp1 = self.sharp(side, v);
        let sharp2 = self.sharp(side.flip(), &sharp1);
        let n = self.n_eval(side, v);
        sharp2
            .iter()
            .zip(v)
            .all(|(s, vi)| *s == n.mul(vi))
    }
}

/// An element of the 2x2 matrix algebra of a pairing triple.
#[derive(Clone, PartialEq)]
pub struct MatrixElement {
    pub a_plus: Element,
    pub a_minus: Element,
    pub v_plus: Vec<Element>,
    pub v_minus: Vec<Element>,
}

impl std::fmt::Debug for MatrixElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{:?}, {:?}; {:?}, {:?}]",
            self.a_plus, self.v_plus, self.v_minus, self.a_minus
        )
    }
}

/// The matrix algebra with the exchange involution. Its base-plus-module
/// description matches the hermitian/cubic construction with base K + K,
/// module V+ + V-, pairing h(v,u) = (T(v+,u-), T(v-,u+)) and adjoint
/// (v+,v-) -> (v-^#, v+^#).
pub struct MatrixAlgebra {
    pub triple: Arc<PairCubicTriple>,
}

impl MatrixAlgebra {
    pub fn zero(&self) -> MatrixElement {
        MatrixElement {
            a_plus: Element::zero(&self.triple.k),
            a_minus: Element::zero(&self.triple.k),
            v_plus: self.triple.zero_coords(),
            v_minus: self.triple.zero_coords(),
        }
    }

    pub fn one(&self) -> MatrixElement {
        let mut x = self.zero();
        x.a_plus = Element::one(&self.triple.k);
        x.a_minus = Element::one(&self.triple.k);
        x
    }

    pub fn add(&self, x: &MatrixElement, y: &MatrixElement) -> MatrixElement {
        MatrixElement {
            a_plus: x.a_plus.add(&y.a_plus),
            a_minus: x.a_minus.add(&y.a_minus),
            v_plus: x.v_plus.iter().zip(&y.v_plus).map(|(a, b)| a.add(b)).collect(),
            v_minus: x
                .v_minus
                .iter()
                .zip(&y.v_minus)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, x: &MatrixElement, y: &MatrixElement) -> MatrixElement {
        let minus_one = Scalar::from_int(-1);
        self.add(
            x,
            &MatrixElement {
                a_plus: y.a_plus.scaled(&minus_one),
                a_minus: y.a_minus.scaled(&minus_one),
                v_plus: y.v_plus.iter().map(|a| a.scaled(&minus_one)).collect(),
                v_minus: y.v_minus.iter().map(|a| a.scaled(&minus_one)).collect(),
            },
        )
    }

    pub fn is_zero(&self, x: &MatrixElement) -> bool {
        x.a_plus.is_zero()
            && x.a_minus.is_zero()
            && x.v_plus.iter().all(Element::is_zero)
            && x.v_minus.iter().all(Element::is_zero)
    }

    pub fn mul(&self, x: &MatrixElement, y: &MatrixElement) -> MatrixElement {
        let t = &self.triple;
        let scale = |a: &Element, v: &[Element]| -> Vec<Element> {
            v.iter().map(|c| a.mul(c)).collect()
        };
        let add3 = |a: Vec<Element>, b: Vec<Element>, c: Vec<Element>| -> Vec<Element> {
            a.iter()
                .zip(b.iter().zip(&c))
                .map(|(x, (y, z))| x.add(y).add(z))
                .collect()
        };
        MatrixElement {
            a_plus: x.a_plus.mul(&y.a_plus).add(&t.pair(&x.v_plus, &y.v_minus)),
            a_minus: x.a_minus.mul(&y.a_minus).add(&t.pair(&x.v_minus, &y.v_plus)),
            v_plus: add3(
                scale(&x.a_plus, &y.v_plus),
                scale(&y.a_minus, &x.v_plus),
                t.cross(Side::Minus, &x.v_minus, &y.v_minus),
            ),
            v_minus: add3(
                scale(&y.a_plus, &x.v_minus),
                scale(&x.a_minus, &y.v_minus),
                t.cross(Side::Plus, &x.v_plus, &y.v_plus),
            ),
        }
    }

    /// Exchange involution: swaps the diagonal entries.
    pub fn involution(&self, x: &MatrixElement) -> MatrixElement {
        MatrixElement {
            a_plus: x.a_minus.clone(),
            a_minus: x.a_plus.clone(),
            v_plus: x.v_plus.clone(),
            v_minus: x.v_minus.clone(),
        }
    }

    pub fn associator(
        &self,
        x: &MatrixElement,
        y: &MatrixElement,
        z: &MatrixElement,
    ) -> MatrixElement {
        self.sub(
            &self.mul(&self.mul(x, y), z),
            &self.mul(x, &self.mul(y, z)),
        )
    }

    /// The adjoint of the combined module (V+, V-): the swap of side
    /// adjoints.
    pub fn natural(&self, v_plus: &[Element], v_minus: &[Element]) -> (Vec<Element>, Vec<Element>) {
        (
            self.triple.sharp(Side::Minus, v_minus),
            self.triple.sharp(Side::Plus, v_plus),
        )
    }

    /// h(v, u) = (T(v+, u-), T(v-, u+)), valued in base + base.
    pub fn h(
        &self,
        v: (&[Element], &[Element]),
        u: (&[Element], &[Element]),
    ) -> (Element, Element) {
        (self.triple.pair(v.0, u.1), self.triple.pair(v.1, u.0))
    }
}

/// The matrix construction: package a pairing triple as its 2x2 algebra.
pub fn matrix_construction(
    triple: PairCubicTriple,
) -> Result<MatrixAlgebra, ConstructError> {
    Ok(MatrixAlgebra {
        triple: Arc::new(triple),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::laurent;

    fn rank1_zero_pair() -> MatrixAlgebra {
        let k = laurent(0);
        let zero_k = Element::zero(&k);
        let zero_table: TriTable = {
            let z = zero_k.clone();
            Arc::new(move |_, _, _| z.clone())
        };
        let triple = PairCubicTriple::new(
            k.clone(),
            vec![Element::one(&k)],
            zero_table.clone(),
            zero_table,
        )
        .unwrap();
        matrix_construction(triple).unwrap()
    }

    #[test]
    fn exchange_involution_swaps_diagonal() {
        let alg = rank1_zero_pair();
        let mut x = alg.zero();
        x.a_plus = Element::one(&alg.triple.k).scaled(&Scalar::from_int(5));
        let xs = alg.involution(&x);
        assert!(xs.a_plus.is_zero());
        assert_eq!(xs.a_minus, x.a_plus);
    }

    #[test]
    fn zero_cubic_rank1_pair_is_associative() {
        let alg = rank1_zero_pair();
        // basis of the 4-dimensional algebra
        let mut e_plus = alg.zero();
        e_plus.a_plus = Element::one(&alg.triple.k);
        let mut e_minus = alg.zero();
        e_minus.a_minus = Element::one(&alg.triple.k);
        let mut v_plus = alg.zero();
        v_plus.v_plus[0] = Element::one(&alg.triple.k);
        let mut v_minus = alg.zero();
        v_minus.v_minus[0] = Element::one(&alg.triple.k);
        let basis = [e_plus, e_minus, v_plus, v_minus];
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    assert!(alg.is_zero(&alg.associator(x, y, z)));
                }
            }
        }
    }

    #[test]
    fn adjoint_swaps_sides() {
        let alg = rank1_zero_pair();
        let v_plus = vec![Element::one(&alg.triple.k)];
        let v_minus = alg.triple.zero_coords();
        let (n_plus, n_minus) = alg.natural(&v_plus, &v_minus);
        // (v+, 0)^nat = (0, v+^#) and the zero cubic form has zero sharp
        assert!(n_plus.iter().all(Element::is_zero));
        assert!(n_minus.iter().all(Element::is_zero));
        assert!(alg.triple.adjoint_identity_holds(Side::Plus, &v_plus));
    }
}
