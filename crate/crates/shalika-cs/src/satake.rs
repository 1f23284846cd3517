//! Unramified characters recorded by their values at the uniformizer,
//! Frobenius classes in Sp4(C), and the predicates on them: central
//! character, genericity, dihedrality and split Shalika admissibility.
//!
//! All values are [`RationalFn`]s in the three symbols `(u, v, q)`. Numeric
//! characters are constant rational functions, so symbolic and numeric inputs
//! share one code path.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{int, AlgError, LaurentPoly, Rational, RationalFn};

/// Number of symbols `(u, v, q)` used by every scalar.
pub const ARITY: usize = 3;
/// Slot of `u` (first Frobenius eigenvalue).
pub const U: usize = 0;
/// Slot of `v` (second Frobenius eigenvalue).
pub const V: usize = 1;
/// Slot of `q` (residue field size).
pub const Q: usize = 2;

/// The symbol `u`.
pub fn sym_u() -> RationalFn {
    RationalFn::var(ARITY, U)
}

/// The symbol `v`.
pub fn sym_v() -> RationalFn {
    RationalFn::var(ARITY, V)
}

/// The symbol `q`.
pub fn sym_q() -> RationalFn {
    RationalFn::var(ARITY, Q)
}

/// A rational constant in the `(u, v, q)` ring.
pub fn konst(c: Rational) -> RationalFn {
    RationalFn::constant(ARITY, c)
}

/// `u^a v^b q^c` with whole-unit exponents.
pub fn mono(a: i64, b: i64, c: i64) -> LaurentPoly {
    LaurentPoly::monomial(&[a, b, c], Rational::one())
}

/// Errors raised when a character violates a structural constraint.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SatakeError {
    #[error("{group} character violates its central constraint: {product} = {value}, expected 1")]
    CentralConstraint { group: Group, product: String, value: String },
    #[error("expected a {expected} character, got {got}")]
    WrongGroup { expected: Group, got: Group },
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("exponent {0} is not a half-integer")]
    NotHalfIntegral(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// The group whose maximal torus carries the character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    GSp4,
    GU22,
    GSO42,
    GL4,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Group::GSp4 => "GSp4",
            Group::GU22 => "GU22",
            Group::GSO42 => "GSO42",
            Group::GL4 => "GL4",
        };
        write!(f, "{}", s)
    }
}

/// Whether the quadratic algebra `E` is split or an unramified field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Split,
    Inert,
}

impl Case {
    /// The value of the quadratic character of `E/F` at the uniformizer.
    pub fn chi_ef(self) -> i64 {
        match self {
            Case::Split => 1,
            Case::Inert => -1,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Case::Split { "split" } else { "inert" })
    }
}

/// An unramified torus character given by its values at the uniformizer.
///
/// GSp4: `(x1, x2, x0)`; GU22 and GSO42: `(y1, y2, y0)`; GL4: `(a1, .., a4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTriple {
    pub group: Group,
    pub values: Vec<RationalFn>,
}

impl CharacterTriple {
    pub fn new(group: Group, values: Vec<RationalFn>) -> Result<Self, SatakeError> {
        let expected = if group == Group::GL4 { 4 } else { 3 };
        if values.len() != expected {
            return Err(SatakeError::WrongLength { expected, got: values.len() });
        }
        Ok(CharacterTriple { group, values })
    }

    /// A GSp4 character from rational values.
    pub fn gsp4(x1: Rational, x2: Rational, x0: Rational) -> Self {
        CharacterTriple { group: Group::GSp4, values: vec![konst(x1), konst(x2), konst(x0)] }
    }

    /// The GSp4 character with Frobenius class `diag(u, v, 1/v, 1/u)`:
    /// `(x1, x2, x0) = (uv, u/v, 1/u)`.
    pub fn gsp4_from_uv(u: RationalFn, v: RationalFn) -> Self {
        let x1 = &u * &v;
        let x2 = u.checked_div(&v).expect("v must be nonzero");
        let x0 = u.recip().expect("u must be nonzero");
        CharacterTriple { group: Group::GSp4, values: vec![x1, x2, x0] }
    }

    /// The fully symbolic GSp4 character `(uv, u/v, 1/u)`.
    pub fn gsp4_symbolic() -> Self {
        Self::gsp4_from_uv(sym_u(), sym_v())
    }

    /// The trivial character of `group`.
    pub fn trivial(group: Group) -> Self {
        let n = if group == Group::GL4 { 4 } else { 3 };
        CharacterTriple { group, values: vec![RationalFn::one(ARITY); n] }
    }

    pub fn value(&self, i: usize) -> &RationalFn {
        &self.values[i]
    }

    pub fn expect_group(&self, g: Group) -> Result<(), SatakeError> {
        if self.group != g {
            Err(SatakeError::WrongGroup { expected: g, got: self.group })
        } else {
            Ok(())
        }
    }

    /// Checks the central-character constraint of the group.
    pub fn check_central(&self) -> Result<(), SatakeError> {
        let v = &self.values;
        let (prod, label) = match self.group {
            Group::GSp4 => (&(&v[0] * &v[1]) * &(&v[2] * &v[2]), "x1*x2*x0^2"),
            Group::GU22 => (&(&v[0] * &v[1]) * &(&v[2] * &v[2]), "y1*y2*y0^2"),
            Group::GL4 => (&(&v[0] * &v[1]) * &(&v[2] * &v[3]), "a1*a2*a3*a4"),
            Group::GSO42 => return Ok(()),
        };
        if prod == RationalFn::one(ARITY) {
            Ok(())
        } else {
            Err(SatakeError::CentralConstraint {
                group: self.group,
                product: label.to_string(),
                value: prod.to_string(),
            })
        }
    }

    /// True when every value is a rational constant.
    pub fn is_numeric(&self) -> bool {
        self.values.iter().all(|x| x.as_constant().is_some())
    }

    /// Swaps `x1` and `x2` (the simple Weyl reflection exchanging them).
    pub fn swap12(&self) -> Self {
        let mut out = self.clone();
        out.values.swap(0, 1);
        out
    }
}

/// The value `q^{-z}` of the character `|.|^z` at the uniformizer.
pub fn value_from_exponent(z: &Rational) -> Result<RationalFn, SatakeError> {
    let doubled = z * int(2);
    if !doubled.is_integer() {
        return Err(SatakeError::NotHalfIntegral(z.to_string()));
    }
    let h: i64 = doubled.to_integer().try_into().map_err(|_| SatakeError::NotHalfIntegral(z.to_string()))?;
    Ok(LaurentPoly::from_half_units(&[0, 0, -h], Rational::one()).into())
}

/// Diagonal Satake representative `diag(u, v, 1/v, 1/u)` in Sp4(C).
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusClass {
    pub entries: [RationalFn; 4],
}

impl FrobeniusClass {
    /// The class `diag(u, v, 1/v, 1/u)` for given `u`, `v`.
    pub fn from_uv(u: RationalFn, v: RationalFn) -> Self {
        let ui = u.recip().expect("u must be nonzero");
        let vi = v.recip().expect("v must be nonzero");
        FrobeniusClass { entries: [u, v, vi, ui] }
    }

    /// The fully symbolic class.
    pub fn symbolic() -> Self {
        Self::from_uv(sym_u(), sym_v())
    }

    pub fn u(&self) -> &RationalFn {
        &self.entries[0]
    }

    pub fn v(&self) -> &RationalFn {
        &self.entries[1]
    }

    /// True when `u`, `v` are exactly the symbols `u`, `v`.
    pub fn is_symbolic(&self) -> bool {
        self.entries[0] == sym_u() && self.entries[1] == sym_v()
    }
}

/// Frobenius class `diag(x1x2x0, x1x0, x2x0, x0)` of a GSp4 character.
pub fn frobenius(chi: &CharacterTriple) -> Result<FrobeniusClass, SatakeError> {
    chi.expect_group(Group::GSp4)?;
    chi.check_central()?;
    let (x1, x2, x0) = (&chi.values[0], &chi.values[1], &chi.values[2]);
    let e1 = &(x1 * x2) * x0;
    let e2 = x1 * x0;
    let e3 = x2 * x0;
    let e4 = x0.clone();
    let one = RationalFn::one(ARITY);
    debug_assert!(&e1 * &e4 == one && &e2 * &e3 == one);
    Ok(FrobeniusClass { entries: [e1, e2, e3, e4] })
}

/// Nondegeneracy: none of `x1, x2, x1x2, x1/x2` equals `q` or `1/q`.
pub fn is_generic_regular(chi: &CharacterTriple, q: &RationalFn) -> bool {
    let (x1, x2) = (&chi.values[0], &chi.values[1]);
    let Ok(qi) = q.recip() else { return false };
    let Ok(ratio) = x1.checked_div(x2) else { return false };
    let tests = [x1.clone(), x2.clone(), x1 * x2, ratio];
    !tests.iter().any(|t| *t == *q || *t == qi)
}

/// Dihedral test for the inert case: `x1 = -1` or `x2 = -1`.
pub fn is_dihedral(chi: &CharacterTriple) -> bool {
    let m1 = konst(int(-1));
    chi.values[0] == m1 || chi.values[1] == m1
}

/// True when the GL4 tuple splits into two inverse pairs with all entries distinct.
pub fn split_shalika_admissible(chi: &CharacterTriple) -> Result<bool, SatakeError> {
    chi.expect_group(Group::GL4)?;
    chi.check_central()?;
    let a = &chi.values;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if a[i] == a[j] {
                return Ok(false);
            }
        }
    }
    let one = RationalFn::one(ARITY);
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    Ok(pairings
        .iter()
        .any(|&((i, j), (k, l))| &a[i] * &a[j] == one && &a[k] * &a[l] == one))
}

/// The GL4 tuple `(u, v, 1/v, 1/u)` attached to a Frobenius class.
pub fn gl4_tuple(g: &FrobeniusClass) -> CharacterTriple {
    CharacterTriple { group: Group::GL4, values: g.entries.to_vec() }
}

/// True when a rational function is the constant zero.
pub fn is_zero_value(x: &RationalFn) -> bool {
    x.as_constant().map(|c| c.is_zero()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use proptest::prelude::*;

    #[test]
    fn trivial_frobenius() {
        let g = frobenius(&CharacterTriple::gsp4(int(1), int(1), int(1))).unwrap();
        for e in &g.entries {
            assert_eq!(*e, RationalFn::one(ARITY));
        }
    }

    #[test]
    fn symbolic_frobenius_is_uv() {
        let g = frobenius(&CharacterTriple::gsp4_symbolic()).unwrap();
        assert_eq!(g, FrobeniusClass::symbolic());
    }

    #[test]
    fn numeric_frobenius() {
        let chi = CharacterTriple::gsp4(int(4), rat(1, 9), rat(3, 2));
        let g = frobenius(&chi).unwrap();
        let want = [rat(2, 3), int(6), rat(1, 6), rat(3, 2)];
        for (e, w) in g.entries.iter().zip(want) {
            assert_eq!(e.as_constant().unwrap(), w);
        }
    }

    #[test]
    fn constraint_violation_names_product() {
        let chi = CharacterTriple::gsp4(int(2), int(1), int(1));
        match frobenius(&chi) {
            Err(SatakeError::CentralConstraint { product, .. }) => assert_eq!(product, "x1*x2*x0^2"),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn genericity() {
        let q = sym_q();
        let bad = CharacterTriple { group: Group::GSp4, values: vec![q.clone(), konst(int(2)), konst(int(1))] };
        assert!(!is_generic_regular(&bad, &q));
        assert!(is_generic_regular(&CharacterTriple::gsp4_symbolic(), &q));
        // x1/x2 = 1/q
        let x2 = &sym_u() * &q;
        let bad2 = CharacterTriple { group: Group::GSp4, values: vec![sym_u(), x2, konst(int(1))] };
        assert!(!is_generic_regular(&bad2, &q));
    }

    #[test]
    fn dihedral() {
        let m1 = konst(int(-1));
        let c = CharacterTriple { group: Group::GSp4, values: vec![sym_u(), m1.clone(), konst(int(1))] };
        assert!(is_dihedral(&c));
        assert!(!is_dihedral(&CharacterTriple::gsp4(int(1), int(1), int(1))));
        let c2 = CharacterTriple { group: Group::GSp4, values: vec![m1, sym_u(), konst(int(1))] };
        assert!(is_dihedral(&c2));
        assert_eq!(is_dihedral(&c2.swap12()), is_dihedral(&c2));
    }

    fn gl4(a: [Rational; 4]) -> CharacterTriple {
        CharacterTriple { group: Group::GL4, values: a.into_iter().map(konst).collect() }
    }

    #[test]
    fn shalika_admissibility() {
        assert!(split_shalika_admissible(&gl4([int(2), int(3), rat(1, 3), rat(1, 2)])).unwrap());
        assert!(!split_shalika_admissible(&gl4([int(2), int(3), int(5), rat(1, 30)])).unwrap());
        assert!(!split_shalika_admissible(&gl4([int(2), int(2), rat(1, 2), rat(1, 2)])).unwrap());
    }

    #[test]
    fn admissibility_is_permutation_invariant() {
        let base = [int(2), int(3), rat(1, 3), rat(1, 2)];
        let bad = [int(2), int(3), int(5), rat(1, 30)];
        for perm in crate::rootdata::a3_weyl_group() {
            let p = |a: &[Rational; 4]| {
                let mut out = a.clone();
                for i in 0..4 {
                    out[perm.perm[i]] = a[i].clone();
                }
                out
            };
            assert!(split_shalika_admissible(&gl4(p(&base))).unwrap());
            assert!(!split_shalika_admissible(&gl4(p(&bad))).unwrap());
        }
    }

    #[test]
    fn exponent_constructor() {
        let x = value_from_exponent(&rat(1, 2)).unwrap();
        assert_eq!(x.numerator().coeff(&[0, 0, -1]), int(1));
        assert!(value_from_exponent(&rat(1, 3)).is_err());
    }

    proptest! {
        #[test]
        fn frobenius_entries_pair_to_one(a in 1i64..20, b in 1i64..20, c in 1i64..20, d in 1i64..20) {
            // Choose x1, x0 freely and solve x2 = 1 / (x1 x0^2).
            let x1 = rat(a, b);
            let x0 = rat(c, d);
            let x2 = (x1.clone() * x0.clone() * x0.clone()).recip();
            let g = frobenius(&CharacterTriple::gsp4(x1, x2, x0)).unwrap();
            let one = RationalFn::one(ARITY);
            prop_assert_eq!(&g.entries[0] * &g.entries[3], one.clone());
            prop_assert_eq!(&g.entries[1] * &g.entries[2], one);
        }
    }
}
