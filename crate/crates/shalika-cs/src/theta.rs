//! Character-level theta transfer from GSp4 to GU(2,2), the pullback of
//! characters along the exceptional isomorphism, the Mackey orbit table for
//! the Shalika subgroup acting on the flag variety, and the Shalika
//! existence and uniqueness verdict.
//!
//! All functional identities quantified over `a, d` in `F^x` are decided on
//! uniformizer values, since the characters involved are unramified.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{int, Rational, RationalFn};
use crate::satake::{is_generic_regular, konst, CharacterTriple, Group, SatakeError, ARITY};

/// Errors raised by the theta module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ThetaError {
    #[error("nondegeneracy condition fails for {0}")]
    NotGeneric(String),
    #[error("value {0} has no rational square root")]
    NoSquareRoot(String),
    #[error("inverse transformation needs positive rational values")]
    NotPositiveRational,
    #[error(transparent)]
    Satake(#[from] SatakeError),
}

/// Which branch of the transfer proposition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "irreducible-restriction")]
    IrreducibleRestriction,
    #[serde(rename = "dihedral-2a")]
    Dihedral2a,
    #[serde(rename = "case-2b")]
    Case2b,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::IrreducibleRestriction => "irreducible-restriction",
            CaseTag::Dihedral2a => "dihedral-2a",
            CaseTag::Case2b => "case-2b",
        }
    }
}

/// How the Shalika functional is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Via {
    #[serde(rename = "mackey-open-orbit")]
    MackeyOpenOrbit,
    #[serde(rename = "theta-dihedral")]
    ThetaDihedral,
}

/// Verdict on existence and uniqueness of the Shalika functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShalikaReport {
    pub exists: bool,
    pub unique: bool,
    pub via: Via,
    pub case_tag: CaseTag,
    pub cond1: bool,
    pub cond2: bool,
    /// The source GSp4 character rendered as strings.
    pub theta_source: Vec<String>,
}

/// Stabilizer of an orbit of the Shalika subgroup on the flag variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stabilizer {
    /// `B_GL2 * N_G`.
    BorelFullUnipotent,
    /// `B_GL2` times unipotents `u(alpha, x, 0)`.
    BorelUnipotentS2,
    /// `B_GL2` times unipotents `u(0, x, 0)`.
    BorelUnipotentS2S1,
    /// `B_GL2`.
    Borel,
    /// `T_delta * N_G`.
    TorusFullUnipotent,
    /// `T_delta` times unipotents `u(alpha, x, delta alpha + dbar abar - delta dbar x)`.
    TorusUnipotentS2,
    /// `T_delta` times unipotents `u(dbar x, x, delta dbar x)`.
    TorusUnipotentS2S1,
    /// `T_delta`.
    Torus,
}

impl Stabilizer {
    pub fn tag(self) -> &'static str {
        match self {
            Stabilizer::BorelFullUnipotent => "B_GL2.N_G",
            Stabilizer::BorelUnipotentS2 => "B_GL2.N[s2]",
            Stabilizer::BorelUnipotentS2S1 => "B_GL2.N[s2s1]",
            Stabilizer::Borel => "B_GL2",
            Stabilizer::TorusFullUnipotent => "T_delta.N_G",
            Stabilizer::TorusUnipotentS2 => "T_delta.N[w_delta s2]",
            Stabilizer::TorusUnipotentS2S1 => "T_delta.N[w_delta s2s1]",
            Stabilizer::Torus => "T_delta",
        }
    }
}

/// One orbit representative `w * w~` with `w` in `{id, w_delta}` and `w~` a
/// Kostant representative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitEntry {
    pub index: usize,
    pub with_w_delta: bool,
    /// Kostant representative as a word in `1 = s1`, `2 = s2`.
    pub kostant: Vec<u8>,
    pub open: bool,
    pub stabilizer: Stabilizer,
}

impl OrbitEntry {
    pub fn name(&self) -> String {
        let mut s = String::new();
        if self.with_w_delta {
            s.push_str("w_delta");
        }
        for g in &self.kostant {
            s.push_str(if *g == 1 { "s1" } else { "s2" });
        }
        if s.is_empty() {
            s.push_str("id");
        }
        s
    }
}

/// The eight orbits, closed ones first and the open orbit last.
pub fn orbit_table() -> Vec<OrbitEntry> {
    let kostant: [Vec<u8>; 4] = [vec![], vec![2], vec![2, 1], vec![2, 1, 2]];
    let stabs = [
        Stabilizer::BorelFullUnipotent,
        Stabilizer::BorelUnipotentS2,
        Stabilizer::BorelUnipotentS2S1,
        Stabilizer::Borel,
        Stabilizer::TorusFullUnipotent,
        Stabilizer::TorusUnipotentS2,
        Stabilizer::TorusUnipotentS2S1,
        Stabilizer::Torus,
    ];
    let mut out = Vec::with_capacity(8);
    for (i, stab) in stabs.into_iter().enumerate() {
        out.push(OrbitEntry {
            index: i + 1,
            with_w_delta: i >= 4,
            kostant: kostant[i % 4].clone(),
            open: i == 7,
            stabilizer: stab,
        });
    }
    out
}

/// Pulls a GSO(4,2) character back to GU(2,2) along the exceptional
/// isomorphism, at uniformizer values with `N(uniformizer) = uniformizer^2`.
pub fn changechar_pullback(xi_p: &CharacterTriple) -> Result<CharacterTriple, ThetaError> {
    xi_p.expect_group(Group::GSO42)?;
    let (a, b, c) = (&xi_p.values[0], &xi_p.values[1], &xi_p.values[2]);
    let a2 = a * a;
    let b2 = b * b;
    let y1 = &(&a2 * &b2) * c;
    let y2 = &a2 * c;
    let y0 = b * c;
    Ok(CharacterTriple::new(Group::GU22, vec![y1, y2, y0])?)
}

fn rational_sqrt(x: &Rational) -> Result<Rational, ThetaError> {
    if x.is_negative() {
        return Err(ThetaError::NoSquareRoot(x.to_string()));
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Ok(Rational::new(n, d))
    } else {
        Err(ThetaError::NoSquareRoot(x.to_string()))
    }
}

/// Inverse of [`changechar_pullback`] on triples of positive rationals,
/// choosing the positive square roots.
pub fn changechar_inverse(xi: &CharacterTriple) -> Result<CharacterTriple, ThetaError> {
    xi.expect_group(Group::GU22)?;
    let vals: Vec<Rational> = xi
        .values
        .iter()
        .map(|v| v.as_constant().filter(|c| c.is_positive()).ok_or(ThetaError::NotPositiveRational))
        .collect::<Result<_, _>>()?;
    let (y1, y2, y0) = (&vals[0], &vals[1], &vals[2]);
    let b = rational_sqrt(&(y1 / y2))?;
    let c = y0 / &b;
    let a = rational_sqrt(&(y2 / &c))?;
    Ok(CharacterTriple::new(Group::GSO42, vec![konst(a), konst(b), konst(c)])?)
}

/// `(y1, y2, y0) = (x0^2, x2^2 x0^2, -x1)`.
fn transfer_values(chi: &CharacterTriple) -> CharacterTriple {
    let (x1, x2, x0) = (&chi.values[0], &chi.values[1], &chi.values[2]);
    let x0sq = x0 * x0;
    let y1 = x0sq.clone();
    let y2 = &(x2 * x2) * &x0sq;
    let y0 = -x1;
    CharacterTriple { group: Group::GU22, values: vec![y1, y2, y0] }
}

/// Theta transfer of an unramified generic GSp4 character with trivial
/// central character, with the branch of the transfer proposition.
///
/// When `x1 = -1` and `x2 != +-1` the character is first replaced by its
/// Weyl translate swapping `x1` and `x2`, so the dihedral slot is `x2`.
pub fn theta_transfer(chi: &CharacterTriple, q: &RationalFn) -> Result<(CharacterTriple, CaseTag), ThetaError> {
    chi.expect_group(Group::GSp4)?;
    chi.check_central()?;
    if !is_generic_regular(chi, q) {
        return Err(ThetaError::NotGeneric(format!(
            "(x1, x2, x0) = ({}, {}, {})",
            chi.values[0], chi.values[1], chi.values[2]
        )));
    }
    let tag = case_tag(chi);
    let m1 = konst(int(-1));
    if tag == CaseTag::Dihedral2a && chi.values[1] != m1 {
        return Ok((transfer_values(&chi.swap12()), tag));
    }
    Ok((transfer_values(chi), tag))
}

/// Branch of the transfer proposition decided from `(x1, x2)`: `x2 = -1` is
/// case 2a, `x1 = -1, x2 = 1` is case 2b, `x1 = -1` otherwise is case 2a
/// after swapping, and everything else has irreducible restriction.
pub fn case_tag(chi: &CharacterTriple) -> CaseTag {
    let m1 = konst(int(-1));
    let one = RationalFn::one(ARITY);
    let (x1, x2) = (&chi.values[0], &chi.values[1]);
    if *x2 == m1 {
        CaseTag::Dihedral2a
    } else if *x1 == m1 && *x2 == one {
        CaseTag::Case2b
    } else if *x1 == m1 {
        CaseTag::Dihedral2a
    } else {
        CaseTag::IrreducibleRestriction
    }
}

/// The two boundary conditions at uniformizer values:
/// `cond1: y1 y0 = 1/y2 and y0 = 1`, `cond2: y1 y0 = 1 and y0 = 1/y2`.
pub fn mackey_conditions(xi: &CharacterTriple) -> (bool, bool) {
    let (y1, y2, y0) = (&xi.values[0], &xi.values[1], &xi.values[2]);
    let one = RationalFn::one(ARITY);
    let y2inv = match y2.recip() {
        Ok(r) => r,
        Err(_) => return (false, false),
    };
    let y1y0 = y1 * y0;
    let cond1 = y1y0 == y2inv && *y0 == one;
    let cond2 = y1y0 == one && *y0 == y2inv;
    (cond1, cond2)
}

/// Closed orbits whose contribution to the Mackey sequence is nonzero.
pub fn closed_orbit_contributions(xi: &CharacterTriple) -> BTreeSet<usize> {
    let (y1, y2, y0) = (&xi.values[0], &xi.values[1], &xi.values[2]);
    let one = RationalFn::one(ARITY);
    let mut out = BTreeSet::new();
    if &(y1 * y2) * y0 == one && *y0 == one {
        out.insert(3);
    }
    if y1 * y0 == one && y2 * y0 == one {
        out.insert(4);
    }
    out
}

/// Existence and uniqueness verdict for a generic GSp4 character.
pub fn shalika_verdict(chi: &CharacterTriple, q: &RationalFn) -> Result<ShalikaReport, ThetaError> {
    let (xi, case_tag) = theta_transfer(chi, q)?;
    let (cond1, cond2) = mackey_conditions(&xi);
    let via = if cond1 || cond2 { Via::ThetaDihedral } else { Via::MackeyOpenOrbit };
    Ok(ShalikaReport {
        exists: true,
        unique: true,
        via,
        case_tag,
        cond1,
        cond2,
        theta_source: chi.values.iter().map(|v| v.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::satake::{sym_q, sym_u, sym_v};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gso(a: Rational, b: Rational, c: Rational) -> CharacterTriple {
        CharacterTriple::new(Group::GSO42, vec![konst(a), konst(b), konst(c)]).unwrap()
    }

    #[test]
    fn changechar_trivial_and_symbolic() {
        let t = changechar_pullback(&CharacterTriple::trivial(Group::GSO42)).unwrap();
        assert_eq!(t, CharacterTriple::trivial(Group::GU22));
        let s = CharacterTriple::new(Group::GSO42, vec![sym_u(), sym_v(), sym_q()]).unwrap();
        let out = changechar_pullback(&s).unwrap();
        let (u, v, q) = (sym_u(), sym_v(), sym_q());
        assert_eq!(out.values[0], &(&(&u * &u) * &(&v * &v)) * &q);
        assert_eq!(out.values[1], &(&u * &u) * &q);
        assert_eq!(out.values[2], &v * &q);
    }

    #[test]
    fn changechar_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut r = || rat(rng.gen_range(1..30), rng.gen_range(1..30));
            let t = gso(r(), r(), r());
            let back = changechar_inverse(&changechar_pullback(&t).unwrap()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn transfer_cases() {
        let q = sym_q();
        let (xi, tag) = theta_transfer(&CharacterTriple::gsp4_symbolic(), &q).unwrap();
        assert_eq!(tag, CaseTag::IrreducibleRestriction);
        let (u, v) = (sym_u(), sym_v());
        assert_eq!(xi.values[0], u.pow(-2).unwrap());
        assert_eq!(xi.values[1], v.pow(-2).unwrap());
        assert_eq!(xi.values[2], -&(&u * &v));

        // x2 = -1, x1 = 4, x0^2 = 1/4 * (-1)^{-1} has no rational root, so use
        // x1 = -4, x0 = 1/2: x1 x2 x0^2 = 1.
        let chi = CharacterTriple::gsp4(int(-4), int(-1), rat(1, 2));
        let (xi, tag) = theta_transfer(&chi, &konst(int(3))).unwrap();
        assert_eq!(tag, CaseTag::Dihedral2a);
        assert_eq!(xi.values[0], xi.values[1]);

        // Case 2b needs x0^2 = -1, which has no rational model, so the
        // classifier and the transfer values are checked separately.
        let chi2 = CharacterTriple { group: Group::GSp4, values: vec![konst(int(-1)), konst(int(1)), sym_u()] };
        assert_eq!(case_tag(&chi2), CaseTag::Case2b);
        assert_eq!(transfer_values(&chi2).values[2], RationalFn::one(ARITY));
    }

    #[test]
    fn transfer_swaps_x1_dihedral() {
        let chi = CharacterTriple::gsp4(int(-1), int(-4), rat(1, 2));
        let (xi, tag) = theta_transfer(&chi, &konst(int(3))).unwrap();
        assert_eq!(tag, CaseTag::Dihedral2a);
        assert_eq!(xi.values[2], konst(int(4)));
    }

    #[test]
    fn transfer_rejects_nongeneric() {
        let chi = CharacterTriple::gsp4(int(3), rat(1, 12), int(2));
        assert!(matches!(theta_transfer(&chi, &konst(int(3))), Err(ThetaError::NotGeneric(_))));
    }

    #[test]
    fn mackey_examples() {
        assert_eq!(mackey_conditions(&CharacterTriple::trivial(Group::GU22)), (true, true));
        let (xi, _) = theta_transfer(&CharacterTriple::gsp4_symbolic(), &sym_q()).unwrap();
        assert_eq!(mackey_conditions(&xi), (false, false));
        assert!(closed_orbit_contributions(&xi).is_empty());
        let triv = closed_orbit_contributions(&CharacterTriple::trivial(Group::GU22));
        assert_eq!(triv, BTreeSet::from([3, 4]));
        let x = CharacterTriple::new(Group::GU22, vec![konst(int(5)), konst(rat(1, 5)), konst(int(1))]).unwrap();
        assert_eq!(closed_orbit_contributions(&x), BTreeSet::from([3]));
    }

    #[test]
    fn dihedral_transfer_condition_pattern() {
        // chi = (x1, -1, x0) with x0^2 = -1/x1: pick x1 = -m^2 so x0 = 1/m.
        for m in 2..8i64 {
            let x1 = int(-m * m);
            let chi = CharacterTriple::gsp4(x1, int(-1), rat(1, m));
            let (xi, _) = theta_transfer(&chi, &konst(int(3))).unwrap();
            assert_eq!(mackey_conditions(&xi), (false, true));
        }
    }

    #[test]
    fn orbit_table_shape() {
        let t = orbit_table();
        assert_eq!(t.len(), 8);
        assert_eq!(t.iter().filter(|o| o.open).count(), 1);
        let open = t.iter().find(|o| o.open).unwrap();
        assert_eq!(open.name(), "w_deltas2s1s2");
        assert_eq!(open.stabilizer, Stabilizer::Torus);
    }

    #[test]
    fn verdicts() {
        let r = shalika_verdict(&CharacterTriple::gsp4_symbolic(), &sym_q()).unwrap();
        assert!(r.exists && r.unique);
        assert_eq!(r.via, Via::MackeyOpenOrbit);
        let chi = CharacterTriple::gsp4(int(-4), int(-1), rat(1, 2));
        let r = shalika_verdict(&chi, &konst(int(5))).unwrap();
        assert_eq!(r.via, Via::ThetaDihedral);
        let bad = CharacterTriple::gsp4(int(5), rat(1, 20), int(2));
        assert!(shalika_verdict(&bad, &konst(int(5))).is_err());
    }
}
