//! Root and coroot data for C2 (Sp4) and A3 (GL4), their Weyl groups as
//! explicit tables, evaluation of coweights on Frobenius classes, modulus
//! characters, and the identification between the positive roots
//! of the Siegel parabolic torus and the positive coroots of Sp4.
//!
//! Coweights are stored in half-units of the epsilon coordinates, so the
//! coweight with coords `(a, b)` evaluates to `u^{a/2} v^{b/2}` on
//! `diag(u, v, 1/v, 1/u)`. Each coroot is evaluated by the entry-ratio recipe:
//! the coroot attached to the root `e_i - e_j` of the diagonal torus
//! evaluates to `g_i / g_j`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AlgError, LaurentPoly, Rational, RationalFn};
use crate::satake::{FrobeniusClass, ARITY, Q};

/// Errors from root-data operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RootError {
    #[error("unknown modulus tag {0}")]
    UnknownTag(String),
    #[error("torus descriptor for {tag} needs {expected} valuations, got {got}")]
    Descriptor { tag: String, expected: usize, got: usize },
    #[error("coweight {0} is half-integral and the class is not symbolic")]
    HalfIntegral(Coweight),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Coweight of the C2 torus in half-unit epsilon coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coweight {
    pub coords: [i64; 2],
}

impl Coweight {
    /// From half-unit coordinates.
    pub const fn half_units(a: i64, b: i64) -> Self {
        Coweight { coords: [a, b] }
    }

    /// From whole-unit epsilon coordinates.
    pub const fn units(a: i64, b: i64) -> Self {
        Coweight { coords: [2 * a, 2 * b] }
    }

    pub fn add(self, o: Coweight) -> Coweight {
        Coweight { coords: [self.coords[0] + o.coords[0], self.coords[1] + o.coords[1]] }
    }

    pub fn neg(self) -> Coweight {
        Coweight { coords: [-self.coords[0], -self.coords[1]] }
    }

    pub fn scale(self, k: i64) -> Coweight {
        Coweight { coords: [k * self.coords[0], k * self.coords[1]] }
    }

    pub fn is_integral(self) -> bool {
        self.coords.iter().all(|c| c % 2 == 0)
    }

    /// Dominance in the standard chamber: `m1 >= m2 >= 0`.
    pub fn is_dominant(self) -> bool {
        self.coords[0] >= self.coords[1] && self.coords[1] >= 0
    }

    /// Positivity in the C2 ordering.
    pub fn is_positive(self) -> bool {
        self.coords[0] > 0 || (self.coords[0] == 0 && self.coords[1] > 0)
    }

    /// The monomial `e^mu` in `(u, v, q)`.
    pub fn monomial(self) -> LaurentPoly {
        LaurentPoly::from_half_units(&[self.coords[0], self.coords[1], 0], Rational::one())
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |h: i64| if h % 2 == 0 { (h / 2).to_string() } else { format!("{}/2", h) };
        write!(f, "({}, {})", show(self.coords[0]), show(self.coords[1]))
    }
}

/// Half the sum of the evaluation vectors of the four positive coroots.
pub const RHO: Coweight = Coweight::units(2, 1);

/// The coweight `alpha1^ + alpha2^`, evaluating to `uv`.
pub const LAMBDA1: Coweight = Coweight::units(1, 1);

/// Label of a positive coroot of Sp4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sp4Coroot {
    /// `alpha1^ - alpha2^`, evaluates to `u/v`.
    A1MinusA2,
    /// `alpha1^ + alpha2^`, evaluates to `uv`.
    A1PlusA2,
    /// `alpha1^`, evaluates to `u^2`.
    A1,
    /// `alpha2^`, evaluates to `v^2`.
    A2,
}

impl Sp4Coroot {
    pub const ALL: [Sp4Coroot; 4] = [Sp4Coroot::A1MinusA2, Sp4Coroot::A1PlusA2, Sp4Coroot::A1, Sp4Coroot::A2];

    /// Evaluation vector on `diag(u, v, 1/v, 1/u)` by the entry-ratio recipe.
    pub fn vector(self) -> Coweight {
        match self {
            Sp4Coroot::A1MinusA2 => Coweight::units(1, -1),
            Sp4Coroot::A1PlusA2 => Coweight::units(1, 1),
            Sp4Coroot::A1 => Coweight::units(2, 0),
            Sp4Coroot::A2 => Coweight::units(0, 2),
        }
    }

    /// Short coroots are attached to the short roots `e1 +- e2` of Sp4.
    pub fn is_short(self) -> bool {
        matches!(self, Sp4Coroot::A1MinusA2 | Sp4Coroot::A1PlusA2)
    }

    pub fn label(self) -> &'static str {
        match self {
            Sp4Coroot::A1MinusA2 => "a1v-a2v",
            Sp4Coroot::A1PlusA2 => "a1v+a2v",
            Sp4Coroot::A1 => "a1v",
            Sp4Coroot::A2 => "a2v",
        }
    }
}

/// Positive root of the torus of the Siegel parabolic of GU(2,2), written in
/// the basis `(alpha1, alpha2, alpha0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhRoot {
    A1MinusA2,
    A1PlusA2MinusA0,
    TwoA1MinusA0,
    TwoA2MinusA0,
}

impl PhRoot {
    pub const ALL: [PhRoot; 4] =
        [PhRoot::A1MinusA2, PhRoot::A1PlusA2MinusA0, PhRoot::TwoA1MinusA0, PhRoot::TwoA2MinusA0];

    /// Coordinates in the `(alpha1, alpha2, alpha0)` basis.
    pub fn coords(self) -> [i64; 3] {
        match self {
            PhRoot::A1MinusA2 => [1, -1, 0],
            PhRoot::A1PlusA2MinusA0 => [1, 1, -1],
            PhRoot::TwoA1MinusA0 => [2, 0, -1],
            PhRoot::TwoA2MinusA0 => [0, 2, -1],
        }
    }

    pub fn from_coords(c: [i64; 3]) -> Option<PhRoot> {
        PhRoot::ALL.into_iter().find(|r| r.coords() == c)
    }

    pub fn is_long(self) -> bool {
        matches!(self, PhRoot::TwoA1MinusA0 | PhRoot::TwoA2MinusA0)
    }

    pub fn label(self) -> &'static str {
        match self {
            PhRoot::A1MinusA2 => "a1-a2",
            PhRoot::A1PlusA2MinusA0 => "a1+a2-a0",
            PhRoot::TwoA1MinusA0 => "2a1-a0",
            PhRoot::TwoA2MinusA0 => "2a2-a0",
        }
    }
}

/// Identifies the positive roots of the Siegel torus with positive coroots of Sp4.
pub fn root_to_coroot(r: PhRoot) -> Sp4Coroot {
    match r {
        PhRoot::A1MinusA2 => Sp4Coroot::A2,
        PhRoot::A1PlusA2MinusA0 => Sp4Coroot::A1,
        PhRoot::TwoA1MinusA0 => Sp4Coroot::A1PlusA2,
        PhRoot::TwoA2MinusA0 => Sp4Coroot::A1MinusA2,
    }
}

/// Element of the C2 Weyl group as a signed permutation: the image of a
/// vector `x` has `x_i * signs[i]` in slot `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct C2Element {
    pub perm: [usize; 2],
    pub signs: [i64; 2],
    /// A reduced word in the generators `1 = s1`, `2 = s2`.
    pub word: Vec<u8>,
}

impl C2Element {
    pub fn identity() -> Self {
        C2Element { perm: [0, 1], signs: [1, 1], word: vec![] }
    }

    /// `s1` swaps the two coordinates.
    pub fn s1() -> Self {
        C2Element { perm: [1, 0], signs: [1, 1], word: vec![1] }
    }

    /// `s2` negates the second coordinate.
    pub fn s2() -> Self {
        C2Element { perm: [0, 1], signs: [1, -1], word: vec![2] }
    }

    pub fn apply(&self, mu: Coweight) -> Coweight {
        let mut r = [0i64; 2];
        for i in 0..2 {
            r[self.perm[i]] = self.signs[i] * mu.coords[i];
        }
        Coweight { coords: r }
    }

    /// `self * other` (apply `other` first); the word is concatenated, not reduced.
    pub fn compose(&self, other: &C2Element) -> C2Element {
        let mut perm = [0usize; 2];
        let mut signs = [0i64; 2];
        for i in 0..2 {
            perm[i] = self.perm[other.perm[i]];
            signs[i] = other.signs[i] * self.signs[other.perm[i]];
        }
        let mut word = self.word.clone();
        word.extend(&other.word);
        C2Element { perm, signs, word }
    }

    pub fn inverse(&self) -> C2Element {
        let mut perm = [0usize; 2];
        let mut signs = [0i64; 2];
        for i in 0..2 {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        let word = self.word.iter().rev().copied().collect();
        C2Element { perm, signs, word }
    }

    /// Number of positive roots sent to negative roots.
    pub fn inversions(&self) -> usize {
        Sp4Coroot::ALL.iter().filter(|r| !self.apply(r.vector()).is_positive()).count()
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn sign(&self) -> i64 {
        if self.length() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Acts on the first two exponent slots of a polynomial in `(u, v, ...)`,
    /// sending each monomial `e^mu` to `e^{w mu}`.
    pub fn act_on_poly(&self, p: &LaurentPoly) -> LaurentPoly {
        p.map_exponents(p.arity(), |e| {
            let img = self.apply(Coweight::half_units(e[0], e[1]));
            let mut out = e.to_vec();
            out[0] = img.coords[0];
            out[1] = img.coords[1];
            out
        })
    }

    fn key(&self) -> ([usize; 2], [i64; 2]) {
        (self.perm, self.signs)
    }
}

/// The eight elements of the C2 Weyl group with reduced words found by
/// breadth-first search from the identity.
pub fn c2_weyl_group() -> Vec<C2Element> {
    let gens = [C2Element::s1(), C2Element::s2()];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([C2Element::identity()]);
    seen.insert(C2Element::identity().key());
    while let Some(w) = queue.pop_front() {
        for g in &gens {
            let next = w.compose(g);
            if seen.insert(next.key()) {
                queue.push_back(next);
            }
        }
        out.push(w);
    }
    out
}

/// The longest element of C2, acting as `-1`.
pub fn c2_longest() -> C2Element {
    c2_weyl_group().into_iter().max_by_key(|w| w.length()).expect("nonempty")
}

/// Element of the A3 Weyl group: `perm[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct A3Element {
    pub perm: [usize; 4],
}

impl A3Element {
    /// Number of inversions.
    pub fn length(&self) -> usize {
        let mut n = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.perm[i] > self.perm[j] {
                    n += 1;
                }
            }
        }
        n
    }

    /// Number of positive roots `e_i - e_j` (`i < j`) sent negative.
    pub fn roots_made_negative(&self) -> usize {
        a3_positive_roots().iter().filter(|&&(i, j)| self.perm[i] > self.perm[j]).count()
    }
}

/// All 24 permutations of four letters.
pub fn a3_weyl_group() -> Vec<A3Element> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (0..4).all(|j| i == j || p[i] != p[j]));
                    if distinct {
                        out.push(A3Element { perm: p });
                    }
                }
            }
        }
    }
    out
}

/// Positive roots `e_i - e_j` of GL4 as index pairs.
pub fn a3_positive_roots() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push((i, j));
        }
    }
    out
}

/// Restriction of the GL4 root `e_i - e_j` to the torus `diag(u, v, 1/v, 1/u)`,
/// as a coweight vector in the Sp4 positive system.
pub fn gl4_to_sp4(root: (usize, usize)) -> Coweight {
    let weight = |k: usize| -> [i64; 2] {
        match k {
            0 => [1, 0],
            1 => [0, 1],
            2 => [0, -1],
            _ => [-1, 0],
        }
    };
    let (a, b) = (weight(root.0), weight(root.1));
    Coweight::units(a[0] - b[0], a[1] - b[1])
}

/// Reference table of the root data used downstream.
#[derive(Debug, Clone)]
pub struct RootTable {
    pub sp4_coroots: Vec<(Sp4Coroot, Coweight, bool)>,
    pub ph_roots: Vec<(PhRoot, bool)>,
    pub gl4_roots: Vec<((usize, usize), Coweight)>,
    pub root_to_coroot: Vec<(PhRoot, Sp4Coroot)>,
}

impl RootTable {
    pub fn build() -> Self {
        RootTable {
            sp4_coroots: Sp4Coroot::ALL.iter().map(|&c| (c, c.vector(), c.is_short())).collect(),
            ph_roots: PhRoot::ALL.iter().map(|&r| (r, r.is_long())).collect(),
            gl4_roots: a3_positive_roots().into_iter().map(|r| (r, gl4_to_sp4(r))).collect(),
            root_to_coroot: PhRoot::ALL.iter().map(|&r| (r, root_to_coroot(r))).collect(),
        }
    }
}

/// `w . mu`.
pub fn weyl_act(w: &C2Element, mu: Coweight) -> Coweight {
    w.apply(mu)
}

/// Evaluates `e^mu` on a Frobenius class. Half-integral coweights are only
/// evaluated on the symbolic class, where they stay as half-unit monomials.
pub fn eval_coweight(mu: Coweight, g: &FrobeniusClass) -> Result<RationalFn, RootError> {
    if mu.is_integral() {
        let a = g.u().pow(mu.coords[0] / 2)?;
        let b = g.v().pow(mu.coords[1] / 2)?;
        return Ok(&a * &b);
    }
    if g.is_symbolic() {
        return Ok(mu.monomial().into());
    }
    Err(RootError::HalfIntegral(mu))
}

/// The class `g'` with `e^{w mu}(g) = e^{mu}(g')` for every `mu`.
pub fn weyl_conjugate_class(w: &C2Element, g: &FrobeniusClass) -> Result<FrobeniusClass, RootError> {
    let base = [g.u().clone(), g.v().clone()];
    let mut img: Vec<RationalFn> = Vec::with_capacity(2);
    for i in 0..2 {
        img.push(base[w.perm[i]].pow(w.signs[i])?);
    }
    Ok(FrobeniusClass::from_uv(img[0].clone(), img[1].clone()))
}

/// Which modulus character to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusTag {
    /// Borel of GU(2,2); descriptor `(v(a), v(b), v(nu))` for `diag(a, b, nu/bbar, nu/abar)`.
    BG,
    /// Siegel parabolic of GSp4; descriptor `(v(det g), v(mu))`.
    PH,
    /// Borel of GSp4; descriptor `(v(a), v(b), v(nu))` for `diag(a, b, nu/b, nu/a)`.
    BGSp4,
}

impl FromStr for ModulusTag {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "B_G" | "BG" => Ok(ModulusTag::BG),
            "P_H" | "PH" => Ok(ModulusTag::PH),
            "B_GSp4" | "BGSp4" => Ok(ModulusTag::BGSp4),
            other => Err(RootError::UnknownTag(other.to_string())),
        }
    }
}

/// Modulus character at a torus element given by the valuations of its
/// entries, as a power of `q`.
pub fn modulus_eval(which: ModulusTag, valuations: &[i64]) -> Result<RationalFn, RootError> {
    let expected = if which == ModulusTag::PH { 2 } else { 3 };
    if valuations.len() != expected {
        return Err(RootError::Descriptor {
            tag: format!("{:?}", which),
            expected,
            got: valuations.len(),
        });
    }
    // |x| = q^{-v(x)} on F, and |x xbar| = q^{-2 v(x)} for x in the unramified E.
    let exponent = match which {
        ModulusTag::BG => -6 * valuations[0] - 2 * valuations[1] + 4 * valuations[2],
        ModulusTag::PH => -3 * (valuations[0] - valuations[1]),
        ModulusTag::BGSp4 => -(4 * valuations[0] + 2 * valuations[1] - 3 * valuations[2]),
    };
    let mut e = vec![0i64; ARITY];
    e[Q] = exponent;
    Ok(LaurentPoly::monomial(&e, Rational::one()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;
    use crate::satake::{konst, sym_q};

    #[test]
    fn group_orders_and_lengths() {
        let c2 = c2_weyl_group();
        assert_eq!(c2.len(), 8);
        for w in &c2 {
            assert_eq!(w.length(), w.inversions(), "word {:?}", w.word);
        }
        let a3 = a3_weyl_group();
        assert_eq!(a3.len(), 24);
        for w in &a3 {
            assert_eq!(w.length(), w.roots_made_negative());
        }
        let poincare: usize = a3.iter().map(|w| w.length()).sum();
        assert_eq!(poincare, 72);
    }

    #[test]
    fn group_axioms() {
        let c2 = c2_weyl_group();
        let id = C2Element::identity();
        for a in &c2 {
            assert_eq!(a.compose(&a.inverse()).key(), id.key());
            for b in &c2 {
                let ab = a.compose(b);
                assert!(c2.iter().any(|c| c.key() == ab.key()));
                for c in &c2 {
                    assert_eq!(ab.compose(c).key(), a.compose(&b.compose(c)).key());
                }
            }
        }
    }

    #[test]
    fn simple_reflections() {
        assert_eq!(weyl_act(&C2Element::s1(), Coweight::units(1, 0)), Coweight::units(0, 1));
        let a2 = Sp4Coroot::A2.vector();
        assert_eq!(weyl_act(&C2Element::s2(), a2), a2.neg());
        let w0 = c2_longest();
        assert_eq!(w0.length(), 4);
        assert_eq!(weyl_act(&w0, RHO), RHO.neg());
    }

    #[test]
    fn rho_is_half_sum_of_coroot_vectors() {
        let sum = Sp4Coroot::ALL.iter().fold(Coweight::units(0, 0), |a, c| a.add(c.vector()));
        assert_eq!(sum, RHO.scale(2));
        assert!(Sp4Coroot::ALL.iter().all(|c| c.vector().is_integral()));
    }

    #[test]
    fn coweight_evaluation() {
        let g = FrobeniusClass::symbolic();
        let u = crate::satake::sym_u();
        let v = crate::satake::sym_v();
        assert_eq!(eval_coweight(Sp4Coroot::A1.vector(), &g).unwrap(), &u * &u);
        assert_eq!(eval_coweight(Sp4Coroot::A1PlusA2.vector(), &g).unwrap(), &u * &v);
        assert_eq!(eval_coweight(Sp4Coroot::A1MinusA2.vector(), &g).unwrap(), u.checked_div(&v).unwrap());
        let half = Coweight::half_units(3, 1);
        assert_eq!(eval_coweight(half, &g).unwrap().numerator().coeff(&[3, 1, 0]), int(1));
        let gn = FrobeniusClass::from_uv(konst(int(4)), konst(int(9)));
        assert!(matches!(eval_coweight(half, &gn), Err(RootError::HalfIntegral(_))));
    }

    #[test]
    fn evaluation_intertwines_weyl_action() {
        let g = FrobeniusClass::from_uv(konst(int(3)), konst(crate::exactalg::rat(2, 5)));
        let mus = [Coweight::units(1, 0), Coweight::units(2, -1), RHO, Coweight::units(-3, 4)];
        for w in c2_weyl_group() {
            let gw = weyl_conjugate_class(&w, &g).unwrap();
            for &mu in &mus {
                assert_eq!(eval_coweight(w.apply(mu), &g).unwrap(), eval_coweight(mu, &gw).unwrap());
            }
        }
    }

    #[test]
    fn root_to_coroot_is_bijection_onto_listed_coroots() {
        let table = RootTable::build();
        let image: BTreeSet<Sp4Coroot> = table.root_to_coroot.iter().map(|(_, c)| *c).collect();
        assert_eq!(image.len(), 4);
        for (r, c) in &table.root_to_coroot {
            assert_eq!(r.is_long(), c.is_short(), "{:?}", r);
        }
    }

    #[test]
    fn gl4_surjection_two_to_one_on_short() {
        let mut counts = std::collections::BTreeMap::new();
        for r in a3_positive_roots() {
            let img = gl4_to_sp4(r);
            let c = Sp4Coroot::ALL.into_iter().find(|c| c.vector() == img).expect("positive Sp4 root");
            *counts.entry(c).or_insert(0) += 1;
        }
        for c in Sp4Coroot::ALL {
            assert_eq!(counts[&c], if c.is_short() { 2 } else { 1 });
        }
    }

    #[test]
    fn modulus_values() {
        let q = sym_q();
        assert_eq!(modulus_eval(ModulusTag::BG, &[0, 0, 0]).unwrap(), RationalFn::one(ARITY));
        assert_eq!(modulus_eval(ModulusTag::BG, &[1, 0, 0]).unwrap(), q.pow(-6).unwrap());
        for n in 0..5i64 {
            // diag(I, mu I) with mu = uniformizer^{-n}: det g = 1.
            let delta = modulus_eval(ModulusTag::PH, &[0, -n]).unwrap();
            assert_eq!(delta, q.pow(-3 * n).unwrap());
            // The section lies in the induction from delta^{(s+1)/3}, so
            // delta^{-1} f_s contributes q^{3n} q^{-n(s+1)} = q^{n(2-s)}.
            for s in 0..4i64 {
                let total = 3 * n - n * (s + 1);
                assert_eq!(total, n * (2 - s));
            }
        }
        assert!(matches!(modulus_eval(ModulusTag::PH, &[1]), Err(RootError::Descriptor { .. })));
        assert!("B_X".parse::<ModulusTag>().is_err());
    }
}
