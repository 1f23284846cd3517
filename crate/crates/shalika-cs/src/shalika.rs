//! Casselman-Shalika evaluators: the constants `c_alpha`, the two step
//! factors, the recursion over the Weyl group of GU(2,2), the closed
//! alternator formulas for the split and inert cases, and their
//! normalization constants.
//!
//! Every formula is assembled symbolically in `(u, v, q)`. A numeric context
//! evaluates numerator and denominator separately at its point and refuses
//! a vanishing denominator instead of guessing a limit.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{int, AlgError, LaurentPoly, Rational, RationalFn};
use crate::rootdata::{
    a3_positive_roots, a3_weyl_group, c2_weyl_group, root_to_coroot, gl4_to_sp4, modulus_eval, ModulusTag, PhRoot, RootError,
    Sp4Coroot, LAMBDA1, RHO,
};
use crate::satake::{
    frobenius, gl4_tuple, konst, mono, split_shalika_admissible, sym_q, Case, CharacterTriple, FrobeniusClass,
    SatakeError, ARITY,
};
use crate::theta::{theta_transfer, ThetaError};
use crate::weylchar::{alternate, alternator};

/// Errors from the Casselman-Shalika evaluators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ShalikaError {
    #[error("operation needs the {expected} case, context is {got}")]
    WrongCase { expected: Case, got: Case },
    #[error("Weyl denominator vanishes at this point; use symbolic mode")]
    WeylDenominatorVanishes,
    #[error("pole: {0}")]
    Pole(String),
    #[error("GL4 tuple {0} does not split into two inverse pairs of distinct entries")]
    NotAdmissible(String),
    #[error("character values must be rational for a numeric context")]
    NotNumeric,
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Satake(#[from] SatakeError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Simple reflection of the relative Weyl group of GU(2,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    S1,
    S2,
}

/// A step factor of the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFactor {
    pub generator: Generator,
    pub value: RationalFn,
}

/// Evaluation context: case, GSp4 character, its transfer (inert case),
/// Frobenius class and `q`. A numeric context also carries the point
/// `(u, v, q)` at which symbolic formulas are specialized.
#[derive(Debug, Clone)]
pub struct CSContext {
    pub case: Case,
    pub chi: CharacterTriple,
    pub xi: Option<CharacterTriple>,
    pub g: FrobeniusClass,
    pub q: RationalFn,
    pub point: Option<[Rational; 3]>,
    /// Flips the sign of the `alpha1^ - alpha2^` factor in the short-root
    /// product of both closed forms (fault injection for the identity check).
    pub mutate: bool,
}

impl CSContext {
    /// `u`, `v`, `q` all free.
    pub fn symbolic(case: Case) -> Result<Self, ShalikaError> {
        Self::build(case, CharacterTriple::gsp4_symbolic(), sym_q(), None)
    }

    /// Numeric context with Frobenius class `diag(u, v, 1/v, 1/u)`.
    pub fn from_uv(case: Case, u: Rational, v: Rational, q: Rational) -> Result<Self, ShalikaError> {
        if u.is_zero() || v.is_zero() || q.is_zero() {
            return Err(ShalikaError::Pole("u, v and q must be nonzero".into()));
        }
        let chi = CharacterTriple::gsp4_from_uv(konst(u.clone()), konst(v.clone()));
        Self::build(case, chi, konst(q.clone()), Some([u, v, q]))
    }

    /// Numeric context from rational GSp4 values `(x1, x2, x0)`.
    pub fn from_chi(case: Case, chi: &CharacterTriple, q: Rational) -> Result<Self, ShalikaError> {
        let g = frobenius(chi)?;
        let u = g.u().as_constant().ok_or(ShalikaError::NotNumeric)?;
        let v = g.v().as_constant().ok_or(ShalikaError::NotNumeric)?;
        Self::build(case, chi.clone(), konst(q.clone()), Some([u, v, q]))
    }

    fn build(case: Case, chi: CharacterTriple, q: RationalFn, point: Option<[Rational; 3]>) -> Result<Self, ShalikaError> {
        let g = frobenius(&chi)?;
        let xi = match case {
            Case::Inert => Some(theta_transfer(&chi, &q)?.0),
            Case::Split => {
                if let Some(p) = &point {
                    if alternator(RHO).eval(p)?.is_zero() {
                        return Err(ShalikaError::WeylDenominatorVanishes);
                    }
                }
                let tuple = gl4_tuple(&g);
                if !split_shalika_admissible(&tuple)? {
                    let shown: Vec<String> = tuple.values.iter().map(|x| x.to_string()).collect();
                    return Err(ShalikaError::NotAdmissible(format!("({})", shown.join(", "))));
                }
                None
            }
        };
        Ok(CSContext { case, chi, xi, g, q, point, mutate: false })
    }

    /// The same context with the fault injected.
    pub fn mutated(mut self) -> Self {
        self.mutate = true;
        self
    }

    pub fn is_numeric(&self) -> bool {
        self.point.is_some()
    }

    fn expect_case(&self, case: Case) -> Result<(), ShalikaError> {
        if self.case != case {
            return Err(ShalikaError::WrongCase { expected: case, got: self.case });
        }
        Ok(())
    }

    fn xi(&self) -> &CharacterTriple {
        self.xi.as_ref().expect("inert context carries its transfer")
    }

    /// `num / den`, evaluated at the point in numeric mode.
    fn finish(&self, num: LaurentPoly, den: LaurentPoly) -> Result<RationalFn, ShalikaError> {
        match &self.point {
            None => Ok(RationalFn::new(num, den)?),
            Some(p) => {
                let d = den.eval(p)?;
                if d.is_zero() {
                    return Err(ShalikaError::WeylDenominatorVanishes);
                }
                Ok(konst(num.eval(p)? / d))
            }
        }
    }

    /// A symbolic rational function, evaluated at the point in numeric mode.
    fn finish_fn(&self, f: RationalFn, what: &str) -> Result<RationalFn, ShalikaError> {
        match &self.point {
            None => Ok(f),
            Some(p) => match f.eval(p) {
                Ok(x) => Ok(konst(x)),
                Err(AlgError::ZeroDenominator) => Err(ShalikaError::Pole(what.to_string())),
                Err(e) => Err(e.into()),
            },
        }
    }
}

/// A relative root of GU(2,2) in the basis `(alpha1, alpha2, alpha0)`;
/// negatives of positive roots are allowed.
pub type RootCoords = [i64; 3];

fn neg_root(r: RootCoords) -> RootCoords {
    [-r[0], -r[1], -r[2]]
}

fn is_positive_root(r: RootCoords) -> bool {
    PhRoot::from_coords(r).is_some()
}

/// `(s . lambda)(t) = lambda(s^{-1} t s)` on characters of the torus
/// `diag(a, b, nu/bbar, nu/abar)` written as `c1 v(a) + c2 v(b) + c0 v(nu)`.
/// `s1` swaps `a` and `b`; `s2` sends `b` to `nu/bbar`.
fn act_generator(s: u8, r: RootCoords) -> RootCoords {
    let [c1, c2, c0] = r;
    if s == 1 {
        [c2, c1, c0]
    } else {
        [c1, -c2, c0 + c2]
    }
}

/// Action of the element with reduced word `w` on a root.
pub fn act_word(w: &[u8], r: RootCoords) -> RootCoords {
    w.iter().rev().fold(r, |acc, &s| act_generator(s, acc))
}

/// Valuations of the diagonal of `s^{-1} diag(d) s`, applied along `w`.
fn conj_word(w: &[u8], d: [i64; 4]) -> [i64; 4] {
    w.iter().fold(d, |d, &s| if s == 1 { [d[1], d[0], d[3], d[2]] } else { [d[0], d[2], d[1], d[3]] })
}

/// The generator swap `s1 <-> s2` on words.
pub fn iota(w: &[u8]) -> Vec<u8> {
    w.iter().map(|&s| 3 - s).collect()
}

/// Reduced words of the eight elements of the Weyl group.
pub fn weyl_words() -> Vec<Vec<u8>> {
    c2_weyl_group().into_iter().map(|w| w.word).collect()
}

/// `chi(a_alpha)` as a monomial in `(u, v)` for a positive or negative root.
///
/// For positive `alpha` it is the coroot attached to `alpha` evaluated on the
/// Frobenius class; the table gives `x1/x2, x1 x2, x1, x2` for the four roots.
pub fn chi_of_a(r: RootCoords) -> LaurentPoly {
    match PhRoot::from_coords(r) {
        Some(p) => root_to_coroot(p).vector().monomial(),
        None => {
            let p = PhRoot::from_coords(neg_root(r)).expect("argument must be a root");
            root_to_coroot(p).vector().neg().monomial()
        }
    }
}

/// `xi(a_alpha)` from the explicit torus elements `a_alpha`, with
/// `xi(diag(a, b, nu/bbar, nu/abar)) = xi1(a) xi2(b) xi0(nu)`.
pub fn xi_of_a(alpha: PhRoot, xi: &CharacterTriple) -> RationalFn {
    let (y1, y2) = (&xi.values[0], &xi.values[1]);
    match alpha {
        // a = diag(w, 1/w, w, 1/w): a = w, b = 1/w, nu = 1.
        PhRoot::A1MinusA2 => y1.checked_div(y2).expect("y2 nonzero"),
        // s2-conjugate of the previous one: diag(w, w, 1/w, 1/w).
        PhRoot::A1PlusA2MinusA0 => y1 * y2,
        // s1-conjugate of the next one: diag(w, 1, 1, 1/w).
        PhRoot::TwoA1MinusA0 => y1.clone(),
        // a = diag(1, w, 1/w, 1): b = w, nu = 1.
        PhRoot::TwoA2MinusA0 => y2.clone(),
    }
}

/// `q_alpha`: `q^2` for the roots whose Levi has derived group SL2(E), `q` otherwise.
pub fn q_alpha(alpha: PhRoot, q: &RationalFn) -> RationalFn {
    if alpha.is_long() {
        q.clone()
    } else {
        q * q
    }
}

/// `c_alpha(xi) = (1 - q_alpha^{-1} xi(a_alpha)) / (1 - xi(a_alpha))`.
pub fn c_alpha(alpha: PhRoot, xi: &CharacterTriple, q: &RationalFn) -> Result<RationalFn, ShalikaError> {
    let x = xi_of_a(alpha, xi);
    let one = RationalFn::one(ARITY);
    let den = &one - &x;
    if den.is_zero() {
        return Err(ShalikaError::Pole(format!("xi(a_alpha) = 1 for alpha = {}", alpha.label())));
    }
    let num = &one - &x.checked_div(&q_alpha(alpha, q))?;
    Ok(num.checked_div(&den)?)
}

/// Step factor of a simple reflection at the context's character.
///
/// `s2`: `-chi^{-1}(a_{alpha1-alpha2}) c_{2alpha2-alpha0}(xi)`;
/// `s1`: `-chi^{-1}(a_{2alpha2-alpha0}) c_{alpha1-alpha2}(xi) (1 + x2/q)/(1 + 1/(q x2))`.
pub fn step_factor(gen: Generator, ctx: &CSContext) -> Result<StepFactor, ShalikaError> {
    ctx.expect_case(Case::Inert)?;
    let (x1, x2) = (&ctx.chi.values[0], &ctx.chi.values[1]);
    let q = &ctx.q;
    let one = RationalFn::one(ARITY);
    let value = match gen {
        Generator::S2 => {
            let c = c_alpha(PhRoot::TwoA2MinusA0, ctx.xi(), q)?;
            -&(&x2.checked_div(x1)? * &c)
        }
        Generator::S1 => {
            let c = c_alpha(PhRoot::A1MinusA2, ctx.xi(), q)?;
            let num = &one + &x2.checked_div(q)?;
            let den = &one + &one.checked_div(&(q * x2))?;
            if den.is_zero() {
                return Err(ShalikaError::Pole("1 + 1/(q x2) = 0".into()));
            }
            -&(&x2.recip()? * &(&c * &num.checked_div(&den)?))
        }
    };
    Ok(StepFactor { generator: gen, value })
}

/// `T*_w = (-1)^l(w) prod_{w alpha < 0} c_alpha(xi) prod_{iota(w) alpha < 0} chi(a_{-alpha})
/// prod_{long, iota(w) alpha < 0} (1 + chi(a_alpha)/q)/(1 + chi(a_{-alpha})/q)`,
/// symbolic in `(u, v, q)`.
pub fn t_star(w: &[u8]) -> Result<RationalFn, ShalikaError> {
    let xi = symbolic_xi();
    let q = sym_q();
    let iw = iota(w);
    let one = RationalFn::one(ARITY);
    let mut acc = if w.len() % 2 == 0 { one.clone() } else { -&one };
    for alpha in PhRoot::ALL {
        let r = alpha.coords();
        if !is_positive_root(act_word(w, r)) {
            acc = &acc * &c_alpha(alpha, &xi, &q)?;
        }
        if !is_positive_root(act_word(&iw, r)) {
            acc = &acc * &RationalFn::from_poly(chi_of_a(neg_root(r)));
            if alpha.is_long() {
                acc = &acc * &long_ratio(r)?;
            }
        }
    }
    Ok(acc)
}

/// `(1 + chi(a_alpha)/q) / (1 + chi(a_{-alpha})/q)`.
fn long_ratio(r: RootCoords) -> Result<RationalFn, ShalikaError> {
    let num = one_plus_q_inv(&chi_of_a(r));
    let den = one_plus_q_inv(&chi_of_a(neg_root(r)));
    Ok(RationalFn::new(num, den)?)
}

/// `1 + q^{-1} m`.
fn one_plus_q_inv(m: &LaurentPoly) -> LaurentPoly {
    &LaurentPoly::one(ARITY) + &(m * &mono(0, 0, -1))
}

fn symbolic_xi() -> CharacterTriple {
    theta_transfer(&CharacterTriple::gsp4_symbolic(), &sym_q()).expect("symbolic character is generic").0
}

/// `prod_{long alpha > 0} (1 + q^{-1} chi(a_{-alpha})) = (1 + 1/(q x1)) (1 + 1/(q x2))`.
pub fn long_factor() -> LaurentPoly {
    PhRoot::ALL
        .into_iter()
        .filter(|a| a.is_long())
        .fold(LaurentPoly::one(ARITY), |acc, a| &acc * &one_plus_q_inv(&chi_of_a(neg_root(a.coords()))))
}

/// `prod_{alpha > 0} c_alpha(xi)` at the symbolic transfer.
pub fn c_product() -> Result<RationalFn, ShalikaError> {
    let xi = symbolic_xi();
    let q = sym_q();
    let mut acc = RationalFn::one(ARITY);
    for alpha in PhRoot::ALL {
        acc = &acc * &c_alpha(alpha, &xi, &q)?;
    }
    Ok(acc)
}

/// `Q = sum_w (Iw w Iw : Iw)^{-1}` with index `q^2` for `s1` and `q` for `s2`.
pub fn q_gu22() -> LaurentPoly {
    weyl_words().iter().fold(LaurentPoly::zero(ARITY), |acc, w| {
        let cost: i64 = w.iter().map(|&s| if s == 1 { 2 } else { 1 }).sum();
        &acc + &mono(0, 0, -cost)
    })
}

/// `Q_GL4 = sum over S4 of q^{-length}`.
pub fn q_gl4() -> LaurentPoly {
    a3_weyl_group()
        .iter()
        .fold(LaurentPoly::zero(ARITY), |acc, w| &acc + &mono(0, 0, -(w.length() as i64)))
}

/// `delta^{1/2}(g_n) = q^{-2n}` for `g_n = diag(w^n, w^n, 1, 1)`.
fn delta_half(n: i64) -> Result<LaurentPoly, ShalikaError> {
    let full = modulus_eval(ModulusTag::BG, &[n, n, n])?;
    let p = full.as_poly().expect("modulus is a monomial");
    let e = p.terms().next().map(|(e, _)| e.clone()).unwrap_or_else(|| vec![0; ARITY]);
    Ok(LaurentPoly::from_half_units(&[0, 0, e[2] / 2], Rational::one()))
}

/// The recursion over the eight Weyl elements at `g_n`:
/// `Q^{-1} sum_w prod_{w alpha > 0} c_alpha (w xi^{-1} delta^{1/2})(g_n) T*_w`.
pub fn cs_inert_recursion(n: u32, ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Inert)?;
    let n = n as i64;
    let xi = symbolic_xi();
    let ys: Vec<LaurentPoly> = xi.values.iter().map(|y| y.as_poly().expect("monomial")).collect();
    let lf = long_factor();
    // The c_alpha with w alpha > 0 and those inside T*_w together run over
    // all positive alpha, so that product is pulled out of the sum. Every
    // remaining term times the long factor is a Laurent polynomial.
    let mut sum = LaurentPoly::zero(ARITY);
    for w in weyl_words() {
        let e = conj_word(&w, [n, n, 0, 0]);
        // (w xi)^{-1}(g_n) = xi^{-1}(w^{-1} g_n w), read off the conjugated diagonal.
        let mut term = &(&monomial_pow(&ys[0], -e[0]) * &monomial_pow(&ys[1], -e[1]))
            * &monomial_pow(&ys[2], -(e[0] + e[3]));
        if w.len() % 2 == 1 {
            term = -&term;
        }
        let iw = iota(&w);
        for alpha in PhRoot::ALL {
            let r = alpha.coords();
            let inverted = !is_positive_root(act_word(&iw, r));
            if inverted {
                term = &term * &chi_of_a(neg_root(r));
            }
            if alpha.is_long() {
                let m = if inverted { chi_of_a(r) } else { chi_of_a(neg_root(r)) };
                term = &term * &one_plus_q_inv(&m);
            }
        }
        sum = &sum + &term;
    }
    let core = RationalFn::new(&sum * &delta_half(n)?, &q_gu22() * &lf)?;
    let value = &c_product()? * &core;
    ctx.finish_fn(value, "c_alpha denominator or long factor vanishes")
}

fn short_product(sign: i64, mutate: bool) -> LaurentPoly {
    let mut acc = LaurentPoly::one(ARITY);
    for c in Sp4Coroot::ALL.into_iter().filter(|c| c.is_short()) {
        let mut s = sign;
        if mutate && c == Sp4Coroot::A1MinusA2 {
            s = -s;
        }
        let term = c.vector().neg().monomial().shift(&[0, 0, -2]).scale(&int(s));
        acc = &acc * &(&LaurentPoly::one(ARITY) + &term);
    }
    acc
}

/// `A(e^{rho + n(alpha1^ + alpha2^)} prod_{short} (1 + sign q^{-1} e^{-alpha^}))`.
pub fn cs_alternator(n: u32, sign: i64, mutate: bool) -> LaurentPoly {
    let top = RHO.add(LAMBDA1.scale(n as i64)).monomial();
    alternate(&(&top * &short_product(sign, mutate)))
}

fn q_power(k: i64) -> LaurentPoly {
    mono(0, 0, k)
}

fn one_plus(c: i64) -> LaurentPoly {
    &LaurentPoly::one(ARITY) + &q_power(-1).scale(&int(c))
}

/// Split case: `q^{-2n} A(e^{rho+n lambda} prod_short (1 - q^{-1} e^{-alpha^})) / ((1 + q^{-1}) A(e^rho))`.
pub fn cs_split(n: u32, ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Split)?;
    let num = &q_power(-2 * n as i64) * &cs_alternator(n, -1, ctx.mutate);
    let den = &one_plus(1) * &alternator(RHO);
    ctx.finish(num, den)
}

fn inert_numerator(n: u32, ctx: &CSContext) -> LaurentPoly {
    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
    (&q_power(-2 * n as i64) * &cs_alternator(n, 1, ctx.mutate)).scale(&sign)
}

/// Inert case: `(-1)^n q^{-2n} A(e^{rho+n lambda} prod_short (1 + q^{-1} e^{-alpha^})) / ((1 - q^{-1}) A(e^rho))`.
///
/// The value at `n = 0` is 1 with this normalization.
pub fn cs_inert(n: u32, ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Inert)?;
    let den = &one_plus(-1) * &alternator(RHO);
    ctx.finish(inert_numerator(n, ctx), den)
}

/// The inert formula with the `1 + q^{-1}` denominator of the split case.
pub fn cs_inert_as_printed(n: u32, ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Inert)?;
    let den = &one_plus(1) * &alternator(RHO);
    ctx.finish(inert_numerator(n, ctx), den)
}

/// `q^{-2n} prod c_alpha / (Q e^rho prod_long (1 + q^{-1} chi(a_{-alpha}))) * (-1)^n A(...)`.
pub fn cs_inert_unnormalized(n: u32, ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Inert)?;
    let den = &(&q_gu22() * &RHO.monomial()) * &long_factor();
    let core = RationalFn::new(inert_numerator(n, ctx), den)?;
    let value = &c_product()? * &core;
    ctx.finish_fn(value, "c_alpha denominator or long factor vanishes")
}

/// `cs_inert(0) / cs_inert_unnormalized(0)`.
pub fn normalization_ratio(ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    let a = cs_inert(0, ctx)?;
    let b = cs_inert_unnormalized(0, ctx)?;
    if b.is_zero() {
        return Err(ShalikaError::Pole("unnormalized value vanishes".into()));
    }
    Ok(a.checked_div(&b)?)
}

/// `(Q_GL4/(1+q^{-1})) e^{-rho} prod_{GL4} (1 - e^{beta^}) / (prod_{Sp4} (1 - q^{-1} e^{alpha^}) A(e^rho))`.
pub fn split_normalization(ctx: &CSContext) -> Result<RationalFn, ShalikaError> {
    ctx.expect_case(Case::Split)?;
    let one = LaurentPoly::one(ARITY);
    let mut num = &q_gl4() * &RHO.neg().monomial();
    for beta in a3_positive_roots() {
        num = &num * &(&one - &gl4_to_sp4(beta).monomial());
    }
    let mut den = &one_plus(1) * &alternator(RHO);
    for c in Sp4Coroot::ALL {
        den = &den * &(&one - &c.vector().monomial().shift(&[0, 0, -2]));
    }
    ctx.finish(num, den)
}

/// Integer power of a monomial.
fn monomial_pow(m: &LaurentPoly, k: i64) -> LaurentPoly {
    if k >= 0 {
        m.pow(k as u32)
    } else {
        m.monomial_inverse().expect("monomial").pow((-k) as u32)
    }
}
