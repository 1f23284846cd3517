//! Degree-5 standard L-factors of GSp4, optionally twisted by the quadratic
//! character, the unramified zeta series built from the Casselman-Shalika
//! values, and the coefficientwise comparison of the two.
//!
//! The series variable is `t = q^{-s}`, so `zeta(s + 1) = (1 - t/q)^{-1}` and
//! `zeta(2s) = (1 - t^2)^{-1}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{int, AlgError, LaurentPoly, Rational, RationalFn, TruncatedSeries};
use crate::rootdata::LAMBDA1;
use crate::satake::{frobenius, sym_q, Case, CharacterTriple, SatakeError, ARITY};
use crate::shalika::{cs_inert, cs_split, CSContext, ShalikaError};
use crate::weylchar::{weyl_character, WeylError};

/// Errors from L-factor and zeta computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LFactorError {
    #[error(transparent)]
    Shalika(#[from] ShalikaError),
    #[error(transparent)]
    Satake(#[from] SatakeError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Twist of the standard L-factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Trivial,
    Quadratic,
}

impl Twist {
    /// `epsilon = chi_{E/F}(uniformizer)`.
    pub fn epsilon(self) -> i64 {
        match self {
            Twist::Trivial => 1,
            Twist::Quadratic => -1,
        }
    }
}

impl From<Case> for Twist {
    fn from(c: Case) -> Self {
        match c {
            Case::Split => Twist::Trivial,
            Case::Inert => Twist::Quadratic,
        }
    }
}

/// `1 / det(1 - epsilon std(g) t)`, stored through its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerFactor {
    /// Coefficients of `t^0 .. t^5` of `prod_w (1 - epsilon w t)`.
    pub inverse: Vec<RationalFn>,
    pub twist: Twist,
}

/// Images of `(u, v, q)` for substituting into character polynomials.
fn images(chi: &CharacterTriple) -> Result<Vec<RationalFn>, LFactorError> {
    let g = frobenius(chi)?;
    Ok(vec![g.u().clone(), g.v().clone(), sym_q()])
}

/// The five weights of the standard representation at the Frobenius class of `chi`.
pub fn standard_weights(chi: &CharacterTriple) -> Result<Vec<RationalFn>, LFactorError> {
    let img = images(chi)?;
    let std = weyl_character(LAMBDA1)?;
    let mut out = Vec::with_capacity(5);
    for (mu, mult) in std.weights() {
        let w = mu.monomial().substitute(&img)?;
        let k: usize = mult.to_integer().try_into().expect("small multiplicity");
        out.extend(std::iter::repeat(w).take(k));
    }
    Ok(out)
}

/// Expands `prod_w (1 - epsilon w t)` over the standard weights.
pub fn euler_factor(chi: &CharacterTriple, twist: Twist) -> Result<EulerFactor, LFactorError> {
    chi.check_central()?;
    let eps = int(twist.epsilon());
    let mut poly = vec![RationalFn::one(ARITY)];
    for w in standard_weights(chi)? {
        let root = (-&w).scale(&eps);
        let mut next = vec![RationalFn::zero(ARITY); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] = &next[i] + c;
            next[i + 1] = &next[i + 1] + &(c * &root);
        }
        poly = next;
    }
    Ok(EulerFactor { inverse: poly, twist })
}

/// Power series of `1 / prod_w (1 - epsilon w t)` to order `n` by long division.
pub fn euler_series(ef: &EulerFactor, n: usize) -> Result<TruncatedSeries, LFactorError> {
    let inv = TruncatedSeries::new(ARITY, n, ef.inverse.iter().take(n + 1).cloned().collect());
    Ok(inv.inverse()?)
}

/// Characters of `rho_{m lambda1}` for `m = 0..=n` as polynomials in `(u, v)`.
pub fn character_table(n: usize) -> Result<Vec<LaurentPoly>, LFactorError> {
    (0..=n).map(|m| Ok(weyl_character(LAMBDA1.scale(m as i64))?.value)).collect()
}

/// `sum_{k <= n} epsilon^k sum_i tr(rho_{k-2i})(g) t^k`.
pub fn lfactor_series(chi: &CharacterTriple, twist: Twist, n: usize) -> Result<TruncatedSeries, LFactorError> {
    lfactor_series_with(chi, twist, n, &character_table(n)?)
}

/// [`lfactor_series`] with a precomputed character table.
pub fn lfactor_series_with(
    chi: &CharacterTriple,
    twist: Twist,
    n: usize,
    table: &[LaurentPoly],
) -> Result<TruncatedSeries, LFactorError> {
    chi.check_central()?;
    let img = images(chi)?;
    let chars: Vec<RationalFn> = table[..=n].iter().map(|c| c.substitute(&img)).collect::<Result<_, _>>()?;
    let eps = int(twist.epsilon());
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = RationalFn::zero(ARITY);
        for i in 0..=k / 2 {
            acc = &acc + &chars[k - 2 * i];
        }
        let sign = if k % 2 == 0 { int(1) } else { eps.clone() };
        coeffs.push(acc.scale(&sign));
    }
    Ok(TruncatedSeries::new(ARITY, n, coeffs))
}

/// The zeta series of a context: `(1 - t/q)^{-1} (1 - t^2)^{-1} sum_n t^n q^{2n} cs(n)`.
#[derive(Debug, Clone)]
pub struct ZetaSeries {
    pub series: TruncatedSeries,
    pub case: Case,
}

/// Builds the zeta series to order `n`. The `t^n` weight comes from
/// `q^{n(2-s)} q^{-2n} = q^{-ns}`.
pub fn zeta_series(ctx: &CSContext, n: usize) -> Result<ZetaSeries, LFactorError> {
    let mut bracket = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let cs = match ctx.case {
            Case::Split => cs_split(k as u32, ctx)?,
            Case::Inert => cs_inert(k as u32, ctx)?,
        };
        bracket.push(&ctx.q.pow(2 * k as i64)? * &cs);
    }
    let sum = TruncatedSeries::new(ARITY, n, bracket);
    let qinv = ctx.q.recip()?;
    let zeta1 = TruncatedSeries::binomial(ARITY, n, -&qinv, 1).inverse()?;
    let zeta2 = TruncatedSeries::binomial(ARITY, n, RationalFn::constant(ARITY, int(-1)), 2).inverse()?;
    let series = zeta1.checked_mul(&zeta2)?.checked_mul(&sum)?;
    Ok(ZetaSeries { series, case: ctx.case })
}

/// Outcome of comparing the zeta series with the L-factor series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub case: Case,
    pub order: usize,
    pub equal: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_mismatch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<String>,
}

/// Compares `zeta_series(ctx)` with the L-factor series of the matching twist.
pub fn verify_identity(ctx: &CSContext, n: usize) -> Result<IdentityReport, LFactorError> {
    verify_identity_with(ctx, n, &character_table(n)?)
}

/// [`verify_identity`] with a precomputed character table.
pub fn verify_identity_with(ctx: &CSContext, n: usize, table: &[LaurentPoly]) -> Result<IdentityReport, LFactorError> {
    let lhs = zeta_series(ctx, n)?.series;
    let rhs = lfactor_series_with(&ctx.chi, ctx.case.into(), n, table)?;
    let first = lhs.first_mismatch(&rhs);
    Ok(IdentityReport {
        case: ctx.case,
        order: n,
        equal: first.is_none(),
        first_mismatch: first,
        lhs: first.map(|k| lhs.coeff(k).to_string()),
        rhs: first.map(|k| rhs.coeff(k).to_string()),
    })
}

/// `sum_n t^n (a_n + c a_{n-1})` for a sequence `a` with `a_{-1} = 0`.
pub fn shifted_combination(a: &[RationalFn], c: &RationalFn) -> TruncatedSeries {
    let n = a.len() - 1;
    let coeffs = (0..=n)
        .map(|k| if k == 0 { a[0].clone() } else { &a[k] + &(c * &a[k - 1]) })
        .collect();
    TruncatedSeries::new(ARITY, n, coeffs)
}

/// Constant `Rational` as a `RationalFn` in the series ring.
pub fn series_constant(c: Rational) -> RationalFn {
    RationalFn::constant(ARITY, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::satake::{konst, mono, sym_u, sym_v};
    use crate::weylchar::sym_power_oracle;

    fn sym_chi() -> CharacterTriple {
        CharacterTriple::gsp4_symbolic()
    }

    #[test]
    fn trivial_character_factors() {
        let triv = CharacterTriple::trivial(crate::satake::Group::GSp4);
        let split = euler_series(&euler_factor(&triv, Twist::Trivial).unwrap(), 6).unwrap();
        let inert = euler_series(&euler_factor(&triv, Twist::Quadratic).unwrap(), 6).unwrap();
        // (1 - t)^{-5} has coefficients C(k + 4, 4).
        let binom = [1, 5, 15, 35, 70, 126, 210];
        for k in 0..=6 {
            assert_eq!(*split.coeff(k), konst(int(binom[k])));
            let s = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(*inert.coeff(k), konst(int(s * binom[k])));
        }
    }

    #[test]
    fn symbolic_euler_factor_is_the_product() {
        let ef = euler_factor(&sym_chi(), Twist::Trivial).unwrap();
        assert_eq!(ef.inverse.len(), 6);
        assert_eq!(ef.inverse[0], RationalFn::one(ARITY));
        let (u, v) = (sym_u(), sym_v());
        let ws = [&u * &v, u.checked_div(&v).unwrap(), RationalFn::one(ARITY), v.checked_div(&u).unwrap(), (&u * &v).recip().unwrap()];
        let e1 = ws.iter().fold(RationalFn::zero(ARITY), |a, w| &a + w);
        assert_eq!(ef.inverse[1], -&e1);
        // The weights are closed under inversion with product 1, so
        // t^5 P(1/t) = -P(t).
        for k in 0..=5 {
            assert_eq!(ef.inverse[5 - k], -&ef.inverse[k]);
        }
    }

    #[test]
    fn first_coefficients() {
        let l = lfactor_series(&sym_chi(), Twist::Trivial, 3).unwrap();
        assert_eq!(*l.coeff(0), RationalFn::one(ARITY));
        let want = sym_power_oracle(1).value;
        assert_eq!(*l.coeff(1), RationalFn::from_poly(want));
    }

    #[test]
    fn two_paths_agree_to_order_12() {
        for twist in [Twist::Trivial, Twist::Quadratic] {
            let a = lfactor_series(&sym_chi(), twist, 12).unwrap();
            let b = euler_series(&euler_factor(&sym_chi(), twist).unwrap(), 12).unwrap();
            assert_eq!(a.first_mismatch(&b), None, "{:?}", twist);
        }
    }

    #[test]
    fn zeta_equals_l_symbolic_order_4() {
        for case in [Case::Split, Case::Inert] {
            let ctx = CSContext::symbolic(case).unwrap();
            let r = verify_identity(&ctx, 4).unwrap();
            assert!(r.equal, "{:?}", r);
            let z = zeta_series(&ctx, 4).unwrap();
            assert_eq!(*z.series.coeff(0), RationalFn::one(ARITY));
        }
    }

    #[test]
    fn zeta_equals_l_numeric() {
        let ctx = CSContext::from_uv(Case::Inert, rat(2, 3), int(6), int(3)).unwrap();
        assert!(verify_identity(&ctx, 10).unwrap().equal);
        let ctx = CSContext::from_uv(Case::Split, int(6), int(2), int(5)).unwrap();
        assert!(verify_identity(&ctx, 10).unwrap().equal);
    }

    #[test]
    fn mutation_is_reported_at_order_zero() {
        for case in [Case::Split, Case::Inert] {
            let ctx = CSContext::symbolic(case).unwrap().mutated();
            let r = verify_identity(&ctx, 4).unwrap();
            assert!(!r.equal);
            assert_eq!(r.first_mismatch, Some(0));
            assert!(r.lhs.is_some() && r.rhs.is_some());
        }
    }

    #[test]
    fn telescoping() {
        let table = character_table(10).unwrap();
        let a: Vec<RationalFn> = table.iter().cloned().map(RationalFn::from_poly).collect();
        let qinv = RationalFn::from_poly(mono(0, 0, -1));
        let plain = TruncatedSeries::new(ARITY, 10, a.clone());
        let left = TruncatedSeries::binomial(ARITY, 10, -&qinv, 1).checked_mul(&plain).unwrap();
        let right = shifted_combination(&a, &-&qinv);
        assert_eq!(left.first_mismatch(&right), None);
        // (1 - t^2)^{-1} sum t^n a_n = sum_n t^n sum_k a_{n-2k}.
        let z2 = TruncatedSeries::binomial(ARITY, 10, series_constant(int(-1)), 2).inverse().unwrap();
        let folded = z2.checked_mul(&plain).unwrap();
        for n in 0..=10 {
            let want = (0..=n / 2).fold(RationalFn::zero(ARITY), |acc, k| &acc + &a[n - 2 * k]);
            assert_eq!(*folded.coeff(n), want);
        }
    }

    #[test]
    fn report_round_trips() {
        let r = IdentityReport { case: Case::Inert, order: 3, equal: false, first_mismatch: Some(0), lhs: Some("1".into()), rhs: Some("2".into()) };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<IdentityReport>(&s).unwrap(), r);
        let ok = IdentityReport { case: Case::Split, order: 3, equal: true, first_mismatch: None, lhs: None, rhs: None };
        assert_eq!(serde_json::to_string(&ok).unwrap(), r#"{"case":"split","order":3,"equal":true}"#);
    }
}
