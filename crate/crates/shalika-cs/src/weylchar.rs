//! Weyl alternator and Weyl character formula for Sp4(C), symmetric powers
//! of the five-dimensional standard representation, and an independent
//! symmetric-function oracle for those symmetric powers.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactalg::{AlgError, LaurentPoly, Rational};
use crate::rootdata::{c2_weyl_group, Coweight, Sp4Coroot, LAMBDA1, RHO};
use crate::satake::ARITY;

/// Errors from character computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum WeylError {
    #[error("highest weight {0} is not dominant (need m1 >= m2 >= 0)")]
    NonDominant(Coweight),
    #[error("highest weight {0} is not integral")]
    NonIntegral(Coweight),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Character of an irreducible representation of Sp4(C), as a Laurent
/// polynomial in `(u, v)` (embedded in the `(u, v, q)` ring).
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterPoly {
    pub value: LaurentPoly,
    pub highest_weight: Coweight,
}

impl CharacterPoly {
    /// Dimension: the value at `u = v = 1`.
    pub fn dimension(&self) -> Rational {
        self.value.coefficient_sum()
    }

    /// Weights with multiplicities, in half-unit coordinates.
    pub fn weights(&self) -> Vec<(Coweight, Rational)> {
        self.value.terms().map(|(e, c)| (Coweight::half_units(e[0], e[1]), c.clone())).collect()
    }
}

/// Applies the alternating Weyl sum to every monomial of `p`.
pub fn alternate(p: &LaurentPoly) -> LaurentPoly {
    let mut acc = LaurentPoly::zero(p.arity());
    for w in c2_weyl_group() {
        let img = w.act_on_poly(p);
        acc = if w.sign() > 0 { &acc + &img } else { &acc - &img };
    }
    acc
}

/// `A(e^mu) = sum over W of sign(w) e^{w mu}`.
pub fn alternator(mu: Coweight) -> LaurentPoly {
    alternate(&mu.monomial())
}

/// The product `e^rho * prod over positive coroots of (1 - e^{-alpha^})`.
pub fn weyl_denominator() -> LaurentPoly {
    let mut acc = RHO.monomial();
    for c in Sp4Coroot::ALL {
        let factor = &LaurentPoly::one(ARITY) - &c.vector().neg().monomial();
        acc = &acc * &factor;
    }
    acc
}

/// Weyl character `A(e^{rho + lambda}) / A(e^rho)` by exact division.
pub fn weyl_character(lambda: Coweight) -> Result<CharacterPoly, WeylError> {
    if !lambda.is_integral() {
        return Err(WeylError::NonIntegral(lambda));
    }
    if !lambda.is_dominant() {
        return Err(WeylError::NonDominant(lambda));
    }
    let num = alternator(RHO.add(lambda));
    let value = num.exact_divide(&alternator(RHO))?;
    Ok(CharacterPoly { value, highest_weight: lambda })
}

/// Highest weights of the summands of `Sym^k` of the standard representation.
pub fn sym_decomp(k: usize) -> Vec<Coweight> {
    (0..=k / 2).map(|i| LAMBDA1.scale((k - 2 * i) as i64)).collect()
}

/// Character of `Sym^k` of the five-dimensional representation, computed as
/// the complete homogeneous symmetric polynomial in its five weights.
pub fn sym_power_oracle(k: usize) -> CharacterPoly {
    let std = weyl_character(LAMBDA1).expect("standard representation");
    let mut weights: Vec<LaurentPoly> = Vec::new();
    for (mu, mult) in std.weights() {
        let n: usize = mult.to_integer().try_into().expect("small multiplicity");
        for _ in 0..n {
            weights.push(mu.monomial());
        }
    }
    // h[j] = complete homogeneous polynomial of degree j in the weights seen so far.
    let mut h: Vec<LaurentPoly> = vec![LaurentPoly::zero(ARITY); k + 1];
    h[0] = LaurentPoly::one(ARITY);
    for w in &weights {
        for j in 1..=k {
            let add = w * &h[j - 1];
            h[j] = &h[j] + &add;
        }
    }
    CharacterPoly { value: h[k].clone(), highest_weight: LAMBDA1.scale(k as i64) }
}

/// True when every coefficient is a non-negative integer.
pub fn has_natural_coefficients(p: &LaurentPoly) -> bool {
    p.terms().all(|(_, c)| c.is_integer() && !c.is_negative())
}

/// True when the polynomial is fixed by all eight Weyl elements.
pub fn is_weyl_invariant(p: &LaurentPoly) -> bool {
    c2_weyl_group().iter().all(|w| w.act_on_poly(p) == *p)
}

/// Number of weights counted with multiplicity equals the dimension.
pub fn dimension_of(lambda: Coweight) -> Result<Rational, WeylError> {
    Ok(weyl_character(lambda)?.dimension())
}

/// True for the zero polynomial; convenience for alternator vanishing checks.
pub fn vanishes(p: &LaurentPoly) -> bool {
    p.is_zero() || p.terms().all(|(_, c)| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;
    use crate::rootdata::C2Element;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn denominator_identity() {
        assert_eq!(alternator(RHO), weyl_denominator());
    }

    #[test]
    fn alternator_vanishes_below_rho() {
        assert!(alternator(RHO.add(LAMBDA1.neg())).is_zero());
    }

    #[test]
    fn trivial_and_standard_characters() {
        let triv = weyl_character(Coweight::units(0, 0)).unwrap();
        assert_eq!(triv.value, LaurentPoly::one(ARITY));
        let std = weyl_character(LAMBDA1).unwrap();
        let mut want = LaurentPoly::one(ARITY);
        for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            want = &want + &Coweight::units(a, b).monomial();
        }
        assert_eq!(std.value, want);
        assert_eq!(std.dimension(), int(5));
        assert_eq!(dimension_of(LAMBDA1.scale(2)).unwrap(), int(14));
    }

    #[test]
    fn dimension_matches_weyl_dimension_formula() {
        // Weyl dimension formula with the evaluation vectors as the positive
        // coroots and rho = (2, 1): prod <lambda + rho, a> / <rho, a>.
        for m1 in 0..5i64 {
            for m2 in 0..=m1 {
                let lam = Coweight::units(m1, m2);
                let lr = [m1 + 2, m2 + 1];
                let pairs = [(1, -1), (1, 1), (1, 0), (0, 1)];
                let mut num = Rational::one();
                let mut den = Rational::one();
                for (a, b) in pairs {
                    num *= int(lr[0] * a + lr[1] * b);
                    den *= int(2 * a + b);
                }
                assert_eq!(dimension_of(lam).unwrap(), num / den, "lambda {}", lam);
            }
        }
    }

    #[test]
    fn nondominant_rejected() {
        assert!(matches!(weyl_character(Coweight::units(0, 1)), Err(WeylError::NonDominant(_))));
        assert!(matches!(weyl_character(Coweight::half_units(1, 1)), Err(WeylError::NonIntegral(_))));
    }

    #[test]
    fn sym_decomp_examples() {
        assert_eq!(sym_decomp(0), vec![Coweight::units(0, 0)]);
        assert_eq!(sym_decomp(2), vec![LAMBDA1.scale(2), Coweight::units(0, 0)]);
        assert_eq!(sym_decomp(5), vec![LAMBDA1.scale(5), LAMBDA1.scale(3), LAMBDA1]);
    }

    #[test]
    fn oracle_small_cases() {
        assert_eq!(sym_power_oracle(1).value, weyl_character(LAMBDA1).unwrap().value);
        assert_eq!(sym_power_oracle(2).dimension(), int(15));
        assert_eq!(sym_power_oracle(3).dimension(), int(35));
    }

    #[test]
    fn sym_powers_decompose() {
        for k in 0..=10 {
            let mut sum = LaurentPoly::zero(ARITY);
            for lam in sym_decomp(k) {
                sum = &sum + &weyl_character(lam).unwrap().value;
            }
            assert_eq!(sum, sym_power_oracle(k).value, "k = {}", k);
        }
    }

    #[test]
    fn characters_are_invariant_and_natural() {
        for m1 in 0..4 {
            for m2 in 0..=m1 {
                let c = weyl_character(Coweight::units(m1, m2)).unwrap();
                assert!(is_weyl_invariant(&c.value));
                assert!(has_natural_coefficients(&c.value));
            }
        }
    }

    #[test]
    fn alternator_vanishes_on_walls() {
        for a in -3..=3 {
            assert!(vanishes(&alternator(Coweight::units(a, a))));
            assert!(vanishes(&alternator(Coweight::units(a, 0))));
            assert!(vanishes(&alternator(Coweight::units(0, a))));
            assert!(vanishes(&alternator(Coweight::units(a, -a))));
        }
    }

    proptest! {
        #[test]
        fn alternator_is_antisymmetric(a in -6i64..=6, b in -6i64..=6) {
            let mu = Coweight::half_units(a, b);
            for s in [C2Element::s1(), C2Element::s2()] {
                prop_assert_eq!(alternator(s.apply(mu)), -&alternator(mu));
            }
        }
    }
}
