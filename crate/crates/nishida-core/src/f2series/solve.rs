//! Expansion of a bivariate series in powers of an invariant quadratic.
//!
//! Given F(x,t) and q(x,t) with x-order exactly 1 and lead coefficient t on
//! x¹, write F = Σ_k c_k(t)·q^{e_k} over a strictly increasing exponent
//! list. The system is triangular in the x-degree, so each c_k is forced;
//! whatever cannot be matched is returned as the residual, never dropped.

use super::series::{FVar, PowerSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct InvariantExpansion {
    /// One series in t per requested exponent, aligned with the input list.
    pub coefficients: Vec<PowerSeries>,
    /// Reliable t-precision of each coefficient (cap − 2·exponent).
    pub precisions: Vec<u32>,
    /// F − Σ c_k·q^{e_k}; zero exactly when F lies in the span.
    pub residual: PowerSeries,
}

/// Solve F = Σ c_k(t)·q^{e_k} greedily from the lowest x-degree upward.
pub fn express_in_invariant(
    f: &PowerSeries,
    q: &PowerSeries,
    exponents: &[u32],
) -> Result<InvariantExpansion> {
    if exponents.is_empty() || exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadExponentList);
    }
    if f.cap() != q.cap() {
        return Err(Error::CapMismatch {
            left: f.cap(),
            right: q.cap(),
        });
    }
    // q must look like t·x + (x-order ≥ 1 tail): lead coefficient of x¹ is
    // exactly t, so dividing by it is a t-shift.
    if q.order_in(FVar::X).unwrap_or(0) < 1 {
        return Err(Error::BadQuadratic);
    }
    let lead = q.slice(FVar::X, 1);
    let expect_t = PowerSeries::formal_var(q.alphabet(), FVar::T, &[FVar::T], q.cap());
    if lead != expect_t {
        return Err(Error::BadQuadratic);
    }

    let cap = f.cap();
    let mut remainder = f.with_vars(&[FVar::X, FVar::T]);
    let mut coefficients = Vec::with_capacity(exponents.len());
    let mut precisions = Vec::with_capacity(exponents.len());

    for &e in exponents {
        if 2 * e > cap {
            // no reliable information at this exponent
            coefficients.push(PowerSeries::zero(f.alphabet(), &[FVar::T], 0));
            precisions.push(0);
            continue;
        }
        let qe = q.pow(e)?;
        // coefficient of x^e in the remainder, as a series in t
        let numerator = remainder.slice(FVar::X, e as u16);
        // the lead of q^e at x^e is t^e; split off the non-divisible part
        let (quotient, _stuck) = numerator.shift_down(FVar::T, e as u16);
        let precision = cap - 2 * e;
        let c = quotient.truncated(precision);
        let c_full = c.truncated(cap).with_cap_raised(cap);
        remainder = remainder.add(&c_full.mul(&qe.with_vars(&[FVar::X, FVar::T]))?)?;
        coefficients.push(c);
        precisions.push(precision);
    }

    Ok(InvariantExpansion {
        coefficients,
        precisions,
        residual: remainder,
    })
}

impl PowerSeries {
    /// Raise the cap without inventing coefficients. Only meaningful when
    /// the caller knows the series is exact beyond its recorded cap or is
    /// about to re-truncate.
    pub(crate) fn with_cap_raised(&self, cap: u32) -> PowerSeries {
        let mut out = PowerSeries::zero(self.alphabet(), self.vars(), cap.max(self.cap()));
        for (key, poly) in self.terms() {
            out.set_coefficient(key, poly.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2series::alphabet::GradedAlphabet;
    use crate::f2series::poly::GradedPolynomial;
    use std::sync::Arc;

    fn alph() -> Arc<GradedAlphabet> {
        GradedAlphabet::build(&[("c0", 0), ("c1", 1)], Some("c0"), -64).unwrap()
    }

    fn xxt(a: &Arc<GradedAlphabet>, cap: u32) -> PowerSeries {
        let x = PowerSeries::formal_var(a, FVar::X, &[FVar::X, FVar::T], cap);
        let t = PowerSeries::formal_var(a, FVar::T, &[FVar::X, FVar::T], cap);
        x.mul(&x.add(&t).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_product_expands_exactly() {
        let a = alph();
        let cap = 12;
        let x = PowerSeries::formal_var(&a, FVar::X, &[FVar::X, FVar::T], cap);
        let t = PowerSeries::formal_var(&a, FVar::T, &[FVar::X, FVar::T], cap);
        let xt = x.add(&t).unwrap();
        // x²(x+t)² = q² with q = x(x+t)
        let f = x.pow(2).unwrap().mul(&xt.pow(2).unwrap()).unwrap();
        let sol = express_in_invariant(&f, &xxt(&a, cap), &[1, 2, 3]).unwrap();
        assert!(sol.residual.is_zero());
        assert!(sol.coefficients[0].is_zero());
        assert_eq!(
            sol.coefficients[1].coefficient(&[0]),
            GradedPolynomial::one(&a)
        );
        assert!(sol.coefficients[2].is_zero());
    }

    #[test]
    fn cubic_leaves_residual() {
        let a = alph();
        let cap = 8;
        let f = PowerSeries::formal_var(&a, FVar::X, &[FVar::X, FVar::T], cap)
            .pow(3)
            .unwrap();
        let sol = express_in_invariant(&f, &xxt(&a, cap), &[1, 2]).unwrap();
        assert!(!sol.residual.is_zero());
        assert!(sol.coefficients[0].is_zero());
        assert!(sol.coefficients[1].is_zero());
    }

    #[test]
    fn random_invariant_recovers() {
        // A(q,t) expanded back out recovers its own coefficients.
        let a = alph();
        let cap = 10;
        let q = xxt(&a, cap);
        let t = PowerSeries::formal_var(&a, FVar::T, &[FVar::X, FVar::T], cap);
        let c1 = PowerSeries::constant(
            GradedPolynomial::variable(&a, a.var("c1").unwrap()),
            &[FVar::X, FVar::T],
            cap,
        );
        // F = (c1 + t)·q + q²
        let f = c1
            .add(&t)
            .unwrap()
            .mul(&q)
            .unwrap()
            .add(&q.pow(2).unwrap())
            .unwrap();
        let sol = express_in_invariant(&f, &q, &[1, 2, 4]).unwrap();
        assert!(sol.residual.is_zero());
        assert_eq!(sol.coefficients[0].coefficient(&[0]).display(), "c1");
        assert_eq!(
            sol.coefficients[0].coefficient(&[1]),
            GradedPolynomial::one(&a)
        );
        assert_eq!(
            sol.coefficients[1].coefficient(&[0]),
            GradedPolynomial::one(&a)
        );
        assert!(sol.coefficients[2].is_zero());
    }
}
