//! Total square operations on the Hopf algebras: the table Q_t(g_n) is
//! solved from the functional equation Q_t(g)(x(x+t)) = g(x)g(x+t) by
//! expanding the right side in powers of the invariant quadratic. The
//! table extends to the whole carrier multiplicatively; the interchange
//! (Adem) axiom is checked by extending Q_s to series via Q_s(t) = t(t+s)
//! and testing s ↔ t symmetry.
//!
//! Precision convention: a table entry is a series in t whose cap is the
//! largest t-exponent it is reliable for. Evaluation at precision p
//! demands every entry used have cap ≥ p and fails loudly otherwise.

pub mod free;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2series::{express_in_invariant, FVar, GradedAlphabet, GradedPolynomial, PolyHom, PowerSeries, VarId};
use crate::hopf::HopfPresentation;
use crate::report::Report;

#[derive(Clone)]
pub struct QRingSpec {
    pub carrier: Arc<GradedAlphabet>,
    pub table: BTreeMap<VarId, PowerSeries>,
}

/// Build g(x)·g(x+t) and expand it in powers of x(x+t) along the
/// presentation's generator exponents. The expansion must be exact.
pub fn solve_generator_qstructure(
    h: &Arc<HopfPresentation>,
    solve_cap: u32,
) -> Result<QRingSpec> {
    assert!(!h.unit_leading(), "needs the invertible leading generator");
    let vars = [FVar::X, FVar::T];
    let alphabet = h.alphabet().clone();
    let gx = h.series_in(&alphabet, 0, FVar::X, &vars, solve_cap)?;
    let x = PowerSeries::formal_var(&alphabet, FVar::X, &vars, solve_cap);
    let t = PowerSeries::formal_var(&alphabet, FVar::T, &vars, solve_cap);
    let xt = x.add(&t)?;
    let gxt = gx.substitute(FVar::X, &xt)?;
    let f = gx.mul(&gxt)?;
    let q = x.mul(&xt)?;

    let exponents: Vec<u32> = h
        .exponents_upto(solve_cap)
        .into_iter()
        .filter(|&e| 2 * e <= solve_cap)
        .collect();
    let sol = express_in_invariant(&f, &q, &exponents)?;
    if !sol.residual.is_zero() {
        return Err(Error::Unsupported(
            "functional equation left a nonzero residual".into(),
        ));
    }

    let mut table = BTreeMap::new();
    for (k, &e) in exponents.iter().enumerate() {
        let n = h.index_for_exponent(e).expect("generator exponent");
        let v = h.gen_var(n).expect("full presentation");
        table.insert(v, sol.coefficients[k].clone());
    }
    Ok(QRingSpec {
        carrier: alphabet,
        table,
    })
}

impl QRingSpec {
    pub fn entry(&self, v: VarId) -> Result<&PowerSeries> {
        self.table
            .get(&v)
            .ok_or_else(|| Error::MissingTableEntry(self.carrier.info(v).name.clone()))
    }

    fn entry_at(&self, v: VarId, precision: u32) -> Result<PowerSeries> {
        let s = self.entry(v)?;
        if s.cap() < precision {
            return Err(Error::Precision {
                what: self.carrier.info(v).name.clone(),
                needed: precision,
                available: s.cap(),
            });
        }
        Ok(s.truncated(precision))
    }

    /// Multiplicative-additive extension of the table, reliable through
    /// t^precision. Negative exponents of invertible generators go
    /// through the series inverse.
    pub fn qt_eval(&self, a: &GradedPolynomial, precision: u32) -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(&self.carrier, &[FVar::T], precision);
        for m in a.terms() {
            let mut term = PowerSeries::constant(
                GradedPolynomial::one(&self.carrier),
                &[FVar::T],
                precision,
            );
            for &(v, e) in m.exps() {
                let base = self.entry_at(v, precision)?;
                let factor = if e >= 0 {
                    base.pow(e as u32)?
                } else {
                    base.inverse()?.pow((-e) as u32)?
                };
                term = term.mul(&factor)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Q_s(Q_t(a)) with Q_s(t) := t(t+s), as a series in (s,t) complete
    /// through total degree check_cap.
    pub fn double_apply(&self, a: &GradedPolynomial, check_cap: u32) -> Result<PowerSeries> {
        let st = [FVar::S, FVar::T];
        let s = PowerSeries::formal_var(&self.carrier, FVar::S, &st, check_cap);
        let t = PowerSeries::formal_var(&self.carrier, FVar::T, &st, check_cap);
        let qst = t.mul(&t.add(&s)?)?;
        self.double_apply_with(a, check_cap, &qst)
    }

    /// Same but with an arbitrary extension Q_s(t) := qst. Exactness of
    /// the per-degree truncation needs every qst monomial to carry a
    /// positive power of t.
    pub fn double_apply_with(
        &self,
        a: &GradedPolynomial,
        check_cap: u32,
        qst: &PowerSeries,
    ) -> Result<PowerSeries> {
        let st = [FVar::S, FVar::T];
        assert!(
            qst.order_in(FVar::T).map_or(true, |o| o >= 1),
            "extension series must vanish at t = 0"
        );
        let qst = qst.truncated(check_cap).with_vars(&st);
        let u = self.qt_eval(a, check_cap)?;

        let mut out = PowerSeries::zero(&self.carrier, &st, check_cap);
        let mut qst_power = PowerSeries::constant(
            GradedPolynomial::one(&self.carrier),
            &st,
            check_cap,
        );
        for k in 0..=check_cap.min(u.cap()) {
            let ck = u.coeff1(k as u16);
            if !ck.is_zero() {
                let qs_ck = self
                    .qt_eval(&ck, check_cap - k)?
                    .rename_var(FVar::T, FVar::S)
                    .with_cap_raised(check_cap)
                    .with_vars(&st);
                out = out.add(&qs_ck.mul(&qst_power)?)?;
            }
            qst_power = qst_power.mul(&qst)?;
        }
        Ok(out)
    }

    pub fn interchange_check(
        &self,
        a: &GradedPolynomial,
        check_cap: u32,
        suite: &str,
        label: &str,
        report: &mut Report,
    ) -> Result<()> {
        let d = self.double_apply(a, check_cap)?;
        self.record_symmetry(d, check_cap, suite, label, report)
    }

    pub fn interchange_check_with(
        &self,
        a: &GradedPolynomial,
        check_cap: u32,
        qst: &PowerSeries,
        suite: &str,
        label: &str,
        report: &mut Report,
    ) -> Result<()> {
        let d = self.double_apply_with(a, check_cap, qst)?;
        self.record_symmetry(d, check_cap, suite, label, report)
    }

    fn record_symmetry(
        &self,
        d: PowerSeries,
        check_cap: u32,
        suite: &str,
        label: &str,
        report: &mut Report,
    ) -> Result<()> {
        let swapped = d
            .rename_var(FVar::T, FVar::U)
            .rename_var(FVar::S, FVar::T)
            .rename_var(FVar::U, FVar::S);
        report.record(
            suite,
            &format!("interchange[{label}]"),
            d == swapped,
            format!("bidegree ≤ {check_cap}"),
        );
        Ok(())
    }

    /// Squaring axiom: evaluation at t = 0 is the Frobenius.
    pub fn squaring_check(&self, a: &GradedPolynomial) -> Result<bool> {
        let u = self.qt_eval(a, 0)?;
        Ok(u.coeff1(0) == a.square()?)
    }

    /// Factor-wise structure on left ⊗ right.
    pub fn tensor(left: &QRingSpec, right: &QRingSpec) -> Result<QRingSpec> {
        let carrier = GradedAlphabet::tensor(&[&left.carrier, &right.carrier])?;
        let embed_l = PolyHom::embedding(&left.carrier, &carrier, 0)?;
        let embed_r = PolyHom::embedding(&right.carrier, &carrier, 1)?;
        let left_factors = left.carrier.factors();
        let mut table = BTreeMap::new();
        for (id, info) in carrier.vars() {
            let (spec, embed, local) = if info.factor < left_factors {
                (left, &embed_l, left.carrier.locate(info.factor, &info.name))
            } else {
                (
                    right,
                    &embed_r,
                    right.carrier.locate(info.factor - left_factors, &info.name),
                )
            };
            let Some(v) = local else { continue };
            if let Some(series) = spec.table.get(&v) {
                table.insert(id, series.map_coeffs(embed)?);
            }
        }
        Ok(QRingSpec { carrier, table })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::HopfKind;

    fn milnor_spec(hopf_cap: u32, solve_cap: u32) -> QRingSpec {
        let h = HopfPresentation::milnor(hopf_cap).unwrap();
        solve_generator_qstructure(&h, solve_cap).unwrap()
    }

    #[test]
    fn milnor_leading_entry_is_closed_form() {
        let h = HopfPresentation::milnor(15).unwrap();
        let spec = solve_generator_qstructure(&h, 16).unwrap();
        let xi0 = h.gen_var(0).unwrap();
        let q0 = spec.entry(xi0).unwrap();
        assert_eq!(q0.coeff1(0).display(), "ξ0^2");
        assert_eq!(q0.coeff1(1).display(), "ξ0·ξ1");
        assert_eq!(q0.coeff1(3).display(), "ξ0·ξ2");
        assert_eq!(q0.coeff1(7).display(), "ξ0·ξ3");
        for k in [2u16, 4, 5, 6] {
            assert!(q0.coeff1(k).is_zero(), "t^{k} should vanish");
        }
    }

    #[test]
    fn milnor_second_entry() {
        let h = HopfPresentation::milnor(15).unwrap();
        let spec = solve_generator_qstructure(&h, 16).unwrap();
        let xi1 = h.gen_var(1).unwrap();
        let q1 = spec.entry(xi1).unwrap();
        assert_eq!(q1.coeff1(0).display(), "ξ1^2");
        assert_eq!(q1.coeff1(1).display(), "ξ0·ξ2");
        assert_eq!(q1.coeff1(2).display(), "ξ1·ξ2");
    }

    #[test]
    fn faa_di_bruno_leading_entry() {
        let h = HopfPresentation::faa_di_bruno(8).unwrap();
        let spec = solve_generator_qstructure(&h, 9).unwrap();
        let h0 = h.gen_var(0).unwrap();
        let q0 = spec.entry(h0).unwrap();
        // c_0(t)·t = h_0·h(t), so the k-th coefficient is h_0·h_k
        assert_eq!(q0.coeff1(0).display(), "h0^2");
        assert_eq!(q0.coeff1(1).display(), "h0·h1");
        assert_eq!(q0.coeff1(2).display(), "h0·h2");
        assert_eq!(q0.coeff1(3).display(), "h0·h3");
    }

    #[test]
    fn evaluation_is_multiplicative_and_squares_at_zero() {
        let h = HopfPresentation::milnor(7).unwrap();
        let spec = solve_generator_qstructure(&h, 8).unwrap();
        let a = h.alphabet();
        let xi0 = GradedPolynomial::variable(a, h.gen_var(0).unwrap());
        let xi1 = GradedPolynomial::variable(a, h.gen_var(1).unwrap());
        let sum = xi0.add(&xi1).unwrap();
        assert!(spec.squaring_check(&sum).unwrap());

        let sq = spec.qt_eval(&xi0.mul(&xi0).unwrap(), 4).unwrap();
        let direct = spec.qt_eval(&xi0, 4).unwrap();
        assert_eq!(sq, direct.mul(&direct).unwrap());

        // Laurent: the inverse generator evaluates to the series inverse
        let inv_mono = crate::f2series::Monomial::new(a, &[(h.gen_var(0).unwrap(), -1)]).unwrap();
        let inv = GradedPolynomial::monomial(a, inv_mono);
        let prod = spec
            .qt_eval(&xi0, 4)
            .unwrap()
            .mul(&spec.qt_eval(&inv, 4).unwrap())
            .unwrap();
        let one = PowerSeries::constant(GradedPolynomial::one(a), &[FVar::T], 4);
        assert_eq!(prod, one);
    }

    #[test]
    fn interchange_symmetry_and_negative_control() {
        let h = HopfPresentation::milnor(15).unwrap();
        let spec = solve_generator_qstructure(&h, 18).unwrap();
        let a = h.alphabet();
        let xi0 = GradedPolynomial::variable(a, h.gen_var(0).unwrap());
        let mut report = Report::new();
        spec.interchange_check(&xi0, 8, "q", "ξ0", &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.to_text());

        // perturb one coefficient of Q_t(ξ1): symmetry must break
        let mut bad = spec.clone();
        let xi1 = h.gen_var(1).unwrap();
        let mut series = bad.table[&xi1].clone();
        let mut c1 = series.coeff1(1);
        c1 = c1
            .add(&GradedPolynomial::variable(a, h.gen_var(0).unwrap()).square().unwrap())
            .unwrap();
        series.set_coefficient(&[1], c1);
        bad.table.insert(xi1, series);
        let xi1_poly = GradedPolynomial::variable(a, xi1);
        let mut bad_report = Report::new();
        bad.interchange_check(&xi1_poly, 6, "q", "ξ1-perturbed", &mut bad_report)
            .unwrap();
        assert!(!bad_report.all_pass());
    }

    #[test]
    fn tensor_structure_acts_factorwise() {
        let hm = HopfPresentation::milnor(7).unwrap();
        let hb = HopfPresentation::faa_di_bruno(7).unwrap();
        assert_eq!(hb.kind(), HopfKind::FaaDiBruno);
        let qm = solve_generator_qstructure(&hm, 8).unwrap();
        let qb = solve_generator_qstructure(&hb, 8).unwrap();
        let qt = QRingSpec::tensor(&qb, &qm).unwrap();

        // Q_t(h1 ⊗ 1) = Q_t(h1) ⊗ 1
        let h1t = qt.carrier.locate(0, "h1").unwrap();
        let h1 = hb.gen_var(1).unwrap();
        let embed = PolyHom::embedding(hb.alphabet(), &qt.carrier, 0).unwrap();
        assert_eq!(
            *qt.entry(h1t).unwrap(),
            qb.entry(h1).unwrap().map_coeffs(&embed).unwrap()
        );
        // and Q_t(1 ⊗ ξ1) = 1 ⊗ Q_t(ξ1)
        let xi1t = qt.carrier.locate(1, "ξ1").unwrap();
        let xi1 = hm.gen_var(1).unwrap();
        let embed_r = PolyHom::embedding(hm.alphabet(), &qt.carrier, 1).unwrap();
        assert_eq!(
            *qt.entry(xi1t).unwrap(),
            qm.entry(xi1).unwrap().map_coeffs(&embed_r).unwrap()
        );
    }

    #[test]
    fn milnor_spec_via_helper() {
        let spec = milnor_spec(7, 8);
        assert_eq!(spec.table.len(), 3);
    }
}
