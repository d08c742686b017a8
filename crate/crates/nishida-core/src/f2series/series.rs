//! Power series in a few formal variables, truncated at a total-degree cap.
//!
//! Coefficients are `GradedPolynomial`s and are never truncated themselves;
//! only the formal degree is capped. Every arithmetic operation re-truncates
//! at the cap of its operands (which must agree), so a series is always an
//! honest representative of its class modulo formal degree > cap.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::alphabet::GradedAlphabet;
use super::poly::{GradedPolynomial, PolyHom};
use crate::error::{Error, Result};

/// The fixed pool of formal variable names, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FVar {
    X,
    Y,
    S,
    T,
    U,
}

impl FVar {
    pub fn name(self) -> &'static str {
        match self {
            FVar::X => "x",
            FVar::Y => "y",
            FVar::S => "s",
            FVar::T => "t",
            FVar::U => "u",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    alphabet: Arc<GradedAlphabet>,
    vars: Vec<FVar>,
    cap: u32,
    coeffs: BTreeMap<Vec<u16>, GradedPolynomial>,
}

impl PowerSeries {
    pub fn zero(alphabet: &Arc<GradedAlphabet>, vars: &[FVar], cap: u32) -> Self {
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        PowerSeries {
            alphabet: alphabet.clone(),
            vars,
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(poly: GradedPolynomial, vars: &[FVar], cap: u32) -> Self {
        let mut s = PowerSeries::zero(poly.alphabet(), vars, cap);
        if !poly.is_zero() {
            s.coeffs.insert(vec![0; s.vars.len()], poly);
        }
        s
    }

    /// The series consisting of the bare formal variable `v`.
    pub fn formal_var(alphabet: &Arc<GradedAlphabet>, v: FVar, vars: &[FVar], cap: u32) -> Self {
        let mut s = PowerSeries::zero(alphabet, vars, cap);
        let idx = s.var_index(v).expect("requested variable not in list");
        if cap >= 1 {
            let mut key = vec![0u16; s.vars.len()];
            key[idx] = 1;
            s.coeffs.insert(key, GradedPolynomial::one(alphabet));
        }
        s
    }

    pub fn alphabet(&self) -> &Arc<GradedAlphabet> {
        &self.alphabet
    }

    pub fn vars(&self) -> &[FVar] {
        &self.vars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn var_index(&self, v: FVar) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &GradedPolynomial)> {
        self.coeffs.iter()
    }

    fn total(key: &[u16]) -> u32 {
        key.iter().map(|&e| e as u32).sum()
    }

    /// Coefficient at the exponent tuple aligned with `vars()`.
    pub fn coefficient(&self, key: &[u16]) -> GradedPolynomial {
        self.coeffs
            .get(key)
            .cloned()
            .unwrap_or_else(|| GradedPolynomial::zero(&self.alphabet))
    }

    /// Coefficient of `v^k` in a univariate series.
    pub fn coeff1(&self, k: u16) -> GradedPolynomial {
        assert_eq!(self.vars.len(), 1, "coeff1 wants a univariate series");
        self.coefficient(&[k])
    }

    pub fn set_coefficient(&mut self, key: &[u16], poly: GradedPolynomial) {
        assert_eq!(key.len(), self.vars.len());
        if Self::total(key) > self.cap {
            return;
        }
        if poly.is_zero() {
            self.coeffs.remove(key);
        } else {
            self.coeffs.insert(key.to_vec(), poly);
        }
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if !GradedAlphabet::same(&self.alphabet, &other.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        if self.cap != other.cap {
            return Err(Error::CapMismatch {
                left: self.cap,
                right: other.cap,
            });
        }
        Ok(())
    }

    /// Rewrite over the union of the two variable lists.
    fn align(&self, vars: &[FVar]) -> PowerSeries {
        if self.vars == vars {
            return self.clone();
        }
        let mut out = PowerSeries::zero(&self.alphabet, vars, self.cap);
        let positions: Vec<usize> = self
            .vars
            .iter()
            .map(|v| out.var_index(*v).expect("align target misses a variable"))
            .collect();
        for (key, poly) in &self.coeffs {
            let mut new_key = vec![0u16; vars.len()];
            for (i, &e) in key.iter().enumerate() {
                new_key[positions[i]] = e;
            }
            out.coeffs.insert(new_key, poly.clone());
        }
        out
    }

    fn union_vars(&self, other: &Self) -> Vec<FVar> {
        let mut vars = self.vars.clone();
        vars.extend_from_slice(&other.vars);
        vars.sort();
        vars.dedup();
        vars
    }

    /// Present the same series over a larger variable list.
    pub fn with_vars(&self, vars: &[FVar]) -> PowerSeries {
        let mut all = vars.to_vec();
        all.extend_from_slice(&self.vars);
        all.sort();
        all.dedup();
        self.align(&all)
    }

    /// Lower the cap (never raises it).
    pub fn truncated(&self, cap: u32) -> PowerSeries {
        let mut out = self.clone();
        out.cap = cap.min(self.cap);
        out.coeffs.retain(|k, _| Self::total(k) <= out.cap);
        out
    }

    pub fn add(&self, other: &Self) -> Result<PowerSeries> {
        self.check_compat(other)?;
        let vars = self.union_vars(other);
        let a = self.align(&vars);
        let b = other.align(&vars);
        let mut out = PowerSeries::zero(&self.alphabet, &vars, self.cap);
        for (key, poly) in a.coeffs.iter().chain(b.coeffs.iter()) {
            let merged = match out.coeffs.get(key) {
                Some(existing) => existing.add(poly)?,
                None => poly.clone(),
            };
            if merged.is_zero() {
                out.coeffs.remove(key);
            } else {
                out.coeffs.insert(key.clone(), merged);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<PowerSeries> {
        self.check_compat(other)?;
        let vars = self.union_vars(other);
        let a = self.align(&vars);
        let b = other.align(&vars);
        let mut out = PowerSeries::zero(&self.alphabet, &vars, self.cap);
        for (ka, pa) in &a.coeffs {
            for (kb, pb) in &b.coeffs {
                let key: Vec<u16> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                if Self::total(&key) > self.cap {
                    continue;
                }
                let prod = pa.mul(pb)?;
                if prod.is_zero() {
                    continue;
                }
                let merged = match out.coeffs.get(&key) {
                    Some(existing) => existing.add(&prod)?,
                    None => prod,
                };
                if merged.is_zero() {
                    out.coeffs.remove(&key);
                } else {
                    out.coeffs.insert(key, merged);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_poly(&self, poly: &GradedPolynomial) -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(&self.alphabet, &self.vars, self.cap);
        for (key, p) in &self.coeffs {
            let prod = p.mul(poly)?;
            if !prod.is_zero() {
                out.coeffs.insert(key.clone(), prod);
            }
        }
        Ok(out)
    }

    /// Frobenius square: exponent tuples double, coefficients square.
    pub fn square(&self) -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(&self.alphabet, &self.vars, self.cap);
        for (key, poly) in &self.coeffs {
            let key2: Vec<u16> = key.iter().map(|&e| e * 2).collect();
            if Self::total(&key2) > self.cap {
                continue;
            }
            out.coeffs.insert(key2, poly.square()?);
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<PowerSeries> {
        let mut result = PowerSeries::constant(
            GradedPolynomial::one(&self.alphabet),
            &self.vars,
            self.cap,
        );
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.square()?;
            }
        }
        Ok(result)
    }

    pub fn constant_term(&self) -> GradedPolynomial {
        self.coefficient(&vec![0u16; self.vars.len()])
    }

    /// Lowest exponent of `v` over all terms; `None` for zero series.
    pub fn order_in(&self, v: FVar) -> Option<u16> {
        let idx = self.var_index(v)?;
        self.coeffs.keys().map(|k| k[idx]).min()
    }

    /// Substitute a series for the formal variable `v`. The replacement must
    /// have zero constant term so the result is cap-exact.
    pub fn substitute(&self, v: FVar, replacement: &PowerSeries) -> Result<PowerSeries> {
        if !GradedAlphabet::same(&self.alphabet, &replacement.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        if self.cap != replacement.cap {
            return Err(Error::CapMismatch {
                left: self.cap,
                right: replacement.cap,
            });
        }
        if !replacement.constant_term().is_zero() {
            return Err(Error::ConstantTerm);
        }
        let idx = match self.var_index(v) {
            Some(i) => i,
            None => return Ok(self.clone()),
        };
        let mut rest_vars: Vec<FVar> = self.vars.clone();
        rest_vars.remove(idx);
        let mut out_vars = rest_vars.clone();
        out_vars.extend_from_slice(&replacement.vars);
        out_vars.sort();
        out_vars.dedup();
        if out_vars.is_empty() {
            out_vars = replacement.vars.clone();
        }

        // group terms by the exponent of v
        let mut by_exp: BTreeMap<u16, Vec<(Vec<u16>, &GradedPolynomial)>> = BTreeMap::new();
        for (key, poly) in &self.coeffs {
            let e = key[idx];
            let mut rest = key.clone();
            rest.remove(idx);
            by_exp.entry(e).or_default().push((rest, poly));
        }

        let mut out = PowerSeries::zero(&self.alphabet, &out_vars, self.cap);
        let mut power = PowerSeries::constant(
            GradedPolynomial::one(&self.alphabet),
            &replacement.vars,
            self.cap,
        );
        let mut current_exp: u16 = 0;
        for (e, group) in by_exp {
            while current_exp < e {
                power = power.mul(replacement)?;
                current_exp += 1;
            }
            for (rest, poly) in group {
                let mut partial = PowerSeries::zero(&self.alphabet, &rest_vars, self.cap);
                partial.coeffs.insert(rest, (*poly).clone());
                out = out.add(&partial.mul(&power)?)?;
            }
        }
        Ok(out)
    }

    /// Composition f∘g = f(g(·)) for univariate f; g is applied first.
    pub fn compose(&self, inner: &PowerSeries) -> Result<PowerSeries> {
        if self.vars.len() != 1 {
            return Err(Error::NotUnivariate);
        }
        self.substitute(self.vars[0], inner)
    }

    /// Compositional inverse of a univariate series `c·v + O(v²)` where `c`
    /// is an invertible monomial. The inverse is expressed in the same
    /// variable.
    pub fn comp_inverse(&self) -> Result<PowerSeries> {
        if self.vars.len() != 1 {
            return Err(Error::NotUnivariate);
        }
        let v = self.vars[0];
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm);
        }
        let lead = self.coefficient(&[1]);
        if lead.terms().len() != 1 || !lead.terms()[0].invertible(&self.alphabet) {
            return Err(Error::NonInvertibleLeading);
        }
        let lead_inv = lead.pow(-1)?;

        let mut g = PowerSeries::zero(&self.alphabet, &[v], self.cap);
        g.set_coefficient(&[1], lead_inv.clone());
        for n in 2..=self.cap.min(u16::MAX as u32) as u16 {
            // defect of f(g) at degree n is linear in the unknown g_n
            let fg = self.compose(&g)?;
            let defect = fg.coefficient(&[n]);
            if defect.is_zero() {
                continue;
            }
            let correction = defect.mul(&lead_inv)?;
            g.set_coefficient(&[n], correction);
        }
        Ok(g)
    }

    /// Multiplicative inverse 1/f when the constant term is an invertible
    /// monomial.
    pub fn inverse(&self) -> Result<PowerSeries> {
        let c = self.constant_term();
        if c.terms().len() != 1 || !c.terms()[0].invertible(&self.alphabet) {
            return Err(Error::NonInvertibleLeading);
        }
        let c_inv = c.pow(-1)?;
        // 1/f = c⁻¹ · Σ (c⁻¹·(f - c))^k  (alternating signs vanish mod 2)
        let mut tail = self.clone();
        let zero_key = vec![0u16; self.vars.len()];
        tail.coeffs.remove(&zero_key);
        let scaled = tail.mul_poly(&c_inv)?;
        let mut acc = PowerSeries::constant(
            GradedPolynomial::one(&self.alphabet),
            &self.vars,
            self.cap,
        );
        let mut power = acc.clone();
        for _ in 0..self.cap {
            power = power.mul(&scaled)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.mul_poly(&c_inv)
    }

    /// Push every coefficient through a ring homomorphism.
    pub fn map_coeffs(&self, hom: &PolyHom) -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(hom.target(), &self.vars, self.cap);
        for (key, poly) in &self.coeffs {
            let image = hom.apply(poly)?;
            if !image.is_zero() {
                out.coeffs.insert(key.clone(), image);
            }
        }
        Ok(out)
    }

    /// Rename a formal variable (the new name must not already occur).
    pub fn rename_var(&self, from: FVar, to: FVar) -> PowerSeries {
        assert!(self.var_index(to).is_none(), "target variable already used");
        let Some(idx) = self.var_index(from) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars[idx] = to;
        let order: Vec<usize> = {
            let mut ixs: Vec<usize> = (0..vars.len()).collect();
            ixs.sort_by_key(|&i| vars[i]);
            ixs
        };
        let sorted_vars: Vec<FVar> = order.iter().map(|&i| vars[i]).collect();
        let mut out = PowerSeries::zero(&self.alphabet, &sorted_vars, self.cap);
        for (key, poly) in &self.coeffs {
            let new_key: Vec<u16> = order.iter().map(|&i| key[i]).collect();
            out.coeffs.insert(new_key, poly.clone());
        }
        out
    }

    /// Extract the slice at `v^k` as a series in the remaining variables.
    pub fn slice(&self, v: FVar, k: u16) -> PowerSeries {
        let idx = self.var_index(v).expect("slice variable not present");
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(idx);
        let mut out = PowerSeries::zero(&self.alphabet, &rest_vars, self.cap);
        for (key, poly) in &self.coeffs {
            if key[idx] != k {
                continue;
            }
            let mut rest = key.clone();
            rest.remove(idx);
            out.coeffs.insert(rest, poly.clone());
        }
        out
    }

    /// Divide by `v^k`, splitting off whatever is not divisible.
    /// Returns `(quotient, remainder)` with `self = v^k·quotient + remainder`.
    pub fn shift_down(&self, v: FVar, k: u16) -> (PowerSeries, PowerSeries) {
        let idx = self.var_index(v).expect("shift variable not present");
        let mut quotient = PowerSeries::zero(&self.alphabet, &self.vars, self.cap);
        let mut remainder = PowerSeries::zero(&self.alphabet, &self.vars, self.cap);
        for (key, poly) in &self.coeffs {
            if key[idx] >= k {
                let mut new_key = key.clone();
                new_key[idx] -= k;
                quotient.coeffs.insert(new_key, poly.clone());
            } else {
                remainder.coeffs.insert(key.clone(), poly.clone());
            }
        }
        (quotient, remainder)
    }

    /// Common value of (coefficient grade − formal degree) over all terms,
    /// when defined. Homogeneous constructions keep this balance constant.
    pub fn balance(&self) -> Option<i64> {
        let mut value: Option<i64> = None;
        for (key, poly) in &self.coeffs {
            let g = poly.grade()? as i64;
            let b = g - Self::total(key) as i64;
            match value {
                None => value = Some(b),
                Some(v) if v == b => {}
                _ => return None,
            }
        }
        value
    }

    /// Serialize a univariate series as `[[exponent, coefficient-string]]`.
    pub fn to_json_univariate(&self) -> serde_json::Value {
        assert_eq!(self.vars.len(), 1);
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|(k, p)| serde_json::json!([k[0], p.display()]))
                .collect(),
        )
    }

    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Vec<u16>> = self.coeffs.keys().collect();
        keys.sort_by_key(|k| (Self::total(k), (*k).clone()));
        keys.iter()
            .map(|key| {
                let poly = &self.coeffs[*key];
                let formal: Vec<String> = key
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            self.vars[i].name().to_string()
                        } else {
                            format!("{}^{}", self.vars[i].name(), e)
                        }
                    })
                    .collect();
                if formal.is_empty() {
                    poly.display()
                } else if poly.is_one() {
                    formal.join("·")
                } else if poly.len() == 1 {
                    format!("{}·{}", poly.display(), formal.join("·"))
                } else {
                    format!("({})·{}", poly.display(), formal.join("·"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2series::alphabet::GradedAlphabet;

    fn alph() -> Arc<GradedAlphabet> {
        GradedAlphabet::build(&[("c0", 0), ("c1", 1), ("c2", 3)], Some("c0"), -64).unwrap()
    }

    fn var_series(a: &Arc<GradedAlphabet>, name: &str, exp: u16, cap: u32) -> PowerSeries {
        let mut s = PowerSeries::zero(a, &[FVar::X], cap);
        s.set_coefficient(&[exp], GradedPolynomial::variable(a, a.var(name).unwrap()));
        s
    }

    #[test]
    fn mul_truncates_at_cap() {
        let a = alph();
        let x = PowerSeries::formal_var(&a, FVar::X, &[FVar::X], 3);
        let x2 = x.mul(&x).unwrap();
        assert_eq!(x2.coefficient(&[2]), GradedPolynomial::one(&a));
        let x4 = x2.mul(&x2).unwrap();
        assert!(x4.is_zero());
    }

    #[test]
    fn compose_simple() {
        let a = alph();
        // f = x², g = c0·x + c1·x² ⇒ f(g) = c0²x² + c1²x⁴ (Frobenius)
        let f = PowerSeries::formal_var(&a, FVar::X, &[FVar::X], 8)
            .pow(2)
            .unwrap();
        let g = var_series(&a, "c0", 1, 8)
            .add(&var_series(&a, "c1", 2, 8))
            .unwrap();
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.coefficient(&[2]).display(), "c0^2");
        assert_eq!(fg.coefficient(&[3]).display(), "0");
        assert_eq!(fg.coefficient(&[4]).display(), "c1^2");
    }

    #[test]
    fn substitute_bivariate() {
        let a = alph();
        // F(x) = x² substituted with x := x + t gives x² + t²
        let f = PowerSeries::formal_var(&a, FVar::X, &[FVar::X], 6)
            .pow(2)
            .unwrap();
        let xt = PowerSeries::formal_var(&a, FVar::X, &[FVar::X, FVar::T], 6)
            .add(&PowerSeries::formal_var(&a, FVar::T, &[FVar::X, FVar::T], 6))
            .unwrap();
        let g = f.substitute(FVar::X, &xt).unwrap();
        assert_eq!(g.coefficient(&[2, 0]), GradedPolynomial::one(&a));
        assert_eq!(g.coefficient(&[0, 2]), GradedPolynomial::one(&a));
        assert!(g.coefficient(&[1, 1]).is_zero());
    }

    #[test]
    fn comp_inverse_roundtrip() {
        let a = alph();
        let f = var_series(&a, "c0", 1, 8)
            .add(&var_series(&a, "c1", 2, 8))
            .unwrap()
            .add(&var_series(&a, "c2", 4, 8))
            .unwrap();
        let g = f.comp_inverse().unwrap();
        let x = PowerSeries::formal_var(&a, FVar::X, &[FVar::X], 8);
        assert_eq!(f.compose(&g).unwrap(), x);
        assert_eq!(g.compose(&f).unwrap(), x);
        // inverse of c0·x + c1·x² + c2·x⁴: frozen low coefficients
        assert_eq!(g.coefficient(&[1]).display(), "c0^-1");
        assert_eq!(g.coefficient(&[2]).display(), "c0^-3·c1");
        assert_eq!(g.coefficient(&[3]).display(), "0");
        assert_eq!(g.coefficient(&[4]).display(), "c0^-5·c2 + c0^-7·c1^3");
    }

    #[test]
    fn mult_inverse() {
        let a = alph();
        let f = PowerSeries::constant(
            GradedPolynomial::variable(&a, a.var("c0").unwrap()),
            &[FVar::T],
            6,
        )
        .add(&var_series(&a, "c1", 1, 6).rename_var(FVar::X, FVar::T))
        .unwrap();
        let inv = f.inverse().unwrap();
        let one = PowerSeries::constant(GradedPolynomial::one(&a), &[FVar::T], 6);
        assert_eq!(f.mul(&inv).unwrap(), one);
    }

    #[test]
    fn balance_tracks_homogeneity() {
        let a = alph();
        // c1·x² + c2·x⁴ has balance −1 (grade 1 at x², grade 3 at x⁴)
        let s = var_series(&a, "c1", 2, 8)
            .add(&var_series(&a, "c2", 4, 8))
            .unwrap();
        assert_eq!(s.balance(), Some(-1));
        let bad = s.add(&var_series(&a, "c1", 3, 8)).unwrap();
        assert_eq!(bad.balance(), None);
    }
}
