//! Multivariate Laurent polynomials over F2.
//!
//! A polynomial is a set of monomials: every present monomial has
//! coefficient 1, addition is symmetric difference, and squaring is the
//! Frobenius map (exponent doubling, no cross terms). Only the invertible
//! variable of the alphabet may carry negative exponents, bounded below by
//! the alphabet's Laurent floor; crossing the floor is an error, never a
//! truncation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::alphabet::{GradedAlphabet, VarId};
use crate::error::{Error, Result};

/// Exponent vector, sorted by variable id with no zero entries.
/// Grade and weight are cached; they follow from the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    exps: Vec<(VarId, i32)>,
    grade: u32,
    weight: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            exps: Vec::new(),
            grade: 0,
            weight: 0,
        }
    }

    pub fn new(alphabet: &GradedAlphabet, exps: &[(VarId, i32)]) -> Result<Self> {
        let mut sorted: Vec<(VarId, i32)> = exps.iter().copied().filter(|e| e.1 != 0).collect();
        sorted.sort_by_key(|e| e.0);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateVariable(
                    alphabet.info(w[0].0).name.clone(),
                ));
            }
        }
        let mut m = Monomial {
            exps: sorted,
            grade: 0,
            weight: 0,
        };
        m.validate_and_cache(alphabet)?;
        Ok(m)
    }

    fn validate_and_cache(&mut self, alphabet: &GradedAlphabet) -> Result<()> {
        let mut grade: i64 = 0;
        let mut weight: i64 = 0;
        for &(v, e) in &self.exps {
            let info = alphabet.info(v);
            if e < 0 {
                if !info.invertible {
                    return Err(Error::NegativeExponent {
                        var: info.name.clone(),
                        exp: e,
                    });
                }
                if e < alphabet.laurent_floor() {
                    return Err(Error::LaurentBound {
                        var: info.name.clone(),
                        exp: e,
                        floor: alphabet.laurent_floor(),
                    });
                }
            }
            grade += info.grade as i64 * e as i64;
            weight += info.weight as i64 * e as i64;
        }
        debug_assert!(grade >= 0 && weight >= 0);
        self.grade = grade as u32;
        self.weight = weight as u32;
        Ok(())
    }

    pub fn exp(&self, v: VarId) -> i32 {
        self.exps
            .binary_search_by_key(&v, |e| e.0)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn exps(&self) -> &[(VarId, i32)] {
        &self.exps
    }

    pub fn grade(&self) -> u32 {
        self.grade
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Product of two exponent vectors.
    pub fn mul(&self, other: &Monomial, alphabet: &GradedAlphabet) -> Result<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() || j < other.exps.len() {
            let pick_left = j >= other.exps.len()
                || (i < self.exps.len() && self.exps[i].0 < other.exps[j].0);
            let pick_both =
                i < self.exps.len() && j < other.exps.len() && self.exps[i].0 == other.exps[j].0;
            if pick_both {
                let e = self.exps[i].1 + other.exps[j].1;
                if e != 0 {
                    exps.push((self.exps[i].0, e));
                }
                i += 1;
                j += 1;
            } else if pick_left {
                exps.push(self.exps[i]);
                i += 1;
            } else {
                exps.push(other.exps[j]);
                j += 1;
            }
        }
        let mut m = Monomial {
            exps,
            grade: 0,
            weight: 0,
        };
        m.validate_and_cache(alphabet)?;
        Ok(m)
    }

    /// Frobenius square: double every exponent.
    pub fn square(&self, alphabet: &GradedAlphabet) -> Result<Monomial> {
        self.pow(2, alphabet)
    }

    pub fn pow(&self, k: i32, alphabet: &GradedAlphabet) -> Result<Monomial> {
        if k < 0 && !self.invertible(alphabet) {
            return Err(Error::NonInvertibleLeading);
        }
        let mut m = Monomial {
            exps: self
                .exps
                .iter()
                .map(|&(v, e)| (v, e * k))
                .filter(|e| e.1 != 0)
                .collect(),
            grade: 0,
            weight: 0,
        };
        m.validate_and_cache(alphabet)?;
        Ok(m)
    }

    /// True when every variable occurring is invertible.
    pub fn invertible(&self, alphabet: &GradedAlphabet) -> bool {
        self.exps.iter().all(|&(v, _)| alphabet.info(v).invertible)
    }

    /// Keep only the variables of the given tensor slot.
    pub fn restrict_factor(&self, alphabet: &GradedAlphabet, factor: u8) -> Monomial {
        let exps: Vec<_> = self
            .exps
            .iter()
            .copied()
            .filter(|&(v, _)| alphabet.info(v).factor == factor)
            .collect();
        let mut m = Monomial {
            exps,
            grade: 0,
            weight: 0,
        };
        m.validate_and_cache(alphabet).expect("restriction is valid");
        m
    }

    /// Canonical order: by grade, then earlier variables with higher
    /// exponents come first.
    pub fn canonical_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.grade.cmp(&other.grade) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (a, b) => {
                    let va = a.map(|e| e.0);
                    let vb = b.map(|e| e.0);
                    let v = match (va, vb) {
                        (Some(x), Some(y)) => x.min(y),
                        (Some(x), None) => x,
                        (None, Some(y)) => y,
                        (None, None) => unreachable!(),
                    };
                    let ea = if va == Some(v) { self.exps[i].1 } else { 0 };
                    let eb = if vb == Some(v) { other.exps[j].1 } else { 0 };
                    match eb.cmp(&ea) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                    if va == Some(v) {
                        i += 1;
                    }
                    if vb == Some(v) {
                        j += 1;
                    }
                }
            }
        }
    }

    pub fn display(&self, alphabet: &GradedAlphabet) -> String {
        if alphabet.factors() > 1 {
            let parts: Vec<String> = (0..alphabet.factors())
                .map(|f| {
                    let part = self.restrict_factor(alphabet, f);
                    part.display_flat(alphabet)
                })
                .collect();
            parts.join("⊗")
        } else {
            self.display_flat(alphabet)
        }
    }

    fn display_flat(&self, alphabet: &GradedAlphabet) -> String {
        if self.exps.is_empty() {
            return "1".to_string();
        }
        self.exps
            .iter()
            .map(|&(v, e)| {
                let name = &alphabet.info(v).name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

/// F2 polynomial: canonical sorted vector of distinct monomials.
#[derive(Clone, Debug)]
pub struct GradedPolynomial {
    alphabet: Arc<GradedAlphabet>,
    terms: Vec<Monomial>,
}

impl PartialEq for GradedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        GradedAlphabet::same(&self.alphabet, &other.alphabet) && self.terms == other.terms
    }
}
impl Eq for GradedPolynomial {}

impl GradedPolynomial {
    pub fn zero(alphabet: &Arc<GradedAlphabet>) -> Self {
        GradedPolynomial {
            alphabet: alphabet.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(alphabet: &Arc<GradedAlphabet>) -> Self {
        GradedPolynomial {
            alphabet: alphabet.clone(),
            terms: vec![Monomial::one()],
        }
    }

    pub fn variable(alphabet: &Arc<GradedAlphabet>, v: VarId) -> Self {
        let m = Monomial::new(alphabet, &[(v, 1)]).expect("single variable");
        GradedPolynomial {
            alphabet: alphabet.clone(),
            terms: vec![m],
        }
    }

    pub fn monomial(alphabet: &Arc<GradedAlphabet>, m: Monomial) -> Self {
        GradedPolynomial {
            alphabet: alphabet.clone(),
            terms: vec![m],
        }
    }

    pub fn from_monomials(alphabet: &Arc<GradedAlphabet>, terms: Vec<Monomial>) -> Self {
        let mut p = GradedPolynomial {
            alphabet: alphabet.clone(),
            terms,
        };
        p.normalize();
        p
    }

    /// Sort canonically and cancel equal pairs (characteristic 2).
    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.canonical_cmp(b));
        let mut out: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for m in self.terms.drain(..) {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        self.terms = out;
    }

    pub fn alphabet(&self) -> &Arc<GradedAlphabet> {
        &self.alphabet
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_alphabet(&self, other: &Self) -> Result<()> {
        if GradedAlphabet::same(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    /// Sum over F2: symmetric difference of term sets.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].canonical_cmp(&other.terms[j]) {
                std::cmp::Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    terms.push(other.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        Ok(GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        *self = self.add(other)?;
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b, &self.alphabet)?);
            }
        }
        let mut p = GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        };
        p.normalize();
        Ok(p)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for a in &self.terms {
            terms.push(a.mul(m, &self.alphabet)?);
        }
        let mut p = GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        };
        p.normalize();
        Ok(p)
    }

    /// Frobenius: squaring has no cross terms over F2.
    pub fn square(&self) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for m in &self.terms {
            terms.push(m.square(&self.alphabet)?);
        }
        Ok(GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        })
    }

    /// Integer power; negative powers require a single invertible monomial.
    pub fn pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            if self.terms.len() != 1 {
                return Err(Error::NonInvertibleLeading);
            }
            let m = self.terms[0].pow(k, &self.alphabet)?;
            return Ok(GradedPolynomial::monomial(&self.alphabet, m));
        }
        let mut result = GradedPolynomial::one(&self.alphabet);
        let mut base = self.clone();
        let mut k = k as u32;
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

    /// Common grade of all terms, if homogeneous. Zero is vacuously
    /// homogeneous and reports `None` only for mixed grades.
    pub fn grade(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|m| m.grade());
        let first = it.next()?;
        it.all(|g| g == first).then_some(first)
    }

    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|m| m.weight());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn max_grade(&self) -> u32 {
        self.terms.iter().map(|m| m.grade()).max().unwrap_or(0)
    }

    /// Keep only terms of the given grade.
    pub fn graded_part(&self, grade: u32) -> Self {
        GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .filter(|m| m.grade() == grade)
                .cloned()
                .collect(),
        }
    }

    /// Canonical JSON form: array of monomials, each a name→exponent map in
    /// alphabet order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|m| {
                    let mut map = serde_json::Map::new();
                    for &(v, e) in m.exps() {
                        map.insert(self.alphabet.info(v).name.clone(), json!(e));
                    }
                    Value::Object(map)
                })
                .collect(),
        )
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|m| m.display(&self.alphabet))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Ring homomorphism determined by images of variables. Images of
/// invertible variables must be invertible monomials so negative exponents
/// stay meaningful.
#[derive(Clone, Debug)]
pub struct PolyHom {
    source: Arc<GradedAlphabet>,
    target: Arc<GradedAlphabet>,
    images: BTreeMap<VarId, GradedPolynomial>,
}

impl PolyHom {
    pub fn new(source: &Arc<GradedAlphabet>, target: &Arc<GradedAlphabet>) -> Self {
        PolyHom {
            source: source.clone(),
            target: target.clone(),
            images: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, v: VarId, image: GradedPolynomial) -> Result<()> {
        let info = self.source.info(v);
        if info.invertible {
            let ok = image.terms().len() == 1 && image.terms()[0].invertible(&self.target);
            if !ok {
                return Err(Error::BadInvertibleImage(info.name.clone()));
            }
        }
        self.images.insert(v, image);
        Ok(())
    }

    /// Identity-on-names embedding into a tensor alphabet, shifting slots by
    /// `factor_offset`.
    pub fn embedding(
        source: &Arc<GradedAlphabet>,
        target: &Arc<GradedAlphabet>,
        factor_offset: u8,
    ) -> Result<Self> {
        let mut hom = PolyHom::new(source, target);
        for (v, info) in source.vars() {
            let tv = target
                .locate(info.factor + factor_offset, &info.name)
                .ok_or_else(|| Error::UnknownVariable(info.name.clone()))?;
            hom.images
                .insert(v, GradedPolynomial::variable(target, tv));
        }
        Ok(hom)
    }

    pub fn source(&self) -> &Arc<GradedAlphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedAlphabet> {
        &self.target
    }

    pub fn apply(&self, p: &GradedPolynomial) -> Result<GradedPolynomial> {
        if !GradedAlphabet::same(p.alphabet(), &self.source) {
            return Err(Error::AlphabetMismatch);
        }
        let mut acc = GradedPolynomial::zero(&self.target);
        for m in p.terms() {
            let mut term = GradedPolynomial::one(&self.target);
            for &(v, e) in m.exps() {
                let image = self
                    .images
                    .get(&v)
                    .ok_or_else(|| Error::MissingImage(self.source.info(v).name.clone()))?;
                term = term.mul(&image.pow(e)?)?;
            }
            acc.add_assign(&term)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn milnor_like() -> Arc<GradedAlphabet> {
        GradedAlphabet::build(&[("g0", 0), ("g1", 1), ("g2", 3)], Some("g0"), -64).unwrap()
    }

    #[test]
    fn xor_addition() {
        let a = milnor_like();
        let p = GradedPolynomial::variable(&a, a.var("g1").unwrap());
        let q = GradedPolynomial::variable(&a, a.var("g2").unwrap());
        let s = p.add(&q).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.add(&s).unwrap().is_zero());
        assert_eq!(p.add(&p).unwrap(), GradedPolynomial::zero(&a));
    }

    #[test]
    fn frobenius_square() {
        let a = milnor_like();
        let p = GradedPolynomial::variable(&a, a.var("g0").unwrap())
            .add(&GradedPolynomial::variable(&a, a.var("g1").unwrap()))
            .unwrap();
        let sq = p.square().unwrap();
        assert_eq!(sq.len(), 2);
        assert_eq!(sq, p.mul(&p).unwrap());
        assert_eq!(sq.display(), "g0^2 + g1^2");
    }

    #[test]
    fn laurent_rules() {
        let a = milnor_like();
        let g0 = a.var("g0").unwrap();
        let g1 = a.var("g1").unwrap();
        let inv = Monomial::new(&a, &[(g0, -3)]).unwrap();
        assert_eq!(inv.grade(), 0);
        assert!(Monomial::new(&a, &[(g1, -1)]).is_err());
        assert!(Monomial::new(&a, &[(g0, -65)]).is_err());
        let p = GradedPolynomial::monomial(&a, inv);
        assert_eq!(p.pow(-1).unwrap().display(), "g0^3");
    }

    #[test]
    fn canonical_display_order() {
        let a = milnor_like();
        let g0 = a.var("g0").unwrap();
        let g1 = a.var("g1").unwrap();
        let g2 = a.var("g2").unwrap();
        let m1 = Monomial::new(&a, &[(g0, -3), (g1, 1)]).unwrap();
        let m2 = Monomial::new(&a, &[(g2, 1)]).unwrap();
        let p = GradedPolynomial::from_monomials(&a, vec![m2, m1]);
        assert_eq!(p.display(), "g0^-3·g1 + g2");
        assert_eq!(p.grade(), None);
        assert_eq!(p.graded_part(1).grade(), Some(1));
    }

    #[test]
    fn hom_respects_laurent() {
        let a = milnor_like();
        let t = GradedAlphabet::tensor(&[&a, &a]).unwrap();
        let g0 = a.var("g0").unwrap();
        let mut hom = PolyHom::new(&a, &t);
        // g0 ↦ g0⊗g0 is an invertible monomial, fine
        let left = t.locate(0, "g0").unwrap();
        let right = t.locate(1, "g0").unwrap();
        let image = GradedPolynomial::monomial(
            &t,
            Monomial::new(&t, &[(left, 1), (right, 1)]).unwrap(),
        );
        hom.set(g0, image).unwrap();
        let p = GradedPolynomial::monomial(&a, Monomial::new(&a, &[(g0, -2)]).unwrap());
        let q = hom.apply(&p).unwrap();
        assert_eq!(q.display(), "g0^-2⊗g0^-2");

        // a non-monomial image for an invertible variable is rejected
        let bad = GradedPolynomial::one(&t)
            .add(&GradedPolynomial::variable(&t, t.locate(1, "g1").unwrap()))
            .unwrap();
        assert!(hom.set(g0, bad).is_err());
    }
}
