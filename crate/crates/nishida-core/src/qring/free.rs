//! Free operation rings: monomials in formal words Q_{i_1}…Q_{i_k}(gen)
//! with scalar coefficients, modulo the relations forced by the axioms.
//! Nothing is transcribed: the squaring relation Q_0(a) = a² and the
//! symmetrized double applications with the extension Q_s(t) = t·F(t,s)
//! are generated per word, closed under multiples and Q_i, and row
//! reduced per bidegree. The scalar engine is F2 for the additive case
//! and the Lazard model for the formal-group case.
//!
//! Column order puts monomials with more word factors first, so echelon
//! pivots rewrite products toward words; surviving basis terms are
//! square-free products of irreducible words.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2series::{
    FVar, GradedAlphabet, GradedPolynomial, Monomial, PolyHom, PowerSeries, VarId, VarInfo,
};
use crate::fgl::LazardModel;
use crate::linalg::F2Matrix;
use crate::qring::QRingSpec;

/// Degree and index into the scalar ring's degreewise basis.
pub type Scalar = (u32, usize);

#[derive(Clone)]
pub enum ScalarEngine {
    Trivial,
    Model(Arc<LazardModel>),
}

fn odd_binomial(n: u32, k: u32) -> bool {
    k <= n && (k & (n - k)) == 0
}

impl ScalarEngine {
    pub fn dim(&self, degree: u32) -> usize {
        match self {
            ScalarEngine::Trivial => usize::from(degree == 0),
            ScalarEngine::Model(m) => {
                assert!(degree <= m.max_basis_degree(), "scalar degree beyond model");
                m.rank(degree)
            }
        }
    }

    pub fn unit(&self) -> Scalar {
        (0, 0)
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Result<Vec<Scalar>> {
        match self {
            ScalarEngine::Trivial => Ok(vec![(0, 0)]),
            ScalarEngine::Model(m) => m.mul_basis(a, b),
        }
    }

    pub fn name(&self, a: Scalar) -> String {
        match self {
            ScalarEngine::Trivial => "1".into(),
            ScalarEngine::Model(m) => m.basis(a.0).derivation(a.1).to_string(),
        }
    }

    pub fn polynomial(&self, a: Scalar) -> Option<GradedPolynomial> {
        match self {
            ScalarEngine::Trivial => None,
            ScalarEngine::Model(m) => Some(m.basis(a.0).element(a.1).clone()),
        }
    }

    /// Coefficients of (t·F(t,s))^i as scalar combinations, keyed by
    /// (s-exponent, t-exponent), complete through total degree cap.
    fn tf_power(&self, i: u32, cap: u32) -> Result<BTreeMap<(u32, u32), Vec<Scalar>>> {
        let mut out = BTreeMap::new();
        match self {
            ScalarEngine::Trivial => {
                // (t(t+s))^i = Σ_r C(i,r) s^r t^{2i−r}
                if 2 * i <= cap {
                    for r in 0..=i {
                        if odd_binomial(i, r) {
                            out.insert((r, 2 * i - r), vec![(0, 0)]);
                        }
                    }
                }
            }
            ScalarEngine::Model(m) => {
                let f_ts = m
                    .f()
                    .truncated(cap)
                    .rename_var(FVar::X, FVar::T)
                    .rename_var(FVar::Y, FVar::S);
                let t = PowerSeries::formal_var(m.alphabet(), FVar::T, &[FVar::S, FVar::T], cap);
                let tf = t.mul(&f_ts)?;
                let p = tf.pow(i)?;
                for (key, poly) in p.terms() {
                    // vars sorted [S, T]
                    let (s_exp, t_exp) = (key[0] as u32, key[1] as u32);
                    let grade = s_exp + t_exp - 2 * i;
                    let combo = m.express(grade, poly)?;
                    if !combo.is_empty() {
                        out.insert((s_exp, t_exp), combo.into_iter().map(|k| (grade, k)).collect());
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Total-operation values on the scalar basis: row k of an entry is D_k
/// of that basis element as a basis combination. Row 0 is the square; the
/// row count is one past the reliable t-precision.
#[derive(Clone, Default)]
pub struct ScalarDt {
    entries: BTreeMap<Scalar, Vec<Vec<Scalar>>>,
}

impl ScalarDt {
    pub fn insert(&mut self, s: Scalar, rows: Vec<Vec<Scalar>>) {
        self.entries.insert(s, rows);
    }

    pub fn rows(&self, s: Scalar) -> Option<&[Vec<Scalar>]> {
        self.entries.get(&s).map(Vec::as_slice)
    }
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub name: String,
    pub degree: u32,
    pub weight: u32,
}

/// Operation indices outermost first; degree folds from the inside as
/// d ↦ 2d + i, weight doubles per operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Word {
    pub gen: usize,
    pub ops: Vec<u32>,
}

impl Word {
    pub fn bare(gen: usize) -> Self {
        Word { gen, ops: Vec::new() }
    }

    pub fn prepend(&self, i: u32) -> Word {
        let mut ops = Vec::with_capacity(self.ops.len() + 1);
        ops.push(i);
        ops.extend_from_slice(&self.ops);
        Word { gen: self.gen, ops }
    }

    pub fn degree(&self, gens: &[GenSpec]) -> u32 {
        let mut d = gens[self.gen].degree;
        for &i in self.ops.iter().rev() {
            d = 2 * d + i;
        }
        d
    }

    pub fn weight(&self, gens: &[GenSpec]) -> u32 {
        gens[self.gen].weight << self.ops.len()
    }

    pub fn display(&self, gens: &[GenSpec]) -> String {
        if self.ops.is_empty() {
            return gens[self.gen].name.clone();
        }
        let mut s = String::new();
        for &i in &self.ops {
            s.push_str(&format!("Q{i}"));
        }
        s.push('(');
        s.push_str(&gens[self.gen].name);
        s.push(')');
        s
    }
}

/// Canonical word order: shorter words first, then lexicographic on the
/// index sequence, then generator index.
fn word_cmp(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.ops
        .len()
        .cmp(&b.ops.len())
        .then_with(|| a.ops.cmp(&b.ops))
        .then_with(|| a.gen.cmp(&b.gen))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct WordMono(pub Vec<(Word, u32)>);

impl WordMono {
    pub fn one() -> Self {
        WordMono(Vec::new())
    }

    pub fn word(w: Word) -> Self {
        WordMono(vec![(w, 1)])
    }

    pub fn mul(&self, other: &WordMono) -> WordMono {
        let mut map: BTreeMap<Word, u32> = BTreeMap::new();
        for (w, e) in self.0.iter().chain(other.0.iter()) {
            *map.entry(w.clone()).or_insert(0) += e;
        }
        WordMono(map.into_iter().collect())
    }

    pub fn degree(&self, gens: &[GenSpec]) -> u32 {
        self.0.iter().map(|(w, e)| w.degree(gens) * e).sum()
    }

    pub fn weight(&self, gens: &[GenSpec]) -> u32 {
        self.0.iter().map(|(w, e)| w.weight(gens) * e).sum()
    }

    pub fn factor_count(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_square_free(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    fn expanded(&self) -> Vec<&Word> {
        let mut out = Vec::new();
        for (w, e) in &self.0 {
            for _ in 0..*e {
                out.push(w);
            }
        }
        out.sort_by(|a, b| word_cmp(a, b));
        out
    }

    pub fn display(&self, gens: &[GenSpec]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|(w, e)| {
                if *e == 1 {
                    w.display(gens)
                } else {
                    format!("{}^{}", w.display(gens), e)
                }
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

fn mono_cmp(a: &WordMono, b: &WordMono) -> std::cmp::Ordering {
    b.factor_count()
        .cmp(&a.factor_count())
        .then_with(|| {
            let ea = a.expanded();
            let eb = b.expanded();
            for (x, y) in ea.iter().zip(eb.iter()) {
                let c = word_cmp(x, y);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
        .then_with(|| a.cmp(b))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FreeTerm {
    pub scalar: Scalar,
    pub mono: WordMono,
}

fn term_cmp(a: &FreeTerm, b: &FreeTerm) -> std::cmp::Ordering {
    mono_cmp(&a.mono, &b.mono).then_with(|| a.scalar.cmp(&b.scalar))
}

/// F2 sum of terms; addition is symmetric difference.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FreeElement(pub BTreeSet<FreeTerm>);

impl FreeElement {
    pub fn zero() -> Self {
        FreeElement(BTreeSet::new())
    }

    pub fn term(scalar: Scalar, mono: WordMono) -> Self {
        let mut s = BTreeSet::new();
        s.insert(FreeTerm { scalar, mono });
        FreeElement(s)
    }

    pub fn gen(g: usize) -> Self {
        FreeElement::term((0, 0), WordMono::word(Word::bare(g)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn toggle(&mut self, t: FreeTerm) {
        if !self.0.remove(&t) {
            self.0.insert(t);
        }
    }

    pub fn add(&self, other: &FreeElement) -> FreeElement {
        let mut out = self.clone();
        for t in &other.0 {
            out.toggle(t.clone());
        }
        out
    }

    pub fn mul(&self, other: &FreeElement, engine: &ScalarEngine) -> Result<FreeElement> {
        let mut out = FreeElement::zero();
        for a in &self.0 {
            for b in &other.0 {
                let mono = a.mono.mul(&b.mono);
                for s in engine.mul(a.scalar, b.scalar)? {
                    out.toggle(FreeTerm {
                        scalar: s,
                        mono: mono.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Uniform bidegree of a homogeneous element.
    pub fn bidegree(&self, gens: &[GenSpec]) -> Option<(u32, u32)> {
        let mut it = self.0.iter();
        let first = it.next()?;
        let bd = (
            first.scalar.0 + first.mono.degree(gens),
            first.mono.weight(gens),
        );
        for t in it {
            assert_eq!(
                (t.scalar.0 + t.mono.degree(gens), t.mono.weight(gens)),
                bd,
                "inhomogeneous element"
            );
        }
        Some(bd)
    }

    pub fn display(&self, gens: &[GenSpec], engine: &ScalarEngine) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let mut terms: Vec<&FreeTerm> = self.0.iter().collect();
        terms.sort_by(|a, b| term_cmp(a, b));
        terms
            .iter()
            .map(|t| {
                let s = engine.name(t.scalar);
                let m = t.mono.display(gens);
                if s == "1" {
                    m
                } else if m == "1" {
                    s
                } else {
                    format!("{s}·{m}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Series in t with free-element coefficients.
type TSeries = BTreeMap<u32, FreeElement>;

fn tseries_mul(a: &TSeries, b: &TSeries, tmax: u32, engine: &ScalarEngine) -> Result<TSeries> {
    let mut out = TSeries::new();
    for (&i, ca) in a {
        for (&j, cb) in b {
            if i + j > tmax {
                continue;
            }
            let prod = ca.mul(cb, engine)?;
            let entry = out.entry(i + j).or_insert_with(FreeElement::zero);
            *entry = entry.add(&prod);
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

pub struct Component {
    columns: Vec<FreeTerm>,
    index: BTreeMap<FreeTerm, usize>,
    matrix: F2Matrix,
}

impl Component {
    fn new(mut columns: Vec<FreeTerm>) -> Self {
        columns.sort_by(term_cmp);
        let index = columns
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let n = columns.len();
        Component {
            columns,
            index,
            matrix: F2Matrix::new(n),
        }
    }

    fn vectorize(&self, e: &FreeElement) -> Vec<usize> {
        e.0.iter()
            .map(|t| *self.index.get(t).expect("term within enumerated bidegree"))
            .collect()
    }

    fn insert(&mut self, e: &FreeElement) -> bool {
        let cols = self.vectorize(e);
        self.matrix.insert(&cols)
    }

    pub fn dimension(&self) -> usize {
        self.columns.len() - self.matrix.rank()
    }

    pub fn basis(&self) -> Vec<&FreeTerm> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.matrix.is_pivot(*i))
            .map(|(_, t)| t)
            .collect()
    }

    pub fn normal_form(&self, e: &FreeElement) -> FreeElement {
        let cols = self.vectorize(e);
        let mut out = FreeElement::zero();
        for c in self.matrix.reduce(&cols) {
            out.toggle(self.columns[c].clone());
        }
        out
    }

    pub fn is_pivot_term(&self, t: &FreeTerm) -> bool {
        self.index
            .get(t)
            .map(|&c| self.matrix.is_pivot(c))
            .unwrap_or(false)
    }

    /// Rewrites of pivot terms into later non-pivot terms.
    pub fn rewrites(&self) -> Vec<(FreeTerm, FreeElement)> {
        let mut out = Vec::new();
        for c in self.matrix.pivots() {
            let mut rhs = FreeElement::zero();
            for col in self.matrix.row_support(c).unwrap() {
                if col != c {
                    rhs.toggle(self.columns[col].clone());
                }
            }
            out.push((self.columns[c].clone(), rhs));
        }
        out
    }
}

pub struct FreeOperationRing {
    pub gens: Vec<GenSpec>,
    pub maxdeg: u32,
    pub maxweight: u32,
    engine: ScalarEngine,
    scalar_dt: Option<Arc<ScalarDt>>,
    words: Vec<Word>,
    components: BTreeMap<(u32, u32), Component>,
}

pub fn build_free_qring(
    gens: &[(&str, u32, u32)],
    maxdeg: u32,
    maxweight: u32,
) -> Result<FreeOperationRing> {
    FreeOperationRing::build(ScalarEngine::Trivial, gens, maxdeg, maxweight, false)
}

impl FreeOperationRing {
    pub fn build(
        engine: ScalarEngine,
        gens: &[(&str, u32, u32)],
        maxdeg: u32,
        maxweight: u32,
        permuted: bool,
    ) -> Result<FreeOperationRing> {
        Self::build_with(engine, None, gens, maxdeg, maxweight, permuted)
    }

    pub fn build_with(
        engine: ScalarEngine,
        scalar_dt: Option<Arc<ScalarDt>>,
        gens: &[(&str, u32, u32)],
        maxdeg: u32,
        maxweight: u32,
        permuted: bool,
    ) -> Result<FreeOperationRing> {
        let gens: Vec<GenSpec> = gens
            .iter()
            .map(|&(n, d, w)| GenSpec {
                name: n.to_string(),
                degree: d,
                weight: w,
            })
            .collect();
        assert!(gens.iter().all(|g| g.weight >= 1), "weights start at 1");

        let mut ring = FreeOperationRing {
            gens,
            maxdeg,
            maxweight,
            engine,
            scalar_dt,
            words: Vec::new(),
            components: BTreeMap::new(),
        };
        ring.enumerate_words();
        ring.enumerate_components();
        ring.impose_relations(permuted)?;
        Ok(ring)
    }

    pub fn engine(&self) -> &ScalarEngine {
        &self.engine
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn component(&self, d: u32, w: u32) -> Option<&Component> {
        self.components.get(&(d, w))
    }

    pub fn dimension(&self, d: u32, w: u32) -> usize {
        self.components
            .get(&(d, w))
            .map(|c| c.dimension())
            .unwrap_or(0)
    }

    pub fn dimensions(&self) -> BTreeMap<(u32, u32), usize> {
        self.components
            .iter()
            .map(|(&k, c)| (k, c.dimension()))
            .collect()
    }

    fn in_budget(&self, d: u32, w: u32) -> bool {
        d <= self.maxdeg && w <= self.maxweight
    }

    fn enumerate_words(&mut self) {
        let mut words = Vec::new();
        for g in 0..self.gens.len() {
            let gd = self.gens[g].degree;
            let gw = self.gens[g].weight;
            let mut k = 0u32;
            while gw << k <= self.maxweight {
                // ops indexed innermost-last; position j (0-based from the
                // outside) contributes i_j · 2^j to the degree
                let base = gd << k;
                if base > self.maxdeg {
                    break;
                }
                let mut ops = vec![0u32; k as usize];
                fn rec(
                    pos: usize,
                    remaining: u32,
                    ops: &mut Vec<u32>,
                    g: usize,
                    out: &mut Vec<Word>,
                ) {
                    if pos == ops.len() {
                        out.push(Word {
                            gen: g,
                            ops: ops.clone(),
                        });
                        return;
                    }
                    let scale = 1u32 << pos;
                    let most = remaining / scale;
                    for i in 0..=most {
                        ops[pos] = i;
                        rec(pos + 1, remaining - i * scale, ops, g, out);
                    }
                    ops[pos] = 0;
                }
                rec(0, self.maxdeg - base, &mut ops, g, &mut words);
                k += 1;
            }
        }
        words.sort_by(word_cmp);
        self.words = words;
    }

    fn enumerate_components(&mut self) {
        // multisets of words within budget, extended by all scalar degrees
        let mut monos: Vec<WordMono> = vec![WordMono::one()];
        for wi in 0..self.words.len() {
            let w = self.words[wi].clone();
            let (wd, ww) = (w.degree(&self.gens), w.weight(&self.gens));
            let mut extended = Vec::new();
            for m in &monos {
                let (md, mw) = (m.degree(&self.gens), m.weight(&self.gens));
                let mut e = 1u32;
                loop {
                    let (nd, nw) = (md + wd * e, mw + ww * e);
                    if !self.in_budget(nd, nw) {
                        break;
                    }
                    let mut v = m.0.clone();
                    v.push((w.clone(), e));
                    v.sort();
                    extended.push(WordMono(v));
                    e += 1;
                }
            }
            monos.extend(extended);
        }

        let mut by_bidegree: BTreeMap<(u32, u32), Vec<FreeTerm>> = BTreeMap::new();
        for m in monos {
            let (md, mw) = (m.degree(&self.gens), m.weight(&self.gens));
            if mw == 0 {
                continue;
            }
            for extra in 0..=(self.maxdeg - md) {
                for idx in 0..self.engine.dim(extra) {
                    by_bidegree
                        .entry((md + extra, mw))
                        .or_default()
                        .push(FreeTerm {
                            scalar: (extra, idx),
                            mono: m.clone(),
                        });
                }
            }
        }
        self.components = by_bidegree
            .into_iter()
            .map(|(k, cols)| (k, Component::new(cols)))
            .collect();
    }

    /// Q_t of a single word: prepended indices within budget.
    fn qt_word(&self, w: &Word, tmax: u32) -> TSeries {
        let mut out = TSeries::new();
        let (wd, ww) = (w.degree(&self.gens), w.weight(&self.gens));
        if !self.in_budget(2 * wd, 2 * ww) {
            return out;
        }
        for i in 0..=tmax {
            if !self.in_budget(2 * wd + i, 2 * ww) {
                break;
            }
            out.insert(i, FreeElement::term((0, 0), WordMono::word(w.prepend(i))));
        }
        out
    }

    /// Ring-homomorphism extension of Q_t: words prepend, products
    /// convolve. Scalars square, or follow the scalar table when one was
    /// supplied at build time.
    pub fn qt_element(&self, e: &FreeElement, tmax: u32) -> Result<TSeries> {
        let mut out = TSeries::new();
        for t in &e.0 {
            let mut acc = TSeries::new();
            match &self.scalar_dt {
                Some(dt) if t.scalar != (0, 0) => {
                    let rows = dt
                        .rows(t.scalar)
                        .ok_or_else(|| Error::MissingTableEntry(self.engine.name(t.scalar)))?;
                    if (rows.len() as u32) <= tmax {
                        return Err(Error::Precision {
                            what: self.engine.name(t.scalar),
                            needed: tmax,
                            available: (rows.len() as u32).saturating_sub(1),
                        });
                    }
                    for (k, combo) in rows.iter().enumerate().take(tmax as usize + 1) {
                        let mut c = FreeElement::zero();
                        for &s in combo {
                            c.toggle(FreeTerm {
                                scalar: s,
                                mono: WordMono::one(),
                            });
                        }
                        if !c.is_zero() {
                            acc.insert(k as u32, c);
                        }
                    }
                }
                _ => {
                    let squared = self.engine.mul(t.scalar, t.scalar)?;
                    let mut base = FreeElement::zero();
                    for s in squared {
                        base.toggle(FreeTerm {
                            scalar: s,
                            mono: WordMono::one(),
                        });
                    }
                    acc.insert(0, base);
                }
            }
            for (w, e) in &t.mono.0 {
                let qw = self.qt_word(w, tmax);
                for _ in 0..*e {
                    acc = tseries_mul(&acc, &qw, tmax, &self.engine)?;
                }
            }
            for (i, c) in acc {
                let entry = out.entry(i).or_insert_with(FreeElement::zero);
                *entry = entry.add(&c);
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn qi_element(&self, e: &FreeElement, i: u32) -> Result<FreeElement> {
        Ok(self
            .qt_element(e, i)?
            .remove(&i)
            .unwrap_or_else(FreeElement::zero))
    }

    /// Relations [s^a t^b + s^b t^a] of D_s(D_t(v)) with D_s(t) = t·F(t,s).
    fn interchange_relations(&self, v: &Word) -> Result<Vec<FreeElement>> {
        let (vd, vw) = (v.degree(&self.gens), v.weight(&self.gens));
        if 4 * vw > self.maxweight || 4 * vd > self.maxdeg {
            return Ok(Vec::new());
        }
        let room = self.maxdeg - 4 * vd;
        let mut tf: Vec<BTreeMap<(u32, u32), Vec<Scalar>>> = Vec::new();
        for i in 0..=room / 2 {
            tf.push(self.engine.tf_power(i, room)?);
        }

        let mut rels = Vec::new();
        for a in 0..=room {
            for b in (a + 1)..=(room - a) {
                let mut rel = FreeElement::zero();
                for i in 0..tf.len() as u32 {
                    for j in 0..=a.max(b) {
                        // [s^a t^b] picks s^{a−j} t^b from (tF)^i
                        for (sa, sb) in [(a, b), (b, a)] {
                            if j > sa {
                                continue;
                            }
                            if let Some(scalars) = tf[i as usize].get(&(sa - j, sb)) {
                                let word = v.prepend(i).prepend(j);
                                for &s in scalars {
                                    rel.toggle(FreeTerm {
                                        scalar: s,
                                        mono: WordMono::word(word.clone()),
                                    });
                                }
                            }
                        }
                    }
                }
                if !rel.is_zero() {
                    rels.push(rel);
                }
            }
        }
        Ok(rels)
    }

    fn impose_relations(&mut self, permuted: bool) -> Result<()> {
        let mut queue: VecDeque<FreeElement> = VecDeque::new();
        let mut word_order: Vec<usize> = (0..self.words.len()).collect();
        if permuted {
            word_order.reverse();
        }
        for &wi in &word_order {
            let v = self.words[wi].clone();
            let (vd, vw) = (v.degree(&self.gens), v.weight(&self.gens));
            if self.in_budget(2 * vd, 2 * vw) {
                let square = FreeElement::term((0, 0), WordMono::word(v.prepend(0)))
                    .add(&FreeElement::term(
                        (0, 0),
                        WordMono(vec![(v.clone(), 2)]),
                    ));
                queue.push_back(square);
            }
            for r in self.interchange_relations(&v)? {
                queue.push_back(r);
            }
        }

        while let Some(rel) = queue.pop_front() {
            if rel.is_zero() {
                continue;
            }
            let (d, w) = rel.bidegree(&self.gens).unwrap();
            assert!(self.in_budget(d, w), "relation out of budget");
            let grew = self
                .components
                .get_mut(&(d, w))
                .expect("component enumerated")
                .insert(&rel);
            if !grew {
                continue;
            }

            // close under word multiples, scalar multiples, and Q_i
            for &wi in &word_order {
                let u = self.words[wi].clone();
                let (ud, uw) = (u.degree(&self.gens), u.weight(&self.gens));
                if self.in_budget(d + ud, w + uw) {
                    let m = FreeElement::term((0, 0), WordMono::word(u));
                    queue.push_back(rel.mul(&m, &self.engine)?);
                }
            }
            for extra in 1..=(self.maxdeg - d) {
                for idx in 0..self.engine.dim(extra) {
                    let m = FreeElement::term((extra, idx), WordMono::one());
                    queue.push_back(rel.mul(&m, &self.engine)?);
                }
            }
            if self.in_budget(2 * d, 2 * w) {
                let tmax = self.maxdeg - 2 * d;
                for (_, c) in self.qt_element(&rel, tmax)? {
                    queue.push_back(c);
                }
            }
        }
        Ok(())
    }

    pub fn normal_form(&self, e: &FreeElement) -> FreeElement {
        if e.is_zero() {
            return FreeElement::zero();
        }
        let (d, w) = e.bidegree(&self.gens).unwrap();
        self.components
            .get(&(d, w))
            .expect("bidegree within budget")
            .normal_form(e)
    }

    /// Irreducible words: single-word columns that survived reduction.
    pub fn irreducible_words(&self) -> Vec<&Word> {
        self.words
            .iter()
            .filter(|w| {
                let t = FreeTerm {
                    scalar: (0, 0),
                    mono: WordMono::word((*w).clone()),
                };
                let (d, ww) = (w.degree(&self.gens), w.weight(&self.gens));
                match self.components.get(&(d, ww)) {
                    Some(c) => !c.is_pivot_term(&t),
                    None => false,
                }
            })
            .collect()
    }

    /// Independent weight-4 dimension count: square-free monomials whose
    /// word factors avoid the pivots of the word-local relation families
    /// (no ideal closure). Used to cross-validate the echelon build.
    pub fn rewrite_dimension_weight4(&self, d: u32) -> Result<usize> {
        assert_eq!(self.gens.len(), 1, "single-generator cross-check");
        let mut local: BTreeMap<(u32, u32), Component> = BTreeMap::new();
        for (&k, c) in &self.components {
            local.insert(k, Component::new(c.columns.clone()));
        }
        for v in self.words.clone() {
            let (vd, vw) = (v.degree(&self.gens), v.weight(&self.gens));
            if self.in_budget(2 * vd, 2 * vw) {
                let square = FreeElement::term((0, 0), WordMono::word(v.prepend(0)))
                    .add(&FreeElement::term((0, 0), WordMono(vec![(v.clone(), 2)])));
                let bd = square.bidegree(&self.gens).unwrap();
                local.get_mut(&bd).unwrap().insert(&square);
                // Q_i of the squaring relation stays word-local
                if self.in_budget(4 * vd, 4 * vw) {
                    let tmax = self.maxdeg - 4 * vd;
                    for (_, c) in self.qt_element(&square, tmax)? {
                        if let Some(bd) = c.bidegree(&self.gens) {
                            local.get_mut(&bd).unwrap().insert(&c);
                        }
                    }
                }
            }
            for r in self.interchange_relations(&v)? {
                let bd = r.bidegree(&self.gens).unwrap();
                local.get_mut(&bd).unwrap().insert(&r);
            }
        }

        let reducible = |w: &Word| -> bool {
            let t = FreeTerm {
                scalar: (0, 0),
                mono: WordMono::word(w.clone()),
            };
            let (wd, ww) = (w.degree(&self.gens), w.weight(&self.gens));
            local
                .get(&(wd, ww))
                .map(|c| c.is_pivot_term(&t))
                .unwrap_or(false)
        };

        let mut count = 0usize;
        if let Some(c) = self.components.get(&(d, 4)) {
            for t in &c.columns {
                if t.scalar != (0, 0) {
                    continue;
                }
                if !t.mono.is_square_free() {
                    continue;
                }
                if t.mono.0.iter().all(|(w, _)| !reducible(w)) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Present the quotient as a polynomial carrier: one variable per
    /// irreducible word (tensored with the scalar model's alphabet when
    /// present) and Q_t given by normal-form series.
    pub fn alphabetize(&self) -> Result<AlphabetizedRing> {
        let irr: Vec<Word> = self.irreducible_words().into_iter().cloned().collect();
        let names: Vec<String> = irr.iter().map(|w| w.display(&self.gens)).collect();
        let infos: Vec<VarInfo> = irr
            .iter()
            .zip(names.iter())
            .map(|(w, n)| VarInfo {
                name: n.clone(),
                grade: w.degree(&self.gens),
                weight: w.weight(&self.gens),
                invertible: false,
                factor: 0,
            })
            .collect();
        // an additive model has no scalars above degree 0, so the carrier
        // collapses to the plain word alphabet, matching the trivial case
        let word_alphabet = GradedAlphabet::with_weights(infos, 0)?;
        let (alphabet, word_factor) = match &self.engine {
            ScalarEngine::Model(m) if !m.is_additive() => (
                GradedAlphabet::tensor(&[m.alphabet(), &word_alphabet])?,
                m.alphabet().factors(),
            ),
            _ => (word_alphabet.clone(), 0u8),
        };

        let mut var_of_word = BTreeMap::new();
        for (w, n) in irr.iter().zip(names.iter()) {
            let v = alphabet
                .locate(word_factor, n)
                .ok_or_else(|| Error::UnknownVariable(n.clone()))?;
            var_of_word.insert(w.clone(), v);
        }

        let mut ring = AlphabetizedRing {
            alphabet: alphabet.clone(),
            word_factor,
            var_of_word,
            gens: self.gens.clone(),
            qspec: None,
        };

        let mut table = BTreeMap::new();
        for w in &irr {
            let (wd, ww) = (w.degree(&self.gens), w.weight(&self.gens));
            if !self.in_budget(2 * wd, 2 * ww) {
                continue;
            }
            let precision = self.maxdeg - 2 * wd;
            let mut series = PowerSeries::zero(&alphabet, &[FVar::T], precision);
            let base = FreeElement::term((0, 0), WordMono::word(w.clone()));
            for (i, c) in self.qt_element(&base, precision)? {
                let nf = self.normal_form(&c);
                series.set_coefficient(&[i as u16], ring.to_polynomial(&nf, &self.engine)?);
            }
            table.insert(ring.var_of_word[w], series);
        }

        ring.qspec = Some(QRingSpec {
            carrier: alphabet,
            table,
        });
        Ok(ring)
    }
}

/// Polynomial presentation of a free operation ring; basis monomials are
/// the square-free products of irreducible-word variables.
pub struct AlphabetizedRing {
    pub alphabet: Arc<GradedAlphabet>,
    pub word_factor: u8,
    var_of_word: BTreeMap<Word, VarId>,
    gens: Vec<GenSpec>,
    pub qspec: Option<QRingSpec>,
}

impl AlphabetizedRing {
    pub fn gen_var(&self, g: usize) -> VarId {
        self.var_of_word[&Word::bare(g)]
    }

    pub fn var_of(&self, w: &Word) -> Option<VarId> {
        self.var_of_word.get(w).copied()
    }

    pub fn to_polynomial(
        &self,
        e: &FreeElement,
        engine: &ScalarEngine,
    ) -> Result<GradedPolynomial> {
        let mut out = GradedPolynomial::zero(&self.alphabet);
        for t in &e.0 {
            let mut exps: Vec<(VarId, i32)> = Vec::new();
            for (w, m) in &t.mono.0 {
                let v = self
                    .var_of_word
                    .get(w)
                    .ok_or_else(|| Error::Unsupported(format!(
                        "reducible word {} in a normal form",
                        w.display(&self.gens)
                    )))?;
                exps.push((*v, *m as i32));
            }
            let mut term = GradedPolynomial::monomial(
                &self.alphabet,
                Monomial::new(&self.alphabet, &exps)?,
            );
            if t.scalar != (0, 0) {
                let p = engine
                    .polynomial(t.scalar)
                    .ok_or_else(|| Error::Unsupported("scalar outside the model".into()))?;
                let embed = PolyHom::embedding(p.alphabet(), &self.alphabet, 0)?;
                term = term.mul(&embed.apply(&p)?)?;
            }
            out.add_assign(&term)?;
        }
        Ok(out)
    }
}

/// Image of a free-ring element under the Q-ring map sending each
/// generator to the given carrier element.
pub fn eval_unary_operation(
    p: &FreeElement,
    spec: &QRingSpec,
    images: &[GradedPolynomial],
    precision: u32,
) -> Result<GradedPolynomial> {
    let mut out = GradedPolynomial::zero(&spec.carrier);
    for t in &p.0 {
        if t.scalar != (0, 0) {
            return Err(Error::Unsupported(
                "scalar coefficients need a model-aware target".into(),
            ));
        }
        let mut term = GradedPolynomial::one(&spec.carrier);
        for (w, e) in &t.mono.0 {
            let mut v = images[w.gen].clone();
            for &op in w.ops.iter().rev() {
                if op > precision {
                    return Err(Error::Precision {
                        what: "operation index".into(),
                        needed: op,
                        available: precision,
                    });
                }
                v = spec.qt_eval(&v, precision)?.coeff1(op as u16);
            }
            term = term.mul(&v.pow(*e as i32)?)?;
        }
        out.add_assign(&term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::HopfPresentation;
    use crate::qring::solve_generator_qstructure;

    fn line_ring(maxdeg: u32, maxweight: u32) -> FreeOperationRing {
        build_free_qring(&[("x", 0, 1)], maxdeg, maxweight).unwrap()
    }

    #[test]
    fn weight_two_is_one_dimensional() {
        let ring = line_ring(8, 4);
        for d in 0..=8 {
            assert_eq!(ring.dimension(d, 2), 1, "(d,2) at d={d}");
            let c = ring.component(d, 2).unwrap();
            let basis = c.basis();
            assert_eq!(basis.len(), 1);
            assert_eq!(basis[0].mono.display(&ring.gens), format!("Q{d}(x)"));
        }
    }

    #[test]
    fn squaring_rewrites_into_the_bottom_word() {
        let ring = line_ring(6, 4);
        let x = FreeElement::gen(0);
        let x2 = x.mul(&x, ring.engine()).unwrap();
        let nf = ring.normal_form(&x2);
        assert_eq!(nf.display(&ring.gens, ring.engine()), "Q0(x)");
        // and Q_0 of any word is its square, here re-normalized
        let q1 = FreeElement::term((0, 0), WordMono::word(Word { gen: 0, ops: vec![1] }));
        let q1sq = q1.mul(&q1, ring.engine()).unwrap();
        let q0q1 = ring.qi_element(&q1, 0).unwrap();
        assert_eq!(ring.normal_form(&q1sq), ring.normal_form(&q0q1));
    }

    #[test]
    fn weight_four_cross_validation() {
        let ring = line_ring(6, 4);
        for d in 0..=6 {
            let a = ring.dimension(d, 4);
            let b = ring.rewrite_dimension_weight4(d).unwrap();
            assert_eq!(a, b, "weight-4 dimensions at degree {d}");
        }
    }

    #[test]
    fn dimensions_are_enumeration_order_independent() {
        let a = FreeOperationRing::build(ScalarEngine::Trivial, &[("x", 0, 1)], 6, 4, false)
            .unwrap();
        let b = FreeOperationRing::build(ScalarEngine::Trivial, &[("x", 0, 1)], 6, 4, true)
            .unwrap();
        assert_eq!(a.dimensions(), b.dimensions());
    }

    #[test]
    fn evaluation_into_the_milnor_structure() {
        let h = HopfPresentation::milnor(7).unwrap();
        let spec = solve_generator_qstructure(&h, 8).unwrap();
        let xi0 = GradedPolynomial::variable(h.alphabet(), h.gen_var(0).unwrap());
        let images = [xi0.clone()];

        let x = FreeElement::gen(0);
        assert_eq!(
            eval_unary_operation(&x, &spec, &images, 6).unwrap(),
            xi0
        );
        let x2 = x.mul(&x, &ScalarEngine::Trivial).unwrap();
        assert_eq!(
            eval_unary_operation(&x2, &spec, &images, 6).unwrap(),
            xi0.square().unwrap()
        );
        let q1 = FreeElement::term((0, 0), WordMono::word(Word { gen: 0, ops: vec![1] }));
        assert_eq!(
            eval_unary_operation(&q1, &spec, &images, 6).unwrap().display(),
            "ξ0·ξ1"
        );
    }

    #[test]
    fn evaluation_into_another_free_ring_is_natural() {
        let ring = line_ring(6, 4);
        let target = build_free_qring(&[("y", 0, 1)], 6, 4)
            .unwrap()
            .alphabetize()
            .unwrap();
        let spec = target.qspec.as_ref().unwrap();
        let y = GradedPolynomial::variable(&target.alphabet, target.gen_var(0));
        let q1 = FreeElement::term((0, 0), WordMono::word(Word { gen: 0, ops: vec![1] }));
        let img = eval_unary_operation(&q1, spec, &[y], 4).unwrap();
        assert_eq!(img.display(), "Q1(y)");
        let _ = ring;
    }

    #[test]
    fn alphabetized_interchange_with_the_milnor_factor() {
        let h = HopfPresentation::milnor(15).unwrap();
        let milnor = solve_generator_qstructure(&h, 18).unwrap();
        let free = line_ring(12, 4).alphabetize().unwrap();
        let tensor = QRingSpec::tensor(&milnor, free.qspec.as_ref().unwrap()).unwrap();

        let xi0 = tensor.carrier.locate(0, "ξ0").unwrap();
        let x = tensor.carrier.locate(1, "x").unwrap();
        let a = GradedPolynomial::monomial(
            &tensor.carrier,
            crate::f2series::Monomial::new(&tensor.carrier, &[(xi0, 1), (x, 1)]).unwrap(),
        );
        let mut report = crate::report::Report::new();
        tensor
            .interchange_check(&a, 6, "tensor", "ξ0⊗x", &mut report)
            .unwrap();
        assert!(report.all_pass(), "{}", report.to_text());
    }
}
