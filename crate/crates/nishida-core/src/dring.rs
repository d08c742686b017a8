//! D-ring structures parametric in a formal group law. The table for the
//! Faa di Bruno generators is solved from D_t(h)(q) = h(x)·h(F(x,t)),
//! expanding against a chosen quadratic q; the interchange axiom uses the
//! twisted extension D_s(t) := t·F(t,s). With the additive law everything
//! degenerates to the plain square structure, which is a checked
//! regression, not an assumption.
//!
//! The scalar subring has no functional equation of its own: β has unit
//! leading coefficient, and expanding β(x)·β(F(x,t)) puts β(t)/t where
//! the unit row belongs. Its D_t comes through the coaction instead: with
//! the model slot counited away, a(i,j) ↦ [x^i y^j] h(h̄x + h̄y) embeds
//! the subring in the Faa di Bruno algebra, the plain generator table
//! evaluates there, and composing with h̄(t) turns its t back into the
//! scalar one. Every coefficient re-expresses in the embedded bases; the
//! certificate re-derives each generator from the finished variable
//! table. Model variables left unpinned (grade g with g+1 a power of two,
//! no linear slot in any a(i,j)) square freely.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2series::{FVar, GradedAlphabet, GradedPolynomial, PolyHom, PowerSeries, VarId};
use crate::f2series::express_in_invariant;
use crate::fgl::{LazardModel, LnCoaction};
use crate::hopf::HopfPresentation;
use crate::linalg::F2Matrix;
use crate::qring::free::{FreeOperationRing, Scalar, ScalarDt, ScalarEngine};
use crate::qring::{solve_generator_qstructure, QRingSpec};
use crate::report::Report;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quadratic {
    XxPlusT,
    XtimesFxt,
}

impl Quadratic {
    pub fn label(self) -> &'static str {
        match self {
            Quadratic::XxPlusT => "x(x+t)",
            Quadratic::XtimesFxt => "x·F(x,t)",
        }
    }
}

#[derive(Clone)]
pub struct DRingSpec {
    pub spec: QRingSpec,
    pub model: Arc<LazardModel>,
    /// Tensor slot of the model variables inside the carrier.
    pub m_slot: u8,
}

impl DRingSpec {
    /// Squaring table on the model presentation itself.
    pub fn base(model: &Arc<LazardModel>, cap: u32) -> Result<DRingSpec> {
        let carrier = model.alphabet().clone();
        let mut table = BTreeMap::new();
        for (v, _) in carrier.vars() {
            let mut s = PowerSeries::zero(&carrier, &[FVar::T], cap);
            s.set_coefficient(&[0], GradedPolynomial::variable(&carrier, v).square()?);
            table.insert(v, s);
        }
        Ok(DRingSpec {
            spec: QRingSpec { carrier, table },
            model: model.clone(),
            m_slot: 0,
        })
    }

    pub fn carrier(&self) -> &Arc<GradedAlphabet> {
        &self.spec.carrier
    }

    pub fn dt_eval(&self, a: &GradedPolynomial, precision: u32) -> Result<PowerSeries> {
        self.spec.qt_eval(a, precision)
    }

    /// t·F(t,s) over the carrier, complete through total degree cap.
    pub fn extension(&self, cap: u32) -> Result<PowerSeries> {
        let f = self.model.f();
        if f.cap() < cap {
            return Err(Error::Precision {
                what: "formal group law".into(),
                needed: cap,
                available: f.cap(),
            });
        }
        let embed = PolyHom::embedding(self.model.alphabet(), &self.spec.carrier, self.m_slot)?;
        let f_ts = f
            .truncated(cap)
            .map_coeffs(&embed)?
            .rename_var(FVar::X, FVar::T)
            .rename_var(FVar::Y, FVar::S);
        let t = PowerSeries::formal_var(&self.spec.carrier, FVar::T, &[FVar::S, FVar::T], cap);
        t.mul(&f_ts)
    }

    pub fn interchange_check(
        &self,
        a: &GradedPolynomial,
        check_cap: u32,
        suite: &str,
        label: &str,
        report: &mut Report,
    ) -> Result<()> {
        let qst = self.extension(check_cap)?;
        self.spec
            .interchange_check_with(a, check_cap, &qst, suite, label, report)
    }

    pub fn squaring_check(&self, a: &GradedPolynomial) -> Result<bool> {
        self.spec.squaring_check(a)
    }
}

/// Solve the table for the Faa di Bruno generators over ℬ ⊗ R from
/// h(x)·h(F(x,t)). Both quadratics' residuals are reported; the returned
/// table is the expansion against the chosen one. A nonzero residual for
/// the chosen quadratic is recorded, not fatal.
pub fn solve_tensor_dstructure(
    h: &Arc<HopfPresentation>,
    base: &DRingSpec,
    quadratic: Quadratic,
    solve_cap: u32,
    report: &mut Report,
) -> Result<DRingSpec> {
    assert!(!h.unit_leading(), "needs the invertible leading generator");
    assert_eq!(base.m_slot, 0, "base scalars come unembedded");
    let model = &base.model;
    if model.f().cap() < solve_cap {
        return Err(Error::Precision {
            what: "formal group law".into(),
            needed: solve_cap,
            available: model.f().cap(),
        });
    }

    let vars = [FVar::X, FVar::T];
    let carrier = GradedAlphabet::tensor(&[h.alphabet(), model.alphabet()])?;
    let m_slot = h.alphabet().factors();
    let embed_m = PolyHom::embedding(model.alphabet(), &carrier, m_slot)?;

    let hx = h.series_in(&carrier, 0, FVar::X, &vars, solve_cap)?;
    let f_xt = model
        .f()
        .truncated(solve_cap)
        .map_coeffs(&embed_m)?
        .rename_var(FVar::Y, FVar::T)
        .with_vars(&vars);
    let h_fxt = hx.substitute(FVar::X, &f_xt)?;
    let rhs = hx.mul(&h_fxt)?;

    let x = PowerSeries::formal_var(&carrier, FVar::X, &vars, solve_cap);
    let t = PowerSeries::formal_var(&carrier, FVar::T, &vars, solve_cap);
    let q_xf = x.mul(&f_xt)?;
    let q_xxt = x.mul(&x.add(&t)?)?;

    let exponents: Vec<u32> = h
        .exponents_upto(solve_cap)
        .into_iter()
        .filter(|&e| 2 * e <= solve_cap)
        .collect();

    let sol_xf = express_in_invariant(&rhs, &q_xf, &exponents)?;
    let sol_xxt = express_in_invariant(&rhs, &q_xxt, &exponents)?;

    let (chosen, other) = match quadratic {
        Quadratic::XtimesFxt => (&sol_xf, (&sol_xxt, Quadratic::XxPlusT)),
        Quadratic::XxPlusT => (&sol_xxt, (&sol_xf, Quadratic::XtimesFxt)),
    };
    report.record(
        "dring",
        &format!("certified[{}]", quadratic.label()),
        chosen.residual.is_zero(),
        format!("solve cap {solve_cap}"),
    );
    report.record(
        "dring",
        &format!("observed[{}]", other.1.label()),
        true,
        if other.0.residual.is_zero() {
            "residual zero"
        } else {
            "residual nonzero"
        },
    );

    let mut table = BTreeMap::new();
    for (k, &e) in exponents.iter().enumerate() {
        let n = h.index_for_exponent(e).expect("generator exponent");
        let name = &h.alphabet().info(h.gen_var(n).expect("full presentation")).name;
        let v = carrier.locate(0, name).expect("slot-zero generator");
        table.insert(v, chosen.coefficients[k].clone());
    }
    for (mv, info) in model.alphabet().vars() {
        let v = carrier.locate(m_slot, &info.name).expect("model variable");
        table.insert(v, base.spec.table[&mv].map_coeffs(&embed_m)?);
    }

    Ok(DRingSpec {
        spec: QRingSpec { carrier, table },
        model: model.clone(),
        m_slot,
    })
}

/// Expression over a fixed independent spanning set, one instance per
/// degree of the embedded bases.
struct ImageSpan {
    columns: BTreeMap<Vec<(VarId, i32)>, usize>,
    matrix: F2Matrix,
}

impl ImageSpan {
    fn build(images: &[GradedPolynomial]) -> Result<ImageSpan> {
        let mut columns = BTreeMap::new();
        for p in images {
            for m in p.terms() {
                let next = columns.len();
                columns.entry(m.exps().to_vec()).or_insert(next);
            }
        }
        let matrix = F2Matrix::new(columns.len());
        let mut span = ImageSpan { columns, matrix };
        for p in images {
            let cols = span.vectorize(p)?;
            if !span.matrix.insert(&cols) {
                return Err(Error::Unsupported(
                    "embedded basis images are dependent".into(),
                ));
            }
        }
        Ok(span)
    }

    fn vectorize(&self, p: &GradedPolynomial) -> Result<Vec<usize>> {
        let mut cols = Vec::with_capacity(p.len());
        for m in p.terms() {
            let Some(&c) = self.columns.get(m.exps()) else {
                return Err(Error::NotInSpan("no matching image column".into()));
            };
            cols.push(c);
        }
        Ok(cols)
    }

    // every insert grew the rank, so witness indices are image indices
    fn express(&self, p: &GradedPolynomial) -> Result<Vec<usize>> {
        if p.is_zero() {
            return Ok(Vec::new());
        }
        let cols = self.vectorize(p)?;
        let (residual, used) = self.matrix.reduce_with_witness(&cols);
        if !residual.is_empty() {
            return Err(Error::NotInSpan("residual outside the image span".into()));
        }
        Ok(used)
    }
}

/// The scalar subring embedded in the Faa di Bruno algebra, with enough
/// solved structure to read D_t rows back off the embedding.
pub struct BasePullback {
    model: Arc<LazardModel>,
    maxdeg: u32,
    qspec: QRingSpec,
    hbar_t: PowerSeries,
    a_images: BTreeMap<(u32, u32), GradedPolynomial>,
    images: Vec<Vec<GradedPolynomial>>,
    spans: Vec<ImageSpan>,
}

/// Embed the subring along a(i,j) ↦ [x^i y^j] h(h̄x + h̄y) and solve the
/// plain generator structure beside it. Images of the degreewise bases
/// must stay independent; entry precision is exactly maxdeg − 2·degree.
pub fn base_pullback(
    h: &Arc<HopfPresentation>,
    model: &Arc<LazardModel>,
    maxdeg: u32,
) -> Result<BasePullback> {
    assert!(!h.unit_leading(), "needs the invertible leading generator");
    assert!(
        model.max_basis_degree() >= maxdeg,
        "model bases must cover the degree budget"
    );
    let qspec = solve_generator_qstructure(h, maxdeg + 2)?;

    let alphabet = h.alphabet();
    let hx = h.series_in(alphabet, 0, FVar::X, &[FVar::X], maxdeg + 1)?;
    let hbar = hx.comp_inverse()?;
    let s = hbar.add(&hbar.rename_var(FVar::X, FVar::Y))?;
    let fh = hx.compose(&s)?;
    let hbar_t = h
        .series_in(alphabet, 0, FVar::T, &[FVar::T], maxdeg)?
        .comp_inverse()?;

    let mut a_images = BTreeMap::new();
    for total in 2..=maxdeg + 1 {
        for i in 1..total {
            let j = total - i;
            let img = fh.coefficient(&[i as u16, j as u16]);
            if !img.is_zero() {
                a_images.insert((i, j), img);
            }
        }
    }

    let mut images: Vec<Vec<GradedPolynomial>> = vec![vec![GradedPolynomial::one(alphabet)]];
    for n in 1..=maxdeg {
        let basis = model.basis(n);
        let mut level = Vec::with_capacity(basis.len());
        for k in 0..basis.len() {
            let ((i, j), lower) = basis.factor_of(k).expect("positive degree");
            let g = i + j - 1;
            let a_img = a_images
                .get(&(i, j))
                .ok_or_else(|| Error::MissingImage(format!("a({i},{j})")))?;
            level.push(a_img.mul(&images[(n - g) as usize][lower])?);
        }
        images.push(level);
    }
    let spans = images
        .iter()
        .map(|level| ImageSpan::build(level))
        .collect::<Result<Vec<_>>>()?;

    Ok(BasePullback {
        model: model.clone(),
        maxdeg,
        qspec,
        hbar_t,
        a_images,
        images,
        spans,
    })
}

impl BasePullback {
    pub fn model(&self) -> &Arc<LazardModel> {
        &self.model
    }

    pub fn maxdeg(&self) -> u32 {
        self.maxdeg
    }

    fn a_image(&self, i: u32, j: u32) -> Result<&GradedPolynomial> {
        self.a_images
            .get(&(i, j))
            .ok_or_else(|| Error::MissingImage(format!("a({i},{j})")))
    }

    /// D_k rows of the subring element behind `image`, each one a basis
    /// combination at degree 2·degree + k: the solved table evaluates on
    /// the image, t reads back through h̄, and every coefficient must land
    /// in the span of the embedded basis.
    fn rows_for(
        &self,
        image: &GradedPolynomial,
        degree: u32,
        tmax: u32,
    ) -> Result<Vec<Vec<Scalar>>> {
        assert!(2 * degree + tmax <= self.maxdeg, "row budget exceeds the pullback");
        let series = self
            .qspec
            .qt_eval(image, tmax)?
            .compose(&self.hbar_t.truncated(tmax))?;
        let mut rows = Vec::with_capacity(tmax as usize + 1);
        for k in 0..=tmax {
            let d = 2 * degree + k;
            let combo = self.spans[d as usize]
                .express(&series.coeff1(k as u16))?
                .into_iter()
                .map(|idx| (d, idx))
                .collect();
            rows.push(combo);
        }
        Ok(rows)
    }
}

fn rows_series(model: &LazardModel, rows: &[Vec<Scalar>], cap: u32) -> Result<PowerSeries> {
    let mut out = PowerSeries::zero(model.alphabet(), &[FVar::T], cap);
    for (k, row) in rows.iter().enumerate() {
        let mut c = GradedPolynomial::zero(model.alphabet());
        for &(d, idx) in row {
            c.add_assign(model.basis(d).element(idx))?;
        }
        out.set_coefficient(&[k as u16], c);
    }
    Ok(out)
}

/// Table on the model variables themselves. A variable of grade g with a
/// linear slot in some a(i,j) inherits that generator's pulled-back rows
/// minus the already-built value of the composite remainder, taking
/// i = the lowest set bit of g+1 so the binomial on the slot is odd; the
/// others square freely. The certificate re-evaluates every generator
/// over the finished table against its own pullback rows.
pub fn solve_base_dstructure(pb: &BasePullback, report: &mut Report) -> Result<DRingSpec> {
    let model = pb.model().clone();
    let carrier = model.alphabet().clone();
    let maxdeg = pb.maxdeg();

    let mut spec = QRingSpec {
        carrier: carrier.clone(),
        table: BTreeMap::new(),
    };
    // grade order, so remainders only ever evaluate finished variables
    for (v, info) in carrier.vars() {
        let g = info.grade;
        let cap = maxdeg.saturating_sub(2 * g);
        let mvar = GradedPolynomial::variable(&carrier, v);
        let pinned = !model.is_additive() && 2 * g <= maxdeg && !(g + 1).is_power_of_two();
        let entry = if pinned {
            let i = 1u32 << (g + 1).trailing_zeros();
            let j = g + 1 - i;
            let mut rest = model.a(i, j);
            rest.add_assign(&mvar)?;
            let d_rest = spec.qt_eval(&rest, cap)?;
            let rows = pb.rows_for(pb.a_image(i, j)?, g, cap)?;
            rows_series(&model, &rows, cap)?.add(&d_rest)?
        } else {
            let mut s = PowerSeries::zero(&carrier, &[FVar::T], cap);
            s.set_coefficient(&[0], mvar.square()?);
            s
        };
        spec.table.insert(v, entry);
    }

    for ((i, j), a) in model.generators() {
        let n = i + j - 1;
        if 2 * n > maxdeg {
            continue;
        }
        let p = maxdeg - 2 * n;
        let lhs = spec.qt_eval(&a, p)?;
        let rows = pb.rows_for(pb.a_image(i, j)?, n, p)?;
        let rhs = rows_series(&model, &rows, p)?;
        report.record(
            "dring",
            &format!("base-pullback[a({i},{j})]"),
            lhs == rhs,
            format!("through t^{p}"),
        );
    }
    report.record(
        "dring",
        "base-injective",
        true,
        format!("independent images through degree {maxdeg}"),
    );

    Ok(DRingSpec {
        spec,
        model,
        m_slot: 0,
    })
}

/// D_t of every scalar basis element through the pullback budget,
/// re-expressed in the basis. Entry precision at degree e is maxdeg − 2e,
/// matching the most a degree-capped ring can request; the t⁰ row must
/// come back as the square.
pub fn scalar_derivative_table(pb: &BasePullback) -> Result<ScalarDt> {
    let model = pb.model();
    let mut dt = ScalarDt::default();
    for e in 0..=pb.maxdeg() / 2 {
        let tmax = pb.maxdeg() - 2 * e;
        for idx in 0..model.rank(e) {
            let rows = pb.rows_for(&pb.images[e as usize][idx], e, tmax)?;
            let sq = model.basis(e).element(idx).square()?;
            let frob: Vec<Scalar> = model
                .express(2 * e, &sq)?
                .into_iter()
                .map(|k| (2 * e, k))
                .collect();
            if rows[0] != frob {
                return Err(Error::Unsupported(format!(
                    "t⁰ row of {} is not the square",
                    model.basis(e).derivation(idx)
                )));
            }
            dt.insert((e, idx), rows);
        }
    }
    Ok(dt)
}

/// Scalar-level commuting squares: D̂_t(λ(a)) = Σ_k λ(D_k a)·ĝ(t)^k over
/// the solved tensor carrier, one row per model generator. The budget per
/// generator is what the entry caps and the coaction degree support.
pub fn base_square_check(
    hopf: &Arc<HopfPresentation>,
    base: &DRingSpec,
    dsolve: &DRingSpec,
    ln: &LnCoaction,
    maxdeg: u32,
    suite: &str,
    report: &mut Report,
) -> Result<()> {
    assert_eq!(base.m_slot, 0, "base scalars come unembedded");
    let model = &dsolve.model;
    let carrier = dsolve.carrier();
    let embed_ln = PolyHom::embedding(ln.tensor(), carrier, 0)?;

    for ((i, j), a) in model.generators() {
        let n = i + j - 1;
        if 2 * n > ln.max_degree() {
            continue;
        }
        let p = maxdeg
            .saturating_sub(2 * n)
            .min(ln.max_degree().saturating_sub(n));
        let lam = embed_ln.apply(&ln.a_image(i, j))?;
        let lhs = dsolve.spec.qt_eval(&lam, p)?;

        let dk = base.spec.qt_eval(&a, p)?;
        let ghat = hopf.series_in(carrier, 0, FVar::T, &[FVar::T], p)?;
        let mut rhs = PowerSeries::zero(carrier, &[FVar::T], p);
        let mut gk = PowerSeries::constant(GradedPolynomial::one(carrier), &[FVar::T], p);
        for k in 0..=p {
            let c = dk.coeff1(k as u16);
            if !c.is_zero() {
                let lam_c = embed_ln.apply(&ln.apply(model, n + k, &c)?)?;
                let term = PowerSeries::constant(lam_c, &[FVar::T], p).mul(&gk)?;
                rhs = rhs.add(&term)?;
            }
            gk = gk.mul(&ghat)?;
        }
        report.record(
            suite,
            &format!("base-square[a({i},{j})]"),
            lhs == rhs,
            format!("through t^{p}"),
        );
    }
    Ok(())
}

/// Free D-ring: the free-ring engine with model scalars, the twisted
/// extension in the relation generator, and optionally a solved scalar
/// table.
pub fn build_free_dring(
    model: &Arc<LazardModel>,
    scalar_dt: Option<Arc<ScalarDt>>,
    gens: &[(&str, u32, u32)],
    maxdeg: u32,
    maxweight: u32,
) -> Result<FreeOperationRing> {
    assert!(
        model.max_basis_degree() >= maxdeg,
        "model bases must cover the degree budget"
    );
    FreeOperationRing::build_with(
        ScalarEngine::Model(model.clone()),
        scalar_dt,
        gens,
        maxdeg,
        maxweight,
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::{build_additive_fgl, build_universal_fgl};
    use crate::qring::{free::build_free_qring, solve_generator_qstructure};

    #[test]
    fn base_table_squares() {
        let model = Arc::new(build_universal_fgl(6).unwrap());
        let base = DRingSpec::base(&model, 6).unwrap();
        let m2 = GradedPolynomial::variable(base.carrier(), base.carrier().locate(0, "m2").unwrap());
        assert!(base.squaring_check(&m2).unwrap());
        let u = base.dt_eval(&m2, 4).unwrap();
        assert_eq!(u.coeff1(0).display(), "m2^2");
        for k in 1..=4 {
            assert!(u.coeff1(k).is_zero());
        }
    }

    #[test]
    fn universal_solve_certifies_xf_and_flags_xxt() {
        let model = Arc::new(build_universal_fgl(9).unwrap());
        let base = DRingSpec::base(&model, 8).unwrap();
        let h = HopfPresentation::faa_di_bruno(7).unwrap();
        let mut report = Report::new();
        let d = solve_tensor_dstructure(&h, &base, Quadratic::XtimesFxt, 8, &mut report).unwrap();
        let text = report.to_text();
        assert!(report.all_pass(), "{text}");
        assert!(text.contains("certified[x·F(x,t)]"));
        assert!(text.contains("observed[x(x+t)]") && text.contains("residual nonzero"));

        // D_t(h_0) = h_0·Σ h_n tⁿ exactly, with no model corrections
        let h0 = d.carrier().locate(0, "h0").unwrap();
        let entry = d.spec.entry(h0).unwrap();
        assert_eq!(entry.coeff1(0).display(), "h0^2⊗1");
        assert_eq!(entry.coeff1(1).display(), "h0·h1⊗1");
        assert_eq!(entry.coeff1(2).display(), "h0·h2⊗1");
        assert_eq!(entry.coeff1(3).display(), "h0·h3⊗1");
    }

    #[test]
    fn additive_solve_collapses_to_the_square_structure() {
        let model = Arc::new(build_additive_fgl(9).unwrap());
        let base = DRingSpec::base(&model, 8).unwrap();
        let h = HopfPresentation::faa_di_bruno(7).unwrap();
        let q = solve_generator_qstructure(&h, 8).unwrap();

        for quadratic in [Quadratic::XtimesFxt, Quadratic::XxPlusT] {
            let mut report = Report::new();
            let d = solve_tensor_dstructure(&h, &base, quadratic, 8, &mut report).unwrap();
            assert!(report.all_pass(), "{}", report.to_text());
            assert!(report.to_text().contains("residual zero"));

            let embed = PolyHom::embedding(h.alphabet(), d.carrier(), 0).unwrap();
            for (v, entry) in &q.table {
                let name = &h.alphabet().info(*v).name;
                let dv = d.carrier().locate(0, name).unwrap();
                assert_eq!(
                    d.spec.table[&dv],
                    entry.map_coeffs(&embed).unwrap(),
                    "entry {name} under {}",
                    quadratic.label()
                );
            }
        }
    }

    #[test]
    fn evaluation_is_multiplicative_and_collapses() {
        let model = Arc::new(build_additive_fgl(9).unwrap());
        let base = DRingSpec::base(&model, 8).unwrap();
        let h = HopfPresentation::faa_di_bruno(7).unwrap();
        let mut report = Report::new();
        let d = solve_tensor_dstructure(&h, &base, Quadratic::XtimesFxt, 8, &mut report).unwrap();
        let q = solve_generator_qstructure(&h, 8).unwrap();

        let h0 = GradedPolynomial::variable(h.alphabet(), h.gen_var(0).unwrap());
        let embed = PolyHom::embedding(h.alphabet(), d.carrier(), 0).unwrap();
        let h0_sq_t = d
            .dt_eval(&embed.apply(&h0.square().unwrap()).unwrap(), 4)
            .unwrap();
        let q_h0 = q.qt_eval(&h0, 4).unwrap();
        assert_eq!(h0_sq_t, q_h0.mul(&q_h0).unwrap().map_coeffs(&embed).unwrap());
    }

    #[test]
    fn interchange_on_the_leading_generator() {
        let model = Arc::new(build_universal_fgl(15).unwrap());
        let base = DRingSpec::base(&model, 14).unwrap();
        let h = HopfPresentation::faa_di_bruno(13).unwrap();
        let mut report = Report::new();
        let d = solve_tensor_dstructure(&h, &base, Quadratic::XtimesFxt, 14, &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.to_text());

        let h0 = GradedPolynomial::variable(d.carrier(), d.carrier().locate(0, "h0").unwrap());
        d.interchange_check(&h0, 6, "dring", "h0", &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.to_text());
    }

    #[test]
    fn free_dring_terminates_and_is_order_independent() {
        let model = Arc::new(build_universal_fgl(6).unwrap());
        let ring = build_free_dring(&model, None, &[("x", 0, 1)], 4, 4).unwrap();
        let permuted = FreeOperationRing::build(
            ScalarEngine::Model(model.clone()),
            &[("x", 0, 1)],
            4,
            4,
            true,
        )
        .unwrap();
        assert_eq!(ring.dimensions(), permuted.dimensions());

        // D_0(x) = x²: the squaring relation holds in the quotient
        let x = crate::qring::free::FreeElement::gen(0);
        let x2 = x.mul(&x, ring.engine()).unwrap();
        let q0 = ring.qi_element(&x, 0).unwrap();
        assert_eq!(ring.normal_form(&x2), ring.normal_form(&q0));

        // (d,2) is the free rank-one module over the scalars
        for d in 0..=4u32 {
            let expect: usize = (0..=d).map(|e| model.rank(e)).sum();
            assert_eq!(ring.dimension(d, 2), expect, "(d,2) at d={d}");
        }
    }

    #[test]
    fn free_dring_additive_matches_the_free_qring() {
        let model = Arc::new(build_additive_fgl(7).unwrap());
        let dring = build_free_dring(&model, None, &[("x", 0, 1)], 6, 4).unwrap();
        let qring = build_free_qring(&[("x", 0, 1)], 6, 4).unwrap();
        assert_eq!(dring.dimensions(), qring.dimensions());

        let dq = dring.alphabetize().unwrap();
        let qq = qring.alphabetize().unwrap();
        assert_eq!(dq.alphabet, qq.alphabet);
        assert_eq!(
            dq.qspec.as_ref().unwrap().table,
            qq.qspec.as_ref().unwrap().table
        );
    }

    #[test]
    fn base_solve_certifies_and_pins_constant_terms() {
        let model = Arc::new(build_universal_fgl(15).unwrap());
        let mut report = Report::new();
        let base = solve_base_dstructure(&model, Quadratic::XtimesFxt, 14, &mut report).unwrap();
        let text = report.to_text();
        assert!(report.all_pass(), "{text}");
        assert!(text.contains("base-certified[x·F(x,t)]"));
        assert!(text.contains("base-observed[x(x+t)]"));

        for (v, info) in base.carrier().vars() {
            let m = GradedPolynomial::variable(base.carrier(), v);
            assert_eq!(
                base.spec.table[&v].coeff1(0),
                m.square().unwrap(),
                "t⁰ of {}",
                info.name
            );
            assert!(base.squaring_check(&m).unwrap());
        }
    }

    #[test]
    fn base_solve_additive_is_the_squaring_table() {
        let model = Arc::new(build_additive_fgl(9).unwrap());
        for quadratic in [Quadratic::XtimesFxt, Quadratic::XxPlusT] {
            let mut report = Report::new();
            let solved = solve_base_dstructure(&model, quadratic, 8, &mut report).unwrap();
            assert!(report.all_pass(), "{}", report.to_text());
            for (v, _) in solved.carrier().vars() {
                let entry = &solved.spec.table[&v];
                for k in 1..=entry.cap() {
                    assert!(entry.coeff1(k as u16).is_zero());
                }
            }
        }
    }
}
