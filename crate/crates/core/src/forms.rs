//! Differential forms with complex expression coefficients, the Hodge star,
//! and the conjugated operator calculus d^c, δ^c, Δ^c, ∂̄, ∂̄̄ built from the
//! Norden structure J_c, together with an identity-conformance engine.
//!
//! Conventions, deliberately literal:
//! - δ := ⋆∘d∘⋆ with no degree-dependent sign, mirroring δ^c := ⋆∘d^c∘⋆.
//! - J*_c acts on r-forms by argumentwise precomposition with J_c
//!   (identity on 0-forms).
//! - J* (the metallic dual on forms) := (p·I − √(−p²−4q)·J*_c)/2, the
//!   linear inversion of the substitution J*_c = −(2J*−pI)/√(−p²−4q); on
//!   1-forms this is exactly argumentwise precomposition with J.
//!
//! Under these conventions some printed identities hold only away from
//! degree 0 (their ⋆-mirrors only away from top degree); the conformance
//! table measures every row and reports residuals instead of absorbing
//! signs.

use crate::error::GeomError;
use crate::expr::ScalarExpr;
use crate::fields::{det_exprs, Chart, EndoField, MetricField};
use crate::metallic::MetallicParams;
use crate::norden::{norden_jc, ComplexExpr};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A degree-r differential form: strictly increasing multi-indices (stored
/// as bitmasks) mapping to complex expression coefficients.
#[derive(Debug, Clone)]
pub struct FormField {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<u32, ComplexExpr>,
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of merging two disjoint index sets: (−1)^{#crossings}.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut crossings = 0u32;
    for i in mask_indices(a) {
        crossings += (b & ((1u32 << i) - 1)).count_ones();
    }
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FormField {
    pub fn zero(chart: &Chart, degree: usize) -> FormField {
        FormField {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A real 0-form from a scalar expression.
    pub fn function(chart: &Chart, f: ScalarExpr) -> FormField {
        let mut out = FormField::zero(chart, 0);
        out.terms.insert(0, ComplexExpr::real(f));
        out
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &ComplexExpr)> {
        self.terms.iter().map(|(m, c)| (mask_indices(*m), c))
    }

    /// Add `coeff · dx^{indices}` (indices need not be sorted; repeated
    /// indices annihilate the term).
    pub fn add_term(&mut self, indices: &[usize], coeff: ComplexExpr) -> Result<(), GeomError> {
        if indices.len() != self.degree {
            return Err(GeomError::FormDegree {
                degree: indices.len(),
                context: format!("term on a degree-{} form", self.degree),
            });
        }
        let mut mask = 0u32;
        for &i in indices {
            if i >= self.chart.dim {
                return Err(GeomError::dim(format!(
                    "index {} on a {}-dimensional chart",
                    i + 1,
                    self.chart.dim
                )));
            }
            let bit = 1u32 << i;
            if mask & bit != 0 {
                return Ok(()); // repeated index: dx ∧ dx = 0
            }
            mask |= bit;
        }
        // permutation parity of `indices` against sorted order
        let mut inversions = 0;
        for i in 0..indices.len() {
            for j in (i + 1)..indices.len() {
                if indices[i] > indices[j] {
                    inversions += 1;
                }
            }
        }
        let add = if inversions % 2 == 1 { coeff.neg() } else { coeff };
        self.upsert(mask, add);
        Ok(())
    }

    fn upsert(&mut self, mask: u32, coeff: ComplexExpr) {
        let entry = self
            .terms
            .entry(mask)
            .or_insert_with(ComplexExpr::zero)
            .add(&coeff);
        if entry.is_structurally_zero() {
            self.terms.remove(&mask);
        } else {
            self.terms.insert(mask, entry);
        }
    }

    pub fn add(&self, o: &FormField) -> FormField {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.upsert(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &FormField) -> FormField {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> FormField {
        let mut out = FormField::zero(&self.chart, self.degree);
        for (m, coeff) in &self.terms {
            let v = coeff.scale(c);
            if !v.is_structurally_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    pub fn scale_expr(&self, f: &ScalarExpr) -> FormField {
        let mut out = FormField::zero(&self.chart, self.degree);
        for (m, coeff) in &self.terms {
            out.terms.insert(
                *m,
                ComplexExpr::new(coeff.re.mul(f), coeff.im.mul(f)),
            );
        }
        out
    }

    /// Coefficient vector norm at a point: sqrt(Σ_I |α_I(pt)|²).
    pub fn coeff_norm(&self, pt: &[f64]) -> Result<f64, GeomError> {
        let mut acc = 0.0;
        for c in self.terms.values() {
            acc += c.eval(pt)?.norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// Wedge product with graded-commutative sign handling.
    pub fn wedge(&self, o: &FormField) -> Result<FormField, GeomError> {
        let degree = self.degree + o.degree;
        if degree > self.chart.dim {
            return Err(GeomError::FormDegree {
                degree,
                context: format!("wedge on a {}-dimensional chart", self.chart.dim),
            });
        }
        let mut out = FormField::zero(&self.chart, degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(*ma, *mb);
                let mut c = ca.mul(cb);
                if sign < 0.0 {
                    c = c.neg();
                }
                out.upsert(ma | mb, c);
            }
        }
        Ok(out)
    }

    /// Exterior derivative. Errors at top degree; compositions inside the
    /// operator engine use [`FormField::d_cochain`], which returns the zero
    /// form there (Λ^{n+1} = 0).
    pub fn exterior_d(&self) -> Result<FormField, GeomError> {
        if self.degree >= self.chart.dim {
            return Err(GeomError::FormDegree {
                degree: self.degree,
                context: "exterior derivative at top degree".into(),
            });
        }
        Ok(self.d_cochain())
    }

    /// d with the cochain-complex convention: top degree maps to zero.
    pub fn d_cochain(&self) -> FormField {
        let n = self.chart.dim;
        if self.degree >= n {
            return FormField::zero(&self.chart, n.min(self.degree));
        }
        let mut out = FormField::zero(&self.chart, self.degree + 1);
        for (m, c) in &self.terms {
            for i in 0..n {
                let bit = 1u32 << i;
                if m & bit != 0 {
                    continue;
                }
                let sign = merge_sign(bit, *m);
                let mut dc = c.diff(i);
                if sign < 0.0 {
                    dc = dc.neg();
                }
                out.upsert(bit | m, dc);
            }
        }
        out
    }

    /// Argumentwise precomposition with an endomorphism field:
    /// (A*α)(X₁,…,X_r) = α(AX₁,…,AX_r); identity on 0-forms. The
    /// coefficient transform is (A*α)_I = Σ_K det(A[K,I]) α_K.
    pub fn precompose(&self, a: &EndoField) -> FormField {
        if self.degree == 0 {
            return self.clone();
        }
        let n = self.chart.dim;
        let r = self.degree;
        let mut out = FormField::zero(&self.chart, r);
        let masks: Vec<u32> = increasing_masks(n, r);
        for &target in &masks {
            let cols = mask_indices(target);
            let mut acc = ComplexExpr::zero();
            for (m, c) in &self.terms {
                let rows = mask_indices(*m);
                let minor: Vec<Vec<ScalarExpr>> = rows
                    .iter()
                    .map(|&k| cols.iter().map(|&i| a.entry(k, i).clone()).collect())
                    .collect();
                let det = det_exprs(&minor).simplify();
                if let Some(0.0) = det.as_const() {
                    continue;
                }
                acc = acc.add(&ComplexExpr::new(c.re.mul(&det), c.im.mul(&det)));
            }
            if !acc.is_structurally_zero() {
                out.terms.insert(target, acc);
            }
        }
        out
    }

    /// Hodge star against g. The sign of det g is probed at `probe` (it is
    /// constant on a chart with nondegenerate g).
    pub fn hodge_star(&self, g: &MetricField, probe: &[f64]) -> Result<FormField, GeomError> {
        let n = self.chart.dim;
        if self.is_zero() {
            return Ok(FormField::zero(&self.chart, n.saturating_sub(self.degree)));
        }
        let det = g.check_nondegenerate(probe)?;
        let sign = det.signum();
        let det_expr = g.det_expr();
        let sqrt_abs_det = ScalarExpr::constant(sign).mul(&det_expr).sqrt();
        let ginv = g.inverse_exprs();
        let r = self.degree;
        let full: u32 = (1u32 << n) - 1;
        let mut out = FormField::zero(&self.chart, n - r);
        for &jm in &increasing_masks(n, r) {
            let jrows = mask_indices(jm);
            // ⟨dx^J, α⟩ = Σ_I det(g^{-1}[J,I]) α_I
            let mut inner = ComplexExpr::zero();
            for (im, c) in &self.terms {
                let icols = mask_indices(*im);
                let minor: Vec<Vec<ScalarExpr>> = jrows
                    .iter()
                    .map(|&a| icols.iter().map(|&b| ginv[a][b].clone()).collect())
                    .collect();
                let det = if r == 0 {
                    ScalarExpr::one()
                } else {
                    det_exprs(&minor).simplify()
                };
                if let Some(0.0) = det.as_const() {
                    continue;
                }
                inner = inner.add(&ComplexExpr::new(c.re.mul(&det), c.im.mul(&det)));
            }
            if inner.is_structurally_zero() {
                continue;
            }
            let comp = full & !jm;
            let eps = merge_sign(jm, comp);
            let mut coeff = ComplexExpr::new(
                inner.re.mul(&sqrt_abs_det),
                inner.im.mul(&sqrt_abs_det),
            );
            if eps < 0.0 {
                coeff = coeff.neg();
            }
            out.upsert(comp, coeff);
        }
        Ok(out)
    }

    /// Pointwise inner product ⟨α, β⟩ = Σ_{I,J} det(g^{-1}[I,J]) α_I β_J
    /// (complex-bilinear).
    pub fn inner_at(
        &self,
        o: &FormField,
        g: &MetricField,
        pt: &[f64],
    ) -> Result<Complex64, GeomError> {
        if self.degree != o.degree {
            return Err(GeomError::FormDegree {
                degree: o.degree,
                context: "inner product of unequal degrees".into(),
            });
        }
        let gm = g.eval(pt)?;
        let ginv = gm.clone().try_inverse().ok_or(GeomError::DegenerateMetric {
            point: pt.to_vec(),
            det: gm.determinant(),
        })?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (ma, ca) in &self.terms {
            let rows = mask_indices(*ma);
            for (mb, cb) in &o.terms {
                let cols = mask_indices(*mb);
                let det = if rows.is_empty() {
                    1.0
                } else {
                    let minor = nalgebra::DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                        ginv[(rows[i], cols[j])]
                    });
                    minor.determinant()
                };
                acc += Complex64::new(det, 0.0) * ca.eval(pt)? * cb.eval(pt)?;
            }
        }
        Ok(acc)
    }
}

/// All strictly increasing multi-index masks of the given degree.
pub(crate) fn increasing_masks(n: usize, r: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == r).collect()
}

/// Torus pairing ∫⟨α,β⟩ vol over a fully periodic chart with the periodic
/// trapezoidal rule (exact for trigonometric polynomials below Nyquist).
pub fn torus_pairing(
    alpha: &FormField,
    beta: &FormField,
    g: &MetricField,
    grid: usize,
) -> Result<Complex64, GeomError> {
    let chart = alpha.chart();
    if !chart.is_torus() {
        return Err(GeomError::NonPeriodicChart);
    }
    let n = chart.dim;
    let step = 2.0 * std::f64::consts::PI / grid as usize as f64;
    let cell = step.powi(n as i32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; n];
    loop {
        let pt: Vec<f64> = idx.iter().map(|&k| k as f64 * step).collect();
        let det = g.det_expr().eval(&pt)?;
        let weight = det.abs().sqrt() * cell;
        acc += alpha.inner_at(beta, g, &pt)? * Complex64::new(weight, 0.0);
        // odometer increment
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < grid {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                return Ok(acc);
            }
        }
    }
}

/// The operator vocabulary of the conjugated calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// exterior derivative d
    D,
    /// d^c = J*_c ∘ d ∘ J*_c
    Dc,
    /// δ = ⋆ ∘ d ∘ ⋆ (no codifferential sign, mirroring δ^c)
    Delta,
    /// δ^c = ⋆ ∘ d^c ∘ ⋆
    DeltaC,
    /// Hodge star
    Star,
    /// J*_c precomposition
    JstarC,
    /// Δ = dδ + δd
    Laplace,
    /// Δ^c = d^cδ^c + δ^cd^c
    LaplaceC,
    /// ∂̄ = ½(d − i d^c)
    Dbar,
    /// ∂̄̄ = ½(δ − i δ^c)
    Dbarbar,
    /// the closed form (1/(2(p²+4q)))[(p²+4q)d + i(4J*dJ* − 2p dJ* − 2p J*d + p²d)]
    DbarExplicit,
}

/// Operator context: the structure data every operator application needs.
pub struct OperatorContext {
    pub g: MetricField,
    pub j: EndoField,
    pub params: MetallicParams,
    pub jc: EndoField,
    probe: Vec<f64>,
}

impl OperatorContext {
    pub fn new(
        g: &MetricField,
        j: &EndoField,
        params: MetallicParams,
        probe: &[f64],
    ) -> Result<OperatorContext, GeomError> {
        let jc = norden_jc(j, params)?;
        Ok(OperatorContext {
            g: g.clone(),
            j: j.clone(),
            params,
            jc,
            probe: probe.to_vec(),
        })
    }

    pub fn d(&self, a: &FormField) -> FormField {
        a.d_cochain()
    }

    pub fn jstar_c(&self, a: &FormField) -> FormField {
        a.precompose(&self.jc)
    }

    /// The metallic dual on forms: J* = (p·I − √(−disc)·J*_c)/2.
    pub fn jstar(&self, a: &FormField) -> FormField {
        let sqrt_d = (-self.params.disc()).sqrt();
        a.scale(Complex64::new(self.params.p / 2.0, 0.0))
            .sub(&self.jstar_c(a).scale(Complex64::new(sqrt_d / 2.0, 0.0)))
    }

    pub fn star(&self, a: &FormField) -> Result<FormField, GeomError> {
        a.hodge_star(&self.g, &self.probe)
    }

    pub fn dc(&self, a: &FormField) -> FormField {
        self.jstar_c(&self.jstar_c(a).d_cochain())
    }

    pub fn delta(&self, a: &FormField) -> Result<FormField, GeomError> {
        self.star(&self.star(a)?.d_cochain())
    }

    pub fn delta_c(&self, a: &FormField) -> Result<FormField, GeomError> {
        self.star(&self.dc(&self.star(a)?))
    }

    pub fn laplace(&self, a: &FormField) -> Result<FormField, GeomError> {
        Ok(self.delta(a)?.d_cochain().add(&self.delta(&a.d_cochain())?))
    }

    pub fn laplace_c(&self, a: &FormField) -> Result<FormField, GeomError> {
        Ok(self.dc(&self.delta_c(a)?).add(&self.delta_c(&self.dc(a))?))
    }

    pub fn dbar(&self, a: &FormField) -> FormField {
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        a.d_cochain().scale(half).add(&self.dc(a).scale(minus_half_i))
    }

    pub fn dbarbar(&self, a: &FormField) -> Result<FormField, GeomError> {
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        Ok(self
            .delta(a)?
            .scale(half)
            .add(&self.delta_c(a)?.scale(minus_half_i)))
    }

    pub fn dbar_explicit(&self, a: &FormField) -> FormField {
        let d = self.params.disc();
        let p = self.params.p;
        // 4 J*dJ* − 2p dJ* − 2p J*d + p² d
        let ja = self.jstar(a);
        let term = self
            .jstar(&ja.d_cochain())
            .scale(Complex64::new(4.0, 0.0))
            .sub(&ja.d_cochain().scale(Complex64::new(2.0 * p, 0.0)))
            .sub(&self.jstar(&a.d_cochain()).scale(Complex64::new(2.0 * p, 0.0)))
            .add(&a.d_cochain().scale(Complex64::new(p * p, 0.0)));
        a.d_cochain()
            .scale(Complex64::new(0.5, 0.0))
            .add(&term.scale(Complex64::new(0.0, 1.0 / (2.0 * d))))
    }

    pub fn dbarbar_explicit(&self, a: &FormField) -> Result<FormField, GeomError> {
        let d = self.params.disc();
        let p = self.params.p;
        let ja = self.jstar(a);
        let term = self
            .jstar(&self.delta(&ja)?)
            .scale(Complex64::new(4.0, 0.0))
            .sub(&self.delta(&ja)?.scale(Complex64::new(2.0 * p, 0.0)))
            .sub(&self.jstar(&self.delta(a)?).scale(Complex64::new(2.0 * p, 0.0)))
            .add(&self.delta(a)?.scale(Complex64::new(p * p, 0.0)));
        Ok(self
            .delta(a)?
            .scale(Complex64::new(0.5, 0.0))
            .add(&term.scale(Complex64::new(0.0, 1.0 / (2.0 * d)))))
    }

    pub fn apply(&self, kind: OperatorKind, a: &FormField) -> Result<FormField, GeomError> {
        Ok(match kind {
            OperatorKind::D => self.d(a),
            OperatorKind::Dc => self.dc(a),
            OperatorKind::Delta => self.delta(a)?,
            OperatorKind::DeltaC => self.delta_c(a)?,
            OperatorKind::Star => self.star(a)?,
            OperatorKind::JstarC => self.jstar_c(a),
            OperatorKind::Laplace => self.laplace(a)?,
            OperatorKind::LaplaceC => self.laplace_c(a)?,
            OperatorKind::Dbar => self.dbar(a),
            OperatorKind::Dbarbar => self.dbarbar(a)?,
            OperatorKind::DbarExplicit => self.dbar_explicit(a),
        })
    }
}

/// Free-function form of [`OperatorContext::apply`].
pub fn apply_operator(
    kind: OperatorKind,
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    alpha: &FormField,
    probe: &[f64],
) -> Result<FormField, GeomError> {
    let needs_norden = matches!(
        kind,
        OperatorKind::Dc
            | OperatorKind::DeltaC
            | OperatorKind::LaplaceC
            | OperatorKind::JstarC
            | OperatorKind::Dbar
            | OperatorKind::Dbarbar
            | OperatorKind::DbarExplicit
    );
    if needs_norden {
        params.require_negative_disc()?;
    }
    let ctx = if needs_norden {
        OperatorContext::new(g, j, params, probe)?
    } else {
        // J_c is never used by the real-only kinds; build a placeholder
        // context without the Norden constraint.
        OperatorContext {
            g: g.clone(),
            j: j.clone(),
            params,
            jc: EndoField::identity(j.dim()),
            probe: probe.to_vec(),
        }
    };
    ctx.apply(kind, alpha)
}

/// Whether a conformance row states an identity of the implemented
/// conventions (asserted by the acceptance suite) or a convention-dependent
/// relation that is measured and pinned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Identity,
    Measured,
}

#[derive(Debug, Clone)]
pub struct ConformanceRow {
    pub name: &'static str,
    pub residual: f64,
    pub kind: RowKind,
}

/// The canonical real trigonometric test forms on a torus chart:
/// coefficients of trigonometric degree ≤ 3 on every increasing multi-index
/// of the requested degrees.
pub fn trig_form_basis(chart: &Chart, degrees: &[usize]) -> Vec<FormField> {
    let n = chart.dim;
    let coeffs: Vec<ScalarExpr> = [
        "1",
        "sin(x1)",
        "cos(x2)",
        "sin(x1)*cos(x2)",
        "sin(2*x1 + x2)",
    ]
    .iter()
    .map(|t| ScalarExpr::parse(t, n).unwrap())
    .collect();
    let mut out = Vec::new();
    for &r in degrees {
        for mask in increasing_masks(n, r) {
            for c in &coeffs {
                let mut f = FormField::zero(chart, r);
                let idx = mask_indices(mask);
                f.add_term(&idx, ComplexExpr::real(c.clone())).unwrap();
                out.push(f);
            }
        }
    }
    out
}

/// Evaluate every §6.2 operator identity on the test forms. Identity rows
/// are exact under the implemented conventions on the degrees they are
/// evaluated at; measured rows are convention-dependent and their residuals
/// are the deliverable. The adjointness row integrates over the torus grid.
pub fn identity_conformance(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    test_forms: &[FormField],
    samples: &[Vec<f64>],
    grid: usize,
    probe: &[f64],
) -> Result<Vec<ConformanceRow>, GeomError> {
    let ctx = OperatorContext::new(g, j, params, probe)?;
    if test_forms.is_empty() || samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let residual_of = |f: &FormField| -> Result<f64, GeomError> {
        let mut m = 0.0f64;
        for pt in samples {
            m = m.max(f.coeff_norm(pt)?);
        }
        Ok(m)
    };
    let max_over =
        |op: &dyn Fn(&FormField) -> Result<FormField, GeomError>,
         filter: &dyn Fn(&FormField) -> bool|
         -> Result<f64, GeomError> {
            let mut m: f64 = 0.0;
            for a in test_forms.iter().filter(|a| filter(a)) {
                m = m.max(residual_of(&op(a)?)?);
            }
            Ok(m)
        };
    let all = |_: &FormField| true;
    let positive = |a: &FormField| a.degree() >= 1;
    let zero_forms = |a: &FormField| a.degree() == 0;
    let not_top = |a: &FormField| a.degree() < a.chart().dim;

    let mut rows = Vec::new();
    let mut push = |name: &'static str, kind: RowKind, residual: f64| {
        rows.push(ConformanceRow {
            name,
            residual,
            kind,
        });
    };

    push(
        "d.d = 0",
        RowKind::Identity,
        max_over(&|a| Ok(a.d_cochain().d_cochain()), &all)?,
    );
    push(
        "dc.dc = 0",
        RowKind::Identity,
        max_over(&|a| Ok(ctx.dc(&ctx.dc(a))), &all)?,
    );
    push(
        "d.dc + dc.d = 0 (r >= 1)",
        RowKind::Identity,
        max_over(&|a| Ok(ctx.dc(a).d_cochain().add(&ctx.dc(&a.d_cochain()))), &positive)?,
    );
    push(
        "d.dc + dc.d (0-forms)",
        RowKind::Measured,
        max_over(&|a| Ok(ctx.dc(a).d_cochain().add(&ctx.dc(&a.d_cochain()))), &zero_forms)?,
    );
    push(
        "deltac.deltac = 0",
        RowKind::Identity,
        max_over(&|a| ctx.delta_c(&ctx.delta_c(a)?), &all)?,
    );
    push(
        "delta.deltac + deltac.delta = 0 (r < n)",
        RowKind::Identity,
        max_over(
            &|a| Ok(ctx.delta(&ctx.delta_c(a)?)?.add(&ctx.delta_c(&ctx.delta(a)?)?)),
            &not_top,
        )?,
    );
    push(
        "delta.deltac + deltac.delta (top degree)",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.delta(&ctx.delta_c(a)?)?.add(&ctx.delta_c(&ctx.delta(a)?)?)),
            &|a| a.degree() == a.chart().dim,
        )?,
    );

    // adjointness ⟨d^c α, β⟩ = ⟨α, δ^c β⟩ over the torus pairing
    let mut adj: f64 = 0.0;
    for a in test_forms {
        for b in test_forms {
            if b.degree() != a.degree() + 1 {
                continue;
            }
            let lhs = torus_pairing(&ctx.dc(a), b, g, grid)?;
            let rhs = torus_pairing(a, &ctx.delta_c(b)?, g, grid)?;
            adj = adj.max((lhs - rhs).norm());
        }
    }
    push("<dc a, b> = <a, deltac b> (torus)", RowKind::Measured, adj);

    push(
        "dc.Jc = -Jc.d (r >= 1)",
        RowKind::Identity,
        max_over(
            &|a| Ok(ctx.dc(&ctx.jstar_c(a)).add(&ctx.jstar_c(&a.d_cochain()))),
            &positive,
        )?,
    );
    push(
        "dc.Jc = -Jc.d (0-forms)",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.dc(&ctx.jstar_c(a)).add(&ctx.jstar_c(&a.d_cochain()))),
            &zero_forms,
        )?,
    );
    push(
        "Jc.dc = -d.Jc",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.jstar_c(&ctx.dc(a)).add(&ctx.jstar_c(a).d_cochain())),
            &all,
        )?,
    );
    push(
        "deltac.Jc = -Jc.delta",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.delta_c(&ctx.jstar_c(a))?.add(&ctx.jstar_c(&ctx.delta(a)?))),
            &all,
        )?,
    );
    push(
        "Jc.deltac = -delta.Jc",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.jstar_c(&ctx.delta_c(a)?).add(&ctx.delta(&ctx.jstar_c(a))?)),
            &all,
        )?,
    );
    push(
        "deltac = Jc.delta.Jc",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.delta_c(a)?.sub(&ctx.jstar_c(&ctx.delta(&ctx.jstar_c(a))?))),
            &all,
        )?,
    );
    push(
        "Jstar.star = star.Jstar",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.jstar(&ctx.star(a)?).sub(&ctx.star(&ctx.jstar(a))?)),
            &all,
        )?,
    );
    push(
        "Jc.star = star.Jc",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.jstar_c(&ctx.star(a)?).sub(&ctx.star(&ctx.jstar_c(a))?)),
            &all,
        )?,
    );
    push(
        "laplacec = -Jc.laplace.Jc (r >= 1)",
        RowKind::Identity,
        max_over(
            &|a| {
                Ok(ctx
                    .laplace_c(a)?
                    .add(&ctx.jstar_c(&ctx.laplace(&ctx.jstar_c(a))?)))
            },
            &positive,
        )?,
    );
    push(
        "laplacec = -Jc.laplace.Jc (0-forms)",
        RowKind::Measured,
        max_over(
            &|a| {
                Ok(ctx
                    .laplace_c(a)?
                    .add(&ctx.jstar_c(&ctx.laplace(&ctx.jstar_c(a))?)))
            },
            &zero_forms,
        )?,
    );
    push(
        "laplacec.Jc = Jc.laplace",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.laplace_c(&ctx.jstar_c(a))?.sub(&ctx.jstar_c(&ctx.laplace(a)?))),
            &all,
        )?,
    );
    push(
        "Jc.laplacec = laplace.Jc",
        RowKind::Measured,
        max_over(
            &|a| Ok(ctx.jstar_c(&ctx.laplace_c(a)?).sub(&ctx.laplace(&ctx.jstar_c(a))?)),
            &all,
        )?,
    );
    push(
        "dbar.dbar = 0 (r >= 1)",
        RowKind::Identity,
        max_over(&|a| Ok(ctx.dbar(&ctx.dbar(a))), &positive)?,
    );
    push(
        "dbarbar.dbarbar = 0 (r < n)",
        RowKind::Identity,
        max_over(&|a| ctx.dbarbar(&ctx.dbarbar(a)?), &not_top)?,
    );
    push(
        "dbar = explicit formula",
        RowKind::Identity,
        max_over(&|a| Ok(ctx.dbar(a).sub(&ctx.dbar_explicit(a))), &all)?,
    );
    push(
        "dbarbar = explicit formula",
        RowKind::Measured,
        max_over(&|a| Ok(ctx.dbarbar(a)?.sub(&ctx.dbarbar_explicit(a)?)), &all)?,
    );
    Ok(rows)
}

/// Residuals and observed implications for the harmonicity propositions on
/// a single form.
#[derive(Debug, Clone)]
pub struct HarmonicReport {
    pub laplace_c_residual: f64,
    pub laplace_of_jstar_residual: f64,
    pub laplace_residual: f64,
    pub jc_invariance_defect: f64,
    pub dc_residual: f64,
    pub delta_c_residual: f64,
    /// Δ^c α ≈ 0 ⇒ Δ(J*_c α) ≈ 0, observed
    pub j_harmonic_implies_transport: bool,
    /// Δ^c α ≈ 0 ⇔ (d^c α ≈ 0 and δ^c α ≈ 0), observed
    pub kernel_equivalence: bool,
}

pub fn harmonic_check(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    alpha: &FormField,
    samples: &[Vec<f64>],
    probe: &[f64],
) -> Result<HarmonicReport, GeomError> {
    let ctx = OperatorContext::new(g, j, params, probe)?;
    let sup = |f: &FormField| -> Result<f64, GeomError> {
        let mut m = 0.0f64;
        for pt in samples {
            m = m.max(f.coeff_norm(pt)?);
        }
        Ok(m)
    };
    let lc = sup(&ctx.laplace_c(alpha)?)?;
    let lt = sup(&ctx.laplace(&ctx.jstar_c(alpha))?)?;
    let l = sup(&ctx.laplace(alpha)?)?;
    let inv = sup(&ctx.jstar_c(alpha).sub(alpha))?;
    let dc = sup(&ctx.dc(alpha))?;
    let del_c = sup(&ctx.delta_c(alpha)?)?;
    let tol = 1e-9;
    Ok(HarmonicReport {
        laplace_c_residual: lc,
        laplace_of_jstar_residual: lt,
        laplace_residual: l,
        jc_invariance_defect: inv,
        dc_residual: dc,
        delta_c_residual: del_c,
        j_harmonic_implies_transport: lc >= tol || lt < tol,
        kernel_equivalence: (lc < tol) == (dc < tol && del_c < tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sample::halton_points;

    fn dx(chart: &Chart, i: usize) -> FormField {
        let mut f = FormField::zero(chart, 1);
        f.add_term(&[i], ComplexExpr::real(ScalarExpr::one())).unwrap();
        f
    }

    fn xdx(chart: &Chart, coeff: &str, i: usize) -> FormField {
        let mut f = FormField::zero(chart, 1);
        f.add_term(
            &[i],
            ComplexExpr::real(ScalarExpr::parse(coeff, chart.dim).unwrap()),
        )
        .unwrap();
        f
    }

    #[test]
    fn wedge_graded_commutativity() {
        let chart = Chart::new(2);
        let a = dx(&chart, 0);
        let b = dx(&chart, 1);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let pt = [0.0, 0.0];
        assert!((ab.add(&ba)).coeff_norm(&pt).unwrap() < 1e-15);
        // repeated index annihilates
        let aa = xdx(&chart, "x1", 0).wedge(&a).unwrap();
        assert!(aa.is_zero());
        // linearity
        let sum = a.add(&b).wedge(&b).unwrap();
        assert!((sum.sub(&ab)).coeff_norm(&pt).unwrap() < 1e-15);
    }

    #[test]
    fn exterior_d_examples() {
        let chart = Chart::new(2);
        // d(x1·x2) = x2 dx1 + x1 dx2
        let f = FormField::function(&chart, ScalarExpr::parse("x1*x2", 2).unwrap());
        let df = f.exterior_d().unwrap();
        let pt = [0.7, -0.3];
        let expect = xdx(&chart, "x2", 0).add(&xdx(&chart, "x1", 1));
        assert!(df.sub(&expect).coeff_norm(&pt).unwrap() < 1e-15);
        // d(df) = 0
        let f = FormField::function(&chart, ScalarExpr::parse("sin(x1*x2)", 2).unwrap());
        assert!(f.d_cochain().d_cochain().coeff_norm(&pt).unwrap() < 1e-12);
        // d(x1 dx2) = dx1 ∧ dx2
        let a = xdx(&chart, "x1", 1);
        let da = a.exterior_d().unwrap();
        let vol = dx(&chart, 0).wedge(&dx(&chart, 1)).unwrap();
        assert!(da.sub(&vol).coeff_norm(&pt).unwrap() < 1e-15);
        // top degree errors
        assert!(vol.exterior_d().is_err());
    }

    #[test]
    fn jstar_c_on_f4() {
        let f = fixtures::f4();
        let jc = norden_jc(&f.j, f.params).unwrap();
        let chart = &f.chart;
        let pt = [0.2, 0.5];
        // J*_c dx1 = −dx2, J*_c dx2 = dx1 for J_c = [[0,−1],[1,0]]
        let a = dx(chart, 0).precompose(&jc);
        assert!(a.add(&dx(chart, 1)).coeff_norm(&pt).unwrap() < 1e-12);
        let b = dx(chart, 1).precompose(&jc);
        assert!(b.sub(&dx(chart, 0)).coeff_norm(&pt).unwrap() < 1e-12);
        // identity on 0-forms
        let f0 = FormField::function(chart, ScalarExpr::parse("x1 + x2^2", 2).unwrap());
        assert!(f0.precompose(&jc).sub(&f0).coeff_norm(&pt).unwrap() < 1e-15);
        // det action on the volume form
        let vol = dx(chart, 0).wedge(&dx(chart, 1)).unwrap();
        assert!(vol.precompose(&jc).sub(&vol).coeff_norm(&pt).unwrap() < 1e-12);
    }

    #[test]
    fn hodge_star_euclidean_and_lorentzian() {
        let chart = Chart::new(2);
        let g_euc = MetricField::euclidean(2);
        let probe = [0.1, 0.1];
        let pt = [0.4, 0.9];
        let s1 = dx(&chart, 0).hodge_star(&g_euc, &probe).unwrap();
        assert!(s1.sub(&dx(&chart, 1)).coeff_norm(&pt).unwrap() < 1e-14);
        let s2 = dx(&chart, 1).hodge_star(&g_euc, &probe).unwrap();
        assert!(s2.add(&dx(&chart, 0)).coeff_norm(&pt).unwrap() < 1e-14);

        // F4 metric diag(1,−1): ⋆⋆ = sign(det g)(−1)^{r(n−r)} = +1 on 1-forms
        let g_lor = MetricField::diagonal_consts(&[1.0, -1.0]);
        let a = xdx(&chart, "sin(x1)", 0).add(&xdx(&chart, "x2", 1));
        let ss = a
            .hodge_star(&g_lor, &probe)
            .unwrap()
            .hodge_star(&g_lor, &probe)
            .unwrap();
        assert!(ss.sub(&a).coeff_norm(&pt).unwrap() < 1e-12);

        // ⋆1 = vol, ⋆vol = sign(det g)
        let one = FormField::function(&chart, ScalarExpr::one());
        let vol = one.hodge_star(&g_lor, &probe).unwrap();
        let expect = dx(&chart, 0).wedge(&dx(&chart, 1)).unwrap();
        assert!(vol.sub(&expect).coeff_norm(&pt).unwrap() < 1e-14);
        let back = vol.hodge_star(&g_lor, &probe).unwrap();
        assert!(back.add(&one).coeff_norm(&pt).unwrap() < 1e-14);
    }

    #[test]
    fn star_star_sign_rule_euclidean_3d() {
        let chart = Chart::new(3);
        let g = MetricField::euclidean(3);
        let probe = [0.0, 0.0, 0.0];
        let pt = [0.3, 0.6, -0.2];
        for r in 0..=3usize {
            let basis = increasing_masks(3, r);
            for mask in basis {
                let mut a = FormField::zero(&chart, r);
                a.add_term(&mask_indices(mask), ComplexExpr::real(ScalarExpr::one()))
                    .unwrap();
                let ss = a
                    .hodge_star(&g, &probe)
                    .unwrap()
                    .hodge_star(&g, &probe)
                    .unwrap();
                let sign = if (r * (3 - r)) % 2 == 0 { 1.0 } else { -1.0 };
                let expect = a.scale(Complex64::new(sign, 0.0));
                assert!(ss.sub(&expect).coeff_norm(&pt).unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn wedge_star_consistency_with_inner() {
        // α ∧ ⋆β = ⟨α,β⟩ vol
        let f = fixtures::f5();
        let probe = [0.1, 0.1];
        let pt = [1.2, 2.5];
        let a = xdx(&f.chart, "sin(x1)", 0).add(&xdx(&f.chart, "cos(x2)", 1));
        let b = xdx(&f.chart, "cos(x1)", 0).add(&xdx(&f.chart, "2", 1));
        let lhs = a.wedge(&b.hodge_star(&f.g, &probe).unwrap()).unwrap();
        let inner = a.inner_at(&b, &f.g, &pt).unwrap();
        // vol = dx1 ∧ dx2 (|det g| = 1)
        let vol_coeff = lhs.terms.get(&0b11).unwrap().eval(&pt).unwrap();
        assert!((vol_coeff - inner).norm() < 1e-12);
    }

    #[test]
    fn dc_composition_example() {
        let f = fixtures::f5();
        let ctx = OperatorContext::new(&f.g, &f.j, f.params, &[0.1, 0.1]).unwrap();
        // d^c f = J*_c(df) for 0-forms
        let f0 = FormField::function(&f.chart, ScalarExpr::parse("x1*x2", 2).unwrap());
        let lhs = ctx.dc(&f0);
        let rhs = ctx.jstar_c(&f0.d_cochain());
        let pt = [0.7, 0.4];
        assert!(lhs.sub(&rhs).coeff_norm(&pt).unwrap() < 1e-13);
        // d^c ∘ d^c = 0 on assorted forms
        for a in trig_form_basis(&f.chart, &[0, 1, 2]) {
            let dd = ctx.dc(&ctx.dc(&a));
            assert!(dd.coeff_norm(&pt).unwrap() < 1e-10);
        }
    }

    #[test]
    fn dbar_matches_explicit_formula() {
        let f = fixtures::f5();
        let ctx = OperatorContext::new(&f.g, &f.j, f.params, &[0.1, 0.1]).unwrap();
        let pts = halton_points(&f.box_, 20, 0);
        for a in trig_form_basis(&f.chart, &[0, 1, 2]) {
            let lhs = ctx.dbar(&a);
            let rhs = ctx.dbar_explicit(&a);
            for pt in &pts {
                assert!(lhs.sub(&rhs).coeff_norm(pt).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn conformance_table_on_f5() {
        let f = fixtures::f5();
        let basis = trig_form_basis(&f.chart, &[0, 1, 2]);
        let pts = halton_points(&f.box_, 12, 0);
        let rows =
            identity_conformance(&f.g, &f.j, f.params, &basis, &pts, 16, &[0.1, 0.1]).unwrap();
        for row in &rows {
            if row.kind == RowKind::Identity {
                assert!(
                    row.residual < 1e-9,
                    "identity row `{}` has residual {}",
                    row.name,
                    row.residual
                );
            }
        }
        // the sign-sensitive measured rows really are nonzero under the
        // literal conventions
        let get = |name: &str| rows.iter().find(|r| r.name == name).unwrap().residual;
        assert!(get("d.dc + dc.d (0-forms)") > 1e-3);
        assert!(get("Jc.dc = -d.Jc") > 1e-3);
        assert!(get("deltac = Jc.delta.Jc") > 1e-3);
        // adjointness holds on this fixture
        assert!(get("<dc a, b> = <a, deltac b> (torus)") < 1e-8);
    }

    #[test]
    fn torus_pairing_symmetric_bilinear() {
        let f = fixtures::f5();
        let a = xdx(&f.chart, "sin(x1)", 0);
        let b = xdx(&f.chart, "cos(x2)", 1).add(&xdx(&f.chart, "sin(x1)", 0));
        let ab = torus_pairing(&a, &b, &f.g, 32).unwrap();
        let ba = torus_pairing(&b, &a, &f.g, 32).unwrap();
        assert!((ab - ba).norm() < 1e-10);
        let a2 = a.scale(Complex64::new(2.0, 0.0));
        let a2b = torus_pairing(&a2, &b, &f.g, 32).unwrap();
        assert!((a2b - ab * Complex64::new(2.0, 0.0)).norm() < 1e-10);
        // non-periodic charts are rejected
        let f4 = fixtures::f4();
        assert!(matches!(
            torus_pairing(&a, &b, &f4.g, 8),
            Err(GeomError::NonPeriodicChart) | Err(_)
        ));
    }

    #[test]
    fn harmonic_checks() {
        let f = fixtures::f5();
        let pts = halton_points(&f.box_, 15, 0);
        let probe = [0.1, 0.1];
        // constant 1-form: harmonic and J-harmonic
        let a = dx(&f.chart, 0);
        let rep = harmonic_check(&f.g, &f.j, f.params, &a, &pts, &probe).unwrap();
        assert!(rep.laplace_c_residual < 1e-10);
        assert!(rep.laplace_residual < 1e-10);
        assert!(rep.j_harmonic_implies_transport);
        assert!(rep.kernel_equivalence);

        // sin(x1)·dx2: Δ^c residual transports through Δ^c = −J*_cΔJ*_c
        let ctx = OperatorContext::new(&f.g, &f.j, f.params, &probe).unwrap();
        let b = xdx(&f.chart, "sin(x1)", 1);
        let direct = ctx.laplace_c(&b).unwrap();
        let transported = ctx
            .jstar_c(&ctx.laplace(&ctx.jstar_c(&b)).unwrap())
            .scale(Complex64::new(-1.0, 0.0));
        for pt in &pts {
            assert!(direct.sub(&transported).coeff_norm(pt).unwrap() < 1e-10);
        }

        // J*_c-invariant 0-form (trivially invariant): harmonic ⇔ J-harmonic;
        // the wave-harmonic sin(x1)sin(x2) witnesses the zero side.
        let h = FormField::function(&f.chart, ScalarExpr::parse("sin(x1)*sin(x2)", 2).unwrap());
        let rep = harmonic_check(&f.g, &f.j, f.params, &h, &pts, &probe).unwrap();
        assert!(rep.jc_invariance_defect < 1e-12);
        assert!(rep.laplace_c_residual < 1e-9);
        assert!(rep.laplace_residual < 1e-9);
        assert!(rep.kernel_equivalence);
    }
}
