//! Metallic structure layer: σ±, structure validation, the projectors onto
//! the two eigendistributions, distribution frames, the five associated
//! tensor fields, the H/H′/L/L′/K/K′ deformation suite with closed-form
//! cross-checks, the induced almost product structure and the degenerate
//! almost subtangent case.

use crate::connection::{christoffel_exprs, lie_bracket, ChristoffelExprs};
use crate::error::GeomError;
use crate::expr::ScalarExpr;
use crate::fields::{EndoField, MetricField, VectorField};
use crate::numeric;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// The pair (p, q) of a metallic structure J² = pJ + qI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetallicParams {
    pub p: f64,
    pub q: f64,
}

impl MetallicParams {
    pub fn new(p: f64, q: f64) -> MetallicParams {
        MetallicParams { p, q }
    }

    /// Discriminant p² + 4q; its sign selects the real-distribution branch
    /// (positive) or the complexified Norden branch (negative).
    pub fn disc(&self) -> f64 {
        self.p * self.p + 4.0 * self.q
    }

    pub fn require_positive_disc(&self) -> Result<f64, GeomError> {
        let d = self.disc();
        if d <= 0.0 {
            return Err(GeomError::DiscSign {
                disc: d,
                required: "p^2+4q > 0",
            });
        }
        Ok(d)
    }

    pub fn require_negative_disc(&self) -> Result<f64, GeomError> {
        let d = self.disc();
        if d >= 0.0 {
            return Err(GeomError::DiscSign {
                disc: d,
                required: "p^2+4q < 0",
            });
        }
        Ok(d)
    }

    /// σ₊ = (p + √(p²+4q))/2, the larger real eigenvalue (disc > 0).
    pub fn sigma_plus(&self) -> Result<f64, GeomError> {
        Ok((self.p + self.require_positive_disc()?.sqrt()) / 2.0)
    }

    /// σ₋ = (p − √(p²+4q))/2 (disc > 0).
    pub fn sigma_minus(&self) -> Result<f64, GeomError> {
        Ok((self.p - self.require_positive_disc()?.sqrt()) / 2.0)
    }

    /// Complex eigenvalues σ^ℂ± = (p ± i√(−p²−4q))/2 for the Norden branch,
    /// using the principal square root √(p²+4q) = i√(−p²−4q).
    pub fn sigma_complex(&self) -> Result<(Complex64, Complex64), GeomError> {
        let d = self.require_negative_disc()?;
        let s = Complex64::new(0.0, (-d).sqrt());
        let p = Complex64::new(self.p, 0.0);
        Ok(((p + s) / 2.0, (p - s) / 2.0))
    }
}

/// Outcome of checking a (g, J, p, q) quadruple against the metallic laws
/// over a sample set. All residuals are maxima of Frobenius norms.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// max ‖J² − pJ − qI‖ over the samples
    pub metallic_residual: f64,
    /// max ‖gJ − (gJ)ᵀ‖ over the samples
    pub symmetry_residual: f64,
    pub disc: f64,
    /// max ‖gJ + (gJ)ᵀ‖, for the skew-symmetry diagnostic
    pub skew_residual: f64,
    /// max ‖J‖ over the samples
    pub j_norm: f64,
    /// set when disc < 0: whether g was indefinite at every sample
    pub metric_indefinite: Option<bool>,
    /// g-skew-symmetric J with J ≠ 0 forces p = 0; false when that
    /// constraint is violated by the supplied p
    pub skew_p_consistent: bool,
    pub samples: usize,
}

impl ValidationReport {
    /// A structure is accepted when both defining laws hold to `tol`, the
    /// signature is admissible for the branch and the skew diagnostic is
    /// consistent.
    pub fn passed(&self, tol: f64) -> bool {
        self.metallic_residual < tol
            && self.symmetry_residual < tol
            && self.metric_indefinite.unwrap_or(true)
            && self.skew_p_consistent
    }
}

/// Check ‖J²−pJ−qI‖ and ‖gJ−(gJ)ᵀ‖ over the samples, the branch/signature
/// compatibility, and the skew-symmetry diagnostic.
pub fn validate(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<ValidationReport, GeomError> {
    let n = j.dim();
    if g.dim() != n {
        return Err(GeomError::dim(format!(
            "metric dim {} vs endomorphism dim {}",
            g.dim(),
            n
        )));
    }
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let disc = params.disc();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut metallic_residual = 0.0f64;
    let mut symmetry_residual = 0.0f64;
    let mut skew_residual = 0.0f64;
    let mut j_norm = 0.0f64;
    let mut indefinite_everywhere = true;
    for pt in samples {
        let jm = j.eval(pt)?;
        let gm = g.eval(pt)?;
        metallic_residual =
            metallic_residual.max((&jm * &jm - &jm * params.p - &eye * params.q).norm());
        let gj = &gm * &jm;
        symmetry_residual = symmetry_residual.max((&gj - gj.transpose()).norm());
        skew_residual = skew_residual.max((&gj + gj.transpose()).norm());
        j_norm = j_norm.max(jm.norm());
        if disc < 0.0 {
            let eigs = gm.symmetric_eigenvalues();
            let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(min < 0.0 && max > 0.0) {
                indefinite_everywhere = false;
            }
        }
    }
    // Remark: a g-skew-symmetric nonzero J forces p = 0.
    let skew = skew_residual < 1e-9 * (1.0 + j_norm) && j_norm > 1e-9;
    let skew_p_consistent = !skew || params.p.abs() < 1e-9;
    Ok(ValidationReport {
        metallic_residual,
        symmetry_residual,
        disc,
        skew_residual,
        j_norm,
        metric_indefinite: (disc < 0.0).then_some(indefinite_everywhere),
        skew_p_consistent,
        samples: samples.len(),
    })
}

/// The projectors P, P′ onto the σ₋/σ₊ eigendistributions at a point:
/// P = (−J + σ₊I)/√(p²+4q), P′ = (J − σ₋I)/√(p²+4q).
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub p: DMatrix<f64>,
    pub p_prime: DMatrix<f64>,
}

pub fn projectors(
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
) -> Result<ProjectorPair, GeomError> {
    let (pf, ppf) = projector_fields(j, params)?;
    Ok(ProjectorPair {
        p: pf.eval(pt)?,
        p_prime: ppf.eval(pt)?,
    })
}

/// Projectors in expression form, for use as fields inside covariant
/// derivatives and brackets.
pub fn projector_fields(
    j: &EndoField,
    params: MetallicParams,
) -> Result<(EndoField, EndoField), GeomError> {
    let d = params.require_positive_disc()?;
    let s = d.sqrt();
    let sp = params.sigma_plus()?;
    let sm = params.sigma_minus()?;
    let n = j.dim();
    let eye = EndoField::identity(n);
    let p = eye.scale_const(sp).sub(j).scale_const(1.0 / s);
    let p_prime = j.sub(&eye.scale_const(sm)).scale_const(1.0 / s);
    Ok((p, p_prime))
}

/// Spanning frames of the two metallic distributions near a base point,
/// selected from projected coordinate fields by pivoted elimination.
#[derive(Debug, Clone)]
pub struct DistributionFrame {
    pub base_point: Vec<f64>,
    pub rank_d: usize,
    pub rank_d_prime: usize,
    /// Fields P(∂_{i}) for a maximal-rank column subset; span D near the base
    /// point; empty when J is scalar σ₊ there.
    pub d_fields: Vec<VectorField>,
    pub d_prime_fields: Vec<VectorField>,
}

pub fn distribution_frame(
    j: &EndoField,
    params: MetallicParams,
    base_point: &[f64],
) -> Result<DistributionFrame, GeomError> {
    let (pf, ppf) = projector_fields(j, params)?;
    let pm = pf.eval(base_point)?;
    let ppm = ppf.eval(base_point)?;
    let rank_d = numeric::rank(&pm);
    let rank_d_prime = numeric::rank(&ppm);
    let d_cols = numeric::pivot_columns(&pm, rank_d);
    let dp_cols = numeric::pivot_columns(&ppm, rank_d_prime);
    Ok(DistributionFrame {
        base_point: base_point.to_vec(),
        rank_d,
        rank_d_prime,
        d_fields: d_cols.iter().map(|&c| pf.column(c)).collect(),
        d_prime_fields: dp_cols.iter().map(|&c| ppf.column(c)).collect(),
    })
}

/// The five tensor fields associated to a metallic pseudo-Riemannian
/// structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocTensorKind {
    /// [X,Y]_J = [JX,Y] + [X,JY] − J([X,Y])
    JBracket,
    /// N_J(X,Y) = J([X,Y]_J) − [JX,JY]
    Nijenhuis,
    /// {X,Y}_J = {JX,Y} + {X,JY} − J({X,Y}), {X,Y} = ∇_X Y + ∇_Y X
    JordanBracket,
    /// M_J(X,Y) = J({X,Y}_J) − {JX,JY}
    JordanTensor,
    /// H_J(X,Y) = (J∘∇_X J − ∇_{JX} J)(Y), satisfying 2H_J = N_J + M_J
    DeformationHj,
}

/// Symbolic covariant derivative for coefficient expressions:
/// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j as an expression field.
pub(crate) fn covariant_field(
    gamma: &ChristoffelExprs,
    x: &VectorField,
    y: &VectorField,
) -> VectorField {
    let n = gamma.n;
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = ScalarExpr::zero();
        for i in 0..n {
            acc = acc.add(&x.component(i).mul(&y.component(k).diff(i)));
            for jj in 0..n {
                let gk = gamma.get(k, i, jj);
                if let Some(0.0) = gk.as_const() {
                    continue;
                }
                acc = acc.add(&gk.mul(x.component(i)).mul(y.component(jj)));
            }
        }
        comps.push(acc);
    }
    VectorField::new(comps)
}

/// Jordan bracket {X,Y} = ∇_X Y + ∇_Y X of the Levi-Civita coefficients.
fn jordan(gamma: &ChristoffelExprs, x: &VectorField, y: &VectorField) -> VectorField {
    covariant_field(gamma, x, y).add(&covariant_field(gamma, y, x))
}

/// [X,Y]_A for an arbitrary (1,1) field A, as an expression field.
pub fn j_bracket_field(a: &EndoField, x: &VectorField, y: &VectorField) -> VectorField {
    let ax = a.apply(x);
    let ay = a.apply(y);
    lie_bracket(&ax, y)
        .add(&lie_bracket(x, &ay))
        .sub(&a.apply(&lie_bracket(x, y)))
}

/// N_A(X,Y) = A([X,Y]_A) − [AX, AY] as an expression field.
pub fn nijenhuis_field(a: &EndoField, x: &VectorField, y: &VectorField) -> VectorField {
    let ax = a.apply(x);
    let ay = a.apply(y);
    a.apply(&j_bracket_field(a, x, y))
        .sub(&lie_bracket(&ax, &ay))
}

/// {X,Y}_A with the Jordan bracket of the given coefficients.
pub fn jordan_bracket_field(
    gamma: &ChristoffelExprs,
    a: &EndoField,
    x: &VectorField,
    y: &VectorField,
) -> VectorField {
    let ax = a.apply(x);
    let ay = a.apply(y);
    jordan(gamma, &ax, y)
        .add(&jordan(gamma, x, &ay))
        .sub(&a.apply(&jordan(gamma, x, y)))
}

/// M_A(X,Y) = A({X,Y}_A) − {AX, AY} as an expression field.
pub fn jordan_tensor_field(
    gamma: &ChristoffelExprs,
    a: &EndoField,
    x: &VectorField,
    y: &VectorField,
) -> VectorField {
    let ax = a.apply(x);
    let ay = a.apply(y);
    a.apply(&jordan_bracket_field(gamma, a, x, y))
        .sub(&jordan(gamma, &ax, &ay))
}

/// H_A(X,Y) = (A∘∇_X A − ∇_{AX} A)(Y) as an expression field.
pub fn deformation_hj_field(
    gamma: &ChristoffelExprs,
    a: &EndoField,
    x: &VectorField,
    y: &VectorField,
) -> VectorField {
    let ax = a.apply(x);
    let ay = a.apply(y);
    // (∇_X A)Y = ∇_X(AY) − A(∇_X Y)
    let nxa_y = covariant_field(gamma, x, &ay).sub(&a.apply(&covariant_field(gamma, x, y)));
    let nax_a_y = covariant_field(gamma, &ax, &ay).sub(&a.apply(&covariant_field(gamma, &ax, y)));
    a.apply(&nxa_y).sub(&nax_a_y)
}

/// One of the five associated tensors evaluated at a point. The metric is
/// used (through its Levi-Civita connection) only by the Jordan-type kinds.
pub fn assoc_tensor(
    kind: AssocTensorKind,
    g: &MetricField,
    j: &EndoField,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let field = match kind {
        AssocTensorKind::JBracket => j_bracket_field(j, x, y),
        AssocTensorKind::Nijenhuis => nijenhuis_field(j, x, y),
        AssocTensorKind::JordanBracket => {
            let gamma = christoffel_exprs(g);
            jordan_bracket_field(&gamma, j, x, y)
        }
        AssocTensorKind::JordanTensor => {
            let gamma = christoffel_exprs(g);
            jordan_tensor_field(&gamma, j, x, y)
        }
        AssocTensorKind::DeformationHj => {
            let gamma = christoffel_exprs(g);
            deformation_hj_field(&gamma, j, x, y)
        }
    };
    field.eval(pt).map_err(GeomError::from)
}

/// The deformation suite at a point: projector-route values of H, H′ and
/// their antisymmetric/symmetric parts L, L′, K, K′, together with the
/// closed-form route through N_J and M_J.
#[derive(Debug, Clone)]
pub struct DeformationSuite {
    pub h: DVector<f64>,
    pub h_prime: DVector<f64>,
    pub l: DVector<f64>,
    pub l_prime: DVector<f64>,
    pub k: DVector<f64>,
    pub k_prime: DVector<f64>,
    pub l_closed: DVector<f64>,
    pub l_prime_closed: DVector<f64>,
    pub k_closed: DVector<f64>,
    pub k_prime_closed: DVector<f64>,
    /// H + H′ − H_J/(p²+4q), which the closed forms say must vanish
    pub h_sum_residual: f64,
}

/// All symbolic fields entering the deformation suite for one argument pair.
pub struct DeformationFields {
    pub h: VectorField,
    pub h_yx: VectorField,
    pub h_prime: VectorField,
    pub h_prime_yx: VectorField,
    pub nijenhuis: VectorField,
    pub jordan_tensor: VectorField,
    pub deformation_hj: VectorField,
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub disc: f64,
    j: EndoField,
}

impl DeformationFields {
    pub fn new(
        g: &MetricField,
        j: &EndoField,
        params: MetallicParams,
        x: &VectorField,
        y: &VectorField,
    ) -> Result<DeformationFields, GeomError> {
        let disc = params.require_positive_disc()?;
        let gamma = christoffel_exprs(g);
        let (pf, ppf) = projector_fields(j, params)?;
        let h_of = |a: &VectorField, b: &VectorField| {
            ppf.apply(&covariant_field(&gamma, &pf.apply(a), &pf.apply(b)))
        };
        let hp_of = |a: &VectorField, b: &VectorField| {
            pf.apply(&covariant_field(&gamma, &ppf.apply(a), &ppf.apply(b)))
        };
        Ok(DeformationFields {
            h: h_of(x, y),
            h_yx: h_of(y, x),
            h_prime: hp_of(x, y),
            h_prime_yx: hp_of(y, x),
            nijenhuis: nijenhuis_field(j, x, y),
            jordan_tensor: jordan_tensor_field(&gamma, j, x, y),
            deformation_hj: deformation_hj_field(&gamma, j, x, y),
            sigma_minus: params.sigma_minus()?,
            sigma_plus: params.sigma_plus()?,
            disc,
            j: j.clone(),
        })
    }

    pub fn at(&self, pt: &[f64]) -> Result<DeformationSuite, GeomError> {
        let h = self.h.eval(pt)?;
        let h_yx = self.h_yx.eval(pt)?;
        let hp = self.h_prime.eval(pt)?;
        let hp_yx = self.h_prime_yx.eval(pt)?;
        let l = (&h - &h_yx) / 2.0;
        let k = (&h + &h_yx) / 2.0;
        let l_prime = (&hp - &hp_yx) / 2.0;
        let k_prime = (&hp + &hp_yx) / 2.0;

        let jm = self.j.eval(pt)?;
        let nj = self.nijenhuis.eval(pt)?;
        let mj = self.jordan_tensor.eval(pt)?;
        let hj = self.deformation_hj.eval(pt)?;
        let scale = 2.0 * self.disc * self.disc.sqrt();
        let l_closed = (&nj * self.sigma_minus - &jm * &nj) / scale;
        let l_prime_closed = -(&nj * self.sigma_plus - &jm * &nj) / scale;
        let k_closed = (&mj * self.sigma_minus - &jm * &mj) / scale;
        let k_prime_closed = -(&mj * self.sigma_plus - &jm * &mj) / scale;
        let h_sum_residual = ((&h + &hp) - &hj / self.disc).norm();

        Ok(DeformationSuite {
            h,
            h_prime: hp,
            l,
            l_prime,
            k,
            k_prime,
            l_closed,
            l_prime_closed,
            k_closed,
            k_prime_closed,
            h_sum_residual,
        })
    }
}

/// Deformation suite at a point; see [`DeformationFields`] for the reusable
/// symbolic form.
pub fn deformation_suite(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DeformationSuite, GeomError> {
    DeformationFields::new(g, j, params, x, y)?.at(pt)
}

/// J_p = −(2J − pI)/√(p²+4q) = P − P′, the almost product structure of the
/// decomposition. J_p² = I pointwise.
pub fn almost_product(j: &EndoField, params: MetallicParams) -> Result<EndoField, GeomError> {
    let d = params.require_positive_disc()?;
    let n = j.dim();
    let eye = EndoField::identity(n);
    Ok(eye
        .scale_const(params.p)
        .sub(&j.scale_const(2.0))
        .scale_const(1.0 / d.sqrt()))
}

/// J_t = J − (p/2)I for the degenerate case p²+4q ≈ 0; J_t² = 0 pointwise.
pub fn subtangent(j: &EndoField, params: MetallicParams) -> Result<EndoField, GeomError> {
    let d = params.disc();
    if d.abs() >= 1e-10 {
        return Err(GeomError::DiscSign {
            disc: d,
            required: "|p^2+4q| < 1e-10 (almost subtangent case)",
        });
    }
    let eye = EndoField::identity(j.dim());
    Ok(j.sub(&eye.scale_const(params.p / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sample::halton_points;

    #[test]
    fn sigma_invariants() {
        let params = MetallicParams::new(1.0, 1.0);
        let sp = params.sigma_plus().unwrap();
        let sm = params.sigma_minus().unwrap();
        assert!((sp + sm - params.p).abs() < 1e-12);
        assert!((sp * sm + params.q).abs() < 1e-12);
        for s in [sp, sm] {
            assert!((s * s - params.p * s - params.q).abs() < 1e-12);
        }
        let norden = MetallicParams::new(1.0, -1.0);
        let (cp, cm) = norden.sigma_complex().unwrap();
        assert!((cp - cm.conj()).norm() < 1e-15);
        for s in [cp, cm] {
            assert!((s * s - s * norden.p - norden.q).norm() < 1e-12);
        }
    }

    #[test]
    fn validate_f1_exact() {
        let f = fixtures::f1();
        let pts = halton_points(&f.box_, 20, 0);
        let report = validate(&f.g, &f.j, f.params, &pts).unwrap();
        assert!(report.metallic_residual < 1e-12);
        assert!(report.symmetry_residual < 1e-12);
        assert!((report.disc - 5.0).abs() < 1e-12);
        assert!(report.passed(1e-8));
    }

    #[test]
    fn validate_f7_norden() {
        let f = fixtures::f7();
        let pts = halton_points(&f.box_, 20, 0);
        let report = validate(&f.g, &f.j, f.params, &pts).unwrap();
        assert!(report.metallic_residual < 1e-9, "{}", report.metallic_residual);
        assert!(report.symmetry_residual < 1e-9);
        assert!(report.disc < 0.0);
        assert_eq!(report.metric_indefinite, Some(true));
        assert!(report.passed(1e-8));
    }

    #[test]
    fn validate_wrong_q_reports_sqrt2() {
        let f = fixtures::f1();
        let pts = halton_points(&f.box_, 5, 0);
        let bad = MetallicParams::new(1.0, 2.0);
        let report = validate(&f.g, &f.j, bad, &pts).unwrap();
        assert!((report.metallic_residual - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(!report.passed(1e-8));
    }

    #[test]
    fn validate_rejects_definite_metric_on_norden_branch() {
        // J of F4 is g-symmetric only for diag(1,-1); against the Euclidean
        // metric the symmetry residual must flag it, and the signature check
        // must reject the definite metric on the disc<0 branch.
        let f = fixtures::f4();
        let g_definite = MetricField::euclidean(2);
        let pts = halton_points(&f.box_, 5, 0);
        let report = validate(&g_definite, &f.j, f.params, &pts).unwrap();
        assert_eq!(report.metric_indefinite, Some(false));
        assert!(!report.passed(1e-8));
    }

    #[test]
    fn skew_symmetry_diagnostic_forces_p_zero() {
        // J = [[0,1],[-1,0]] is g-skew for the Euclidean metric; J² = −I so
        // p = 0, q = −1 is consistent while p = 1 is not.
        let j = EndoField::constant(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let g = MetricField::euclidean(2);
        let pts = vec![vec![0.0, 0.0], vec![0.3, 0.4]];
        let ok = validate(&g, &j, MetallicParams::new(0.0, -1.0), &pts).unwrap();
        assert!(ok.skew_p_consistent);
        let bad = validate(&g, &j, MetallicParams::new(1.0, -1.0), &pts).unwrap();
        assert!(!bad.skew_p_consistent);
    }

    #[test]
    fn projector_values_on_f1() {
        let f = fixtures::f1();
        let pair = projectors(&f.j, f.params, &[0.2, -0.4]).unwrap();
        let expect = DMatrix::from_row_slice(
            2,
            2,
            &[
                0.2763932022500211,
                -0.4472135954999579,
                -0.4472135954999579,
                0.7236067977499789,
            ],
        );
        assert!((pair.p.clone() - expect).norm() < 1e-10);
        assert!((pair.p.trace() - 1.0).abs() < 1e-12);
        // algebraic invariants
        let eye = DMatrix::<f64>::identity(2, 2);
        assert!((&pair.p * &pair.p - &pair.p).norm() < 1e-12);
        assert!((&pair.p_prime * &pair.p_prime - &pair.p_prime).norm() < 1e-12);
        assert!((&pair.p + &pair.p_prime - eye).norm() < 1e-12);
        assert!((&pair.p * &pair.p_prime).norm() < 1e-12);
    }

    #[test]
    fn projector_radial_on_f6() {
        let f = fixtures::f6();
        let pair = projectors(&f.j, f.params, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let mut radial = DMatrix::zeros(4, 4);
        radial[(0, 0)] = 1.0;
        assert!((pair.p_prime - radial).norm() < 1e-12);
    }

    #[test]
    fn frame_eigen_invariants() {
        let f = fixtures::f1();
        let frame = distribution_frame(&f.j, f.params, &[0.1, 0.7]).unwrap();
        assert_eq!(frame.rank_d, 1);
        assert_eq!(frame.rank_d_prime, 1);
        let sm = f.params.sigma_minus().unwrap();
        let v = frame.d_fields[0].eval(&frame.base_point).unwrap();
        let jv = f.j.eval(&frame.base_point).unwrap() * &v;
        assert!((jv - &v * sm).norm() < 1e-9);
        // direction ∝ (σ₋, 1)
        assert!((v[0] / v[1] - sm).abs() < 1e-9);

        let f3 = fixtures::f3();
        let frame = distribution_frame(&f3.j, f3.params, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(frame.rank_d, 2);
        assert_eq!(frame.rank_d_prime, 1);
    }

    #[test]
    fn frame_scalar_structure_gives_trivial_side() {
        // J = σ₊·I: D is trivial, D′ is everything; reported, not an error.
        let params = MetallicParams::new(1.0, 1.0);
        let sp = params.sigma_plus().unwrap();
        let j = EndoField::constant(&(DMatrix::identity(2, 2) * sp));
        let frame = distribution_frame(&j, params, &[0.0, 0.0]).unwrap();
        assert_eq!(frame.rank_d, 0);
        assert_eq!(frame.rank_d_prime, 2);
        assert!(frame.d_fields.is_empty());
    }

    #[test]
    fn assoc_tensors_vanish_on_constant_flat_fixture() {
        let f = fixtures::f1();
        let x = VectorField::new(vec![
            ScalarExpr::parse("x2", 2).unwrap(),
            ScalarExpr::parse("1 + x1", 2).unwrap(),
        ]);
        let y = VectorField::coordinate(2, 0);
        for kind in [
            AssocTensorKind::JBracket,
            AssocTensorKind::Nijenhuis,
            AssocTensorKind::JordanBracket,
            AssocTensorKind::JordanTensor,
            AssocTensorKind::DeformationHj,
        ] {
            let v = assoc_tensor(kind, &f.g, &f.j, &x, &y, &[0.3, 0.5]).unwrap();
            assert!(v.norm() < 1e-12, "{kind:?} nonzero on F1");
        }
    }

    #[test]
    fn nijenhuis_brute_force_on_f3() {
        // N_J from its defining brackets, expanded by hand with independent
        // lie_bracket calls.
        let f = fixtures::f3();
        let x = VectorField::coordinate(3, 0);
        let y = VectorField::coordinate(3, 2);
        let pt = [0.0, 0.0, 0.2];
        let jx = f.j.apply(&x);
        let jy = f.j.apply(&y);
        let bracket_j = lie_bracket(&jx, &y)
            .add(&lie_bracket(&x, &jy))
            .sub(&f.j.apply(&lie_bracket(&x, &y)));
        let expected = f
            .j
            .apply(&bracket_j)
            .sub(&lie_bracket(&jx, &jy))
            .eval(&pt)
            .unwrap();
        let got = assoc_tensor(AssocTensorKind::Nijenhuis, &f.g, &f.j, &x, &y, &pt).unwrap();
        assert!(expected.norm() > 1e-3, "N_J should be nonzero on F3");
        assert!((got - expected).norm() < 1e-9);
    }

    #[test]
    fn nijenhuis_vanishes_in_two_dimensions() {
        let f = fixtures::f2();
        let pts = halton_points(&f.box_, 20, 0);
        let x = VectorField::coordinate(2, 0);
        let y = VectorField::coordinate(2, 1);
        let nj = nijenhuis_field(&f.j, &x, &y);
        for pt in &pts {
            assert!(nj.eval(pt).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn two_h_equals_n_plus_m() {
        let f6 = fixtures::f6();
        let pts = halton_points(&f6.box_, 10, 3);
        let gamma = christoffel_exprs(&f6.g);
        for (a, b) in [(0usize, 1usize), (1, 3), (2, 3)] {
            let x = VectorField::coordinate(4, a);
            let y = VectorField::coordinate(4, b);
            let hj = deformation_hj_field(&gamma, &f6.j, &x, &y);
            let nj = nijenhuis_field(&f6.j, &x, &y);
            let mj = jordan_tensor_field(&gamma, &f6.j, &x, &y);
            for pt in &pts {
                let lhs = hj.eval(pt).unwrap() * 2.0;
                let rhs = nj.eval(pt).unwrap() + mj.eval(pt).unwrap();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn deformation_suite_closed_forms_on_f3() {
        let f = fixtures::f3();
        let x = VectorField::coordinate(3, 0);
        let y = VectorField::coordinate(3, 2);
        let fields = DeformationFields::new(&f.g, &f.j, f.params, &x, &y).unwrap();
        let pt = [0.0, 0.0, 0.3];
        let s = fields.at(&pt).unwrap();
        assert!((&s.l - &s.l_closed).norm() < 1e-9);
        assert!((&s.l_prime - &s.l_prime_closed).norm() < 1e-9);
        assert!((&s.k - &s.k_closed).norm() < 1e-9);
        assert!((&s.k_prime - &s.k_prime_closed).norm() < 1e-9);
        assert!(s.h_sum_residual < 1e-9);
        // H + H' = H_J/5 specifically
        let hj = fields.deformation_hj.eval(&pt).unwrap();
        assert!(((&s.h + &s.h_prime) - hj / 5.0).norm() < 1e-9);
    }

    #[test]
    fn deformation_sphere_extrinsic_curvature() {
        // F6 at (1,0,0,0): K(X,X) for X = P(∂2) is the sphere's extrinsic
        // curvature normal component; nonzero and equal to the projector
        // definition evaluation.
        let f = fixtures::f6();
        let pt = [1.0, 0.0, 0.0, 0.0];
        let (pf, _) = projector_fields(&f.j, f.params).unwrap();
        let x = pf.column(1);
        let fields = DeformationFields::new(&f.g, &f.j, f.params, &x, &x).unwrap();
        let s = fields.at(&pt).unwrap();
        assert!(s.k.norm() > 0.1, "sphere extrinsic curvature must be nonzero");
        assert!((&s.k - &s.k_closed).norm() < 1e-9);
    }

    #[test]
    fn almost_product_structure() {
        let f1 = fixtures::f1();
        let jp = almost_product(&f1.j, f1.params).unwrap();
        let m = jp.eval(&[0.0, 0.0]).unwrap();
        let eye = DMatrix::<f64>::identity(2, 2);
        assert!((&m * &m - eye).norm() < 1e-12);
        // J_p (σ₋, 1) = +(σ₋, 1)
        let sm = f1.params.sigma_minus().unwrap();
        let v = DVector::from_vec(vec![sm, 1.0]);
        assert!((&m * &v - &v).norm() < 1e-12);
    }

    #[test]
    fn almost_product_tensor_relations_on_f3() {
        let f = fixtures::f3();
        let jp = almost_product(&f.j, f.params).unwrap();
        let disc = f.params.disc();
        let x = VectorField::coordinate(3, 0);
        let y = VectorField::coordinate(3, 2);
        let gamma = christoffel_exprs(&f.g);
        let pts = halton_points(&f.box_, 10, 1);
        let nj = nijenhuis_field(&f.j, &x, &y);
        let njp = nijenhuis_field(&jp, &x, &y);
        let mj = jordan_tensor_field(&gamma, &f.j, &x, &y);
        let mjp = jordan_tensor_field(&gamma, &jp, &x, &y);
        let hj = deformation_hj_field(&gamma, &f.j, &x, &y);
        let hjp = deformation_hj_field(&gamma, &jp, &x, &y);
        let bj = j_bracket_field(&f.j, &x, &y);
        let bjp = j_bracket_field(&jp, &x, &y);
        let br = lie_bracket(&x, &y);
        let jj = jordan_bracket_field(&gamma, &f.j, &x, &y);
        let jjp = jordan_bracket_field(&gamma, &jp, &x, &y);
        let jb = jordan(&gamma, &x, &y);
        for pt in &pts {
            let njv = nj.eval(pt).unwrap();
            assert!((&njv - njp.eval(pt).unwrap() * (disc / 4.0)).norm() < 1e-9);
            assert!(
                (mj.eval(pt).unwrap() - mjp.eval(pt).unwrap() * (disc / 4.0)).norm() < 1e-9
            );
            assert!(
                (hj.eval(pt).unwrap() - hjp.eval(pt).unwrap() * (disc / 4.0)).norm() < 1e-9
            );
            // [X,Y]_J = −(√disc/2)[X,Y]_{J_p} + (p/2)[X,Y]
            let lhs = bj.eval(pt).unwrap();
            let rhs = bjp.eval(pt).unwrap() * (-disc.sqrt() / 2.0)
                + br.eval(pt).unwrap() * (f.params.p / 2.0);
            assert!((lhs - rhs).norm() < 1e-9);
            let lhs = jj.eval(pt).unwrap();
            let rhs = jjp.eval(pt).unwrap() * (-disc.sqrt() / 2.0)
                + jb.eval(pt).unwrap() * (f.params.p / 2.0);
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn subtangent_nilpotent() {
        let j = EndoField::constant(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        let params = MetallicParams::new(2.0, -1.0);
        let jt = subtangent(&j, params).unwrap();
        let m = jt.eval(&[0.0, 0.0]).unwrap();
        assert_eq!((m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]), (0.0, 1.0, 0.0, 0.0));
        assert!((&m * &m).norm() < 1e-12);

        // scalar case J = (p/2) I
        let j = EndoField::constant(&(DMatrix::identity(2, 2) * 1.0));
        let jt = subtangent(&j, MetallicParams::new(2.0, -1.0)).unwrap();
        assert!(jt.eval(&[0.0, 0.0]).unwrap().norm() < 1e-12);

        // guard: F1 has disc = 5
        let f1 = fixtures::f1();
        assert!(subtangent(&f1.j, f1.params).is_err());
    }

    #[test]
    fn proposition_p1_projector_tensor_scalings() {
        for f in [fixtures::f3(), fixtures::f6()] {
            let n = f.j.dim();
            let disc = f.params.disc();
            let (pf, ppf) = projector_fields(&f.j, f.params).unwrap();
            let gamma = christoffel_exprs(&f.g);
            let bx = &f.box_;
            let pts = halton_points(bx, 5, 2);
            for (a, b) in [(0usize, n - 1), (0, 1)] {
                let x = VectorField::coordinate(n, a);
                let y = VectorField::coordinate(n, b);
                let nj = nijenhuis_field(&f.j, &x, &y);
                let mj = jordan_tensor_field(&gamma, &f.j, &x, &y);
                let hj = deformation_hj_field(&gamma, &f.j, &x, &y);
                for proj in [&pf, &ppf] {
                    let np = nijenhuis_field(proj, &x, &y);
                    let mp = jordan_tensor_field(&gamma, proj, &x, &y);
                    let hp = deformation_hj_field(&gamma, proj, &x, &y);
                    for pt in &pts {
                        let scale = |v: DVector<f64>| v / disc;
                        let r1 = (np.eval(pt).unwrap() - scale(nj.eval(pt).unwrap())).norm();
                        let r2 = (mp.eval(pt).unwrap() - scale(mj.eval(pt).unwrap())).norm();
                        let r3 = (hp.eval(pt).unwrap() - scale(hj.eval(pt).unwrap())).norm();
                        assert!(r1 < 1e-8 && r2 < 1e-8 && r3 < 1e-8, "{r1} {r2} {r3}");
                    }
                }
            }
        }
    }

    #[test]
    fn tensoriality_of_pointwise_kinds() {
        let f = fixtures::f6();
        let pt = [0.9, 0.2, -0.4, 0.5];
        let x = VectorField::coordinate(4, 1);
        let y = VectorField::coordinate(4, 2);
        let poly = ScalarExpr::parse("1 + x1^2 + x3", 4).unwrap();
        let fx = x.scale(&poly);
        let fval = poly.eval(&pt).unwrap();
        for kind in [
            AssocTensorKind::Nijenhuis,
            AssocTensorKind::JordanTensor,
            AssocTensorKind::DeformationHj,
        ] {
            let plain = assoc_tensor(kind, &f.g, &f.j, &x, &y, &pt).unwrap();
            let scaled = assoc_tensor(kind, &f.g, &f.j, &fx, &y, &pt).unwrap();
            assert!(
                (scaled / fval - plain).norm() < 1e-9,
                "{kind:?} not tensorial in X"
            );
        }
    }

    #[test]
    fn nijenhuis_antisymmetric_jordan_symmetric() {
        let f = fixtures::f6();
        let pts = halton_points(&f.box_, 5, 4);
        let gamma = christoffel_exprs(&f.g);
        let x = VectorField::coordinate(4, 0);
        let y = VectorField::coordinate(4, 3);
        let nxy = nijenhuis_field(&f.j, &x, &y);
        let nyx = nijenhuis_field(&f.j, &y, &x);
        let mxy = jordan_tensor_field(&gamma, &f.j, &x, &y);
        let myx = jordan_tensor_field(&gamma, &f.j, &y, &x);
        for pt in &pts {
            assert!((nxy.eval(pt).unwrap() + nyx.eval(pt).unwrap()).norm() < 1e-10);
            assert!((mxy.eval(pt).unwrap() - myx.eval(pt).unwrap()).norm() < 1e-10);
        }
    }
}
