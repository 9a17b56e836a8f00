//! Metallic maps Φ between metallic manifolds: the intertwining residual
//! dΦ∘J₁ = J₂∘dΦ, its odd-power and kernel-containment consequences, and
//! the leaf-correspondence analysis of the pull-back distribution.

use crate::error::GeomError;
use crate::fields::{Chart, EndoField, VectorField};
use crate::metallic::{distribution_frame, MetallicParams};
use crate::numeric;
use nalgebra::DMatrix;

/// A smooth map given by target-coordinate expressions Φ^a(x) over the
/// source chart; the differential is derived symbolically.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub source: Chart,
    pub target: Chart,
    pub components: Vec<crate::expr::ScalarExpr>,
}

impl MapSpec {
    pub fn new(
        source: Chart,
        target: Chart,
        components: Vec<crate::expr::ScalarExpr>,
    ) -> Result<MapSpec, GeomError> {
        if components.len() != target.dim {
            return Err(GeomError::dim(format!(
                "map has {} components for a {}-dimensional target",
                components.len(),
                target.dim
            )));
        }
        Ok(MapSpec {
            source,
            target,
            components,
        })
    }

    pub fn identity(chart: &Chart) -> MapSpec {
        MapSpec {
            source: chart.clone(),
            target: chart.clone(),
            components: (0..chart.dim).map(crate::expr::ScalarExpr::coord).collect(),
        }
    }

    pub fn image(&self, pt: &[f64]) -> Result<Vec<f64>, GeomError> {
        self.components
            .iter()
            .map(|c| c.eval(pt).map_err(GeomError::from))
            .collect()
    }

    /// dΦ at a point (target-dim × source-dim).
    pub fn differential(&self, pt: &[f64]) -> Result<DMatrix<f64>, GeomError> {
        let m = self.target.dim;
        let n = self.source.dim;
        let mut out = DMatrix::zeros(m, n);
        for a in 0..m {
            for i in 0..n {
                out[(a, i)] = self.components[a].diff(i).eval(pt)?;
            }
        }
        Ok(out)
    }

    /// The field Φ_* X has no meaning pointwise unless Φ is invertible;
    /// what reports need is dΦ(x)·X(x), provided here.
    pub fn push_at(&self, x: &VectorField, pt: &[f64]) -> Result<nalgebra::DVector<f64>, GeomError> {
        Ok(self.differential(pt)? * x.eval(pt)?)
    }
}

/// Residuals of the metallic-map law and its consequences over a sample
/// set; all maxima of Frobenius norms.
#[derive(Debug, Clone)]
pub struct MetallicMapReport {
    /// max ‖dΦ·J₁ − J₂(Φ(x))·dΦ‖
    pub metallic_residual: f64,
    /// max ‖dΦ·J₁^{2k+1} − J₂^{2k+1}(Φ(x))·dΦ‖ for k = 1, 2
    pub odd_power_residuals: [f64; 2],
    /// max residual of the kernel containment
    /// [((p₂²+q₂)−(p₁²+q₁))J₁ + (p₂q₂−p₁q₁)I](TM₁) ⊆ ker dΦ,
    /// measured as the norm of the part orthogonal to the kernel
    pub containment_residual: f64,
    pub samples: usize,
}

pub fn metallic_map_report(
    phi: &MapSpec,
    j1: &EndoField,
    j2: &EndoField,
    params1: MetallicParams,
    params2: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<MetallicMapReport, GeomError> {
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    if j1.dim() != phi.source.dim || j2.dim() != phi.target.dim {
        return Err(GeomError::dim("map/structure dimensions disagree"));
    }
    let mut metallic_residual = 0.0f64;
    let mut odd = [0.0f64; 2];
    let mut containment = 0.0f64;
    for pt in samples {
        let d = phi.differential(pt)?;
        let j1m = j1.eval(pt)?;
        let image = phi.image(pt)?;
        let j2m = j2.eval(&image)?;
        metallic_residual = metallic_residual.max((&d * &j1m - &j2m * &d).norm());
        // odd powers J^{2k+1}, k = 1, 2
        let j1_3 = &j1m * &j1m * &j1m;
        let j2_3 = &j2m * &j2m * &j2m;
        odd[0] = odd[0].max((&d * &j1_3 - &j2_3 * &d).norm());
        let j1_5 = &j1_3 * &j1m * &j1m;
        let j2_5 = &j2_3 * &j2m * &j2m;
        odd[1] = odd[1].max((&d * &j1_5 - &j2_5 * &d).norm());
        // kernel containment
        let c1 = (params2.p * params2.p + params2.q) - (params1.p * params1.p + params1.q);
        let c0 = params2.p * params2.q - params1.p * params1.q;
        let n = j1.dim();
        let m = &j1m * c1 + DMatrix::<f64>::identity(n, n) * c0;
        let kernel = numeric::kernel_basis(&d);
        // residual after projecting the image columns onto ker dΦ
        let proj = &kernel * kernel.transpose();
        let residual = (&m - proj * &m).norm();
        containment = containment.max(residual);
    }
    Ok(MetallicMapReport {
        metallic_residual,
        odd_power_residuals: odd,
        containment_residual: containment,
        samples: samples.len(),
    })
}

/// Leaf-correspondence data at the samples.
#[derive(Debug, Clone)]
pub struct LeafCorrespondenceReport {
    /// largest principal angle between the pull-back distribution Φ*D₂ =
    /// {v : (J₁ − σ₂₋ I) v ∈ ker dΦ} and D₁, maximized over samples
    pub pullback_angle: f64,
    /// whether Φ*D₂ = D₁ under the angle tolerance
    pub pullback_equals_d1: bool,
    /// largest principal angle between ker dΦ and the printed
    /// sufficient-condition subspace (J₁−σ₂₊I)(ker(J₁−σ₁₊I))
    pub printed_condition_angle: f64,
    pub printed_condition_holds: bool,
    /// rank of dΦ at each sample; the analysis assumes it constant
    pub differential_ranks: Vec<usize>,
    pub rank_constant: bool,
    pub samples: usize,
}

/// Angle tolerance for subspace equality verdicts.
pub const ANGLE_TOLERANCE: f64 = 1e-7;

/// Pull-back distribution analysis. Φ*D₂ is computed from the definition
/// {v : Φ_* v ∈ D₂}, which for a metallic map reduces to
/// (J₁ − σ₂₋ I) v ∈ ker dΦ. The paper's display uses σ₂₊ there; with its
/// own projector conventions (D = the σ₋ eigendistribution) the σ₂₋ form
/// is the one equivalent to the definition, so that is what the verdict
/// uses, while the printed sufficient-condition subspace
/// (J₁−σ₂₊I)(ker(J₁−σ₁₊I)) is measured and reported as stated.
pub fn leaf_correspondence_check(
    phi: &MapSpec,
    j1: &EndoField,
    params1: MetallicParams,
    params2: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<LeafCorrespondenceReport, GeomError> {
    params1.require_positive_disc()?;
    params2.require_positive_disc()?;
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let n = j1.dim();
    let sigma2_minus = params2.sigma_minus()?;
    let sigma2_plus = params2.sigma_plus()?;
    let sigma1_plus = params1.sigma_plus()?;
    let eye = DMatrix::<f64>::identity(n, n);

    let mut pullback_angle = 0.0f64;
    let mut printed_angle = 0.0f64;
    let mut ranks = Vec::with_capacity(samples.len());
    for pt in samples {
        let d = phi.differential(pt)?;
        ranks.push(numeric::rank(&d));
        let j1m = j1.eval(pt)?;
        let kernel = numeric::kernel_basis(&d);

        // Φ*D₂ = ker(dΦ · (J₁ − σ₂₋ I))
        let pullback = numeric::kernel_basis(&(&d * (&j1m - &eye * sigma2_minus)));
        let frame = distribution_frame(j1, params1, pt)?;
        let mut d1 = DMatrix::zeros(n, frame.rank_d);
        for (k, f) in frame.d_fields.iter().enumerate() {
            d1.set_column(k, &f.eval(pt)?);
        }
        pullback_angle = pullback_angle.max(numeric::largest_principal_angle(&pullback, &d1));

        // printed sufficient-condition subspace
        let ker_plus = numeric::kernel_basis(&(&j1m - &eye * sigma1_plus));
        let image = (&j1m - &eye * sigma2_plus) * ker_plus;
        let image = numeric::orthonormal_columns(&image);
        printed_angle = printed_angle.max(numeric::largest_principal_angle(&kernel, &image));
    }
    let rank_constant = ranks.windows(2).all(|w| w[0] == w[1]);
    Ok(LeafCorrespondenceReport {
        pullback_angle,
        pullback_equals_d1: pullback_angle < ANGLE_TOLERANCE,
        printed_condition_angle: printed_angle,
        printed_condition_holds: printed_angle < ANGLE_TOLERANCE,
        differential_ranks: ranks,
        rank_constant,
        samples: samples.len(),
    })
}

/// The orthogonal projection of F1's plane onto its σ₊ eigenline, as the
/// canonical metallic-map example: a 1-dimensional target with J₂ = σ₊.
pub fn eigenline_projection(
    j: &EndoField,
    params: MetallicParams,
) -> Result<(MapSpec, EndoField, MetallicParams), GeomError> {
    let n = j.dim();
    let sp = params.sigma_plus()?;
    // left σ₊ eigenvector of the constant structure at the origin
    let j0 = j.eval(&vec![0.0; n])?;
    let eye = DMatrix::<f64>::identity(n, n);
    let ker = numeric::kernel_basis(&(j0.transpose() - &eye * sp));
    if ker.ncols() != 1 {
        return Err(GeomError::RankDeficient {
            context: "σ₊ eigenline is not one-dimensional".into(),
        });
    }
    let u = ker.column(0);
    let mut comp = crate::expr::ScalarExpr::zero();
    for i in 0..n {
        comp = comp.add(&crate::expr::ScalarExpr::constant(u[i]).mul(&crate::expr::ScalarExpr::coord(i)));
    }
    let phi = MapSpec::new(Chart::new(n), Chart::new(1), vec![comp])?;
    let j2 = EndoField::constant(&DMatrix::from_element(1, 1, sp));
    Ok((phi, j2, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarExpr;
    use crate::fixtures;
    use crate::sample::halton_points;

    #[test]
    fn identity_map_is_metallic() {
        let f = fixtures::f1();
        let phi = MapSpec::identity(&f.chart);
        let pts = halton_points(&f.box_, 10, 0);
        let rep =
            metallic_map_report(&phi, &f.j, &f.j, f.params, f.params, &pts).unwrap();
        assert!(rep.metallic_residual < 1e-12);
        assert!(rep.odd_power_residuals[0] < 1e-12);
        assert!(rep.odd_power_residuals[1] < 1e-12);
        assert!(rep.containment_residual < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let chart2 = Chart::new(2);
        let phi = MapSpec::new(
            chart2.clone(),
            chart2,
            vec![
                ScalarExpr::parse("x1^2 - x2", 2).unwrap(),
                ScalarExpr::parse("sin(x1*x2)", 2).unwrap(),
            ],
        )
        .unwrap();
        let pt = [0.4, 0.7];
        let d = phi.differential(&pt).unwrap();
        let h = 1e-6;
        for a in 0..2 {
            for i in 0..2 {
                let mut hi = pt;
                let mut lo = pt;
                hi[i] += h;
                lo[i] -= h;
                let fd =
                    (phi.components[a].eval(&hi).unwrap() - phi.components[a].eval(&lo).unwrap())
                        / (2.0 * h);
                assert!((d[(a, i)] - fd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn eigenline_projection_is_metallic_with_kernel_d() {
        let f = fixtures::f1();
        let (phi, j2, params2) = eigenline_projection(&f.j, f.params).unwrap();
        let pts = halton_points(&f.box_, 10, 0);
        let rep = metallic_map_report(&phi, &f.j, &j2, f.params, params2, &pts).unwrap();
        assert!(rep.metallic_residual < 1e-9);
        assert!(rep.odd_power_residuals[0] < 1e-9);
        assert!(rep.containment_residual < 1e-9, "same params: zero operator");

        // ker dΦ = D₁ and the pull-back matches D₁
        let leaf = leaf_correspondence_check(&phi, &f.j, f.params, params2, &pts).unwrap();
        assert!(leaf.rank_constant);
        assert!(leaf.pullback_equals_d1, "angle {}", leaf.pullback_angle);
        assert!(leaf.pullback_angle < 1e-8);
    }

    #[test]
    fn containment_with_different_target_params() {
        // Against the product structure p₂ = 0, q₂ = 1 the containment
        // operator is nonzero and must land in ker dΦ for the eigenline
        // projection only if the combination annihilates D'… measure it.
        let f = fixtures::f1();
        let (phi, _, _) = eigenline_projection(&f.j, f.params).unwrap();
        let params2 = MetallicParams::new(0.0, 1.0);
        // J₂ = ±1 on the line: take J₂ = I (σ₊ = 1 branch of p=0,q=1)
        let j2 = EndoField::identity(1);
        let pts = halton_points(&f.box_, 5, 0);
        let rep = metallic_map_report(&phi, &f.j, &j2, f.params, params2, &pts).unwrap();
        // the map is NOT metallic for these parameters; the report simply
        // carries the measured residuals
        assert!(rep.metallic_residual > 1e-3);
        assert!(rep.containment_residual >= 0.0);
    }

    #[test]
    fn constant_map_fails_correspondence() {
        let f = fixtures::f1();
        let phi = MapSpec::new(
            f.chart.clone(),
            Chart::new(1),
            vec![ScalarExpr::constant(1.0)],
        )
        .unwrap();
        let pts = halton_points(&f.box_, 5, 0);
        let leaf = leaf_correspondence_check(&phi, &f.j, f.params, f.params, &pts).unwrap();
        // ker dΦ is everything: Φ*D₂ is the whole plane, not D₁
        assert!(!leaf.pullback_equals_d1);
    }

    #[test]
    fn identity_map_correspondence() {
        let f = fixtures::f1();
        let phi = MapSpec::identity(&f.chart);
        let pts = halton_points(&f.box_, 5, 0);
        let leaf = leaf_correspondence_check(&phi, &f.j, f.params, f.params, &pts).unwrap();
        // Φ*D₂ = D₁ trivially; the printed condition subspace
        // (J₁−σ₊)(ker(J₁−σ₊)) = 0 = ker dΦ also holds here
        assert!(leaf.pullback_equals_d1);
        assert!(leaf.printed_condition_holds);
    }

    #[test]
    fn eigenline_printed_condition_diagnostic() {
        // For the eigenline projection with equal parameters the printed
        // subspace (J₁−σ₂₊I)(ker(J₁−σ₁₊I)) collapses to 0 while
        // ker dΦ = D₁ is a line, so the printed sufficient condition reads
        // false even though leaf correspondence itself holds; the report
        // keeps both facts separate.
        let f = fixtures::f1();
        let (phi, _, params2) = eigenline_projection(&f.j, f.params).unwrap();
        let pts = halton_points(&f.box_, 5, 0);
        let leaf = leaf_correspondence_check(&phi, &f.j, f.params, params2, &pts).unwrap();
        assert!(leaf.pullback_equals_d1);
        assert!(!leaf.printed_condition_holds);
    }
}
