//! Integrability and geodesic-invariance analysis of the metallic
//! distributions, induced leaf geometry (induced connection, second
//! fundamental form, mean curvature, Gauss-equation curvature) and the
//! Chen-type inequality with its two-plane minimization.

use crate::adapted::VERDICT_TOLERANCE;
use crate::connection::{
    christoffel_exprs, lie_bracket, nabla_endo, Connection, RiemannEvaluator,
};
use crate::error::GeomError;
use crate::fields::{EndoField, MetricField, VectorField};
use crate::metallic::{
    covariant_field, distribution_frame, jordan_tensor_field, nijenhuis_field, projector_fields,
    MetallicParams,
};
use crate::numeric;
use crate::sample::{halton_points, SampleBox};
use nalgebra::{DMatrix, DVector};

/// Defects of the three equivalent characterizations for one distribution.
#[derive(Debug, Clone, Copy)]
pub struct DistributionVerdict {
    /// max ‖P′([P∂_i, P∂_j])‖ (Frobenius route; Jordan bracket for the
    /// geodesic report)
    pub frobenius_defect: f64,
    /// max ‖J(T_J(X,Y)) − σ·T_J(X,Y)‖ with T_J = N_J (resp. M_J)
    pub eigen_defect: f64,
    /// max ‖(∇_X J)Y ∓ (∇_Y J)X‖ on frame fields (the remark route)
    pub nabla_defect: f64,
    pub holds: bool,
}

/// Integrability (or geodesic-invariance) verdicts for both metallic
/// distributions over a sample set.
#[derive(Debug, Clone)]
pub struct FoliationReport {
    pub d: DistributionVerdict,
    pub d_prime: DistributionVerdict,
    pub samples: usize,
    /// max over samples/pairs of the disagreement between routes, i.e. how
    /// far the characterizations are from classifying identically
    pub agreement_margin: f64,
}

fn verdict(frobenius: f64, eigen: f64, nabla: f64) -> DistributionVerdict {
    DistributionVerdict {
        frobenius_defect: frobenius,
        eigen_defect: eigen,
        nabla_defect: nabla,
        holds: frobenius < VERDICT_TOLERANCE
            && eigen < VERDICT_TOLERANCE
            && nabla < VERDICT_TOLERANCE,
    }
}

enum BracketKind {
    Lie,
    Jordan,
}

fn invariance_report(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    samples: &[Vec<f64>],
    kind: BracketKind,
) -> Result<FoliationReport, GeomError> {
    params.require_positive_disc()?;
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let n = j.dim();
    let (pf, ppf) = projector_fields(j, params)?;
    let gamma = christoffel_exprs(g);
    let sm = params.sigma_minus()?;
    let sp = params.sigma_plus()?;
    let lc = Connection::levi_civita(g);

    // Characterization (a): projected-bracket defects on projected frames.
    // Characterization (b): the eigencondition on N_J (resp. M_J) with
    // general coordinate fields.
    // Characterization (c): the (∇J)-remark on frame fields.
    let mut fr_d = 0.0f64;
    let mut fr_dp = 0.0f64;
    let mut eig_d = 0.0f64;
    let mut eig_dp = 0.0f64;
    let mut na_d = 0.0f64;
    let mut na_dp = 0.0f64;

    for a in 0..n {
        for b in 0..n {
            let x = VectorField::coordinate(n, a);
            let y = VectorField::coordinate(n, b);
            let px = pf.apply(&x);
            let py = pf.apply(&y);
            let ppx = ppf.apply(&x);
            let ppy = ppf.apply(&y);
            let (br_d, br_dp, tensor) = match kind {
                BracketKind::Lie => (
                    lie_bracket(&px, &py),
                    lie_bracket(&ppx, &ppy),
                    nijenhuis_field(j, &x, &y),
                ),
                BracketKind::Jordan => (
                    covariant_field(&gamma, &px, &py).add(&covariant_field(&gamma, &py, &px)),
                    covariant_field(&gamma, &ppx, &ppy).add(&covariant_field(&gamma, &ppy, &ppx)),
                    jordan_tensor_field(&gamma, j, &x, &y),
                ),
            };
            for pt in samples {
                let ppm = ppf.eval(pt)?;
                let pm = pf.eval(pt)?;
                fr_d = fr_d.max((&ppm * br_d.eval(pt)?).norm());
                fr_dp = fr_dp.max((&pm * br_dp.eval(pt)?).norm());
                let t = tensor.eval(pt)?;
                let jm = j.eval(pt)?;
                eig_d = eig_d.max((&jm * &t - &t * sm).norm());
                eig_dp = eig_dp.max((&jm * &t - &t * sp).norm());
                // (∇_X J)Y ∓ (∇_Y J)X on the projected frame fields
                let sign = match kind {
                    BracketKind::Lie => -1.0,
                    BracketKind::Jordan => 1.0,
                };
                let v_d = nabla_endo(&lc, j, &px, &py, pt)?
                    + nabla_endo(&lc, j, &py, &px, pt)? * sign;
                na_d = na_d.max(v_d.norm());
                let v_dp = nabla_endo(&lc, j, &ppx, &ppy, pt)?
                    + nabla_endo(&lc, j, &ppy, &ppx, pt)? * sign;
                na_dp = na_dp.max(v_dp.norm());
            }
        }
    }

    let d = verdict(fr_d, eig_d, na_d);
    let d_prime = verdict(fr_dp, eig_dp, na_dp);
    // routes must classify identically per distribution
    let agree = |v: &DistributionVerdict| {
        let zero = [v.frobenius_defect, v.eigen_defect, v.nabla_defect]
            .iter()
            .map(|&x| x < VERDICT_TOLERANCE)
            .collect::<Vec<_>>();
        if zero.iter().all(|&z| z) || zero.iter().all(|&z| !z) {
            0.0
        } else {
            v.frobenius_defect
                .max(v.eigen_defect)
                .max(v.nabla_defect)
        }
    };
    Ok(FoliationReport {
        agreement_margin: agree(&d).max(agree(&d_prime)),
        d,
        d_prime,
        samples: samples.len(),
    })
}

/// Frobenius, N_J-eigencondition and (∇J)-remark defects for both metallic
/// distributions. A distribution is integrable when all three vanish.
pub fn integrability_report(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<FoliationReport, GeomError> {
    invariance_report(g, j, params, samples, BracketKind::Lie)
}

/// The geodesic-invariance mirror: Jordan brackets and M_J.
pub fn geodesic_invariance_report(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<FoliationReport, GeomError> {
    invariance_report(g, j, params, samples, BracketKind::Jordan)
}

/// Which distribution an induced object lives on.
pub use crate::adapted::DistSide;

/// The connection ∇^D_X Y = P(∇_X Y) induced on a metallic distribution,
/// with membership validation of its arguments.
pub struct InducedConnection {
    lc: Connection,
    project: EndoField,
    complement: EndoField,
    side: &'static str,
}

impl InducedConnection {
    pub fn apply(
        &self,
        x: &VectorField,
        y: &VectorField,
        pt: &[f64],
    ) -> Result<DVector<f64>, GeomError> {
        for f in [x, y] {
            self.check_membership(f, pt)?;
        }
        let v = self.lc.apply(x, y, pt)?;
        Ok(self.project.eval(pt)? * v)
    }

    pub fn check_membership(&self, f: &VectorField, pt: &[f64]) -> Result<(), GeomError> {
        let v = f.eval(pt)?;
        let residual = (self.complement.eval(pt)? * &v).norm() / (1.0 + v.norm());
        if residual > VERDICT_TOLERANCE {
            return Err(GeomError::NotInDistribution {
                which: self.side,
                residual,
            });
        }
        Ok(())
    }

    /// Torsion with respect to the projected bracket [X,Y]_D = P([X,Y]).
    pub fn torsion_d(
        &self,
        x: &VectorField,
        y: &VectorField,
        pt: &[f64],
    ) -> Result<DVector<f64>, GeomError> {
        let a = self.apply(x, y, pt)?;
        let b = self.apply(y, x, pt)?;
        let br = lie_bracket(x, y).eval(pt)?;
        Ok(a - b - self.project.eval(pt)? * br)
    }
}

pub fn induced_connection(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    side: DistSide,
) -> Result<InducedConnection, GeomError> {
    let (pf, ppf) = projector_fields(j, params)?;
    let lc = Connection::levi_civita(g);
    let (project, complement, name) = match side {
        DistSide::D => (pf, ppf, "D"),
        DistSide::DPrime => (ppf, pf, "D'"),
    };
    Ok(InducedConnection {
        lc,
        project,
        complement,
        side: name,
    })
}

/// Cyclic sum [X,[Y,Z]_D]_D + [Y,[Z,X]_D]_D + [Z,[X,Y]_D]_D of D-valued
/// fields; vanishes at every sample exactly when D is integrable.
pub fn jacobiator_d(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let induced = induced_connection(g, j, params, DistSide::D)?;
    for f in [x, y, z] {
        induced.check_membership(f, pt)?;
    }
    let (pf, _) = projector_fields(j, params)?;
    let bracket_d = |a: &VectorField, b: &VectorField| pf.apply(&lie_bracket(a, b));
    let term = |a: &VectorField, b: &VectorField, c: &VectorField| bracket_d(a, &bracket_d(b, c));
    let total = term(x, y, z).add(&term(y, z, x)).add(&term(z, x, y));
    total.eval(pt).map_err(GeomError::from)
}

/// Second fundamental form h(X,Y) = P′(∇_X Y) of D for D-valued fields
/// (the D′ version swaps projectors). Symmetric exactly when D is
/// integrable.
pub fn second_fundamental_form(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let induced = induced_connection(g, j, params, DistSide::D)?;
    for f in [x, y] {
        induced.check_membership(f, pt)?;
    }
    let (_, ppf) = projector_fields(j, params)?;
    let lc = Connection::levi_civita(g);
    Ok(ppf.eval(pt)? * lc.apply(x, y, pt)?)
}

/// A g-orthonormal frame of constant-coefficient combinations of the given
/// fields, orthonormal at the base point.
fn orthonormal_frame_fields(
    fields: &[VectorField],
    g: &MetricField,
    pt: &[f64],
) -> Result<Vec<VectorField>, GeomError> {
    let gm = g.eval(pt)?;
    let mut out: Vec<VectorField> = Vec::with_capacity(fields.len());
    for f in fields {
        let mut w = f.clone();
        for e in &out {
            let c = (e.eval(pt)?.transpose() * &gm * w.eval(pt)?)[(0, 0)];
            w = w.sub(&e.scale_const(c));
        }
        let norm2 = (w.eval(pt)?.transpose() * &gm * w.eval(pt)?)[(0, 0)];
        if norm2 <= 1e-12 {
            return Err(GeomError::IndefiniteOnDistribution { point: pt.to_vec() });
        }
        out.push(w.scale_const(1.0 / norm2.sqrt()));
    }
    Ok(out)
}

/// Leaf data at a point: orthonormal D-frame, second fundamental form
/// values and the Gauss-equation curvature tensor of D.
pub struct LeafGeometry {
    pub frame: Vec<VectorField>,
    pub rank: usize,
    /// h(e_i, e_j) indexed i*n + j
    pub h: Vec<DVector<f64>>,
    /// R^D components in the orthonormal frame, ((i n + j) n + k) n + l
    pub r_d: Vec<f64>,
    pub h_symmetry_defect: f64,
    pub mean_curvature: DVector<f64>,
    pub mean_curvature_sq: f64,
    pub h_norm_sq: f64,
}

impl LeafGeometry {
    pub fn new(
        g: &MetricField,
        j: &EndoField,
        params: MetallicParams,
        pt: &[f64],
    ) -> Result<LeafGeometry, GeomError> {
        let frame_raw = distribution_frame(j, params, pt)?;
        let n = frame_raw.rank_d;
        if n == 0 {
            return Err(GeomError::RankDeficient {
                context: "D is trivial at this point".into(),
            });
        }
        let frame = orthonormal_frame_fields(&frame_raw.d_fields, g, pt)?;
        let (_, ppf) = projector_fields(j, params)?;
        let lc = Connection::levi_civita(g);
        let ppm = ppf.eval(pt)?;
        let gm = g.eval(pt)?;
        let mut h = Vec::with_capacity(n * n);
        for ei in &frame {
            for ej in &frame {
                h.push(&ppm * lc.apply(ei, ej, pt)?);
            }
        }
        let mut h_symmetry_defect = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                h_symmetry_defect = h_symmetry_defect.max((&h[i * n + k] - &h[k * n + i]).norm());
            }
        }
        // ambient curvature contracted into the frame
        let riem = RiemannEvaluator::new(g);
        let comps = riem.components(pt)?;
        let dim = g.dim();
        let evals: Vec<DVector<f64>> = frame
            .iter()
            .map(|e| e.eval(pt).map_err(GeomError::from))
            .collect::<Result<_, _>>()?;
        let rm = |i: usize, jj: usize, k: usize, l: usize| {
            let mut acc = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        for d in 0..dim {
                            acc += comps[((a * dim + b) * dim + c) * dim + d]
                                * evals[i][a]
                                * evals[jj][b]
                                * evals[k][c]
                                * evals[l][d];
                        }
                    }
                }
            }
            acc
        };
        let pair = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &gm * v)[(0, 0)];
        let mut r_d = vec![0.0; n * n * n * n];
        for i in 0..n {
            for jj in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r_d[((i * n + jj) * n + k) * n + l] = rm(i, jj, k, l)
                            - pair(&h[i * n + k], &h[jj * n + l])
                            + pair(&h[i * n + l], &h[jj * n + k]);
                    }
                }
            }
        }
        let mut mean = DVector::zeros(dim);
        for i in 0..n {
            mean += &h[i * n + i];
        }
        mean /= n as f64;
        let mean_curvature_sq = pair(&mean, &mean);
        let mut h_norm_sq = 0.0;
        for v in &h {
            h_norm_sq += pair(v, v);
        }
        Ok(LeafGeometry {
            frame,
            rank: n,
            h,
            r_d,
            h_symmetry_defect,
            mean_curvature: mean,
            mean_curvature_sq,
            h_norm_sq,
        })
    }

    /// Sectional curvature of the plane spanned by frame-coordinate vectors
    /// u, v (the frame is orthonormal, so the induced metric is the
    /// identity).
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let n = self.rank;
        let mut num = 0.0;
        for i in 0..n {
            for jj in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        num += self.r_d[((i * n + jj) * n + k) * n + l]
                            * u[i]
                            * v[jj]
                            * v[k]
                            * u[l];
                    }
                }
            }
        }
        let uu = u.dot(u);
        let vv = v.dot(v);
        let uv = u.dot(v);
        num / (uu * vv - uv * uv)
    }

    /// τ^D = Σ_{i<j} K(e_i, e_j).
    pub fn scalar_tau(&self) -> f64 {
        let n = self.rank;
        let mut tau = 0.0;
        for i in 0..n {
            for jj in (i + 1)..n {
                tau += self.r_d[((i * n + jj) * n + jj) * n + i];
            }
        }
        tau
    }
}

/// h(X,Y) warning wrapper for the Gauss equation value.
#[derive(Debug, Clone, Copy)]
pub struct GaussValue {
    pub value: f64,
    /// set when h fails symmetry at the point: the Gauss equation is stated
    /// only for integrable D, the value is still reported
    pub integrability_warning: bool,
}

/// R^D(X,Y,Z,W) = R^M(X,Y,Z,W) − g(h(X,Z),h(Y,W)) + g(h(X,W),h(Y,Z)) for
/// D-valued fields.
pub fn gauss_rd(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    w: &VectorField,
    pt: &[f64],
) -> Result<GaussValue, GeomError> {
    let induced = induced_connection(g, j, params, DistSide::D)?;
    for f in [x, y, z, w] {
        induced.check_membership(f, pt)?;
    }
    let rm = crate::connection::riemann(g, x, y, z, w, pt)?;
    let h = |a: &VectorField, b: &VectorField| second_fundamental_form(g, j, params, a, b, pt);
    let gm = g.eval(pt)?;
    let pair = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &gm * v)[(0, 0)];
    let hxz = h(x, z)?;
    let hyw = h(y, w)?;
    let hxw = h(x, w)?;
    let hyz = h(y, z)?;
    // symmetry check for the warning flag
    let hzx = h(z, x)?;
    let integrability_warning = (&hxz - hzx).norm() > VERDICT_TOLERANCE;
    Ok(GaussValue {
        value: rm - pair(&hxz, &hyw) + pair(&hxw, &hyz),
        integrability_warning,
    })
}

/// Mean curvature H = (1/n) Σ h(e_i, e_i) over a g-orthonormal D-frame,
/// with its squared norm. Requires g positive definite on D at the point.
pub fn mean_curvature(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
) -> Result<(DVector<f64>, f64), GeomError> {
    let leaf = LeafGeometry::new(g, j, params, pt)?;
    Ok((leaf.mean_curvature.clone(), leaf.mean_curvature_sq))
}

/// Minimize the sectional-curvature form of `r` (an n⁴ component array with
/// curvature symmetries, orthonormal frame) over 2-planes: multi-start
/// projected gradient descent with quasi-random starts, certified in tests
/// against dense random sampling.
pub fn min_sectional_of_components(
    r: &[f64],
    n: usize,
    starts: usize,
) -> (f64, DVector<f64>, DVector<f64>) {
    assert!(n >= 2);
    let k_of = |u: &DVector<f64>, v: &DVector<f64>| {
        let mut num = 0.0;
        for i in 0..n {
            for jj in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        num += r[((i * n + jj) * n + k) * n + l] * u[i] * v[jj] * v[k] * u[l];
                    }
                }
            }
        }
        let d = u.dot(u) * v.dot(v) - u.dot(v).powi(2);
        num / d
    };
    if n == 2 {
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 1.0]);
        let k = k_of(&u, &v);
        return (k, u, v);
    }

    let grad = |u: &DVector<f64>, v: &DVector<f64>| -> (DVector<f64>, DVector<f64>) {
        let mut num = 0.0;
        let mut dnu = DVector::zeros(n);
        let mut dnv = DVector::zeros(n);
        for i in 0..n {
            for jj in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let rr = r[((i * n + jj) * n + k) * n + l];
                        num += rr * u[i] * v[jj] * v[k] * u[l];
                        dnu[i] += rr * v[jj] * v[k] * u[l];
                        dnu[l] += rr * u[i] * v[jj] * v[k];
                        dnv[jj] += rr * u[i] * v[k] * u[l];
                        dnv[k] += rr * u[i] * v[jj] * u[l];
                    }
                }
            }
        }
        let uu = u.dot(u);
        let vv = v.dot(v);
        let uv = u.dot(v);
        let den = uu * vv - uv * uv;
        let ddu = u * (2.0 * vv) - v * (2.0 * uv);
        let ddv = v * (2.0 * uu) - u * (2.0 * uv);
        let gu = (dnu * den - &ddu * num) / (den * den);
        let gv = (dnv * den - &ddv * num) / (den * den);
        (gu, gv)
    };

    let reortho = |u: &mut DVector<f64>, v: &mut DVector<f64>| {
        u.normalize_mut();
        let c = v.dot(u);
        *v -= &*u * c;
        v.normalize_mut();
    };

    let bx = SampleBox::cube(2 * n, -1.0, 1.0);
    let start_pts = halton_points(&bx, starts, 7);
    let mut best_k = f64::INFINITY;
    let mut best = (DVector::zeros(n), DVector::zeros(n));
    for s in start_pts {
        let mut u = DVector::from_iterator(n, s[0..n].iter().copied());
        let mut v = DVector::from_iterator(n, s[n..2 * n].iter().copied());
        if u.norm() < 1e-6 || v.norm() < 1e-6 {
            continue;
        }
        reortho(&mut u, &mut v);
        if !u.iter().all(|x| x.is_finite()) || !v.iter().all(|x| x.is_finite()) {
            continue;
        }
        let mut k = k_of(&u, &v);
        for _ in 0..200 {
            let (gu, gv) = grad(&u, &v);
            let gnorm = (gu.norm_squared() + gv.norm_squared()).sqrt();
            if gnorm < 1e-12 {
                break;
            }
            let mut step = 1.0 / (1.0 + gnorm);
            let mut improved = false;
            for _ in 0..40 {
                let mut nu = &u - &gu * step;
                let mut nv = &v - &gv * step;
                if nu.norm() > 1e-9 && nv.norm() > 1e-9 {
                    reortho(&mut nu, &mut nv);
                    let nk = k_of(&nu, &nv);
                    if nk < k - 1e-16 {
                        u = nu;
                        v = nv;
                        let delta = k - nk;
                        k = nk;
                        improved = true;
                        if delta < 1e-10 {
                            improved = false;
                        }
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if k < best_k {
            best_k = k;
            best = (u, v);
        }
    }
    (best_k, best.0, best.1)
}

/// inf K^D over 2-planes at the point, with the minimizing orthonormal pair
/// expressed in ambient coordinates.
pub fn inf_sectional(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
) -> Result<(f64, (DVector<f64>, DVector<f64>)), GeomError> {
    let leaf = LeafGeometry::new(g, j, params, pt)?;
    if leaf.rank < 2 {
        return Err(GeomError::RankDeficient {
            context: "inf K needs rank D >= 2".into(),
        });
    }
    let (k, u, v) = min_sectional_of_components(&leaf.r_d, leaf.rank, 32);
    let lift = |c: &DVector<f64>| -> Result<DVector<f64>, GeomError> {
        let mut out = DVector::zeros(g.dim());
        for (i, e) in leaf.frame.iter().enumerate() {
            out += e.eval(pt)? * c[i];
        }
        Ok(out)
    };
    Ok((k, (lift(&u)?, lift(&v)?)))
}

/// Everything entering the Chen-type inequality at one point.
#[derive(Debug, Clone)]
pub struct ChenReport {
    pub point: Vec<f64>,
    pub rank: usize,
    pub tau: f64,
    pub inf_k: f64,
    /// minimizing plane in frame coordinates
    pub min_plane: (DVector<f64>, DVector<f64>),
    pub delta: f64,
    pub mean_curvature_sq: f64,
    pub h_norm_sq: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// qa² − pab − b² − 1
    pub constraint_residual: f64,
    /// max residual of the curvature ansatz R^M = c[g(X,FW)g(Y,FZ) −
    /// g(X,FZ)g(Y,FW)] over sampled 4-tuples with F = aJ + bI
    pub ansatz_residual: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub h_symmetry_defect: f64,
    pub d_integrable_here: bool,
}

/// Assemble the Chen report: τ^D, inf K^D, δ_D, ‖H‖², the hypothesis
/// residuals and both sides of
/// δ_D ≤ c(aσ₋+b)²(n²−n+2)/2 + n²(n−2)/(2(n−1))·‖H‖².
pub fn chen_report(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    a: f64,
    b: f64,
    c: f64,
    pt: &[f64],
) -> Result<ChenReport, GeomError> {
    let leaf = LeafGeometry::new(g, j, params, pt)?;
    let n = leaf.rank;
    if n < 2 {
        return Err(GeomError::RankDeficient {
            context: "Chen report needs rank D >= 2".into(),
        });
    }
    let tau = leaf.scalar_tau();
    let (inf_k, u, v) = min_sectional_of_components(&leaf.r_d, n, 32);
    let delta = tau - inf_k;

    let constraint_residual = params.q * a * a - params.p * a * b - b * b - 1.0;

    // curvature ansatz residual with F = aJ + bI over coordinate 4-tuples
    let dim = g.dim();
    let f_endo = j
        .scale_const(a)
        .add(&EndoField::identity(dim).scale_const(b));
    let riem = RiemannEvaluator::new(g);
    let comps = riem.components(pt)?;
    let gm = g.eval(pt)?;
    let fm = f_endo.eval(pt)?;
    let gf = &gm * &fm;
    let mut ansatz_residual = 0.0f64;
    for i in 0..dim {
        for jj in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let rm = comps[((i * dim + jj) * dim + k) * dim + l];
                    let model = c * (gf[(i, l)] * gf[(jj, k)] - gf[(i, k)] * gf[(jj, l)]);
                    ansatz_residual = ansatz_residual.max((rm - model).abs());
                }
            }
        }
    }

    let sm = params.sigma_minus()?;
    let nn = n as f64;
    let rhs = c * (a * sm + b).powi(2) * (nn * nn - nn + 2.0) / 2.0
        + nn * nn * (nn - 2.0) / (2.0 * (nn - 1.0)) * leaf.mean_curvature_sq;
    let lhs = delta;
    Ok(ChenReport {
        point: pt.to_vec(),
        rank: n,
        tau,
        inf_k,
        min_plane: (u, v),
        delta,
        mean_curvature_sq: leaf.mean_curvature_sq,
        h_norm_sq: leaf.h_norm_sq,
        a,
        b,
        c,
        constraint_residual,
        ansatz_residual,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
        h_symmetry_defect: leaf.h_symmetry_defect,
        d_integrable_here: leaf.h_symmetry_defect < VERDICT_TOLERANCE,
    })
}

/// Frame-independence helper for tests: mean curvature recomputed against a
/// frame rotated by the given orthogonal mix of the D-frame fields.
pub fn mean_curvature_with_rotated_frame(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
    rotation: &DMatrix<f64>,
) -> Result<(DVector<f64>, f64), GeomError> {
    let leaf = LeafGeometry::new(g, j, params, pt)?;
    let n = leaf.rank;
    assert_eq!(rotation.nrows(), n);
    let rotated: Vec<VectorField> = (0..n)
        .map(|i| {
            let coeffs: Vec<f64> = (0..n).map(|k| rotation[(i, k)]).collect();
            VectorField::linear_combination(&leaf.frame, &coeffs)
        })
        .collect();
    let (_, ppf) = projector_fields(j, params)?;
    let lc = Connection::levi_civita(g);
    let ppm = ppf.eval(pt)?;
    let gm = g.eval(pt)?;
    let mut mean = DVector::zeros(g.dim());
    for e in &rotated {
        mean += &ppm * lc.apply(e, e, pt)?;
    }
    mean /= n as f64;
    let sq = (mean.transpose() * &gm * &mean)[(0, 0)];
    Ok((mean, sq))
}

/// Largest principal angle between D at the point and the span of the given
/// vectors; a convenience for map tests.
pub fn distribution_angle(
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
    span: &DMatrix<f64>,
) -> Result<f64, GeomError> {
    let frame = distribution_frame(j, params, pt)?;
    let n = j.dim();
    let mut d_mat = DMatrix::zeros(n, frame.rank_d);
    for (k, f) in frame.d_fields.iter().enumerate() {
        d_mat.set_column(k, &f.eval(pt)?);
    }
    Ok(numeric::largest_principal_angle(&d_mat, span))
}
