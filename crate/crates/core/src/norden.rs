//! The p²+4q < 0 branch: complexified tangent fields, complex projectors
//! and metallic distributions, the induced Norden structure J_c, and the
//! complex Schouten-van Kampen / Vrănceanu / Vidal connections.
//!
//! Complex scalars are pairs of real expressions; differentiation stays
//! real and everything complex is assembled by bilinearity.

use crate::connection::{lie_bracket, Connection};
use crate::error::GeomError;
use crate::expr::ScalarExpr;
use crate::fields::{EndoField, MetricField, VectorField};
use crate::metallic::MetallicParams;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::Arc;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// A complex scalar expression as a (real, imaginary) pair.
#[derive(Debug, Clone)]
pub struct ComplexExpr {
    pub re: ScalarExpr,
    pub im: ScalarExpr,
}

impl ComplexExpr {
    pub fn new(re: ScalarExpr, im: ScalarExpr) -> ComplexExpr {
        ComplexExpr { re, im }
    }

    pub fn real(re: ScalarExpr) -> ComplexExpr {
        ComplexExpr {
            re,
            im: ScalarExpr::zero(),
        }
    }

    pub fn zero() -> ComplexExpr {
        ComplexExpr::real(ScalarExpr::zero())
    }

    pub fn constant(c: Complex64) -> ComplexExpr {
        ComplexExpr {
            re: ScalarExpr::constant(c.re),
            im: ScalarExpr::constant(c.im),
        }
    }

    pub fn add(&self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn neg(&self) -> ComplexExpr {
        ComplexExpr {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> ComplexExpr {
        ComplexExpr {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn scale(&self, c: Complex64) -> ComplexExpr {
        self.mul(&ComplexExpr::constant(c))
    }

    pub fn diff(&self, i: usize) -> ComplexExpr {
        ComplexExpr {
            re: self.re.diff(i),
            im: self.im.diff(i),
        }
    }

    pub fn eval(&self, pt: &[f64]) -> Result<Complex64, GeomError> {
        Ok(Complex64::new(self.re.eval(pt)?, self.im.eval(pt)?))
    }

    pub fn is_structurally_zero(&self) -> bool {
        matches!(self.re.as_const(), Some(0.0)) && matches!(self.im.as_const(), Some(0.0))
    }
}

/// A complexified vector field X + iY.
#[derive(Debug, Clone)]
pub struct ComplexVectorField {
    pub re: VectorField,
    pub im: VectorField,
}

impl ComplexVectorField {
    pub fn new(re: VectorField, im: VectorField) -> ComplexVectorField {
        assert_eq!(re.dim(), im.dim());
        ComplexVectorField { re, im }
    }

    pub fn from_real(re: VectorField) -> ComplexVectorField {
        let n = re.dim();
        ComplexVectorField {
            re,
            im: VectorField::zero(n),
        }
    }

    pub fn coordinate(n: usize, i: usize) -> ComplexVectorField {
        ComplexVectorField::from_real(VectorField::coordinate(n, i))
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn conj(&self) -> ComplexVectorField {
        ComplexVectorField {
            re: self.re.clone(),
            im: self.im.scale_const(-1.0),
        }
    }

    pub fn add(&self, o: &ComplexVectorField) -> ComplexVectorField {
        ComplexVectorField {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &ComplexVectorField) -> ComplexVectorField {
        ComplexVectorField {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn scale(&self, c: Complex64) -> ComplexVectorField {
        // (a+ib)(X+iY) = (aX − bY) + i(aY + bX)
        ComplexVectorField {
            re: self.re.scale_const(c.re).sub(&self.im.scale_const(c.im)),
            im: self.im.scale_const(c.re).add(&self.re.scale_const(c.im)),
        }
    }

    pub fn eval(&self, pt: &[f64]) -> Result<CVector, GeomError> {
        let re = self.re.eval(pt)?;
        let im = self.im.eval(pt)?;
        Ok(CVector::from_fn(re.len(), |i, _| {
            Complex64::new(re[i], im[i])
        }))
    }

    /// Complex-linear directional derivative of a complex scalar.
    pub fn derive(&self, f: &ComplexExpr) -> ComplexExpr {
        ComplexExpr {
            re: self.re.derive_scalar(&f.re).sub(&self.im.derive_scalar(&f.im)),
            im: self.re.derive_scalar(&f.im).add(&self.im.derive_scalar(&f.re)),
        }
    }
}

/// A complex endomorphism field A + iB.
#[derive(Debug, Clone)]
pub struct ComplexEndoField {
    pub re: EndoField,
    pub im: EndoField,
}

impl ComplexEndoField {
    pub fn from_real(re: EndoField) -> ComplexEndoField {
        let n = re.dim();
        ComplexEndoField {
            re,
            im: EndoField::from_fn(n, |_, _| ScalarExpr::zero()),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn conj(&self) -> ComplexEndoField {
        ComplexEndoField {
            re: self.re.clone(),
            im: self.im.scale_const(-1.0),
        }
    }

    /// (A+iB)(X+iY) = (AX − BY) + i(AY + BX).
    pub fn apply(&self, x: &ComplexVectorField) -> ComplexVectorField {
        ComplexVectorField {
            re: self.re.apply(&x.re).sub(&self.im.apply(&x.im)),
            im: self.re.apply(&x.im).add(&self.im.apply(&x.re)),
        }
    }

    pub fn column(&self, j: usize) -> ComplexVectorField {
        ComplexVectorField {
            re: self.re.column(j),
            im: self.im.column(j),
        }
    }

    pub fn eval(&self, pt: &[f64]) -> Result<CMatrix, GeomError> {
        let re = self.re.eval(pt)?;
        let im = self.im.eval(pt)?;
        Ok(CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            Complex64::new(re[(i, j)], im[(i, j)])
        }))
    }
}

/// The complexified Lie bracket
/// [X₁+iY₁, X₂+iY₂] = [X₁,X₂] − [Y₁,Y₂] + i([X₁,Y₂] + [Y₁,X₂]).
pub fn complex_lie_bracket(
    x: &ComplexVectorField,
    y: &ComplexVectorField,
) -> ComplexVectorField {
    ComplexVectorField {
        re: lie_bracket(&x.re, &y.re).sub(&lie_bracket(&x.im, &y.im)),
        im: lie_bracket(&x.re, &y.im).add(&lie_bracket(&x.im, &y.re)),
    }
}

type CRule = dyn Fn(&ComplexVectorField, &ComplexVectorField, &[f64]) -> Result<CVector, GeomError>
    + Send
    + Sync;

/// A complex linear connection as an operator on complexified fields.
#[derive(Clone)]
pub struct ComplexConnection {
    dim: usize,
    descriptor: String,
    rule: Arc<CRule>,
}

impl ComplexConnection {
    pub fn from_rule(
        dim: usize,
        descriptor: impl Into<String>,
        rule: impl Fn(&ComplexVectorField, &ComplexVectorField, &[f64]) -> Result<CVector, GeomError>
            + Send
            + Sync
            + 'static,
    ) -> ComplexConnection {
        ComplexConnection {
            dim,
            descriptor: descriptor.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(
        &self,
        x: &ComplexVectorField,
        y: &ComplexVectorField,
        pt: &[f64],
    ) -> Result<CVector, GeomError> {
        (self.rule)(x, y, pt)
    }

    /// The complexification ∇^ℂ_{X₁+iY₁}(X₂+iY₂) of a real connection, by
    /// complex bilinearity.
    pub fn complexify(conn: &Connection) -> ComplexConnection {
        let conn = conn.clone();
        let n = conn.dim();
        let name = format!("{}^C", conn.descriptor());
        ComplexConnection::from_rule(n, name, move |x, y, pt| {
            let rr = conn.apply(&x.re, &y.re, pt)?;
            let ii = conn.apply(&x.im, &y.im, pt)?;
            let ri = conn.apply(&x.re, &y.im, pt)?;
            let ir = conn.apply(&x.im, &y.re, pt)?;
            let re = rr - ii;
            let im = ri + ir;
            Ok(CVector::from_fn(re.len(), |i, _| {
                Complex64::new(re[i], im[i])
            }))
        })
    }
}

/// Complex torsion T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]^ℂ.
pub fn complex_torsion(
    conn: &ComplexConnection,
    x: &ComplexVectorField,
    y: &ComplexVectorField,
    pt: &[f64],
) -> Result<CVector, GeomError> {
    Ok(conn.apply(x, y, pt)? - conn.apply(y, x, pt)? - complex_lie_bracket(x, y).eval(pt)?)
}

/// (∇_X A)Y = ∇_X(AY) − A(∇_X Y) for a complex endomorphism field.
pub fn complex_nabla_endo(
    conn: &ComplexConnection,
    a: &ComplexEndoField,
    x: &ComplexVectorField,
    y: &ComplexVectorField,
    pt: &[f64],
) -> Result<CVector, GeomError> {
    let ay = a.apply(y);
    Ok(conn.apply(x, &ay, pt)? - a.eval(pt)? * conn.apply(x, y, pt)?)
}

/// g^ℂ(u, v) = Σ g_ij u^i v^j at a point, complex-bilinear (not Hermitian).
pub fn complex_metric_at(
    g: &MetricField,
    u: &CVector,
    v: &CVector,
    pt: &[f64],
) -> Result<Complex64, GeomError> {
    let gm = g.eval(pt)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..gm.nrows() {
        for j in 0..gm.ncols() {
            acc += Complex64::new(gm[(i, j)], 0.0) * u[i] * v[j];
        }
    }
    Ok(acc)
}

/// g^ℂ(Y, Z) as a complex scalar expression.
pub fn complex_metric_expr(
    g: &MetricField,
    y: &ComplexVectorField,
    z: &ComplexVectorField,
) -> ComplexExpr {
    // g(Yr,Zr) − g(Yi,Zi) + i(g(Yr,Zi) + g(Yi,Zr))
    ComplexExpr {
        re: g.pairing(&y.re, &z.re).sub(&g.pairing(&y.im, &z.im)),
        im: g.pairing(&y.re, &z.im).add(&g.pairing(&y.im, &z.re)),
    }
}

/// (∇^ℂ_X g^ℂ)(Y,Z) = X(g^ℂ(Y,Z)) − g^ℂ(∇_X Y, Z) − g^ℂ(Y, ∇_X Z).
pub fn complex_nabla_metric(
    conn: &ComplexConnection,
    g: &MetricField,
    x: &ComplexVectorField,
    y: &ComplexVectorField,
    z: &ComplexVectorField,
    pt: &[f64],
) -> Result<Complex64, GeomError> {
    let gyz = complex_metric_expr(g, y, z);
    let xg = x.derive(&gyz).eval(pt)?;
    let ny = conn.apply(x, y, pt)?;
    let nz = conn.apply(x, z, pt)?;
    let yv = y.eval(pt)?;
    let zv = z.eval(pt)?;
    Ok(xg - complex_metric_at(g, &ny, &zv, pt)? - complex_metric_at(g, &yv, &nz, pt)?)
}

/// The record produced by the complexification of (g, J) applied to a pair
/// of complexified fields.
#[derive(Debug, Clone)]
pub struct Complexification {
    /// J^ℂ(X₁ + iY₁) at the point
    pub j_action: CVector,
    /// g^ℂ(X₁+iY₁, X₂+iY₂) at the point
    pub metric_value: Complex64,
}

/// J^ℂ(X+iY) := JX + iJY and the complex-bilinear g^ℂ, evaluated at a
/// point.
pub fn complexify(
    g: &MetricField,
    j: &EndoField,
    x1: &VectorField,
    y1: &VectorField,
    x2: &VectorField,
    y2: &VectorField,
    pt: &[f64],
) -> Result<Complexification, GeomError> {
    let u = ComplexVectorField::new(x1.clone(), y1.clone());
    let v = ComplexVectorField::new(x2.clone(), y2.clone());
    let jc = ComplexEndoField::from_real(j.clone());
    Ok(Complexification {
        j_action: jc.apply(&u).eval(pt)?,
        metric_value: complex_metric_expr(g, &u, &v).eval(pt)?,
    })
}

/// Complex projectors P^ℂ = (−J^ℂ + σ^ℂ₊ I)/√(p²+4q),
/// P^ℂ′ = (J^ℂ − σ^ℂ₋ I)/√(p²+4q) with the principal branch
/// √(p²+4q) = i√(−p²−4q). P^ℂ′ is the entrywise conjugate of P^ℂ.
pub fn complex_projector_fields(
    j: &EndoField,
    params: MetallicParams,
) -> Result<(ComplexEndoField, ComplexEndoField), GeomError> {
    let d = params.require_negative_disc()?;
    let sqrt_disc = Complex64::new(0.0, (-d).sqrt());
    let (sp, sm) = params.sigma_complex()?;
    let n = j.dim();
    // P = a·J + b·I with a = −1/√disc, b = σ₊/√disc
    let a = -Complex64::new(1.0, 0.0) / sqrt_disc;
    let b = sp / sqrt_disc;
    let a2 = Complex64::new(1.0, 0.0) / sqrt_disc;
    let b2 = -sm / sqrt_disc;
    let build = |ca: Complex64, cb: Complex64| {
        let re = j.scale_const(ca.re).add(&EndoField::identity(n).scale_const(cb.re));
        let im = j.scale_const(ca.im).add(&EndoField::identity(n).scale_const(cb.im));
        ComplexEndoField { re, im }
    };
    Ok((build(a, b), build(a2, b2)))
}

/// Pointwise complex projector pair.
#[derive(Debug, Clone)]
pub struct ComplexProjectorPair {
    pub p: CMatrix,
    pub p_prime: CMatrix,
}

pub fn complex_projectors(
    j: &EndoField,
    params: MetallicParams,
    pt: &[f64],
) -> Result<ComplexProjectorPair, GeomError> {
    let (pf, ppf) = complex_projector_fields(j, params)?;
    Ok(ComplexProjectorPair {
        p: pf.eval(pt)?,
        p_prime: ppf.eval(pt)?,
    })
}

/// The Norden structure J_c = −(2J − pI)/√(−p²−4q); real, J_c² = −I,
/// g-symmetric whenever J is.
pub fn norden_jc(j: &EndoField, params: MetallicParams) -> Result<EndoField, GeomError> {
    let d = params.require_negative_disc()?;
    let n = j.dim();
    Ok(EndoField::identity(n)
        .scale_const(params.p)
        .sub(&j.scale_const(2.0))
        .scale_const(1.0 / (-d).sqrt()))
}

/// N_{J^ℂ}(X,Y) through the complexified brackets, as a complex field pair
/// evaluated at a point.
pub fn complex_nijenhuis(
    j: &EndoField,
    x: &ComplexVectorField,
    y: &ComplexVectorField,
    pt: &[f64],
) -> Result<CVector, GeomError> {
    let jc = ComplexEndoField::from_real(j.clone());
    let jx = jc.apply(x);
    let jy = jc.apply(y);
    let bracket_j = complex_lie_bracket(&jx, y)
        .add(&complex_lie_bracket(x, &jy))
        .sub(&jc.apply(&complex_lie_bracket(x, y)));
    Ok(jc.apply(&bracket_j).eval(pt)? - complex_lie_bracket(&jx, &jy).eval(pt)?)
}

/// The three adapted complex connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexConnectionKind {
    SchoutenVanKampen,
    Vranceanu,
    Vidal,
}

/// Build the chosen adapted complex connection over the complexified
/// Levi-Civita connection of g. Each parallelizes J^ℂ; the Vidal torsion is
/// N_{J^ℂ}/(p²+4q).
pub fn complex_connection(
    kind: ComplexConnectionKind,
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
) -> Result<ComplexConnection, GeomError> {
    params.require_negative_disc()?;
    let lc = ComplexConnection::complexify(&Connection::levi_civita(g));
    let (pf, ppf) = complex_projector_fields(j, params)?;
    let n = j.dim();
    let svk_rule = {
        let lc = lc.clone();
        let pf = pf.clone();
        let ppf = ppf.clone();
        move |x: &ComplexVectorField, y: &ComplexVectorField, pt: &[f64]| {
            let py = pf.apply(y);
            let ppy = ppf.apply(y);
            let pm = pf.eval(pt)?;
            let ppm = ppf.eval(pt)?;
            Ok(pm * lc.apply(x, &py, pt)? + ppm * lc.apply(x, &ppy, pt)?)
        }
    };
    match kind {
        ComplexConnectionKind::SchoutenVanKampen => Ok(ComplexConnection::from_rule(
            n,
            "complex schouten-van-kampen",
            svk_rule,
        )),
        ComplexConnectionKind::Vranceanu => {
            let svk = ComplexConnection::from_rule(n, "complex svk base", svk_rule);
            Ok(ComplexConnection::from_rule(
                n,
                "complex vranceanu",
                move |x, y, pt| {
                    let px = pf.apply(x);
                    let ppx = ppf.apply(x);
                    let py = pf.apply(y);
                    let ppy = ppf.apply(y);
                    let pm = pf.eval(pt)?;
                    let ppm = ppf.eval(pt)?;
                    let base = svk.apply(&px, y, pt)?;
                    let b1 = complex_lie_bracket(&ppx, &py).eval(pt)?;
                    let b2 = complex_lie_bracket(&px, &ppy).eval(pt)?;
                    Ok(base + pm * b1 + ppm * b2)
                },
            ))
        }
        ComplexConnectionKind::Vidal => {
            let d = params.disc();
            let jc = ComplexEndoField::from_real(j.clone());
            Ok(ComplexConnection::from_rule(
                n,
                "complex vidal",
                move |x, y, pt| {
                    let jm = jc.eval(pt)?;
                    let jy = jc.apply(y);
                    let base = lc.apply(x, y, pt)?;
                    let nx_j_y = complex_nabla_endo(&lc, &jc, x, y, pt)?;
                    let ny_j_x = complex_nabla_endo(&lc, &jc, y, x, pt)?;
                    let njy_j_x = complex_nabla_endo(&lc, &jc, &jy, x, pt)?;
                    let p = Complex64::new(params.p, 0.0);
                    let correction = &jm * &nx_j_y * Complex64::new(2.0, 0.0) - &nx_j_y * p
                        + &jm * &ny_j_x
                        + njy_j_x
                        - ny_j_x * p;
                    Ok(base + correction / Complex64::new(d, 0.0))
                },
            ))
        }
    }
}

/// Integrability and geodesic invariance of the complex metallic
/// distributions, with the real N_J / M_J norms they are equivalent to.
#[derive(Debug, Clone)]
pub struct ComplexInvarianceReport {
    /// max ‖P^ℂ′([P^ℂ∂_a, P^ℂ∂_b]^ℂ)‖ over samples (and the conjugate side)
    pub frobenius_defect: f64,
    pub frobenius_defect_conj: f64,
    /// max ‖P^ℂ′({P^ℂ∂_a, P^ℂ∂_b}^ℂ)‖ over samples
    pub geodesic_defect: f64,
    pub geodesic_defect_conj: f64,
    pub nijenhuis_norm: f64,
    pub jordan_norm: f64,
    pub integrable: bool,
    pub geodesically_invariant: bool,
    /// the paper's equivalences, observed on this sample set
    pub integrability_matches_nijenhuis: bool,
    pub geodesic_matches_jordan: bool,
    pub samples: usize,
}

pub fn complex_invariance_report(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    samples: &[Vec<f64>],
) -> Result<ComplexInvarianceReport, GeomError> {
    use crate::adapted::VERDICT_TOLERANCE;
    use crate::connection::christoffel_exprs;
    use crate::metallic::{jordan_tensor_field, nijenhuis_field};
    params.require_negative_disc()?;
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let n = j.dim();
    let (pf, ppf) = complex_projector_fields(j, params)?;
    let lc = ComplexConnection::complexify(&Connection::levi_civita(g));
    let gamma = christoffel_exprs(g);
    let mut frob = 0.0f64;
    let mut frob_conj = 0.0f64;
    let mut geo = 0.0f64;
    let mut geo_conj = 0.0f64;
    let mut nj_norm = 0.0f64;
    let mut mj_norm = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let x = ComplexVectorField::coordinate(n, a);
            let y = ComplexVectorField::coordinate(n, b);
            let px = pf.apply(&x);
            let py = pf.apply(&y);
            let ppx = ppf.apply(&x);
            let ppy = ppf.apply(&y);
            let br = complex_lie_bracket(&px, &py);
            let br_conj = complex_lie_bracket(&ppx, &ppy);
            let xr = VectorField::coordinate(n, a);
            let yr = VectorField::coordinate(n, b);
            let nj = nijenhuis_field(j, &xr, &yr);
            let mj = jordan_tensor_field(&gamma, j, &xr, &yr);
            for pt in samples {
                let ppm = ppf.eval(pt)?;
                let pm = pf.eval(pt)?;
                frob = frob.max((&ppm * br.eval(pt)?).norm());
                frob_conj = frob_conj.max((&pm * br_conj.eval(pt)?).norm());
                // Jordan bracket {A,B}^ℂ = ∇^ℂ_A B + ∇^ℂ_B A
                let jb = lc.apply(&px, &py, pt)? + lc.apply(&py, &px, pt)?;
                geo = geo.max((&ppm * jb).norm());
                let jb_conj = lc.apply(&ppx, &ppy, pt)? + lc.apply(&ppy, &ppx, pt)?;
                geo_conj = geo_conj.max((&pm * jb_conj).norm());
                nj_norm = nj_norm.max(nj.eval(pt)?.norm());
                mj_norm = mj_norm.max(mj.eval(pt)?.norm());
            }
        }
    }
    let integrable = frob < VERDICT_TOLERANCE && frob_conj < VERDICT_TOLERANCE;
    let geodesically_invariant = geo < VERDICT_TOLERANCE && geo_conj < VERDICT_TOLERANCE;
    Ok(ComplexInvarianceReport {
        frobenius_defect: frob,
        frobenius_defect_conj: frob_conj,
        geodesic_defect: geo,
        geodesic_defect_conj: geo_conj,
        nijenhuis_norm: nj_norm,
        jordan_norm: mj_norm,
        integrable,
        geodesically_invariant,
        integrability_matches_nijenhuis: integrable == (nj_norm < VERDICT_TOLERANCE),
        geodesic_matches_jordan: geodesically_invariant == (mj_norm < VERDICT_TOLERANCE),
        samples: samples.len(),
    })
}

/// The eigenvalue of J_c on a complex distribution frame at a point: the
/// measured λ with J_c v = λ v and the residual. With the principal branch
/// σ^ℂ₊ = (p+i√(−disc))/2, J_c acts as −i on D^ℂ′ and +i on D^ℂ, i.e.
/// D^ℂ = T^{(1,0)}(J_c).
pub fn jc_eigenvalue_on(
    j: &EndoField,
    params: MetallicParams,
    prime_side: bool,
    pt: &[f64],
) -> Result<(Complex64, f64), GeomError> {
    let (pf, ppf) = complex_projector_fields(j, params)?;
    let proj = if prime_side { &ppf } else { &pf };
    let pm = proj.eval(pt)?;
    // a nonzero column spans part of the distribution
    let mut col = None;
    for c in 0..pm.ncols() {
        if pm.column(c).norm() > 1e-8 {
            col = Some(pm.column(c).clone_owned());
            break;
        }
    }
    let v = col.ok_or(GeomError::RankDeficient {
        context: "trivial complex distribution".into(),
    })?;
    let jc = norden_jc(j, params)?.eval(pt)?;
    let jc_c = CMatrix::from_fn(jc.nrows(), jc.ncols(), |i, jx| {
        Complex64::new(jc[(i, jx)], 0.0)
    });
    let w = jc_c * &v;
    // least-squares λ = ⟨v,w⟩/⟨v,v⟩ with the Hermitian product
    let lambda = v.dotc(&w) / v.dotc(&v);
    let residual = (w - &v * lambda).norm();
    Ok((lambda, residual))
}
