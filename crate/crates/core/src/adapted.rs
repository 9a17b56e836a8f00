//! Connections adapted to the metallic decomposition TM = D ⊕ D′: the
//! general S-parameterized family, Schouten-van Kampen, Vrănceanu, Vidal and
//! the product conjugate connection, together with restriction predicates,
//! the Vidal metricity diagnostics and the O'Neill-Gray / Kirichenko
//! tensors.

use crate::connection::{nabla_endo, Connection};
use crate::error::GeomError;
use crate::fields::{EndoField, MetricField, VectorField};
use crate::metallic::{projector_fields, MetallicParams};
use nalgebra::DVector;
use std::sync::Arc;

/// A (1,2)-tensor field given as a pointwise rule; used to parameterize the
/// adapted family. Function-bilinearity in both slots is the caller's
/// contract (exercised by tests).
#[derive(Clone)]
pub struct STensor {
    rule: Arc<
        dyn Fn(&VectorField, &VectorField, &[f64]) -> Result<DVector<f64>, GeomError>
            + Send
            + Sync,
    >,
}

impl STensor {
    pub fn new(
        rule: impl Fn(&VectorField, &VectorField, &[f64]) -> Result<DVector<f64>, GeomError>
            + Send
            + Sync
            + 'static,
    ) -> STensor {
        STensor {
            rule: Arc::new(rule),
        }
    }

    pub fn zero(n: usize) -> STensor {
        STensor::new(move |_, _, _| Ok(DVector::zeros(n)))
    }

    pub fn apply(
        &self,
        x: &VectorField,
        y: &VectorField,
        pt: &[f64],
    ) -> Result<DVector<f64>, GeomError> {
        (self.rule)(x, y, pt)
    }
}

/// The general adapted connection
/// ∇*_X Y = P(∇_X PY) + P′(∇_X P′Y) + P(S(X,PY)) + P′(S(X,P′Y)).
/// Parallelizes J for every ∇ and S.
pub fn adapted_general(
    conn: &Connection,
    s: &STensor,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    params.require_positive_disc()?;
    let (pf, ppf) = projector_fields(j, params)?;
    let conn = conn.clone();
    let s = s.clone();
    let n = j.dim();
    Ok(Connection::from_rule(n, "adapted-general", move |x, y, pt| {
        let py = pf.apply(y);
        let ppy = ppf.apply(y);
        let pm = pf.eval(pt)?;
        let ppm = ppf.eval(pt)?;
        let a = conn.apply(x, &py, pt)?;
        let b = conn.apply(x, &ppy, pt)?;
        let sa = s.apply(x, &py, pt)?;
        let sb = s.apply(x, &ppy, pt)?;
        Ok(&pm * (a + sa) + &ppm * (b + sb))
    }))
}

/// Schouten-van Kampen connection of an arbitrary base connection:
/// ∇̃_X Y = P(∇_X PY) + P′(∇_X P′Y).
pub fn schouten_van_kampen_of(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    params.require_positive_disc()?;
    let (pf, ppf) = projector_fields(j, params)?;
    let conn = conn.clone();
    let n = j.dim();
    Ok(Connection::from_rule(n, "schouten-van-kampen", move |x, y, pt| {
        let py = pf.apply(y);
        let ppy = ppf.apply(y);
        let pm = pf.eval(pt)?;
        let ppm = ppf.eval(pt)?;
        Ok(&pm * conn.apply(x, &py, pt)? + &ppm * conn.apply(x, &ppy, pt)?)
    }))
}

/// Schouten-van Kampen connection over the Levi-Civita connection of `g`
/// (the metallic natural connection). Metric and J-parallel; tests pin both
/// and the agreement with [`svk_closed_form`].
pub fn schouten_van_kampen(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    schouten_van_kampen_of(&Connection::levi_civita(g), j, params)
}

/// The closed form of the Schouten-van Kampen connection for a torsion-free
/// base:
/// ∇̃_X Y = (1/(p²+4q)) [(2J−pI)(∇_X JY) − (pJ−(p²+2q)I)(∇_X Y)].
pub fn svk_closed_form(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let d = params.require_positive_disc()?;
    let n = j.dim();
    let jy = j.apply(y);
    let njy = conn.apply(x, &jy, pt)?;
    let ny = conn.apply(x, y, pt)?;
    let jm = j.eval(pt)?;
    let eye = nalgebra::DMatrix::<f64>::identity(n, n);
    let a = (&jm * 2.0 - &eye * params.p) * njy;
    let b = (&jm * params.p - &eye * (params.p * params.p + 2.0 * params.q)) * ny;
    Ok((a - b) / d)
}

/// The printed torsion of the Schouten-van Kampen connection over a
/// torsion-free base:
/// T(X,Y) = (1/(p²+4q)) [(2J−pI)(∇_X JY − ∇_Y JX) − (pJ+2qI)(∇_X Y − ∇_Y X)].
pub fn svk_torsion_formula(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let d = params.require_positive_disc()?;
    let n = j.dim();
    let jy = j.apply(y);
    let jx = j.apply(x);
    let term1 = conn.apply(x, &jy, pt)? - conn.apply(y, &jx, pt)?;
    let term2 = conn.apply(x, y, pt)? - conn.apply(y, x, pt)?;
    let jm = j.eval(pt)?;
    let eye = nalgebra::DMatrix::<f64>::identity(n, n);
    let a = (&jm * 2.0 - &eye * params.p) * term1;
    let b = (&jm * params.p + &eye * (2.0 * params.q)) * term2;
    Ok((a - b) / d)
}

/// Vrănceanu connection of a base connection:
/// ∇̄_X Y = ∇̃_{PX} Y + P([P′X, PY]) + P′([PX, P′Y]),
/// with ∇̃ the Schouten-van Kampen connection of the same base.
pub fn vranceanu(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    let svk = schouten_van_kampen_of(conn, j, params)?;
    let (pf, ppf) = projector_fields(j, params)?;
    let n = j.dim();
    Ok(Connection::from_rule(n, "vranceanu", move |x, y, pt| {
        use crate::connection::lie_bracket;
        let px = pf.apply(x);
        let ppx = ppf.apply(x);
        let py = pf.apply(y);
        let ppy = ppf.apply(y);
        let pm = pf.eval(pt)?;
        let ppm = ppf.eval(pt)?;
        let base = svk.apply(&px, y, pt)?;
        let b1 = lie_bracket(&ppx, &py).eval(pt)?;
        let b2 = lie_bracket(&px, &ppy).eval(pt)?;
        Ok(base + &pm * b1 + &ppm * b2)
    }))
}

/// The printed Vrănceanu torsion for a base connection with torsion T^∇:
/// T(X,Y) = N_J/(p²+4q) + P′(T^∇(P′X,P′Y)) − P(T^∇(PX,PY)).
pub fn vranceanu_torsion_formula(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    use crate::connection::torsion;
    use crate::metallic::nijenhuis_field;
    let d = params.require_positive_disc()?;
    let (pf, ppf) = projector_fields(j, params)?;
    let nj = nijenhuis_field(j, x, y).eval(pt)?;
    let px = pf.apply(x);
    let py = pf.apply(y);
    let ppx = ppf.apply(x);
    let ppy = ppf.apply(y);
    let pm = pf.eval(pt)?;
    let ppm = ppf.eval(pt)?;
    let t_pp = torsion(conn, &ppx, &ppy, pt)?;
    let t_p = torsion(conn, &px, &py, pt)?;
    Ok(nj / d + &ppm * t_pp - &pm * t_p)
}

/// Vidal connection of (g, J) over the Levi-Civita connection:
/// ∇̃̃_X Y = ∇_X Y + (1/(p²+4q)) [2J((∇_X J)Y) − p(∇_X J)Y + J((∇_Y J)X)
///            + (∇_{JY} J)X − p(∇_Y J)X].
pub fn vidal(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    let d = params.require_positive_disc()?;
    let lc = Connection::levi_civita(g);
    let j = j.clone();
    let n = j.dim();
    Ok(Connection::from_rule(n, "vidal", move |x, y, pt| {
        let jm = j.eval(pt)?;
        let jy = j.apply(y);
        let base = lc.apply(x, y, pt)?;
        let nx_j_y = nabla_endo(&lc, &j, x, y, pt)?;
        let ny_j_x = nabla_endo(&lc, &j, y, x, pt)?;
        let njy_j_x = nabla_endo(&lc, &j, &jy, x, pt)?;
        let correction = &jm * &nx_j_y * 2.0 - &nx_j_y * params.p + &jm * &ny_j_x + njy_j_x
            - ny_j_x * params.p;
        Ok(base + correction / d)
    }))
}

/// Direct metricity defect and the two closed forms the paper prints for
/// the Vidal connection.
#[derive(Debug, Clone, Copy)]
pub struct VidalMetricity {
    /// (∇̃̃_X g)(Y,Z) computed from the definition
    pub direct: f64,
    /// −(1/(p²+4q))[g((∇_{JY}J)X−(∇_YJ)JX, Z) + g((∇_{JZ}J)X−(∇_ZJ)JX, Y)]
    pub nabla_form: f64,
    /// the printed M_J-form:
    /// (1/(p²+4q))[g(M_J(Y,X),Z) + g(M_J(Z,X),Y)
    ///   + g((∇_{JX}J)Y+(∇_YJ)JX, Z) + g((∇_{JX}J)Z+(∇_ZJ)JX, Y)]
    pub jordan_form: f64,
}

/// Evaluate the Vidal metricity defect along with both printed closed forms.
pub fn vidal_metricity_defect(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    pt: &[f64],
) -> Result<VidalMetricity, GeomError> {
    use crate::connection::{christoffel_exprs, nabla_metric};
    use crate::metallic::jordan_tensor_field;
    let d = params.require_positive_disc()?;
    let vid = vidal(g, j, params)?;
    let direct = nabla_metric(&vid, g, x, y, z, pt)?;

    let lc = Connection::levi_civita(g);
    let gm = g.eval(pt)?;
    let pair = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &gm * v)[(0, 0)];
    let jm = j.eval(pt)?;
    let jx_f = j.apply(x);
    let jy_f = j.apply(y);
    let jz_f = j.apply(z);

    let njy_j_x = nabla_endo(&lc, j, &jy_f, x, pt)?;
    let ny_j_jx = {
        let v = nabla_endo(&lc, j, y, x, pt)?;
        &jm * v
    };
    // (∇_Y J)(JX) is ∇ of J in direction Y applied to the field JX
    let ny_j_applied_jx = nabla_endo(&lc, j, y, &jx_f, pt)?;
    let _ = ny_j_jx;
    let njz_j_x = nabla_endo(&lc, j, &jz_f, x, pt)?;
    let nz_j_applied_jx = nabla_endo(&lc, j, z, &jx_f, pt)?;
    let yv = y.eval(pt)?;
    let zv = z.eval(pt)?;
    let nabla_form = -(pair(&(njy_j_x - &ny_j_applied_jx), &zv)
        + pair(&(njz_j_x - &nz_j_applied_jx), &yv))
        / d;

    let gamma = christoffel_exprs(g);
    let mj_yx = jordan_tensor_field(&gamma, j, y, x).eval(pt)?;
    let mj_zx = jordan_tensor_field(&gamma, j, z, x).eval(pt)?;
    let njx_j_y = nabla_endo(&lc, j, &jx_f, y, pt)?;
    let njx_j_z = nabla_endo(&lc, j, &jx_f, z, pt)?;
    let jordan_form = (pair(&mj_yx, &zv)
        + pair(&mj_zx, &yv)
        + pair(&(njx_j_y + &ny_j_applied_jx), &zv)
        + pair(&(njx_j_z + &nz_j_applied_jx), &yv))
        / d;

    Ok(VidalMetricity {
        direct,
        nabla_form,
        jordan_form,
    })
}

/// Product conjugate connection of a base connection:
/// ∇^{(J_p)}_X Y = P(∇_X PY) − P(∇_X P′Y) − P′(∇_X PY) + P′(∇_X P′Y).
/// Restricts to both D and D′; equals ∇ when ∇ already restricts to both.
pub fn product_conjugate(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
) -> Result<Connection, GeomError> {
    params.require_positive_disc()?;
    let (pf, ppf) = projector_fields(j, params)?;
    let conn = conn.clone();
    let n = j.dim();
    Ok(Connection::from_rule(n, "product-conjugate", move |x, y, pt| {
        let py = pf.apply(y);
        let ppy = ppf.apply(y);
        let pm = pf.eval(pt)?;
        let ppm = ppf.eval(pt)?;
        let npy = conn.apply(x, &py, pt)?;
        let nppy = conn.apply(x, &ppy, pt)?;
        Ok(&pm * &npy - &pm * &nppy - &ppm * &npy + &ppm * &nppy)
    }))
}

/// Which metallic distribution a predicate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistSide {
    D,
    DPrime,
}

/// Outcome of the restriction predicate for a connection against one of the
/// metallic distributions.
#[derive(Debug, Clone, Copy)]
pub struct RestrictionReport {
    pub restricts: bool,
    pub max_defect: f64,
}

/// Default verdict tolerance on max defects over a sample set.
pub const VERDICT_TOLERANCE: f64 = 1e-7;

/// Whether ∇ restricts to the chosen distribution: for every coordinate
/// direction X and projected frame field PY, ‖P′(∇_X PY)‖ must vanish
/// (P(∇_X P′Y) on the D′ side), maximized over the samples.
pub fn restricts_to(
    conn: &Connection,
    j: &EndoField,
    params: MetallicParams,
    side: DistSide,
    samples: &[Vec<f64>],
) -> Result<RestrictionReport, GeomError> {
    let (pf, ppf) = projector_fields(j, params)?;
    let n = j.dim();
    let (inner, outer) = match side {
        DistSide::D => (&pf, &ppf),
        DistSide::DPrime => (&ppf, &pf),
    };
    let mut max_defect = 0.0f64;
    for pt in samples {
        let om = outer.eval(pt)?;
        for xi in 0..n {
            let x = VectorField::coordinate(n, xi);
            for yi in 0..n {
                let py = inner.column(yi);
                let v = conn.apply(&x, &py, pt)?;
                max_defect = max_defect.max((&om * v).norm());
            }
        }
    }
    Ok(RestrictionReport {
        restricts: max_defect < VERDICT_TOLERANCE,
        max_defect,
    })
}

/// The O'Neill-Gray fundamental tensors T, A and the Kirichenko structural
/// and virtual tensors C, B of the decomposition, at a point.
#[derive(Debug, Clone)]
pub struct ONeillGrayKirichenko {
    pub t: DVector<f64>,
    pub a: DVector<f64>,
    pub c: DVector<f64>,
    pub b: DVector<f64>,
}

/// T(X,Y) = P(∇_{P′X}P′Y) + P′(∇_{P′X}PY), A(X,Y) = P′(∇_{PX}PY) + P(∇_{PX}P′Y),
/// C = 2[P(∇_{P′X}P′Y) + P′(∇_{PX}PY)], B = −2[P(∇_{PX}P′Y) + P′(∇_{P′X}PY)],
/// evaluated with the Levi-Civita connection of g.
pub fn oneill_gray_kirichenko(
    g: &MetricField,
    j: &EndoField,
    params: MetallicParams,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<ONeillGrayKirichenko, GeomError> {
    params.require_positive_disc()?;
    let lc = Connection::levi_civita(g);
    let (pf, ppf) = projector_fields(j, params)?;
    let px = pf.apply(x);
    let ppx = ppf.apply(x);
    let py = pf.apply(y);
    let ppy = ppf.apply(y);
    let pm = pf.eval(pt)?;
    let ppm = ppf.eval(pt)?;
    let n_ppx_ppy = lc.apply(&ppx, &ppy, pt)?;
    let n_ppx_py = lc.apply(&ppx, &py, pt)?;
    let n_px_py = lc.apply(&px, &py, pt)?;
    let n_px_ppy = lc.apply(&px, &ppy, pt)?;
    Ok(ONeillGrayKirichenko {
        t: &pm * &n_ppx_ppy + &ppm * &n_ppx_py,
        a: &ppm * &n_px_py + &pm * &n_px_ppy,
        c: (&pm * &n_ppx_ppy + &ppm * &n_px_py) * 2.0,
        b: (&pm * &n_px_ppy + &ppm * &n_ppx_py) * -2.0,
    })
}
