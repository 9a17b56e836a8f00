//! Connections as covariant-derivative operators, plus the ∇-layer ops:
//! Christoffel symbols, Lie bracket, torsion, covariant derivatives of
//! endomorphisms and metrics, and the Riemann curvature.
//!
//! A [`Connection`] is an opaque rule (X, Y, pt) ↦ (∇_X Y)(pt) acting on
//! expression fields. Derived connections (Schouten-van Kampen, Vidal, ...)
//! are built by composing such rules with projector fields; see `adapted`.

use crate::error::GeomError;
use crate::expr::ScalarExpr;
use crate::fields::{EndoField, MetricField, VectorField};
use nalgebra::DVector;
use std::sync::Arc;

/// Rank-3 array of expressions indexed as Γ^k_{ij} → `data[(k*n + i)*n + j]`.
#[derive(Debug, Clone)]
pub struct ChristoffelExprs {
    pub n: usize,
    data: Vec<ScalarExpr>,
}

impl ChristoffelExprs {
    pub fn zeros(n: usize) -> ChristoffelExprs {
        ChristoffelExprs {
            n,
            data: vec![ScalarExpr::zero(); n * n * n],
        }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &ScalarExpr {
        &self.data[(k * self.n + i) * self.n + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, e: ScalarExpr) {
        self.data[(k * self.n + i) * self.n + j] = e;
    }

    pub fn eval(&self, pt: &[f64]) -> Result<Vec<f64>, GeomError> {
        self.data
            .iter()
            .map(|e| e.eval(pt).map_err(GeomError::from))
            .collect()
    }
}

/// Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}), symbolically.
pub fn christoffel_exprs(g: &MetricField) -> ChristoffelExprs {
    let n = g.dim();
    let ginv = g.inverse_exprs();
    let mut out = ChristoffelExprs::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..=i {
                let mut acc = ScalarExpr::zero();
                for l in 0..n {
                    let term = g
                        .entry(j, l)
                        .diff(i)
                        .add(&g.entry(i, l).diff(j))
                        .sub(&g.entry(i, j).diff(l));
                    acc = acc.add(&ginv[k][l].mul(&term));
                }
                let gamma = ScalarExpr::constant(0.5).mul(&acc).simplify();
                out.set(k, i, j, gamma.clone());
                if i != j {
                    out.set(k, j, i, gamma);
                }
            }
        }
    }
    out
}

/// Numeric Christoffel symbols at a point, indexed `[k][i][j]`.
pub fn christoffel(g: &MetricField, pt: &[f64]) -> Result<Vec<Vec<Vec<f64>>>, GeomError> {
    g.check_nondegenerate(pt)?;
    let n = g.dim();
    let exprs = christoffel_exprs(g);
    let flat = exprs.eval(pt)?;
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[k][i][j] = flat[(k * n + i) * n + j];
            }
        }
    }
    Ok(out)
}

/// Lie bracket [X, Y]^k = Σ_i (X^i ∂_i Y^k − Y^i ∂_i X^k) as an expression
/// field.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    assert_eq!(x.dim(), y.dim(), "lie_bracket: dimension mismatch");
    let n = x.dim();
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = ScalarExpr::zero();
        for i in 0..n {
            acc = acc.add(&x.component(i).mul(&y.component(k).diff(i)));
            acc = acc.sub(&y.component(i).mul(&x.component(k).diff(i)));
        }
        comps.push(acc);
    }
    VectorField::new(comps)
}

type Rule = dyn Fn(&VectorField, &VectorField, &[f64]) -> Result<DVector<f64>, GeomError>
    + Send
    + Sync;

/// A linear connection as an operator on expression fields. Cloning shares
/// the underlying rule.
#[derive(Clone)]
pub struct Connection {
    dim: usize,
    descriptor: String,
    rule: Arc<Rule>,
}

impl std::fmt::Debug for Connection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Connection({}, dim {})", self.descriptor, self.dim)
    }
}

impl Connection {
    pub fn from_rule(
        dim: usize,
        descriptor: impl Into<String>,
        rule: impl Fn(&VectorField, &VectorField, &[f64]) -> Result<DVector<f64>, GeomError>
            + Send
            + Sync
            + 'static,
    ) -> Connection {
        Connection {
            dim,
            descriptor: descriptor.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// (∇_X Y)(pt).
    pub fn apply(
        &self,
        x: &VectorField,
        y: &VectorField,
        pt: &[f64],
    ) -> Result<DVector<f64>, GeomError> {
        if x.dim() != self.dim || y.dim() != self.dim {
            return Err(GeomError::dim(format!(
                "connection on dim {} applied to fields of dim {}, {}",
                self.dim,
                x.dim(),
                y.dim()
            )));
        }
        (self.rule)(x, y, pt)
    }

    /// Connection from coefficient expressions:
    /// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j.
    pub fn from_coefficients(gamma: ChristoffelExprs) -> Connection {
        let n = gamma.n;
        Connection::from_rule(n, "coefficients", move |x, y, pt| {
            let xv = x.eval(pt).map_err(GeomError::from)?;
            let yv = y.eval(pt).map_err(GeomError::from)?;
            let mut out = DVector::zeros(n);
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    if xv[i] != 0.0 {
                        acc += xv[i] * y.component(k).diff(i).eval(pt)?;
                    }
                    for j in 0..n {
                        let g = gamma.get(k, i, j);
                        if let Some(0.0) = g.as_const() {
                            continue;
                        }
                        acc += g.eval(pt)? * xv[i] * yv[j];
                    }
                }
                out[k] = acc;
            }
            Ok(out)
        })
    }

    /// The flat connection (all coefficients zero): plain directional
    /// derivative of the component functions.
    pub fn flat(n: usize) -> Connection {
        Connection::from_coefficients(ChristoffelExprs::zeros(n))
    }

    /// Levi-Civita connection of `g`; torsion-free and metric by
    /// construction, both properties are exercised in tests.
    pub fn levi_civita(g: &MetricField) -> Connection {
        let gamma = christoffel_exprs(g);
        let det = g.det_expr();
        let n = g.dim();
        let inner = Connection::from_coefficients(gamma);
        Connection::from_rule(n, "levi-civita", move |x, y, pt| {
            let d = det.eval(pt)?;
            if d.abs() < crate::fields::DEGENERACY_THRESHOLD {
                return Err(GeomError::DegenerateMetric {
                    point: pt.to_vec(),
                    det: d,
                });
            }
            inner.apply(x, y, pt)
        })
    }
}

/// Torsion T^∇(X,Y) = ∇_X Y − ∇_Y X − [X,Y] at a point.
pub fn torsion(
    conn: &Connection,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let a = conn.apply(x, y, pt)?;
    let b = conn.apply(y, x, pt)?;
    let br = lie_bracket(x, y).eval(pt)?;
    Ok(a - b - br)
}

/// (∇_X J) Y = ∇_X (J Y) − J (∇_X Y) at a point.
pub fn nabla_endo(
    conn: &Connection,
    j: &EndoField,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<DVector<f64>, GeomError> {
    let jy = j.apply(y);
    let a = conn.apply(x, &jy, pt)?;
    let b = conn.apply(x, y, pt)?;
    let jm = j.eval(pt)?;
    Ok(a - jm * b)
}

/// (∇_X g)(Y,Z) = X(g(Y,Z)) − g(∇_X Y, Z) − g(Y, ∇_X Z) at a point.
pub fn nabla_metric(
    conn: &Connection,
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    pt: &[f64],
) -> Result<f64, GeomError> {
    let gyz = g.pairing(y, z);
    let xg = x.derive_scalar(&gyz).eval(pt)?;
    let ny = conn.apply(x, y, pt)?;
    let nz = conn.apply(x, z, pt)?;
    let gm = g.eval(pt)?;
    let yv = y.eval(pt)?;
    let zv = z.eval(pt)?;
    Ok(xg - (ny.transpose() * &gm * &zv)[(0, 0)] - (yv.transpose() * &gm * &nz)[(0, 0)])
}

/// Riemann curvature R(X,Y,Z,W) = g(∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z, W)
/// of the Levi-Civita connection, evaluated through Christoffel-symbol
/// expressions:
/// R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}
/// contracted with X^i Y^j Z^k W^m g_{ml}.
pub fn riemann(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    w: &VectorField,
    pt: &[f64],
) -> Result<f64, GeomError> {
    let ev = RiemannEvaluator::new(g);
    ev.value(x, y, z, w, pt)
}

/// Precomputed symbolic data for repeated curvature evaluations.
pub struct RiemannEvaluator {
    g: MetricField,
    gamma: ChristoffelExprs,
    dgamma: Vec<ScalarExpr>, // ∂_i Γ^l_{jk} at ((l*n + j)*n + k)*n + i
}

impl RiemannEvaluator {
    pub fn new(g: &MetricField) -> RiemannEvaluator {
        let n = g.dim();
        let gamma = christoffel_exprs(g);
        let mut dgamma = vec![ScalarExpr::zero(); n * n * n * n];
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for i in 0..n {
                        dgamma[((l * n + j) * n + k) * n + i] = gamma.get(l, j, k).diff(i);
                    }
                }
            }
        }
        RiemannEvaluator {
            g: g.clone(),
            gamma,
            dgamma,
        }
    }

    /// Lowered tensor components R_{ijkl} = g(R(∂_i,∂_j)∂_k, ∂_l) at a point,
    /// flattened as ((i*n + j)*n + k)*n + l.
    pub fn components(&self, pt: &[f64]) -> Result<Vec<f64>, GeomError> {
        self.g.check_nondegenerate(pt)?;
        let n = self.g.dim();
        let gm = self.g.eval(pt)?;
        let gam = self.gamma.eval(pt)?;
        let gam_at = |l: usize, i: usize, j: usize| gam[(l * n + i) * n + j];
        let mut dg = vec![0.0; self.dgamma.len()];
        for (slot, e) in self.dgamma.iter().enumerate() {
            dg[slot] = e.eval(pt)?;
        }
        let dg_at = |l: usize, j: usize, k: usize, i: usize| dg[((l * n + j) * n + k) * n + i];
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // upper-index components R^l_{ijk}
                    for l in 0..n {
                        let mut r = dg_at(l, j, k, i) - dg_at(l, i, k, j);
                        for m in 0..n {
                            r += gam_at(l, i, m) * gam_at(m, j, k)
                                - gam_at(l, j, m) * gam_at(m, i, k);
                        }
                        // lower with g_{ml}: accumulate into R_{ijk l'}
                        for lp in 0..n {
                            out[((i * n + j) * n + k) * n + lp] += gm[(lp, l)] * r;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn value(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        w: &VectorField,
        pt: &[f64],
    ) -> Result<f64, GeomError> {
        let n = self.g.dim();
        let comps = self.components(pt)?;
        let xv = x.eval(pt)?;
        let yv = y.eval(pt)?;
        let zv = z.eval(pt)?;
        let wv = w.eval(pt)?;
        let mut acc = 0.0;
        for i in 0..n {
            if xv[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if yv[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += comps[((i * n + j) * n + k) * n + l]
                            * xv[i]
                            * yv[j]
                            * zv[k]
                            * wv[l];
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Sectional curvature K(u, v) = R(u,v,v,u) / (g(u,u)g(v,v) − g(u,v)²).
pub fn sectional(
    g: &MetricField,
    x: &VectorField,
    y: &VectorField,
    pt: &[f64],
) -> Result<f64, GeomError> {
    let num = riemann(g, x, y, y, x, pt)?;
    let gm = g.eval(pt)?;
    let xv = x.eval(pt)?;
    let yv = y.eval(pt)?;
    let gxx = (xv.transpose() * &gm * &xv)[(0, 0)];
    let gyy = (yv.transpose() * &gm * &yv)[(0, 0)];
    let gxy = (xv.transpose() * &gm * &yv)[(0, 0)];
    let denom = gxx * gyy - gxy * gxy;
    if denom.abs() < 1e-14 {
        return Err(GeomError::RankDeficient {
            context: "sectional curvature of a degenerate plane".into(),
        });
    }
    Ok(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarExpr;

    fn pe(text: &str, n: usize) -> ScalarExpr {
        ScalarExpr::parse(text, n).unwrap()
    }

    #[test]
    fn christoffel_flat_metric_vanishes() {
        let g = MetricField::euclidean(2);
        let gam = christoffel(&g, &[0.3, -0.7]).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(gam[k][i][j], 0.0);
                }
            }
        }
        // indefinite constant metric is just as flat
        let g = MetricField::diagonal_consts(&[1.0, -1.0]);
        let gam = christoffel(&g, &[0.1, 0.2]).unwrap();
        assert!(gam.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn christoffel_polar_type_metric() {
        // g = diag(1, x1^2): Γ^1_{22} = −x1, Γ^2_{12} = 1/x1.
        let g = MetricField::from_rows(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), pe("x1^2", 2)],
        ]);
        let gam = christoffel(&g, &[2.0, 0.5]).unwrap();
        assert!((gam[0][1][1] - (-2.0)).abs() < 1e-12);
        assert!((gam[1][0][1] - 0.5).abs() < 1e-12);
        assert!((gam[1][1][0] - 0.5).abs() < 1e-12);

        // cross-check against 5-point finite differences of g
        let h = 1e-4;
        let pt = [2.0, 0.5];
        let ginv = [[1.0, 0.0], [0.0, 1.0 / 4.0]];
        let eval_g = |i: usize, j: usize, p: &[f64]| g.entry(i, j).eval(p).unwrap();
        let dg = |i: usize, j: usize, l: usize| {
            let f = |t: f64| {
                let mut q = pt;
                q[l] = t;
                eval_g(i, j, &q)
            };
            let x = pt[l];
            (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
        };
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for l in 0..2 {
                        acc += ginv[k][l] * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
                    }
                    assert!((gam[k][i][j] - 0.5 * acc).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn lie_bracket_examples() {
        let d1 = VectorField::coordinate(2, 0);
        let d2 = VectorField::coordinate(2, 1);
        let b = lie_bracket(&d1, &d2);
        assert_eq!(b.eval(&[0.4, 0.6]).unwrap().as_slice(), &[0.0, 0.0]);

        // [x1·∂2, ∂1] = −∂2
        let f = d2.scale(&pe("x1", 2));
        let b = lie_bracket(&f, &d1);
        assert_eq!(b.eval(&[1.3, -0.2]).unwrap().as_slice(), &[0.0, -1.0]);
    }

    #[test]
    fn levi_civita_flat_examples() {
        let g = MetricField::euclidean(2);
        let conn = Connection::levi_civita(&g);
        // ∇_{∂1}(x1·∂2) = ∂2 at any point
        let y = VectorField::coordinate(2, 1).scale(&pe("x1", 2));
        let v = conn
            .apply(&VectorField::coordinate(2, 0), &y, &[1.0, 1.0])
            .unwrap();
        assert_eq!(v.as_slice(), &[0.0, 1.0]);

        let g = MetricField::diagonal_consts(&[1.0, -1.0]);
        let conn = Connection::levi_civita(&g);
        let v = conn
            .apply(
                &VectorField::constant(&[0.3, 0.4]),
                &VectorField::constant(&[-1.0, 2.0]),
                &[0.0, 0.0],
            )
            .unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn coefficient_connection_torsion() {
        // Γ^1_{12} = 1, everything else zero: T(∂1, ∂2) = (1, 0).
        let mut gamma = ChristoffelExprs::zeros(2);
        gamma.set(0, 0, 1, ScalarExpr::one());
        let conn = Connection::from_coefficients(gamma);
        let t = torsion(
            &conn,
            &VectorField::coordinate(2, 0),
            &VectorField::coordinate(2, 1),
            &[0.5, 0.5],
        )
        .unwrap();
        assert_eq!(t.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn nabla_metric_hand_example() {
        // flat connection, g = diag(1, 1 + x1^2): (∇_{∂1} g)(∂2,∂2) = 2·x1.
        let conn = Connection::flat(2);
        let g = MetricField::from_rows(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), pe("1 + x1^2", 2)],
        ]);
        let d1 = VectorField::coordinate(2, 0);
        let d2 = VectorField::coordinate(2, 1);
        let v = nabla_metric(&conn, &g, &d1, &d2, &d2, &[0.8, 0.1]).unwrap();
        assert!((v - 1.6).abs() < 1e-13);
    }

    #[test]
    fn round_sphere_sectional_curvature() {
        // g = diag(1, sin(x1)^2): unit-sphere chart, K ≡ 1.
        let g = MetricField::from_rows(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), pe("sin(x1)^2", 2)],
        ]);
        let k = sectional(
            &g,
            &VectorField::coordinate(2, 0),
            &VectorField::coordinate(2, 1),
            &[1.0, 0.3],
        )
        .unwrap();
        assert!((k - 1.0).abs() < 1e-8, "K = {k}");
    }

    #[test]
    fn riemann_antisymmetry_and_flatness() {
        let g = MetricField::euclidean(3);
        let x = VectorField::new(vec![pe("x2", 3), pe("1", 3), pe("x1*x3", 3)]);
        let y = VectorField::new(vec![pe("0", 3), pe("x3", 3), pe("2", 3)]);
        let z = VectorField::coordinate(3, 2);
        let w = VectorField::coordinate(3, 0);
        let pt = [0.3, 0.8, -0.5];
        let v = riemann(&g, &x, &y, &z, &w, &pt).unwrap();
        assert!(v.abs() < 1e-12, "flat metric must be curvature-free");

        let g = MetricField::from_rows(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), pe("sin(x1)^2", 2)],
        ]);
        let a = VectorField::new(vec![pe("1", 2), pe("x2", 2)]);
        let b = VectorField::new(vec![pe("x1", 2), pe("2", 2)]);
        let pt = [1.1, 0.4];
        let r1 = riemann(&g, &a, &b, &b, &a, &pt).unwrap();
        let r2 = riemann(&g, &b, &a, &b, &a, &pt).unwrap();
        assert!((r1 + r2).abs() < 1e-9 * (1.0 + r1.abs()));
    }
}
