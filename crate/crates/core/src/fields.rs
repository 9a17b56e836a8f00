//! Charts and the expression-valued tensor fields living on them: vector
//! fields, endomorphism fields (1,1-tensors) and metrics. Components are
//! [`ScalarExpr`] trees, so all of these evaluate exactly and differentiate
//! symbolically.

use crate::error::{EvalError, GeomError};
use crate::expr::ScalarExpr;
use nalgebra::{DMatrix, DVector};

/// A single coordinate chart. Periodicity flags mark torus coordinates with
/// period 2π, used by the form-calculus integral pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub dim: usize,
    pub names: Vec<String>,
    pub periodic: Vec<bool>,
}

impl Chart {
    pub fn new(dim: usize) -> Chart {
        assert!(dim >= 1, "chart dimension must be positive");
        Chart {
            dim,
            names: (1..=dim).map(|i| format!("x{i}")).collect(),
            periodic: vec![false; dim],
        }
    }

    pub fn torus(dim: usize) -> Chart {
        Chart {
            periodic: vec![true; dim],
            ..Chart::new(dim)
        }
    }

    pub fn is_torus(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }
}

/// A vector field with expression components.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarExpr>) -> VectorField {
        VectorField { components }
    }

    /// The coordinate frame field ∂_i on an n-dimensional chart.
    pub fn coordinate(n: usize, i: usize) -> VectorField {
        let mut comps = vec![ScalarExpr::zero(); n];
        comps[i] = ScalarExpr::one();
        VectorField { components: comps }
    }

    pub fn zero(n: usize) -> VectorField {
        VectorField {
            components: vec![ScalarExpr::zero(); n],
        }
    }

    /// A field with the given constant components.
    pub fn constant(v: &[f64]) -> VectorField {
        VectorField {
            components: v.iter().copied().map(ScalarExpr::constant).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarExpr {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn eval(&self, pt: &[f64]) -> Result<DVector<f64>, EvalError> {
        let mut out = DVector::zeros(self.dim());
        for (i, c) in self.components.iter().enumerate() {
            out[i] = c.eval(pt)?;
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &ScalarExpr) -> VectorField {
        VectorField {
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }

    pub fn scale_const(&self, a: f64) -> VectorField {
        self.scale(&ScalarExpr::constant(a))
    }

    /// Constant-coefficient combination Σ c_k F_k of the given fields.
    pub fn linear_combination(fields: &[VectorField], coeffs: &[f64]) -> VectorField {
        assert_eq!(fields.len(), coeffs.len());
        let n = fields[0].dim();
        let mut acc = VectorField::zero(n);
        for (f, &c) in fields.iter().zip(coeffs) {
            acc = acc.add(&f.scale_const(c));
        }
        acc
    }

    /// Directional derivative X(f) of a scalar expression.
    pub fn derive_scalar(&self, f: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        for (i, xi) in self.components.iter().enumerate() {
            acc = acc.add(&xi.mul(&f.diff(i)));
        }
        acc
    }
}

/// Determinant of a square expression matrix by cofactor expansion.
/// Fine for the chart dimensions this crate targets (n ≤ 5 or so).
pub(crate) fn det_exprs(m: &[Vec<ScalarExpr>]) -> ScalarExpr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = ScalarExpr::zero();
    for j in 0..n {
        let minor: Vec<Vec<ScalarExpr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&det_exprs(&minor));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// Inverse of a square expression matrix via the adjugate.
pub(crate) fn inverse_exprs(m: &[Vec<ScalarExpr>]) -> Vec<Vec<ScalarExpr>> {
    let n = m.len();
    let det = det_exprs(m);
    if n == 1 {
        return vec![vec![ScalarExpr::one().div(&det)]];
    }
    let mut inv = vec![vec![ScalarExpr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // Cofactor C_{ji} / det  (note the transpose).
            let minor: Vec<Vec<ScalarExpr>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let mut cof = det_exprs(&minor);
            if (i + j) % 2 == 1 {
                cof = cof.neg();
            }
            inv[i][j] = cof.div(&det);
        }
    }
    inv
}

/// An endomorphism field (1,1-tensor); entry `[i][j]` is the component J^i_j
/// with `i` the output index.
#[derive(Debug, Clone)]
pub struct EndoField {
    entries: Vec<Vec<ScalarExpr>>,
}

impl EndoField {
    pub fn from_rows(entries: Vec<Vec<ScalarExpr>>) -> EndoField {
        let n = entries.len();
        assert!(entries.iter().all(|r| r.len() == n), "matrix must be square");
        EndoField { entries }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> ScalarExpr) -> EndoField {
        EndoField {
            entries: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect(),
        }
    }

    pub fn identity(n: usize) -> EndoField {
        EndoField::from_fn(n, |i, j| {
            if i == j {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        })
    }

    pub fn constant(m: &DMatrix<f64>) -> EndoField {
        EndoField::from_fn(m.nrows(), |i, j| ScalarExpr::constant(m[(i, j)]))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<ScalarExpr>] {
        &self.entries
    }

    pub fn eval(&self, pt: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.entries[i][j].eval(pt)?;
            }
        }
        Ok(out)
    }

    /// J X as an expression field.
    pub fn apply(&self, x: &VectorField) -> VectorField {
        let n = self.dim();
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = ScalarExpr::zero();
            for j in 0..n {
                acc = acc.add(&self.entries[i][j].mul(x.component(j)));
            }
            comps.push(acc);
        }
        VectorField::new(comps)
    }

    /// Column `j` as a vector field, i.e. J ∂_j.
    pub fn column(&self, j: usize) -> VectorField {
        VectorField::new((0..self.dim()).map(|i| self.entries[i][j].clone()).collect())
    }

    /// Matrix product self ∘ rhs as an expression field.
    pub fn compose(&self, rhs: &EndoField) -> EndoField {
        let n = self.dim();
        EndoField::from_fn(n, |i, j| {
            let mut acc = ScalarExpr::zero();
            for k in 0..n {
                acc = acc.add(&self.entries[i][k].mul(&rhs.entries[k][j]));
            }
            acc
        })
    }

    pub fn add(&self, rhs: &EndoField) -> EndoField {
        EndoField::from_fn(self.dim(), |i, j| &self.entries[i][j] + &rhs.entries[i][j])
    }

    pub fn sub(&self, rhs: &EndoField) -> EndoField {
        EndoField::from_fn(self.dim(), |i, j| &self.entries[i][j] - &rhs.entries[i][j])
    }

    pub fn scale(&self, f: &ScalarExpr) -> EndoField {
        EndoField::from_fn(self.dim(), |i, j| f * &self.entries[i][j])
    }

    pub fn scale_const(&self, a: f64) -> EndoField {
        self.scale(&ScalarExpr::constant(a))
    }

    pub fn transpose(&self) -> EndoField {
        EndoField::from_fn(self.dim(), |i, j| self.entries[j][i].clone())
    }
}

/// A metric field: symmetric expression matrix g_ij, nondegenerate on the
/// working region. Symmetry is the caller's responsibility structurally and
/// is checked semantically by `metallic::validate`.
#[derive(Debug, Clone)]
pub struct MetricField {
    entries: Vec<Vec<ScalarExpr>>,
}

/// Threshold below which |det g| counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

impl MetricField {
    pub fn from_rows(entries: Vec<Vec<ScalarExpr>>) -> MetricField {
        let n = entries.len();
        assert!(entries.iter().all(|r| r.len() == n), "metric must be square");
        MetricField { entries }
    }

    pub fn euclidean(n: usize) -> MetricField {
        MetricField::from_rows(EndoField::identity(n).entries)
    }

    pub fn diagonal_consts(d: &[f64]) -> MetricField {
        let n = d.len();
        MetricField::from_rows(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                ScalarExpr::constant(d[i])
                            } else {
                                ScalarExpr::zero()
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<ScalarExpr>] {
        &self.entries
    }

    pub fn eval(&self, pt: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.entries[i][j].eval(pt)?;
            }
        }
        Ok(out)
    }

    /// g(X, Y) as a scalar expression.
    pub fn pairing(&self, x: &VectorField, y: &VectorField) -> ScalarExpr {
        let n = self.dim();
        let mut acc = ScalarExpr::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc.add(&self.entries[i][j].mul(x.component(i)).mul(y.component(j)));
            }
        }
        acc
    }

    /// g(u, v) for numeric tangent vectors at a point.
    pub fn pair_at(
        &self,
        u: &DVector<f64>,
        v: &DVector<f64>,
        pt: &[f64],
    ) -> Result<f64, GeomError> {
        let g = self.eval(pt)?;
        Ok((u.transpose() * g * v)[(0, 0)])
    }

    pub fn det_expr(&self) -> ScalarExpr {
        det_exprs(&self.entries)
    }

    /// Symbolic inverse metric g^{ij}.
    pub fn inverse_exprs(&self) -> Vec<Vec<ScalarExpr>> {
        inverse_exprs(&self.entries)
    }

    /// Errors if |det g| at the point is below the degeneracy threshold.
    pub fn check_nondegenerate(&self, pt: &[f64]) -> Result<f64, GeomError> {
        let det = self.det_expr().eval(pt)?;
        if det.abs() < DEGENERACY_THRESHOLD {
            return Err(GeomError::DegenerateMetric {
                point: pt.to_vec(),
                det,
            });
        }
        Ok(det)
    }
}
