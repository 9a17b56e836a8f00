//! Reference metallic pseudo-Riemannian structures on coordinate charts,
//! used throughout the test and acceptance suites and shipped as CLI
//! examples. Each carries a sampling box that stays inside the structure's
//! domain of definition.

use crate::expr::ScalarExpr;
use crate::fields::{Chart, EndoField, MetricField};
use crate::metallic::MetallicParams;
use crate::sample::SampleBox;

/// A chart together with a metallic pseudo-Riemannian structure on it.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub chart: Chart,
    pub g: MetricField,
    pub j: EndoField,
    pub params: MetallicParams,
    pub box_: SampleBox,
}

fn c(v: f64) -> ScalarExpr {
    ScalarExpr::constant(v)
}

/// The golden-ratio structure matrix [[1,1],[1,0]].
fn golden_matrix() -> Vec<Vec<ScalarExpr>> {
    vec![vec![c(1.0), c(1.0)], vec![c(1.0), c(0.0)]]
}

/// Conjugate a constant 2×2 expression block by the rotation R(θ expr):
/// R J Rᵀ with R = [[cos θ, −sin θ], [sin θ, cos θ]].
fn rotate_conjugate(block: &[Vec<ScalarExpr>], theta: &ScalarExpr) -> Vec<Vec<ScalarExpr>> {
    let cos = theta.cos();
    let sin = theta.sin();
    let r = vec![vec![cos.clone(), sin.neg()], vec![sin.clone(), cos.clone()]];
    let rt = vec![vec![cos.clone(), sin.clone()], vec![sin.neg(), cos]];
    let mul = |a: &[Vec<ScalarExpr>], b: &[Vec<ScalarExpr>]| -> Vec<Vec<ScalarExpr>> {
        (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let mut acc = ScalarExpr::zero();
                        for k in 0..2 {
                            acc = acc.add(&a[i][k].mul(&b[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    mul(&mul(&r, block), &rt)
}

/// F1: flat golden structure on ℝ², g = I, J = [[1,1],[1,0]], p = q = 1.
pub fn f1() -> Fixture {
    Fixture {
        name: "F1",
        chart: Chart::new(2),
        g: MetricField::euclidean(2),
        j: EndoField::from_rows(golden_matrix()),
        params: MetallicParams::new(1.0, 1.0),
        box_: SampleBox::cube(2, -1.0, 1.0),
    }
}

/// F2: varying golden surface, J(x) = R(x¹)·J_F1·R(x¹)ᵀ on ℝ².
pub fn f2() -> Fixture {
    let theta = ScalarExpr::coord(0);
    Fixture {
        name: "F2",
        chart: Chart::new(2),
        g: MetricField::euclidean(2),
        j: EndoField::from_rows(rotate_conjugate(&golden_matrix(), &theta)),
        params: MetallicParams::new(1.0, 1.0),
        box_: SampleBox::cube(2, -1.0, 1.0),
    }
}

/// F3: varying golden 3-fold, J = blockdiag(R(x³)·J_F1·R(x³)ᵀ, σ₋) on ℝ³.
/// D has rank 2 and is not involutive.
pub fn f3() -> Fixture {
    let params = MetallicParams::new(1.0, 1.0);
    let sm = params.sigma_minus().unwrap();
    let theta = ScalarExpr::coord(2);
    let block = rotate_conjugate(&golden_matrix(), &theta);
    let mut rows = vec![vec![ScalarExpr::zero(); 3]; 3];
    for i in 0..2 {
        for j in 0..2 {
            rows[i][j] = block[i][j].clone();
        }
    }
    rows[2][2] = c(sm);
    Fixture {
        name: "F3",
        chart: Chart::new(3),
        g: MetricField::euclidean(3),
        j: EndoField::from_rows(rows),
        params,
        box_: SampleBox::cube(3, -1.0, 1.0),
    }
}

/// The constant Norden block of F4: rotation by −60°, J² = J − I.
fn norden_block() -> Vec<Vec<ScalarExpr>> {
    let s3 = 3.0f64.sqrt() / 2.0;
    vec![vec![c(0.5), c(s3)], vec![c(-s3), c(0.5)]]
}

/// F4: flat Norden structure on ℝ², g = diag(1,−1), p = 1, q = −1.
pub fn f4() -> Fixture {
    Fixture {
        name: "F4",
        chart: Chart::new(2),
        g: MetricField::diagonal_consts(&[1.0, -1.0]),
        j: EndoField::from_rows(norden_block()),
        params: MetallicParams::new(1.0, -1.0),
        box_: SampleBox::cube(2, -1.0, 1.0),
    }
}

/// F5: the F4 structure on a periodic chart [0,2π)², for torus pairings.
pub fn f5() -> Fixture {
    Fixture {
        name: "F5",
        chart: Chart::torus(2),
        box_: SampleBox::cube(2, 0.0, 2.0 * std::f64::consts::PI),
        ..f4()
    }
}

/// F6: concentric 3-sphere foliation of ℝ⁴∖{0}: g = I,
/// J = σ₊·P_r + σ₋·(I−P_r) with P_r = x xᵀ/|x|², p = q = 1.
/// D (sphere tangents) is integrable with h ≠ 0; D′ is the radial line.
pub fn f6() -> Fixture {
    let params = MetallicParams::new(1.0, 1.0);
    fixture_sphere_foliation("F6", 4, params)
}

/// The n-dimensional sphere-foliation variant of F6 (n ≥ 2), used for the
/// rank-2 leaf case of the Chen inequality when n = 3.
pub fn sphere_foliation(dim: usize) -> Fixture {
    fixture_sphere_foliation("F6v", dim, MetallicParams::new(1.0, 1.0))
}

fn fixture_sphere_foliation(name: &'static str, n: usize, params: MetallicParams) -> Fixture {
    let sm = params.sigma_minus().unwrap();
    let sp = params.sigma_plus().unwrap();
    let mut r2 = ScalarExpr::zero();
    for i in 0..n {
        r2 = r2.add(&ScalarExpr::coord(i).pow(2.0));
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let radial = ScalarExpr::coord(i).mul(&ScalarExpr::coord(j)).div(&r2);
                    let scaled = c(sp - sm).mul(&radial);
                    if i == j {
                        c(sm).add(&scaled)
                    } else {
                        scaled
                    }
                })
                .collect()
        })
        .collect();
    Fixture {
        name,
        chart: Chart::new(n),
        g: MetricField::euclidean(n),
        j: EndoField::from_rows(rows),
        params,
        // stays clear of the puncture at the origin
        box_: SampleBox::cube(n, 0.35, 1.3),
    }
}

/// F7: varying Norden 4-fold, g = diag(1,−1,1,−1),
/// J = blockdiag(J_F4, B(x¹)·J_F4·B(x¹)⁻¹) with the boost
/// B(t) = [[cosh t, sinh t],[sinh t, cosh t]]. N_J ≠ 0.
pub fn f7() -> Fixture {
    let t = ScalarExpr::coord(0);
    let boosted = boost_conjugate(&norden_block(), &t);
    let base = norden_block();
    let mut rows = vec![vec![ScalarExpr::zero(); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            rows[i][j] = base[i][j].clone();
            rows[i + 2][j + 2] = boosted[i][j].clone();
        }
    }
    Fixture {
        name: "F7",
        chart: Chart::new(4),
        g: MetricField::diagonal_consts(&[1.0, -1.0, 1.0, -1.0]),
        j: EndoField::from_rows(rows),
        params: MetallicParams::new(1.0, -1.0),
        box_: SampleBox::cube(4, -1.0, 1.0),
    }
}

/// The 2-dimensional boosted-Norden family: g = diag(1,−1),
/// J = B(x¹)·J_F4·B(x¹)⁻¹. Two-dimensional, so N_J ≡ 0.
pub fn norden_boosted_2d() -> Fixture {
    let t = ScalarExpr::coord(0);
    Fixture {
        name: "F4b",
        chart: Chart::new(2),
        g: MetricField::diagonal_consts(&[1.0, -1.0]),
        j: EndoField::from_rows(boost_conjugate(&norden_block(), &t)),
        params: MetallicParams::new(1.0, -1.0),
        box_: SampleBox::cube(2, -1.0, 1.0),
    }
}

/// B(t) M B(t)⁻¹ for the hyperbolic boost B(t) = [[cosh t, sinh t],[sinh t, cosh t]]
/// (B(t)⁻¹ = B(−t)); B is g-orthogonal for g = diag(1,−1), so conjugation
/// preserves g-symmetry.
fn boost_conjugate(block: &[Vec<ScalarExpr>], t: &ScalarExpr) -> Vec<Vec<ScalarExpr>> {
    let ch = t.cosh();
    let sh = t.sinh();
    let b = vec![vec![ch.clone(), sh.clone()], vec![sh.clone(), ch.clone()]];
    let binv = vec![vec![ch.clone(), sh.neg()], vec![sh.neg(), ch]];
    let mul = |a: &[Vec<ScalarExpr>], bb: &[Vec<ScalarExpr>]| -> Vec<Vec<ScalarExpr>> {
        (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let mut acc = ScalarExpr::zero();
                        for k in 0..2 {
                            acc = acc.add(&a[i][k].mul(&bb[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    mul(&mul(&b, block), &binv)
}

/// All seven canonical fixtures.
pub fn all() -> Vec<Fixture> {
    vec![f1(), f2(), f3(), f4(), f5(), f6(), f7()]
}
