//! Expression trees over chart coordinates.
//!
//! A [`ScalarExpr`] is an immutable tree supporting exact evaluation, exact
//! symbolic partial differentiation and light simplification. Every tensor
//! component in the geometry layers (metric entries, endomorphism entries,
//! vector-field components, form coefficients) is one of these trees, so
//! `diff` here realizes every partial derivative appearing inside covariant
//! derivatives, Lie brackets and exterior derivatives.
//!
//! Trees share subexpressions through `Arc`, are pure and `Send + Sync`.
//! Equality of expressions is semantic (sampled), never structural; the only
//! rewriting done is constant folding plus identity/annihilator removal.

use crate::error::{EvalError, ParseError};
use std::fmt;
use std::sync::Arc;

mod parse;

/// Unary functions of the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Pi,
    E,
    /// Zero-based coordinate index; `x1` parses to `Coord(0)`.
    Coord(usize),
    Neg(ScalarExpr),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    /// Exponent restricted to a constant, which keeps differentiation total.
    Pow(ScalarExpr, f64),
    Func(Func, ScalarExpr),
}

/// An immutable scalar expression in chart coordinates.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Node>);

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr({self})")
    }
}

impl ScalarExpr {
    fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> ScalarExpr {
        ScalarExpr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> ScalarExpr {
        ScalarExpr::constant(0.0)
    }

    pub fn one() -> ScalarExpr {
        ScalarExpr::constant(1.0)
    }

    pub fn pi() -> ScalarExpr {
        ScalarExpr(Arc::new(Node::Pi))
    }

    pub fn euler() -> ScalarExpr {
        ScalarExpr(Arc::new(Node::E))
    }

    /// The coordinate `x{i+1}` (zero-based index).
    pub fn coord(i: usize) -> ScalarExpr {
        ScalarExpr(Arc::new(Node::Coord(i)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            Node::Pi => Some(std::f64::consts::PI),
            Node::E => Some(std::f64::consts::E),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self.node(), Node::Const(c) if *c == 1.0)
    }

    pub fn add(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return ScalarExpr::constant(a + b);
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        ScalarExpr(Arc::new(Node::Add(self.clone(), rhs.clone())))
    }

    pub fn sub(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return ScalarExpr::constant(a - b);
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.neg();
        }
        ScalarExpr(Arc::new(Node::Sub(self.clone(), rhs.clone())))
    }

    pub fn mul(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return ScalarExpr::constant(a * b);
        }
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        ScalarExpr(Arc::new(Node::Mul(self.clone(), rhs.clone())))
    }

    pub fn div(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            if b != 0.0 {
                return ScalarExpr::constant(a / b);
            }
        }
        if rhs.is_one() {
            return self.clone();
        }
        ScalarExpr(Arc::new(Node::Div(self.clone(), rhs.clone())))
    }

    pub fn neg(&self) -> ScalarExpr {
        if let Some(c) = self.as_const() {
            return ScalarExpr::constant(-c);
        }
        if let Node::Neg(inner) = self.node() {
            return inner.clone();
        }
        ScalarExpr(Arc::new(Node::Neg(self.clone())))
    }

    pub fn pow(&self, exponent: f64) -> ScalarExpr {
        if exponent == 0.0 {
            return ScalarExpr::one();
        }
        if exponent == 1.0 {
            return self.clone();
        }
        if let Some(base) = self.as_const() {
            let v = base.powf(exponent);
            if v.is_finite() {
                return ScalarExpr::constant(v);
            }
        }
        ScalarExpr(Arc::new(Node::Pow(self.clone(), exponent)))
    }

    pub fn func(&self, f: Func) -> ScalarExpr {
        ScalarExpr(Arc::new(Node::Func(f, self.clone())))
    }

    pub fn sin(&self) -> ScalarExpr {
        self.func(Func::Sin)
    }
    pub fn cos(&self) -> ScalarExpr {
        self.func(Func::Cos)
    }
    pub fn sinh(&self) -> ScalarExpr {
        self.func(Func::Sinh)
    }
    pub fn cosh(&self) -> ScalarExpr {
        self.func(Func::Cosh)
    }
    pub fn exp(&self) -> ScalarExpr {
        self.func(Func::Exp)
    }
    pub fn sqrt(&self) -> ScalarExpr {
        self.func(Func::Sqrt)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) | Node::Pi | Node::E => None,
            Node::Coord(i) => Some(*i),
            Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => a.max_coord(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    /// Exact evaluation at a point. Domain failures report the offending
    /// subtree in rendered form.
    pub fn eval(&self, pt: &[f64]) -> Result<f64, EvalError> {
        match self.node() {
            Node::Const(c) => Ok(*c),
            Node::Pi => Ok(std::f64::consts::PI),
            Node::E => Ok(std::f64::consts::E),
            Node::Coord(i) => pt.get(*i).copied().ok_or(EvalError::PointDimension {
                got: pt.len(),
                needed: *i + 1,
            }),
            Node::Neg(a) => Ok(-a.eval(pt)?),
            Node::Add(a, b) => Ok(a.eval(pt)? + b.eval(pt)?),
            Node::Sub(a, b) => Ok(a.eval(pt)? - b.eval(pt)?),
            Node::Mul(a, b) => Ok(a.eval(pt)? * b.eval(pt)?),
            Node::Div(a, b) => {
                let denom = b.eval(pt)?;
                if denom == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                Ok(a.eval(pt)? / denom)
            }
            Node::Pow(base, exponent) => {
                let b = base.eval(pt)?;
                if b < 0.0 && exponent.fract() != 0.0 {
                    return Err(EvalError::Domain {
                        function: "pow",
                        argument: b,
                        subtree: self.to_string(),
                    });
                }
                if b == 0.0 && *exponent < 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                Ok(b.powf(*exponent))
            }
            Node::Func(f, a) => {
                let x = a.eval(pt)?;
                match f {
                    Func::Log if x <= 0.0 => Err(EvalError::Domain {
                        function: "log",
                        argument: x,
                        subtree: self.to_string(),
                    }),
                    Func::Sqrt if x < 0.0 => Err(EvalError::Domain {
                        function: "sqrt",
                        argument: x,
                        subtree: self.to_string(),
                    }),
                    _ => Ok(f.apply(x)),
                }
            }
        }
    }

    /// Exact partial derivative with respect to coordinate `i` (zero-based).
    pub fn diff(&self, i: usize) -> ScalarExpr {
        match self.node() {
            Node::Const(_) | Node::Pi | Node::E => ScalarExpr::zero(),
            Node::Coord(j) => {
                if *j == i {
                    ScalarExpr::one()
                } else {
                    ScalarExpr::zero()
                }
            }
            Node::Neg(a) => a.diff(i).neg(),
            Node::Add(a, b) => a.diff(i).add(&b.diff(i)),
            Node::Sub(a, b) => a.diff(i).sub(&b.diff(i)),
            Node::Mul(a, b) => a.diff(i).mul(b).add(&a.mul(&b.diff(i))),
            Node::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = a.diff(i).mul(b).sub(&a.mul(&b.diff(i)));
                num.div(&b.mul(b))
            }
            Node::Pow(base, c) => {
                // c * base^(c-1) * base'
                ScalarExpr::constant(*c)
                    .mul(&base.pow(c - 1.0))
                    .mul(&base.diff(i))
            }
            Node::Func(f, a) => {
                let da = a.diff(i);
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Tan => ScalarExpr::one().div(&a.cos().mul(&a.cos())),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                    Func::Tanh => ScalarExpr::one().div(&a.cosh().mul(&a.cosh())),
                    Func::Exp => a.exp(),
                    Func::Log => ScalarExpr::one().div(a),
                    Func::Sqrt => ScalarExpr::one().div(&ScalarExpr::constant(2.0).mul(&a.sqrt())),
                };
                outer.mul(&da)
            }
        }
    }

    /// Constant folding plus identity/annihilator removal, bottom up. The
    /// result evaluates identically at every point where the input is defined.
    pub fn simplify(&self) -> ScalarExpr {
        match self.node() {
            Node::Const(_) | Node::Pi | Node::E | Node::Coord(_) => self.clone(),
            Node::Neg(a) => a.simplify().neg(),
            Node::Add(a, b) => a.simplify().add(&b.simplify()),
            Node::Sub(a, b) => a.simplify().sub(&b.simplify()),
            Node::Mul(a, b) => a.simplify().mul(&b.simplify()),
            Node::Div(a, b) => {
                let num = a.simplify();
                let den = b.simplify();
                if num.is_zero() && !den.is_zero() {
                    return ScalarExpr::zero();
                }
                num.div(&den)
            }
            Node::Pow(base, c) => base.simplify().pow(*c),
            Node::Func(f, a) => {
                let arg = a.simplify();
                if let Some(x) = arg.as_const() {
                    let v = f.apply(x);
                    if v.is_finite() {
                        return ScalarExpr::constant(v);
                    }
                }
                arg.func(*f)
            }
        }
    }

    /// Parse expression text against an `n`-dimensional chart.
    ///
    /// Grammar (whitespace insignificant, `^` right-associative):
    /// ```text
    /// expr   := term (("+"|"-") term)*
    /// term   := factor (("*"|"/") factor)*
    /// factor := unary ("^" factor)?
    /// unary  := "-" unary | atom
    /// atom   := number | ident | func "(" expr ")" | "(" expr ")"
    /// ```
    /// with `func` in sin cos tan sinh cosh tanh exp log sqrt and `ident`
    /// among `x1..xn`, `pi`, `e`.
    pub fn parse(text: &str, n: usize) -> Result<ScalarExpr, ParseError> {
        parse::parse(text, n)
    }
}

impl PartialEq for ScalarExpr {
    /// Pointer or constant equality only. Semantic equality is established by
    /// sampled evaluation in tests, never structurally.
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        matches!(
            (self.node(), other.node()),
            (Node::Const(a), Node::Const(b)) if a == b
        )
    }
}

// Operator sugar on references, used heavily by the field layers.
impl std::ops::Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::add(self, rhs)
    }
}
impl std::ops::Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::sub(self, rhs)
    }
}
impl std::ops::Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::mul(self, rhs)
    }
}
impl std::ops::Div for &ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::div(self, rhs)
    }
}
impl std::ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}

// Precedence levels for rendering: looser binds print parens around tighter
// contexts. Rendered text reparses to a semantically identical expression.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &ScalarExpr, min: u8) -> fmt::Result {
            if precedence(e.node()) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self.node() {
            Node::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Node::Pi => write!(f, "pi"),
            Node::E => write!(f, "e"),
            Node::Coord(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 3)
            }
            Node::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            Node::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            Node::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Node::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Node::Pow(a, c) => {
                child(f, a, 5)?;
                if *c < 0.0 {
                    write!(f, "^({c})")
                } else {
                    write!(f, "^{c}")
                }
            }
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> ScalarExpr {
        ScalarExpr::parse(text, n).expect(text)
    }

    #[test]
    fn parse_basic_tree() {
        let e = p("x1^2 + sin(x2)", 2);
        assert!((e.eval(&[3.0, 0.0]).unwrap() - 9.0).abs() < 1e-15);
        assert!((e.eval(&[1.0, std::f64::consts::FRAC_PI_2]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parse_reports_position() {
        let err = ScalarExpr::parse("2*", 1).unwrap_err();
        assert_eq!(err.position(), 2);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn parse_coordinate_out_of_range() {
        let err = ScalarExpr::parse("x3", 2).unwrap_err();
        assert!(matches!(
            err,
            ParseError::CoordOutOfRange { index: 3, dim: 2, .. }
        ));
    }

    #[test]
    fn parse_unknown_identifier() {
        let err = ScalarExpr::parse("foo + 1", 2).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdent { .. }));
    }

    #[test]
    fn eval_product() {
        assert_eq!(p("x1*x2", 2).eval(&[2.0, 3.0]).unwrap(), 6.0);
    }

    #[test]
    fn eval_domain_error() {
        let err = p("sqrt(x1)", 1).eval(&[-1.0]).unwrap_err();
        assert!(matches!(err, EvalError::Domain { function: "sqrt", .. }));
        let err = p("1/x1", 1).eval(&[0.0]).unwrap_err();
        assert!(matches!(err, EvalError::DivisionByZero { .. }));
    }

    #[test]
    fn eval_hyperbolic_identity() {
        let v = p("cosh(x1)^2 - sinh(x1)^2", 1).eval(&[0.7]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diff_power_rule() {
        let d = p("x1^2", 1).diff(0);
        for x in [0.0, 1.0, -2.5, 3.25] {
            assert!((d.eval(&[x]).unwrap() - 2.0 * x).abs() < 1e-13);
        }
    }

    #[test]
    fn diff_chain_rule() {
        let d = p("sin(x1*x2)", 2).diff(1);
        let v = d.eval(&[1.0, std::f64::consts::PI]).unwrap();
        assert!((v - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn diff_matches_finite_differences() {
        // 5-point central stencil as the independent oracle.
        let exprs = [
            p("sin(x1)*cos(2*x2) + x1^3/(1 + x2^2)", 2),
            p("exp(x1/3)*tanh(x2) - sqrt(1 + x1^2)", 2),
            p("log(2 + sin(x1)) * x2", 2),
        ];
        let h = 1e-4;
        for e in &exprs {
            for i in 0..2 {
                for pt in [[0.3, 0.5], [1.1, -0.7], [-0.4, 0.2]] {
                    let exact = e.diff(i).eval(&pt).unwrap();
                    let f = |t: f64| {
                        let mut q = pt;
                        q[i] = t;
                        e.eval(&q).unwrap()
                    };
                    let x = pt[i];
                    let fd = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h))
                        / (12.0 * h);
                    assert!(
                        (exact - fd).abs() < 1e-8,
                        "d{e}/dx{} at {pt:?}: {exact} vs fd {fd}",
                        i + 1
                    );
                }
            }
        }
    }

    #[test]
    fn simplify_annihilator_and_identity() {
        let e = p("0*sin(x1)+x2", 2).simplify();
        assert_eq!(e.to_string(), "x2");
        let e = p("x1^1", 1).simplify();
        assert_eq!(e.to_string(), "x1");
    }

    #[test]
    fn simplify_diff_product() {
        let d = p("x1*x2", 2).diff(0).simplify();
        let reference = p("x2", 2);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..100 {
            let pt = [next(), next()];
            let a = d.eval(&pt).unwrap();
            let b = reference.eval(&pt).unwrap();
            assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn pow_of_non_constant_exponent_rejected() {
        let err = ScalarExpr::parse("x1^x2", 2).unwrap_err();
        assert!(matches!(err, ParseError::NonConstantExponent { .. }));
        // Constant subexpressions are fine.
        let e = p("x1^(1+1)", 2);
        assert_eq!(e.eval(&[3.0, 0.0]).unwrap(), 9.0);
    }

    #[test]
    fn pow_right_associative() {
        let e = p("2^3^2", 1);
        assert_eq!(e.eval(&[0.0]).unwrap(), 512.0);
    }

    #[test]
    fn named_constants() {
        assert!((p("pi", 1).eval(&[0.0]).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((p("e^2", 1).eval(&[0.0]).unwrap() - std::f64::consts::E.powi(2)).abs() < 1e-14);
    }

    // Random well-defined expression trees for property tests: polynomials
    // and bounded transcendentals, no division/log/sqrt so every point is
    // a valid evaluation point.
    fn total_expr(n: usize) -> impl Strategy<Value = ScalarExpr> {
        let leaf = prop_oneof![
            (-3.0..3.0f64).prop_map(ScalarExpr::constant),
            (0..n).prop_map(ScalarExpr::coord),
        ];
        leaf.prop_recursive(3, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
                inner.clone().prop_map(|a| a.sin()),
                inner.clone().prop_map(|a| a.cos()),
                inner.clone().prop_map(|a| a.neg()),
                (inner, 1..4u32).prop_map(|(a, k)| a.pow(k as f64)),
            ]
        })
    }

    proptest! {
        #[test]
        fn diff_is_linear(
            e1 in total_expr(2),
            e2 in total_expr(2),
            a in -2.0..2.0f64,
            b in -2.0..2.0f64,
            x in -1.5..1.5f64,
            y in -1.5..1.5f64,
        ) {
            let combo = ScalarExpr::constant(a).mul(&e1).add(&ScalarExpr::constant(b).mul(&e2));
            for i in 0..2 {
                let lhs = combo.diff(i).eval(&[x, y]).unwrap();
                let rhs = a * e1.diff(i).eval(&[x, y]).unwrap() + b * e2.diff(i).eval(&[x, y]).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn mixed_partials_commute(e in total_expr(2), x in -1.5..1.5f64, y in -1.5..1.5f64) {
            let dxy = e.diff(0).diff(1).eval(&[x, y]).unwrap();
            let dyx = e.diff(1).diff(0).eval(&[x, y]).unwrap();
            prop_assert!((dxy - dyx).abs() <= 1e-10 * (1.0 + dxy.abs().max(dyx.abs())));
        }

        #[test]
        fn simplify_preserves_semantics(e in total_expr(3), x in -2.0..2.0f64, y in -2.0..2.0f64, z in -2.0..2.0f64) {
            let s = e.simplify();
            let a = e.eval(&[x, y, z]).unwrap();
            let b = s.eval(&[x, y, z]).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
        }

        #[test]
        fn render_parse_round_trip(e in total_expr(2), x in -1.5..1.5f64, y in -1.5..1.5f64) {
            let text = e.to_string();
            let back = ScalarExpr::parse(&text, 2).unwrap();
            let a = e.eval(&[x, y]).unwrap();
            let b = back.eval(&[x, y]).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{text}");
        }
    }
}
