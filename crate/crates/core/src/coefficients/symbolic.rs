//! Symbolic differentiation, constant folding and an equivalence test.

use std::collections::BTreeMap;

use super::expr::{Expr, Func};

/// Exact derivative with respect to `x`, followed by [`simplify`].
pub fn differentiate(e: &Expr) -> Expr {
    simplify(&derive(e))
}

fn derive(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) => Expr::num(0.0),
        Expr::Var => Expr::num(1.0),
        Expr::Neg(u) => Expr::neg(derive(u)),
        Expr::Add(u, v) => Expr::add(derive(u), derive(v)),
        Expr::Sub(u, v) => Expr::sub(derive(u), derive(v)),
        Expr::Mul(u, v) => Expr::add(
            Expr::mul(derive(u), (**v).clone()),
            Expr::mul((**u).clone(), derive(v)),
        ),
        Expr::Div(u, v) => Expr::div(
            Expr::sub(
                Expr::mul(derive(u), (**v).clone()),
                Expr::mul((**u).clone(), derive(v)),
            ),
            Expr::pow((**v).clone(), 2),
        ),
        Expr::Pow(_, 0) => Expr::num(0.0),
        Expr::Pow(u, n) => Expr::mul(
            Expr::mul(Expr::num(f64::from(*n)), Expr::pow((**u).clone(), n - 1)),
            derive(u),
        ),
        Expr::Call(Func::Sqrt, u) => Expr::div(
            derive(u),
            Expr::mul(Expr::num(2.0), Expr::call(Func::Sqrt, (**u).clone())),
        ),
        Expr::Call(Func::Exp, u) => Expr::mul(Expr::call(Func::Exp, (**u).clone()), derive(u)),
        Expr::Call(Func::Log, u) => Expr::div(derive(u), (**u).clone()),
    }
}

/// Constant folding plus the identities `0·u → 0`, `1·u → u`, `u ± 0 → u`,
/// `0 - u → -u`, `u/1 → u`, `u^0 → 1`, `u^1 → u`, `--u → u`.
///
/// Variable-free subtrees collapse to a literal when they evaluate to a
/// finite number.
pub fn simplify(e: &Expr) -> Expr {
    let folded = match e {
        Expr::Num(_) | Expr::Var => return e.clone(),
        Expr::Neg(u) => match simplify(u) {
            Expr::Num(v) => Expr::num(-v),
            Expr::Neg(inner) => *inner,
            u => Expr::neg(u),
        },
        Expr::Add(u, v) => match (simplify(u), simplify(v)) {
            (u, v) if is_num(&u, 0.0) => v,
            (u, v) if is_num(&v, 0.0) => u,
            (u, v) => Expr::add(u, v),
        },
        Expr::Sub(u, v) => match (simplify(u), simplify(v)) {
            (u, v) if is_num(&v, 0.0) => u,
            (u, v) if is_num(&u, 0.0) => simplify(&Expr::neg(v)),
            (u, v) => Expr::sub(u, v),
        },
        Expr::Mul(u, v) => match (simplify(u), simplify(v)) {
            (u, v) if is_num(&u, 0.0) || is_num(&v, 0.0) => Expr::num(0.0),
            (u, v) if is_num(&u, 1.0) => v,
            (u, v) if is_num(&v, 1.0) => u,
            (u, v) => Expr::mul(u, v),
        },
        Expr::Div(u, v) => match (simplify(u), simplify(v)) {
            (u, v) if is_num(&v, 1.0) => u,
            (u, v) if is_num(&u, 0.0) && !is_num(&v, 0.0) => Expr::num(0.0),
            (u, v) => Expr::div(u, v),
        },
        Expr::Pow(_, 0) => Expr::num(1.0),
        Expr::Pow(u, 1) => simplify(u),
        Expr::Pow(u, n) => Expr::pow(simplify(u), *n),
        Expr::Call(f, u) => Expr::call(*f, simplify(u)),
    };
    if !matches!(folded, Expr::Num(_)) && folded.is_constant() {
        if let Ok(v) = folded.eval(0.0) {
            if v.is_finite() {
                return Expr::num(v);
            }
        }
    }
    folded
}

fn is_num(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Num(v) if *v == value)
}

/// True when `a` and `b` denote the same function of `x`.
///
/// Both sides are expanded into a sum of monomials over `x` and opaque atoms
/// (function calls and non-constant quotients, themselves keyed by their own
/// canonical form), then compared coefficient by coefficient with a relative
/// tolerance of 1e-12. Sufficient for polynomial identities; it does not know
/// about `exp(u)·exp(v) = exp(u+v)` and similar rewrites.
pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    let pa = Poly::from_expr(a);
    let pb = Poly::from_expr(b);
    pa.approx_eq(&pb, 1e-12)
}

/// Canonical text of an expression: stable under reordering of sums and products.
pub fn canonical_string(e: &Expr) -> String {
    Poly::from_expr(e).to_string()
}

type Monomial = BTreeMap<String, u32>;

#[derive(Debug, Clone, Default)]
struct Poly {
    terms: BTreeMap<Monomial, f64>,
}

impl Poly {
    fn constant(c: f64) -> Poly {
        let mut p = Poly::default();
        if c != 0.0 {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    fn atom(key: String) -> Poly {
        let mut m = Monomial::new();
        m.insert(key, 1);
        let mut p = Poly::default();
        p.terms.insert(m, 1.0);
        p
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Monomial::new()).copied(),
            _ => None,
        }
    }

    fn from_expr(e: &Expr) -> Poly {
        match e {
            Expr::Num(v) => Poly::constant(*v),
            Expr::Var => Poly::atom("x".to_string()),
            Expr::Neg(u) => Poly::from_expr(u).scale(-1.0),
            Expr::Add(u, v) => Poly::from_expr(u).add(&Poly::from_expr(v)),
            Expr::Sub(u, v) => Poly::from_expr(u).add(&Poly::from_expr(v).scale(-1.0)),
            Expr::Mul(u, v) => Poly::from_expr(u).mul(&Poly::from_expr(v)),
            Expr::Div(u, v) => {
                let num = Poly::from_expr(u);
                let den = Poly::from_expr(v);
                match den.as_constant() {
                    Some(c) if c != 0.0 => num.scale(1.0 / c),
                    _ => Poly::atom(format!("({num})/({den})")),
                }
            }
            Expr::Pow(u, n) => {
                let base = Poly::from_expr(u);
                let mut acc = Poly::constant(1.0);
                for _ in 0..*n {
                    acc = acc.mul(&base);
                }
                acc
            }
            Expr::Call(f, u) => {
                let arg = Poly::from_expr(u);
                match arg.as_constant().map(|c| Expr::call(*f, Expr::num(c)).eval(0.0)) {
                    Some(Ok(v)) if v.is_finite() => Poly::constant(v),
                    _ => Poly::atom(format!("{}({arg})", f.name())),
                }
            }
        }
    }

    fn scale(mut self, c: f64) -> Poly {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self.prune()
    }

    fn add(mut self, other: &Poly) -> Poly {
        for (m, c) in &other.terms {
            *self.terms.entry(m.clone()).or_insert(0.0) += c;
        }
        self.prune()
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (k, p) in mb {
                    *m.entry(k.clone()).or_insert(0) += p;
                }
                *out.terms.entry(m).or_insert(0.0) += ca * cb;
            }
        }
        out.prune()
    }

    fn prune(mut self) -> Poly {
        self.terms.retain(|_, c| *c != 0.0);
        self
    }

    fn approx_eq(&self, other: &Poly, rtol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0);
        self.terms
            .iter()
            .all(|(m, c)| close(*c, other.terms.get(m).copied().unwrap_or(0.0)))
            && other
                .terms
                .iter()
                .all(|(m, c)| close(*c, self.terms.get(m).copied().unwrap_or(0.0)))
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:e}")?;
            for (k, p) in m {
                write!(f, "*{k}^{p}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::parse_expr;

    fn d(text: &str) -> Expr {
        differentiate(&parse_expr(text).unwrap())
    }

    fn p(text: &str) -> Expr {
        parse_expr(text).unwrap()
    }

    #[test]
    fn derivative_of_identity_is_one() {
        assert_eq!(d("x"), Expr::num(1.0));
        assert_eq!(d("x").to_string(), "1");
    }

    #[test]
    fn derivative_of_logistic_factor() {
        let dg = d("x - x^2");
        assert!(equivalent(&dg, &p("1 - 2*x")));
        assert_eq!(dg.eval(0.0).unwrap(), 1.0);
        assert_eq!(d("x*(1-x)").eval(0.0).unwrap(), 1.0);
        assert_eq!(d("x*(1-x)").eval(1.0).unwrap(), -1.0);
    }

    #[test]
    fn folding() {
        assert_eq!(simplify(&p("1/2 + 0*x")), Expr::num(0.5));
        assert_eq!(simplify(&p("0 - x")), Expr::neg(Expr::var()));
        assert_eq!(simplify(&p("1*x^1 + 0")), Expr::var());
        assert_eq!(simplify(&p("-(-x)")), Expr::var());
        assert_eq!(simplify(&p("x^0")), Expr::num(1.0));
        assert_eq!(simplify(&p("sqrt(4) * x")), Expr::mul(Expr::num(2.0), Expr::var()));
        // log(0) is not finite and stays symbolic
        assert_eq!(simplify(&p("log(0)")), p("log(0)"));
    }

    #[test]
    fn constants_have_zero_derivative() {
        assert_eq!(d("3"), Expr::num(0.0));
        assert_eq!(d("exp(2) + log(3)"), Expr::num(0.0));
    }

    #[test]
    fn equivalence_is_order_insensitive() {
        assert!(equivalent(&p("-1/2 + 2*x - x^2"), &p("2*x - x^2 - 0.5")));
        assert!(equivalent(&p("(x+1)^2"), &p("x^2 + 2*x + 1")));
        assert!(equivalent(&p("exp(x+1)*x"), &p("x*exp(1+x)")));
        assert!(equivalent(&p("x/(1+x)"), &p("x/(x+1)")));
        assert!(!equivalent(&p("x"), &p("x^2")));
        assert!(!equivalent(&p("sqrt(x)"), &p("exp(x)")));
    }

    #[test]
    fn transcendental_derivatives() {
        let cases = [
            ("sqrt(2*x)", 2.0, 0.5),
            ("exp(3*x)", 0.0, 3.0),
            ("log(x)", 4.0, 0.25),
            ("1/x", 2.0, -0.25),
        ];
        for (text, x, want) in cases {
            let got = d(text).eval(x).unwrap();
            assert!((got - want).abs() < 1e-15, "{text}: {got} vs {want}");
        }
    }
}
