use std::fmt;

use crate::lc::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// The fixed infinitesimal scale.
    S,
    I,
    T,
    Z,
    /// `y`, `y'`, `y''`: the unknown of an IVP and its derivatives.
    Y(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    H,
    Delta,
    /// `delta_n(k, ·)`: the `k`-th derivative of delta.
    DeltaN(u32),
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::H => "H",
            Func::Delta => "delta",
            Func::DeltaN(_) => "delta_n",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "H" => Func::H,
            "delta" => Func::Delta,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// A non-negative literal; signs are carried by `Neg`.
    Num(f64),
    Sym(Symbol),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True if the symbol occurs anywhere in the tree.
    pub fn mentions(&self, sym: Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => *s == sym,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.mentions(sym),
            Expr::Bin(_, a, b) => a.mentions(sym) || b.mentions(sym),
        }
    }

    pub fn mentions_func(&self, pred: &dyn Fn(Func) -> bool) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => false,
            Expr::Call(f, a) => pred(*f) || a.mentions_func(pred),
            Expr::Neg(a) | Expr::Pow(a, _) => a.mentions_func(pred),
            Expr::Bin(_, a, b) => a.mentions_func(pred) || b.mentions_func(pred),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::S => f.write_str("s"),
            Symbol::I => f.write_str("i"),
            Symbol::T => f.write_str("t"),
            Symbol::Z => f.write_str("z"),
            Symbol::Y(k) => write!(f, "y{}", "'".repeat(*k as usize)),
        }
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Exponent) -> fmt::Result {
    if e.is_integer() && !e.is_negative() {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                write_wrapped(f, a, a.precedence() < p)?;
                f.write_str(op.symbol())?;
                // left-associative: an equal-precedence right operand needs parentheses
                write_wrapped(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, e) => {
                write_wrapped(f, a, a.precedence() <= 4)?;
                f.write_str("^")?;
                write_exponent(f, e)
            }
            Expr::Call(Func::DeltaN(k), a) => write!(f, "delta_n({k}, {a})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `~=`: weak equality.
    Weak,
    /// `=`: exact equality.
    Exact,
    /// `~`: association.
    Associated,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Weak => "~=",
            Relation::Exact => "=",
            Relation::Associated => "~",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.relation.symbol(), self.rhs)
    }
}
