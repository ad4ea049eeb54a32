//! A small symbolic expression engine.
//!
//! Expressions are immutable trees over exact rational constants, symbols
//! (base variables, jet coordinates, opaque functions) and the operations sum,
//! product, rational power, `exp` and `ln`. Constructors normalize eagerly:
//! rational constants fold, like terms and like factors collect, and a few
//! safe exp/ln/power identities are applied. There is no canonical form;
//! identity questions go through [`is_identically_zero`].

mod diff;
mod eval;
mod sample;
mod symbol;
mod text;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::{Arc, LazyLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use diff::{differentiate, differentiate_with, total_derivative};
pub use eval::{eval, eval_with_scale, CompiledExpr, Point};
pub use sample::{is_identically_zero, SampleConfig, Witness, ZeroTest, DEFAULT_SEED};
pub use symbol::{sym, FieldRole, JetContext, Symbol, SymbolKind};
pub use text::{parse, rational_text};

/// Exact rational number.
pub type Q = BigRational;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("cannot differentiate with respect to `{0}`: not a plain variable")]
    NotAVariable(String),
    #[error("derivative coordinate `{0}` exceeds the registered jet order")]
    OutOfOrder(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("sampling gave up after {attempts} attempts: {last}")]
    PersistentDomain { attempts: usize, last: String },
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exponent of a power node. Rational exponents are exact; real ones are
/// accepted but make the expression non-exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(Q),
    Real(f64),
}

impl Exponent {
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Exponent::Real(r) => *r,
        }
    }

    fn is_integer(&self) -> bool {
        matches!(self, Exponent::Rational(q) if q.is_integer())
    }

    fn is_zero(&self) -> bool {
        match self {
            Exponent::Rational(q) => q.is_zero(),
            Exponent::Real(r) => *r == 0.0,
        }
    }

    fn is_one(&self) -> bool {
        match self {
            Exponent::Rational(q) => q.is_one(),
            Exponent::Real(r) => *r == 1.0,
        }
    }

    fn add(&self, other: &Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => Exponent::Rational(a + b),
            _ => Exponent::Real(self.to_f64() + other.to_f64()),
        }
    }

    fn mul(&self, other: &Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => Exponent::Rational(a * b),
            _ => Exponent::Real(self.to_f64() * other.to_f64()),
        }
    }

    fn cmp_total(&self, other: &Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a.cmp(b),
            (Exponent::Rational(_), Exponent::Real(_)) => Ordering::Less,
            (Exponent::Real(_), Exponent::Rational(_)) => Ordering::Greater,
            (Exponent::Real(a), Exponent::Real(b)) => a.total_cmp(b),
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(Q),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Exponent),
    Exp(Expr),
    Ln(Expr),
}

/// Shared immutable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

static ZERO: LazyLock<Expr> = LazyLock::new(|| Expr(Arc::new(Node::Const(Q::zero()))));
static ONE: LazyLock<Expr> = LazyLock::new(|| Expr(Arc::new(Node::Const(Q::one()))));

/// Largest integer power folded exactly for rational constants.
const MAX_FOLD_POWER: u32 = 64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn zero() -> Expr {
        ZERO.clone()
    }

    pub fn one() -> Expr {
        ONE.clone()
    }

    pub fn constant(c: Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return Expr::one();
        }
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(qi(n))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::constant(q(n, d))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr(Arc::new(Node::Sym(s.clone())))
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.as_const(), Some(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.as_const(), Some(c) if c.is_one())
    }

    /// Sum with like-term collection and constant folding.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Q::zero();
        let mut collected: BTreeMap<Expr, Q> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(term) = stack.pop() {
            match term.node() {
                Node::Const(c) => constant += c,
                Node::Add(children) => stack.extend(children.iter().rev().cloned()),
                _ => {
                    let (coeff, key) = term.split_coefficient();
                    *collected.entry(key).or_insert_with(Q::zero) += coeff;
                }
            }
        }
        let mut out = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for (key, coeff) in collected {
            if coeff.is_zero() {
                continue;
            }
            out.push(key.scaled(coeff));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr(Arc::new(Node::Add(out))),
        }
    }

    /// `c * key` where `key` is a coefficient-free term as produced by `split_coefficient`.
    fn scaled(self, c: Q) -> Expr {
        if c.is_one() {
            return self;
        }
        if c.is_zero() {
            return Expr::zero();
        }
        let mut factors = vec![Expr::constant(c)];
        match self.node() {
            Node::Mul(fs) => factors.extend(fs.iter().cloned()),
            _ => factors.push(self),
        }
        Expr(Arc::new(Node::Mul(factors)))
    }

    /// Split into rational coefficient and coefficient-free rest.
    fn split_coefficient(&self) -> (Q, Expr) {
        match self.node() {
            Node::Const(c) => (c.clone(), Expr::one()),
            Node::Mul(fs) => match fs[0].node() {
                Node::Const(c) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr(Arc::new(Node::Mul(rest)))
                    };
                    (c.clone(), rest)
                }
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    /// Product with factor collection (`x^a * x^b -> x^(a+b)`), exp merging
    /// and constant folding.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Q::one();
        let mut bases: BTreeMap<Expr, Exponent> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                Node::Mul(children) => stack.extend(children.iter().rev().cloned()),
                Node::Exp(a) => exp_args.push(a.clone()),
                Node::Pow(b, e) => {
                    let entry = bases.entry(b.clone()).or_insert(Exponent::Rational(Q::zero()));
                    *entry = entry.add(e);
                }
                _ => {
                    let entry = bases.entry(f.clone()).or_insert(Exponent::Rational(Q::zero()));
                    *entry = entry.add(&Exponent::Rational(Q::one()));
                }
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
        let mut reflatten = false;
        for (base, e) in bases {
            let p = Expr::pow_exponent(base, e);
            match p.node() {
                Node::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                Node::Mul(_) | Node::Exp(_) => {
                    reflatten = true;
                    out.push(p);
                }
                _ => out.push(p),
            }
        }
        if !exp_args.is_empty() {
            let e = Expr::exp(Expr::sum(exp_args));
            if !e.is_one() {
                if !matches!(e.node(), Node::Exp(_)) {
                    reflatten = true;
                }
                out.push(e);
            }
        }
        if reflatten {
            out.push(Expr::constant(coeff));
            return Expr::product(out);
        }
        out.sort();
        if out.is_empty() {
            return Expr::constant(coeff);
        }
        if coeff.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coeff.is_one() {
            out.insert(0, Expr::constant(coeff));
        }
        Expr(Arc::new(Node::Mul(out)))
    }

    pub fn pow(base: Expr, e: Q) -> Expr {
        Expr::pow_exponent(base, Exponent::Rational(e))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, qi(n))
    }

    /// Power with a real (non-exact) exponent.
    pub fn powf(base: Expr, e: f64) -> Expr {
        Expr::pow_exponent(base, Exponent::Real(e))
    }

    pub fn sqrt(base: Expr) -> Expr {
        Expr::pow(base, q(1, 2))
    }

    pub fn pow_exponent(base: Expr, e: Exponent) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base;
        }
        match base.node() {
            Node::Const(c) => {
                if c.is_one() {
                    return Expr::one();
                }
                if let Exponent::Rational(r) = &e {
                    if let Some(v) = fold_rational_power(c, r) {
                        return Expr::constant(v);
                    }
                }
            }
            Node::Pow(inner, p) => {
                if e.is_integer() || inner.is_positive() {
                    return Expr::pow_exponent(inner.clone(), p.mul(&e));
                }
            }
            Node::Exp(a) => {
                let factor = match &e {
                    Exponent::Rational(r) => Expr::constant(r.clone()),
                    Exponent::Real(_) => return Expr(Arc::new(Node::Pow(base.clone(), e))),
                };
                return Expr::exp(Expr::product([factor, a.clone()]));
            }
            Node::Mul(fs) => {
                if e.is_integer() {
                    return Expr::product(fs.iter().map(|f| Expr::pow_exponent(f.clone(), e.clone())));
                }
                let negative = fs.iter().any(|f| matches!(f.node(), Node::Const(c) if c.is_negative()));
                let (pos, rest): (Vec<Expr>, Vec<Expr>) = fs.iter().cloned().partition(|f| f.is_positive());
                if !pos.is_empty() && !negative {
                    let mut out: Vec<Expr> = pos
                        .into_iter()
                        .map(|f| Expr::pow_exponent(f, e.clone()))
                        .collect();
                    if !rest.is_empty() {
                        let r = if rest.len() == 1 {
                            rest.into_iter().next().unwrap()
                        } else {
                            Expr(Arc::new(Node::Mul(rest)))
                        };
                        out.push(Expr(Arc::new(Node::Pow(r, e))));
                    }
                    return Expr::product(out);
                }
            }
            _ => {}
        }
        Expr(Arc::new(Node::Pow(base, e)))
    }

    pub fn exp(a: Expr) -> Expr {
        match a.node() {
            Node::Const(c) if c.is_zero() => return Expr::one(),
            Node::Ln(b) => return b.clone(),
            Node::Mul(fs) if fs.len() == 2 => {
                if let (Node::Const(c), Node::Ln(b)) = (fs[0].node(), fs[1].node()) {
                    return Expr::pow(b.clone(), c.clone());
                }
            }
            _ => {}
        }
        Expr(Arc::new(Node::Exp(a)))
    }

    pub fn ln(a: Expr) -> Expr {
        match a.node() {
            Node::Const(c) if c.is_one() => return Expr::zero(),
            Node::Exp(b) => return b.clone(),
            Node::Pow(b, Exponent::Rational(r)) if b.is_positive() => {
                return Expr::product([Expr::constant(r.clone()), Expr::ln(b.clone())]);
            }
            Node::Mul(fs) => {
                let (pos, rest): (Vec<Expr>, Vec<Expr>) = fs
                    .iter()
                    .cloned()
                    .partition(|f| f.is_positive() && f.as_const().is_none());
                if !pos.is_empty() {
                    let mut terms: Vec<Expr> = pos.into_iter().map(Expr::ln).collect();
                    if !rest.is_empty() {
                        terms.push(Expr(Arc::new(Node::Ln(Expr::product(rest)))));
                    }
                    return Expr::sum(terms);
                }
            }
            _ => {}
        }
        Expr(Arc::new(Node::Ln(a)))
    }

    /// Positive on the whole domain under the `t, x, u > 0` convention.
    pub fn is_positive(&self) -> bool {
        match self.node() {
            Node::Const(c) => c.is_positive(),
            Node::Sym(s) => s.is_positive(),
            Node::Exp(_) => true,
            Node::Pow(b, _) => b.is_positive(),
            Node::Mul(fs) | Node::Add(fs) => fs.iter().all(Expr::is_positive),
            Node::Ln(_) => false,
        }
    }

    /// Free symbols, sorted by name.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.node() {
                Node::Const(_) => {}
                Node::Sym(s) => {
                    out.insert(s.clone());
                }
                Node::Add(cs) | Node::Mul(cs) => stack.extend(cs.iter().cloned()),
                Node::Pow(b, _) | Node::Exp(b) | Node::Ln(b) => stack.push(b.clone()),
            }
        }
        out
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.free_symbols().contains(s)
    }

    /// False if any power carries a real exponent.
    pub fn is_exact(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => true,
            Node::Add(cs) | Node::Mul(cs) => cs.iter().all(Expr::is_exact),
            Node::Pow(b, Exponent::Rational(_)) => b.is_exact(),
            Node::Pow(_, Exponent::Real(_)) => false,
            Node::Exp(a) | Node::Ln(a) => a.is_exact(),
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.node() {
                Node::Const(_) | Node::Sym(_) => {}
                Node::Add(cs) | Node::Mul(cs) => stack.extend(cs.iter().cloned()),
                Node::Pow(b, _) | Node::Exp(b) | Node::Ln(b) => stack.push(b.clone()),
            }
        }
        seen.len()
    }

    /// Bottom-up rebuild, memoized on shared subtrees.
    pub(crate) fn map_bottom_up(&self, leaf: &mut dyn FnMut(&Expr) -> Option<Expr>) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        self.map_rec(leaf, &mut memo)
    }

    fn map_rec(&self, leaf: &mut dyn FnMut(&Expr) -> Option<Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(done) = memo.get(&self.ptr()) {
            return done.clone();
        }
        let out = match self.node() {
            Node::Const(_) | Node::Sym(_) => leaf(self).unwrap_or_else(|| self.clone()),
            Node::Add(cs) => Expr::sum(cs.iter().map(|c| c.map_rec(leaf, memo)).collect::<Vec<_>>()),
            Node::Mul(cs) => Expr::product(cs.iter().map(|c| c.map_rec(leaf, memo)).collect::<Vec<_>>()),
            Node::Pow(b, e) => Expr::pow_exponent(b.map_rec(leaf, memo), e.clone()),
            Node::Exp(a) => Expr::exp(a.map_rec(leaf, memo)),
            Node::Ln(a) => Expr::ln(a.map_rec(leaf, memo)),
        };
        memo.insert(self.ptr(), out.clone());
        out
    }

    /// Simultaneous substitution of symbols.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        self.map_bottom_up(&mut |leaf| match leaf.node() {
            Node::Sym(s) => bindings.get(s).cloned(),
            _ => None,
        })
    }

    pub fn subs(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), value.clone());
        self.substitute(&b)
    }

    /// Re-run every normalizing constructor over the tree.
    pub fn simplify(&self) -> Expr {
        self.map_bottom_up(&mut |_| None)
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Node::Const(_) => 0,
            Node::Sym(_) => 1,
            Node::Pow(..) => 2,
            Node::Mul(_) => 3,
            Node::Add(_) => 4,
            Node::Exp(_) => 5,
            Node::Ln(_) => 6,
        }
    }
}

/// Exact `c^r` when the result is rational.
fn fold_rational_power(c: &Q, r: &Q) -> Option<Q> {
    let num = r.numer().to_i64()?;
    let den = r.denom().to_u32()?;
    if num.unsigned_abs() > MAX_FOLD_POWER as u64 {
        return None;
    }
    if c.is_zero() {
        return if num > 0 { Some(Q::zero()) } else { None };
    }
    let root = if den == 1 {
        c.clone()
    } else {
        if c.is_negative() {
            return None;
        }
        let n = exact_root(c.numer(), den)?;
        let d = exact_root(c.denom(), den)?;
        Q::new(n, d)
    };
    let p = num.unsigned_abs() as u32;
    let v = Q::new(num_traits::pow(root.numer().clone(), p as usize), num_traits::pow(root.denom().clone(), p as usize));
    Some(if num < 0 { v.recip() } else { v })
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let r = self.rank().cmp(&other.rank());
        if r != Ordering::Equal {
            return r;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.cmp(b),
            (Node::Sym(a), Node::Sym(b)) => a.cmp(b),
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => a.cmp(b),
            (Node::Pow(a, ea), Node::Pow(b, eb)) => a.cmp(b).then_with(|| ea.cmp_total(eb)),
            (Node::Exp(a), Node::Exp(b)) | (Node::Ln(a), Node::Ln(b)) => a.cmp(b),
            _ => unreachable!("rank equality implies identical node kinds"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::symbol(s)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::symbol(&s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(c: Q) -> Self {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, Expr::int(rhs))
            }
        }
        impl ops::$trait<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), Expr::int(rhs))
            }
        }
        impl ops::$trait<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(Expr::int(self), rhs)
            }
        }
        impl ops::$trait<&Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(Expr::int(self), rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, Expr::product([Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, Expr::powi(b, -1)]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self.clone()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        sym::x().into()
    }
    fn u() -> Expr {
        sym::u().into()
    }

    #[test]
    fn x_times_inverse_is_one() {
        assert!((x() * Expr::powi(x(), -1)).is_one());
    }

    #[test]
    fn negative_products_keep_their_fractional_power() {
        let e = Expr::pow(Expr::int(-1) * (u() + 3), q(4, 3));
        assert!(matches!(e.node(), Node::Pow(b, _) if matches!(b.node(), Node::Mul(_))));
        let mut p = Point::new();
        p.insert(sym::u(), -5.0);
        assert!((eval(&e, &p).unwrap() - 2f64.powf(4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rational_powers_merge() {
        let e = Expr::pow(u(), q(4, 3)) * Expr::pow(u(), q(-1, 3));
        assert_eq!(e, u());
    }

    #[test]
    fn like_terms_cancel() {
        let c: Expr = Symbol::parameter("c").into();
        let term = Expr::int(12) * &c * Expr::powi(x(), -3);
        assert!((&term - &term).is_zero());
    }

    #[test]
    fn constants_fold() {
        assert_eq!(Expr::rational(1, 2) + Expr::rational(1, 3), Expr::rational(5, 6));
        assert_eq!(Expr::pow(Expr::int(8), q(4, 3)), Expr::int(16));
        assert_eq!(Expr::pow(Expr::int(2), q(-3, 1)), Expr::rational(1, 8));
        // 2^(1/2) is irrational and stays symbolic
        assert!(matches!(Expr::sqrt(Expr::int(2)).node(), Node::Pow(..)));
    }

    #[test]
    fn zero_annihilates() {
        assert!((Expr::zero() * Expr::exp(u())).is_zero());
    }

    #[test]
    fn exp_ln_identities() {
        assert_eq!(Expr::ln(Expr::exp(u())), u());
        assert_eq!(Expr::exp(Expr::ln(x())), x());
        assert!(Expr::ln(Expr::one()).is_zero());
        assert!(Expr::exp(Expr::zero()).is_one());
        let k = Expr::int(3);
        assert_eq!(Expr::exp(k * Expr::ln(u())), Expr::powi(u(), 3));
        // ln of a positive product splits
        let t: Expr = sym::t().into();
        let y = x() * Expr::exp(Expr::int(-2) * &t);
        assert_eq!(Expr::ln(y), Expr::ln(x()) - Expr::int(2) * t);
    }

    #[test]
    fn exp_factors_merge() {
        let t: Expr = sym::t().into();
        let e = Expr::exp(t.clone()) * Expr::exp(-t);
        assert!(e.is_one());
    }

    #[test]
    fn nested_fractional_powers_of_signed_bases_stay_put() {
        let c: Expr = Symbol::parameter("c").into();
        let base = Expr::int(1) - c;
        let e = Expr::pow(Expr::powi(base.clone(), 2), q(1, 2));
        // (b^2)^(1/2) = |b|, not b
        assert_ne!(e, base);
        let e2 = Expr::powi(Expr::pow(base.clone(), q(1, 3)), 3);
        assert_eq!(e2, base);
    }

    #[test]
    fn real_exponent_is_not_exact() {
        assert!(!Expr::powf(u(), 1.5).is_exact());
        assert!(Expr::pow(u(), q(3, 2)).is_exact());
    }
}
