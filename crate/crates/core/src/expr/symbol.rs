//! Symbols and the jet context they live in.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock};

use super::ExprError;

/// What a symbol stands for. Drives differentiation rules and sampling ranges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// Base coordinate such as `t`, `x` or `y`; positive by convention.
    Independent,
    /// Symbolic constant such as `c` or `k`.
    Parameter,
    /// A function of independent variables, or one of its derivative
    /// coordinates. `derivs` holds the differentiation variables in canonical
    /// (sorted) order, empty for the function value itself.
    Field {
        base: Arc<str>,
        args: Arc<str>,
        derivs: Arc<str>,
        role: FieldRole,
    },
}

/// How a field symbol behaves under differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldRole {
    /// Dependent variable of the jet space (`u`): a partial derivative treats
    /// it as an independent coordinate, only total derivatives move it.
    Jet,
    /// Opaque function such as `psi(t,x)`: partial derivatives produce its
    /// tracked derivative symbols, generated on demand.
    Opaque,
    /// Placeholder for the unknown of a reduced equation, e.g. `w(y)`.
    Placeholder,
}

#[derive(Debug)]
struct SymbolData {
    name: String,
    kind: SymbolKind,
    positive: bool,
}

/// An interned-by-name symbol. Equality, hashing and ordering use the name only.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    /// A base coordinate. Single-character names are required so derivative
    /// suffixes stay unambiguous.
    pub fn independent(name: &str) -> Symbol {
        debug_assert_eq!(name.chars().count(), 1, "independent variables are single letters");
        Symbol(Arc::new(SymbolData {
            name: name.to_string(),
            kind: SymbolKind::Independent,
            positive: true,
        }))
    }

    pub fn parameter(name: &str) -> Symbol {
        Symbol(Arc::new(SymbolData {
            name: name.to_string(),
            kind: SymbolKind::Parameter,
            positive: false,
        }))
    }

    /// A field symbol (value or derivative coordinate).
    pub fn field(base: &str, args: &str, derivs: &str, role: FieldRole) -> Symbol {
        let mut d: Vec<char> = derivs.chars().collect();
        d.sort_by_key(|c| args.find(*c).unwrap_or(usize::MAX));
        let derivs: String = d.into_iter().collect();
        let name = if derivs.is_empty() {
            base.to_string()
        } else {
            format!("{base}_{derivs}")
        };
        // u and the reduction placeholder are positive by the u > 0 convention;
        // derivative coordinates and opaque functions carry no sign information.
        let positive = derivs.is_empty() && role != FieldRole::Opaque;
        Symbol(Arc::new(SymbolData {
            name,
            kind: SymbolKind::Field {
                base: Arc::from(base),
                args: Arc::from(args),
                derivs: Arc::from(derivs.as_str()),
                role,
            },
            positive,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.0.kind
    }

    /// True when the domain convention guarantees a positive value.
    pub fn is_positive(&self) -> bool {
        self.0.positive
    }

    /// Derivative order for field symbols, 0 for everything else.
    pub fn order(&self) -> usize {
        match &self.0.kind {
            SymbolKind::Field { derivs, .. } => derivs.chars().count(),
            _ => 0,
        }
    }

    pub fn is_derivative_coordinate(&self) -> bool {
        self.order() > 0
    }

    /// The field symbol obtained by differentiating once more with respect to
    /// `var`, or `None` if this is not a field depending on `var`.
    pub fn field_derivative(&self, var: &str) -> Option<Symbol> {
        match &self.0.kind {
            SymbolKind::Field {
                base,
                args,
                derivs,
                role,
            } if args.contains(var) => {
                let d = format!("{derivs}{var}");
                Some(Symbol::field(base, args, &d, *role))
            }
            _ => None,
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}
impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

macro_rules! lazy_symbol {
    ($fn_name:ident, $ctor:expr) => {
        pub fn $fn_name() -> Symbol {
            static S: LazyLock<Symbol> = LazyLock::new(|| $ctor);
            S.clone()
        }
    };
}

/// Shorthands for the standard symbols of the (t, x, u) jet space.
pub mod sym {
    use super::*;

    lazy_symbol!(t, Symbol::independent("t"));
    lazy_symbol!(x, Symbol::independent("x"));
    lazy_symbol!(y, Symbol::independent("y"));
    lazy_symbol!(u, Symbol::field("u", "tx", "", FieldRole::Jet));
    lazy_symbol!(u_t, Symbol::field("u", "tx", "t", FieldRole::Jet));
    lazy_symbol!(u_x, Symbol::field("u", "tx", "x", FieldRole::Jet));
    lazy_symbol!(u_tt, Symbol::field("u", "tx", "tt", FieldRole::Jet));
    lazy_symbol!(u_tx, Symbol::field("u", "tx", "tx", FieldRole::Jet));
    lazy_symbol!(u_xx, Symbol::field("u", "tx", "xx", FieldRole::Jet));
    lazy_symbol!(u_xxx, Symbol::field("u", "tx", "xxx", FieldRole::Jet));
    lazy_symbol!(psi, Symbol::field("psi", "tx", "", FieldRole::Opaque));
    lazy_symbol!(phi, Symbol::field("phi", "tx", "", FieldRole::Opaque));
    lazy_symbol!(w, Symbol::field("w", "y", "", FieldRole::Placeholder));
    lazy_symbol!(w_y, Symbol::field("w", "y", "y", FieldRole::Placeholder));
    lazy_symbol!(w_yy, Symbol::field("w", "y", "yy", FieldRole::Placeholder));
}

#[derive(Debug, Clone)]
struct FieldDecl {
    args: String,
    role: FieldRole,
    max_order: Option<usize>,
}

/// The jet space: base variables, the dependent variable with its registered
/// derivative coordinates, and the opaque functions in play.
#[derive(Debug, Clone)]
pub struct JetContext {
    independents: Vec<String>,
    fields: BTreeMap<String, FieldDecl>,
}

impl Default for JetContext {
    fn default() -> Self {
        Self::standard()
    }
}

impl JetContext {
    /// `t, x, y`; `u(t,x)` up to third order; opaque `psi(t,x)`, `phi(t,x)`;
    /// reduction placeholder `w(y)`.
    pub fn standard() -> Self {
        let mut ctx = JetContext {
            independents: vec!["t".into(), "x".into(), "y".into()],
            fields: BTreeMap::new(),
        };
        ctx.declare_field("u", "tx", FieldRole::Jet, Some(3));
        ctx.declare_field("psi", "tx", FieldRole::Opaque, None);
        ctx.declare_field("phi", "tx", FieldRole::Opaque, None);
        ctx.declare_field("w", "y", FieldRole::Placeholder, Some(2));
        ctx
    }

    pub fn declare_field(&mut self, base: &str, args: &str, role: FieldRole, max_order: Option<usize>) {
        self.fields.insert(
            base.to_string(),
            FieldDecl {
                args: args.to_string(),
                role,
                max_order,
            },
        );
    }

    /// Resolve a textual name to a symbol: independents, registered fields and
    /// their derivative coordinates; anything else is a parameter.
    pub fn resolve(&self, name: &str) -> Result<Symbol, ExprError> {
        if self.independents.iter().any(|v| v == name) {
            return Ok(Symbol::independent(name));
        }
        let (base, derivs) = match name.split_once('_') {
            Some((b, d)) => (b, d),
            None => (name, ""),
        };
        if let Some(decl) = self.fields.get(base) {
            if !derivs.chars().all(|c| decl.args.contains(c)) {
                return Err(ExprError::Parse(format!(
                    "`{name}`: `{base}` does not depend on all of `{derivs}`"
                )));
            }
            if let Some(max) = decl.max_order {
                if derivs.chars().count() > max {
                    return Err(ExprError::OutOfOrder(name.to_string()));
                }
            }
            return Ok(Symbol::field(base, &decl.args, derivs, decl.role));
        }
        Ok(Symbol::parameter(name))
    }

    /// The derivative of a field symbol along `var`, honouring the registered
    /// maximum order.
    pub fn differentiate_field(&self, s: &Symbol, var: &str) -> Result<Option<Symbol>, ExprError> {
        let Some(d) = s.field_derivative(var) else {
            return Ok(None);
        };
        if let SymbolKind::Field { base, .. } = s.kind() {
            if let Some(decl) = self.fields.get(base.as_ref()) {
                if let Some(max) = decl.max_order {
                    if d.order() > max {
                        return Err(ExprError::OutOfOrder(d.name().to_string()));
                    }
                }
            }
        }
        Ok(Some(d))
    }

    /// Opaque derivative symbol, e.g. `opaque("psi", "xx")` is `psi_xx`.
    pub fn opaque(&self, base: &str, derivs: &str) -> Result<Symbol, ExprError> {
        let name = if derivs.is_empty() {
            base.to_string()
        } else {
            format!("{base}_{derivs}")
        };
        self.resolve(&name)
    }

    pub fn is_independent(&self, name: &str) -> bool {
        self.independents.iter().any(|v| v == name)
    }
}
