use std::collections::BTreeSet;

/// Disjunction of clauses.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyAst {
    pub clauses: Vec<Clause>,
}

/// Conjunction of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub negated: bool,
    pub scope: Scope,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scope {
    Globally(Pattern),
    BeforeT(f64, Pattern),
    AfterT(f64, Pattern),
    At(f64, Pattern),
    BetweenT(f64, f64, Pattern),
    BeforeP(Box<Pattern>, Pattern),
    AfterP(Box<Pattern>, Pattern),
    BetweenP(Box<Pattern>, Box<Pattern>, Pattern),
}

impl Scope {
    /// The pattern the scope constrains.
    pub fn pattern(&self) -> &Pattern {
        match self {
            Scope::Globally(p)
            | Scope::BeforeT(_, p)
            | Scope::AfterT(_, p)
            | Scope::At(_, p)
            | Scope::BetweenT(_, _, p)
            | Scope::BeforeP(_, p)
            | Scope::AfterP(_, p)
            | Scope::BetweenP(_, _, p) => p,
        }
    }

    pub fn is_event(&self) -> bool {
        matches!(self, Scope::BeforeP(..) | Scope::AfterP(..) | Scope::BetweenP(..))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Eq,
    Ne,
    Le,
    Ge,
}

impl CmpOp {
    /// `eps` widens `=` and `<>` only.
    pub fn apply(self, a: f64, b: f64, eps: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => (a - b).abs() <= eps,
            CmpOp::Ne => (a - b).abs() > eps,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator obtained by negating both sides: `a op b` iff `-a op.mirror() -b`.
    pub fn mirror(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
        }
    }

    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Gt, CmpOp::Eq, CmpOp::Ne, CmpOp::Le, CmpOp::Ge];
}

/// The `within` comparison of if-then.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bowtie {
    Exactly,
    AtMost,
    AtLeast,
}

impl Bowtie {
    pub fn as_cmp(self) -> CmpOp {
        match self {
            Bowtie::Exactly => CmpOp::Eq,
            Bowtie::AtMost => CmpOp::Le,
            Bowtie::AtLeast => CmpOp::Ge,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Bowtie::Exactly => "exactly",
            Bowtie::AtMost => "at most",
            Bowtie::AtLeast => "at least",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Within {
    pub bowtie: Bowtie,
    pub d: f64,
}

/// An optional `op value` constraint attached to spike/oscillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub op: CmpOp,
    pub value: f64,
}

impl Constraint {
    pub fn new(op: CmpOp, value: f64) -> Self {
        Constraint { op, value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Assert(Condition),
    Becomes(SignalExpr, CmpOp, f64),
    IfThen(Box<Pattern>, Option<Within>, Box<Pattern>),
    Spike { signal: SignalExpr, width: Option<Constraint>, amplitude: Option<Constraint> },
    Oscillation { signal: SignalExpr, p2p_amp: Option<Constraint>, period: Option<Constraint> },
    Rises { signal: SignalExpr, monotonic: bool, target: f64 },
    Falls { signal: SignalExpr, monotonic: bool, target: f64 },
    Overshoots { signal: SignalExpr, monotonic: bool, target: f64, margin: f64 },
    Undershoots { signal: SignalExpr, monotonic: bool, target: f64, margin: f64 },
}

impl Pattern {
    /// Short family name used in diagnosis ids.
    pub fn family(&self) -> &'static str {
        match self {
            Pattern::Assert(_) => "assert",
            Pattern::Becomes(..) => "becomes",
            Pattern::IfThen(..) => "if_then",
            Pattern::Spike { .. } => "spike",
            Pattern::Oscillation { .. } => "oscillation",
            Pattern::Rises { .. } | Pattern::Falls { .. } => "rises",
            Pattern::Overshoots { .. } | Pattern::Undershoots { .. } => "overshoots",
        }
    }

    /// True for falls/undershoots, the mirrored forms.
    pub fn is_dual(&self) -> bool {
        matches!(self, Pattern::Falls { .. } | Pattern::Undershoots { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Cmp(SignalExpr, CmpOp, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalExpr {
    Var(String),
    Const(f64),
    BinOp(BinOp, Box<SignalExpr>, Box<SignalExpr>),
}

impl SignalExpr {
    pub fn var(name: &str) -> Self {
        SignalExpr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, l: SignalExpr, r: SignalExpr) -> Self {
        SignalExpr::BinOp(op, Box::new(l), Box::new(r))
    }

    /// `0 - self`, the form used when dualizing a signal.
    pub fn negated(&self) -> Self {
        SignalExpr::bin(BinOp::Sub, SignalExpr::Const(0.0), self.clone())
    }

    pub fn eval(&self, lookup: &mut impl FnMut(&str) -> f64) -> f64 {
        match self {
            SignalExpr::Var(v) => lookup(v),
            SignalExpr::Const(c) => *c,
            SignalExpr::BinOp(op, l, r) => {
                let a = l.eval(lookup);
                let b = r.eval(lookup);
                op.apply(a, b)
            }
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            SignalExpr::Var(v) => {
                out.insert(v.clone());
            }
            SignalExpr::Const(_) => {}
            SignalExpr::BinOp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Condition {
    pub fn cmp(s: SignalExpr, op: CmpOp, v: f64) -> Self {
        Condition::Cmp(s, op, v)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Condition::Cmp(s, _, _) => s.collect_vars(out),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Pattern {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Pattern::Assert(c) => c.collect_vars(out),
            Pattern::Becomes(s, _, _) => s.collect_vars(out),
            Pattern::IfThen(p1, _, p2) => {
                p1.collect_vars(out);
                p2.collect_vars(out);
            }
            Pattern::Spike { signal, .. }
            | Pattern::Oscillation { signal, .. }
            | Pattern::Rises { signal, .. }
            | Pattern::Falls { signal, .. }
            | Pattern::Overshoots { signal, .. }
            | Pattern::Undershoots { signal, .. } => signal.collect_vars(out),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Scope {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Scope::BeforeP(p1, _) | Scope::AfterP(p1, _) => p1.collect_vars(out),
            Scope::BetweenP(p1, p2, _) => {
                p1.collect_vars(out);
                p2.collect_vars(out);
            }
            _ => {}
        }
        self.pattern().collect_vars(out);
    }
}

impl Atom {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.scope.collect_vars(&mut out);
        out
    }
}

impl PropertyAst {
    /// All atoms in source order.
    pub fn atoms(&self) -> Vec<&Atom> {
        self.clauses.iter().flat_map(|c| c.atoms.iter()).collect()
    }

    pub fn used_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.scope.collect_vars(&mut out);
        }
        out
    }
}

pub fn atoms_of(property: &PropertyAst) -> Vec<&Atom> {
    property.atoms()
}

pub fn used_variables(property: &PropertyAst) -> BTreeSet<String> {
    property.used_variables()
}
