//! Concrete-syntax printing. Output re-parses to an equal AST.

use std::fmt;

use super::ast::*;

impl fmt::Display for PropertyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.scope)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Globally(p) => write!(f, "globally {p}"),
            Scope::BeforeT(t, p) => write!(f, "before {t} {p}"),
            Scope::AfterT(t, p) => write!(f, "after {t} {p}"),
            Scope::At(t, p) => write!(f, "at {t} {p}"),
            Scope::BetweenT(n, m, p) => write!(f, "between {n} and {m} {p}"),
            Scope::BeforeP(p1, p) => write!(f, "before {p1} {p}"),
            Scope::AfterP(p1, p) => write!(f, "after {p1} {p}"),
            Scope::BetweenP(p1, p2, p) => write!(f, "between {p1} and {p2} {p}"),
        }
    }
}

/// Wraps a pattern-leading expression in parens when it would start with a
/// number, so `before (3) becomes > 1 ...` is not read as a time bound.
struct Lead<'a>(&'a SignalExpr);

impl fmt::Display for Lead<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut e = self.0;
        while let SignalExpr::BinOp(_, l, _) = e {
            e = l;
        }
        if matches!(e, SignalExpr::Const(_)) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn write_constraint(f: &mut fmt::Formatter<'_>, name: &str, c: &Option<Constraint>) -> fmt::Result {
    if let Some(c) = c {
        write!(f, " {name} {} {}", c.op.symbol(), c.value)?;
    }
    Ok(())
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Assert(c) => write!(f, "assert {c}"),
            Pattern::Becomes(s, op, v) => write!(f, "{} becomes {} {v}", Lead(s), op.symbol()),
            Pattern::IfThen(p1, within, p2) => {
                write!(f, "if {p1} then ")?;
                if let Some(w) = within {
                    write!(f, "within {} {} ", w.bowtie.keyword(), w.d)?;
                }
                write!(f, "{p2}")
            }
            Pattern::Spike { signal, width, amplitude } => {
                write!(f, "exists spike in {signal}")?;
                if width.is_some() || amplitude.is_some() {
                    f.write_str(" with")?;
                }
                write_constraint(f, "width", width)?;
                write_constraint(f, "amplitude", amplitude)
            }
            Pattern::Oscillation { signal, p2p_amp, period } => {
                write!(f, "exists oscillation in {signal}")?;
                if p2p_amp.is_some() || period.is_some() {
                    f.write_str(" with")?;
                }
                write_constraint(f, "p2pAmp", p2p_amp)?;
                write_constraint(f, "period", period)
            }
            Pattern::Rises { signal, monotonic, target } => {
                write!(f, "{} rises {}reaching {target}", Lead(signal), if *monotonic { "monotonically " } else { "" })
            }
            Pattern::Falls { signal, monotonic, target } => {
                write!(f, "{} falls {}reaching {target}", Lead(signal), if *monotonic { "monotonically " } else { "" })
            }
            Pattern::Overshoots { signal, monotonic, target, margin } => write!(
                f,
                "{} overshoots {}{target} by {margin}",
                Lead(signal),
                if *monotonic { "monotonically " } else { "" }
            ),
            Pattern::Undershoots { signal, monotonic, target, margin } => write!(
                f,
                "{} undershoots {}{target} by {margin}",
                Lead(signal),
                if *monotonic { "monotonically " } else { "" }
            ),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_cond(self, f, 0, false)
    }
}

fn cond_prec(c: &Condition) -> u8 {
    match c {
        Condition::Or(..) => 1,
        Condition::And(..) => 2,
        Condition::Cmp(..) => 3,
    }
}

fn fmt_cond(c: &Condition, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
    let p = cond_prec(c);
    let paren = p < parent || (p == parent && right);
    if paren {
        f.write_str("(")?;
    }
    match c {
        Condition::Or(a, b) | Condition::And(a, b) => {
            fmt_cond(a, f, p, false)?;
            f.write_str(if p == 1 { " or " } else { " and " })?;
            fmt_cond(b, f, p, true)?;
        }
        Condition::Cmp(s, op, v) => write!(f, "{s} {} {v}", op.symbol())?,
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for SignalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f, 0, false)
    }
}

fn fmt_expr(e: &SignalExpr, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
    match e {
        SignalExpr::Var(v) => f.write_str(v),
        SignalExpr::Const(c) => write!(f, "{c}"),
        SignalExpr::BinOp(op, l, r) => {
            let p = op.precedence();
            let paren = p < parent || (p == parent && right);
            if paren {
                f.write_str("(")?;
            }
            fmt_expr(l, f, p, false)?;
            write!(f, " {} ", op.symbol())?;
            fmt_expr(r, f, p, true)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}
