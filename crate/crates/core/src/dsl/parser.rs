//! Recursive-descent parser.
//!
//! Conditions share `and`/`or` with clauses and with `between p1 and p2`, so
//! after a connective the parser only continues a condition when the next
//! tokens actually form a comparison; otherwise it backtracks.

use super::ast::*;
use super::lexer::{tokenize, Kw, Tok, Token};
use super::{DslError, ErrorKind};

/// Byte range of an atom in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

pub fn parse_property(src: &str) -> Result<PropertyAst, DslError> {
    parse_property_spanned(src).map(|(p, _)| p)
}

/// Also returns one span per atom, in [`PropertyAst::atoms`] order.
pub fn parse_property_spanned(src: &str) -> Result<(PropertyAst, Vec<Span>), DslError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { toks: tokens, pos: 0, spans: Vec::new() };
    let prop = p.property()?;
    p.expect_eof()?;
    Ok((prop, p.spans))
}

/// Parses a single pattern (no scope), e.g. `beta rises reaching 3`.
pub fn parse_pattern(src: &str) -> Result<Pattern, DslError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { toks: tokens, pos: 0, spans: Vec::new() };
    let pat = p.pattern()?;
    p.expect_eof()?;
    Ok(pat)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    spans: Vec<Span>,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> DslError {
        let t = &self.toks[self.pos];
        DslError::syntax(t.line, t.column, msg)
    }

    fn unexpected(&self, wanted: &str) -> DslError {
        let t = &self.toks[self.pos];
        match &t.tok {
            Tok::Ident(w) => DslError::new(
                ErrorKind::UnknownKeyword,
                t.line,
                t.column,
                format!("unknown keyword `{w}` (expected {wanted})"),
            ),
            other => DslError::syntax(t.line, t.column, format!("expected {wanted}, found {}", other.describe())),
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if *self.peek() == Tok::Kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: Kw, what: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(w) if w == word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("`and`, `or` or end of input")),
        }
    }

    fn property(&mut self) -> PResult<PropertyAst> {
        let mut clauses = vec![self.clause()?];
        while self.eat_kw(Kw::Or) {
            clauses.push(self.clause()?);
        }
        Ok(PropertyAst { clauses })
    }

    fn clause(&mut self) -> PResult<Clause> {
        let mut atoms = vec![self.atom()?];
        while self.eat_kw(Kw::And) {
            atoms.push(self.atom()?);
        }
        Ok(Clause { atoms })
    }

    fn atom(&mut self) -> PResult<Atom> {
        let start = self.toks[self.pos].start;
        let negated = if *self.peek() == Tok::Kw(Kw::Not) {
            let t = self.bump();
            match self.peek() {
                Tok::Kw(k) if k.is_scope() => {}
                _ => {
                    return Err(DslError::new(
                        ErrorKind::NotOnNonScope,
                        t.line,
                        t.column,
                        "`not` applies only to a scope (globally, before, after, at, between)",
                    ))
                }
            }
            true
        } else {
            false
        };
        let scope = self.scope()?;
        let end = self.toks[self.pos.saturating_sub(1)].end;
        self.spans.push(Span { start, end });
        Ok(Atom { negated, scope })
    }

    fn at_time(&self) -> bool {
        match self.peek() {
            Tok::Number(_) => true,
            Tok::Minus | Tok::Plus => matches!(self.peek_at(1), Tok::Number(_)),
            _ => false,
        }
    }

    fn scope(&mut self) -> PResult<Scope> {
        let kw = match self.peek() {
            Tok::Kw(k) if k.is_scope() => *k,
            _ => return Err(self.unexpected("a scope (globally, before, after, at, between)")),
        };
        self.bump();
        Ok(match kw {
            Kw::Globally => Scope::Globally(self.pattern()?),
            Kw::At => {
                let t = self.signed_number("a time")?;
                Scope::At(t, self.pattern()?)
            }
            Kw::Before | Kw::After => {
                if self.at_time() {
                    let t = self.signed_number("a time")?;
                    let p = self.pattern()?;
                    if kw == Kw::Before {
                        Scope::BeforeT(t, p)
                    } else {
                        Scope::AfterT(t, p)
                    }
                } else {
                    let p1 = Box::new(self.pattern()?);
                    let p = self.pattern()?;
                    if kw == Kw::Before {
                        Scope::BeforeP(p1, p)
                    } else {
                        Scope::AfterP(p1, p)
                    }
                }
            }
            Kw::Between => {
                if self.at_time() {
                    let n = self.signed_number("a time")?;
                    self.expect_kw(Kw::And, "`and`")?;
                    let m = self.signed_number("a time")?;
                    Scope::BetweenT(n, m, self.pattern()?)
                } else {
                    let p1 = Box::new(self.pattern()?);
                    self.expect_kw(Kw::And, "`and`")?;
                    let p2 = Box::new(self.pattern()?);
                    Scope::BetweenP(p1, p2, self.pattern()?)
                }
            }
            _ => unreachable!(),
        })
    }

    fn signed_number(&mut self, what: &str) -> PResult<f64> {
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        match *self.peek() {
            Tok::Number(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn cmp_op(&mut self) -> PResult<CmpOp> {
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Gt => CmpOp::Gt,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Le => CmpOp::Le,
            Tok::Ge => CmpOp::Ge,
            _ => return Err(self.unexpected("a comparison operator (<, >, =, <>, <=, >=)")),
        };
        self.bump();
        Ok(op)
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        match self.peek().clone() {
            Tok::Kw(Kw::Assert) => {
                self.bump();
                Ok(Pattern::Assert(self.condition()?))
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let p1 = self.pattern()?;
                self.expect_kw(Kw::Then, "`then`")?;
                let within = if self.eat_kw(Kw::Within) {
                    let bowtie = if self.eat_kw(Kw::Exactly) {
                        Bowtie::Exactly
                    } else if self.eat_kw(Kw::At) {
                        if self.eat_ident("most") {
                            Bowtie::AtMost
                        } else if self.eat_ident("least") {
                            Bowtie::AtLeast
                        } else {
                            return Err(self.unexpected("`most` or `least`"));
                        }
                    } else {
                        return Err(self.unexpected("`exactly`, `at most` or `at least`"));
                    };
                    let d = self.signed_number("a duration")?;
                    Some(Within { bowtie, d })
                } else {
                    None
                };
                let p2 = self.pattern()?;
                Ok(Pattern::IfThen(Box::new(p1), within, Box::new(p2)))
            }
            Tok::Kw(Kw::Exists) | Tok::Kw(Kw::Exist) => {
                self.bump();
                let is_spike = if self.eat_kw(Kw::Spike) {
                    true
                } else if self.eat_kw(Kw::Oscillation) {
                    false
                } else {
                    return Err(self.unexpected("`spike` or `oscillation`"));
                };
                self.expect_kw(Kw::In, "`in`")?;
                let signal = self.expr()?;
                let names: [&str; 2] = if is_spike { ["width", "amplitude"] } else { ["p2pAmp", "period"] };
                let mut slots: [Option<Constraint>; 2] = [None, None];
                let mut seen_with = false;
                loop {
                    let had_with = self.eat_kw(Kw::With);
                    seen_with |= had_with;
                    let cmp_next = matches!(self.peek_at(1), Tok::Lt | Tok::Gt | Tok::Eq | Tok::Ne | Tok::Le | Tok::Ge);
                    let which = match self.peek() {
                        Tok::Ident(w) if seen_with && cmp_next && w == names[0] => Some(0),
                        Tok::Ident(w) if seen_with && cmp_next && w == names[1] => Some(1),
                        _ => None,
                    };
                    match which {
                        Some(k) => {
                            let t = self.bump();
                            if slots[k].is_some() {
                                return Err(DslError::syntax(
                                    t.line,
                                    t.column,
                                    format!("duplicate `{}` constraint", names[k]),
                                ));
                            }
                            let op = self.cmp_op()?;
                            let value = self.signed_number("a number")?;
                            slots[k] = Some(Constraint::new(op, value));
                        }
                        None if had_with => return Err(self.unexpected(&format!("`{}` or `{}`", names[0], names[1]))),
                        None => break,
                    }
                }
                Ok(if is_spike {
                    Pattern::Spike { signal, width: slots[0], amplitude: slots[1] }
                } else {
                    Pattern::Oscillation { signal, p2p_amp: slots[0], period: slots[1] }
                })
            }
            Tok::Kw(k) => {
                Err(self.err_here(format!("expected a pattern, found keyword `{}`", format!("{k:?}").to_lowercase())))
            }
            _ => {
                let signal = self.expr()?;
                match self.peek().clone() {
                    Tok::Kw(Kw::Becomes) => {
                        self.bump();
                        let op = self.cmp_op()?;
                        let v = self.signed_number("a number")?;
                        Ok(Pattern::Becomes(signal, op, v))
                    }
                    Tok::Kw(k @ (Kw::Rises | Kw::Falls)) => {
                        self.bump();
                        let monotonic = self.eat_kw(Kw::Monotonically);
                        self.expect_kw(Kw::Reaching, "`reaching`")?;
                        let target = self.signed_number("a number")?;
                        Ok(if k == Kw::Rises {
                            Pattern::Rises { signal, monotonic, target }
                        } else {
                            Pattern::Falls { signal, monotonic, target }
                        })
                    }
                    Tok::Kw(k @ (Kw::Overshoots | Kw::Undershoots)) => {
                        self.bump();
                        let monotonic = self.eat_kw(Kw::Monotonically);
                        let target = self.signed_number("a number")?;
                        self.expect_kw(Kw::By, "`by`")?;
                        let margin = self.signed_number("a number")?;
                        Ok(if k == Kw::Overshoots {
                            Pattern::Overshoots { signal, monotonic, target, margin }
                        } else {
                            Pattern::Undershoots { signal, monotonic, target, margin }
                        })
                    }
                    _ => Err(self.unexpected("`becomes`, `rises`, `falls`, `overshoots` or `undershoots`")),
                }
            }
        }
    }

    fn condition(&mut self) -> PResult<Condition> {
        let mut c = self.cond_term()?;
        while let Some(rhs) = self.try_continue(Kw::Or, Self::cond_term)? {
            c = Condition::Or(Box::new(c), Box::new(rhs));
        }
        Ok(c)
    }

    fn cond_term(&mut self) -> PResult<Condition> {
        let mut c = self.cond_factor()?;
        while let Some(rhs) = self.try_continue(Kw::And, Self::cond_factor)? {
            c = Condition::And(Box::new(c), Box::new(rhs));
        }
        Ok(c)
    }

    /// Consumes `kw` followed by `f` if that parses; otherwise leaves the
    /// position untouched so the connective can close the enclosing construct.
    fn try_continue(&mut self, kw: Kw, f: fn(&mut Self) -> PResult<Condition>) -> PResult<Option<Condition>> {
        if *self.peek() != Tok::Kw(kw) {
            return Ok(None);
        }
        match self.peek_at(1) {
            Tok::Kw(k) if k.is_scope() || k.starts_pattern() || *k == Kw::Not => return Ok(None),
            Tok::Eof => return Ok(None),
            _ => {}
        }
        let save = self.pos;
        self.bump();
        match f(self) {
            Ok(c) => Ok(Some(c)),
            Err(_) => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    fn cond_factor(&mut self) -> PResult<Condition> {
        let save = self.pos;
        let first = (|| -> PResult<Condition> {
            let s = self.expr()?;
            let op = self.cmp_op()?;
            let v = self.signed_number("a number")?;
            Ok(Condition::Cmp(s, op, v))
        })();
        match first {
            Ok(c) => Ok(c),
            Err(e) => {
                let reached = self.pos;
                self.pos = save;
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let inner = self.condition();
                    match inner {
                        Ok(c) if *self.peek() == Tok::RParen => {
                            self.bump();
                            return Ok(c);
                        }
                        Ok(_) => {}
                        Err(e2) if self.pos > reached => return Err(e2),
                        Err(_) => {}
                    }
                }
                self.pos = reached;
                Err(e)
            }
        }
    }

    fn expr(&mut self) -> PResult<SignalExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = SignalExpr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<SignalExpr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            let t = self.bump();
            let rhs = self.unary()?;
            if op == BinOp::Div && rhs == SignalExpr::Const(0.0) {
                return Err(DslError::new(ErrorKind::DivisionByZero, t.line, t.column, "division by literal zero"));
            }
            lhs = SignalExpr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<SignalExpr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(match self.unary()? {
                    SignalExpr::Const(c) => SignalExpr::Const(-c),
                    e => SignalExpr::bin(BinOp::Sub, SignalExpr::Const(0.0), e),
                })
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<SignalExpr> {
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(SignalExpr::Const(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(SignalExpr::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("a signal or number")),
        }
    }
}
