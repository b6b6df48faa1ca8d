use super::DslError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kw {
    Globally,
    Before,
    After,
    At,
    Between,
    And,
    Or,
    Not,
    Assert,
    Becomes,
    If,
    Then,
    Within,
    Exactly,
    Exists,
    Exist,
    Spike,
    Oscillation,
    In,
    With,
    Rises,
    Falls,
    Monotonically,
    Reaching,
    Overshoots,
    Undershoots,
    By,
}

impl Kw {
    fn lookup(word: &str) -> Option<Kw> {
        Some(match word {
            "globally" => Kw::Globally,
            "before" => Kw::Before,
            "after" => Kw::After,
            "at" => Kw::At,
            "between" => Kw::Between,
            "and" => Kw::And,
            "or" => Kw::Or,
            "not" => Kw::Not,
            "assert" => Kw::Assert,
            "becomes" => Kw::Becomes,
            "if" => Kw::If,
            "then" => Kw::Then,
            "within" => Kw::Within,
            "exactly" => Kw::Exactly,
            "exists" => Kw::Exists,
            "exist" => Kw::Exist,
            "spike" => Kw::Spike,
            "oscillation" => Kw::Oscillation,
            "in" => Kw::In,
            "with" => Kw::With,
            "rises" => Kw::Rises,
            "falls" => Kw::Falls,
            "monotonically" => Kw::Monotonically,
            "reaching" => Kw::Reaching,
            "overshoots" => Kw::Overshoots,
            "undershoots" => Kw::Undershoots,
            "by" => Kw::By,
            _ => return None,
        })
    }

    pub fn is_scope(self) -> bool {
        matches!(self, Kw::Globally | Kw::Before | Kw::After | Kw::At | Kw::Between)
    }

    pub fn starts_pattern(self) -> bool {
        matches!(self, Kw::Assert | Kw::If | Kw::Exists | Kw::Exist)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Kw(Kw),
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Gt,
    Eq,
    Ne,
    Le,
    Ge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`<>`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0usize;
    let byte_at = |k: usize| chars.get(k).map_or(src.len(), |c| c.0);
    while i < chars.len() {
        let (pos, c) = chars[i];
        let column = src[line_start..pos].chars().count() + 1;
        if c == '\n' {
            line += 1;
            line_start = pos + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start_i = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.1.is_ascii_digit())) {
            i = scan_number(&chars, i);
            let end_i = i;
            // a number running into a letter, digit or dot is malformed (`1.2.3`, `3abc`)
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '.' || chars[i].1 == '_') {
                i += 1;
            }
            let text = &src[pos..byte_at(i)];
            if i != end_i {
                return Err(DslError::malformed_number(line, column, text));
            }
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Tok::Number(v),
                _ => return Err(DslError::malformed_number(line, column, text)),
            }
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let word = &src[pos..byte_at(i)];
            match Kw::lookup(word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            }
        } else {
            let next = chars.get(i + 1).map(|c| c.1);
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '*' | '×' => Tok::Star,
                '/' | '÷' => Tok::Slash,
                '=' => Tok::Eq,
                '≤' => Tok::Le,
                '≥' => Tok::Ge,
                '≠' => Tok::Ne,
                '<' => match next {
                    Some('=') => {
                        i += 1;
                        Tok::Le
                    }
                    Some('>') => {
                        i += 1;
                        Tok::Ne
                    }
                    _ => Tok::Lt,
                },
                '>' => match next {
                    Some('=') => {
                        i += 1;
                        Tok::Ge
                    }
                    _ => Tok::Gt,
                },
                other => return Err(DslError::syntax(line, column, format!("unexpected character `{other}`"))),
            }
        };
        out.push(Token { tok, start: byte_at(start_i), end: byte_at(i), line, column });
    }
    let column = src[line_start..].chars().count() + 1;
    out.push(Token { tok: Tok::Eof, start: src.len(), end: src.len(), line, column });
    Ok(out)
}

/// digits [. digits] [e [+-] digits]; returns the index after the number.
fn scan_number(chars: &[(usize, char)], mut i: usize) -> usize {
    let digit = |k: usize| chars.get(k).is_some_and(|c| c.1.is_ascii_digit());
    while digit(i) {
        i += 1;
    }
    if chars.get(i).is_some_and(|c| c.1 == '.') && digit(i + 1) {
        i += 1;
        while digit(i) {
            i += 1;
        }
    }
    if chars.get(i).is_some_and(|c| c.1 == 'e' || c.1 == 'E') {
        let mut j = i + 1;
        if chars.get(j).is_some_and(|c| c.1 == '+' || c.1 == '-') {
            j += 1;
        }
        if digit(j) {
            i = j;
            while digit(i) {
                i += 1;
            }
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic() {
        assert_eq!(
            toks("globally assert β <= -90.5 # note\n"),
            vec![
                Tok::Kw(Kw::Globally),
                Tok::Kw(Kw::Assert),
                Tok::Ident("β".into()),
                Tok::Le,
                Tok::Minus,
                Tok::Number(90.5),
                Tok::Eof
            ]
        );
        assert_eq!(toks("a<>b"), vec![Tok::Ident("a".into()), Tok::Ne, Tok::Ident("b".into()), Tok::Eof]);
        assert_eq!(toks("1e-3 .5"), vec![Tok::Number(0.001), Tok::Number(0.5), Tok::Eof]);
        assert_eq!(toks("not_Eclipse"), vec![Tok::Ident("not_Eclipse".into()), Tok::Eof]);
    }

    #[test]
    fn malformed_numbers() {
        for bad in ["1.2.3", "3abc", "1e", "2."] {
            let err = tokenize(bad).unwrap_err();
            assert!(err.message.contains("malformed number"), "{bad}: {err}");
        }
    }

    #[test]
    fn positions() {
        let t = tokenize("globally\n  assert x > 1").unwrap();
        assert_eq!((t[1].line, t[1].column), (2, 3));
    }
}
