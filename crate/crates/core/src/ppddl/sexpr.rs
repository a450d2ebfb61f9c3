//! S-expression reader with source spans.

use super::{Diagnostic, SourceSpan};

#[derive(Debug, Clone)]
pub enum Sexpr {
    Symbol(String, SourceSpan),
    List(Vec<Sexpr>, SourceSpan),
}

impl Sexpr {
    pub fn span(&self) -> SourceSpan {
        match self {
            Sexpr::Symbol(_, s) | Sexpr::List(_, s) => *s,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexpr::Symbol(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Symbol(..) => None,
        }
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan { begin: self.pos, end: self.pos, line: self.line, column: self.col }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | '?' | ':' | '.' | '/' | '=' | '<' | '>' | '+' | '*')
}

/// Reads every top-level expression in `text`. Symbols are lower-cased.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, Diagnostic> {
    let mut cur = Cursor { text, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    // Stack of open lists: (start span, items).
    let mut stack: Vec<(SourceSpan, Vec<Sexpr>)> = Vec::new();
    loop {
        cur.skip_trivia();
        let start = cur.here();
        let Some(c) = cur.peek() else { break };
        match c {
            '(' => {
                cur.bump();
                stack.push((start, Vec::new()));
            }
            ')' => {
                cur.bump();
                let Some((open, items)) = stack.pop() else {
                    return Err(Diagnostic::lexical(start, "unbalanced `)`"));
                };
                let span = SourceSpan { end: cur.pos, ..open };
                let e = Sexpr::List(items, span);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => out.push(e),
                }
            }
            c if is_symbol_char(c) => {
                let mut s = String::new();
                while let Some(c) = cur.peek().filter(|&c| is_symbol_char(c)) {
                    s.push(c.to_ascii_lowercase());
                    cur.bump();
                }
                let span = SourceSpan { end: cur.pos, ..start };
                let e = Sexpr::Symbol(s, span);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => out.push(e),
                }
            }
            other => {
                return Err(Diagnostic::lexical(start, format!("unexpected character `{other}`")));
            }
        }
    }
    if let Some((open, _)) = stack.pop() {
        return Err(Diagnostic::lexical(open, "unclosed `(`"));
    }
    Ok(out)
}
