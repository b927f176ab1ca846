//! Text notation for Left dead ends.
//!
//! ```text
//! game  := term ("+" term)*
//! term  := NAT "*" term | atom
//! atom  := "0" | "#" NAT | "W" NAT | "{" "|" games? "}" | "(" game ")"
//! games := game ("," game)*
//! ```
//!
//! `#n` is the integer `n̄`, `Wn` the waiting game of rank `n`, `n*G` the
//! n-fold sum. Sums are built at the level of forms, not canonicalised.

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::store::EndId;

pub fn parse(engine: &mut Engine, text: &str) -> Result<EndId> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        engine,
    };
    let g = p.game()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.unexpected("'+' or end of input"));
    }
    Ok(g)
}

/// Prints the exact form: `#n` / `Wn` shorthands where the form matches,
/// otherwise braces with options in id order.
pub fn format(engine: &Engine, g: EndId) -> String {
    let mut out = String::new();
    write_game(engine, g, &mut out);
    out
}

fn write_game(engine: &Engine, g: EndId, out: &mut String) {
    if g.is_zero() {
        out.push('0');
    } else if let Some(n) = engine.as_integer(g) {
        out.push('#');
        out.push_str(&n.to_string());
    } else if let Some(n) = engine.as_waiting(g) {
        out.push('W');
        out.push_str(&n.to_string());
    } else {
        out.push_str("{|");
        for (i, &o) in engine.options(g).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_game(engine, o, out);
        }
        out.push('}');
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    engine: &'a mut Engine,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, expected: &str) -> Error {
        let found = match std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
        {
            Some(c) => format!("{c:?}"),
            None if self.pos >= self.src.len() => "end of input".to_string(),
            None => "invalid UTF-8".to_string(),
        };
        Error::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
            found,
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{}'", c as char)))
        }
    }

    fn nat(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected("a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().map_err(|_| Error::Syntax {
            offset: start,
            expected: "a natural number below 2^32".to_string(),
            found: digits.to_string(),
        })
    }

    fn game(&mut self) -> Result<EndId> {
        let mut acc = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.engine.sum(acc, rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<EndId> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let g = self.term()?;
                    Ok(self.engine.multiple(n, g))
                } else if n == 0 {
                    Ok(EndId::ZERO)
                } else {
                    Err(self.unexpected("'*' after a multiplier"))
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<EndId> {
        match self.peek() {
            Some(b'#') => {
                self.pos += 1;
                let n = self.nat()?;
                Ok(self.engine.integer(n))
            }
            Some(b'W') => {
                self.pos += 1;
                let n = self.nat()?;
                Ok(self.engine.waiting(n))
            }
            Some(b'(') => {
                self.pos += 1;
                let g = self.game()?;
                self.expect(b')')?;
                Ok(g)
            }
            Some(b'{') => {
                self.pos += 1;
                match self.peek() {
                    Some(b'|') => self.pos += 1,
                    Some(b'}') | None => return Err(self.unexpected("'|'")),
                    Some(_) => return Err(Error::NotALeftEnd { offset: self.pos }),
                }
                let mut options = Vec::new();
                if self.peek() != Some(b'}') {
                    options.push(self.game()?);
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        options.push(self.game()?);
                    }
                }
                self.expect(b'}')?;
                Ok(self.engine.intern_unsorted(options))
            }
            _ => Err(self.unexpected("'0', '#n', 'Wn', 'n*G', '(' or '{'")),
        }
    }
}
