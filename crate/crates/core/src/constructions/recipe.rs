use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::Builder;
use crate::dss::{rs_base, LinearDss};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;

/// A textual description of a code, e.g. `blowup_full(base(3,2))`.
///
/// ```text
/// recipe := base(n,k)
///         | blowup_simple(recipe) | blowup_full(recipe)
///         | iterate(recipe,j) | copy_blowup(recipe,l)
///         | filenode_blowup(recipe) | concat(recipe,...)
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Base { n: usize, k: usize },
    BlowupSimple(Box<Recipe>),
    BlowupFull(Box<Recipe>),
    Iterate(Box<Recipe>, usize),
    Concat(Vec<Recipe>),
    CopyBlowup(Box<Recipe>, usize),
    FilenodeBlowup(Box<Recipe>),
}

impl Recipe {
    /// Builds the code; bases are Reed-Solomon codes over GF(2^8).
    pub fn build(&self, builder: &Builder) -> Result<Arc<LinearDss>> {
        match self {
            Recipe::Base { n, k } => rs_base(*n, *k, FieldSpec::GF256),
            Recipe::BlowupSimple(r) => builder.blowup_simple(&r.build(builder)?),
            Recipe::BlowupFull(r) => builder.blowup_full(&r.build(builder)?),
            Recipe::Iterate(r, j) => builder.iterate(&r.build(builder)?, *j),
            Recipe::Concat(parts) => {
                let parts = parts.iter().map(|r| r.build(builder)).collect::<Result<Vec<_>>>()?;
                builder.concat(&parts)
            }
            Recipe::CopyBlowup(r, l) => builder.copy_blowup(&r.build(builder)?, *l),
            Recipe::FilenodeBlowup(r) => builder.filenode_blowup(&r.build(builder)?),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Base { n, k } => write!(f, "base({n},{k})"),
            Recipe::BlowupSimple(r) => write!(f, "blowup_simple({r})"),
            Recipe::BlowupFull(r) => write!(f, "blowup_full({r})"),
            Recipe::Iterate(r, j) => write!(f, "iterate({r},{j})"),
            Recipe::Concat(parts) => {
                f.write_str("concat(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            Recipe::CopyBlowup(r, l) => write!(f, "copy_blowup({r},{l})"),
            Recipe::FilenodeBlowup(r) => write!(f, "filenode_blowup({r})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        let word = self.ident()?;
        word.parse().map_err(|_| {
            self.pos = start;
            self.err(&format!("expected an integer, found {word:?}"))
        })
    }

    fn recipe(&mut self) -> Result<Recipe> {
        let name = self.ident()?;
        self.eat('(')?;
        let r = match name {
            "base" => {
                let n = self.number()?;
                self.eat(',')?;
                let k = self.number()?;
                Recipe::Base { n, k }
            }
            "blowup_simple" => Recipe::BlowupSimple(Box::new(self.recipe()?)),
            "blowup_full" => Recipe::BlowupFull(Box::new(self.recipe()?)),
            "filenode_blowup" => Recipe::FilenodeBlowup(Box::new(self.recipe()?)),
            "iterate" | "copy_blowup" => {
                let inner = Box::new(self.recipe()?);
                self.eat(',')?;
                let x = self.number()?;
                if name == "iterate" {
                    Recipe::Iterate(inner, x)
                } else {
                    Recipe::CopyBlowup(inner, x)
                }
            }
            "concat" => {
                let mut parts = vec![self.recipe()?];
                while self.peek() == Some(',') {
                    self.eat(',')?;
                    parts.push(self.recipe()?);
                }
                Recipe::Concat(parts)
            }
            other => return Err(Error::Parse(format!("unknown construction {other:?}"))),
        };
        self.eat(')')?;
        Ok(r)
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let r = p.recipe()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(r)
    }
}
