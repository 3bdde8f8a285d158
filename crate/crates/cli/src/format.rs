//! QDM (density matrix) and QENS (pure-state ensemble) text formats.
//!
//! ```text
//! qdm 1
//! dims 2 2
//! 0.5 0   0 0   0 0   0.5 0     # (d_a·d_b)² entries, row-major, `re im`
//! ...
//! ```
//!
//! ```text
//! qens 1
//! dims 2 2
//! states 2
//! state 0.5
//! 0.7071067811865476 0  0 0  0 0  0.7071067811865476 0
//! state 0.5
//! ...
//! ```
//!
//! Tokens are whitespace separated, so line breaks are free-form; `#` starts
//! a comment running to the end of the line.

use std::fmt::Write as _;

use eoa_core::quantum::Member;
use eoa_core::{BipartiteDims, ComplexMatrix, DensityMatrix, Ensemble, PureState, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Invalid(#[from] eoa_core::Error),
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Tokens<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    /// Position just past the last character, for end-of-input errors.
    end: (usize, usize),
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut end = (1, 1);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut chars = line.char_indices().peekable();
            while let Some(&(start, ch)) = chars.peek() {
                if ch.is_whitespace() {
                    chars.next();
                    continue;
                }
                let mut stop = line.len();
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_whitespace() {
                        stop = j;
                        break;
                    }
                    chars.next();
                }
                tokens.push(Token {
                    text: &line[start..stop],
                    line: i + 1,
                    column: line[..start].chars().count() + 1,
                });
            }
            end = (i + 1, raw.chars().count() + 1);
        }
        Tokens { tokens, pos: 0, end }
    }

    fn syntax(&self, at: Option<Token>, message: impl Into<String>) -> ParseError {
        let (line, column) = at.map_or(self.end, |t| (t.line, t.column));
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        let t = self.tokens.get(self.pos).copied();
        self.pos += 1;
        t.ok_or_else(|| self.syntax(None, format!("unexpected end of input, expected {what}")))
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("`{word}`"))?;
        if t.text != word {
            return Err(self.syntax(Some(t), format!("expected `{word}`, found `{}`", t.text)));
        }
        Ok(())
    }

    fn count(&mut self, what: &str) -> Result<usize, ParseError> {
        let t = self.next(what)?;
        t.text
            .parse::<usize>()
            .map_err(|_| self.syntax(Some(t), format!("expected {what}, found `{}`", t.text)))
    }

    fn real(&mut self, what: &str) -> Result<f64, ParseError> {
        let t = self.next(what)?;
        match t.text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            Ok(_) => Err(self.syntax(Some(t), format!("non-finite {what} `{}`", t.text))),
            Err(_) => Err(self.syntax(Some(t), format!("expected {what}, found `{}`", t.text))),
        }
    }

    fn remaining(&self) -> usize {
        self.tokens.len().saturating_sub(self.pos)
    }

    fn header(&mut self, magic: &str) -> Result<BipartiteDims, ParseError> {
        self.keyword(magic)?;
        let t = self.next("format version")?;
        if t.text != "1" {
            return Err(self.syntax(Some(t), format!("unsupported {magic} version `{}`", t.text)));
        }
        self.keyword("dims")?;
        let (da, db) = (self.count("d_a")?, self.count("d_b")?);
        Ok(BipartiteDims::new(da, db)?)
    }

    /// Reads `n` complex numbers; a short read is a dimension mismatch.
    fn complexes(&mut self, n: usize, what: &str) -> Result<Vec<C64>, ParseError> {
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if self.remaining() < 2 {
                return Err(ParseError::Dimension(format!(
                    "expected {n} {what} entries, found {k}{}",
                    if self.remaining() == 1 { " and a dangling real part" } else { "" }
                )));
            }
            let re = self.real("real part")?;
            let im = self.real("imaginary part")?;
            out.push(C64::new(re, im));
        }
        Ok(out)
    }
}

pub fn parse_qdm(text: &str) -> Result<DensityMatrix, ParseError> {
    let mut tok = Tokens::new(text);
    let dims = tok.header("qdm")?;
    let n = dims.total();
    let entries = tok.complexes(n * n, "matrix")?;
    if tok.remaining() > 0 {
        return Err(ParseError::Dimension(format!(
            "dims {} {} take {} entries but {} extra tokens follow",
            dims.d_a,
            dims.d_b,
            n * n,
            tok.remaining()
        )));
    }
    let m = ComplexMatrix::from_vec(n, n, entries)?;
    Ok(DensityMatrix::new(dims, m)?)
}

fn push_complex(out: &mut String, z: C64) {
    // `{:e}` prints the shortest digits that round-trip exactly.
    let _ = write!(out, "{:e} {:e}", z.re, z.im);
}

pub fn write_qdm(rho: &DensityMatrix) -> String {
    let dims = rho.dims();
    let n = dims.total();
    let mut out = format!("qdm 1\ndims {} {}\n", dims.d_a, dims.d_b);
    let m = rho.matrix();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push_str("  ");
            }
            push_complex(&mut out, m[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn parse_qens(text: &str) -> Result<Ensemble, ParseError> {
    let mut tok = Tokens::new(text);
    let dims = tok.header("qens")?;
    tok.keyword("states")?;
    let k = tok.count("member count")?;
    let mut members = Vec::with_capacity(k);
    for _ in 0..k {
        tok.keyword("state")?;
        let p = tok.real("probability")?;
        let amps = tok.complexes(dims.total(), "amplitude")?;
        members.push(Member {
            p,
            state: PureState::new(dims, amps)?,
        });
    }
    if tok.remaining() > 0 {
        return Err(ParseError::Dimension(format!(
            "{k} states declared but {} extra tokens follow",
            tok.remaining()
        )));
    }
    Ok(Ensemble::new(dims, members)?)
}

pub fn write_qens(e: &Ensemble) -> String {
    let dims = e.dims();
    let mut out = format!("qens 1\ndims {} {}\nstates {}\n", dims.d_a, dims.d_b, e.len());
    for m in e.members() {
        let _ = writeln!(out, "state {:e}", m.p);
        for (j, z) in m.state.amplitudes().iter().enumerate() {
            if j > 0 {
                out.push_str("  ");
            }
            push_complex(&mut out, *z);
        }
        out.push('\n');
    }
    out
}
