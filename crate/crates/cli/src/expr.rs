//! Expression language shared by all subcommands.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' nat)?
//! atom   := 'e[' int ',' int ']' | 'h[' int ']' | 'c' | 'i' | int ('/' int)?
//!         | 'b[' int ',' int ']'
//!         | 'Tr(' expr ')' | 'W(' int (',' int)* ')' | 'apply_P(' expr ')'
//!         | M | M '[' int ']' | M '[' int ',' int ']' | M '_' digit digit
//!         | '(' expr ')'
//! M      := 'E' | 'B'
//! ```
//!
//! `E` and `B` denote the generator matrix and the matrix of entries;
//! `E[k]` is the top-left `k × k` corner and `E[a,b]` (or `E_ab`) the block
//! `(a, b)` of the session partition. Matrix values may be added, multiplied
//! and raised to powers, but only scalars (for instance a trace) may be the
//! final result.

use std::fmt;

use ugl_core::blocks::{trace_word, BlockPartition, BlockWord};
use ugl_core::comm::{comm_trace_word, CommPoly};
use ugl_core::hopf::apply_p;
use ugl_core::{AlgebraError, Algebra, Generator, Rational, Result, Scalar, UeaElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Uea,
    Comm,
}

impl std::str::FromStr for Mode {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uea" => Ok(Mode::Uea),
            "comm" => Ok(Mode::Comm),
            _ => Err(AlgebraError::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixSel {
    Full,
    Corner(usize),
    Block(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Imag,
    /// `e[i,j]`; the diagonal case desugars on evaluation.
    Unit(usize, usize),
    Cartan(usize),
    Central,
    Var(usize, usize),
    Matrix { comm: bool, sel: MatrixSel },
    Tr(Box<Expr>),
    W(Vec<usize>),
    ApplyP(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Imag => write!(f, "i"),
            Expr::Unit(i, j) => write!(f, "e[{i},{j}]"),
            Expr::Cartan(k) => write!(f, "h[{k}]"),
            Expr::Central => write!(f, "c"),
            Expr::Var(i, j) => write!(f, "b[{i},{j}]"),
            Expr::Matrix { comm, sel } => {
                let m = if *comm { 'B' } else { 'E' };
                match sel {
                    MatrixSel::Full => write!(f, "{m}"),
                    MatrixSel::Corner(k) => write!(f, "{m}[{k}]"),
                    MatrixSel::Block(a, b) => write!(f, "{m}[{a},{b}]"),
                }
            }
            Expr::Tr(e) => write!(f, "Tr({e})"),
            Expr::W(w) => {
                let s: Vec<String> = w.iter().map(ToString::to_string).collect();
                write!(f, "W({})", s.join(","))
            }
            Expr::ApplyP(e) => write!(f, "apply_P({e})"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut toks = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() {
            let mut s = String::new();
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                s.push(chars[k].1);
                k += 1;
            }
            toks.push((Tok::Int(s), pos));
        } else if ch.is_ascii_alphabetic() {
            let mut s = String::new();
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                s.push(chars[k].1);
                k += 1;
            }
            toks.push((Tok::Ident(s), pos));
        } else if "+-*^/()[],".contains(ch) {
            toks.push((Tok::Sym(ch), pos));
            k += 1;
        } else {
            return Err(AlgebraError::Parse { pos, msg: format!("unexpected character `{ch}`") });
        }
    }
    Ok(Lexer { toks, end: text.len() })
}

struct Parser {
    lx: Lexer,
    at: usize,
    d: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.lx.toks.get(self.at).map_or(self.lx.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(AlgebraError::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let v = s.parse().or_else(|_| self.err("integer too large"))?;
                self.at += 1;
                Ok(v)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn index(&mut self, what: &'static str, bound: usize) -> Result<usize> {
        let v = self.int()?;
        if v == 0 || v > bound {
            return Err(AlgebraError::IndexOutOfRange { what, index: v, bound });
        }
        Ok(v)
    }

    fn index_list(&mut self, what: &'static str, bound: usize) -> Result<Vec<usize>> {
        let mut out = vec![self.index(what, bound)?];
        while self.eat(',') {
            out.push(self.index(what, bound)?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = Expr::Neg(Box::new(acc));
        }
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') || self.starts_atom() {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = self.int()?;
            let k = u32::try_from(k).or_else(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Int(n) => {
                let mut lit = n;
                if self.eat('/') {
                    match self.peek() {
                        Some(Tok::Int(m)) => {
                            lit = format!("{lit}/{m}");
                            self.at += 1;
                        }
                        _ => return self.err("expected a denominator"),
                    }
                }
                let r: Rational = lit.parse().map_err(|e| match e {
                    AlgebraError::DivisionByZero => AlgebraError::Parse { pos: start, msg: "zero denominator".into() },
                    other => other,
                })?;
                Ok(Expr::Num(r))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => {
                self.at -= 1;
                self.err(format!("unexpected `{c}`"))
            }
            Tok::Ident(name) => self.named(&name, start),
        }
    }

    fn named(&mut self, name: &str, start: usize) -> Result<Expr> {
        let d = self.d;
        match name {
            "i" => Ok(Expr::Imag),
            "c" => Ok(Expr::Central),
            "e" | "b" => {
                self.expect('[')?;
                let i = self.index("matrix index", d)?;
                self.expect(',')?;
                let j = self.index("matrix index", d)?;
                self.expect(']')?;
                Ok(if name == "e" { Expr::Unit(i, j) } else { Expr::Var(i, j) })
            }
            "h" => {
                self.expect('[')?;
                let k = self.index("h[i]", d.saturating_sub(1))?;
                self.expect(']')?;
                Ok(Expr::Cartan(k))
            }
            "Tr" | "apply_P" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(if name == "Tr" { Expr::Tr(Box::new(e)) } else { Expr::ApplyP(Box::new(e)) })
            }
            "W" => {
                self.expect('(')?;
                let w = self.index_list("block index", d)?;
                self.expect(')')?;
                Ok(Expr::W(w))
            }
            "E" | "B" => {
                let comm = name == "B";
                if !self.eat('[') {
                    return Ok(Expr::Matrix { comm, sel: MatrixSel::Full });
                }
                let idx = self.index_list("matrix selector", d)?;
                self.expect(']')?;
                let sel = match idx[..] {
                    [k] => MatrixSel::Corner(k),
                    [a, b] => MatrixSel::Block(a, b),
                    _ => return Err(AlgebraError::Parse { pos: start, msg: "matrix selector takes one or two indices".into() }),
                };
                Ok(Expr::Matrix { comm, sel })
            }
            _ => {
                let block = name
                    .strip_prefix("E_")
                    .map(|r| (false, r))
                    .or_else(|| name.strip_prefix("B_").map(|r| (true, r)));
                if let Some((comm, digits)) = block {
                    let ds: Vec<usize> = digits.chars().filter_map(|c| c.to_digit(10).map(|v| v as usize)).collect();
                    if ds.len() == 2 && digits.len() == 2 && ds.iter().all(|&v| v >= 1) {
                        return Ok(Expr::Matrix { comm, sel: MatrixSel::Block(ds[0], ds[1]) });
                    }
                }
                Err(AlgebraError::Parse { pos: start, msg: format!("unknown identifier `{name}`") })
            }
        }
    }
}

/// Parses `text` into an expression tree, checking indices against `d`.
pub fn parse_ast(text: &str, d: usize) -> Result<Expr> {
    if d == 0 {
        return Err(AlgebraError::InvalidArgument("rank must be at least 1".into()));
    }
    let mut p = Parser { lx: lex(text)?, at: 0, d };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

enum Val<T> {
    Scalar(T),
    Matrix { rows: usize, cols: usize, entries: Vec<T> },
}

trait Ring {
    type El: Clone;
    fn constant(&self, s: Scalar) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Result<Self::El>;
    fn leaf(&self, e: &Expr) -> Result<Self::El>;
    fn entry(&self, i: usize, j: usize) -> Result<Self::El>;
    fn word(&self, w: &BlockWord) -> Result<Self::El>;
    fn apply_p(&self, a: &Self::El) -> Result<Self::El>;
    fn comm(&self) -> bool;
    fn partition(&self) -> Option<&BlockPartition>;
    fn d(&self) -> usize;
}

fn wrong_mode(what: &str, mode: &str) -> AlgebraError {
    AlgebraError::InvalidArgument(format!("{what} is not available in {mode} mode"))
}

struct UeaRing<'a> {
    alg: &'a Algebra,
    part: Option<&'a BlockPartition>,
}

impl Ring for UeaRing<'_> {
    type El = UeaElement;
    fn constant(&self, s: Scalar) -> UeaElement {
        self.alg.constant(s)
    }
    fn add(&self, a: &UeaElement, b: &UeaElement) -> UeaElement {
        a + b
    }
    fn neg(&self, a: &UeaElement) -> UeaElement {
        -a
    }
    fn mul(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        self.alg.multiply(a, b)
    }
    fn leaf(&self, e: &Expr) -> Result<UeaElement> {
        match e {
            Expr::Unit(i, j) => self.alg.unit(*i, *j),
            Expr::Cartan(k) => self.alg.gen(Generator::Cartan(*k)),
            Expr::Central => self.alg.gen(Generator::Central),
            _ => Err(wrong_mode("b[i,j]", "uea")),
        }
    }
    fn entry(&self, i: usize, j: usize) -> Result<UeaElement> {
        self.alg.unit(i, j)
    }
    fn word(&self, w: &BlockWord) -> Result<UeaElement> {
        trace_word(self.alg, self.partition_or_err()?, w)
    }
    fn apply_p(&self, a: &UeaElement) -> Result<UeaElement> {
        apply_p(self.alg, a)
    }
    fn comm(&self) -> bool {
        false
    }
    fn partition(&self) -> Option<&BlockPartition> {
        self.part
    }
    fn d(&self) -> usize {
        self.alg.rank()
    }
}

struct CommCtx<'a> {
    d: usize,
    part: Option<&'a BlockPartition>,
}

impl Ring for CommCtx<'_> {
    type El = CommPoly;
    fn constant(&self, s: Scalar) -> CommPoly {
        CommPoly::constant(self.d, s)
    }
    fn add(&self, a: &CommPoly, b: &CommPoly) -> CommPoly {
        a + b
    }
    fn neg(&self, a: &CommPoly) -> CommPoly {
        -a
    }
    fn mul(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.checked_mul(b)
    }
    fn leaf(&self, e: &Expr) -> Result<CommPoly> {
        match e {
            Expr::Var(i, j) => CommPoly::var(self.d, *i, *j),
            Expr::Unit(..) => Err(wrong_mode("e[i,j]", "comm")),
            Expr::Cartan(_) => Err(wrong_mode("h[i]", "comm")),
            _ => Err(wrong_mode("c", "comm")),
        }
    }
    fn entry(&self, i: usize, j: usize) -> Result<CommPoly> {
        CommPoly::var(self.d, i, j)
    }
    fn word(&self, w: &BlockWord) -> Result<CommPoly> {
        comm_trace_word(self.partition_or_err()?, w)
    }
    fn apply_p(&self, _: &CommPoly) -> Result<CommPoly> {
        Err(wrong_mode("apply_P", "comm"))
    }
    fn comm(&self) -> bool {
        true
    }
    fn partition(&self) -> Option<&BlockPartition> {
        self.part
    }
    fn d(&self) -> usize {
        self.d
    }
}

trait PartitionOrErr {
    fn partition_or_err(&self) -> Result<&BlockPartition>;
}

impl<R: Ring> PartitionOrErr for R {
    fn partition_or_err(&self) -> Result<&BlockPartition> {
        self.partition().ok_or_else(|| AlgebraError::InvalidArgument("block atoms need a partition (set --p)".into()))
    }
}

fn mat_mul<R: Ring>(r: &R, a: &Val<R::El>, b: &Val<R::El>) -> Result<Val<R::El>> {
    Ok(match (a, b) {
        (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(r.mul(x, y)?),
        (Val::Scalar(x), Val::Matrix { rows, cols, entries }) => Val::Matrix {
            rows: *rows,
            cols: *cols,
            entries: entries.iter().map(|m| r.mul(x, m)).collect::<Result<_>>()?,
        },
        (Val::Matrix { rows, cols, entries }, Val::Scalar(y)) => Val::Matrix {
            rows: *rows,
            cols: *cols,
            entries: entries.iter().map(|m| r.mul(m, y)).collect::<Result<_>>()?,
        },
        (Val::Matrix { rows, cols, entries: x }, Val::Matrix { rows: r2, cols: c2, entries: y }) => {
            if cols != r2 {
                return Err(AlgebraError::DimensionMismatch { expected: *cols, got: *r2 });
            }
            let mut out = Vec::with_capacity(rows * c2);
            for i in 0..*rows {
                for j in 0..*c2 {
                    let mut acc = r.constant(Scalar::ZERO);
                    for k in 0..*cols {
                        acc = r.add(&acc, &r.mul(&x[i * cols + k], &y[k * c2 + j])?);
                    }
                    out.push(acc);
                }
            }
            Val::Matrix { rows: *rows, cols: *c2, entries: out }
        }
    })
}

fn eval<R: Ring>(r: &R, e: &Expr) -> Result<Val<R::El>> {
    Ok(match e {
        Expr::Num(q) => Val::Scalar(r.constant(Scalar::real(q.clone()))),
        Expr::Imag => Val::Scalar(r.constant(Scalar::I)),
        Expr::Unit(..) | Expr::Cartan(_) | Expr::Central | Expr::Var(..) => Val::Scalar(r.leaf(e)?),
        Expr::Matrix { comm, sel } => {
            if *comm != r.comm() {
                let (what, mode) = if *comm { ("B", "uea") } else { ("E", "comm") };
                return Err(wrong_mode(what, mode));
            }
            let d = r.d();
            let (rows, cols): (Vec<usize>, Vec<usize>) = match sel {
                MatrixSel::Full => ((1..=d).collect(), (1..=d).collect()),
                MatrixSel::Corner(k) => ((1..=*k).collect(), (1..=*k).collect()),
                MatrixSel::Block(a, b) => {
                    let part = r.partition_or_err()?;
                    (part.block(*a)?.collect(), part.block(*b)?.collect())
                }
            };
            let mut entries = Vec::with_capacity(rows.len() * cols.len());
            for &i in &rows {
                for &j in &cols {
                    entries.push(r.entry(i, j)?);
                }
            }
            Val::Matrix { rows: rows.len(), cols: cols.len(), entries }
        }
        Expr::Tr(inner) => match eval(r, inner)? {
            Val::Matrix { rows, cols, entries } => {
                if rows != cols {
                    return Err(AlgebraError::DimensionMismatch { expected: rows, got: cols });
                }
                let mut acc = r.constant(Scalar::ZERO);
                for i in 0..rows {
                    acc = r.add(&acc, &entries[i * cols + i]);
                }
                Val::Scalar(acc)
            }
            Val::Scalar(_) => return Err(AlgebraError::InvalidArgument("Tr expects a matrix argument".into())),
        },
        Expr::W(w) => Val::Scalar(r.word(&BlockWord::new(w.clone())?)?),
        Expr::ApplyP(inner) => match eval(r, inner)? {
            Val::Scalar(x) => Val::Scalar(r.apply_p(&x)?),
            Val::Matrix { .. } => return Err(AlgebraError::InvalidArgument("apply_P expects a scalar argument".into())),
        },
        Expr::Neg(a) => match eval(r, a)? {
            Val::Scalar(x) => Val::Scalar(r.neg(&x)),
            Val::Matrix { rows, cols, entries } => Val::Matrix { rows, cols, entries: entries.iter().map(|x| r.neg(x)).collect() },
        },
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let sub = matches!(e, Expr::Sub(..));
            let combine = |x: &R::El, y: &R::El| if sub { r.add(x, &r.neg(y)) } else { r.add(x, y) };
            match (eval(r, a)?, eval(r, b)?) {
                (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(combine(&x, &y)),
                (Val::Matrix { rows, cols, entries: x }, Val::Matrix { rows: r2, cols: c2, entries: y }) => {
                    if (rows, cols) != (r2, c2) {
                        return Err(AlgebraError::DimensionMismatch { expected: rows * cols, got: r2 * c2 });
                    }
                    Val::Matrix { rows, cols, entries: x.iter().zip(&y).map(|(p, q)| combine(p, q)).collect() }
                }
                _ => return Err(AlgebraError::InvalidArgument("cannot add a scalar and a matrix".into())),
            }
        }
        Expr::Mul(a, b) => mat_mul(r, &eval(r, a)?, &eval(r, b)?)?,
        Expr::Pow(a, k) => {
            let base = eval(r, a)?;
            let mut acc = match &base {
                Val::Scalar(_) => Val::Scalar(r.constant(Scalar::ONE)),
                Val::Matrix { rows, cols, .. } => {
                    if rows != cols {
                        return Err(AlgebraError::DimensionMismatch { expected: *rows, got: *cols });
                    }
                    let n = *rows;
                    let entries =
                        (0..n * n).map(|t| r.constant(if t / n == t % n { Scalar::ONE } else { Scalar::ZERO })).collect();
                    Val::Matrix { rows: n, cols: n, entries }
                }
            };
            for _ in 0..*k {
                acc = mat_mul(r, &acc, &base)?;
            }
            acc
        }
    })
}

fn scalar<T>(v: Val<T>) -> Result<T> {
    match v {
        Val::Scalar(x) => Ok(x),
        Val::Matrix { .. } => Err(AlgebraError::InvalidArgument("expression evaluates to a matrix; wrap it in Tr(...)".into())),
    }
}

/// Parses and evaluates an element of `U(gl_d)`.
pub fn parse_uea(text: &str, alg: &Algebra, part: Option<&BlockPartition>) -> Result<UeaElement> {
    let ast = parse_ast(text, alg.rank())?;
    scalar(eval(&UeaRing { alg, part }, &ast)?)
}

/// Parses and evaluates a polynomial in the matrix entries `b[i,j]`.
pub fn parse_comm(text: &str, d: usize, part: Option<&BlockPartition>) -> Result<CommPoly> {
    let ast = parse_ast(text, d)?;
    scalar(eval(&CommCtx { d, part }, &ast)?)
}
