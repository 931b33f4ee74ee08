//! Text front-end.
//!
//! ```text
//! formula := gate ('+' gate)*
//! gate    := factor ('*' factor)*
//! factor  := '(' poly ')' | '(' formula ')'
//! poly    := term (('+' | '-') term)*
//! term    := ['-'] atom ('*' atom)*        atom := int | x<k>
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end
//! of the line. Two comment lines are read as headers: `# class: d3|d4|regular`
//! and `# n: <count>`. Without a class header the class is inferred from the
//! shape: nested groups make a regular formula, otherwise it is depth-3 when
//! every factor is affine and depth-4 when not. Without an `n` header the
//! variable count is the largest index used.

use super::{
    Depth3Formula, Depth4Formula, Formula, FormulaClass, LinearForm, RegularFormula, RegularNode,
};
use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Var(usize),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
}

#[derive(Debug)]
enum Atom {
    Int(u64),
    Var(usize),
    Group(Expr),
}

#[derive(Debug)]
struct Term {
    pos: usize,
    neg: bool,
    atoms: Vec<(usize, Atom)>,
}

#[derive(Debug)]
struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    fn depth(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| &t.atoms)
            .map(|(_, a)| match a {
                Atom::Group(e) => 1 + e.depth(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn max_var(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|t| &t.atoms)
            .filter_map(|(_, a)| match a {
                Atom::Var(v) => Some(*v),
                Atom::Group(e) => e.max_var(),
                Atom::Int(_) => None,
            })
            .max()
    }
}

struct Header {
    class: Option<FormulaClass>,
    n: Option<usize>,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn read_header(text: &str) -> Result<Header> {
    let mut header = Header {
        class: None,
        n: None,
    };
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let Some(idx) = line.find('#') else { continue };
        let body = line[idx + 1..].trim();
        if let Some(v) = body.strip_prefix("class:") {
            header.class = Some(v.trim().parse().map_err(|_| {
                err(
                    start + idx,
                    format!("unknown class `{}` in header", v.trim()),
                )
            })?);
        } else if let Some(v) = body.strip_prefix("n:") {
            header.n = Some(
                v.trim()
                    .parse()
                    .map_err(|_| err(start + idx, format!("bad variable count `{}`", v.trim())))?,
            );
        }
    }
    Ok(header)
}

fn tokenize(field: &Field, text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_whitespace() => {}
            b'(' => out.push((i, Tok::LParen)),
            b')' => out.push((i, Tok::RParen)),
            b'+' => out.push((i, Tok::Plus)),
            b'-' => out.push((i, Tok::Minus)),
            b'*' => out.push((i, Tok::Star)),
            b'0'..=b'9' => {
                let start = i;
                let mut v = 0u64;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    v = field.add(field.mul(v, 10), u64::from(bytes[i] - b'0'));
                    i += 1;
                }
                out.push((start, Tok::Int(v)));
                continue;
            }
            b'x' | b'X' => {
                let start = i;
                i += 1;
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let k: usize = text[digits..i]
                    .parse()
                    .map_err(|_| err(start, "expected a variable index after `x`"))?;
                if k == 0 {
                    return Err(err(start, "variables are numbered from x1"));
                }
                out.push((start, Tok::Var(k - 1)));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.at).map(|t| t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term(false)?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    terms.push(self.term(false)?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    terms.push(self.term(true)?);
                }
                _ => return Ok(Expr { terms }),
            }
        }
    }

    fn term(&mut self, mut neg: bool) -> Result<Term> {
        let pos = self.pos();
        if self.peek() == Some(Tok::Minus) {
            self.at += 1;
            neg = !neg;
        }
        let mut atoms = vec![self.atom()?];
        while self.peek() == Some(Tok::Star) {
            self.at += 1;
            atoms.push(self.atom()?);
        }
        Ok(Term { pos, neg, atoms })
    }

    fn atom(&mut self) -> Result<(usize, Atom)> {
        let pos = self.pos();
        let tok = self
            .peek()
            .ok_or_else(|| err(pos, "unexpected end of input"))?;
        self.at += 1;
        match tok {
            Tok::Int(v) => Ok((pos, Atom::Int(v))),
            Tok::Var(v) => Ok((pos, Atom::Var(v))),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(err(self.pos(), "expected `)`"));
                }
                self.at += 1;
                Ok((pos, Atom::Group(e)))
            }
            other => Err(err(pos, format!("unexpected {}", describe(other)))),
        }
    }
}

fn describe(t: Tok) -> &'static str {
    match t {
        Tok::Int(_) => "integer",
        Tok::Var(_) => "variable",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
    }
}

fn parse_expr(field: &Field, text: &str) -> Result<Expr> {
    let toks = tokenize(field, text)?;
    if toks.is_empty() {
        return Err(err(text.len(), "empty input"));
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(err(
            p.pos(),
            format!("unexpected {}", describe(p.toks[p.at].1)),
        ));
    }
    Ok(e)
}

fn resolve_n(header_n: Option<usize>, max_var: Option<usize>) -> Result<usize> {
    let needed = max_var.map_or(0, |v| v + 1);
    match header_n {
        Some(n) if n < needed => Err(Error::VariableOutOfRange {
            index: needed - 1,
            n,
        }),
        Some(n) => Ok(n),
        None => Ok(needed.max(1)),
    }
}

/// Parses a formula, validating multilinearity.
pub fn parse(field: Field, text: &str) -> Result<Formula> {
    let header = read_header(text)?;
    let expr = parse_expr(&field, text)?;
    let n = resolve_n(header.n, expr.max_var())?;
    let depth = expr.depth();
    if depth == 0 {
        return Err(err(0, "gate factors must be parenthesized"));
    }
    let class = match header.class {
        Some(c) => c,
        None if depth >= 2 => FormulaClass::Regular,
        None => {
            let polys = gate_polys(&field, n, &expr)?;
            if polys.iter().flatten().all(|p| p.degree() <= 1) {
                FormulaClass::Depth3
            } else {
                FormulaClass::Depth4
            }
        }
    };
    match class {
        FormulaClass::Regular => {
            let root = sum_node(&field, &expr, depth)?;
            Ok(Formula::Regular(RegularFormula::new(field, n, root)?))
        }
        _ if depth >= 2 => Err(Error::Class(format!(
            "nested groups are only allowed in regular formulas, header says {class}"
        ))),
        FormulaClass::Depth4 => Ok(Formula::Depth4(Depth4Formula::new(
            field,
            n,
            gate_polys(&field, n, &expr)?,
        )?)),
        FormulaClass::Depth3 => {
            let gates = gate_polys(&field, n, &expr)?
                .into_iter()
                .enumerate()
                .map(|(g, gate)| {
                    gate.into_iter()
                        .map(|p| to_linear(&field, g, &p))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Formula::Depth3(Depth3Formula::new(field, n, gates)?))
        }
    }
}

/// Parses a single polynomial such as `3 + x1*x2 - 2*x3`.
///
/// With `n = None` the variable count is the largest index used (or the
/// `# n:` header if present).
pub fn parse_poly(field: Field, text: &str, n: Option<usize>) -> Result<SparseMultilinearPoly> {
    let header = read_header(text)?;
    let expr = parse_expr(&field, text)?;
    if expr.depth() > 0 {
        return Err(err(0, "a polynomial may not contain parentheses"));
    }
    let n = resolve_n(n.or(header.n), expr.max_var())?;
    poly_of(&field, n, &expr)
}

fn gate_polys(field: &Field, n: usize, expr: &Expr) -> Result<Vec<Vec<SparseMultilinearPoly>>> {
    expr.terms
        .iter()
        .map(|t| {
            if t.neg {
                return Err(err(t.pos, "negation is only allowed inside a factor"));
            }
            t.atoms
                .iter()
                .map(|(pos, a)| match a {
                    Atom::Group(e) => poly_of(field, n, e),
                    _ => Err(err(*pos, "gate factors must be parenthesized")),
                })
                .collect()
        })
        .collect()
}

fn monomial_of(field: &Field, term: &Term) -> Result<(Monomial, u64)> {
    let mut coeff = if term.neg { field.neg(1) } else { 1 };
    let mut vars = Vec::new();
    for (pos, a) in &term.atoms {
        match a {
            Atom::Int(v) => coeff = field.mul(coeff, *v),
            Atom::Var(v) => {
                if vars.contains(v) {
                    return Err(err(*pos, format!("x{} repeated in a monomial", v + 1)));
                }
                vars.push(*v);
            }
            Atom::Group(_) => return Err(err(*pos, "unexpected nested group")),
        }
    }
    let m = Monomial::new(vars).ok_or_else(|| err(term.pos, "repeated variable"))?;
    Ok((m, coeff))
}

fn poly_of(field: &Field, n: usize, expr: &Expr) -> Result<SparseMultilinearPoly> {
    let terms = expr
        .terms
        .iter()
        .map(|t| monomial_of(field, t))
        .collect::<Result<Vec<_>>>()?;
    SparseMultilinearPoly::from_terms(*field, n, terms)
}

fn to_linear(field: &Field, gate: usize, p: &SparseMultilinearPoly) -> Result<LinearForm> {
    let mut coeffs = Vec::new();
    let mut constant = 0;
    for (m, c) in p.terms() {
        match m.vars() {
            [] => constant = c,
            [v] => coeffs.push((*v, c)),
            _ => {
                return Err(Error::Class(format!(
                    "gate {gate} has a factor of degree {} in a d3 formula",
                    m.degree()
                )))
            }
        }
    }
    Ok(LinearForm::new(*field, coeffs, constant))
}

fn sum_node(field: &Field, expr: &Expr, depth: usize) -> Result<RegularNode> {
    let children = expr
        .terms
        .iter()
        .map(|t| {
            if depth == 0 {
                let (m, c) = monomial_of(field, t)?;
                return match m.vars() {
                    [] => Ok(RegularNode::leaf(*field, None, c)),
                    [v] => Ok(RegularNode::leaf(*field, Some(*v), c)),
                    _ => Err(err(
                        t.pos,
                        "leaves of a regular formula are `c*x<k>` or `c`",
                    )),
                };
            }
            if t.neg {
                return Err(err(t.pos, "negation is only allowed on leaves"));
            }
            t.atoms
                .iter()
                .map(|(pos, a)| match a {
                    Atom::Group(e) => sum_node(field, e, depth - 1),
                    _ => Err(err(*pos, "product children must be parenthesized")),
                })
                .collect::<Result<Vec<_>>>()
                .map(RegularNode::Product)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularNode::Sum(children))
}
