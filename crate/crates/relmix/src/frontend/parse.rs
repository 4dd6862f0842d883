//! Line-oriented problem grammar: one statement per line, polynomials in
//! standard infix with `^` powers and `*` products, tuples as `(a,b)` or a
//! bare integer when the grading rank is 1. `#` starts a comment.

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::gring::{Monomial, Polynomial};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgValue {
    Int(i64),
    Tuple(Vec<i64>),
    Name(String),
}

impl fmt::Display for ArgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgValue::Int(v) => write!(f, "{}", v),
            ArgValue::Tuple(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", v)?;
                }
                write!(f, ")")
            }
            ArgValue::Name(n) => write!(f, "{}", n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Command {
    pub verb: String,
    pub args: BTreeMap<String, ArgValue>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleDecl {
    Ideal(Vec<Polynomial>),
    Quotient(Vec<Polynomial>),
}

/// A parsed problem file: ring data, subspace declarations, module
/// declarations, and command blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemDocument {
    pub prime: u64,
    pub grading: usize,
    pub vars: Vec<(String, Multidegree)>,
    pub relations: Vec<Polynomial>,
    pub h_decls: BTreeMap<usize, Vec<Polynomial>>,
    pub modules: BTreeMap<String, ModuleDecl>,
    pub commands: Vec<Command>,
}

impl ProblemDocument {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    fn print_poly(&self, poly: &Polynomial, out: &mut String) {
        for (i, (coeff, mono)) in poly.terms.iter().enumerate() {
            let (sign, mag) = if *coeff < 0 {
                ("-", -*coeff)
            } else {
                ("+", *coeff)
            };
            if i == 0 {
                if sign == "-" {
                    out.push_str("-");
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if mag != 1 || mono.exponents().iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (v, &e) in mono.exponents().iter().enumerate() {
                if e == 1 {
                    factors.push(self.vars[v].0.clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.vars[v].0, e));
                }
            }
            out.push_str(&factors.join("*"));
        }
    }

    fn print_tuple(&self, entries: &[i64], out: &mut String) {
        if self.grading == 1 {
            out.push_str(&entries[0].to_string());
        } else {
            out.push('(');
            for (i, e) in entries.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&e.to_string());
            }
            out.push(')');
        }
    }
}

impl fmt::Display for ProblemDocument {
    /// Canonical pretty-printer; reparsing the output yields an equal
    /// document.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        out.push_str(&format!("prime {}\n", self.prime));
        out.push_str(&format!("grading {}\n", self.grading));
        out.push_str("vars");
        for (name, deg) in &self.vars {
            out.push(' ');
            out.push_str(name);
            out.push(':');
            self.print_tuple(deg.entries(), &mut out);
        }
        out.push('\n');
        for rel in &self.relations {
            out.push_str("rel ");
            self.print_poly(rel, &mut out);
            out.push('\n');
        }
        for (i, polys) in &self.h_decls {
            out.push_str(&format!("H{} = ", i));
            for (k, p) in polys.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                self.print_poly(p, &mut out);
            }
            out.push('\n');
        }
        for (name, decl) in &self.modules {
            let (kw, polys) = match decl {
                ModuleDecl::Ideal(p) => ("ideal", p),
                ModuleDecl::Quotient(p) => ("quotient", p),
            };
            out.push_str(&format!("module {} = {}(", name, kw));
            for (k, p) in polys.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                self.print_poly(p, &mut out);
            }
            out.push_str(")\n");
        }
        for cmd in &self.commands {
            out.push_str("cmd ");
            out.push_str(&cmd.verb);
            for (key, value) in &cmd.args {
                out.push_str(&format!(" {}={}", key, value));
            }
            out.push('\n');
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

struct Line {
    number: usize,
    toks: Vec<(usize, Tok)>, // (column, token)
    pos: usize,
}

impl Line {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(c, _)| *c)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.number, self.col(), message)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(Error::parse(
                self.number,
                self.col(),
                format!("expected `{}`, found {:?}", c, other),
            )),
        }
    }

    fn expect_int(&mut self) -> Result<i64> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            other => Err(Error::parse(
                self.number,
                self.col(),
                format!("expected an integer, found {:?}", other),
            )),
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(Error::parse(
                self.number,
                self.col(),
                format!("expected a name, found {:?}", other),
            )),
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

fn tokenize(number: usize, text: &str) -> Result<Line> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<i64>()
                .map_err(|_| Error::parse(number, col, format!("integer `{}` out of range", s)))?;
            toks.push((col, Tok::Int(v)));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((col, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        }
        if "(),=^*+-:".contains(c) {
            toks.push((col, Tok::Sym(c)));
            i += 1;
            continue;
        }
        return Err(Error::parse(
            number,
            col,
            format!("unexpected character `{}`", c),
        ));
    }
    Ok(Line {
        number,
        toks,
        pos: 0,
    })
}

struct Parser {
    prime: Option<u64>,
    grading: Option<usize>,
    vars: Vec<(String, Multidegree)>,
    relations: Vec<Polynomial>,
    h_decls: BTreeMap<usize, Vec<Polynomial>>,
    modules: BTreeMap<String, ModuleDecl>,
    commands: Vec<Command>,
}

impl Parser {
    fn grading_or_err(&self, line: &Line) -> Result<usize> {
        self.grading
            .ok_or_else(|| line.err("`grading <p>` must appear before this statement"))
    }

    /// tuple: `(a,b,...)` of the grading rank, or a bare integer when p = 1
    fn parse_tuple(&self, line: &mut Line) -> Result<Vec<i64>> {
        let p = self.grading_or_err(line)?;
        match line.peek() {
            Some(Tok::Int(_)) => {
                let v = line.expect_int()?;
                if p != 1 {
                    return Err(line.err(format!(
                        "bare integer tuple needs grading 1, but grading is {}",
                        p
                    )));
                }
                Ok(vec![v])
            }
            Some(Tok::Sym('(')) => {
                line.expect_sym('(')?;
                let mut entries = Vec::new();
                loop {
                    let neg = matches!(line.peek(), Some(Tok::Sym('-')));
                    if neg {
                        line.next();
                    }
                    let v = line.expect_int()?;
                    entries.push(if neg { -v } else { v });
                    match line.next() {
                        Some(Tok::Sym(',')) => continue,
                        Some(Tok::Sym(')')) => break,
                        other => {
                            return Err(line.err(format!(
                                "expected `,` or `)` in tuple, found {:?}",
                                other
                            )))
                        }
                    }
                }
                if entries.len() != p {
                    return Err(line.err(format!(
                        "tuple has {} entries, grading rank is {}",
                        entries.len(),
                        p
                    )));
                }
                Ok(entries)
            }
            other => Err(line.err(format!("expected a degree tuple, found {:?}", other))),
        }
    }

    /// factor: integer | var ['^' int]; returns (coefficient, exponents)
    fn parse_factor(&self, line: &mut Line) -> Result<(i64, Vec<u32>)> {
        match line.next() {
            Some(Tok::Int(v)) => Ok((v, vec![0; self.vars.len()])),
            Some(Tok::Ident(name)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|(n, _)| *n == name)
                    .ok_or_else(|| {
                        Error::parse(line.number, line.col(), format!("undeclared name `{}`", name))
                    })?;
                let mut exps = vec![0u32; self.vars.len()];
                let mut e = 1u32;
                if matches!(line.peek(), Some(Tok::Sym('^'))) {
                    line.next();
                    let v = line.expect_int()?;
                    if v < 0 {
                        return Err(line.err("negative exponent"));
                    }
                    e = v as u32;
                }
                exps[idx] = e;
                Ok((1, exps))
            }
            other => Err(line.err(format!(
                "expected a variable or integer, found {:?}",
                other
            ))),
        }
    }

    /// term: factor ('*' factor)*
    fn parse_term(&self, line: &mut Line) -> Result<(i64, Monomial)> {
        let (mut coeff, mut exps) = self.parse_factor(line)?;
        while matches!(line.peek(), Some(Tok::Sym('*'))) {
            line.next();
            let (c, e) = self.parse_factor(line)?;
            coeff = coeff.checked_mul(c).ok_or_else(|| line.err("coefficient overflow"))?;
            for (a, b) in exps.iter_mut().zip(&e) {
                *a += b;
            }
        }
        Ok((coeff, Monomial(exps)))
    }

    /// polynomial: ['-'] term (('+'|'-') term)*
    fn parse_poly(&self, line: &mut Line) -> Result<Polynomial> {
        let mut terms = Vec::new();
        let mut negate = false;
        if matches!(line.peek(), Some(Tok::Sym('-'))) {
            line.next();
            negate = true;
        }
        let (c, m) = self.parse_term(line)?;
        terms.push((if negate { -c } else { c }, m));
        loop {
            match line.peek() {
                Some(Tok::Sym('+')) => {
                    line.next();
                    let (c, m) = self.parse_term(line)?;
                    terms.push((c, m));
                }
                Some(Tok::Sym('-')) => {
                    line.next();
                    let (c, m) = self.parse_term(line)?;
                    terms.push((-c, m));
                }
                _ => break,
            }
        }
        Ok(Polynomial::from_terms(terms))
    }

    fn parse_poly_list(&self, line: &mut Line, terminator: Option<char>) -> Result<Vec<Polynomial>> {
        let mut out = vec![self.parse_poly(line)?];
        loop {
            match line.peek() {
                Some(Tok::Sym(',')) => {
                    line.next();
                    out.push(self.parse_poly(line)?);
                }
                Some(Tok::Sym(c)) if Some(*c) == terminator => break,
                None if terminator.is_none() => break,
                other => {
                    return Err(line.err(format!(
                        "expected `,`{} or end of list, found {:?}",
                        terminator.map(|c| format!(" or `{}`", c)).unwrap_or_default(),
                        other
                    )))
                }
            }
        }
        Ok(out)
    }

    fn statement(&mut self, line: &mut Line) -> Result<()> {
        let head = line.expect_ident()?;
        match head.as_str() {
            "prime" => {
                let v = line.expect_int()?;
                if v < 2 {
                    return Err(line.err("prime must be at least 2"));
                }
                self.prime = Some(v as u64);
            }
            "grading" => {
                let v = line.expect_int()?;
                if v < 1 {
                    return Err(line.err("grading rank must be at least 1"));
                }
                self.grading = Some(v as usize);
            }
            "vars" => {
                loop {
                    if line.at_end() {
                        break;
                    }
                    let name = line.expect_ident()?;
                    if self.vars.iter().any(|(n, _)| *n == name) {
                        return Err(line.err(format!("variable `{}` declared twice", name)));
                    }
                    line.expect_sym(':')?;
                    let deg = self.parse_tuple(line)?;
                    self.vars.push((name, Multidegree::new(deg)));
                }
                if self.vars.is_empty() {
                    return Err(line.err("`vars` needs at least one declaration"));
                }
            }
            "rel" => {
                let poly = self.parse_poly(line)?;
                self.relations.push(poly);
            }
            "module" => {
                let name = line.expect_ident()?;
                line.expect_sym('=')?;
                let kind = line.expect_ident()?;
                line.expect_sym('(')?;
                let polys = self.parse_poly_list(line, Some(')'))?;
                line.expect_sym(')')?;
                let decl = match kind.as_str() {
                    "ideal" => ModuleDecl::Ideal(polys),
                    "quotient" => ModuleDecl::Quotient(polys),
                    other => {
                        return Err(line.err(format!(
                            "unknown module kind `{}` (expected ideal or quotient)",
                            other
                        )))
                    }
                };
                if self.modules.insert(name.clone(), decl).is_some() {
                    return Err(line.err(format!("module `{}` declared twice", name)));
                }
            }
            "cmd" => {
                let verb = line.expect_ident()?;
                let mut args = BTreeMap::new();
                while !line.at_end() {
                    let key = line.expect_ident()?;
                    line.expect_sym('=')?;
                    let value = match line.peek() {
                        Some(Tok::Sym('(')) => ArgValue::Tuple(self.parse_tuple(line)?),
                        Some(Tok::Int(_)) => ArgValue::Int(line.expect_int()?),
                        Some(Tok::Ident(_)) => ArgValue::Name(line.expect_ident()?),
                        other => {
                            return Err(line.err(format!("bad value for `{}`: {:?}", key, other)))
                        }
                    };
                    args.insert(key, value);
                }
                self.commands.push(Command {
                    verb,
                    args,
                    line: line.number,
                });
            }
            other if other.starts_with('H') && other[1..].chars().all(|c| c.is_ascii_digit()) => {
                let idx: usize = other[1..]
                    .parse()
                    .map_err(|_| line.err("bad subspace index"))?;
                if idx == 0 {
                    return Err(line.err("subspace indices start at 1"));
                }
                line.expect_sym('=')?;
                let polys = self.parse_poly_list(line, None)?;
                if self.h_decls.insert(idx, polys).is_some() {
                    return Err(line.err(format!("H{} declared twice", idx)));
                }
            }
            other => {
                return Err(line.err(format!("unknown statement `{}`", other)));
            }
        }
        if !line.at_end() {
            return Err(line.err("trailing tokens after statement"));
        }
        Ok(())
    }
}

/// Parse a problem file. Position-tagged diagnostics; names must be declared
/// before use.
pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    let mut parser = Parser {
        prime: None,
        grading: None,
        vars: Vec::new(),
        relations: Vec::new(),
        h_decls: BTreeMap::new(),
        modules: BTreeMap::new(),
        commands: Vec::new(),
    };
    let mut saw_statement = false;
    for (i, raw) in text.lines().enumerate() {
        let mut line = tokenize(i + 1, raw)?;
        if line.at_end() {
            continue;
        }
        saw_statement = true;
        parser.statement(&mut line)?;
    }
    if !saw_statement {
        return Err(Error::parse(1, 1, "empty input"));
    }
    let prime = parser
        .prime
        .ok_or_else(|| Error::parse(1, 1, "missing `prime` statement"))?;
    let grading = parser
        .grading
        .ok_or_else(|| Error::parse(1, 1, "missing `grading` statement"))?;
    if parser.vars.is_empty() {
        return Err(Error::parse(1, 1, "missing `vars` statement"));
    }
    Ok(ProblemDocument {
        prime,
        grading,
        vars: parser.vars,
        relations: parser.relations,
        h_decls: parser.h_decls,
        modules: parser.modules,
        commands: parser.commands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "prime 32003\ngrading 1\nvars x:1 y:1\nH1 = x\ncmd relmult t=1\n";

    #[test]
    fn parses_minimal_document() {
        let doc = parse_problem(MINIMAL).unwrap();
        assert_eq!(doc.prime, 32003);
        assert_eq!(doc.grading, 1);
        assert_eq!(doc.vars.len(), 2);
        assert_eq!(doc.h_decls[&1].len(), 1);
        assert_eq!(doc.commands[0].verb, "relmult");
        assert_eq!(doc.commands[0].args["t"], ArgValue::Int(1));
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        let err = parse_problem("").unwrap_err();
        assert_eq!(err.kind(), "ParseError");
        let err2 = parse_problem("# only a comment\n\n").unwrap_err();
        assert_eq!(err2.kind(), "ParseError");
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let err = parse_problem("prime 7\ngrading 1\nvars x:1\nrel x*z\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("undeclared"), "{}", msg);
    }

    #[test]
    fn polynomial_arithmetic() {
        let doc = parse_problem(
            "prime 7\ngrading 1\nvars x:1 y:1\nrel 2*x^2 - 3*x*y + y^2\nH1 = x, y\ncmd einf\n",
        )
        .unwrap();
        let rel = &doc.relations[0];
        assert_eq!(rel.terms.len(), 3);
        assert_eq!(rel.terms[0], (2, Monomial(vec![2, 0])));
        assert_eq!(rel.terms[1], (-3, Monomial(vec![1, 1])));
        assert_eq!(rel.terms[2], (1, Monomial(vec![0, 2])));
    }

    #[test]
    fn bigraded_tuples() {
        let doc = parse_problem(
            "prime 32003\ngrading 2\nvars x:(1,0) y:(0,1)\nH1 = x\nH2 = y\ncmd criteria\n",
        )
        .unwrap();
        assert_eq!(doc.vars[0].1, Multidegree::new(vec![1, 0]));
        assert_eq!(doc.vars[1].1, Multidegree::new(vec![0, 1]));
    }

    #[test]
    fn roundtrip_print_parse() {
        let text = "prime 32003\ngrading 2\nvars x1:(1,0) x2:(1,0) y1:(0,1)\n\
                    rel x1*y1 - 2*x2*y1\nH1 = x1, x2\nH2 = y1\n\
                    module m = ideal(x1^2, x2*x1)\n\
                    cmd relmult t=(1,1)\ncmd criteria\n";
        let doc = parse_problem(text).unwrap();
        let printed = doc.to_string();
        let reparsed = parse_problem(&printed).unwrap();
        assert_eq!(doc, reparsed);
        // printing again is a fixed point
        assert_eq!(printed, reparsed.to_string());
    }

    #[test]
    fn diagnostics_carry_positions() {
        let err = parse_problem("prime 32003\ngrading 1\nvars x:1\nrel x +\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn tuple_arity_checked() {
        let err =
            parse_problem("prime 7\ngrading 2\nvars x:(1,0,0)\n").unwrap_err();
        assert!(err.to_string().contains("grading rank"));
    }
}
