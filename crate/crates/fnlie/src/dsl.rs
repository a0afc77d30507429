//! The model-file language.
//!
//! A model file is line-oriented UTF-8: one `chart` declaration followed by
//! named definitions,
//!
//! ```text
//! # comment
//! chart E(x,y)
//! form a:1 = x*d y
//! tvf Xi:1 = d x ^ @y
//! projtvf V:1 = (x*d y)^iI
//! section Psi = x + i*(y)
//! connection c = d x^@x + d y^@y + (x*d y)^iI
//! ```
//!
//! Definitions are evaluated while parsing, so degree annotations and chart
//! consistency are checked at parse time. Pretty-printing renders the
//! canonical form of each value; printing and re-parsing is a fixpoint.
//!
//! `^` is power on scalar-integer operands, wedge between forms and tensor
//! between a form and a direction; the operand kinds disambiguate. `i` is
//! the imaginary unit (allowed on scalars, forms and vertical directions),
//! `I` and `iI` are the Liouville fields, `id` is the identity
//! tangent-valued 1-form of the base.

use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::connection::{Connection, HermitianConnection};
use crate::exterior::{ComplexForm, Form, MultiIndex, Tvf};
use crate::qbundle::{complex_trace, LiouvilleKind, ProjTvf, QChart, Section};
use crate::scalar::{rat, Chart, ComplexScalar, Rat, ScalarField};

/// Errors of the model language; geometry errors are wrapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslError {
    Syntax { line: usize, col: usize, msg: String },
    DegreeMismatch { name: String, declared: usize, actual: usize, line: usize },
    UnknownName { name: String, line: usize },
    Kind { msg: String, line: usize },
    Geometry(crate::Error),
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Syntax { line, col, msg } => {
                write!(f, "syntax error at line {line}, column {col}: {msg}")
            }
            DslError::DegreeMismatch { name, declared, actual, line } => write!(
                f,
                "degree mismatch at line {line}: `{name}` declared {declared}, actual {actual}"
            ),
            DslError::UnknownName { name, line } => {
                write!(f, "unknown name `{name}` at line {line}")
            }
            DslError::Kind { msg, line } => write!(f, "kind error at line {line}: {msg}"),
            DslError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DslError {}

impl From<crate::Error> for DslError {
    fn from(e: crate::Error) -> Self {
        DslError::Geometry(e)
    }
}

type DResult<T> = std::result::Result<T, DslError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefKind {
    Form,
    Tvf,
    ProjTvf,
    Section,
    Connection,
}

impl DefKind {
    fn keyword(self) -> &'static str {
        match self {
            DefKind::Form => "form",
            DefKind::Tvf => "tvf",
            DefKind::ProjTvf => "projtvf",
            DefKind::Section => "section",
            DefKind::Connection => "connection",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "form" => Some(DefKind::Form),
            "tvf" => Some(DefKind::Tvf),
            "projtvf" => Some(DefKind::ProjTvf),
            "section" => Some(DefKind::Section),
            "connection" => Some(DefKind::Connection),
            _ => None,
        }
    }
}

/// The value of a named definition, in its kind-specific representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Form(Form),
    Tvf(Tvf),
    ProjTvf(ProjTvf),
    Section(Section),
    Connection(Connection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub kind: DefKind,
    pub name: String,
    pub binding: Binding,
}

/// A parsed, evaluated model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFile {
    pub chart_name: String,
    pub base_names: Vec<String>,
    pub qchart: QChart,
    pub defs: Vec<Definition>,
}

/// An evaluated expression value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Scalar(ComplexScalar),
    Form(ComplexForm),
    Tangent(Tvf),
    Conn(Connection),
}

impl ModelFile {
    pub fn new(chart_name: &str, base_names: &[&str]) -> Self {
        ModelFile {
            chart_name: chart_name.to_string(),
            base_names: base_names.iter().map(|s| s.to_string()).collect(),
            qchart: QChart::new(base_names),
            defs: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: DefKind, name: &str, binding: Binding) {
        self.defs.push(Definition { kind, name: name.to_string(), binding });
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.name == name)
    }

    pub fn parse(text: &str) -> DResult<ModelFile> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0, model: None };
        p.parse_model()
    }

    /// Canonical rendering; parsing it back reproduces the model.
    pub fn pretty_print(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("chart {}({})\n", self.chart_name, self.base_names.join(",")));
        for def in &self.defs {
            let (annot, body) = match &def.binding {
                Binding::Form(f) => {
                    (Some(f.degree()), form_str(&ComplexForm::real(f.clone()), &self.qchart))
                }
                Binding::Tvf(t) => (Some(t.degree()), tangent_str(t, &self.qchart)),
                Binding::ProjTvf(p) => (Some(p.degree()), tangent_str(&p.embed(), &self.qchart)),
                Binding::Section(s) => (None, complex_scalar_str(s.psi())),
                Binding::Connection(c) => {
                    (None, tangent_str(&c.as_tvf().embed(), &self.qchart))
                }
            };
            match annot {
                Some(d) => out.push_str(&format!(
                    "{} {}:{} = {}\n",
                    def.kind.keyword(),
                    def.name,
                    d,
                    body
                )),
                None => {
                    out.push_str(&format!("{} {} = {}\n", def.kind.keyword(), def.name, body))
                }
            }
        }
        out
    }

    /// Evaluates a command-line expression (with operation calls) against
    /// the model.
    pub fn eval_expression(&self, text: &str) -> DResult<Value> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0, model: Some(self.clone()) };
        let v = p.parse_expr()?;
        p.expect_end()?;
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Newline,
    End,
}

#[derive(Debug, Clone, Copy)]
struct Span {
    line: usize,
    col: usize,
}

fn lex(text: &str) -> DResult<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        let start_len = out.len();
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                }
                out.push((Tok::Ident(s), Span { line, col }));
            } else if c.is_ascii_digit() {
                let mut n: i64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|m| m.checked_add((chars[i] as u8 - b'0') as i64))
                        .ok_or(DslError::Syntax {
                            line,
                            col,
                            msg: "integer literal too large".into(),
                        })?;
                    i += 1;
                }
                out.push((Tok::Int(n), Span { line, col }));
            } else if "()+-*^/=:,@".contains(c) {
                out.push((Tok::Sym(c), Span { line, col }));
                i += 1;
            } else {
                return Err(DslError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        if out.len() > start_len {
            out.push((Tok::Newline, Span { line, col: chars.len() + 1 }));
        }
    }
    out.push((Tok::End, Span { line: text.lines().count() + 1, col: 1 }));
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser / evaluator

struct Parser {
    tokens: Vec<(Tok, Span)>,
    pos: usize,
    model: Option<ModelFile>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> DResult<T> {
        let s = self.span();
        Err(DslError::Syntax { line: s.line, col: s.col, msg: msg.into() })
    }

    fn expect_sym(&mut self, c: char) -> DResult<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn expect_ident(&mut self) -> DResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.syntax("expected an identifier"),
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn expect_statement_end(&mut self) -> DResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::End => Ok(()),
            _ => self.syntax("expected end of line"),
        }
    }

    fn expect_end(&mut self) -> DResult<()> {
        self.skip_newlines();
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.syntax("trailing input after expression")
        }
    }

    fn model(&self) -> &ModelFile {
        self.model.as_ref().expect("definitions require a chart declaration")
    }

    fn parse_model(&mut self) -> DResult<ModelFile> {
        self.skip_newlines();
        let kw = self.expect_ident()?;
        if kw != "chart" {
            return self.syntax("a model starts with a `chart` declaration");
        }
        let chart_name = self.expect_ident()?;
        self.expect_sym('(')?;
        let mut names = Vec::new();
        loop {
            let n = self.expect_ident()?;
            if n == "w1" || n == "w2" || n == "i" || n == "I" || n == "iI" || n == "id" || n == "d"
            {
                return self.syntax(format!("`{n}` is reserved and cannot name a coordinate"));
            }
            if names.contains(&n) {
                return self.syntax(format!("duplicate coordinate `{n}`"));
            }
            names.push(n);
            match self.bump() {
                Tok::Sym(',') => continue,
                Tok::Sym(')') => break,
                _ => return self.syntax("expected `,` or `)` in the coordinate list"),
            }
        }
        self.expect_statement_end()?;
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        self.model = Some(ModelFile {
            chart_name,
            base_names: names.clone(),
            qchart: QChart::new(&refs),
            defs: Vec::new(),
        });
        loop {
            self.skip_newlines();
            if *self.peek() == Tok::End {
                break;
            }
            self.parse_definition()?;
        }
        Ok(self.model.take().unwrap())
    }

    fn parse_definition(&mut self) -> DResult<()> {
        let line = self.span().line;
        let kw = self.expect_ident()?;
        let kind = match DefKind::from_keyword(&kw) {
            Some(k) => k,
            None => return self.syntax(format!("unknown definition kind `{kw}`")),
        };
        let name = self.expect_ident()?;
        if self.model().get(&name).is_some() || self.model().qchart.total().index_of(&name).is_some()
        {
            return self.syntax(format!("name `{name}` is already taken"));
        }
        let declared = if *self.peek() == Tok::Sym(':') {
            self.bump();
            match self.bump() {
                Tok::Int(n) if n >= 0 => Some(n as usize),
                _ => return self.syntax("expected a degree after `:`"),
            }
        } else {
            None
        };
        if declared.is_some() && matches!(kind, DefKind::Section | DefKind::Connection) {
            return self.syntax("sections and connections take no degree annotation");
        }
        self.expect_sym('=')?;
        let value = self.parse_expr()?;
        self.expect_statement_end()?;
        let qchart = self.model().qchart.clone();
        let binding = bind(kind, &name, value, declared, &qchart, line)?;
        self.model.as_mut().unwrap().defs.push(Definition { kind, name, binding });
        Ok(())
    }

    fn parse_expr(&mut self) -> DResult<Value> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = self.add(acc, rhs)?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    let rhs = self.negate(rhs);
                    acc = self.add(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> DResult<Value> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    acc = self.multiply(acc, rhs)?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    acc = self.divide(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_unary(&mut self) -> DResult<Value> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            let v = self.parse_unary()?;
            return Ok(self.negate(v));
        }
        self.parse_power()
    }

    // `^` (power / wedge / tensor) binds tighter than `*` and `/`
    fn parse_power(&mut self) -> DResult<Value> {
        let mut acc = self.parse_atom()?;
        while *self.peek() == Tok::Sym('^') {
            self.bump();
            let rhs = self.parse_atom()?;
            acc = self.caret(acc, rhs)?;
        }
        Ok(acc)
    }

    fn parse_atom(&mut self) -> DResult<Value> {
        let qchart = self.model().qchart.clone();
        let total = qchart.total().clone();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Value::Scalar(ComplexScalar::real(ScalarField::constant(&total, rat(n)))))
            }
            Tok::Sym('(') => {
                self.bump();
                let v = self.parse_expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Sym('@') => {
                self.bump();
                let name = self.expect_ident()?;
                match total.index_of(&name) {
                    Some(idx) => Ok(Value::Tangent(Tvf::basis_vector(&total, idx))),
                    None => {
                        let line = self.span().line;
                        Err(DslError::UnknownName { name: format!("@{name}"), line })
                    }
                }
            }
            Tok::Ident(name) => {
                let line = self.span().line;
                self.bump();
                if *self.peek() == Tok::Sym('(') {
                    return self.parse_call(&name, line);
                }
                if name == "d" {
                    let coord = self.expect_ident()?;
                    return match total.index_of(&coord) {
                        Some(idx) => Ok(Value::Form(ComplexForm::real(Form::covector(&total, idx)))),
                        None => Err(DslError::UnknownName { name: format!("d {coord}"), line }),
                    };
                }
                match name.as_str() {
                    "i" => {
                        return Ok(Value::Scalar(ComplexScalar::new(
                            ScalarField::zero(&total),
                            ScalarField::one(&total),
                        )))
                    }
                    "I" => {
                        return Ok(Value::Tangent(
                            ProjTvf::liouville(&qchart, LiouvilleKind::Real).embed(),
                        ))
                    }
                    "iI" => {
                        return Ok(Value::Tangent(
                            ProjTvf::liouville(&qchart, LiouvilleKind::Imaginary).embed(),
                        ))
                    }
                    "id" => {
                        let mut t = Tvf::zero(&total, 1);
                        for mu in 0..qchart.n() {
                            t.insert_add(MultiIndex::single(mu), mu, ScalarField::one(&total));
                        }
                        return Ok(Value::Tangent(t));
                    }
                    _ => {}
                }
                if let Some(idx) = total.index_of(&name) {
                    return Ok(Value::Scalar(ComplexScalar::real(ScalarField::coordinate(
                        &total, idx,
                    ))));
                }
                match self.model().get(&name) {
                    Some(def) => Ok(binding_value(&def.binding, &qchart)),
                    None => Err(DslError::UnknownName { name, line }),
                }
            }
            _ => self.syntax("expected an expression"),
        }
    }

    fn parse_call(&mut self, func: &str, line: usize) -> DResult<Value> {
        self.expect_sym('(')?;
        let mut args = Vec::new();
        if *self.peek() != Tok::Sym(')') {
            loop {
                args.push(self.parse_expr()?);
                match self.peek() {
                    Tok::Sym(',') => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        }
        self.expect_sym(')')?;
        apply_function(func, args, &self.model().qchart, line)
    }

    fn negate(&self, v: Value) -> Value {
        match v {
            Value::Scalar(s) => Value::Scalar(s.neg()),
            Value::Form(f) => Value::Form(f.neg()),
            Value::Tangent(t) => Value::Tangent(t.neg()),
            Value::Conn(c) => Value::Conn(c),
        }
    }

    fn add(&self, a: Value, b: Value) -> DResult<Value> {
        let line = self.span().line;
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x.add(&y))),
            (Value::Form(x), Value::Form(y)) if x.degree() == y.degree() => {
                Ok(Value::Form(x.add(&y)))
            }
            (Value::Form(x), Value::Scalar(y)) | (Value::Scalar(y), Value::Form(x))
                if x.degree() == 0 =>
            {
                Ok(Value::Form(x.add(&scalar_as_form(&y))))
            }
            (Value::Tangent(x), Value::Tangent(y)) if x.degree() == y.degree() => {
                Ok(Value::Tangent(x.add(&y)))
            }
            (a, b) => Err(DslError::Kind {
                msg: format!("cannot add {} and {}", kind_name(&a), kind_name(&b)),
                line,
            }),
        }
    }

    fn multiply(&self, a: Value, b: Value) -> DResult<Value> {
        let line = self.span().line;
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x.mul(&y))),
            (Value::Scalar(x), Value::Form(f)) | (Value::Form(f), Value::Scalar(x)) => {
                Ok(Value::Form(f.scale_complex(&x)))
            }
            (Value::Scalar(x), Value::Tangent(t)) | (Value::Tangent(t), Value::Scalar(x)) => {
                Ok(Value::Tangent(scale_tangent(&t, &x, line)?))
            }
            (a, b) => Err(DslError::Kind {
                msg: format!("cannot multiply {} and {}", kind_name(&a), kind_name(&b)),
                line,
            }),
        }
    }

    fn caret(&self, a: Value, b: Value) -> DResult<Value> {
        let line = self.span().line;
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => match as_int_constant(&y) {
                Some(n) if n >= 0 => {
                    let mut acc =
                        ComplexScalar::real(ScalarField::one(x.chart()));
                    for _ in 0..n {
                        acc = acc.mul(&x);
                    }
                    Ok(Value::Scalar(acc))
                }
                _ => Err(DslError::Kind {
                    msg: "scalar `^` takes a nonnegative integer exponent".into(),
                    line,
                }),
            },
            (Value::Form(x), Value::Form(y)) => Ok(Value::Form(x.wedge(&y)?)),
            (Value::Form(x), Value::Scalar(y)) if x.degree() > 0 => {
                // wedging against a 0-form
                Ok(Value::Form(x.scale_complex(&y)))
            }
            (Value::Scalar(x), Value::Form(y)) => Ok(Value::Form(y.scale_complex(&x))),
            (Value::Form(x), Value::Tangent(t)) => Ok(Value::Tangent(tensor(&x, &t, line)?)),
            (Value::Scalar(x), Value::Tangent(t)) => Ok(Value::Tangent(scale_tangent(&t, &x, line)?)),
            (a, b) => Err(DslError::Kind {
                msg: format!("`^` does not apply to {} and {}", kind_name(&a), kind_name(&b)),
                line,
            }),
        }
    }

    fn divide(&self, a: Value, b: Value) -> DResult<Value> {
        let line = self.span().line;
        let c = match &b {
            Value::Scalar(s) => as_rat_constant(s),
            _ => None,
        };
        let c = match c {
            Some(c) if !c.is_zero() => c,
            _ => {
                return Err(DslError::Kind {
                    msg: "`/` takes a nonzero rational constant divisor".into(),
                    line,
                })
            }
        };
        let inv = c.recip();
        match a {
            Value::Scalar(s) => Ok(Value::Scalar(ComplexScalar::new(
                s.re.scale(&inv),
                s.im.scale(&inv),
            ))),
            Value::Form(f) => Ok(Value::Form(ComplexForm::new(f.re.scale(&inv), f.im.scale(&inv)))),
            Value::Tangent(t) => Ok(Value::Tangent(t.scale(&inv))),
            Value::Conn(_) => Err(DslError::Kind {
                msg: "connections do not divide".into(),
                line,
            }),
        }
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Scalar(_) => "a scalar",
        Value::Form(_) => "a form",
        Value::Tangent(_) => "a tangent-valued form",
        Value::Conn(_) => "a connection",
    }
}

fn scalar_as_form(s: &ComplexScalar) -> ComplexForm {
    ComplexForm::new(Form::from_scalar(s.re.clone()), Form::from_scalar(s.im.clone()))
}

fn as_rat_constant(s: &ComplexScalar) -> Option<Rat> {
    if !s.im.is_zero() {
        return None;
    }
    let mut terms = s.re.terms();
    match terms.next() {
        None => Some(Rat::zero()),
        Some((exps, c)) if exps.iter().all(|&e| e == 0) && terms.next().is_none() => {
            Some(c.clone())
        }
        _ => None,
    }
}

fn as_int_constant(s: &ComplexScalar) -> Option<i64> {
    let r = as_rat_constant(s)?;
    if r.denom() == &BigInt::one() {
        use num::ToPrimitive;
        r.numer().to_i64()
    } else {
        None
    }
}

/// Multiplication by `i` on a vertical tangent-valued form: the complex
/// structure `(V¹, V²) ↦ (−V², V¹)` of the fibres.
fn rotate_vertical(t: &Tvf, qchart: &QChart, line: usize) -> DResult<Tvf> {
    let n = qchart.n();
    let mut out = Tvf::zero(t.chart(), t.degree());
    for ((mi, mu), f) in t.comps() {
        if *mu < n {
            return Err(DslError::Kind {
                msg: "`i` applies only to vertical (fiber) directions".into(),
                line,
            });
        }
        let a = *mu - n;
        let target = n + (1 - a);
        let signed = if a == 0 { f.clone() } else { f.neg() };
        out.insert_add(mi.clone(), target, signed);
    }
    Ok(out)
}

fn scale_tangent(t: &Tvf, s: &ComplexScalar, line: usize) -> DResult<Tvf> {
    let mut out = scale_tangent_real(t, &s.re);
    if !s.im.is_zero() {
        // infer the adapted chart from the tangent chart
        let qchart = qchart_of(t.chart(), line)?;
        let rotated = rotate_vertical(t, &qchart, line)?;
        out = out.add(&scale_tangent_real(&rotated, &s.im));
    }
    Ok(out)
}

fn scale_tangent_real(t: &Tvf, g: &ScalarField) -> Tvf {
    let mut out = Tvf::zero(t.chart(), t.degree());
    for ((mi, mu), f) in t.comps() {
        out.insert_add(mi.clone(), *mu, f.mul(g));
    }
    out
}

fn qchart_of(total: &Chart, line: usize) -> DResult<QChart> {
    if !total.has_fiber() {
        return Err(DslError::Kind { msg: "expected an adapted fibred chart".into(), line });
    }
    let names: Vec<String> =
        (0..total.n_base()).map(|i| total.coord(i).name.clone()).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Ok(QChart::new(&refs))
}

fn tensor(f: &ComplexForm, t: &Tvf, line: usize) -> DResult<Tvf> {
    if t.degree() != 0 {
        return Err(DslError::Kind {
            msg: "`^` tensors a form with a direction (a degree-0 field)".into(),
            line,
        });
    }
    let mut out = Tvf::tensor(&f.re, t)?;
    if !f.im.is_zero() {
        let qchart = qchart_of(t.chart(), line)?;
        let rotated = rotate_vertical(t, &qchart, line)?;
        out = out.add(&Tvf::tensor(&f.im, &rotated)?);
    }
    Ok(out)
}

fn binding_value(b: &Binding, qchart: &QChart) -> Value {
    let total = qchart.total();
    match b {
        Binding::Form(f) => Value::Form(ComplexForm::real(f.clone())),
        Binding::Tvf(t) => Value::Tangent(t.clone()),
        Binding::ProjTvf(p) => Value::Tangent(p.embed()),
        Binding::Section(s) => Value::Scalar(s.psi().promote(total)),
        Binding::Connection(c) => Value::Conn(c.clone()),
    }
}

fn bind(
    kind: DefKind,
    name: &str,
    value: Value,
    declared: Option<usize>,
    qchart: &QChart,
    line: usize,
) -> DResult<Binding> {
    let check_degree = |actual: usize| -> DResult<()> {
        match declared {
            Some(d) if d != actual => Err(DslError::DegreeMismatch {
                name: name.to_string(),
                declared: d,
                actual,
                line,
            }),
            _ => Ok(()),
        }
    };
    match kind {
        DefKind::Form => {
            let f = match value {
                Value::Form(f) => f,
                Value::Scalar(s) => scalar_as_form(&s),
                other => {
                    return Err(DslError::Kind {
                        msg: format!("`form` expects a form, got {}", kind_name(&other)),
                        line,
                    })
                }
            };
            check_degree(f.degree())?;
            if !f.im.is_zero() {
                return Err(DslError::Kind {
                    msg: "`form` definitions are real; imaginary parts belong on I".into(),
                    line,
                });
            }
            Ok(Binding::Form(f.re))
        }
        DefKind::Tvf => match value {
            Value::Tangent(t) => {
                check_degree(t.degree())?;
                Ok(Binding::Tvf(t))
            }
            other => Err(DslError::Kind {
                msg: format!("`tvf` expects a tangent-valued form, got {}", kind_name(&other)),
                line,
            }),
        },
        DefKind::ProjTvf => match value {
            Value::Tangent(t) => {
                check_degree(t.degree())?;
                Ok(Binding::ProjTvf(ProjTvf::project(&t, qchart)?))
            }
            other => Err(DslError::Kind {
                msg: format!("`projtvf` expects a tangent-valued form, got {}", kind_name(&other)),
                line,
            }),
        },
        DefKind::Section => match value {
            Value::Scalar(s) => {
                let psi = s.restrict(qchart.base()).map_err(|_| DslError::Kind {
                    msg: format!("`section {name}` must live on the base coordinates"),
                    line,
                })?;
                Ok(Binding::Section(Section::new(qchart, psi)?))
            }
            other => Err(DslError::Kind {
                msg: format!("`section` expects a complex scalar, got {}", kind_name(&other)),
                line,
            }),
        },
        DefKind::Connection => match value {
            Value::Tangent(t) => {
                let p = ProjTvf::project(&t, qchart)?;
                Ok(Binding::Connection(Connection::from_tvf(&p)?))
            }
            other => Err(DslError::Kind {
                msg: format!(
                    "`connection` expects a tangent-valued 1-form, got {}",
                    kind_name(&other)
                ),
                line,
            }),
        },
    }
}

fn apply_function(func: &str, args: Vec<Value>, qchart: &QChart, line: usize) -> DResult<Value> {
    let wrong = |msg: &str| -> DResult<Value> {
        Err(DslError::Kind { msg: format!("{func}: {msg}"), line })
    };
    let as_tangent = |v: &Value| -> Option<Tvf> {
        match v {
            Value::Tangent(t) => Some(t.clone()),
            Value::Conn(c) => Some(c.as_tvf().embed()),
            _ => None,
        }
    };
    let as_complex_form = |v: &Value| -> Option<ComplexForm> {
        match v {
            Value::Form(f) => Some(f.clone()),
            Value::Scalar(s) => Some(scalar_as_form(s)),
            _ => None,
        }
    };
    let as_conn = |v: &Value| -> Option<Connection> {
        match v {
            Value::Conn(c) => Some(c.clone()),
            _ => None,
        }
    };
    let hermitian = |c: &Connection| -> DResult<HermitianConnection> {
        match c.hermitian_potential()? {
            Some(a) => Ok(HermitianConnection::new(qchart, a)?),
            None => Err(DslError::Geometry(crate::Error::NotHermitianConnection(
                "the connection has no Hermitian potential".into(),
            ))),
        }
    };
    match func {
        "fn" => match (args.first().and_then(&as_tangent), args.get(1).and_then(&as_tangent)) {
            (Some(a), Some(b)) if args.len() == 2 => Ok(Value::Tangent(a.fn_bracket(&b)?)),
            _ => wrong("expects two tangent-valued forms"),
        },
        "d" => match args.first().and_then(&as_complex_form) {
            Some(f) if args.len() == 1 => Ok(Value::Form(f.ext_d())),
            _ => wrong("expects a form"),
        },
        "L" => match (args.first().and_then(&as_tangent), args.get(1).and_then(&as_complex_form)) {
            (Some(t), Some(f)) if args.len() == 2 => Ok(Value::Form(ComplexForm::new(
                t.lie_form(&f.re)?,
                t.lie_form(&f.im)?,
            ))),
            _ => wrong("expects a tangent-valued form and a form"),
        },
        "i" => match (args.first().and_then(&as_tangent), args.get(1).and_then(&as_complex_form)) {
            (Some(t), Some(f)) if args.len() == 2 => Ok(Value::Form(ComplexForm::new(
                t.interior(&f.re)?,
                t.interior(&f.im)?,
            ))),
            _ => wrong("expects a tangent-valued form and a form"),
        },
        "curv" => match args.first().and_then(&as_conn) {
            Some(c) if args.len() == 1 => Ok(Value::Tangent(c.curvature()?.embed())),
            _ => wrong("expects a connection"),
        },
        "phi" => match args.first().and_then(&as_conn) {
            Some(c) if args.len() == 1 => {
                let h = hermitian(&c)?;
                Ok(Value::Form(ComplexForm::real(h.phi_form().promote(qchart.total()))))
            }
            _ => wrong("expects a Hermitian connection"),
        },
        "nu" => match (args.first().and_then(&as_conn), args.get(1).and_then(&as_tangent)) {
            (Some(c), Some(t)) if args.len() == 2 => {
                let p = ProjTvf::project(&t, qchart)?;
                Ok(Value::Tangent(c.nu(&p)?.embed()))
            }
            _ => wrong("expects a connection and a projectable tangent-valued form"),
        },
        "lift" => match (args.first().and_then(&as_conn), args.get(1).and_then(&as_tangent)) {
            (Some(c), Some(t)) if args.len() == 2 => {
                let base = restrict_tangent(&t, qchart).ok_or(DslError::Kind {
                    msg: "lift: the argument must live on the base".into(),
                    line,
                })?;
                Ok(Value::Tangent(c.horizontal_lift(&base)?.embed()))
            }
            _ => wrong("expects a connection and a base tangent-valued form"),
        },
        "nabla" => match (args.first().and_then(&as_conn), args.get(1)) {
            (Some(c), Some(Value::Scalar(s))) if args.len() == 2 => {
                let h = hermitian(&c)?;
                let psi = Section::new(qchart, s.restrict(qchart.base())?)?;
                let out = h.nabla_section(&psi)?;
                Ok(Value::Form(ComplexForm::new(
                    out.re.promote(qchart.total()),
                    out.im.promote(qchart.total()),
                )))
            }
            _ => wrong("expects a Hermitian connection and a section"),
        },
        "tr" => match args.first().and_then(&as_tangent) {
            Some(t) if args.len() == 1 => {
                let p = ProjTvf::project(&t, qchart)?;
                let out = complex_trace(&p)?;
                Ok(Value::Form(ComplexForm::new(
                    out.re.promote(qchart.total()),
                    out.im.promote(qchart.total()),
                )))
            }
            _ => wrong("expects a vertical-valued form"),
        },
        _ => Err(DslError::UnknownName { name: format!("{func}(...)"), line }),
    }
}

/// Reads a tangent-valued form on the total chart back onto the base, when
/// it has no fibre legs, directions or dependence.
pub fn restrict_tangent(t: &Tvf, qchart: &QChart) -> Option<Tvf> {
    let n = qchart.n();
    let mut out = Tvf::zero(qchart.base(), t.degree());
    for ((mi, mu), f) in t.comps() {
        if mi.indices().iter().any(|&i| i >= n) || *mu >= n {
            return None;
        }
        out.insert_add(mi.clone(), *mu, f.restrict(qchart.base()).ok()?);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// canonical model rendering

fn rat_str(r: &Rat) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn monomial_str(exps: &[u32], chart: &Chart) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        if e == 1 {
            parts.push(chart.coord(i).name.clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", chart.coord(i).name, e));
        }
    }
    parts.join("*")
}

/// Canonical parseable polynomial rendering.
pub fn scalar_str(f: &ScalarField) -> String {
    let chart = f.chart();
    let mut out = String::new();
    let mut first = true;
    for (exps, c) in f.terms() {
        let mono = monomial_str(exps, chart);
        let mut term = if mono.is_empty() {
            rat_str(c)
        } else if c == &rat(1) {
            mono
        } else if c == &rat(-1) {
            format!("-{mono}")
        } else {
            format!("{}*{}", rat_str(c), mono)
        };
        if first {
            out.push_str(&term);
            first = false;
        } else if let Some(stripped) = term.strip_prefix('-') {
            term = stripped.to_string();
            out.push_str(&format!(" - {term}"));
        } else {
            out.push_str(&format!(" + {term}"));
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

pub fn complex_scalar_str(s: &ComplexScalar) -> String {
    if s.is_zero() {
        "0".to_string()
    } else if s.im.is_zero() {
        scalar_str(&s.re)
    } else if s.re.is_zero() {
        format!("i*({})", scalar_str(&s.im))
    } else {
        format!("{} + i*({})", scalar_str(&s.re), scalar_str(&s.im))
    }
}

fn legs_str(mi: &MultiIndex, chart: &Chart) -> String {
    mi.indices()
        .iter()
        .map(|&i| format!("d {}", chart.coord(i).name))
        .collect::<Vec<_>>()
        .join("^")
}

fn weighted_term(coeff: &ScalarField, tail: &str) -> Option<String> {
    if coeff.is_zero() {
        return None;
    }
    if tail.is_empty() {
        return Some(format!("({})", scalar_str(coeff)));
    }
    let one = ScalarField::one(coeff.chart());
    if coeff == &one {
        Some(tail.to_string())
    } else {
        Some(format!("({})*{}", scalar_str(coeff), tail))
    }
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Canonical parseable rendering of a (complex) form on the total chart.
pub fn form_str(f: &ComplexForm, qchart: &QChart) -> String {
    let chart = qchart.total();
    let mut terms = Vec::new();
    for (mi, c) in f.re.comps() {
        let legs = legs_str(mi, chart);
        if let Some(t) = weighted_term(c, &legs) {
            terms.push(t);
        }
    }
    for (mi, c) in f.im.comps() {
        let legs = legs_str(mi, chart);
        if c.is_zero() {
            continue;
        }
        let inner = if legs.is_empty() {
            format!("i*({})", scalar_str(c))
        } else {
            format!("(i*({}))*{}", scalar_str(c), legs)
        };
        terms.push(inner);
    }
    join_terms(terms)
}

/// Canonical parseable rendering of a tangent-valued form on the total
/// chart. Complex-linear vertical parts are rendered through `I` and `iI`;
/// other fibre components fall back to `@w1`, `@w2`.
pub fn tangent_str(t: &Tvf, qchart: &QChart) -> String {
    let chart = qchart.total();
    let n = qchart.n();
    let base = qchart.base();
    let w1 = ScalarField::coordinate(chart, qchart.w_index(0));
    let w2 = ScalarField::coordinate(chart, qchart.w_index(1));
    let mut terms = Vec::new();
    let mut multi_indices: Vec<MultiIndex> = t.comps().map(|((m, _), _)| m.clone()).collect();
    multi_indices.sort();
    multi_indices.dedup();
    for mi in multi_indices {
        let legs = legs_str(&mi, chart);
        for mu in 0..n {
            let f = t.comp(&mi, mu);
            let tail = if legs.is_empty() {
                format!("@{}", chart.coord(mu).name)
            } else {
                format!("{legs}^@{}", chart.coord(mu).name)
            };
            if let Some(s) = weighted_term(&f, &tail) {
                terms.push(s);
            }
        }
        let f1 = t.comp(&mi, qchart.w_index(0));
        let f2 = t.comp(&mi, qchart.w_index(1));
        if f1.is_zero() && f2.is_zero() {
            continue;
        }
        // complex-linear extraction: f1 = α w1 − β w2, f2 = β w1 + α w2
        let alpha = f1.diff_idx(qchart.w_index(0)).restrict(base).ok();
        let beta = f2.diff_idx(qchart.w_index(0)).restrict(base).ok();
        let extracted = match (alpha, beta) {
            (Some(a), Some(b)) => {
                let ap = a.promote(chart);
                let bp = b.promote(chart);
                let r1 = ap.mul(&w1).sub(&bp.mul(&w2));
                let r2 = bp.mul(&w1).add(&ap.mul(&w2));
                if r1 == f1 && r2 == f2 {
                    Some((a, b))
                } else {
                    None
                }
            }
            _ => None,
        };
        match extracted {
            Some((a, b)) => {
                for (coeff, token) in [(a, "I"), (b, "iI")] {
                    let tail = if legs.is_empty() {
                        token.to_string()
                    } else {
                        format!("{legs}^{token}")
                    };
                    let lifted = coeff.promote(chart);
                    if let Some(s) = weighted_term(&lifted, &tail) {
                        terms.push(s);
                    }
                }
            }
            None => {
                for (f, a) in [(f1, 0), (f2, 1)] {
                    let name = &chart.coord(qchart.w_index(a)).name;
                    let tail = if legs.is_empty() {
                        format!("@{name}")
                    } else {
                        format!("{legs}^@{name}")
                    };
                    if let Some(s) = weighted_term(&f, &tail) {
                        terms.push(s);
                    }
                }
            }
        }
    }
    join_terms(terms)
}

// ---------------------------------------------------------------------------
// human-facing rendering (reports)

fn report_coeff(c: &ScalarField) -> (bool, String) {
    // returns (negate, rendered magnitude); multi-term coefficients are
    // parenthesized and never negated
    let terms: Vec<_> = c.terms().collect();
    if terms.len() == 1 {
        let (exps, r) = terms[0];
        let mono = monomial_str(exps, c.chart());
        let negate = r.is_negative();
        let mag = r.abs();
        let coeff = if mono.is_empty() {
            rat_str(&mag)
        } else if mag == rat(1) {
            mono
        } else {
            format!("{} {}", rat_str(&mag), mono)
        };
        (negate, coeff)
    } else {
        (false, format!("({})", scalar_str(c)))
    }
}

fn report_push(out: &mut Vec<(bool, String)>, coeff: &ScalarField, tail: &str) {
    if coeff.is_zero() {
        return;
    }
    let (neg, mag) = report_coeff(coeff);
    let body = if tail.is_empty() {
        mag
    } else if mag == "1" {
        tail.to_string()
    } else {
        format!("{mag} {tail}")
    };
    out.push((neg, body));
}

fn report_join(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
            out.push_str(body);
        } else {
            out.push_str(if *neg { " - " } else { " + " });
            out.push_str(body);
        }
    }
    out
}

fn report_legs(mi: &MultiIndex, chart: &Chart) -> String {
    mi.indices()
        .iter()
        .map(|&i| format!("d{}", chart.coord(i).name))
        .collect::<Vec<_>>()
        .join("^")
}

/// Human rendering of a scalar, `x^2 - 2 y` style.
pub fn report_scalar(f: &ScalarField) -> String {
    let mut terms = Vec::new();
    for (exps, c) in f.terms() {
        let mono = monomial_str(exps, f.chart());
        let neg = c.is_negative();
        let mag = c.abs();
        let body = if mono.is_empty() {
            rat_str(&mag)
        } else if mag == rat(1) {
            mono
        } else {
            format!("{} {}", rat_str(&mag), mono)
        };
        terms.push((neg, body));
    }
    report_join(terms)
}

pub fn report_complex_scalar(s: &ComplexScalar) -> String {
    if s.is_zero() {
        "0".into()
    } else if s.im.is_zero() {
        report_scalar(&s.re)
    } else if s.re.is_zero() {
        imaginary_str(&s.im)
    } else {
        format!("{} + {}", report_scalar(&s.re), imaginary_str(&s.im))
    }
}

fn imaginary_str(im: &ScalarField) -> String {
    let terms: Vec<_> = im.terms().collect();
    if terms.len() == 1 {
        let (exps, r) = terms[0];
        let mono = monomial_str(exps, im.chart());
        let sign = if r.is_negative() { "-" } else { "" };
        let mag = r.abs();
        if mono.is_empty() {
            if mag == rat(1) {
                format!("{sign}i")
            } else {
                format!("{sign}{}i", rat_str(&mag))
            }
        } else if mag == rat(1) {
            format!("{sign}i {mono}")
        } else {
            format!("{sign}{}i {mono}", rat_str(&mag))
        }
    } else {
        format!("({})i", report_scalar(im))
    }
}

/// Human rendering of a complex form, `-2i dx^dy` style.
pub fn report_form(f: &ComplexForm) -> String {
    let chart = f.chart();
    let mut keys: Vec<MultiIndex> = f
        .re
        .comps()
        .map(|(m, _)| m.clone())
        .chain(f.im.comps().map(|(m, _)| m.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    let mut terms = Vec::new();
    for mi in keys {
        let legs = report_legs(&mi, chart);
        let re = f.re.comp(&mi);
        let im = f.im.comp(&mi);
        if im.is_zero() {
            report_push(&mut terms, &re, &legs);
        } else if re.is_zero() {
            let body = if legs.is_empty() {
                imaginary_str(&im)
            } else {
                format!("{} {legs}", imaginary_str(&im))
            };
            terms.push((false, body));
        } else {
            let coeff = format!("({} + {})", report_scalar(&re), imaginary_str(&im));
            let body = if legs.is_empty() { coeff } else { format!("{coeff} {legs}") };
            terms.push((false, body));
        }
    }
    report_join(terms)
}

/// Human rendering of a tangent-valued form, `x d/dx - y d/dy` and
/// `-2i dx^dy (x) I` style.
pub fn report_tangent(t: &Tvf, qchart: &QChart) -> String {
    let chart = qchart.total();
    let n = qchart.n();
    let base = qchart.base();
    let w1 = ScalarField::coordinate(chart, qchart.w_index(0));
    let w2 = ScalarField::coordinate(chart, qchart.w_index(1));
    let mut multi_indices: Vec<MultiIndex> = t.comps().map(|((m, _), _)| m.clone()).collect();
    multi_indices.sort();
    multi_indices.dedup();
    let mut terms = Vec::new();
    for mi in multi_indices {
        let legs = report_legs(&mi, chart);
        for mu in 0..n {
            let f = t.comp(&mi, mu);
            let dir = format!("d/d{}", chart.coord(mu).name);
            let tail = if legs.is_empty() { dir } else { format!("{legs} (x) {dir}") };
            report_push(&mut terms, &f, &tail);
        }
        let f1 = t.comp(&mi, qchart.w_index(0));
        let f2 = t.comp(&mi, qchart.w_index(1));
        if f1.is_zero() && f2.is_zero() {
            continue;
        }
        let alpha = f1.diff_idx(qchart.w_index(0)).restrict(base).ok();
        let beta = f2.diff_idx(qchart.w_index(0)).restrict(base).ok();
        let extracted = match (alpha, beta) {
            (Some(a), Some(b)) => {
                let ap = a.promote(chart);
                let bp = b.promote(chart);
                if ap.mul(&w1).sub(&bp.mul(&w2)) == f1 && bp.mul(&w1).add(&ap.mul(&w2)) == f2 {
                    Some(ComplexScalar::new(a, b))
                } else {
                    None
                }
            }
            _ => None,
        };
        match extracted {
            Some(z) => {
                let coeff = report_complex_scalar(&z);
                let coeff = if coeff.contains(' ') && !coeff.starts_with('(') {
                    format!("({coeff})")
                } else {
                    coeff
                };
                let body = if legs.is_empty() {
                    if coeff == "1" {
                        "I".to_string()
                    } else {
                        format!("{coeff} I")
                    }
                } else if coeff == "1" {
                    format!("{legs} (x) I")
                } else {
                    format!("{coeff} {legs} (x) I")
                };
                terms.push((false, body));
            }
            None => {
                for (f, a) in [(f1, 0), (f2, 1)] {
                    let dir = format!("d/d{}", chart.coord(qchart.w_index(a)).name);
                    let tail = if legs.is_empty() { dir } else { format!("{legs} (x) {dir}") };
                    report_push(&mut terms, &f, &tail);
                }
            }
        }
    }
    report_join(terms)
}

/// Human rendering of any expression value.
pub fn report_value(v: &Value, qchart: &QChart) -> String {
    match v {
        Value::Scalar(s) => report_complex_scalar(s),
        Value::Form(f) => report_form(f),
        Value::Tangent(t) => report_tangent(t, qchart),
        Value::Conn(c) => report_tangent(&c.as_tvf().embed(), qchart),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn smoke_parses() {
        let m = ModelFile::parse("chart E(x,y)\nform a:1 = x*d y\n").unwrap();
        let def = m.get("a").unwrap();
        match &def.binding {
            Binding::Form(f) => {
                assert_eq!(f.degree(), 1);
                assert_eq!(
                    f.comp(&MultiIndex::single(1)),
                    ScalarField::coordinate(m.qchart.total(), 0)
                );
            }
            other => panic!("unexpected binding {other:?}"),
        }
        let m2 = ModelFile::parse("chart E(x,y)\ntvf Xi:1 = d x ^ @y\n").unwrap();
        match &m2.get("Xi").unwrap().binding {
            Binding::Tvf(t) => {
                assert_eq!(t.comp(&MultiIndex::single(0), 1), ScalarField::one(m2.qchart.total()));
            }
            other => panic!("unexpected binding {other:?}"),
        }
    }

    #[test]
    fn degree_mismatch_is_a_parse_error() {
        let err = ModelFile::parse("chart E(x,y)\nform b:1 = d x ^ d y\n").unwrap_err();
        match err {
            DslError::DegreeMismatch { declared: 1, actual: 2, .. } => {}
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_name_and_syntax_errors() {
        let err = ModelFile::parse("chart E(x,y)\nform a:1 = q*d y\n").unwrap_err();
        assert!(matches!(err, DslError::UnknownName { .. }));
        let err2 = ModelFile::parse("chart E(x,y)\nform a:1 = *\n").unwrap_err();
        match err2 {
            DslError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert!(col > 0);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn caret_is_power_and_wedge() {
        let m = ModelFile::parse(
            "chart E(x,y)\nform p:0 = x^2 + 1/2*y\nform w:2 = (x*d x)^d y\n",
        )
        .unwrap();
        match &m.get("p").unwrap().binding {
            Binding::Form(f) => {
                let want = ScalarField::coordinate(m.qchart.total(), 0)
                    .pow(2)
                    .add(&ScalarField::coordinate(m.qchart.total(), 1).scale(&ratio(1, 2)));
                assert_eq!(f.comp(&MultiIndex::empty()), want);
            }
            other => panic!("unexpected binding {other:?}"),
        }
        match &m.get("w").unwrap().binding {
            Binding::Form(f) => {
                assert_eq!(
                    f.comp(&MultiIndex::new(vec![0, 1]).unwrap()),
                    ScalarField::coordinate(m.qchart.total(), 0)
                );
            }
            other => panic!("unexpected binding {other:?}"),
        }
    }

    #[test]
    fn hermitian_style_definitions() {
        let text = "chart E(x,y)\n\
                    projtvf V:1 = d x^@x + (x*d x)^iI\n\
                    connection c = id + (x*d y)^iI\n\
                    section Psi = x + i*(y)\n";
        let m = ModelFile::parse(text).unwrap();
        match &m.get("V").unwrap().binding {
            Binding::ProjTvf(p) => assert!(p.is_hermitian()),
            other => panic!("unexpected binding {other:?}"),
        }
        match &m.get("c").unwrap().binding {
            Binding::Connection(c) => {
                let a = c.hermitian_potential().unwrap().unwrap();
                let want = Form::covector(m.qchart.base(), 1)
                    .scale_field(&ScalarField::coordinate(m.qchart.base(), 0));
                assert_eq!(a, want);
            }
            other => panic!("unexpected binding {other:?}"),
        }
        match &m.get("Psi").unwrap().binding {
            Binding::Section(s) => {
                assert_eq!(s.psi().re, ScalarField::coordinate(m.qchart.base(), 0));
                assert_eq!(s.psi().im, ScalarField::coordinate(m.qchart.base(), 1));
            }
            other => panic!("unexpected binding {other:?}"),
        }
    }

    #[test]
    fn pretty_print_fixpoint() {
        let text = "chart E(x,y)\n\
                    form a:1 = x*d y + 2*d x\n\
                    form vol:2 = (x^2 - y)*d x^d y\n\
                    tvf X:0 = x*@y - y*@x + w1*@x\n\
                    projtvf V:1 = d x^@x + (x*d x)^iI + (3*d y)^I\n\
                    section Psi = x + i*(x*y)\n\
                    connection c = id + (x*d y)^iI\n";
        let m = ModelFile::parse(text).unwrap();
        let printed = m.pretty_print();
        let reparsed = ModelFile::parse(&printed).unwrap();
        assert_eq!(reparsed.pretty_print(), printed);
        // bindings survive the round trip exactly
        for (a, b) in m.defs.iter().zip(reparsed.defs.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn eval_expression_examples() {
        let text = "chart E(x,y)\n\
                    tvf X:0 = x*@y\n\
                    tvf Y:0 = y*@x\n\
                    form a:1 = x*d y\n\
                    connection c = id + (x*d y)^iI\n";
        let m = ModelFile::parse(text).unwrap();
        // commutator example renders in the report style
        let v = m.eval_expression("fn(X,Y)").unwrap();
        assert_eq!(report_value(&v, &m.qchart), "x d/dx - y d/dy");
        // curvature rendering
        let r = m.eval_expression("curv(c)").unwrap();
        assert_eq!(report_value(&r, &m.qchart), "-2i dx^dy (x) I");
        // d(d(a)) = 0
        let z = m.eval_expression("d(d(a))").unwrap();
        assert_eq!(report_value(&z, &m.qchart), "0");
        // phi
        let p = m.eval_expression("phi(c)").unwrap();
        assert_eq!(report_value(&p, &m.qchart), "2 dx^dy");
    }

    #[test]
    fn projection_errors_name_the_offender() {
        let err = ModelFile::parse("chart E(x,y)\nprojtvf V:1 = (w1*d x)^@x\n").unwrap_err();
        match err {
            DslError::Geometry(crate::Error::NotProjectable { coordinate, .. }) => {
                assert_eq!(coordinate, "w1")
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
