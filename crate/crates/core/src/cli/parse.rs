//! Text syntax for expressions and operators.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := postfix ('^' (int | '(' '-'? int ')'))?
//! postfix := primary '\''*
//! primary := rational | name | 'del' | '(' sum ')'
//!          | 'J(' sum ')' | 'E(' sum ')' | 'dinv(' sum ',' sum ')' | 'inv(' sum ')'
//! ```

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::diffring::{antiderivative, Context, DiffExpr, Q};
use crate::error::{Error, Result};
use crate::psido::PsiDO;

/// A parsed value: a function, or an operator once `del`/`dinv`/`inv` appear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Expr(DiffExpr),
    Op(PsiDO),
}

impl Value {
    pub fn into_op(self) -> PsiDO {
        match self {
            Value::Expr(e) => PsiDO::func(e),
            Value::Op(o) => o,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = line0;
    let mut col = col0;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, cc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned {
                tok: Tok::Num(s.parse().expect("digits")),
                line: l,
                col: cc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned {
                tok: Tok::Name(s),
                line: l,
                col: cc,
            });
            continue;
        }
        if "+-*/^(),'".contains(c) {
            out.push(Spanned {
                tok: Tok::Sym(c),
                line: l,
                col: cc,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Syntax {
            line: l,
            col: cc,
            msg: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

/// Parser state over one source string.
pub struct Parser<'c> {
    ctx: &'c mut Context,
    declare: bool,
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl<'c> Parser<'c> {
    /// Unknown names are errors unless `declare` is set, in which case they
    /// become fresh (non-invertible) generators.
    pub fn new(ctx: &'c mut Context, src: &str, declare: bool) -> Result<Self> {
        Self::at(ctx, src, declare, 1, 1)
    }

    /// Like [`Parser::new`] with positions offset to `line`:`col`.
    pub fn at(
        ctx: &'c mut Context,
        src: &str,
        declare: bool,
        line: usize,
        col: usize,
    ) -> Result<Self> {
        let toks = lex(src, line, col)?;
        let end = match src.rsplit('\n').next() {
            Some(last) if src.contains('\n') => {
                (line + src.matches('\n').count(), last.chars().count() + 1)
            }
            _ => (line, col + src.chars().count()),
        };
        Ok(Self {
            ctx,
            declare,
            toks,
            pos: 0,
            end,
        })
    }

    pub fn parse(mut self) -> Result<Value> {
        let v = self.sum()?;
        if let Some(t) = self.toks.get(self.pos) {
            return Err(Error::Syntax {
                line: t.line,
                col: t.col,
                msg: "trailing input".into(),
            });
        }
        Ok(v)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end);
        Err(Error::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
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

    fn sum(&mut self) -> Result<Value> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                let r = self.product()?;
                acc = add(acc, r, false);
            } else if self.eat('-') {
                let r = self.product()?;
                acc = add(acc, r, true);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let r = self.unary()?;
                acc = mul(acc, r);
            } else if self.eat('/') {
                let at = self.pos;
                let r = self.unary()?;
                let inv = match r {
                    Value::Expr(e) => e.unit_inverse(),
                    Value::Op(_) => None,
                };
                match inv {
                    Some(inv) => acc = mul(acc, Value::Expr(inv)),
                    None => {
                        self.pos = at;
                        return self.err("division by a non-unit");
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(match v {
                Value::Expr(e) => Value::Expr(-e),
                Value::Op(o) => Value::Op(-o),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.postfix()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = paren && self.eat('-');
        let n = match self.peek() {
            Some(Tok::Num(n)) => n.to_u32(),
            _ => None,
        };
        let Some(n) = n else {
            return self.err("expected a small integer exponent");
        };
        let at = self.pos;
        self.pos += 1;
        if paren {
            self.expect(')')?;
        }
        match (base, neg) {
            (Value::Expr(e), false) => Ok(Value::Expr(e.pow(n))),
            (Value::Op(o), false) => Ok(Value::Op(o.power(n))),
            (Value::Expr(e), true) => match e.unit_inverse() {
                Some(inv) => Ok(Value::Expr(inv.pow(n))),
                None => {
                    self.pos = at;
                    self.err("negative power of a non-unit")
                }
            },
            (Value::Op(_), true) => {
                self.pos = at;
                self.err("negative power of an operator")
            }
        }
    }

    fn postfix(&mut self) -> Result<Value> {
        let mut v = self.primary()?;
        while self.peek() == Some(&Tok::Sym('\'')) {
            match v {
                Value::Expr(e) => v = Value::Expr(e.derivative()),
                Value::Op(_) => return self.err("derivative of an operator"),
            }
            self.pos += 1;
        }
        Ok(v)
    }

    fn expr_arg(&mut self) -> Result<DiffExpr> {
        match self.sum()? {
            Value::Expr(e) => Ok(e),
            Value::Op(_) => self.err("expected a function, found an operator"),
        }
    }

    fn primary(&mut self) -> Result<Value> {
        let Some(t) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of input");
        };
        match t.tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Value::Expr(DiffExpr::constant(Q::from_integer(n))))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Sym(c) => self.err(format!("unexpected `{c}`")),
            Tok::Name(name) => {
                self.pos += 1;
                let called = self.peek() == Some(&Tok::Sym('('));
                match (name.as_str(), called) {
                    ("del", _) => Ok(Value::Op(PsiDO::del(1))),
                    ("J", true) => {
                        self.pos += 1;
                        let e = self.expr_arg()?;
                        self.expect(')')?;
                        Ok(Value::Expr(antiderivative(&e)))
                    }
                    ("E", true) => {
                        self.pos += 1;
                        let e = self.expr_arg()?;
                        self.expect(')')?;
                        Ok(Value::Expr(DiffExpr::exp(&e)))
                    }
                    ("dinv", true) => {
                        self.pos += 1;
                        let a = self.expr_arg()?;
                        self.expect(',')?;
                        let b = self.expr_arg()?;
                        self.expect(')')?;
                        Ok(Value::Op(PsiDO::dinv(a, b)))
                    }
                    ("inv", true) => {
                        self.pos += 1;
                        let at = self.pos;
                        let op = self.sum()?.into_op();
                        self.expect(')')?;
                        let monic = op.is_differential()
                            && op.order() == Some(1)
                            && op.coeff(1) == DiffExpr::one();
                        if !monic {
                            self.pos = at;
                            return self.err("inv(..) takes an operator of the form del - b");
                        }
                        Ok(Value::Op(PsiDO::invert_monic_linear(&-op.coeff(0))))
                    }
                    _ => match self.ctx.lookup(&name) {
                        Some(g) => Ok(Value::Expr(DiffExpr::var(g))),
                        None if self.declare => Ok(Value::Expr(DiffExpr::var(self.ctx.var(&name)))),
                        None => Err(Error::UnknownGenerator {
                            line: t.line,
                            col: t.col,
                            name,
                        }),
                    },
                }
            }
        }
    }
}

fn add(a: Value, b: Value, negate: bool) -> Value {
    match (a, b) {
        (Value::Expr(x), Value::Expr(y)) => Value::Expr(if negate { x - y } else { x + y }),
        (x, y) => {
            let (x, y) = (x.into_op(), y.into_op());
            Value::Op(if negate { &x - &y } else { &x + &y })
        }
    }
}

fn mul(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Expr(x), Value::Expr(y)) => Value::Expr(x * y),
        (Value::Expr(x), Value::Op(o)) => Value::Op(o.left_mul(&x)),
        (x, y) => Value::Op(x.into_op().compose(&y.into_op())),
    }
}

pub fn parse_value(ctx: &mut Context, src: &str) -> Result<Value> {
    Parser::new(ctx, src, false)?.parse()
}

pub fn parse_expr(ctx: &mut Context, src: &str) -> Result<DiffExpr> {
    match parse_value(ctx, src)? {
        Value::Expr(e) => Ok(e),
        Value::Op(_) => Err(Error::Syntax {
            line: 1,
            col: 1,
            msg: "expected a function, found an operator".into(),
        }),
    }
}

pub fn parse_op(ctx: &mut Context, src: &str) -> Result<PsiDO> {
    Ok(parse_value(ctx, src)?.into_op())
}
