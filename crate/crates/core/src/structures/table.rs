use std::collections::BTreeMap;

use crate::cli::parse::Parser;
use crate::diffring::{Context, DiffExpr, Gen};
use crate::error::{Error, Result};
use crate::psido::{format_op, PsiDO};

/// Operator-valued Poisson matrix `{f_i, f_j} = P_ij` over an ordered list
/// of fields. Entries below the diagonal are derived by skew-adjointness,
/// `P_ji = -P_ij*`; absent entries are unknown rather than zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketMatrix {
    fields: Vec<Gen>,
    upper: BTreeMap<(usize, usize), PsiDO>,
}

impl BracketMatrix {
    pub fn new(fields: Vec<Gen>) -> Self {
        BracketMatrix {
            fields,
            upper: BTreeMap::new(),
        }
    }

    pub fn fields(&self) -> &[Gen] {
        &self.fields
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn index(&self, g: Gen) -> Option<usize> {
        self.fields.iter().position(|f| *f == g)
    }

    /// Sets `{f_i, f_j}`; for `i > j` the transposed entry is stored.
    pub fn set(&mut self, i: usize, j: usize, op: PsiDO) {
        if i <= j {
            self.upper.insert((i, j), op);
        } else {
            self.upper.insert((j, i), -op.adjoint());
        }
    }

    pub fn set_by(&mut self, f: Gen, g: Gen, op: PsiDO) -> Result<()> {
        let (Some(i), Some(j)) = (self.index(f), self.index(g)) else {
            return Err(Error::Shape("bracket of a field outside the table".into()));
        };
        self.set(i, j, op);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<PsiDO> {
        if i <= j {
            self.upper.get(&(i, j)).cloned()
        } else {
            self.upper.get(&(j, i)).map(|op| -op.adjoint())
        }
    }

    pub fn get_by(&self, f: Gen, g: Gen) -> Option<PsiDO> {
        self.get(self.index(f)?, self.index(g)?)
    }

    /// Stored entries `(i, j, P_ij)` with `i ≤ j`, in field order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &PsiDO)> {
        self.upper.iter().map(|(&(i, j), op)| (i, j, op))
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.dim();
        self.upper.len() == n * (n + 1) / 2
    }

    /// Fills every unknown entry with zero.
    pub fn completed(&self) -> BracketMatrix {
        let mut out = self.clone();
        for i in 0..self.dim() {
            for j in i..self.dim() {
                out.upper.entry((i, j)).or_default();
            }
        }
        out
    }

    /// Diagonal entries must be skew-adjoint.
    pub fn skew_defects(&self) -> Vec<(usize, PsiDO)> {
        self.upper
            .iter()
            .filter(|((i, j), _)| i == j)
            .filter_map(|(&(i, _), op)| {
                let d = op + &op.adjoint();
                (!d.is_zero()).then_some((i, d))
            })
            .collect()
    }

    /// `δf_i = Σ_j P_ij(x_j)` for a gradient vector `x` in field order.
    /// Unknown entries count as zero.
    pub fn apply(&self, x: &BTreeMap<Gen, DiffExpr>) -> BTreeMap<Gen, DiffExpr> {
        let mut out = BTreeMap::new();
        for (i, fi) in self.fields.iter().enumerate() {
            let mut acc = DiffExpr::zero();
            for (j, fj) in self.fields.iter().enumerate() {
                let Some(xj) = x.get(fj) else { continue };
                if xj.is_zero() {
                    continue;
                }
                if let Some(p) = self.get(i, j) {
                    acc += &p.apply(xj);
                }
            }
            out.insert(*fi, acc);
        }
        out
    }

    pub fn map_entries(&self, mut f: impl FnMut(&PsiDO) -> Result<PsiDO>) -> Result<BracketMatrix> {
        let mut out = BracketMatrix::new(self.fields.clone());
        for (&k, op) in &self.upper {
            out.upper.insert(k, f(op)?);
        }
        Ok(out)
    }

    /// Entrywise `self - other` over the entries both know.
    pub fn difference(&self, other: &BracketMatrix) -> Result<BracketMatrix> {
        if self.fields != other.fields {
            return Err(Error::Shape("tables over different fields".into()));
        }
        let mut out = BracketMatrix::new(self.fields.clone());
        for (&k, op) in &self.upper {
            if let Some(o) = other.upper.get(&k) {
                out.upper.insert(k, op - o);
            }
        }
        Ok(out)
    }

    pub fn sum(&self, other: &BracketMatrix) -> Result<BracketMatrix> {
        if self.fields != other.fields {
            return Err(Error::Shape("tables over different fields".into()));
        }
        let mut out = BracketMatrix::new(self.fields.clone());
        for (&k, op) in &self.upper {
            if let Some(o) = other.upper.get(&k) {
                out.upper.insert(k, op + o);
            }
        }
        Ok(out)
    }

    /// Same fields in a new order.
    pub fn reordered(&self, fields: Vec<Gen>) -> Result<BracketMatrix> {
        let mut out = BracketMatrix::new(fields.clone());
        for (&(i, j), op) in &self.upper {
            let (Some(a), Some(b)) = (out.index(self.fields[i]), out.index(self.fields[j])) else {
                return Err(Error::Shape("reordering drops a field".into()));
            };
            out.set(a, b, op.clone());
        }
        Ok(out)
    }

    /// One `{f,g} = op` line per stored entry after a `fields:` header.
    pub fn to_text(&self, ctx: &Context) -> String {
        let names: Vec<&str> = self.fields.iter().map(|g| ctx.name(*g)).collect();
        let mut out = format!("fields: {}\n", names.join(", "));
        for (&(i, j), op) in &self.upper {
            out.push_str(&format!(
                "{{{},{}}} = {}\n",
                names[i],
                names[j],
                format_op(op, ctx)
            ));
        }
        out
    }

    /// Parses the text format. `#` starts a comment line. Field names are
    /// declared in `ctx` if new; names inside entries must be known.
    pub fn from_text(ctx: &mut Context, src: &str) -> Result<BracketMatrix> {
        let mut table: Option<BracketMatrix> = None;
        for (ln, raw) in src.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.trim_end();
            let body = line.trim_start();
            let indent = line.len() - body.len();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let syntax = |col: usize, msg: &str| Error::Syntax {
                line: line_no,
                col,
                msg: msg.to_string(),
            };
            if let Some(rest) = body.strip_prefix("fields:") {
                if table.is_some() {
                    return Err(syntax(indent + 1, "second `fields:` header"));
                }
                let gens = rest
                    .split(',')
                    .map(|s| s.trim())
                    .filter(|s| !s.is_empty())
                    .map(|s| ctx.var(s))
                    .collect();
                table = Some(BracketMatrix::new(gens));
                continue;
            }
            let Some(t) = table.as_mut() else {
                return Err(syntax(indent + 1, "entry before the `fields:` header"));
            };
            let Some(close) = body.find('}') else {
                return Err(syntax(indent + 1, "expected `{f,g} = expression`"));
            };
            let Some(inner) = body[..close].strip_prefix('{') else {
                return Err(syntax(indent + 1, "expected `{`"));
            };
            let names: Vec<&str> = inner.split(',').map(str::trim).collect();
            if names.len() != 2 {
                return Err(syntax(indent + 2, "expected two field names"));
            }
            let mut idx = [0usize; 2];
            for (k, n) in names.iter().enumerate() {
                let found = ctx.lookup(n).and_then(|g| t.index(g));
                let Some(i) = found else {
                    return Err(Error::UnknownGenerator {
                        line: line_no,
                        col: indent + 2,
                        name: n.to_string(),
                    });
                };
                idx[k] = i;
            }
            let after = &body[close + 1..];
            let Some(eq) = after.find('=') else {
                return Err(syntax(indent + close + 2, "expected `=`"));
            };
            if !after[..eq].trim().is_empty() {
                return Err(syntax(indent + close + 2, "expected `=`"));
            }
            let expr = &after[eq + 1..];
            let col = indent + close + 1 + eq + 2;
            let op = Parser::at(ctx, expr, false, line_no, col)?
                .parse()?
                .into_op();
            t.set(idx[0], idx[1], op);
        }
        table.ok_or_else(|| Error::Syntax {
            line: 1,
            col: 1,
            msg: "missing `fields:` header".into(),
        })
    }
}
