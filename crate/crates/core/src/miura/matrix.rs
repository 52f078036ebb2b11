use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::diffring::{Context, DiffExpr, Gen, Q};
use crate::error::{Error, Result};
use crate::psido::PsiDO;
use crate::structures::BracketMatrix;

/// Bracket `{f_i, f_j} = M_ij ∂` with a symmetric rational matrix `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantPoissonMatrix {
    names: Vec<String>,
    m: Vec<Vec<Q>>,
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

impl ConstantPoissonMatrix {
    pub fn new(names: Vec<String>, m: Vec<Vec<Q>>) -> Result<Self> {
        if m.len() != names.len() || m.iter().any(|r| r.len() != names.len()) {
            return Err(Error::Shape(
                "constant Poisson matrix must be square".into(),
            ));
        }
        let out = ConstantPoissonMatrix { names, m };
        if !out.is_symmetric() {
            return Err(Error::Shape(
                "constant Poisson matrix must be symmetric".into(),
            ));
        }
        Ok(out)
    }

    fn from_fn(n: usize, m: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let names = (1..=n)
            .map(|i| format!("a{i}"))
            .chain((1..=m).map(|j| format!("b{j}")))
            .collect();
        let k = n + m;
        let m = (0..k)
            .map(|i| (0..k).map(|j| q(f(i, j))).collect())
            .collect();
        ConstantPoissonMatrix { names, m }
    }

    /// `{ai,aj} = (1-δij)∂`, `{bi,bj} = (1+δij)∂`, `{ai,bj} = ∂`.
    pub fn general(n: usize, m: usize) -> Self {
        Self::from_fn(n, m, |i, j| match (i < n, j < n) {
            (true, true) => i64::from(i != j),
            (false, false) => 1 + i64::from(i == j),
            _ => 1,
        })
    }

    /// Second-structure part: `{ai,aj} = -δij∂`, `{bi,bj} = δij∂`, `{a,b} = 0`.
    pub fn second(n: usize, m: usize) -> Self {
        Self::from_fn(n, m, |i, j| match (i < n, j < n) {
            (true, true) => -i64::from(i == j),
            (false, false) => i64::from(i == j),
            _ => 0,
        })
    }

    /// Third-structure part: every entry `∂`.
    pub fn third(n: usize, m: usize) -> Self {
        Self::from_fn(n, m, |_, _| 1)
    }

    pub fn identity(names: Vec<String>) -> Self {
        let k = names.len();
        let m = (0..k)
            .map(|i| (0..k).map(|j| q(i64::from(i == j))).collect())
            .collect();
        ConstantPoissonMatrix { names, m }
    }

    pub fn zero(names: Vec<String>) -> Self {
        let k = names.len();
        ConstantPoissonMatrix {
            names,
            m: vec![vec![Q::zero(); k]; k],
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Q {
        &self.m[i][j]
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.m[i][j] == self.m[j][i]))
    }

    /// Entrywise sum; names are taken from `self`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Shape("matrix sizes differ".into()));
        }
        let m = self
            .m
            .iter()
            .zip(&other.m)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect();
        Ok(ConstantPoissonMatrix {
            names: self.names.clone(),
            m,
        })
    }

    /// The bracket as an operator table over `gens` (in matrix order).
    pub fn to_bracket(&self, gens: &[Gen]) -> Result<BracketMatrix> {
        if gens.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} fields for a {}x{} matrix",
                gens.len(),
                self.dim(),
                self.dim()
            )));
        }
        let mut t = BracketMatrix::new(gens.to_vec());
        for i in 0..self.dim() {
            for j in i..self.dim() {
                t.set(
                    i,
                    j,
                    PsiDO::term(DiffExpr::constant(self.m[i][j].clone()), 1),
                );
            }
        }
        Ok(t)
    }

    /// Declares the names in `ctx` and returns the table over them.
    pub fn to_bracket_in(&self, ctx: &mut Context) -> Result<BracketMatrix> {
        let gens: Vec<Gen> = self.names.iter().map(|n| ctx.var(n)).collect();
        self.to_bracket(&gens)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("fields: {}\n", self.names.join(", "));
        out.push_str(&format_matrix(&self.m));
        out
    }
}

pub(crate) fn format_matrix(m: &[Vec<Q>]) -> String {
    let cells: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for r in &cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "[ {} ]", line.join("  "));
    }
    out
}

/// `T M Tᵀ = D` over the rationals.
#[derive(Clone, Debug, Serialize)]
pub struct Diagonalization {
    #[serde(serialize_with = "ser_matrix")]
    pub t: Vec<Vec<Q>>,
    #[serde(serialize_with = "ser_row")]
    pub d: Vec<Q>,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

fn ser_row<S: serde::Serializer>(r: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(|c| c.to_string()))
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        m.iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
    )
}

impl Diagonalization {
    pub fn is_singular(&self) -> bool {
        self.zero > 0
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        (self.positive, self.negative, self.zero)
    }

    pub fn to_text(&self) -> String {
        let diag: Vec<String> = self.d.iter().map(|c| c.to_string()).collect();
        let mut out = String::from("T =\n");
        out.push_str(&format_matrix(&self.t));
        out.push_str(&format!("D = diag({})\n", diag.join(", ")));
        out.push_str(&format!(
            "signature: {} positive, {} negative, {} zero{}\n",
            self.positive,
            self.negative,
            self.zero,
            if self.is_singular() {
                " (singular)"
            } else {
                ""
            }
        ));
        out
    }
}

/// Symmetric elimination with simultaneous row and column operations. A
/// zero pivot is first swapped with a later nonzero diagonal entry; if the
/// whole remaining diagonal is zero, row `j` with `M_kj ≠ 0` is added to
/// row `k`, which makes the pivot `2 M_kj`.
pub fn diagonalize(mat: &ConstantPoissonMatrix) -> Diagonalization {
    let n = mat.dim();
    let mut a = mat.m.clone();
    let mut t: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
                t.swap(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                let rj = a[j].clone();
                for (x, y) in a[k].iter_mut().zip(&rj) {
                    *x += y;
                }
                for row in a.iter_mut() {
                    let y = row[j].clone();
                    row[k] += y;
                }
                let tj = t[j].clone();
                for (x, y) in t[k].iter_mut().zip(&tj) {
                    *x += y;
                }
            } else {
                continue;
            }
        }
        let p = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            let rk = a[k].clone();
            for (x, y) in a[i].iter_mut().zip(&rk) {
                *x -= &f * y;
            }
            for row in a.iter_mut() {
                let y = row[k].clone();
                row[i] -= &f * &y;
            }
            let tk = t[k].clone();
            for (x, y) in t[i].iter_mut().zip(&tk) {
                *x -= &f * y;
            }
        }
    }
    let d: Vec<Q> = (0..n).map(|i| a[i][i].clone()).collect();
    let positive = d.iter().filter(|c| **c > Q::zero()).count();
    let negative = d.iter().filter(|c| **c < Q::zero()).count();
    Diagonalization {
        t,
        zero: n - positive - negative,
        d,
        positive,
        negative,
    }
}

/// `T M Tᵀ`.
pub fn congruence(t: &[Vec<Q>], m: &ConstantPoissonMatrix) -> Vec<Vec<Q>> {
    let n = m.dim();
    let tm: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &t[i][k] * &m.m[k][j]).sum())
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &tm[i][k] * &t[j][k]).sum())
                .collect()
        })
        .collect()
}

/// Exact determinant by Gaussian elimination.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Q::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det *= &piv;
        for i in k + 1..n {
            let f = &a[i][k] / &piv;
            if f.is_zero() {
                continue;
            }
            let rk = a[k].clone();
            for (x, y) in a[i].iter_mut().zip(&rk) {
                *x -= &f * y;
            }
        }
    }
    det
}
