//! Brackets of composite fields and spin checks against a Virasoro
//! generator.

use std::time::Instant;

use num_traits::{One, Zero};

use crate::diffring::{frechet, qr, Context, DiffExpr, Gen, Q};
use crate::error::{Error, Result};
use crate::psido::{format_op, PsiDO};
use crate::structures::{
    one_constraint_table, BracketMatrix, Check, KnownTable, LaxFamily, VerificationReport,
};

/// A named differential polynomial in the fields of a table.
#[derive(Clone, Debug)]
pub struct CompositeField {
    pub name: String,
    pub definition: DiffExpr,
}

impl CompositeField {
    pub fn new(name: impl Into<String>, definition: DiffExpr) -> Result<Self> {
        let name = name.into();
        if definition.generators().is_empty() {
            return Err(Error::Config(format!("composite field {name} is constant")));
        }
        Ok(CompositeField { name, definition })
    }

    pub fn field(ctx: &Context, g: Gen) -> Self {
        CompositeField {
            name: ctx.name(g).to_string(),
            definition: DiffExpr::var(g),
        }
    }
}

/// `{A,B} = Σ F_Ak P_kl F_Bl*` with `F` the Fréchet rows over the table.
pub fn composite_bracket(a: &DiffExpr, b: &DiffExpr, table: &BracketMatrix) -> Result<PsiDO> {
    let fields = table.fields();
    let fa: Vec<PsiDO> = fields.iter().map(|g| frechet(a, *g)).collect();
    let fb: Vec<PsiDO> = fields.iter().map(|g| frechet(b, *g).adjoint()).collect();
    let mut acc = PsiDO::zero();
    for (k, x) in fa.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (l, y) in fb.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let p = table
                .get(k, l)
                .ok_or_else(|| Error::Shape("composite bracket needs a complete table".into()))?;
            if !p.is_zero() {
                acc = &acc + &x.compose(&p).compose(y);
            }
        }
    }
    Ok(acc)
}

/// `s f ∂ + f'`.
pub fn spin_form(f: &DiffExpr, s: &Q) -> PsiDO {
    &PsiDO::term(f.scale(s), 1) + &PsiDO::func(f.derivative())
}

/// `c ∂³ + 2t∂ + t'`.
pub fn virasoro_form(t: &DiffExpr, c: &Q) -> PsiDO {
    let mut op = spin_form(t, &qr(2, 1));
    op.add_diff(3, DiffExpr::constant(c.clone()));
    op
}

fn bracket_check(ctx: &Context, name: String, got: &PsiDO, want: &PsiDO) -> Check {
    Check::from_residual(name, format_op(&(got - want), ctx))
}

/// `{f,t} = s f∂ + f'`; a nonzero residual is the anomaly.
pub fn check_spin(
    ctx: &Context,
    f: &CompositeField,
    s: &Q,
    t: &CompositeField,
    table: &BracketMatrix,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new(
        format!("spin of {}", f.name),
        format!("t = {}", t.definition.display(ctx)),
    );
    let got = composite_bracket(&f.definition, &t.definition, table)?;
    report.push(bracket_check(
        ctx,
        format!(
            "{{{},{}}} = {}{}*del + {}'",
            f.name,
            t.name,
            if s.is_one() {
                String::new()
            } else {
                format!("{s} ")
            },
            f.name,
            f.name
        ),
        &got,
        &spin_form(&f.definition, s),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Named algebras: a base table, a Virasoro generator and the expected
/// relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// `t = φ1ψ1 + φ2ψ2` over the second bracket of `L_(1,2)`.
    Extv1,
    /// `t = v2 + v1'/2 + qr` over the nonstandard bracket of `K_(1,2)`.
    Extv2,
    /// `t = u2 - u1'/2` over the bracket of `L_(2,1)`.
    Extv3,
}

impl Extension {
    pub const ALL: [Extension; 3] = [Extension::Extv1, Extension::Extv2, Extension::Extv3];

    pub fn name(self) -> &'static str {
        match self {
            Extension::Extv1 => "extv1",
            Extension::Extv2 => "extv2",
            Extension::Extv3 => "extv3",
        }
    }

    pub fn from_name(s: &str) -> Option<Extension> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    pub fn table(self) -> KnownTable {
        match self {
            Extension::Extv1 => KnownTable::L12,
            Extension::Extv2 => KnownTable::Pov,
            Extension::Extv3 => KnownTable::BracFull,
        }
    }

    /// Base table and Virasoro generator.
    pub fn setup(self, ctx: &mut Context) -> Result<(BracketMatrix, CompositeField)> {
        let table = self.table().load(ctx)?;
        let v = |ctx: &mut Context, n: &str| DiffExpr::var(ctx.var(n));
        let def = match self {
            Extension::Extv1 => {
                &(&v(ctx, "phi1") * &v(ctx, "psi1")) + &(&v(ctx, "phi2") * &v(ctx, "psi2"))
            }
            Extension::Extv2 => {
                let v1 = ctx.var("v1");
                &(&v(ctx, "v2") + &DiffExpr::jet(v1, 1).scale(&qr(1, 2)))
                    + &(&v(ctx, "q") * &v(ctx, "r"))
            }
            Extension::Extv3 => {
                let u1 = ctx.var("u1");
                &v(ctx, "u2") - &DiffExpr::jet(u1, 1).scale(&qr(1, 2))
            }
        };
        Ok((table, CompositeField::new("t", def)?))
    }

    /// Central charge coefficient of `∂³` in `{t,t}`.
    pub fn central_term(self) -> Q {
        match self {
            Extension::Extv1 => Q::zero(),
            _ => qr(1, 2),
        }
    }

    /// Spin assignments of the fields, as printed.
    pub fn spins(self) -> Vec<(&'static str, Q)> {
        match self {
            Extension::Extv1 => ["phi1", "psi1", "phi2", "psi2"]
                .map(|f| (f, qr(1, 1)))
                .to_vec(),
            Extension::Extv2 => vec![("v1", qr(1, 1)), ("r", qr(3, 2))],
            Extension::Extv3 => vec![("u1", qr(1, 1)), ("phi", qr(3, 2)), ("psi", qr(3, 2))],
        }
    }

    /// All printed relations of the algebra.
    pub fn verify(self, ctx: &mut Context) -> Result<VerificationReport> {
        let start = Instant::now();
        let (table, t) = self.setup(ctx)?;
        let mut report = VerificationReport::new(
            format!("{} Virasoro extension", self.name()),
            format!("t = {}", t.definition.display(ctx)),
        );
        let tt = composite_bracket(&t.definition, &t.definition, &table)?;
        let c = self.central_term();
        report.push(bracket_check(
            ctx,
            if c.is_zero() {
                "{t,t} = 2t*del + t'".to_string()
            } else {
                format!("{{t,t}} = {c}*del^3 + 2t*del + t'")
            },
            &tt,
            &virasoro_form(&t.definition, &c),
        ));
        report.push(bracket_check(
            ctx,
            "{t,t} is skew-adjoint".into(),
            &tt.adjoint(),
            &-&tt,
        ));
        for (name, s) in self.spins() {
            let g = ctx.var(name);
            let f = CompositeField::field(ctx, g);
            report.extend_checks(check_spin(ctx, &f, &s, &t, &table)?);
        }
        if self == Extension::Extv2 {
            let q = ctx.var("q");
            let got = composite_bracket(&DiffExpr::var(q), &t.definition, &table)?;
            let anomaly = PsiDO::dinv(DiffExpr::one(), DiffExpr::var(q))
                .compose(&PsiDO::del(2))
                .scale(&qr(-1, 2));
            let want = &spin_form(&DiffExpr::var(q), &qr(1, 2)) + &anomaly;
            report.push(bracket_check(
                ctx,
                "{q,t} = 1/2 q*del + q' - 1/2 dinv(1,q)*del^2".into(),
                &got,
                &want,
            ));
            let dq = CompositeField::new("q'", DiffExpr::jet(q, 1))?;
            report.extend_checks(check_spin(ctx, &dq, &qr(3, 2), &t, &table)?);
        }
        report.elapsed = start.elapsed();
        Ok(report)
    }
}

/// `t = Σ φiψi` over the second bracket of `L_(1,M)`: `{t,t} = 2t∂ + t'`
/// and every `φi`, `ψi` of spin 1.
pub fn general_virasoro(ctx: &mut Context, m: u32) -> Result<VerificationReport> {
    if m == 0 {
        return Err(Error::Config("general_virasoro needs M >= 1".into()));
    }
    let start = Instant::now();
    let fam = LaxFamily::standard(ctx, 1, m);
    let table = one_constraint_table(&fam)?;
    let mut def = DiffExpr::zero();
    for (a, b) in &fam.pairs {
        def += &(&DiffExpr::var(*a) * &DiffExpr::var(*b));
    }
    let t = CompositeField::new("t", def)?;
    let mut report = VerificationReport::new(
        format!("Virasoro generator of {}", fam.name),
        format!("t = {}", t.definition.display(ctx)),
    );
    let tt = composite_bracket(&t.definition, &t.definition, &table)?;
    report.push(bracket_check(
        ctx,
        "{t,t} = 2t*del + t'".into(),
        &tt,
        &virasoro_form(&t.definition, &Q::zero()),
    ));
    for g in &fam.fields {
        let f = CompositeField::field(ctx, *g);
        report.extend_checks(check_spin(ctx, &f, &qr(1, 1), &t, &table)?);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
