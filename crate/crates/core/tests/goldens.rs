//! Hand-derived and printed values compared with what the library computes.

use kpcalc::diffring::{q, qr, Context, DiffExpr, Gen};
use kpcalc::hierarchy::lax_flow;
use kpcalc::miura::{
    congruence, determinant, diagonalize, expand_factorization, factor_counts,
    ConstantPoissonMatrix,
};
use kpcalc::psido::PsiDO;
use kpcalc::structures::{
    verify_bracket_table, BracketMatrix, HamiltonianMap, KnownTable, LaxFamily,
};

fn v(g: Gen) -> DiffExpr {
    DiffExpr::var(g)
}

fn d(g: Gen, k: u32) -> DiffExpr {
    DiffExpr::jet(g, k)
}

#[test]
fn second_flow_of_l12() {
    let mut ctx = Context::new();
    let fam = LaxFamily::standard(&mut ctx, 1, 2);
    let flow = lax_flow(&fam, 2, 8).unwrap();
    // B = (L^2)_+ = ∂² + 2t with t = Σ φψ.
    let t = fam
        .pairs
        .iter()
        .fold(DiffExpr::zero(), |acc, (a, b)| &acc + &(&v(*a) * &v(*b)));
    for (a, b) in &fam.pairs {
        assert_eq!(
            flow.get(*a).unwrap(),
            &(&d(*a, 2) + &(&t * &v(*a)).scale(&q(2)))
        );
        assert_eq!(
            flow.get(*b).unwrap(),
            &-(&d(*b, 2) + &(&t * &v(*b)).scale(&q(2)))
        );
    }
}

#[test]
fn second_flow_of_k12() {
    let mut ctx = Context::new();
    let fam = LaxFamily::nonstandard(&mut ctx, 1, 2);
    let flow = lax_flow(&fam, 2, 8).unwrap();
    let [v1, v2, qg, r] = ["v1", "v2", "q", "r"].map(|n| ctx.lookup(n).unwrap());
    // B = (K^2)_{≥1} = ∂² + 2v1∂; q moves by Bq, r and v2 by -B*(·) = -(·)'' + 2(v1·)'.
    assert_eq!(
        flow.get(qg).unwrap(),
        &(&d(qg, 2) + &(&v(v1) * &d(qg, 1)).scale(&q(2)))
    );
    for g in [r, v2] {
        let expected = &-d(g, 2) + &(&v(v1) * &v(g)).derivative().scale(&q(2));
        assert_eq!(flow.get(g).unwrap(), &expected);
    }
    let expected_v1 = &(&d(v1, 2) + &(&v(v1) * &d(v1, 1)).scale(&q(2)))
        + &(&d(v2, 1) + &(&v(qg) * &v(r)).derivative()).scale(&q(2));
    assert_eq!(flow.get(v1).unwrap(), &expected_v1);
}

#[test]
fn first_flow_is_translation() {
    let mut ctx = Context::new();
    for fam in [
        LaxFamily::standard(&mut ctx, 2, 1),
        LaxFamily::standard(&mut ctx, 1, 2),
        LaxFamily::nonstandard(&mut ctx, 1, 2),
    ] {
        if fam.kind == kpcalc::structures::FamilyKind::Nonstandard {
            continue;
        }
        let flow = lax_flow(&fam, 1, 8).unwrap();
        for (g, e) in &flow.flows {
            assert_eq!(e, &d(*g, 1), "{}", fam.name);
        }
    }
}

#[test]
fn printed_miura_substitutions_of_l21() {
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, 3, 1, false).unwrap();
    let [a1, a2, a3] = [spec.a[0], spec.a[1], spec.a[2]];
    let b1 = spec.b[0];
    let [u1, u2, phi, psi] = ["u1", "u2", "phi", "psi"].map(|n| ctx.lookup(n).unwrap());

    let eu1 = &v(b1) - &(&(&v(a1) + &v(a2)) + &v(a3));
    let eu2 = &(&(&eu1 * &v(b1)) + &d(b1, 1).scale(&q(2)))
        + &(&(&(&v(a1) * &v(a2)) + &(&v(a2) * &v(a3))) + &(&v(a1) * &v(a3)))
        - (&d(a2, 1) + &d(a3, 1).scale(&q(2)));
    let inner = &(&(&(&eu2 * &v(b1)) + &(&eu1 * &d(b1, 1))) + &d(b1, 2))
        - &(&(&v(a1) * &v(a2)) * &v(a3))
        + (&(&(&v(a1) * &d(a3, 1)) + &(&d(a2, 1) * &v(a3))) + &(&v(a2) * &d(a3, 1)))
        - d(a3, 2);
    let ephi = &DiffExpr::exp(&v(b1)) * &inner;
    let epsi = DiffExpr::exp(&-v(b1));

    for (g, e) in [(u1, eu1), (u2, eu2), (phi, ephi), (psi, epsi)] {
        assert_eq!(spec.get(g).unwrap(), &e, "{}", ctx.name(g));
    }
}

#[test]
fn miura_product_times_last_factor_is_differential() {
    // L(∂ - b_m)⋯(∂ - b_1) must equal (∂ - a_1)⋯(∂ - a_n) exactly.
    for (n, m) in [(3, 1), (3, 2), (4, 1)] {
        let mut ctx = Context::new();
        let spec = expand_factorization(&mut ctx, n, m, false).unwrap();
        let l = spec.subst().apply_op(&spec.family.template()).unwrap();
        let mut lhs = l;
        for &b in spec.b.iter().rev() {
            lhs = &lhs * &(&PsiDO::del(1) - &PsiDO::func(v(b)));
        }
        let rhs = spec.a.iter().fold(PsiDO::one(), |acc, &a| {
            &acc * &(&PsiDO::del(1) - &PsiDO::func(v(a)))
        });
        assert_eq!(lhs, rhs, "factorization ({n},{m})");
    }
}

#[test]
fn factor_counts_for_nonstandard_targets() {
    assert_eq!(factor_counts(1, 2).unwrap(), (3, 1));
    assert_eq!(factor_counts(2, 1).unwrap(), (3, 0));
    assert_eq!(factor_counts(1, 3).unwrap(), (4, 2));
    assert!(factor_counts(0, 1).is_err());
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, 3, 1, true).unwrap();
    assert_eq!(spec.family.name, "K(1,2)");
}

fn assert_diagonalizes(mat: &ConstantPoissonMatrix) {
    let dg = diagonalize(mat);
    let tmt = congruence(&dg.t, mat);
    for (i, row) in tmt.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let want = if i == j { dg.d[i].clone() } else { q(0) };
            assert_eq!(c, &want, "entry ({i},{j})");
        }
    }
    assert_ne!(determinant(&dg.t), q(0));
    assert_eq!(dg.positive + dg.negative + dg.zero, mat.dim());
}

#[test]
fn poisson_matrix_of_the_31_factorization() {
    let mat = ConstantPoissonMatrix::general(3, 1);
    assert_eq!(
        mat.sum(&ConstantPoissonMatrix::zero(mat.names().to_vec()))
            .unwrap()
            .rows(),
        mat.rows()
    );
    assert_diagonalizes(&mat);
    let dg = diagonalize(&mat);
    assert_eq!(dg.d, vec![q(2), qr(-1, 2), q(2), qr(-1, 2)]);
    assert_eq!(dg.signature(), (2, 2, 0));
    // Sum of the second and third structures is the general one.
    let sum = ConstantPoissonMatrix::second(3, 1)
        .sum(&ConstantPoissonMatrix::third(3, 1))
        .unwrap();
    assert_eq!(sum.rows(), mat.rows());
}

#[test]
fn diagonalize_edge_cases() {
    let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let id = diagonalize(&ConstantPoissonMatrix::identity(names.clone()));
    assert_eq!(id.signature(), (3, 0, 0));
    let zero = diagonalize(&ConstantPoissonMatrix::zero(names.clone()));
    assert!(zero.is_singular());
    assert_eq!(zero.signature(), (0, 0, 3));
    for (n, m) in [(2, 1), (3, 2), (4, 2), (5, 1)] {
        assert_diagonalizes(&ConstantPoissonMatrix::general(n, m));
        assert_diagonalizes(&ConstantPoissonMatrix::third(n, m));
    }
    let hyperbolic = ConstantPoissonMatrix::new(
        names,
        vec![
            vec![q(0), q(1), q(0)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(0), q(0)],
        ],
    )
    .unwrap();
    assert_diagonalizes(&hyperbolic);
    assert_eq!(diagonalize(&hyperbolic).signature(), (1, 1, 1));
    assert!(ConstantPoissonMatrix::new(
        vec!["x".into(), "y".into()],
        vec![vec![q(0), q(1)], vec![q(2), q(0)]]
    )
    .is_err());
}

fn perturbed(table: KnownTable, from: &str, to: &str) -> (Context, LaxFamily, BracketMatrix) {
    let mut ctx = Context::new();
    let family = table.family(&mut ctx);
    assert!(table.source().contains(from));
    let src = table.source().replacen(from, to, 1);
    let t = BracketMatrix::from_text(&mut ctx, &src).unwrap();
    (ctx, family, t)
}

#[test]
fn perturbed_tables_are_rejected() {
    let cases = [
        (
            KnownTable::Pov,
            HamiltonianMap::Ns,
            "{v1,v1} = 2*del",
            "{v1,v1} = 3*del",
        ),
        (
            KnownTable::Pov,
            HamiltonianMap::Ns,
            "{r,r} = -2*dinv(r, r)",
            "{r,r} = -dinv(r, r)",
        ),
        (
            KnownTable::Pov,
            HamiltonianMap::Ns,
            "{q,r} = del + v1 +",
            "{q,r} = del +",
        ),
    ];
    for (table, map, from, to) in cases {
        let (mut ctx, family, t) = perturbed(table, from, to);
        let report = verify_bracket_table(&mut ctx, &family, map, &t, "perturbed").unwrap();
        assert!(!report.passed(), "perturbation {to:?} went unnoticed");
        let (mut ctx, family, t) = perturbed(table, from, from);
        assert!(verify_bracket_table(&mut ctx, &family, map, &t, "original")
            .unwrap()
            .passed());
    }
}

#[test]
fn literal_nonstandard_map_fails_on_pov() {
    let mut ctx = Context::new();
    let family = KnownTable::Pov.family(&mut ctx);
    let table = KnownTable::Pov.load(&mut ctx).unwrap();
    let report =
        verify_bracket_table(&mut ctx, &family, HamiltonianMap::NsLiteral, &table, "pov").unwrap();
    assert!(!report.passed());
}

#[test]
fn bundled_tables_round_trip_through_text() {
    for table in KnownTable::ALL {
        let mut ctx = Context::new();
        let t = table.load(&mut ctx).unwrap();
        let text = t.to_text(&ctx);
        let back = BracketMatrix::from_text(&mut ctx, &text).unwrap();
        assert_eq!(back.fields(), t.fields(), "{}", table.name());
        for (i, j, op) in t.entries() {
            assert_eq!(
                back.get(i, j).as_ref(),
                Some(op),
                "{} entry ({i},{j})",
                table.name()
            );
        }
        assert_eq!(back.len(), t.len());
    }
}
