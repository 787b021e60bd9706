use approx::assert_relative_eq;
use proptest::prelude::*;

use mac_stokes::math::remove_mean;
use mac_stokes::operators::identities::{all_identities, IDENTITY_TOL};
use mac_stokes::probe::Probes;
use mac_stokes::{
    gmres, BlockVector, BoundaryKind, GmresConfig, GridSpec, PrecondKind, PreconditionerContext,
    ProblemParams, StokesOperators,
};

fn bc_strategy() -> impl Strategy<Value = BoundaryKind> {
    prop_oneof![
        Just(BoundaryKind::DirichletAll),
        Just(BoundaryKind::PeriodicXDirichletY),
        Just(BoundaryKind::PeriodicAll),
    ]
}

fn kind_strategy() -> impl Strategy<Value = PrecondKind> {
    prop_oneof![
        Just(PrecondKind::P1),
        Just(PrecondKind::P2),
        Just(PrecondKind::P3),
        Just(PrecondKind::P4),
    ]
}

fn params_strategy() -> impl Strategy<Value = ProblemParams> {
    prop_oneof![
        (0.01f64..100.0, 0.1f64..10.0, 0.05f64..2.0)
            .prop_map(|(r, m, d)| ProblemParams::new(r, m, d).unwrap()),
        (0.1f64..10.0).prop_map(|m| ProblemParams::steady(m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identities_hold_on_any_grid(nx in 2usize..10, ny in 2usize..10, h in 0.1f64..4.0, bc in bc_strategy()) {
        let spec = GridSpec::square(nx, ny, h, bc).unwrap();
        for c in all_identities(&spec).unwrap() {
            prop_assert!(c.holds(IDENTITY_TOL), "{}: {}", c.name, c.rel_error);
        }
    }

    #[test]
    fn preconditioners_are_linear(
        n in 2usize..7,
        bc in bc_strategy(),
        kind in kind_strategy(),
        params in params_strategy(),
        alpha in -3.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let spec = GridSpec::square(n, n + 1, 1.0, bc).unwrap();
        let ctx = PreconditionerContext::new(StokesOperators::assemble(&spec, &params).unwrap()).unwrap();
        let lay = spec.layout();
        let mut probes = Probes::new(seed);
        let x = probes.block_mean_zero_pressure(lay);
        let y = probes.block_mean_zero_pressure(lay);
        let combo: Vec<f64> = x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| alpha * a + b).collect();
        let mut px = vec![0.0; lay.total];
        let mut py = vec![0.0; lay.total];
        let mut pc = vec![0.0; lay.total];
        ctx.apply(kind, x.as_slice(), &mut px).unwrap();
        ctx.apply(kind, y.as_slice(), &mut py).unwrap();
        ctx.apply(kind, &combo, &mut pc).unwrap();
        let scale = pc.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for k in 0..lay.total {
            assert_relative_eq!(pc[k], alpha * px[k] + py[k], epsilon = 1e-10 * scale);
        }
    }

    #[test]
    fn gmres_residuals_never_increase(
        n in 2usize..8,
        bc in bc_strategy(),
        kind in kind_strategy(),
        params in params_strategy(),
        seed in 0u64..1000,
    ) {
        let spec = GridSpec::square(n, n, 1.0, bc).unwrap();
        let ctx = PreconditionerContext::new(StokesOperators::assemble(&spec, &params).unwrap()).unwrap();
        let mut b = Probes::new(seed).block_mean_zero_pressure(spec.layout());
        if params.steady && bc == BoundaryKind::PeriodicAll {
            // Constant velocities span the kernel of the steady momentum block.
            let n_u = spec.layout().n_u;
            let (u, v) = b.velocity_mut().split_at_mut(n_u);
            remove_mean(u);
            remove_mean(v);
        }
        let cfg = GmresConfig { side: kind.default_side(), ..GmresConfig::default() };
        let p = ctx.operator(kind).unwrap();
        let (_, rep) = gmres(&ctx.ops().saddle(), Some(&p), b.as_slice(), &cfg).unwrap();
        prop_assert!(rep.converged);
        prop_assert!(rep.iterations >= 1);
        for w in rep.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-13, "{:?}", rep.residual_history);
        }
    }

    #[test]
    fn block_vector_round_trip(nx in 2usize..9, ny in 2usize..9, bc in bc_strategy(), seed in 0u64..100) {
        let spec = GridSpec::square(nx, ny, 1.0, bc).unwrap();
        let lay = spec.layout();
        let x = Probes::new(seed).block(lay);
        let back = BlockVector::from_parts(lay, x.u(), x.v(), x.p()).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(BlockVector::from_vec(lay, x.clone().into_vec()).unwrap(), x);
    }
}
