use std::path::PathBuf;

use hyperturb::config::{InitKind, Mode};
use hyperturb::{parse_config, RunConfig};
use hyperturb_core::solver::{RelaxationStrategy, TransportScheme};
use hyperturb_core::Sym6;
use proptest::prelude::*;

fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6..1e3f64, Just(0.1), Just(1.0 / 3.0)]
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, Just(0.0), Just(-0.0), Just(1e-300)]
}

prop_compose! {
    fn config()(
        mode in prop::option::of(prop_oneof![Just(Mode::Run), Just(Mode::Check)]),
        seed in any::<u64>(),
        model in prop::array::uniform9(positive()),
        eps in 1e-3..=1.0f64,
        nx in 4usize..200,
        ny in 4usize..200,
        lens in prop::array::uniform2(positive()),
        cfl in 0.01..0.99f64,
        t_final in 0.0..10.0f64,
        max_steps in 1usize..1_000_000,
        spectral in any::<bool>(),
        relax_off in any::<bool>(),
        fraction in prop::option::of(positive()),
        mut snaps in prop::collection::vec(0.0..10.0f64, 0..5),
        epsilons in prop::collection::vec(1e-3..1.0f64, 0..6),
        kind in prop_oneof![
            Just(InitKind::Rest), Just(InitKind::AcousticPulse), Just(InitKind::ShearLayer), Just(InitKind::TaylorGreen)
        ],
        amplitude in finite(),
        samples in 1usize..100_000,
        eigen in prop::collection::vec(finite(), 16),
        dir in "[a-z0-9_/.-]{1,20}",
    ) -> RunConfig {
        snaps.sort_by(f64::total_cmp);
        snaps.dedup();
        let mut c = RunConfig { mode, seed, ..Default::default() };
        let m = &mut c.model;
        [m.alpha1, m.alpha2, m.alpha3, m.xi, m.beta, m.c_d, m.l, m.nu, m.eos.c] = model;
        m.epsilon = eps;
        c.grid.nx = nx;
        c.grid.ny = ny;
        [c.grid.lx, c.grid.ly] = lens;
        c.time.cfl = cfl;
        c.time.t_final = t_final;
        c.time.max_steps = max_steps;
        c.time.scheme = if spectral { TransportScheme::Spectral } else { TransportScheme::Rusanov };
        c.time.relaxation = if relax_off { RelaxationStrategy::Off } else { RelaxationStrategy::Exponential };
        c.time.relax_dt_fraction = fraction;
        c.time.snapshot_times = snaps;
        c.sweep.epsilons = epsilons;
        c.init.kind = kind;
        c.init.amplitude = amplitude;
        c.check.samples = samples;
        c.eigen.state.phi = eigen[0];
        c.eigen.state.u = [eigen[1], eigen[2], eigen[3]];
        c.eigen.state.sigma = Sym6([eigen[4], eigen[5], eigen[6], eigen[7], eigen[8], eigen[9]]);
        c.eigen.state.k = eigen[10].abs();
        c.eigen.state.y = [eigen[11], eigen[12], eigen[13]];
        c.eigen.direction = [eigen[14], eigen[15], 0.0];
        c.output.dir = PathBuf::from(dir);
        c
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_serialize_parse_is_identity(cfg in config()) {
        let text = cfg.to_config_string();
        let parsed = parse_config(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parse_config(&parsed.to_config_string()).unwrap(), parsed);
    }

    #[test]
    fn floats_survive_bit_for_bit(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = hyperturb::output::fmt_f64(x);
        prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
        let digits = text.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
        prop_assert!(digits >= 17);
    }
}
