use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use su11_core::channels::{
    embed_on_side_modes, mode_mixing_channel, phase_channel, pumped_two_mode_squeezer, squeezing_channel, tritter,
    tritter_from_generator,
};
use su11_core::gaussian::{check_symplectic, GaussianState};
use su11_core::metrology::{
    fisher_from_moments, qfi_closed_form, qfi_numeric, sensitivity_number_sum, DEFAULT_SENSITIVITY_EPS0,
};
use su11_core::pipeline::{
    build_half_pipelines, max_tritter_angle, particle_numbers_after_tritter, probe_state, run_interferometer,
    side_population,
};
use su11_core::{ChannelKind, ChannelSpec, InterferometerConfig, Regime};

fn kind() -> impl Strategy<Value = ChannelKind> {
    prop_oneof![
        Just(ChannelKind::Squeezing),
        Just(ChannelKind::ModeMixing),
        Just(ChannelKind::Phase)
    ]
}

fn config(kind: ChannelKind) -> impl Strategy<Value = InterferometerConfig> {
    (
        10f64..1e4,
        0.0..2.0 * PI,
        0f64..1.5,
        0.0..2.0 * PI,
        0.0..FRAC_PI_2,
        0.0..2.0 * PI,
        0.2f64..2.0,
        0.0..2.0 * PI,
        0f64..0.5,
    )
        .prop_map(move |(nb, p0, r, psq, th, pt, k, pc, eps)| InterferometerConfig {
            total_particles: nb + side_population(r),
            pump_phase: p0,
            squeezing: r,
            squeezing_phase: psq,
            tritter_angle: th,
            tritter_phase: pt,
            channel: ChannelSpec::new(kind, k, pc, eps).unwrap(),
        })
}

fn any_config() -> impl Strategy<Value = InterferometerConfig> {
    kind().prop_flat_map(config)
}

fn identity_error(m: &DMatrix<f64>) -> f64 {
    (m - DMatrix::identity(m.nrows(), m.ncols())).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn constructors_are_symplectic(x in -2.0f64..2.0, phi in 0.0..2.0 * PI) {
        prop_assert!(check_symplectic(pumped_two_mode_squeezer(x, phi).matrix(), 1e-10));
        prop_assert!(check_symplectic(tritter(x, phi).matrix(), 1e-10));
        prop_assert!(check_symplectic(squeezing_channel(x, phi).matrix(), 1e-10));
        prop_assert!(check_symplectic(mode_mixing_channel(x, phi).matrix(), 1e-10));
        prop_assert!(check_symplectic(phase_channel(x).matrix(), 1e-10));
        prop_assert!(check_symplectic(embed_on_side_modes(&squeezing_channel(x, phi)).unwrap().matrix(), 1e-10));
    }

    #[test]
    fn negated_parameters_invert(x in -2.0f64..2.0, phi in 0.0..2.0 * PI) {
        let pairs = [
            (pumped_two_mode_squeezer(x, phi), pumped_two_mode_squeezer(-x, phi)),
            (tritter(x, phi), tritter(-x, phi)),
            (squeezing_channel(x, phi), squeezing_channel(-x, phi)),
            (mode_mixing_channel(x, phi), mode_mixing_channel(-x, phi)),
            (phase_channel(x), phase_channel(-x)),
        ];
        for (a, b) in pairs {
            // entries grow as e^{2|x|}; compare relative to that scale
            let scale = a.matrix().amax().max(1.0).powi(2);
            prop_assert!(identity_error(b.compose(&a).unwrap().matrix()) < 1e-12 * scale);
        }
    }

    #[test]
    fn tritter_matches_generator_exponential(theta in -PI..PI, phi in 0.0..2.0 * PI) {
        let closed = tritter(theta, phi);
        let series = tritter_from_generator(theta, phi).unwrap();
        prop_assert!((closed.matrix() - series.matrix()).amax() < 1e-8);
    }

    #[test]
    fn particle_numbers_conserved_by_tritter(n0 in 0f64..1e8, n in 0f64..1e4, theta in 0.0..FRAC_PI_2) {
        let (a, b) = particle_numbers_after_tritter(n0, n, theta);
        prop_assert!((a + b - n0 - n).abs() <= 1e-12 * (n0 + n).max(1.0));
    }

    #[test]
    fn max_angle_reproduces_ratio(gamma in 0f64..0.05, extra in 0f64..0.3) {
        let delta = gamma + extra + 1e-3;
        let theta = max_tritter_angle(gamma, delta).unwrap();
        prop_assert!(theta > 0.0 && theta <= PI / 4.0 + 1e-12);
        let (pump, side) = particle_numbers_after_tritter(1.0, gamma, theta);
        prop_assert!((side / pump - delta).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zero_epsilon_pipeline_is_identity(c in any_config()) {
        let c = c.with_epsilon(0.0);
        let (plus, minus) = build_half_pipelines(&c).unwrap();
        let full = minus.compose(&c.channel.symplectic().unwrap()).unwrap().compose(&plus).unwrap();
        prop_assert!(identity_error(full.matrix()) < 1e-10 * plus.matrix().amax().powi(2));
    }

    #[test]
    fn pipeline_preserves_purity(c in any_config()) {
        let out = run_interferometer(&c).unwrap();
        prop_assert!((out.purity().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mode_mixing_channel_conserves_particles(c in config(ChannelKind::ModeMixing)) {
        // the reverse squeezer is active, so only the probe state keeps N̄
        let probe = probe_state(&c).unwrap();
        let total = c.total_particles;
        prop_assert!((probe.mean_particle_number() - total).abs() < 1e-9 * total);
    }

    #[test]
    fn passive_operations_conserve_particles(
        re in -3f64..3.0, im in -3f64..3.0, r in 0f64..1.5, theta in -PI..PI, phi in 0.0..2.0 * PI, m in -2f64..2.0,
    ) {
        let d = nalgebra::DVector::from_vec(vec![2.0 * re, 2.0 * im, 0.0, 0.0, 0.0, 0.0]);
        let s = GaussianState::new(d, DMatrix::identity(6, 6)).unwrap()
            .apply(&pumped_two_mode_squeezer(r, phi)).unwrap();
        let before = s.mean_particle_number();
        let ops = [
            tritter(theta, phi),
            embed_on_side_modes(&mode_mixing_channel(m, phi)).unwrap(),
            phase_channel(m),
        ];
        for op in ops {
            let after = s.apply(&op).unwrap().mean_particle_number();
            prop_assert!((after - before).abs() <= 1e-9 * before.max(1.0));
        }
    }

    #[test]
    fn fisher_chain_ordering(c in kind().prop_filter("closed forms", |k| *k != ChannelKind::Phase).prop_flat_map(config)) {
        let h = qfi_numeric(&c, 0.0, 1e-4).unwrap();
        let cf = qfi_closed_form(&c, Regime::Exact).unwrap();
        prop_assert!((h - cf).abs() <= 1e-6 * cf);
        if let Ok(s) = sensitivity_number_sum(&c, DEFAULT_SENSITIVITY_EPS0, 1e-4) {
            prop_assert!(s.f0 <= h * (1.0 + 1e-9));
            let f = fisher_from_moments(&c, DEFAULT_SENSITIVITY_EPS0, 1e-4).unwrap();
            prop_assert!(f >= s.f0);
        }
    }

    #[test]
    fn qfi_independent_of_evaluation_point(c in config(ChannelKind::Squeezing)) {
        let h0 = qfi_numeric(&c, 0.0, 1e-4).unwrap();
        for e in [0.01, 0.1] {
            prop_assert!((qfi_numeric(&c, e, 1e-4).unwrap() - h0).abs() <= 1e-6 * h0);
        }
    }
}
