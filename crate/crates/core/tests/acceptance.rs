//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use su11_core::channels::{
    embed_on_side_modes, mode_mixing_channel, phase_channel, pumped_two_mode_squeezer, squeezing_channel, tritter,
    tritter_from_generator,
};
use su11_core::diff::derivative;
use su11_core::fock::{
    channel_generator, generator_variance, interferometer_sequence, number_difference_fock, number_moments_fock,
    prepare_state_fock, FockOperatorSpec,
};
use su11_core::gaussian::{check_symplectic, GaussianState, SymplecticOp};
use su11_core::gw::{compare_at, original_scheme_qfi};
use su11_core::metrology::{
    fisher_from_moments, heterodyne_moments, number_sum_moments, optimal_tritter_angle, qfi_closed_form, qfi_numeric,
    sensitivity_number_sum, squeezing_qfi_formula, TurningMode, DEFAULT_SENSITIVITY_EPS0,
};
use su11_core::pipeline::{max_tritter_angle, output_side_modes, probe_state, run_interferometer, side_population};
use su11_core::{ChannelKind, ChannelSpec, InterferometerConfig, Regime};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const STEP: f64 = 1e-4;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_config(rng: &mut ChaCha8Rng, kind: ChannelKind) -> InterferometerConfig {
    loop {
        let r = rng.random_range(0.0..2.0);
        let total = 10f64.powf(rng.random_range(1.0..6.0));
        if total <= side_population(r) {
            continue;
        }
        return InterferometerConfig {
            total_particles: total,
            pump_phase: rng.random_range(0.0..2.0 * PI),
            squeezing: r,
            squeezing_phase: rng.random_range(0.0..2.0 * PI),
            tritter_angle: rng.random_range(0.0..=FRAC_PI_2),
            tritter_phase: rng.random_range(0.0..2.0 * PI),
            channel: ChannelSpec::new(kind, rng.random_range(0.5..2.0), rng.random_range(0.0..2.0 * PI), 0.0).unwrap(),
        };
    }
}

fn criterion_configs() -> Vec<InterferometerConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut out = Vec::new();
    for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing] {
        for _ in 0..500 {
            out.push(random_config(&mut rng, kind));
        }
    }
    out
}

fn closed_form_equivalence(configs: &[InterferometerConfig]) -> Outcome {
    let mut worst: f64 = 0.0;
    for c in configs {
        let num = qfi_numeric(c, 0.0, STEP).map_err(|e| format!("{c:?}: {e}"))?;
        let cf = qfi_closed_form(c, Regime::Exact).map_err(|e| e.to_string())?;
        worst = worst.max(rel(num, cf));
    }
    let msg = format!(
        "{} configs, worst relative error {worst:.2e} (limit 1e-6)",
        configs.len()
    );
    if worst < 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn base(kind: ChannelKind, total: f64, r: f64, theta: f64) -> InterferometerConfig {
    InterferometerConfig {
        total_particles: total,
        pump_phase: 0.4,
        squeezing: r,
        squeezing_phase: 1.3,
        tritter_angle: theta,
        tritter_phase: 0.8,
        channel: ChannelSpec::new(kind, 1.0, 0.6, 0.0).unwrap(),
    }
}

fn limit_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_algebraic: f64 = 0.0;
    for _ in 0..200 {
        for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing] {
            let mut c = random_config(&mut rng, kind);
            c.tritter_angle = 0.0;
            let exact = qfi_closed_form(&c, Regime::Exact).unwrap();
            worst_algebraic = worst_algebraic.max(rel(qfi_closed_form(&c, Regime::ThetaZero).unwrap(), exact));
            c.tritter_angle = FRAC_PI_2;
            if kind == ChannelKind::ModeMixing {
                c.channel.phase = FRAC_PI_2;
            }
            let exact = qfi_closed_form(&c, Regime::Exact).unwrap();
            worst_algebraic = worst_algebraic.max(rel(qfi_closed_form(&c, Regime::ThetaHalfPi).unwrap(), exact));
        }
    }

    let (total, r) = (1e8, 3.0);
    let side = side_population(r);
    let theta_t = optimal_tritter_angle(total, side, TurningMode::Exact).unwrap();
    let mut worst_asymptotic: f64 = 0.0;
    let mut failures = Vec::new();
    let mut check = |label: String, approx: f64, exact: f64| {
        let e = rel(approx, exact);
        worst_asymptotic = worst_asymptotic.max(e);
        if e >= 0.02 {
            failures.push(format!("{label}: {e:.3e}"));
        }
    };
    for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing] {
        let opt = |theta: f64| base(kind, total, r, theta).with_optimal_phases();
        let mut cases: Vec<(Regime, InterferometerConfig)> = vec![
            (Regime::ThetaZeroLargeR, opt(0.0)),
            (Regime::LargeN, base(kind, total, r, 0.5)),
            (Regime::LargeNOptimal, opt(0.5)),
            (Regime::Undepleted, opt(0.05)),
            (Regime::Pumped, opt(0.05)),
        ];
        let mut half = opt(FRAC_PI_2);
        if kind == ChannelKind::ModeMixing {
            half.channel.phase = FRAC_PI_2;
        }
        cases.push((Regime::ThetaHalfPiLargeR, half));
        match kind {
            ChannelKind::Squeezing => {
                cases.push((Regime::TurningPoint, opt(theta_t)));
                cases.push((Regime::TurningPointLargeR, opt(theta_t)));
            }
            _ => {
                cases.push((Regime::TurningPoint, opt(FRAC_PI_2)));
                cases.push((Regime::TurningPointLargeR, opt(FRAC_PI_2)));
            }
        }
        for (regime, c) in cases {
            let approx = qfi_closed_form(&c, regime).map_err(|e| format!("{kind} {regime}: {e}"))?;
            let exact = qfi_closed_form(&c, Regime::Exact).unwrap();
            check(format!("{kind} {regime}"), approx, exact);
        }
    }
    let msg = format!(
        "algebraic limits worst {worst_algebraic:.2e} (limit 1e-12); asymptotic limits at N̄=1e8, r=3 worst {worst_asymptotic:.2e} (limit 2e-2)"
    );
    if worst_algebraic < 1e-12 && failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", failures.join(", ")))
    }
}

fn detector_numbers() -> Outcome {
    let original = original_scheme_qfi(4.2, FRAC_PI_2, 0.0, 1.0);
    let parity = compare_at(1.0, 1e6, 4.2, 2.0, 0.094f64.sqrt()).map_err(|e| e.to_string())?;
    let gain = compare_at(1.0, 1e6, 4.2, 4.2, 0.092f64.sqrt()).map_err(|e| e.to_string())?;

    // the same pumped value through the metrology regime selector
    let mut c = base(ChannelKind::Squeezing, 1e6 + side_population(2.0), 2.0, 0.094f64.sqrt()).with_optimal_phases();
    c.channel.strength = 1.0;
    let via_regime = qfi_closed_form(&c, Regime::Pumped).map_err(|e| e.to_string())?;

    let ok_original = (original - 1.235e6).abs() <= 0.0005e6;
    let ok_parity = (parity.pumped_leading / original - 1.0).abs() < 0.01;
    let ok_regime = rel(via_regime, parity.pumped_leading) < 1e-12;
    let ok_gain = (gain.ratio_leading - 83.0).abs() <= 2.0;
    let msg = format!(
        "original {original:.6e}, pumped r=2 {:.6e} (ratio {:.4}), pumped r=4.2 ratio {:.2}",
        parity.pumped_leading, parity.ratio_leading, gain.ratio_leading
    );
    if ok_original && ok_parity && ok_regime && ok_gain {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn undepleted_angle() -> Outcome {
    let theta = max_tritter_angle(0.0, 0.1).map_err(|e| e.to_string())?;
    let t2 = theta * theta;
    let ratio = t2 / theta.sin().powi(2);
    let msg = format!("θ² = {t2:.6}, θ²/sin²θ = {ratio:.6}");
    if (t2 - 0.0938).abs() <= 0.0002 && (ratio - 1.03).abs() <= 0.005 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn turning_points() -> Outcome {
    let total = 1e6;
    let side: f64 = 26.3;
    let r = (side / 2.0).sqrt().asinh();
    let exact_t = optimal_tritter_angle(total, side, TurningMode::Exact).map_err(|e| e.to_string())?;
    let approx_t = optimal_tritter_angle(total, side, TurningMode::Approx).map_err(|e| e.to_string())?;
    let phi_b = 0.6;
    let mut c = base(ChannelKind::Squeezing, total, r, 0.0);
    c.channel.phase = phi_b;
    c.squeezing_phase = phi_b + FRAC_PI_2;
    c.tritter_phase = c.pump_phase - 0.5 * phi_b + FRAC_PI_4;
    let mut worst: f64 = 0.0;
    for theta in [0.0, FRAC_PI_2, exact_t] {
        let h = squeezing_qfi_formula(&c.with_tritter_angle(theta));
        let slope = derivative(|t| Ok(squeezing_qfi_formula(&c.with_tritter_angle(t))), theta, STEP).unwrap();
        worst = worst.max(slope.abs() / h);
    }
    let gap = (exact_t - approx_t).abs();
    let msg =
        format!("worst |∂H/∂θ|/H = {worst:.2e} (limit 1e-6); θ_t = {exact_t:.7}, approximation off by {gap:.2e} rad");
    if worst < 1e-6 && gap < 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn measurement_optimality(configs: &[InterferometerConfig]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing] {
        let c = base(kind, 1e8, 3.0, 0.05).with_optimal_phases();
        let h = qfi_numeric(&c, 0.0, STEP).map_err(|e| e.to_string())?;
        let f0 = sensitivity_number_sum(&c, DEFAULT_SENSITIVITY_EPS0, STEP)
            .map_err(|e| e.to_string())?
            .f0;
        let ratio = f0 / h;
        ok &= (0.95..=1.0).contains(&ratio);
        lines.push(format!("{kind} F0/H = {ratio:.5}"));
    }

    let (mut below_f0, mut above_h, mut skipped) = (0, 0, 0);
    let mut worst_excess: f64 = 0.0;
    for c in configs {
        let h = qfi_numeric(c, 0.0, STEP).unwrap();
        let (s, f) = match (
            sensitivity_number_sum(c, DEFAULT_SENSITIVITY_EPS0, STEP),
            fisher_from_moments(c, DEFAULT_SENSITIVITY_EPS0, STEP),
        ) {
            (Ok(s), Ok(f)) => (s, f),
            _ => {
                skipped += 1;
                continue;
            }
        };
        if f < s.f0 {
            below_f0 += 1;
        }
        if f > h * (1.0 + 1e-6) {
            above_h += 1;
            worst_excess = worst_excess.max(f / h);
        }
    }
    ok &= below_f0 == 0 && above_h == 0;
    lines.push(format!(
        "F0 ≤ F violated on {below_f0}, F ≤ H(1+1e-6) violated on {above_h} of {} configs (worst F/H {worst_excess:.3e}, {skipped} without signal)",
        configs.len()
    ));
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn close_to(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-3 * a.abs().max(b.abs()) || (a.abs() < 1e-9 && b.abs() < 1e-9)
}

fn oracle_equivalence() -> Outcome {
    let cutoff = 25;
    let cases = [
        (0.5, 0.4, 2.0, 0.3),
        (0.6, 0.5, 1.0, 0.5),
        (0.3, 0.2, 2.0, 0.8),
        (0.6, 0.0, 0.5, 0.2),
    ];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut count = 0;
    for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing, ChannelKind::Phase] {
        for &(r, theta, alpha2, eps) in &cases {
            let c = InterferometerConfig {
                total_particles: alpha2 + side_population(r),
                pump_phase: 0.3,
                squeezing: r,
                squeezing_phase: 0.9,
                tritter_angle: theta,
                tritter_phase: 1.1,
                channel: ChannelSpec::new(kind, 1.0, 0.7, eps).unwrap(),
            };
            let probe = prepare_state_fock(&interferometer_sequence(&c, false).unwrap(), 3, cutoff)
                .map_err(|e| e.to_string())?;
            let full = prepare_state_fock(&interferometer_sequence(&c, true).unwrap(), 3, cutoff)
                .map_err(|e| e.to_string())?;
            let g_probe = probe_state(&c).unwrap().reduce(&[1, 2]).unwrap();
            let g_full = output_side_modes(&c).unwrap();
            let spec = FockOperatorSpec::new(3, cutoff, channel_generator(&c.channel, (1, 2))).unwrap();
            let (fn_, gn) = (
                number_moments_fock(&full, &[1, 2]).unwrap(),
                number_sum_moments(&g_full).unwrap(),
            );
            let (fp, gp) = (
                number_moments_fock(&probe, &[1, 2]).unwrap(),
                number_sum_moments(&g_probe).unwrap(),
            );
            let (fh, gh) = (
                number_difference_fock(&full, 1, 2).unwrap(),
                heterodyne_moments(&g_full).unwrap(),
            );
            let pairs = [
                ("mean N", fn_.0, gn.0),
                ("var N", fn_.1, gn.1),
                ("probe mean N", fp.0, gp.0),
                ("probe var N", fp.1, gp.1),
                ("heterodyne mean", fh.0, gh.0),
                ("heterodyne var", fh.1, gh.1),
                (
                    "QFI",
                    generator_variance(&probe, &spec).unwrap(),
                    qfi_numeric(&c, eps, STEP).unwrap(),
                ),
            ];
            for (label, a, b) in pairs {
                count += 1;
                if b.abs() > 1e-9 {
                    worst = worst.max(rel(a, b));
                }
                if !close_to(a, b) {
                    failures.push(format!("{kind} r={r} θ={theta} {label}: {a} vs {b}"));
                }
            }
        }
    }
    let msg = format!("{count} comparisons at cutoff {cutoff}, worst relative difference {worst:.2e} (limit 1e-3)");
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", failures.join("; ")))
    }
}

fn structural_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws = 1000;
    let mut worst_symp: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    let mut worst_purity: f64 = 0.0;
    let mut worst_number: f64 = 0.0;
    let mut worst_tritter: f64 = 0.0;
    let id = |m: &DMatrix<f64>| (m - DMatrix::identity(m.nrows(), m.ncols())).amax();
    for _ in 0..draws {
        let x = rng.random_range(-1.5..1.5);
        let phi = rng.random_range(0.0..2.0 * PI);
        let ops: Vec<(SymplecticOp, SymplecticOp)> = vec![
            (pumped_two_mode_squeezer(x, phi), pumped_two_mode_squeezer(-x, phi)),
            (tritter(x, phi), tritter(-x, phi)),
            (
                embed_on_side_modes(&squeezing_channel(x, phi)).unwrap(),
                embed_on_side_modes(&squeezing_channel(-x, phi)).unwrap(),
            ),
            (
                embed_on_side_modes(&mode_mixing_channel(x, phi)).unwrap(),
                embed_on_side_modes(&mode_mixing_channel(-x, phi)).unwrap(),
            ),
            (phase_channel(x), phase_channel(-x)),
        ];
        for (a, b) in &ops {
            worst_symp = worst_symp.max(a.residual());
            worst_inv = worst_inv.max(id(b.compose(a).unwrap().matrix()));
        }

        let c = random_config(&mut rng, ChannelKind::Squeezing);
        let kinds = [ChannelKind::Squeezing, ChannelKind::ModeMixing, ChannelKind::Phase];
        let c = InterferometerConfig {
            channel: ChannelSpec::new(kinds[rng.random_range(0..3)], 1.0, phi, rng.random_range(0.0..0.5)).unwrap(),
            ..c
        };
        let out = run_interferometer(&c).unwrap();
        worst_purity = worst_purity.max((out.purity().unwrap() - 1.0).abs());

        let d = DVector::from_fn(6, |_, _| rng.random_range(-4.0..4.0));
        let s = GaussianState::new(d, DMatrix::identity(6, 6))
            .unwrap()
            .apply(&pumped_two_mode_squeezer(rng.random_range(0.0..1.5), phi))
            .unwrap();
        let before = s.mean_particle_number();
        for op in [&ops[1].0, &ops[3].0, &ops[4].0] {
            let after = s.apply(op).unwrap().mean_particle_number();
            worst_number = worst_number.max((after - before).abs() / before);
        }

        let theta = rng.random_range(-PI..PI);
        let diff = tritter(theta, phi).matrix() - tritter_from_generator(theta, phi).unwrap().matrix();
        worst_tritter = worst_tritter.max(diff.amax());
    }
    for i in 0..20 {
        for j in 0..20 {
            let (theta, phi) = (-PI + 2.0 * PI * i as f64 / 19.0, 2.0 * PI * j as f64 / 19.0);
            let diff = tritter(theta, phi).matrix() - tritter_from_generator(theta, phi).unwrap().matrix();
            worst_tritter = worst_tritter.max(diff.amax());
        }
    }
    let all_symplectic = worst_symp < 1e-10 && check_symplectic(tritter(0.3, 0.2).matrix(), 1e-10);
    let msg = format!(
        "{draws} draws: symplectic {worst_symp:.1e}, inverse {worst_inv:.1e}, purity {worst_purity:.1e}, passive number {worst_number:.1e}, tritter vs exponential {worst_tritter:.1e}"
    );
    if all_symplectic && worst_inv < 1e-12 && worst_purity < 1e-10 && worst_number < 1e-9 && worst_tritter < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let configs = criterion_configs();
    let criteria: Vec<Criterion> = vec![
        (
            "closed-form equivalence",
            Box::new(|| closed_form_equivalence(&configs)),
        ),
        ("limit-chain consistency", Box::new(limit_chain)),
        ("detector comparison numbers", Box::new(detector_numbers)),
        ("undepleted-pump angle", Box::new(undepleted_angle)),
        ("turning points", Box::new(turning_points)),
        ("measurement optimality", Box::new(|| measurement_optimality(&configs))),
        ("Fock oracle equivalence", Box::new(oracle_equivalence)),
        ("structural suite", Box::new(structural_suite)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({secs:.1} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1} s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
