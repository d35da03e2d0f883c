//! Quick amplifier run: evolve the two-photon amplifier from an excited atom
//! and an empty cavity, then print the steady-state currents and efficiency.
//!
//! Run with `cargo run --release -p qamp-core --example steady_state`.

use qamp_core::hilbert::{build_joint_state, AtomStateSpec, FieldStateSpec, HilbertLayout};
use qamp_core::integrate::{evolve, IntegratorConfig};
use qamp_core::liouville::{AmplifierModel, Frame, InteractionOrder};
use qamp_core::thermo::detect_steady_state;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(48, |s| s.parse().unwrap());
    let dt: f64 = args.get(2).map_or(0.02, |s| s.parse().unwrap());
    let lambda_over_gamma: f64 = args.get(3).map_or(100.0, |s| s.parse().unwrap());
    let t_max: f64 = args.get(4).map_or(10.0, |s| s.parse().unwrap());

    let omega_res = 1000.0;
    let model = AmplifierModel {
        omega1: 0.0,
        omega2: omega_res,
        omega3: 1.2 * omega_res,
        omega_f: omega_res / 2.0,
        lambda: 1.0,
        gamma_h: 1.0 / lambda_over_gamma,
        gamma_c: 1.0 / lambda_over_gamma,
        nbar_h: 10.0,
        nbar_c: 0.1,
        order: InteractionOrder::TwoPhoton,
        frame: Frame::Interaction,
        layout: HilbertLayout::new(n).unwrap(),
    }
    .validated()
    .unwrap();

    let rho0 = build_joint_state(
        &AtomStateSpec::Level(2),
        &FieldStateSpec::Vacuum,
        model.layout,
    )
    .unwrap()
    .rho;

    let config = IntegratorConfig {
        dt,
        t_max,
        sample_interval: 0.05,
        guard_levels: 5,
        guard_tol: 1e-3,
        trace_drift_tol: 1e-8,
        snapshot_times: vec![],
    };

    let start = std::time::Instant::now();
    let out = evolve(&rho0, &model, &config).expect("evolution");
    let elapsed = start.elapsed();

    let last = out.series.last().unwrap();
    println!("run time:        {elapsed:.2?} ({} steps)", out.health.steps_total);
    println!("dt used:         {:.5} (clamped: {})", out.health.dt_internal, out.health.dt_clamped);
    println!("trace drift max: {:.3e}", out.health.max_trace_drift);
    println!("min eigenvalue:  {:.3e}", out.health.min_eigenvalue);
    println!("tail mass max:   {:.3e}", out.health.max_tail_mass);
    println!();
    println!("final sample (t = {} / Gamma):", last.t);
    println!("  qdot_h = {:+.6}", last.thermo.qdot_h);
    println!("  qdot_c = {:+.6}", last.thermo.qdot_c);
    println!("  p_f    = {:+.6}", last.thermo.p_f);
    println!("  eta    = {:.6}", last.thermo.eta);
    println!("  qc/qh  = {:+.6}", last.thermo.qdot_c / last.thermo.qdot_h);
    println!(
        "  first law resid = {:+.3e}",
        (last.thermo.qdot_h + last.thermo.qdot_c - last.thermo.p_f) / last.thermo.qdot_h
    );
    println!("  e_field = {:.4}, s_field = {:.4}", last.thermo.e_field, last.thermo.s_field);
    println!("  parity  = {:+.6e}", last.field_parity);
    println!(
        "  atom populations = [{:.4}, {:.4}, {:.4}]",
        last.atom_populations[0], last.atom_populations[1], last.atom_populations[2]
    );
    for tol in [1e-4, 3e-4, 1e-3] {
        match detect_steady_state(&out.series, 1.0, tol) {
            Some(t) => println!("steady state (tol {tol:.0e}) at t = {t} / Gamma"),
            None => println!("steady state (tol {tol:.0e}) not detected"),
        }
    }
    println!();
    println!("late-time drift of monitored quantities:");
    for t_probe in [7.0, 8.0, 9.0, 10.0] {
        let r = out
            .series
            .records
            .iter()
            .find(|r| (r.t - t_probe).abs() < 1e-9)
            .unwrap();
        println!(
            "  t={:4.1}: qh={:.8} qc={:.8} pf={:.8} pops=[{:.8},{:.8},{:.8}]",
            r.t,
            r.thermo.qdot_h,
            r.thermo.qdot_c,
            r.thermo.p_f,
            r.atom_populations[0],
            r.atom_populations[1],
            r.atom_populations[2],
        );
    }
}
