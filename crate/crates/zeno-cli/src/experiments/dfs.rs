//! List the decoherence-free basis, verify each member dynamically, and
//! report the decay-rate spectrum of the orthogonal complement with the
//! measurement-time estimate ΔT.

use std::path::Path;

use anyhow::Result;

use zeno_core::dynamics::{delta_t_estimate, non_dfs_decay_rates};
use zeno_core::hilbert::{basis_label, SpaceConfig};
use zeno_core::model::{
    conditional_hamiltonian, dfs_basis, is_decoherence_free, SystemParams,
};

use crate::config::{DfsSection, RunSection};
use crate::output::{fmt_float, write_csv, RunReport};

use super::{format_state, DRIFT_BOUND};

const STATE_NAMES: [&str; 5] = ["000", "001", "010", "011", "0a"];

fn rates_for(section: &DfsSection, n_max: usize) -> Result<Vec<f64>> {
    let space = SpaceConfig::new(n_max)?;
    let params = SystemParams::new(section.g, section.kappa, 0.0)?;
    let h = conditional_hamiltonian(params, space);
    Ok(non_dfs_decay_rates(&h, &dfs_basis(space))?)
}

pub fn run(section: &DfsSection, run: &RunSection, out_dir: &Path) -> Result<RunReport> {
    let mut report = RunReport::new("dfs");
    let space = SpaceConfig::new(run.n_max)?;
    let params = SystemParams::new(section.g, section.kappa, 0.0)?;
    let states = dfs_basis(space);

    println!(
        "decoherence-free basis (n_max = {}, kappa = {} g, gamma_cav = 0):",
        run.n_max, section.kappa
    );
    let mut state_rows: Vec<Vec<String>> = Vec::new();
    let mut all_df = true;
    let horizon = 100.0 / section.g;
    for (name, state) in STATE_NAMES.iter().zip(&states) {
        println!("  |{name}>");
        print!("{}", format_state(state, space));
        let df = is_decoherence_free(state, params, space, horizon, 1e-9)?;
        all_df &= df;
        for idx in 0..state.dim() {
            let amp = state.amp(idx);
            if amp.norm() < 1e-12 {
                continue;
            }
            let label = basis_label(idx, space)?;
            state_rows.push(vec![
                (*name).to_string(),
                label.n.to_string(),
                label.j1.to_string(),
                label.j2.to_string(),
                fmt_float(amp.re),
                fmt_float(amp.im),
            ]);
        }
    }
    let states_path = out_dir.join("dfs_states.csv");
    write_csv(
        &states_path,
        &["state", "n", "j1", "j2", "amp_re", "amp_im"],
        &state_rows,
    )?;
    report.record_output(states_path);

    let rates = rates_for(section, run.n_max)?;
    let delta_t = delta_t_estimate(&rates).expect("complement has decaying modes");
    let anchor_kappa = 1.0 / section.kappa;
    let anchor_g2 = section.kappa / (section.g * section.g);
    println!("complement decay rates ({} modes):", rates.len());
    for (i, r) in rates.iter().enumerate() {
        println!("  rate[{i:2}] = {r:.10} g");
    }
    println!("measurement-time estimate dT = 1/min rate = {delta_t:.6} / g");
    println!("  order-of-magnitude anchors: 1/kappa = {anchor_kappa:.6}, kappa/g^2 = {anchor_g2:.6}");

    let rate_rows: Vec<Vec<String>> = rates
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                i.to_string(),
                fmt_float(*r),
                fmt_float(delta_t),
                fmt_float(anchor_kappa),
                fmt_float(anchor_g2),
            ]
        })
        .collect();
    let rates_path = out_dir.join("dfs_rates.csv");
    write_csv(
        &rates_path,
        &["index", "rate", "delta_t", "anchor_inv_kappa", "anchor_kappa_over_g2"],
        &rate_rows,
    )?;
    report.record_output(rates_path);

    report.check(
        "five_df_states",
        states.len() == 5,
        format!("{} states", states.len()),
    );
    report.check(
        "all_states_dynamically_df",
        all_df,
        "every listed state must keep P0 = 1 over 100/g".into(),
    );
    report.check(
        "complement_mode_count",
        rates.len() == space.dim() - 5,
        format!("{} rates for dimension {}", rates.len(), space.dim()),
    );
    report.check(
        "complement_fully_decaying",
        rates.first().is_some_and(|&r| r > 0.0),
        format!("smallest rate {:?}", rates.first()),
    );

    // The slowest complement mode lives in an excitation-conserving chain
    // that closes below the truncation, so dT must not move with n_max.
    let fine_rates = rates_for(section, run.n_max + 1)?;
    let fine_delta_t = delta_t_estimate(&fine_rates).expect("decaying modes");
    report.drift_check(
        "truncation_drift_delta_t",
        (delta_t - fine_delta_t).abs() / delta_t,
        DRIFT_BOUND,
    );
    Ok(report)
}
