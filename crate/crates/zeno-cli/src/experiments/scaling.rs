//! Mean time to the first photon emission under the CNOT drive versus the
//! gate duration: the first grows as (g/|Ω|)², the second only as g/|Ω|.

use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;

use zeno_core::dynamics::{default_pulse_horizon, mean_first_emission_time, QuadratureConfig};
use zeno_core::gates::{cnot_duration, validate_separation, CnotConfig, DEFAULT_SEPARATION_THRESHOLD};
use zeno_core::hilbert::{BasisLabel, SpaceConfig, StateVector};
use zeno_core::model::SystemParams;
use zeno_core::stats::{geometric_grid, log_log_slope};
use zeno_core::C64;

use crate::config::{RunSection, ScalingSection};
use crate::output::{fmt_float, write_csv, RunReport};
use crate::svg::{Figure, Series};

use super::DRIFT_BOUND;

struct ScalingPoint {
    omega: f64,
    mean: f64,
    mean_error: f64,
    lower_bound: bool,
    duration: f64,
}

fn run_grid(omegas: &[f64], section: &ScalingSection, n_max: usize) -> Result<Vec<ScalingPoint>> {
    let space = SpaceConfig::new(n_max)?;
    let psi0 = StateVector::basis_state(space, BasisLabel::new(0, 1, 0))?;
    let mut points: Vec<(usize, ScalingPoint)> = omegas
        .par_iter()
        .enumerate()
        .map(|(i, &omega)| {
            let params = SystemParams::new(section.g, section.kappa, 0.0).expect("validated");
            let cfg = CnotConfig::new(C64::new(omega, 0.0), params, space).expect("omega > 0");
            let h = cfg.hamiltonian().expect("valid pulse");
            let quad = QuadratureConfig::with_horizon(default_pulse_horizon(section.g, omega));
            let mean = mean_first_emission_time(&h, &psi0, &quad).expect("normalized input");
            (
                i,
                ScalingPoint {
                    omega,
                    mean: mean.value,
                    mean_error: mean.error_estimate,
                    lower_bound: mean.lower_bound,
                    duration: cnot_duration(C64::new(omega, 0.0)),
                },
            )
        })
        .collect();
    points.sort_by_key(|&(i, _)| i);
    Ok(points.into_iter().map(|(_, p)| p).collect())
}

fn slopes(points: &[ScalingPoint], g: f64) -> (f64, f64, f64) {
    let x: Vec<f64> = points.iter().map(|p| g / p.omega).collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let durations: Vec<f64> = points.iter().map(|p| p.duration).collect();
    let ratios: Vec<f64> = points.iter().map(|p| p.mean / p.duration).collect();
    (
        log_log_slope(&x, &means),
        log_log_slope(&x, &durations),
        log_log_slope(&x, &ratios),
    )
}

pub fn run(section: &ScalingSection, run: &RunSection, out_dir: &Path) -> Result<RunReport> {
    let mut report = RunReport::new("scaling");
    let omegas = geometric_grid(section.omega_min, section.omega_max, section.points);

    // Warn (without failing) when grid edges leave the separation regime.
    let space = SpaceConfig::new(run.n_max)?;
    for &&edge in [omegas.first(), omegas.last()].iter().flatten() {
        let params = SystemParams::new(section.g, section.kappa, 0.0)?;
        let cfg = CnotConfig::new(C64::new(edge, 0.0), params, space)?;
        let sep = validate_separation(&cfg, DEFAULT_SEPARATION_THRESHOLD);
        if sep.any_flag() {
            println!(
                "warning: omega = {edge} g violates the separation regime ({}); fit reported anyway",
                sep.flags().join(", ")
            );
        }
    }

    let points = run_grid(&omegas, section, run.n_max)?;
    let (mean_slope, duration_slope, ratio_slope) = slopes(&points, section.g);
    println!("emission-time exponent  = {mean_slope:.6} (expect 2)");
    println!("gate-duration exponent  = {duration_slope:.6} (expect 1)");
    println!("emission/duration ratio exponent = {ratio_slope:.6} (expect 1)");

    let header = [
        "experiment",
        "omega",
        "kappa",
        "g",
        "n_max",
        "mean_emission_time",
        "mean_error",
        "lower_bound",
        "gate_duration",
        "emission_over_duration",
    ];
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                "scaling".into(),
                fmt_float(p.omega),
                fmt_float(section.kappa),
                fmt_float(section.g),
                run.n_max.to_string(),
                fmt_float(p.mean),
                fmt_float(p.mean_error),
                (p.lower_bound as u8).to_string(),
                fmt_float(p.duration),
                fmt_float(p.mean / p.duration),
            ]
        })
        .collect();
    let csv_path = out_dir.join("scaling.csv");
    write_csv(&csv_path, &header, &rows)?;
    report.record_output(csv_path);

    let svg_path = out_dir.join("scaling.svg");
    std::fs::write(
        &svg_path,
        Figure {
            title: "first-emission time and gate duration".into(),
            x_label: "g / omega".into(),
            y_label: "time * g".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series {
                    label: "mean emission time".into(),
                    points: points.iter().map(|p| (section.g / p.omega, p.mean)).collect(),
                },
                Series {
                    label: "gate duration".into(),
                    points: points
                        .iter()
                        .map(|p| (section.g / p.omega, p.duration))
                        .collect(),
                },
            ],
        }
        .render(),
    )?;
    report.record_output(svg_path);

    report.check(
        "no_lower_bound_flags",
        points.iter().all(|p| !p.lower_bound),
        "every quadrature must resolve the full decay".into(),
    );
    report.check(
        "emission_time_exponent",
        (mean_slope - 2.0).abs() <= 0.1,
        format!("slope {mean_slope} outside 2.0 ± 0.1"),
    );
    report.check(
        "duration_exponent_exact",
        (duration_slope - 1.0).abs() < 1e-12,
        format!("slope {duration_slope} is not exactly 1"),
    );
    report.check(
        "ratio_grows_linearly",
        (ratio_slope - 1.0).abs() <= 0.1,
        format!("ratio slope {ratio_slope} outside 1.0 ± 0.1"),
    );

    let fine = run_grid(&omegas, section, run.n_max + 1)?;
    let (fine_mean_slope, fine_duration_slope, _) = slopes(&fine, section.g);
    let drift = (mean_slope - fine_mean_slope)
        .abs()
        .max((duration_slope - fine_duration_slope).abs());
    report.drift_check("truncation_drift", drift, DRIFT_BOUND);
    Ok(report)
}
