//! End-to-end benchmark run through the experiment pipeline: optimize
//! target-only and robust pulses for the single-qubit transfer task,
//! sweep the noise strength over specific and random couplings, and
//! write the CSV/JSON outputs the CLI would produce.
//!
//! This uses a reduced configuration so it finishes in about a minute;
//! pass a config file to the `robustqoc` binary for the full-size runs.
//!
//! Run with: cargo run --release --example run_benchmark

use robustqoc::experiment::{emit_outputs, run_experiment, ExperimentConfig, StrategySelection};

fn main() {
    let cfg_text = "\
task = \"transfer2\"
tau = 600
n_steps = 100
n_lambda = 5
ensemble_size = 3
n_restarts = 2
max_iterations = 30
init_amplitude = 4e-3
seed = 7
";
    let cfg = ExperimentConfig::from_str(cfg_text, robustqoc::experiment::TaskId::Transfer2, None)
        .unwrap();
    let report = run_experiment(&cfg, StrategySelection::Both).unwrap();

    for s in &report.strategies {
        println!(
            "{:>12}: J = {:.4e}, J0 = {:.3e}, D_eff = {:.4}, noise-free fidelity = {:.6}",
            s.strategy.to_string(),
            s.objective,
            s.j0,
            s.d_eff,
            s.noise_free_fidelity
        );
    }
    use robustqoc::experiment::{NoiseKind, Strategy};
    println!("\nmean fidelity over random couplings:");
    println!("{:>10} {:>14} {:>14}", "lambda", "target-only", "robust");
    for &lambda in &cfg.lambda_grid() {
        let t = report.mean_fidelity_at(lambda, Strategy::TargetOnly, NoiseKind::Random);
        let r = report.mean_fidelity_at(lambda, Strategy::Robust, NoiseKind::Random);
        println!("{lambda:10.4} {t:14.6} {r:14.6}");
    }
    if let Some(ratio) = report.infidelity_ratio_at_lambda_max {
        println!("\ninfidelity ratio at lambda_max: {ratio:.2}");
    }

    let out = std::env::temp_dir().join("robustqoc_benchmark_example");
    let paths = emit_outputs(&report, &out).unwrap();
    println!("outputs written under {}", out.display());
    for path in paths {
        println!("  {}", path.display());
    }
}
