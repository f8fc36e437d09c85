//! Driving the command-line pipeline from code: parse a config, run a
//! command, and print the JSON report.

use calabi::cli::config::RunConfig;
use calabi::cli::{run, CommandName, RunSettings};

const CONFIG: &str = r#"{
  "construction": { "kind": "minimal_cp", "n": 3, "factor": { "totally_geodesic_sphere": { "dim": 2 } } },
  "samples": 12,
  "seed": 3
}"#;

fn main() {
    let cfg = RunConfig::from_json(CONFIG).expect("valid config");
    let raw: serde_json::Value = serde_json::from_str(CONFIG).unwrap();
    let settings = RunSettings::from_config(&cfg);
    for cmd in [CommandName::Verify, CommandName::Classify] {
        let report = run(&cfg, raw.clone(), cmd, &settings).expect("construction succeeds");
        for c in &report.checks {
            println!("{:<10} {:<24} {:.2e} <= {:.0e} {}", cmd.as_str(), c.name, c.max_residual, c.tolerance, if c.pass { "ok" } else { "FAIL" });
        }
    }
    let report = run(&cfg, raw, CommandName::Build, &RunSettings { samples: Some(2), ..settings }).unwrap();
    println!("{}", report.to_json());
}
