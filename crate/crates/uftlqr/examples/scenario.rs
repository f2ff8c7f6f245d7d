// Running a JSON scenario end to end: every method writes a long-format
// CSV and the report compares them.

use uftlqr::scenario::{parse_scenario, run_scenario_in};
use uftlqr::Result;

const CONFIG: &str = r#"{
  "schema": 1,
  "name": "example",
  "equation": { "c": 1.0, "L": 3.141592653589793 },
  "initial": { "kind": "sine", "amplitude": 1.0, "mode": 2 },
  "grid": { "x": { "start": 0.5, "stop": 2.5, "count": 5 }, "t": [0.25, 0.5] },
  "methods": ["contour", "series", "oracle"],
  "series": { "m": 20 },
  "oracle": { "n": 101, "dt": 0.001 }
}"#;

pub fn run_example() -> Result<serde_json::Value> {
    let sc = parse_scenario(CONFIG)?;
    let dir = std::env::temp_dir().join(format!("uftlqr-example-{}", std::process::id()));
    let rep = run_scenario_in(&sc, &dir)?;
    for f in &rep.files {
        println!("wrote {}", f.display());
    }
    for (name, c) in rep.json["comparisons"].as_object().into_iter().flatten() {
        println!("{name}: max abs {:.3e}", c["max_abs"].as_f64().unwrap_or(f64::NAN));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(rep.json)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
