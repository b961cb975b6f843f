//! A TOML-configured m-sweep, as run by `cutlocus sweep`.

use cutlocus::cli::{run_sweep, RunConfig};

fn main() -> cutlocus::Result<()> {
    let out = std::env::temp_dir().join("cutlocus-sweep-example");
    let text = format!(
        r#"
m = [8.0, 16.0, 32.0, 64.0]
lambda = [0.3, 0.6]
gradient = false
output = "{}"
seed = 1

[domain]
kind = "flat_unit_torus"
grid = 64

[semiconcavity]
samples = 100
rho = 0.1
max_length = 0.5
"#,
        out.display()
    );
    let report = run_sweep(&RunConfig::from_toml(&text)?)?;
    for row in &report.rows {
        println!("{}", row.csv_line());
    }
    println!("wrote {} files to {}", report.artifacts.len(), out.display());
    Ok(())
}
