//! Saves a calibrated policy, reads it back and checks that nothing changed.

use fbdp::io::{read_policy_file, write_policy_file, PolicyFile};
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    let sol = calibrate_lambda(2.42, &SolverConfig::new(2, 2.42))?;
    let file = PolicyFile {
        config: sol.config.clone(),
        lambda: sol.lambda,
        ber: sol.error_probability,
        energy: sol.achieved_energy,
        policy: sol.policy,
    };
    let path = std::env::temp_dir().join("fbdp_example.fbdp");
    write_policy_file(&path, &file)?;
    let back = read_policy_file(&path)?;
    println!("wrote {}", path.display());
    println!("identical after reading back: {}", back == file);
    let text = file.to_text();
    for line in text.lines().take(16) {
        println!("  {line}");
    }
    Ok(())
}
