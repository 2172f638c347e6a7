//! Runs the encoder/decoder pair on simulated noise and compares with the
//! density-propagation prediction.

use fbdp::montecarlo::monte_carlo;
use fbdp::{calibrate_lambda, EncoderSpec, SolverConfig};

fn main() -> fbdp::Result<()> {
    let (n, s) = (3, 2.0);
    let sol = calibrate_lambda(s, &SolverConfig::new(n, s))?;
    let spec = EncoderSpec::new(sol.policy.clone());
    let r = monte_carlo(&spec, 200_000, 42)?;
    println!("N={n} S={s}");
    println!(
        "predicted ber {:.5e}, energy {:.5}",
        sol.error_probability, sol.achieved_energy
    );
    println!(
        "simulated ber {:.5e} (95% CI {:.5e} .. {:.5e}), energy {:.5} +/- {:.5}",
        r.ber_hat, r.ber_ci95.0, r.ber_ci95.1, r.mean_energy, r.energy_se
    );
    println!("largest single-trial energy {:.3}", r.energy_max);
    Ok(())
}
