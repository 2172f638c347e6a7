//! The scalar policy lifted to M parallel channels. Codewords lie on a
//! fixed unit direction, so only their projection carries information and
//! the error rate and energy match the scalar scheme.

use fbdp::channel::mimo_embed;
use fbdp::montecarlo::{monte_carlo, monte_carlo_mimo};
use fbdp::{calibrate_lambda, EncoderSpec, SolverConfig};

fn main() -> fbdp::Result<()> {
    let s = 2.0;
    let sol = calibrate_lambda(s, &SolverConfig::new(2, s))?;
    let spec = EncoderSpec::new(sol.policy.clone());
    let scalar = monte_carlo(&spec, 100_000, 5)?;
    println!("M=1 ber {:.5e} energy {:.5}", scalar.ber_hat, scalar.mean_energy);
    for m in [2, 4, 8] {
        let enc = mimo_embed(&spec, m)?;
        let (x1, x0) = enc.codewords(0.0, sol.policy.first_amplitude());
        let r = monte_carlo_mimo(&enc, 100_000, 5)?;
        println!(
            "M={m} ber {:.5e} energy {:.5}  first codewords {:.3?} / {:.3?}",
            r.ber_hat, r.mean_energy, x1, x0
        );
    }
    Ok(())
}
