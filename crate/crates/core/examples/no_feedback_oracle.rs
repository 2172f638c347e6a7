//! A single channel use cannot exploit feedback, so the calibrated N=1
//! policy must reproduce antipodal signalling: BER = Q(sqrt(S)).

use fbdp::baselines::no_feedback_ber;
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>10}", "S", "ber_dp", "Q(sqrt S)", "v1");
    for s in [0.5, 1.0, 2.0, 4.0] {
        let sol = calibrate_lambda(s, &SolverConfig::new(1, s))?;
        println!(
            "{s:>6} {:>14.6e} {:>14.6e} {:>10.5}",
            sol.error_probability,
            no_feedback_ber(s),
            sol.policy.first_amplitude()
        );
    }
    Ok(())
}
