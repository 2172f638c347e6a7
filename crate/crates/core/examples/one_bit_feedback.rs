//! The two-use scheme with a single feedback bit: retransmit only when the
//! first observation falls inside the erasure zone.

use fbdp::baselines::{no_feedback_ber, one_bit_monte_carlo, one_bit_optimize};
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>8} {:>8}",
        "S", "dp", "one-bit", "no-fb", "b", "a"
    );
    for s in [1.0, 2.0, 3.0, 4.0] {
        let dp = calibrate_lambda(s, &SolverConfig::new(2, s))?;
        let (scheme, ber) = one_bit_optimize(s)?;
        println!(
            "{s:>5} {:>12.4e} {ber:>12.4e} {:>12.4e} {:>8.4} {:>8.4}",
            dp.error_probability,
            no_feedback_ber(s),
            scheme.b,
            scheme.a
        );
    }
    let (scheme, ber) = one_bit_optimize(2.0)?;
    let r = one_bit_monte_carlo(&scheme, 200_000, 3)?;
    println!(
        "\nS=2 simulated {:.4e} +/- {:.1e} vs integrated {ber:.4e}",
        r.ber_hat, r.ber_se
    );
    Ok(())
}
