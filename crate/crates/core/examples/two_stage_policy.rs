//! Two channel uses at S = 2.42: the first use is antipodal, the second
//! transmits only when the first observation left the receiver unsure.

use fbdp::channel::encoder_amplitudes;
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    let s = 2.42;
    let sol = calibrate_lambda(s, &SolverConfig::new(2, s))?;
    let v1 = sol.policy.first_amplitude();
    println!("lambda = {:.5e}", sol.lambda);
    println!("ber    = {:.5e}", sol.error_probability);
    println!("energy = {:.5}", sol.achieved_energy);
    println!("stage 1: v = {v1:.5}, codewords +/-{:.5}", v1 / 2.0);

    // y1 maps to l2 = v1 * y1.
    println!("\n{:>8} {:>10} {:>10} {:>10}", "y1", "l2", "x(m=1)", "x(m=0)");
    for i in -12..=12 {
        let y1 = i as f64 * 0.25;
        let l2 = v1 * y1;
        let (x1, x0) = encoder_amplitudes(l2, sol.policy.amplitude(2, l2));
        println!("{y1:>8.2} {l2:>10.4} {x1:>10.5} {x0:>10.5}");
    }
    Ok(())
}
