//! The linear Schalkwijk-Kailath scheme against the optimal policy.

use fbdp::baselines::sk_optimize;
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    let s = 1.0;
    println!("{:>4} {:>12} {:>12} {:>6}", "N", "dp", "sk", "rho");
    for n in [1, 2, 4, 8] {
        let dp = calibrate_lambda(s, &SolverConfig::new(n, s))?;
        let (scheme, sk) = sk_optimize(n, s)?;
        println!("{n:>4} {:>12.4e} {sk:>12.4e} {:>6.3}", dp.error_probability, scheme.rho);
    }
    println!("\nS-K alone at longer horizons:");
    for n in [16, 32, 100] {
        let (scheme, sk) = sk_optimize(n, s)?;
        println!("{n:>4} {:>12} {sk:>12.4e} {:>6.3}", "", scheme.rho);
    }
    Ok(())
}
