//! Transmitted energy equals the posterior-weighted energy
//! sum_k p0 p1 v_k^2 in expectation. Both are estimated from the same trials.

use fbdp::montecarlo::energy_identity_check;
use fbdp::{calibrate_lambda, EncoderSpec, SolverConfig};

fn main() -> fbdp::Result<()> {
    let s = 2.0;
    let sol = calibrate_lambda(s, &SolverConfig::new(3, s))?;
    let spec = EncoderSpec::new(sol.policy.clone());
    let id = energy_identity_check(&spec, 200_000, 11)?;
    println!("transmitted  {:.5} +/- {:.5}", id.lhs, id.lhs_se);
    println!("posterior    {:.5} +/- {:.5}", id.rhs, id.rhs_se);
    println!("difference   {:.2} standard errors", (id.lhs - id.rhs) / id.diff_se);
    println!("propagation  {:.5}", sol.achieved_energy);
    Ok(())
}
