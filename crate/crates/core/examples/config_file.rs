//! Solver settings from TOML, overridden by programmatic values.

use fbdp::calibrate_lambda;
use fbdp::config::ConfigOverrides;

fn main() -> fbdp::Result<()> {
    let file = ConfigOverrides::from_toml("n = 3\ns = 2.0\npoints = 1001\nquad_order = 32\n")?;
    let flags = ConfigOverrides {
        quad_order: Some(48),
        ..Default::default()
    };
    let config = file.merged(&flags).resolve(1, 1.0)?;
    println!("{config:#?}");
    let sol = calibrate_lambda(config.budget, &config)?;
    println!("ber {:.5e} energy {:.5}", sol.error_probability, sol.achieved_energy);
    Ok(())
}
