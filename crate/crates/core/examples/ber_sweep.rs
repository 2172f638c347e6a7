//! BER against Eb/N0 for short horizons, written as sweep CSV to stdout.

use fbdp::baselines::{no_feedback_ber, sk_optimize};
use fbdp::io::{write_sweep_csv, SweepRow};
use fbdp::{calibrate_lambda, SolverConfig};

fn main() -> fbdp::Result<()> {
    let mut rows = Vec::new();
    for n in 1..=4 {
        for db in [-3.0, -1.0, 1.0, 3.0] {
            let s = 2.0 * 10f64.powf(db / 10.0);
            let dp = calibrate_lambda(s, &SolverConfig::new(n, s))
                .ok()
                .map(|sol| (sol.lambda, sol.error_probability, sol.achieved_energy));
            rows.push(SweepRow {
                budget: s,
                horizon: n,
                dp,
                ber_no_feedback: no_feedback_ber(s),
                ber_one_bit: None,
                ber_sk: Some(sk_optimize(n, s)?.1),
            });
        }
    }
    write_sweep_csv(std::io::stdout().lock(), &rows)
}
