//! Privacy of noisy SGD with Poisson subsampling under three accountants.

use fdp::account::{dpsgd_account, DpsgdMethod};

fn main() -> fdp::error::Result<()> {
    let (sigma, p, delta) = (1.0, 0.01, 1e-5);
    for steps in [100u64, 1_000, 10_000] {
        let gdp = dpsgd_account(sigma, p, steps, DpsgdMethod::GdpLimit, delta)?;
        let edgeworth = dpsgd_account(sigma, p, steps, DpsgdMethod::Edgeworth, delta)?;
        let fft = dpsgd_account(sigma, p, steps, DpsgdMethod::Fft, delta)?;
        let (lo, hi) = fft.eps_bracket.expect("FFT reports a bracket");
        println!(
            "T = {steps:>5}: GDP limit mu {:.4} eps {:.4} | Edgeworth {:.4} | FFT [{lo:.4}, {hi:.4}]",
            gdp.mu.unwrap_or_default(),
            gdp.eps,
            edgeworth.eps
        );
    }
    Ok(())
}
