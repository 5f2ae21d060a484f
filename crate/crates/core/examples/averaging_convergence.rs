//! HF extraction error against injection frequency: the remainder of the
//! averaged model shrinks like 1/Ω².

use imlab::lab::{experiments, LabConfig};

fn main() -> imlab::Result<()> {
    let mut cfg = LabConfig::default();
    cfg.convergence.omega_hz = vec![250.0, 500.0, 1000.0, 2000.0, 4000.0];
    let study = experiments::convergence(&cfg)?;
    println!("equilibrium rotor flux {:.4} Wb", study.equilibrium_flux_wb);
    println!("{:>8} {:>12} {:>8} {:>12} {:>12}", "Hz", "hf error", "ratio", "phis ripple", "phir ripple");
    for (k, r) in study.rows.iter().enumerate() {
        let ratio = if k == 0 { String::new() } else { format!("{:.3}", study.ratios[k - 1]) };
        println!("{:>8} {:>12.3e} {ratio:>8} {:>12.3e} {:>12.3e}", r.omega_hz, r.hf_rel_err, r.phis_ripple_wb, r.phir_ripple_wb);
    }
    Ok(())
}
