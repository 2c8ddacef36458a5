//! Prints the best Δt per depth under each mixer variant for both families.

use seqmix::case_study::{families, instance};
use seqmix::optimize::optimize_dt;
use seqmix::sim::{MixerMode, Ordering, QaoaSimulator};

fn main() -> seqmix::Result<()> {
    let inst = instance();
    for (name, fam) in families(&inst) {
        for (label, mode, ord) in [
            ("seq", MixerMode::Sequential, Ordering::Canonical),
            ("seq-rev", MixerMode::Sequential, Ordering::Reversed),
            ("sim", MixerMode::Simultaneous, Ordering::Canonical),
        ] {
            let sim = QaoaSimulator::new(&inst, &fam)?.with_ordering(ord);
            let row: Vec<String> = [2, 4, 8, 16, 32, 64, 128, 256]
                .iter()
                .map(|&p| {
                    let r = optimize_dt(&sim, inst.k(), p, mode, None).unwrap();
                    format!("p{p}:{:.2}/{:.3}", r.best_params[0], r.best_value)
                })
                .collect();
            println!("{name} {label}: {}", row.join(" "));
        }
    }
    Ok(())
}
