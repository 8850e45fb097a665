//! Builds the bump kernel with vanishing moments and prints its moments,
//! its membership report and a few samples.

use lcgf::mollifier::Mollifier;

fn main() -> lcgf::Result<()> {
    for n in [0, 2, 4] {
        let phi = Mollifier::construct(n)?;
        let moments: Vec<String> = (0..=n + 1)
            .map(|k| phi.moment(k).map(|m| format!("{m:+.3e}")))
            .collect::<lcgf::Result<_>>()?;
        println!("moment order {n}: moments 0..={} = [{}]", n + 1, moments.join(", "));
        let report = phi.dn_membership_report(n.max(1))?;
        println!(
            "  moments ok: {}, L1 = {:.4} (bound {:.4}), phi(0) = {:.6}",
            report.moments_ok, report.l1, report.l1_bound, phi.value(0.0)
        );
    }

    let phi = Mollifier::construct(2)?;
    for (x, y) in phi.sample(9) {
        println!("  phi({x:+.2}) = {y:.6}");
    }
    Ok(())
}
