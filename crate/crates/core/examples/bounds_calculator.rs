//! Evaluate the characteristic-polynomial roots and every bound variant for
//! a fixed set of indicator values.

use dsaddle::bounds::{bounds_for, pi_roots, Variant};
use dsaddle::indicators::GammaIndicators;

fn main() -> dsaddle::Result<()> {
    let (a, r, k) = (1.639, 0.734, 0.251);
    let (mu_a, mu_b, mu_c) = pi_roots(a, r, k)?;
    println!("roots of pi({a}, {r}, {k}): {mu_a:.15} {mu_b:.15} {mu_c:.15}");

    let g = GammaIndicators::new((0.3, 1.5), (0.3, 1.8), (0.45, 1.6), (0.0, 0.4), (0.3, 1.2))?;
    for v in Variant::ALL {
        let g = if v.needs_zero_e() { GammaIndicators::e_zero(g.gamma_a, g.gamma_r, g.gamma_k)? } else { g };
        let b = bounds_for(v, &g, (1, 1))?;
        println!(
            "{:<18} [{:.4}, {:.4}] U [{:.4}, {:.4}]",
            v.name(),
            b.negative.lo,
            b.negative.hi,
            b.positive.lo,
            b.positive.hi
        );
    }
    Ok(())
}
