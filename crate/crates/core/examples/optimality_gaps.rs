//! Largest ratio between achievable loads and converse bounds over a grid
//! of memories, for several regimes.

use d2d_privcache::bounds;
use d2d_privcache::model::{fmt_decimal, fmt_rational, rat};

fn main() -> d2d_privcache::Result<()> {
    println!("two-user scheme vs two-user converse");
    for n in [2usize, 4, 8, 16, 32] {
        let g = bounds::gap_on_default_grid(
            &bounds::scheme_b_curve(n),
            &bounds::converse_two_user_curve(n),
            None,
            64,
        )?;
        println!(
            "  N={n:<3} ratio {} at M={}",
            fmt_decimal(&g.max_ratio, 6),
            fmt_rational(&g.argmax)
        );
    }

    println!("virtual-user scheme vs max(K-user converse, shared-link / 2)");
    for (k, n) in [(3usize, 6usize), (4, 8), (5, 25), (10, 40)] {
        let conv = bounds::converse_k_user_curve(k, n)?
            .pointwise_max(&bounds::shared_link_nonprivate_envelope(k, n, &rat(1, 2)))?;
        let g = bounds::gap_on_default_grid(&bounds::scheme_a_curve(k, n), &conv, None, 64)?;
        println!(
            "  K={k:<2} N={n:<3} ratio {} at M={}",
            fmt_decimal(&g.max_ratio, 6),
            fmt_rational(&g.argmax)
        );
    }

    println!("virtual-user scheme vs scaled shared-link converse, N < K");
    for (k, n) in [(8usize, 4usize), (40, 10)] {
        let f = bounds::shared_link_factor(k, n);
        let conv = bounds::shared_link_nonprivate_envelope(k, n, &f);
        let g = bounds::gap_on_default_grid(&bounds::scheme_a_curve(k, n), &conv, None, 64)?;
        println!(
            "  K={k:<2} N={n:<3} factor {} ratio {} at M={}",
            fmt_rational(&f),
            fmt_decimal(&g.max_ratio, 6),
            fmt_rational(&g.argmax)
        );
    }
    Ok(())
}
