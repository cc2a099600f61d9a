//! Prints the corner points of the achievable and converse curves for a
//! two-user system and for a larger one, with exact values.
//!
//! cargo run --example tradeoff_curves -- [N]

use d2d_privcache::bounds::{self, CAnchor};
use d2d_privcache::combinat::TradeoffCurve;
use d2d_privcache::model::{fmt_decimal, fmt_rational};

fn show(name: &str, c: &TradeoffCurve) {
    println!("{name}:");
    for (m, r) in c.corners() {
        println!(
            "  M={:<8} R={:<10} ({})",
            fmt_rational(m),
            fmt_rational(r),
            fmt_decimal(r, 6)
        );
    }
}

fn main() -> d2d_privcache::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    println!("K=2 N={n}");
    show("virtual-user scheme", &bounds::scheme_a_curve(2, n));
    show("two-user scheme", &bounds::scheme_b_curve(n));
    show(
        "coded placement",
        &bounds::scheme_c_curve(2, n, CAnchor::NOverK),
    );
    show("converse", &bounds::converse_two_user_curve(n));
    let [s1, s2] = bounds::two_user_optimal_segments(n);
    println!(
        "two-user scheme is exactly optimal on [{}, {}] and [{}, {}]",
        fmt_rational(&s1.0),
        fmt_rational(&s1.1),
        fmt_rational(&s2.0),
        fmt_rational(&s2.1)
    );

    println!("\nK=4 N=8");
    show("virtual-user scheme", &bounds::scheme_a_curve(4, 8));
    show("K-user converse", &bounds::converse_k_user_curve(4, 8)?);
    show(
        "shared-link bound scaled by 1/2",
        &bounds::shared_link_nonprivate_envelope(4, 8, &bounds::shared_link_factor(4, 8)),
    );
    Ok(())
}
