//! Sampled demand-privacy check for an instance too large to enumerate,
//! over every coalition of one or two users.
//!
//! cargo run --release --example privacy_monte_carlo -- [trials]

use d2d_privcache::model::SystemParams;
use d2d_privcache::scheme_a::SchemeAParams;
use d2d_privcache::sim::Scheme;
use d2d_privcache::verify;

fn main() -> d2d_privcache::Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000);
    let params = SchemeAParams::new(SystemParams::new(3, 2, 1, 0)?, 2)?;
    let coalitions = vec![
        vec![1],
        vec![2],
        vec![3],
        vec![1, 2],
        vec![1, 3],
        vec![2, 3],
    ];

    println!("private scheme, {trials} trials per demand vector");
    for r in verify::check_privacy_mc_many(&Scheme::A(params), &coalitions, trials, 0.05, 1)? {
        println!("  {r}");
    }
    println!("baseline with identity orders and fixed leaders");
    let baseline = Scheme::A(params.non_private());
    for r in verify::check_privacy_mc_many(&baseline, &coalitions[..3], trials.min(2_000), 0.05, 1)?
    {
        println!("  {r}");
    }
    Ok(())
}
