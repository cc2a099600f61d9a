//! The two-user scheme at every memory point for a chosen library size:
//! placement sizes, the cross/private split, and the measured load.
//!
//! cargo run --example simulate_scheme_b -- [N]

use d2d_privcache::model::{fmt_rational, DemandVector, SystemParams};
use d2d_privcache::scheme_b::{self, SchemeBParams};
use d2d_privcache::sim::{self, Scheme};
use d2d_privcache::verify;

fn main() -> d2d_privcache::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    for tp in 0..=n {
        let base = SystemParams::new(2, n, 1, 7)?;
        let params = if tp == n {
            SchemeBParams::full_memory(base)?
        } else {
            SchemeBParams::new(base, tp)?
        };
        let scheme = Scheme::B(params).fit_file_bits(48);
        let Scheme::B(params) = scheme else {
            unreachable!()
        };
        let (m, r) = scheme.point();
        let mut worst = d2d_privcache::rat(0, 1);
        let mut all_ok = true;
        for d in DemandVector::all(scheme.params()) {
            let run = sim::run_protocol(&scheme, &d)?;
            all_ok &= verify::check_decodability(&run)?.iter().all(|&x| x);
            worst = worst.max(sim::measure_load(&run));
        }
        if params.is_full_memory() {
            println!(
                "t'={tp}: full memory, M={} R=0 decoded={all_ok}",
                fmt_rational(&m)
            );
            continue;
        }
        println!(
            "t'={tp}: half={} cross={} M={} R={} measured={} decoded={all_ok}",
            params.half_size(),
            params.cross_size(),
            fmt_rational(&m),
            fmt_rational(&r),
            fmt_rational(&worst)
        );
    }
    println!("\nchord weights placing the virtual-user points on the two-user curve:");
    for t in 1..=n {
        println!(
            "  t={t}: alpha={}",
            fmt_rational(&scheme_b::dominance_alpha(n, t))
        );
    }
    Ok(())
}
