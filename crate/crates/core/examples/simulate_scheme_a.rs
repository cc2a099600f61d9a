//! Runs the virtual-user scheme on every demand vector of a small system
//! and prints what each user sends, what it costs, and whether every user
//! recovered its file.
//!
//! cargo run --example simulate_scheme_a -- [K] [N] [t]

use d2d_privcache::model::{fmt_rational, DemandVector, SystemParams};
use d2d_privcache::scheme_a::SchemeAParams;
use d2d_privcache::sim::{self, Scheme};
use d2d_privcache::verify;

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> d2d_privcache::Result<()> {
    let (k, n, t) = (arg(1, 3), arg(2, 2), arg(3, 2));
    let base = SystemParams::new(k, n, 1, 2024)?;
    let params = SchemeAParams::new(base, t)?.fit_file_bits(64);
    let scheme = Scheme::A(params);
    let (m, r) = scheme.point();
    println!(
        "K={k} N={n} t={t}: {} virtual users, {} subfiles per file of {} bits",
        params.virtual_users(),
        params.subpacketization(),
        params.subfile_bits()
    );
    println!(
        "memory point M={} load R={}",
        fmt_rational(&m),
        fmt_rational(&r)
    );

    for d in DemandVector::all(scheme.params()) {
        let run = sim::run_protocol(&scheme, &d)?;
        let ok = verify::check_decodability(&run)?;
        println!(
            "d=({d}) messages={} load={} decoded={:?}",
            run.message_count(),
            fmt_rational(&sim::measure_load(&run)),
            ok
        );
    }

    let d = DemandVector::new(vec![1; k], scheme.params())?;
    let run = sim::run_protocol(&scheme, &d)?;
    println!("\nbroadcasts for d=({d}):");
    for m in run.all_messages() {
        let comp: Vec<String> = m.composition.iter().map(ToString::to_string).collect();
        println!(
            "  user {} header {:?}: {}",
            m.sender,
            m.header,
            comp.join(" ^ ")
        );
    }
    Ok(())
}
