//! Exhaustive demand-privacy check: every outcome of the scheme's
//! randomness is enumerated and view distributions are compared for all
//! demand vectors that agree on the observer's own demand. The de-randomized
//! baseline is included to show what a leak looks like.

use d2d_privcache::model::SystemParams;
use d2d_privcache::scheme_a::SchemeAParams;
use d2d_privcache::scheme_b::SchemeBParams;
use d2d_privcache::sim::Scheme;
use d2d_privcache::verify::{self, ExactOptions};

fn main() -> d2d_privcache::Result<()> {
    let base = SystemParams::new(2, 2, 1, 0)?;
    let n3 = SystemParams::new(2, 3, 1, 0)?;
    let cases = [
        ("A t=1", Scheme::A(SchemeAParams::new(base, 1)?)),
        ("A t=2", Scheme::A(SchemeAParams::new(base, 2)?)),
        (
            "A t=2 baseline",
            Scheme::A(SchemeAParams::new(base, 2)?.non_private()),
        ),
        ("B N=2 t'=1", Scheme::B(SchemeBParams::new(base, 1)?)),
        ("B N=3 t'=1", Scheme::B(SchemeBParams::new(n3, 1)?)),
    ];
    for (name, scheme) in cases {
        println!("{name}: {} randomness outcomes", scheme.outcome_count());
        for user in 1..=2 {
            let report = verify::check_privacy_exact(&scheme, &[user], ExactOptions::default())?;
            println!("  {report}");
        }
    }

    let paranoid = ExactOptions {
        paranoid: true,
        ..ExactOptions::default()
    };
    let scheme = Scheme::A(SchemeAParams::new(base, 2)?).fit_file_bits(1);
    println!(
        "with payloads and every library: {}",
        verify::check_privacy_exact(&scheme, &[1], paranoid)?
    );
    Ok(())
}
