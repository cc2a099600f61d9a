//! Writes a run to the text transcript format, reads it back, and decodes
//! from the parsed copy alone. A corrupted copy shows the decoder failing.

use d2d_privcache::model::{DemandVector, SystemParams, Transcript};
use d2d_privcache::scheme_b::SchemeBParams;
use d2d_privcache::sim::{self, Scheme};
use d2d_privcache::verify;

fn main() -> d2d_privcache::Result<()> {
    let scheme =
        Scheme::B(SchemeBParams::new(SystemParams::new(2, 3, 1, 11)?, 2)?).fit_file_bits(8);
    let d = DemandVector::new(vec![1, 3], scheme.params())?;
    let run = sim::run_protocol(&scheme, &d)?;
    let text = run.to_text();
    print!("{text}");

    let parsed = Transcript::from_text(&text)?;
    assert_eq!(parsed, run);
    println!(
        "\nparsed copy decodes: {:?}",
        verify::check_decodability(&parsed)?
    );
    println!(
        "metadata bytes (not counted in the load): {}",
        parsed.metadata_bytes()
    );

    let mut broken = parsed.clone();
    let payload = &mut broken.broadcasts[0][0].payload;
    let bit = payload.get(0);
    payload.set(0, !bit);
    println!(
        "after flipping one payload bit: {:?}",
        verify::check_decodability(&broken)?
    );
    Ok(())
}
