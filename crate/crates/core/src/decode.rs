use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Bits, CacheState, SubfileId};

/// A known linear relation: the XOR of `ids` equals `payload`.
#[derive(Debug, Clone)]
pub(crate) struct Equation {
    pub ids: BTreeSet<SubfileId>,
    pub payload: Bits,
}

/// Repeatedly solves equations with exactly one unknown subfile of
/// `want_file`, then assembles that file from cache and recovered pieces.
pub(crate) fn peel(
    user: usize,
    want_file: usize,
    slots: usize,
    cache: &CacheState,
    equations: &[Equation],
) -> Result<Bits> {
    let mut recovered: BTreeMap<SubfileId, Bits> = BTreeMap::new();
    let mut done = vec![false; equations.len()];
    loop {
        let mut progress = false;
        for (eq, used) in equations.iter().zip(done.iter_mut()) {
            if *used {
                continue;
            }
            let unknown: Vec<&SubfileId> = eq
                .ids
                .iter()
                .filter(|id| !cache.contains(id) && !recovered.contains_key(id))
                .collect();
            match unknown.as_slice() {
                [] => *used = true,
                [target] if target.file == want_file => {
                    let target = **target;
                    let mut acc = eq.payload.clone();
                    for id in eq.ids.iter().filter(|id| **id != target) {
                        let known = cache.get(id).or_else(|| recovered.get(id)).expect("known");
                        acc.xor_assign(known);
                    }
                    recovered.insert(target, acc);
                    *used = true;
                    progress = true;
                }
                _ => {}
            }
        }
        if !progress {
            break;
        }
    }
    let mut out = Bits::default();
    for slot in 1..=slots {
        let id = SubfileId::new(want_file, slot);
        let piece =
            cache
                .get(&id)
                .or_else(|| recovered.get(&id))
                .ok_or(Error::DecodingFailure {
                    user,
                    file: want_file,
                    slot,
                })?;
        out.extend(piece);
    }
    Ok(out)
}
