//! The trusted-server protocol engine.
//!
//! A run goes through the two phases of the model: placement fills every
//! cache, then the server collects the demands, computes one query per user
//! from the placement metadata alone, and each user turns its query into
//! broadcasts using nothing but its own cache.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{
    rat_int, Bits, CacheState, DemandVector, Library, MulticastMessage, Query, Rational, SchemeTag,
    SubfileId, SystemParams, Transcript,
};
use crate::rng::random_library;
use crate::scheme_a::{self, DeliveryPlanA, PlacementA, RandomnessA, SchemeAParams};
use crate::scheme_b::{self, PlacementB, RandomnessB, SchemeBParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    A(SchemeAParams),
    B(SchemeBParams),
}

/// One outcome of all the randomness a scheme consumes, library excluded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Randomness {
    A(RandomnessA),
    B(RandomnessB),
}

/// What the server computes centrally: who caches which slots, and the
/// query for every user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolPlan {
    pub cache_slots: Vec<BTreeSet<SubfileId>>,
    pub queries: Vec<Query>,
}

impl Scheme {
    pub fn params(&self) -> &SystemParams {
        match self {
            Scheme::A(p) => &p.base,
            Scheme::B(p) => &p.base,
        }
    }

    pub fn tag(&self) -> SchemeTag {
        match self {
            Scheme::A(p) => SchemeTag::A { t: p.t },
            Scheme::B(p) => SchemeTag::B { tprime: p.tprime },
        }
    }

    pub fn from_tag(tag: SchemeTag, base: SystemParams) -> Result<Scheme> {
        match tag {
            SchemeTag::A { t } => Ok(Scheme::A(SchemeAParams::new(base, t)?)),
            SchemeTag::B { tprime } if tprime == base.files => {
                Ok(Scheme::B(SchemeBParams::full_memory(base)?))
            }
            SchemeTag::B { tprime } => Ok(Scheme::B(SchemeBParams::new(base, tprime)?)),
        }
    }

    pub fn subpacketization(&self) -> u64 {
        match self {
            Scheme::A(p) => p.subpacketization(),
            Scheme::B(p) => p.subpacketization(),
        }
    }

    pub fn subfile_bits(&self) -> usize {
        match self {
            Scheme::A(p) => p.subfile_bits(),
            Scheme::B(p) => p.subfile_bits(),
        }
    }

    /// Copy of the scheme with `B` fitted to the subpacketization.
    pub fn fit_file_bits(self, target: u64) -> Scheme {
        match self {
            Scheme::A(p) => Scheme::A(p.fit_file_bits(target)),
            Scheme::B(p) => Scheme::B(p.fit_file_bits(target)),
        }
    }

    pub fn with_seed(self, seed: u64) -> Scheme {
        match self {
            Scheme::A(mut p) => {
                p.base.seed = seed;
                Scheme::A(p)
            }
            Scheme::B(mut p) => {
                p.base.seed = seed;
                Scheme::B(p)
            }
        }
    }

    /// Closed-form `(M, R)` for this parameter choice.
    pub fn point(&self) -> (Rational, Rational) {
        match self {
            Scheme::A(p) => p.point(),
            Scheme::B(p) => p.point(),
        }
    }

    /// Placement block (transmitter block or file half) of a slot.
    pub fn block_of(&self, slot: usize) -> usize {
        match self {
            Scheme::A(p) => p.block_of(slot),
            Scheme::B(p) => p.block_of(slot),
        }
    }

    pub fn draw_randomness(&self, seed: u64) -> Randomness {
        match self {
            Scheme::A(p) => Randomness::A(RandomnessA::draw(p, seed)),
            Scheme::B(p) => Randomness::B(RandomnessB::draw(p, seed)),
        }
    }

    pub fn outcome_count(&self) -> BigInt {
        match self {
            Scheme::A(p) => RandomnessA::outcome_count(p),
            Scheme::B(p) => RandomnessB::outcome_count(p),
        }
    }

    pub fn enumerate_randomness(&self, cap: u64) -> Result<Box<dyn Iterator<Item = Randomness>>> {
        Ok(match self {
            Scheme::A(p) => Box::new(RandomnessA::enumerate(p, cap)?.map(Randomness::A)),
            Scheme::B(p) => Box::new(RandomnessB::enumerate(p, cap)?.map(Randomness::B)),
        })
    }

    /// The server's work: placement metadata and one query per user.
    pub fn plan(&self, demands: &DemandVector, randomness: &Randomness) -> ProtocolPlan {
        match (self, randomness) {
            (Scheme::A(p), Randomness::A(r)) => {
                let placement = PlacementA::new(p, r);
                let queries = (1..=p.users())
                    .map(|k| Query {
                        recipient: k,
                        plan: DeliveryPlanA::new(k, demands, p, r).messages(&placement),
                    })
                    .collect();
                ProtocolPlan {
                    cache_slots: placement.cache_slots,
                    queries,
                }
            }
            (Scheme::B(p), Randomness::B(r)) => {
                let placement = PlacementB::new(p, r);
                let queries = (1..=2)
                    .map(|k| Query {
                        recipient: k,
                        plan: scheme_b::plan_b(k, demands, &placement),
                    })
                    .collect();
                ProtocolPlan {
                    cache_slots: placement.cache_slots,
                    queries,
                }
            }
            _ => panic!("randomness does not belong to this scheme"),
        }
    }

    /// Runs the decoder of `user` against a transcript.
    pub fn decode(&self, transcript: &Transcript, user: usize) -> Result<Bits> {
        let cache = transcript.cache(user);
        let demand = transcript.demands.of(user);
        match self {
            Scheme::A(p) => scheme_a::decode_a(user, &transcript.broadcasts, cache, demand, p),
            Scheme::B(p) => {
                scheme_b::decode_b(user, &transcript.broadcasts[2 - user], cache, demand, p)
            }
        }
    }

    fn validate(&self, demands: &DemandVector) -> Result<DemandVector> {
        self.params().check_divisible(self.subpacketization())?;
        DemandVector::new(demands.as_slice().to_vec(), self.params())
    }
}

/// In-process broadcast medium: every message sent is heard by all users.
#[derive(Debug, Default)]
pub struct BroadcastChannel {
    log: Vec<Vec<MulticastMessage>>,
}

impl BroadcastChannel {
    pub fn new(users: usize) -> Self {
        BroadcastChannel {
            log: vec![Vec::new(); users],
        }
    }

    pub fn send(&mut self, message: MulticastMessage) {
        self.log[message.sender - 1].push(message);
    }

    pub fn into_broadcasts(self) -> Vec<Vec<MulticastMessage>> {
        self.log
    }
}

/// A user's side of delivery: XOR the cached subfiles its query names.
pub fn user_broadcast(
    cache: &CacheState,
    query: &Query,
    subfile_bits: usize,
) -> Result<Vec<MulticastMessage>> {
    query
        .plan
        .iter()
        .map(|m| {
            let mut payload = Bits::zeros(subfile_bits);
            for id in &m.composition {
                let piece = cache.get(id).ok_or(Error::EncodingViolation {
                    user: cache.owner,
                    file: id.file,
                    slot: id.slot,
                })?;
                payload.xor_assign(piece);
            }
            Ok(MulticastMessage {
                sender: cache.owner,
                header: m.header.clone(),
                composition: m.composition.clone(),
                payload,
            })
        })
        .collect()
}

/// Full run with randomness and library drawn from the instance seed.
pub fn run_protocol(scheme: &Scheme, demands: &DemandVector) -> Result<Transcript> {
    let demands = scheme.validate(demands)?;
    let randomness = scheme.draw_randomness(scheme.params().seed);
    let library = random_library(scheme.params());
    run_with(scheme, &demands, &randomness, library)
}

/// Full run with explicit randomness and library.
pub fn run_with(
    scheme: &Scheme,
    demands: &DemandVector,
    randomness: &Randomness,
    library: Library,
) -> Result<Transcript> {
    let demands = scheme.validate(demands)?;
    let params = *scheme.params();
    let sb = scheme.subfile_bits();
    let plan = scheme.plan(&demands, randomness);
    let caches: Vec<CacheState> = plan
        .cache_slots
        .iter()
        .enumerate()
        .map(|(u, slots)| CacheState::fill(u + 1, slots.iter().copied(), &library, sb))
        .collect();
    let mut channel = BroadcastChannel::new(params.users);
    for (cache, query) in caches.iter().zip(&plan.queries) {
        for m in user_broadcast(cache, query, sb)? {
            channel.send(m);
        }
    }
    let broadcasts = channel.into_broadcasts();
    let payload_bits = broadcasts
        .iter()
        .flatten()
        .map(|m| m.payload.len() as u64)
        .sum();
    Ok(Transcript {
        scheme: scheme.tag(),
        params,
        memory_point: scheme.point().0,
        subfile_bits: sb,
        library,
        caches,
        demands,
        queries: plan.queries,
        broadcasts,
        payload_bits,
    })
}

/// `payload_bits / B`; metadata is not counted.
pub fn measure_load(transcript: &Transcript) -> Rational {
    rat_int(transcript.payload_bits) / rat_int(transcript.params.file_bits)
}

/// Largest cache divided by `B`.
pub fn measure_memory(transcript: &Transcript) -> Rational {
    let most = transcript
        .caches
        .iter()
        .map(CacheState::total_bits)
        .max()
        .unwrap_or(0);
    rat_int(most) / rat_int(transcript.params.file_bits)
}

/// Re-runs every user's broadcast step from its cache and query alone and
/// compares with what the transcript recorded.
pub fn check_encoding(transcript: &Transcript) -> Result<bool> {
    for (cache, query) in transcript.caches.iter().zip(&transcript.queries) {
        let again = user_broadcast(cache, query, transcript.subfile_bits)?;
        if again != transcript.broadcasts[cache.owner - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every payload equals the XOR of the library subfiles it names.
pub fn payloads_consistent(transcript: &Transcript) -> bool {
    transcript
        .all_messages()
        .all(|m| m.expected_payload(&transcript.library, transcript.subfile_bits) == m.payload)
}
