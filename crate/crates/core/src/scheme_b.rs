//! The redundancy-free two-user scheme.
//!
//! Each file is cut into two halves; user `k` stores all of half `k` and a
//! secret, randomly placed fraction of the other half. Every transmitted
//! XOR has the same shape whatever the other user wants, which is what keeps
//! the demand hidden.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::combinat::{
    binom_u64, enumerate_permutations, factorial, lex_subsets, uniform_permutation,
};
use crate::decode::{peel, Equation};
use crate::error::{Error, Result};
use crate::model::{
    rat_int, Bits, CacheState, DemandVector, Library, MulticastMessage, PlannedMessage, Rational,
    SubfileId, SystemParams,
};
use crate::rng::{random_library, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeBParams {
    pub base: SystemParams,
    /// `t'` in `[0, N-1]`, or `N` for the full-memory endpoint.
    pub tprime: usize,
}

impl SchemeBParams {
    pub fn new(base: SystemParams, tprime: usize) -> Result<Self> {
        if base.users != 2 {
            return Err(Error::params(format!(
                "the two-user scheme needs K = 2, got K={}",
                base.users
            )));
        }
        if tprime >= base.files {
            return Err(Error::params(format!(
                "t' must lie in [0, {}], got {tprime}",
                base.files - 1
            )));
        }
        Ok(SchemeBParams { base, tprime })
    }

    /// The `(N, 0)` point: both users cache everything and nothing is sent.
    pub fn full_memory(base: SystemParams) -> Result<Self> {
        if base.users != 2 {
            return Err(Error::params(format!(
                "the two-user scheme needs K = 2, got K={}",
                base.users
            )));
        }
        Ok(SchemeBParams {
            base,
            tprime: base.files,
        })
    }

    pub fn is_full_memory(&self) -> bool {
        self.tprime == self.base.files
    }

    pub fn fit_file_bits(mut self, target: u64) -> Self {
        self.base.file_bits = SystemParams::fitted_file_bits(self.subpacketization(), target);
        self
    }

    pub fn files(&self) -> usize {
        self.base.files
    }

    /// Slots per half, `binom(N-1,t') + binom(N-2,t'-1)`.
    pub fn half_size(&self) -> usize {
        if self.is_full_memory() {
            return 1;
        }
        let (n, t) = (self.base.files as i64, self.tprime as i64);
        (binom_u64(n - 1, t) + binom_u64(n - 2, t - 1)) as usize
    }

    /// Slots of each half also cached by the other user, `binom(N-2,t'-1)`.
    pub fn cross_size(&self) -> usize {
        if self.is_full_memory() {
            return 1;
        }
        let (n, t) = (self.base.files as i64, self.tprime as i64);
        binom_u64(n - 2, t - 1) as usize
    }

    pub fn subpacketization(&self) -> u64 {
        2 * self.half_size() as u64
    }

    pub fn subfile_bits(&self) -> usize {
        (self.base.file_bits / self.subpacketization()) as usize
    }

    /// Half a slot belongs to.
    pub fn block_of(&self, slot: usize) -> usize {
        (slot - 1) / self.half_size() + 1
    }

    pub fn point(&self) -> (Rational, Rational) {
        if self.is_full_memory() {
            return (rat_int(self.base.files as u64), rat_int(0u32));
        }
        load_b_point(self.base.files, self.tprime).expect("validated")
    }
}

/// `placement[i-1][k-1]` is `p_{i,k}`, a permutation of `1..=H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomnessB {
    pub placement: Vec<Vec<Vec<usize>>>,
}

impl RandomnessB {
    pub fn draw(params: &SchemeBParams, seed: u64) -> Self {
        let h = params.half_size();
        RandomnessB {
            placement: (1..=params.files())
                .map(|i| {
                    (1..=2)
                        .map(|k| {
                            uniform_permutation(h, &mut seeded_rng(seed, format!("p/{i}/{k}")))
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn outcome_count(params: &SchemeBParams) -> BigInt {
        num_traits::pow(factorial(params.half_size() as u64), 2 * params.files())
    }

    pub fn enumerate(
        params: &SchemeBParams,
        cap: u64,
    ) -> Result<impl Iterator<Item = RandomnessB>> {
        let total = Self::outcome_count(params);
        if total > BigInt::from(cap) {
            return Err(Error::InstanceTooLarge {
                outcomes: total.to_string(),
                cap,
            });
        }
        let total = total.to_u64().expect("below cap");
        let perms = enumerate_permutations(params.half_size(), cap)?;
        let n_n = params.files();
        Ok((0..total).map(move |mut idx| {
            let mut digit = || {
                let d = (idx % perms.len() as u64) as usize;
                idx /= perms.len() as u64;
                d
            };
            RandomnessB {
                placement: (0..n_n)
                    .map(|_| (0..2).map(|_| perms[digit()].clone()).collect())
                    .collect(),
            }
        }))
    }
}

#[derive(Debug, Clone)]
pub struct PlacementB {
    pub params: SchemeBParams,
    /// `order[i-1][k-1][j-1]` is the slot of `S^k_{i,j}` in permuted order.
    order: Vec<Vec<Vec<SubfileId>>>,
    pub cache_slots: Vec<BTreeSet<SubfileId>>,
}

impl PlacementB {
    pub fn new(params: &SchemeBParams, randomness: &RandomnessB) -> Self {
        let (h, c) = (params.half_size(), params.cross_size());
        let mut cache_slots = vec![BTreeSet::new(); 2];
        let order: Vec<Vec<Vec<SubfileId>>> = (1..=params.files())
            .map(|i| {
                (1..=2)
                    .map(|k| {
                        randomness.placement[i - 1][k - 1]
                            .iter()
                            .map(|&p| SubfileId::new(i, (k - 1) * h + p))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for half in order
            .iter()
            .flat_map(|per_file| per_file.iter().enumerate())
        {
            let (k0, slots) = half;
            cache_slots[k0].extend(slots.iter().copied());
            cache_slots[1 - k0].extend(slots[..c].iter().copied());
        }
        PlacementB {
            params: *params,
            order,
            cache_slots,
        }
    }

    /// Slots of half `k` of file `i` that the other user also caches.
    pub fn cross_block(&self, file: usize, k: usize) -> &[SubfileId] {
        &self.order[file - 1][k - 1][..self.params.cross_size()]
    }

    /// Slots of half `k` of file `i` cached by user `k` alone.
    pub fn private_block(&self, file: usize, k: usize) -> &[SubfileId] {
        &self.order[file - 1][k - 1][self.params.cross_size()..]
    }

    pub fn caches(&self, library: &Library) -> Vec<CacheState> {
        let sb = self.params.subfile_bits();
        self.cache_slots
            .iter()
            .enumerate()
            .map(|(u, slots)| CacheState::fill(u + 1, slots.iter().copied(), library, sb))
            .collect()
    }
}

pub fn place_b(params: &SchemeBParams) -> Result<(PlacementB, Library)> {
    params.base.check_divisible(params.subpacketization())?;
    let r = RandomnessB::draw(params, params.base.seed);
    Ok((PlacementB::new(params, &r), random_library(&params.base)))
}

/// Message metadata of transmitter `k`: one XOR per `(t'+1)`-subset of files.
pub fn plan_b(k: usize, demands: &DemandVector, placement: &PlacementB) -> Vec<PlannedMessage> {
    let params = &placement.params;
    if params.is_full_memory() {
        return Vec::new();
    }
    let n_n = params.files();
    let wanted = demands.of(3 - k);
    let mut next_cross = vec![0usize; n_n + 1];
    let mut next_private = vec![0usize; n_n + 1];
    let files: Vec<usize> = (1..=n_n).collect();
    let mut out = Vec::new();
    for s in lex_subsets(&files, params.tprime + 1) {
        let serve = s.contains(&wanted);
        let composition = s
            .iter()
            .map(|&i| {
                let (block, next) = if serve && i != wanted {
                    (placement.cross_block(i, k), &mut next_cross[i])
                } else {
                    (placement.private_block(i, k), &mut next_private[i])
                };
                let id = *block.get(*next).unwrap_or_else(|| {
                    panic!("pick rule ran out of slots for file {i} at subset {s:?}")
                });
                *next += 1;
                id
            })
            .collect();
        out.push(PlannedMessage {
            header: s,
            composition,
        });
    }
    out
}

/// Both transmissions, with payloads taken from the library.
pub fn deliver_b(
    demands: &DemandVector,
    placement: &PlacementB,
    library: &Library,
) -> (Vec<MulticastMessage>, Vec<MulticastMessage>) {
    let sb = placement.params.subfile_bits();
    let build = |k: usize| {
        plan_b(k, demands, placement)
            .into_iter()
            .map(|m| {
                let mut payload = Bits::zeros(sb);
                for id in &m.composition {
                    payload.xor_assign(&library.subfile(*id, sb));
                }
                MulticastMessage {
                    sender: k,
                    header: m.header,
                    composition: m.composition,
                    payload,
                }
            })
            .collect()
    };
    (build(1), build(2))
}

pub fn decode_b(
    user: usize,
    other: &[MulticastMessage],
    cache: &CacheState,
    demand: usize,
    params: &SchemeBParams,
) -> Result<Bits> {
    let equations: Vec<Equation> = other
        .iter()
        .map(|m| Equation {
            ids: m.composition.iter().copied().collect(),
            payload: m.payload.clone(),
        })
        .collect();
    peel(
        user,
        demand,
        params.subpacketization() as usize,
        cache,
        &equations,
    )
}

/// `(N/2 + N t'/(2(N+t'-1)), N(N-1)/((t'+1)(N+t'-1)))`.
pub fn load_b_point(files: usize, tprime: usize) -> Result<(Rational, Rational)> {
    if tprime >= files {
        return Err(Error::params(format!(
            "t' must lie in [0, {}], got {tprime}",
            files - 1
        )));
    }
    let (n, t) = (files as i64, tprime as i64);
    let m = Rational::new(BigInt::from(n), BigInt::from(2))
        + Rational::new(BigInt::from(n * t), BigInt::from(2 * (n + t - 1)));
    let r = Rational::new(
        BigInt::from(n * (n - 1)),
        BigInt::from((t + 1) * (n + t - 1)),
    );
    Ok((m, r))
}

/// All points for `t'` in `[0, N-1]` followed by `(N, 0)`.
pub fn load_b_points(files: usize) -> Vec<(Rational, Rational)> {
    let mut pts: Vec<_> = (0..files)
        .map(|t| load_b_point(files, t).expect("in range"))
        .collect();
    pts.push((rat_int(files as u64), rat_int(0u32)));
    pts
}

/// Memory-sharing weight that puts the virtual-user point at parameter `t`
/// on the chord from the `t' = t-1` point to `(N, 0)`.
pub fn dominance_alpha(files: usize, t: usize) -> Rational {
    let (n, tp) = (files as i64, t as i64 - 1);
    Rational::new(
        BigInt::from((n + tp - 1) * (n - tp)),
        BigInt::from(n * (n - 1)),
    )
}
