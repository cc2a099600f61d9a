//! The virtual-user scheme for any `K >= 2`.
//!
//! Every transmitter `k` pretends to serve `U = (K-1)N` effective users: the
//! other `K-1` real users plus `(K-1)(N-1)` virtual ones whose demands are
//! chosen so that each file is wanted by exactly `K-1` of them. A secret
//! permutation `q_k` hides which position belongs to which effective user,
//! and only messages touching one leader per file are sent.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::combinat::{
    binom, binom_u64, enumerate_permutations, factorial, lex_subsets, uniform_permutation,
};
use crate::decode::{peel, Equation};
use crate::error::{Error, Result};
use crate::model::{
    rat_int, Bits, CacheState, DemandVector, Library, MulticastMessage, PlannedMessage, Rational,
    SubfileId, SystemParams,
};
use crate::rng::{random_library, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeAParams {
    pub base: SystemParams,
    pub t: usize,
    private: bool,
}

impl SchemeAParams {
    pub fn new(base: SystemParams, t: usize) -> Result<Self> {
        let u = (base.users - 1) * base.files;
        if t < 1 || t > u + 1 {
            return Err(Error::params(format!(
                "t must lie in [1, {}], got {t}",
                u + 1
            )));
        }
        Ok(SchemeAParams {
            base,
            t,
            private: true,
        })
    }

    /// The de-randomized variant: `q_k` is the identity and every leader is
    /// the lowest-index demander. Used as a negative control for privacy.
    pub fn non_private(mut self) -> Self {
        self.private = false;
        self
    }

    pub fn is_private(&self) -> bool {
        self.private
    }

    /// Sets `B` to the smallest multiple of the subpacketization that is at
    /// least `target` bits.
    pub fn fit_file_bits(mut self, target: u64) -> Self {
        self.base.file_bits = SystemParams::fitted_file_bits(self.subpacketization(), target);
        self
    }

    pub fn users(&self) -> usize {
        self.base.users
    }

    pub fn files(&self) -> usize {
        self.base.files
    }

    /// `U = (K-1)N`.
    pub fn virtual_users(&self) -> usize {
        (self.base.users - 1) * self.base.files
    }

    /// Slots per transmitter block, `binom(U, t-1)`.
    pub fn block_size(&self) -> usize {
        binom_u64(self.virtual_users() as i64, self.t as i64 - 1) as usize
    }

    pub fn subpacketization(&self) -> u64 {
        (self.base.users * self.block_size()) as u64
    }

    pub fn subfile_bits(&self) -> usize {
        (self.base.file_bits / self.subpacketization()) as usize
    }

    /// Transmitter block a slot belongs to.
    pub fn block_of(&self, slot: usize) -> usize {
        (slot - 1) / self.block_size() + 1
    }

    /// Effective users seen by transmitter `k`, ascending.
    pub fn effective_users(&self, k: usize) -> Vec<usize> {
        let top = (self.base.users - 1) * (self.base.files - 1) + self.base.users;
        (1..=top).filter(|&u| u != k).collect()
    }

    pub fn point(&self) -> (Rational, Rational) {
        load_a_point(self.base.users, self.base.files, self.t).expect("validated")
    }
}

/// All random choices of one run. Indices are 1-based inside permutations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomnessA {
    /// `placement[i-1][k-1]` is `p_{i,k}`, a permutation of `1..=binom(U,t-1)`.
    pub placement: Vec<Vec<Vec<usize>>>,
    /// `order[k-1]` is `q_k` as a permutation of `1..=U` over the ascending
    /// effective users of `k`.
    pub order: Vec<Vec<usize>>,
    /// `leaders[k-1][i-1]` picks among the ascending demanders of file `i`.
    pub leaders: Vec<Vec<usize>>,
}

impl RandomnessA {
    pub fn draw(params: &SchemeAParams, seed: u64) -> Self {
        let (k_n, n_n) = (params.users(), params.files());
        let c = params.block_size();
        let u = params.virtual_users();
        let placement = (1..=n_n)
            .map(|i| {
                (1..=k_n)
                    .map(|k| uniform_permutation(c, &mut seeded_rng(seed, format!("p/{i}/{k}"))))
                    .collect()
            })
            .collect();
        if !params.private {
            return RandomnessA {
                placement,
                order: vec![(1..=u).collect(); k_n],
                leaders: vec![vec![0; n_n]; k_n],
            };
        }
        let order = (1..=k_n)
            .map(|k| uniform_permutation(u, &mut seeded_rng(seed, format!("q/{k}"))))
            .collect();
        let leaders = (1..=k_n)
            .map(|k| {
                (1..=n_n)
                    .map(|i| {
                        use rand::Rng;
                        seeded_rng(seed, format!("l/{k}/{i}")).random_range(0..k_n - 1)
                    })
                    .collect()
            })
            .collect();
        RandomnessA {
            placement,
            order,
            leaders,
        }
    }

    /// Number of equiprobable outcomes.
    pub fn outcome_count(params: &SchemeAParams) -> BigInt {
        let (k_n, n_n) = (params.users() as u32, params.files() as u32);
        let mut total =
            num_traits::pow(factorial(params.block_size() as u64), (k_n * n_n) as usize);
        if params.private {
            total *= num_traits::pow(factorial(params.virtual_users() as u64), k_n as usize);
            total *= num_traits::pow(BigInt::from(k_n - 1), (k_n * n_n) as usize);
        }
        total
    }

    /// Every outcome, each exactly once, refusing beyond `cap` outcomes.
    pub fn enumerate(
        params: &SchemeAParams,
        cap: u64,
    ) -> Result<impl Iterator<Item = RandomnessA>> {
        let total = Self::outcome_count(params);
        if total > BigInt::from(cap) {
            return Err(Error::InstanceTooLarge {
                outcomes: total.to_string(),
                cap,
            });
        }
        let total = total.to_u64().expect("below cap");
        let (k_n, n_n) = (params.users(), params.files());
        let slot_perms = enumerate_permutations(params.block_size(), cap)?;
        let order_perms = if params.private {
            enumerate_permutations(params.virtual_users(), cap)?
        } else {
            Vec::new()
        };
        let u = params.virtual_users();
        let private = params.private;
        Ok((0..total).map(move |mut idx| {
            let mut digit = |radix: usize| {
                let d = (idx % radix as u64) as usize;
                idx /= radix as u64;
                d
            };
            let placement = (0..n_n)
                .map(|_| {
                    (0..k_n)
                        .map(|_| slot_perms[digit(slot_perms.len())].clone())
                        .collect()
                })
                .collect();
            if !private {
                return RandomnessA {
                    placement,
                    order: vec![(1..=u).collect(); k_n],
                    leaders: vec![vec![0; n_n]; k_n],
                };
            }
            let order = (0..k_n)
                .map(|_| order_perms[digit(order_perms.len())].clone())
                .collect();
            let leaders = (0..k_n)
                .map(|_| (0..n_n).map(|_| digit(k_n - 1)).collect())
                .collect();
            RandomnessA {
                placement,
                order,
                leaders,
            }
        }))
    }
}

/// Placement metadata: which slot realizes `f^k_{i,W}` and who caches what.
#[derive(Debug, Clone)]
pub struct PlacementA {
    pub params: SchemeAParams,
    /// `assoc[k-1][(i, W)]` is the slot holding `f^k_{i,W}`.
    assoc: Vec<HashMap<(usize, Vec<usize>), SubfileId>>,
    /// Cached slots of each user.
    pub cache_slots: Vec<BTreeSet<SubfileId>>,
}

impl PlacementA {
    pub fn new(params: &SchemeAParams, randomness: &RandomnessA) -> Self {
        let k_n = params.users();
        let c = params.block_size();
        let mut assoc = vec![HashMap::new(); k_n];
        let mut cache_slots = vec![BTreeSet::new(); k_n];
        for k in 1..=k_n {
            let groups = lex_subsets(&params.effective_users(k), params.t - 1);
            debug_assert_eq!(groups.len(), c);
            for i in 1..=params.files() {
                let perm = &randomness.placement[i - 1][k - 1];
                for (j, w) in groups.iter().enumerate() {
                    let id = SubfileId::new(i, (k - 1) * c + perm[j]);
                    cache_slots[k - 1].insert(id);
                    for &u in w.iter().filter(|&&u| u <= k_n) {
                        cache_slots[u - 1].insert(id);
                    }
                    assoc[k - 1].insert((i, w.clone()), id);
                }
            }
        }
        PlacementA {
            params: *params,
            assoc,
            cache_slots,
        }
    }

    /// The slot of `f^k_{i,W}`; `w` must be sorted.
    pub fn subfile(&self, k: usize, file: usize, w: &[usize]) -> SubfileId {
        self.assoc[k - 1][&(file, w.to_vec())]
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

/// Draws the randomness from the run seed, builds the placement and the library.
pub fn place_a(params: &SchemeAParams) -> Result<(PlacementA, Library)> {
    params.base.check_divisible(params.subpacketization())?;
    let r = RandomnessA::draw(params, params.base.seed);
    Ok((PlacementA::new(params, &r), random_library(&params.base)))
}

/// The effective demand of every effective user of transmitter `k`.
pub fn assign_virtual_demands(
    k: usize,
    demands: &DemandVector,
    params: &SchemeAParams,
) -> BTreeMap<usize, usize> {
    let (k_n, n_n) = (params.users(), params.files());
    let mut map = BTreeMap::new();
    let mut n = vec![0usize; n_n + 1];
    for u in (1..=k_n).filter(|&u| u != k) {
        map.insert(u, demands.of(u));
        n[demands.of(u)] += 1;
    }
    let mut before = 0;
    for (i, &n_i) in n.iter().enumerate().skip(1) {
        // virtual users 1+K+(i-1)(K-1)-sum_{q<i} n_q ..= K+i(K-1)-sum_{q<=i} n_q
        let lo = 1 + k_n + (i - 1) * (k_n - 1) - before;
        before += n_i;
        let hi = k_n + i * (k_n - 1) - before;
        for v in lo..=hi {
            map.insert(v, i);
        }
    }
    let mut count = vec![0usize; n_n + 1];
    for &f in map.values() {
        count[f] += 1;
    }
    assert!(
        count[1..].iter().all(|&c| c == k_n - 1),
        "virtual demand assignment must give every file K-1 demanders, got {:?}",
        &count[1..]
    );
    assert_eq!(
        map.keys().copied().collect::<Vec<_>>(),
        params.effective_users(k)
    );
    map
}

/// What the server decides for one transmitter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryPlanA {
    pub transmitter: usize,
    pub demands: BTreeMap<usize, usize>,
    /// `leaders[i-1]` is the leader of file `i`.
    pub leaders: Vec<usize>,
    /// `order[j-1]` is the effective user at position `j`.
    pub order: Vec<usize>,
}

impl DeliveryPlanA {
    pub fn new(
        k: usize,
        demands: &DemandVector,
        params: &SchemeAParams,
        randomness: &RandomnessA,
    ) -> Self {
        let eff = assign_virtual_demands(k, demands, params);
        let users = params.effective_users(k);
        let order = randomness.order[k - 1]
            .iter()
            .map(|&j| users[j - 1])
            .collect();
        let leaders = (1..=params.files())
            .map(|i| {
                let demanders: Vec<usize> = eff
                    .iter()
                    .filter(|(_, &f)| f == i)
                    .map(|(&u, _)| u)
                    .collect();
                demanders[randomness.leaders[k - 1][i - 1]]
            })
            .collect();
        DeliveryPlanA {
            transmitter: k,
            demands: eff,
            leaders,
            order,
        }
    }

    /// Message metadata for every kept position set, in lexicographic order.
    pub fn messages(&self, placement: &PlacementA) -> Vec<PlannedMessage> {
        let params = &placement.params;
        let positions: Vec<usize> = (1..=params.virtual_users()).collect();
        let mut out = Vec::new();
        for s in lex_subsets(&positions, params.t) {
            let members: Vec<usize> = s.iter().map(|&j| self.order[j - 1]).collect();
            if !members.iter().any(|m| self.leaders.contains(m)) {
                continue;
            }
            let composition = members
                .iter()
                .map(|&m| {
                    let mut rest: Vec<usize> =
                        members.iter().copied().filter(|&x| x != m).collect();
                    rest.sort_unstable();
                    placement.subfile(self.transmitter, self.demands[&m], &rest)
                })
                .collect();
            out.push(PlannedMessage {
                header: s,
                composition,
            });
        }
        out
    }
}

/// Server-side reference encoder: message metadata plus payloads computed
/// from the library.
pub fn build_broadcast_a(
    k: usize,
    placement: &PlacementA,
    plan: &DeliveryPlanA,
    library: &Library,
) -> Vec<MulticastMessage> {
    let sb = placement.params.subfile_bits();
    plan.messages(placement)
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
}

/// Recovers file `demand` at `user` from the other users' broadcasts.
///
/// Messages dropped by the leader rule are rebuilt first: for an unsent
/// position set `B`, with `A = B ∪ P_L`, the XOR of the sent messages
/// `A \ V` over all `V` holding one position per file equals the missing one.
pub fn decode_a(
    user: usize,
    broadcasts: &[Vec<MulticastMessage>],
    cache: &CacheState,
    demand: usize,
    params: &SchemeAParams,
) -> Result<Bits> {
    let mut equations = Vec::new();
    for (k0, msgs) in broadcasts.iter().enumerate() {
        if k0 + 1 == user {
            continue;
        }
        for m in msgs {
            equations.push(Equation {
                ids: m.composition.iter().copied().collect(),
                payload: m.payload.clone(),
            });
        }
        equations.extend(rebuild_dropped(msgs, params));
    }
    peel(
        user,
        demand,
        params.subpacketization() as usize,
        cache,
        &equations,
    )
}

fn rebuild_dropped(msgs: &[MulticastMessage], params: &SchemeAParams) -> Vec<Equation> {
    let (u, t, n_n) = (params.virtual_users(), params.t, params.files());
    if u < n_n + t || msgs.is_empty() {
        return Vec::new();
    }
    let sent: HashMap<&[usize], &MulticastMessage> =
        msgs.iter().map(|m| (m.header.as_slice(), m)).collect();
    let mut file_at: HashMap<usize, usize> = HashMap::new();
    for m in msgs {
        for (p, id) in m.header.iter().zip(&m.composition) {
            file_at.insert(*p, id.file);
        }
    }
    let positions: Vec<usize> = (1..=u).collect();
    let dropped: Vec<Vec<usize>> = lex_subsets(&positions, t)
        .into_iter()
        .filter(|s| !sent.contains_key(s.as_slice()))
        .collect();
    let non_leader: BTreeSet<usize> = dropped.iter().flatten().copied().collect();
    let leader_pos: Vec<usize> = positions
        .iter()
        .copied()
        .filter(|p| !non_leader.contains(p))
        .collect();
    let sb = params.subfile_bits();
    let mut out = Vec::new();
    for b in &dropped {
        let a: BTreeSet<usize> = b.iter().chain(&leader_pos).copied().collect();
        let Some(by_file) = group_by_file(&a, &file_at, n_n) else {
            continue;
        };
        let mut payload = Bits::zeros(sb);
        let mut parity: BTreeMap<SubfileId, bool> = BTreeMap::new();
        let mut complete = true;
        for v in cartesian(&by_file) {
            if v == leader_pos {
                continue;
            }
            let rest: Vec<usize> = a.iter().copied().filter(|p| !v.contains(p)).collect();
            let Some(m) = sent.get(rest.as_slice()) else {
                complete = false;
                break;
            };
            payload.xor_assign(&m.payload);
            for id in &m.composition {
                *parity.entry(*id).or_default() ^= true;
            }
        }
        if complete {
            out.push(Equation {
                ids: parity
                    .into_iter()
                    .filter(|(_, odd)| *odd)
                    .map(|(id, _)| id)
                    .collect(),
                payload,
            });
        }
    }
    out
}

fn group_by_file(
    a: &BTreeSet<usize>,
    file_at: &HashMap<usize, usize>,
    files: usize,
) -> Option<Vec<Vec<usize>>> {
    let mut groups = vec![Vec::new(); files];
    for p in a {
        groups[file_at.get(p)? - 1].push(*p);
    }
    Some(groups)
}

/// One element from each group, returned sorted.
fn cartesian(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for g in groups {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                g.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    for v in &mut acc {
        v.sort_unstable();
    }
    acc
}

/// `((N+t-1)/K, (binom(U,t) - binom(U-N,t)) / binom(U,t-1))`.
pub fn load_a_point(users: usize, files: usize, t: usize) -> Result<(Rational, Rational)> {
    let u = ((users - 1) * files) as i64;
    let t = t as i64;
    if t < 1 || t > u + 1 {
        return Err(Error::params(format!(
            "t must lie in [1, {}], got {t}",
            u + 1
        )));
    }
    let m = Rational::new(BigInt::from(files as i64 + t - 1), BigInt::from(users));
    let r = Rational::new(binom(u, t) - binom(u - files as i64, t), binom(u, t - 1));
    Ok((m, r))
}

/// `(U - t + 1) / t`, an upper bound on the load at parameter `t`.
pub fn load_a_upper(users: usize, files: usize, t: usize) -> Result<Rational> {
    let u = ((users - 1) * files) as i64;
    let t = t as i64;
    if t < 1 || t > u + 1 {
        return Err(Error::params(format!(
            "t must lie in [1, {}], got {t}",
            u + 1
        )));
    }
    Ok(Rational::new(BigInt::from(u - t + 1), BigInt::from(t)))
}

/// Corner candidates for every `t` in `[1, U+1]`.
pub fn load_a_points(users: usize, files: usize) -> Vec<(Rational, Rational)> {
    let u = (users - 1) * files;
    (1..=u + 1)
        .map(|t| load_a_point(users, files, t).expect("in range"))
        .collect()
}

/// Memory actually used per user, counted from the placement, over `B`.
pub fn placement_memory(placement: &PlacementA) -> Vec<Rational> {
    let sub = rat_int(placement.params.subpacketization());
    placement
        .cache_slots
        .iter()
        .map(|s| rat_int(s.len() as u64) / &sub)
        .collect()
}
