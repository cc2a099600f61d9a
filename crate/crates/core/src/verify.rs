//! Decodability and demand-privacy checks.
//!
//! Privacy is tested on observer views. A coalition sees its own caches
//! (slot names and bits), every broadcast (header, composition, payload) and
//! its own demands. Because placement permutations are uniform inside each
//! `(file, block)` class, renaming slots inside a class never changes the
//! probability of a view, so two demand vectors induce the same view
//! distribution iff they induce the same distribution of view orbits. The
//! orbit is captured by [`ObserverView`]: per class, the sorted multiset of
//! slot signatures.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Bits, DemandVector, Library, SubfileId, Transcript};
use crate::rng::seeded_rng;
use crate::sim::{self, ProtocolPlan, Scheme};

/// Default limit on enumerated outcomes in exact mode.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

/// How one slot shows up to the coalition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotSignature {
    /// Bit `m` set iff the `m`-th coalition member caches the slot.
    pub cached_by: u64,
    /// `(message index, position in composition)` of every appearance.
    pub appearances: Vec<(usize, usize)>,
    /// Cached bits, kept in paranoid mode only.
    pub content: Option<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewMessage {
    pub sender: usize,
    pub header: Vec<usize>,
    pub width: usize,
    pub payload: Option<Bits>,
}

/// A coalition's view up to renaming of slots inside each `(file, block)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObserverView {
    pub observer: Vec<usize>,
    pub own_demands: Vec<usize>,
    pub canonical_broadcasts: Vec<ViewMessage>,
    /// `((file, block), sorted signatures)`, classes in ascending order.
    pub canonical_caches: Vec<((usize, usize), Vec<SlotSignature>)>,
}

fn check_coalition(coalition: &[usize], users: usize) -> Result<Vec<usize>> {
    let mut c = coalition.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.is_empty() || c.len() != coalition.len() || c.iter().any(|&u| u == 0 || u > users) {
        return Err(Error::params(format!(
            "coalition must be a nonempty set of distinct users in [1, {users}], got {coalition:?}"
        )));
    }
    Ok(c)
}

/// `(sender, header, composition, payload)`
type MessageRef<'a> = (usize, &'a [usize], &'a [SubfileId], Option<&'a Bits>);

struct ViewInput<'a> {
    cached: Vec<Vec<(SubfileId, Option<&'a Bits>)>>,
    messages: Vec<MessageRef<'a>>,
}

fn build_view(
    scheme: &Scheme,
    coalition: &[usize],
    demands: &DemandVector,
    input: ViewInput<'_>,
) -> ObserverView {
    let mut sigs: BTreeMap<SubfileId, SlotSignature> = BTreeMap::new();
    for (bit, slots) in input.cached.iter().enumerate() {
        for (id, content) in slots {
            let s = sigs.entry(*id).or_insert_with(|| SlotSignature {
                cached_by: 0,
                appearances: Vec::new(),
                content: content.cloned(),
            });
            s.cached_by |= 1 << bit;
        }
    }
    let mut canonical_broadcasts = Vec::with_capacity(input.messages.len());
    for (mi, (sender, header, composition, payload)) in input.messages.iter().enumerate() {
        for (pos, id) in composition.iter().enumerate() {
            sigs.entry(*id)
                .or_insert_with(|| SlotSignature {
                    cached_by: 0,
                    appearances: Vec::new(),
                    content: None,
                })
                .appearances
                .push((mi, pos));
        }
        canonical_broadcasts.push(ViewMessage {
            sender: *sender,
            header: header.to_vec(),
            width: composition.len(),
            payload: payload.cloned(),
        });
    }
    let mut classes: BTreeMap<(usize, usize), Vec<SlotSignature>> = BTreeMap::new();
    for (id, sig) in sigs {
        classes
            .entry((id.file, scheme.block_of(id.slot)))
            .or_default()
            .push(sig);
    }
    for v in classes.values_mut() {
        v.sort();
    }
    ObserverView {
        observer: coalition.to_vec(),
        own_demands: coalition.iter().map(|&u| demands.of(u)).collect(),
        canonical_broadcasts,
        canonical_caches: classes.into_iter().collect(),
    }
}

/// Canonical view of a transcript; `paranoid` keeps payload and cached bits.
pub fn canonical_view(
    transcript: &Transcript,
    coalition: &[usize],
    paranoid: bool,
) -> Result<ObserverView> {
    let coalition = check_coalition(coalition, transcript.params.users)?;
    let scheme = Scheme::from_tag(transcript.scheme, transcript.params)?;
    let input = ViewInput {
        cached: coalition
            .iter()
            .map(|&u| {
                transcript
                    .cache(u)
                    .entries()
                    .map(|(id, b)| (*id, paranoid.then_some(b)))
                    .collect()
            })
            .collect(),
        messages: transcript
            .all_messages()
            .map(|m| {
                (
                    m.sender,
                    m.header.as_slice(),
                    m.composition.as_slice(),
                    paranoid.then_some(&m.payload),
                )
            })
            .collect(),
    };
    Ok(build_view(&scheme, &coalition, &transcript.demands, input))
}

/// Structure-only view straight from the server's plan (no bits involved).
pub fn plan_view(
    scheme: &Scheme,
    plan: &ProtocolPlan,
    coalition: &[usize],
    demands: &DemandVector,
) -> ObserverView {
    let input = ViewInput {
        cached: coalition
            .iter()
            .map(|&u| {
                plan.cache_slots[u - 1]
                    .iter()
                    .map(|id| (*id, None))
                    .collect()
            })
            .collect(),
        messages: plan
            .queries
            .iter()
            .flat_map(|q| {
                q.plan.iter().map(move |m| {
                    (
                        q.recipient,
                        m.header.as_slice(),
                        m.composition.as_slice(),
                        None,
                    )
                })
            })
            .collect(),
    };
    build_view(scheme, coalition, demands, input)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyReport {
    pub mode: Mode,
    pub coalition: Vec<usize>,
    pub pass: bool,
    /// Largest total-variation distance between two view distributions that
    /// should be equal.
    pub max_tv: f64,
    /// Randomness outcomes enumerated (exact) or trials per demand vector.
    pub samples: u64,
    /// Distinct views seen over the whole run (exact), or the largest
    /// support of one statistic for one demand vector (Monte Carlo).
    pub distinct_views: usize,
    /// Set when `trials` is too small for the estimate to mean much.
    pub low_confidence: bool,
}

impl fmt::Display for PrivacyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        };
        write!(
            f,
            "mode={mode} coalition={:?} verdict={} max_tv={:.6} samples={} views={}{}",
            self.coalition,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_tv,
            self.samples,
            self.distinct_views,
            if self.low_confidence {
                " (low confidence)"
            } else {
                ""
            }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub cap: u64,
    /// Include payload and cached bits, enumerating every library too.
    pub paranoid: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            cap: DEFAULT_EXACT_CAP,
            paranoid: false,
        }
    }
}

type Histogram = HashMap<ObserverView, u64>;

fn tv<K: std::hash::Hash + Eq>(a: &HashMap<K, u64>, na: u64, b: &HashMap<K, u64>, nb: u64) -> f64 {
    let mut sum = 0.0;
    for (v, &ca) in a {
        let cb = b.get(v).copied().unwrap_or(0);
        sum += (ca as f64 / na as f64 - cb as f64 / nb as f64).abs();
    }
    for (v, &cb) in b {
        if !a.contains_key(v) {
            sum += cb as f64 / nb as f64;
        }
    }
    sum / 2.0
}

/// Groups demand-vector indices by the coalition's own demands.
fn groups(all: &[DemandVector], coalition: &[usize]) -> Vec<Vec<usize>> {
    let mut g: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, d) in all.iter().enumerate() {
        g.entry(coalition.iter().map(|&u| d.of(u)).collect())
            .or_default()
            .push(i);
    }
    g.into_values().collect()
}

fn all_libraries(scheme: &Scheme) -> Vec<Library> {
    let p = scheme.params();
    let bits = p.files * p.file_bits as usize;
    (0u64..1 << bits)
        .map(|x| {
            Library::new(
                (0..p.files)
                    .map(|i| {
                        Bits::from_bools((0..p.file_bits as usize).map(|b| {
                            let pos = i * p.file_bits as usize + b;
                            x >> (bits - 1 - pos) & 1 == 1
                        }))
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Exact view distributions for every demand vector, compared within each
/// fixing of the coalition's demands.
pub fn check_privacy_exact(
    scheme: &Scheme,
    coalition: &[usize],
    opts: ExactOptions,
) -> Result<PrivacyReport> {
    let coalition = check_coalition(coalition, scheme.params().users)?;
    let scheme = if opts.paranoid {
        *scheme
    } else {
        scheme.fit_file_bits(1)
    };
    let mut total = scheme.outcome_count();
    if opts.paranoid {
        let bits = scheme.params().files as u64 * scheme.params().file_bits;
        if bits >= 63 {
            return Err(Error::InstanceTooLarge {
                outcomes: format!("{total} x 2^{bits}"),
                cap: opts.cap,
            });
        }
        total *= BigInt::from(1u64 << bits);
    }
    if total > BigInt::from(opts.cap) {
        return Err(Error::InstanceTooLarge {
            outcomes: total.to_string(),
            cap: opts.cap,
        });
    }
    let all = DemandVector::all(scheme.params());
    let mut hist: Vec<Histogram> = vec![HashMap::new(); all.len()];
    let libraries = if opts.paranoid {
        all_libraries(&scheme)
    } else {
        Vec::new()
    };
    for r in scheme.enumerate_randomness(opts.cap)? {
        for (d, h) in all.iter().zip(hist.iter_mut()) {
            if opts.paranoid {
                for lib in &libraries {
                    let t = sim::run_with(&scheme, d, &r, lib.clone())?;
                    *h.entry(canonical_view(&t, &coalition, true)?).or_default() += 1;
                }
            } else {
                let plan = scheme.plan(d, &r);
                *h.entry(plan_view(&scheme, &plan, &coalition, d))
                    .or_default() += 1;
            }
        }
    }
    let n = total.to_u64().expect("below cap");
    let mut max_tv: f64 = 0.0;
    let mut pass = true;
    for g in groups(&all, &coalition) {
        for &i in &g[1..] {
            if hist[i] != hist[g[0]] {
                pass = false;
                max_tv = max_tv.max(tv(&hist[g[0]], n, &hist[i], n));
            }
        }
    }
    let distinct: std::collections::HashSet<&ObserverView> =
        hist.iter().flat_map(|h| h.keys()).collect();
    Ok(PrivacyReport {
        mode: Mode::Exact,
        coalition,
        pass,
        max_tv,
        samples: n,
        distinct_views: distinct.len(),
        low_confidence: false,
    })
}

/// Low-dimensional statistics of a coalition's view used by the Monte Carlo
/// test, one family per transmitter: the header list, the file sequence of
/// every composition, and for each coalition member which composed
/// subfiles it caches. Each is a function of the view, so private schemes give equal
/// distributions for every one of them, while their supports stay small
/// enough to estimate from `10^4` samples.
pub fn view_statistics(plan: &ProtocolPlan, coalition: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::with_capacity((2 + coalition.len()) * plan.queries.len());
    for q in &plan.queries {
        out.push(q.plan.iter().map(|m| m.header.clone()).collect());
        out.push(
            q.plan
                .iter()
                .map(|m| m.composition.iter().map(|id| id.file).collect())
                .collect(),
        );
        for &u in coalition {
            let cache = &plan.cache_slots[u - 1];
            out.push(
                q.plan
                    .iter()
                    .map(|m| {
                        m.composition
                            .iter()
                            .map(|id| cache.contains(id) as usize)
                            .collect()
                    })
                    .collect(),
            );
        }
    }
    out
}

type StatHistograms = Vec<HashMap<Vec<Vec<usize>>, u64>>;

/// Monte Carlo privacy test for several coalitions sharing the same runs.
///
/// Each demand vector gets `trials` independent runs. For every coalition,
/// every statistic of [`view_statistics`] and every pair of demand vectors
/// that agree on the coalition's demands, the total-variation distance
/// between the empirical distributions is computed; a coalition passes iff
/// the largest one is at most `tolerance`.
pub fn check_privacy_mc_many(
    scheme: &Scheme,
    coalitions: &[Vec<usize>],
    trials: u64,
    tolerance: f64,
    seed: u64,
) -> Result<Vec<PrivacyReport>> {
    let coalitions: Vec<Vec<usize>> = coalitions
        .iter()
        .map(|c| check_coalition(c, scheme.params().users))
        .collect::<Result<_>>()?;
    if trials == 0 {
        return Err(Error::params("trials must be at least 1"));
    }
    let scheme = scheme.fit_file_bits(1);
    let all = DemandVector::all(scheme.params());
    // hist[demand][coalition][statistic]
    let hist: Vec<Vec<StatHistograms>> = all
        .par_iter()
        .enumerate()
        .map(|(di, d)| {
            let mut h: Vec<StatHistograms> = vec![Vec::new(); coalitions.len()];
            for trial in 0..trials {
                let s = seeded_rng(seed, format!("trial/{di}/{trial}")).next_u64();
                let plan = scheme.plan(d, &scheme.draw_randomness(s));
                for (c, hc) in coalitions.iter().zip(h.iter_mut()) {
                    let stats = view_statistics(&plan, c);
                    if hc.is_empty() {
                        hc.resize(stats.len(), HashMap::new());
                    }
                    for (st, hs) in stats.into_iter().zip(hc.iter_mut()) {
                        *hs.entry(st).or_default() += 1;
                    }
                }
            }
            h
        })
        .collect();
    Ok(coalitions
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let mut max_tv: f64 = 0.0;
            for g in groups(&all, c) {
                for (x, &i) in g.iter().enumerate() {
                    for &j in &g[x + 1..] {
                        for (a, b) in hist[i][ci].iter().zip(&hist[j][ci]) {
                            max_tv = max_tv.max(tv(a, trials, b, trials));
                        }
                    }
                }
            }
            let distinct = hist
                .iter()
                .map(|h| h[ci].iter().map(HashMap::len).max().unwrap_or(0))
                .max()
                .unwrap_or(0);
            PrivacyReport {
                mode: Mode::MonteCarlo,
                coalition: c.clone(),
                pass: max_tv <= tolerance,
                max_tv,
                samples: trials,
                distinct_views: distinct,
                low_confidence: trials < 100,
            }
        })
        .collect())
}

pub fn check_privacy_mc(
    scheme: &Scheme,
    coalition: &[usize],
    trials: u64,
    tolerance: f64,
    seed: u64,
) -> Result<PrivacyReport> {
    Ok(check_privacy_mc_many(scheme, &[coalition.to_vec()], trials, tolerance, seed)?.remove(0))
}

/// Runs every user's decoder; `true` iff it reproduces the demanded file.
pub fn check_decodability(transcript: &Transcript) -> Result<Vec<bool>> {
    let scheme = Scheme::from_tag(transcript.scheme, transcript.params)?;
    Ok((1..=transcript.params.users)
        .map(|u| match scheme.decode(transcript, u) {
            Ok(bits) => bits == *transcript.library.file(transcript.demands.of(u)),
            Err(_) => false,
        })
        .collect())
}
