//! Domain types shared by the schemes, the protocol engine and the checkers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `a`, `a/b` or a finite decimal such as `4.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::params(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    s.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// `num/den`, or just `num` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rounds to `sig` significant digits and prints in plain positional notation.
pub fn fmt_decimal(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // Find e with 10^e <= a < 10^(e+1).
    let ten = BigInt::from(10);
    let mut e: i64 = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    // round half up
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = q;
    if rem * 2 >= *scaled.denom() {
        digits += 1;
    }
    let mut s = digits.to_string();
    let mut shift = shift;
    if s.len() > sig {
        // rounding carried into a new digit
        s.pop();
        shift -= 1;
    }
    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{s}{zeros}")
    } else {
        let shift = shift as usize;
        if s.len() > shift {
            let (i, f) = s.split_at(s.len() - shift);
            format!("{i}.{f}")
        } else {
            format!("0.{}{}", "0".repeat(shift - s.len()), s)
        }
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// A bit sequence (MSB-first when rendered as hex).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits(BitVec<u8, Msb0>);

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits(bitvec![u8, Msb0; 0; len])
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Bits(bits.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0.set(i, v);
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    pub fn slice(&self, start: usize, len: usize) -> Bits {
        Bits(self.0[start..start + len].to_bitvec())
    }

    pub fn extend(&mut self, other: &Bits) {
        self.0.extend_from_bitslice(&other.0);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(
            self.len(),
            other.len(),
            "xor of unequal-length bit sequences"
        );
        *self.0.as_mut_bitslice() ^= other.0.as_bitslice();
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().by_vals()
    }

    /// Hex rendering, zero-padded on the right to a whole nibble.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len().div_ceil(4));
        for chunk in self.0.chunks(4) {
            let mut v = 0u8;
            for (i, b) in chunk.iter().by_vals().enumerate() {
                if b {
                    v |= 8 >> i;
                }
            }
            out.push(char::from_digit(v as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Bits> {
        let bad = |m: &str| Error::Parse {
            line: 0,
            msg: format!("{m}: {hex:?}"),
        };
        if hex.len() != len.div_ceil(4) {
            return Err(bad("hex length does not match bit length"));
        }
        let mut bits = BitVec::<u8, Msb0>::with_capacity(len);
        for c in hex.chars() {
            let v = c.to_digit(16).ok_or_else(|| bad("bad hex digit"))?;
            for i in 0..4 {
                if bits.len() < len {
                    bits.push(v & (8 >> i) != 0);
                } else if v & (8 >> i) != 0 {
                    return Err(bad("nonzero padding"));
                }
            }
        }
        Ok(Bits(bits))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({}:{})", self.len(), self.to_hex())
    }
}

/// One problem instance: `users` (K), `files` (N), file size (B) and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemParams {
    pub users: usize,
    pub files: usize,
    pub file_bits: u64,
    pub seed: u64,
}

impl SystemParams {
    pub fn new(users: usize, files: usize, file_bits: u64, seed: u64) -> Result<Self> {
        if users < 2 || files < 2 {
            return Err(Error::params(format!(
                "need min(K, N) >= 2, got K={users}, N={files}"
            )));
        }
        Ok(SystemParams {
            users,
            files,
            file_bits,
            seed,
        })
    }

    /// Smallest multiple of `subpacketization` that is at least `target` bits.
    pub fn fitted_file_bits(subpacketization: u64, target: u64) -> u64 {
        let target = target.max(1);
        target.div_ceil(subpacketization) * subpacketization
    }

    pub(crate) fn check_divisible(&self, subpacketization: u64) -> Result<()> {
        if self.file_bits == 0 || !self.file_bits.is_multiple_of(subpacketization) {
            return Err(Error::Subpacketization {
                required: subpacketization,
                file_bits: self.file_bits,
            });
        }
        Ok(())
    }
}

/// Label of one equal-length piece of a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubfileId {
    pub file: usize,
    pub slot: usize,
}

impl SubfileId {
    pub fn new(file: usize, slot: usize) -> Self {
        SubfileId { file, slot }
    }
}

impl fmt::Display for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.slot)
    }
}

impl FromStr for SubfileId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("bad subfile id {s:?}"),
        };
        let (f, sl) = s.split_once(':').ok_or_else(bad)?;
        Ok(SubfileId {
            file: f.parse().map_err(|_| bad())?,
            slot: sl.parse().map_err(|_| bad())?,
        })
    }
}

/// The whole library, one bit sequence of `file_bits` per file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Bits>,
}

impl Library {
    pub fn new(files: Vec<Bits>) -> Self {
        Library { files }
    }

    pub fn file(&self, file: usize) -> &Bits {
        &self.files[file - 1]
    }

    pub fn files(&self) -> &[Bits] {
        &self.files
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn subfile(&self, id: SubfileId, subfile_bits: usize) -> Bits {
        self.file(id.file)
            .slice((id.slot - 1) * subfile_bits, subfile_bits)
    }
}

/// One user's cache: the metadata (which slots) together with their bits.
///
/// Keeping both in a single map makes the slots/content correspondence hold by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheState {
    pub owner: usize,
    content: BTreeMap<SubfileId, Bits>,
}

impl CacheState {
    pub fn new(owner: usize) -> Self {
        CacheState {
            owner,
            content: BTreeMap::new(),
        }
    }

    /// Copies the named subfiles out of the library (uncoded placement).
    pub fn fill(
        owner: usize,
        slots: impl IntoIterator<Item = SubfileId>,
        library: &Library,
        subfile_bits: usize,
    ) -> Self {
        let mut c = CacheState::new(owner);
        for id in slots {
            c.insert(id, library.subfile(id, subfile_bits));
        }
        c
    }

    pub fn insert(&mut self, id: SubfileId, bits: Bits) {
        self.content.insert(id, bits);
    }

    pub fn contains(&self, id: &SubfileId) -> bool {
        self.content.contains_key(id)
    }

    pub fn get(&self, id: &SubfileId) -> Option<&Bits> {
        self.content.get(id)
    }

    pub fn slots(&self) -> impl Iterator<Item = &SubfileId> {
        self.content.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SubfileId, &Bits)> {
        self.content.iter()
    }

    pub fn num_slots(&self) -> usize {
        self.content.len()
    }

    pub fn total_bits(&self) -> u64 {
        self.content.values().map(|b| b.len() as u64).sum()
    }

    /// Content bits concatenated in slot order.
    pub fn packed_bits(&self) -> Bits {
        let mut out = Bits::default();
        for b in self.content.values() {
            out.extend(b);
        }
        out
    }
}

/// Demanded file index of each user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, params: &SystemParams) -> Result<Self> {
        if demands.len() != params.users {
            return Err(Error::InvalidDemands(format!(
                "expected {} demands, got {}",
                params.users,
                demands.len()
            )));
        }
        if let Some(d) = demands.iter().find(|&&d| d == 0 || d > params.files) {
            return Err(Error::InvalidDemands(format!(
                "demand {d} outside [1, {}]",
                params.files
            )));
        }
        Ok(DemandVector(demands))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Demand of user `k` (1-based).
    pub fn of(&self, user: usize) -> usize {
        self.0[user - 1]
    }

    /// Every vector in `[files]^users`, in lexicographic order.
    pub fn all(params: &SystemParams) -> Vec<DemandVector> {
        let mut out = Vec::new();
        let mut cur = vec![1; params.users];
        loop {
            out.push(DemandVector(cur.clone()));
            let mut i = params.users;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < params.files {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 1;
            }
        }
    }
}

impl TryFrom<Vec<usize>> for DemandVector {
    type Error = Error;

    /// Length and range are checked later against the system parameters.
    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.contains(&0) {
            return Err(Error::InvalidDemands("file indices are 1-based".into()));
        }
        Ok(DemandVector(v))
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A broadcast XOR payload and the metadata describing it.
///
/// `header` is the index set the scheme reveals with the message (the
/// position set of the multicast group in the virtual-user scheme, the file
/// subset in the two-user scheme). `composition` lists the XORed subfiles in
/// position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastMessage {
    pub sender: usize,
    pub header: Vec<usize>,
    pub composition: Vec<SubfileId>,
    pub payload: Bits,
}

impl MulticastMessage {
    /// Recomputes the XOR of the named subfiles straight from the library.
    pub fn expected_payload(&self, library: &Library, subfile_bits: usize) -> Bits {
        let mut acc = Bits::zeros(subfile_bits);
        for id in &self.composition {
            acc.xor_assign(&library.subfile(*id, subfile_bits));
        }
        acc
    }
}

/// What the server tells one user to broadcast: headers and compositions only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub recipient: usize,
    pub plan: Vec<PlannedMessage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedMessage {
    pub header: Vec<usize>,
    pub composition: Vec<SubfileId>,
}

/// Which scheme produced a transcript, with its integer parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeTag {
    /// Virtual-user scheme with parameter `t`.
    A { t: usize },
    /// Two-user scheme with parameter `t'`.
    B { tprime: usize },
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeTag::A { t } => write!(f, "A {t}"),
            SchemeTag::B { tprime } => write!(f, "B {tprime}"),
        }
    }
}

/// Everything produced by one protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub scheme: SchemeTag,
    pub params: SystemParams,
    pub memory_point: Rational,
    pub subfile_bits: usize,
    pub library: Library,
    pub caches: Vec<CacheState>,
    pub demands: DemandVector,
    pub queries: Vec<Query>,
    /// `broadcasts[k-1]` is everything user `k` sent.
    pub broadcasts: Vec<Vec<MulticastMessage>>,
    pub payload_bits: u64,
}

impl Transcript {
    pub fn cache(&self, user: usize) -> &CacheState {
        &self.caches[user - 1]
    }

    pub fn all_messages(&self) -> impl Iterator<Item = &MulticastMessage> {
        self.broadcasts.iter().flatten()
    }

    pub fn message_count(&self) -> usize {
        self.broadcasts.iter().map(Vec::len).sum()
    }

    /// Bytes the headers and compositions would take in the text format.
    /// Reported separately; never counted toward the load.
    pub fn metadata_bytes(&self) -> usize {
        self.all_messages()
            .map(|m| {
                let h: usize = m.header.iter().map(|x| x.to_string().len() + 1).sum();
                let c: usize = m.composition.iter().map(|c| c.to_string().len() + 1).sum();
                h + c
            })
            .sum()
    }

    /// Line-oriented text form (see [`Transcript::from_text`]).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("d2d-transcript v1\n");
        s.push_str(&format!("scheme {}\n", self.scheme));
        s.push_str(&format!("users {}\n", self.params.users));
        s.push_str(&format!("files {}\n", self.params.files));
        s.push_str(&format!("file_bits {}\n", self.params.file_bits));
        s.push_str(&format!("seed {}\n", self.params.seed));
        s.push_str(&format!("subfile_bits {}\n", self.subfile_bits));
        s.push_str(&format!("memory {}\n", fmt_rational(&self.memory_point)));
        s.push_str(&format!("demands {}\n", self.demands));
        for (i, f) in self.library.files().iter().enumerate() {
            s.push_str(&format!("library {} {}\n", i + 1, f.to_hex()));
        }
        for c in &self.caches {
            let ids: Vec<String> = c.slots().map(|id| id.to_string()).collect();
            s.push_str(&format!(
                "cache {} {} {}\n",
                c.owner,
                join_or_dash(&ids),
                c.packed_bits().to_hex()
            ));
        }
        for m in self.all_messages() {
            let header: Vec<String> = m.header.iter().map(|x| x.to_string()).collect();
            let comp: Vec<String> = m.composition.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(
                "msg {} {} {} {}\n",
                m.sender,
                join_or_dash(&header),
                join_or_dash(&comp),
                m.payload.to_hex()
            ));
        }
        s.push_str(&format!("payload_bits {}\n", self.payload_bits));
        s
    }

    pub fn from_text(text: &str) -> Result<Transcript> {
        let mut p = TextReader::default();
        for (no, line) in text.lines().enumerate() {
            p.line(no + 1, line)?;
        }
        p.finish()
    }
}

fn join_or_dash(parts: &[String]) -> String {
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(",")
    }
}

fn split_list(s: &str) -> Vec<&str> {
    if s == "-" {
        Vec::new()
    } else {
        s.split(',').collect()
    }
}

#[derive(Default)]
struct TextReader {
    scheme: Option<SchemeTag>,
    users: Option<usize>,
    files: Option<usize>,
    file_bits: Option<u64>,
    seed: Option<u64>,
    subfile_bits: Option<usize>,
    memory: Option<Rational>,
    demands: Option<Vec<usize>>,
    library: Vec<Bits>,
    caches: Vec<CacheState>,
    messages: Vec<MulticastMessage>,
    payload_bits: Option<u64>,
    seen_magic: bool,
}

impl TextReader {
    fn line(&mut self, no: usize, line: &str) -> Result<()> {
        let err = |msg: String| Error::Parse { line: no, msg };
        let reloc = |e: Error| match e {
            Error::Parse { msg, .. } => Error::Parse { line: no, msg },
            other => other,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(());
        }
        if !self.seen_magic {
            if line != "d2d-transcript v1" {
                return Err(err("missing `d2d-transcript v1` header".into()));
            }
            self.seen_magic = true;
            return Ok(());
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| err(format!("expected an integer, got {s:?}")))
        };
        let need = |n: usize| -> Result<()> {
            if fields.len() != n {
                Err(err(format!("expected {n} fields, got {}", fields.len())))
            } else {
                Ok(())
            }
        };
        match fields[0] {
            "scheme" => {
                need(3)?;
                let v = num(fields[2])? as usize;
                self.scheme = Some(match fields[1] {
                    "A" => SchemeTag::A { t: v },
                    "B" => SchemeTag::B { tprime: v },
                    other => return Err(err(format!("unknown scheme {other:?}"))),
                });
            }
            "users" => {
                need(2)?;
                self.users = Some(num(fields[1])? as usize)
            }
            "files" => {
                need(2)?;
                self.files = Some(num(fields[1])? as usize)
            }
            "file_bits" => {
                need(2)?;
                self.file_bits = Some(num(fields[1])?)
            }
            "seed" => {
                need(2)?;
                self.seed = Some(num(fields[1])?)
            }
            "subfile_bits" => {
                need(2)?;
                self.subfile_bits = Some(num(fields[1])? as usize)
            }
            "memory" => {
                need(2)?;
                self.memory = Some(parse_rational(fields[1]).map_err(|e| err(e.to_string()))?)
            }
            "demands" => {
                need(2)?;
                let d: Result<Vec<usize>> = fields[1]
                    .split(',')
                    .map(|x| num(x).map(|v| v as usize))
                    .collect();
                self.demands = Some(d?);
            }
            "library" => {
                need(3)?;
                let idx = num(fields[1])? as usize;
                if idx != self.library.len() + 1 {
                    return Err(err("library lines out of order".into()));
                }
                let len = self
                    .file_bits
                    .ok_or_else(|| err("file_bits missing".into()))?;
                self.library
                    .push(Bits::from_hex(fields[2], len as usize).map_err(reloc)?);
            }
            "cache" => {
                need(4)?;
                let owner = num(fields[1])? as usize;
                let sb = self
                    .subfile_bits
                    .ok_or_else(|| err("subfile_bits missing".into()))?;
                let ids: Vec<SubfileId> = split_list(fields[2])
                    .into_iter()
                    .map(|s| s.parse().map_err(reloc))
                    .collect::<Result<_>>()?;
                let packed = Bits::from_hex(fields[3], ids.len() * sb).map_err(reloc)?;
                let mut sorted = ids.clone();
                sorted.sort();
                sorted.dedup();
                if sorted != ids {
                    return Err(err("cache slots must be sorted and distinct".into()));
                }
                let mut c = CacheState::new(owner);
                for (i, id) in ids.into_iter().enumerate() {
                    c.insert(id, packed.slice(i * sb, sb));
                }
                self.caches.push(c);
            }
            "msg" => {
                need(5)?;
                let sb = self
                    .subfile_bits
                    .ok_or_else(|| err("subfile_bits missing".into()))?;
                let header: Vec<usize> = split_list(fields[2])
                    .into_iter()
                    .map(|x| num(x).map(|v| v as usize))
                    .collect::<Result<_>>()?;
                let composition: Vec<SubfileId> = split_list(fields[3])
                    .into_iter()
                    .map(|s| s.parse().map_err(reloc))
                    .collect::<Result<_>>()?;
                self.messages.push(MulticastMessage {
                    sender: num(fields[1])? as usize,
                    header,
                    composition,
                    payload: Bits::from_hex(fields[4], sb).map_err(reloc)?,
                });
            }
            "payload_bits" => {
                need(2)?;
                self.payload_bits = Some(num(fields[1])?)
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<Transcript> {
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing `{what}` record"),
        };
        let params = SystemParams::new(
            self.users.ok_or_else(|| missing("users"))?,
            self.files.ok_or_else(|| missing("files"))?,
            self.file_bits.ok_or_else(|| missing("file_bits"))?,
            self.seed.ok_or_else(|| missing("seed"))?,
        )?;
        let demands = DemandVector::new(self.demands.ok_or_else(|| missing("demands"))?, &params)?;
        if self.library.len() != params.files {
            return Err(missing("library"));
        }
        if self.caches.len() != params.users {
            return Err(missing("cache"));
        }
        let mut broadcasts = vec![Vec::new(); params.users];
        for m in self.messages {
            if m.sender == 0 || m.sender > params.users {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("sender {} out of range", m.sender),
                });
            }
            broadcasts[m.sender - 1].push(m);
        }
        let queries = broadcasts
            .iter()
            .enumerate()
            .map(|(i, msgs)| Query {
                recipient: i + 1,
                plan: msgs
                    .iter()
                    .map(|m| PlannedMessage {
                        header: m.header.clone(),
                        composition: m.composition.clone(),
                    })
                    .collect(),
            })
            .collect();
        Ok(Transcript {
            scheme: self.scheme.ok_or_else(|| missing("scheme"))?,
            params,
            memory_point: self.memory.ok_or_else(|| missing("memory"))?,
            subfile_bits: self.subfile_bits.ok_or_else(|| missing("subfile_bits"))?,
            library: Library::new(self.library),
            caches: self.caches,
            demands,
            queries,
            broadcasts,
            payload_bits: self.payload_bits.ok_or_else(|| missing("payload_bits"))?,
        })
    }
}
