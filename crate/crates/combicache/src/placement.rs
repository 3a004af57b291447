//! Cache placement schemes.
//!
//! Four layouts over the same `PlacementLayout` shape:
//!
//! * [`man_placement`] — symmetric uncoded placement: one subfile per
//!   `t`-subset of users, cached by exactly that subset.
//! * [`asym_uncoded_placement`] — topology-aware uncoded placement: one piece
//!   per `(r-1)`-subset of relays `Y`, cached by everyone *outside* the
//!   common-user group of `Y`. Reaches the maximal multicast gain `K'`.
//! * [`asym_coded_placement`] — general gain `g in [2..=K']`: files are MDS
//!   precoded and one coded symbol is assigned per collection of
//!   `q = K' - g + 1` relay subsets, cached by the users outside the union of
//!   the common-user groups.
//! * [`improved_placement`] — same, but symbols whose collections cover all
//!   relays are never generated (nobody would ever receive them), which
//!   shrinks the code and the cache footprint.
//!
//! Every layout stores the per-file symbol structure once: the structure is
//! identical across files, only the bytes differ. Memory accounting is exact:
//! each user caches the same number of symbols, so the cache size in files is
//! `M = N * cached_per_user / subpacketization`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{BigUint, ToPrimitive};
use serde::Serialize;

use crate::combinatorics::{self, binom, enumeration_cap, pruned_cached_per_user, Collection};
use crate::error::Error;
use crate::mdscodec::MdsCode;
use crate::rat::{self, Rat};
use crate::sets;
use crate::topology::CombinationNetwork;
use crate::Result;

/// Which placement produced a layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "name")]
pub enum Scheme {
    /// Symmetric uncoded placement with parameter `t`.
    Man { t: usize },
    /// Topology-aware uncoded placement (gain `K'`).
    Asym,
    /// Topology-aware MDS-precoded placement with target gain `g`.
    Coded { g: usize },
    /// Coded placement with covering collections pruned.
    Improved { g: usize },
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Man { t } => write!(f, "man(t={t})"),
            Scheme::Asym => write!(f, "asym"),
            Scheme::Coded { g } => write!(f, "coded(g={g})"),
            Scheme::Improved { g } => write!(f, "improved(g={g})"),
        }
    }
}

/// Identity of one coded symbol, shared by every file.
///
/// Symmetric placements key symbols by the user subset that caches them;
/// topology-aware placements key by the relay-subset collection, because two
/// collections may induce the same cached-by set (degenerate `H = r`
/// networks) yet index distinct code symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymbolKey {
    /// Subfile cached by exactly this user set.
    UserSet(Vec<usize>),
    /// Symbol indexed by a collection of `(r-1)`-relay-subsets.
    Collection(Collection),
}

/// One symbol slot of the per-file layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSpec {
    pub key: SymbolKey,
    /// Users caching this symbol (for every file), sorted.
    pub cached_by: Vec<usize>,
}

/// A concrete symbol of a concrete file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SymbolId {
    /// File index, `1..=N`.
    pub file: usize,
    /// Symbol position within the per-file layout.
    pub index: usize,
}

/// MDS code dimensions attached to a coded layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MdsParams {
    /// Total coded symbols per file.
    pub n: usize,
    /// Source pieces per file.
    pub k: usize,
}

/// A placement: who caches which symbol, and at what cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementLayout {
    pub scheme: Scheme,
    pub relays: usize,
    pub degree: usize,
    /// Number of files `N`.
    pub files: usize,
    /// Source pieces per file; every symbol holds `B / subpacketization` bits.
    pub subpacketization: usize,
    /// Erasure-code dimensions when the placement precodes files.
    pub mds: Option<MdsParams>,
    /// Per-file symbol structure, in canonical key order.
    pub symbols: Vec<SymbolSpec>,
    /// Multicast gain targeted by the delivery phase (`None` for symmetric
    /// placements, which route subfiles adaptively).
    pub gain: Option<usize>,
    /// Cache size per user, in files. Exact.
    pub memory: Rat,
}

impl PlacementLayout {
    /// Fraction of one file occupied by one symbol.
    pub fn symbol_fraction(&self) -> Rat {
        rat::rat(1, self.subpacketization as i64)
    }

    /// Number of symbols each file is expanded to.
    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    /// Map from symbol key to its position.
    pub fn key_index(&self) -> BTreeMap<&SymbolKey, usize> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(idx, s)| (&s.key, idx))
            .collect()
    }

    /// How many symbols of each file a user caches.
    pub fn cached_per_user(&self, user: usize) -> usize {
        self.symbols
            .iter()
            .filter(|s| sets::contains(&s.cached_by, user))
            .count()
    }
}

/// Users outside the union of common-user groups of a collection's subsets:
/// the cached-by set of the collection's symbol. An empty relay subset
/// (degenerate `r = 1`) has every user as a common neighbor.
pub fn collection_cached_by(net: &CombinationNetwork, c: &Collection) -> Result<Vec<usize>> {
    let mut covered: Vec<usize> = Vec::new();
    for y in c.subsets() {
        let group = if y.is_empty() {
            sets::full(net.user_count())
        } else {
            net.common_users(y)?
        };
        covered = sets::union(&covered, &group);
    }
    Ok(sets::minus(&sets::full(net.user_count()), &covered))
}

fn check_files(files: usize) -> Result<()> {
    if files == 0 {
        return Err(Error::Parameter("need at least one file".into()));
    }
    Ok(())
}

fn fit_usize(v: &BigUint, what: &str) -> Result<usize> {
    v.to_usize()
        .ok_or_else(|| Error::Parameter(format!("{what} = {v} exceeds machine range")))
}

fn check_enum_budget(count: usize) -> Result<()> {
    let cap = enumeration_cap();
    if count as u64 > cap {
        return Err(Error::EnumerationCap {
            needed: BigUint::from(count),
            cap,
        });
    }
    Ok(())
}

/// Validate that every user caches the same number of symbols and return the
/// exact memory in files.
fn symmetric_memory(
    net: &CombinationNetwork,
    symbols: &[SymbolSpec],
    files: usize,
    subpacketization: usize,
    expected_per_user: usize,
) -> Result<Rat> {
    let mut counts = vec![0usize; net.user_count()];
    for s in symbols {
        for &u in &s.cached_by {
            counts[u - 1] += 1;
        }
    }
    for (idx, &c) in counts.iter().enumerate() {
        if c != expected_per_user {
            return Err(Error::Parameter(format!(
                "asymmetric cache use: user {} caches {c} symbols, expected {expected_per_user}",
                idx + 1
            )));
        }
    }
    Ok(rat::int(files as i64) * rat::rat(expected_per_user as i64, subpacketization as i64))
}

/// Symmetric uncoded placement: each file splits into `C(K, t)` subfiles, one
/// per `t`-subset of users, cached by exactly that subset. `M = t N / K`.
pub fn man_placement(net: &CombinationNetwork, files: usize, t: usize) -> Result<PlacementLayout> {
    check_files(files)?;
    let k = net.user_count();
    if t > k {
        return Err(Error::Parameter(format!("t={t} not in 0..={k}")));
    }
    let subpack = fit_usize(&binom(k as i128, t as i128), "C(K, t)")?;
    check_enum_budget(subpack)?;

    let symbols: Vec<SymbolSpec> = (1..=k)
        .combinations(t)
        .map(|w| SymbolSpec {
            cached_by: w.clone(),
            key: SymbolKey::UserSet(w),
        })
        .collect();
    debug_assert_eq!(symbols.len(), subpack);

    let per_user = fit_usize(&binom(k as i128 - 1, t as i128 - 1), "C(K-1, t-1)")?;
    let memory = symmetric_memory(net, &symbols, files, subpack, per_user)?;
    debug_assert_eq!(
        memory,
        rat::rat(t as i64, k as i64) * rat::int(files as i64)
    );

    Ok(PlacementLayout {
        scheme: Scheme::Man { t },
        relays: net.relay_count(),
        degree: net.degree(),
        files,
        subpacketization: subpack,
        mds: None,
        symbols,
        gain: None,
        memory,
    })
}

/// Topology-aware uncoded placement (gain `K'`): one piece per `(r-1)`-subset
/// of relays `Y`, cached by every user outside the common-user group of `Y`.
/// `M = N (1 - r / K'')`.
pub fn asym_uncoded_placement(net: &CombinationNetwork, files: usize) -> Result<PlacementLayout> {
    check_files(files)?;
    let subpack = net.placement_subset_count();
    check_enum_budget(subpack)?;

    let mut symbols = Vec::with_capacity(subpack);
    for y in net.placement_subsets() {
        let c = Collection::new(vec![y])?;
        let cached_by = collection_cached_by(net, &c)?;
        symbols.push(SymbolSpec {
            key: SymbolKey::Collection(c),
            cached_by,
        });
    }

    let per_user = subpack - net.degree();
    let memory = symmetric_memory(net, &symbols, files, subpack, per_user)?;

    Ok(PlacementLayout {
        scheme: Scheme::Asym,
        relays: net.relay_count(),
        degree: net.degree(),
        files,
        subpacketization: subpack,
        mds: None,
        symbols,
        gain: Some(net.users_per_relay()),
        memory,
    })
}

fn check_gain(net: &CombinationNetwork, gain: usize) -> Result<usize> {
    let k1 = net.users_per_relay();
    if gain < 2 || gain > k1 {
        return Err(Error::Parameter(format!(
            "gain g={gain} not in 2..={k1} for this network"
        )));
    }
    Ok(k1 - gain + 1)
}

/// Topology-aware MDS-precoded placement for gain `g in [2..=K']`.
///
/// With `q = K' - g + 1`, each file is split into
/// `C(K''-r, q) + r C(K'-1, q-1)` pieces, expanded by a `(C(K'', q), ...)`
/// MDS code, and the symbol of collection `Q` is cached by the users outside
/// the union of the common-user groups of `Q`'s subsets. When `q = 1` no
/// precoding is needed and the layout reduces to
/// [`asym_uncoded_placement`]'s symbol map.
pub fn asym_coded_placement(
    net: &CombinationNetwork,
    files: usize,
    gain: usize,
) -> Result<PlacementLayout> {
    check_files(files)?;
    let q = check_gain(net, gain)?;
    let r = net.degree() as i128;
    let k1 = net.users_per_relay() as i128;
    let k2 = net.placement_subset_count() as i128;

    let n = fit_usize(&binom(k2, q as i128), "C(K'', q)")?;
    check_enum_budget(n)?;
    let cached = fit_usize(&binom(k2 - r, q as i128), "C(K''-r, q)")?;
    let delivered = net.degree() * fit_usize(&binom(k1 - 1, q as i128 - 1), "C(K'-1, q-1)")?;
    let subpack = cached + delivered;

    // Blocklengths past the field size still describe a valid symbolic
    // layout; only bit-level encoding rejects them (in `encode_files`).
    let mds = if q == 1 {
        debug_assert_eq!(n, subpack);
        None
    } else {
        Some(MdsParams { n, k: subpack })
    };

    let mut symbols = Vec::with_capacity(n);
    for c in combinatorics::enumerate_collections(net, q)? {
        let cached_by = collection_cached_by(net, &c)?;
        symbols.push(SymbolSpec {
            key: SymbolKey::Collection(c),
            cached_by,
        });
    }

    let memory = symmetric_memory(net, &symbols, files, subpack, cached)?;

    Ok(PlacementLayout {
        scheme: Scheme::Coded { g: gain },
        relays: net.relay_count(),
        degree: net.degree(),
        files,
        subpacketization: subpack,
        mds,
        symbols,
        gain: Some(gain),
        memory,
    })
}

/// Coded placement with covering collections dropped: collections whose
/// subsets jointly cover all relays are never delivered to anyone, so their
/// symbols need not exist. Shrinks the code to
/// `(#non-covering collections, G + r C(K'-1, q-1))` with `G` the pruned
/// per-user cached count. The delivered symbol set per user is identical to
/// [`asym_coded_placement`]'s.
pub fn improved_placement(
    net: &CombinationNetwork,
    files: usize,
    gain: usize,
) -> Result<PlacementLayout> {
    check_files(files)?;
    let q = check_gain(net, gain)?;
    let k1 = net.users_per_relay() as i128;
    let k2 = net.placement_subset_count() as i128;

    let total = fit_usize(&binom(k2, q as i128), "C(K'', q)")?;
    check_enum_budget(total)?;

    let cached = fit_usize(
        &pruned_cached_per_user(net.relay_count(), net.degree(), q),
        "pruned cached count",
    )?;
    let delivered = net.degree() * fit_usize(&binom(k1 - 1, q as i128 - 1), "C(K'-1, q-1)")?;
    let subpack = cached + delivered;

    let mut symbols = Vec::new();
    for c in combinatorics::enumerate_collections(net, q)? {
        if c.covers_all_relays(net.relay_count()) {
            continue;
        }
        let cached_by = collection_cached_by(net, &c)?;
        symbols.push(SymbolSpec {
            key: SymbolKey::Collection(c),
            cached_by,
        });
    }

    let n = symbols.len();
    let mds = if n == subpack {
        None
    } else {
        Some(MdsParams { n, k: subpack })
    };

    let memory = symmetric_memory(net, &symbols, files, subpack, cached)?;

    Ok(PlacementLayout {
        scheme: Scheme::Improved { g: gain },
        relays: net.relay_count(),
        degree: net.degree(),
        files,
        subpacketization: subpack,
        mds,
        symbols,
        gain: Some(gain),
        memory,
    })
}

/// Minimum cache size (in files) at which the relay-partition MDS baseline
/// reaches gain `g`: `H (g-1) N / (r K)`. Values above `N` are infeasible;
/// see [`zewail_feasible`].
pub fn zewail_min_memory(net: &CombinationNetwork, files: usize, gain: usize) -> Result<Rat> {
    check_files(files)?;
    if gain < 2 {
        return Err(Error::Parameter(format!(
            "gain g={gain} must be at least 2"
        )));
    }
    Ok(
        rat::int((net.relay_count() * (gain - 1)) as i64) * rat::int(files as i64)
            / rat::int((net.degree() * net.user_count()) as i64),
    )
}

/// True when a baseline memory requirement fits in the cache budget `M <= N`.
pub fn zewail_feasible(memory: &Rat, files: usize) -> bool {
    *memory <= rat::int(files as i64)
}

/// Smallest file size `B0` (bytes) such that any multiple splits evenly
/// through placement and delivery: subpacketization, every subfile-split
/// factor the routing can produce, and the 2-byte field width.
pub fn required_block_size(net: &CombinationNetwork, layout: &PlacementLayout) -> usize {
    let mut factor = 1usize;
    if let Scheme::Man { .. } = layout.scheme {
        // Adaptive routing splits a subfile across every tied best relay;
        // collect all split sizes that can occur. Ties depend only on the
        // topology and the cached-by sets, not on the demand.
        for user in 1..=net.user_count() {
            for spec in &layout.symbols {
                if sets::contains(&spec.cached_by, user) {
                    continue;
                }
                let ties = crate::delivery::srds_best_relays(net, user, &spec.cached_by)
                    .expect("layout user ids are valid")
                    .len();
                factor = lcm(factor, ties);
            }
        }
    }
    layout.subpacketization * factor * 2
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All coded symbols of all files: `per_file[i][s]` holds the bytes of
/// symbol `s` of file `i+1`.
#[derive(Debug, Clone)]
pub struct SymbolStore {
    pub per_file: Vec<Vec<Vec<u8>>>,
    pub symbol_len: usize,
}

/// Per-user cache after bit-level placement.
#[derive(Debug, Clone)]
pub struct CacheContent {
    /// `per_user[k-1]` lists `(symbol id, bytes)` in deterministic order.
    pub per_user: Vec<Vec<(SymbolId, Vec<u8>)>>,
}

impl CacheContent {
    /// Total bytes cached by one user.
    pub fn user_bytes(&self, user: usize) -> usize {
        self.per_user[user - 1].iter().map(|(_, b)| b.len()).sum()
    }

    /// Bytes of one cached symbol, if present.
    pub fn lookup(&self, user: usize, id: SymbolId) -> Option<&[u8]> {
        self.per_user[user - 1]
            .binary_search_by(|(sid, _)| sid.cmp(&id))
            .ok()
            .map(|pos| self.per_user[user - 1][pos].1.as_slice())
    }
}

/// Split files into pieces and expand them into the layout's symbols.
pub fn encode_files(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    files: &[Vec<u8>],
) -> Result<SymbolStore> {
    if files.len() != layout.files {
        return Err(Error::Parameter(format!(
            "expected {} files, got {}",
            layout.files,
            files.len()
        )));
    }
    let b = files.first().map(|f| f.len()).unwrap_or(0);
    if files.iter().any(|f| f.len() != b) {
        return Err(Error::Parameter("files must share one length".into()));
    }
    let unit = required_block_size(net, layout);
    if b == 0 || !b.is_multiple_of(unit) {
        return Err(Error::BlockSize {
            given: b,
            required: unit,
        });
    }

    let piece_len = b / layout.subpacketization;
    let mut per_file = Vec::with_capacity(files.len());
    for file in files {
        let pieces: Vec<Vec<u8>> = file.chunks_exact(piece_len).map(|c| c.to_vec()).collect();
        debug_assert_eq!(pieces.len(), layout.subpacketization);
        let symbols = match layout.mds {
            None => pieces,
            Some(MdsParams { n, k }) => MdsCode::new(n, k)?.encode(&pieces)?,
        };
        debug_assert_eq!(symbols.len(), layout.symbol_count());
        per_file.push(symbols);
    }
    Ok(SymbolStore {
        per_file,
        symbol_len: piece_len,
    })
}

/// Select each user's cached symbols out of a symbol store.
pub fn cache_from_store(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    store: &SymbolStore,
) -> CacheContent {
    let mut per_user = vec![Vec::new(); net.user_count()];
    for (file_idx, symbols) in store.per_file.iter().enumerate() {
        for (idx, spec) in layout.symbols.iter().enumerate() {
            for &u in &spec.cached_by {
                per_user[u - 1].push((
                    SymbolId {
                        file: file_idx + 1,
                        index: idx,
                    },
                    symbols[idx].clone(),
                ));
            }
        }
    }
    // (file, index) pairs were pushed in increasing order already; keep the
    // invariant explicit for the binary-search lookup.
    for cache in &mut per_user {
        cache.sort_by_key(|(id, _)| *id);
    }
    CacheContent { per_user }
}

/// Bit-level placement: encode the files and fill every cache.
pub fn place_bits(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    files: &[Vec<u8>],
) -> Result<CacheContent> {
    let store = encode_files(net, layout, files)?;
    Ok(cache_from_store(net, layout, &store))
}
