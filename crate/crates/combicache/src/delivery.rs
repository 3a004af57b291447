//! Multicast delivery and exact link-load accounting.
//!
//! Delivery fills per-relay T-sets — "bits user `k` must recover from relay
//! `h`, already known to this set of co-served users" — and XORs T-sets with
//! matching target groups into multicast messages. Two fillers exist:
//!
//! * Symmetric (subfile) layouts route adaptively: each needed subfile goes
//!   through the relay(s) of the demanding user connected to the most users
//!   that cache it ([`srds_best_relays`]), split evenly across ties.
//! * Topology-aware layouts enumerate `(user, relay, target group)` triples
//!   of size `|J| = g` and place the symbol of the collection built by
//!   [`construct_q_prime`] — by construction that symbol is known to exactly
//!   `J \ {k}` among the relay's users. The argmax routing would coincide for
//!   large gains; the plan cross-checks the two assignments and counts
//!   divergences instead of assuming either.
//!
//! Message lengths, per-link loads and the measured multicast gain are exact
//! rationals in units of the file size `B`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{BigUint, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::combinatorics::enumeration_cap;
use crate::error::Error;
use crate::placement::{PlacementLayout, Scheme, SymbolKey};
use crate::rat::{self, Rat};
use crate::sets;
use crate::topology::CombinationNetwork;
use crate::Result;

/// One file index per user, `d[k-1] in 1..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(net: &CombinationNetwork, files: usize, d: Vec<usize>) -> Result<Self> {
        if d.len() != net.user_count() {
            return Err(Error::Parameter(format!(
                "demand vector has {} entries for {} users",
                d.len(),
                net.user_count()
            )));
        }
        if let Some(bad) = d.iter().find(|&&f| f == 0 || f > files) {
            return Err(Error::Parameter(format!(
                "demanded file {bad} not in 1..={files}"
            )));
        }
        Ok(DemandVector(d))
    }

    /// The all-distinct demand `d = (1, ..., K)`; needs `N >= K`.
    pub fn distinct(net: &CombinationNetwork, files: usize) -> Result<Self> {
        if files < net.user_count() {
            return Err(Error::Parameter(format!(
                "distinct demands need N >= K, got N={files}, K={}",
                net.user_count()
            )));
        }
        Ok(DemandVector((1..=net.user_count()).collect()))
    }

    pub fn file_for(&self, user: usize) -> usize {
        self.0[user - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// One piece of one coded symbol: `piece_index` of `piece_count` equal slices
/// of symbol `symbol` of file `file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PieceRef {
    pub file: usize,
    pub symbol: usize,
    pub piece_index: usize,
    pub piece_count: usize,
}

/// The T-set of one user inside one message: every listed piece is demanded
/// by `user`, absent from its cache, and cached by all other users targeted
/// by the message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub user: usize,
    pub pieces: Vec<PieceRef>,
}

/// XOR multicast message sent to one relay and forwarded to `targets`.
///
/// Payloads of unequal length are zero-extended to the longest summand, so
/// `length` is the maximum summand length (in units of `B`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastMessage {
    pub relay: usize,
    pub targets: Vec<usize>,
    pub summands: Vec<Summand>,
    pub length: Rat,
}

/// Anchored-vs-argmax routing cross-check for topology-aware deliveries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoutingDiagnostics {
    /// Symbol assignments checked.
    pub checked: usize,
    /// Assignments where the tie-free argmax relay set differs from the
    /// anchored relay. Loads are unaffected; the count is reported so the
    /// small-gain regime can be observed rather than assumed.
    pub divergences: usize,
}

/// Complete delivery plan for one demand vector.
#[derive(Debug, Clone)]
pub struct DeliveryPlan {
    pub scheme: Scheme,
    pub relays: usize,
    pub user_count: usize,
    pub files: usize,
    pub memory: Rat,
    pub gain_target: Option<usize>,
    /// Messages sorted by (relay, targets); construction is deterministic.
    pub messages: Vec<MulticastMessage>,
    pub diagnostics: Option<RoutingDiagnostics>,
}

/// Per-link loads of one plan, in units of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    /// Server-to-relay load per relay (index `h-1`).
    pub relay_loads: Vec<Rat>,
    /// Relay-to-user loads for links that carry bits, sorted by `(h, k)`.
    pub link_loads: Vec<(usize, usize, Rat)>,
    /// Maximum over all listed links.
    pub max_link_load: Rat,
    /// Uncoded-routing load divided by the achieved load,
    /// `(K/H)(1 - M/N) / max`; `None` when nothing is sent.
    pub measured_gain: Option<Rat>,
}

/// The relays of `user` connected to the most users of `others`: the full
/// argmax set (ties included) over the user's relays.
pub fn srds_best_relays(
    net: &CombinationNetwork,
    user: usize,
    others: &[usize],
) -> Result<Vec<usize>> {
    if sets::contains(others, user) {
        return Err(Error::Parameter(format!(
            "user {user} may not appear in its own known-set"
        )));
    }
    let relays = net.relays_of_user(user)?;
    let overlaps: Vec<usize> = relays
        .iter()
        .map(|&h| sets::intersect(net.users_of_relay(h).expect("relay of user"), others).len())
        .collect();
    let best = *overlaps.iter().max().expect("user has at least one relay");
    Ok(relays
        .iter()
        .zip(&overlaps)
        .filter(|(_, &o)| o == best)
        .map(|(&h, _)| h)
        .collect())
}

/// The collection anchoring the symbol that message `(relay, targets)`
/// delivers to `user`: one `(r-1)`-subset per non-target user of the relay,
/// plus the user's own remaining relays. Exactly the users `targets \ {user}`
/// know the resulting symbol among the relay's users.
pub fn construct_q_prime(
    net: &CombinationNetwork,
    user: usize,
    relay: usize,
    targets: &[usize],
) -> Result<crate::combinatorics::Collection> {
    let user_relays = net.relays_of_user(user)?;
    if !sets::contains(user_relays, relay) {
        return Err(Error::Parameter(format!(
            "relay {relay} does not serve user {user}"
        )));
    }
    let relay_users = net.users_of_relay(relay)?;
    if !sets::is_subset(targets, relay_users) {
        return Err(Error::Parameter(
            "targets must all be connected to the relay".into(),
        ));
    }
    if !sets::contains(targets, user) {
        return Err(Error::Parameter(format!(
            "user {user} missing from its own target group"
        )));
    }
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(relay_users.len() - targets.len() + 1);
    for &other in relay_users {
        if sets::contains(targets, other) {
            continue;
        }
        members.push(sets::minus(net.relays_of_user(other)?, &[relay]));
    }
    members.push(sets::minus(user_relays, &[relay]));
    crate::combinatorics::Collection::new(members)
}

/// Build the full multicast plan for one demand vector.
pub fn build_delivery(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    demand: &DemandVector,
) -> Result<DeliveryPlan> {
    if demand.as_slice().len() != net.user_count() {
        return Err(Error::Parameter("demand/topology size mismatch".into()));
    }
    if layout.relays != net.relay_count() || layout.degree != net.degree() {
        return Err(Error::Parameter(
            "layout built for a different network".into(),
        ));
    }
    let (messages, diagnostics) = match layout.scheme {
        Scheme::Man { .. } => (subfile_messages(net, layout, demand)?, None),
        _ => {
            let gain = layout.gain.expect("topology-aware layouts carry a gain");
            let (messages, diag) = anchored_messages(net, layout, demand, gain)?;
            (messages, Some(diag))
        }
    };
    Ok(DeliveryPlan {
        scheme: layout.scheme,
        relays: net.relay_count(),
        user_count: net.user_count(),
        files: layout.files,
        memory: layout.memory.clone(),
        gain_target: layout.gain,
        messages,
        diagnostics,
    })
}

/// Adaptive filler for symmetric subfile layouts: route every needed subfile
/// through the best relay(s), splitting across ties.
fn subfile_messages(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    demand: &DemandVector,
) -> Result<Vec<MulticastMessage>> {
    // (relay, targets) -> user -> pieces.
    let mut tsets: BTreeMap<(usize, Vec<usize>), BTreeMap<usize, Vec<PieceRef>>> = BTreeMap::new();
    for user in 1..=net.user_count() {
        for (idx, spec) in layout.symbols.iter().enumerate() {
            if sets::contains(&spec.cached_by, user) {
                continue;
            }
            let best = srds_best_relays(net, user, &spec.cached_by)?;
            for (pos, &relay) in best.iter().enumerate() {
                let known = sets::intersect(&spec.cached_by, net.users_of_relay(relay)?);
                let targets = sets::union(&known, &[user]);
                tsets
                    .entry((relay, targets))
                    .or_default()
                    .entry(user)
                    .or_default()
                    .push(PieceRef {
                        file: demand.file_for(user),
                        symbol: idx,
                        piece_index: pos,
                        piece_count: best.len(),
                    });
            }
        }
    }

    let piece_base = layout.symbol_fraction();
    let mut messages = Vec::with_capacity(tsets.len());
    for ((relay, targets), by_user) in tsets {
        let summands: Vec<Summand> = by_user
            .into_iter()
            .map(|(user, pieces)| Summand { user, pieces })
            .collect();
        let length = summands
            .iter()
            .map(|s| summand_length(&piece_base, s))
            .max()
            .expect("message has at least one summand");
        messages.push(MulticastMessage {
            relay,
            targets,
            summands,
            length,
        });
    }
    Ok(messages)
}

fn summand_length(piece_base: &Rat, s: &Summand) -> Rat {
    s.pieces
        .iter()
        .map(|p| piece_base / rat::int(p.piece_count as i64))
        .sum()
}

/// Anchored filler for topology-aware layouts: one symbol per
/// `(user, relay, target group of size g)`, every message XORs exactly `g`
/// equal-length symbols.
fn anchored_messages(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    demand: &DemandVector,
    gain: usize,
) -> Result<(Vec<MulticastMessage>, RoutingDiagnostics)> {
    let key_index = layout.key_index();
    let length = layout.symbol_fraction();
    let mut diag = RoutingDiagnostics::default();
    let mut messages = Vec::new();
    for relay in 1..=net.relay_count() {
        let relay_users = net.users_of_relay(relay)?.to_vec();
        for targets in relay_users.iter().copied().combinations(gain) {
            let mut summands = Vec::with_capacity(gain);
            for &user in &targets {
                let anchor = construct_q_prime(net, user, relay, &targets)?;
                let key = SymbolKey::Collection(anchor);
                let idx = *key_index.get(&key).ok_or_else(|| {
                    Error::Parameter(
                        "anchored collection missing from layout; layout and topology disagree"
                            .into(),
                    )
                })?;
                // Cross-check against pure argmax routing (ties count as
                // divergence unless the anchored relay is the unique best).
                let argmax = srds_best_relays(net, user, &layout.symbols[idx].cached_by)?;
                diag.checked += 1;
                if argmax != [relay] {
                    diag.divergences += 1;
                }
                summands.push(Summand {
                    user,
                    pieces: vec![PieceRef {
                        file: demand.file_for(user),
                        symbol: idx,
                        piece_index: 0,
                        piece_count: 1,
                    }],
                });
            }
            messages.push(MulticastMessage {
                relay,
                targets,
                summands,
                length: length.clone(),
            });
        }
    }
    Ok((messages, diag))
}

/// Exact per-link loads of a plan.
pub fn load_report(plan: &DeliveryPlan) -> LoadReport {
    let mut relay_loads = vec![Rat::zero(); plan.relays];
    let mut per_link: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for msg in &plan.messages {
        relay_loads[msg.relay - 1] += msg.length.clone();
        for &k in &msg.targets {
            *per_link.entry((msg.relay, k)).or_insert_with(Rat::zero) += msg.length.clone();
        }
    }
    let mut max = Rat::zero();
    for l in relay_loads.iter().chain(per_link.values()) {
        if *l > max {
            max = l.clone();
        }
    }
    let measured_gain = if max.is_zero() {
        None
    } else {
        let routing = rat::rat(plan.user_count as i64, plan.relays as i64)
            * (rat::one() - &plan.memory / rat::int(plan.files as i64));
        Some(routing / max.clone())
    };
    LoadReport {
        relay_loads,
        link_loads: per_link.into_iter().map(|((h, k), l)| (h, k, l)).collect(),
        max_link_load: max,
        measured_gain,
    }
}

/// Demand sets over which worst-case loads are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandPolicy {
    /// The single all-distinct demand `d = (1..K)`; needs `N >= K`.
    Distinct,
    /// Every demand in `[1..N]^K`, guarded by the enumeration cap.
    All,
    /// `count` seeded uniform samples; reproducible.
    Sampled { count: u64, seed: u64 },
}

impl std::fmt::Display for DemandPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DemandPolicy::Distinct => write!(f, "distinct"),
            DemandPolicy::All => write!(f, "all"),
            DemandPolicy::Sampled { count, seed } => write!(f, "sample:{count}:{seed}"),
        }
    }
}

/// Worst observed load over a demand policy.
#[derive(Debug, Clone)]
pub struct WorstCaseReport {
    pub policy: DemandPolicy,
    pub evaluated: u64,
    pub worst_demand: DemandVector,
    pub report: LoadReport,
}

/// Maximize the max-link load over the policy's demand set. Deterministic:
/// the first demand attaining the maximum is reported.
pub fn worst_case_load(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    policy: DemandPolicy,
) -> Result<WorstCaseReport> {
    let files = layout.files;
    let mut evaluated = 0u64;
    let mut worst: Option<(DemandVector, LoadReport)> = None;

    let mut consider = |demand: DemandVector| -> Result<()> {
        let report = load_report(&build_delivery(net, layout, &demand)?);
        evaluated += 1;
        let better = match &worst {
            None => true,
            Some((_, best)) => report.max_link_load > best.max_link_load,
        };
        if better {
            worst = Some((demand, report));
        }
        Ok(())
    };

    match policy {
        DemandPolicy::Distinct => {
            consider(DemandVector::distinct(net, files)?)?;
        }
        DemandPolicy::All => {
            let total = BigUint::from(files).pow(net.user_count() as u32);
            let cap = enumeration_cap();
            if total > BigUint::from(cap) {
                return Err(Error::EnumerationCap { needed: total, cap });
            }
            let k = net.user_count();
            let mut d = vec![1usize; k];
            loop {
                consider(DemandVector::new(net, files, d.clone())?)?;
                // Odometer increment.
                let mut pos = k;
                while pos > 0 {
                    if d[pos - 1] < files {
                        d[pos - 1] += 1;
                        break;
                    }
                    d[pos - 1] = 1;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
            }
        }
        DemandPolicy::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::Parameter("sample count must be positive".into()));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            for _ in 0..count {
                let d: Vec<usize> = (0..net.user_count())
                    .map(|_| rng.random_range(1..=files))
                    .collect();
                consider(DemandVector::new(net, files, d)?)?;
            }
        }
    }

    let (worst_demand, report) = worst.expect("every policy evaluates at least one demand");
    Ok(WorstCaseReport {
        policy,
        evaluated,
        worst_demand,
        report,
    })
}
