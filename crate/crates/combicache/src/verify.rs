//! Bit-exact end-to-end verification.
//!
//! A simulation run draws random files from a seeded generator, places them
//! with a layout, builds the multicast transcript for a demand vector, and
//! then lets every user decode *only* from its own cache plus the messages
//! addressed to it. Reconstruction must match the demanded file byte for
//! byte; failures are first-class result values (never panics) so negative
//! cases are testable. Byte counts on every link equal the exact rational
//! loads times the file size.
//!
//! The file generator is ChaCha20 keyed by the run seed; runs are replayable
//! across platforms and the algorithm identifier is recorded in the run.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::delivery::{self, DeliveryPlan, DemandVector, MulticastMessage};
use crate::error::Error;
use crate::mdscodec::MdsCode;
use crate::placement::{
    cache_from_store, encode_files, required_block_size, CacheContent, PlacementLayout, SymbolId,
    SymbolStore,
};
use crate::sets;
use crate::topology::CombinationNetwork;
use crate::Result;

/// Identifier of the file generator, recorded for replayability.
pub const RNG_ALGORITHM: &str = "chacha20";

/// Why one user failed to rebuild its file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeFailure {
    /// Symbols the user needed but could not obtain.
    pub missing: Vec<SymbolId>,
    pub detail: String,
}

impl std::fmt::Display for DecodeFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.missing.is_empty() {
            write!(f, "{}", self.detail)
        } else {
            write!(f, "{} (missing: {:?})", self.detail, self.missing)
        }
    }
}

/// Per-user result of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UserOutcome {
    Recovered,
    Failed(DecodeFailure),
}

/// Multicast bytes per message, parallel to the plan's message list.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub message_bytes: Vec<Vec<u8>>,
    /// Bytes per coded symbol at this file size.
    pub symbol_len: usize,
}

/// Everything a run materializes before decoding.
#[derive(Debug, Clone)]
pub struct SimulationParts {
    pub files: Vec<Vec<u8>>,
    pub store: SymbolStore,
    pub caches: CacheContent,
    pub plan: DeliveryPlan,
    pub transcript: Transcript,
}

/// Outcome record of one bit-level run.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub file_size: usize,
    pub demand: DemandVector,
    /// Index `k-1`.
    pub outcomes: Vec<UserOutcome>,
    /// Bytes actually sent on each server-to-relay link (index `h-1`).
    pub server_relay_bytes: Vec<usize>,
    /// Bytes forwarded on carrying relay-to-user links, sorted by `(h, k)`.
    pub relay_user_bytes: Vec<(usize, usize, usize)>,
    pub ok: bool,
}

/// N random files of `size` bytes from the seeded generator.
pub fn generate_files(count: usize, size: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut f = vec![0u8; size];
            rng.fill_bytes(&mut f);
            f
        })
        .collect()
}

/// Concatenate a summand's pieces out of a symbol store.
fn summand_bytes(store: &SymbolStore, summand: &delivery::Summand) -> Vec<u8> {
    let mut out = Vec::new();
    for p in &summand.pieces {
        let symbol = &store.per_file[p.file - 1][p.symbol];
        let piece_len = symbol.len() / p.piece_count;
        out.extend_from_slice(&symbol[p.piece_index * piece_len..(p.piece_index + 1) * piece_len]);
    }
    out
}

/// XOR all summand payloads, zero-extending shorter ones.
fn message_bytes(store: &SymbolStore, msg: &MulticastMessage) -> Vec<u8> {
    let mut acc: Vec<u8> = Vec::new();
    for s in &msg.summands {
        let payload = summand_bytes(store, s);
        if payload.len() > acc.len() {
            acc.resize(payload.len(), 0);
        }
        for (a, b) in acc.iter_mut().zip(payload.iter()) {
            *a ^= b;
        }
    }
    acc
}

/// Generate files, place them, and materialize the multicast transcript.
pub fn prepare(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    demand: &DemandVector,
    file_size: usize,
    seed: u64,
) -> Result<SimulationParts> {
    let unit = required_block_size(net, layout);
    if file_size == 0 || !file_size.is_multiple_of(unit) {
        return Err(Error::BlockSize {
            given: file_size,
            required: unit,
        });
    }
    let files = generate_files(layout.files, file_size, seed);
    let store = encode_files(net, layout, &files)?;
    let caches = cache_from_store(net, layout, &store);
    let plan = delivery::build_delivery(net, layout, demand)?;
    let transcript_bytes: Vec<Vec<u8>> = plan
        .messages
        .iter()
        .map(|m| message_bytes(&store, m))
        .collect();
    let symbol_len = file_size / layout.subpacketization;
    Ok(SimulationParts {
        files,
        store,
        caches,
        plan,
        transcript: Transcript {
            message_bytes: transcript_bytes,
            symbol_len,
        },
    })
}

fn cache_piece<'c>(
    cache: &'c [(SymbolId, Vec<u8>)],
    piece: &delivery::PieceRef,
) -> Option<&'c [u8]> {
    let id = SymbolId {
        file: piece.file,
        index: piece.symbol,
    };
    let pos = cache.binary_search_by(|(sid, _)| sid.cmp(&id)).ok()?;
    let symbol = cache[pos].1.as_slice();
    let piece_len = symbol.len() / piece.piece_count;
    Some(&symbol[piece.piece_index * piece_len..(piece.piece_index + 1) * piece_len])
}

/// Rebuild `file` for `user` from its cache slice and the transcript
/// messages addressed to it. Fails with the unrecoverable symbol ids rather
/// than panicking.
pub fn decode_user(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    plan: &DeliveryPlan,
    transcript: &Transcript,
    user: usize,
    cache: &[(SymbolId, Vec<u8>)],
    file: usize,
) -> std::result::Result<Vec<u8>, DecodeFailure> {
    let symbol_len = transcript.symbol_len;
    // symbol index -> (split factor, piece index -> bytes).
    let mut recovered: BTreeMap<usize, (usize, BTreeMap<usize, Vec<u8>>)> = BTreeMap::new();

    for (msg, bytes) in plan.messages.iter().zip(&transcript.message_bytes) {
        if !sets::contains(&msg.targets, user) {
            continue;
        }
        let Some(own) = msg.summands.iter().find(|s| s.user == user) else {
            // Forwarded to this user only as a cache-holder; nothing to learn.
            continue;
        };
        let mut acc = bytes.clone();
        for other in msg.summands.iter().filter(|s| s.user != user) {
            let mut offset = 0usize;
            for p in &other.pieces {
                let len = symbol_len / p.piece_count;
                let Some(piece) = cache_piece(cache, p) else {
                    return Err(DecodeFailure {
                        missing: vec![SymbolId {
                            file: p.file,
                            index: p.symbol,
                        }],
                        detail: format!(
                            "user {user} lacks the cached symbol needed to cancel a peer payload"
                        ),
                    });
                };
                for (a, b) in acc[offset..offset + len].iter_mut().zip(piece.iter()) {
                    *a ^= b;
                }
                offset += len;
            }
        }
        // What remains (up to padding) is the user's own payload. Delivered
        // pieces always carry the user's demanded file; skip anything else
        // while keeping the offsets aligned.
        let mut offset = 0usize;
        for p in &own.pieces {
            let len = symbol_len / p.piece_count;
            if p.file == file {
                let entry = recovered
                    .entry(p.symbol)
                    .or_insert_with(|| (p.piece_count, BTreeMap::new()));
                entry
                    .1
                    .insert(p.piece_index, acc[offset..offset + len].to_vec());
            }
            offset += len;
        }
    }

    let assemble_symbol = |idx: usize| -> Option<Vec<u8>> {
        let id = SymbolId { file, index: idx };
        if let Ok(pos) = cache.binary_search_by(|(sid, _)| sid.cmp(&id)) {
            return Some(cache[pos].1.clone());
        }
        let (count, pieces) = recovered.get(&idx)?;
        if pieces.len() != *count {
            return None;
        }
        let mut out = Vec::with_capacity(symbol_len);
        for piece in pieces.values() {
            out.extend_from_slice(piece);
        }
        Some(out)
    };

    match layout.mds {
        None => {
            // Every symbol of the demanded file is needed, in order.
            let mut out = Vec::with_capacity(symbol_len * layout.symbol_count());
            let mut missing = Vec::new();
            for idx in 0..layout.symbol_count() {
                match assemble_symbol(idx) {
                    Some(bytes) => out.extend_from_slice(&bytes),
                    None => missing.push(SymbolId { file, index: idx }),
                }
            }
            if missing.is_empty() {
                Ok(out)
            } else {
                Err(DecodeFailure {
                    detail: format!("user {user} is missing {} subfile(s)", missing.len()),
                    missing,
                })
            }
        }
        Some(params) => {
            let mut shares: Vec<(usize, Vec<u8>)> = Vec::new();
            for idx in 0..layout.symbol_count() {
                if let Some(bytes) = assemble_symbol(idx) {
                    shares.push((idx, bytes));
                }
            }
            if shares.len() < params.k {
                // Name the delivery-class symbols that never arrived.
                let mut missing = Vec::new();
                for (idx, spec) in layout.symbols.iter().enumerate() {
                    if shares.iter().any(|(i, _)| *i == idx) {
                        continue;
                    }
                    if let crate::placement::SymbolKey::Collection(c) = &spec.key {
                        if matches!(
                            crate::combinatorics::classify(net, c, user),
                            Ok(crate::combinatorics::CollectionClass::Delivered)
                        ) {
                            missing.push(SymbolId { file, index: idx });
                        }
                    }
                }
                return Err(DecodeFailure {
                    detail: format!(
                        "user {user} holds {} of {} required symbols",
                        shares.len(),
                        params.k
                    ),
                    missing,
                });
            }
            let code = MdsCode::new(params.n, params.k).map_err(|e| DecodeFailure {
                missing: Vec::new(),
                detail: e.to_string(),
            })?;
            let sources = code.decode(&shares).map_err(|e| DecodeFailure {
                missing: Vec::new(),
                detail: e.to_string(),
            })?;
            Ok(sources.concat())
        }
    }
}

/// Decode every user against prepared parts and compare byte for byte.
pub fn run_decoding(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    parts: &SimulationParts,
    demand: &DemandVector,
    seed: u64,
) -> SimulationRun {
    let mut outcomes = Vec::with_capacity(net.user_count());
    for user in 1..=net.user_count() {
        let wanted = demand.file_for(user);
        let outcome = match decode_user(
            net,
            layout,
            &parts.plan,
            &parts.transcript,
            user,
            &parts.caches.per_user[user - 1],
            wanted,
        ) {
            Ok(bytes) if bytes == parts.files[wanted - 1] => UserOutcome::Recovered,
            Ok(_) => UserOutcome::Failed(DecodeFailure {
                missing: Vec::new(),
                detail: format!("user {user} rebuilt file {wanted} with wrong bytes"),
            }),
            Err(f) => UserOutcome::Failed(f),
        };
        outcomes.push(outcome);
    }

    let mut server_relay_bytes = vec![0usize; net.relay_count()];
    let mut relay_user: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (msg, bytes) in parts
        .plan
        .messages
        .iter()
        .zip(&parts.transcript.message_bytes)
    {
        server_relay_bytes[msg.relay - 1] += bytes.len();
        for &k in &msg.targets {
            *relay_user.entry((msg.relay, k)).or_default() += bytes.len();
        }
    }

    let ok = outcomes.iter().all(|o| matches!(o, UserOutcome::Recovered));
    SimulationRun {
        seed,
        rng_algorithm: RNG_ALGORITHM,
        file_size: parts.files[0].len(),
        demand: demand.clone(),
        outcomes,
        server_relay_bytes,
        relay_user_bytes: relay_user
            .into_iter()
            .map(|((h, k), b)| (h, k, b))
            .collect(),
        ok,
    }
}

/// Full bit-level run: place, deliver, decode, compare.
pub fn simulate(
    net: &CombinationNetwork,
    layout: &PlacementLayout,
    demand: &DemandVector,
    file_size: usize,
    seed: u64,
) -> Result<SimulationRun> {
    let parts = prepare(net, layout, demand, file_size, seed)?;
    Ok(run_decoding(net, layout, &parts, demand, seed))
}
