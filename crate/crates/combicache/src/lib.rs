//! Coded caching for combination networks.
//!
//! A combination network connects a server holding `N` files through `H`
//! cacheless relays to `K = C(H, r)` users, one user per `r`-subset of
//! relays. Every user has a cache of `M` files. This crate builds such
//! networks, places cache content with several schemes (symmetric uncoded,
//! topology-aware uncoded, topology-aware MDS-precoded, and a pruned variant
//! of the latter), generates XOR multicast delivery plans, and accounts every
//! link load as an exact rational. A bit-level simulator checks that every
//! user reconstructs its demanded file from its cache plus the multicast
//! transcript, byte for byte.
//!
//! All memory sizes and link loads are `num::BigRational`; floating point
//! appears only when formatting output. The crate is organized around the
//! pipeline:
//!
//! ```text
//! topology ──► placement ──► delivery ──► verify
//!     │            │             │
//!     └── combinatorics          └── load reports
//!              │
//!          mdscodec          bounds (tradeoff curves, envelopes)
//! ```
//!
//! The `combicache` binary exposes the same pipeline as subcommands
//! (`topology`, `place`, `deliver`, `verify`, `curve`, `compare`, `optimal`,
//! `lemma1`, `fixtures`).

pub mod bounds;
pub mod combinatorics;
pub mod delivery;
pub mod error;
pub mod mdscodec;
pub mod placement;
pub mod rat;
pub mod sets;
pub mod topology;
pub mod verify;

pub mod cli;

pub use error::Error;
pub use rat::Rat;
pub use topology::CombinationNetwork;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

// The guide under book/ doubles as a doc-test suite: every fenced Rust block
// in the chapters is compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(network_model, "../../../book/src/network-model.md");
    chapter!(placement, "../../../book/src/placement.md");
    chapter!(delivery, "../../../book/src/delivery.md");
    chapter!(mds_precoding, "../../../book/src/mds-precoding.md");
    chapter!(tradeoffs, "../../../book/src/tradeoffs.md");
    chapter!(verification, "../../../book/src/verification.md");
    chapter!(cli, "../../../book/src/cli.md");
}
