//! Subset and collection combinatorics behind the placement schemes.
//!
//! A *collection* is a set of `q` distinct `(r-1)`-subsets of relays. Each
//! collection indexes one coded symbol per file; whether a given user caches,
//! receives, or ignores that symbol is decided by [`classify`]. The pruned
//! placement drops collections whose subsets jointly cover all relays, and
//! [`pruned_cached_per_user`] counts the surviving cached-class collections
//! in closed form (an alternating inclusion-exclusion sum), with
//! [`pruned_cached_per_user_bruteforce`] as the independent enumeration
//! oracle.
//!
//! All counts use exact integer arithmetic; the alternating sum forbids
//! floating point, and intermediate binomials can exceed 64 bits.

use itertools::Itertools;
use num::bigint::{BigInt, Sign};
use num::{BigUint, ToPrimitive, Zero};

use crate::error::Error;
use crate::sets;
use crate::topology::CombinationNetwork;
use crate::Result;

/// Default cap on exhaustive enumerations (collections, demand vectors).
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Enumeration cap, overridable through `COMBICACHE_MAX_ENUM`.
pub fn enumeration_cap() -> u64 {
    std::env::var("COMBICACHE_MAX_ENUM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// Binomial coefficient with the zero convention: `C(x, y) = 0` whenever
/// `x < 0`, `y < 0`, or `x < y`. Total on all integer inputs.
pub fn binom(x: i128, y: i128) -> BigUint {
    if x < 0 || y < 0 || x < y {
        return BigUint::zero();
    }
    let y = y.min(x - y);
    let mut acc = BigUint::from(1u32);
    for i in 0..y {
        acc *= BigUint::from((x - i) as u128);
        acc /= BigUint::from((i + 1) as u128);
    }
    acc
}

/// `binom` squeezed into `usize`, when it fits.
pub fn binom_usize(x: i128, y: i128) -> Option<usize> {
    binom(x, y).to_usize()
}

/// A collection: `q` distinct `(r-1)`-subsets of relays in canonical
/// (lexicographic) order. Canonical ordering makes equality structural, so
/// collections can key symbol maps directly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collection {
    subsets: Vec<Vec<usize>>,
}

impl Collection {
    /// Canonicalize and validate: every subset sorted and strictly
    /// increasing, subsets pairwise distinct.
    pub fn new(mut subsets: Vec<Vec<usize>>) -> Result<Self> {
        for s in &mut subsets {
            s.sort_unstable();
            let before = s.len();
            s.dedup();
            if s.len() != before {
                return Err(Error::Parameter("relay subset has repeated members".into()));
            }
        }
        subsets.sort();
        if subsets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("collection has repeated subsets".into()));
        }
        Ok(Collection { subsets })
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Union of all member subsets.
    pub fn union(&self) -> Vec<usize> {
        let mut acc: Vec<usize> = Vec::new();
        for s in &self.subsets {
            acc = sets::union(&acc, s);
        }
        acc
    }

    /// True if the member subsets jointly cover `[1..=relay_count]`.
    pub fn covers_all_relays(&self, relay_count: usize) -> bool {
        self.union().len() == relay_count
    }
}

/// Per-user role of one collection's symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionClass {
    /// No member subset lies inside the user's relay set: the user caches
    /// this symbol.
    Cached,
    /// Exactly one member lies inside the user's relay set and the members
    /// do not cover it: the symbol is delivered to the user.
    Delivered,
    /// The members cover the user's relay set: the user skips this symbol.
    Ignored,
}

/// Number of collections of `q` subsets, `C(K'', q)`.
pub fn collection_count(net: &CombinationNetwork, q: usize) -> BigUint {
    binom(net.placement_subset_count() as i128, q as i128)
}

/// All collections of `q` distinct `(r-1)`-subsets, canonically ordered.
pub fn enumerate_collections(
    net: &CombinationNetwork,
    q: usize,
) -> Result<impl Iterator<Item = Collection> + '_> {
    let k2 = net.placement_subset_count();
    if q == 0 || q > k2 {
        return Err(Error::Parameter(format!(
            "collection size q={q} not in 1..={k2}"
        )));
    }
    let subsets: Vec<Vec<usize>> = net.placement_subsets().collect();
    Ok(subsets
        .into_iter()
        .combinations(q)
        .map(|subsets| Collection { subsets }))
}

/// Classify one collection for one user.
pub fn classify(
    net: &CombinationNetwork,
    collection: &Collection,
    user: usize,
) -> Result<CollectionClass> {
    let relays = net.relays_of_user(user)?;
    let inside = collection
        .subsets
        .iter()
        .filter(|y| sets::is_subset(y, relays))
        .count();
    if inside == 0 {
        return Ok(CollectionClass::Cached);
    }
    let covered = sets::is_subset(relays, &collection.union());
    if covered {
        Ok(CollectionClass::Ignored)
    } else {
        // Two distinct (r-1)-subsets of the same r-set cover it, so a
        // non-covered user has exactly one member inside its relay set.
        debug_assert_eq!(inside, 1);
        Ok(CollectionClass::Delivered)
    }
}

/// Closed-form count of collections that neither cover all relays nor have a
/// member inside a fixed user's relay set. By symmetry the count is the same
/// for every user; [`pruned_cached_per_user_bruteforce`] checks that.
///
/// Evaluated as an alternating inclusion-exclusion sum over the size `a` of
/// a relay set containing the union, `a` from `r-1` to `H-1`.
pub fn pruned_cached_per_user(relays: usize, degree: usize, q: usize) -> BigUint {
    let h = relays as i128;
    let r = degree as i128;
    let q = q as i128;
    let mut total = BigInt::zero();
    let mut a = r - 1;
    while a < h {
        let inner = binom(a, r - 1)
            .to_i128()
            .expect("C(a, r-1) exceeds supported range");
        let x1 = BigInt::from(binom(h - r, a - r) * binom(inner - r, q));
        let y1 =
            BigInt::from(BigUint::from(degree) * binom(h - r, a - r + 1) * binom(inner - 1, q));
        let z1 = (BigInt::from(binom(h, a))
            - BigInt::from(BigUint::from(degree) * binom(h - r, a - r + 1))
            - BigInt::from(binom(h - r, a - r)))
            * BigInt::from(binom(inner, q));
        let term = x1 + y1 + z1;
        if (h - a + 1) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        a += 1;
    }
    let (sign, magnitude) = total.into_parts();
    assert!(
        sign != Sign::Minus,
        "alternating sum produced a negative count"
    );
    magnitude
}

/// Enumeration oracle for [`pruned_cached_per_user`]: count collections with
/// union != all relays and no member inside user `k`'s relay set. Refuses to
/// run past the enumeration cap rather than sampling; the oracle must never
/// be probabilistic.
pub fn pruned_cached_per_user_bruteforce(
    net: &CombinationNetwork,
    q: usize,
    user: usize,
) -> Result<u64> {
    net.check_user(user)?;
    let needed = collection_count(net, q);
    let cap = enumeration_cap();
    if needed > BigUint::from(cap) {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let relays = net.relays_of_user(user)?.to_vec();
    let all = net.relay_count();
    let mut count = 0u64;
    for c in enumerate_collections(net, q)? {
        let no_inside = c.subsets.iter().all(|y| !sets::is_subset(y, &relays));
        if no_inside && !c.covers_all_relays(all) {
            count += 1;
        }
    }
    Ok(count)
}

/// Per-user class census over all `C(K'', q)` collections, capped like the
/// other exhaustive enumerations.
pub fn class_census(net: &CombinationNetwork, q: usize, user: usize) -> Result<(u64, u64, u64)> {
    let needed = collection_count(net, q);
    let cap = enumeration_cap();
    if needed > BigUint::from(cap) {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let (mut cached, mut delivered, mut ignored) = (0, 0, 0);
    for c in enumerate_collections(net, q)? {
        match classify(net, &c, user)? {
            CollectionClass::Cached => cached += 1,
            CollectionClass::Delivered => delivered += 1,
            CollectionClass::Ignored => ignored += 1,
        }
    }
    Ok((cached, delivered, ignored))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(h: usize, r: usize) -> CombinationNetwork {
        CombinationNetwork::build(h, r).unwrap()
    }

    #[test]
    fn binom_zero_convention() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(2, -1), BigUint::zero());
        assert_eq!(binom(3, 5), BigUint::zero());
        assert_eq!(binom(-1, 0), BigUint::zero());
        assert_eq!(binom(0, 0), BigUint::from(1u32));
        assert_eq!(binom(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn enumerate_counts() {
        // H=4, r=2: six collections of two singleton subsets.
        let n42 = net(4, 2);
        assert_eq!(enumerate_collections(&n42, 2).unwrap().count(), 6);
        // q = K'': exactly one collection.
        assert_eq!(enumerate_collections(&n42, 4).unwrap().count(), 1);
        // H=5, r=3: ten singleton collections, one per 2-subset.
        let n53 = net(5, 3);
        assert_eq!(enumerate_collections(&n53, 1).unwrap().count(), 10);
        assert!(enumerate_collections(&n42, 0).is_err());
        assert!(enumerate_collections(&n42, 5).is_err());
    }

    #[test]
    fn enumeration_is_canonical_and_unique() {
        let n = net(4, 2);
        let all: Vec<Collection> = enumerate_collections(&n, 2).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted);
    }

    #[test]
    fn collection_canonicalization() {
        let c = Collection::new(vec![vec![3, 1], vec![2, 4]]).unwrap();
        assert_eq!(c.subsets(), &[vec![1, 3], vec![2, 4]]);
        assert!(Collection::new(vec![vec![1], vec![1]]).is_err());
        assert!(Collection::new(vec![vec![2, 2]]).is_err());
    }

    // Classification fixtures on the H=4, r=2 network, user 1 (relays {1,2}).
    #[test]
    fn classify_fixtures() {
        let n = net(4, 2);
        let delivered = Collection::new(vec![vec![1], vec![3]]).unwrap();
        assert_eq!(
            classify(&n, &delivered, 1).unwrap(),
            CollectionClass::Delivered
        );
        let ignored = Collection::new(vec![vec![1], vec![2]]).unwrap();
        assert_eq!(classify(&n, &ignored, 1).unwrap(), CollectionClass::Ignored);
        let cached = Collection::new(vec![vec![3], vec![4]]).unwrap();
        assert_eq!(classify(&n, &cached, 1).unwrap(), CollectionClass::Cached);
    }

    #[test]
    fn census_matches_closed_forms() {
        for (h, r) in [(4, 2), (5, 3), (5, 2), (6, 3)] {
            let n = net(h, r);
            let k1 = n.users_per_relay() as i128;
            let k2 = n.placement_subset_count() as i128;
            for q in 1..=(k2 as usize).min(4) {
                let expect_cached = binom(k2 - r as i128, q as i128);
                let expect_delivered = BigUint::from(r) * binom(k1 - 1, q as i128 - 1);
                for user in 1..=n.user_count() {
                    let (cached, delivered, ignored) = class_census(&n, q, user).unwrap();
                    assert_eq!(BigUint::from(cached), expect_cached, "H={h} r={r} q={q}");
                    assert_eq!(
                        BigUint::from(delivered),
                        expect_delivered,
                        "H={h} r={r} q={q}"
                    );
                    assert_eq!(
                        BigUint::from(cached + delivered + ignored),
                        collection_count(&n, q)
                    );
                }
            }
        }
    }

    #[test]
    fn pruned_count_fixtures() {
        // Frozen from the enumeration oracle: for (4,2,2) only {{3},{4}}
        // survives for user 1; term by term, a=2 contributes -1 and a=3
        // contributes +2.
        assert_eq!(pruned_cached_per_user(4, 2, 2), BigUint::from(1u32));
        // (5,3,1): all ten singleton collections have partial union; three of
        // the ten subsets sit inside any user's relay set, leaving 7.
        assert_eq!(pruned_cached_per_user(5, 3, 1), BigUint::from(7u32));
    }

    #[test]
    fn pruned_count_q1_closed_form() {
        // A single (r-1)-subset never covers all relays when r <= H, so the
        // pruned count reduces to C(K''-r, 1) = K'' - r.
        for (h, r) in [(4, 2), (5, 3), (6, 2), (7, 4)] {
            let n = net(h, r);
            let k2 = n.placement_subset_count();
            assert_eq!(
                pruned_cached_per_user(h, r, 1),
                BigUint::from(k2 - r),
                "H={h} r={r}"
            );
        }
    }

    #[test]
    fn bruteforce_fixtures() {
        let n42 = net(4, 2);
        assert_eq!(pruned_cached_per_user_bruteforce(&n42, 2, 1).unwrap(), 1);
        // q = K'': the union of all (r-1)-subsets is all relays, count 0.
        assert_eq!(pruned_cached_per_user_bruteforce(&n42, 4, 1).unwrap(), 0);
        let n53 = net(5, 3);
        for user in 1..=n53.user_count() {
            assert_eq!(pruned_cached_per_user_bruteforce(&n53, 1, user).unwrap(), 7);
        }
    }

    #[test]
    fn formula_matches_bruteforce_for_every_user() {
        for (h, r) in [(4, 2), (4, 3), (5, 2), (5, 3), (5, 4), (6, 3), (6, 5)] {
            let n = net(h, r);
            let k2 = n.placement_subset_count();
            for q in 1..=k2.min(5) {
                let formula = pruned_cached_per_user(h, r, q);
                for user in 1..=n.user_count() {
                    let oracle = pruned_cached_per_user_bruteforce(&n, q, user).unwrap();
                    assert_eq!(formula, BigUint::from(oracle), "H={h} r={r} q={q} k={user}");
                }
            }
        }
    }

    #[test]
    fn pruned_never_exceeds_unpruned() {
        for (h, r) in [(4, 2), (5, 3), (6, 2), (6, 4), (7, 3)] {
            let n = net(h, r);
            let k2 = n.placement_subset_count() as i128;
            for q in 1..=(k2 as usize).min(6) {
                assert!(
                    pruned_cached_per_user(h, r, q) <= binom(k2 - r as i128, q as i128),
                    "H={h} r={r} q={q}"
                );
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        // C(28, 14) is far beyond the default cap.
        let n = net(8, 3);
        let err = pruned_cached_per_user_bruteforce(&n, 14, 1);
        assert!(matches!(err, Err(Error::EnumerationCap { .. })));
    }
}
