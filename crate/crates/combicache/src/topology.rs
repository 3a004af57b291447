//! The combination network: `H` relays, one user per `r`-subset of relays.
//!
//! User ids are the 1-based lexicographic ranks of their relay subsets, so
//! rebuilding with the same `(H, r)` always yields identical ids. Adjacency
//! is precomputed in both directions at build time; networks here are small
//! enough that memory is immaterial. The structure is immutable after
//! `build` and safe to share across threads.

use itertools::Itertools;

use crate::error::Error;
use crate::sets;
use crate::Result;

/// Immutable `(H, r)` combination network topology.
///
/// Relays are `1..=H`, users are `1..=C(H, r)`. User `k` is connected to the
/// `k`-th `r`-subset of relays in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationNetwork {
    relays: usize,
    degree: usize,
    /// user id - 1 → sorted relay ids (length `degree`).
    users: Vec<Vec<usize>>,
    /// relay id - 1 → sorted user ids (length `C(H-1, r-1)` each).
    relay_users: Vec<Vec<usize>>,
}

impl CombinationNetwork {
    /// Build the network for `relays = H` and `degree = r` relays per user.
    pub fn build(relays: usize, degree: usize) -> Result<Self> {
        if relays == 0 || degree == 0 || degree > relays {
            return Err(Error::Parameter(format!(
                "need 1 <= r <= H, got H={relays}, r={degree}"
            )));
        }
        // C(64, 32) already overflows any realistic simulation budget; the
        // binomial itself must fit in usize.
        let user_count = checked_binomial(relays, degree).ok_or_else(|| {
            Error::Parameter(format!("C({relays}, {degree}) users exceed machine range"))
        })?;

        let users: Vec<Vec<usize>> = (1..=relays).combinations(degree).collect();
        debug_assert_eq!(users.len(), user_count);

        let mut relay_users = vec![Vec::new(); relays];
        for (idx, subset) in users.iter().enumerate() {
            for &h in subset {
                relay_users[h - 1].push(idx + 1);
            }
        }
        // Users were generated in increasing id order, so each list is sorted.

        Ok(CombinationNetwork {
            relays,
            degree,
            users,
            relay_users,
        })
    }

    /// Number of relays `H`.
    pub fn relay_count(&self) -> usize {
        self.relays
    }

    /// Relays per user `r`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of users `K = C(H, r)`.
    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    /// Users per relay `K' = C(H-1, r-1)`.
    pub fn users_per_relay(&self) -> usize {
        self.relay_users[0].len()
    }

    /// Number of `(r-1)`-subsets of relays, `K'' = C(H, r-1)`. These subsets
    /// anchor the topology-aware placements.
    pub fn placement_subset_count(&self) -> usize {
        checked_binomial(self.relays, self.degree - 1)
            .expect("C(H, r-1) <= C(H, r) already fit in usize")
    }

    /// All `(r-1)`-subsets of relays in lexicographic order.
    pub fn placement_subsets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (1..=self.relays).combinations(self.degree - 1)
    }

    /// The set of users connected to relay `h`.
    pub fn users_of_relay(&self, h: usize) -> Result<&[usize]> {
        self.check_relay(h)?;
        Ok(&self.relay_users[h - 1])
    }

    /// The set of relays connected to user `k`.
    pub fn relays_of_user(&self, k: usize) -> Result<&[usize]> {
        self.check_user(k)?;
        Ok(&self.users[k - 1])
    }

    /// The users connected to every relay in `relay_set`; empty when
    /// `|relay_set| > r`.
    pub fn common_users(&self, relay_set: &[usize]) -> Result<Vec<usize>> {
        if relay_set.is_empty() {
            return Err(Error::Parameter("common_users of empty relay set".into()));
        }
        for &h in relay_set {
            self.check_relay(h)?;
        }
        let mut acc = self.relay_users[relay_set[0] - 1].clone();
        for &h in &relay_set[1..] {
            acc = sets::intersect(&acc, &self.relay_users[h - 1]);
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    /// The unique user whose relay set is exactly `relay_set`, if any.
    pub fn user_with_relays(&self, relay_set: &[usize]) -> Option<usize> {
        if relay_set.len() != self.degree {
            return None;
        }
        self.users
            .binary_search_by(|u| u.as_slice().cmp(relay_set))
            .ok()
            .map(|idx| idx + 1)
    }

    fn check_relay(&self, h: usize) -> Result<()> {
        if h == 0 || h > self.relays {
            return Err(Error::OutOfRange(format!(
                "relay {h} not in 1..={}",
                self.relays
            )));
        }
        Ok(())
    }

    pub(crate) fn check_user(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.users.len() {
            return Err(Error::OutOfRange(format!(
                "user {k} not in 1..={}",
                self.users.len()
            )));
        }
        Ok(())
    }
}

/// `C(n, k)` in machine range, or `None` on overflow.
fn checked_binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets;

    // The H=4, r=2 network: six users, U_1 = {1,2,3}, H_1 = {1,2},
    // common users of {1,2} = {1}.
    fn four_two() -> CombinationNetwork {
        CombinationNetwork::build(4, 2).unwrap()
    }

    // The H=5, r=3, K=10 network with U_1 = [1..6].
    fn five_three() -> CombinationNetwork {
        CombinationNetwork::build(5, 3).unwrap()
    }

    #[test]
    fn build_four_two() {
        let net = four_two();
        assert_eq!(net.user_count(), 6);
        assert_eq!(net.relays_of_user(1).unwrap(), &[1, 2]);
        assert_eq!(net.relays_of_user(6).unwrap(), &[3, 4]);
        assert_eq!(net.users_per_relay(), 3);
        assert_eq!(net.placement_subset_count(), 4);
    }

    #[test]
    fn build_full_degree_degenerate() {
        let net = CombinationNetwork::build(3, 3).unwrap();
        assert_eq!(net.user_count(), 1);
        assert_eq!(net.relays_of_user(1).unwrap(), &[1, 2, 3]);
        for h in 1..=3 {
            assert_eq!(net.users_of_relay(h).unwrap(), &[1]);
        }
    }

    #[test]
    fn build_five_three_counts() {
        let net = five_three();
        assert_eq!(net.user_count(), 10);
        assert_eq!(net.users_per_relay(), 6);
        assert_eq!(net.placement_subset_count(), 10);
    }

    #[test]
    fn five_three_relay_adjacency() {
        let net = five_three();
        assert_eq!(net.users_of_relay(1).unwrap(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(net.users_of_relay(2).unwrap(), &[1, 2, 3, 7, 8, 9]);
        assert_eq!(net.users_of_relay(3).unwrap(), &[1, 4, 5, 7, 8, 10]);
        assert_eq!(net.users_of_relay(4).unwrap(), &[2, 4, 6, 7, 9, 10]);
        assert_eq!(net.users_of_relay(5).unwrap(), &[3, 5, 6, 8, 9, 10]);
    }

    #[test]
    fn four_two_adjacency() {
        let net = four_two();
        assert_eq!(net.users_of_relay(1).unwrap(), &[1, 2, 3]);
        assert_eq!(net.users_of_relay(2).unwrap(), &[1, 4, 5]);
        assert_eq!(net.users_of_relay(3).unwrap(), &[2, 4, 6]);
        assert_eq!(net.users_of_relay(4).unwrap(), &[3, 5, 6]);
        // Derived from the published common-user listings: user 3 sits on
        // relays {1, 4}.
        assert_eq!(net.relays_of_user(3).unwrap(), &[1, 4]);
    }

    #[test]
    fn common_users_fixtures() {
        let net = four_two();
        assert_eq!(net.common_users(&[1, 2]).unwrap(), vec![1]);
        assert_eq!(net.common_users(&[2]).unwrap(), vec![1, 4, 5]);

        // A user is the unique common neighbor of its own relay set.
        for k in 1..=net.user_count() {
            let relays = net.relays_of_user(k).unwrap().to_vec();
            assert_eq!(net.common_users(&relays).unwrap(), vec![k]);
            assert_eq!(net.user_with_relays(&relays), Some(k));
        }
    }

    #[test]
    fn common_users_empty_when_too_many_relays() {
        let net = four_two();
        assert!(net.common_users(&[1, 2, 3]).unwrap().is_empty());
    }

    #[test]
    fn common_users_is_intersection_homomorphism() {
        let net = five_three();
        for j1 in [vec![1], vec![1, 2], vec![2, 4]] {
            for j2 in [vec![3], vec![1, 3], vec![4, 5]] {
                let joint = net.common_users(&sets::union(&j1, &j2)).unwrap();
                let split = sets::intersect(
                    &net.common_users(&j1).unwrap(),
                    &net.common_users(&j2).unwrap(),
                );
                assert_eq!(joint, split);
            }
        }
    }

    #[test]
    fn double_counting_identity() {
        for (h, r) in [(4, 2), (5, 3), (6, 2), (6, 4), (7, 3)] {
            let net = CombinationNetwork::build(h, r).unwrap();
            let total: usize = (1..=h)
                .map(|relay| net.users_of_relay(relay).unwrap().len())
                .sum();
            assert_eq!(total, r * net.user_count());
            for relay in 1..=h {
                assert_eq!(
                    net.users_of_relay(relay).unwrap().len(),
                    net.users_per_relay()
                );
            }
        }
    }

    // Each user sharing an (r-1)-subset is reached through a distinct extra
    // relay; this is the structural fact the topology-aware placement leans
    // on.
    #[test]
    fn distinct_extra_relays_per_common_group() {
        for (h, r) in [(4, 2), (5, 3), (6, 3)] {
            let net = CombinationNetwork::build(h, r).unwrap();
            for y in (1..=h).combinations(r - 1) {
                let group = net.common_users(&y).unwrap();
                assert_eq!(group.len(), h - r + 1);
                let extras: Vec<usize> = group
                    .iter()
                    .map(|&k| {
                        let extra = sets::minus(net.relays_of_user(k).unwrap(), &y);
                        assert_eq!(extra.len(), 1);
                        extra[0]
                    })
                    .collect();
                let mut dedup = extras.clone();
                dedup.sort_unstable();
                dedup.dedup();
                assert_eq!(dedup.len(), extras.len());
            }
        }
    }

    #[test]
    fn subset_size_identity() {
        // |P_J| = C(H - |J|, r - |J|) for |J| <= r.
        let net = five_three();
        for size in 1..=3 {
            for j in (1..=5usize).combinations(size) {
                let expect = checked_binomial(5 - size, 3 - size).unwrap();
                assert_eq!(net.common_users(&j).unwrap().len(), expect);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CombinationNetwork::build(0, 1).is_err());
        assert!(CombinationNetwork::build(3, 0).is_err());
        assert!(CombinationNetwork::build(3, 4).is_err());
    }

    #[test]
    fn rejects_out_of_range_queries() {
        let net = four_two();
        assert!(net.users_of_relay(0).is_err());
        assert!(net.users_of_relay(5).is_err());
        assert!(net.relays_of_user(0).is_err());
        assert!(net.relays_of_user(7).is_err());
        assert!(net.common_users(&[]).is_err());
        assert!(net.common_users(&[9]).is_err());
    }

    #[test]
    fn rebuild_is_deterministic() {
        let a = CombinationNetwork::build(6, 3).unwrap();
        let b = CombinationNetwork::build(6, 3).unwrap();
        assert_eq!(a, b);
    }
}
