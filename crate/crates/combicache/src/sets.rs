//! Operations on sorted id sets.
//!
//! User and relay sets are kept as strictly increasing `Vec<usize>` so that
//! equality is structural and iteration order is deterministic everywhere.

/// True if sorted `a` contains `x`.
pub fn contains(a: &[usize], x: usize) -> bool {
    a.binary_search(&x).is_ok()
}

/// Intersection of two sorted sets.
pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Union of two sorted sets.
pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Elements of sorted `a` not in sorted `b`.
pub fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !contains(b, *x)).collect()
}

/// True if sorted `a` is a subset of sorted `b`.
pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| contains(b, *x))
}

/// `[1..=n]` as a sorted set.
pub fn full(n: usize) -> Vec<usize> {
    (1..=n).collect()
}
