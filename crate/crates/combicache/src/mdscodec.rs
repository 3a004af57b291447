//! GF(2^16) arithmetic and a systematic `(n, k)` MDS erasure code.
//!
//! The coded placements split every file into `k` source pieces and expand
//! them to `n` coded symbols so that *any* `k` symbols reconstruct the file.
//! Symbols are evaluations of the degree-`< k` polynomial interpolating the
//! source pieces at points `0..k`; evaluation points are the field elements
//! `0..n`, which makes the code systematic (the first `k` symbols are the
//! source verbatim) and every `k`-column submatrix of the generator a
//! (generalized) Vandermonde matrix, hence invertible.
//!
//! The field is GF(2^16) with the primitive polynomial
//! `x^16 + x^12 + x^3 + x + 1` (0x1100B, the PAR2 polynomial). Symbol vectors
//! are byte strings of even length, interpreted as little-endian 16-bit
//! words. Addition is bitwise XOR; multiplication goes through log/exp
//! tables built once per process.

use std::sync::OnceLock;

use crate::error::Error;
use crate::Result;

/// Field arithmetic in GF(2^16).
pub mod gf {
    use std::sync::OnceLock;

    /// x^16 + x^12 + x^3 + x + 1, primitive over GF(2).
    pub const PRIMITIVE_POLY: u32 = 0x1100B;

    const ORDER: usize = 65535;

    struct Tables {
        exp: Vec<u16>,
        log: Vec<u16>,
    }

    static TABLES: OnceLock<Tables> = OnceLock::new();

    fn tables() -> &'static Tables {
        TABLES.get_or_init(|| {
            let mut exp = vec![0u16; 2 * ORDER];
            let mut log = vec![0u16; ORDER + 1];
            let mut x: u32 = 1;
            for (i, e) in exp.iter_mut().enumerate().take(ORDER) {
                *e = x as u16;
                log[x as usize] = i as u16;
                x <<= 1;
                if x & 0x10000 != 0 {
                    x ^= PRIMITIVE_POLY;
                }
            }
            // x must have cycled back to 1, otherwise the polynomial is not
            // primitive and the log table is broken.
            assert_eq!(x, 1, "0x1100B failed to generate the full cycle");
            for i in ORDER..2 * ORDER {
                exp[i] = exp[i - ORDER];
            }
            Tables { exp, log }
        })
    }

    /// Addition (= subtraction): bitwise XOR.
    #[inline]
    pub fn add(a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = tables();
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    /// Multiplicative inverse of a nonzero element.
    #[inline]
    pub fn inv(a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        let t = tables();
        t.exp[ORDER - t.log[a as usize] as usize]
    }

    #[inline]
    pub fn div(a: u16, b: u16) -> u16 {
        mul(a, inv(b))
    }

}

/// Systematic `(n, k)` MDS erasure code over GF(2^16).
///
/// Any `k` of the `n` coded symbols reconstruct the source. The generator
/// matrix is materialized only on demand (audits, small-code tests); encoding
/// and decoding run through barycentric Lagrange interpolation instead.
#[derive(Debug, Clone)]
pub struct MdsCode {
    n: usize,
    k: usize,
    /// Barycentric weights for the systematic points `0..k`, built lazily.
    weights: OnceLock<Vec<u16>>,
}

impl PartialEq for MdsCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k
    }
}
impl Eq for MdsCode {}

impl MdsCode {
    /// A code with `n` total symbols and `k` source symbols. Requires
    /// `1 <= k <= n <= 65536` so that evaluation points stay distinct.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n || n > 65536 {
            return Err(Error::Codec(format!(
                "invalid code parameters (n, k) = ({n}, {k}); need 1 <= k <= n <= 65536"
            )));
        }
        Ok(MdsCode {
            n,
            k,
            weights: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `w_i = 1 / prod_{m != i} (i - m)` over the systematic points.
    fn systematic_weights(&self) -> &[u16] {
        self.weights
            .get_or_init(|| barycentric_weights(&points(self.k)))
    }

    /// Encode `k` equal-length source vectors into `n` coded vectors. The
    /// first `k` outputs equal the source (systematic).
    pub fn encode(&self, source: &[Vec<u8>]) -> Result<Vec<Vec<u8>>> {
        if source.len() != self.k {
            return Err(Error::Codec(format!(
                "expected {} source vectors, got {}",
                self.k,
                source.len()
            )));
        }
        let len = source[0].len();
        for (i, s) in source.iter().enumerate() {
            if s.len() != len {
                return Err(Error::Codec(format!(
                    "source vector {i} has length {} != {len}",
                    s.len()
                )));
            }
        }
        if !len.is_multiple_of(2) {
            return Err(Error::Codec(format!(
                "symbol length {len} is not a multiple of the 2-byte field width"
            )));
        }

        let words: Vec<Vec<u16>> = source.iter().map(|s| bytes_to_words(s)).collect();
        let mut out: Vec<Vec<u8>> = source.to_vec();
        out.reserve(self.n - self.k);
        for j in self.k..self.n {
            let coeffs = self.column(j as u16);
            let mut acc = vec![0u16; len / 2];
            for (src, &c) in words.iter().zip(coeffs.iter()) {
                if c == 0 {
                    continue;
                }
                for (a, &s) in acc.iter_mut().zip(src.iter()) {
                    *a ^= gf::mul(c, s);
                }
            }
            out.push(words_to_bytes(&acc));
        }
        Ok(out)
    }

    /// Generator column for evaluation point `x` outside `0..k`:
    /// `c_i = L_i(x)` for the Lagrange basis over the systematic points.
    fn column(&self, x: u16) -> Vec<u16> {
        debug_assert!(x as usize >= self.k);
        let w = self.systematic_weights();
        // prod(x) = prod_m (x - m); nonzero because x is not a systematic point.
        let mut prod = 1u16;
        for m in 0..self.k {
            prod = gf::mul(prod, gf::add(x, m as u16));
        }
        (0..self.k)
            .map(|i| gf::mul(prod, gf::mul(w[i], gf::inv(gf::add(x, i as u16)))))
            .collect()
    }

    /// Reconstruct the `k` source vectors from at least `k` shares of
    /// `(symbol index, bytes)`. Indices must be distinct and in `0..n`; when
    /// more than `k` shares are supplied, the `k` with the smallest indices
    /// are used.
    pub fn decode(&self, shares: &[(usize, Vec<u8>)]) -> Result<Vec<Vec<u8>>> {
        if shares.len() < self.k {
            return Err(Error::Codec(format!(
                "need at least {} shares, got {}",
                self.k,
                shares.len()
            )));
        }
        let mut sorted: Vec<&(usize, Vec<u8>)> = shares.iter().collect();
        sorted.sort_by_key(|(idx, _)| *idx);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Codec("duplicate share indices".into()));
        }
        if let Some((idx, _)) = sorted.iter().find(|(idx, _)| *idx >= self.n) {
            return Err(Error::Codec(format!(
                "share index {idx} out of range 0..{}",
                self.n
            )));
        }
        let chosen = &sorted[..self.k];
        let len = chosen[0].1.len();
        for (idx, bytes) in chosen {
            if bytes.len() != len {
                return Err(Error::Codec(format!(
                    "share {idx} has length {} != {len}",
                    bytes.len()
                )));
            }
        }
        if !len.is_multiple_of(2) {
            return Err(Error::Codec(format!(
                "share length {len} is not a multiple of the 2-byte field width"
            )));
        }

        // Fast path: all systematic points present.
        if chosen.iter().all(|(idx, _)| *idx < self.k) {
            return Ok(chosen.iter().map(|(_, b)| b.clone()).collect());
        }

        let pts: Vec<u16> = chosen.iter().map(|(idx, _)| *idx as u16).collect();
        let w = barycentric_weights(&pts);
        let words: Vec<Vec<u16>> = chosen.iter().map(|(_, b)| bytes_to_words(b)).collect();

        let mut out = Vec::with_capacity(self.k);
        for target in 0..self.k {
            let t = target as u16;
            if let Some(pos) = pts.iter().position(|&p| p == t) {
                out.push(chosen[pos].1.clone());
                continue;
            }
            // prod(t) over the share points, then one Lagrange coefficient
            // per share.
            let mut prod = 1u16;
            for &p in &pts {
                prod = gf::mul(prod, gf::add(t, p));
            }
            let coeffs: Vec<u16> = pts
                .iter()
                .zip(w.iter())
                .map(|(&p, &wj)| gf::mul(prod, gf::mul(wj, gf::inv(gf::add(t, p)))))
                .collect();
            let mut acc = vec![0u16; len / 2];
            for (share, &c) in words.iter().zip(coeffs.iter()) {
                if c == 0 {
                    continue;
                }
                for (a, &s) in acc.iter_mut().zip(share.iter()) {
                    *a ^= gf::mul(c, s);
                }
            }
            out.push(words_to_bytes(&acc));
        }
        Ok(out)
    }

    /// Materialize the full `k x n` generator matrix (row-major). Intended
    /// for audits and small-code tests; refuses matrices past 2^24 entries.
    pub fn generator_matrix(&self) -> Result<Vec<Vec<u16>>> {
        if self.n.saturating_mul(self.k) > 1 << 24 {
            return Err(Error::Codec(format!(
                "generator matrix {}x{} too large to materialize",
                self.k, self.n
            )));
        }
        let mut rows = vec![vec![0u16; self.n]; self.k];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1;
        }
        for j in self.k..self.n {
            for (row, c) in rows.iter_mut().zip(self.column(j as u16)) {
                row[j] = c;
            }
        }
        Ok(rows)
    }
}

/// Evaluation points `0..count` as field elements.
fn points(count: usize) -> Vec<u16> {
    (0..count).map(|i| i as u16).collect()
}

/// `w_j = 1 / prod_{m != j} (p_j - p_m)` for distinct points.
fn barycentric_weights(pts: &[u16]) -> Vec<u16> {
    pts.iter()
        .map(|&pj| {
            let mut prod = 1u16;
            for &pm in pts {
                if pm != pj {
                    prod = gf::mul(prod, gf::add(pj, pm));
                }
            }
            gf::inv(prod)
        })
        .collect()
}

fn bytes_to_words(bytes: &[u8]) -> Vec<u16> {
    bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect()
}

fn words_to_bytes(words: &[u16]) -> Vec<u8> {
    let mut out = Vec::with_capacity(words.len() * 2);
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}
