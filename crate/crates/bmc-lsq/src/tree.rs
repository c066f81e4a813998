//! Binary-tree addressing and storage of node-indexed real values.
//!
//! Nodes are addressed by `(generation, index)` with the root at `(0, 0)`
//! and the children of `(m, k)` at `(m+1, 2k)` and `(m+1, 2k+1)`. A full
//! realization up to some depth is stored flat in breadth-first order, so
//! node `(m, k)` lives at offset `2^m - 1 + k` and a whole generation is a
//! contiguous slice.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum tree depth accepted by configuration validation (about 33M nodes).
pub const MAX_DEPTH: u32 = 24;

const MAGIC: &[u8; 4] = b"BMCT";
const FORMAT_VERSION: u32 = 1;

/// Address of a tree node: generation `m` and index `k` in `[0, 2^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId {
    pub generation: u32,
    pub index: u64,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { generation: 0, index: 0 };

    pub fn new(generation: u32, index: u64) -> NodeId {
        assert!(
            generation < 64 && index < (1u64 << generation),
            "node index {index} out of range for generation {generation}"
        );
        NodeId { generation, index }
    }

    /// The two children `(m+1, 2k)` and `(m+1, 2k+1)`.
    pub fn children(self) -> (NodeId, NodeId) {
        let g = self.generation + 1;
        (
            NodeId { generation: g, index: 2 * self.index },
            NodeId { generation: g, index: 2 * self.index + 1 },
        )
    }

    /// Offset of this node in breadth-first flat storage: `2^m - 1 + k`.
    pub fn flat_offset(self) -> usize {
        ((1u64 << self.generation) - 1 + self.index) as usize
    }
}

/// Number of nodes in generation `n`, i.e. `2^n`.
pub fn generation_size(n: u32) -> u64 {
    assert!(n < 64, "generation {n} overflows the platform word");
    1u64 << n
}

/// Total number of nodes in generations `0..=depth`.
pub fn node_count(depth: u32) -> usize {
    ((1u64 << (depth + 1)) - 1) as usize
}

/// A mother-daughter triple `(X_u, X_{u0}, X_{u1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub parent: f64,
    pub child0: f64,
    pub child1: f64,
}

/// One realization of a branching chain up to `depth`, stored breadth-first.
///
/// Immutable after construction; safe to share read-only across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSample {
    depth: u32,
    seed: u64,
    values: Vec<f64>,
}

impl TreeSample {
    /// Builds a sample from raw breadth-first values, checking length and finiteness.
    pub fn from_values(depth: u32, seed: u64, values: Vec<f64>) -> Result<TreeSample> {
        if depth > MAX_DEPTH {
            return Err(Error::Config(format!(
                "tree depth {depth} exceeds the cap of {MAX_DEPTH}"
            )));
        }
        let expected = node_count(depth);
        if values.len() != expected {
            return Err(Error::Precondition(format!(
                "depth {depth} requires {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite value at flat offset {pos}"
            )));
        }
        Ok(TreeSample { depth, seed, values })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, u: NodeId) -> f64 {
        self.values[u.flat_offset()]
    }

    /// The contiguous slice holding generation `m`.
    pub fn generation_values(&self, m: u32) -> &[f64] {
        assert!(m <= self.depth, "generation {m} beyond depth {}", self.depth);
        let start = ((1u64 << m) - 1) as usize;
        &self.values[start..start + generation_size(m) as usize]
    }

    /// Writes the sample in the binary layout: magic `BMCT`, version, depth,
    /// seed, then little-endian 64-bit floats in breadth-first order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.depth.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<TreeSample> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!(
                "bad magic {magic:?}, expected {MAGIC:?}"
            )));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let version = u32::from_le_bytes(u32buf);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported tree format version {version}"
            )));
        }
        r.read_exact(&mut u32buf)?;
        let depth = u32::from_le_bytes(u32buf);
        if depth > MAX_DEPTH {
            return Err(Error::Format(format!("stored depth {depth} exceeds cap")));
        }
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let seed = u64::from_le_bytes(u64buf);
        let count = node_count(depth);
        let mut values = Vec::with_capacity(count);
        let mut f64buf = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut f64buf)?;
            values.push(f64::from_le_bytes(f64buf));
        }
        TreeSample::from_values(depth, seed, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<TreeSample> {
        let file = std::fs::File::open(path)?;
        TreeSample::read_binary(std::io::BufReader::new(file))
    }
}

/// The triangles `(X_u, X_{u0}, X_{u1})` for `u` over generation `n`, in index order.
///
/// Requires `n + 1 <= depth` so that the children of generation `n` exist.
pub fn triangles_of_generation(s: &TreeSample, n: u32) -> Result<Vec<Triangle>> {
    if n + 1 > s.depth() {
        return Err(Error::Precondition(format!(
            "triangles over generation {n} need depth {} but the sample has depth {}",
            n + 1,
            s.depth()
        )));
    }
    let parents = s.generation_values(n);
    let children = s.generation_values(n + 1);
    Ok(parents
        .iter()
        .enumerate()
        .map(|(k, &p)| Triangle {
            parent: p,
            child0: children[2 * k],
            child1: children[2 * k + 1],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn children_of_root() {
        let (c0, c1) = NodeId::ROOT.children();
        assert_eq!(c0, NodeId::new(1, 0));
        assert_eq!(c1, NodeId::new(1, 1));
    }

    #[test]
    fn children_double_the_index() {
        let (c0, c1) = NodeId::new(3, 5).children();
        assert_eq!((c0.generation, c0.index), (4, 10));
        assert_eq!((c1.generation, c1.index), (4, 11));
        let (c0, c1) = NodeId::new(16, 0).children();
        assert_eq!((c0.generation, c0.index), (17, 0));
        assert_eq!((c1.generation, c1.index), (17, 1));
    }

    #[test]
    fn generation_sizes() {
        assert_eq!(generation_size(0), 1);
        assert_eq!(generation_size(13), 8192);
        assert_eq!(generation_size(16), 65536);
    }

    #[test]
    fn node_count_is_sum_of_generation_sizes() {
        for depth in 0..12u32 {
            let by_sum: u64 = (0..=depth).map(generation_size).sum();
            assert_eq!(node_count(depth) as u64, by_sum);
        }
    }

    fn iota_sample(depth: u32) -> TreeSample {
        let values: Vec<f64> = (0..node_count(depth)).map(|i| i as f64).collect();
        TreeSample::from_values(depth, 42, values).unwrap()
    }

    #[test]
    fn triangles_of_depth_one_root() {
        let s = iota_sample(1);
        let tri = triangles_of_generation(&s, 0).unwrap();
        assert_eq!(tri.len(), 1);
        assert_eq!(tri[0], Triangle { parent: 0.0, child0: 1.0, child1: 2.0 });
    }

    #[test]
    fn triangles_over_g16_need_depth_17() {
        let s = iota_sample(17);
        let tri = triangles_of_generation(&s, 16).unwrap();
        assert_eq!(tri.len(), 65536);
        // Parent of triangle k equals the value stored at node (16, k).
        for k in [0usize, 1, 31337, 65535] {
            let expect = s.value(NodeId::new(16, k as u64));
            assert_eq!(tri[k].parent, expect);
            let (c0, c1) = NodeId::new(16, k as u64).children();
            assert_eq!(tri[k].child0, s.value(c0));
            assert_eq!(tri[k].child1, s.value(c1));
        }
    }

    #[test]
    fn triangles_at_own_depth_error() {
        let s = iota_sample(3);
        assert!(matches!(
            triangles_of_generation(&s, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn from_values_rejects_bad_length_and_nonfinite() {
        assert!(TreeSample::from_values(2, 0, vec![0.0; 6]).is_err());
        let mut v = vec![0.0; 7];
        v[3] = f64::NAN;
        assert!(TreeSample::from_values(2, 0, v).is_err());
    }

    #[test]
    fn binary_round_trip_and_header_layout() {
        let s = iota_sample(4);
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[0..4], b"BMCT");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 42);
        assert_eq!(buf.len(), 20 + 8 * node_count(4));
        let back = TreeSample::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn read_binary_rejects_bad_magic() {
        let err = TreeSample::read_binary(&b"NOPE\x01\x00\x00\x00"[..]);
        assert!(matches!(err, Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn flat_offset_respects_bfs_layout(gen in 0u32..20, bump in 0u64..1024) {
            let index = bump % (1u64 << gen);
            let u = NodeId::new(gen, index);
            prop_assert_eq!(u.flat_offset() as u64, (1u64 << gen) - 1 + index);
            let (c0, c1) = u.children();
            prop_assert_eq!(c1.flat_offset(), c0.flat_offset() + 1);
            prop_assert_eq!(c0.index, 2 * index);
        }
    }
}
