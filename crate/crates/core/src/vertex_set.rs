use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

/// Dense vertex index into an arena.
pub type Vertex = usize;

/// A set of vertices over a fixed universe `0..n`.
///
/// Sets are ordered by their sorted element lists (lexicographically), which
/// gives the canonical ordering used for families of loops.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        Self(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Self(bits)
    }

    pub fn singleton(universe: usize, v: Vertex) -> Self {
        let mut set = Self::empty(universe);
        set.insert(v);
        set
    }

    pub fn from_iter(universe: usize, items: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = Self::empty(universe);
        for v in items {
            set.insert(v);
        }
        set
    }

    /// Decodes the low `universe` bits of `mask`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Self::from_iter(universe, (0..universe).filter(|&v| mask >> v & 1 == 1))
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.set(v, false);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.ones().next()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn union_with(&mut self, other: &Self) {
        self.0.union_with(&other.0);
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.0.intersect_with(&other.0);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    /// Complement relative to the universe.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        out.0.toggle_range(..);
        out
    }

    pub fn without(&self, v: Vertex) -> Self {
        let mut out = self.clone();
        out.remove(v);
        out
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
