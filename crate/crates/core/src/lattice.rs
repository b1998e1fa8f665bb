//! Interaction networks: the periodic FCC lattice and arbitrary custom
//! graphs (used by the exact-enumeration oracles in the tests).

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Face-centered cubic, `4 * L^3` sites, coordination number 12.
    Fcc { linear_size: u32 },
    /// Explicit edge list.
    Custom,
}

/// Immutable neighbor lists in CSR form. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    n_sites: usize,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    kind: GraphKind,
}

/// The 12 FCC nearest-neighbor displacements in half-cell units:
/// the permutations of (+-1, +-1, 0).
const FCC_SHIFTS: [(i64, i64, i64); 12] = [
    (1, 1, 0),
    (1, -1, 0),
    (-1, 1, 0),
    (-1, -1, 0),
    (1, 0, 1),
    (1, 0, -1),
    (-1, 0, 1),
    (-1, 0, -1),
    (0, 1, 1),
    (0, 1, -1),
    (0, -1, 1),
    (0, -1, -1),
];

/// 4-site basis of the conventional cubic cell, in half-cell units.
const FCC_BASIS: [(i64, i64, i64); 4] = [(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)];

impl NeighborGraph {
    /// Periodic FCC lattice of `l^3` conventional cells (so `4 * l^3` sites).
    ///
    /// Site indexing is `basis + 4 * (x + l*y + l^2*z)` with the basis sites
    /// at (0,0,0), (1/2,1/2,0), (1/2,0,1/2), (0,1/2,1/2) in cell units, so
    /// CSV dumps are reproducible across builds.
    pub fn build_fcc(l: u32) -> Result<Self> {
        if l < 2 {
            // Periodic images at L=1 would collapse onto self-loops and
            // duplicate neighbors.
            return Err(Error::DegenerateLattice(l));
        }
        let l = l as i64;
        let period = 2 * l;
        let n_sites = (4 * l * l * l) as usize;

        let index_of = |u: i64, v: i64, w: i64| -> u32 {
            let (u, v, w) = (u.rem_euclid(period), v.rem_euclid(period), w.rem_euclid(period));
            let parity = (u & 1, v & 1, w & 1);
            let basis = match parity {
                (0, 0, 0) => 0,
                (1, 1, 0) => 1,
                (1, 0, 1) => 2,
                (0, 1, 1) => 3,
                _ => unreachable!("FCC displacements preserve the site parity set"),
            };
            let (x, y, z) = (u / 2, v / 2, w / 2);
            (basis + 4 * (x + l * y + l * l * z)) as u32
        };

        // Walking z, y, x with the basis innermost emits sites exactly in
        // index order: basis + 4*(x + l*y + l^2*z).
        let mut offsets = Vec::with_capacity(n_sites + 1);
        let mut neighbors = Vec::with_capacity(n_sites * 12);
        offsets.push(0u32);
        for z in 0..l {
            for y in 0..l {
                for x in 0..l {
                    for (bx, by, bz) in FCC_BASIS {
                        let (u, v, w) = (2 * x + bx, 2 * y + by, 2 * z + bz);
                        let mut nbrs: Vec<u32> = FCC_SHIFTS
                            .iter()
                            .map(|&(du, dv, dw)| index_of(u + du, v + dv, w + dw))
                            .collect();
                        nbrs.sort_unstable();
                        neighbors.extend_from_slice(&nbrs);
                        offsets.push(neighbors.len() as u32);
                    }
                }
            }
        }

        Ok(Self {
            n_sites,
            offsets,
            neighbors,
            kind: GraphKind::Fcc { linear_size: l as u32 },
        })
    }

    /// Graph from an explicit list of unordered edges. Duplicate edges
    /// collapse; self-loops and out-of-range indices are rejected.
    pub fn build_custom(edges: &[(u32, u32)], n_sites: usize) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if i as usize >= n_sites || j as usize >= n_sites {
                return Err(Error::EdgeOutOfRange(i, j, n_sites));
            }
            set.insert((i.min(j), i.max(j)));
        }
        let mut adj = vec![Vec::new(); n_sites];
        for &(i, j) in &set {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        let mut offsets = Vec::with_capacity(n_sites + 1);
        let mut neighbors = Vec::new();
        offsets.push(0u32);
        for list in &mut adj {
            list.sort_unstable();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len() as u32);
        }
        Ok(Self {
            n_sites,
            offsets,
            neighbors,
            kind: GraphKind::Custom,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    #[inline]
    pub fn neighbors(&self, site: usize) -> &[u32] {
        &self.neighbors[self.offsets[site] as usize..self.offsets[site + 1] as usize]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.neighbors(site).len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Iterate each undirected edge once, as (i, j) with i < j.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n_sites).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| (i as u32) < j)
                .map(move |&j| (i as u32, j))
        })
    }

    /// Dump the adjacency as `site,neighbor` CSV, one row per directed pair.
    pub fn write_adjacency_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "site,neighbor")?;
        for i in 0..self.n_sites {
            for &j in self.neighbors(i) {
                writeln!(w, "{i},{j}")?;
            }
        }
        Ok(())
    }
}
