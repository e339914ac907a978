//! Adjacency graphs, connected sectors and conserved frozen-region labels.
//!
//! Two configurations are adjacent when a single allowed hop maps one onto
//! the other. Connected components of that graph are the classically
//! disconnected sectors; the component containing the domain wall is the one
//! studied throughout.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::io::Write;

use crate::basis::{max_extent, FockState, SectorBasis, DEFAULT_BASIS_LIMIT};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, for_each_hop, AssemblyMode, ModelSpec, SparseOperator};

/// Undirected hop graph on a basis, in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    basis: SectorBasis,
    spec: ModelSpec,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl AdjacencyGraph {
    /// Graph whose edges are the off-diagonal nonzeros of `h`.
    pub fn from_operator(basis: &SectorBasis, spec: &ModelSpec, h: &SparseOperator) -> Result<Self> {
        if h.dim() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: h.dim() });
        }
        let n = basis.len();
        let mut deg = vec![0usize; n];
        for (r, c, _) in h.entries() {
            if r != c {
                deg[r] += 1;
                deg[c] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for (r, c, _) in h.entries() {
            if r != c {
                neighbors[fill[r]] = c as u32;
                fill[r] += 1;
                neighbors[fill[c]] = r as u32;
                fill[c] += 1;
            }
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self { basis: basis.clone(), spec: spec.clone(), offsets, neighbors })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn vertex_count(&self) -> usize {
        self.basis.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Edges `(u, v)` with `u < v`, in ordinal order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v as usize)).filter(|(u, v)| u < v))
    }

    /// Position of the rightmost particle of every vertex (0 for the empty chain).
    pub fn rightmost(&self) -> Vec<usize> {
        self.basis.iter().map(|s| s.rightmost().unwrap_or(0)).collect()
    }

    /// `u v` lines, one per undirected edge, 0-based ordinals.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Builds the adjacency graph of a closed basis.
pub fn build_graph(basis: &SectorBasis, spec: &ModelSpec) -> Result<AdjacencyGraph> {
    let h = build_hamiltonian(basis, spec, AssemblyMode::Strict)?;
    AdjacencyGraph::from_operator(basis, spec, &h)
}

/// Component labels, numbered in order of each component's smallest ordinal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Ordinals of one component, ascending.
    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] as usize == id).collect()
    }
}

pub fn connected_components(g: &AdjacencyGraph) -> Components {
    let n = g.vertex_count();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if labels[root] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        labels[root] = id;
        queue.push_back(root);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &u in g.neighbors(v) {
                if labels[u as usize] == u32::MAX {
                    labels[u as usize] = id;
                    queue.push_back(u as usize);
                }
            }
        }
        sizes.push(size);
    }
    Components { labels, sizes }
}

/// Every configuration reachable from `seeds` by allowed hops.
pub fn closure(sites: usize, spec: &ModelSpec, seeds: &[FockState], limit: usize) -> Result<SectorBasis> {
    let Some(first) = seeds.first() else {
        return Err(Error::Domain("closure needs at least one seed".into()));
    };
    let particles = first.particle_count();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if s.len() != sites {
            return Err(Error::LengthMismatch { expected: sites, found: s.len() });
        }
        if s.particle_count() != particles {
            return Err(Error::Domain("seeds must share a particle number".into()));
        }
        if seen.insert(s.bits()) {
            queue.push_back(s.bits());
        }
    }
    while let Some(b) = queue.pop_front() {
        let mut overflow = false;
        for_each_hop(spec, b, sites, |p, _, _| {
            if seen.insert(p) {
                queue.push_back(p);
                overflow |= seen.len() > limit;
            }
        });
        if overflow {
            return Err(Error::BasisOverflow { requested: seen.len() as u128, limit });
        }
    }
    let states: Vec<u64> = seen.into_iter().collect();
    Ok(SectorBasis::from_sorted_bits(sites, particles, Some(spec.range()), states))
}

/// The sector connected to the domain wall `1^Np 0^(L-Np)`.
pub fn largest_sector(sites: usize, particles: usize, spec: &ModelSpec) -> Result<SectorBasis> {
    largest_sector_with_limit(sites, particles, spec, DEFAULT_BASIS_LIMIT)
}

pub fn largest_sector_with_limit(sites: usize, particles: usize, spec: &ModelSpec, limit: usize) -> Result<SectorBasis> {
    if particles == 0 || particles > sites {
        return Err(Error::Domain(format!("{particles} particles on {sites} sites")));
    }
    let dw = FockState::domain_wall(sites, particles)?;
    closure(sites, spec, &[dw], limit)
}

/// Occupation of a site that never changes inside a sector.
pub fn frozen_site_charge(s: &FockState, site: usize) -> Result<u8> {
    s.occupation(site)
}

/// Frozen-region indicator: one when `n_left` particles fill the first
/// `L*(n_left)` sites, sites `L*(n_left)+1..=l_left` are empty and site
/// `l_left + 1` is occupied.
///
/// Requires `l_left >= L*(n_left) + r + 1` and `l_left < L`, which is what
/// guarantees the left block can never facilitate a hop on its right.
/// Conserved inside the domain-wall sector, where every left block of
/// `n_left` particles stays within `L*(n_left)` sites; other components can
/// carry left blocks that spread further.
pub fn left_block_charge(s: &FockState, n_left: usize, l_left: usize, spec: &ModelSpec) -> Result<u8> {
    let extent = max_extent(spec.range(), n_left)?;
    if l_left < extent + spec.range() + 1 {
        return Err(Error::Precondition(format!(
            "left block of {n_left} particles needs length >= {}, got {l_left}",
            extent + spec.range() + 1
        )));
    }
    if l_left >= s.len() {
        return Err(Error::Precondition(format!("left block length {l_left} leaves no site on a {}-site chain", s.len())));
    }
    let filled = (1..=extent).filter(|&i| s.occupied(i)).count() == n_left;
    let gap = (extent + 1..=l_left).all(|i| !s.occupied(i));
    Ok(u8::from(filled && gap && s.occupied(l_left + 1)))
}

/// Frozen-region labels `(n_left, l_left)` that some configuration with
/// site 1 occupied realises on the chain of length `L*(Np)`.
pub fn frozen_region_labels(particles: usize, spec: &ModelSpec) -> Result<BTreeSet<(usize, usize)>> {
    let sites = max_extent(spec.range(), particles)?;
    let basis = SectorBasis::enumerate(sites, particles, true)?;
    let r = spec.range();
    let mut labels = BTreeSet::new();
    for n_left in 1..particles {
        let lo = max_extent(r, n_left)? + r + 1;
        for l_left in lo..sites {
            if basis.iter().any(|s| left_block_charge(&s, n_left, l_left, spec).unwrap_or(0) == 1) {
                labels.insert((n_left, l_left));
            }
        }
    }
    Ok(labels)
}

/// `r (Np - 1)(Np - 2) / 2`, the number of frozen-region labels.
pub fn frozen_region_label_count(particles: usize, range: usize) -> usize {
    if particles < 2 {
        0
    } else {
        range * (particles - 1) * (particles - 2) / 2
    }
}

/// Sublattice of a configuration: the sign of `(-1)^(sum_i i n_i)`. Every hop
/// flips it, so the hop graph is bipartite.
pub fn parity(s: &FockState) -> i8 {
    let m: usize = (1..=s.len()).filter(|&i| s.occupied(i)).sum();
    if m % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Zero modes forced by the bipartite structure: `|D_even - D_odd|`.
pub fn zero_mode_lower_bound(basis: &SectorBasis) -> usize {
    let even = basis.iter().filter(|s| parity(s) == 1).count();
    even.abs_diff(basis.len() - even)
}

/// One leg of the hop graph: a region where the rightmost particle is stuck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub rightmost: usize,
    pub vertices: Vec<usize>,
}

/// Split of a graph into a backbone and legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegStructure {
    pub legs: Vec<Leg>,
    /// Leg id of every vertex, `None` on the backbone.
    pub leg_of: Vec<Option<u32>>,
    /// Total leg population per rightmost-particle position.
    pub population: BTreeMap<usize, usize>,
}

impl LegStructure {
    pub fn backbone_size(&self) -> usize {
        self.leg_of.iter().filter(|l| l.is_none()).count()
    }
}

/// Identifies legs.
///
/// Deleting every edge that moves the rightmost particle splits the graph
/// into pieces of constant `i_max`. A piece with `i_max > 2 Np` is a leg when
/// none of its vertices can push the rightmost particle further right and at
/// least one vertex has that particle frozen in both directions. Everything
/// else is backbone.
pub fn backbone_legs(g: &AdjacencyGraph) -> LegStructure {
    let n = g.vertex_count();
    let imax = g.rightmost();
    let np = g.basis().particles();
    let mut piece = vec![u32::MAX; n];
    let mut legs = Vec::new();
    let mut leg_of = vec![None; n];
    let mut queue = VecDeque::new();
    let mut next = 0u32;
    for root in 0..n {
        if piece[root] != u32::MAX {
            continue;
        }
        piece[root] = next;
        queue.push_back(root);
        let mut members = Vec::new();
        let (mut grows, mut frozen) = (false, false);
        while let Some(v) = queue.pop_front() {
            members.push(v);
            let mut moves = false;
            for &u in g.neighbors(v) {
                let u = u as usize;
                if imax[u] == imax[v] {
                    if piece[u] == u32::MAX {
                        piece[u] = next;
                        queue.push_back(u);
                    }
                } else {
                    moves = true;
                    grows |= imax[u] > imax[v];
                }
            }
            frozen |= !moves;
        }
        if imax[root] > 2 * np && !grows && frozen {
            members.sort_unstable();
            let id = legs.len() as u32;
            for &v in &members {
                leg_of[v] = Some(id);
            }
            legs.push(Leg { rightmost: imax[root], vertices: members });
        }
        next += 1;
    }
    let mut population = BTreeMap::new();
    for leg in &legs {
        *population.entry(leg.rightmost).or_insert(0) += leg.vertices.len();
    }
    LegStructure { legs, leg_of, population }
}

/// `ordinal i_max component_id leg_id` lines; backbone vertices get leg `-1`.
pub fn write_vertex_labels<W: Write>(
    mut w: W,
    g: &AdjacencyGraph,
    components: &Components,
    legs: &LegStructure,
) -> Result<()> {
    let imax = g.rightmost();
    for v in 0..g.vertex_count() {
        let leg = legs.leg_of[v].map_or(-1, i64::from);
        writeln!(w, "{v} {} {} {leg}", imax[v], components.labels[v])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sector_sizes() {
        let spec = ModelSpec::uniform(1).unwrap();
        let sizes: Vec<usize> =
            (2..=6).map(|np| largest_sector(2 * np - 1, np, &spec).unwrap().len()).collect();
        assert_eq!(sizes, vec![2, 5, 14, 42, 132]);
        let spec = ModelSpec::uniform(2).unwrap();
        assert_eq!(largest_sector(4, 2, &spec).unwrap().len(), 3);
        assert_eq!(largest_sector(7, 3, &spec).unwrap().len(), 12);
    }

    #[test]
    fn components_cover_full_sector() {
        let spec = ModelSpec::uniform(2).unwrap();
        let full = SectorBasis::enumerate(10, 4, true).unwrap();
        let g = build_graph(&full, &spec).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.sizes.iter().sum::<usize>(), full.len());
        assert_eq!(c.labels[0], 0);
        let dw = largest_sector(10, 4, &spec).unwrap();
        assert_eq!(c.sizes[0], dw.len());
        for s in dw.iter() {
            assert_eq!(c.labels[full.index_of(&s).unwrap().unwrap()], 0);
        }
    }

    #[test]
    fn parity_alternates_along_edges() {
        let spec = ModelSpec::uniform(2).unwrap();
        let b = largest_sector(10, 4, &spec).unwrap();
        let g = build_graph(&b, &spec).unwrap();
        for (u, v) in g.edges() {
            assert_ne!(parity(&b.state(u)), parity(&b.state(v)));
        }
    }

    #[test]
    fn block_charge_precondition() {
        let spec = ModelSpec::uniform(2).unwrap();
        let s: FockState = "1001000100".parse().unwrap();
        assert!(matches!(left_block_charge(&s, 1, 3, &spec), Err(Error::Precondition(_))));
        assert_eq!(left_block_charge(&s, 1, 3 + 1, &spec).unwrap(), 0);
        let s: FockState = "1000100000".parse().unwrap();
        assert_eq!(left_block_charge(&s, 1, 4, &spec).unwrap(), 1);
    }

    #[test]
    fn labels_match_count() {
        for r in 1..=3 {
            let spec = ModelSpec::uniform(r).unwrap();
            for np in 2..=6 {
                let labels = frozen_region_labels(np, &spec).unwrap();
                assert_eq!(labels.len(), frozen_region_label_count(np, r), "r={r} np={np}");
            }
        }
    }

    #[test]
    fn export_formats() {
        let spec = ModelSpec::uniform(2).unwrap();
        let b = largest_sector(4, 2, &spec).unwrap();
        let g = build_graph(&b, &spec).unwrap();
        let mut edges = Vec::new();
        g.write_edge_list(&mut edges).unwrap();
        assert_eq!(String::from_utf8(edges).unwrap(), "0 1\n1 2\n");
        let c = connected_components(&g);
        let legs = backbone_legs(&g);
        let mut labels = Vec::new();
        write_vertex_labels(&mut labels, &g, &c, &legs).unwrap();
        assert_eq!(String::from_utf8(labels).unwrap(), "0 2 0 -1\n1 3 0 -1\n2 4 0 -1\n");
    }
}
