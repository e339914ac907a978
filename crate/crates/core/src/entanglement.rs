//! Bipartite entanglement over constrained bases and zero-entanglement
//! eigenstates.
//!
//! A cut at site `i` splits the chain into sites `1..=i` and `i+1..=L`. The
//! coefficient matrix of a state is block diagonal in the number of particles
//! on the left, so Schmidt values are computed block by block. Cut 1 is never
//! scanned: site 1 is frozen occupied in every sector studied here, which
//! makes that cut trivially unentangled.

use std::collections::BTreeSet;

use faer::Mat;
use num_complex::Complex64;

use crate::basis::{low_mask, FockState, SectorBasis};
use crate::error::{Error, Result};
use crate::fragmentation::{build_graph, connected_components, largest_sector, largest_sector_with_limit, parity};
use crate::hamiltonian::{build_hamiltonian, AssemblyMode, ModelSpec, Scalar, SparseOperator};
use crate::linalg::{null_space, orthonormalize, sparse_null_space, symmetric_eigen};
use crate::parallel;
use crate::spectral::{group_levels, EigenSystem, ZERO_MODE_REL_TOL};

/// Entropies below this many nats count as zero.
pub const ZERO_ENTROPY_TOL: f64 = 1e-10;

/// Levels closer than this are treated as one degenerate multiplet.
pub const MULTIPLET_GAP: f64 = 1e-10;

/// Basis-state weights below this are outside a state's support.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Amplitudes a Schmidt decomposition can be computed for.
pub trait Amplitude: Scalar {
    fn norm_sqr(self) -> f64;
    fn block_singular_values(rows: usize, cols: usize, entries: &[(u32, u32, Self)]) -> Result<Vec<f64>>;
}

impl Amplitude for f64 {
    fn norm_sqr(self) -> f64 {
        self * self
    }

    fn block_singular_values(rows: usize, cols: usize, entries: &[(u32, u32, Self)]) -> Result<Vec<f64>> {
        if rows == 1 || cols == 1 {
            return Ok(vec![entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt()]);
        }
        let mut m = Mat::<f64>::zeros(rows, cols);
        for &(r, c, v) in entries {
            m[(r as usize, c as usize)] = v;
        }
        crate::linalg::singular_values(&m)
    }
}

impl Amplitude for Complex64 {
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }

    fn block_singular_values(rows: usize, cols: usize, entries: &[(u32, u32, Self)]) -> Result<Vec<f64>> {
        if rows == 1 || cols == 1 {
            return Ok(vec![entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()]);
        }
        let mut m = Mat::<faer::c64>::zeros(rows, cols);
        for &(r, c, v) in entries {
            m[(r as usize, c as usize)] = v;
        }
        m.singular_values().map_err(|e| Error::Solver(format!("{e:?}")))
    }
}

/// Schmidt values and von Neumann entropy at one cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSpectrum {
    pub cut: usize,
    /// Descending, non-negative.
    pub schmidt: Vec<f64>,
    /// `-sum p ln p` with `p = lambda^2`, in nats.
    pub entropy: f64,
}

/// `-sum lambda^2 ln lambda^2`, skipping zeros.
pub fn entropy_of(schmidt: &[f64]) -> f64 {
    schmidt
        .iter()
        .map(|l| l * l)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Coefficient-matrix block with a fixed particle number on the left.
struct Block<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, T)>,
    weight: f64,
}

fn blocks_at_cut<T: Amplitude>(items: &[(u64, T)], sites: usize, cut: usize, transpose: bool) -> Vec<Block<T>> {
    let rb = sites - cut;
    let mask = low_mask(rb);
    let mut keyed: Vec<(u32, u64, u64, T)> = items
        .iter()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|&(b, a)| {
            let (l, r) = (b >> rb, b & mask);
            let (row, col) = if transpose { (r, l) } else { (l, r) };
            (l.count_ones(), row, col, a)
        })
        .collect();
    keyed.sort_unstable_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    let mut out = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let m = keyed[start].0;
        let mut end = start;
        while end < keyed.len() && keyed[end].0 == m {
            end += 1;
        }
        let group = &keyed[start..end];
        let mut cols: Vec<u64> = group.iter().map(|e| e.2).collect();
        cols.sort_unstable();
        cols.dedup();
        let mut entries = Vec::with_capacity(group.len());
        let mut row = 0u32;
        let mut weight = 0.0;
        for (k, e) in group.iter().enumerate() {
            if k > 0 && e.1 != group[k - 1].1 {
                row += 1;
            }
            let col = cols.binary_search(&e.2).unwrap() as u32;
            weight += e.3.norm_sqr();
            entries.push((row, col, e.3));
        }
        out.push(Block { rows: row as usize + 1, cols: cols.len(), entries, weight });
        start = end;
    }
    out
}

fn spectrum_of<T: Amplitude>(blocks: &[Block<T>], cut: usize) -> Result<CutSpectrum> {
    let mut schmidt = Vec::new();
    for b in blocks {
        schmidt.extend(T::block_singular_values(b.rows, b.cols, &b.entries)?);
    }
    schmidt.sort_by(|a, b| b.total_cmp(a));
    let entropy = entropy_of(&schmidt);
    Ok(CutSpectrum { cut, schmidt, entropy })
}

fn check_cut(basis: &SectorBasis, cut: usize) -> Result<()> {
    if cut == 0 || cut >= basis.sites() {
        return Err(Error::Domain(format!("cut {cut} outside 1..{}", basis.sites())));
    }
    Ok(())
}

fn items_of<'a, T: Amplitude>(v: &'a [T], basis: &'a SectorBasis) -> Result<Vec<(u64, T)>> {
    if v.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: v.len() });
    }
    Ok(basis.bits().iter().copied().zip(v.iter().copied()).collect())
}

/// Schmidt decomposition of `v` between sites `1..=cut` and the rest.
///
/// The entropy uses `p = lambda^2` directly, so `v` should be normalized.
pub fn schmidt_cut<T: Amplitude>(v: &[T], basis: &SectorBasis, cut: usize) -> Result<CutSpectrum> {
    check_cut(basis, cut)?;
    let items = items_of(v, basis)?;
    spectrum_of(&blocks_at_cut(&items, basis.sites(), cut, false), cut)
}

/// Same decomposition with the coefficient matrix grouped by right
/// configurations; agrees with [`schmidt_cut`] up to rounding.
pub fn schmidt_cut_right_grouped<T: Amplitude>(v: &[T], basis: &SectorBasis, cut: usize) -> Result<CutSpectrum> {
    check_cut(basis, cut)?;
    let items = items_of(v, basis)?;
    spectrum_of(&blocks_at_cut(&items, basis.sites(), cut, true), cut)
}

/// Schmidt decomposition of a sparse vector given as `(ordinal, amplitude)`.
pub fn schmidt_cut_sparse(entries: &[(usize, f64)], basis: &SectorBasis, cut: usize) -> Result<CutSpectrum> {
    check_cut(basis, cut)?;
    let items: Vec<(u64, f64)> = entries.iter().map(|&(k, a)| (basis.bits()[k], a)).collect();
    spectrum_of(&blocks_at_cut(&items, basis.sites(), cut, false), cut)
}

/// Entropies of `v` at every cut `1..L`.
pub fn entropy_profile<T: Amplitude>(v: &[T], basis: &SectorBasis) -> Result<Vec<f64>> {
    (1..basis.sites()).map(|c| schmidt_cut(v, basis, c).map(|s| s.entropy)).collect()
}

/// Whether a real state has entropy below `tol` at `cut`.
///
/// Most thermal states are rejected without an SVD: the entropy of the
/// block weights bounds `S` from below, and a cross (skeleton) rank-one
/// approximation of the dominant block bounds its tail weight from above, so
/// a large skeleton residual is only possible for genuinely entangled
/// blocks. Anything that passes both screens gets an exact SVD.
fn separable_at(items: &[(u64, f64)], sites: usize, cut: usize, tol: f64) -> Result<bool> {
    let blocks = blocks_at_cut(items, sites, cut, false);
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    if total == 0.0 {
        return Ok(false);
    }
    let hw: f64 = blocks
        .iter()
        .map(|b| b.weight / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    if hw > tol {
        return Ok(false);
    }
    let dom = blocks.iter().max_by(|a, b| a.weight.total_cmp(&b.weight)).unwrap();
    if dom.rows > 1 && dom.cols > 1 {
        let mut m = vec![0.0; dom.rows * dom.cols];
        for &(r, c, v) in &dom.entries {
            m[r as usize * dom.cols + c as usize] = v;
        }
        let (mut pr, mut pc, mut best) = (0, 0, 0.0f64);
        for r in 0..dom.rows {
            for c in 0..dom.cols {
                if m[r * dom.cols + c].abs() > best {
                    best = m[r * dom.cols + c].abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        let piv = m[pr * dom.cols + pc];
        let mut resid = 0.0;
        for r in 0..dom.rows {
            let a = m[r * dom.cols + pc] / piv;
            for c in 0..dom.cols {
                let d = m[r * dom.cols + c] - a * m[pr * dom.cols + c];
                resid += d * d;
            }
        }
        if resid > 1e-3 * dom.weight {
            return Ok(false);
        }
    }
    Ok(spectrum_of(&blocks, cut)?.entropy < tol)
}

/// Cuts `2..L` at which a real state is unentangled.
pub fn zero_entropy_cuts(v: &[f64], basis: &SectorBasis, tol: f64) -> Result<Vec<usize>> {
    let items = items_of(v, basis)?;
    let mut out = Vec::new();
    for cut in 2..basis.sites() {
        if separable_at(&items, basis.sites(), cut, tol)? {
            out.push(cut);
        }
    }
    Ok(out)
}

/// Zero-entropy counts at one cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutCount {
    pub cut: usize,
    /// Solver eigenvectors with `S_cut < tol`, as returned.
    pub raw: usize,
    /// Independent zero-entropy eigenstates after rotating degenerate multiplets.
    pub count: usize,
}

/// A zero-entropy eigenstate representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroEntropyState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Cuts with `S < tol`.
    pub cuts: Vec<usize>,
    /// Solver index when the representative is an unrotated eigenvector.
    pub eigen_index: Option<usize>,
}

impl ZeroEntropyState {
    pub fn support(&self) -> Vec<usize> {
        support_of(&self.vector)
    }
}

fn support_of(v: &[f64]) -> Vec<usize> {
    (0..v.len()).filter(|&k| v[k].abs() > SUPPORT_TOL).collect()
}

/// Result of scanning a full eigensystem for unentangled eigenstates.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroEntropyScan {
    pub cuts: Vec<CutCount>,
    /// Eigenvectors, as returned by the solver, unentangled at some cut.
    pub raw_total: usize,
    /// Dimension of the span of all zero-entropy eigenstates.
    pub total: usize,
    /// Number of distinct supports among the representatives.
    pub distinct_supports: usize,
    pub states: Vec<ZeroEntropyState>,
    /// Basis ordinals carrying weight in some representative.
    pub support: Vec<usize>,
    /// Same, restricted to representatives away from the zero-mode manifold.
    /// Only whole multiplets enter, so this does not depend on the solver basis.
    pub finite_energy_support: Vec<usize>,
}

impl ZeroEntropyScan {
    pub fn count_at(&self, cut: usize) -> usize {
        self.cuts.iter().find(|c| c.cut == cut).map_or(0, |c| c.count)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "cut,count")?;
        for c in &self.cuts {
            writeln!(w, "{},{}", c.cut, c.count)?;
        }
        Ok(())
    }
}

/// Counts zero-entropy eigenstates at every cut `2..L`.
///
/// Nondegenerate eigenvectors are tested directly. Inside a degenerate
/// multiplet the solver basis is arbitrary, so for each cut and each left
/// particle number the scan restricts the multiplet to vectors supported on
/// that block and extracts product vectors from the restricted span by
/// alternating maximization. Counts are ranks, so they do not depend on the
/// solver's choice of basis.
pub fn zero_entropy_scan(es: &EigenSystem, basis: &SectorBasis, tol: f64) -> Result<ZeroEntropyScan> {
    if es.dim() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: es.dim() });
    }
    let sites = basis.sites();
    let cuts: Vec<usize> = (2..sites).collect();
    let raw: Vec<Result<Vec<usize>>> =
        parallel::map_indexed(es.dim(), |k| zero_entropy_cuts(es.vector(k), basis, tol));
    let raw: Vec<Vec<usize>> = raw.into_iter().collect::<Result<_>>()?;
    let multiplets = es.multiplets(MULTIPLET_GAP);

    let per_multiplet: Vec<Result<Vec<ZeroEntropyState>>> = parallel::map_slice(&multiplets, |mult| {
        let energy = mult.iter().map(|&k| es.energies()[k]).sum::<f64>() / mult.len() as f64;
        let mut cands: Vec<ZeroEntropyState> = Vec::new();
        for &k in mult {
            if !raw[k].is_empty() {
                cands.push(ZeroEntropyState {
                    energy: es.energies()[k],
                    vector: es.vector(k).to_vec(),
                    cuts: raw[k].clone(),
                    eigen_index: Some(k),
                });
            }
        }
        if mult.len() > 1 {
            let vs: Vec<&[f64]> = mult.iter().map(|&k| es.vector(k)).collect();
            for &cut in &cuts {
                for v in product_vectors_in_span(&vs, basis, cut)? {
                    if cands.iter().any(|c| overlap(&c.vector, &v).abs() > 1.0 - 1e-8) {
                        continue;
                    }
                    let zc = zero_entropy_cuts(&v, basis, tol)?;
                    if !zc.is_empty() {
                        cands.push(ZeroEntropyState { energy, vector: v, cuts: zc, eigen_index: None });
                    }
                }
            }
        }
        Ok(cands)
    });
    let per_multiplet: Vec<Vec<ZeroEntropyState>> = per_multiplet.into_iter().collect::<Result<_>>()?;

    let rank = |vs: Vec<Vec<f64>>| orthonormalize(vs, 1e-6).len();
    let mut counts = Vec::with_capacity(cuts.len());
    for &cut in &cuts {
        let raw_n = raw.iter().filter(|r| r.contains(&cut)).count();
        let count = per_multiplet
            .iter()
            .map(|c| rank(c.iter().filter(|s| s.cuts.contains(&cut)).map(|s| s.vector.clone()).collect()))
            .sum();
        counts.push(CutCount { cut, raw: raw_n, count });
    }
    let total = per_multiplet.iter().map(|c| rank(c.iter().map(|s| s.vector.clone()).collect())).sum();
    let states: Vec<ZeroEntropyState> = per_multiplet.into_iter().flatten().collect();
    let supports: BTreeSet<Vec<usize>> = states.iter().map(ZeroEntropyState::support).collect();
    let support: BTreeSet<usize> = supports.iter().flatten().copied().collect();
    let emax = es.energies().iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let finite = finite_support(states.iter().map(|s| (s.energy, s.support())), ZERO_MODE_REL_TOL * emax);
    Ok(ZeroEntropyScan {
        cuts: counts,
        raw_total: raw.iter().filter(|r| !r.is_empty()).count(),
        total,
        distinct_supports: supports.len(),
        states,
        support: support.into_iter().collect(),
        finite_energy_support: finite,
    })
}

fn finite_support(items: impl Iterator<Item = (f64, Vec<usize>)>, zero_tol: f64) -> Vec<usize> {
    let set: BTreeSet<usize> = items.filter(|(e, _)| e.abs() > zero_tol).flat_map(|(_, s)| s).collect();
    set.into_iter().collect()
}

fn overlap(a: &[f64], b: &[f64]) -> f64 {
    crate::linalg::dot(a, b)
}

/// Product vectors (at `cut`) inside the span of orthonormal `vs`.
///
/// Returned vectors are normalized projections onto the span, so they are
/// exact members of it up to rounding.
pub fn product_vectors_in_span(vs: &[&[f64]], basis: &SectorBasis, cut: usize) -> Result<Vec<Vec<f64>>> {
    check_cut(basis, cut)?;
    let g = vs.len();
    let dim = basis.len();
    let sites = basis.sites();
    let rb = sites - cut;
    let left_n: Vec<u32> = basis.bits().iter().map(|b| (b >> rb).count_ones()).collect();
    let mut ms: Vec<u32> = left_n.clone();
    ms.sort_unstable();
    ms.dedup();
    let mut found = Vec::new();
    for m in ms {
        let inside: Vec<usize> = (0..dim).filter(|&k| left_n[k] == m).collect();
        let outside: Vec<usize> = (0..dim).filter(|&k| left_n[k] != m).collect();
        let a = Mat::from_fn(outside.len(), g, |i, j| vs[j][outside[i]]);
        let c = if outside.is_empty() { Mat::identity(g, g) } else { null_space(&a, 1e-9)? };
        let d = c.ncols();
        if d == 0 {
            continue;
        }
        let lefts: Vec<u64> = {
            let mut l: Vec<u64> = inside.iter().map(|&k| basis.bits()[k] >> rb).collect();
            l.sort_unstable();
            l.dedup();
            l
        };
        let rights: Vec<u64> = {
            let mut r: Vec<u64> = inside.iter().map(|&k| basis.bits()[k] & low_mask(rb)).collect();
            r.sort_unstable();
            r.dedup();
            r
        };
        let (p, q) = (lefts.len(), rights.len());
        let pos: Vec<usize> = inside
            .iter()
            .map(|&k| {
                let b = basis.bits()[k];
                lefts.binary_search(&(b >> rb)).unwrap() * q + rights.binary_search(&(b & low_mask(rb))).unwrap()
            })
            .collect();
        let mut span: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut mat = vec![0.0; p * q];
                for (t, &k) in inside.iter().enumerate() {
                    mat[pos[t]] = (0..g).map(|i| c[(i, j)] * vs[i][k]).sum();
                }
                mat
            })
            .collect();
        span = orthonormalize(span, 1e-8);
        while !span.is_empty() {
            let Some(coef) = rank_one_in_span(&span, p, q)? else { break };
            let mut mat = vec![0.0; p * q];
            for (cj, mj) in coef.iter().zip(&span) {
                crate::linalg::axpy(*cj, mj, &mut mat);
            }
            let n = crate::linalg::norm(&mat);
            let mut v = vec![0.0; dim];
            for (t, &k) in inside.iter().enumerate() {
                v[k] = mat[pos[t]] / n;
            }
            found.push(v);
            span = deflate(&span, &coef);
        }
    }
    Ok(found)
}

/// Searches the span of orthonormal `p x q` matrices for a rank-one member by
/// alternating exact maximization of `sum_j (a^T M_j b)^2`. Returns the
/// expansion coefficients of the rank-one member.
fn rank_one_in_span(span: &[Vec<f64>], p: usize, q: usize) -> Result<Option<Vec<f64>>> {
    const ACCEPT: f64 = 1.0 - 1e-11;
    // Order starts by how close each basis matrix already is to rank one.
    let mut starts: Vec<(f64, usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for (j, m) in span.iter().enumerate() {
        let (a, b, s) = top_singular_pair(m, p, q)?;
        starts.push((s * s, j, a, b));
    }
    starts.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    for (_, _, _, mut b) in starts.into_iter().take(4) {
        let mut f_prev = -1.0;
        for _ in 0..200 {
            // a <- top left singular vector of W = [M_j b]
            let w = Mat::from_fn(p, span.len(), |r, j| (0..q).map(|c| span[j][r * q + c] * b[c]).sum());
            let a = top_left_vector(&w)?;
            let z = Mat::from_fn(q, span.len(), |c, j| (0..p).map(|r| span[j][r * q + c] * a[r]).sum());
            b = top_left_vector(&z)?;
            let coef = coefficients(span, &a, &b, p, q);
            let f: f64 = coef.iter().map(|c| c * c).sum();
            if f > ACCEPT {
                return Ok(Some(coef));
            }
            if f - f_prev < 1e-14 {
                break;
            }
            f_prev = f;
        }
    }
    Ok(None)
}

fn coefficients(span: &[Vec<f64>], a: &[f64], b: &[f64], p: usize, q: usize) -> Vec<f64> {
    span.iter()
        .map(|m| (0..p).map(|r| a[r] * (0..q).map(|c| m[r * q + c] * b[c]).sum::<f64>()).sum())
        .collect()
}

fn top_left_vector(w: &Mat<f64>) -> Result<Vec<f64>> {
    if w.ncols() == 1 {
        let n: f64 = (0..w.nrows()).map(|i| w[(i, 0)] * w[(i, 0)]).sum::<f64>().sqrt();
        return Ok((0..w.nrows()).map(|i| w[(i, 0)] / n.max(f64::MIN_POSITIVE)).collect());
    }
    let svd = w.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
    let u = svd.U();
    Ok((0..w.nrows()).map(|i| u[(i, 0)]).collect())
}

fn top_singular_pair(m: &[f64], p: usize, q: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mat = Mat::from_fn(p, q, |r, c| m[r * q + c]);
    let svd = mat.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
    let (u, v, s) = (svd.U(), svd.V(), svd.S());
    Ok(((0..p).map(|i| u[(i, 0)]).collect(), (0..q).map(|i| v[(i, 0)]).collect(), s[0]))
}

/// Orthonormal basis of `span` minus the direction `sum_j coef_j M_j`.
fn deflate(span: &[Vec<f64>], coef: &[f64]) -> Vec<Vec<f64>> {
    let d = span.len();
    let n = crate::linalg::norm(coef);
    let c: Vec<f64> = coef.iter().map(|x| x / n).collect();
    // Householder reflection sending c to e_0; its other columns span c's complement.
    let mut w = c.clone();
    w[0] -= 1.0;
    let wn = crate::linalg::norm(&w);
    let refl = |i: usize, j: usize| -> f64 {
        let id = if i == j { 1.0 } else { 0.0 };
        if wn < 1e-15 {
            id
        } else {
            id - 2.0 * w[i] * w[j] / (wn * wn)
        }
    };
    let out: Vec<Vec<f64>> = (1..d)
        .map(|col| {
            let mut m = vec![0.0; span[0].len()];
            for (j, mj) in span.iter().enumerate() {
                crate::linalg::axpy(refl(j, col), mj, &mut m);
            }
            m
        })
        .collect();
    orthonormalize(out, 1e-8)
}

/// Eigenstate of a sub-chain problem: amplitudes over its own basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedState {
    pub basis: SectorBasis,
    pub amplitudes: Vec<f64>,
    pub energy: f64,
}

impl RestrictedState {
    pub fn sites(&self) -> usize {
        self.basis.sites()
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    /// `<n_i>` on the sub-chain.
    pub fn occupation(&self, site: usize) -> f64 {
        self.basis
            .iter()
            .zip(&self.amplitudes)
            .filter(|(s, _)| s.occupied(site))
            .map(|(_, a)| a * a)
            .sum()
    }

    /// Overlap with a state given as `(configuration, amplitude)` pairs.
    pub fn overlap_with(&self, terms: &[(FockState, f64)]) -> Result<f64> {
        let mut acc = 0.0;
        for (s, a) in terms {
            if let Some(k) = self.basis.index_of(s)? {
                acc += a * self.amplitudes[k];
            }
        }
        Ok(acc)
    }

    /// Projection weight of `terms` onto the span of `states`.
    pub fn span_weight(states: &[RestrictedState], terms: &[(FockState, f64)]) -> Result<f64> {
        let norm2: f64 = terms.iter().map(|t| t.1 * t.1).sum();
        let mut w = 0.0;
        for s in states {
            w += s.overlap_with(terms)?.powi(2);
        }
        Ok(w / norm2)
    }
}

fn check_left_window(m: usize, ell: usize, spec: &ModelSpec) -> Result<()> {
    let r = spec.range();
    if ell <= m + r || (r + 1) * m < r + ell {
        return Err(Error::Precondition(format!(
            "left states need m + r < l <= (r + 1) m - r; got m = {m}, l = {ell}, r = {r}"
        )));
    }
    Ok(())
}

/// Tolerance on `<n_l>` for an accepted left state.
pub const LEFT_OCCUPATION_TOL: f64 = 1e-12;

/// Residual tolerance of restricted and assembled eigenstates.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Left states on `ell` sites through the zero-energy overlap matrix.
///
/// The restricted problem (`m` particles on `ell` sites, domain-wall rooted)
/// is diagonalized; inside its zero-energy subspace the matrix
/// `N_ab = <E_a| n_ell |E_b>` is diagonalized and its null vectors are the
/// zero modes with an empty last site.
pub fn find_left_states(m: usize, ell: usize, spec: &ModelSpec) -> Result<Vec<RestrictedState>> {
    check_left_window(m, ell, spec)?;
    let basis = largest_sector(ell, m, spec)?;
    let h = build_hamiltonian(&basis, spec, AssemblyMode::Strict)?;
    let (energies, vectors) = symmetric_eigen(&h.to_dense())?;
    let emax = energies.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let zero: Vec<usize> = (0..energies.len()).filter(|&k| energies[k].abs() < ZERO_MODE_REL_TOL * emax).collect();
    if zero.is_empty() {
        return Ok(Vec::new());
    }
    let occ: Vec<f64> = basis.iter().map(|s| f64::from(u8::from(s.occupied(ell)))).collect();
    let z = zero.len();
    let n = Mat::from_fn(z, z, |a, b| {
        (0..basis.len()).map(|k| vectors[(k, zero[a])] * occ[k] * vectors[(k, zero[b])]).sum()
    });
    let (nvals, nvecs) = symmetric_eigen(&n)?;
    let mut out = Vec::new();
    for j in 0..z {
        if nvals[j] >= ZERO_MODE_REL_TOL {
            continue;
        }
        let mut amp: Vec<f64> = (0..basis.len()).map(|k| (0..z).map(|a| vectors[(k, zero[a])] * nvecs[(a, j)]).sum()).collect();
        let nrm = crate::linalg::norm(&amp);
        amp.iter_mut().for_each(|x| *x /= nrm);
        out.push(RestrictedState { basis: basis.clone(), amplitudes: amp, energy: 0.0 });
    }
    verify_left_states(&out, &h, ell)?;
    Ok(out)
}

/// Left states as the null space of `H` restricted to configurations with
/// site `ell` empty, split by sublattice.
///
/// Independent of [`find_left_states`] and far cheaper: no full
/// diagonalization is needed. Both return orthonormal bases of the same
/// subspace.
pub fn find_left_states_null_space(m: usize, ell: usize, spec: &ModelSpec) -> Result<Vec<RestrictedState>> {
    check_left_window(m, ell, spec)?;
    let basis = largest_sector(ell, m, spec)?;
    let h = build_hamiltonian(&basis, spec, AssemblyMode::Strict)?;
    let par: Vec<i8> = basis.iter().map(|s| parity(&s)).collect();
    let empty_last: Vec<bool> = basis.iter().map(|s| !s.occupied(ell)).collect();
    let mut out = Vec::new();
    for side in [1i8, -1] {
        let cols: Vec<usize> = (0..basis.len()).filter(|&k| par[k] == side && empty_last[k]).collect();
        if cols.is_empty() {
            continue;
        }
        let mut local = vec![usize::MAX; basis.len()];
        for (j, &c) in cols.iter().enumerate() {
            local[c] = j;
        }
        let mut row_of = vec![usize::MAX; basis.len()];
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        for k in (0..basis.len()).filter(|&k| par[k] != side) {
            row_of[k] = rows.len();
            rows.push(Vec::new());
        }
        // only one triangle is stored
        for (a, b, v) in h.entries() {
            for (r, c) in [(a, b), (b, a)] {
                if row_of[r] != usize::MAX && local[c] != usize::MAX {
                    rows[row_of[r]].push((local[c], v));
                }
            }
        }
        for z in sparse_null_space(cols.len(), &rows, 1e-10)? {
            let mut amp = vec![0.0; basis.len()];
            for (i, &c) in cols.iter().enumerate() {
                amp[c] = z[i];
            }
            out.push(RestrictedState { basis: basis.clone(), amplitudes: amp, energy: 0.0 });
        }
    }
    verify_left_states(&out, &h, ell)?;
    Ok(out)
}

fn verify_left_states(states: &[RestrictedState], h: &SparseOperator, ell: usize) -> Result<()> {
    for s in states {
        let hv = h.apply(&s.amplitudes)?;
        let res = crate::linalg::norm(&hv);
        if res > EIGEN_RESIDUAL_TOL {
            return Err(Error::Residual { residual: res, tol: EIGEN_RESIDUAL_TOL });
        }
        let occ = s.occupation(ell);
        if occ > LEFT_OCCUPATION_TOL {
            return Err(Error::Residual { residual: occ, tol: LEFT_OCCUPATION_TOL });
        }
    }
    Ok(())
}

/// Eigenstates of the sub-chain problem with `particles` particles on
/// `sites` sites and site 1 occupied, one list per connected component.
pub fn restricted_eigenstates(sites: usize, particles: usize, spec: &ModelSpec) -> Result<Vec<Vec<RestrictedState>>> {
    let full = SectorBasis::enumerate(sites, particles, true)?;
    let g = build_graph(&full, spec)?;
    let comps = connected_components(&g);
    let mut out = Vec::with_capacity(comps.count());
    for id in 0..comps.count() {
        let members = comps.members(id);
        let basis = SectorBasis::from_states(sites, particles, Some(spec.range()), members.iter().map(|&k| full.state(k)))?;
        out.push(component_eigenstates(&basis, spec)?);
    }
    Ok(out)
}

fn component_eigenstates(basis: &SectorBasis, spec: &ModelSpec) -> Result<Vec<RestrictedState>> {
    let h = build_hamiltonian(basis, spec, AssemblyMode::Strict)?;
    let (e, v) = symmetric_eigen(&h.to_dense())?;
    Ok((0..basis.len())
        .map(|k| RestrictedState {
            basis: basis.clone(),
            amplitudes: (0..basis.len()).map(|i| v[(i, k)]).collect(),
            energy: e[k],
        })
        .collect())
}

/// `left (x) 0^q (x) right`, verified as an eigenstate of the full sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableEigenstate {
    pub left_particles: usize,
    pub left_sites: usize,
    pub gap: usize,
    pub right_particles: usize,
    pub right_sites: usize,
    pub right_energy: f64,
    pub energy: f64,
    /// Nonzero amplitudes as `(ordinal, amplitude)`, ascending ordinal.
    pub entries: Vec<(usize, f64)>,
}

impl SeparableEigenstate {
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for &(k, a) in &self.entries {
            v[k] = a;
        }
        v
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| e.1.abs() > SUPPORT_TOL).map(|e| e.0).collect()
    }

    /// Support as bitstrings of the full chain.
    pub fn support_bitmasks(&self, basis: &SectorBasis) -> Vec<String> {
        self.support().into_iter().map(|k| basis.state(k).to_string()).collect()
    }
}

/// Builds `left (x) 0^gap (x) right` on `basis` and checks it against `h`.
pub fn assemble_separable(
    left: &RestrictedState,
    gap: usize,
    right: &RestrictedState,
    basis: &SectorBasis,
    h: &SparseOperator,
    spec: &ModelSpec,
) -> Result<SeparableEigenstate> {
    if right.particles() > 0 && gap < spec.range() {
        return Err(Error::Precondition(format!("gap {gap} is shorter than the range {}", spec.range())));
    }
    let total = left.sites() + gap + right.sites();
    if total != basis.sites() {
        return Err(Error::Precondition(format!("{} + {gap} + {} sites do not make {}", left.sites(), right.sites(), basis.sites())));
    }
    if h.dim() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: h.dim() });
    }
    let shift = right.sites();
    let mut entries = Vec::new();
    for (ls, la) in left.basis.bits().iter().zip(&left.amplitudes) {
        if *la == 0.0 {
            continue;
        }
        for (rs, ra) in right.basis.bits().iter().zip(&right.amplitudes) {
            if *ra == 0.0 {
                continue;
            }
            let bits = (ls << (gap + shift)) | rs;
            match basis.index_of_bits(bits) {
                Some(k) => entries.push((k, la * ra)),
                None => return Err(Error::SectorMembership(FockState::from_bits_unchecked(bits, total).to_string())),
            }
        }
    }
    entries.sort_unstable_by_key(|e| e.0);
    let energy = left.energy + right.energy;
    let mut v = vec![0.0; basis.len()];
    for &(k, a) in &entries {
        v[k] = a;
    }
    let hv = h.apply(&v)?;
    let res = hv.iter().zip(&v).map(|(a, b)| (a - energy * b).powi(2)).sum::<f64>().sqrt();
    if res > EIGEN_RESIDUAL_TOL {
        return Err(Error::Residual { residual: res, tol: EIGEN_RESIDUAL_TOL });
    }
    Ok(SeparableEigenstate {
        left_particles: left.particles(),
        left_sites: left.sites(),
        gap,
        right_particles: right.particles(),
        right_sites: right.sites(),
        right_energy: right.energy,
        energy,
        entries,
    })
}

/// Every separable eigenstate obtainable by assembly, with counts.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableCensus {
    pub basis: SectorBasis,
    pub states: Vec<SeparableEigenstate>,
    /// Rank of the assembled family.
    pub total: usize,
    /// `(cut, rank of members unentangled at that cut)` for cuts `2..L`.
    pub per_cut: Vec<(usize, usize)>,
    pub distinct_supports: usize,
    pub support: Vec<usize>,
    /// Support of the members with nonzero energy.
    pub finite_energy_support: Vec<usize>,
    /// Left windows `(m, l)` whose sector exceeded the size cap. When
    /// nonempty, every count is a lower bound.
    pub skipped_windows: Vec<(usize, usize)>,
}

/// Largest left-window sector the default census solves.
pub const CENSUS_WINDOW_CAP: usize = 16_000;

impl SeparableCensus {
    pub fn is_complete(&self) -> bool {
        self.skipped_windows.is_empty()
    }

    pub fn count_at(&self, cut: usize) -> usize {
        self.per_cut.iter().find(|c| c.0 == cut).map_or(0, |c| c.1)
    }
}

/// Constructs all separable eigenstates of the domain-wall sector.
///
/// For every admissible left window `(m, l)` the left states are combined
/// with every gap `q >= r` and every eigenstate of every connected component
/// of the right problem whose configurations land in the sector. Windows
/// holding all particles are padded with empty sites instead. Counting is
/// by rank inside each energy level, so equivalent constructions are counted
/// once.
///
/// Windows whose left sector is larger than [`CENSUS_WINDOW_CAP`] are
/// skipped and listed; see [`separable_census_with_cap`].
pub fn separable_census(sites: usize, particles: usize, spec: &ModelSpec) -> Result<SeparableCensus> {
    separable_census_with_cap(sites, particles, spec, CENSUS_WINDOW_CAP)
}

/// [`separable_census`] with an explicit left-window size cap.
pub fn separable_census_with_cap(sites: usize, particles: usize, spec: &ModelSpec, cap: usize) -> Result<SeparableCensus> {
    let basis = largest_sector(sites, particles, spec)?;
    let h = build_hamiltonian(&basis, spec, AssemblyMode::Strict)?;
    let r = spec.range();
    let mut windows = Vec::new();
    for m in 1..=particles {
        for ell in (m + r + 1)..=((r + 1) * m).saturating_sub(r) {
            let fits = if m == particles { ell < sites } else { ell + r + (particles - m) <= sites };
            if fits {
                windows.push((m, ell));
            }
        }
    }
    let mut skipped_windows = Vec::new();
    let mut kept = Vec::with_capacity(windows.len());
    for (m, ell) in windows {
        match largest_sector_with_limit(ell, m, spec, cap) {
            Ok(_) => kept.push((m, ell)),
            Err(e) if e.is_resource_cap() => skipped_windows.push((m, ell)),
            Err(e) => return Err(e),
        }
    }
    let windows = kept;
    let lefts: Vec<Result<Vec<RestrictedState>>> =
        parallel::map_slice(&windows, |&(m, ell)| find_left_states_null_space(m, ell, spec));
    let mut states = Vec::new();
    for (&(m, ell), left) in windows.iter().zip(lefts) {
        let left = left?;
        if left.is_empty() {
            continue;
        }
        let n_r = particles - m;
        if n_r == 0 {
            let l_r = sites - ell;
            let empty = RestrictedState {
                basis: SectorBasis::from_states(l_r, 0, Some(r), [FockState::empty(l_r)?])?,
                amplitudes: vec![1.0],
                energy: 0.0,
            };
            let probe = left[0].basis.state(0);
            if basis.index_of_bits(probe.bits() << l_r).is_some() {
                for l in &left {
                    states.push(assemble_separable(l, 0, &empty, &basis, &h, spec)?);
                }
            }
            continue;
        }
        for gap in r..=(sites - ell - n_r) {
            let l_r = sites - ell - gap;
            let probe = left[0].basis.state(0);
            for comp in restricted_eigenstates(l_r, n_r, spec)? {
                let rep = comp[0].basis.state(0);
                let bits = (probe.bits() << (gap + l_r)) | rep.bits();
                if basis.index_of_bits(bits).is_none() {
                    continue;
                }
                for right in &comp {
                    for l in &left {
                        states.push(assemble_separable(l, gap, right, &basis, &h, spec)?);
                    }
                }
            }
        }
    }

    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let sorted: Vec<f64> = order.iter().map(|&k| energies[k]).collect();
    let groups: Vec<Vec<usize>> =
        group_levels(&sorted, 1e-9).into_iter().map(|g| g.into_iter().map(|i| order[i]).collect()).collect();

    let cuts: Vec<usize> = (2..sites).collect();
    let zero_cuts: Vec<Result<Vec<usize>>> = parallel::map_slice(&states, |s| {
        let mut zc = Vec::new();
        for &c in &cuts {
            if schmidt_cut_sparse(&s.entries, &basis, c)?.entropy < ZERO_ENTROPY_TOL {
                zc.push(c);
            }
        }
        Ok(zc)
    });
    let zero_cuts: Vec<Vec<usize>> = zero_cuts.into_iter().collect::<Result<_>>()?;

    let rank_of = |members: &[usize]| -> usize {
        if members.is_empty() {
            return 0;
        }
        let mut cols: Vec<usize> = members.iter().flat_map(|&k| states[k].entries.iter().map(|e| e.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let vs: Vec<Vec<f64>> = members
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; cols.len()];
                for &(o, a) in &states[k].entries {
                    v[cols.binary_search(&o).unwrap()] = a;
                }
                v
            })
            .collect();
        orthonormalize(vs, 1e-6).len()
    };
    let total = groups.iter().map(|g| rank_of(g)).sum();
    let per_cut = cuts
        .iter()
        .map(|&c| {
            let n = groups
                .iter()
                .map(|g| rank_of(&g.iter().copied().filter(|&k| zero_cuts[k].contains(&c)).collect::<Vec<_>>()))
                .sum();
            (c, n)
        })
        .collect();
    let supports: BTreeSet<Vec<usize>> = states.iter().map(SeparableEigenstate::support).collect();
    let support: BTreeSet<usize> = supports.iter().flatten().copied().collect();
    let emax = states.iter().fold(h.norm_bound(), |m, s| m.max(s.energy.abs()));
    let finite = finite_support(states.iter().map(|s| (s.energy, s.support())), ZERO_MODE_REL_TOL * emax);
    Ok(SeparableCensus {
        finite_energy_support: finite,
        skipped_windows,
        basis,
        states,
        total,
        per_cut,
        distinct_supports: supports.len(),
        support: support.into_iter().collect(),
    })
}
