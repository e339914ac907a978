//! Sparse assembly of the particle-conserving East Hamiltonian.
//!
//! Each nearest-neighbour hop `i <-> i+1` is weighted by a kinetic coefficient
//! that depends only on sites `i-r..i-1`: the amplitude `t_l` of the nearest
//! occupied site at distance `l <= r`, or zero when all of them are empty.
//! Because the hopping pair itself is never consulted, forward and backward
//! hops share one coefficient and the operator is real symmetric. Only the
//! upper triangle is stored.

use std::io::Write;
use std::ops::{AddAssign, Mul};

use num_complex::Complex64;

use crate::basis::{low_mask, FockState, SectorBasis};
use crate::error::{Error, Result};
use crate::parallel;

/// Hopping amplitudes `t_1..t_r` of a range-`r` model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    amplitudes: Vec<f64>,
}

impl ModelSpec {
    /// All amplitudes equal to one.
    pub fn uniform(range: usize) -> Result<Self> {
        Self::new(vec![1.0; range])
    }

    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("constraint range must be at least 1".into()));
        }
        if amplitudes.len() >= 64 {
            return Err(Error::Domain("constraint range must be below 64".into()));
        }
        if let Some(t) = amplitudes.iter().find(|t| !t.is_finite() || **t <= 0.0) {
            return Err(Error::Domain(format!("hopping amplitude {t} must be positive and finite")));
        }
        Ok(Self { amplitudes })
    }

    pub fn range(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Coefficient of the hop between `site` and `site + 1` from the raw
    /// canonical value of a `len`-site state.
    #[inline]
    pub(crate) fn coefficient_bits(&self, bits: u64, len: usize, site: usize) -> f64 {
        // Bit 0 of `window` is site `site - 1`, bit 1 is `site - 2`, and so on.
        let shift = len - site + 1;
        let window = if shift >= 64 { 0 } else { bits >> shift };
        let w = window & low_mask(self.range());
        if w == 0 {
            0.0
        } else {
            self.amplitudes[w.trailing_zeros() as usize]
        }
    }
}

/// Calls `f(partner, site, coefficient)` for every allowed hop out of a raw
/// `len`-site state.
#[inline]
pub(crate) fn for_each_hop<F: FnMut(u64, usize, f64)>(spec: &ModelSpec, bits: u64, len: usize, mut f: F) {
    for i in 1..len {
        let pos = len - i - 1;
        let pair = (bits >> pos) & 0b11;
        if pair == 0 || pair == 0b11 {
            continue;
        }
        let k = spec.coefficient_bits(bits, len, i);
        if k != 0.0 {
            f(bits ^ (0b11 << pos), i, k);
        }
    }
}

/// Kinetic coefficient `K_{site,r}` of a state.
pub fn kinetic_coefficient(s: &FockState, site: usize, spec: &ModelSpec) -> Result<f64> {
    if site == 0 || site >= s.len() {
        return Err(Error::SiteOutOfRange { site, sites: s.len() });
    }
    Ok(spec.coefficient_bits(s.bits(), s.len(), site))
}

/// Kinetic coefficient computed term by term from the constraint products.
pub fn kinetic_coefficient_reference(s: &FockState, site: usize, spec: &ModelSpec) -> f64 {
    let n = |j: isize| -> f64 {
        if j < 1 {
            0.0
        } else {
            f64::from(u8::from(s.occupied(j as usize)))
        }
    };
    let i = site as isize;
    let mut k = 0.0;
    for (l, t) in spec.amplitudes().iter().enumerate() {
        let l = l as isize + 1;
        let mut p = n(i - l);
        for j in (i - l + 1)..i {
            p *= 1.0 - n(j);
        }
        k += t * p;
    }
    k
}

/// How hops that leave the basis are handled during assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    /// A hop to a configuration outside the basis is an error.
    #[default]
    Strict,
    /// Such hops are dropped, giving the projected operator.
    Restricted,
}

/// Scalars the operator can act on.
pub trait Scalar: Copy + Send + Sync + Default + AddAssign + Mul<f64, Output = Self> + 'static {}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Real symmetric sparse matrix holding its upper triangle in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` entries with 0-based indices. Entries
    /// below the diagonal are mirrored; duplicate positions are summed.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut e: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for &(r, c, v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::Domain(format!("entry ({r}, {c}) outside a {dim}x{dim} matrix")));
            }
            e.push((r.min(c), r.max(c), v));
        }
        e.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in e {
            match rows[r].last_mut() {
                Some(last) if last.0 as usize == c => last.1 += v,
                _ => rows[r].push((c as u32, v)),
            }
        }
        Ok(Self::from_rows(dim, rows))
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries of the upper triangle.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of one row: columns `>= row`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    /// Upper-triangle entries as `(row, col, value)`, 0-based.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Matrix element `H[a][b]` for any pair of indices.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let (r, c) = (a.min(b), a.max(b));
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = H x`.
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let mut y = vec![T::default(); self.dim];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = H x` into a caller-provided buffer.
    pub fn apply_into<T: Scalar>(&self, x: &[T], y: &mut [T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: y.len() });
        }
        let threads = parallel::threads();
        if threads == 1 || self.nnz() < 1 << 14 {
            self.apply_rows(x, y, 0..self.dim, 0);
            return Ok(());
        }
        // Each part owns a row range; mirrored contributions land at indices
        // >= the range start and are summed in part order afterwards.
        let parts = parallel::split_range(self.dim, threads);
        let partial: Vec<Vec<T>> = parallel::map_slice(&parts, |range| {
            let mut buf = vec![T::default(); self.dim - range.start];
            self.apply_rows(x, &mut buf, range.clone(), range.start);
            buf
        });
        y.iter_mut().for_each(|v| *v = T::default());
        for (range, buf) in parts.iter().zip(&partial) {
            for (k, v) in buf.iter().enumerate() {
                y[range.start + k] += *v;
            }
        }
        Ok(())
    }

    fn apply_rows<T: Scalar>(&self, x: &[T], y: &mut [T], rows: std::ops::Range<usize>, offset: usize) {
        if offset == 0 && rows.start == 0 && rows.end == self.dim {
            y.iter_mut().for_each(|v| *v = T::default());
        }
        for a in rows {
            let mut acc = T::default();
            let xa = x[a];
            for k in self.row_ptr[a]..self.row_ptr[a + 1] {
                let b = self.cols[k] as usize;
                let v = self.vals[k];
                acc += x[b] * v;
                if b != a {
                    y[b - offset] += xa * v;
                }
            }
            y[a - offset] += acc;
        }
    }

    /// Dense row-major copy of the full symmetric matrix.
    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let mut sums = vec![0.0f64; self.dim];
        for (r, c, v) in self.entries() {
            sums[r] += v.abs();
            if r != c {
                sums[c] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Coordinate dump: a `dim nnz` header, then `row col value` lines with
    /// 1-based indices for the upper triangle.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

/// Assembles `H_r` on a basis.
pub fn build_hamiltonian(basis: &SectorBasis, spec: &ModelSpec, mode: AssemblyMode) -> Result<SparseOperator> {
    let dim = basis.len();
    if dim > u32::MAX as usize {
        return Err(Error::Domain(format!("basis of {dim} states is too large to index")));
    }
    let len = basis.sites();
    let states = basis.bits();
    let row = |a: usize| -> Result<Vec<(u32, f64)>> {
        let bits = states[a];
        let mut out = Vec::new();
        let mut missing = None;
        for_each_hop(spec, bits, len, |partner, i, k| match basis.index_of_bits(partner) {
            Some(b) if b > a => out.push((b as u32, k)),
            Some(_) => {}
            None if mode == AssemblyMode::Strict => {
                missing.get_or_insert(i);
            }
            None => {}
        });
        if let Some(site) = missing {
            return Err(Error::PartnerMissing {
                state: FockState::from_bits_unchecked(bits, len).to_string(),
                site,
            });
        }
        out.sort_unstable_by_key(|e| e.0);
        Ok(out)
    };
    let parts = parallel::split_range(dim, 4 * parallel::threads());
    let blocks: Vec<Result<Vec<Vec<(u32, f64)>>>> =
        parallel::map_slice(&parts, |range| range.clone().map(row).collect());
    let mut rows = Vec::with_capacity(dim);
    for b in blocks {
        rows.extend(b?);
    }
    Ok(SparseOperator::from_rows(dim, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> FockState {
        s.parse().unwrap()
    }

    #[test]
    fn coefficient_matches_constraint_products() {
        let spec = ModelSpec::new(vec![1.0, 0.5, 0.25]).unwrap();
        let b = SectorBasis::enumerate(9, 4, false).unwrap();
        for s in b.iter() {
            for i in 1..9 {
                let fast = kinetic_coefficient(&s, i, &spec).unwrap();
                let slow = kinetic_coefficient_reference(&s, i, &spec);
                assert_eq!(fast, slow, "{s} site {i}");
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let spec = ModelSpec::uniform(2).unwrap();
        assert_eq!(kinetic_coefficient(&st("10100"), 3, &spec).unwrap(), 1.0);
        assert_eq!(kinetic_coefficient(&st("10010"), 4, &spec).unwrap(), 0.0);
        assert_eq!(kinetic_coefficient(&st("10010"), 3, &spec).unwrap(), 1.0);
        assert_eq!(kinetic_coefficient(&st("11000"), 1, &spec).unwrap(), 0.0);
        assert!(kinetic_coefficient(&st("11000"), 5, &spec).is_err());
    }

    #[test]
    fn three_state_block() {
        let spec = ModelSpec::uniform(2).unwrap();
        let b = SectorBasis::from_states(5, 2, Some(2), ["11000", "10100", "10010"].map(st)).unwrap();
        let h = build_hamiltonian(&b, &spec, AssemblyMode::Restricted).unwrap();
        let d = h.to_dense();
        let expect = [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(d[(r, c)], expect[r][c]);
            }
        }
        assert_eq!(build_hamiltonian(&b, &spec, AssemblyMode::Strict).unwrap(), h);
        let open = SectorBasis::from_states(5, 2, Some(2), ["11000", "10100"].map(st)).unwrap();
        assert!(matches!(
            build_hamiltonian(&open, &spec, AssemblyMode::Strict),
            Err(Error::PartnerMissing { .. })
        ));
    }

    #[test]
    fn apply_matches_dense() {
        let spec = ModelSpec::new(vec![1.0, 0.7]).unwrap();
        let b = SectorBasis::enumerate(10, 4, true).unwrap();
        let h = build_hamiltonian(&b, &spec, AssemblyMode::Strict).unwrap();
        let x: Vec<f64> = (0..b.len()).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let y = h.apply(&x).unwrap();
        let d = h.to_dense();
        for r in 0..b.len() {
            let want: f64 = (0..b.len()).map(|c| d[(r, c)] * x[c]).sum();
            assert!((want - y[r]).abs() < 1e-12);
        }
        assert!(h.apply(&x[1..]).is_err());
    }

    #[test]
    fn coordinate_dump() {
        let h = SparseOperator::from_entries(2, &[(1, 0, 1.5)]).unwrap();
        let mut out = Vec::new();
        h.write_coordinate(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "2 1\n1 2 1.5\n");
    }
}
