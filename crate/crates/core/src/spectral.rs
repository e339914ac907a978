//! Full diagonalization, level statistics and ground-state properties.

use std::io::Write;

use faer::Mat;

use crate::basis::SectorBasis;
use crate::entanglement::schmidt_cut;
use crate::error::{Error, Result};
use crate::fit::Polynomial;
use crate::hamiltonian::SparseOperator;
use crate::linalg::{lanczos_lowest, symmetric_eigen, symmetric_eigenvalues};

/// Largest dimension handed to the dense solver by default.
pub const DEFAULT_DENSE_CAP: usize = 40_000;

/// Default degree of the unfolding polynomial.
pub const DEFAULT_UNFOLD_DEGREE: usize = 7;

/// Upper edge of the default level-statistics window.
pub const DEFAULT_WINDOW_TOP: f64 = -0.1;

/// Fewest levels accepted by [`level_spacings`].
pub const MIN_LEVELS: usize = 50;

/// Relative tolerance for counting exact zero modes.
pub const ZERO_MODE_REL_TOL: f64 = 1e-10;

/// Complete eigendecomposition: ascending energies, vectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl EigenSystem {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Eigenvector `k`, in basis order.
    pub fn vector(&self, k: usize) -> &[f64] {
        self.vectors.col_as_slice(k)
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut e = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                e = e.max((g[(i, j)] - want).abs());
            }
        }
        e
    }

    /// `max_k || H v_k - E_k v_k ||`.
    pub fn max_residual(&self, h: &SparseOperator) -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..self.dim() {
            let v = self.vector(k);
            let hv = h.apply(v)?;
            let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - self.energies[k] * b).powi(2)).sum();
            worst = worst.max(r.sqrt());
        }
        Ok(worst)
    }

    /// Groups of eigenvector indices whose consecutive energies differ by
    /// less than `gap`.
    pub fn multiplets(&self, gap: f64) -> Vec<Vec<usize>> {
        group_levels(&self.energies, gap)
    }

    /// `index,energy` CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_spectrum_csv(w, &self.energies)
    }
}

pub(crate) fn group_levels(energies: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, e) in energies.iter().enumerate() {
        match out.last_mut() {
            Some(g) if e - energies[*g.last().unwrap()] < gap => g.push(k),
            _ => out.push(vec![k]),
        }
    }
    out
}

pub fn write_spectrum_csv<W: Write>(mut w: W, energies: &[f64]) -> Result<()> {
    writeln!(w, "index,energy")?;
    for (k, e) in energies.iter().enumerate() {
        writeln!(w, "{k},{e}")?;
    }
    Ok(())
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    Ok(())
}

/// Dense diagonalization with the default cap.
pub fn diagonalize(h: &SparseOperator) -> Result<EigenSystem> {
    diagonalize_with_cap(h, DEFAULT_DENSE_CAP)
}

pub fn diagonalize_with_cap(h: &SparseOperator, cap: usize) -> Result<EigenSystem> {
    check_cap(h.dim(), cap)?;
    let dense = h.to_dense();
    let (energies, vectors) = symmetric_eigen(&dense)?;
    Ok(EigenSystem { energies, vectors })
}

/// Energies only, ascending.
pub fn eigenvalues_with_cap(h: &SparseOperator, cap: usize) -> Result<Vec<f64>> {
    check_cap(h.dim(), cap)?;
    symmetric_eigenvalues(&h.to_dense())
}

/// Cumulative distribution of the GOE Wigner surmise.
pub fn goe_cdf(s: f64) -> f64 {
    1.0 - (-std::f64::consts::PI * s * s / 4.0).exp()
}

/// GOE Wigner surmise density `(pi/2) s exp(-pi s^2 / 4)`.
pub fn goe_density(s: f64) -> f64 {
    let pi = std::f64::consts::PI;
    0.5 * pi * s * (-pi * s * s / 4.0).exp()
}

/// Cumulative distribution of Poisson spacings.
pub fn poisson_cdf(s: f64) -> f64 {
    1.0 - (-s).exp()
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0f64, |d, (k, &x)| {
        let f = cdf(x);
        d.max((f - k as f64 / n).abs()).max(((k + 1) as f64 / n - f).abs())
    })
}

/// Unfolded nearest-neighbour spacings and their histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingHistogram {
    pub levels: usize,
    pub spacings: Vec<f64>,
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub ks_goe: f64,
    pub ks_poisson: f64,
}

impl SpacingHistogram {
    pub fn mean_spacing(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }

    /// `sum density * width`, one by construction.
    pub fn total_mass(&self) -> f64 {
        self.density.iter().zip(self.edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum()
    }

    /// `s,density` CSV with bin centres.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,density")?;
        for (d, e) in self.density.iter().zip(self.edges.windows(2)) {
            writeln!(w, "{},{}", 0.5 * (e[0] + e[1]), d)?;
        }
        Ok(())
    }
}

/// Fraction of the windowed levels dropped at each end after unfolding,
/// where a global polynomial cannot follow the vanishing density of states.
pub const UNFOLD_EDGE_TRIM: f64 = 0.05;

/// Width of the spacing histogram bins.
pub const SPACING_BIN_WIDTH: f64 = 0.1;

/// Level-spacing statistics of the levels inside `[lo, hi]`.
///
/// The staircase `N(E)` of the windowed levels is fitted by a polynomial of
/// degree `unfold_degree`; spacings of the unfolded levels are rescaled to
/// unit mean before the histogram and KS distances are computed. The
/// outermost [`UNFOLD_EDGE_TRIM`] of the levels on each side take part in the
/// fit but not in the statistics.
pub fn level_spacings(energies: &[f64], window: (f64, f64), unfold_degree: usize) -> Result<SpacingHistogram> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty window [{lo}, {hi}]")));
    }
    let mut levels: Vec<f64> = energies.iter().copied().filter(|e| *e >= lo && *e <= hi).collect();
    levels.sort_by(f64::total_cmp);
    if levels.len() < MIN_LEVELS {
        return Err(Error::InsufficientStatistics { found: levels.len(), needed: MIN_LEVELS });
    }
    let staircase: Vec<f64> = (0..levels.len()).map(|k| k as f64 + 0.5).collect();
    let p = Polynomial::fit(&levels, &staircase, unfold_degree)?;
    let trim = (levels.len() as f64 * UNFOLD_EDGE_TRIM).floor() as usize;
    let unfolded: Vec<f64> = levels[trim..levels.len() - trim].iter().map(|&e| p.eval(e)).collect();
    let raw: Vec<f64> = unfolded.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let spacings: Vec<f64> = raw.iter().map(|s| s / mean).collect();
    let smax = spacings.iter().copied().fold(0.0f64, f64::max);
    let smin = spacings.iter().copied().fold(0.0f64, f64::min);
    let first = (smin / SPACING_BIN_WIDTH).floor() as i64;
    let last = ((smax / SPACING_BIN_WIDTH).floor() as i64 + 1).max(first + 1);
    let edges: Vec<f64> = (first..=last).map(|k| k as f64 * SPACING_BIN_WIDTH).collect();
    let mut counts = vec![0usize; edges.len() - 1];
    for s in &spacings {
        let k = ((s / SPACING_BIN_WIDTH).floor() as i64 - first) as usize;
        let top = counts.len() - 1;
        counts[k.min(top)] += 1;
    }
    let n = spacings.len() as f64;
    let density = counts.iter().map(|&c| c as f64 / (n * SPACING_BIN_WIDTH)).collect();
    Ok(SpacingHistogram {
        levels: levels.len(),
        ks_goe: ks_distance(&spacings, goe_cdf),
        ks_poisson: ks_distance(&spacings, poisson_cdf),
        spacings,
        edges,
        density,
    })
}

/// Number of energies with `|E| < ZERO_MODE_REL_TOL * max |E|`, and that tolerance.
pub fn zero_mode_count(energies: &[f64]) -> (usize, f64) {
    let emax = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let tol = ZERO_MODE_REL_TOL * emax;
    (energies.iter().filter(|e| e.abs() < tol).count(), tol)
}

/// Normalized histogram of energies on a range symmetric about zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOfStates {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub zero_modes: usize,
    pub zero_tol: f64,
}

impl DensityOfStates {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "energy,density")?;
        for (d, e) in self.density.iter().zip(self.edges.windows(2)) {
            writeln!(w, "{},{}", 0.5 * (e[0] + e[1]), d)?;
        }
        Ok(())
    }
}

pub fn density_of_states(energies: &[f64], bins: usize) -> Result<DensityOfStates> {
    if bins == 0 || energies.is_empty() {
        return Err(Error::Domain("density of states needs levels and at least one bin".into()));
    }
    let emax = energies.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
    let lim = emax * (1.0 + 1e-12);
    let width = 2.0 * lim / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| -lim + k as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for e in energies {
        let k = ((e + lim) / width).floor() as usize;
        counts[k.min(bins - 1)] += 1;
    }
    let n = energies.len() as f64;
    let (zero_modes, zero_tol) = zero_mode_count(energies);
    Ok(DensityOfStates {
        edges,
        density: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        zero_modes,
        zero_tol,
    })
}

/// Ground-state summary of a sector.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateReport {
    pub energy: f64,
    /// `E_1 - E_0` with `E_1` the next level.
    pub gap: f64,
    pub degenerate: bool,
    /// `<n_i>`, site 1 first.
    pub density: Vec<f64>,
    /// Entropy at the cut `floor(L / 2)`.
    pub half_cut_entropy: f64,
}

/// Degeneracy threshold for the ground state.
pub const GROUND_DEGENERACY_TOL: f64 = 1e-12;

pub fn ground_state_report(es: &EigenSystem, basis: &SectorBasis) -> Result<GroundStateReport> {
    if es.dim() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: es.dim() });
    }
    if es.dim() < 2 {
        return Err(Error::Domain("ground-state report needs at least two levels".into()));
    }
    let e = es.energies();
    report_from(e[0], e[1], es.vector(0), basis)
}

/// Same report from the two lowest Lanczos pairs, for sectors beyond the dense cap.
pub fn ground_state_lanczos(h: &SparseOperator, basis: &SectorBasis) -> Result<GroundStateReport> {
    if h.dim() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: h.dim() });
    }
    let r = lanczos_lowest(h, 2, 1e-10, 2000)?;
    report_from(r.values[0], r.values[1], &r.vectors[0], basis)
}

fn report_from(e0: f64, e1: f64, v: &[f64], basis: &SectorBasis) -> Result<GroundStateReport> {
    let gap = e1 - e0;
    let density = crate::dynamics::density_profile(v, basis);
    let half = schmidt_cut(v, basis, basis.sites() / 2)?;
    Ok(GroundStateReport {
        energy: e0,
        gap,
        degenerate: gap < GROUND_DEGENERACY_TOL,
        density,
        half_cut_entropy: half.entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level() {
        let h = SparseOperator::from_entries(2, &[(0, 1, 1.0)]).unwrap();
        let es = diagonalize(&h).unwrap();
        assert!((es.energies()[0] + 1.0).abs() < 1e-14 && (es.energies()[1] - 1.0).abs() < 1e-14);
        assert!(es.orthonormality_error() < 1e-14);
        assert!(matches!(diagonalize_with_cap(&h, 1), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 2000;
        let sample: Vec<f64> = (0..n)
            .map(|k| {
                let u = (k as f64 + 0.5) / n as f64;
                (-4.0 * (1.0 - u).ln() / std::f64::consts::PI).sqrt()
            })
            .collect();
        assert!(ks_distance(&sample, goe_cdf) < 1e-3);
        assert!(ks_distance(&sample, poisson_cdf) > 0.1);
    }

    #[test]
    fn too_few_levels() {
        let e: Vec<f64> = (0..30).map(f64::from).collect();
        assert!(matches!(level_spacings(&e, (-1.0, 100.0), 3), Err(Error::InsufficientStatistics { .. })));
    }

    #[test]
    fn picket_fence_unfolds_to_unit_spacing() {
        let e: Vec<f64> = (0..200).map(|k| 0.3 * k as f64 - 20.0).collect();
        let h = level_spacings(&e, (-100.0, 100.0), 7).unwrap();
        assert!((h.mean_spacing() - 1.0).abs() < 1e-12);
        assert!(h.spacings.iter().all(|s| (s - 1.0).abs() < 1e-8));
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dos_counts_zero_modes() {
        let e = [-2.0, -1.0, 0.0, 1e-13, 1.0, 2.0];
        let d = density_of_states(&e, 4).unwrap();
        assert_eq!(d.zero_modes, 2);
        let mass: f64 = d.density.iter().zip(d.edges.windows(2)).map(|(x, w)| x * (w[1] - w[0])).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
