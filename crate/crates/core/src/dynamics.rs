//! Quench dynamics: exact and RK4 evolution, long-time predictions and
//! transport diagnostics.

use std::io::Write;

use faer::Mat;
use num_complex::Complex64;

use crate::basis::{FockState, SectorBasis};
use crate::entanglement::{schmidt_cut, Amplitude};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, local_quadratic_slope, LinearFit};
use crate::hamiltonian::SparseOperator;
use crate::spectral::EigenSystem;

/// Allowed norm drift between renormalizations.
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

/// Drift that aborts a run when renormalization is off.
pub const NORM_ABORT: f64 = 1e-6;

/// Samples per decade of the logarithmic schedule.
pub const DEFAULT_PER_DECADE: usize = 32;

/// First sample of the logarithmic schedule.
pub const DEFAULT_T_MIN: f64 = 0.1;

/// Points in the local-quadratic log-derivative window.
pub const DEFAULT_SMOOTHING: usize = 9;

/// Largest step accepted by default.
pub const DEFAULT_MAX_DT: f64 = 1e-2;

/// `t_min * 10^(k / per_decade)` for every such time not beyond `t_max`.
pub fn log_schedule(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && per_decade > 0) {
        return Err(Error::Domain(format!("bad log schedule [{t_min}, {t_max}] with {per_decade} per decade")));
    }
    let n = ((t_max / t_min).log10() * per_decade as f64 + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| t_min * 10f64.powf(k as f64 / per_decade as f64)).collect())
}

/// `n + 1` equally spaced times on `[0, t_max]`.
pub fn uniform_schedule(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n.max(1) as f64).collect()
}

/// Normalized real vector of a single configuration.
pub fn product_state(basis: &SectorBasis, s: &FockState) -> Result<Vec<f64>> {
    superposition(basis, &[(*s, 1.0)])
}

/// Normalized real vector from `(configuration, amplitude)` terms.
pub fn superposition(basis: &SectorBasis, terms: &[(FockState, f64)]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; basis.len()];
    for (s, a) in terms {
        let k = basis.index_of(s)?.ok_or_else(|| Error::SectorMembership(s.to_string()))?;
        v[k] += a;
    }
    let n = crate::linalg::norm(&v);
    if n == 0.0 {
        return Err(Error::Domain("superposition has zero norm".into()));
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(v)
}

/// `<n_i>` for every site, site 1 first.
pub fn density_profile<T: Amplitude>(v: &[T], basis: &SectorBasis) -> Vec<f64> {
    let l = basis.sites();
    let mut out = vec![0.0; l];
    for (&b, a) in basis.bits().iter().zip(v) {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let mut bits = b;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            out[l - 1 - p] += w;
            bits &= bits - 1;
        }
    }
    out
}

/// `sqrt(sum_{i > Np} <n_i> (i - Np)^2)`.
pub fn displacement(profile: &[f64], particles: usize) -> f64 {
    profile
        .iter()
        .enumerate()
        .skip(particles)
        .map(|(k, n)| n * ((k + 1 - particles) as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Observables recorded at every sample time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableTrace {
    pub times: Vec<f64>,
    /// `density[t][i - 1] = <n_i(t)>`.
    pub density: Vec<Vec<f64>>,
    pub fidelity: Vec<f64>,
    pub displacement: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    pub entropy_cuts: Vec<usize>,
    /// `entropy[t][k]` at cut `entropy_cuts[k]`.
    pub entropy: Vec<Vec<f64>>,
    pub particles: usize,
}

impl ObservableTrace {
    fn new(particles: usize, entropy_cuts: &[usize]) -> Self {
        Self { particles, entropy_cuts: entropy_cuts.to_vec(), ..Self::default() }
    }

    fn record(
        &mut self,
        t: f64,
        psi: &[Complex64],
        psi0: &[f64],
        basis: &SectorBasis,
        energy: f64,
    ) -> Result<()> {
        let dens = density_profile(psi, basis);
        let ov: Complex64 = psi.iter().zip(psi0).map(|(a, b)| a * b).sum();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut ent = Vec::with_capacity(self.entropy_cuts.len());
        for &c in &self.entropy_cuts {
            ent.push(schmidt_cut(psi, basis, c)?.entropy);
        }
        self.times.push(t);
        self.displacement.push(displacement(&dens, self.particles));
        self.density.push(dens);
        self.fidelity.push(ov.norm_sqr());
        self.norm.push(norm);
        self.energy.push(energy);
        self.entropy.push(ent);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `<n_site(t)>` over all samples.
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.density.iter().map(|d| d[site - 1]).collect()
    }

    /// Mean density profile over samples with `t0 <= t <= t1`.
    pub fn window_average(&self, t0: f64, t1: f64) -> Option<Vec<f64>> {
        let idx: Vec<usize> = (0..self.len()).filter(|&k| self.times[k] >= t0 && self.times[k] <= t1).collect();
        if idx.is_empty() {
            return None;
        }
        let l = self.density[0].len();
        let mut out = vec![0.0; l];
        for &k in &idx {
            for (o, d) in out.iter_mut().zip(&self.density[k]) {
                *o += d;
            }
        }
        out.iter_mut().for_each(|o| *o /= idx.len() as f64);
        Some(out)
    }

    /// `t,n_1..n_L,F,R` CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let l = self.density.first().map_or(0, Vec::len);
        write!(w, "t")?;
        for i in 1..=l {
            write!(w, ",n_{i}")?;
        }
        writeln!(w, ",F,R")?;
        for k in 0..self.len() {
            write!(w, "{}", self.times[k])?;
            for n in &self.density[k] {
                write!(w, ",{n}")?;
            }
            writeln!(w, ",{},{}", self.fidelity[k], self.displacement[k])?;
        }
        Ok(())
    }

    /// `t,S_c...` CSV over the recorded cuts.
    pub fn write_entropy_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for c in &self.entropy_cuts {
            write!(w, ",S_{c}")?;
        }
        writeln!(w)?;
        for k in 0..self.len() {
            write!(w, "{}", self.times[k])?;
            for s in &self.entropy[k] {
                write!(w, ",{s}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn check_state(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(())
}

/// Evolution through the spectral decomposition.
pub fn evolve_exact(
    es: &EigenSystem,
    basis: &SectorBasis,
    psi0: &[f64],
    times: &[f64],
    entropy_cuts: &[usize],
) -> Result<ObservableTrace> {
    check_state(psi0, es.dim())?;
    if basis.len() != es.dim() {
        return Err(Error::DimensionMismatch { expected: es.dim(), found: basis.len() });
    }
    let n = es.dim();
    let v = es.vectors();
    let c: Vec<f64> = (0..n).map(|a| crate::linalg::dot(es.vector(a), psi0)).collect();
    let energy: f64 = c.iter().zip(es.energies()).map(|(c, e)| c * c * e).sum();
    let mut trace = ObservableTrace::new(basis.particles(), entropy_cuts);
    for &t in times {
        let phases = Mat::from_fn(n, 2, |a, j| {
            let (s, co) = (es.energies()[a] * t).sin_cos();
            if j == 0 {
                c[a] * co
            } else {
                -c[a] * s
            }
        });
        let psi_ri = v * &phases;
        let psi: Vec<Complex64> = (0..n).map(|k| Complex64::new(psi_ri[(k, 0)], psi_ri[(k, 1)])).collect();
        trace.record(t, &psi, psi0, basis, energy)?;
    }
    // Fidelity directly from the overlaps is more accurate than via psi(t).
    for (k, &t) in times.iter().enumerate() {
        let amp: Complex64 = c
            .iter()
            .zip(es.energies())
            .map(|(c, e)| Complex64::from_polar(c * c, -e * t))
            .sum();
        trace.fidelity[k] = amp.norm_sqr();
    }
    Ok(trace)
}

/// Integration settings for [`evolve_rk4`].
#[derive(Clone, Debug, PartialEq)]
pub struct Rk4Options {
    pub dt: f64,
    pub norm_tol: f64,
    pub renormalize: bool,
    /// Largest `dt` accepted.
    pub max_dt: f64,
}

impl Default for Rk4Options {
    fn default() -> Self {
        Self { dt: 1e-3, norm_tol: DEFAULT_NORM_TOL, renormalize: true, max_dt: DEFAULT_MAX_DT }
    }
}

/// Bookkeeping of an RK4 run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rk4Log {
    pub steps: usize,
    /// `(t, drift)` at every renormalization.
    pub renormalizations: Vec<(f64, f64)>,
}

/// Fourth-order Runge-Kutta integration of `i dpsi/dt = H psi`, landing
/// exactly on every scheduled time.
pub fn evolve_rk4(
    h: &SparseOperator,
    basis: &SectorBasis,
    psi0: &[f64],
    schedule: &[f64],
    opts: &Rk4Options,
    entropy_cuts: &[usize],
) -> Result<(ObservableTrace, Rk4Log)> {
    check_state(psi0, h.dim())?;
    if !(opts.dt > 0.0 && opts.dt <= opts.max_dt) {
        return Err(Error::Domain(format!("time step {} outside (0, {}]", opts.dt, opts.max_dt)));
    }
    if schedule.windows(2).any(|w| w[1] < w[0]) || schedule.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::Domain("sample schedule must be nonnegative and sorted".into()));
    }
    let n = h.dim();
    let mut psi: Vec<Complex64> = psi0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut tmp = vec![Complex64::default(); n];
    let mut hpsi = vec![Complex64::default(); n];
    let mi = Complex64::new(0.0, -1.0);
    let mut log = Rk4Log::default();
    let mut trace = ObservableTrace::new(basis.particles(), entropy_cuts);
    let energy_of = |psi: &[Complex64], hpsi: &mut [Complex64]| -> Result<f64> {
        h.apply_into(psi, hpsi)?;
        Ok(psi.iter().zip(hpsi.iter()).map(|(a, b)| (a.conj() * b).re).sum())
    };
    let mut t = 0.0f64;
    for &ts in schedule {
        while ts - t > 1e-12 * ts.max(1.0) {
            let step = opts.dt.min(ts - t);
            h.apply_into(&psi, &mut k1)?;
            k1.iter_mut().for_each(|x| *x *= mi);
            for i in 0..n {
                tmp[i] = psi[i] + k1[i] * (0.5 * step);
            }
            h.apply_into(&tmp, &mut k2)?;
            k2.iter_mut().for_each(|x| *x *= mi);
            for i in 0..n {
                tmp[i] = psi[i] + k2[i] * (0.5 * step);
            }
            h.apply_into(&tmp, &mut k3)?;
            k3.iter_mut().for_each(|x| *x *= mi);
            for i in 0..n {
                tmp[i] = psi[i] + k3[i] * step;
            }
            h.apply_into(&tmp, &mut k4)?;
            k4.iter_mut().for_each(|x| *x *= mi);
            for i in 0..n {
                psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (step / 6.0);
            }
            t += step;
            log.steps += 1;
            let nrm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let drift = (nrm - 1.0).abs();
            if drift > opts.norm_tol {
                if opts.renormalize {
                    psi.iter_mut().for_each(|a| *a /= nrm);
                    log.renormalizations.push((t, drift));
                } else if drift > NORM_ABORT {
                    return Err(Error::NormDrift { time: t, drift, limit: NORM_ABORT });
                }
            }
        }
        t = ts;
        let e = energy_of(&psi, &mut hpsi)?;
        trace.record(ts, &psi, psi0, basis, e)?;
    }
    Ok((trace, log))
}

/// Infinite-time average of `<n_site>`; see [`diagonal_ensemble_profile`].
pub fn diagonal_ensemble(es: &EigenSystem, basis: &SectorBasis, psi0: &[f64], site: usize) -> Result<f64> {
    if site == 0 || site > basis.sites() {
        return Err(Error::SiteOutOfRange { site, sites: basis.sites() });
    }
    Ok(diagonal_ensemble_profile(es, basis, psi0)?[site - 1])
}

/// Infinite-time average of the density profile.
///
/// Inside a degenerate multiplet the phases never dephase, so the initial
/// state is projected onto each multiplet as a whole and that projection's
/// profile is weighted in. For a nondegenerate spectrum this is
/// `sum_a |<E_a|psi0>|^2 <E_a|n_i|E_a>`, and it is independent of the
/// solver's basis choice inside degenerate levels.
pub fn diagonal_ensemble_profile(es: &EigenSystem, basis: &SectorBasis, psi0: &[f64]) -> Result<Vec<f64>> {
    check_state(psi0, es.dim())?;
    let c: Vec<f64> = (0..es.dim()).map(|a| crate::linalg::dot(es.vector(a), psi0)).collect();
    let mut out = vec![0.0; basis.sites()];
    for mult in es.multiplets(crate::entanglement::MULTIPLET_GAP) {
        let w: f64 = mult.iter().map(|&a| c[a] * c[a]).sum();
        if w < 1e-300 {
            continue;
        }
        let mut proj = vec![0.0; es.dim()];
        for &a in &mult {
            crate::linalg::axpy(c[a], es.vector(a), &mut proj);
        }
        for (o, d) in out.iter_mut().zip(density_profile(&proj, basis)) {
            *o += d;
        }
    }
    Ok(out)
}

/// Equal-weight average occupation over the basis.
pub fn infinite_temperature_profile(basis: &SectorBasis) -> Vec<f64> {
    let mut p = density_profile(&vec![1.0f64; basis.len()], basis);
    p.iter_mut().for_each(|x| *x /= basis.len() as f64);
    p
}

/// Linear fit of `<n_i>` against `(i - 2) / Np` over sites `2..=L`; the
/// slope coefficient is `c = -slope`.
pub fn profile_slope(profile: &[f64], particles: usize) -> Result<LinearFit> {
    let x: Vec<f64> = (2..=profile.len()).map(|i| (i - 2) as f64 / particles as f64).collect();
    let y: Vec<f64> = profile[1..].to_vec();
    linear_fit(&x, &y)
}

/// Largest pointwise spread of profiles plotted against `i / Np`, evaluated
/// on the overlap of their bulk ranges (sites `2..=L`) by linear interpolation.
pub fn profile_collapse_spread(profiles: &[(usize, Vec<f64>)]) -> Result<f64> {
    if profiles.len() < 2 {
        return Err(Error::InsufficientStatistics { found: profiles.len(), needed: 2 });
    }
    let curves: Vec<(Vec<f64>, Vec<f64>)> = profiles
        .iter()
        .map(|(np, p)| ((2..=p.len()).map(|i| i as f64 / *np as f64).collect(), p[1..].to_vec()))
        .collect();
    let lo = curves.iter().map(|c| c.0[0]).fold(f64::NEG_INFINITY, f64::max);
    let hi = curves.iter().map(|c| *c.0.last().unwrap()).fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return Err(Error::Domain("profiles do not overlap".into()));
    }
    let mut worst = 0.0f64;
    for k in 0..=200 {
        let x = lo + (hi - lo) * k as f64 / 200.0;
        let ys: Vec<f64> = curves.iter().map(|(cx, cy)| interpolate(cx, cy, x)).collect();
        let mx = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mn = ys.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(mx - mn);
    }
    Ok(worst)
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    if at <= x[0] {
        return y[0];
    }
    if at >= x[x.len() - 1] {
        return y[y.len() - 1];
    }
    let k = x.partition_point(|v| *v <= at).max(1);
    let (x0, x1) = (x[k - 1], x[k]);
    let f = (at - x0) / (x1 - x0);
    y[k - 1] * (1.0 - f) + y[k] * f
}

/// `R(t)` of a trace.
pub fn rms_displacement(trace: &ObservableTrace) -> Vec<f64> {
    trace.density.iter().map(|d| displacement(d, trace.particles)).collect()
}

/// Smoothed `d ln y / d ln t` as `(t, slope)` pairs.
///
/// Samples with non-positive `t` or `y` are trimmed first; the derivative is
/// a local quadratic fit in `ln t` over `window` points.
pub fn log_derivative(times: &[f64], values: &[f64], window: usize) -> Result<Vec<(f64, f64)>> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
    }
    let (x, y): (Vec<f64>, Vec<f64>) =
        times.iter().zip(values).filter(|(t, v)| **t > 0.0 && **v > 0.0).map(|(t, v)| (t.ln(), v.ln())).unzip();
    Ok(local_quadratic_slope(&x, &y, window)?.into_iter().map(|(x, s)| (x.exp(), s)).collect())
}

/// `1 / z_R(t) = d ln R / d ln t`.
pub fn dynamical_exponent(times: &[f64], r: &[f64], window: usize) -> Result<Vec<(f64, f64)>> {
    log_derivative(times, r, window)
}

/// Spreading distance of the density beyond a threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdFront {
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    /// `(t, 1/z_r)`; empty when too few samples remain.
    pub inverse_z: Vec<(f64, f64)>,
}

/// `delta_r(t) = max { i - Np : <n_i(t)> > eps }`, keeping samples where it is positive.
pub fn threshold_front(trace: &ObservableTrace, epsilon: f64, window: usize) -> Result<ThresholdFront> {
    if !(1e-10..=0.1).contains(&epsilon) {
        return Err(Error::Domain(format!("threshold {epsilon} outside [1e-10, 0.1]")));
    }
    let np = trace.particles;
    let mut times = Vec::new();
    let mut distance = Vec::new();
    for (t, d) in trace.times.iter().zip(&trace.density) {
        if let Some(i) = (np + 1..=d.len()).rev().find(|&i| d[i - 1] > epsilon) {
            times.push(*t);
            distance.push((i - np) as f64);
        }
    }
    let inverse_z = if times.len() >= window { log_derivative(&times, &distance, window)? } else { Vec::new() };
    Ok(ThresholdFront { epsilon, times, distance, inverse_z })
}

/// Density curve of one site together with the population of its leg.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteCurve {
    pub site: usize,
    pub population: usize,
    pub times: Vec<f64>,
    pub density: Vec<f64>,
}

/// Collapse quality of site curves after `t -> t / N^alpha` and
/// `n -> n / <n>_late`, where `<n>_late` averages the last fifth of the
/// samples. The score is the mean squared difference between every pair of
/// rescaled curves on their common range in `ln t`; lower is better.
pub fn leg_rescaled_collapse(curves: &[SiteCurve], alpha: f64) -> f64 {
    let scaled: Vec<(Vec<f64>, Vec<f64>)> = curves
        .iter()
        .filter(|c| c.population > 0 && c.times.len() >= 2)
        .map(|c| {
            let tail = (c.density.len() / 5).max(1);
            let late = c.density[c.density.len() - tail..].iter().sum::<f64>() / tail as f64;
            let shift = alpha * (c.population as f64).ln();
            let (x, y): (Vec<f64>, Vec<f64>) = c
                .times
                .iter()
                .zip(&c.density)
                .filter(|(t, _)| **t > 0.0)
                .map(|(t, n)| (t.ln() - shift, if late > 0.0 { n / late } else { 0.0 }))
                .unzip();
            (x, y)
        })
        .collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..scaled.len() {
        for b in a + 1..scaled.len() {
            let (xa, ya) = &scaled[a];
            let (xb, yb) = &scaled[b];
            let lo = xa[0].max(xb[0]);
            let hi = xa[xa.len() - 1].min(xb[xb.len() - 1]);
            if !(hi > lo) {
                continue;
            }
            let m = 64;
            let mut s = 0.0;
            for k in 0..=m {
                let x = lo + (hi - lo) * k as f64 / m as f64;
                s += (interpolate(xa, ya, x) - interpolate(xb, yb, x)).powi(2);
            }
            total += s / (m + 1) as f64;
            pairs += 1;
        }
    }
    if pairs == 0 {
        f64::INFINITY
    } else {
        total / pairs as f64
    }
}

/// Minimizes [`leg_rescaled_collapse`] over `alpha` in `[lo, hi]`: a grid
/// scan followed by golden-section refinement. Returns `(alpha, score)`.
pub fn best_collapse_exponent(curves: &[SiteCurve], lo: f64, hi: f64) -> (f64, f64) {
    let n = 140;
    let mut best = (lo, f64::INFINITY);
    for k in 0..=n {
        let a = lo + (hi - lo) * k as f64 / n as f64;
        let s = leg_rescaled_collapse(curves, a);
        if s < best.1 {
            best = (a, s);
        }
    }
    let h = (hi - lo) / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if leg_rescaled_collapse(curves, c) < leg_rescaled_collapse(curves, d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    let s = leg_rescaled_collapse(curves, x);
    if s < best.1 {
        (x, s)
    } else {
        best
    }
}

/// Angular frequency of the largest peak of the Hann-windowed periodogram
/// of a uniformly sampled series, searched on `(0, omega_max]`.
pub fn dominant_angular_frequency(times: &[f64], series: &[f64], omega_max: f64) -> f64 {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let span = times[times.len() - 1] - times[0];
    let t0 = times[0];
    let hann = |t: f64| (std::f64::consts::PI * (t - t0) / span).sin().powi(2);
    let power = |w: f64| -> f64 {
        let z: Complex64 =
            times.iter().zip(series).map(|(t, y)| Complex64::from_polar((y - mean) * hann(*t), -w * t)).sum();
        z.norm_sqr()
    };
    let dw = std::f64::consts::PI / span / 4.0;
    let n = (omega_max / dw).ceil() as usize;
    let mut best = (dw, 0.0);
    for k in 1..=n {
        let w = k as f64 * dw;
        let p = power(w);
        if p > best.1 {
            best = (w, p);
        }
    }
    let (mut a, mut b) = (best.0 - dw, best.0 + dw);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_has_fixed_density() {
        let s = log_schedule(0.1, 1000.0, 32).unwrap();
        assert_eq!(s.len(), 4 * 32 + 1);
        assert!((s[32] - 1.0).abs() < 1e-12);
        assert!((s[s.len() - 1] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn power_law_exponent_is_exact() {
        let t = log_schedule(0.1, 1e4, 32).unwrap();
        let r: Vec<f64> = t.iter().map(|t| t.sqrt()).collect();
        for (_, s) in dynamical_exponent(&t, &r, 9).unwrap() {
            assert!((s - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn displacement_of_profiles() {
        assert_eq!(displacement(&[1.0, 1.0, 0.0, 0.0], 2), 0.0);
        assert!((displacement(&[1.0, 0.0, 0.0, 1.0], 2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn synthetic_collapse_recovers_exponent() {
        let f = |u: f64| u * u / (1.0 + u * u);
        let times = log_schedule(1e-2, 1e6, 32).unwrap();
        let curves: Vec<SiteCurve> = [3usize, 10, 40, 150]
            .iter()
            .enumerate()
            .map(|(k, &n)| SiteCurve {
                site: k,
                population: n,
                density: times.iter().map(|t| 0.3 * f(t / (n as f64).powf(1.15))).collect(),
                times: times.clone(),
            })
            .collect();
        let (a, s) = best_collapse_exponent(&curves, 0.8, 1.5);
        assert!((a - 1.15).abs() < 0.02, "alpha {a}");
        assert!(leg_rescaled_collapse(&curves, 0.0) > 100.0 * s.max(1e-12));
    }

    #[test]
    fn threshold_bounds() {
        let tr = ObservableTrace { particles: 1, times: vec![1.0], density: vec![vec![1.0, 0.5]], ..Default::default() };
        assert!(threshold_front(&tr, 0.5, 9).is_err());
        let f = threshold_front(&tr, 0.1, 9).unwrap();
        assert_eq!(f.distance, vec![1.0]);
    }

    #[test]
    fn frequency_of_cosine() {
        let t = uniform_schedule(50.0, 4000);
        let y: Vec<f64> = t.iter().map(|t| (2.0 * 2f64.sqrt() * t).cos()).collect();
        let w = dominant_angular_frequency(&t, &y, 10.0);
        assert!((w - 2.0 * 2f64.sqrt()).abs() < 1e-4, "{w}");
    }
}
