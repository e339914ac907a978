//! TOML run configuration.

use std::ops::Range;

use east_core::automaton::GateLayout;
use east_core::basis::max_extent;
use east_core::ModelSpec;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Spanned<String>>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub entanglement: EntanglementSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub quench: QuenchSection,
    #[serde(default)]
    pub dw: DwSection,
    #[serde(default)]
    pub automaton: AutomatonSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_range")]
    pub range: Spanned<usize>,
    /// Hopping amplitudes `t_1..t_r`; all ones when omitted.
    pub amplitudes: Option<Spanned<Vec<f64>>>,
}

fn default_range() -> Spanned<usize> {
    Spanned::new(0..0, 2)
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { range: default_range(), amplitudes: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default = "default_particles")]
    pub particles: Spanned<usize>,
    /// Defaults to the maximal extent `(r + 1) Np - r`.
    pub sites: Option<Spanned<usize>>,
}

fn default_particles() -> Spanned<usize> {
    Spanned::new(0..0, 5)
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { particles: default_particles(), sites: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub unfold_degree: usize,
    pub window_top: f64,
    pub dos_bins: usize,
    pub dense_cap: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            unfold_degree: east_core::spectral::DEFAULT_UNFOLD_DEGREE,
            window_top: east_core::spectral::DEFAULT_WINDOW_TOP,
            dos_bins: 80,
            dense_cap: east_core::spectral::DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntanglementSection {
    /// Cuts written to the scatter file; the cut `Np` when empty.
    pub cuts: Vec<usize>,
    pub tolerance: f64,
}

impl Default for EntanglementSection {
    fn default() -> Self {
        Self { cuts: Vec::new(), tolerance: east_core::entanglement::ZERO_ENTROPY_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Exact,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    Uniform,
    Log,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_dt")]
    pub dt: Spanned<f64>,
    pub t_max: Option<Spanned<f64>>,
    /// Uniform for `quench`, logarithmic for `dw` when omitted.
    pub schedule: Option<Schedule>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
    #[serde(default = "default_norm_tol")]
    pub norm_tol: f64,
    /// On by default when `t_max > 1e3`.
    pub renormalize: Option<bool>,
}

fn default_method() -> Method {
    Method::Auto
}
fn default_dt() -> Spanned<f64> {
    Spanned::new(0..0, 1e-3)
}
fn default_samples() -> usize {
    2000
}
fn default_t_min() -> f64 {
    east_core::dynamics::DEFAULT_T_MIN
}
fn default_per_decade() -> usize {
    east_core::dynamics::DEFAULT_PER_DECADE
}
fn default_norm_tol() -> f64 {
    east_core::dynamics::DEFAULT_NORM_TOL
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            dt: default_dt(),
            t_max: None,
            schedule: None,
            samples: default_samples(),
            t_min: default_t_min(),
            per_decade: default_per_decade(),
            norm_tol: default_norm_tol(),
            renormalize: None,
        }
    }
}

impl EvolutionSection {
    pub fn t_max_or(&self, fallback: f64) -> f64 {
        self.t_max.as_ref().map_or(fallback, |t| *t.get_ref())
    }

    pub fn renormalize_for(&self, t_max: f64) -> bool {
        self.renormalize.unwrap_or(t_max > 1e3)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub state: String,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchSection {
    /// Superposition terms; the domain wall when empty.
    pub initial: Vec<Spanned<Term>>,
    pub entropy_cuts: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwSection {
    /// Particle numbers of the sweep; the geometry's value when empty.
    pub particles: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub smoothing: usize,
}

impl Default for DwSection {
    fn default() -> Self {
        Self { particles: Vec::new(), thresholds: vec![1e-3, 1e-2], smoothing: east_core::dynamics::DEFAULT_SMOOTHING }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSection {
    #[serde(default = "default_ca_sites")]
    pub sites: Spanned<usize>,
    #[serde(default = "default_ca_particles")]
    pub particles: Spanned<usize>,
    #[serde(default = "default_layers")]
    pub layers: u64,
    #[serde(default = "default_layout")]
    pub layout: Spanned<String>,
    #[serde(default)]
    pub pgm: bool,
    pub initial: Option<Spanned<String>>,
}

fn default_ca_sites() -> Spanned<usize> {
    Spanned::new(0..0, 298)
}
fn default_ca_particles() -> Spanned<usize> {
    Spanned::new(0..0, 100)
}
fn default_layers() -> u64 {
    100_000
}
fn default_layout() -> Spanned<String> {
    Spanned::new(0..0, "staggered".into())
}

impl Default for AutomatonSection {
    fn default() -> Self {
        Self {
            sites: default_ca_sites(),
            particles: default_ca_particles(),
            layers: default_layers(),
            layout: default_layout(),
            pgm: false,
            initial: None,
        }
    }
}

/// Validated geometry and model.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ModelSpec,
    pub sites: usize,
    pub particles: usize,
}

/// Parsed configuration together with its source, for line numbers.
pub struct Loaded {
    pub config: RunConfig,
    source: String,
}

impl Loaded {
    pub fn parse(source: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(source).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { config, source: source.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn defaults() -> Self {
        Self { config: RunConfig::default(), source: String::new() }
    }

    /// Configuration error pointing at the line of `span`.
    pub fn error(&self, span: Range<usize>, msg: impl std::fmt::Display) -> CliError {
        if span.is_empty() && span.start == 0 {
            return CliError::Config(format!("{msg} (default value)"));
        }
        let line = self.source[..span.start.min(self.source.len())].matches('\n').count() + 1;
        CliError::Config(format!("line {line}: {msg}"))
    }

    pub fn check_command(&self, name: &str) -> Result<(), CliError> {
        if let Some(c) = &self.config.command {
            if c.get_ref() != name {
                return Err(self.error(c.span(), format!("config is for `{}`, not `{name}`", c.get_ref())));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        let m = &self.config.model;
        let r = *m.range.get_ref();
        let amps = match &m.amplitudes {
            Some(a) => {
                if a.get_ref().len() != r {
                    return Err(self.error(a.span(), format!("{} amplitudes given for range {r}", a.get_ref().len())));
                }
                a.get_ref().clone()
            }
            None => vec![1.0; r],
        };
        ModelSpec::new(amps).map_err(|e| {
            let span = m.amplitudes.as_ref().map_or(m.range.span(), Spanned::span);
            self.error(span, e)
        })
    }

    /// Model with `particles` overriding the geometry section.
    pub fn problem_with(&self, particles: Option<usize>) -> Result<Problem, CliError> {
        let spec = self.spec()?;
        let g = &self.config.geometry;
        let np = particles.unwrap_or(*g.particles.get_ref());
        if np == 0 {
            return Err(self.error(g.particles.span(), "at least one particle is required"));
        }
        let extent = max_extent(spec.range(), np).map_err(|e| self.error(g.particles.span(), e))?;
        let sites = match (&g.sites, particles) {
            (Some(s), None) => *s.get_ref(),
            _ => extent,
        };
        if np > sites {
            let span = g.sites.as_ref().map_or(g.particles.span(), Spanned::span);
            return Err(self.error(span, format!("{np} particles do not fit on {sites} sites")));
        }
        if sites > east_core::basis::MAX_SITES {
            let span = g.sites.as_ref().map_or(g.particles.span(), Spanned::span);
            return Err(self.error(span, format!("{sites} sites exceed the limit of {}", east_core::basis::MAX_SITES)));
        }
        Ok(Problem { spec, sites, particles: np })
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        self.problem_with(None)
    }

    pub fn dt(&self) -> Result<f64, CliError> {
        let dt = &self.config.evolution.dt;
        let v = *dt.get_ref();
        if !(v > 0.0 && v <= east_core::dynamics::DEFAULT_MAX_DT) {
            return Err(self.error(dt.span(), format!("dt = {v} outside (0, {}]", east_core::dynamics::DEFAULT_MAX_DT)));
        }
        Ok(v)
    }

    pub fn t_max(&self, fallback: f64) -> Result<f64, CliError> {
        let e = &self.config.evolution;
        if let Some(t) = &e.t_max {
            if !(*t.get_ref() > 0.0) {
                return Err(self.error(t.span(), "t_max must be positive"));
            }
        }
        Ok(e.t_max_or(fallback))
    }

    pub fn layout(&self) -> Result<GateLayout, CliError> {
        let l = &self.config.automaton.layout;
        l.get_ref().parse().map_err(|e| self.error(l.span(), e))
    }

    pub fn automaton_geometry(&self) -> Result<(usize, usize), CliError> {
        let a = &self.config.automaton;
        let (l, n) = (*a.sites.get_ref(), *a.particles.get_ref());
        if n > l {
            return Err(self.error(a.particles.span(), format!("{n} particles do not fit on {l} sites")));
        }
        Ok((l, n))
    }
}
