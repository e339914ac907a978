//! One function per subcommand. Each writes its artifacts into the output
//! directory and returns the JSON summary.

use std::io::Write;

use east_core::automaton::{self, Chain, RunOptions};
use east_core::dynamics::{self, ObservableTrace, Rk4Options};
use east_core::entanglement::{self, SeparableCensus};
use east_core::fragmentation::{self, largest_sector};
use east_core::spectral::{self, EigenSystem};
use east_core::{build_hamiltonian, AssemblyMode, FockState, SectorBasis, SparseOperator};
use serde_json::{json, Value};

use crate::config::{Loaded, Method, Problem, Schedule};
use crate::error::CliError;
use crate::output::OutDir;
use crate::plot::{self, Figure};

/// `auto` evolves exactly up to this sector dimension.
pub const AUTO_EXACT_DIM: usize = 8000;

/// Automaton crossover fit: first layer, samples per decade, points per side.
pub const CROSSOVER_T_START: u64 = 10;
pub const CROSSOVER_PER_DECADE: usize = 32;
pub const CROSSOVER_MIN_POINTS: usize = 8;

/// Default horizon: long runs up to `L = 28`, short ones beyond.
pub fn default_t_max(sites: usize) -> f64 {
    if sites <= 28 {
        1e4
    } else {
        100.0
    }
}

fn header(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

fn write_row<W: Write>(w: &mut W, values: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            write!(w, ",")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    writeln!(w)
}

fn model_json(p: &Problem) -> Value {
    json!({
        "range": p.spec.range(),
        "amplitudes": p.spec.amplitudes(),
        "sites": p.sites,
        "particles": p.particles,
    })
}

fn sector(p: &Problem) -> Result<(SectorBasis, SparseOperator), CliError> {
    let basis = largest_sector(p.sites, p.particles, &p.spec)?;
    let h = build_hamiltonian(&basis, &p.spec, AssemblyMode::Strict)?;
    Ok((basis, h))
}

pub fn spectrum(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("spectrum")?;
    let p = cfg.problem()?;
    let s = &cfg.config.spectrum;
    let (basis, h) = sector(&p)?;
    let energies = spectral::eigenvalues_with_cap(&h, s.dense_cap)?;

    out.csv("spectrum.csv", &["index", "energy"], |w| Ok(spectral::write_spectrum_csv(w, &energies)?))?;
    out.write("hamiltonian.coo", |w| Ok(h.write_coordinate(w)?))?;
    let dos = spectral::density_of_states(&energies, s.dos_bins)?;
    let dos_csv = out.csv("dos.csv", &["energy", "density"], |w| Ok(dos.write_csv(w)?))?;
    let bound = fragmentation::zero_mode_lower_bound(&basis);
    out.csv("zero_modes.csv", &["zero_modes", "bound", "tolerance"], |w| {
        writeln!(w, "zero_modes,bound,tolerance")?;
        writeln!(w, "{},{},{}", dos.zero_modes, bound, dos.zero_tol)?;
        Ok(())
    })?;
    plot::histogram(&dos_csv, &out.path("dos.svg"), "density of states", "energy", "density", &[])?;

    let window = (energies[0], s.window_top);
    let stats = match spectral::level_spacings(&energies, window, s.unfold_degree) {
        Ok(hist) => {
            let csv = out.csv("spacing.csv", &["s", "density", "goe", "poisson"], |w| {
                writeln!(w, "s,density,goe,poisson")?;
                for (d, e) in hist.density.iter().zip(hist.edges.windows(2)) {
                    let c = 0.5 * (e[0] + e[1]);
                    let c_pos = c.max(0.0);
                    write_row(w, &[c, *d, spectral::goe_density(c_pos), (-c_pos).exp()])?;
                }
                Ok(())
            })?;
            plot::histogram(&csv, &out.path("spacing.svg"), "unfolded level spacings", "s", "density", &["goe", "poisson"])?;
            let lo = s.unfold_degree.saturating_sub(2).max(1);
            let mut by_degree = serde_json::Map::new();
            for d in lo..=s.unfold_degree + 2 {
                let k = spectral::level_spacings(&energies, window, d)?;
                by_degree.insert(d.to_string(), json!({ "ks_goe": k.ks_goe, "ks_poisson": k.ks_poisson }));
            }
            json!({
                "window": [window.0, window.1],
                "levels": hist.levels,
                "unfold_degree": s.unfold_degree,
                "ks_goe": hist.ks_goe,
                "ks_poisson": hist.ks_poisson,
                "by_degree": by_degree,
            })
        }
        Err(east_core::Error::InsufficientStatistics { found, needed }) => {
            json!({ "skipped": format!("{found} levels in the window, {needed} needed") })
        }
        Err(e) => return Err(e.into()),
    };

    let ground = if basis.len() >= 2 {
        let g = spectral::ground_state_lanczos(&h, &basis)?;
        let csv = out.csv("ground.csv", &["site", "density"], |w| {
            writeln!(w, "site,density")?;
            for (i, n) in g.density.iter().enumerate() {
                writeln!(w, "{},{n}", i + 1)?;
            }
            Ok(())
        })?;
        plot::render(&csv, &out.path("ground.svg"), &Figure::new("ground-state density", "site", &["density"]).labels("site", "<n_i>"))?;
        json!({
            "energy": g.energy,
            "gap": g.gap,
            "degenerate": g.degenerate,
            "half_cut_entropy": g.half_cut_entropy,
        })
    } else {
        Value::Null
    };

    Ok(json!({
        "dimension": basis.len(),
        "nonzeros": h.nnz(),
        "zero_modes": dos.zero_modes,
        "zero_mode_bound": bound,
        "zero_tolerance": dos.zero_tol,
        "level_statistics": stats,
        "ground_state": ground,
    }))
}

fn state_profile(entries: &[(usize, f64)], basis: &SectorBasis) -> Vec<f64> {
    let mut n = vec![0.0; basis.sites()];
    for &(k, a) in entries {
        let s = basis.state(k);
        for (i, slot) in n.iter_mut().enumerate() {
            if s.occupied(i + 1) {
                *slot += a * a;
            }
        }
    }
    n
}

fn census_json(c: &SeparableCensus) -> Value {
    let states: Vec<Value> = c
        .states
        .iter()
        .map(|s| {
            json!({
                "left_particles": s.left_particles,
                "left_sites": s.left_sites,
                "gap": s.gap,
                "right_particles": s.right_particles,
                "right_sites": s.right_sites,
                "energy": s.energy,
                "support": s.support_bitmasks(&c.basis),
            })
        })
        .collect();
    json!({
        "total": c.total,
        "complete": c.is_complete(),
        "skipped_windows": c.skipped_windows,
        "distinct_supports": c.distinct_supports,
        "support_size": c.support.len(),
        "finite_energy_support_size": c.finite_energy_support.len(),
        "states": states,
    })
}

pub fn entanglement_scan(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("entanglement-scan")?;
    let p = cfg.problem()?;
    let e = &cfg.config.entanglement;
    let (basis, h) = sector(&p)?;
    let cuts: Vec<usize> = if e.cuts.is_empty() { vec![p.particles.min(p.sites - 1)] } else { e.cuts.clone() };
    if let Some(&c) = cuts.iter().find(|&&c| c == 0 || c >= p.sites) {
        return Err(CliError::Config(format!("entanglement cut {c} outside 1..{}", p.sites)));
    }

    let census = entanglement::separable_census(p.sites, p.particles, &p.spec)?;
    let census_value = census_json(&census);
    out.json("separable.json", &census_value, &["total", "states"])?;
    let ns_census = out.csv("ns_census.csv", &["cut", "count"], |w| {
        writeln!(w, "cut,count")?;
        for &(c, n) in &census.per_cut {
            writeln!(w, "{c},{n}")?;
        }
        Ok(())
    })?;
    plot::render(&ns_census, &out.path("ns_census.svg"), &Figure::new("separable eigenstates per cut", "cut", &["count"]).labels("cut", "N_S"))?;

    let profiles: Vec<Vec<f64>> = census.states.iter().map(|s| state_profile(&s.entries, &census.basis)).collect();
    let names: Vec<String> = std::iter::once("site".to_string()).chain((0..profiles.len()).map(|k| format!("state_{k}"))).collect();
    let prof_csv = out.csv("profiles.csv", &header(&names), |w| {
        writeln!(w, "{}", names.join(","))?;
        for i in 0..p.sites {
            let row: Vec<f64> = std::iter::once((i + 1) as f64).chain(profiles.iter().map(|pr| pr[i])).collect();
            write_row(w, &row)?;
        }
        Ok(())
    })?;
    if !profiles.is_empty() {
        let ys: Vec<&str> = names[1..].iter().map(String::as_str).collect();
        plot::render(&prof_csv, &out.path("profiles.svg"), &Figure::new("separable eigenstate densities", "site", &ys).labels("site", "<n_i>"))?;
    }

    let scan = match spectral::diagonalize_with_cap(&h, cfg.config.spectrum.dense_cap) {
        Ok(es) => Some(scan_outputs(&es, &basis, &cuts, e.tolerance, out)?),
        Err(err) if err.is_resource_cap() => None,
        Err(err) => return Err(err.into()),
    };

    Ok(json!({
        "dimension": basis.len(),
        "cuts": cuts,
        "census": {
            "total": census.total,
            "complete": census.is_complete(),
            "skipped_windows": census.skipped_windows,
            "finite_energy_support_size": census.finite_energy_support.len(),
        },
        "scan": scan.unwrap_or(Value::Null),
    }))
}

fn scan_outputs(es: &EigenSystem, basis: &SectorBasis, cuts: &[usize], tol: f64, out: &mut OutDir) -> Result<Value, CliError> {
    let names: Vec<String> = ["index", "energy"].iter().map(|s| s.to_string()).chain(cuts.iter().map(|c| format!("S_{c}"))).collect();
    let rows: Vec<Result<Vec<f64>, east_core::Error>> = east_core::parallel::map_indexed(es.len(), |k| {
        let mut row = vec![k as f64, es.energies()[k]];
        for &c in cuts {
            row.push(entanglement::schmidt_cut(es.vector(k), basis, c)?.entropy);
        }
        Ok(row)
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_, _>>()?;
    let csv = out.csv("scatter.csv", &header(&names), |w| {
        writeln!(w, "{}", names.join(","))?;
        for r in &rows {
            write_row(w, r)?;
        }
        Ok(())
    })?;
    let fig = Figure::new("eigenstate entanglement", "energy", &[names[2].as_str()]).labels("energy", "S").points();
    plot::render(&csv, &out.path("scatter.svg"), &fig)?;

    let scan = entanglement::zero_entropy_scan(es, basis, tol)?;
    out.csv("ns_scan.csv", &["cut", "count"], |w| Ok(scan.write_csv(w)?))?;
    Ok(json!({
        "total": scan.total,
        "raw_total": scan.raw_total,
        "distinct_supports": scan.distinct_supports,
        "support_size": scan.support.len(),
        "finite_energy_support_size": scan.finite_energy_support.len(),
        "per_cut": scan.cuts.iter().map(|c| json!({ "cut": c.cut, "raw": c.raw, "count": c.count })).collect::<Vec<_>>(),
    }))
}

fn initial_state(cfg: &Loaded, p: &Problem, basis: &SectorBasis) -> Result<Vec<f64>, CliError> {
    let terms = &cfg.config.quench.initial;
    if terms.is_empty() {
        return Ok(dynamics::product_state(basis, &FockState::domain_wall(p.sites, p.particles)?)?);
    }
    let mut parsed = Vec::with_capacity(terms.len());
    for t in terms {
        let s: FockState = t.get_ref().state.parse().map_err(|e| cfg.error(t.span(), e))?;
        if s.len() != p.sites {
            return Err(cfg.error(t.span(), format!("state {s} has {} sites, the chain has {}", s.len(), p.sites)));
        }
        parsed.push((s, t.get_ref().amplitude));
    }
    dynamics::superposition(basis, &parsed).map_err(|e| cfg.error(terms[0].span(), e))
}

struct Evolution {
    trace: ObservableTrace,
    method: &'static str,
    eigen: Option<EigenSystem>,
    renormalizations: usize,
}

fn evolve(
    cfg: &Loaded,
    basis: &SectorBasis,
    h: &SparseOperator,
    psi0: &[f64],
    times: &[f64],
    cuts: &[usize],
) -> Result<Evolution, CliError> {
    let ev = &cfg.config.evolution;
    let exact = match ev.method {
        Method::Exact => true,
        Method::Rk4 => false,
        Method::Auto => basis.len() <= AUTO_EXACT_DIM,
    };
    if exact {
        let es = spectral::diagonalize_with_cap(h, cfg.config.spectrum.dense_cap)?;
        let trace = dynamics::evolve_exact(&es, basis, psi0, times, cuts)?;
        return Ok(Evolution { trace, method: "exact", eigen: Some(es), renormalizations: 0 });
    }
    let t_max = times.last().copied().unwrap_or(0.0);
    let opts = Rk4Options {
        dt: cfg.dt()?,
        norm_tol: ev.norm_tol,
        renormalize: ev.renormalize_for(t_max),
        ..Rk4Options::default()
    };
    let (trace, log) = dynamics::evolve_rk4(h, basis, psi0, times, &opts, cuts)?;
    Ok(Evolution { trace, method: "rk4", eigen: None, renormalizations: log.renormalizations.len() })
}

fn schedule(cfg: &Loaded, t_max: f64, default: Schedule) -> Result<Vec<f64>, CliError> {
    let ev = &cfg.config.evolution;
    Ok(match ev.schedule.unwrap_or(default) {
        Schedule::Uniform => {
            if ev.samples == 0 {
                return Err(CliError::Config("evolution.samples must be positive".into()));
            }
            dynamics::uniform_schedule(t_max, ev.samples)
        }
        Schedule::Log => dynamics::log_schedule(ev.t_min, t_max, ev.per_decade)?,
    })
}

fn trace_outputs(trace: &ObservableTrace, out: &mut OutDir) -> Result<(), CliError> {
    let n = trace.density.first().map_or(0, Vec::len);
    let names: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("n_{i}")))
        .chain(["F".to_string(), "R".to_string()])
        .collect();
    let csv = out.csv("trace.csv", &header(&names), |w| Ok(trace.write_csv(w)?))?;
    plot::heatmap(&csv, &out.path("density.svg"), "<n_i(t)>", "t", "n_")?;
    if !trace.entropy_cuts.is_empty() {
        let names: Vec<String> = std::iter::once("t".to_string()).chain(trace.entropy_cuts.iter().map(|c| format!("S_{c}"))).collect();
        let ecsv = out.csv("entropy.csv", &header(&names), |w| Ok(trace.write_entropy_csv(w)?))?;
        let ys: Vec<&str> = names[1..].iter().map(String::as_str).collect();
        plot::render(&ecsv, &out.path("entropy.svg"), &Figure::new("entanglement entropy", "t", &ys).labels("t", "S"))?;
    }
    Ok(())
}

pub fn quench(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("quench")?;
    let p = cfg.problem()?;
    let (basis, h) = sector(&p)?;
    let psi0 = initial_state(cfg, &p, &basis)?;
    let t_max = cfg.t_max(default_t_max(p.sites))?;
    let times = schedule(cfg, t_max, Schedule::Uniform)?;
    let cuts: Vec<usize> = if cfg.config.quench.entropy_cuts.is_empty() {
        vec![p.particles.min(p.sites - 1)]
    } else {
        cfg.config.quench.entropy_cuts.clone()
    };
    let ev = evolve(cfg, &basis, &h, &psi0, &times, &cuts)?;
    trace_outputs(&ev.trace, out)?;
    let trace_csv = out.path("trace.csv");
    plot::render(&trace_csv, &out.path("fidelity.svg"), &Figure::new("return probability", "t", &["F"]).labels("t", "F"))?;
    let omega = dynamics::dominant_angular_frequency(&ev.trace.times, &ev.trace.fidelity, std::f64::consts::PI / (times[1] - times[0]).max(1e-12));
    let norm_drift = ev.trace.norm.iter().fold(0.0f64, |m, n| m.max((n - 1.0).abs()));
    Ok(json!({
        "dimension": basis.len(),
        "method": ev.method,
        "t_max": t_max,
        "samples": times.len(),
        "entropy_cuts": cuts,
        "fidelity_min": ev.trace.fidelity.iter().copied().fold(f64::INFINITY, f64::min),
        "fidelity_angular_frequency": omega,
        "max_norm_drift": norm_drift,
        "renormalizations": ev.renormalizations,
    }))
}

pub fn dw(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("dw")?;
    let d = &cfg.config.dw;
    let sweep: Vec<Option<usize>> = if d.particles.is_empty() { vec![None] } else { d.particles.iter().map(|&n| Some(n)).collect() };
    if let Some(&e) = d.thresholds.iter().find(|e| !(**e >= 1e-10 && **e <= 0.1)) {
        return Err(CliError::Config(format!("threshold {e} outside [1e-10, 0.1]")));
    }
    let mut runs = Vec::new();
    let mut last_site: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for np in sweep {
        let p = cfg.problem_with(np)?;
        let (basis, h) = sector(&p)?;
        let psi0 = dynamics::product_state(&basis, &FockState::domain_wall(p.sites, p.particles)?)?;
        let t_max = cfg.t_max(default_t_max(p.sites))?;
        let times = schedule(cfg, t_max, Schedule::Log)?;
        let ev = evolve(cfg, &basis, &h, &psi0, &times, &[])?;
        let mut sub = out.subdir(&format!("L{}", p.sites))?;
        trace_outputs(&ev.trace, &mut sub)?;
        let trace_csv = sub.path("trace.csv");
        plot::render(&trace_csv, &sub.path("displacement.svg"), &Figure::new("front displacement", "t", &["R"]).labels("t", "R").log_x())?;

        let z = dynamics::dynamical_exponent(&ev.trace.times, &ev.trace.displacement, d.smoothing)?;
        let zcsv = sub.csv("exponent.csv", &["t", "inverse_z"], |w| {
            writeln!(w, "t,inverse_z")?;
            for (t, s) in &z {
                writeln!(w, "{t},{s}")?;
            }
            Ok(())
        })?;
        plot::render(&zcsv, &sub.path("exponent.svg"), &Figure::new("1/z from R(t)", "t", &["inverse_z"]).labels("t", "1/z").log_x())?;

        let mut fronts = Vec::new();
        for &eps in &d.thresholds {
            let f = dynamics::threshold_front(&ev.trace, eps, d.smoothing)?;
            let name = format!("front_{eps:e}.csv");
            let fcsv = sub.csv(&name, &["t", "distance"], |w| {
                writeln!(w, "t,distance")?;
                for (t, x) in f.times.iter().zip(&f.distance) {
                    writeln!(w, "{t},{x}")?;
                }
                Ok(())
            })?;
            let title = format!("threshold front, eps = {eps:e}");
            plot::render(&fcsv, &sub.path(&format!("front_{eps:e}.svg")), &Figure::new(&title, "t", &["distance"]).labels("t", "distance").log_x())?;
            fronts.push(json!({ "epsilon": eps, "samples": f.times.len(), "final_distance": f.distance.last() }));
        }

        let saturation = match &ev.eigen {
            Some(es) => {
                let de = dynamics::diagonal_ensemble_profile(es, &basis, &psi0)?;
                let it = dynamics::infinite_temperature_profile(&basis);
                let scsv = sub.csv("saturation.csv", &["site", "diagonal", "infinite_temperature"], |w| {
                    writeln!(w, "site,diagonal,infinite_temperature")?;
                    for i in 0..p.sites {
                        writeln!(w, "{},{},{}", i + 1, de[i], it[i])?;
                    }
                    Ok(())
                })?;
                plot::render(
                    &scsv,
                    &sub.path("saturation.svg"),
                    &Figure::new("long-time density", "site", &["diagonal", "infinite_temperature"]).labels("site", "<n_i>"),
                )?;
                let max_dev = de.iter().zip(&it).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                let slope = dynamics::profile_slope(&de, p.particles)?;
                json!({ "max_deviation": max_dev, "slope_c": -slope.slope })
            }
            None => Value::Null,
        };
        last_site.push((p.sites, ev.trace.times.clone(), ev.trace.site_series(p.sites)));
        runs.push(json!({
            "sites": p.sites,
            "particles": p.particles,
            "dimension": basis.len(),
            "method": ev.method,
            "t_max": t_max,
            "final_displacement": ev.trace.displacement.last(),
            "renormalizations": ev.renormalizations,
            "fronts": fronts,
            "saturation": saturation,
        }));
        for path in sub.written() {
            out.record(path.clone());
        }
    }

    let shared = last_site.windows(2).all(|w| w[0].1 == w[1].1);
    if shared && !last_site.is_empty() {
        let names: Vec<String> = std::iter::once("t".to_string()).chain(last_site.iter().map(|(l, _, _)| format!("n_last_L{l}"))).collect();
        let csv = out.csv("last_site.csv", &header(&names), |w| {
            writeln!(w, "{}", names.join(","))?;
            for k in 0..last_site[0].1.len() {
                let row: Vec<f64> = std::iter::once(last_site[0].1[k]).chain(last_site.iter().map(|s| s.2[k])).collect();
                write_row(w, &row)?;
            }
            Ok(())
        })?;
        let ys: Vec<&str> = names[1..].iter().map(String::as_str).collect();
        plot::render(&csv, &out.path("last_site.svg"), &Figure::new("last-site density", "t", &ys).labels("t", "<n_L>").log_x().log_y())?;
    }
    Ok(json!({ "runs": runs }))
}

pub fn automaton(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("automaton")?;
    let a = &cfg.config.automaton;
    let (sites, particles) = cfg.automaton_geometry()?;
    let layout = cfg.layout()?;
    let initial = match &a.initial {
        Some(s) => {
            let c: Chain = s.get_ref().parse().map_err(|e| cfg.error(s.span(), e))?;
            if c.len() != sites || c.particle_count() != particles {
                return Err(cfg.error(s.span(), format!("initial chain has {} sites and {} particles", c.len(), c.particle_count())));
            }
            Some(c)
        }
        None => None,
    };
    let run = automaton::run_automaton(sites, particles, a.layers, initial, &RunOptions { layout, record_map: true })?;
    let csv = out.csv("displacement.csv", &["t", "R", "particle_front", "hole_front"], |w| Ok(run.write_csv(w)?))?;
    plot::render(&csv, &out.path("displacement.svg"), &Figure::new("automaton displacement", "t", &["R"]).labels("layer", "R").log_x())?;
    plot::render(
        &csv,
        &out.path("fronts.svg"),
        &Figure::new("automaton fronts", "t", &["particle_front", "hole_front"]).labels("layer", "site").log_x(),
    )?;
    let rle = out.write("map.rle", |w| Ok(automaton::write_rle(&run.rows, sites, w)?))?;
    let back = automaton::read_rle(std::fs::File::open(&rle)?)?;
    if back != run.rows {
        return Err(CliError::Schema { path: rle.display().to_string(), msg: "bit map does not read back".into() });
    }
    if a.pgm {
        out.write("map.pgm", |w| Ok(automaton::write_pgm(&run.rows, sites, w)?))?;
    }
    let cross = match automaton::crossover(&run, CROSSOVER_T_START, CROSSOVER_PER_DECADE, CROSSOVER_MIN_POINTS) {
        Ok(c) => json!({
            "time": c.time,
            "front": c.front,
            "ballistic_r2": c.ballistic.r_squared,
            "ballistic_slope": c.ballistic.slope,
            "logarithmic_r2": c.logarithmic.r_squared,
            "logarithmic_slope": c.logarithmic.slope,
            "particle_speed": c.particle_speed.slope,
            "hole_speed": c.hole_speed.slope,
        }),
        Err(east_core::Error::InsufficientStatistics { .. } | east_core::Error::Domain(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "sites": sites,
        "particles": particles,
        "layers": a.layers,
        "layout": format!("{layout:?}"),
        "final_displacement": run.displacement.last(),
        "final_state": run.last.to_string(),
        "crossover": cross,
    }))
}

pub fn fragmentation(cfg: &Loaded, out: &mut OutDir) -> Result<Value, CliError> {
    cfg.check_command("fragmentation")?;
    let p = cfg.problem()?;
    let full = SectorBasis::enumerate(p.sites, p.particles, true)?;
    let g = fragmentation::build_graph(&full, &p.spec)?;
    let comps = fragmentation::connected_components(&g);
    out.csv("components.csv", &["component", "size"], |w| {
        writeln!(w, "component,size")?;
        for (k, s) in comps.sizes.iter().enumerate() {
            writeln!(w, "{k},{s}")?;
        }
        Ok(())
    })?;

    let (basis, _) = sector(&p)?;
    let lg = fragmentation::build_graph(&basis, &p.spec)?;
    let lcomps = fragmentation::connected_components(&lg);
    let legs = fragmentation::backbone_legs(&lg);
    out.write("basis.txt", |w| Ok(basis.write_dump(w)?))?;
    out.write("edges.txt", |w| Ok(lg.write_edge_list(w)?))?;
    out.write("labels.txt", |w| Ok(fragmentation::write_vertex_labels(w, &lg, &lcomps, &legs)?))?;
    out.csv("legs.csv", &["leg", "rightmost", "size"], |w| {
        writeln!(w, "leg,rightmost,size")?;
        for (k, l) in legs.legs.iter().enumerate() {
            writeln!(w, "{k},{},{}", l.rightmost, l.vertices.len())?;
        }
        Ok(())
    })?;
    let pop = out.csv("population.csv", &["rightmost", "states"], |w| {
        writeln!(w, "rightmost,states")?;
        for (i, n) in &legs.population {
            writeln!(w, "{i},{n}")?;
        }
        Ok(())
    })?;
    plot::render(&pop, &out.path("population.svg"), &Figure::new("leg population", "rightmost", &["states"]).labels("i_max", "states").points())?;

    let largest = comps.sizes.iter().copied().max().unwrap_or(0);
    Ok(json!({
        "configurations": full.len(),
        "components": comps.count(),
        "largest_component": largest,
        "sector_dimension": basis.len(),
        "edges": lg.edge_count(),
        "backbone": legs.backbone_size(),
        "legs": legs.legs.len(),
        "frozen_region_labels": fragmentation::frozen_region_labels(p.particles, &p.spec)?.len(),
        "zero_mode_bound": fragmentation::zero_mode_lower_bound(&basis),
    }))
}

/// Summary document shared by every command.
pub fn summary(command: &str, p: Option<&Problem>, result: Value) -> Value {
    json!({
        "command": command,
        "model": p.map_or(Value::Null, model_json),
        "result": result,
    })
}
