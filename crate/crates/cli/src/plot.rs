//! SVG renderings of emitted CSV files. Nothing here computes results: every
//! plot reads its data back from disk.

use std::path::Path;

use plotters::prelude::*;

use crate::error::CliError;
use crate::output::Table;

const SIZE: (u32, u32) = (800, 560);
const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];
/// Heatmap rows beyond this are thinned by striding.
const MAX_HEATMAP_ROWS: usize = 400;

fn plot_err(p: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Plot { path: p.display().to_string(), msg: e.to_string() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Points,
}

/// Columns of one CSV drawn against a shared x column.
pub struct Figure<'a> {
    pub title: &'a str,
    pub x: &'a str,
    pub ys: Vec<String>,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
    pub style: Style,
}

impl<'a> Figure<'a> {
    pub fn new(title: &'a str, x: &'a str, ys: &[&str]) -> Self {
        Self {
            title,
            x,
            ys: ys.iter().map(|s| s.to_string()).collect(),
            x_label: x,
            y_label: "",
            log_x: false,
            log_y: false,
            style: Style::Line,
        }
    }

    pub fn labels(mut self, x: &'a str, y: &'a str) -> Self {
        self.x_label = x;
        self.y_label = y;
        self
    }

    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn points(mut self) -> Self {
        self.style = Style::Points;
        self
    }
}

fn bounds(v: impl Iterator<Item = f64>, log: bool) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in v.filter(|x| x.is_finite() && (!log || *x > 0.0)) {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() {
        return if log { (1e-3, 1.0) } else { (0.0, 1.0) };
    }
    if hi <= lo {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return if log { (lo / 2.0, hi * 2.0) } else { (lo - pad, hi + pad) };
    }
    if log {
        (lo, hi)
    } else {
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Renders `fig` from `csv` into `svg`.
pub fn render(csv: &Path, svg: &Path, fig: &Figure) -> Result<(), CliError> {
    let table = Table::read(csv)?;
    let xs = table.column(fig.x).ok_or_else(|| plot_err(csv, format!("no column {:?}", fig.x)))?;
    let mut series = Vec::new();
    for name in &fig.ys {
        let ys = table.column(name).ok_or_else(|| plot_err(csv, format!("no column {name:?}")))?;
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| (x, y))
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!fig.log_x || *x > 0.0) && (!fig.log_y || *y > 0.0))
            .collect();
        series.push((name.clone(), pts));
    }
    let (x0, x1) = bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)), fig.log_x);
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)), fig.log_y);

    let root = SVGBackend::new(svg, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(svg, e))?;
    let mut builder = ChartBuilder::on(&root);
    builder.caption(fig.title, ("sans-serif", 22)).margin(12).x_label_area_size(42).y_label_area_size(64);

    macro_rules! draw {
        ($chart:expr) => {{
            let mut chart = $chart.map_err(|e| plot_err(svg, e))?;
            chart
                .configure_mesh()
                .x_desc(fig.x_label)
                .y_desc(fig.y_label)
                .draw()
                .map_err(|e| plot_err(svg, e))?;
            for (k, (name, pts)) in series.iter().enumerate() {
                let color = PALETTE[k % PALETTE.len()];
                let anno = match fig.style {
                    Style::Line => chart.draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2))),
                    Style::Points => chart.draw_series(pts.iter().map(|&p| Circle::new(p, 2, color.filled()))),
                }
                .map_err(|e| plot_err(svg, e))?;
                if series.len() > 1 {
                    anno.label(name.as_str()).legend(move |(x, y)| {
                        PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
                    });
                }
            }
            if series.len() > 1 {
                chart
                    .configure_series_labels()
                    .background_style(WHITE.mix(0.8))
                    .border_style(BLACK)
                    .draw()
                    .map_err(|e| plot_err(svg, e))?;
            }
        }};
    }

    match (fig.log_x, fig.log_y) {
        (false, false) => draw!(builder.build_cartesian_2d(x0..x1, y0..y1)),
        (true, false) => draw!(builder.build_cartesian_2d((x0..x1).log_scale(), y0..y1)),
        (false, true) => draw!(builder.build_cartesian_2d(x0..x1, (y0..y1).log_scale())),
        (true, true) => draw!(builder.build_cartesian_2d((x0..x1).log_scale(), (y0..y1).log_scale())),
    }
    root.present().map_err(|e| plot_err(svg, e))?;
    Ok(())
}

/// Histogram bars from `centre`/`height` columns with optional overlay curves.
pub fn histogram(csv: &Path, svg: &Path, title: &str, centre: &str, height: &str, overlays: &[&str]) -> Result<(), CliError> {
    let table = Table::read(csv)?;
    let xs = table.column(centre).ok_or_else(|| plot_err(csv, format!("no column {centre:?}")))?;
    let hs = table.column(height).ok_or_else(|| plot_err(csv, format!("no column {height:?}")))?;
    let width = if xs.len() > 1 { xs[1] - xs[0] } else { 1.0 };
    let mut curves = Vec::new();
    for name in overlays {
        curves.push((*name, table.column(name).ok_or_else(|| plot_err(csv, format!("no column {name:?}")))?));
    }
    let (x0, x1) = bounds(xs.iter().map(|x| x - width / 2.0).chain(xs.iter().map(|x| x + width / 2.0)), false);
    let (_, y1) = bounds(hs.iter().copied().chain(curves.iter().flat_map(|c| c.1.iter().copied())).chain([0.0]), false);

    let root = SVGBackend::new(svg, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(svg, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(42)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, 0.0..y1)
        .map_err(|e| plot_err(svg, e))?;
    chart.configure_mesh().x_desc(centre).y_desc(height).draw().map_err(|e| plot_err(svg, e))?;
    chart
        .draw_series(xs.iter().zip(&hs).map(|(&x, &h)| {
            Rectangle::new([(x - width / 2.0, 0.0), (x + width / 2.0, h)], PALETTE[0].mix(0.5).filled())
        }))
        .map_err(|e| plot_err(svg, e))?;
    for (k, (name, ys)) in curves.iter().enumerate() {
        let color = PALETTE[(k + 1) % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(xs.iter().copied().zip(ys.iter().copied()), color.stroke_width(2)))
            .map_err(|e| plot_err(svg, e))?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    if !curves.is_empty() {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| plot_err(svg, e))?;
    }
    root.present().map_err(|e| plot_err(svg, e))?;
    Ok(())
}

/// Site-resolved heatmap: rows of `csv` against columns `prefix1..prefixN`.
///
/// The row axis is drawn by row index (as sampled), labelled with the first
/// and last value of column `row`.
pub fn heatmap(csv: &Path, svg: &Path, title: &str, row: &str, prefix: &str) -> Result<(), CliError> {
    let table = Table::read(csv)?;
    let rows = table.column(row).ok_or_else(|| plot_err(csv, format!("no column {row:?}")))?;
    let cols: Vec<usize> = (0..table.header.len()).filter(|&k| table.header[k].starts_with(prefix)).collect();
    if cols.is_empty() || rows.is_empty() {
        return Err(plot_err(csv, format!("no {prefix}* columns")));
    }
    let stride = rows.len().div_ceil(MAX_HEATMAP_ROWS);
    let picked: Vec<usize> = (0..rows.len()).step_by(stride).collect();
    let caption = format!("{title} ({row} from {:.3} to {:.3})", rows[0], rows[rows.len() - 1]);

    let root = SVGBackend::new(svg, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(svg, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(42)
        .y_label_area_size(64)
        .build_cartesian_2d(0.5..cols.len() as f64 + 0.5, 0.0..picked.len() as f64)
        .map_err(|e| plot_err(svg, e))?;
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc("site")
        .y_desc(format!("{row} sample"))
        .draw()
        .map_err(|e| plot_err(svg, e))?;
    let mut cells = Vec::with_capacity(picked.len() * cols.len());
    for (yi, &r) in picked.iter().enumerate() {
        for (xi, &c) in cols.iter().enumerate() {
            let v = table.rows[r][c].clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - v)).round() as u8;
            let x = xi as f64 + 1.0;
            cells.push(Rectangle::new([(x - 0.5, yi as f64), (x + 0.5, yi as f64 + 1.0)], RGBColor(shade, shade, 255).filled()));
        }
    }
    chart.draw_series(cells).map_err(|e| plot_err(svg, e))?;
    root.present().map_err(|e| plot_err(svg, e))?;
    Ok(())
}
