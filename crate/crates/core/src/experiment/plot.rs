//! SVG plots of accuracy against the swept quantity.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::experiment::sweep::{ResultRow, Source, SweepVariable};

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// Monte Carlo points with interval bars and closed-form curves, one colour
/// per model. Wide `d_t` grids are drawn on a logarithmic axis.
pub fn plot_sweep(
    rows: &[ResultRow],
    variable: SweepVariable,
    title: &str,
    path: &Path,
) -> Result<()> {
    draw(rows, variable, title, path).map_err(|e| Error::Plot(format!("{}: {e}", path.display())))
}

fn draw(
    rows: &[ResultRow],
    variable: SweepVariable,
    title: &str,
    path: &Path,
) -> std::result::Result<(), Box<dyn std::error::Error>> {
    let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let log_x = variable == SweepVariable::Dt && lo > 0.0 && hi / lo > 20.0;
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let (x0, x1) = if rows.is_empty() {
        (0.0, 1.0)
    } else if lo == hi {
        (tx(lo) - 1.0, tx(hi) + 1.0)
    } else {
        let pad = 0.03 * (tx(hi) - tx(lo));
        (tx(lo) - pad, tx(hi) + pad)
    };

    let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(48)
        .y_label_area_size(56)
        .build_cartesian_2d(x0..x1, 0.0..1.02)?;
    let x_fmt = |v: &f64| {
        if log_x {
            format!("{:.0}", 10f64.powf(*v))
        } else {
            format!("{v}")
        }
    };
    chart
        .configure_mesh()
        .x_desc(variable.label())
        .y_desc("accuracy index")
        .x_label_formatter(&x_fmt)
        .draw()?;

    let mut models: Vec<&str> = Vec::new();
    for r in rows {
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    for (k, model) in models.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let analytic: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.model == *model && r.source == Source::Analytic)
            .filter_map(|r| Some((tx(r.value), r.ima?)))
            .collect();
        let mc: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.model == *model && r.source == Source::MonteCarlo && r.ima.is_some())
            .collect();
        if !analytic.is_empty() {
            chart
                .draw_series(LineSeries::new(analytic, colour.stroke_width(2)))?
                .label(format!("{model} (closed form)"))
                .legend(move |(x, y)| {
                    PathElement::new(vec![(x, y), (x + 18, y)], colour.stroke_width(2))
                });
        }
        if !mc.is_empty() {
            chart.draw_series(mc.iter().filter_map(|r| {
                let (l, h) = (r.ima_lo?, r.ima_hi?);
                Some(PathElement::new(
                    vec![(tx(r.value), l), (tx(r.value), h)],
                    colour,
                ))
            }))?;
            chart
                .draw_series(
                    mc.iter().map(|r| {
                        Circle::new((tx(r.value), r.ima.unwrap_or(0.0)), 4, colour.filled())
                    }),
                )?
                .label(format!("{model} (Monte Carlo)"))
                .legend(move |(x, y)| Circle::new((x + 9, y), 4, colour.filled()));
        }
    }
    if !models.is_empty() {
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE.mix(0.85))
            .border_style(BLACK)
            .draw()?;
    }
    root.present()?;
    Ok(())
}
