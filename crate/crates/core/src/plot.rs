//! Self-contained SVG line plot of sweep results. Cosmetic output only; no
//! consumer parses it.

use std::io::Write;

use crate::error::Result;
use crate::experiment::{format_sig6, Phase, SweepRow};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

struct Series {
    label: &'static str,
    color: &'static str,
    pick: fn(&SweepRow) -> f64,
}

const SERIES: [Series; 5] = [
    Series { label: "y2", color: "#2e7d32", pick: |r| r.y[1] },
    Series { label: "delta", color: "#00838f", pick: |r| r.delta },
    Series { label: "enthalpy", color: "#c62828", pick: |r| r.enthalpy },
    Series { label: "neg_entropy", color: "#6a1b9a", pick: |r| r.neg_entropy },
    Series { label: "free_energy", color: "#1565c0", pick: |r| r.free_energy },
];

fn coord(v: f64) -> String {
    format!("{:.2}", v)
}

/// Plots y2, delta, enthalpy, neg-entropy and free energy against h, one
/// solid polyline per quantity for the pre-perturbation minima and one
/// dashed for the post-perturbation ones.
pub fn write_sweep_svg<W: Write>(rows: &[SweepRow], writer: &mut W) -> Result<()> {
    let (h_min, h_max) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.h), hi.max(r.h)));
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in rows {
        for series in &SERIES {
            let v = (series.pick)(row);
            v_min = v_min.min(v);
            v_max = v_max.max(v);
        }
    }
    if !v_min.is_finite() || v_min == v_max {
        v_min -= 0.5;
        v_max += 0.5;
    }
    let pad = 0.05 * (v_max - v_min);
    let (v_min, v_max) = (v_min - pad, v_max + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |h: f64| MARGIN_LEFT + (h - h_min) / (h_max - h_min).max(1e-12) * plot_w;
    let sy = |v: f64| MARGIN_TOP + (v_max - v) / (v_max - v_min) * plot_h;

    writeln!(
        writer,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )?;
    writeln!(writer, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>")?;

    // axes
    writeln!(
        writer,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        coord(MARGIN_LEFT),
        coord(MARGIN_TOP),
        coord(MARGIN_LEFT),
        coord(MARGIN_TOP + plot_h)
    )?;
    writeln!(
        writer,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        coord(MARGIN_LEFT),
        coord(MARGIN_TOP + plot_h),
        coord(MARGIN_LEFT + plot_w),
        coord(MARGIN_TOP + plot_h)
    )?;

    // horizontal gridline and tick labels at value = 0 if inside range
    if v_min < 0.0 && v_max > 0.0 {
        writeln!(
            writer,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-dasharray=\"3 3\"/>",
            coord(MARGIN_LEFT),
            coord(sy(0.0)),
            coord(MARGIN_LEFT + plot_w),
            coord(sy(0.0))
        )?;
    }
    for (v, anchor_y) in [(v_max, MARGIN_TOP + 4.0), (v_min, MARGIN_TOP + plot_h)] {
        writeln!(
            writer,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            coord(MARGIN_LEFT - 6.0),
            coord(anchor_y),
            format_sig6(v)
        )?;
    }
    let unique_h: Vec<f64> = {
        let mut hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        hs.dedup();
        hs
    };
    for h in &unique_h {
        writeln!(
            writer,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            coord(sx(*h)),
            coord(MARGIN_TOP + plot_h + 18.0),
            format_sig6(*h)
        )?;
    }
    writeln!(
        writer,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">h</text>",
        coord(MARGIN_LEFT + plot_w / 2.0),
        coord(HEIGHT - 10.0)
    )?;

    for phase in [Phase::PrePerturb, Phase::PostPerturb] {
        let dash = match phase {
            Phase::PrePerturb => "",
            Phase::PostPerturb => " stroke-dasharray=\"6 4\"",
        };
        for series in &SERIES {
            let points: Vec<String> = rows
                .iter()
                .filter(|r| r.phase == phase)
                .map(|r| format!("{},{}", coord(sx(r.h)), coord(sy((series.pick)(r)))))
                .collect();
            if points.is_empty() {
                continue;
            }
            writeln!(
                writer,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{} points=\"{}\"/>",
                series.color,
                dash,
                points.join(" ")
            )?;
        }
    }

    // legend
    let legend_x = MARGIN_LEFT + plot_w + 16.0;
    for (i, series) in SERIES.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        writeln!(
            writer,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>",
            coord(legend_x),
            coord(y - 4.0),
            coord(legend_x + 24.0),
            coord(y - 4.0),
            series.color
        )?;
        writeln!(
            writer,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            coord(legend_x + 30.0),
            coord(y),
            series.label
        )?;
    }
    let y = MARGIN_TOP + 16.0 + 20.0 * SERIES.len() as f64 + 8.0;
    writeln!(
        writer,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">solid: pre-perturb</text>",
        coord(legend_x),
        coord(y)
    )?;
    writeln!(
        writer,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">dashed: post-perturb</text>",
        coord(legend_x),
        coord(y + 16.0)
    )?;

    writeln!(writer, "</svg>")?;
    Ok(())
}
