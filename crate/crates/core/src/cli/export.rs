//! CSV, JSON and SVG renderings of runs, sweeps and control surfaces.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::controllers::Controllers;
use crate::plant::{Outcome, OutcomeKind};
use crate::simulation::{Scenario, SweepReport, Trajectory};

use super::CliError;

pub const TRAJECTORY_HEADER: [&str; 9] =
    ["step", "x", "y", "alpha_deg", "beta_deg", "beta_prime_deg", "gamma_deg", "theta_deg", "mode"];

/// Fixed 17-significant-digit rendering; parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_trajectories<W: Write>(out: W, runs: &[Trajectory]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for t in runs {
        for s in &t.samples {
            w.write_record([
                s.step.to_string(),
                fmt_f64(s.state.x),
                fmt_f64(s.state.y),
                fmt_f64(s.state.alpha),
                fmt_f64(s.state.beta),
                fmt_f64(s.beta_prime),
                fmt_f64(s.gamma),
                fmt_opt(s.theta),
                t.mode.as_str().to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct OutcomeEntry<'a> {
    mode: &'a str,
    #[serde(flatten)]
    outcome: &'a Outcome,
    fallbacks: usize,
}

#[derive(Serialize)]
struct OutcomeDocument<'a> {
    label: &'a str,
    docked: bool,
    runs: Vec<OutcomeEntry<'a>>,
}

pub fn outcome_json(scenario: &Scenario, runs: &[Trajectory]) -> String {
    let doc = OutcomeDocument {
        label: &scenario.label,
        docked: runs.iter().all(Trajectory::docked),
        runs: runs
            .iter()
            .map(|t| OutcomeEntry { mode: t.mode.as_str(), outcome: &t.outcome, fallbacks: t.fallbacks })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("outcome serializes")
}

pub fn write_sweep<W: Write>(out: W, report: &SweepReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x0", "y0", "alpha0", "beta0", "outcome", "steps"])?;
    for c in &report.cells {
        w.write_record([
            fmt_f64(c.initial.x),
            fmt_f64(c.initial.y),
            fmt_f64(c.initial.alpha),
            fmt_f64(c.initial.beta),
            c.outcome.as_str().to_string(),
            c.steps.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn sweep_summary_json(report: &SweepReport) -> String {
    let counts: serde_json::Map<String, serde_json::Value> = OutcomeKind::ALL
        .iter()
        .map(|k| (k.as_str().to_string(), report.counts.get(k).copied().unwrap_or(0).into()))
        .collect();
    let doc = serde_json::json!({
        "cells": report.cells.len(),
        "success_ratio": report.success_ratio,
        "counts": counts,
        "grid": report.grid,
    });
    serde_json::to_string_pretty(&doc).expect("summary serializes")
}

/// Evenly spaced inclusive samples of `[lo, hi]`.
fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + step * i as f64 })
}

/// Trailer controller output over its full input universes.
pub fn write_trailer_surface<W: Write>(out: W, c: &Controllers, resolution: usize) -> Result<(), CliError> {
    let rb = c.trailer();
    let (x_lo, x_hi) = rb.inputs()[0].universe();
    let (a_lo, a_hi) = rb.inputs()[1].universe();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "alpha_deg", "beta_prime_deg"])?;
    for x in linspace(x_lo, x_hi, resolution) {
        for a in linspace(a_lo, a_hi, resolution) {
            let v = c.flc_t(x, a)?;
            w.write_record([fmt_f64(x), fmt_f64(a), fmt_f64(v)])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Cab controller output over its input universe.
pub fn write_cab_surface<W: Write>(out: W, c: &Controllers, resolution: usize) -> Result<(), CliError> {
    let (lo, hi) = c.cab().inputs()[0].universe();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma_deg", "theta_deg"])?;
    for g in linspace(lo, hi, resolution) {
        w.write_record([fmt_f64(g), fmt_f64(c.flc_c(g)?)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

const MODE_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

/// Planar plot: one polyline per run, a dock marker at the origin and
/// trailer-axis ticks every `tick_every` steps.
pub fn trajectory_svg(scenario: &Scenario, runs: &[Trajectory], tick_every: usize) -> String {
    let tick_len = scenario.params.l_t;
    let (mut x0, mut x1, mut y0, mut y1) = (-10.0f64, 10.0f64, -5.0f64, 10.0f64);
    for (x, y) in runs.iter().flat_map(|t| t.positions()) {
        if x.is_finite() && y.is_finite() {
            x0 = x0.min(x - tick_len);
            x1 = x1.max(x + tick_len);
            y0 = y0.min(y - tick_len);
            y1 = y1.max(y + tick_len);
        }
    }
    let (w, h) = (x1 - x0, y1 - y0);
    let stroke = (w.max(h) / 400.0).max(0.1);
    // SVG y grows downward; flip so the dock sits at the bottom.
    let px = |x: f64| x - x0;
    let py = |y: f64| y1 - y;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.3} {h:.3}" width="800" height="{:.0}">"#,
        800.0 * h / w
    );
    let _ = writeln!(svg, "  <title>{}</title>", xml_escape(&scenario.label));
    let _ = writeln!(
        svg,
        r##"  <line class="dock-line" x1="0" y1="{:.3}" x2="{w:.3}" y2="{:.3}" stroke="#888" stroke-width="{stroke:.3}"/>"##,
        py(0.0),
        py(0.0)
    );
    let _ = writeln!(
        svg,
        r##"  <circle class="dock" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#2ca02c"/>"##,
        px(0.0),
        py(0.0),
        stroke * 4.0
    );
    for (i, t) in runs.iter().enumerate() {
        let color = MODE_COLORS[i % MODE_COLORS.len()];
        let points: Vec<String> = t
            .positions()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"  <polyline class="{}" points="{}" fill="none" stroke="{color}" stroke-width="{stroke:.3}"/>"#,
            t.mode.as_str(),
            points.join(" ")
        );
        for s in t.samples.iter().step_by(tick_every.max(1)) {
            let a = s.state.alpha.to_radians();
            let (tx, ty) = (s.state.x + tick_len * a.sin(), s.state.y + tick_len * a.cos());
            let _ = writeln!(
                svg,
                r#"  <line class="{}-heading" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="{:.3}" opacity="0.5"/>"#,
                t.mode.as_str(),
                px(s.state.x),
                py(s.state.y),
                px(tx),
                py(ty),
                stroke * 0.6
            );
        }
        let _ = writeln!(
            svg,
            r#"  <text x="{:.3}" y="{:.3}" font-size="{:.3}" fill="{color}">{}: {}</text>"#,
            stroke * 5.0,
            stroke * 12.0 * (i + 1) as f64,
            stroke * 10.0,
            t.mode.as_str(),
            t.outcome.kind
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
