//! CSV and SVG emitters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::trials::{lower_median, SummaryRow, TrialRecord};
use crate::error::{Error, Result};
use crate::planner::{PlanOutcome, Trajectory};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn num(v: f64) -> String {
    // Display prints the shortest string that round-trips.
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), num)
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const TRIAL_CSV_HEADER: &str = "seed,success,first_ms,first_cost,final_ms,final_cost";
pub const SUMMARY_CSV_HEADER: &str = "scenario,n_trials,n_success,success_pct,median_first_ms,median_first_cost,median_final_ms,median_final_cost,reference_cost,norm_median_first_cost,norm_median_final_cost";

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIAL_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.seed,
            r.success,
            opt(r.first_solution.map(|s| s.0)),
            opt(r.first_solution.map(|s| s.1)),
            opt(r.final_solution.map(|s| s.0)),
            opt(r.final_solution.map(|s| s.1)),
        );
    }
    out
}

pub fn summary_csv(s: &SummaryRow) -> String {
    format!(
        "{SUMMARY_CSV_HEADER}\n{},{},{},{},{},{},{},{},{},{},{}\n",
        field(&s.scenario),
        s.n_trials,
        s.n_success,
        num(s.success_rate),
        num(s.median_first_ms),
        num(s.median_first_cost),
        num(s.median_final_ms),
        num(s.median_final_cost),
        opt(s.reference_cost),
        num(s.normalized_first_cost()),
        num(s.normalized_final_cost()),
    )
}

/// Path of the summary file written next to `path`.
pub fn summary_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".summary.csv");
    PathBuf::from(p)
}

/// Writes the per-trial CSV to `path` and the summary to `<path>.summary.csv`.
pub fn emit_csv(records: &[TrialRecord], summary: &SummaryRow, path: &Path) -> Result<()> {
    write_file(path, &trials_csv(records))?;
    write_file(&summary_path(path), &summary_csv(summary))
}

/// Trajectory as CSV: one row per sample with its time stamp and state.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let dim = traj.states.first().map_or(0, |s| s.dim());
    let mut out = String::from("index,t");
    for d in 0..dim {
        let _ = write!(out, ",x{d}");
    }
    out.push('\n');

    // Sample times: re-derived from the edge durations.
    let mut times = vec![0.0; traj.states.len()];
    let mut start_idx = 0usize;
    let mut t0 = 0.0;
    for e in &traj.edges {
        let n = e.end_sample - start_idx;
        for k in 1..=n {
            times[start_idx + k] = if k == n {
                t0 + e.duration
            } else {
                t0 + e.duration * k as f64 / n as f64
            };
        }
        t0 += e.duration;
        start_idx = e.end_sample;
    }
    for (i, s) in traj.states.iter().enumerate() {
        let _ = write!(out, "{i},{}", num(times[i]));
        for v in s.coords() {
            let _ = write!(out, ",{}", num(*v));
        }
        out.push('\n');
    }
    out
}

/// Controls of a trajectory, one row per edge.
pub fn controls_csv(traj: &Trajectory) -> String {
    let cdim = traj.edges.first().map_or(0, |e| e.control.dim());
    let mut out = String::from("edge,duration,cost");
    for d in 0..cdim {
        let _ = write!(out, ",u{d}");
    }
    out.push('\n');
    for (i, e) in traj.edges.iter().enumerate() {
        let _ = write!(out, "{i},{},{}", num(e.duration), num(e.cost));
        for v in e.control.coords() {
            let _ = write!(out, ",{}", num(*v));
        }
        out.push('\n');
    }
    out
}

/// Run counters and the best-cost timeline by iteration. Contains no wall-clock
/// values, so identical deterministic runs produce identical files.
pub fn stats_csv(outcome: &PlanOutcome) -> String {
    let s = &outcome.stats;
    let mut out = String::from("key,value\n");
    let rows: [(&str, String); 13] = [
        ("success", outcome.success().to_string()),
        ("best_cost", num(outcome.best.cost)),
        ("best_iteration", outcome.best.iteration.to_string()),
        ("iterations", s.iterations.to_string()),
        (
            "propagations_attempted",
            s.propagations_attempted.to_string(),
        ),
        ("propagations_valid", s.propagations_valid.to_string()),
        ("propagations_admitted", s.propagations_admitted.to_string()),
        ("nodes_committed", s.nodes_committed.to_string()),
        ("candidates_dropped", s.candidates_dropped.to_string()),
        ("nodes_pruned_terminal", s.nodes_pruned_terminal.to_string()),
        ("nodes_deactivated", s.nodes_deactivated.to_string()),
        ("nodes_reactivated", s.nodes_reactivated.to_string()),
        ("capacity_exhausted", s.capacity_exhausted.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    let _ = writeln!(out, "node_count,{}", outcome.node_count);
    for p in &s.cost_timeline {
        let _ = writeln!(out, "timeline_iteration_{},{}", p.iteration, num(p.cost));
    }
    out
}

/// Wall-clock side of a run: elapsed time and the timeline in milliseconds.
pub fn timing_csv(outcome: &PlanOutcome) -> String {
    let mut out = String::from("iteration,elapsed_ms,cost\n");
    for p in &outcome.stats.cost_timeline {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.iteration,
            num(p.elapsed * 1e3),
            num(p.cost)
        );
    }
    let _ = writeln!(
        out,
        "{},{},{}",
        outcome.stats.iterations,
        num(outcome.stats.elapsed * 1e3),
        num(outcome.best.cost)
    );
    out
}

/// Geometry of a cost-vs-time plot: a log-scaled time axis (ms) and a linear
/// cost axis. Curves are stored in data coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CostCurvePlot {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// `(log10 lo, log10 hi)` of the time axis.
    pub log_t_range: (f64, f64),
    pub cost_range: (f64, f64),
    /// Per-trial step curves, `(ms, cost)` vertices.
    pub trials: Vec<Vec<(f64, f64)>>,
    /// Lower median over the plotted trials, counting a trial without a
    /// solution yet as infinite cost; drawn once it is finite.
    pub median: Vec<(f64, f64)>,
}

const MIN_MS: f64 = 1e-3;

fn step_vertices(timeline: &[(f64, f64)], t_end: f64) -> Vec<(f64, f64)> {
    let mut v = Vec::with_capacity(timeline.len() * 2 + 1);
    for (i, &(t, c)) in timeline.iter().enumerate() {
        let t = t.max(MIN_MS);
        if i > 0 {
            v.push((t, timeline[i - 1].1));
        }
        v.push((t, c));
    }
    if let Some(&(_, c)) = timeline.last() {
        let last_t = v.last().map_or(t_end, |p| p.0);
        if t_end > last_t {
            v.push((t_end, c));
        }
    }
    v
}

/// Cost of a step timeline at time `t` (`None` before its first point).
fn value_at(timeline: &[(f64, f64)], t: f64) -> Option<f64> {
    timeline
        .iter()
        .take_while(|p| p.0.max(MIN_MS) <= t)
        .last()
        .map(|p| p.1)
}

impl CostCurvePlot {
    pub fn build(records: &[TrialRecord]) -> Self {
        let timelines: Vec<&[(f64, f64)]> = records
            .iter()
            .map(|r| r.cost_timeline.as_slice())
            .filter(|t| !t.is_empty())
            .collect();

        let mut times: Vec<f64> = timelines
            .iter()
            .flat_map(|t| t.iter().map(|p| p.0.max(MIN_MS)))
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();

        let (t_lo, t_hi) = match (times.first(), times.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (1.0, 1000.0),
        };
        let mut log_t = (t_lo.log10(), t_hi.log10());
        if log_t.1 - log_t.0 < 1e-9 {
            log_t = (log_t.0 - 0.5, log_t.1 + 0.5);
        } else {
            let pad = 0.05 * (log_t.1 - log_t.0);
            log_t = (log_t.0 - pad, log_t.1 + pad);
        }

        let costs = timelines.iter().flat_map(|t| t.iter().map(|p| p.1));
        let (c_lo, c_hi) = costs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c), hi.max(c))
        });
        let cost_range = if !c_lo.is_finite() {
            (0.0, 1.0)
        } else if c_hi - c_lo < 1e-12 {
            (c_lo - 0.5, c_hi + 0.5)
        } else {
            let pad = 0.05 * (c_hi - c_lo);
            (c_lo - pad, c_hi + pad)
        };

        let trials = timelines.iter().map(|t| step_vertices(t, t_hi)).collect();

        let median_points: Vec<(f64, f64)> = times
            .iter()
            .filter_map(|&t| {
                let vals: Vec<f64> = timelines
                    .iter()
                    .map(|tl| value_at(tl, t).unwrap_or(f64::INFINITY))
                    .collect();
                let m = lower_median(&vals);
                m.is_finite().then_some((t, m))
            })
            .collect();
        let median = step_vertices(&median_points, t_hi);

        CostCurvePlot {
            width: 800.0,
            height: 500.0,
            margin: 60.0,
            log_t_range: log_t,
            cost_range,
            trials,
            median,
        }
    }

    pub fn map_x(&self, ms: f64) -> f64 {
        let (lo, hi) = self.log_t_range;
        self.margin + (ms.max(MIN_MS).log10() - lo) / (hi - lo) * (self.width - 2.0 * self.margin)
    }

    pub fn map_y(&self, cost: f64) -> f64 {
        let (lo, hi) = self.cost_range;
        self.height - self.margin - (cost - lo) / (hi - lo) * (self.height - 2.0 * self.margin)
    }

    /// Inverse of [`map_y`](Self::map_y).
    pub fn unmap_y(&self, y: f64) -> f64 {
        let (lo, hi) = self.cost_range;
        lo + (self.height - self.margin - y) / (self.height - 2.0 * self.margin) * (hi - lo)
    }

    fn polyline(&self, pts: &[(f64, f64)], class: &str, style: &str) -> String {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(t, c)| format!("{:.3},{:.3}", self.map_x(t), self.map_y(c)))
            .collect();
        format!(
            "<polyline class=\"{class}\" fill=\"none\" {style} points=\"{}\"/>\n",
            coords.join(" ")
        )
    }

    pub fn to_svg(&self, title: &str) -> String {
        let (w, h, m) = (self.width, self.height, self.margin);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        );
        let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
            w / 2.0,
            m / 2.0,
            escape(title)
        );
        // Axes.
        let _ = writeln!(
            s,
            "<path class=\"axis\" d=\"M{m},{m} L{m},{} L{},{}\" stroke=\"black\" fill=\"none\"/>",
            h - m,
            w - m,
            h - m
        );
        let (lo, hi) = self.log_t_range;
        for decade in (lo.ceil() as i32)..=(hi.floor() as i32) {
            let ms = 10f64.powi(decade);
            let x = self.map_x(ms);
            let _ = writeln!(
                s,
                "<line x1=\"{x:.3}\" y1=\"{}\" x2=\"{x:.3}\" y2=\"{}\" stroke=\"black\"/><text x=\"{x:.3}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                h - m,
                h - m + 5.0,
                h - m + 18.0,
                format_ms(ms)
            );
        }
        let (clo, chi) = self.cost_range;
        for k in 0..=4 {
            let c = clo + (chi - clo) * k as f64 / 4.0;
            let y = self.map_y(c);
            let _ = writeln!(
                s,
                "<line x1=\"{}\" y1=\"{y:.3}\" x2=\"{m}\" y2=\"{y:.3}\" stroke=\"black\"/><text x=\"{}\" y=\"{:.3}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>",
                m - 5.0,
                m - 8.0,
                y + 4.0,
                c
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">elapsed time (ms, log scale)</text>",
            w / 2.0,
            h - 15.0
        );
        let _ = writeln!(
            s,
            "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 {})\">best cost</text>",
            h / 2.0,
            h / 2.0
        );

        if self.trials.is_empty() {
            let _ = writeln!(
                s,
                "<text class=\"no-solution\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">no trial found a solution</text>",
                w / 2.0,
                h / 2.0
            );
        }
        for t in &self.trials {
            s.push_str(&self.polyline(t, "trial", "stroke=\"steelblue\" stroke-opacity=\"0.35\""));
        }
        if !self.median.is_empty() {
            s.push_str(&self.polyline(
                &self.median,
                "median",
                "stroke=\"crimson\" stroke-width=\"2.5\"",
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn format_ms(ms: f64) -> String {
    if ms >= 1.0 {
        format!("{ms:.0}")
    } else {
        format!("{ms}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Writes a self-contained SVG of best cost versus elapsed time.
pub fn emit_cost_curve(records: &[TrialRecord], title: &str, path: &Path) -> Result<()> {
    write_file(path, &CostCurvePlot::build(records).to_svg(title))
}

/// Vertices of every `<polyline class="...">` with the given class.
pub fn parse_polylines(svg: &str, class: &str) -> Vec<Vec<(f64, f64)>> {
    let marker = format!("<polyline class=\"{class}\"");
    svg.lines()
        .filter(|l| l.starts_with(&marker))
        .filter_map(|l| {
            let start = l.find("points=\"")? + 8;
            let end = start + l[start..].find('"')?;
            Some(
                l[start..end]
                    .split_whitespace()
                    .filter_map(|p| {
                        let (x, y) = p.split_once(',')?;
                        Some((x.parse().ok()?, y.parse().ok()?))
                    })
                    .collect(),
            )
        })
        .collect()
}
