//! Table and plot emission: RFC-4180 CSV, JSON lines, a metadata document
//! with the exact configuration and per-file checksums, and best-effort
//! static SVG decorations. The CSV is the contract; rerunning the same
//! configuration reproduces it byte for byte.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::sweep::{Format, Mode, ResultRecord, SweepConfig, SweepTable};
use crate::Result;

/// CSV column order; fixed, matching the record schema.
pub const CSV_COLUMNS: [&str; 18] = [
    "omega",
    "delta",
    "g",
    "epsilon",
    "xi",
    "state_index",
    "energy_over_omega",
    "parity",
    "converged",
    "s_x",
    "s_y",
    "s_z",
    "entropy",
    "mana",
    "dai_fu_luo",
    "mana_bos",
    "mean_boson_number",
    "n_max",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write the result table as CSV: header row, '.' decimal separator, full
/// double precision via shortest round-trip formatting, empty cells for the
/// null resource fields of unconverged states.
pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record(&[
            r.omega.to_string(),
            r.delta.to_string(),
            r.g.to_string(),
            r.epsilon.to_string(),
            r.xi.to_string(),
            r.state_index.to_string(),
            r.energy_over_omega.to_string(),
            r.parity.map(|p| p.to_string()).unwrap_or_default(),
            r.converged.to_string(),
            fmt_opt(r.s_x),
            fmt_opt(r.s_y),
            fmt_opt(r.s_z),
            fmt_opt(r.entropy),
            fmt_opt(r.mana),
            fmt_opt(r.dai_fu_luo),
            fmt_opt(r.mana_bos),
            fmt_opt(r.mean_boson_number),
            r.n_max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

impl From<csv::Error> for crate::Error {
    fn from(e: csv::Error) -> Self {
        crate::Error::Io(std::io::Error::other(e))
    }
}

/// Write the table as JSON lines, one record per line, nulls for missing
/// resource fields.
pub fn write_jsonl<W: Write>(records: &[ResultRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    generated_unix_s: u64,
    config: &'a SweepConfig,
    points_failed: usize,
    records: usize,
    checksums_sha256: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Everything `emit_outputs` wrote, keyed for the metadata checksums.
#[derive(Debug, Default)]
pub struct EmittedFiles {
    pub paths: Vec<PathBuf>,
}

/// Emit the configured outputs into `dir`: results.csv / results.jsonl per
/// the format list, plots when requested, run_log.txt when there is anything
/// to log, and run_metadata.json (always, written last so it can carry the
/// checksums of the data files).
pub fn emit_outputs(
    table: &SweepTable,
    config: &SweepConfig,
    dir: &Path,
    formats: &[Format],
    plots: bool,
) -> Result<EmittedFiles> {
    std::fs::create_dir_all(dir)?;
    let mut emitted = EmittedFiles::default();
    let mut checksums = BTreeMap::new();

    if formats.contains(&Format::Csv) {
        let mut buf = Vec::new();
        write_csv(&table.records, &mut buf)?;
        let path = dir.join("results.csv");
        std::fs::write(&path, &buf)?;
        checksums.insert("results.csv".to_string(), sha256_hex(&buf));
        emitted.paths.push(path);
    }
    if formats.contains(&Format::Json) {
        let mut buf = Vec::new();
        write_jsonl(&table.records, &mut buf)?;
        let path = dir.join("results.jsonl");
        std::fs::write(&path, &buf)?;
        checksums.insert("results.jsonl".to_string(), sha256_hex(&buf));
        emitted.paths.push(path);
    }
    if plots {
        for (name, svg) in render_plots(table, config) {
            let path = dir.join(name);
            std::fs::write(&path, svg.as_bytes())?;
            emitted.paths.push(path);
        }
    }
    if !table.failures.is_empty() || !table.warnings.is_empty() {
        let mut buf = String::new();
        for f in &table.failures {
            let axes: Vec<String> = f
                .axis_values
                .iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            buf.push_str(&format!(
                "FAIL point {} ({}): {}\n",
                f.point_index,
                axes.join(", "),
                f.message
            ));
        }
        for w in &table.warnings {
            buf.push_str(&format!("WARN {w}\n"));
        }
        let path = dir.join("run_log.txt");
        std::fs::write(&path, buf.as_bytes())?;
        emitted.paths.push(path);
    }

    let meta = RunMetadata {
        tool: "aqrm",
        version: env!("CARGO_PKG_VERSION"),
        generated_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config,
        points_failed: table.failures.len(),
        records: table.records.len(),
        checksums_sha256: checksums,
    };
    let path = dir.join("run_metadata.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&meta)?)?;
    emitted.paths.push(path);
    Ok(emitted)
}

// ---------------------------------------------------------------------------
// SVG decoration (best effort; the CSV above is the contract)

const PLOT_W: f64 = 800.0;
const PLOT_H: f64 = 600.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN + (v - self.x_min) / span * (PLOT_W - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        PLOT_H - MARGIN - (v - self.y_min) / span * (PLOT_H - 2.0 * MARGIN)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" ",
            "text-anchor=\"middle\">{title}</text>\n"
        ),
        w = PLOT_W,
        h = PLOT_H,
        tx = PLOT_W / 2.0,
        title = title,
    )
}

fn svg_axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let x0 = MARGIN;
    let x1 = PLOT_W - MARGIN;
    let y0 = PLOT_H - MARGIN;
    let y1 = MARGIN;
    format!(
        concat!(
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n",
            "<text x=\"{xm}\" y=\"{yb}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{xl}</text>\n",
            "<text x=\"16\" y=\"{ym}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {ym})\">{yl}</text>\n",
            "<text x=\"{x0}\" y=\"{yb2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{xmin:.3}</text>\n",
            "<text x=\"{x1}\" y=\"{yb2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{xmax:.3}</text>\n",
            "<text x=\"{xt}\" y=\"{y0}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{ymin:.3}</text>\n",
            "<text x=\"{xt}\" y=\"{y1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{ymax:.3}</text>\n",
        ),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        xm = (x0 + x1) / 2.0,
        ym = (y0 + y1) / 2.0,
        yb = PLOT_H - 20.0,
        yb2 = PLOT_H - 40.0,
        xt = x0 - 6.0,
        xl = x_label,
        yl = y_label,
        xmin = frame.x_min,
        xmax = frame.x_max,
        ymin = frame.y_min,
        ymax = frame.y_max,
    )
}

fn color_for(t: f64) -> String {
    // white → indigo ramp
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * (1.0 - 0.75 * t)) as u8;
    let g = (255.0 * (1.0 - 0.90 * t)) as u8;
    let b = (255.0 * (1.0 - 0.45 * t)) as u8;
    format!("rgb({r},{g},{b})")
}

fn finite_range<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn scan_axis_name(config: &SweepConfig) -> String {
    config
        .axes
        .first()
        .map(|a| format!("{:?}", a.name).to_lowercase())
        .unwrap_or_else(|| "axis".into())
}

/// Spectrum line plot: E/ω against the swept axis, one polyline per state.
fn render_spectrum(table: &SweepTable, config: &SweepConfig) -> String {
    let axis = scan_axis_name(config);
    let xs: Vec<f64> = table
        .records
        .iter()
        .map(|r| axis_value(r, &config.axes[0].name))
        .collect();
    let ys: Vec<f64> = table.records.iter().map(|r| r.energy_over_omega).collect();
    let (x_min, x_max) = finite_range(xs.iter());
    let (y_min, y_max) = finite_range(ys.iter());
    let frame = Frame {
        x_min,
        x_max,
        y_min,
        y_max,
    };
    let mut svg = svg_open("spectrum");
    svg.push_str(&svg_axes(&frame, &axis, "E/omega"));
    let mut by_state: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &table.records {
        by_state
            .entry(r.state_index)
            .or_default()
            .push((axis_value(r, &config.axes[0].name), r.energy_over_omega));
    }
    for (k, pts) in by_state {
        let path: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
            .collect();
        let color = match k % 3 {
            0 => "steelblue",
            1 => "firebrick",
            _ => "seagreen",
        };
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
            path.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Bloch-disc scatter of the reduced states in the x–z plane, with the unit
/// circle and the stabilizer square |s_x| + |s_z| = 1.
fn render_bloch_disc(table: &SweepTable) -> String {
    let frame = Frame {
        x_min: -1.1,
        x_max: 1.1,
        y_min: -1.1,
        y_max: 1.1,
    };
    let mut svg = svg_open("reduced states in the x-z plane");
    svg.push_str(&svg_axes(&frame, "s_x", "s_z"));
    let cx = frame.x(0.0);
    let cy = frame.y(0.0);
    let r = frame.x(1.0) - frame.x(0.0);
    svg.push_str(&format!(
        "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"none\" stroke=\"gray\"/>\n"
    ));
    let diamond: Vec<String> = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        .iter()
        .map(|(x, z)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*z)))
        .collect();
    svg.push_str(&format!(
        "<polygon points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
        diamond.join(" ")
    ));
    for r in &table.records {
        if let (Some(sx), Some(sz)) = (r.s_x, r.s_z) {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.55\"/>\n",
                frame.x(sx),
                frame.y(sz)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn axis_value(r: &ResultRecord, name: &crate::sweep::AxisName) -> f64 {
    use crate::sweep::AxisName::*;
    match name {
        G => r.g,
        Epsilon => r.epsilon,
        Delta => r.omega - 2.0 * r.delta,
        Xi => r.xi,
    }
}

/// Heatmap of one resource column over the two swept axes for one state.
fn render_heatmap(
    table: &SweepTable,
    config: &SweepConfig,
    state: usize,
    column: impl Fn(&ResultRecord) -> Option<f64>,
    title: &str,
) -> Option<String> {
    let (a0, a1) = (&config.axes[0], &config.axes[1]);
    let recs: Vec<&ResultRecord> = table
        .records
        .iter()
        .filter(|r| r.state_index == state)
        .collect();
    if recs.is_empty() {
        return None;
    }
    let vals: Vec<f64> = recs.iter().filter_map(|r| column(r)).collect();
    let (lo, hi) = finite_range(vals.iter());
    let frame = Frame {
        x_min: a0.min,
        x_max: a0.max,
        y_min: a1.min,
        y_max: a1.max,
    };
    let mut svg = svg_open(title);
    svg.push_str(&svg_axes(
        &frame,
        &format!("{:?}", a0.name).to_lowercase(),
        &format!("{:?}", a1.name).to_lowercase(),
    ));
    let cw = (PLOT_W - 2.0 * MARGIN) / a0.count as f64;
    let ch = (PLOT_H - 2.0 * MARGIN) / a1.count as f64;
    let v0 = a0.values();
    let v1 = a1.values();
    for (i, rec) in recs.iter().enumerate() {
        let (gi, gj) = (i / v1.len(), i % v1.len());
        if gi >= v0.len() {
            break;
        }
        let t = column(rec)
            .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 })
            .unwrap_or(f64::NAN);
        let fill = if t.is_nan() {
            "lightgray".to_string()
        } else {
            color_for(t)
        };
        let x = MARGIN + gi as f64 * cw;
        let y = PLOT_H - MARGIN - (gj + 1) as f64 * ch;
        svg.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{fill}\"/>\n"
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">scale {lo:.4} .. {hi:.4}</text>\n",
        PLOT_W / 2.0
    ));
    svg.push_str("</svg>\n");
    Some(svg)
}

fn render_plots(table: &SweepTable, config: &SweepConfig) -> Vec<(String, String)> {
    let mut plots = Vec::new();
    match config.mode {
        Mode::SpectrumScan => {
            plots.push(("spectrum.svg".to_string(), render_spectrum(table, config)));
            plots.push(("bloch_disc.svg".to_string(), render_bloch_disc(table)));
        }
        Mode::ParameterMap => {
            let states: Vec<usize> = {
                let mut s: Vec<usize> = table.records.iter().map(|r| r.state_index).collect();
                s.sort_unstable();
                s.dedup();
                s
            };
            for k in states {
                if let Some(svg) = render_heatmap(
                    table,
                    config,
                    k,
                    |r| r.mana,
                    &format!("qubit mana, state {k}"),
                ) {
                    plots.push((format!("heatmap_mana_state{k}.svg"), svg));
                }
                if let Some(svg) = render_heatmap(
                    table,
                    config,
                    k,
                    |r| r.mana_bos,
                    &format!("bosonic mana, state {k}"),
                ) {
                    plots.push((format!("heatmap_mana_bos_state{k}.svg"), svg));
                }
            }
        }
    }
    plots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_spectrum_scan, SweepConfig};

    fn small_config() -> SweepConfig {
        SweepConfig::from_json_str(
            r#"{"mode": "spectrum-scan",
                "axes": [{"name": "g", "min": 0.0, "max": 0.2, "count": 2}],
                "states": {"lowest": 2},
                "n_max": {"fixed": 25}}"#,
        )
        .unwrap()
    }

    #[test]
    fn csv_schema_and_precision() {
        let cfg = small_config();
        let table = run_spectrum_scan(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&table.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), CSV_COLUMNS.len());
        // full round-trip precision on a resource field
        let mana_col = CSV_COLUMNS.iter().position(|c| *c == "mana").unwrap();
        let parsed: f64 = first[mana_col].parse().unwrap();
        assert_eq!(parsed, table.records[0].mana.unwrap());
    }

    #[test]
    fn jsonl_has_one_record_per_line_with_nulls() {
        let cfg = small_config();
        let table = run_spectrum_scan(&cfg).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&table.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), table.records.len());
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert!(v.get("energy_over_omega").unwrap().is_f64());
        assert!(v.get("parity").is_some());
    }

    #[test]
    fn emit_outputs_writes_deterministic_files() {
        let cfg = small_config();
        let table = run_spectrum_scan(&cfg).unwrap();
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let formats = [Format::Csv, Format::Json];
        emit_outputs(&table, &cfg, dir1.path(), &formats, true).unwrap();
        emit_outputs(&table, &cfg, dir2.path(), &formats, true).unwrap();
        for name in [
            "results.csv",
            "results.jsonl",
            "spectrum.svg",
            "bloch_disc.svg",
        ] {
            let a = std::fs::read(dir1.path().join(name)).unwrap();
            let b = std::fs::read(dir2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
        // metadata matches after dropping the timestamp
        let strip = |p: &Path| {
            let v: serde_json::Value =
                serde_json::from_slice(&std::fs::read(p.join("run_metadata.json")).unwrap())
                    .unwrap();
            let mut v = v;
            v.as_object_mut().unwrap().remove("generated_unix_s");
            v
        };
        assert_eq!(strip(dir1.path()), strip(dir2.path()));
        // checksums recorded for both data files
        let meta = strip(dir1.path());
        let sums = meta.get("checksums_sha256").unwrap().as_object().unwrap();
        assert_eq!(sums.len(), 2);
        assert_eq!(sums.get("results.csv").unwrap().as_str().unwrap().len(), 64);
    }

    #[test]
    fn heatmaps_follow_axes() {
        let cfg = SweepConfig::from_json_str(
            r#"{"mode": "parameter-map",
                "axes": [{"name": "epsilon", "min": -0.4, "max": 0.4, "count": 3},
                          {"name": "g", "min": 0.1, "max": 0.3, "count": 2}],
                "n_max": {"fixed": 25}}"#,
        )
        .unwrap();
        let table = crate::sweep::run_parameter_map(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let emitted = emit_outputs(&table, &cfg, dir.path(), &[Format::Csv], true).unwrap();
        let names: Vec<String> = emitted
            .paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
            .collect();
        assert!(names.contains(&"heatmap_mana_state0.svg".to_string()));
        assert!(names.contains(&"heatmap_mana_bos_state1.svg".to_string()));
        let svg = std::fs::read_to_string(dir.path().join("heatmap_mana_state0.svg")).unwrap();
        assert!(svg.contains("epsilon"));
        assert!(svg.contains(">g<") || svg.contains("\">g"));
        // 3 × 2 grid of cells
        assert_eq!(svg.matches("<rect").count() - 1, 6); // minus the background rect
    }
}
