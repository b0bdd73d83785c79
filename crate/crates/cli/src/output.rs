//! Deterministic artifact writers: CSV (17 significant digits, LF line
//! endings), polyline SVG plots, and a manifest JSON with SHA-256
//! checksums of every produced file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Formats a value with 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Enabled artifact kinds.
#[derive(Clone, Copy, Debug)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub json: bool,
}

impl Formats {
    pub fn all() -> Self {
        Self {
            csv: true,
            svg: true,
            json: true,
        }
    }

    pub fn from_names(names: &[String]) -> Result<Self, CliError> {
        let mut f = Self {
            csv: false,
            svg: false,
            json: false,
        };
        for name in names {
            match name.as_str() {
                "csv" => f.csv = true,
                "svg" => f.svg = true,
                "json" => f.json = true,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown format `{other}` (expected csv, svg, json)"
                    )))
                }
            }
        }
        if !(f.csv || f.svg || f.json) {
            return Err(CliError::Config("format list is empty".into()));
        }
        Ok(f)
    }
}

pub struct OutputSet {
    dir: PathBuf,
    formats: Formats,
    files: Vec<(String, String)>, // (name, sha256)
}

impl OutputSet {
    pub fn new(dir: &Path, formats: Formats) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|e| CliError::Io(path.clone(), e))?;
        f.write_all(bytes)
            .map_err(|e| CliError::Io(path.clone(), e))?;
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.files.push((name.to_string(), hex));
        Ok(())
    }

    /// CSV with a header row; every numeric cell carries 17 significant
    /// digits, rows end with a bare LF.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        if !self.formats.csv {
            return Ok(());
        }
        let mut out = String::new();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        self.write_bytes(name, out.as_bytes())
    }

    pub fn svg(&mut self, name: &str, svg: &Svg) -> Result<(), CliError> {
        if !self.formats.svg {
            return Ok(());
        }
        self.write_bytes(name, svg.render().as_bytes())
    }

    /// Writes `manifest.json` listing inputs, grid sizes, and checksums.
    pub fn manifest<T: Serialize>(self, command: &str, inputs: &T) -> Result<(), CliError> {
        if !self.formats.json {
            return Ok(());
        }
        #[derive(Serialize)]
        struct Entry {
            path: String,
            sha256: String,
        }
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            command: &'a str,
            inputs: &'a T,
            outputs: Vec<Entry>,
        }
        let manifest = Manifest {
            command,
            inputs,
            outputs: self
                .files
                .iter()
                .map(|(path, sha256)| Entry {
                    path: path.clone(),
                    sha256: sha256.clone(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Config(format!("manifest serialization: {e}")))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
        Ok(())
    }
}

/// One polyline series of an [`Svg`] panel.
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Multi-panel polyline plot laid out on a grid; no external renderer.
pub struct Svg {
    pub columns: usize,
    pub panels: Vec<Panel>,
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_B: f64 = 46.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_R: f64 = 16.0;

impl Svg {
    pub fn render(&self) -> String {
        let cols = self.columns.max(1);
        let rows = self.panels.len().div_ceil(cols);
        let width = PANEL_W * cols as f64;
        let height = PANEL_H * rows as f64;
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
             viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
             <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
        ));
        for (i, panel) in self.panels.iter().enumerate() {
            let ox = PANEL_W * (i % cols) as f64;
            let oy = PANEL_H * (i / cols) as f64;
            out.push_str(&format!("<g transform=\"translate({ox},{oy})\">\n"));
            render_panel(&mut out, panel);
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

fn render_panel(out: &mut String, panel: &Panel) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for s in &panel.series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        let pad = y0.abs().max(1.0) * 0.1;
        y0 -= pad;
        y1 += pad;
    } else {
        let pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }
    let sx = move |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = move |y: f64| MARGIN_T + plot_h - (y - y0) / (y1 - y0) * plot_h;

    // frame and title
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{:.1}\" y=\"18\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        xml_escape(&panel.title)
    ));
    // ticks: 5 per axis
    for t in 0..=4 {
        let fx = x0 + (x1 - x0) * t as f64 / 4.0;
        let fy = y0 + (y1 - y0) * t as f64 / 4.0;
        let px = sx(fx);
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0,
            MARGIN_T + plot_h + 18.0,
            tick_label(fx)
        ));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{MARGIN_L}\" y2=\"{py:.1}\" stroke=\"black\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0,
            tick_label(fy)
        ));
    }
    // axis labels
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        PANEL_H - 8.0,
        xml_escape(&panel.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        xml_escape(&panel.y_label)
    ));
    // series
    for s in &panel.series {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.4\"/>\n",
            pts.join(" "),
            s.color
        ));
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{v:.1e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
