//! Run configuration, command dispatch and file export for the `lle-bif` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::continuation::{locate_secondary, trace_from_primary, Branch, ContinuationConfig, Terminus};
use crate::counterexample::{verify_counterexample, CexParams};
use crate::error::{Error, Result};
use crate::primary::{all_primary_points, compute_kmax, find_primary_points};
use crate::spectral::index_jump_with;
use crate::symmetry::certify;
use crate::trivial::{eval_trivial, turning_points, Params};

/// Environment variable consulted for the output directory when none is given.
pub const OUT_ENV: &str = "LLE_BIF_OUT";
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub d: f64,
    pub f: f64,
    pub q: Option<usize>,
    pub p_div: Option<usize>,
    /// 1 or 2: which primary point of mode `q` a branch starts from.
    pub slot: u8,
    /// Direction of the kernel offset at the start of a branch.
    pub sign: f64,
    pub continuation: ContinuationConfig,
    pub a_cut: f64,
    pub n_max: u32,
    pub samples: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 0.1,
            f: 1.6,
            q: None,
            p_div: None,
            slot: 1,
            sign: 1.0,
            continuation: ContinuationConfig::default(),
            a_cut: 2.5,
            n_max: 10,
            samples: 401,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.d, self.f)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.continuation.validate()?;
        if self.q == Some(0) || self.p_div == Some(0) {
            return Err(Error::Config("q and p must be positive".into()));
        }
        if let (Some(q), Some(pd)) = (self.q, self.p_div) {
            if q % pd != 0 {
                return Err(Error::Config(format!("p = {pd} does not divide q = {q}")));
            }
        }
        if self.slot != 1 && self.slot != 2 {
            return Err(Error::Config(format!("slot must be 1 or 2, got {}", self.slot)));
        }
        if self.samples < 2 {
            return Err(Error::Config("need at least two samples".into()));
        }
        Ok(())
    }

    /// Output directory: explicit setting, then the environment, then `out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    fn require_q(&self) -> Result<usize> {
        self.q.ok_or_else(|| Error::Config("this command needs --q".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Trivial,
    Primary,
    Index,
    Certify,
    Branch,
    Secondary,
    Counterexample,
    Diagram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: Command,
    pub files: Vec<PathBuf>,
}

/// Fixed-width scientific notation with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_row(cells: &[f64]) -> String {
    let mut s = cells.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

fn write_file(dir: &Path, name: &str, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body)?;
    files.push(path);
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T, files: &mut Vec<PathBuf>) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    body.push('\n');
    write_file(dir, name, &body, files)
}

pub fn run(cfg: &RunConfig, command: Command) -> Result<RunSummary> {
    cfg.validate()?;
    let p = cfg.params()?;
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    match command {
        Command::Trivial => write_file(&dir, "trivial.csv", &trivial_csv(&p, cfg.samples)?, &mut files)?,
        Command::Primary => export_primary(&p, &dir, &mut files)?,
        Command::Index => write_json(&dir, "index.json", &index_report(&p, cfg.p_div)?, &mut files)?,
        Command::Certify => {
            let q = cfg.require_q()?;
            let pd = cfg.p_div.ok_or_else(|| Error::Config("certify needs --p".into()))?;
            write_json(&dir, "certificate.json", &certify(q, pd, &p)?, &mut files)?;
        }
        Command::Branch => {
            let branch = run_branch(cfg, &p)?;
            write_file(&dir, "branch.csv", &branch_csv(&branch), &mut files)?;
            write_json(&dir, "branch_summary.json", &BranchSummary::of(&branch), &mut files)?;
        }
        Command::Secondary => {
            let branch = run_branch(cfg, &p)?;
            write_json(&dir, "secondary.json", &secondary_report(&branch)?, &mut files)?;
        }
        Command::Counterexample => {
            let c = CexParams::new(cfg.a_cut)?;
            write_json(&dir, "counterexample.json", &verify_counterexample(cfg.n_max, &c)?, &mut files)?;
        }
        Command::Diagram => write_file(&dir, "diagram.svg", &diagram_svg(cfg, &p)?, &mut files)?,
    }
    Ok(RunSummary { command, files })
}

/// Samples of the trivial curve on `|t| <= 0.999`.
pub fn trivial_csv(p: &Params, samples: usize) -> Result<String> {
    let mut out = String::from("t,re_a,im_a,zeta,zeta_prime\n");
    for i in 0..samples {
        let t = -0.999 + 1.998 * i as f64 / (samples - 1) as f64;
        let tp = eval_trivial(t, p)?;
        out.push_str(&csv_row(&[t, tp.a.re, tp.a.im, tp.zeta, tp.zeta_prime]));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimaryReport {
    pub params: Params,
    pub k_max: usize,
    pub points: Vec<crate::primary::PrimaryBifPoint>,
}

fn export_primary(p: &Params, dir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    let k_max = compute_kmax(p)?;
    let points = all_primary_points(p)?;
    let mut long = String::from("k,slot,t,re_a,im_a,zeta\n");
    for bp in &points {
        long.push_str(&format!("{},{},", bp.k, bp.slot));
        long.push_str(&csv_row(&[bp.t, bp.point.a.re, bp.point.a.im, bp.point.zeta]));
    }
    write_file(dir, "primary.csv", &long, files)?;
    write_file(dir, "primary_table.csv", &primary_table(&points), files)?;
    write_json(dir, "primary.json", &PrimaryReport { params: *p, k_max, points }, files)
}

/// One column per point, one row per quantity.
pub fn primary_table(points: &[crate::primary::PrimaryBifPoint]) -> String {
    let mut out = String::from("quantity");
    for bp in points {
        out.push_str(&format!(",z_{}_{}", bp.k, bp.slot));
    }
    out.push('\n');
    let rows: [(&str, fn(&crate::primary::PrimaryBifPoint) -> f64); 4] = [
        ("t", |b| b.t),
        ("re_a", |b| b.point.a.re),
        ("im_a", |b| b.point.a.im),
        ("zeta", |b| b.point.zeta),
    ];
    for (name, get) in rows {
        out.push_str(name);
        for bp in points {
            out.push(',');
            out.push_str(&fmt_num(get(bp)));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub label: String,
    pub k: usize,
    pub slot: u8,
    pub p_div: usize,
    pub delta_star: i32,
}

/// `delta*` at every primary point for every `p_div` dividing its mode, or only the given one.
pub fn index_report(p: &Params, only: Option<usize>) -> Result<Vec<IndexEntry>> {
    let points = all_primary_points(p)?;
    let folds = turning_points(p);
    let mut out = Vec::new();
    for bp in &points {
        for pd in (1..=bp.k).filter(|pd| bp.k % pd == 0 && only.is_none_or(|o| o == *pd)) {
            let j = index_jump_with(bp, pd, p, &points, &folds)?;
            out.push(IndexEntry { label: bp.label(), k: bp.k, slot: bp.slot, p_div: pd, delta_star: j.delta_star });
        }
    }
    Ok(out)
}

fn run_branch(cfg: &RunConfig, p: &Params) -> Result<Branch> {
    let q = cfg.require_q()?;
    let ambient = cfg.p_div.unwrap_or(q);
    let pts = find_primary_points(q, p)?;
    let bp = pts
        .iter()
        .find(|b| b.slot == cfg.slot)
        .ok_or(Error::MissingPair { q, found: pts.len() })?;
    trace_from_primary(bp, cfg.sign, ambient, &cfg.continuation, p)
}

/// Per-point stream: arclength, `zeta`, `c_0`, amplitude, ambient count, symmetry residual.
pub fn branch_csv(branch: &Branch) -> String {
    let mut out = String::from("s,zeta,re_c0,im_c0,amplitude,morse_in_ambient,sym_residual\n");
    for pt in &branch.points {
        let c0 = pt.state.coeffs[0];
        let head = [pt.s, pt.state.zeta, c0.re, c0.im, pt.amplitude].map(fmt_num).join(",");
        out.push_str(&format!("{head},{},{}\n", pt.morse_in_ambient, fmt_num(pt.sym_residual)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub origin: Option<String>,
    pub ambient_div: usize,
    pub symmetry_q: usize,
    pub points: usize,
    pub arclength: f64,
    pub terminus: Terminus,
}

impl BranchSummary {
    pub fn of(branch: &Branch) -> Self {
        BranchSummary {
            origin: branch.origin.map(|b| b.label()),
            ambient_div: branch.ambient_div,
            symmetry_q: branch.symmetry_q,
            points: branch.points.len(),
            arclength: branch.points.last().map_or(0.0, |p| p.s),
            terminus: branch.terminus.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryEntry {
    pub s_left: f64,
    pub s_right: f64,
    pub zeta: f64,
    pub amplitude: f64,
    pub morse_left: usize,
    pub morse_right: usize,
    pub sym_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryReport {
    pub branch: BranchSummary,
    pub secondary: Vec<SecondaryEntry>,
}

pub fn secondary_report(branch: &Branch) -> Result<SecondaryReport> {
    let secondary = locate_secondary(branch, branch.ambient_div)?
        .into_iter()
        .map(|b| SecondaryEntry {
            s_left: b.left.s,
            s_right: b.right.s,
            zeta: b.left.state.zeta,
            amplitude: b.left.amplitude,
            morse_left: b.left.morse_in_ambient,
            morse_right: b.right.morse_in_ambient,
            sym_residual: b.left.sym_residual,
        })
        .collect();
    Ok(SecondaryReport { branch: BranchSummary::of(branch), secondary })
}

/// Bifurcation diagram in the `(zeta, amplitude)` plane: the trivial curve, the primary
/// branch from the first point of every mode, and the located secondary points.
///
/// With `--p`, branches whose mode it divides are traced in that ambient space and their
/// secondary points marked.
pub fn diagram_svg(cfg: &RunConfig, p: &Params) -> Result<String> {
    let mut branches = Vec::new();
    let mut marks = Vec::new();
    for k in 1..=compute_kmax(p)? {
        if k > cfg.continuation.modes {
            continue;
        }
        let Some(bp) = find_primary_points(k, p)?.into_iter().next() else { continue };
        let ambient = cfg.p_div.filter(|pd| k % pd == 0).unwrap_or(k);
        let branch = trace_from_primary(&bp, cfg.sign, ambient, &cfg.continuation, p)?;
        if ambient != k {
            for b in locate_secondary(&branch, ambient)? {
                marks.push((b.left.state.zeta, b.left.amplitude));
            }
        }
        branches.push(branch.points.iter().map(|pt| (pt.state.zeta, pt.amplitude)).collect::<Vec<_>>());
    }
    let primaries = all_primary_points(p)?;

    let all = branches.iter().flatten().chain(marks.iter());
    let (mut z_lo, mut z_hi, mut a_hi) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(z, a) in all.chain(primaries.iter().map(|b| (b.point.zeta, 0.0)).collect::<Vec<_>>().iter()) {
        z_lo = z_lo.min(z);
        z_hi = z_hi.max(z);
        a_hi = a_hi.max(a);
    }
    if !z_lo.is_finite() {
        z_lo = 0.0;
        z_hi = 1.0;
    }
    let pad = 0.05 * (z_hi - z_lo).max(1e-3);
    let (z_lo, z_hi) = (z_lo - pad, z_hi + pad);
    let a_hi = if a_hi > 0.0 { 1.05 * a_hi } else { 1.0 };

    let (w, h, m) = (800.0, 500.0, 50.0);
    let sx = |z: f64| m + (z - z_lo) / (z_hi - z_lo) * (w - 2.0 * m);
    let sy = |a: f64| h - m - a / a_hi * (h - 2.0 * m);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2"/>"#,
        sx(z_lo),
        sy(0.0),
        sx(z_hi),
        sy(0.0)
    );
    for pts in &branches {
        let path: Vec<String> = pts.iter().map(|&(z, a)| format!("{:.3},{:.3}", sx(z), sy(a))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="blue" stroke-width="1.5"/>"#, path.join(" "));
    }
    for bp in &primaries {
        let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="black"/>"#, sx(bp.point.zeta), sy(0.0));
    }
    for &(z, a) in &marks {
        let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="5" fill="red"/>"#, sx(z), sy(a));
    }
    let _ = writeln!(svg, r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">zeta</text>"#, w / 2.0, h - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.3}" font-size="14" transform="rotate(-90 15 {:.3})" text-anchor="middle">max|a - c0|</text>"#,
        h / 2.0,
        h / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{m}" y="{:.3}" font-size="11">zeta in [{:.4}, {:.4}], amplitude in [0, {:.4}]</text>"#,
        m - 15.0,
        z_lo,
        z_hi,
        a_hi
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Machine-readable error object printed on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub error: String,
    pub message: String,
}

impl From<&Error> for ErrorObject {
    fn from(e: &Error) -> Self {
        ErrorObject { error: e.kind().to_string(), message: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.61695123456789), "-6.16951234568e-1");
    }

    #[test]
    fn validation() {
        let mut c = RunConfig { q: Some(6), p_div: Some(4), ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.p_div = Some(3);
        assert!(c.validate().is_ok());
        c.continuation.nodes = 10;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = RunConfig { slot: 3, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { d: 0.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn explicit_out_beats_default() {
        let c = RunConfig { out: Some(PathBuf::from("somewhere")), ..Default::default() };
        assert_eq!(c.out_dir(), PathBuf::from("somewhere"));
    }

    #[test]
    fn partial_config_json_uses_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"f": 1.2, "continuation": {"modes": 16}}"#).unwrap();
        assert_eq!(c.f, 1.2);
        assert_eq!(c.d, 0.1);
        assert_eq!(c.continuation.modes, 16);
        assert_eq!(c.continuation.nodes, 128);
    }
}
