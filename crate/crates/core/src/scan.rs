//! Potential-curve scans: config loading, the input × method × optimizer
//! matrix, and report files (CSV, JSON, summary, gnuplot table).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adapt::{run_adapt, run_vqe, AdaptConfig, Method, RunOutcome};
use crate::error::{Error, Result};
use crate::hamiltonian::{read_fcidump, MolecularHamiltonian};
use crate::optimize::OptimizerKind;
use crate::oracle::{infidelity_vs_fci, solve_fci, FciSolution};

/// Allowed dip of a variational energy below the exact one (round-off only).
pub const VARIATIONAL_SLACK: f64 = 1e-9;

pub const CSV_HEADER: [&str; 11] = [
    "label",
    "method",
    "optimizer",
    "energy",
    "abs_error_vs_fci",
    "infidelity",
    "n_operators",
    "gate_count",
    "depth",
    "measurement_total",
    "converged",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInput {
    pub label: String,
    pub fcidump: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub output: PathBuf,
    pub methods: Vec<Method>,
    #[serde(default = "all_optimizers")]
    pub optimizers: Vec<OptimizerKind>,
    #[serde(default)]
    pub adapt: AdaptConfig,
    pub inputs: Vec<ScanInput>,
}

fn all_optimizers() -> Vec<OptimizerKind> {
    vec![OptimizerKind::NelderMead, OptimizerKind::Lbfgs]
}

impl ScanConfig {
    /// Parses TOML; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ScanConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        if cfg.output.is_relative() {
            cfg.output = base_dir.join(&cfg.output);
        }
        for input in &mut cfg.inputs {
            if input.fcidump.is_relative() {
                input.fcidump = base_dir.join(&input.fcidump);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no inputs".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods".into()));
        }
        let mut seen = BTreeSet::new();
        for i in &self.inputs {
            if !seen.insert(i.label.as_str()) {
                return Err(Error::Config(format!("duplicate label '{}'", i.label)));
            }
        }
        if self.methods.iter().any(|m| *m != Method::Fci) && self.optimizers.is_empty() {
            return Err(Error::Config("vqe/adapt requested without optimizers".into()));
        }
        self.adapt.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub label: String,
    pub method: String,
    pub optimizer: String,
    pub energy: f64,
    pub abs_error_vs_fci: f64,
    pub infidelity: f64,
    pub n_operators: usize,
    pub gate_count: usize,
    pub depth: usize,
    pub measurement_total: u64,
    pub converged: bool,
}

/// Rounds to the 9 decimals the reports carry.
pub fn quantize_energy(e: f64) -> f64 {
    format!("{e:.9}").parse().unwrap()
}

impl ScanRow {
    fn csv_record(&self) -> [String; 11] {
        [
            self.label.clone(),
            self.method.clone(),
            self.optimizer.clone(),
            format!("{:.9}", self.energy),
            format!("{:e}", self.abs_error_vs_fci),
            format!("{:e}", self.infidelity),
            self.n_operators.to_string(),
            self.gate_count.to_string(),
            self.depth.to_string(),
            self.measurement_total.to_string(),
            self.converged.to_string(),
        ]
    }

    fn fci(label: &str, sol: &FciSolution) -> Self {
        Self {
            label: label.to_string(),
            method: Method::Fci.as_str().into(),
            optimizer: "none".into(),
            energy: quantize_energy(sol.energy),
            abs_error_vs_fci: 0.0,
            infidelity: 0.0,
            n_operators: 0,
            gate_count: 0,
            depth: 0,
            measurement_total: 0,
            converged: true,
        }
    }

    /// Row for a variational run, after checking it does not undercut the
    /// exact energy.
    pub fn from_outcome(label: &str, out: &RunOutcome, sol: &FciSolution) -> Result<Self> {
        if out.energy < sol.energy - VARIATIONAL_SLACK {
            return Err(Error::Invariant(format!(
                "{label} {} {}: energy {:.12} below exact {:.12}",
                out.method.as_str(),
                out.optimizer,
                out.energy,
                sol.energy
            )));
        }
        let fid = infidelity_vs_fci(&out.state, sol)?;
        Ok(Self {
            label: label.to_string(),
            method: out.method.as_str().into(),
            optimizer: out.optimizer.as_str().into(),
            energy: quantize_energy(out.energy),
            abs_error_vs_fci: (out.energy - sol.energy).abs(),
            infidelity: fid.infidelity,
            n_operators: out.ansatz.len(),
            gate_count: out.resources.gate_count,
            depth: out.resources.depth,
            measurement_total: out.ledger.total(),
            converged: out.converged,
        })
    }
}

/// Runs one method on one Hamiltonian.
pub fn run_method(ham: &MolecularHamiltonian, method: Method, cfg: &AdaptConfig) -> Result<RunOutcome> {
    match method {
        Method::Vqe => run_vqe(ham, cfg),
        Method::Adapt => run_adapt(ham, cfg),
        Method::Fci => Err(Error::contract("fci is not a variational driver")),
    }
}

fn unique<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    for &i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Every input is parsed before anything is computed.
pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let hams = cfg
        .inputs
        .iter()
        .map(|i| read_fcidump(&i.fcidump).map(|h| (i.label.as_str(), h)))
        .collect::<Result<Vec<_>>>()?;
    let methods = unique(&cfg.methods);
    let optimizers = unique(&cfg.optimizers);
    let mut rows = Vec::new();
    for (label, ham) in &hams {
        let sol = solve_fci(ham)?;
        for &method in &methods {
            if method == Method::Fci {
                rows.push(ScanRow::fci(label, &sol));
                continue;
            }
            for &opt in &optimizers {
                let out = run_method(ham, method, &cfg.adapt.clone().with_optimizer(opt))?;
                rows.push(ScanRow::from_outcome(label, &out, &sol)?);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ScanRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_json(rows: &[ScanRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn labels_in_order(rows: &[ScanRow]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for r in rows {
        if !out.contains(&r.label.as_str()) {
            out.push(&r.label);
        }
    }
    out
}

fn find<'a>(rows: &'a [ScanRow], label: &str, method: &str, optimizer: &str) -> Option<&'a ScanRow> {
    rows.iter()
        .find(|r| r.label == label && r.method == method && r.optimizer == optimizer)
}

pub fn summary_text(rows: &[ScanRow]) -> String {
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "# gradient-free optimizer: nelder_mead (stands in for COBYLA)").unwrap();
    writeln!(w, "# gradient norm: L2 over the full pool; finite-difference step 1e-5 unless configured").unwrap();
    writeln!(w, "# measurement unit: one non-identity Pauli term per expectation evaluation").unwrap();
    writeln!(w, "# degenerate ground states: infidelity is the minimum over the degenerate basis").unwrap();
    writeln!(w).unwrap();

    writeln!(w, "medians").unwrap();
    writeln!(w, "{:<8} {:<12} {:>14} {:>14} {:>6}", "method", "optimizer", "abs_error", "infidelity", "n").unwrap();
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if r.method != "fci" && !groups.contains(&(r.method.as_str(), r.optimizer.as_str())) {
            groups.push((&r.method, &r.optimizer));
        }
    }
    for &(m, o) in &groups {
        let sel: Vec<&ScanRow> = rows.iter().filter(|r| r.method == m && r.optimizer == o).collect();
        let err = median(sel.iter().map(|r| r.abs_error_vs_fci).collect());
        let inf = median(sel.iter().map(|r| r.infidelity).collect());
        writeln!(w, "{m:<8} {o:<12} {err:>14.3e} {inf:>14.3e} {:>6}", sel.len()).unwrap();
    }

    let labels = labels_in_order(rows);
    for method in ["vqe", "adapt"] {
        let pairs: Vec<(&str, &ScanRow, &ScanRow)> = labels
            .iter()
            .filter_map(|&l| Some((l, find(rows, l, method, "nelder_mead")?, find(rows, l, method, "lbfgs")?)))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        writeln!(w).unwrap();
        writeln!(w, "{method}: E(nelder_mead) - E(lbfgs) per label").unwrap();
        writeln!(w, "{:<10} {:>16} {:>12} {:>12}", "label", "dE", "meas_nm", "meas_lbfgs").unwrap();
        let mut at_or_below = 0;
        let mut cheaper = 0;
        for (l, nm, lb) in &pairs {
            let d = nm.energy - lb.energy;
            if d >= -VARIATIONAL_SLACK {
                at_or_below += 1;
            }
            if lb.measurement_total < nm.measurement_total {
                cheaper += 1;
            }
            writeln!(w, "{l:<10} {d:>16.9} {:>12} {:>12}", nm.measurement_total, lb.measurement_total).unwrap();
        }
        writeln!(
            w,
            "lbfgs at or below nelder_mead: {at_or_below}/{n}; lbfgs cheaper: {cheaper}/{n}",
            n = pairs.len()
        )
        .unwrap();
    }
    s
}

/// Whitespace table for gnuplot: one line per label, one energy column per
/// (method, optimizer) pair, `NaN` where a run is missing.
pub fn curves_table(rows: &[ScanRow]) -> String {
    let mut cols: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if !cols.contains(&(r.method.as_str(), r.optimizer.as_str())) {
            cols.push((&r.method, &r.optimizer));
        }
    }
    let mut s = String::from("# label");
    for (m, o) in &cols {
        if *o == "none" {
            write!(s, " {m}").unwrap();
        } else {
            write!(s, " {m}_{o}").unwrap();
        }
    }
    s.push('\n');
    for l in labels_in_order(rows) {
        s.push_str(l);
        for (m, o) in &cols {
            match find(rows, l, m, o) {
                Some(r) => write!(s, " {:.9}", r.energy).unwrap(),
                None => s.push_str(" NaN"),
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `scan.csv`, `scan.json`, `summary.txt` and `curves.dat`. All files
/// are staged under temporary names first so a failure leaves no partial report.
pub fn emit_report(rows: &[ScanRow], out: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::contract("no rows to report"));
    }
    fs::create_dir_all(out)?;
    let files = [
        ("scan.csv", write_csv(rows)?),
        ("scan.json", write_json(rows)?),
        ("summary.txt", summary_text(rows)),
        ("curves.dat", curves_table(rows)),
    ];
    let mut staged = Vec::new();
    for (name, body) in &files {
        let tmp = out.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, body) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, out.join(name)));
    }
    for (tmp, dst) in &staged {
        fs::rename(tmp, dst)?;
    }
    Ok(staged.into_iter().map(|(_, d)| d).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(label: &str, method: &str, opt: &str, e: f64) -> ScanRow {
        ScanRow {
            label: label.into(),
            method: method.into(),
            optimizer: opt.into(),
            energy: quantize_energy(e),
            abs_error_vs_fci: 1.234e-8,
            infidelity: 3.0e-12,
            n_operators: 2,
            gate_count: 40,
            depth: 30,
            measurement_total: 1234,
            converged: true,
        }
    }

    #[test]
    fn one_row_csv_has_two_lines() {
        let csv = write_csv(&[row("0.74", "vqe", "lbfgs", -1.137)]).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(
            csv.lines().next().unwrap(),
            "label,method,optimizer,energy,abs_error_vs_fci,infidelity,n_operators,gate_count,depth,measurement_total,converged"
        );
        assert!(csv.contains("-1.137000000"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            row("0.74", "fci", "none", -1.1372838344885),
            row("0.74", "vqe", "lbfgs", -1.13728383),
            row("1.5", "adapt", "nelder_mead", -0.99814),
        ];
        let back = read_csv(&write_csv(&rows).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![row("a", "vqe", "lbfgs", -2.5)];
        let back: Vec<ScanRow> = serde_json::from_str(&write_json(&rows).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn config_validation() {
        let base = Path::new("/tmp");
        let ok = r#"
            output = "out"
            methods = ["fci", "adapt"]
            optimizers = ["lbfgs"]
            [adapt]
            grad_norm_threshold = 0.01
            [[inputs]]
            label = "0.74"
            fcidump = "h2.fcidump"
        "#;
        let cfg = ScanConfig::from_toml(ok, base).unwrap();
        assert_eq!(cfg.inputs[0].fcidump, Path::new("/tmp/h2.fcidump"));
        assert_eq!(cfg.output, Path::new("/tmp/out"));

        let dup = r#"
            output = "out"
            methods = ["fci"]
            [[inputs]]
            label = "a"
            fcidump = "x"
            [[inputs]]
            label = "a"
            fcidump = "y"
        "#;
        assert!(matches!(ScanConfig::from_toml(dup, base), Err(Error::Config(_))));
        let empty = "output = \"o\"\nmethods = []\ninputs = []\n";
        assert!(ScanConfig::from_toml(empty, base).is_err());
        let unknown = "output = \"o\"\nmethods = [\"dmrg\"]\ninputs = []\n";
        assert!(ScanConfig::from_toml(unknown, base).is_err());
    }

    #[test]
    fn fail_fast_on_missing_input() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ScanConfig {
            output: dir.path().join("out"),
            methods: vec![Method::Fci],
            optimizers: vec![],
            adapt: AdaptConfig::default(),
            inputs: vec![ScanInput {
                label: "x".into(),
                fcidump: dir.path().join("missing.fcidump"),
            }],
        };
        assert!(run_scan(&cfg).unwrap_err().is_input_error());
        assert!(!dir.path().join("out").exists());
    }

    #[test]
    fn summary_reports_optimizer_difference() {
        let rows = vec![
            row("1", "vqe", "nelder_mead", -1.0000005),
            row("1", "vqe", "lbfgs", -1.0000010),
        ];
        let s = summary_text(&rows);
        assert!(s.contains("0.000000500"), "{s}");
        assert!(s.contains("lbfgs at or below nelder_mead: 1/1"));
    }

    #[test]
    fn curves_layout() {
        let rows = vec![
            row("1", "fci", "none", -1.0),
            row("1", "vqe", "lbfgs", -0.9),
            row("2", "fci", "none", -0.8),
        ];
        assert_eq!(
            curves_table(&rows),
            "# label fci vqe_lbfgs\n1 -1.000000000 -0.900000000\n2 -0.800000000 NaN\n"
        );
    }

    #[test]
    fn report_files_written() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&[row("a", "fci", "none", -1.0)], dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        for f in files {
            assert!(f.exists());
        }
        assert!(fs::read_dir(dir.path())
            .unwrap()
            .all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
    }
}
