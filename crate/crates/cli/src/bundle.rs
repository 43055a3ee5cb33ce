use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use magbound::magnetic2d::{ConsistencyVerdict, SpectralReport};
use magbound::Result;

use crate::config::RunConfig;

/// A CSV table. Every row is written with the producing module and the
/// config hash in front of the numeric columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub module: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: &str, module: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            module: module.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column by name, skipping empty cells.
    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        match self.columns.iter().position(|c| c == name) {
            Some(i) => self.rows.iter().map(|r| r[i]).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub name: String,
    pub module: String,
    pub config_hash: String,
    pub values: BTreeMap<String, f64>,
}

/// A checked statement. `criterion` links it to the numbered acceptance list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contract {
    pub criterion: Option<u8>,
    pub module: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub name: String,
    pub module: String,
    pub config_hash: String,
    pub verdict: ConsistencyVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRecord {
    pub name: String,
    pub module: String,
    pub config_hash: String,
    pub report: SpectralReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleFailure {
    pub module: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsRecord {
    pub module: String,
    pub config_hash: String,
    pub theta0: f64,
    pub xi0: f64,
    pub c1: f64,
    pub mu_first: f64,
    pub mu_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub config: RunConfig,
    pub config_hash: String,
    pub constants: Option<ConstantsRecord>,
    pub tables: Vec<Table>,
    pub fits: Vec<FitSummary>,
    pub verdicts: Vec<VerdictRecord>,
    pub spectra: Vec<SpectrumRecord>,
    pub contracts: Vec<Contract>,
    /// Set when a module failed and later stages were skipped.
    pub partial: bool,
    pub failure: Option<ModuleFailure>,
    /// Eigenfunction dump `(node, x1, x2, re, im)`; written as its own CSV.
    #[serde(skip)]
    pub field: Option<Table>,
    /// Wall time per stage in seconds. Not persisted, so reruns stay byte-identical.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl ReportBundle {
    pub fn new(config: RunConfig) -> Self {
        let config_hash = config.hash();
        Self {
            config,
            config_hash,
            constants: None,
            tables: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            spectra: Vec::new(),
            contracts: Vec::new(),
            partial: false,
            failure: None,
            field: None,
            timings: Vec::new(),
        }
    }

    pub fn contract(&mut self, criterion: Option<u8>, module: &str, name: &str, passed: bool, detail: String) {
        self.contracts.push(Contract { criterion, module: module.into(), name: name.into(), passed, detail });
    }

    pub fn fit(&mut self, name: &str, module: &str, values: &[(&str, f64)]) {
        self.fits.push(FitSummary {
            name: name.into(),
            module: module.into(),
            config_hash: self.config_hash.clone(),
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// True when the run completed and every contract held.
    pub fn passed(&self) -> bool {
        !self.partial && self.contracts.iter().all(|c| c.passed)
    }
}

fn number(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.15e}"),
        None => String::new(),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn csv_bytes(table: &Table, hash: &str) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["module".to_string(), "config_hash".to_string()];
    header.extend(table.columns.iter().cloned());
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![table.module.clone(), hash.to_string()];
        rec.extend(row.iter().map(|x| number(*x)));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| magbound::Error::Io(e.to_string()))
}

/// Persists the config, the JSON report, one CSV per table, the field dump
/// and the plot files. Returns the written paths in order.
pub fn write_bundle(bundle: &ReportBundle, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = out.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    put("config.json".into(), bundle.config.to_json().into_bytes())?;
    put("report.json".into(), (serde_json::to_string_pretty(bundle)? + "\n").into_bytes())?;
    for t in &bundle.tables {
        put(format!("{}.csv", t.name), csv_bytes(t, &bundle.config_hash)?)?;
    }
    if let Some(f) = &bundle.field {
        put(format!("{}.csv", f.name), csv_bytes(f, &bundle.config_hash)?)?;
    }
    for p in emit_plot_data(bundle).files {
        let mut text = format!("# {} {}\n", p.x_label, p.y_label);
        for (x, y) in &p.points {
            text.push_str(&format!("{x:.15e} {y:.15e}\n"));
        }
        put(format!("{}.dat", p.name), text.into_bytes())?;
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotFile {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotData {
    pub files: Vec<PlotFile>,
    pub notice: Option<String>,
}

/// Two-column data for the standard figures: the band function, and the
/// gaps of the corner, curved and weak-coupling sweeps.
pub fn emit_plot_data(bundle: &ReportBundle) -> PlotData {
    let mut files = Vec::new();
    let mut pairs = |table: &str, x: &str, y: &str, name: &str, x_label: &str, y_label: &str| {
        if let Some(t) = bundle.table(table) {
            let points: Vec<(f64, f64)> = t
                .column(x)
                .into_iter()
                .zip(t.column(y))
                .filter_map(|(a, b)| Some((a?, b?)))
                .collect();
            if !points.is_empty() {
                files.push(PlotFile { name: name.into(), x_label: x_label.into(), y_label: y_label.into(), points });
            }
        }
    };
    pairs("band_function", "xi", "mu", "plot_band_function", "xi", "mu(xi)");
    pairs("corner_sweep", "delta", "gap", "plot_corner_gap", "delta", "theta0-quotient");
    for mean in ["1", "2"] {
        pairs(
            &format!("curved_sweep_mean{mean}"),
            "delta",
            "gap",
            &format!("plot_curved_gap_mean{mean}"),
            "delta",
            "theta0-quotient",
        );
    }
    pairs("curved_sweep", "delta", "gap", "plot_curved_gap", "delta", "theta0-quotient");
    pairs("weak_sweep", "delta", "excess", "plot_weak_excess", "delta", "nu+mean^2/4");
    let notice = files.is_empty().then(|| "bundle holds no sweep; no plot files written".to_string());
    PlotData { files, notice }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, RunConfig};

    fn bundle() -> ReportBundle {
        ReportBundle::new(RunConfig::new(Command::CornerBound { deltas: vec![1e-3] }))
    }

    #[test]
    fn empty_bundle_has_no_plots() {
        let p = emit_plot_data(&bundle());
        assert!(p.files.is_empty() && p.notice.is_some());
    }

    #[test]
    fn csv_rows_carry_module_and_hash() {
        let mut b = bundle();
        let mut t = Table::new("corner_sweep", "corner-quasimode", &["delta", "gap"]);
        t.push(vec![Some(1e-3), None]);
        b.tables.push(t);
        let text = String::from_utf8(csv_bytes(&b.tables[0], &b.config_hash).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "module,config_hash,delta,gap");
        assert_eq!(lines.next().unwrap(), format!("corner-quasimode,{},1.000000000000000e-3,", b.config_hash));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn writes_are_atomic_and_complete() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = bundle();
        let mut t = Table::new("corner_sweep", "corner-quasimode", &["delta", "gap"]);
        t.push(vec![Some(1e-3), Some(1e-8)]);
        b.tables.push(t);
        let paths = write_bundle(&b, dir.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, ["config.json", "report.json", "corner_sweep.csv", "plot_corner_gap.dat"]);
        // No temporary files are left behind.
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);
    }
}
