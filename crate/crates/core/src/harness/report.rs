use std::fmt::Write as _;
use std::path::Path;

use crate::error_norms::{DiscreteErrors, ExactDomainErrors};

use super::HarnessError;

/// Errors at or below this are treated as zero for rate estimates.
pub const EOC_FLOOR: f64 = 1e-13;

pub const CSV_HEADER: &str = "N,h,err_grad_L2_Omega_h,err_grad_L2_Gamma_h,err_L2_Omega_h,err_L2_Gamma_h,\
eoc_grad_Omega,eoc_grad_Gamma,eoc_L2_Omega,eoc_L2_Gamma";

const EXACT_COLUMNS: &str = "err_grad_L2_Omega_exact,err_grad_L2_Gamma_exact,err_L2_Omega_exact,err_L2_Gamma_exact,\
eoc_grad_Omega_exact,eoc_grad_Gamma_exact,eoc_L2_Omega_exact,eoc_L2_Gamma_exact";

const DIAGNOSTIC_COLUMNS: &str = "distance_profile,normal_discrepancy,consistency_residual,\
eoc_distance_profile,eoc_normal_discrepancy,eoc_consistency_residual";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub distance_profile: f64,
    pub normal_discrepancy: f64,
    pub consistency_residual: f64,
}

impl Diagnostics {
    pub fn as_array(&self) -> [f64; 3] {
        [self.distance_profile, self.normal_discrepancy, self.consistency_residual]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReportRow {
    pub n: usize,
    pub h: f64,
    pub discrete: DiscreteErrors,
    pub exact: Option<ExactDomainErrors>,
    pub diagnostics: Option<Diagnostics>,
}

/// `log(e_i / e_j) / log(h_i / h_j)`, or `None` if either error is negligible.
pub fn eoc(e_i: f64, e_j: f64, h_i: f64, h_j: f64) -> Option<f64> {
    (e_i > EOC_FLOOR && e_j > EOC_FLOOR).then(|| (e_i / e_j).ln() / (h_i / h_j).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

/// Rows ordered by N, with rates between consecutive rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ErrorReportRow>,
}

impl ConvergenceReport {
    pub fn new(mut rows: Vec<ErrorReportRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        Self { rows }
    }

    fn rates<const C: usize>(&self, i: usize, values: impl Fn(&ErrorReportRow) -> Option<[f64; C]>) -> [Option<f64>; C] {
        let mut out = [None; C];
        if i == 0 {
            return out;
        }
        let (prev, cur) = (&self.rows[i - 1], &self.rows[i]);
        if let (Some(a), Some(b)) = (values(prev), values(cur)) {
            for c in 0..C {
                out[c] = eoc(a[c], b[c], prev.h, cur.h);
            }
        }
        out
    }

    /// Rates of the discrete norms between rows `i − 1` and `i`.
    pub fn eoc_discrete(&self, i: usize) -> [Option<f64>; 4] {
        self.rates(i, |r| Some(r.discrete.as_array()))
    }

    pub fn eoc_exact(&self, i: usize) -> [Option<f64>; 4] {
        self.rates(i, |r| r.exact.map(|e| e.as_array()))
    }

    pub fn eoc_diagnostics(&self, i: usize) -> [Option<f64>; 3] {
        self.rates(i, |r| r.diagnostics.map(|d| d.as_array()))
    }

    fn has_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact.is_some())
    }

    fn has_diagnostics(&self) -> bool {
        self.rows.iter().all(|r| r.diagnostics.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        if self.has_exact() {
            out.push(',');
            out.push_str(EXACT_COLUMNS);
        }
        if self.has_diagnostics() {
            out.push(',');
            out.push_str(DIAGNOSTIC_COLUMNS);
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let mut cells = vec![row.n.to_string(), sig6(row.h)];
            cells.extend(row.discrete.as_array().map(sig6));
            cells.extend(self.eoc_discrete(i).map(eoc_cell));
            if let (true, Some(e)) = (self.has_exact(), row.exact) {
                cells.extend(e.as_array().map(sig6));
                cells.extend(self.eoc_exact(i).map(eoc_cell));
            }
            if let (true, Some(d)) = (self.has_diagnostics(), row.diagnostics) {
                cells.extend(d.as_array().map(sig6));
                cells.extend(self.eoc_diagnostics(i).map(eoc_cell));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Table with one column per norm and its rate in parentheses.
    pub fn to_markdown(&self) -> String {
        let mut titles = vec![
            "N".to_string(),
            "h".to_string(),
            "‖∇(u − u_h)‖_{L²(Ω_h)}".to_string(),
            "‖∇_{Γ_h}(u − u_h)‖_{L²(Γ_h)}".to_string(),
            "‖u − u_h‖_{L²(Ω_h)}".to_string(),
            "‖u − u_h‖_{L²(Γ_h)}".to_string(),
        ];
        if self.has_exact() {
            titles.extend(
                ["‖∇(u − ū_h)‖_{L²(Ω)}", "‖∇_Γ(u − ū_h)‖_{L²(Γ)}", "‖u − ū_h‖_{L²(Ω)}", "‖u − ū_h‖_{L²(Γ)}"].map(String::from),
            );
        }
        if self.has_diagnostics() {
            titles.extend(["distance profile", "normal discrepancy", "consistency residual"].map(String::from));
        }
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", titles.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(titles.len()));
        let with_rate = |v: f64, r: Option<f64>| match r {
            Some(r) => format!("{} ({})", sig6(v), sig6_rate(r)),
            None => format!("{} (-)", sig6(v)),
        };
        for (i, row) in self.rows.iter().enumerate() {
            let mut cells = vec![row.n.to_string(), sig6(row.h)];
            let rates = self.eoc_discrete(i);
            cells.extend(row.discrete.as_array().iter().zip(rates).map(|(&v, r)| with_rate(v, r)));
            if let (true, Some(e)) = (self.has_exact(), row.exact) {
                let rates = self.eoc_exact(i);
                cells.extend(e.as_array().iter().zip(rates).map(|(&v, r)| with_rate(v, r)));
            }
            if let (true, Some(d)) = (self.has_diagnostics(), row.diagnostics) {
                let rates = self.eoc_diagnostics(i);
                cells.extend(d.as_array().iter().zip(rates).map(|(&v, r)| with_rate(v, r)));
            }
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
        }
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &ConvergenceReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    std::fs::write(path.as_ref(), report.render(format)).map_err(|e| HarnessError::Io(e.to_string()))
}

/// Six significant digits in scientific notation.
pub fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

fn sig6_rate(v: f64) -> String {
    format!("{v:.4}")
}

fn eoc_cell(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), sig6)
}
