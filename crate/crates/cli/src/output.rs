//! CSV emission. Every table starts with `#`-prefixed provenance lines that
//! echo the full effective configuration, then one header row, then data
//! rows. Floats are printed with 17 significant digits so a row can be
//! re-fed as a point configuration without loss.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qszilard::{CycleError, CycleResult, ResolvedPoint, Spacing, SweepAxis};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// Columns and rows plus the provenance header, ready to serialize.
pub struct Table {
    pub provenance: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Self {
            provenance: vec![
                ("tool".into(), format!("qszilard {}", env!("CARGO_PKG_VERSION"))),
                ("command".into(), command.to_string()),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: String) {
        self.provenance.push((key.to_string(), value));
    }

    pub fn note_float(&mut self, key: &str, value: f64) {
        self.note(key, fmt_float(value));
    }

    pub fn note_axis(&mut self, axis: &SweepAxis) {
        let spacing = match axis.spacing() {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        self.note(
            "axis",
            format!(
                "{}:{}:{}:{}:{}",
                axis.param().key(),
                fmt_float(axis.min()),
                fmt_float(axis.max()),
                axis.count(),
                spacing
            ),
        );
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, mut sink: impl Write) -> io::Result<()> {
        for (key, value) in &self.provenance {
            writeln!(sink, "# {key} = {value}")?;
        }
        writeln!(sink, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(sink, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut sink = BufWriter::new(File::create(path)?);
        self.write_to(&mut sink)?;
        sink.flush()
    }
}

/// Short machine-readable code for a failed grid point.
pub fn error_code(err: &CycleError) -> &'static str {
    match err {
        CycleError::Spectrum(_) => "Spectrum",
        CycleError::Demon(_) => "Demon",
        CycleError::InvalidInsertion { .. } => "InvalidInsertion",
        CycleError::InvalidEndpoint { .. } => "InvalidEndpoint",
        CycleError::CrushedBlock { .. } => "CrushedBlock",
        CycleError::WrongPhase(_) => "WrongPhase",
    }
}

pub const POINT_COLUMNS: [&str; 25] = [
    "l",
    "L",
    "beta",
    "beta_D",
    "Delta",
    "F",
    "l_g",
    "l_e",
    "W_ins",
    "W_mea",
    "W_exp",
    "W_rem",
    "W_tot",
    "Q_tot",
    "eta",
    "eta_carnot",
    "pwc",
    "P_L",
    "P_R",
    "p_g",
    "p_e",
    "w_g",
    "w_e",
    "S_erasure",
    "error",
];

/// One full-cycle row; failed points carry NaN cells and the error code.
pub fn point_row(point: &ResolvedPoint, result: &Result<CycleResult, CycleError>) -> Vec<String> {
    let mut row = vec![
        fmt_float(point.insertion),
        fmt_float(point.box_length),
        fmt_float(point.system_beta),
        fmt_float(point.bath_beta),
        fmt_float(point.gap),
        fmt_float(point.coherence),
        fmt_float(point.expand_ground),
        fmt_float(point.expand_excited),
    ];
    match result {
        Ok(r) => {
            for step in &r.steps {
                row.push(fmt_float(step.work));
            }
            row.extend([
                fmt_float(r.w_tot),
                fmt_float(r.q_tot),
                fmt_float(r.eta),
                fmt_float(r.eta_carnot),
                fmt_flag(r.pwc_satisfied),
                fmt_float(r.p_left),
                fmt_float(r.p_right),
                fmt_float(r.populations.0),
                fmt_float(r.populations.1),
                fmt_float(r.demon_marginal.0),
                fmt_float(r.demon_marginal.1),
                fmt_float(r.erasure_entropy),
                String::new(),
            ]);
        }
        Err(err) => {
            let nan = fmt_float(f64::NAN);
            for _ in 0..16 {
                row.push(nan.clone());
            }
            row.push(error_code(err).to_string());
        }
    }
    row
}
