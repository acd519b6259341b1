use std::io::Write;

use serde::Serialize;

use super::{ModeRecord, Polarization, Result};

pub const MODE_CSV_HEADER: [&str; 6] = ["pol", "l", "k0", "lambda_vac", "kappa_c", "Q"];

/// One row of a mode table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub pol: Polarization,
    pub l: u32,
    pub k0: f64,
    pub lambda_vac: f64,
    pub kappa_c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl From<&ModeRecord> for ModeRow {
    fn from(m: &ModeRecord) -> Self {
        Self {
            pol: m.polarization,
            l: m.l,
            k0: m.k0,
            lambda_vac: m.lambda_vac(),
            kappa_c: m.kappa_c,
            q: m.q,
        }
    }
}

/// Writes the header even when `modes` is empty.
pub fn write_mode_csv<W: Write>(modes: &[ModeRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(MODE_CSV_HEADER)?;
    for m in modes {
        w.serialize(ModeRow::from(m))?;
    }
    w.flush()?;
    Ok(())
}

pub fn mode_table_json(modes: &[ModeRecord]) -> String {
    let rows: Vec<ModeRow> = modes.iter().map(ModeRow::from).collect();
    serde_json::to_string_pretty(&rows).expect("mode rows always serialize")
}
