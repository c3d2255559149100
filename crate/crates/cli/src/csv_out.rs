//! CSV export of response curves.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use tonestack_core::ResponseCurve;

pub const HEADER: &str = "frequency_hz,vout_re,vout_im,magnitude_db,phase_deg";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub frequency_hz: f64,
    pub vout_re: f64,
    pub vout_im: f64,
    pub magnitude_db: f64,
    pub phase_deg: f64,
}

impl CsvRow {
    pub fn rows(curve: &ResponseCurve) -> Vec<CsvRow> {
        curve
            .points
            .iter()
            .map(|p| CsvRow {
                frequency_hz: p.frequency,
                vout_re: p.vout.re,
                vout_im: p.vout.im,
                magnitude_db: p.magnitude_db,
                phase_deg: p.phase_deg,
            })
            .collect()
    }

    fn fields(&self) -> [f64; 5] {
        [
            self.frequency_hz,
            self.vout_re,
            self.vout_im,
            self.magnitude_db,
            self.phase_deg,
        ]
    }
}

// `{:?}` on f64 prints the shortest representation that parses back to the
// same value.
fn format_field(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER.split(','))?;
    for row in rows {
        w.write_record(row.fields().map(format_field))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `curve` to `path` through a temporary file in the same directory,
/// renamed into place once complete.
pub fn write_curve(path: &Path, curve: &ResponseCurve) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_rows(&mut tmp, &CsvRow::rows(curve)).map_err(io::Error::other)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn read_rows(path: &Path) -> io::Result<Vec<CsvRow>> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(io::Error::other)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != HEADER {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected header `{header}`"),
        ));
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(io::Error::other)?;
            let mut v = [0.0; 5];
            for (slot, field) in v.iter_mut().zip(rec.iter()) {
                *slot = field.parse().map_err(|_| {
                    io::Error::new(io::ErrorKind::InvalidData, format!("bad number `{field}`"))
                })?;
            }
            Ok(CsvRow {
                frequency_hz: v[0],
                vout_re: v[1],
                vout_im: v[2],
                magnitude_db: v[3],
                phase_deg: v[4],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tonestack_core::{
        frequency_response, log_grid, AnalysisOptions, ControlSettings, ToneStackComponents,
    };

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let curve = frequency_response(
            &ToneStackComponents::BASSMAN_5F6A,
            &ControlSettings::new(0.3, 0.7, 0.1).unwrap(),
            &log_grid(-1.0, 6.0, 73).unwrap(),
            5.0,
            &AnalysisOptions::default(),
        )
        .unwrap();
        write_curve(&path, &curve).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER);
        assert_eq!(read_rows(&path).unwrap(), CsvRow::rows(&curve));
    }

    #[test]
    fn shortest_formatting() {
        assert_eq!(format_field(1.0), "1.0");
        assert_eq!(format_field(0.1), "0.1");
        assert_eq!(format_field(1e-7), "1e-7");
    }
}
