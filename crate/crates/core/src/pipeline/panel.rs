//! Surface panels and their CSV form.
//!
//! CSV layout: a header row, then one row per trading day. One column is
//! named `date` (ISO `YYYY-MM-DD`, strictly increasing); the other 224
//! columns are prices. Grid points are flattened tenor-major: column `i * 16 + j`
//! is tenor `i` (0..14), maturity `j` (0..16), and exported headers read
//! `t{i:02}_m{j:02}`.

use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const GRID_TENORS: usize = 14;
pub const GRID_MATURITIES: usize = 16;
pub const SURFACE_DIM: usize = GRID_TENORS * GRID_MATURITIES;

#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePanel {
    pub dates: Vec<String>,
    /// `T x 224`, chronological.
    pub values: DMatrix<f64>,
}

pub fn grid_header(idx: usize) -> String {
    format!("t{:02}_m{:02}", idx / GRID_MATURITIES, idx % GRID_MATURITIES)
}

/// `days` consecutive weekdays starting 2022-01-03.
pub fn business_days(days: usize) -> Vec<String> {
    let mut d = NaiveDate::from_ymd_opt(2022, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(days);
    while out.len() < days {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d.format("%Y-%m-%d").to_string());
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

impl SurfacePanel {
    pub fn new(dates: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if dates.len() != values.nrows() {
            return Err(Error::shape(format!(
                "{} dates for {} surfaces",
                dates.len(),
                values.nrows()
            )));
        }
        if values.ncols() != SURFACE_DIM {
            return Err(Error::shape(format!(
                "surfaces must have {SURFACE_DIM} entries, got {}",
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("surface panel contains non-finite values"));
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    /// Rows `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> SurfacePanel {
        SurfacePanel {
            dates: self.dates[start..start + len].to_vec(),
            values: self.values.rows(start, len).into_owned(),
        }
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let err = |row: usize, message: String| Error::Csv {
            path: shown.clone(),
            row,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)
            .map_err(|e| err(0, e.to_string()))?;
        let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
        let date_col = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case("date"))
            .ok_or_else(|| err(1, "header has no 'date' column".into()))?;
        if headers.len() != SURFACE_DIM + 1 {
            return Err(err(
                1,
                format!(
                    "expected {} columns (date + {SURFACE_DIM} prices), got {}",
                    SURFACE_DIM + 1,
                    headers.len()
                ),
            ));
        }
        let mut dates: Vec<String> = Vec::new();
        let mut flat = Vec::new();
        let mut previous: Option<NaiveDate> = None;
        for (i, record) in reader.records().enumerate() {
            // Header is row 1.
            let row = i + 2;
            let record = record.map_err(|e| err(row, e.to_string()))?;
            if record.len() != headers.len() {
                return Err(err(
                    row,
                    format!("expected {} fields, got {}", headers.len(), record.len()),
                ));
            }
            let date_text = record[date_col].trim();
            let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d")
                .map_err(|_| err(row, format!("invalid date '{date_text}'")))?;
            if let Some(prev) = previous {
                if date <= prev {
                    return Err(err(row, format!("date {date} does not follow {prev}")));
                }
            }
            previous = Some(date);
            dates.push(date_text.to_string());
            for (col, field) in record.iter().enumerate() {
                if col == date_col {
                    continue;
                }
                let field = field.trim();
                if field.is_empty() {
                    return Err(err(
                        row,
                        format!("missing value in column {} ('{}')", col + 1, &headers[col]),
                    ));
                }
                let v: f64 = field.parse().map_err(|_| {
                    err(
                        row,
                        format!(
                            "non-numeric value '{field}' in column {} ('{}')",
                            col + 1,
                            &headers[col]
                        ),
                    )
                })?;
                if !v.is_finite() {
                    return Err(err(row, format!("non-finite value in column {}", col + 1)));
                }
                flat.push(v);
            }
        }
        if dates.is_empty() {
            return Err(err(2, "no data rows".into()));
        }
        let values = DMatrix::from_row_slice(dates.len(), SURFACE_DIM, &flat);
        Self::new(dates, values)
    }

    /// Writes the panel with the date in the first column. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv {
            path: path.display().to_string(),
            row: 0,
            message: e.to_string(),
        })?;
        let to_err = |e: csv::Error| Error::Csv {
            path: path.display().to_string(),
            row: 0,
            message: e.to_string(),
        };
        let mut header = vec!["date".to_string()];
        header.extend((0..SURFACE_DIM).map(grid_header));
        writer.write_record(&header).map_err(to_err)?;
        for (i, date) in self.dates.iter().enumerate() {
            let mut rec = vec![date.clone()];
            rec.extend(self.values.row(i).iter().map(|v| format!("{v:?}")));
            writer.write_record(&rec).map_err(to_err)?;
        }
        writer.flush()?;
        Ok(())
    }
}
