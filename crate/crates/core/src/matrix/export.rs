use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Backend, OpMatrix, Scalar};
use crate::error::{Error, Result};
use crate::exactnum::CycNum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// Row-major entries in the backend's native form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixEntries {
    Float(Vec<Vec<ComplexEntry>>),
    Exact(Vec<Vec<CycNum>>),
}

/// Serialized form of an [`OpMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub dim: usize,
    pub backend: Backend,
    pub entries: MatrixEntries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

impl OpMatrix {
    pub fn export(&self) -> MatrixExport {
        let d = self.dim;
        let entries = match self.backend() {
            Backend::Float => MatrixEntries::Float(
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| {
                                let z = self.entry_complex(i, j);
                                ComplexEntry { re: z.re, im: z.im }
                            })
                            .collect()
                    })
                    .collect(),
            ),
            Backend::Exact => MatrixEntries::Exact(
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| match self.entry(i, j) {
                                Scalar::Exact(x) => x,
                                Scalar::Float(_) => unreachable!("exact matrix yields exact entries"),
                            })
                            .collect()
                    })
                    .collect(),
            ),
        };
        MatrixExport {
            dim: d,
            backend: self.backend(),
            entries,
            meta: self.meta.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.export()).expect("matrix export is always serializable")
    }

    /// CSV: a header record `dim,<d>,backend,<b>` then one record per row of `re,im` pairs.
    /// Exact entries are written as their complex values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["dim", &self.dim.to_string(), "backend", self.backend().as_str()])
            .map_err(io)?;
        let values = self.to_complex_vec();
        for row in values.chunks(self.dim) {
            let fields: Vec<String> = row
                .iter()
                .flat_map(|z| [format!("{:.17e}", z.re), format!("{:.17e}", z.im)])
                .collect();
            w.write_record(&fields).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

impl TryFrom<MatrixExport> for OpMatrix {
    type Error = Error;

    fn try_from(ex: MatrixExport) -> Result<Self> {
        let check_rows = |rows: usize, lens: &mut dyn Iterator<Item = usize>| -> Result<()> {
            if rows != ex.dim {
                return Err(Error::DimMismatch {
                    left: rows,
                    right: ex.dim,
                });
            }
            for len in lens {
                if len != ex.dim {
                    return Err(Error::DimMismatch {
                        left: len,
                        right: ex.dim,
                    });
                }
            }
            Ok(())
        };
        let m = match (&ex.entries, ex.backend) {
            (MatrixEntries::Float(rows), Backend::Float) => {
                check_rows(rows.len(), &mut rows.iter().map(|r| r.len()))?;
                OpMatrix::from_complex_fn(ex.dim, |i, j| {
                    let e = rows[i][j];
                    Complex64::new(e.re, e.im)
                })
            }
            (MatrixEntries::Exact(rows), Backend::Exact) => {
                check_rows(rows.len(), &mut rows.iter().map(|r| r.len()))?;
                let flat: Vec<CycNum> = rows.iter().flatten().cloned().collect();
                OpMatrix::from_cyc_entries(ex.dim, &flat)?
            }
            _ => return Err(Error::BackendMismatch),
        };
        Ok(match ex.meta {
            Some(label) => m.with_meta(label),
            None => m,
        })
    }
}
