//! File format for matrices and reports.
//!
//! Matrices are structured-text (JSON) documents with fields `rows`, `cols`
//! and `entries`, the latter a flat row-major list of `[re, im]` pairs.
//! Doubles round-trip bit-exactly: the writer emits shortest round-trip
//! decimal encodings.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::CMatrix;

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = MatrixDoc {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.entries().iter().map(|z| [z.re, z.im]).collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(deserializer)?;
        let entries: Vec<Complex64> =
            doc.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        CMatrix::new(doc.rows, doc.cols, entries).map_err(D::Error::custom)
    }
}

/// Write a matrix document.
pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialization cannot fail")
}

/// Parse a matrix document, validating shape and finiteness.
pub fn matrix_from_json(s: &str) -> Result<CMatrix, serde_json::Error> {
    serde_json::from_str(s)
}
