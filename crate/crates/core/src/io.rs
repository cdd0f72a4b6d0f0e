//! JSON formats: channel files and monotone reports.
//!
//! A channel file is `{"dim_in": d, "dim_out": d', "kraus": [K_0, K_1, ...]}`
//! where each `K_k` is a list of `dim_out` rows of `dim_in` `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::QChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::monotones::{MonotoneReport, SearchConfig};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<JsonMatrix>,
}

fn to_json_matrix(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

impl ChannelFile {
    pub fn from_channel(n: &QChannel) -> Self {
        Self {
            dim_in: n.dim_in(),
            dim_out: n.dim_out(),
            kraus: n.kraus().iter().map(to_json_matrix).collect(),
        }
    }

    pub fn into_channel(self) -> Result<QChannel> {
        if self.dim_in == 0 || self.dim_out == 0 {
            return Err(Error::Parse("dim_in and dim_out must be positive".into()));
        }
        if self.kraus.is_empty() {
            return Err(Error::Parse(
                "kraus: at least one operator is required".into(),
            ));
        }
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (index, k) in self.kraus.iter().enumerate() {
            if k.len() != self.dim_out {
                return Err(Error::InvalidKraus {
                    index,
                    reason: format!("has {} rows, expected dim_out = {}", k.len(), self.dim_out),
                });
            }
            if let Some((row, r)) = k.iter().enumerate().find(|(_, r)| r.len() != self.dim_in) {
                return Err(Error::InvalidKraus {
                    index,
                    reason: format!(
                        "row {row} has {} entries, expected dim_in = {}",
                        r.len(),
                        self.dim_in
                    ),
                });
            }
            ops.push(ComplexMatrix::from_fn(self.dim_out, self.dim_in, |r, c| {
                let [re, im] = k[r][c];
                C64::new(re, im)
            }));
        }
        QChannel::from_kraus(ops)
    }
}

pub fn parse_channel(text: &str) -> Result<QChannel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_channel()
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<QChannel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_channel(&text)
}

pub fn channel_to_json(n: &QChannel) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_channel(n)).expect("plain data serializes")
}

/// Serialized form of a [`MonotoneReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub c_r_i: f64,
    pub c_r_b_lower: f64,
    /// Density matrix on `A ⊗ E`, input index most significant.
    pub c_r_b_witness: JsonMatrix,
    pub c_max: f64,
    pub c_max_smoothing: &'static str,
    pub distill_parallel: f64,
    pub distill_iterative_lower: f64,
    pub dilute_interval: [f64; 2],
    pub irreversibility_gap_lower: f64,
    pub ancilla_dim: usize,
    pub config: SearchConfig,
}

impl ReportFile {
    pub fn new(n: &QChannel, r: &MonotoneReport) -> Self {
        Self {
            dim_in: n.dim_in(),
            dim_out: n.dim_out(),
            c_r_i: r.c_r_i,
            c_r_b_lower: r.c_r_b_lower,
            c_r_b_witness: to_json_matrix(r.c_r_b_witness.matrix()),
            c_max: r.c_max,
            c_max_smoothing: "single copy, epsilon = 0",
            distill_parallel: r.distill_parallel,
            distill_iterative_lower: r.distill_iterative_lower,
            dilute_interval: [r.dilute_interval.0, r.dilute_interval.1],
            irreversibility_gap_lower: r.irreversibility_gap_lower,
            ancilla_dim: r.ancilla_dim,
            config: SearchConfig {
                ancilla_dim: Some(r.ancilla_dim),
                ..r.config.clone()
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn round_trip() {
        let h = QChannel::unitary(&pauli::hadamard()).unwrap();
        let back = parse_channel(&channel_to_json(&h)).unwrap();
        assert!(back.choi().max_abs_diff(h.choi()) < 1e-15);
    }

    #[test]
    fn parses_schema() {
        let text = r#"{"dim_in": 2, "dim_out": 2,
            "kraus": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}"#;
        let n = parse_channel(text).unwrap();
        assert!(
            n.choi()
                .max_abs_diff(QChannel::unitary(&pauli::x()).unwrap().choi())
                < 1e-15
        );
    }

    #[test]
    fn errors_name_the_kraus_index() {
        let short_row = r#"{"dim_in": 2, "dim_out": 2,
            "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [[[0, 0]], [[0, 0], [0, 0]]]]}"#;
        let err = parse_channel(short_row).unwrap_err().to_string();
        assert!(err.contains("kraus[1]") && err.contains("row 0"), "{err}");

        let not_tp = r#"{"dim_in": 1, "dim_out": 1, "kraus": [[[[2, 0]]]]}"#;
        assert!(parse_channel(not_tp).is_err());

        let unknown = r#"{"dim_in": 1, "dim_out": 1, "kraus": [[[[1, 0]]]], "x": 1}"#;
        assert!(matches!(parse_channel(unknown), Err(Error::Parse(_))));
        assert!(matches!(parse_channel("{"), Err(Error::Parse(_))));
    }
}
