//! Estimated distribution functions of the maximum cluster size, and their
//! on-disk form: a `k,cdf` CSV with a JSON metadata sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeDescriptor, Topology};

/// Values `F(k) = P(M <= k)` for `k = 0..=S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    values: Vec<f64>,
}

impl Cdf {
    /// Wraps `values`, checking they form a distribution function on `0..=S`:
    /// nondecreasing, within `[0, 1]`, and ending at 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("cdf", "no values"));
        }
        if let Some(k) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param(
                "cdf",
                format!("F({k}) = {} outside [0, 1]", values[k]),
            ));
        }
        if let Some(k) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::param("cdf", format!("decreasing at k = {}", k + 1)));
        }
        let last = *values.last().unwrap();
        if (last - 1.0).abs() > 1e-9 {
            return Err(Error::param("cdf", format!("F(S) = {last}, expected 1")));
        }
        Ok(Cdf { values })
    }

    /// Clamps accumulated sums into a valid distribution function.
    pub(crate) fn from_accumulated(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        if let Some(last) = values.last_mut() {
            *last = 1.0;
        }
        Cdf { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of sites `S`.
    pub fn site_count(&self) -> usize {
        self.values.len() - 1
    }

    /// `F(k)`; 1 for `k >= S`.
    pub fn at(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(1.0)
    }

    /// Right tail `P(M >= k) = 1 - F(k - 1)`, with `F(-1) = 0`.
    pub fn tail(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k => 1.0 - self.at(k - 1),
        }
    }

    /// `E[M] = sum over k < S of (1 - F(k))`.
    pub fn mean(&self) -> f64 {
        self.values[..self.values.len() - 1]
            .iter()
            .map(|f| 1.0 - f)
            .sum()
    }

    /// `k,cdf` CSV, one row per `k = 0..=S`.
    ///
    /// Floats use the shortest representation that parses back to the same
    /// value, so writing is deterministic and reading is lossless.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,cdf\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{v:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut offset = 0;
        match lines.next() {
            Some(h) if h.trim() == "k,cdf" => offset += h.len() + 1,
            _ => return Err(Error::parse(0, "expected header `k,cdf`")),
        }
        let mut values = Vec::new();
        for line in lines {
            let row_offset = offset;
            offset += line.len() + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(row_offset, "expected `k,cdf` row"))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::parse(row_offset, format!("bad k `{k}`")))?;
            if k != values.len() {
                return Err(Error::parse(
                    row_offset,
                    format!("expected k = {}, found {k}", values.len()),
                ));
            }
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(row_offset, format!("bad cdf value `{v}`")))?;
            values.push(v);
        }
        Cdf::new(values)
    }
}

/// Rectangle of a rectangular subgrid, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgridRect {
    pub subgrid_top: usize,
    pub subgrid_left: usize,
    pub subgrid_height: usize,
    pub subgrid_width: usize,
}

/// Parameters of the two-region occupation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InhomogeneousMeta {
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<SubgridRect>,
    pub subgrid_size: usize,
    pub p_in: f64,
    pub p_out: f64,
}

/// How a distribution was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionMeta {
    pub rows: usize,
    pub cols: usize,
    pub topology: Topology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub runs: usize,
    pub seed: u64,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub inhomogeneous: Option<InhomogeneousMeta>,
}

impl DistributionMeta {
    pub fn lattice(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            rows: self.rows,
            cols: self.cols,
            topology: self.topology,
        }
    }
}

/// A Monte Carlo estimate of the maximum-cluster-size distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfEstimate {
    pub cdf: Cdf,
    pub meta: DistributionMeta,
}

impl CdfEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("metadata serialises") + "\n"
    }

    /// Builds an estimate from its CSV and JSON text, checking that the CSV
    /// covers exactly the lattice named in the metadata.
    pub fn from_parts(csv: &str, json: &str) -> Result<Self> {
        let cdf = Cdf::from_csv(csv)?;
        let meta: DistributionMeta = serde_json::from_str(json)?;
        let sites = meta.rows.checked_mul(meta.cols);
        if sites != Some(cdf.site_count()) {
            return Err(Error::Provenance(format!(
                "CSV has {} sites but metadata describes {}x{}",
                cdf.site_count(),
                meta.rows,
                meta.cols
            )));
        }
        Ok(CdfEstimate { cdf, meta })
    }

    /// Writes `<path>` (CSV) and its sidecar (same stem, `.json`).
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        fs::write(csv_path, self.cdf.to_csv())?;
        fs::write(sidecar_path(csv_path), self.to_json())?;
        Ok(())
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let csv = fs::read_to_string(csv_path)?;
        let json = fs::read_to_string(sidecar_path(csv_path))?;
        Self::from_parts(&csv, &json)
    }
}

/// Metadata file accompanying a CSV distribution.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> DistributionMeta {
        DistributionMeta {
            rows: 1,
            cols: 2,
            topology: Topology::Six,
            p: Some(0.5),
            runs: 10,
            seed: 3,
            inhomogeneous: None,
        }
    }

    #[test]
    fn tail_and_mean() {
        let cdf = Cdf::new(vec![0.0625, 0.4375, 0.6875, 0.9375, 1.0]).unwrap();
        assert_eq!(cdf.tail(0), 1.0);
        assert_eq!(cdf.tail(4), 0.0625);
        assert_eq!(cdf.tail(5), 0.0);
        assert!((cdf.mean() - (0.9375 + 0.5625 + 0.3125 + 0.0625)).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_cdfs() {
        assert!(Cdf::new(vec![]).is_err());
        assert!(Cdf::new(vec![0.5, 0.4, 1.0]).is_err());
        assert!(Cdf::new(vec![0.5, 0.9]).is_err());
        assert!(Cdf::new(vec![-0.1, 1.0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let cdf = Cdf::new(vec![0.25, 0.5, 1.0]).unwrap();
        assert_eq!(cdf.to_csv(), "k,cdf\n0,0.25\n1,0.5\n2,1.0\n");
        assert_eq!(Cdf::from_csv(&cdf.to_csv()).unwrap(), cdf);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            Cdf::from_csv("x,y\n0,1\n"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            Cdf::from_csv("k,cdf\n1,1.0\n"),
            Err(Error::Parse { offset: 6, .. })
        ));
        assert!(Cdf::from_csv("k,cdf\n0,abc\n").is_err());
    }

    #[test]
    fn homogeneous_metadata_json() {
        let json = serde_json::to_value(meta()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"rows": 1, "cols": 2, "topology": 6, "p": 0.5, "runs": 10, "seed": 3})
        );
    }

    #[test]
    fn inhomogeneous_metadata_round_trip() {
        let mut m = meta();
        m.p = None;
        m.inhomogeneous = Some(InhomogeneousMeta {
            rect: Some(SubgridRect {
                subgrid_top: 0,
                subgrid_left: 1,
                subgrid_height: 1,
                subgrid_width: 1,
            }),
            subgrid_size: 1,
            p_in: 0.6,
            p_out: 0.4,
        });
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"subgrid_left\":1"));
        assert!(text.contains("\"p_in\":0.6"));
        let back: DistributionMeta = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let plain: DistributionMeta =
            serde_json::from_str(&serde_json::to_string(&meta()).unwrap()).unwrap();
        assert_eq!(plain.inhomogeneous, None);
    }

    #[test]
    fn metadata_must_match_csv_size() {
        let est = CdfEstimate {
            cdf: Cdf::new(vec![0.25, 0.5, 1.0]).unwrap(),
            meta: meta(),
        };
        let back = CdfEstimate::from_parts(&est.cdf.to_csv(), &est.to_json()).unwrap();
        assert_eq!(back, est);
        let mut wrong = meta();
        wrong.cols = 3;
        let json = serde_json::to_string(&wrong).unwrap();
        assert!(matches!(
            CdfEstimate::from_parts(&est.cdf.to_csv(), &json),
            Err(Error::Provenance(_))
        ));
    }

    #[test]
    fn save_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("null.csv");
        let est = CdfEstimate {
            cdf: Cdf::new(vec![0.1, 0.7, 1.0]).unwrap(),
            meta: meta(),
        };
        est.save(&path).unwrap();
        assert!(dir.path().join("null.json").exists());
        assert_eq!(CdfEstimate::load(&path).unwrap(), est);
    }
}
