//! `manifest.json`: what was run, with which grids, and the fate of every
//! cell.

use serde::Serialize;

use crate::config::Config;

#[derive(Debug, Clone, Serialize)]
pub struct CellStatus {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    /// `ok`, `boundary` or `error:<kind>`.
    pub status: String,
}

impl CellStatus {
    pub fn single(status: impl Into<String>) -> Self {
        Self { index: 0, p1: None, p2: None, status: status.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Config,
    pub nk: usize,
    #[serde(rename = "L")]
    pub cells: usize,
    pub tol: f64,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    pub counts: StatusCounts,
    pub cells_status: Vec<CellStatus>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub ok: usize,
    pub boundary: usize,
    pub error: usize,
}

impl StatusCounts {
    pub fn tally(cells: &[CellStatus]) -> Self {
        let mut c = Self::default();
        for s in cells {
            match s.status.as_str() {
                "ok" => c.ok += 1,
                "boundary" => c.boundary += 1,
                _ => c.error += 1,
            }
        }
        c
    }
}
