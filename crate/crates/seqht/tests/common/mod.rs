#![allow(dead_code)]

use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Header and rows of a fixture; empty cells become `None`.
pub fn read_table(name: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut rdr = csv::Reader::from_path(data_path(name)).expect("fixture present");
    let header = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = rdr
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .map(|c| if c.is_empty() { None } else { c.parse().ok() })
                .collect()
        })
        .collect();
    (header, rows)
}

/// Scan fixtures: config label, step count and one fidelity per δt.
pub struct ScanRow {
    pub config: String,
    pub steps: usize,
    pub values: Vec<f64>,
}

pub fn read_scan(name: &str) -> (Vec<f64>, Vec<ScanRow>) {
    let mut rdr = csv::Reader::from_path(data_path(name)).expect("fixture present");
    let dts = rdr.headers().unwrap().iter().skip(2).map(|c| c.parse().unwrap()).collect();
    let rows = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            ScanRow {
                config: r[0].to_owned(),
                steps: r[1].parse().unwrap(),
                values: r.iter().skip(2).map(|c| c.parse().unwrap()).collect(),
            }
        })
        .collect();
    (dts, rows)
}
