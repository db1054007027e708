use std::sync::Arc;

use spdelab::archive;
use spdelab_core::gaussian_field::NoiseRecord;
use spdelab_core::{FieldPath, Grid};

fn paths() -> Vec<FieldPath> {
    let grid = Arc::new(Grid::new(vec![0.1, 0.2, 0.3], vec![0.0, 0.5]).unwrap());
    (0..3u64)
        .map(|k| FieldPath {
            grid: grid.clone(),
            values: (0..6).map(|i| (i as f64 + 0.1) * (k as f64 - 1.5)).collect(),
            seed: 42,
            stream: k,
            noise: NoiseRecord::Cells { seed: 42, stream: k, fine_cells: 64, fine_steps: 300 },
        })
        .collect()
}

#[test]
fn round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.spdepath");
    archive::write(&file, &paths()).unwrap();
    assert_eq!(archive::read(&file).unwrap(), paths());
}

#[test]
fn damaged_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.spdepath");
    archive::write(&file, &paths()).unwrap();
    let bytes = std::fs::read(&file).unwrap();

    std::fs::write(&file, &bytes[..bytes.len() - 3]).unwrap();
    assert!(archive::read(&file).is_err());

    let mut extra = bytes.clone();
    extra.push(0);
    std::fs::write(&file, &extra).unwrap();
    assert!(archive::read(&file).is_err());

    let mut magic = bytes;
    magic[0] = b'X';
    std::fs::write(&file, &magic).unwrap();
    assert!(archive::read(&file).is_err());
}

#[test]
fn mixed_grids_are_refused() {
    let mut ps = paths();
    ps[1].grid = Arc::new(Grid::new(vec![0.1], vec![0.0]).unwrap());
    ps[1].values = vec![0.0];
    let dir = tempfile::tempdir().unwrap();
    assert!(archive::write(&dir.path().join("p"), &ps).is_err());
}
