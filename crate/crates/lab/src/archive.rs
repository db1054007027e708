//! Binary path archive.
//!
//! Little-endian layout:
//!
//! ```text
//! magic   b"SPDEPATH"
//! u32     version (1)
//! u32 nt, u32 nx, u64 count
//! f64[nt] times, f64[nx] xs
//! count x { u64 seed, u64 stream, u8 noise tag, u64[2] noise params, f64[nt*nx] values }
//! ```
//!
//! Noise tags: 0 none, 1 modal `(modes, 0)`, 2 cells `(fine_cells, fine_steps)`.
//! The seed, stream and noise record regenerate a path without the file.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use spdelab_core::gaussian_field::NoiseRecord;
use spdelab_core::{FieldPath, Grid};

use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 8] = b"SPDEPATH";
pub const VERSION: u32 = 1;

pub fn write(path: &Path, paths: &[FieldPath]) -> Result<()> {
    let Some(first) = paths.first() else {
        return Err(LabError::Archive("no paths to write".into()));
    };
    let grid = &first.grid;
    if paths.iter().any(|p| p.grid != *grid) {
        return Err(LabError::Archive("paths in one archive must share a grid".into()));
    }
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| LabError::io(path, e));
    put(MAGIC)?;
    put(&VERSION.to_le_bytes())?;
    put(&(grid.nt() as u32).to_le_bytes())?;
    put(&(grid.nx() as u32).to_le_bytes())?;
    put(&(paths.len() as u64).to_le_bytes())?;
    for v in grid.times.iter().chain(&grid.xs) {
        put(&v.to_le_bytes())?;
    }
    for p in paths {
        put(&p.seed.to_le_bytes())?;
        put(&p.stream.to_le_bytes())?;
        let (tag, a, b) = match p.noise {
            NoiseRecord::None => (0u8, 0u64, 0u64),
            NoiseRecord::Modal { modes, .. } => (1, modes as u64, 0),
            NoiseRecord::Cells { fine_cells, fine_steps, .. } => (2, fine_cells as u64, fine_steps as u64),
        };
        put(&[tag])?;
        put(&a.to_le_bytes())?;
        put(&b.to_le_bytes())?;
        for v in &p.values {
            put(&v.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn read(path: &Path) -> Result<Vec<FieldPath>> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic, path)?;
    if &magic != MAGIC {
        return Err(LabError::Archive(format!("{} is not a path archive", path.display())));
    }
    let version = u32::from_le_bytes(take(&mut r, path)?);
    if version != VERSION {
        return Err(LabError::Archive(format!("unsupported archive version {version}")));
    }
    let nt = u32::from_le_bytes(take(&mut r, path)?) as usize;
    let nx = u32::from_le_bytes(take(&mut r, path)?) as usize;
    let count = u64::from_le_bytes(take(&mut r, path)?) as usize;
    let f64s = |n: usize, r: &mut BufReader<File>| -> Result<Vec<f64>> {
        (0..n).map(|_| Ok(f64::from_le_bytes(take(r, path)?))).collect()
    };
    let times = f64s(nt, &mut r)?;
    let xs = f64s(nx, &mut r)?;
    let grid = Arc::new(Grid::new(times, xs).map_err(|e| LabError::Archive(e.to_string()))?);
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let seed = u64::from_le_bytes(take(&mut r, path)?);
        let stream = u64::from_le_bytes(take(&mut r, path)?);
        let [tag] = take::<1>(&mut r, path)?;
        let a = u64::from_le_bytes(take(&mut r, path)?) as usize;
        let b = u64::from_le_bytes(take(&mut r, path)?) as usize;
        let noise = match tag {
            0 => NoiseRecord::None,
            1 => NoiseRecord::Modal { seed, stream, modes: a },
            2 => NoiseRecord::Cells { seed, stream, fine_cells: a, fine_steps: b },
            t => return Err(LabError::Archive(format!("unknown noise tag {t}"))),
        };
        let values = f64s(nt * nx, &mut r)?;
        out.push(FieldPath { grid: grid.clone(), values, seed, stream, noise });
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| LabError::io(path, e))? != 0 {
        return Err(LabError::Archive("trailing bytes after the last path".into()));
    }
    Ok(out)
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => LabError::Archive(format!("{} is truncated", path.display())),
        _ => LabError::io(path, e),
    })
}

fn take<const N: usize>(r: &mut impl Read, path: &Path) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    read_exact(r, &mut b, path)?;
    Ok(b)
}
