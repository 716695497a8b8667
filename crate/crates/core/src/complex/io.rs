use std::io::{BufRead, Write};

use super::{Simplex, SimplicialComplex};
use crate::error::{Result, TwdError};

/// Writes the maximal simplices, one sorted vertex list per line.
pub fn write_complex<W: Write>(mut w: W, k: &SimplicialComplex) -> Result<()> {
    for s in k.maximal_simplices() {
        writeln!(w, "{s}")?;
    }
    Ok(())
}

/// Reads simplices line by line and closes them under faces.
pub fn read_complex<R: BufRead>(r: R) -> Result<SimplicialComplex> {
    let mut k = SimplicialComplex::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| TwdError::Format(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Simplex::new(v).map_err(|e| TwdError::Format(format!("line {}: {e}", i + 1)))?;
        k.insert_with_closure(&s);
    }
    Ok(k)
}

pub fn write_complex_path(path: &std::path::Path, k: &SimplicialComplex) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_complex(&mut w, k)?;
    w.flush()?;
    Ok(())
}

pub fn read_complex_path(path: &std::path::Path) -> Result<SimplicialComplex> {
    read_complex(std::io::BufReader::new(std::fs::File::open(path)?))
}
