//! Plain-text points files: a header `d n Q`, optionally followed by
//! `scale s offset o_1 .. o_d`, then one point per line as `d` integers.

use std::io::{BufRead, Write};

use super::point::{PrecisionConfig, TorusPoint};
use crate::error::{Result, TwdError};

/// Affine map applied by ingestion: torus coordinate = `scale * x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointsFile {
    pub cfg: PrecisionConfig,
    pub points: Vec<TorusPoint>,
    pub map: Option<AffineMap>,
}

fn fmt_err(line: usize, msg: impl std::fmt::Display) -> TwdError {
    TwdError::Format(format!("line {line}: {msg}"))
}

pub fn read_points<R: BufRead>(reader: R) -> Result<PointsFile> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
    let (ln, header) = lines.next().ok_or_else(|| TwdError::Format("empty points file".into()))?;
    let header = header?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() < 3 {
        return Err(fmt_err(ln, "header must be `d n Q`"));
    }
    let d: usize = tok[0].parse().map_err(|e| fmt_err(ln, e))?;
    let n: usize = tok[1].parse().map_err(|e| fmt_err(ln, e))?;
    let q: u32 = tok[2].parse().map_err(|e| fmt_err(ln, e))?;
    let cfg = PrecisionConfig::new(d, q).map_err(|e| fmt_err(ln, e))?;
    let map = if tok.len() > 3 {
        if tok.len() != 6 + d || tok[3] != "scale" || tok[5] != "offset" {
            return Err(fmt_err(ln, "trailer must be `scale s offset o_1 .. o_d`"));
        }
        let scale: f64 = tok[4].parse().map_err(|e| fmt_err(ln, e))?;
        let offset = tok[6..]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|e| fmt_err(ln, e)))
            .collect::<Result<Vec<_>>>()?;
        Some(AffineMap { scale, offset })
    } else {
        None
    };
    let mut points = Vec::with_capacity(n);
    for (ln, line) in lines {
        let line = line?;
        let coords = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|e| fmt_err(ln, e)))
            .collect::<Result<Vec<_>>>()?;
        points.push(TorusPoint::checked(&cfg, coords).map_err(|e| fmt_err(ln, e))?);
    }
    if points.len() != n {
        return Err(TwdError::Format(format!(
            "header declares {n} points, found {}",
            points.len()
        )));
    }
    Ok(PointsFile { cfg, points, map })
}

pub fn write_points<W: Write>(mut w: W, file: &PointsFile) -> Result<()> {
    write!(w, "{} {} {}", file.cfg.dim, file.points.len(), file.cfg.q)?;
    if let Some(m) = &file.map {
        write!(w, " scale {:e} offset", m.scale)?;
        for o in &m.offset {
            write!(w, " {o:e}")?;
        }
    }
    writeln!(w)?;
    for p in &file.points {
        let row: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_points_path(path: &std::path::Path) -> Result<PointsFile> {
    let f = std::fs::File::open(path)?;
    read_points(std::io::BufReader::new(f))
}

pub fn write_points_path(path: &std::path::Path, file: &PointsFile) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_points(&mut w, file)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_trailer() {
        let cfg = PrecisionConfig::new(2, 10).unwrap();
        let file = PointsFile {
            cfg,
            points: vec![TorusPoint::new(&cfg, vec![1, 2]), TorusPoint::new(&cfg, vec![1023, 0])],
            map: Some(AffineMap { scale: 0.05, offset: vec![0.25, 0.25] }),
        };
        let mut buf = Vec::new();
        write_points(&mut buf, &file).unwrap();
        let back = read_points(&buf[..]).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_points("2 1 10\n1024 0\n".as_bytes()).is_err());
        assert!(read_points("2 2 10\n1 0\n".as_bytes()).is_err());
        assert!(read_points("2 1 10\n1 0 3\n".as_bytes()).is_err());
        assert!(read_points("2 1\n1 0\n".as_bytes()).is_err());
        assert!(read_points("".as_bytes()).is_err());
        assert!(read_points("2 1 10 scale 1\n1 0\n".as_bytes()).is_err());
        assert!(read_points("2 1 10\n1 0\n".as_bytes()).is_ok());
    }
}
