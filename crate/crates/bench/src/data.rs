//! Dense text point files and synthetic streams.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sliding_meb::Point;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("input contains no points")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads one point per line, coordinates separated by whitespace. The
/// dimension is taken from the first non-empty line.
pub fn parse_dense_points<R: BufRead>(source: R) -> Result<Vec<Point>, ParseError> {
    let mut points = Vec::new();
    let mut dim = None;
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| ParseError::Line {
                    line: lineno,
                    message: format!("not a number: {tok:?}"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let m = *dim.get_or_insert(coords.len());
        if coords.len() != m {
            return Err(ParseError::Line {
                line: lineno,
                message: format!("expected {m} coordinates, found {}", coords.len()),
            });
        }
        let p = Point::new(coords).map_err(|e| ParseError::Line { line: lineno, message: e.to_string() })?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(points)
}

pub fn parse_dense_str(text: &str) -> Result<Vec<Point>, ParseError> {
    parse_dense_points(text.as_bytes())
}

/// Writes points in the dense text format. Rust's shortest round-trip
/// formatting makes re-parsing bit-exact.
pub fn write_dense_points<W: Write>(mut out: W, points: &[Point]) -> std::io::Result<()> {
    for p in points {
        let mut first = true;
        for x in p.iter() {
            if !first {
                out.write_all(b" ")?;
            }
            write!(out, "{x:?}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// `n` points in `m` dimensions with independent standard normal
/// coordinates, deterministic in `seed`.
pub fn gen_synthetic(n: usize, m: usize, seed: u64) -> Vec<Point> {
    assert!(n >= 1 && m >= 1, "synthetic stream needs n, m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let coords: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            Point::new(coords).expect("normal samples are finite")
        })
        .collect()
}
