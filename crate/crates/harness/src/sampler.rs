//! Samplers for the supported compact sets.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use varcap_core::chebyshev::{ChebyError, SampledCompact};
use varcap_core::polycore::{GaussRational, Polynomial};

use crate::config::{CompactKind, CompactSpec};

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("cannot read point list {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("point list: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coordinate {coord} is outside 1..={n}")]
    Coordinate { coord: usize, n: usize },
    #[error("real_sphere needs n ≥ 3")]
    SphereDimension,
    #[error("{0}")]
    Membership(#[from] ChebyError),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn zero_point(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn check_coord(coord: usize, n: usize) -> Result<usize, SampleError> {
    if coord == 0 || coord > n {
        return Err(SampleError::Coordinate { coord, n });
    }
    Ok(coord - 1)
}

/// `count` uniform angles `2πk/count` on the circle of radius `r` in one coordinate.
pub fn circle(n: usize, coord: usize, r: f64, count: usize) -> Result<Vec<Vec<Complex64>>, SampleError> {
    let k0 = check_coord(coord, n)?;
    Ok((0..count)
        .map(|k| {
            let mut p = zero_point(n);
            p[k0] = Complex64::from_polar(r, 2.0 * PI * k as f64 / count as f64);
            p
        })
        .collect())
}

/// Chebyshev–Lobatto points on `[a, b]` in one coordinate.
pub fn interval(n: usize, coord: usize, a: f64, b: f64, count: usize) -> Result<Vec<Vec<Complex64>>, SampleError> {
    let k0 = check_coord(coord, n)?;
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    Ok((0..count)
        .map(|k| {
            let x = if count == 1 { 0.0 } else { (PI * k as f64 / (count - 1) as f64).cos() };
            let mut p = zero_point(n);
            p[k0] = Complex64::new(mid + half * x, 0.0);
            p
        })
        .collect())
}

/// Fibonacci lattice on `x1² + x2² + x3² = 1` (remaining coordinates zero).
pub fn real_sphere(n: usize, count: usize) -> Result<Vec<Vec<Complex64>>, SampleError> {
    if n < 3 {
        return Err(SampleError::SphereDimension);
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    Ok((0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            let mut p = zero_point(n);
            p[0] = Complex64::new(rho * phi.cos(), 0.0);
            p[1] = Complex64::new(rho * phi.sin(), 0.0);
            p[2] = Complex64::new(z, 0.0);
            p
        })
        .collect())
}

/// Product of uniform angle grids, `count` angles per listed coordinate.
pub fn torus(n: usize, coords: &[usize], r: f64, count: usize) -> Result<Vec<Vec<Complex64>>, SampleError> {
    let idx = coords.iter().map(|&c| check_coord(c, n)).collect::<Result<Vec<_>, _>>()?;
    let mut out = vec![zero_point(n)];
    for k0 in idx {
        let mut next = Vec::with_capacity(out.len() * count);
        for p in &out {
            for k in 0..count {
                let mut q = p.clone();
                q[k0] = Complex64::from_polar(r, 2.0 * PI * k as f64 / count as f64);
                next.push(q);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Points from a JSON list; entries are reals or `[re, im]` pairs.
pub fn point_list(path: &Path) -> Result<Vec<Vec<Complex64>>, SampleError> {
    let text = std::fs::read_to_string(path).map_err(|source| SampleError::Io { path: path.display().to_string(), source })?;
    let raw: Vec<Vec<Entry>> = serde_json::from_str(&text)?;
    Ok(raw
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => Complex64::new(x, 0.0),
                    Entry::Complex([re, im]) => Complex64::new(re, im),
                })
                .collect()
        })
        .collect())
}

/// Samples `K` with `count` points (the configured sample count when `None`) and
/// checks membership against the generators.
pub fn sample_compact(
    spec: &CompactSpec,
    n: usize,
    count: Option<usize>,
    base_dir: &Path,
    generators: &[Polynomial<GaussRational>],
) -> Result<SampledCompact, SampleError> {
    let count = count.unwrap_or(spec.samples);
    let r = spec.radius.unwrap_or(1.0);
    let (label, points) = match spec.kind {
        CompactKind::Circle => ("circle", circle(n, spec.coordinate.unwrap_or(1), r, count)?),
        CompactKind::Interval => ("interval", interval(n, spec.coordinate.unwrap_or(1), spec.a.unwrap_or(-1.0), spec.b.unwrap_or(1.0), count)?),
        CompactKind::RealSphere => ("real_sphere", real_sphere(n, count)?),
        CompactKind::Torus => ("torus", torus(n, spec.coordinates.as_deref().unwrap_or(&[]), r, count)?),
        CompactKind::PointList => {
            let path = base_dir.join(spec.path.as_deref().unwrap_or(Path::new("")));
            ("point_list", point_list(&path)?)
        }
    };
    Ok(SampledCompact::new(format!("{label}[{}]", points.len()), points, generators)?)
}
