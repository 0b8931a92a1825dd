//! Float evaluation of polynomial families at sample points.

use num_complex::Complex64;

use crate::polycore::Polynomial;

/// Powers `x_k^e` for one point, `e ≤ max_deg`.
struct PowerTable {
    pows: Vec<Vec<Complex64>>,
}

impl PowerTable {
    fn new(point: &[Complex64], max_deg: u32) -> Self {
        let pows = point
            .iter()
            .map(|&x| {
                let mut row = Vec::with_capacity(max_deg as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=max_deg {
                    row.push(acc);
                    acc *= x;
                }
                row
            })
            .collect();
        Self { pows }
    }

    fn eval(&self, p: &Polynomial<Complex64>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (mi, c) in p.terms() {
            let mut v = *c;
            for (k, &e) in mi.exps().iter().enumerate() {
                if e > 0 {
                    v *= self.pows[k][e as usize];
                }
            }
            acc += v;
        }
        acc
    }
}

/// Values of every polynomial at one point.
pub fn eval_all(polys: &[Polynomial<Complex64>], point: &[Complex64]) -> Vec<Complex64> {
    let max_deg = polys.iter().map(|p| p.degree().max(0) as u32).max().unwrap_or(0);
    let table = PowerTable::new(point, max_deg);
    polys.iter().map(|p| table.eval(p)).collect()
}

/// Row-major matrix `out[k][j] = polys[j](points[k])`.
pub fn eval_matrix(polys: &[Polynomial<Complex64>], points: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    points.iter().map(|pt| eval_all(polys, pt)).collect()
}

/// Column-major table `col(j)[k] = e_j(ζ_k)` of a basis prefix at samples.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisValues {
    cols: Vec<Vec<Complex64>>,
    npoints: usize,
}

impl BasisValues {
    pub fn new(polys: &[Polynomial<Complex64>], points: &[Vec<Complex64>]) -> Self {
        let rows = eval_matrix(polys, points);
        let cols = (0..polys.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self { cols, npoints: points.len() }
    }

    pub fn from_columns(cols: Vec<Vec<Complex64>>) -> Self {
        let npoints = cols.first().map_or(0, |c| c.len());
        assert!(cols.iter().all(|c| c.len() == npoints), "ragged columns");
        Self { cols, npoints }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[Vec<Complex64>] {
        &self.cols
    }

    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.cols[j][k]
    }

    /// Row-major `M×M` matrix `e_j(ζ_{config[i]})`, `j < M = config.len()`.
    pub fn square(&self, config: &[usize]) -> Vec<Complex64> {
        let m = config.len();
        let mut out = Vec::with_capacity(m * m);
        for &k in config {
            for j in 0..m {
                out.push(self.cols[j][k]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse_polynomial;

    #[test]
    fn matches_direct_evaluation() {
        let ps: Vec<Polynomial<Complex64>> = ["z1^3 - (2i)*z1*z2 + 1", "z2^4", "7"]
            .iter()
            .map(|s| parse_polynomial(s, 2).unwrap().to_float())
            .collect();
        let pt = vec![Complex64::new(0.3, -1.1), Complex64::new(-0.7, 0.2)];
        let got = eval_all(&ps, &pt);
        for (g, p) in got.iter().zip(&ps) {
            assert!((g - p.evaluate(&pt).unwrap()).norm() < 1e-13);
        }
    }
}
