//! Weakly submultiplicative functions on `Z_{≥0}^m`: tabulation, the
//! submultiplicativity check, directional estimates along the simplex,
//! boundary proxies and the simplex log-average.

use std::collections::BTreeMap;

use crate::polycore::{binomial, MultiIndex};

/// `h_m(s) = C(s+m-1, s)`, the number of monomials of degree `s` in `m` variables.
pub fn h_m(m: usize, s: u32) -> u64 {
    if m == 0 {
        return u64::from(s == 0);
    }
    binomial(s as u64 + m as u64 - 1, s as u64)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsymError {
    #[error("simplex point must have {m} non-negative entries summing to one")]
    NotOnSimplex { m: usize },
    #[error("direction lies on the boundary; use the boundary proxy")]
    Boundary,
    #[error("direction is interior; the boundary proxy needs a boundary point")]
    Interior,
    #[error("table has no entry at {0:?}")]
    Missing(Vec<u32>),
    #[error("no table entries within the window around the boundary point")]
    EmptyWindow,
    #[error("level {s} exceeds the table depth {depth}")]
    Level { s: u32, depth: u32 },
}

/// Values `Y(α)` for `|α| ≤ depth` with the offset set `𝓕`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedY {
    pub m: usize,
    pub depth: u32,
    pub values: BTreeMap<MultiIndex, f64>,
    pub offsets: Vec<MultiIndex>,
}

impl TabulatedY {
    pub fn from_fn(m: usize, depth: u32, offsets: Vec<MultiIndex>, f: impl Fn(&MultiIndex) -> f64) -> Self {
        let values = MultiIndex::up_to_degree(m, depth).into_iter().map(|a| (a.clone(), f(&a))).collect();
        Self { m, depth, values, offsets }
    }

    pub fn get(&self, a: &MultiIndex) -> Result<f64, AsymError> {
        self.values.get(a).copied().ok_or_else(|| AsymError::Missing(a.exps().to_vec()))
    }

    pub fn set(&mut self, a: MultiIndex, v: f64) {
        self.values.insert(a, v);
    }

    /// `(C, r)` with `Y(α) ≤ C r^{|α|}` on the whole table.
    pub fn growth(&self) -> (f64, f64) {
        let r = self
            .values
            .iter()
            .filter(|(a, _)| a.degree() > 0)
            .map(|(a, v)| v.powf(1.0 / a.degree() as f64))
            .fold(0.0, f64::max);
        let c = self.values.get(&MultiIndex::zero(self.m)).copied().unwrap_or(1.0).max(1.0);
        (c, r)
    }

    /// Largest offset degree in `𝓕`.
    fn offset_depth(&self) -> u32 {
        self.offsets.iter().map(|g| g.degree()).max().unwrap_or(0)
    }
}

/// Pairs `(α, β)` for which no `γ ∈ 𝓕` gives `Y(α+β+γ) ≤ Y(α)Y(β)(1+tol)`.
pub fn weak_submult_check(y: &TabulatedY, tol: f64) -> Vec<(MultiIndex, MultiIndex)> {
    let gmax = y.offset_depth();
    let mut out = Vec::new();
    if gmax > y.depth {
        return out;
    }
    let keys: Vec<&MultiIndex> = y.values.keys().collect();
    for a in &keys {
        for b in &keys {
            if a.degree() + b.degree() + gmax > y.depth || a > b {
                continue;
            }
            let bound = y.values[*a] * y.values[*b] * (1.0 + tol);
            let ok = y.offsets.iter().any(|g| {
                let c = a.add(b).add(g);
                y.values.get(&c).is_some_and(|v| *v <= bound)
            });
            if !ok {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    theta: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(theta: Vec<f64>) -> Result<Self, AsymError> {
        let m = theta.len();
        let sum: f64 = theta.iter().sum();
        if m == 0 || theta.iter().any(|t| !(*t >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(AsymError::NotOnSimplex { m });
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn is_interior(&self) -> bool {
        self.theta.iter().all(|t| *t > 0.0)
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        let theta = self.theta.iter().zip(&other.theta).map(|(a, b)| 0.5 * (a + b)).collect();
        Self { theta }
    }

    /// `α` with `|α| = s` closest to `sθ`: floors plus largest remainders,
    /// ties to the lowest index.
    pub fn round_to_level(&self, s: u32) -> MultiIndex {
        let scaled: Vec<f64> = self.theta.iter().map(|t| t * s as f64).collect();
        let mut e: Vec<u32> = scaled.iter().map(|x| x.floor() as u32).collect();
        let mut left = s.saturating_sub(e.iter().sum());
        let mut order: Vec<usize> = (0..e.len()).collect();
        order.sort_by(|&i, &j| {
            let ri = scaled[i] - scaled[i].floor();
            let rj = scaled[j] - scaled[j].floor();
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        for i in order {
            if left == 0 {
                break;
            }
            e[i] += 1;
            left -= 1;
        }
        MultiIndex::new(e)
    }
}

/// Finite-level estimate of a directional limit.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// Least-squares slope of the last quarter of the series against `s`.
    pub slope: f64,
    /// `(s, Y(α_s)^{1/s})`.
    pub series: Vec<(u32, f64)>,
}

pub(crate) fn tail_slope(series: &[(u32, f64)]) -> f64 {
    let k = (series.len() / 4).max(4).min(series.len());
    let tail = &series[series.len() - k..];
    if tail.len() < 2 {
        return 0.0;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|(s, _)| *s as f64).sum::<f64>() / n;
    let my = tail.iter().map(|(_, v)| *v).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|(s, v)| (*s as f64 - mx) * (v - my)).sum();
    let sxx: f64 = tail.iter().map(|(s, _)| (*s as f64 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `Y(α_s)^{1/s}` along the rounded ray through an interior `θ`.
pub fn t_estimate(y: &TabulatedY, theta: &SimplexPoint) -> Result<LimitEstimate, AsymError> {
    if theta.theta().len() != y.m {
        return Err(AsymError::NotOnSimplex { m: y.m });
    }
    if !theta.is_interior() {
        return Err(AsymError::Boundary);
    }
    let mut series = Vec::new();
    for s in 1..=y.depth {
        let a = theta.round_to_level(s);
        series.push((s, y.get(&a)?.powf(1.0 / s as f64)));
    }
    let value = series.last().map(|x| x.1).unwrap_or(f64::NAN);
    Ok(LimitEstimate { value, slope: tail_slope(&series), series })
}

/// `(1/h_m(s)) Σ_{|α|=s} (1/s) log Y(α)`; `-∞` when any value is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LogAverage {
    pub value: f64,
    pub zeros: usize,
}

pub fn simplex_log_average(y: &TabulatedY, s: u32) -> Result<LogAverage, AsymError> {
    if s > y.depth {
        return Err(AsymError::Level { s, depth: y.depth });
    }
    let level = MultiIndex::of_degree(y.m, s);
    let mut zeros = 0;
    let mut acc = 0.0;
    for a in &level {
        let v = y.get(a)?;
        if v <= 0.0 {
            zeros += 1;
        } else if s > 0 {
            acc += v.ln() / s as f64;
        }
    }
    if zeros > 0 {
        return Ok(LogAverage { value: f64::NEG_INFINITY, zeros });
    }
    Ok(LogAverage { value: acc / level.len() as f64, zeros })
}

/// Finite-depth proxy for `liminf Y(α)^{1/|α|}` as `α/|α| → b`: the minimum
/// over entries with `|α| ≥ depth/2` within `window` of `b` (default
/// `2m/depth`, doubled once if empty). Zero entries give `-∞` in log terms,
/// returned here as `0`.
pub fn boundary_liminf_proxy(y: &TabulatedY, b: &SimplexPoint, window: Option<f64>) -> Result<f64, AsymError> {
    if b.theta().len() != y.m {
        return Err(AsymError::NotOnSimplex { m: y.m });
    }
    if b.is_interior() {
        return Err(AsymError::Interior);
    }
    let base = window.unwrap_or(2.0 * y.m as f64 / y.depth.max(1) as f64);
    for w in [base, 2.0 * base] {
        let mut best: Option<f64> = None;
        for (a, v) in &y.values {
            let k = a.degree();
            if k == 0 || 2 * k < y.depth {
                continue;
            }
            let dist = a
                .exps()
                .iter()
                .zip(b.theta())
                .map(|(e, t)| (*e as f64 / k as f64 - t).powi(2))
                .sum::<f64>()
                .sqrt();
            if dist <= w {
                let r = v.max(0.0).powf(1.0 / k as f64);
                best = Some(best.map_or(r, |x: f64| x.min(r)));
            }
        }
        if let Some(x) = best {
            return Ok(x);
        }
    }
    Err(AsymError::EmptyWindow)
}

/// Midpoint log-convexity of `θ ↦ T(θ)` at one triple:
/// returns `log T(mid) - (log T(a) + log T(b))/2` (should be `≤ tol`).
pub fn log_convexity_defect(y: &TabulatedY, a: &SimplexPoint, b: &SimplexPoint) -> Result<f64, AsymError> {
    let mid = a.midpoint(b);
    let ta = t_estimate(y, a)?.value.ln();
    let tb = t_estimate(y, b)?.value.ln();
    let tm = t_estimate(y, &mid)?.value.ln();
    Ok(tm - 0.5 * (ta + tb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn multiplicative(r: Vec<f64>, depth: u32) -> TabulatedY {
        let m = r.len();
        TabulatedY::from_fn(m, depth, vec![MultiIndex::zero(m)], move |a| {
            a.exps().iter().zip(&r).map(|(e, rk)| rk.powi(*e as i32)).product()
        })
    }

    #[test]
    fn h_m_values() {
        assert_eq!(h_m(2, 3), 4);
        assert_eq!(h_m(1, 17), 1);
        assert_eq!(h_m(3, 2), 6);
        for m in 1..4usize {
            for s in 0..6u32 {
                assert_eq!(h_m(m, s) as usize, MultiIndex::of_degree(m, s).len());
            }
        }
    }

    #[test]
    fn multiplicative_is_submultiplicative() {
        assert!(weak_submult_check(&multiplicative(vec![2.0, 0.5], 10), 1e-12).is_empty());
        let y = TabulatedY::from_fn(2, 10, vec![MultiIndex::zero(2)], |a| 3f64.powi(a.degree() as i32));
        assert!(weak_submult_check(&y, 1e-12).is_empty());
    }

    #[test]
    fn inflated_entry_is_reported() {
        let mut y = multiplicative(vec![2.0, 0.5], 6);
        let e1 = MultiIndex::new(vec![1, 0]);
        let two = MultiIndex::new(vec![2, 0]);
        y.set(two.clone(), 10.0 * y.get(&two).unwrap());
        let v = weak_submult_check(&y, 1e-12);
        assert!(v.contains(&(e1.clone(), e1)));
    }

    #[test]
    fn log_average_closed_form() {
        let y = multiplicative(vec![2.0, 0.5], 32);
        for s in 1..=32 {
            assert!(simplex_log_average(&y, s).unwrap().value.abs() < 1e-10);
        }
        let y = multiplicative(vec![3.0, 5.0], 12);
        let want = (3f64.ln() + 5f64.ln()) / 2.0;
        assert!((simplex_log_average(&y, 12).unwrap().value - want).abs() < 1e-12);
        let one = TabulatedY::from_fn(2, 5, vec![MultiIndex::zero(2)], |_| 1.0);
        assert_eq!(simplex_log_average(&one, 5).unwrap().value, 0.0);
        let zero = TabulatedY::from_fn(2, 3, vec![MultiIndex::zero(2)], |_| 0.0);
        let avg = simplex_log_average(&zero, 3).unwrap();
        assert_eq!(avg.value, f64::NEG_INFINITY);
        assert_eq!(avg.zeros, 4);
    }

    #[test]
    fn t_estimate_constants_wash_out() {
        let y = TabulatedY::from_fn(2, 40, vec![MultiIndex::zero(2)], |a| 5.0 * 1.5f64.powi(a.degree() as i32));
        let th = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let est = t_estimate(&y, &th).unwrap();
        assert!((est.value - 1.5 * 5f64.powf(1.0 / 40.0)).abs() < 1e-12);
        assert!(est.slope < 0.0);
        let edge = SimplexPoint::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(t_estimate(&y, &edge).unwrap_err(), AsymError::Boundary);
    }

    #[test]
    fn boundary_proxy() {
        let y = multiplicative(vec![2.0, 0.5], 24);
        let e1 = SimplexPoint::new(vec![1.0, 0.0]).unwrap();
        let p = boundary_liminf_proxy(&y, &e1, None).unwrap();
        // the window admits α/|α| with second entry up to about 0.12
        assert!(p <= 2.0 && p > 1.6);
        let one = TabulatedY::from_fn(2, 10, vec![MultiIndex::zero(2)], |_| 1.0);
        assert_eq!(boundary_liminf_proxy(&one, &e1, None).unwrap(), 1.0);
        let zero = TabulatedY::from_fn(2, 10, vec![MultiIndex::zero(2)], |_| 0.0);
        assert_eq!(boundary_liminf_proxy(&zero, &e1, None).unwrap(), 0.0);
    }

    #[test]
    fn rounding_keeps_level() {
        let th = SimplexPoint::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(th.round_to_level(4).exps(), &[2, 1, 1]);
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
    }

    proptest! {
        #[test]
        fn multiplicative_estimate_converges(t in 0.05f64..0.95) {
            let y = multiplicative(vec![2.0, 0.5], 32);
            let th = SimplexPoint::new(vec![t, 1.0 - t]).unwrap();
            let est = t_estimate(&y, &th).unwrap().value;
            let want = 2f64.powf(t) * 0.5f64.powf(1.0 - t);
            // rounding moves α by at most one unit: |log error| ≤ log(4)/S
            prop_assert!((est.ln() - want.ln()).abs() <= 4f64.ln() / 32.0 + 1e-12);
        }

        #[test]
        fn multiplicative_is_log_convex(a in 0.05f64..0.95, b in 0.05f64..0.95) {
            let y = multiplicative(vec![2.0, 0.5], 32);
            let pa = SimplexPoint::new(vec![a, 1.0 - a]).unwrap();
            let pb = SimplexPoint::new(vec![b, 1.0 - b]).unwrap();
            prop_assert!(log_convexity_defect(&y, &pa, &pb).unwrap() <= 2.0 * 4f64.ln() / 32.0);
        }

        #[test]
        fn grid_average_converges_to_simplex_integral(s in 8u32..40) {
            // ∫ θ1 over the 2-simplex grid is exactly 1/2, of θ1^2 tends to 1/3
            let level = MultiIndex::of_degree(2, s);
            let mean2: f64 = level.iter().map(|a| (a.get(0) as f64 / s as f64).powi(2)).sum::<f64>() / level.len() as f64;
            prop_assert!((mean2 - 1.0 / 3.0).abs() <= 1.0 / s as f64);
        }
    }
}
