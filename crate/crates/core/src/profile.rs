//! Boundary coupling profiles α(x) with an asymptotic value α₀ at infinity,
//! and the derived quantities the spectral criteria consume: the excess
//! integral ∫(α - α₀) dx, the sup norm, and sharp truncation of the excess.

use crate::error::{Result, SpectralError};
use crate::quadrature;
use serde::{Deserialize, Serialize};

/// Endpoint excess larger than this makes a tabulated profile's excess
/// integral meaningless (the clamp to α₀ would hide a jump).
const DECAY_TOL: f64 = 1e-8;

/// Shape of the coupling on top of the asymptotic value α₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// α(x) = α₀ everywhere.
    Constant,
    /// α(x) = α₀ + amplitude · e^{-x²/width²}.
    GaussianBump { amplitude: f64, width: f64 },
    /// α(x) = α₀ + amplitude · e^{1 - 1/(1 - (x/radius)²)} inside |x| < radius,
    /// α₀ outside (smooth, compactly supported, peak value α₀ + amplitude).
    CompactBump { amplitude: f64, radius: f64 },
    /// α(x) = values[i] on (breakpoints[i], breakpoints[i+1]), α₀ outside.
    /// Not W^{1,∞}: admissible for the quadratic form and the discretization
    /// but outside the regularity hypotheses of the continuum statements.
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    /// Linear interpolation of (x, α) samples, clamped to α₀ outside.
    Tabulated { x: Vec<f64>, alpha: Vec<f64> },
}

/// The boundary coupling function α(x).
///
/// Every built-in shape satisfies lim_{|x|→∞} (α(x) - α₀) = 0 by
/// construction; tabulated samples are clamped (never extrapolated) outside
/// their range. An optional window restricts the excess to |x| < m, the
/// truncated coupling used by compactness arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    alpha0: f64,
    #[serde(flatten)]
    shape: ProfileShape,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    window: Option<f64>,
}

impl CouplingProfile {
    pub fn constant(alpha0: f64) -> Self {
        Self { alpha0, shape: ProfileShape::Constant, window: None }
    }

    pub fn gaussian_bump(alpha0: f64, amplitude: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(SpectralError::InvalidParameter(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        Ok(Self {
            alpha0,
            shape: ProfileShape::GaussianBump { amplitude, width },
            window: None,
        })
    }

    pub fn compact_bump(alpha0: f64, amplitude: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(SpectralError::InvalidParameter(format!(
                "bump radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            alpha0,
            shape: ProfileShape::CompactBump { amplitude, radius },
            window: None,
        })
    }

    pub fn piecewise_constant(
        alpha0: f64,
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(SpectralError::InvalidParameter(
                "piecewise profile needs k+1 sorted breakpoints for k values".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SpectralError::InvalidParameter(
                "piecewise breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            alpha0,
            shape: ProfileShape::PiecewiseConstant { breakpoints, values },
            window: None,
        })
    }

    pub fn tabulated(alpha0: f64, x: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != alpha.len() {
            return Err(SpectralError::InvalidParameter(
                "tabulated profile needs at least two (x, alpha) samples".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SpectralError::InvalidParameter(
                "tabulated x-grid must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            alpha0,
            shape: ProfileShape::Tabulated { x, alpha },
            window: None,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    /// False for shapes that violate the W^{1,∞} regularity the continuum
    /// statements assume (the discretized form remains well defined).
    pub fn within_paper_hypotheses(&self) -> bool {
        !matches!(self.shape, ProfileShape::PiecewiseConstant { .. })
    }

    /// α(x).
    pub fn evaluate(&self, x: f64) -> f64 {
        self.alpha0 + self.excess_at(x)
    }

    /// α(x) - α₀, with the truncation window applied.
    pub fn excess_at(&self, x: f64) -> f64 {
        if let Some(m) = self.window {
            if x.abs() >= m {
                return 0.0;
            }
        }
        self.raw_excess(x)
    }

    fn raw_excess(&self, x: f64) -> f64 {
        match &self.shape {
            ProfileShape::Constant => 0.0,
            ProfileShape::GaussianBump { amplitude, width } => {
                let t = x / width;
                amplitude * (-t * t).exp()
            }
            ProfileShape::CompactBump { amplitude, radius } => {
                let t = x / radius;
                if t.abs() < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            ProfileShape::PiecewiseConstant { breakpoints, values } => {
                if x < breakpoints[0] || x >= *breakpoints.last().unwrap() {
                    return 0.0;
                }
                // partition_point returns the first breakpoint > x
                let seg = breakpoints.partition_point(|&b| b <= x) - 1;
                values[seg.min(values.len() - 1)] - self.alpha0
            }
            ProfileShape::Tabulated { x: xs, alpha } => {
                if x <= xs[0] || x >= *xs.last().unwrap() {
                    // clamp: exactly alpha0 outside the table
                    if x == xs[0] {
                        return alpha[0] - self.alpha0;
                    }
                    if x == *xs.last().unwrap() {
                        return *alpha.last().unwrap() - self.alpha0;
                    }
                    return 0.0;
                }
                let hi = xs.partition_point(|&b| b <= x);
                let (x0, x1) = (xs[hi - 1], xs[hi]);
                let (a0, a1) = (alpha[hi - 1], alpha[hi]);
                let t = (x - x0) / (x1 - x0);
                a0 + t * (a1 - a0) - self.alpha0
            }
        }
    }

    /// sup_x |α(x)|.
    pub fn sup_norm(&self) -> f64 {
        let a0 = self.alpha0.abs();
        match &self.shape {
            ProfileShape::Constant => a0,
            // both bumps are monotone in |x|, so the extremes sit at the
            // peak and at infinity
            ProfileShape::GaussianBump { amplitude, .. }
            | ProfileShape::CompactBump { amplitude, .. } => {
                a0.max((self.alpha0 + amplitude).abs())
            }
            ProfileShape::PiecewiseConstant { values, .. } => values
                .iter()
                .fold(a0, |acc, v| acc.max(v.abs())),
            ProfileShape::Tabulated { alpha, .. } => alpha
                .iter()
                .fold(a0, |acc, v| acc.max(v.abs())),
        }
    }

    /// Interval outside which the (windowed) excess vanishes or is below
    /// roundoff; `None` for an identically zero excess.
    pub fn effective_support(&self) -> Option<(f64, f64)> {
        let base = match &self.shape {
            ProfileShape::Constant => None,
            ProfileShape::GaussianBump { amplitude, width } => {
                if *amplitude == 0.0 {
                    None
                } else {
                    // amplitude · e^{-t²} below 1e-300-ish far out; 40 widths
                    // is already past double-precision underflow
                    let r = width * 27.0;
                    Some((-r, r))
                }
            }
            ProfileShape::CompactBump { amplitude, radius } => {
                if *amplitude == 0.0 {
                    None
                } else {
                    Some((-radius, *radius))
                }
            }
            ProfileShape::PiecewiseConstant { breakpoints, .. } => {
                Some((breakpoints[0], *breakpoints.last().unwrap()))
            }
            ProfileShape::Tabulated { x, .. } => Some((x[0], *x.last().unwrap())),
        };
        match (base, self.window) {
            (None, _) => None,
            (Some((a, b)), None) => Some((a, b)),
            (Some((a, b)), Some(m)) => {
                let (a, b) = (a.max(-m), b.min(m));
                if a < b {
                    Some((a, b))
                } else {
                    None
                }
            }
        }
    }

    /// ∫_ℝ (α(x) - α₀) dx by adaptive quadrature over the effective support,
    /// absolute error below 1e-10.
    pub fn excess_integral(&self) -> Result<f64> {
        if let ProfileShape::Tabulated { x: _, alpha } = &self.shape {
            let head = (alpha[0] - self.alpha0).abs();
            let tail = (alpha.last().unwrap() - self.alpha0).abs();
            if head > DECAY_TOL || tail > DECAY_TOL {
                return Err(SpectralError::NonIntegrableExcess);
            }
        }
        let Some((a, b)) = self.effective_support() else {
            return Ok(0.0);
        };
        // split at every kink or jump so each adaptive pass sees a smooth piece
        let mut pts = self.quadrature_breakpoints();
        pts.push(a);
        pts.push(b);
        pts.retain(|p| *p >= a && *p <= b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let seg_tol = 1e-11 / (pts.len() as f64).max(1.0);
        let mut total = 0.0;
        for seg in pts.windows(2) {
            if seg[0] < seg[1] {
                total +=
                    quadrature::integrate_adaptive(&|x| self.excess_at(x), seg[0], seg[1], seg_tol)?;
            }
        }
        Ok(total)
    }

    /// The profile whose excess is (α - α₀)·1_{|x| < m}: identical inside the
    /// window, exactly α₀ outside. Truncations compose by intersection.
    pub fn truncate(&self, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(SpectralError::InvalidParameter(format!(
                "truncation radius must be positive, got {m}"
            )));
        }
        let mut out = self.clone();
        // already α₀ outside |x| >= m: keep the profile untouched
        let covered = match self.effective_support() {
            None => true,
            Some((a, b)) => -m <= a && b <= m && self.excess_at(-m) == 0.0 && self.excess_at(m) == 0.0,
        };
        if covered {
            return Ok(out);
        }
        out.window = Some(match self.window {
            Some(old) => old.min(m),
            None => m,
        });
        Ok(out)
    }

    /// sup_{|x| ≥ m} |α(x) - α₀|, the L^∞ distance between the excess and its
    /// truncation at m. Non-increasing in m for every built-in shape.
    pub fn tail_sup(&self, m: f64) -> f64 {
        if let Some(w) = self.window {
            if m >= w {
                return 0.0;
            }
        }
        match &self.shape {
            ProfileShape::Constant => 0.0,
            ProfileShape::GaussianBump { amplitude, width } => {
                let t = m / width;
                (amplitude * (-t * t).exp()).abs()
            }
            ProfileShape::CompactBump { amplitude, radius } => {
                if m >= *radius {
                    0.0
                } else {
                    let t = m / radius;
                    (amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()).abs()
                }
            }
            ProfileShape::PiecewiseConstant { breakpoints, values } => {
                let mut sup: f64 = 0.0;
                for (seg, v) in breakpoints.windows(2).zip(values.iter()) {
                    if seg[1] > m || seg[0] < -m {
                        sup = sup.max((v - self.alpha0).abs());
                    }
                }
                sup
            }
            ProfileShape::Tabulated { x, alpha } => {
                let mut sup: f64 = 0.0;
                for (&xi, &ai) in x.iter().zip(alpha.iter()) {
                    if xi.abs() >= m {
                        sup = sup.max((ai - self.alpha0).abs());
                    }
                }
                // interpolated values at ±m bound the interior of clipped segments
                sup = sup.max(self.raw_excess(m).abs());
                sup = sup.max(self.raw_excess(-m).abs());
                sup
            }
        }
    }

    /// Points where the profile is not smooth; quadrature panels must not
    /// straddle them.
    pub fn quadrature_breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.shape {
            ProfileShape::Constant | ProfileShape::GaussianBump { .. } => Vec::new(),
            ProfileShape::CompactBump { radius, .. } => vec![-radius, *radius],
            ProfileShape::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            ProfileShape::Tabulated { x, .. } => x.clone(),
        };
        if let Some(m) = self.window {
            pts.push(-m);
            pts.push(m);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// The profile x ↦ -α(x) (top/bottom boundary roles swap).
    pub fn negated(&self) -> Self {
        let shape = match &self.shape {
            ProfileShape::Constant => ProfileShape::Constant,
            ProfileShape::GaussianBump { amplitude, width } => ProfileShape::GaussianBump {
                amplitude: -amplitude,
                width: *width,
            },
            ProfileShape::CompactBump { amplitude, radius } => ProfileShape::CompactBump {
                amplitude: -amplitude,
                radius: *radius,
            },
            ProfileShape::PiecewiseConstant { breakpoints, values } => {
                ProfileShape::PiecewiseConstant {
                    breakpoints: breakpoints.clone(),
                    values: values.iter().map(|v| -v).collect(),
                }
            }
            ProfileShape::Tabulated { x, alpha } => ProfileShape::Tabulated {
                x: x.clone(),
                alpha: alpha.iter().map(|v| -v).collect(),
            },
        };
        Self { alpha0: -self.alpha0, shape, window: self.window }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_everywhere() {
        let p = CouplingProfile::constant(1.0);
        assert_eq!(p.evaluate(37.0), 1.0);
        assert_eq!(p.evaluate(-1e9), 1.0);
        assert_eq!(p.excess_integral().unwrap(), 0.0);
        assert_eq!(p.sup_norm(), 1.0);
    }

    #[test]
    fn gaussian_peak_and_sup() {
        let p = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        assert!((p.evaluate(0.0) - 1.5).abs() < 1e-15);
        assert!((p.sup_norm() - 1.5).abs() < 1e-15);
        // large negative amplitude flips which extreme dominates
        let q = CouplingProfile::gaussian_bump(1.0, -3.0, 1.0).unwrap();
        assert!((q.sup_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn compact_bump_support() {
        let p = CouplingProfile::compact_bump(1.0, 0.5, 2.0).unwrap();
        assert_eq!(p.evaluate(3.0), 1.0);
        assert_eq!(p.evaluate(2.0), 1.0);
        assert!((p.evaluate(0.0) - 1.5).abs() < 1e-15, "peak normalized to amplitude");
    }

    #[test]
    fn gaussian_excess_integral() {
        // amplitude·width·√π = 0.5·√π = 0.8862269254527579
        let p = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        let v = p.excess_integral().unwrap();
        assert!((v - 0.886_226_925_452_758).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn piecewise_excess_integral() {
        // excess 0.4 over an interval of length 4
        let p = CouplingProfile::piecewise_constant(1.0, vec![-2.0, 2.0], vec![1.4]).unwrap();
        let v = p.excess_integral().unwrap();
        assert!((v - 1.6).abs() < 1e-10, "got {v}");
        assert!(!p.within_paper_hypotheses());
    }

    #[test]
    fn constant_sup_norm_even() {
        assert_eq!(CouplingProfile::constant(-2.0).sup_norm(), 2.0);
    }

    #[test]
    fn truncate_constant_is_identity() {
        let p = CouplingProfile::constant(1.0);
        assert_eq!(p.truncate(5.0).unwrap(), p);
    }

    #[test]
    fn truncate_gaussian_tail_sup() {
        let p = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        let s = p.tail_sup(3.0);
        assert!((s - 0.5 * (-9.0f64).exp()).abs() < 1e-18, "got {s:e}");
        let t = p.truncate(3.0).unwrap();
        assert_eq!(t.evaluate(3.5), 1.0);
        assert_eq!(t.evaluate(2.9), p.evaluate(2.9));
        // non-increasing in m
        assert!(p.tail_sup(4.0) <= p.tail_sup(3.0));
        assert!(p.tail_sup(2.0) <= p.tail_sup(1.0));
    }

    #[test]
    fn truncate_covered_bump_unchanged() {
        let p = CouplingProfile::compact_bump(1.0, 0.5, 2.0).unwrap();
        assert_eq!(p.truncate(2.0).unwrap(), p);
    }

    #[test]
    fn truncation_excess_converges_monotonically() {
        let p = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        let full = p.excess_integral().unwrap();
        let mut prev = 0.0;
        for m in [1.0, 2.0, 3.0, 5.0, 8.0] {
            let v = p.truncate(m).unwrap().excess_integral().unwrap();
            assert!(v >= prev - 1e-12, "not monotone at m={m}");
            assert!(v <= full + 1e-12);
            prev = v;
        }
        assert!((prev - full).abs() < 1e-10);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let p = CouplingProfile::tabulated(
            1.0,
            vec![-1.0, 0.0, 1.0],
            vec![1.0, 1.8, 1.0],
        )
        .unwrap();
        assert!((p.evaluate(0.5) - 1.4).abs() < 1e-15);
        assert_eq!(p.evaluate(2.0), 1.0);
        assert_eq!(p.evaluate(-7.0), 1.0);
        let v = p.excess_integral().unwrap();
        assert!((v - 0.8).abs() < 1e-10, "triangle area, got {v}");
    }

    #[test]
    fn tabulated_bad_tails_rejected() {
        let p = CouplingProfile::tabulated(1.0, vec![-1.0, 1.0], vec![1.5, 1.5]).unwrap();
        assert!(matches!(
            p.excess_integral(),
            Err(SpectralError::NonIntegrableExcess)
        ));
    }

    #[test]
    fn negated_profile_mirrors_values() {
        let p = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        let n = p.negated();
        for x in [-3.0, -0.5, 0.0, 1.0, 10.0] {
            assert_eq!(n.evaluate(x), -p.evaluate(x));
        }
        assert!((n.excess_integral().unwrap() + 0.886_226_925_452_758).abs() < 1e-10);
    }

    #[test]
    fn piecewise_needs_sorted_breakpoints() {
        assert!(CouplingProfile::piecewise_constant(0.0, vec![1.0, -1.0], vec![2.0]).is_err());
        assert!(CouplingProfile::piecewise_constant(0.0, vec![1.0], vec![]).is_err());
    }
}
