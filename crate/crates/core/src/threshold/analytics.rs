use std::fmt;

use super::ThresholdError;
use crate::network::{degree_moments, DegreeDecomposition, DegreeMoments};

/// Remaining share of transit degree after an intervention.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InterventionAlpha(f64);

impl InterventionAlpha {
    pub const NONE: InterventionAlpha = InterventionAlpha(1.0);

    pub fn new(alpha: f64) -> Result<Self, ThresholdError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(InterventionAlpha(alpha))
        } else {
            Err(ThresholdError::InvalidAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn moments(decomp: &DegreeDecomposition) -> Result<DegreeMoments, ThresholdError> {
    degree_moments(decomp).map_err(|_| ThresholdError::EmptyPopulation)
}

/// First and second moments of `k_alpha = alpha * k_bus + k_nonbus`,
/// computed per person.
pub fn effective_moments(decomp: &DegreeDecomposition, alpha: InterventionAlpha) -> Result<(f64, f64), ThresholdError> {
    if decomp.is_empty() {
        return Err(ThresholdError::EmptyPopulation);
    }
    let a = alpha.value();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (b, n) in decomp.iter() {
        let k = a * f64::from(b) + f64::from(n);
        s1 += k;
        s2 += k * k;
    }
    let m = decomp.len() as f64;
    Ok((s1 / m, s2 / m))
}

/// `(w, mu)`; also checks that `mu == (1 - w) / (w - alpha)` whenever
/// `w != alpha`.
pub fn compute_w_mu(decomp: &DegreeDecomposition, alpha: InterventionAlpha) -> Result<(f64, f64), ThresholdError> {
    let m = moments(decomp)?;
    if m.mean_knonbus <= 0.0 {
        return Err(ThresholdError::ZeroNonBusDegree);
    }
    let a = alpha.value();
    let mu = m.mean_kbus / m.mean_knonbus;
    let w = (a * mu + 1.0) / (mu + 1.0);
    if (w - a).abs() > 1e-9 {
        let identity = (1.0 - w) / (w - a);
        if (identity - mu).abs() > 1e-9 * mu.max(1.0) {
            return Err(ThresholdError::IdentityViolated { mu, identity });
        }
    }
    Ok((w, mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutbreakSize {
    Finite(f64),
    /// The denominator is non-positive: transmissibility at or above the
    /// threshold.
    Divergent,
}

impl OutbreakSize {
    pub fn finite(self) -> Option<f64> {
        match self {
            OutbreakSize::Finite(s) => Some(s),
            OutbreakSize::Divergent => None,
        }
    }
}

impl fmt::Display for OutbreakSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutbreakSize::Finite(s) => write!(f, "{s}"),
            OutbreakSize::Divergent => f.write_str("divergent"),
        }
    }
}

/// Mean outbreak size from a single index case at edge transmissibility `t`.
pub fn outbreak_size(decomp: &DegreeDecomposition, alpha: InterventionAlpha, t: f64) -> Result<OutbreakSize, ThresholdError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ThresholdError::InvalidTransmissibility(t));
    }
    let m = moments(decomp)?;
    if m.mean_k <= 0.0 {
        return Err(ThresholdError::ZeroMeanDegree);
    }
    let (ka, ka2) = effective_moments(decomp, alpha)?;
    let w = ka / m.mean_k;
    let v = ka2 / m.mean_k2;
    let wk = w * m.mean_k;
    if wk <= 0.0 {
        // every remaining degree is zero
        return Ok(OutbreakSize::Finite(1.0));
    }
    let denominator = 1.0 - t * (v * m.mean_k2 - wk) / wk;
    if denominator <= 0.0 {
        return Ok(OutbreakSize::Divergent);
    }
    Ok(OutbreakSize::Finite(1.0 + t * wk / denominator))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// `T_c` clamped to `(0, 1]`.
    pub t_c: f64,
    /// Unclamped `1 / (<k_alpha^2> / <k_alpha> - 1)`.
    pub raw: f64,
    /// False when `raw > 1`: the graph is too sparse to percolate.
    pub in_range: bool,
}

pub fn transmissibility_threshold(decomp: &DegreeDecomposition, alpha: InterventionAlpha) -> Result<Threshold, ThresholdError> {
    let (ka, ka2) = effective_moments(decomp, alpha)?;
    if ka <= 0.0 || ka2 <= ka {
        return Err(ThresholdError::DegenerateDegrees);
    }
    let raw = 1.0 / (ka2 / ka - 1.0);
    Ok(Threshold { t_c: raw.min(1.0), raw, in_range: raw <= 1.0 })
}

/// All threshold quantities for one `(alpha, T)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub alpha: f64,
    pub mean_k_alpha: f64,
    pub w: f64,
    /// `None` when the mean non-transit degree is zero.
    pub mu: Option<f64>,
    pub v: f64,
    pub outbreak_size: OutbreakSize,
    pub t_c: Option<Threshold>,
    pub transmissibility_t: f64,
}

pub fn threshold_report(decomp: &DegreeDecomposition, alpha: InterventionAlpha, t: f64) -> Result<ThresholdReport, ThresholdError> {
    let m = moments(decomp)?;
    if m.mean_k <= 0.0 {
        return Err(ThresholdError::ZeroMeanDegree);
    }
    let (ka, ka2) = effective_moments(decomp, alpha)?;
    let mu = match compute_w_mu(decomp, alpha) {
        Ok((_, mu)) => Some(mu),
        Err(ThresholdError::ZeroNonBusDegree) => None,
        Err(e) => return Err(e),
    };
    let t_c = match transmissibility_threshold(decomp, alpha) {
        Ok(th) => Some(th),
        Err(ThresholdError::DegenerateDegrees) => None,
        Err(e) => return Err(e),
    };
    Ok(ThresholdReport {
        alpha: alpha.value(),
        mean_k_alpha: ka,
        w: ka / m.mean_k,
        mu,
        v: ka2 / m.mean_k2,
        outbreak_size: outbreak_size(decomp, alpha, t)?,
        t_c,
        transmissibility_t: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(bus: u32, nonbus: u32, m: usize) -> DegreeDecomposition {
        DegreeDecomposition::new(vec![bus; m], vec![nonbus; m]).unwrap()
    }

    fn alpha(a: f64) -> InterventionAlpha {
        InterventionAlpha::new(a).unwrap()
    }

    #[test]
    fn effective_moment_limits() {
        let d = DegreeDecomposition::new(vec![0, 2, 5, 1], vec![3, 1, 0, 4]).unwrap();
        let m = degree_moments(&d).unwrap();
        let (k1, k2) = effective_moments(&d, alpha(1.0)).unwrap();
        assert!((k1 - m.mean_k).abs() < 1e-12 && (k2 - m.mean_k2).abs() < 1e-12);
        let (k1, k2) = effective_moments(&d, alpha(0.0)).unwrap();
        assert!((k1 - m.mean_knonbus).abs() < 1e-12 && (k2 - m.mean_knonbus2).abs() < 1e-12);
        assert_eq!(effective_moments(&constant(2, 1, 3), alpha(0.5)).unwrap(), (2.0, 4.0));
    }

    #[test]
    fn second_moment_expansion_agrees() {
        let d = DegreeDecomposition::new(vec![0, 2, 5, 1, 7], vec![3, 1, 0, 4, 2]).unwrap();
        let m = degree_moments(&d).unwrap();
        for a in [0.0, 0.3, 0.8, 1.0] {
            let (k1, k2) = effective_moments(&d, alpha(a)).unwrap();
            let expanded = a * a * m.mean_kbus2 + m.mean_knonbus2 + 2.0 * a * m.mean_cross;
            assert!((k2 - expanded).abs() < 1e-9);
            assert!((k1 - (a * m.mean_kbus + m.mean_knonbus)).abs() < 1e-12);
        }
    }

    #[test]
    fn w_mu_examples() {
        let d = constant(3, 2, 4);
        assert_eq!(compute_w_mu(&d, alpha(1.0)).unwrap().0, 1.0);
        let (w, mu) = compute_w_mu(&constant(0, 2, 4), alpha(0.3)).unwrap();
        assert_eq!((w, mu), (1.0, 0.0));
        let (w, mu) = compute_w_mu(&constant(2, 2, 4), alpha(0.5)).unwrap();
        assert_eq!((w, mu), (0.75, 1.0));
        assert_eq!(compute_w_mu(&constant(2, 0, 4), alpha(0.5)), Err(ThresholdError::ZeroNonBusDegree));
    }

    #[test]
    fn outbreak_size_examples() {
        let regular = constant(0, 3, 10);
        assert_eq!(outbreak_size(&regular, alpha(1.0), 0.0).unwrap(), OutbreakSize::Finite(1.0));
        let s = outbreak_size(&regular, alpha(1.0), 0.25).unwrap().finite().unwrap();
        assert!((s - 2.5).abs() < 1e-12);
        assert_eq!(outbreak_size(&regular, alpha(1.0), 0.5).unwrap(), OutbreakSize::Divergent);
        assert_eq!(outbreak_size(&constant(0, 0, 3), alpha(1.0), 0.5), Err(ThresholdError::ZeroMeanDegree));
        assert!(outbreak_size(&regular, alpha(1.0), 1.5).is_err());
    }

    #[test]
    fn regular_threshold() {
        for k in 2..8 {
            let th = transmissibility_threshold(&constant(0, k, 5), alpha(1.0)).unwrap();
            assert!((th.t_c - 1.0 / f64::from(k - 1)).abs() < 1e-12);
        }
        // only transit contacts, all removed
        assert_eq!(transmissibility_threshold(&constant(3, 0, 5), alpha(0.0)), Err(ThresholdError::DegenerateDegrees));
        // alpha = 0 reduces to the non-transit layer
        let layered = DegreeDecomposition::new(vec![4, 9, 0, 2], vec![3, 3, 3, 3]).unwrap();
        let only = DegreeDecomposition::new(vec![0; 4], vec![3, 3, 3, 3]).unwrap();
        assert_eq!(
            transmissibility_threshold(&layered, alpha(0.0)).unwrap(),
            transmissibility_threshold(&only, alpha(1.0)).unwrap()
        );
    }

    #[test]
    fn sparse_graph_is_out_of_range() {
        // k in {1, 2}: <k^2>/<k> = 5/3, raw T_c = 1.5
        let d = DegreeDecomposition::new(vec![0, 0], vec![1, 2]).unwrap();
        let th = transmissibility_threshold(&d, alpha(1.0)).unwrap();
        assert!(!th.in_range);
        assert_eq!(th.t_c, 1.0);
        assert!((th.raw - 1.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_can_rise_with_alpha_for_skewed_nonbus_degrees() {
        // nine persons with one non-transit contact, one hub with fifty; one
        // transit contact each
        let mut nonbus = vec![1; 9];
        nonbus.push(50);
        let d = DegreeDecomposition::new(vec![1; 10], nonbus).unwrap();
        let at = |a: f64| transmissibility_threshold(&d, alpha(a)).unwrap().raw;
        assert!(at(0.1) > at(0.0));
        assert!(at(1.0) > at(0.0));
    }

    #[test]
    fn report_at_alpha_one_is_unintervened() {
        let d = DegreeDecomposition::new(vec![1, 2, 0, 3], vec![2, 2, 5, 1]).unwrap();
        let r = threshold_report(&d, alpha(1.0), 0.1).unwrap();
        assert!((r.w - 1.0).abs() < 1e-12 && (r.v - 1.0).abs() < 1e-12);
        assert!(InterventionAlpha::new(1.1).is_err());
    }
}
