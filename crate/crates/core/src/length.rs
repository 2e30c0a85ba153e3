//! `tau`-length of causal polylines by partition refinement, and its
//! comparison with the one-dimensional cover measure.

use std::io::Write;

use crate::causal::{CausalSpace, Point};
use crate::error::{Error, Result};
use crate::measure::{curve_chain_cover, VerifyOptions};
use crate::spaces::{MinkowskiSpace, PiecewiseLinearCurve, Region};

/// Deepest refinement level tried before giving up on convergence.
pub const MAX_LEVEL: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceLevel {
    pub level: u32,
    /// Largest Euclidean gap between consecutive partition points.
    pub mesh: f64,
    pub sum: f64,
}

/// Partition sums `sum tau(gamma(t_i), gamma(t_{i+1}))` per refinement
/// level. Level 0 uses the endpoints, level 1 the vertices, level `k >= 2`
/// splits every leg into `2^(k-1)` equal pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartitionSumTrace {
    pub levels: Vec<TraceLevel>,
}

impl PartitionSumTrace {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["level", "mesh", "sum"])?;
        for l in &self.levels {
            out.write_record([l.level.to_string(), format!("{:.16e}", l.mesh), format!("{:.16e}", l.sum)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn last(&self) -> f64 {
        self.levels.last().map(|l| l.sum).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauLength {
    pub value: f64,
    pub converged: bool,
    pub trace: PartitionSumTrace,
}

fn partition(curve: &PiecewiseLinearCurve, level: u32) -> Vec<Point> {
    let v = curve.vertices();
    match level {
        0 => vec![v[0].clone(), v[v.len() - 1].clone()],
        1 => v.to_vec(),
        _ => {
            let pieces = 1usize << (level - 1);
            let mut out = vec![v[0].clone()];
            for i in 0..curve.legs() {
                for j in 1..=pieces {
                    if j == pieces {
                        out.push(v[i + 1].clone());
                    } else {
                        out.push(curve.point_on_leg(i, j as f64 / pieces as f64));
                    }
                }
            }
            out
        }
    }
}

fn partition_sum<S: CausalSpace + ?Sized>(space: &S, pts: &[Point]) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut mesh: f64 = 0.0;
    for w in pts.windows(2) {
        if !space.causal(&w[0], &w[1]) {
            return Err(Error::InvalidCurve(format!(
                "partition points {:?} and {:?} are not causally related",
                w[0].0, w[1].0
            )));
        }
        sum += space.time_sep(&w[0], &w[1]);
        mesh = mesh.max(space.dist(&w[0], &w[1]));
    }
    Ok((sum, mesh))
}

/// Refine until two successive sums from level 2 on differ by less than
/// `tol`; returns the last sum.
pub fn tau_length<S: CausalSpace + ?Sized>(space: &S, curve: &PiecewiseLinearCurve, tol: f64) -> Result<TauLength> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut trace = PartitionSumTrace::default();
    let mut converged = false;
    for level in 0..=MAX_LEVEL {
        let (sum, mesh) = partition_sum(space, &partition(curve, level))?;
        let prev = trace.levels.last().map(|l| l.sum);
        trace.levels.push(TraceLevel { level, mesh, sum });
        if level >= 2 && prev.is_some_and(|p| (p - sum).abs() < tol) {
            converged = true;
            break;
        }
    }
    Ok(TauLength {
        value: trace.last(),
        converged,
        trace,
    })
}

/// No two sampled points are chronologically related. Samples are the
/// vertices and `samples` evenly spaced parameters.
pub fn is_null_curve<S: CausalSpace + ?Sized>(space: &S, curve: &PiecewiseLinearCurve, samples: usize) -> bool {
    let mut params: Vec<f64> = (0..samples.max(2)).map(|i| i as f64 / (samples.max(2) - 1) as f64).collect();
    let legs = curve.legs().max(1);
    params.extend((0..=legs).map(|i| i as f64 / legs as f64));
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    params.dedup();
    let pts: Vec<Point> = params.iter().map(|&s| curve.point_at(s)).collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if space.chron(&pts[i], &pts[j]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthComparison {
    pub l_tau: f64,
    /// `(delta, chain-cover cost at N = 1)`.
    pub v1_upper: Vec<(f64, f64)>,
    /// Every upper bound is at most `l_tau + tol`.
    pub bounded: bool,
}

/// Chain-cover upper bounds on `V^1` against `L_tau` over a scale grid.
pub fn compare_length_measure(
    space: &MinkowskiSpace,
    curve: &PiecewiseLinearCurve,
    deltas: &[f64],
    tol: f64,
) -> Result<LengthComparison> {
    let l_tau = tau_length(space, curve, tol)?.value;
    let region = Region::Curve(curve.clone());
    let opts = VerifyOptions::default();
    let mut v1_upper = Vec::with_capacity(deltas.len());
    for (i, &d) in deltas.iter().enumerate() {
        let mut c = curve_chain_cover(space, curve, d)?;
        c.verify(space, &region, opts.samples, opts.seed.wrapping_add(i as u64));
        v1_upper.push((d, c.cost(1.0)?));
    }
    let bounded = v1_upper.iter().all(|(_, v)| *v <= l_tau + tol);
    Ok(LengthComparison {
        l_tau,
        v1_upper,
        bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> MinkowskiSpace {
        MinkowskiSpace::new(2)
    }

    fn curve(pts: &[[f64; 2]]) -> PiecewiseLinearCurve {
        PiecewiseLinearCurve::new(&m2(), pts.iter().map(|p| Point::from(*p)).collect()).unwrap()
    }

    #[test]
    fn straight_segment_has_unit_length() {
        let l = tau_length(&m2(), &curve(&[[0.0, 0.0], [1.0, 0.0]]), 1e-6).unwrap();
        assert!((l.value - 1.0).abs() < 1e-12);
        assert!(l.converged);
    }

    #[test]
    fn null_zigzag_collapses() {
        let c = curve(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]);
        let l = tau_length(&m2(), &c, 1e-6).unwrap();
        assert_eq!(l.trace.levels[0].sum, 2.0);
        assert!(l.value < 1e-3);
        assert!(!is_null_curve(&m2(), &c, 16));
    }

    #[test]
    fn two_leg_chain() {
        let l = tau_length(&m2(), &curve(&[[0.0, 0.0], [1.0, 0.5], [2.0, 0.0]]), 1e-6).unwrap();
        assert!((l.value - 2.0 * 0.75f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn null_segment_is_null() {
        assert!(is_null_curve(&m2(), &curve(&[[0.0, 0.0], [1.0, 1.0]]), 32));
        assert!(!is_null_curve(&m2(), &curve(&[[0.0, 0.0], [1.0, 0.0]]), 32));
    }

    #[test]
    fn cover_measure_matches_length() {
        let c = curve(&[[0.0, 0.0], [1.0, 0.0]]);
        let r = compare_length_measure(&m2(), &c, &[0.5, 0.25, 0.125], 1e-6).unwrap();
        assert!(r.bounded);
        assert!(r.v1_upper.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn trace_csv() {
        let l = tau_length(&m2(), &curve(&[[0.0, 0.0], [1.0, 0.0]]), 1e-6).unwrap();
        let mut buf = Vec::new();
        l.trace.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("level,mesh,sum\n0,"));
    }
}
