use crate::causal::Point;
use crate::error::{Error, Result};
use crate::spaces::MinkowskiSpace;

/// Restricted Lorentz boost along one spatial axis, in units where the
/// light cone has slope `C` (`v` is a fraction of `C`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzBoost {
    velocity: f64,
    gamma: f64,
    axis: usize,
    cone: f64,
}

/// Boost with velocity `v` (|v| < 1) along spatial `axis` (>= 1) of `eta_1`.
pub fn lorentz_boost(v: f64, axis: usize) -> Result<LorentzBoost> {
    LorentzBoost::new(v, axis, 1.0)
}

impl LorentzBoost {
    pub fn new(v: f64, axis: usize, cone: f64) -> Result<Self> {
        if !(v.abs() < 1.0) {
            return Err(Error::Domain(format!("boost velocity must satisfy |v| < 1, got {v}")));
        }
        if axis == 0 {
            return Err(Error::Domain("boost axis must be spatial (>= 1)".into()));
        }
        Ok(LorentzBoost {
            velocity: v,
            gamma: 1.0 / (1.0 - v * v).sqrt(),
            axis,
            cone,
        })
    }

    pub fn for_space(space: &MinkowskiSpace, v: f64, axis: usize) -> Result<Self> {
        if axis >= crate::causal::CausalSpace::dimension(space) {
            return Err(Error::Domain(format!("axis {axis} out of range")));
        }
        LorentzBoost::new(v, axis, space.cone())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn apply_slice(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        let (g, v, c) = (self.gamma, self.velocity, self.cone);
        let t = x[0];
        let s = x[self.axis];
        out[0] = g * (t + v * s / c);
        out[self.axis] = g * (s + v * c * t);
        out
    }

    pub fn apply(&self, x: &Point) -> Point {
        Point(self.apply_slice(x))
    }

    /// Matrix of the map in coordinates (row-major, `n x n`).
    pub fn matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let columns: Vec<Vec<f64>> = (0..n)
            .map(|col| {
                let mut e = vec![0.0; n];
                e[col] = 1.0;
                self.apply_slice(&e)
            })
            .collect();
        (0..n).map(|r| columns.iter().map(|c| c[r]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::{make_diamond, rho, CausalSpace};

    #[test]
    fn zero_velocity_is_identity() {
        let b = lorentz_boost(0.0, 1).unwrap();
        assert_eq!(b.apply_slice(&[0.3, -1.2, 4.0]), vec![0.3, -1.2, 4.0]);
    }

    #[test]
    fn standard_boost_arithmetic() {
        let b = lorentz_boost(0.6, 1).unwrap();
        let y = b.apply_slice(&[1.0, 0.0]);
        assert!((y[0] - 1.25).abs() < 1e-15);
        assert!((y[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_superluminal() {
        assert!(lorentz_boost(1.0, 1).is_err());
        assert!(lorentz_boost(-1.5, 1).is_err());
    }

    #[test]
    fn determinant_one_and_preserves_interval() {
        let m = MinkowskiSpace::new(2);
        let b = lorentz_boost(0.6, 1).unwrap();
        let a = b.matrix(2);
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        assert!((det - 1.0).abs() < 1e-14);
        let v = [0.7, -0.2];
        assert!((m.interval(&b.apply_slice(&v)) - m.interval(&v)).abs() < 1e-14);
    }

    #[test]
    fn boosted_diamond_keeps_tau_and_rho() {
        let m = MinkowskiSpace::new(3);
        let b = LorentzBoost::for_space(&m, 0.6, 2).unwrap();
        let p = Point::from([0.1, 0.2, 0.3]);
        let q = Point::from([1.4, 0.5, 0.1]);
        let d0 = make_diamond(&m, p.clone(), q.clone());
        let d1 = make_diamond(&m, b.apply(&p), b.apply(&q));
        assert!((d0.tau - d1.tau).abs() <= 1e-12 * d0.tau);
        assert!((rho(3.0, &d0) - rho(3.0, &d1)).abs() <= 1e-12 * rho(3.0, &d0));
        assert!(m.chron(&d1.p, &d1.q));
    }

    #[test]
    fn scaled_cone_boost_preserves_eta_c() {
        let m = MinkowskiSpace::with_cone(2, 1.8).unwrap();
        let b = LorentzBoost::for_space(&m, -0.4, 1).unwrap();
        let v = [0.5, 0.3];
        assert!((m.interval(&b.apply_slice(&v)) - m.interval(&v)).abs() < 1e-14);
    }
}
