use crate::causal::{CausalSpace, Point};
use crate::error::{Error, Result};
use crate::spaces::{LinearSubspace, PiecewiseLinearCurve};

const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Parallelepiped `origin + sum c_i b_i`, `c_i` in `ranges[i]`, inside a
/// linear subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceCube {
    pub subspace: LinearSubspace,
    pub origin: Point,
    pub ranges: Vec<(f64, f64)>,
}

impl SubspaceCube {
    pub fn new(subspace: LinearSubspace, origin: Point, ranges: Vec<(f64, f64)>) -> Result<Self> {
        if ranges.len() != subspace.dim() {
            return Err(Error::DegenerateInput(format!(
                "{} ranges for a {}-dimensional subspace",
                ranges.len(),
                subspace.dim()
            )));
        }
        if ranges.iter().any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::DegenerateInput(format!("bad cube ranges {ranges:?}")));
        }
        if origin.dim() != subspace.ambient().dimension() {
            return Err(Error::DegenerateInput("origin dimension mismatch".into()));
        }
        Ok(SubspaceCube {
            subspace,
            origin,
            ranges,
        })
    }

    /// Symmetric cube `[-h, h]^k` through the origin.
    pub fn centered(subspace: LinearSubspace, half_side: f64) -> Result<Self> {
        let k = subspace.dim();
        let n = subspace.ambient().dimension();
        SubspaceCube::new(subspace, Point::origin(n), vec![(-half_side, half_side); k])
    }

    pub fn at_params(&self, c: &[f64]) -> Point {
        self.subspace.embed(&self.origin, c)
    }

    /// Product of the coordinate side lengths times the `k`-volume of the
    /// basis parallelepiped.
    pub fn hausdorff_measure(&self) -> f64 {
        let k = self.subspace.dim();
        let b = self.subspace.basis();
        let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| {
            b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum::<f64>()
        });
        let sides: f64 = self.ranges.iter().map(|(a, b)| b - a).product();
        sides * gram.determinant().abs().sqrt()
    }
}

/// A bounded set to be measured.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Coordinate box `[lo, hi]` in the ambient space.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    SubspaceCube(SubspaceCube),
    Curve(PiecewiseLinearCurve),
    Points(Vec<Point>),
}

impl Region {
    pub fn unit_box(n: usize) -> Region {
        Region::Box {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Region::Box { .. } => "box",
            Region::SubspaceCube(_) => "subspace-cube",
            Region::Curve(_) => "curve",
            Region::Points(_) => "points",
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::SubspaceCube(c) => c.origin.dim(),
            Region::Curve(c) => c.dim(),
            Region::Points(p) => p.first().map(|x| x.dim()).unwrap_or(0),
        }
    }

    /// Dimension of the parameter box used by `sample_at`.
    pub fn param_dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::SubspaceCube(c) => c.ranges.len(),
            Region::Curve(_) | Region::Points(_) => 1,
        }
    }

    /// Empty sets and single points.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Region::Points(p) => p.len() <= 1,
            Region::Box { lo, hi } => lo.iter().zip(hi).any(|(a, b)| a > b),
            _ => false,
        }
    }

    /// Map `u` in `[0, 1)^param_dim` onto the region.
    pub fn sample_at(&self, u: &[f64]) -> Point {
        match self {
            Region::Box { lo, hi } => Point(
                lo.iter()
                    .zip(hi)
                    .zip(u)
                    .map(|((a, b), t)| a + t * (b - a))
                    .collect(),
            ),
            Region::SubspaceCube(c) => {
                let params: Vec<f64> = c.ranges.iter().zip(u).map(|((a, b), t)| a + t * (b - a)).collect();
                c.at_params(&params)
            }
            Region::Curve(c) => c.point_at(u[0]),
            Region::Points(p) => {
                let i = ((u[0] * p.len() as f64) as usize).min(p.len() - 1);
                p[i].clone()
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = MEMBERSHIP_TOLERANCE;
        match self {
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol),
            Region::SubspaceCube(c) => {
                let (params, resid) = c.subspace.coords_of(&c.origin, x);
                resid <= tol * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
                    && params
                        .iter()
                        .zip(&c.ranges)
                        .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol)
            }
            Region::Curve(c) => c.vertices().windows(2).any(|w| {
                let d: Vec<f64> = w[1].iter().zip(w[0].iter()).map(|(b, a)| b - a).collect();
                let len2: f64 = d.iter().map(|v| v * v).sum();
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    (x.iter().zip(w[0].iter()).zip(&d).map(|((xi, a), di)| (xi - a) * di).sum::<f64>() / len2)
                        .clamp(0.0, 1.0)
                };
                let dist2: f64 = x
                    .iter()
                    .zip(w[0].iter())
                    .zip(&d)
                    .map(|((xi, a), di)| (xi - a - s * di).powi(2))
                    .sum();
                dist2.sqrt() <= tol * (1.0 + len2.sqrt())
            }),
            Region::Points(p) => p
                .iter()
                .any(|q| q.iter().zip(x).all(|(a, b)| (a - b).abs() <= tol)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MinkowskiSpace;

    #[test]
    fn box_membership_and_sampling() {
        let r = Region::unit_box(2);
        assert!(r.contains(&[0.5, 1.0]));
        assert!(!r.contains(&[0.5, 1.1]));
        assert_eq!(r.sample_at(&[0.25, 0.75]).0, vec![0.25, 0.75]);
    }

    #[test]
    fn subspace_cube_measure_and_membership() {
        let m = MinkowskiSpace::new(3);
        let sub = LinearSubspace::new(m, vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let cube = SubspaceCube::centered(sub, 1.0).unwrap();
        assert!((cube.hausdorff_measure() - 4.0).abs() < 1e-12);
        let r = Region::SubspaceCube(cube);
        assert!(r.contains(&[0.0, 0.9, -1.0]));
        assert!(!r.contains(&[0.1, 0.9, -1.0]));
        assert!(!r.contains(&[0.0, 1.2, 0.0]));
    }

    #[test]
    fn curve_membership() {
        let m = MinkowskiSpace::new(2);
        let c = PiecewiseLinearCurve::new(&m, vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0])]).unwrap();
        let r = Region::Curve(c);
        assert!(r.contains(&[0.4, 0.0]));
        assert!(!r.contains(&[0.4, 0.1]));
    }

    #[test]
    fn degenerate_regions() {
        assert!(Region::Points(vec![]).is_degenerate());
        assert!(Region::Points(vec![Point::from([0.0, 0.0])]).is_degenerate());
        assert!(!Region::unit_box(2).is_degenerate());
    }
}
