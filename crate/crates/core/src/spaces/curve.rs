use crate::causal::{CausalSpace, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveClass {
    /// Every leg chronological.
    Timelike,
    /// No two vertices chronologically related.
    Null,
    CausalMixed,
}

/// Future-directed causal polygon. Vertex `i` sits at parameter `i / legs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCurve {
    vertices: Vec<Point>,
    class: CurveClass,
}

impl PiecewiseLinearCurve {
    pub fn new<S: CausalSpace + ?Sized>(space: &S, vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("a curve needs at least two vertices".into()));
        }
        let n = space.dimension();
        if let Some(v) = vertices.iter().find(|v| v.dim() != n || !v.is_finite()) {
            return Err(Error::InvalidCurve(format!("vertex {:?} is not a point of R^{n}", v.0)));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if !space.causal(&w[0], &w[1]) {
                return Err(Error::InvalidCurve(format!(
                    "leg {i} from {:?} to {:?} is not future-directed causal",
                    w[0].0, w[1].0
                )));
            }
        }
        let all_timelike = vertices.windows(2).all(|w| space.chron(&w[0], &w[1]));
        let any_chron = (0..vertices.len())
            .any(|i| ((i + 1)..vertices.len()).any(|j| space.chron(&vertices[i], &vertices[j])));
        let class = if all_timelike {
            CurveClass::Timelike
        } else if !any_chron {
            CurveClass::Null
        } else {
            CurveClass::CausalMixed
        };
        Ok(PiecewiseLinearCurve { vertices, class })
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn legs(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Point at parameter `s` in `[0, 1]`.
    pub fn point_at(&self, s: f64) -> Point {
        let m = self.legs();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let i = (x.floor() as usize).min(m - 1);
        self.point_on_leg(i, x - i as f64)
    }

    /// Point at fraction `u` in `[0, 1]` of leg `i`.
    pub fn point_on_leg(&self, i: usize, u: f64) -> Point {
        let a = &self.vertices[i];
        let b = &self.vertices[i + 1];
        Point(a.iter().zip(b.iter()).map(|(x, y)| x + u * (y - x)).collect())
    }
}
