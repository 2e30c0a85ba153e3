//! Causal-space capability, causal diamonds and the normalized diamond
//! volume `rho_N = omega_N * tau^N`.

use std::f64::consts::PI;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::special::gamma_half_integer;

/// A point in chart coordinates. Coordinate 0 is time.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + s * v`
    pub fn offset(&self, v: &[f64], s: f64) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + s * b).collect())
    }

    pub fn midpoint(&self, other: &[f64]) -> Point {
        Point(self.0.iter().zip(other).map(|(a, b)| 0.5 * (a + b)).collect())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const D: usize> From<[f64; D]> for Point {
    fn from(v: [f64; D]) -> Self {
        Point(v.to_vec())
    }
}

pub fn euclidean(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Background metric, causal relations and time separation on a coordinate
/// domain. `time_sep` returns `f64::INFINITY` for unbounded separation and
/// is zero on pairs that are not chronologically related.
pub trait CausalSpace: Sync {
    fn dimension(&self) -> usize;

    /// Background distance `d`. The coordinate Euclidean distance unless a
    /// space says otherwise.
    fn dist(&self, p: &[f64], q: &[f64]) -> f64 {
        euclidean(p, q)
    }

    /// `p <= q`
    fn causal(&self, p: &[f64], q: &[f64]) -> bool;

    /// `p << q`
    fn chron(&self, p: &[f64], q: &[f64]) -> bool;

    fn time_sep(&self, p: &[f64], q: &[f64]) -> f64;

    /// Upper bound on the `d`-diameter of `J(p, q)`, assuming `p <= q`.
    fn diameter_bound(&self, p: &[f64], q: &[f64]) -> f64;

    /// Whether relations depend only on `q - p`. Lattice covers rely on it.
    fn translation_invariant(&self) -> bool {
        false
    }
}

/// `omega_N = pi^((N-1)/2) / (N Gamma((N+1)/2) 2^(N-1))`, the volume of a
/// unit-`tau` diamond in `N`-dimensional Minkowski space.
pub fn omega(n: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!("omega_N requires N > 0, got {n}")));
    }
    let half = n + 1.0;
    if half.fract() == 0.0 && half <= 340.0 {
        // (N+1)/2 is an integer or half-integer: exact recursion keeps
        // omega_1 = 1 and omega_2 = 1/2 bit-exact.
        let g = gamma_half_integer(half as u32);
        if g.is_finite() && g > 0.0 {
            let num = PI.powf((n - 1.0) / 2.0);
            let den = n * g * 2f64.powf(n - 1.0);
            if num.is_finite() && den.is_finite() && den > 0.0 {
                return Ok(num / den);
            }
        }
    }
    let ln = 0.5 * (n - 1.0) * PI.ln()
        - n.ln()
        - statrs::function::gamma::ln_gamma(0.5 * (n + 1.0))
        - (n - 1.0) * std::f64::consts::LN_2;
    Ok(ln.exp())
}

/// Volume of the Euclidean unit ball in `R^k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // alpha_k = pi^(k/2) / Gamma(k/2 + 1); Gamma argument is (k+2)/2.
    PI.powf(k as f64 / 2.0) / gamma_half_integer((k + 2) as u32)
}

/// Closed causal diamond `J(p, q)` with cached time separation and a
/// diameter bound. An empty diamond carries `empty = true`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalDiamond {
    pub p: Point,
    pub q: Point,
    pub tau: f64,
    pub diam_bound: f64,
    pub empty: bool,
}

impl CausalDiamond {
    pub fn empty_at(p: Point, q: Point) -> Self {
        CausalDiamond {
            p,
            q,
            tau: 0.0,
            diam_bound: 0.0,
            empty: true,
        }
    }

    /// Membership `p <= x <= q`.
    pub fn contains<S: CausalSpace + ?Sized>(&self, space: &S, x: &[f64]) -> bool {
        !self.empty && space.causal(&self.p, x) && space.causal(x, &self.q)
    }

    pub fn center(&self) -> Point {
        self.p.midpoint(&self.q)
    }
}

/// Build `J(p, q)`. Spacelike-separated distinct points give the empty
/// diamond; `p == q` gives the one-point diamond.
pub fn make_diamond<S: CausalSpace + ?Sized>(space: &S, p: Point, q: Point) -> CausalDiamond {
    if p == q {
        return CausalDiamond {
            p,
            q,
            tau: 0.0,
            diam_bound: 0.0,
            empty: false,
        };
    }
    if !space.causal(&p, &q) {
        return CausalDiamond::empty_at(p, q);
    }
    let tau = space.time_sep(&p, &q);
    let diam_bound = space.diameter_bound(&p, &q);
    CausalDiamond {
        p,
        q,
        tau,
        diam_bound,
        empty: false,
    }
}

/// `rho_N(J) = omega_N tau^N`, with `rho_N(empty) = 0`, `rho_0 = 1` on
/// nonempty diamonds and `+inf` propagated for `N > 0`.
///
/// `n` must be nonnegative.
pub fn rho(n: f64, diamond: &CausalDiamond) -> f64 {
    debug_assert!(n >= 0.0);
    if diamond.empty {
        return 0.0;
    }
    rho_tau(n, diamond.tau)
}

/// `rho_N` of a nonempty diamond with separation `tau`.
pub fn rho_tau(n: f64, tau: f64) -> f64 {
    if n == 0.0 {
        return 1.0;
    }
    if tau.is_infinite() {
        return f64::INFINITY;
    }
    if tau == 0.0 {
        return 0.0;
    }
    omega(n).expect("N > 0") * tau.powf(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MinkowskiSpace;

    #[test]
    fn omega_low_orders() {
        assert_eq!(omega(1.0).unwrap(), 1.0);
        assert_eq!(omega(2.0).unwrap(), 0.5);
        assert!((omega(3.0).unwrap() - PI / 12.0).abs() < 1e-15);
        assert!((omega(4.0).unwrap() - PI / 24.0).abs() < 1e-15);
    }

    #[test]
    fn omega_rejects_negative() {
        assert!(matches!(omega(-0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn omega_large_order_does_not_overflow() {
        let w = omega(300.0).unwrap();
        assert!(w.is_finite() && w > 0.0);
        // exact recursion agrees with the log-gamma route
        let n: f64 = 150.0;
        let ln = 0.5 * (n - 1.0) * PI.ln()
            - n.ln()
            - statrs::function::gamma::ln_gamma(0.5 * (n + 1.0))
            - (n - 1.0) * std::f64::consts::LN_2;
        let exact = omega(n).unwrap();
        assert!((exact / ln.exp() - 1.0).abs() < 1e-9, "{exact} vs {}", ln.exp());
    }

    #[test]
    fn omega_fractional_matches_log_gamma_route() {
        let n: f64 = 1.5;
        let direct = PI.powf(0.25)
            / (n * statrs::function::gamma::gamma(1.25) * 2f64.powf(0.5));
        assert!((omega(n).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn rho_conventions() {
        let m = MinkowskiSpace::new(3);
        let e = make_diamond(&m, Point::from([0.0, 0.0, 0.0]), Point::from([0.0, 1.0, 0.0]));
        assert!(e.empty);
        assert_eq!(rho(3.0, &e), 0.0);
        let d = make_diamond(&m, Point::from([0.0, 0.0, 0.0]), Point::from([2.0, 0.0, 0.0]));
        assert_eq!(rho(0.0, &d), 1.0);
        let mut inf = d.clone();
        inf.tau = f64::INFINITY;
        assert_eq!(rho(2.0, &inf), f64::INFINITY);
        assert_eq!(rho(0.0, &inf), 1.0);
    }

    #[test]
    fn rho_two_dimensional_tau_two() {
        let m = MinkowskiSpace::new(2);
        let d = make_diamond(&m, Point::from([0.0, 0.0]), Point::from([2.0, 0.0]));
        assert_eq!(rho(2.0, &d), 2.0);
    }

    #[test]
    fn make_diamond_cases() {
        let m = MinkowskiSpace::new(2);
        let d = make_diamond(&m, Point::from([0.0, 0.0]), Point::from([2.0, 1.0]));
        assert!((d.tau - 3f64.sqrt()).abs() < 1e-15);
        let s = make_diamond(&m, Point::from([0.0, 0.0]), Point::from([0.0, 1.0]));
        assert!(s.empty);
        let null = make_diamond(&m, Point::from([0.0, 0.0]), Point::from([1.0, 1.0]));
        assert!(!null.empty);
        assert_eq!(null.tau, 0.0);
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }
}
