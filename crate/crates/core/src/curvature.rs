//! Comparison functions, timelike Bishop-Gromov ratio bounds and the
//! doubling constants they imply.

use std::io::Write;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

const QUAD_TOL: f64 = 1e-12;

/// `s_K(t)`: `sin(sqrt(K) t)/sqrt(K)`, `t`, or `sinh(sqrt(-K) t)/sqrt(-K)`.
pub fn s_k(k: f64, t: f64) -> f64 {
    if k > 0.0 {
        let r = k.sqrt();
        (r * t).sin() / r
    } else if k < 0.0 {
        let r = (-k).sqrt();
        (r * t).sinh() / r
    } else {
        t
    }
}

/// `d/dt s_K(t)`.
pub fn s_k_prime(k: f64, t: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * t).cos()
    } else if k < 0.0 {
        ((-k).sqrt() * t).cosh()
    } else {
        1.0
    }
}

/// Largest admissible radius `pi sqrt(N/K)` for `K > 0`, else infinity.
pub fn radius_cap(k: f64, n: f64) -> f64 {
    if k > 0.0 {
        std::f64::consts::PI * (n / k).sqrt()
    } else {
        f64::INFINITY
    }
}

fn check_params(k: f64, n: f64) -> Result<()> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::Domain(format!("N must be at least 1, got {n}")));
    }
    if !k.is_finite() {
        return Err(Error::Domain(format!("K must be finite, got {k}")));
    }
    Ok(())
}

/// `int_0^r s_{K/N}^N / int_0^R s_{K/N}^N`, the lower bound on
/// `m(E_r)/m(E_R)`.
pub fn bg_ratio_bound(k: f64, n: f64, r: f64, big_r: f64) -> Result<f64> {
    check_params(k, n)?;
    if !(r > 0.0 && r <= big_r) {
        return Err(Error::Domain(format!("need 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    let cap = radius_cap(k, n);
    if big_r > cap {
        return Err(Error::Domain(format!("radius {big_r} exceeds pi sqrt(N/K) = {cap}")));
    }
    if r == big_r {
        return Ok(1.0);
    }
    if k == 0.0 {
        return Ok((r / big_r).powf(n + 1.0));
    }
    let kn = k / n;
    let f = |t: f64| s_k(kn, t).max(0.0).powf(n);
    let num = integrate(f, 0.0, r, QUAD_TOL);
    let tail = integrate(f, r, big_r, QUAD_TOL);
    Ok(num / (num + tail))
}

/// `L = 2^(N+1)` for `K >= 0`; `2^(N+1) cosh(sqrt(|K|/N) R*)^N` for `K < 0`.
pub fn tcd_doubling_constant(k: f64, n: f64, r_star: f64) -> Result<f64> {
    check_params(k, n)?;
    let base = 2f64.powf(n + 1.0);
    if k >= 0.0 {
        return Ok(base);
    }
    if !r_star.is_finite() || !(r_star > 0.0) {
        return Err(Error::Domain("K < 0 needs a finite positive R*".into()));
    }
    let c = ((-k / n).sqrt() * r_star).cosh();
    Ok(base * c.powf(n).max(1.0))
}

/// `dim <= N + 1` under wTCD, `dim <= N` under TMCP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticBound {
    Wtcd,
    Tmcp,
}

pub fn dimension_consistency(n: f64, big_n: f64, mode: SyntheticBound) -> bool {
    match mode {
        SyntheticBound::Wtcd => n <= big_n + 1.0,
        SyntheticBound::Tmcp => n <= big_n,
    }
}

/// Bishop-Gromov profile of `tau`-balls in a solid timelike cone of
/// `R^n_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BgProbe {
    /// `(r, vol(E_r), vol(E_r) / int_0^r t^N)`.
    pub rows: Vec<(f64, f64, f64)>,
    pub nonincreasing: bool,
}

/// `E` is the solid cone from the origin of hyperbolic half-opening `beta`
/// around the time axis. `vol(E_r) = r^n/n * |S^(n-2)| * int_0^beta
/// sinh^(n-2)`, so the profile scales as `r^(n-N-1)`.
pub fn bg_monotonicity_probe(n: usize, big_n: f64, r_grid: &[f64], beta: f64) -> Result<BgProbe> {
    if n < 2 {
        return Err(Error::Domain("cone probe needs n >= 2".into()));
    }
    check_params(0.0, big_n)?;
    if r_grid.iter().any(|r| !(*r > 0.0)) || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("radius grid must be positive and increasing".into()));
    }
    let sphere = if n == 2 {
        2.0
    } else {
        let k = n - 1;
        k as f64 * crate::causal::unit_ball_volume(k)
    };
    let angular = integrate(|th: f64| th.sinh().powi(n as i32 - 2), 0.0, beta, QUAD_TOL);
    let rows: Vec<(f64, f64, f64)> = r_grid
        .iter()
        .map(|&r| {
            let vol = r.powi(n as i32) / n as f64 * sphere * angular;
            let model = r.powf(big_n + 1.0) / (big_n + 1.0);
            (r, vol, vol / model)
        })
        .collect();
    let nonincreasing = rows.windows(2).all(|w| w[1].2 <= w[0].2 * (1.0 + 1e-12));
    Ok(BgProbe { rows, nonincreasing })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRow {
    pub k: f64,
    pub n: f64,
    pub r_star: f64,
    pub doubling: f64,
    /// `bg_ratio_bound(K, N, R*/2, R*)`.
    pub ratio: f64,
}

/// Doubling constant and half-radius ratio bound for each `(K, N, R*)`.
pub fn curvature_table(params: &[(f64, f64, f64)]) -> Result<Vec<CurvatureRow>> {
    params
        .iter()
        .map(|&(k, n, r_star)| {
            Ok(CurvatureRow {
                k,
                n,
                r_star,
                doubling: tcd_doubling_constant(k, n, r_star)?,
                ratio: bg_ratio_bound(k, n, 0.5 * r_star, r_star)?,
            })
        })
        .collect()
}

pub fn write_curvature_csv<W: Write>(rows: &[CurvatureRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["K", "N", "Rstar", "L", "ratio_bound"])?;
    for r in rows {
        out.write_record([r.k, r.n, r.r_star, r.doubling, r.ratio].map(|v| format!("{v:.16e}")))?;
    }
    out.flush()?;
    Ok(())
}
