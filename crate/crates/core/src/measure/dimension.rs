//! Scaling series of cover costs and the geometric-dimension estimator.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{stream_seed, Cover, Generator, VerifyOptions};
use crate::spaces::{MinkowskiSpace, Region};

/// Verified covers per scale, built once and reused for every `N`.
#[derive(Debug, Clone)]
pub struct CoverBank {
    deltas: Vec<f64>,
    covers: Vec<Vec<Cover>>,
    fractions: Vec<f64>,
}

impl CoverBank {
    /// Build every generator at every scale in parallel and keep the covers
    /// that pass verification. Generators that do not apply to the region
    /// are skipped; if none applies the result is `NoGenerator`.
    pub fn build(
        space: &MinkowskiSpace,
        region: &Region,
        generators: &[Generator],
        deltas: &[f64],
        opts: VerifyOptions,
    ) -> Result<CoverBank> {
        let cells: Vec<(usize, usize)> = (0..deltas.len())
            .flat_map(|j| (0..generators.len()).map(move |g| (j, g)))
            .collect();
        let built: Vec<Result<Vec<Cover>>> = cells
            .par_iter()
            .map(|&(j, g)| {
                let covers = match generators[g].build(space, region, deltas[j]) {
                    Ok(c) => c,
                    Err(Error::WrongGenerator { .. }) => return Err(Error::NoGenerator),
                    Err(e) => return Err(e),
                };
                Ok(covers
                    .into_iter()
                    .enumerate()
                    .map(|(i, mut c)| {
                        let seed = stream_seed(opts.seed, ((j * generators.len() + g) * 64 + i) as u64);
                        c.verify(space, region, opts.samples, seed);
                        c
                    })
                    .collect())
            })
            .collect();

        let mut covers = vec![Vec::new(); deltas.len()];
        let mut fractions = vec![0.0f64; deltas.len()];
        let mut applicable = false;
        for (&(j, _), r) in cells.iter().zip(built) {
            match r {
                Ok(cs) => {
                    applicable = true;
                    for c in cs {
                        let f = c.coverage.map(|v| v.fraction()).unwrap_or(0.0);
                        fractions[j] = fractions[j].max(f);
                        if c.is_verified() {
                            covers[j].push(c);
                        }
                    }
                }
                Err(Error::NoGenerator) => {}
                Err(e) => return Err(e),
            }
        }
        if !applicable {
            return Err(Error::NoGenerator);
        }
        Ok(CoverBank {
            deltas: deltas.to_vec(),
            covers,
            fractions,
        })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn covers(&self) -> &[Vec<Cover>] {
        &self.covers
    }

    /// Largest covered fraction seen at scale `j`.
    pub fn best_fraction(&self, j: usize) -> f64 {
        self.fractions[j]
    }

    /// `S_N(delta_j)`: cheapest verified cover, `+inf` if none verified.
    pub fn best_cost(&self, j: usize, n: f64) -> f64 {
        self.covers[j]
            .iter()
            .map(|c| c.raw_cost(n))
            .fold(f64::INFINITY, f64::min)
    }

    /// Least-squares slope of `log S_N` against `log delta` over the
    /// `fit` finest scales. Vanishing costs give `+inf`, missing covers
    /// `-inf`.
    pub fn slope(&self, n: f64, fit: usize) -> f64 {
        let m = self.deltas.len();
        let start = m.saturating_sub(fit);
        let mut xs = Vec::with_capacity(m - start);
        let mut ys = Vec::with_capacity(m - start);
        for j in start..m {
            let s = self.best_cost(j, n);
            if s == 0.0 {
                return f64::INFINITY;
            }
            if !s.is_finite() {
                return f64::NEG_INFINITY;
            }
            xs.push(self.deltas[j].ln());
            ys.push(s.ln());
        }
        least_squares_slope(&xs, &ys)
    }

    /// Costs at the listed `N`, one row per generator and scale, plus the
    /// monotone envelope of the best cost.
    pub fn series(&self, ns: &[f64]) -> ScalingSeries {
        let mut entries = Vec::new();
        for &n in ns {
            for (j, covers) in self.covers.iter().enumerate() {
                for c in covers {
                    entries.push(ScalingEntry {
                        generator: c.generator.clone(),
                        delta: self.deltas[j],
                        n,
                        cost: c.raw_cost(n),
                        verified: c.is_verified(),
                    });
                }
            }
            // V^N_delta is nonincreasing in delta: carry the running maximum
            // of the best cost from coarse to fine scales.
            let mut env = 0.0f64;
            for j in 0..self.deltas.len() {
                env = env.max(self.best_cost(j, n));
                entries.push(ScalingEntry {
                    generator: "envelope".into(),
                    delta: self.deltas[j],
                    n,
                    cost: env,
                    verified: !self.covers[j].is_empty(),
                });
            }
        }
        ScalingSeries { entries }
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingEntry {
    pub generator: String,
    pub delta: f64,
    pub n: f64,
    pub cost: f64,
    pub verified: bool,
}

/// Cover costs across scales.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalingSeries {
    pub entries: Vec<ScalingEntry>,
}

impl ScalingSeries {
    /// CSV with columns `generator, delta, N, cost, verified`; reals carry
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["generator", "delta", "N", "cost", "verified"])?;
        for e in &self.entries {
            out.write_record([
                e.generator.clone(),
                format!("{:.16e}", e.delta),
                format!("{:.16e}", e.n),
                format!("{:.16e}", e.cost),
                e.verified.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// Number of finest scales used in the slope fit.
    pub fit_scales: usize,
    pub verify: VerifyOptions,
    /// Bisection stops below this bracket width.
    pub tolerance: f64,
    /// A grid node with `|slope|` below this is returned as is.
    pub tie: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            fit_scales: 4,
            verify: VerifyOptions::default(),
            tolerance: 1e-6,
            tie: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub bracket: (f64, f64),
    /// `(N, slope)` on the grid.
    pub slopes: Vec<(f64, f64)>,
    pub diagnostics: Vec<String>,
    pub series: ScalingSeries,
}

/// Zero crossing in `N` of the fitted slope `d log S_N / d log delta`.
pub fn estimate_dimension(
    space: &MinkowskiSpace,
    region: &Region,
    generators: &[Generator],
    deltas: &[f64],
    n_grid: &[f64],
    opts: EstimateOptions,
) -> Result<DimensionEstimate> {
    check_scale_grid(deltas)?;
    if n_grid.len() < 2 || n_grid.windows(2).any(|w| !(w[0] < w[1])) || n_grid[0] < 0.0 {
        return Err(Error::Domain("N grid must be increasing, nonnegative, with at least two values".into()));
    }
    if region.is_degenerate() {
        return Ok(DimensionEstimate {
            value: 0.0,
            bracket: (0.0, 0.0),
            slopes: Vec::new(),
            diagnostics: vec!["degenerate region".into()],
            series: ScalingSeries::default(),
        });
    }

    let bank = CoverBank::build(space, region, generators, deltas, opts.verify)?;
    let mut diagnostics = Vec::new();
    for (j, cs) in bank.covers().iter().enumerate() {
        if cs.is_empty() {
            diagnostics.push(format!(
                "no verified cover at delta {:e} (best fraction {:.4})",
                deltas[j],
                bank.best_fraction(j)
            ));
        }
    }
    let fit = opts.fit_scales.min(deltas.len());
    let slopes: Vec<(f64, f64)> = n_grid.iter().map(|&n| (n, bank.slope(n, fit))).collect();
    let series = bank.series(n_grid);
    let done = |value, bracket, diagnostics| {
        Ok(DimensionEstimate {
            value,
            bracket,
            slopes: slopes.clone(),
            diagnostics,
            series: series.clone(),
        })
    };

    for (i, &(n, s)) in slopes.iter().enumerate() {
        if s.abs() < opts.tie {
            diagnostics.push(format!("slope vanishes at grid node N = {n}"));
            return done(n, (n, n), diagnostics);
        }
        if let Some(&(n1, s1)) = slopes.get(i + 1) {
            if s < 0.0 && s1 > 0.0 {
                if s1.abs() < opts.tie {
                    continue;
                }
                let (mut lo, mut hi) = (n, n1);
                for _ in 0..200 {
                    if hi - lo <= opts.tolerance {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    let sm = bank.slope(mid, fit);
                    if sm.abs() < f64::EPSILON {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if sm < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return done(0.5 * (lo + hi), (n, n1), diagnostics);
            }
        }
    }
    let listing: Vec<String> = slopes.iter().map(|(n, s)| format!("N={n}: {s:.4}")).collect();
    diagnostics.push(format!("slopes {}", listing.join(", ")));
    Err(Error::BracketNotFound(diagnostics.join("; ")))
}

fn check_scale_grid(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 5 {
        return Err(Error::Domain(format!("need at least 5 scales, got {}", deltas.len())));
    }
    if deltas.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Domain("scales must be positive".into()));
    }
    let r = deltas[1] / deltas[0];
    if !(r < 1.0) || deltas.windows(2).any(|w| ((w[1] / w[0]) / r - 1.0).abs() > 1e-9) {
        return Err(Error::Domain("scales must form a decreasing geometric sequence".into()));
    }
    Ok(())
}

/// `2^-3, ..., 2^-8`.
pub fn dyadic_scales(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|e| 2f64.powi(-e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::Point;

    #[test]
    fn slope_fit_is_exact_on_power_law() {
        let xs: Vec<f64> = (1..6).map(|i| (i as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x + 0.3).collect();
        assert!((least_squares_slope(&xs, &ys) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_or_irregular_grids() {
        assert!(check_scale_grid(&[0.5, 0.25, 0.125]).is_err());
        assert!(check_scale_grid(&[0.5, 0.25, 0.125, 0.06, 0.03]).is_err());
        assert!(check_scale_grid(&dyadic_scales(3, 8)).is_ok());
    }

    #[test]
    fn box_in_two_dimensions() {
        let m = MinkowskiSpace::new(2);
        let r = Region::unit_box(2);
        let est = estimate_dimension(
            &m,
            &r,
            &[Generator::Box],
            &dyadic_scales(3, 8),
            &[0.0, 1.0, 2.0, 3.0],
            EstimateOptions::default(),
        )
        .unwrap();
        assert!((est.value - 2.0).abs() < 0.15, "{est:?}");
    }

    #[test]
    fn point_cloud_is_zero_dimensional() {
        let m = MinkowskiSpace::new(2);
        let pts: Vec<Point> = (0..7).map(|i| Point::from([0.1 * i as f64, 0.0])).collect();
        let est = estimate_dimension(
            &m,
            &Region::Points(pts),
            &[Generator::Points],
            &dyadic_scales(3, 8),
            &[0.0, 1.0],
            EstimateOptions::default(),
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn all_negative_slopes_fail_to_bracket() {
        let m = MinkowskiSpace::new(2);
        let err = estimate_dimension(
            &m,
            &Region::unit_box(2),
            &[Generator::Box],
            &dyadic_scales(3, 8),
            &[0.0, 0.5, 1.0],
            EstimateOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BracketNotFound(_)));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = ScalingSeries {
            entries: vec![ScalingEntry {
                generator: "box".into(),
                delta: 0.125,
                n: 2.0,
                cost: 1.5,
                verified: true,
            }],
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("generator,delta,N,cost,verified\n"));
        assert!(text.contains("box,1.2500000000000000e-1,2.0000000000000000e0,1.5000000000000000e0,true"));
    }
}
