//! Cover generators. Each builds an unverified cover of a region by
//! diamonds of diameter at most `delta`.

use crate::causal::{make_diamond, CausalSpace, Point};
use crate::error::{Error, Result};
use crate::measure::cover::{Cover, CoverPiece, DiamondLattice, NullLattice};
use crate::spaces::{MinkowskiSpace, PiecewiseLinearCurve, Region, SignatureClass, SubspaceCube};

/// Cover strategies known to the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Cell grid on a spacelike cube, diamonds along the timelike normal.
    Grid,
    /// Cell grid on an ambient box or a timelike cube.
    Box,
    /// Checkerboard of diamonds tiling a box of `R^2_1` (`C = 1`).
    Tiling,
    /// Thin null diamonds on a null cube with `t = delta^(-1 + 2/eps)`.
    Null { eps: f64 },
    /// `Null` over several `eps`; each scale keeps every member.
    NullFamily { eps: Vec<f64> },
    /// Chain of diamonds along a causal curve.
    CurveChain,
    /// One-point diamonds on a finite set.
    Points,
}

/// `eps` ladder used by the null family.
pub const NULL_FAMILY_EPS: [f64; 5] = [0.5, 0.4, 0.3, 0.2, 0.1];

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::Grid => "grid".into(),
            Generator::Box => "box".into(),
            Generator::Tiling => "tiling".into(),
            Generator::Null { eps } => format!("null(eps={eps})"),
            Generator::NullFamily { .. } => "null-family".into(),
            Generator::CurveChain => "curve-chain".into(),
            Generator::Points => "points".into(),
        }
    }

    pub fn null_family() -> Generator {
        Generator::NullFamily {
            eps: NULL_FAMILY_EPS.to_vec(),
        }
    }

    /// Generators that apply to `region` in `space`.
    pub fn defaults_for(space: &MinkowskiSpace, region: &Region) -> Vec<Generator> {
        let mut out = Vec::new();
        match region {
            Region::Box { .. } => {
                out.push(Generator::Box);
                if space.dimension() == 2 && space.cone() == 1.0 {
                    out.push(Generator::Tiling);
                }
            }
            Region::SubspaceCube(c) => match c.subspace.class() {
                SignatureClass::Spacelike => out.push(Generator::Grid),
                SignatureClass::Timelike => out.push(Generator::Box),
                SignatureClass::NullDegenerate => out.push(Generator::null_family()),
            },
            Region::Curve(_) => out.push(Generator::CurveChain),
            Region::Points(_) => out.push(Generator::Points),
        }
        out
    }

    /// Build the covers of this generator at scale `delta`.
    pub fn build(&self, space: &MinkowskiSpace, region: &Region, delta: f64) -> Result<Vec<Cover>> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got {delta}")));
        }
        let wrong = |reason: &str| Error::WrongGenerator {
            generator: self.name(),
            reason: reason.into(),
        };
        match (self, region) {
            (Generator::Grid, Region::SubspaceCube(c)) => Ok(vec![grid_cover(c, delta)?]),
            (Generator::Box, Region::Box { lo, hi }) => Ok(vec![box_cover(space, lo, hi, delta)?]),
            (Generator::Box, Region::SubspaceCube(c)) => Ok(vec![timelike_cube_cover(c, delta)?]),
            (Generator::Tiling, Region::Box { lo, hi }) => Ok(vec![tiling_cover(space, lo, hi, delta)?]),
            (Generator::Null { eps }, Region::SubspaceCube(c)) => Ok(vec![null_cover(c, delta, *eps)?]),
            (Generator::NullFamily { eps }, Region::SubspaceCube(c)) => {
                eps.iter().map(|&e| null_cover(c, delta, e)).collect()
            }
            (Generator::CurveChain, Region::Curve(curve)) => Ok(vec![curve_chain_cover(space, curve, delta)?]),
            (Generator::Points, Region::Points(pts)) => Ok(vec![point_cover(space, pts)]),
            (_, r) => Err(wrong(&format!("region kind `{}`", r.kind()))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Half height `T` of the smallest diamond `J(-T u, T u)` around the unit
/// timelike `axis` that contains the parallelepiped spanned by `edges`
/// (centered at the origin).
fn circumscribing_half_height(space: &MinkowskiSpace, edges: &[Vec<f64>], axis: &[f64]) -> f64 {
    let k = edges.len();
    let n = axis.len();
    let mut best: f64 = 0.0;
    for code in 0..(1usize << k) {
        let mut y = vec![0.0; n];
        for (j, e) in edges.iter().enumerate() {
            let s = if code >> j & 1 == 1 { 0.5 } else { -0.5 };
            y.iter_mut().zip(e).for_each(|(a, b)| *a += s * b);
        }
        let yt = -space.inner(&y, axis);
        let perp = (space.interval(&y) + yt * yt).max(0.0);
        best = best.max(yt.abs() + perp.sqrt());
    }
    best
}

/// Grid of parallelepiped cells over `corner + sum c_j edges_j`, `c` in
/// `[0,1]^k`, each inside a translate of one diamond along `axis`.
fn parallelepiped_cover(
    space: &MinkowskiSpace,
    name: &str,
    corner: &[f64],
    edges: &[Vec<f64>],
    axis: &[f64],
    delta: f64,
) -> Result<Cover> {
    let lens: Vec<f64> = edges.iter().map(|e| norm(e)).collect();
    let unit: Vec<Vec<f64>> = edges
        .iter()
        .zip(&lens)
        .map(|(e, &l)| if l > 0.0 { e.iter().map(|x| x / l).collect() } else { e.clone() })
        .collect();
    let t1 = circumscribing_half_height(space, &unit, axis);
    let d1 = diameter_of(space, axis, t1);
    let h = if d1 > 0.0 { delta / d1 } else { f64::INFINITY };
    let mut counts: Vec<u64> = lens
        .iter()
        .map(|&l| if l > 0.0 { ((l / h) * (1.0 - 1e-12)).ceil().max(1.0) as u64 } else { 1 })
        .collect();

    loop {
        let lattice = lattice_with_counts(space, corner, edges, axis, counts.clone());
        if lattice.diam_bound <= delta * (1.0 + 1e-12) {
            return Ok(Cover::new(name, delta, vec![CoverPiece::Lattice(lattice)]));
        }
        let grow = lattice.diam_bound / delta;
        for (m, &l) in counts.iter_mut().zip(&lens) {
            if l > 0.0 {
                *m = ((*m as f64 * grow).ceil() as u64).max(*m + 1);
            }
        }
    }
}

fn lattice_with_counts(
    space: &MinkowskiSpace,
    corner: &[f64],
    edges: &[Vec<f64>],
    axis: &[f64],
    counts: Vec<u64>,
) -> DiamondLattice {
    let steps: Vec<Vec<f64>> = edges
        .iter()
        .zip(&counts)
        .map(|(e, &m)| e.iter().map(|x| x / m as f64).collect())
        .collect();
    let t = circumscribing_half_height(space, &steps, axis);
    let mut anchor = corner.to_vec();
    for s in &steps {
        anchor.iter_mut().zip(s).for_each(|(a, b)| *a += 0.5 * b);
    }
    let upper: Vec<f64> = axis.iter().map(|a| t * a).collect();
    let lower: Vec<f64> = upper.iter().map(|a| -a).collect();
    DiamondLattice {
        anchor: Point(anchor),
        lower,
        upper,
        tau: 2.0 * t,
        diam_bound: diameter_of(space, axis, t),
        steps,
        counts,
        tiles: true,
    }
}

fn diameter_of(space: &MinkowskiSpace, axis: &[f64], t: f64) -> f64 {
    let q: Vec<f64> = axis.iter().map(|a| t * a).collect();
    let p: Vec<f64> = q.iter().map(|a| -a).collect();
    space.diamond_diameter(&p, &q)
}

fn cube_geometry(cube: &SubspaceCube) -> (Vec<f64>, Vec<Vec<f64>>) {
    let lows: Vec<f64> = cube.ranges.iter().map(|r| r.0).collect();
    let corner = cube.at_params(&lows).0;
    let edges = cube
        .subspace
        .basis()
        .iter()
        .zip(&cube.ranges)
        .map(|(b, (lo, hi))| b.iter().map(|x| x * (hi - lo)).collect())
        .collect();
    (corner, edges)
}

/// Grid cover of a cube in a spacelike subspace by diamonds along the
/// timelike normal.
pub fn grid_cover(cube: &SubspaceCube, delta: f64) -> Result<Cover> {
    if cube.subspace.class() != SignatureClass::Spacelike {
        return Err(Error::WrongGenerator {
            generator: "grid".into(),
            reason: format!("subspace is {}", cube.subspace.class().as_str()),
        });
    }
    let space = *cube.subspace.ambient();
    let axis = cube.subspace.timelike_normal()?;
    let (corner, edges) = cube_geometry(cube);
    parallelepiped_cover(&space, "grid", &corner, &edges, &axis, delta)
}

/// Grid cover with exactly `j` cells per side.
pub fn grid_cover_cells(cube: &SubspaceCube, j: u64) -> Result<Cover> {
    if j == 0 {
        return Err(Error::Domain("cell count must be positive".into()));
    }
    let space = *cube.subspace.ambient();
    let axis = cube.subspace.timelike_normal()?;
    let (corner, edges) = cube_geometry(cube);
    let lattice = lattice_with_counts(&space, &corner, &edges, &axis, vec![j; edges.len()]);
    let scale = lattice.diam_bound;
    Ok(Cover::new("grid", scale, vec![CoverPiece::Lattice(lattice)]))
}

/// Grid cover of a coordinate box, diamonds along the time axis.
pub fn box_cover(space: &MinkowskiSpace, lo: &[f64], hi: &[f64], delta: f64) -> Result<Cover> {
    let n = space.dimension();
    if lo.len() != n || hi.len() != n || lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
        return Err(Error::DegenerateInput("box bounds do not match the space".into()));
    }
    let edges: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = hi[i] - lo[i];
            e
        })
        .collect();
    let mut axis = vec![0.0; n];
    axis[0] = 1.0 / space.cone();
    parallelepiped_cover(space, "box", lo, &edges, &axis, delta)
}

/// Grid cover of a cube in a timelike subspace, diamonds along its time
/// axis.
pub fn timelike_cube_cover(cube: &SubspaceCube, delta: f64) -> Result<Cover> {
    if cube.subspace.class() != SignatureClass::Timelike {
        return Err(Error::WrongGenerator {
            generator: "box".into(),
            reason: format!("subspace is {}", cube.subspace.class().as_str()),
        });
    }
    let space = *cube.subspace.ambient();
    let axis = cube.subspace.time_axis()?;
    let (corner, edges) = cube_geometry(cube);
    parallelepiped_cover(&space, "box", &corner, &edges, &axis, delta)
}

/// Checkerboard of square diamonds of half height `delta / 2` covering a
/// box of `R^2_1`. The members overlap only on edges, so the `N = 2` cost
/// tends to the area.
pub fn tiling_cover(space: &MinkowskiSpace, lo: &[f64], hi: &[f64], delta: f64) -> Result<Cover> {
    let wrong = |reason: &str| Error::WrongGenerator {
        generator: "tiling".into(),
        reason: reason.into(),
    };
    if space.dimension() != 2 {
        return Err(wrong("needs a two-dimensional space"));
    }
    if space.cone() != 1.0 {
        return Err(wrong("needs cone scale 1"));
    }
    let t = 0.5 * delta;
    let span = |i: usize| ((hi[i] - lo[i] + 4.0 * t) / (2.0 * t)).ceil() as u64 + 1;
    let counts = vec![span(0), span(1)];
    let steps = vec![vec![2.0 * t, 0.0], vec![0.0, 2.0 * t]];
    let lattice = |offset: f64| DiamondLattice {
        anchor: Point(vec![lo[0] - 2.0 * t + offset, lo[1] - 2.0 * t + offset]),
        lower: vec![-t, 0.0],
        upper: vec![t, 0.0],
        tau: 2.0 * t,
        diam_bound: 2.0 * t,
        steps: steps.clone(),
        counts: counts.clone(),
        tiles: false,
    };
    Ok(Cover::new(
        "tiling",
        delta,
        vec![CoverPiece::Lattice(lattice(0.0)), CoverPiece::Lattice(lattice(t))],
    ))
}

/// Thin diamonds `J(-w, w)`, `w = (l nu + t e0) / 2`, with
/// `t = delta^(-1 + 2/eps)` and `l` chosen so that `|2w| = delta`. Each
/// diamond contains a cell of side `theta l` along `nu` and `2 s` along
/// the spatial directions, `theta = 2/(k+1)`.
pub fn null_cover(cube: &SubspaceCube, delta: f64, eps: f64) -> Result<Cover> {
    let name = format!("null(eps={eps})");
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let sub = &cube.subspace;
    if sub.class() != SignatureClass::NullDegenerate {
        return Err(Error::WrongGenerator {
            generator: name,
            reason: format!("subspace is {}", sub.class().as_str()),
        });
    }
    let space = *sub.ambient();
    if space.cone() != 1.0 {
        return Err(Error::WrongGenerator {
            generator: name,
            reason: "needs cone scale 1".into(),
        });
    }
    let k = sub.dim();
    let (nu, spatial) = sub.null_frame()?;

    // Bounding box of the cube in frame coordinates about its origin.
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for code in 0..(1usize << k) {
        let c: Vec<f64> = cube
            .ranges
            .iter()
            .enumerate()
            .map(|(j, r)| if code >> j & 1 == 1 { r.1 } else { r.0 })
            .collect();
        let x = cube.at_params(&c);
        let d: Vec<f64> = x.iter().zip(cube.origin.iter()).map(|(a, b)| a - b).collect();
        let coords: Vec<f64> = std::iter::once(dot(&d, &nu))
            .chain(spatial.iter().map(|e| dot(&d, e)))
            .collect();
        for j in 0..k {
            lo[j] = lo[j].min(coords[j]);
            hi[j] = hi[j].max(coords[j]);
        }
    }
    let base = |a: f64, b: &[f64]| {
        let mut p = cube.origin.offset(&nu, a);
        for (e, bj) in spatial.iter().zip(b) {
            p = p.offset(e, *bj);
        }
        p
    };

    if k == 1 {
        let len = hi[0] - lo[0];
        let m = ((len / delta) * (1.0 - 1e-12)).ceil().max(1.0) as u64;
        let step = len / m as f64;
        let half: Vec<f64> = nu.iter().map(|v| 0.5 * step * v).collect();
        let lattice = DiamondLattice {
            anchor: base(lo[0] + 0.5 * step, &[]),
            lower: half.iter().map(|v| -v).collect(),
            upper: half,
            tau: 0.0,
            diam_bound: step,
            steps: vec![nu.iter().map(|v| step * v).collect()],
            counts: vec![m],
            tiles: true,
        };
        return Ok(Cover::new(name, delta, vec![CoverPiece::Lattice(lattice)]));
    }

    if !(delta < 1.0) {
        return Err(Error::Domain(format!("null cover needs delta < 1, got {delta}")));
    }
    let s2 = std::f64::consts::SQRT_2;
    let t = delta.powf(-1.0 + 2.0 / eps);
    let disc = 4.0 * delta * delta - 2.0 * t * t;
    let l = 0.5 * (-s2 * t + disc.sqrt());
    if !(l > 0.0) {
        return Err(Error::Domain(format!("scale {delta} too coarse for eps = {eps}")));
    }
    let alpha = l / (2.0 * s2);
    let theta = 2.0 / (k as f64 + 1.0);
    let step_nu = theta * l;
    let half_side = ((t * (1.0 - theta) * alpha + 0.25 * t * t) / (k as f64 - 1.0)).sqrt() * (1.0 - 1e-9);
    let step_spatial = 2.0 * half_side;
    let cells = |len: f64, step: f64| -> u128 { ((len / step) * (1.0 - 1e-12)).ceil().max(1.0) as u128 };
    let mut counts = vec![cells(hi[0] - lo[0], step_nu)];
    for j in 1..k {
        counts.push(cells(hi[j] - lo[j], step_spatial));
    }
    let b0: Vec<f64> = (1..k).map(|j| lo[j] + 0.5 * step_spatial).collect();
    let lattice = NullLattice {
        anchor: base(lo[0] + 0.5 * step_nu, &b0),
        nu,
        spatial,
        length: l,
        thickness: t,
        step_nu,
        step_spatial,
        counts,
        tau: (t * (t + s2 * l)).sqrt(),
        diam_bound: (l * l + s2 * l * t + t * t).sqrt(),
    };
    Ok(Cover::new(name, delta, vec![CoverPiece::Null(lattice)]))
}

/// Consecutive diamonds along each leg of a causal polyline, each leg split
/// evenly until every diamond has diameter at most `delta`.
pub fn curve_chain_cover<S: CausalSpace + ?Sized>(
    space: &S,
    curve: &PiecewiseLinearCurve,
    delta: f64,
) -> Result<Cover> {
    let mut pieces = Vec::new();
    let v = curve.vertices();
    if v.len() == 1 {
        pieces.push(CoverPiece::Single(make_diamond(space, v[0].clone(), v[0].clone())));
    }
    for w in v.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !space.causal(a, b) {
            return Err(Error::InvalidCurve("leg is not future causal".into()));
        }
        let full = space.diameter_bound(a, b);
        let mut m = ((full / delta) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        loop {
            let leg: Vec<_> = (0..m)
                .map(|i| {
                    let s0 = i as f64 / m as f64;
                    let s1 = (i + 1) as f64 / m as f64;
                    let p = if i == 0 { a.clone() } else { lerp(a, b, s0) };
                    let q = if i + 1 == m { b.clone() } else { lerp(a, b, s1) };
                    make_diamond(space, p, q)
                })
                .collect();
            if leg.iter().all(|d| !d.empty && d.diam_bound <= delta * (1.0 + 1e-12)) {
                pieces.extend(leg.into_iter().map(CoverPiece::Single));
                break;
            }
            m *= 2;
        }
    }
    Ok(Cover::new("curve-chain", delta, pieces))
}

fn lerp(a: &Point, b: &Point, s: f64) -> Point {
    Point(a.iter().zip(b.iter()).map(|(x, y)| x + s * (y - x)).collect())
}

/// One-point diamonds `J(x, x)` on the distinct points of a finite set.
pub fn point_cover<S: CausalSpace + ?Sized>(space: &S, points: &[Point]) -> Cover {
    let mut distinct: Vec<&Point> = Vec::new();
    for p in points {
        if !distinct.iter().any(|q| *q == p) {
            distinct.push(p);
        }
    }
    let pieces = distinct
        .into_iter()
        .map(|p| CoverPiece::Single(make_diamond(space, p.clone(), p.clone())))
        .collect();
    Cover::new("points", 0.0, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::omega;
    use crate::spaces::LinearSubspace;

    fn spacelike_cube(k: usize) -> SubspaceCube {
        let n = k + 1;
        let basis = (1..=k)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let sub = LinearSubspace::new(MinkowskiSpace::new(n), basis).unwrap();
        SubspaceCube::centered(sub, 1.0).unwrap()
    }

    fn null_plane_cube() -> SubspaceCube {
        let sub = LinearSubspace::new(
            MinkowskiSpace::new(3),
            vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        SubspaceCube::new(sub, Point::origin(3), vec![(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn grid_two_cube_ten_cells() {
        let c = grid_cover_cells(&spacelike_cube(2), 10).unwrap();
        assert_eq!(c.len(), 100.0);
        let CoverPiece::Lattice(l) = &c.pieces[0] else { panic!() };
        assert!((l.tau - 2.0 * 2f64.sqrt() / 10.0).abs() < 1e-14);
        assert!((c.raw_cost(2.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_segment_one_cell() {
        let c = grid_cover_cells(&spacelike_cube(1), 1).unwrap();
        let CoverPiece::Lattice(l) = &c.pieces[0] else { panic!() };
        assert!((l.tau - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_by_scale_matches_cells() {
        let delta = 2.0 * 2f64.sqrt() / 10.0;
        let c = grid_cover(&spacelike_cube(2), delta).unwrap();
        assert_eq!(c.len(), 100.0);
    }

    #[test]
    fn grid_rejects_null_cube() {
        assert!(matches!(grid_cover(&null_plane_cube(), 0.1), Err(Error::WrongGenerator { .. })));
    }

    #[test]
    fn box_cover_verifies_and_respects_scale() {
        let m = MinkowskiSpace::new(3);
        let mut c = box_cover(&m, &[0.0; 3], &[1.0; 3], 0.2).unwrap();
        assert!(c.max_diameter() <= 0.2 * (1.0 + 1e-12));
        assert!(c.verify(&m, &Region::unit_box(3), 2000, 5).passed());
    }

    #[test]
    fn tiling_cost_tends_to_area() {
        let m = MinkowskiSpace::new(2);
        let mut c = tiling_cover(&m, &[0.0, 0.0], &[1.0, 1.0], 1.0 / 256.0).unwrap();
        assert!(c.verify(&m, &Region::unit_box(2), 3000, 2).passed());
        let cost = c.cost(2.0).unwrap();
        assert!(cost > 1.0 && cost < 1.1, "{cost}");
    }

    #[test]
    fn null_cover_parameters() {
        let c = null_cover(&null_plane_cube(), 0.01, 0.5).unwrap();
        let CoverPiece::Null(l) = &c.pieces[0] else { panic!() };
        assert!((l.thickness - 1e-6).abs() < 1e-18);
        assert!((l.diam_bound - 0.01).abs() < 1e-15);
    }

    #[test]
    fn null_cover_verifies_at_tiny_thickness() {
        let cube = null_plane_cube();
        let m = *cube.subspace.ambient();
        let region = Region::SubspaceCube(cube.clone());
        for eps in [0.5, 0.1] {
            let mut c = null_cover(&cube, 1.0 / 64.0, eps).unwrap();
            assert!(c.verify(&m, &region, 2000, 9).passed(), "eps {eps}");
        }
    }

    #[test]
    fn null_line_has_zero_cost() {
        let sub = LinearSubspace::new(MinkowskiSpace::new(2), vec![vec![1.0, 1.0]]).unwrap();
        let cube = SubspaceCube::new(sub, Point::origin(2), vec![(0.0, 1.0)]).unwrap();
        let m = *cube.subspace.ambient();
        let mut c = null_cover(&cube, 0.1, 0.5).unwrap();
        assert!(c.verify(&m, &Region::SubspaceCube(cube), 500, 1).passed());
        assert_eq!(c.cost(1.0).unwrap(), 0.0);
    }

    #[test]
    fn chain_cover_of_unit_segment() {
        let m = MinkowskiSpace::new(2);
        let curve = PiecewiseLinearCurve::new(&m, vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0])]).unwrap();
        for delta in [1.0, 0.3, 0.01] {
            let mut c = curve_chain_cover(&m, &curve, delta).unwrap();
            assert!(c.verify(&m, &Region::Curve(curve.clone()), 500, 4).passed());
            assert!((c.cost(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!(c.cost(2.0).unwrap() <= omega(2.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn point_cloud_counts() {
        let m = MinkowskiSpace::new(2);
        let pts: Vec<Point> = (0..5).map(|i| Point::from([i as f64, 0.3 * i as f64])).collect();
        let mut c = point_cover(&m, &pts);
        assert!(c.verify(&m, &Region::Points(pts), 100, 0).passed());
        assert_eq!(c.cost(0.0).unwrap(), 5.0);
        assert_eq!(c.cost(1.0).unwrap(), 0.0);
    }
}
