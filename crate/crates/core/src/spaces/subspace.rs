use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::causal::{CausalSpace, Point};
use crate::error::{Error, Result};
use crate::spaces::MinkowskiSpace;

/// Cutoff for treating a Gram eigenvalue or singular value as zero.
pub const GRAM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureClass {
    Spacelike,
    Timelike,
    NullDegenerate,
}

impl SignatureClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignatureClass::Spacelike => "spacelike",
            SignatureClass::Timelike => "timelike",
            SignatureClass::NullDegenerate => "null",
        }
    }
}

fn basis_matrix(basis: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, basis.len(), |r, c| basis[c][r])
}

fn eta_gram(basis: &[Vec<f64>], ambient: &MinkowskiSpace) -> DMatrix<f64> {
    let k = basis.len();
    DMatrix::from_fn(k, k, |i, j| ambient.inner(&basis[i], &basis[j]))
}

fn check_basis(basis: &[Vec<f64>], ambient: &MinkowskiSpace) -> Result<()> {
    let n = ambient.dimension();
    if basis.is_empty() {
        return Err(Error::DegenerateInput("empty basis".into()));
    }
    if basis.len() > n {
        return Err(Error::DegenerateInput(format!(
            "{} basis vectors in a {n}-dimensional space",
            basis.len()
        )));
    }
    if let Some(v) = basis.iter().find(|v| v.len() != n || v.iter().any(|c| !c.is_finite())) {
        return Err(Error::DegenerateInput(format!("bad basis vector {v:?}")));
    }
    let sv = basis_matrix(basis, n).singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= GRAM_TOLERANCE * max {
        return Err(Error::DegenerateInput("basis is rank deficient".into()));
    }
    Ok(())
}

/// Signature class of `span(basis)` under the ambient `eta_C`, read off the
/// eigenvalues of the Gram matrix.
pub fn classify_subspace(basis: &[Vec<f64>], ambient: &MinkowskiSpace) -> Result<SignatureClass> {
    check_basis(basis, ambient)?;
    let g = eta_gram(basis, ambient);
    let eig = SymmetricEigen::new(g);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let tol = GRAM_TOLERANCE * scale;
    let neg = eig.eigenvalues.iter().filter(|&&e| e < -tol).count();
    let zero = eig.eigenvalues.iter().filter(|&&e| e.abs() <= tol).count();
    match (neg, zero) {
        (0, 0) => Ok(SignatureClass::Spacelike),
        (1, 0) => Ok(SignatureClass::Timelike),
        (0, _) => Ok(SignatureClass::NullDegenerate),
        _ => Err(Error::DegenerateInput(format!(
            "Gram matrix has {neg} negative and {zero} zero eigenvalues"
        ))),
    }
}

/// Linear subspace of a Minkowski space with its signature class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    ambient: MinkowskiSpace,
    basis: Vec<Vec<f64>>,
    class: SignatureClass,
}

impl LinearSubspace {
    pub fn new(ambient: MinkowskiSpace, basis: Vec<Vec<f64>>) -> Result<Self> {
        let class = classify_subspace(&basis, &ambient)?;
        Ok(LinearSubspace {
            ambient,
            basis,
            class,
        })
    }

    pub fn class(&self) -> SignatureClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> &MinkowskiSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `origin + sum coeffs[i] * basis[i]`
    pub fn embed(&self, origin: &[f64], coeffs: &[f64]) -> Point {
        let mut x = origin.to_vec();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        Point(x)
    }

    /// Least-squares coefficients of `x - origin` in the basis, and the
    /// Euclidean residual.
    pub fn coords_of(&self, origin: &[f64], x: &[f64]) -> (Vec<f64>, f64) {
        let n = self.ambient.dimension();
        let b = basis_matrix(&self.basis, n);
        let d = DVector::from_iterator(n, x.iter().zip(origin).map(|(a, o)| a - o));
        let gram = b.transpose() * &b;
        let rhs = b.transpose() * &d;
        let c = gram
            .cholesky()
            .expect("basis checked for full rank")
            .solve(&rhs);
        let resid = (&b * &c - &d).norm();
        (c.iter().cloned().collect(), resid)
    }

    /// Unit future timelike vector `eta`-orthogonal to a spacelike subspace.
    pub fn timelike_normal(&self) -> Result<Vec<f64>> {
        if self.class != SignatureClass::Spacelike {
            return Err(Error::DegenerateInput("timelike normal needs a spacelike subspace".into()));
        }
        let n = self.ambient.dimension();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        let g = eta_gram(&self.basis, &self.ambient);
        let rhs = DVector::from_iterator(self.dim(), self.basis.iter().map(|b| self.ambient.inner(b, &e0)));
        let c = g.cholesky().expect("spacelike Gram is positive definite").solve(&rhs);
        let mut e = e0;
        for (ci, b) in c.iter().zip(&self.basis) {
            for (ei, bi) in e.iter_mut().zip(b) {
                *ei -= ci * bi;
            }
        }
        normalize_timelike(&self.ambient, e)
    }

    /// Unit future timelike vector inside a timelike subspace.
    pub fn time_axis(&self) -> Result<Vec<f64>> {
        if self.class != SignatureClass::Timelike {
            return Err(Error::DegenerateInput("time axis needs a timelike subspace".into()));
        }
        let eig = SymmetricEigen::new(eta_gram(&self.basis, &self.ambient));
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let coeffs: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        let u = self.embed(&vec![0.0; self.ambient.dimension()], &coeffs).0;
        normalize_timelike(&self.ambient, u)
    }

    /// For a null-degenerate subspace: the Euclidean-unit future null
    /// direction and a Euclidean-orthonormal basis of its `t = 0` slice.
    pub fn null_frame(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if self.class != SignatureClass::NullDegenerate {
            return Err(Error::DegenerateInput("null frame needs a null subspace".into()));
        }
        let n = self.ambient.dimension();
        let eig = SymmetricEigen::new(eta_gram(&self.basis, &self.ambient));
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        let coeffs: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        let mut nu = self.embed(&vec![0.0; n], &coeffs).0;
        let norm = nu.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if nu[0] < 0.0 { -1.0 } else { 1.0 };
        nu.iter_mut().for_each(|x| *x *= sign / norm);

        // t = 0 slice: Gram-Schmidt on the basis with the time component
        // removed along nu.
        let mut slice: Vec<Vec<f64>> = Vec::new();
        for b in &self.basis {
            let s = b[0] / nu[0];
            let mut v: Vec<f64> = b.iter().zip(&nu).map(|(bi, ni)| bi - s * ni).collect();
            v[0] = 0.0;
            for u in &slice {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 1e-9 {
                v.iter_mut().for_each(|x| *x /= len);
                slice.push(v);
            }
        }
        debug_assert_eq!(slice.len() + 1, self.dim());
        Ok((nu, slice))
    }
}

fn normalize_timelike(ambient: &MinkowskiSpace, mut v: Vec<f64>) -> Result<Vec<f64>> {
    let q = ambient.interval(&v);
    if !(q < 0.0) {
        return Err(Error::DegenerateInput("expected a timelike vector".into()));
    }
    let s = if v[0] < 0.0 { -1.0 } else { 1.0 } / (-q).sqrt();
    v.iter_mut().for_each(|x| *x *= s);
    Ok(v)
}

/// The ambient causal structure evaluated on points of a linear subspace
/// through `origin`. The background distance is the ambient Euclidean one.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpace {
    pub subspace: LinearSubspace,
    pub origin: Point,
}

pub fn restrict_to_subspace(sub: LinearSubspace) -> SubspaceSpace {
    let n = sub.ambient().dimension();
    SubspaceSpace {
        subspace: sub,
        origin: Point::origin(n),
    }
}

impl SubspaceSpace {
    pub fn contains(&self, x: &[f64]) -> bool {
        let (_, resid) = self.subspace.coords_of(&self.origin, x);
        let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
        resid <= 1e-9 * scale
    }
}

impl CausalSpace for SubspaceSpace {
    fn dimension(&self) -> usize {
        self.subspace.ambient().dimension()
    }
    fn causal(&self, p: &[f64], q: &[f64]) -> bool {
        self.subspace.ambient().causal(p, q)
    }
    fn chron(&self, p: &[f64], q: &[f64]) -> bool {
        self.subspace.ambient().chron(p, q)
    }
    fn time_sep(&self, p: &[f64], q: &[f64]) -> f64 {
        self.subspace.ambient().time_sep(p, q)
    }
    fn diameter_bound(&self, p: &[f64], q: &[f64]) -> f64 {
        self.subspace.ambient().diamond_diameter(p, q)
    }
    fn translation_invariant(&self) -> bool {
        true
    }
}
