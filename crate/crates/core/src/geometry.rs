//! Vectors, affine subspaces, halfspaces and polyhedra.
//!
//! Affine subspaces are stored as a base point plus an orthonormal basis of
//! the direction space. Linear equality systems are handled through
//! [`EqualitySystem`], which keeps an orthonormalized copy of the normals
//! together with the matching offsets so that projecting onto the solution
//! set is a direct formula.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Orthonormality defect allowed in a stored basis.
    pub orth: f64,
    /// Feasibility / equality residual.
    pub feas: f64,
    /// Relative pivot size below which a direction counts as dependent.
    pub rank: f64,
    /// Residual allowed in the cone-membership (dual feasibility) test.
    pub dual: f64,
    /// Slack below which a constraint is declared active.
    pub act: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orth: 1e-9,
            feas: 1e-9,
            rank: 1e-10,
            dual: 1e-8,
            act: 1e-7,
        }
    }
}

impl Tolerances {
    /// Overrides one tolerance by name (`orth`, `feas`, `rank`, `dual`, `act`).
    pub fn set(&mut self, name: &str, value: f64) -> std::result::Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance {name} must be positive and finite"));
        }
        match name {
            "orth" => self.orth = value,
            "feas" => self.feas = value,
            "rank" => self.rank = value,
            "dual" => self.dual = value,
            "act" => self.act = value,
            _ => return Err(format!("unknown tolerance `{name}`")),
        }
        Ok(())
    }
}

/// Dense real coordinate vector.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// Builds a vector without validation. Callers guarantee `coords` is
    /// nonempty and finite.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Inner product; panics on dimension mismatch. See [`inner`] for the
    /// checked form.
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dot");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dist");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Vector) {
        assert_eq!(self.dim(), x.dim(), "dimension mismatch in axpy");
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += alpha * xi;
        }
    }

    /// `(1 - lambda) * self + lambda * target`
    pub fn relax_toward(&self, target: &Vector, lambda: f64) -> Vector {
        assert_eq!(
            self.dim(),
            target.dim(),
            "dimension mismatch in relax_toward"
        );
        Vector(
            self.0
                .iter()
                .zip(&target.0)
                .map(|(x, p)| (1.0 - lambda) * x + lambda * p)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in add");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sub");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

/// Checked inner product.
pub fn inner(u: &Vector, v: &Vector) -> Result<f64> {
    v.check_dim(u.dim())?;
    Ok(u.dot(v))
}

/// Removes the components of `w` along every vector of `basis`, running the
/// sweep twice so that orthogonality loss stays at rounding level.
fn orthogonalize_against(w: &mut Vector, basis: &[Vector]) {
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(w);
            w.axpy(-c, q);
        }
    }
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt with a
/// re-orthogonalization pass). Directions whose remaining norm is below
/// `tol.rank` times their original norm are dropped.
pub fn orthonormalize(vectors: &[Vector], tol: &Tolerances) -> Result<Vec<Vector>> {
    let mut basis: Vec<Vector> = Vec::new();
    if let Some(first) = vectors.first() {
        let d = first.dim();
        for v in vectors {
            v.check_dim(d)?;
            push_orthonormal(&mut basis, v, tol);
        }
    }
    Ok(basis)
}

/// Appends the normalized component of `v` orthogonal to `basis`, if it is
/// not numerically dependent. Returns whether a vector was added.
fn push_orthonormal(basis: &mut Vec<Vector>, v: &Vector, tol: &Tolerances) -> bool {
    let scale = v.norm();
    if scale == 0.0 {
        return false;
    }
    let mut w = v.clone();
    orthogonalize_against(&mut w, basis);
    let n = w.norm();
    if n <= tol.rank * scale {
        return false;
    }
    basis.push(&w * (1.0 / n));
    true
}

/// Extends an orthonormal family to an orthonormal basis of the whole space
/// and returns only the added vectors (an orthonormal basis of the
/// orthogonal complement of `existing`).
pub fn orthogonal_complement(existing: &[Vector], dim: usize, tol: &Tolerances) -> Vec<Vector> {
    let mut basis: Vec<Vector> = existing.to_vec();
    let start = basis.len();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        push_orthonormal(&mut basis, &Vector::unit(dim, i), tol);
    }
    basis.split_off(start)
}

fn orthonormality_defect(basis: &[Vector]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((bi.dot(bj) - target).abs());
        }
    }
    worst
}

/// Closed affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    base: Vector,
    basis: Vec<Vector>,
}

impl AffineSubspace {
    /// Validates that `basis` is orthonormal within `tol.orth`.
    pub fn new(base: Vector, basis: Vec<Vector>, tol: &Tolerances) -> Result<Self> {
        let d = base.dim();
        for b in &basis {
            b.check_dim(d)?;
        }
        if basis.len() > d {
            return Err(Error::NotOrthonormal {
                deviation: f64::INFINITY,
            });
        }
        let deviation = orthonormality_defect(&basis);
        if deviation > tol.orth {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { base, basis })
    }

    /// `base + span(directions)`; the directions need not be independent.
    pub fn from_spanning(base: Vector, directions: &[Vector], tol: &Tolerances) -> Result<Self> {
        for v in directions {
            v.check_dim(base.dim())?;
        }
        let basis = orthonormalize(directions, tol)?;
        Ok(Self { base, basis })
    }

    pub fn singleton(point: Vector) -> Self {
        Self {
            base: point,
            basis: Vec::new(),
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            base: Vector::zeros(dim),
            basis: (0..dim).map(|i| Vector::unit(dim, i)).collect(),
        }
    }

    /// The line `base + t * direction`.
    pub fn line(base: Vector, direction: &Vector, tol: &Tolerances) -> Result<Self> {
        let sp = Self::from_spanning(base, std::slice::from_ref(direction), tol)?;
        if sp.basis.is_empty() {
            return Err(Error::ZeroNormal);
        }
        Ok(sp)
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_linear(&self) -> bool {
        self.base.as_slice().iter().all(|&c| c == 0.0)
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.ambient_dim())?;
        let diff = x - &self.base;
        let mut p = self.base.clone();
        for b in &self.basis {
            p.axpy(b.dot(&diff), b);
        }
        Ok(p)
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok(self.project(x)?.dist(x))
    }

    /// Equality description `{x : <n_k, x> = c_k}` with orthonormal normals
    /// spanning the orthogonal complement of the direction space.
    pub fn to_equalities(&self, tol: &Tolerances) -> Vec<(Vector, f64)> {
        orthogonal_complement(&self.basis, self.ambient_dim(), tol)
            .into_iter()
            .map(|n| {
                let c = n.dot(&self.base);
                (n, c)
            })
            .collect()
    }
}

/// Closed halfspace `{x : <normal, x> <= offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Vector,
    offset: f64,
    norm: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNormal);
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Self {
            normal,
            offset,
            norm,
        })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn normal_norm(&self) -> f64 {
        self.norm
    }

    /// Signed distance to the boundary hyperplane, positive inside.
    pub fn slack(&self, x: &Vector) -> f64 {
        (self.offset - self.normal.dot(x)) / self.norm
    }
}

/// Intersection of finitely many closed halfspaces. An empty list is the
/// whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    halfspaces: Vec<Halfspace>,
    ambient_dim: usize,
}

impl Polyhedron {
    pub fn new(ambient_dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        for h in &halfspaces {
            h.normal.check_dim(ambient_dim)?;
        }
        Ok(Self {
            halfspaces,
            ambient_dim,
        })
    }

    /// Builds from `(normal, offset)` rows.
    pub fn from_rows(ambient_dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let hs = rows
            .into_iter()
            .map(|(a, b)| Halfspace::new(Vector::new(a)?, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient_dim, hs)
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        if hi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: hi.len(),
            });
        }
        let mut rows = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = -1.0;
            rows.push((e.clone(), -lo[i]));
            e[i] = 1.0;
            rows.push((e, hi[i]));
        }
        Self::from_rows(d, rows)
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Largest constraint violation (0 when `x` is feasible).
    pub fn max_violation(&self, x: &Vector) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| (-h.slack(x)).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.max_violation(x) <= tol
    }

    /// Indices whose slack at `x` is at most `tol`; violated rows count as active.
    pub fn active_indices(&self, x: &Vector, tol: f64) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(x) <= tol)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Outcome of adding one equality to an [`EqualitySystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PushOutcome {
    Added,
    /// The row was a consistent combination of earlier rows.
    Redundant,
    /// The row contradicts earlier rows; the payload is the residual.
    Inconsistent(f64),
}

/// Linear equality system `{x : <a_i, x> = b_i}` kept in orthonormalized
/// form: orthonormal normals `q_k` with offsets `c_k` describing the same
/// solution set.
#[derive(Debug, Clone)]
pub struct EqualitySystem {
    dim: usize,
    normals: Vec<Vector>,
    offsets: Vec<f64>,
}

impl EqualitySystem {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            normals: Vec::new(),
            offsets: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.normals.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    /// Adds `<a, x> = b`.
    pub fn push(&mut self, a: &Vector, b: f64, tol: &Tolerances) -> PushOutcome {
        debug_assert_eq!(a.dim(), self.dim);
        let scale = a.norm();
        if scale == 0.0 {
            return if b.abs() <= tol.feas {
                PushOutcome::Redundant
            } else {
                PushOutcome::Inconsistent(b.abs())
            };
        }
        let mut w = a.clone();
        let mut c = b;
        for _ in 0..2 {
            for (q, off) in self.normals.iter().zip(&self.offsets) {
                let coef = q.dot(&w);
                w.axpy(-coef, q);
                c -= coef * off;
            }
        }
        let n = w.norm();
        if n <= tol.rank * scale {
            let offset_scale = self
                .offsets
                .iter()
                .fold(1.0_f64.max(b.abs() / scale), |m, o| m.max(o.abs()));
            let residual = c.abs() / scale;
            return if residual <= tol.feas * offset_scale {
                PushOutcome::Redundant
            } else {
                PushOutcome::Inconsistent(residual)
            };
        }
        self.normals.push(&w * (1.0 / n));
        self.offsets.push(c / n);
        PushOutcome::Added
    }

    /// Minimum-norm point of the solution set.
    pub fn base(&self) -> Vector {
        let mut p = Vector::zeros(self.dim);
        for (q, c) in self.normals.iter().zip(&self.offsets) {
            p.axpy(*c, q);
        }
        p
    }

    /// Orthogonal projection onto the solution set.
    pub fn project(&self, x: &Vector) -> Vector {
        let mut p = x.clone();
        for (q, c) in self.normals.iter().zip(&self.offsets) {
            let r = q.dot(x) - c;
            p.axpy(-r, q);
        }
        p
    }

    /// Converts to base + orthonormal direction basis.
    pub fn to_affine(&self, tol: &Tolerances) -> AffineSubspace {
        AffineSubspace {
            base: self.base(),
            basis: orthogonal_complement(&self.normals, self.dim, tol),
        }
    }
}

/// Result of solving a linear equality system.
#[derive(Debug, Clone, PartialEq)]
pub enum EqualitySolution {
    Feasible(AffineSubspace),
    Infeasible { residual: f64 },
}

impl EqualitySolution {
    pub fn feasible(self) -> Option<AffineSubspace> {
        match self {
            EqualitySolution::Feasible(a) => Some(a),
            EqualitySolution::Infeasible { .. } => None,
        }
    }
}

/// Solution set of `{x : <a_i, x> = b_i for all i}` as base + orthonormal
/// direction basis.
pub fn affine_from_equalities(
    rows: &[(Vector, f64)],
    ambient_dim: usize,
    tol: &Tolerances,
) -> Result<EqualitySolution> {
    if ambient_dim == 0 {
        return Err(Error::EmptyVector);
    }
    let mut sys = EqualitySystem::new(ambient_dim);
    for (a, b) in rows {
        a.check_dim(ambient_dim)?;
        if let PushOutcome::Inconsistent(residual) = sys.push(a, *b, tol) {
            return Ok(EqualitySolution::Infeasible { residual });
        }
    }
    let affine = sys.to_affine(tol);
    // residual of the least-norm solution against the original rows
    let base_scale = 1.0 + affine.base.norm();
    for (a, b) in rows {
        let residual = (a.dot(&affine.base) - b).abs() / a.norm().max(f64::MIN_POSITIVE);
        if residual > tol.feas * base_scale {
            return Ok(EqualitySolution::Infeasible { residual });
        }
    }
    Ok(EqualitySolution::Feasible(affine))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
        let u = v(&[0.6, 0.8]);
        assert!((inner(&u, &u).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let err = inner(&v(&[1.0]), &v(&[1.0, 2.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn vector_rejects_bad_input() {
        assert_eq!(Vector::new(vec![]).unwrap_err(), Error::EmptyVector);
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
    }

    #[test]
    fn orthonormalize_examples() {
        let tol = Tolerances::default();
        assert_eq!(
            orthonormalize(&[v(&[2.0, 0.0])], &tol).unwrap(),
            vec![v(&[1.0, 0.0])]
        );
        assert_eq!(
            orthonormalize(&[v(&[1.0, 0.0]), v(&[1.0, 0.0])], &tol).unwrap(),
            vec![v(&[1.0, 0.0])]
        );
        let b = orthonormalize(&[v(&[1.0, 1.0]), v(&[1.0, -1.0])], &tol).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b[0].dot(&b[1]).abs() < 1e-15);
        assert!((b[0].norm() - 1.0).abs() < 1e-15);
        assert!((b[1].norm() - 1.0).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        assert!(b[0].dist(&v(&[s, s])) < 1e-15);
        assert!(b[1].dist(&v(&[s, -s])) < 1e-15);
        assert!(orthonormalize(&[], &tol).unwrap().is_empty());
        assert!(orthonormalize(&[v(&[0.0, 0.0])], &tol).unwrap().is_empty());
    }

    #[test]
    fn affine_from_equalities_examples() {
        let tol = Tolerances::default();
        let a = affine_from_equalities(&[(v(&[0.0, 1.0]), 0.0)], 2, &tol)
            .unwrap()
            .feasible()
            .unwrap();
        assert_eq!(a.base(), &v(&[0.0, 0.0]));
        assert_eq!(a.basis().len(), 1);
        assert!((a.basis()[0][0].abs() - 1.0).abs() < 1e-15);

        let inf = affine_from_equalities(&[(v(&[1.0, 0.0]), 1.0), (v(&[1.0, 0.0]), 2.0)], 2, &tol)
            .unwrap();
        assert!(matches!(inf, EqualitySolution::Infeasible { .. }));

        // x + y = 2, x - y = 0 solved by hand: (1, 1)
        let p = affine_from_equalities(&[(v(&[1.0, 1.0]), 2.0), (v(&[1.0, -1.0]), 0.0)], 2, &tol)
            .unwrap()
            .feasible()
            .unwrap();
        assert!(p.basis().is_empty());
        assert!(p.base().dist(&v(&[1.0, 1.0])) < 1e-14);
    }

    #[test]
    fn redundant_consistent_rows_are_kept_feasible() {
        let tol = Tolerances::default();
        let a = affine_from_equalities(
            &[(v(&[1.0, 1.0, 0.0]), 1.0), (v(&[2.0, 2.0, 0.0]), 2.0)],
            3,
            &tol,
        )
        .unwrap()
        .feasible()
        .unwrap();
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn affine_new_checks_orthonormality() {
        let tol = Tolerances::default();
        let err = AffineSubspace::new(v(&[0.0, 0.0]), vec![v(&[1.0, 1.0])], &tol).unwrap_err();
        assert!(matches!(err, Error::NotOrthonormal { .. }));
    }

    #[test]
    fn to_equalities_round_trip() {
        let tol = Tolerances::default();
        let a = AffineSubspace::line(v(&[1.0, 2.0, 3.0]), &v(&[1.0, 1.0, 0.0]), &tol).unwrap();
        let rows = a.to_equalities(&tol);
        assert_eq!(rows.len(), 2);
        let b = affine_from_equalities(&rows, 3, &tol)
            .unwrap()
            .feasible()
            .unwrap();
        let x = v(&[4.0, -1.0, 0.5]);
        assert!(a.project(&x).unwrap().dist(&b.project(&x).unwrap()) < 1e-12);
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        t.set("feas", 1e-2).unwrap();
        assert_eq!(t.feas, 1e-2);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("act", -1.0).is_err());
    }
}
