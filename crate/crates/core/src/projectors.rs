//! Exact orthogonal projectors and relaxed projectors.
//!
//! Polyhedral projection enumerates candidate active sets in order of
//! increasing size. For a candidate set `J` the point is projected onto the
//! affine set `{<a_i, .> = b_i, i in J}`; the candidate is accepted when it
//! is feasible and the residual `x - p` lies in the cone spanned by the
//! normals in `J` (checked with nonnegative least squares). Only sets with
//! linearly independent normals are tried, which is enough because any
//! cone certificate can be reduced to an independent one.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{
    AffineSubspace, EqualitySystem, Halfspace, Polyhedron, PushOutcome, Tolerances, Vector,
};

/// Sorted list of constraint indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActiveSet(Vec<usize>);

impl ActiveSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_superset_of(&self, other: &ActiveSet) -> bool {
        other.0.iter().all(|i| self.contains(*i))
    }
}

/// Projection onto an affine subspace: `base + sum <x - base, b_i> b_i`.
pub fn project_affine(a: &AffineSubspace, x: &Vector) -> Result<Vector> {
    a.project(x)
}

/// Orthogonal projection onto a polyhedron together with the active set at
/// the projected point.
pub fn project_polyhedron(
    c: &Polyhedron,
    x: &Vector,
    tol: &Tolerances,
) -> Result<(Vector, ActiveSet)> {
    x.check_dim(c.ambient_dim())?;
    let system = ConstraintSystem::new(c.halfspaces(), &[], &[]);
    let p = system.project(x, tol)?.ok_or(Error::EmptyPolyhedron)?;
    let active = ActiveSet::new(c.active_indices(&p, tol.act));
    Ok((p, active))
}

/// Projection onto `C ∩ {<a_i, .> = b_i, i in forced}`; `None` when that set
/// is empty.
pub fn project_onto_face_set(
    c: &Polyhedron,
    forced: &[usize],
    x: &Vector,
    tol: &Tolerances,
) -> Result<Option<Vector>> {
    x.check_dim(c.ambient_dim())?;
    ConstraintSystem::new(c.halfspaces(), forced, &[]).project(x, tol)
}

/// Mixed system of inequalities (some of them forced to hold with
/// equality) and plain equalities.
pub(crate) struct ConstraintSystem<'a> {
    halfspaces: &'a [Halfspace],
    forced: &'a [usize],
    equalities: &'a [(Vector, f64)],
}

impl<'a> ConstraintSystem<'a> {
    pub(crate) fn new(
        halfspaces: &'a [Halfspace],
        forced: &'a [usize],
        equalities: &'a [(Vector, f64)],
    ) -> Self {
        Self {
            halfspaces,
            forced,
            equalities,
        }
    }

    fn feasible(&self, p: &Vector, feas_tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(p) >= -feas_tol)
    }

    /// Exact projection, or `None` if the system has no solution.
    pub(crate) fn project(&self, x: &Vector, tol: &Tolerances) -> Result<Option<Vector>> {
        let d = x.dim();
        let mut base = EqualitySystem::new(d);
        for (a, b) in self.equalities {
            a.check_dim(d)?;
            if let PushOutcome::Inconsistent(_) = base.push(a, *b, tol) {
                return Ok(None);
            }
        }
        for &i in self.forced {
            let h = &self.halfspaces[i];
            if let PushOutcome::Inconsistent(_) = base.push(h.normal(), h.offset(), tol) {
                return Ok(None);
            }
        }
        let free: Vec<usize> = (0..self.halfspaces.len())
            .filter(|i| !self.forced.contains(i))
            .collect();
        let max_k = (d - base.rank()).min(free.len());
        let loose = tol.feas * (1.0 + x.norm());
        let strict = tol.feas.min(Tolerances::default().feas) * (1.0 + x.norm());
        // a loosened tolerance must not let an infeasible early candidate
        // shadow the true projection, so scan at the default strength first
        let (found, mut fallback) = self.search(&base, &free, max_k, x, strict, tol);
        if found.is_some() {
            return Ok(found);
        }
        if loose > strict {
            let (found, loose_fallback) = self.search(&base, &free, max_k, x, loose, tol);
            if found.is_some() {
                return Ok(found);
            }
            fallback = fallback.or(loose_fallback);
        }
        // No candidate passed the dual test (only possible through rounding in
        // degenerate configurations). The projection is the nearest feasible
        // candidate, since the true one is always among the candidates.
        Ok(fallback.map(|(_, p)| p))
    }

    fn search(
        &self,
        base: &EqualitySystem,
        free: &[usize],
        max_k: usize,
        x: &Vector,
        feas_tol: f64,
        tol: &Tolerances,
    ) -> (Option<Vector>, Option<(f64, Vector)>) {
        let mut fallback: Option<(f64, Vector)> = None;
        for k in 0..=max_k {
            for combo in free.iter().copied().combinations(k) {
                let mut sys = base.clone();
                if !combo.iter().all(|&i| {
                    let h = &self.halfspaces[i];
                    sys.push(h.normal(), h.offset(), tol) == PushOutcome::Added
                }) {
                    continue;
                }
                let p = sys.project(x);
                if !self.feasible(&p, feas_tol) {
                    continue;
                }
                let r = x - &p;
                let rn = r.norm();
                if rn <= feas_tol {
                    return (Some(p), fallback);
                }
                // free-sign multipliers are eliminated by working in the
                // orthogonal complement of their span
                let reduce = |v: &Vector| {
                    let mut w = v.clone();
                    for q in base.normals() {
                        let c = q.dot(&w);
                        w.axpy(-c, q);
                    }
                    w
                };
                let cols: Vec<Vector> = combo
                    .iter()
                    .map(|&i| reduce(self.halfspaces[i].normal()))
                    .collect();
                let r = reduce(&r);
                let (_, resid) = nnls(&cols, &r);
                if resid <= tol.dual * rn.max(1.0) {
                    return (Some(p), fallback);
                }
                if fallback.as_ref().is_none_or(|(best, _)| rn < *best) {
                    fallback = Some((rn, p));
                }
            }
        }
        (None, fallback)
    }
}

/// Nonnegative least squares `min ||A z - t||, z >= 0` with the columns of
/// `A` given as vectors (Lawson-Hanson active set method). Returns the
/// coefficients and the residual norm.
pub fn nnls(cols: &[Vector], t: &Vector) -> (Vec<f64>, f64) {
    let n = cols.len();
    if n == 0 {
        return (Vec::new(), t.norm());
    }
    let m = t.dim();
    let a = DMatrix::from_fn(m, n, |i, j| cols[j][i]);
    let b = DVector::from_column_slice(t.as_slice());
    let scale = cols.iter().map(Vector::norm).fold(0.0, f64::max) * t.norm();
    let w_tol = 1e-13 * scale.max(f64::MIN_POSITIVE);

    let mut z = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    for _ in 0..3 * n + 3 {
        let w = a.transpose() * (&b - &a * &z);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > w_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let sol = sub
                .svd(true, true)
                .solve(&b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if sol.iter().all(|&v| v > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    z[j] = sol[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if sol[k] <= 0.0 {
                    let denom = z[j] - sol[k];
                    if denom > 0.0 {
                        alpha = alpha.min(z[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in idx.iter().enumerate() {
                z[j] += alpha * (sol[k] - z[j]);
                if z[j] <= 1e-15 * (1.0 + sol[k].abs()) {
                    z[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let resid = (&b - &a * &z).norm();
    (z.iter().copied().collect(), resid)
}

/// Projection onto the epigraph of `exp`, `{(x, y) : exp(x) <= y}`.
///
/// Outside the set the projection is `(t, exp(t))` where `t` is the root of
/// `g(t) = (t - x0) + exp(t) (exp(t) - y0)` in `(-inf, x0]`.
pub fn project_epiexp(x0: f64, y0: f64) -> (f64, f64) {
    if y0 >= x0.exp() {
        return (x0, y0);
    }
    let g = |t: f64| (t - x0) + t.exp() * (t.exp() - y0);
    let dg = |t: f64| 1.0 + t.exp() * (2.0 * t.exp() - y0);
    let mut hi = x0;
    let mut lo = x0 - y0.abs() - 2.0;
    let mut step = 1.0;
    while g(lo) > 0.0 {
        lo -= step;
        step *= 2.0;
    }
    let mut t = if g(hi).abs() < g(lo).abs() { hi } else { lo };
    for _ in 0..200 {
        let gt = g(t);
        let scale = 1.0_f64.max(x0.abs()).max(y0.abs()).max((2.0 * t).exp());
        if gt.abs() <= 1e-12 * scale {
            break;
        }
        if gt > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let slope = dg(t);
        let newton = t - gt / slope;
        t = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
    }
    (t, t.exp())
}

/// Marker for the fixed set `{(x, y) in R^2 : exp(x) <= y}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EpiExp;

impl EpiExp {
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(2)?;
        let (px, py) = project_epiexp(x[0], x[1]);
        Ok(Vector::from_raw(vec![px, py]))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.dim() == 2 && x[0].exp() <= x[1] + tol
    }
}

/// A set with an exact projector.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Affine(AffineSubspace),
    Polyhedron(Polyhedron),
    EpiExp,
}

impl Target {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Target::Affine(a) => a.ambient_dim(),
            Target::Polyhedron(p) => p.ambient_dim(),
            Target::EpiExp => 2,
        }
    }

    pub fn project(&self, x: &Vector, tol: &Tolerances) -> Result<Vector> {
        match self {
            Target::Affine(a) => project_affine(a, x),
            Target::Polyhedron(c) => project_polyhedron(c, x, tol).map(|(p, _)| p),
            Target::EpiExp => EpiExp.project(x),
        }
    }
}

impl From<AffineSubspace> for Target {
    fn from(a: AffineSubspace) -> Self {
        Target::Affine(a)
    }
}

impl From<Polyhedron> for Target {
    fn from(p: Polyhedron) -> Self {
        Target::Polyhedron(p)
    }
}

/// `(1 - lambda) Id + lambda P_target` with `lambda` in `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedProjector {
    target: Target,
    lambda: f64,
}

impl RelaxedProjector {
    pub fn new(target: Target, lambda: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        Ok(Self { target, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn apply(&self, x: &Vector, tol: &Tolerances) -> Result<Vector> {
        apply_relaxed(self, x, tol)
    }
}

pub fn apply_relaxed(r: &RelaxedProjector, x: &Vector, tol: &Tolerances) -> Result<Vector> {
    x.check_dim(r.target.ambient_dim())?;
    if r.lambda == 0.0 {
        return Ok(x.clone());
    }
    let p = r.target.project(x, tol)?;
    Ok(x.relax_toward(&p, r.lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn x_axis() -> AffineSubspace {
        AffineSubspace::line(v(&[0.0, 0.0]), &v(&[1.0, 0.0]), &Tolerances::default()).unwrap()
    }

    fn quadrant() -> Polyhedron {
        Polyhedron::from_rows(2, vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap()
    }

    #[test]
    fn affine_examples() {
        let tol = Tolerances::default();
        assert_eq!(
            project_affine(&x_axis(), &v(&[3.0, 5.0])).unwrap(),
            v(&[3.0, 0.0])
        );
        assert_eq!(
            project_affine(&x_axis(), &v(&[3.0, 0.0])).unwrap(),
            v(&[3.0, 0.0])
        );
        let diag = AffineSubspace::line(v(&[0.0, 0.0]), &v(&[1.0, 1.0]), &tol).unwrap();
        let p = project_affine(&diag, &v(&[2.0, 0.0])).unwrap();
        // minimizing (t-2)^2 + t^2 gives t = 1
        assert!(p.dist(&v(&[1.0, 1.0])) < 1e-15);
        assert!(project_affine(&diag, &v(&[1.0])).is_err());
    }

    #[test]
    fn polyhedron_clamps_one_coordinate() {
        let tol = Tolerances::default();
        let (p, j) = project_polyhedron(&quadrant(), &v(&[-1.0, 2.0]), &tol).unwrap();
        assert_eq!(p, v(&[0.0, 2.0]));
        assert_eq!(j, ActiveSet::new(vec![0]));
    }

    #[test]
    fn polyhedron_idempotent_on_set() {
        let tol = Tolerances::default();
        let (p, j) = project_polyhedron(&quadrant(), &v(&[0.0, 3.0]), &tol).unwrap();
        assert_eq!(p, v(&[0.0, 3.0]));
        assert_eq!(j, ActiveSet::new(vec![0]));
        let (p, j) = project_polyhedron(&quadrant(), &v(&[1.0, 3.0]), &tol).unwrap();
        assert_eq!(p, v(&[1.0, 3.0]));
        assert!(j.is_empty());
    }

    #[test]
    fn simplex_matches_grid_search() {
        let tol = Tolerances::default();
        let simplex = Polyhedron::from_rows(
            2,
            vec![
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, -1.0], 0.0),
                (vec![1.0, 1.0], 1.0),
            ],
        )
        .unwrap();
        let x = v(&[2.0, 2.0]);
        let (p, j) = project_polyhedron(&simplex, &x, &tol).unwrap();
        assert!(p.dist(&v(&[0.5, 0.5])) < 1e-12);
        assert_eq!(j, ActiveSet::new(vec![2]));

        // dense grid over the simplex, step 1e-4 along each axis
        let step = 1e-4;
        let n = (1.0 / step) as usize;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=n {
            let a = i as f64 * step;
            for k in 0..=n - i {
                let b = k as f64 * step;
                let d = (a - 2.0).powi(2) + (b - 2.0).powi(2);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        assert!((best.1 - p[0]).abs() < 1e-3 && (best.2 - p[1]).abs() < 1e-3);
    }

    #[test]
    fn empty_polyhedron_is_reported() {
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(1, vec![(vec![1.0], 0.0), (vec![-1.0], -1.0)]).unwrap();
        assert_eq!(
            project_polyhedron(&c, &v(&[5.0]), &tol).unwrap_err(),
            Error::EmptyPolyhedron
        );
    }

    #[test]
    fn whole_space_projection_is_identity() {
        let tol = Tolerances::default();
        let c = Polyhedron::new(3, vec![]).unwrap();
        let x = v(&[1.0, -2.0, 3.0]);
        assert_eq!(project_polyhedron(&c, &x, &tol).unwrap().0, x);
    }

    #[test]
    fn degenerate_apex_with_redundant_constraint() {
        // four constraints meeting at the origin in R^2; the apex is a
        // degenerate vertex
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(
            2,
            vec![
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, -1.0], 0.0),
                (vec![-1.0, -1.0], 0.0),
                (vec![-2.0, -1.0], 0.0),
            ],
        )
        .unwrap();
        let (p, j) = project_polyhedron(&c, &v(&[-3.0, -1.0]), &tol).unwrap();
        assert!(p.norm() < 1e-12);
        assert_eq!(j, ActiveSet::new(vec![0, 1, 2, 3]));
    }

    #[test]
    fn nnls_cone_membership() {
        let cols = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let (z, r) = nnls(&cols, &v(&[2.0, 3.0]));
        assert!(r < 1e-12);
        assert!((z[0] - 2.0).abs() < 1e-12 && (z[1] - 3.0).abs() < 1e-12);
        let (z, r) = nnls(&cols, &v(&[-1.0, 3.0]));
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(z[0], 0.0);
    }

    #[test]
    fn epiexp_examples() {
        assert_eq!(project_epiexp(0.0, 3.0), (0.0, 3.0));
        let (px, py) = project_epiexp(0.0, 0.0);
        // bisection oracle on t + exp(2t) = 0
        let (mut lo, mut hi) = (-1.0_f64, 0.0_f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m + (2.0 * m).exp() > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        assert!((px - lo).abs() < 1e-12);
        assert!((py - lo.exp()).abs() < 1e-12);
        assert!((px + 0.4263).abs() < 1e-4 && (py - 0.6529).abs() < 1e-4);
        // grid search along the boundary confirms optimality
        let best = (0..=200_000)
            .map(|i| -2.0 + i as f64 * 1e-5)
            .map(|t| (t, t * t + (t.exp()).powi(2)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best.0 - px).abs() < 1e-4);

        let x0 = 0.7_f64;
        assert_eq!(project_epiexp(x0, x0.exp()), (x0, x0.exp()));
    }

    #[test]
    fn epiexp_far_below_and_left() {
        for &(x0, y0) in &[(-10.0, 0.0), (3.0, -50.0), (5.0, 100.0), (-30.0, -1.0)] {
            let (px, py) = project_epiexp(x0, y0);
            let g = (px - x0) + px.exp() * (px.exp() - y0);
            assert!(g.abs() < 1e-9, "g = {g} at ({x0},{y0})");
            assert!(px <= x0);
            assert!((py - px.exp()).abs() <= 1e-15 * py.abs().max(1.0));
        }
    }

    #[test]
    fn relaxed_examples() {
        let tol = Tolerances::default();
        let x = v(&[3.0, 5.0]);
        let r0 = RelaxedProjector::new(Target::Affine(x_axis()), 0.0).unwrap();
        assert_eq!(r0.apply(&x, &tol).unwrap(), x);
        let r1 = RelaxedProjector::new(Target::Affine(x_axis()), 1.0).unwrap();
        assert_eq!(r1.apply(&x, &tol).unwrap(), v(&[3.0, 0.0]));
        let r2 = RelaxedProjector::new(Target::Affine(x_axis()), 2.0).unwrap();
        assert_eq!(r2.apply(&x, &tol).unwrap(), v(&[3.0, -5.0]));
        assert_eq!(
            RelaxedProjector::new(Target::EpiExp, 2.5).unwrap_err(),
            Error::LambdaOutOfRange(2.5)
        );
    }
}
