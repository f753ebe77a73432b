//! Splitting a polyhedral projection along a subspace `K` contained in the
//! kernel of every constraint normal: `P_C = P_K + P_D P_{K^perp}` with
//! `D = C ∩ K^perp`, where `D` is handled in coordinates of `K^perp`.

use crate::error::{Error, Result};
use crate::geometry::{
    affine_from_equalities, orthogonal_complement, AffineSubspace, EqualitySolution, Halfspace,
    Polyhedron, Tolerances, Vector,
};
use crate::iteration::{run, Collection, RelaxationSchedule, SelectionPolicy, Trajectory};
use crate::projectors::{project_polyhedron, Target};

/// Which subspace to split along.
#[derive(Debug, Clone)]
pub enum KChoice {
    /// The full intersection of the kernels of all normals.
    Auto,
    /// A user-supplied linear subspace of that intersection.
    Given(AffineSubspace),
}

#[derive(Debug, Clone)]
pub struct SplitPolyhedron {
    c: Polyhedron,
    k: AffineSubspace,
    kperp: Vec<Vector>,
    d: Polyhedron,
}

impl SplitPolyhedron {
    pub fn original(&self) -> &Polyhedron {
        &self.c
    }

    pub fn kernel(&self) -> &AffineSubspace {
        &self.k
    }

    /// Orthonormal basis of `K^perp`.
    pub fn kperp_basis(&self) -> &[Vector] {
        &self.kperp
    }

    /// `C ∩ K^perp` in `K^perp` coordinates (ambient dimension may be 0).
    pub fn reduced(&self) -> &Polyhedron {
        &self.d
    }

    /// Coordinates of `P_{K^perp} x` in the `K^perp` basis.
    pub fn coords(&self, x: &Vector) -> Vec<f64> {
        self.kperp.iter().map(|q| q.dot(x)).collect()
    }

    /// Embeds `K^perp` coordinates back into the ambient space.
    pub fn lift(&self, y: &[f64]) -> Vector {
        let mut out = Vector::zeros(self.c.ambient_dim());
        for (q, &c) in self.kperp.iter().zip(y) {
            out.axpy(c, q);
        }
        out
    }

    /// `P_K x`.
    pub fn project_kernel(&self, x: &Vector) -> Result<Vector> {
        self.k.project(x)
    }

    /// `P_D` applied to `K^perp` coordinates.
    pub fn project_reduced(&self, y: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
        if y.is_empty() {
            return Ok(Vec::new());
        }
        let (p, _) = project_polyhedron(&self.d, &Vector::new(y.to_vec())?, tol)?;
        Ok(p.into_inner())
    }
}

fn kernel_of_normals<'a>(
    normals: impl Iterator<Item = &'a Vector>,
    dim: usize,
    tol: &Tolerances,
) -> Result<AffineSubspace> {
    let rows: Vec<(Vector, f64)> = normals.map(|a| (a.clone(), 0.0)).collect();
    match affine_from_equalities(&rows, dim, tol)? {
        EqualitySolution::Feasible(k) => Ok(k),
        // homogeneous systems are always consistent
        EqualitySolution::Infeasible { .. } => {
            unreachable!("homogeneous system reported infeasible")
        }
    }
}

/// Splits `c` along `K`, re-expressing the constraints in `K^perp`
/// coordinates.
pub fn split(c: &Polyhedron, k: KChoice, tol: &Tolerances) -> Result<SplitPolyhedron> {
    let dim = c.ambient_dim();
    let k = match k {
        KChoice::Auto => kernel_of_normals(c.halfspaces().iter().map(Halfspace::normal), dim, tol)?,
        KChoice::Given(k) => {
            if k.ambient_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.ambient_dim(),
                });
            }
            if !k.is_linear() {
                return Err(Error::NotLinear);
            }
            let deviation = c
                .halfspaces()
                .iter()
                .flat_map(|h| {
                    k.basis()
                        .iter()
                        .map(move |b| (h.normal().dot(b) / h.normal_norm()).abs())
                })
                .fold(0.0, f64::max);
            if deviation > tol.orth {
                return Err(Error::KNotInKernel { deviation });
            }
            k
        }
    };
    let kperp = orthogonal_complement(k.basis(), dim, tol);
    let reduced = c
        .halfspaces()
        .iter()
        .map(|h| {
            let a: Vec<f64> = kperp.iter().map(|q| q.dot(h.normal())).collect();
            Halfspace::new(Vector::new(a)?, h.offset())
        })
        .collect::<Result<Vec<_>>>()?;
    let d = Polyhedron::new(kperp.len(), reduced)?;
    Ok(SplitPolyhedron {
        c: c.clone(),
        k,
        kperp,
        d,
    })
}

/// `P_K x + lift(P_D(coords(x)))`.
pub fn project_via_split(s: &SplitPolyhedron, x: &Vector, tol: &Tolerances) -> Result<Vector> {
    x.check_dim(s.c.ambient_dim())?;
    let mut out = s.project_kernel(x)?;
    let y = s.project_reduced(&s.coords(x), tol)?;
    out.axpy(1.0, &s.lift(&y));
    Ok(out)
}

/// Intersection of the kernels of every normal of every polyhedron.
pub fn common_kernel(cs: &[Polyhedron], tol: &Tolerances) -> Result<AffineSubspace> {
    let Some(first) = cs.first() else {
        return Err(Error::EmptyCollection);
    };
    let dim = first.ambient_dim();
    for c in cs {
        if c.ambient_dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.ambient_dim(),
            });
        }
    }
    kernel_of_normals(
        cs.iter()
            .flat_map(|c| c.halfspaces().iter().map(Halfspace::normal)),
        dim,
        tol,
    )
}

/// Splits every polyhedron of a collection along their common kernel.
pub fn split_collection(
    cs: &[Polyhedron],
    tol: &Tolerances,
) -> Result<(AffineSubspace, Vec<SplitPolyhedron>)> {
    let k = common_kernel(cs, tol)?;
    let splits = cs
        .iter()
        .map(|c| split(c, KChoice::Given(k.clone()), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok((k, splits))
}

#[derive(Debug, Clone)]
pub struct OrbitComparison {
    pub direct: Trajectory,
    /// The orbit of the `K^perp` coordinates on the reduced sets.
    pub reduced: Trajectory,
    /// `P_K x0`.
    pub k0: Vector,
    /// `||x_n - (k0 + lift(y_n))||` per iterate.
    pub gaps: Vec<f64>,
}

impl OrbitComparison {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs the engine on the collection and, with the same policy and schedule,
/// on the reduced sets `D_j`, then compares `x_n` with `P_K x0 + y_n`.
pub fn orbit_decomposition(
    cs: &[Polyhedron],
    policy: &SelectionPolicy,
    sched: &RelaxationSchedule,
    x0: &Vector,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<OrbitComparison> {
    let (k, splits) = split_collection(cs, tol)?;
    let first = &splits[0];
    if first.kperp_basis().is_empty() {
        return Err(Error::NotApplicable(
            "no constraints, K^perp is trivial".into(),
        ));
    }
    let full = Collection::new(cs.iter().cloned().map(Target::Polyhedron).collect(), tol)?;
    let reduced = Collection::new(
        splits
            .iter()
            .map(|s| Target::Polyhedron(s.reduced().clone()))
            .collect(),
        tol,
    )?;
    let direct = run(&full, policy, sched, x0.clone(), n_steps, tol)?;
    let y0 = Vector::new(first.coords(x0))?;
    let reduced = run(&reduced, policy, sched, y0, n_steps, tol)?;
    let k0 = k.project(x0)?;
    let gaps = direct
        .iterates
        .iter()
        .zip(&reduced.iterates)
        .map(|(x, y)| {
            let mut rebuilt = first.lift(y.as_slice());
            rebuilt.axpy(1.0, &k0);
            x.dist(&rebuilt)
        })
        .collect();
    Ok(OrbitComparison {
        direct,
        reduced,
        k0,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn single_coordinate_constraint() {
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(3, vec![(vec![-1.0, 0.0, 0.0], 0.0)]).unwrap();
        let s = split(&c, KChoice::Auto, &tol).unwrap();
        assert_eq!(s.kernel().dim(), 2);
        assert_eq!(s.kperp_basis().len(), 1);
        assert!((s.kperp_basis()[0][0].abs() - 1.0).abs() < 1e-15);
        assert_eq!(s.reduced().ambient_dim(), 1);
        let x = v(&[-2.0, 5.0, 7.0]);
        let p = project_via_split(&s, &x, &tol).unwrap();
        assert!(p.dist(&v(&[0.0, 5.0, 7.0])) < 1e-14);
    }

    #[test]
    fn unconstrained_has_trivial_complement() {
        let tol = Tolerances::default();
        let c = Polyhedron::new(3, vec![]).unwrap();
        let s = split(&c, KChoice::Auto, &tol).unwrap();
        assert_eq!(s.kernel().dim(), 3);
        assert!(s.kperp_basis().is_empty());
        assert_eq!(s.reduced().ambient_dim(), 0);
        let x = v(&[1.0, 2.0, 3.0]);
        assert!(project_via_split(&s, &x, &tol).unwrap().dist(&x) < 1e-15);
    }

    #[test]
    fn two_constraints_in_r4() {
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(
            4,
            vec![
                (vec![1.0, 1.0, 0.0, 0.0], 1.0),
                (vec![1.0, -1.0, 0.0, 0.0], 1.0),
            ],
        )
        .unwrap();
        let s = split(&c, KChoice::Auto, &tol).unwrap();
        assert_eq!(s.kernel().dim(), 2);
        assert_eq!(s.reduced().ambient_dim(), 2);
        for k in s.kernel().basis() {
            for h in c.halfspaces() {
                assert!(h.normal().dot(k).abs() < 1e-14);
            }
        }
        for x in [
            v(&[3.0, 0.5, -1.0, 2.0]),
            v(&[0.0, 0.0, 4.0, 4.0]),
            v(&[-5.0, 9.0, 1.0, 0.0]),
        ] {
            let direct = project_polyhedron(&c, &x, &tol).unwrap().0;
            let via = project_via_split(&s, &x, &tol).unwrap();
            assert!(direct.dist(&via) < 1e-12);
        }
    }

    #[test]
    fn given_kernel_is_validated() {
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(3, vec![(vec![1.0, 0.0, 0.0], 0.0)]).unwrap();
        let bad = AffineSubspace::line(v(&[0.0, 0.0, 0.0]), &v(&[1.0, 1.0, 0.0]), &tol).unwrap();
        assert!(matches!(
            split(&c, KChoice::Given(bad), &tol).unwrap_err(),
            Error::KNotInKernel { .. }
        ));
        let shifted =
            AffineSubspace::line(v(&[0.0, 1.0, 0.0]), &v(&[0.0, 0.0, 1.0]), &tol).unwrap();
        assert_eq!(
            split(&c, KChoice::Given(shifted), &tol).unwrap_err(),
            Error::NotLinear
        );

        // a smaller K than the full kernel is allowed
        let small = AffineSubspace::line(v(&[0.0, 0.0, 0.0]), &v(&[0.0, 0.0, 1.0]), &tol).unwrap();
        let s = split(&c, KChoice::Given(small), &tol).unwrap();
        assert_eq!(s.reduced().ambient_dim(), 2);
        let x = v(&[2.0, -1.0, 3.0]);
        assert!(
            project_via_split(&s, &x, &tol)
                .unwrap()
                .dist(&v(&[0.0, -1.0, 3.0]))
                < 1e-14
        );
    }

    #[test]
    fn common_kernel_examples() {
        let tol = Tolerances::default();
        let c1 = Polyhedron::from_rows(5, vec![(vec![1.0, 0.0, 0.0, 0.0, 0.0], 1.0)]).unwrap();
        let c2 = Polyhedron::from_rows(5, vec![(vec![0.0, 1.0, 0.0, 0.0, 0.0], 1.0)]).unwrap();
        let k = common_kernel(&[c1, c2], &tol).unwrap();
        assert_eq!(k.dim(), 3);
        for b in k.basis() {
            assert!(b[0].abs() < 1e-15 && b[1].abs() < 1e-15);
        }
        let full = Polyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(common_kernel(&[full], &tol).unwrap().dim(), 0);
        assert_eq!(
            common_kernel(&[], &tol).unwrap_err(),
            Error::EmptyCollection
        );
    }

    #[test]
    fn orbit_splits_into_kernel_and_reduced_parts() {
        let tol = Tolerances::default();
        let c1 = Polyhedron::from_rows(5, vec![(vec![1.0, 1.0, 0.0, 0.0, 0.0], -1.0)]).unwrap();
        let c2 = Polyhedron::from_rows(5, vec![(vec![0.0, -1.0, 0.0, 0.0, 0.0], -2.0)]).unwrap();
        let x0 = v(&[3.0, -4.0, 1.0, 2.0, -5.0]);
        let sched = RelaxationSchedule::RandomIn { max: 1.9, seed: 2 };
        let cmp = orbit_decomposition(&[c1, c2], &SelectionPolicy::Cyclic, &sched, &x0, 200, &tol)
            .unwrap();
        assert_eq!(cmp.reduced.iterates[0].dim(), 2);
        assert_eq!(cmp.k0.as_slice(), &[0.0, 0.0, 1.0, 2.0, -5.0]);
        assert!(cmp.max_gap() < 1e-12, "{}", cmp.max_gap());
        for x in &cmp.direct.iterates {
            for (a, b) in x.as_slice()[2..].iter().zip([1.0, 2.0, -5.0]) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}
