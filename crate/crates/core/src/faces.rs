//! Faces of polyhedra: enumeration, minimal faces, affine hulls, and the
//! face reduction of polyhedral projections.
//!
//! A face is identified by its full active signature: the constraints that
//! hold with equality everywhere on it. Its relative interior is the set of
//! points of the polyhedron where exactly those constraints are tight.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    affine_from_equalities, AffineSubspace, EqualitySolution, Polyhedron, Tolerances, Vector,
};
use crate::projectors::{project_affine, project_onto_face_set, project_polyhedron, ActiveSet};

/// Largest constraint count accepted by [`enumerate_faces`].
pub const FACE_CAP: usize = 12;

// Implicit-equality probes: constraints slacker than PROBE_GATE at the first
// point are not probed; a probe counts as finding slack above PROBE_MIN_SLACK.
const PROBE_GATE: f64 = 1e-3;
const PROBE_MIN_SLACK: f64 = 1e-5;
const PROBE_REACH: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct Face {
    parent: Arc<Polyhedron>,
    active: ActiveSet,
    hull: AffineSubspace,
    witness: Vector,
}

impl Face {
    pub fn parent(&self) -> &Polyhedron {
        &self.parent
    }

    /// Constraints tight on the whole face.
    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn hull(&self) -> &AffineSubspace {
        &self.hull
    }

    /// A point in the relative interior.
    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    /// Relative-interior membership: `c` is in the parent, every signature
    /// constraint is tight and every other constraint is slack by more than
    /// `tol.act`.
    pub fn contains_in_ri(&self, c: &Vector, tol: &Tolerances) -> bool {
        self.in_ri(c, feas_scale(c, tol), tol)
    }

    fn in_ri(&self, c: &Vector, feas_tol: f64, tol: &Tolerances) -> bool {
        if c.dim() != self.parent.ambient_dim() || !self.parent.contains(c, feas_tol) {
            return false;
        }
        self.parent.halfspaces().iter().enumerate().all(|(i, h)| {
            let s = h.slack(c);
            if self.active.contains(i) {
                s <= tol.act
            } else {
                s > tol.act
            }
        })
    }

    fn key(&self) -> (usize, ActiveSet) {
        (self.dim(), self.active.clone())
    }
}

fn feas_scale(c: &Vector, tol: &Tolerances) -> f64 {
    tol.feas * (1.0 + c.norm())
}

/// All faces of a polyhedron, deduplicated by signature.
#[derive(Debug, Clone)]
pub struct FaceLattice {
    faces: Vec<Face>,
}

impl FaceLattice {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn find(&self, active: &ActiveSet) -> Option<&Face> {
        self.faces.iter().find(|f| f.active() == active)
    }

    /// Number of faces whose relative interior contains `c`.
    pub fn count_ri_containing(&self, c: &Vector, tol: &Tolerances) -> usize {
        self.faces
            .iter()
            .filter(|f| f.contains_in_ri(c, tol))
            .count()
    }

    /// Face counts per dimension.
    pub fn f_vector(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for f in &self.faces {
            *out.entry(f.dim()).or_insert(0) += 1;
        }
        out
    }
}

fn hull_of(c: &Polyhedron, active: &ActiveSet, tol: &Tolerances) -> Result<Option<AffineSubspace>> {
    let rows: Vec<(Vector, f64)> = active
        .indices()
        .iter()
        .map(|&i| {
            let h = &c.halfspaces()[i];
            (h.normal().clone(), h.offset())
        })
        .collect();
    Ok(match affine_from_equalities(&rows, c.ambient_dim(), tol)? {
        EqualitySolution::Feasible(a) => Some(a),
        EqualitySolution::Infeasible { .. } => None,
    })
}

/// Builds the face generated by `forced` from a point `p` of
/// `C ∩ {equalities in forced}`, detecting implicit equalities by directional
/// probes and placing the witness in the relative interior.
/// `None` when the tight rows at the witness are inconsistent, which only a
/// loose feasibility tolerance lets through.
fn face_from_point(
    parent: &Arc<Polyhedron>,
    forced: &[usize],
    p: Vector,
    tol: &Tolerances,
) -> Result<Option<Face>> {
    let c: &Polyhedron = parent;
    let reach = PROBE_REACH * (1.0 + p.norm());
    let mut points = vec![p.clone()];
    for (i, h) in c.halfspaces().iter().enumerate() {
        if forced.contains(&i) || h.slack(&p) > PROBE_GATE {
            continue;
        }
        // push far away from constraint i and pull back into the face set
        let mut target = p.clone();
        target.axpy(-reach / h.normal_norm(), h.normal());
        if let Some(q) = project_onto_face_set(c, forced, &target, tol)? {
            if h.slack(&q) > PROBE_MIN_SLACK {
                points.push(q);
            }
        }
    }
    let mut witness = Vector::zeros(c.ambient_dim());
    let w = 1.0 / points.len() as f64;
    for q in &points {
        witness.axpy(w, q);
    }
    let active = ActiveSet::new(c.active_indices(&witness, tol.act));
    let Some(hull) = hull_of(c, &active, tol)? else {
        return Ok(None);
    };
    Ok(Some(Face {
        parent: Arc::clone(parent),
        active,
        hull,
        witness,
    }))
}

/// Enumerates every nonempty face `C ∩ {<a_i, .> = b_i, i in J}` over all
/// subsets `J` of the constraints.
pub fn enumerate_faces(c: &Polyhedron, tol: &Tolerances) -> Result<FaceLattice> {
    let m = c.len();
    if m > FACE_CAP {
        return Err(Error::CapExceeded {
            cap: FACE_CAP,
            found: m,
        });
    }
    let parent = Arc::new(c.clone());
    let origin = Vector::zeros(c.ambient_dim());
    let mut by_key: BTreeMap<(usize, ActiveSet), Face> = BTreeMap::new();
    let mut any = false;
    for mask in 0u32..(1u32 << m) {
        let forced: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let Some(p) = project_onto_face_set(c, &forced, &origin, tol)? else {
            continue;
        };
        any = true;
        if let Some(face) = face_from_point(&parent, &forced, p, tol)? {
            by_key.entry(face.key()).or_insert(face);
        }
    }
    if !any {
        return Err(Error::EmptyPolyhedron);
    }
    let mut faces: Vec<Face> = by_key.into_values().collect();
    faces.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.active.cmp(&b.active)));
    Ok(FaceLattice { faces })
}

/// The smallest face containing `point`: the constraints tight at `point`
/// define it, and `point` lies in its relative interior.
pub fn minimal_face(c: &Polyhedron, point: &Vector, tol: &Tolerances) -> Result<Face> {
    minimal_face_within(c, point, feas_scale(point, tol), tol)
}

fn minimal_face_within(
    c: &Polyhedron,
    point: &Vector,
    feas_tol: f64,
    tol: &Tolerances,
) -> Result<Face> {
    point.check_dim(c.ambient_dim())?;
    let violation = c.max_violation(point);
    if violation > feas_tol {
        return Err(Error::PointNotInSet { violation });
    }
    let active = ActiveSet::new(c.active_indices(point, tol.act));
    let hull = hull_of(c, &active, tol)?.ok_or(Error::PointNotInSet { violation })?;
    let face = Face {
        parent: Arc::new(c.clone()),
        active,
        hull,
        witness: point.clone(),
    };
    debug_assert!(face.in_ri(point, feas_tol, tol));
    Ok(face)
}

/// Projects `x` onto `C`, finds the minimal face `F` at the projection and
/// checks that projecting onto the affine hull of `F` gives the same point.
pub fn face_of_projection(c: &Polyhedron, x: &Vector, tol: &Tolerances) -> Result<(Face, Vector)> {
    let (p, _) = project_polyhedron(c, x, tol)?;
    // the projector accepts candidates on the scale of `x`
    let face = minimal_face_within(c, &p, feas_scale(x, tol).max(feas_scale(&p, tol)), tol)?;
    let via_hull = project_affine(face.hull(), x)?;
    let gap = via_hull.dist(&p);
    if gap > 10.0 * tol.feas {
        return Err(Error::FaceIdentityViolated { gap });
    }
    Ok((face, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    /// For each sample, the number of faces whose relative interior holds it.
    pub counts: Vec<usize>,
    /// Indices of samples with a count other than one.
    pub violations: Vec<usize>,
}

/// Checks that every sample lies in the relative interior of exactly one face.
pub fn partition_check(
    c: &Polyhedron,
    samples: &[Vector],
    tol: &Tolerances,
) -> Result<PartitionReport> {
    let lattice = enumerate_faces(c, tol)?;
    let counts: Vec<usize> = samples
        .iter()
        .map(|s| lattice.count_ri_containing(s, tol))
        .collect();
    let violations = counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n != 1)
        .map(|(i, _)| i)
        .collect();
    Ok(PartitionReport { counts, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn unit_square() -> Polyhedron {
        Polyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn whole_space_has_one_face() {
        let tol = Tolerances::default();
        let lat = enumerate_faces(&Polyhedron::new(2, vec![]).unwrap(), &tol).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.faces()[0].dim(), 2);
    }

    #[test]
    fn unit_square_has_nine_faces() {
        let tol = Tolerances::default();
        let lat = enumerate_faces(&unit_square(), &tol).unwrap();
        // hand count: the square, four edges, four vertices
        assert_eq!(lat.len(), 9);
        let f = lat.f_vector();
        assert_eq!(f[&2], 1);
        assert_eq!(f[&1], 4);
        assert_eq!(f[&0], 4);
    }

    #[test]
    fn halfplane_has_two_faces() {
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(2, vec![(vec![-1.0, 0.0], 0.0)]).unwrap();
        let lat = enumerate_faces(&c, &tol).unwrap();
        assert_eq!(lat.len(), 2);
        assert_eq!(lat.f_vector()[&1], 1);
    }

    #[test]
    fn cap_and_empty_errors() {
        let tol = Tolerances::default();
        let rows = (0..13).map(|i| (vec![1.0, i as f64], 1.0)).collect();
        let big = Polyhedron::from_rows(2, rows).unwrap();
        assert_eq!(
            enumerate_faces(&big, &tol).unwrap_err(),
            Error::CapExceeded { cap: 12, found: 13 }
        );
        let empty = Polyhedron::from_rows(1, vec![(vec![1.0], 0.0), (vec![-1.0], -1.0)]).unwrap();
        assert_eq!(
            enumerate_faces(&empty, &tol).unwrap_err(),
            Error::EmptyPolyhedron
        );
    }

    #[test]
    fn implicit_equalities_are_detected() {
        // a segment in R^2 written with two opposite inequalities
        let tol = Tolerances::default();
        let c = Polyhedron::from_rows(
            2,
            vec![
                (vec![0.0, 1.0], 0.0),
                (vec![0.0, -1.0], 0.0),
                (vec![1.0, 0.0], 1.0),
                (vec![-1.0, 0.0], 0.0),
            ],
        )
        .unwrap();
        let lat = enumerate_faces(&c, &tol).unwrap();
        assert_eq!(lat.len(), 3);
        let top = &lat.faces()[0];
        assert_eq!(top.dim(), 1);
        assert_eq!(top.active(), &ActiveSet::new(vec![0, 1]));
    }

    #[test]
    fn minimal_face_examples() {
        let tol = Tolerances::default();
        let sq = unit_square();
        let f = minimal_face(&sq, &v(&[0.5, 0.5]), &tol).unwrap();
        assert_eq!(f.dim(), 2);
        assert!(f.active().is_empty());
        let f = minimal_face(&sq, &v(&[0.0, 0.0]), &tol).unwrap();
        assert_eq!(f.dim(), 0);
        assert!(f.hull().base().norm() < 1e-15);
        let f = minimal_face(&sq, &v(&[0.0, 0.5]), &tol).unwrap();
        assert_eq!(f.dim(), 1);
        // rows of Polyhedron::boxed: 0 is -x <= 0
        assert_eq!(f.active(), &ActiveSet::new(vec![0]));
        let lat = enumerate_faces(&sq, &tol).unwrap();
        assert!(lat.find(f.active()).is_some());
        assert!(matches!(
            minimal_face(&sq, &v(&[2.0, 0.5]), &tol).unwrap_err(),
            Error::PointNotInSet { .. }
        ));
    }

    #[test]
    fn face_of_projection_examples() {
        let tol = Tolerances::default();
        let sq = unit_square();
        let (f, p) = face_of_projection(&sq, &v(&[0.3, 0.4]), &tol).unwrap();
        assert_eq!(p, v(&[0.3, 0.4]));
        assert_eq!(f.dim(), 2);

        let lower = Polyhedron::from_rows(2, vec![(vec![0.0, 1.0], 0.0)]).unwrap();
        let (f, p) = face_of_projection(&lower, &v(&[3.0, 2.0]), &tol).unwrap();
        assert_eq!(p, v(&[3.0, 0.0]));
        assert_eq!(f.dim(), 1);

        let (f, p) = face_of_projection(&sq, &v(&[2.0, 0.5]), &tol).unwrap();
        assert!(p.dist(&v(&[1.0, 0.5])) < 1e-14);
        assert_eq!(f.active(), &ActiveSet::new(vec![1]));
    }

    #[test]
    fn partition_examples() {
        let tol = Tolerances::default();
        let sq = unit_square();
        let samples = vec![
            v(&[0.5, 0.5]),
            v(&[0.0, 0.0]),
            v(&[1.0, 0.3]),
            v(&[0.2, 1.0]),
        ];
        let rep = partition_check(&sq, &samples, &tol).unwrap();
        assert!(rep.violations.is_empty());

        let half = Polyhedron::from_rows(2, vec![(vec![1.0, 1.0], 1.0)]).unwrap();
        let lat = enumerate_faces(&half, &tol).unwrap();
        for t in [-3.0, 0.0, 2.5] {
            let s = v(&[t, 1.0 - t]);
            assert_eq!(lat.count_ri_containing(&s, &tol), 1);
            assert!(lat
                .find(&ActiveSet::new(vec![0]))
                .unwrap()
                .contains_in_ri(&s, &tol));
        }

        let point = Polyhedron::boxed(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let rep = partition_check(&point, &[v(&[0.0, 0.0])], &tol).unwrap();
        assert_eq!(rep.counts, vec![1]);
    }
}
