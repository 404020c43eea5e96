//! Conforming triangular meshes with oriented faces.
//!
//! Faces are stored once, with a left and an optional right element. The
//! unit normal points from left to right, and outward on the boundary. The
//! incidence sign of a face with respect to an element is `+1` for its left
//! element, `-1` for its right element and `0` otherwise.

mod generate;
mod io;
mod refine;

pub use generate::{criss_cross_unit_square, graded_square, jittered_unit_square, unit_square, GradedSquare};
pub use io::{load_mesh, save_mesh};
pub use refine::refine_uniform;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("topology error: {0}")]
    Topology(String),
}

/// Mesh vertex. Its id is its index in [`Mesh::vertices`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Affine combination `self + t (other - self)`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Self::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

/// Triangle given by three vertex ids in counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
}

/// Boundary condition carried by a boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Silver-Müller absorbing condition with incident data.
    Absorbing,
    /// Perfect electric conductor.
    Metallic,
}

impl BoundaryTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryTag::Absorbing => "absorbing",
            BoundaryTag::Metallic => "metallic",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundaryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absorbing" => Ok(BoundaryTag::Absorbing),
            "metallic" => Ok(BoundaryTag::Metallic),
            other => Err(format!("unknown boundary tag `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceTag {
    Interior,
    Boundary(BoundaryTag),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face<T> {
    /// Vertex ids, lower id first.
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    /// Unit normal pointing from `left` towards `right`.
    pub normal: [T; 2],
    /// Face length `h_F`.
    pub length: T,
    pub tag: FaceTag,
}

impl<T> Face<T> {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }

    /// Incidence sign of this face with respect to `element`.
    pub fn incidence(&self, element: usize) -> i8 {
        if self.left == element {
            1
        } else if self.right == Some(element) {
            -1
        } else {
            0
        }
    }

    /// The element across the face from `element`, if any.
    pub fn neighbor(&self, element: usize) -> Option<usize> {
        if self.left == element {
            self.right
        } else if self.right == Some(element) {
            Some(self.left)
        } else {
            None
        }
    }
}

/// Boundary tag assignment used when faces are built.
#[derive(Debug, Clone, Default)]
pub struct BoundaryTags {
    /// Tag for boundary edges absent from `edges`. `None` makes them an error.
    pub default: Option<BoundaryTag>,
    /// Explicit tags keyed by `(lower id, higher id)`.
    pub edges: BTreeMap<(usize, usize), BoundaryTag>,
}

impl BoundaryTags {
    pub fn uniform(tag: BoundaryTag) -> Self {
        Self {
            default: Some(tag),
            edges: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, a: usize, b: usize, tag: BoundaryTag) {
        self.edges.insert(edge_key(a, b), tag);
    }

    fn lookup(&self, a: usize, b: usize) -> Option<BoundaryTag> {
        self.edges.get(&edge_key(a, b)).copied().or(self.default)
    }
}

#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Immutable conforming mesh.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub vertices: Vec<Point<T>>,
    pub triangles: Vec<Triangle>,
    pub faces: Vec<Face<T>>,
    /// Face ids of each triangle; entry `e` is the edge from local vertex
    /// `e` to local vertex `(e + 1) % 3`.
    pub element_faces: Vec<[usize; 3]>,
    meshsize: T,
}

impl<T: Real> Mesh<T> {
    /// Largest edge length over all triangles.
    pub fn meshsize(&self) -> T {
        self.meshsize
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_interior()).count()
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.faces.len() - self.num_interior_faces()
    }

    pub fn corners(&self, element: usize) -> [Point<T>; 3] {
        self.triangles[element].vertices.map(|v| self.vertices[v])
    }

    pub fn area(&self, element: usize) -> T {
        let [a, b, c] = self.corners(element);
        signed_area(&a, &b, &c)
    }

    pub fn centroid(&self, element: usize) -> Point<T> {
        let [a, b, c] = self.corners(element);
        let third = T::one() / T::lit(3.0);
        Point::new((a.x + b.x + c.x) * third, (a.y + b.y + c.y) * third)
    }

    /// Incidence sign `I_FK`.
    pub fn incidence(&self, face: usize, element: usize) -> i8 {
        self.faces[face].incidence(element)
    }

    /// Element ids sharing a face with `element`.
    pub fn neighbors(&self, element: usize) -> impl Iterator<Item = usize> + '_ {
        self.element_faces[element]
            .iter()
            .filter_map(move |&f| self.faces[f].neighbor(element))
    }

    /// Jump of a per-element scalar field across an interior face:
    /// `I_FL u_L + I_FR u_R`. Boundary faces return the one-sided trace.
    pub fn jump(&self, face: usize, field: &[T]) -> T {
        let f = &self.faces[face];
        match f.right {
            Some(r) => field[f.left] - field[r],
            None => field[f.left],
        }
    }

    /// Average of a per-element scalar field on a face.
    pub fn average(&self, face: usize, field: &[T]) -> T {
        let f = &self.faces[face];
        match f.right {
            Some(r) => (field[f.left] + field[r]) * T::lit(0.5),
            None => field[f.left],
        }
    }

    /// Boundary tags of this mesh, suitable for rebuilding its faces.
    pub fn boundary_tags(&self) -> BoundaryTags {
        let mut tags = BoundaryTags::default();
        for f in &self.faces {
            if let FaceTag::Boundary(t) = f.tag {
                tags.insert(f.vertices[0], f.vertices[1], t);
            }
        }
        tags
    }
}

pub(crate) fn signed_area<T: Real>(a: &Point<T>, b: &Point<T>, c: &Point<T>) -> T {
    ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) * T::lit(0.5)
}

/// Builds faces, normals, incidence and the mesh size from raw connectivity.
///
/// Interior faces are oriented from the lower to the higher vertex id, and
/// their left element is the one whose counterclockwise traversal matches
/// that orientation. A boundary face always has its only element on the
/// left, so its normal is the outward one.
pub fn build_face_topology<T: Real>(
    vertices: Vec<Point<T>>,
    triangles: Vec<Triangle>,
    tags: &BoundaryTags,
) -> Result<Mesh<T>, MeshError> {
    if triangles.is_empty() {
        return Err(MeshError::Topology("mesh has no triangles".into()));
    }
    let nv = vertices.len();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        T::infinity(),
        T::neg_infinity(),
        T::infinity(),
        T::neg_infinity(),
    );
    for p in &vertices {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let area_tol = T::lit(1e-14) * (xmax - xmin) * (ymax - ymin);

    // (lo, hi, element, local edge, traversed lo -> hi)
    let mut edges: Vec<(usize, usize, usize, usize, bool)> = Vec::with_capacity(3 * triangles.len());
    let mut meshsize = T::zero();
    for (k, tri) in triangles.iter().enumerate() {
        let [a, b, c] = tri.vertices;
        if a >= nv || b >= nv || c >= nv {
            return Err(MeshError::Topology(format!(
                "triangle {k} references a vertex out of range"
            )));
        }
        if a == b || b == c || a == c {
            return Err(MeshError::Topology(format!(
                "triangle {k} has repeated vertices"
            )));
        }
        let area = signed_area(&vertices[a], &vertices[b], &vertices[c]);
        if area.abs() < area_tol {
            return Err(MeshError::Topology(format!("triangle {k} has zero area")));
        }
        if area < T::zero() {
            return Err(MeshError::Topology(format!(
                "triangle {k} is not counterclockwise"
            )));
        }
        for e in 0..3 {
            let (p, q) = (tri.vertices[e], tri.vertices[(e + 1) % 3]);
            meshsize = meshsize.max(vertices[p].dist(&vertices[q]));
            let (lo, hi) = edge_key(p, q);
            edges.push((lo, hi, k, e, p == lo));
        }
    }
    edges.sort_unstable();

    let mut faces = Vec::with_capacity(edges.len() / 2 + 1);
    let mut element_faces = vec![[usize::MAX; 3]; triangles.len()];
    let mut boundary_seen = BTreeMap::new();
    let mut i = 0;
    while i < edges.len() {
        let mut j = i + 1;
        while j < edges.len() && edges[j].0 == edges[i].0 && edges[j].1 == edges[i].1 {
            j += 1;
        }
        let (lo, hi) = (edges[i].0, edges[i].1);
        let face_id = faces.len();
        let (left, left_edge, right, tag) = match j - i {
            1 => {
                let (_, _, k, e, _) = edges[i];
                let tag = tags.lookup(lo, hi).ok_or_else(|| {
                    MeshError::Topology(format!("boundary edge ({lo}, {hi}) has no tag"))
                })?;
                boundary_seen.insert((lo, hi), ());
                (k, e, None, FaceTag::Boundary(tag))
            }
            2 => {
                let (first, second) = (edges[i], edges[i + 1]);
                if first.4 == second.4 {
                    return Err(MeshError::Topology(format!(
                        "edge ({lo}, {hi}) traversed in the same direction by triangles {} and {}",
                        first.2, second.2
                    )));
                }
                let (l, r) = if first.4 { (first, second) } else { (second, first) };
                element_faces[r.2][r.3] = face_id;
                (l.2, l.3, Some(r.2), FaceTag::Interior)
            }
            n => {
                return Err(MeshError::Topology(format!(
                    "edge ({lo}, {hi}) is shared by {n} triangles"
                )))
            }
        };
        element_faces[left][left_edge] = face_id;
        let tri = triangles[left].vertices;
        let (p, q) = (
            vertices[tri[left_edge]],
            vertices[tri[(left_edge + 1) % 3]],
        );
        let length = p.dist(&q);
        let normal = [(q.y - p.y) / length, -(q.x - p.x) / length];
        faces.push(Face {
            vertices: [lo, hi],
            left,
            right,
            normal,
            length,
            tag,
        });
        i = j;
    }

    for &(lo, hi) in tags.edges.keys() {
        if !boundary_seen.contains_key(&(lo, hi)) {
            return Err(MeshError::Topology(format!(
                "tagged edge ({lo}, {hi}) is not a boundary edge of the mesh"
            )));
        }
    }

    Ok(Mesh {
        vertices,
        triangles,
        faces,
        element_faces,
        meshsize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_single_cell_topology() {
        let m = unit_square::<f64>(1, BoundaryTag::Absorbing);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.faces.len(), 5);
        assert_eq!(m.num_interior_faces(), 1);
        assert_eq!(m.num_boundary_faces(), 4);
        let interior = m.faces.iter().position(|f| f.is_interior()).unwrap();
        let f = &m.faces[interior];
        let signs = [m.incidence(interior, 0), m.incidence(interior, 1)];
        assert!(signs == [1, -1] || signs == [-1, 1]);
        assert_eq!(m.incidence(interior, f.left), 1);
        assert!((m.meshsize() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normals_are_unit_and_point_left_to_right() {
        let m = jittered_unit_square::<f64>(0.25, 7, BoundaryTag::Absorbing).unwrap();
        for f in &m.faces {
            let n = f.normal;
            assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-14);
            let cl = m.centroid(f.left);
            let mid = m.vertices[f.vertices[0]].lerp(&m.vertices[f.vertices[1]], 0.5);
            // left centroid lies behind the face
            assert!((mid.x - cl.x) * n[0] + (mid.y - cl.y) * n[1] > 0.0);
            if let Some(r) = f.right {
                let cr = m.centroid(r);
                assert!((cr.x - mid.x) * n[0] + (cr.y - mid.y) * n[1] > 0.0);
            }
        }
    }

    #[test]
    fn discrete_divergence_of_constants_vanishes() {
        let m = jittered_unit_square::<f64>(0.2, 3, BoundaryTag::Metallic).unwrap();
        for k in 0..m.num_elements() {
            let mut s = [0.0; 2];
            for &f in &m.element_faces[k] {
                let face = &m.faces[f];
                let sign = m.incidence(f, k) as f64;
                s[0] += sign * face.length * face.normal[0];
                s[1] += sign * face.length * face.normal[1];
            }
            assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12);
        }
    }

    #[test]
    fn face_count_and_euler_relation() {
        for n in 1..6 {
            let m = unit_square::<f64>(n, BoundaryTag::Absorbing);
            let t = m.num_elements();
            assert_eq!(3 * t, 2 * m.num_interior_faces() + m.num_boundary_faces());
            let euler = m.vertices.len() as i64 - m.faces.len() as i64 + t as i64;
            assert_eq!(euler, 1);
        }
    }

    #[test]
    fn jump_and_average_of_constant_field() {
        let m = unit_square::<f64>(3, BoundaryTag::Absorbing);
        let c = vec![2.5; m.num_elements()];
        for (i, f) in m.faces.iter().enumerate() {
            if f.is_interior() {
                assert_eq!(m.jump(i, &c), 0.0);
            }
            assert_eq!(m.average(i, &c), 2.5);
        }
    }

    #[test]
    fn interior_incidence_signs_are_opposite() {
        let m = unit_square::<f64>(4, BoundaryTag::Absorbing);
        for (i, f) in m.faces.iter().enumerate() {
            match f.right {
                Some(r) => assert_eq!(m.incidence(i, f.left) * m.incidence(i, r), -1),
                None => {
                    let nonzero = (0..m.num_elements())
                        .filter(|&k| m.incidence(i, k) != 0)
                        .count();
                    assert_eq!(nonzero, 1);
                }
            }
        }
    }

    #[test]
    fn rejects_clockwise_and_degenerate_triangles() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(2.0, 0.0),
        ];
        let tags = BoundaryTags::uniform(BoundaryTag::Absorbing);
        let cw = vec![Triangle { vertices: [0, 2, 1] }];
        assert!(matches!(
            build_face_topology(v.clone(), cw, &tags),
            Err(MeshError::Topology(_))
        ));
        let flat = vec![Triangle { vertices: [0, 1, 3] }];
        assert!(matches!(
            build_face_topology(v, flat, &tags),
            Err(MeshError::Topology(_))
        ));
    }

    #[test]
    fn rejects_untagged_boundary_edge() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let mut tags = BoundaryTags::default();
        tags.insert(0, 1, BoundaryTag::Metallic);
        tags.insert(1, 2, BoundaryTag::Metallic);
        let err = build_face_topology(v, vec![Triangle { vertices: [0, 1, 2] }], &tags);
        assert!(matches!(err, Err(MeshError::Topology(_))));
    }

    #[test]
    fn equilateral_meshsize() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 3f64.sqrt() / 2.0),
        ];
        let m = build_face_topology(
            v,
            vec![Triangle { vertices: [0, 1, 2] }],
            &BoundaryTags::uniform(BoundaryTag::Metallic),
        )
        .unwrap();
        assert!((m.meshsize() - 1.0).abs() < 1e-15);
    }
}
