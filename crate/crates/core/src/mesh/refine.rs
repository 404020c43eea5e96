//! Red (midpoint) refinement.

use super::{build_face_topology, edge_key, BoundaryTags, FaceTag, Mesh, Point, Triangle};
use crate::scalar::Real;

/// Splits every triangle into four by joining its edge midpoints.
///
/// The refined mesh has one new vertex per parent face (ids `V + face id`),
/// four times as many triangles and half the mesh size. Both halves of a
/// boundary face keep the parent's tag.
pub fn refine_uniform<T: Real>(m: &Mesh<T>) -> Mesh<T> {
    let nv = m.vertices.len();
    let half = T::lit(0.5);
    let mut vertices = m.vertices.clone();
    vertices.extend(m.faces.iter().map(|f| {
        let (a, b) = (m.vertices[f.vertices[0]], m.vertices[f.vertices[1]]);
        Point::new((a.x + b.x) * half, (a.y + b.y) * half)
    }));

    let mut triangles = Vec::with_capacity(4 * m.triangles.len());
    for (k, tri) in m.triangles.iter().enumerate() {
        let [a, b, c] = tri.vertices;
        let [fab, fbc, fca] = m.element_faces[k].map(|f| nv + f);
        triangles.push(Triangle { vertices: [a, fab, fca] });
        triangles.push(Triangle { vertices: [fab, b, fbc] });
        triangles.push(Triangle { vertices: [fca, fbc, c] });
        triangles.push(Triangle { vertices: [fab, fbc, fca] });
    }

    let mut tags = BoundaryTags::default();
    for (i, f) in m.faces.iter().enumerate() {
        if let FaceTag::Boundary(t) = f.tag {
            let mid = nv + i;
            let (lo, hi) = edge_key(f.vertices[0], mid);
            tags.insert(lo, hi, t);
            let (lo, hi) = edge_key(mid, f.vertices[1]);
            tags.insert(lo, hi, t);
        }
    }
    build_face_topology(vertices, triangles, &tags).expect("refinement of a valid mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{jittered_unit_square, unit_square, BoundaryTag};

    #[test]
    fn refinement_counts_and_meshsize() {
        let m = unit_square::<f64>(1, BoundaryTag::Absorbing);
        let r = refine_uniform(&m);
        assert_eq!(r.num_elements(), 8);
        assert_eq!(r.vertices.len(), m.vertices.len() + m.faces.len());
        assert!((r.meshsize() - m.meshsize() / 2.0).abs() < 1e-14);
        let rr = refine_uniform(&r);
        assert_eq!(rr.num_elements(), 32);
    }

    #[test]
    fn boundary_tags_are_inherited() {
        // metallic bottom edge, absorbing elsewhere
        let base = unit_square::<f64>(2, BoundaryTag::Absorbing);
        let mut tags = base.boundary_tags();
        for f in &base.faces {
            let (a, b) = (base.vertices[f.vertices[0]], base.vertices[f.vertices[1]]);
            if !f.is_interior() && a.y == 0.0 && b.y == 0.0 {
                tags.insert(f.vertices[0], f.vertices[1], BoundaryTag::Metallic);
            }
        }
        let m = build_face_topology(base.vertices.clone(), base.triangles.clone(), &tags).unwrap();
        let r = refine_uniform(&m);
        for f in r.faces.iter().filter(|f| !f.is_interior()) {
            let (a, b) = (r.vertices[f.vertices[0]], r.vertices[f.vertices[1]]);
            let expected = if a.y == 0.0 && b.y == 0.0 {
                BoundaryTag::Metallic
            } else {
                BoundaryTag::Absorbing
            };
            assert_eq!(f.tag, FaceTag::Boundary(expected));
        }
    }

    #[test]
    fn refining_an_unstructured_mesh_halves_meshsize() {
        let m = jittered_unit_square::<f64>(0.25, 9, BoundaryTag::Metallic).unwrap();
        let r = refine_uniform(&m);
        assert!((r.meshsize() - m.meshsize() / 2.0).abs() < 1e-14);
        assert_eq!(3 * r.num_elements(), 2 * r.num_interior_faces() + r.num_boundary_faces());
    }
}
