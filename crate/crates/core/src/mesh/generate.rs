//! Deterministic mesh generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_face_topology, BoundaryTag, BoundaryTags, Mesh, MeshError, Point, Triangle};
use crate::scalar::Real;

/// Structured mesh of `[0,1]²`: `n × n` cells, each split along its
/// lower-left to upper-right diagonal.
pub fn unit_square<T: Real>(n: usize, boundary_tag: BoundaryTag) -> Mesh<T> {
    assert!(n >= 1, "unit_square needs at least one cell per side");
    let coords: Vec<T> = (0..=n)
        .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let (vertices, triangles) = tensor_grid(&coords, &coords);
    build_face_topology(vertices, triangles, &BoundaryTags::uniform(boundary_tag))
        .expect("structured unit square is a valid mesh")
}

/// Criss-cross mesh of `[0,1]²`: each of the `n × n` cells is split into
/// four triangles through its center. Unlike [`unit_square`] it has no
/// preferred diagonal direction.
pub fn criss_cross_unit_square<T: Real>(n: usize, boundary_tag: BoundaryTag) -> Mesh<T> {
    assert!(n >= 1, "criss_cross_unit_square needs at least one cell per side");
    let nn = T::from_usize_lossy(n);
    let nx = n + 1;
    let mut vertices = Vec::with_capacity(nx * nx + n * n);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(T::from_usize_lossy(i) / nn, T::from_usize_lossy(j) / nn));
        }
    }
    let half = T::lit(0.5);
    let mut triangles = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = j * nx + i;
            let (b, c, d) = (a + 1, a + nx, a + nx + 1);
            let m = vertices.len();
            vertices.push(Point::new(
                (T::from_usize_lossy(i) + half) / nn,
                (T::from_usize_lossy(j) + half) / nn,
            ));
            for (p, q) in [(a, b), (b, d), (d, c), (c, a)] {
                triangles.push(Triangle { vertices: [p, q, m] });
            }
        }
    }
    build_face_topology(vertices, triangles, &BoundaryTags::uniform(boundary_tag))
        .expect("criss-cross unit square is a valid mesh")
}

/// Quasi-uniform unit-square mesh with nominal size `h`.
///
/// The structured `n × n` mesh with `n = ceil(1/h)` has every interior vertex
/// displaced by a uniform random offset of at most `0.15 / n` per coordinate.
/// The offsets come from a ChaCha stream seeded by `seed` and `n`, so the mesh
/// for a given `(h, seed)` is reproducible and meshes of different sizes are
/// independent of each other.
pub fn jittered_unit_square<T: Real>(
    h: T,
    seed: u64,
    boundary_tag: BoundaryTag,
) -> Result<Mesh<T>, MeshError> {
    if !(h > T::zero()) {
        return Err(MeshError::Topology("mesh size must be positive".into()));
    }
    let n = (T::one() / h - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
    let coords: Vec<T> = (0..=n)
        .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let (mut vertices, triangles) = tensor_grid(&coords, &coords);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let amp = 0.15 / n as f64;
    for j in 1..n {
        for i in 1..n {
            let v = &mut vertices[j * (n + 1) + i];
            v.x += T::lit(rng.random_range(-amp..=amp));
            v.y += T::lit(rng.random_range(-amp..=amp));
        }
    }
    build_face_topology(vertices, triangles, &BoundaryTags::uniform(boundary_tag))
}

/// Parameters of the graded square generator.
#[derive(Debug, Clone, Copy)]
pub struct GradedSquare<T> {
    /// Half side of the square `[-L, L]²`.
    pub half_width: T,
    /// Largest cell spacing away from the refinement point.
    pub h_max: T,
    /// Mandatory vertex around which the mesh is refined.
    pub center: Point<T>,
    /// Spacing at the refinement point, as a fraction of `h_max`.
    pub grading: T,
    /// Distance over which the spacing grows back to `h_max`.
    pub transition: T,
    /// Interior vertex jitter, as a fraction of the local spacing.
    pub jitter: T,
    pub seed: u64,
    pub boundary_tag: BoundaryTag,
}

impl<T: Real> GradedSquare<T> {
    /// Square `[-1,1]²` refined towards `(0.1, 0)`.
    pub fn cavity(h_max: T, seed: u64) -> Self {
        Self {
            half_width: T::one(),
            h_max,
            center: Point::new(T::lit(0.1), T::zero()),
            grading: T::lit(0.25),
            transition: T::lit(0.5),
            jitter: T::lit(0.15),
            seed,
            boundary_tag: BoundaryTag::Absorbing,
        }
    }
}

/// Tensor-product mesh of `[-L,L]²` whose grid lines pass through `center`,
/// with spacing `grading · h_max` at the center growing linearly to `h_max`
/// over `transition`. Interior vertices other than the center are jittered.
pub fn graded_square<T: Real>(p: &GradedSquare<T>) -> Result<Mesh<T>, MeshError> {
    let l = p.half_width;
    if !(p.h_max > T::zero())
        || !(p.grading > T::zero() && p.grading <= T::one())
        || p.center.x.abs() >= l
        || p.center.y.abs() >= l
    {
        return Err(MeshError::Topology("invalid graded square parameters".into()));
    }
    let xs = graded_axis(-l, l, p.center.x, p.h_max, p.grading, p.transition);
    let ys = graded_axis(-l, l, p.center.y, p.h_max, p.grading, p.transition);
    let (nx, ny) = (xs.len(), ys.len());
    let ci = xs.iter().position(|&x| x == p.center.x).expect("center on grid");
    let cj = ys.iter().position(|&y| y == p.center.y).expect("center on grid");
    let (mut vertices, triangles) = tensor_grid(&xs, &ys);

    let spacing = |c: &[T], i: usize| (c[i] - c[i - 1]).min(c[i + 1] - c[i]);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ (nx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let amp = p.jitter.to_f64_lossy();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let (ux, uy): (f64, f64) = (rng.random_range(-amp..=amp), rng.random_range(-amp..=amp));
            if i == ci && j == cj {
                continue;
            }
            let v = &mut vertices[j * nx + i];
            v.x += T::lit(ux) * spacing(&xs, i);
            v.y += T::lit(uy) * spacing(&ys, j);
        }
    }
    build_face_topology(vertices, triangles, &BoundaryTags::uniform(p.boundary_tag))
}

/// Grid coordinates on `[a, b]` containing `c`, graded towards `c`.
fn graded_axis<T: Real>(a: T, b: T, c: T, h: T, g: T, transition: T) -> Vec<T> {
    let left = graded_side(c - a, h, g, transition);
    let right = graded_side(b - c, h, g, transition);
    let mut xs: Vec<T> = left.iter().rev().map(|&d| c - d).collect();
    // `left` ends at exactly `c - a`; pin the endpoints.
    xs[0] = a;
    xs.extend(right.iter().skip(1).map(|&d| c + d));
    *xs.last_mut().unwrap() = b;
    xs
}

/// Distances `0 = d_0 < ... < d_m = len` with spacing bounded by
/// `s(d) = h · min(1, g + (1 - g) d / R)`.
fn graded_side<T: Real>(len: T, h: T, g: T, r: T) -> Vec<T> {
    let one = T::one();
    let slope = (one - g) / r;
    // cumulative density G(d) = ∫ 1/s and its inverse
    let gr = if g < one { (one + slope * r / g).ln() / (h * slope) } else { r / h };
    let cum = |d: T| {
        if g >= one {
            d / h
        } else if d <= r {
            (one + slope * d / g).ln() / (h * slope)
        } else {
            gr + (d - r) / h
        }
    };
    let inv = |s: T| {
        if g >= one {
            s * h
        } else if s <= gr {
            g / slope * ((s * h * slope).exp() - one)
        } else {
            r + (s - gr) * h
        }
    };
    let total = cum(len);
    let m = (total - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
    let step = total / T::from_usize_lossy(m);
    let mut d: Vec<T> = (0..=m).map(|i| inv(step * T::from_usize_lossy(i))).collect();
    d[0] = T::zero();
    d[m] = len;
    d
}

/// Vertices and diagonal-split triangles of the grid `xs × ys`.
fn tensor_grid<T: Real>(xs: &[T], ys: &[T]) -> (Vec<Point<T>>, Vec<Triangle>) {
    let (nx, ny) = (xs.len(), ys.len());
    let mut vertices = Vec::with_capacity(nx * ny);
    for &y in ys {
        for &x in xs {
            vertices.push(Point::new(x, y));
        }
    }
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v00 = j * nx + i;
            let (v10, v01, v11) = (v00 + 1, v00 + nx, v00 + nx + 1);
            triangles.push(Triangle { vertices: [v00, v10, v11] });
            triangles.push(Triangle { vertices: [v00, v11, v01] });
        }
    }
    (vertices, triangles)
}
