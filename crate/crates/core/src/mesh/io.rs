//! Line-oriented mesh file format.
//!
//! ```text
//! $Nodes <count>
//! <id> <x> <y>
//! $Triangles <count>
//! <id> <v1> <v2> <v3>
//! $BoundaryEdges <count>
//! <v1> <v2> <absorbing|metallic>
//! ```
//!
//! Ids are 0-based and must be listed in order. Blank lines are ignored.

use std::fmt::Write;
use std::str::FromStr;

use super::{build_face_topology, BoundaryTag, BoundaryTags, FaceTag, Mesh, MeshError, Point, Triangle};
use crate::scalar::Real;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Result<(usize, Vec<&'a str>), MeshError> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                return Ok((i + 1, toks));
            }
        }
        Err(MeshError::Parse {
            line: self.last + 1,
            reason: "unexpected end of file".into(),
        })
    }

    fn header(&mut self, name: &str) -> Result<usize, MeshError> {
        let (line, toks) = self.next_tokens()?;
        if toks.len() != 2 || toks[0] != name {
            return Err(MeshError::Parse {
                line,
                reason: format!("expected `{name} <count>`"),
            });
        }
        parse(line, toks[1])
    }
}

fn parse<V: FromStr>(line: usize, tok: &str) -> Result<V, MeshError> {
    tok.parse().map_err(|_| MeshError::Parse {
        line,
        reason: format!("cannot parse `{tok}`"),
    })
}

fn expect_len(line: usize, toks: &[&str], n: usize) -> Result<(), MeshError> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(MeshError::Parse {
            line,
            reason: format!("expected {n} fields, found {}", toks.len()),
        })
    }
}

fn expect_id(line: usize, tok: &str, expected: usize) -> Result<(), MeshError> {
    let id: usize = parse(line, tok)?;
    if id == expected {
        Ok(())
    } else {
        Err(MeshError::Parse {
            line,
            reason: format!("expected id {expected}, found {id}"),
        })
    }
}

/// Parses and validates a mesh file.
pub fn load_mesh<T: Real>(text: &str) -> Result<Mesh<T>, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    let nn = lines.header("$Nodes")?;
    let mut vertices = Vec::with_capacity(nn);
    for i in 0..nn {
        let (line, toks) = lines.next_tokens()?;
        expect_len(line, &toks, 3)?;
        expect_id(line, toks[0], i)?;
        let x: f64 = parse(line, toks[1])?;
        let y: f64 = parse(line, toks[2])?;
        vertices.push(Point::new(T::lit(x), T::lit(y)));
    }

    let nt = lines.header("$Triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for i in 0..nt {
        let (line, toks) = lines.next_tokens()?;
        expect_len(line, &toks, 4)?;
        expect_id(line, toks[0], i)?;
        let mut v = [0usize; 3];
        for (slot, tok) in v.iter_mut().zip(&toks[1..]) {
            *slot = parse(line, tok)?;
        }
        triangles.push(Triangle { vertices: v });
    }

    let nb = lines.header("$BoundaryEdges")?;
    let mut tags = BoundaryTags::default();
    for _ in 0..nb {
        let (line, toks) = lines.next_tokens()?;
        expect_len(line, &toks, 3)?;
        let a: usize = parse(line, toks[0])?;
        let b: usize = parse(line, toks[1])?;
        let tag = BoundaryTag::from_str(toks[2]).map_err(|reason| MeshError::Parse { line, reason })?;
        tags.insert(a, b, tag);
    }
    if let Ok((line, _)) = lines.next_tokens() {
        return Err(MeshError::Parse {
            line,
            reason: "trailing content after boundary edges".into(),
        });
    }

    build_face_topology(vertices, triangles, &tags)
}

/// Writes a mesh in the format read by [`load_mesh`], with 17 significant
/// digits for coordinates.
pub fn save_mesh<T: Real>(mesh: &Mesh<T>) -> String {
    let mut out = String::new();
    writeln!(out, "$Nodes {}", mesh.vertices.len()).unwrap();
    for (i, v) in mesh.vertices.iter().enumerate() {
        writeln!(out, "{i} {:.16e} {:.16e}", v.x.to_f64_lossy(), v.y.to_f64_lossy()).unwrap();
    }
    writeln!(out, "$Triangles {}", mesh.triangles.len()).unwrap();
    for (i, t) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = t.vertices;
        writeln!(out, "{i} {a} {b} {c}").unwrap();
    }
    writeln!(out, "$BoundaryEdges {}", mesh.num_boundary_faces()).unwrap();
    for f in &mesh.faces {
        if let FaceTag::Boundary(tag) = f.tag {
            writeln!(out, "{} {} {tag}", f.vertices[0], f.vertices[1]).unwrap();
        }
    }
    out
}
