//! File formats: JSON polygon files, grid CSV tables and OBJ meshes.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{bracket3, ConvexPolyline, PolylineError, Vec2, Vec3};
use crate::inner::InnerGrid;
use crate::outer::OuterGrid;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("polygon file, line {line} column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("mesh: {0}")]
    Mesh(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `{"closed": bool, "vertices": [[x, y], ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub closed: bool,
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_points(points: &[Vec2], closed: bool) -> Self {
        Self {
            closed,
            vertices: points.iter().map(|&p| p.into()).collect(),
        }
    }

    pub fn from_polyline(poly: &ConvexPolyline) -> Self {
        Self::from_points(poly.vertices(), poly.is_closed())
    }

    pub fn to_polyline(&self) -> Result<ConvexPolyline, PolylineError> {
        ConvexPolyline::new(self.vertices.iter().map(|&v| v.into()).collect(), self.closed)
    }

    /// One vertex per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .vertices
            .iter()
            .map(|v| serde_json::to_string(v).expect("finite vertex"))
            .collect();
        format!(
            "{{\n  \"closed\": {},\n  \"vertices\": [\n    {}\n  ]\n}}\n",
            self.closed,
            rows.join(",\n    ")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerRow {
    pub i: usize,
    pub j: usize,
    pub px: f64,
    pub py: f64,
    pub f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterRow {
    pub u: isize,
    pub v: usize,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

pub fn inner_rows(grid: &InnerGrid) -> impl Iterator<Item = InnerRow> + '_ {
    grid.cells().map(|(i, j)| {
        let p = grid.p(i, j).expect("stored cell");
        InnerRow {
            i,
            j,
            px: p.x,
            py: p.y,
            f: grid.f(i, j).expect("stored cell"),
        }
    })
}

pub fn outer_rows(grid: &OuterGrid) -> impl Iterator<Item = OuterRow> + '_ {
    grid.points().map(|(u, v)| {
        let q = grid.q(u, v).expect("stored point");
        OuterRow {
            u,
            v,
            x: q.x,
            y: q.y,
            f: q.z,
        }
    })
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl Iterator<Item = T>) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>, FormatError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(FormatError::from))
        .collect()
}

/// Header `i,j,px,py,f`, one row per stored cell in level order.
pub fn write_inner_csv<W: Write>(grid: &InnerGrid, w: W) -> Result<(), FormatError> {
    write_rows(w, inner_rows(grid))
}

pub fn read_inner_csv<R: Read>(r: R) -> Result<Vec<InnerRow>, FormatError> {
    read_rows(r)
}

/// Header `u,v,X,Y,F`, one row per lattice point in row order.
pub fn write_outer_csv<W: Write>(grid: &OuterGrid, w: W) -> Result<(), FormatError> {
    write_rows(w, outer_rows(grid))
}

pub fn read_outer_csv<R: Read>(r: R) -> Result<Vec<OuterRow>, FormatError> {
    read_rows(r)
}

/// Polygonal mesh with zero-based face indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn validate(&self) -> Result<(), FormatError> {
        for (k, face) in self.faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(FormatError::Mesh(format!("face {k} has {} vertices", face.len())));
            }
            if let Some(&bad) = face.iter().find(|&&i| i >= self.vertices.len()) {
                return Err(FormatError::Mesh(format!("face {k} refers to missing vertex {bad}")));
            }
        }
        Ok(())
    }

    /// Wavefront OBJ: `v x y z` lines then one-based `f a b c [d]` lines.
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<(), FormatError> {
        self.validate()?;
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for face in &self.faces {
            write!(w, "f")?;
            for i in face {
                write!(w, " {}", i + 1)?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One vertex per stored cell; each parallelogram becomes two triangles split
/// along its `(i, j) → (i+1, j+1)` diagonal.
pub fn inner_mesh(grid: &InnerGrid) -> Mesh {
    let mut mesh = Mesh {
        vertices: grid.cells().map(|(i, j)| grid.q(i, j).expect("stored cell")).collect(),
        faces: Vec::new(),
    };
    for (i, j) in grid.cells() {
        if j == i {
            continue;
        }
        let idx = (
            grid.cell_index(i, j),
            grid.cell_index(i + 1, j),
            grid.cell_index(i, j + 1),
            grid.cell_index(i + 1, j + 1),
        );
        if let (Some(a), Some(b), Some(c), Some(d)) = idx {
            mesh.faces.push(vec![a, b, d]);
            mesh.faces.push(vec![a, d, c]);
        }
    }
    mesh
}

/// `|[e1, e2, e3]| / (|e1| |e2| |e3|)` for the three edges from the first corner.
pub fn quad_planarity(q: [Vec3; 4]) -> f64 {
    let (e1, e2, e3) = (q[1] - q[0], q[2] - q[0], q[3] - q[0]);
    let d = e1.norm() * e2.norm() * e3.norm();
    if d == 0.0 {
        0.0
    } else {
        bracket3(e1, e2, e3).abs() / d
    }
}

/// Planar quads `(u,v), (u+1,v), (u+1,v+1), (u,v+1)`. Fails unless every quad
/// is planar within `tol`; also returns the worst planarity seen.
pub fn outer_mesh(grid: &OuterGrid, tol: f64) -> Result<(Mesh, f64), FormatError> {
    let n = grid.polyline().len() as isize;
    let closed = grid.polyline().is_closed();
    let key = |u: isize, v: usize| (if closed { u.rem_euclid(n) } else { u }, v);
    let mut index = HashMap::new();
    let mut mesh = Mesh::default();
    for (u, v) in grid.points() {
        index.insert(key(u, v), mesh.vertices.len());
        mesh.vertices.push(grid.q(u, v).expect("stored point"));
    }
    let mut worst: f64 = 0.0;
    for (u, v) in grid.quads() {
        let corners = [key(u, v), key(u + 1, v), key(u + 1, v + 1), key(u, v + 1)];
        let Some(face) = corners
            .iter()
            .map(|c| index.get(c).copied())
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let q = [0, 1, 2, 3].map(|k| mesh.vertices[face[k]]);
        worst = worst.max(quad_planarity(q));
        mesh.faces.push(face);
    }
    if worst.is_nan() || tol.is_nan() || worst > tol {
        return Err(FormatError::Mesh(format!(
            "planarity audit failed: worst quad {worst:e} exceeds {tol:e}"
        )));
    }
    Ok((mesh, worst))
}

/// Write the whole file next to its destination, then rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
