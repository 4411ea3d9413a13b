use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four sides of a quadrilateral element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
        }
    }

    /// 0 for faces normal to x, 1 for faces normal to y.
    pub fn axis(self) -> usize {
        match self {
            Side::Left | Side::Right => 0,
            Side::Bottom | Side::Top => 1,
        }
    }
}

/// Uniform Cartesian grid of `nx * ny` rectangles; element `(i, j)` has id `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredMesh {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub origin: [f64; 2],
}

/// An interior face between two elements or a boundary face of one element.
///
/// For interior faces `minus` lies on the low-coordinate side and the normal
/// points from `minus` to `plus` (along +x or +y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub minus: usize,
    pub plus: Option<usize>,
    /// Side of `minus` on which the face lies.
    pub side: Side,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none()
    }

    /// Unit normal pointing out of `minus`.
    pub fn normal(&self) -> [f64; 2] {
        self.side.normal()
    }
}

impl StructuredMesh {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::usage("mesh needs at least one element in each direction"));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::usage(format!("cell sizes must be positive, got {hx} x {hy}")));
        }
        Ok(Self {
            nx,
            ny,
            hx,
            hy,
            origin: [0.0, 0.0],
        })
    }

    pub fn n_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn element_id(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e % self.nx, e / self.nx)
    }

    /// Lower-left corner of element `e`.
    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.element_ij(e);
        [
            self.origin[0] + i as f64 * self.hx,
            self.origin[1] + j as f64 * self.hy,
        ]
    }

    pub fn neighbor(&self, e: usize, side: Side) -> Option<usize> {
        let (i, j) = self.element_ij(e);
        match side {
            Side::Left => (i > 0).then(|| e - 1),
            Side::Right => (i + 1 < self.nx).then(|| e + 1),
            Side::Bottom => (j > 0).then(|| e - self.nx),
            Side::Top => (j + 1 < self.ny).then(|| e + self.nx),
        }
    }

    /// Face length for faces on `side`.
    pub fn face_length(&self, side: Side) -> f64 {
        match side.axis() {
            0 => self.hy,
            _ => self.hx,
        }
    }

    /// Element extent normal to faces on `side`.
    pub fn normal_extent(&self, side: Side) -> f64 {
        match side.axis() {
            0 => self.hx,
            _ => self.hy,
        }
    }

    /// Every face exactly once: interior x-faces, interior y-faces, then the
    /// boundary faces element by element.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::with_capacity(2 * self.n_elements() + self.nx + self.ny);
        for e in 0..self.n_elements() {
            for side in [Side::Right, Side::Top] {
                if let Some(n) = self.neighbor(e, side) {
                    out.push(Face {
                        minus: e,
                        plus: Some(n),
                        side,
                    });
                }
            }
        }
        for e in 0..self.n_elements() {
            for side in Side::ALL {
                if self.neighbor(e, side).is_none() {
                    out.push(Face {
                        minus: e,
                        plus: None,
                        side,
                    });
                }
            }
        }
        out
    }

    /// Split every cell into `r x r` cells.
    pub fn refined(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::usage("refinement factor must be at least 1"));
        }
        Ok(Self {
            nx: self.nx * r,
            ny: self.ny * r,
            hx: self.hx / r as f64,
            hy: self.hy / r as f64,
            origin: self.origin,
        })
    }

    /// Index of a boundary face along its side: `j` for left/right faces, `i` for bottom/top.
    pub fn boundary_index(&self, e: usize, side: Side) -> usize {
        let (i, j) = self.element_ij(e);
        match side.axis() {
            0 => j,
            _ => i,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let m = StructuredMesh::new(5, 3, 1.0, 2.0).unwrap();
        for e in 0..m.n_elements() {
            let (i, j) = m.element_ij(e);
            assert_eq!(m.element_id(i, j), e);
        }
        assert_eq!(m.element_id(4, 2), 14);
    }

    #[test]
    fn face_count() {
        let m = StructuredMesh::new(4, 3, 1.0, 1.0).unwrap();
        let faces = m.faces();
        let interior = faces.iter().filter(|f| !f.is_boundary()).count();
        assert_eq!(interior, 3 * 3 + 4 * 2);
        assert_eq!(faces.len() - interior, 2 * 4 + 2 * 3);
    }

    #[test]
    fn neighbors_are_symmetric() {
        let m = StructuredMesh::new(3, 4, 1.0, 1.0).unwrap();
        for e in 0..m.n_elements() {
            for s in Side::ALL {
                if let Some(n) = m.neighbor(e, s) {
                    assert_eq!(m.neighbor(n, s.opposite()), Some(e));
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_meshes() {
        assert!(StructuredMesh::new(0, 3, 1.0, 1.0).is_err());
        assert!(StructuredMesh::new(2, 3, 0.0, 1.0).is_err());
        assert!(StructuredMesh::new(2, 3, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn refinement_scales_cells() {
        let m = StructuredMesh::new(28, 12, 0.5, 0.5).unwrap().refined(2).unwrap();
        assert_eq!((m.nx, m.ny), (56, 24));
        assert_eq!(m.hx, 0.25);
    }
}
