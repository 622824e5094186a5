use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four edges of a quadrilateral element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Bottom,
    Right,
    Top,
    Left,
}

impl Face {
    /// Local node pair (counterclockwise numbering) spanning this face.
    pub fn local_nodes(self) -> [usize; 2] {
        match self {
            Face::Bottom => [0, 1],
            Face::Right => [1, 2],
            Face::Top => [2, 3],
            Face::Left => [3, 0],
        }
    }
}

/// Regular `nx` × `ny` grid of unit square elements.
///
/// Nodes are numbered row-major from the lower-left corner, so node `(i, j)`
/// sits at coordinates `(i, j)` and has index `j * (nx + 1) + i`. Element
/// `(col, row)` has index `row * nx + col` and its nodes run counterclockwise
/// starting at the lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMesh {
    nx: usize,
    ny: usize,
}

impl GridMesh {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid(format!(
                "mesh dimensions must be positive, got {nx}x{ny}"
            )));
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn element_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Every element is a unit square.
    pub fn element_volume(&self) -> f64 {
        1.0
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny);
        j * (self.nx + 1) + i
    }

    pub fn node_coords(&self, node: usize) -> (usize, usize) {
        (node % (self.nx + 1), node / (self.nx + 1))
    }

    pub fn element_index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.nx && row < self.ny);
        row * self.nx + col
    }

    pub fn element_coords(&self, element: usize) -> (usize, usize) {
        (element % self.nx, element / self.nx)
    }

    pub fn contains_element(&self, col: usize, row: usize) -> bool {
        col < self.nx && row < self.ny
    }

    pub fn element_nodes(&self, element: usize) -> [usize; 4] {
        let (c, r) = self.element_coords(element);
        let n0 = self.node_index(c, r);
        let n3 = self.node_index(c, r + 1);
        [n0, n0 + 1, n3 + 1, n3]
    }

    pub fn face_nodes(&self, element: usize, face: Face) -> [usize; 2] {
        let nodes = self.element_nodes(element);
        let [a, b] = face.local_nodes();
        [nodes[a], nodes[b]]
    }

    /// Reflect an element about the vertical centre line `x = nx / 2`.
    pub fn mirror_element_x(&self, element: usize) -> usize {
        let (c, r) = self.element_coords(element);
        self.element_index(self.nx - 1 - c, r)
    }

    pub fn mirror_node_x(&self, node: usize) -> usize {
        let (i, j) = self.node_coords(node);
        self.node_index(self.nx - i, j)
    }
}

/// Convenience wrapper matching the free-function form used by the examples.
pub fn build_mesh(nx: usize, ny: usize) -> Result<GridMesh> {
    GridMesh::new(nx, ny)
}
