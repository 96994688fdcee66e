use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Extent of a 2D or 3D input, in cells. `z` is `None` for 2D inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub x: usize,
    pub y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
}

impl Dims {
    pub const fn d2(x: usize, y: usize) -> Self {
        Dims { x, y, z: None }
    }

    pub const fn d3(x: usize, y: usize, z: usize) -> Self {
        Dims { x, y, z: Some(z) }
    }

    pub fn is_3d(&self) -> bool {
        self.z.is_some()
    }

    pub fn ndim(&self) -> usize {
        if self.is_3d() {
            3
        } else {
            2
        }
    }

    /// Extent along z; 1 for 2D inputs.
    pub fn z_or_one(&self) -> usize {
        self.z.unwrap_or(1)
    }

    /// Number of cells (`size_input`).
    pub fn size(&self) -> usize {
        self.x * self.y * self.z_or_one()
    }

    pub fn extents(&self) -> [usize; 3] {
        [self.x, self.y, self.z_or_one()]
    }

    pub fn is_positive(&self) -> bool {
        self.x > 0 && self.y > 0 && self.z.is_none_or(|z| z > 0)
    }

    /// Row-major linear index with x fastest.
    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.y + y) * self.x + x
    }

    /// Parses `"XxY"` or `"XxYxZ"` (also accepts `×` and `,` separators).
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', 'X', '×', ',']).map(str::trim).collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::DimsMismatch(format!("cannot parse dimensions `{s}`")))?;
        let dims = match nums.as_slice() {
            [x, y] => Dims::d2(*x, *y),
            [x, y, z] => Dims::d3(*x, *y, *z),
            _ => {
                return Err(Error::DimsMismatch(format!(
                    "expected 2 or 3 dimensions, got `{s}`"
                )))
            }
        };
        if !dims.is_positive() {
            return Err(Error::DimsMismatch(format!(
                "dimensions must be positive: `{s}`"
            )));
        }
        Ok(dims)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.z {
            Some(z) => write!(f, "{}x{}x{}", self.x, self.y, z),
            None => write!(f, "{}x{}", self.x, self.y),
        }
    }
}

/// Dense field of cells, row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    dims: Dims,
    cells: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(dims: Dims, cells: Vec<T>) -> Result<Self> {
        if !dims.is_positive() {
            return Err(Error::DimsMismatch(format!(
                "non-positive dimensions {dims}"
            )));
        }
        if cells.len() != dims.size() {
            return Err(Error::DimsMismatch(format!(
                "{} cells supplied for a {dims} grid ({} expected)",
                cells.len(),
                dims.size()
            )));
        }
        Ok(Grid { dims, cells })
    }

    pub fn filled(dims: Dims, value: T) -> Self {
        Grid {
            dims,
            cells: vec![value; dims.size()],
        }
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::filled(dims, T::zero())
    }

    /// Builds a grid by evaluating `f(x, y, z)` at every cell.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut cells = Vec::with_capacity(dims.size());
        for z in 0..dims.z_or_one() {
            for y in 0..dims.y {
                for x in 0..dims.x {
                    cells.push(f(x, y, z));
                }
            }
        }
        Grid { dims, cells }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [T] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        self.cells[self.dims.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, v: T) {
        let i = self.dims.index(x, y, z);
        self.cells[i] = v;
    }

    pub fn contains_nan(&self) -> bool {
        self.cells.iter().any(|c| c.is_nan())
    }

    /// Bitwise equality of the IEEE-754 representation; NaN payloads count.
    pub fn bit_eq(&self, other: &Grid<T>) -> bool
    where
        T: BitPattern,
    {
        self.dims == other.dims
            && self
                .cells
                .iter()
                .zip(&other.cells)
                .all(|(a, b)| a.bits() == b.bits())
    }

    /// Number of cells whose bit patterns differ, `None` when dims differ.
    pub fn bit_diff_count(&self, other: &Grid<T>) -> Option<usize>
    where
        T: BitPattern,
    {
        (self.dims == other.dims).then(|| {
            self.cells
                .iter()
                .zip(&other.cells)
                .filter(|(a, b)| a.bits() != b.bits())
                .count()
        })
    }
}

/// Raw bit access used for bit-exact comparison.
pub trait BitPattern {
    fn bits(&self) -> u64;
}

impl BitPattern for f32 {
    fn bits(&self) -> u64 {
        u64::from(self.to_bits())
    }
}

impl BitPattern for f64 {
    fn bits(&self) -> u64 {
        self.to_bits()
    }
}
