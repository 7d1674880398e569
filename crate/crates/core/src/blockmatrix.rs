//! Grids of equally sized blocks: partitioning an `m x m` matrix into `s`
//! row-wise and `t` column-wise parts, blockwise transposition, and
//! reassembly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    rows_blocks: usize,
    cols_blocks: usize,
    block_rows: usize,
    block_cols: usize,
    // row-major grid
    blocks: Vec<Matrix>,
}

impl BlockMatrix {
    /// Builds a grid from row-major blocks, all of which must share a shape.
    pub fn from_blocks(
        rows_blocks: usize,
        cols_blocks: usize,
        blocks: Vec<Matrix>,
    ) -> Result<Self> {
        if blocks.len() != rows_blocks * cols_blocks || blocks.is_empty() {
            return Err(Error::LengthMismatch {
                expected: rows_blocks * cols_blocks,
                actual: blocks.len(),
            });
        }
        let (block_rows, block_cols) = blocks[0].shape();
        if let Some(b) = blocks
            .iter()
            .find(|b| b.shape() != (block_rows, block_cols))
        {
            return Err(Error::ShapeMismatch {
                expected: (block_rows, block_cols),
                actual: b.shape(),
            });
        }
        Ok(Self {
            rows_blocks,
            cols_blocks,
            block_rows,
            block_cols,
            blocks,
        })
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.rows_blocks, self.cols_blocks)
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn block(&self, i: usize, j: usize) -> &Matrix {
        &self.blocks[i * self.cols_blocks + j]
    }
}

/// Splits `m` into `row_parts x col_parts` blocks of `(m/row_parts) x (m/col_parts)`.
pub fn partition(m: &Matrix, row_parts: usize, col_parts: usize) -> Result<BlockMatrix> {
    let (rows, cols) = m.shape();
    for (dim, parts) in [(rows, row_parts), (cols, col_parts)] {
        if parts == 0 || dim % parts != 0 {
            return Err(Error::IndivisibleDimensions { dim, parts });
        }
    }
    let (br, bc) = (rows / row_parts, cols / col_parts);
    let mut blocks = Vec::with_capacity(row_parts * col_parts);
    for bi in 0..row_parts {
        for bj in 0..col_parts {
            let mut b = Matrix::zeros(br, bc);
            for i in 0..br {
                for j in 0..bc {
                    b[(i, j)] = m[(bi * br + i, bj * bc + j)];
                }
            }
            blocks.push(b);
        }
    }
    BlockMatrix::from_blocks(row_parts, col_parts, blocks)
}

/// Block `(i, j)` of the result is the transpose of block `(j, i)` of the
/// input, which is exactly the block structure of the transposed matrix.
pub fn transpose_blockwise(b: &BlockMatrix) -> BlockMatrix {
    let (r, c) = b.grid();
    let blocks = (0..c)
        .flat_map(|i| (0..r).map(move |j| (i, j)))
        .map(|(i, j)| b.block(j, i).transpose())
        .collect();
    BlockMatrix::from_blocks(c, r, blocks).expect("transpose preserves a consistent grid")
}

/// Block product `Y_{i,l} = sum_j X_{i,j} Y_{j,l}`, computed per output block
/// in parallel.
pub fn block_matmul(q: &FieldModulus, x: &BlockMatrix, y: &BlockMatrix) -> Result<BlockMatrix> {
    let (xr, xc) = x.grid();
    let (yr, yc) = y.grid();
    if xc != yr || x.block_shape().1 != y.block_shape().0 {
        return Err(Error::DimensionMismatch(format!(
            "grid {xr}x{xc} of {:?} blocks times grid {yr}x{yc} of {:?} blocks",
            x.block_shape(),
            y.block_shape()
        )));
    }
    let out_shape = (x.block_shape().0, y.block_shape().1);
    let blocks = (0..xr * yc)
        .into_par_iter()
        .map(|idx| {
            let (i, l) = (idx / yc, idx % yc);
            let mut acc = Matrix::zeros(out_shape.0, out_shape.1);
            for j in 0..xc {
                let p = x.block(i, j).mul(q, y.block(j, l))?;
                acc.add_scaled(q, &p, crate::field::FieldElement::ONE)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    BlockMatrix::from_blocks(xr, yc, blocks)
}

/// Inverse of [`partition`].
pub fn assemble(b: &BlockMatrix) -> Matrix {
    let (r, c) = b.grid();
    let (br, bc) = b.block_shape();
    let mut out = Matrix::zeros(r * br, c * bc);
    for bi in 0..r {
        for bj in 0..c {
            let blk = b.block(bi, bj);
            for i in 0..br {
                for j in 0..bc {
                    out[(bi * br + i, bj * bc + j)] = blk[(i, j)];
                }
            }
        }
    }
    out
}
