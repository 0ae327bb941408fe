//! Packing of `Ac` / `Bc` into micro-panel order, plus the micro-kernel.
//!
//! `Ac` holds `mr`-row micro-panels: element `(p·mr + r, l)` sits at offset
//! `p·(mr·kc) + l·mr + r`. `Bc` holds `nr`-column micro-panels: element
//! `(l, q·nr + c)` sits at offset `q·(nr·kc) + l·nr + c`. Partial edge
//! panels are zero-padded to the full width, so the micro-kernel never
//! needs an edge variant.
//!
//! Structured operands are expanded while packing, using the coordinates of
//! the block inside the whole operand: symmetric operands read the upper
//! triangle mirrored, triangular operands read zeros below the diagonal.

mod kernel;
mod params;

pub use kernel::{micro_kernel, micro_kernel_raw, KernelVariant};
pub use params::{BlockingParams, MAX_REGISTER_BLOCK, MR, NR};

use crate::matrix::{DenseMatrix, MatRef};

/// How an operand is materialized while packing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PackShape {
    Dense,
    SymmetricUpper,
    TriangularUpper,
    TriangularUpperUnit,
}

impl PackShape {
    #[inline(always)]
    fn element(self, src: MatRef<'_>, gi: usize, gj: usize) -> f64 {
        unsafe {
            match self {
                PackShape::Dense => src.get_unchecked(gi, gj),
                PackShape::SymmetricUpper => {
                    if gi <= gj {
                        src.get_unchecked(gi, gj)
                    } else {
                        src.get_unchecked(gj, gi)
                    }
                }
                PackShape::TriangularUpper => {
                    if gi <= gj {
                        src.get_unchecked(gi, gj)
                    } else {
                        0.0
                    }
                }
                PackShape::TriangularUpperUnit => match gi.cmp(&gj) {
                    std::cmp::Ordering::Less => src.get_unchecked(gi, gj),
                    std::cmp::Ordering::Equal => 1.0,
                    std::cmp::Ordering::Greater => 0.0,
                },
            }
        }
    }

    /// True when every element of the block `[r0, r0+rows) × [c0, c0+cols)`
    /// is structurally zero.
    pub fn block_is_zero(self, r0: usize, c0: usize, rows: usize, cols: usize) -> bool {
        match self {
            PackShape::TriangularUpper | PackShape::TriangularUpperUnit => {
                rows > 0 && cols > 0 && r0 >= c0 + cols
            }
            _ => false,
        }
    }
}

/// A rectangular block of a (possibly structured) operand, addressed in the
/// operand's global coordinates.
#[derive(Clone, Copy)]
pub struct OperandBlock<'a> {
    pub src: MatRef<'a>,
    pub shape: PackShape,
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
    pub scale: f64,
}

impl<'a> OperandBlock<'a> {
    pub fn whole(src: MatRef<'a>, shape: PackShape) -> Self {
        OperandBlock {
            src,
            shape,
            row0: 0,
            col0: 0,
            rows: src.rows(),
            cols: src.cols(),
            scale: 1.0,
        }
    }

    /// Sub-block at `(r, c)` of this block, `rows × cols`.
    pub fn sub(&self, r: usize, c: usize, rows: usize, cols: usize) -> Self {
        debug_assert!(r + rows <= self.rows && c + cols <= self.cols);
        OperandBlock {
            row0: self.row0 + r,
            col0: self.col0 + c,
            rows,
            cols,
            ..*self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.shape.block_is_zero(self.row0, self.col0, self.rows, self.cols)
    }

    #[inline(always)]
    fn at(&self, i: usize, j: usize) -> f64 {
        let v = self.shape.element(self.src, self.row0 + i, self.col0 + j);
        if self.scale == 1.0 {
            v
        } else {
            self.scale * v
        }
    }
}

pub fn micropanel_count(len: usize, width: usize) -> usize {
    len.div_ceil(width)
}

/// Packs micro-panels `panels` of an `A` block (`rows × depth`) into `dst`,
/// which holds exactly those panels (`dst[0]` is the first value of panel
/// `panels.start`).
pub fn pack_a_panels(block: &OperandBlock<'_>, mr: usize, panels: std::ops::Range<usize>, dst: &mut [f64]) {
    let depth = block.cols;
    let stride = mr * depth;
    let first = panels.start;
    for p in panels {
        let out = &mut dst[(p - first) * stride..(p - first + 1) * stride];
        let r0 = p * mr;
        let live = mr.min(block.rows - r0);
        if block.shape == PackShape::Dense && block.scale == 1.0 {
            let src = block.src;
            for l in 0..depth {
                let col = &mut out[l * mr..(l + 1) * mr];
                for (r, slot) in col.iter_mut().enumerate().take(live) {
                    *slot = unsafe { src.get_unchecked(block.row0 + r0 + r, block.col0 + l) };
                }
                col[live..].fill(0.0);
            }
        } else {
            for l in 0..depth {
                let col = &mut out[l * mr..(l + 1) * mr];
                for (r, slot) in col.iter_mut().enumerate().take(live) {
                    *slot = block.at(r0 + r, l);
                }
                col[live..].fill(0.0);
            }
        }
    }
}

/// Packs micro-panels `panels` of a `B` block (`depth × cols`) into `dst`,
/// which holds exactly those panels.
pub fn pack_b_panels(block: &OperandBlock<'_>, nr: usize, panels: std::ops::Range<usize>, dst: &mut [f64]) {
    let depth = block.rows;
    let stride = nr * depth;
    let first = panels.start;
    for q in panels {
        let out = &mut dst[(q - first) * stride..(q - first + 1) * stride];
        let c0 = q * nr;
        let live = nr.min(block.cols - c0);
        if block.shape == PackShape::Dense && block.scale == 1.0 {
            let src = block.src;
            for l in 0..depth {
                let row = &mut out[l * nr..(l + 1) * nr];
                for (c, slot) in row.iter_mut().enumerate().take(live) {
                    *slot = unsafe { src.get_unchecked(block.row0 + l, block.col0 + c0 + c) };
                }
                row[live..].fill(0.0);
            }
        } else {
            for l in 0..depth {
                let row = &mut out[l * nr..(l + 1) * nr];
                for (c, slot) in row.iter_mut().enumerate().take(live) {
                    *slot = block.at(l, c0 + c);
                }
                row[live..].fill(0.0);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PanelKind {
    PanelA,
    PanelB,
}

/// An owned packed buffer, mainly for inspection and tests; the engine
/// packs into reusable workspace through [`pack_a_panels`] / [`pack_b_panels`].
#[derive(Clone, Debug, PartialEq)]
pub struct PackedBuffer {
    pub kind: PanelKind,
    pub rows: usize,
    pub cols: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl PackedBuffer {
    pub fn depth(&self) -> usize {
        match self.kind {
            PanelKind::PanelA => self.cols,
            PanelKind::PanelB => self.rows,
        }
    }

    pub fn micropanels(&self) -> usize {
        match self.kind {
            PanelKind::PanelA => micropanel_count(self.rows, self.width),
            PanelKind::PanelB => micropanel_count(self.cols, self.width),
        }
    }

    /// Offset of logical element `(i, j)` inside `data`.
    pub fn offset(&self, i: usize, j: usize) -> usize {
        let (w, d) = (self.width, self.depth());
        match self.kind {
            PanelKind::PanelA => (i / w) * (w * d) + j * w + i % w,
            PanelKind::PanelB => (j / w) * (w * d) + i * w + j % w,
        }
    }

    pub fn unpack(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self.data[self.offset(i, j)])
    }

    /// Packed slab of micro-panel `p` (`width × depth` values).
    pub fn micropanel(&self, p: usize) -> &[f64] {
        let len = self.width * self.depth();
        &self.data[p * len..(p + 1) * len]
    }
}

/// Packs `src` (whose `(0,0)` is the operand origin) as an `A` block.
pub fn pack_a(src: MatRef<'_>, shape: PackShape, params: &BlockingParams) -> PackedBuffer {
    let block = OperandBlock::whole(src, shape);
    let panels = micropanel_count(src.rows(), params.mr);
    let mut data = vec![0.0; panels * params.mr * src.cols()];
    pack_a_panels(&block, params.mr, 0..panels, &mut data);
    PackedBuffer {
        kind: PanelKind::PanelA,
        rows: src.rows(),
        cols: src.cols(),
        width: params.mr,
        data,
    }
}

/// Packs `src` as a `B` block.
pub fn pack_b(src: MatRef<'_>, shape: PackShape, params: &BlockingParams) -> PackedBuffer {
    let block = OperandBlock::whole(src, shape);
    let panels = micropanel_count(src.cols(), params.nr);
    let mut data = vec![0.0; panels * params.nr * src.rows()];
    pack_b_panels(&block, params.nr, 0..panels, &mut data);
    PackedBuffer {
        kind: PanelKind::PanelB,
        rows: src.rows(),
        cols: src.cols(),
        width: params.nr,
        data,
    }
}
