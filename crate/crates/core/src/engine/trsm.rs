//! Triangular solve with an upper triangle. The right-hand sides are
//! split statically among workers; each worker solves its block by
//! recursive halving with sequential gemm updates.

use std::ops::Range;

use super::instrument::Instrumentation;
use super::nest::{run_nest, Ctx, OutputMode};
use crate::error::{Error, Result};
use crate::matrix::{Diag, MatMut, MatRef, Side};
use crate::pack::{micropanel_count, BlockingParams, KernelVariant, OperandBlock, PackShape};
use crate::sched::{shares_to_ranges, split_even, split_static, MachineModel, Strategy};

/// First exactly-zero diagonal entry, if any.
pub(crate) fn zero_diagonal(a: MatRef<'_>, diag: Diag) -> Option<usize> {
    if diag == Diag::Unit {
        return None;
    }
    (0..a.rows()).find(|&i| a.get(i, i) == 0.0)
}

/// Static split of `units` over workers: between classes by count×speed
/// then evenly inside the class, or per core by speed.
pub(crate) fn static_units(machine: &MachineModel, units: usize, per_core: bool) -> Result<Vec<Range<usize>>> {
    let class_of = machine.core_classes();
    if per_core {
        let speeds: Vec<f64> = class_of.iter().map(|&c| machine.classes[c].relative_speed).collect();
        return Ok(shares_to_ranges(&split_static(units, &speeds)?));
    }
    let weights: Vec<f64> = machine.classes.iter().map(|c| c.core_count as f64 * c.relative_speed).collect();
    let class_ranges = shares_to_ranges(&split_static(units, &weights)?);
    let mut out = Vec::with_capacity(class_of.len());
    for (cl, range) in class_ranges.iter().enumerate() {
        let q = machine.classes[cl].core_count;
        for r in split_even(range.len(), q) {
            out.push(range.start + r.start..range.start + r.end);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
struct RawB {
    ptr: *mut f64,
    rs: isize,
    cs: isize,
}

unsafe impl Send for RawB {}
unsafe impl Sync for RawB {}

pub(crate) struct TrsmArgs<'a> {
    pub machine: &'a MachineModel,
    pub params: &'a BlockingParams,
    pub strategy: Strategy,
    pub variant: KernelVariant,
    pub ins: Option<&'a Instrumentation>,
}

pub(crate) fn trsm_upper(args: &TrsmArgs<'_>, mut b: MatMut<'_>, a: MatRef<'_>, side: Side, diag: Diag) -> Result<()> {
    if let Some(i) = zero_diagonal(a, diag) {
        return Err(Error::Singular { index: i });
    }
    let (m, n) = (b.rows(), b.cols());
    if m == 0 || n == 0 {
        return Ok(());
    }
    let p = args.params;
    let blocks: Vec<(Range<usize>, Range<usize>)> = match side {
        Side::Left => {
            let units = static_units(args.machine, micropanel_count(n, p.nr), false)?;
            units.into_iter().map(|u| (0..m, u.start * p.nr..(u.end * p.nr).min(n))).collect()
        }
        Side::Right => {
            let per_core = args.strategy == Strategy::S3;
            let units = static_units(args.machine, micropanel_count(m, p.mr), per_core)?;
            units.into_iter().map(|u| (u.start * p.mr..(u.end * p.mr).min(m), 0..n)).collect()
        }
    };
    let region = args.ins.map_or(0, |i| i.begin_region());
    let raw = RawB {
        ptr: b.as_mut_ptr(),
        rs: b.row_stride(),
        cs: b.col_stride(),
    };
    let solve = |w: usize, rows: Range<usize>, cols: Range<usize>| {
        if rows.is_empty() || cols.is_empty() {
            return;
        }
        #[allow(clippy::redundant_locals)] // capture the whole wrapper, not its pointer field
        let raw = raw;
        // Blocks are pairwise disjoint, so each worker owns its view.
        let blk = unsafe {
            MatMut::from_raw_parts(
                raw.ptr.wrapping_offset(rows.start as isize * raw.rs + cols.start as isize * raw.cs),
                rows.len(),
                cols.len(),
                raw.rs,
                raw.cs,
            )
        };
        let seq = MachineModel::single_core();
        let ctx = Ctx {
            machine: &seq,
            params: p,
            strategy: Strategy::D3S4,
            variant: args.variant,
            ins: None,
        };
        match side {
            Side::Left => solve_left(&ctx, a, diag, blk),
            Side::Right => solve_right(&ctx, a, diag, blk),
        }
        if let Some(ins) = args.ins {
            ins.write_tile(region, 0, w, rows, cols, false);
        }
    };
    if blocks.len() == 1 {
        let (r, c) = blocks[0].clone();
        solve(0, r, c);
        return Ok(());
    }
    std::thread::scope(|s| {
        let solve = &solve;
        for (w, (r, c)) in blocks.iter().enumerate().skip(1) {
            let (r, c) = (r.clone(), c.clone());
            s.spawn(move || solve(w, r, c));
        }
        let (r, c) = blocks[0].clone();
        solve(0, r, c);
    });
    Ok(())
}

fn split_point(len: usize, unit: usize) -> usize {
    let h = (len / 2).div_ceil(unit) * unit;
    h.clamp(1, len - 1)
}

fn minus(src: MatRef<'_>) -> OperandBlock<'_> {
    OperandBlock {
        scale: -1.0,
        ..OperandBlock::whole(src, PackShape::Dense)
    }
}

/// `B := A⁻¹·B` for upper `A`.
fn solve_left(ctx: &Ctx<'_>, a: MatRef<'_>, diag: Diag, mut b: MatMut<'_>) {
    let m = b.rows();
    let mr = ctx.params.mr;
    if m <= mr {
        for j in 0..b.cols() {
            for i in (0..m).rev() {
                let mut s = b.get(i, j);
                for l in i + 1..m {
                    s -= a.get(i, l) * b.get(l, j);
                }
                if diag == Diag::NonUnit {
                    s /= a.get(i, i);
                }
                b.set(i, j, s);
            }
        }
        return;
    }
    let h = split_point(m, mr);
    let (mut b1, mut b2) = b.split_at_row(h);
    solve_left(ctx, a.submatrix(h, h, m - h, m - h), diag, b2.rb_mut());
    run_nest(ctx, minus(a.submatrix(0, h, h, m - h)), OperandBlock::whole(b2.rb(), PackShape::Dense), b1.rb_mut(), OutputMode::Full);
    solve_left(ctx, a.submatrix(0, 0, h, h), diag, b1);
}

/// `B := B·A⁻¹` for upper `A`.
fn solve_right(ctx: &Ctx<'_>, a: MatRef<'_>, diag: Diag, mut b: MatMut<'_>) {
    let n = b.cols();
    let nr = ctx.params.nr;
    if n <= nr {
        for i in 0..b.rows() {
            for j in 0..n {
                let mut s = b.get(i, j);
                for l in 0..j {
                    s -= b.get(i, l) * a.get(l, j);
                }
                if diag == Diag::NonUnit {
                    s /= a.get(j, j);
                }
                b.set(i, j, s);
            }
        }
        return;
    }
    let h = split_point(n, nr);
    let (mut b1, mut b2) = b.split_at_col(h);
    solve_right(ctx, a.submatrix(0, 0, h, h), diag, b1.rb_mut());
    run_nest(ctx, minus(b1.rb()), OperandBlock::whole(a.submatrix(0, h, h, n - h), PackShape::Dense), b2.rb_mut(), OutputMode::Full);
    solve_right(ctx, a.submatrix(h, h, n - h, n - h), diag, b2);
}
