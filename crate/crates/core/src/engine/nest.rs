//! The shared five-loop nest. Every level-3 kernel except the triangular
//! solve reduces to `C += op(A)·op(B)` over structured operand blocks and
//! runs through [`run_nest`].

use std::ops::Range;
use std::sync::{Barrier, Mutex};

use super::instrument::Instrumentation;
use crate::matrix::MatMut;
use crate::pack::{micro_kernel_raw, micropanel_count, pack_a_panels, pack_b_panels, BlockingParams, KernelVariant, OperandBlock, MAX_REGISTER_BLOCK};
use crate::sched::{split_even, Dispenser, MachineModel, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum OutputMode {
    Full,
    /// Only `i <= j` of the (square) output is touched.
    Upper,
}

pub(crate) struct Ctx<'a> {
    pub machine: &'a MachineModel,
    pub params: &'a BlockingParams,
    pub strategy: Strategy,
    pub variant: KernelVariant,
    pub ins: Option<&'a Instrumentation>,
}

#[derive(Clone, Copy)]
struct SharedBuf {
    ptr: *mut f64,
}

unsafe impl Send for SharedBuf {}
unsafe impl Sync for SharedBuf {}

impl SharedBuf {
    fn new(v: &mut [f64]) -> Self {
        SharedBuf { ptr: v.as_mut_ptr() }
    }

    /// # Safety
    /// No other live slice may overlap `r`.
    #[allow(clippy::mut_from_ref)]
    unsafe fn slice_mut(&self, r: Range<usize>) -> &mut [f64] {
        std::slice::from_raw_parts_mut(self.ptr.add(r.start), r.len())
    }

    unsafe fn ptr(&self, off: usize) -> *const f64 {
        self.ptr.add(off)
    }
}

#[derive(Clone, Copy)]
struct RawOut {
    ptr: *mut f64,
    rs: isize,
    cs: isize,
}

unsafe impl Send for RawOut {}
unsafe impl Sync for RawOut {}

struct Shared<'a> {
    a: OperandBlock<'a>,
    b: OperandBlock<'a>,
    c: RawOut,
    m: usize,
    n: usize,
    k: usize,
    mode: OutputMode,
    strategy: Strategy,
    variant: KernelVariant,
    params: &'a BlockingParams,
    ins: Option<&'a Instrumentation>,
    region: u32,
    workers: usize,
    class_of: Vec<usize>,
    rank_of: Vec<usize>,
    class_size: Vec<usize>,
    global: Barrier,
    class_bar: Vec<Barrier>,
    disp: Dispenser,
    slots: Vec<Mutex<Option<Range<usize>>>>,
    bc: SharedBuf,
    ac: Vec<SharedBuf>,
    mc: Vec<usize>,
}

/// `C += A·B` with `A` an `m × k` block, `B` a `k × n` block and `C` the
/// `m × n` output, using one worker per modeled core.
pub(crate) fn run_nest(ctx: &Ctx<'_>, a: OperandBlock<'_>, b: OperandBlock<'_>, c: MatMut<'_>, mode: OutputMode) {
    let (m, n, k) = (a.rows, b.cols, a.cols);
    debug_assert!(b.rows == k && c.rows() == m && c.cols() == n);
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    let p = ctx.params;
    let class_of = ctx.machine.core_classes();
    let workers = class_of.len();
    let nclasses = ctx.machine.classes.len();
    let mut class_size = vec![0; nclasses];
    let mut rank_of = Vec::with_capacity(workers);
    for &cl in &class_of {
        rank_of.push(class_size[cl]);
        class_size[cl] += 1;
    }

    let kc = p.kc.min(k);
    let nc = p.nc.min(n);
    let mut bc = vec![0.0; micropanel_count(nc, p.nr) * p.nr * kc];
    // ObS4 ignores classes: one Ac shared by everyone, sized by class 0.
    let mc: Vec<usize> = if ctx.strategy == Strategy::ObS4 {
        vec![p.mc_for(0)]
    } else {
        (0..nclasses).map(|cl| p.mc_for(cl)).collect()
    };
    let mut ac: Vec<Vec<f64>> = mc.iter().map(|&mcc| vec![0.0; micropanel_count(mcc.min(m), p.mr) * p.mr * kc]).collect();

    let mut c = c;
    let rs = c.row_stride();
    let cs = c.col_stride();
    let shared = Shared {
        a,
        b,
        c: RawOut { ptr: c.as_mut_ptr(), rs, cs },
        m,
        n,
        k,
        mode,
        strategy: ctx.strategy,
        variant: ctx.variant,
        params: p,
        ins: ctx.ins,
        region: ctx.ins.map_or(0, |i| i.begin_region()),
        workers,
        global: Barrier::new(workers),
        class_bar: class_size.iter().map(|&s| Barrier::new(s.max(1))).collect(),
        disp: Dispenser::new(m),
        slots: (0..nclasses).map(|_| Mutex::new(None)).collect(),
        bc: SharedBuf::new(&mut bc),
        ac: ac.iter_mut().map(|v| SharedBuf::new(v)).collect(),
        mc,
        class_of,
        rank_of,
        class_size,
    };

    if workers == 1 {
        worker(&shared, 0);
    } else {
        std::thread::scope(|s| {
            for w in 1..workers {
                let sh = &shared;
                s.spawn(move || worker(sh, w));
            }
            worker(&shared, 0);
        });
    }
}

fn worker(sh: &Shared<'_>, w: usize) {
    let p = sh.params;
    let nr = p.nr;
    let mut epoch = 0u32;
    for jc in (0..sh.n).step_by(p.nc) {
        let nb = p.nc.min(sh.n - jc);
        let npan = micropanel_count(nb, nr);
        for pc in (0..sh.k).step_by(p.kc) {
            let kb = p.kc.min(sh.k - pc);
            let bblk = sh.b.sub(pc, jc, kb, nb);
            if bblk.is_zero() {
                continue;
            }
            let mine = split_even(npan, sh.workers)[w].clone();
            if !mine.is_empty() {
                let dst = unsafe { sh.bc.slice_mut(mine.start * nr * kb..mine.end * nr * kb) };
                pack_b_panels(&bblk, nr, mine, dst);
            }
            if w == 0 {
                sh.disp.reset();
            }
            sh.global.wait();
            epoch += 1;

            let step = Step { jc, nb, pc, kb, bblk };
            if sh.strategy == Strategy::ObS4 {
                oblivious_loop3(sh, w, &step, &mut epoch);
            } else {
                dynamic_loop3(sh, w, &step, epoch);
            }
            sh.global.wait();
            epoch += 1;
        }
    }
}

struct Step<'a> {
    jc: usize,
    nb: usize,
    pc: usize,
    kb: usize,
    bblk: OperandBlock<'a>,
}

fn chunk_is_dead(sh: &Shared<'_>, ablk: &OperandBlock<'_>, ic: usize, step: &Step<'_>) -> bool {
    ablk.is_zero() || (sh.mode == OutputMode::Upper && ic >= step.jc + step.nb)
}

fn dynamic_loop3(sh: &Shared<'_>, w: usize, step: &Step<'_>, epoch: u32) {
    let p = sh.params;
    let class = sh.class_of[w];
    let rank = sh.rank_of[w];
    let q = sh.class_size[class];
    let mc = sh.mc[class];
    loop {
        if rank == 0 {
            let r = sh.disp.claim(mc);
            if let (Some(r), Some(ins)) = (&r, sh.ins) {
                ins.chunk(sh.region, epoch, class, r.clone());
            }
            *sh.slots[class].lock().unwrap() = r;
        }
        sh.class_bar[class].wait();
        let Some(r) = sh.slots[class].lock().unwrap().clone() else {
            break;
        };
        let (ic, mb) = (r.start, r.len());
        let ablk = sh.a.sub(ic, step.pc, mb, step.kb);
        let dead = chunk_is_dead(sh, &ablk, ic, step);
        let mpan = micropanel_count(mb, p.mr);
        if !dead {
            let share = split_even(mpan, q)[rank].clone();
            if !share.is_empty() {
                let dst = unsafe { sh.ac[class].slice_mut(share.start * p.mr * step.kb..share.end * p.mr * step.kb) };
                pack_a_panels(&ablk, p.mr, share, dst);
            }
        }
        // Also guarantees every member has read the slot before the
        // leader overwrites it.
        sh.class_bar[class].wait();
        if dead {
            continue;
        }
        let npan = micropanel_count(step.nb, p.nr);
        let (ir, jr) = match sh.strategy {
            Strategy::D3S5 => (split_even(mpan, q)[rank].clone(), 0..npan),
            _ => (0..mpan, split_even(npan, q)[rank].clone()),
        };
        macro_kernel(sh, w, epoch, sh.ac[class], ic, mb, &ablk, step, ir, jr);
    }
}

fn oblivious_loop3(sh: &Shared<'_>, w: usize, step: &Step<'_>, epoch: &mut u32) {
    let p = sh.params;
    let mc = sh.mc[0];
    let npan = micropanel_count(step.nb, p.nr);
    for ic in (0..sh.m).step_by(mc) {
        let mb = mc.min(sh.m - ic);
        let ablk = sh.a.sub(ic, step.pc, mb, step.kb);
        if chunk_is_dead(sh, &ablk, ic, step) {
            continue;
        }
        let mpan = micropanel_count(mb, p.mr);
        let share = split_even(mpan, sh.workers)[w].clone();
        if !share.is_empty() {
            let dst = unsafe { sh.ac[0].slice_mut(share.start * p.mr * step.kb..share.end * p.mr * step.kb) };
            pack_a_panels(&ablk, p.mr, share, dst);
        }
        sh.global.wait();
        *epoch += 1;
        let jr = split_even(npan, sh.workers)[w].clone();
        macro_kernel(sh, w, *epoch, sh.ac[0], ic, mb, &ablk, step, 0..mpan, jr);
        sh.global.wait();
        *epoch += 1;
    }
}

/// Loops 4 and 5 over the given micro-panel ranges of the packed buffers.
#[allow(clippy::too_many_arguments)]
fn macro_kernel(
    sh: &Shared<'_>,
    w: usize,
    epoch: u32,
    ac: SharedBuf,
    ic: usize,
    mb: usize,
    ablk: &OperandBlock<'_>,
    step: &Step<'_>,
    ir_range: Range<usize>,
    jr_range: Range<usize>,
) {
    let p = sh.params;
    let (mr, nr, kb) = (p.mr, p.nr, step.kb);
    let mut scratch = [0.0f64; MAX_REGISTER_BLOCK * MAX_REGISTER_BLOCK];
    for jr in jr_range {
        let n_eff = nr.min(step.nb - jr * nr);
        if step.bblk.sub(0, jr * nr, kb, n_eff).is_zero() {
            continue;
        }
        let gj = step.jc + jr * nr;
        let b_ptr = unsafe { sh.bc.ptr(jr * nr * kb) };
        for ir in ir_range.clone() {
            let m_eff = mr.min(mb - ir * mr);
            if ablk.sub(ir * mr, 0, m_eff, kb).is_zero() {
                continue;
            }
            let gi = ic + ir * mr;
            let upper = sh.mode == OutputMode::Upper;
            if upper && gi > gj + n_eff - 1 {
                continue;
            }
            let a_ptr = unsafe { ac.ptr(ir * mr * kb) };
            let c_ptr = sh.c.ptr.wrapping_offset(gi as isize * sh.c.rs + gj as isize * sh.c.cs);
            if upper && gi + m_eff - 1 > gj {
                // Straddles the diagonal: compute densely, merge the upper part.
                scratch[..mr * nr].fill(0.0);
                unsafe {
                    micro_kernel_raw(kb, a_ptr, b_ptr, scratch.as_mut_ptr(), 1, mr as isize, m_eff, n_eff, mr, nr, sh.variant);
                }
                for j in 0..n_eff {
                    for i in 0..m_eff {
                        if gi + i <= gj + j {
                            unsafe {
                                *c_ptr.offset(i as isize * sh.c.rs + j as isize * sh.c.cs) += scratch[i + j * mr];
                            }
                        }
                    }
                }
            } else {
                unsafe {
                    micro_kernel_raw(kb, a_ptr, b_ptr, c_ptr, sh.c.rs, sh.c.cs, m_eff, n_eff, mr, nr, sh.variant);
                }
            }
            if let Some(ins) = sh.ins {
                ins.write_tile(sh.region, epoch, w, gi..gi + m_eff, gj..gj + n_eff, upper);
            }
        }
    }
}
