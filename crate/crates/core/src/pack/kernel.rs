use super::params::MAX_REGISTER_BLOCK;
use crate::matrix::MatMut;

/// Which micro-kernel the macro-kernel calls. `Corrupted` perturbs every
/// tile it touches and exists only as a negative control for verification.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelVariant {
    #[default]
    Reference,
    Corrupted,
}

const CORRUPTION: f64 = 1e-3;

/// `C(0:m_eff, 0:n_eff) += Σ_l a(:, l) · b(l, :)` over `k` rank-1 updates.
///
/// # Safety
/// `a` must hold `mr·k` values, `b` must hold `nr·k` values, and every
/// `c + i·rs + j·cs` with `i < m_eff`, `j < n_eff` must be writable and not
/// concurrently accessed.
#[allow(clippy::too_many_arguments)]
#[inline]
pub unsafe fn micro_kernel_raw(
    k: usize,
    a: *const f64,
    b: *const f64,
    c: *mut f64,
    rs: isize,
    cs: isize,
    m_eff: usize,
    n_eff: usize,
    mr: usize,
    nr: usize,
    variant: KernelVariant,
) {
    if mr == 4 && nr == 4 {
        kernel_4x4(k, a, b, c, rs, cs, m_eff, n_eff, variant);
    } else {
        kernel_generic(k, a, b, c, rs, cs, m_eff, n_eff, mr, nr, variant);
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
unsafe fn kernel_4x4(
    k: usize,
    a: *const f64,
    b: *const f64,
    c: *mut f64,
    rs: isize,
    cs: isize,
    m_eff: usize,
    n_eff: usize,
    variant: KernelVariant,
) {
    let mut acc = [[0.0f64; 4]; 4];
    let a = std::slice::from_raw_parts(a, 4 * k);
    let b = std::slice::from_raw_parts(b, 4 * k);
    for (ak, bk) in a.chunks_exact(4).zip(b.chunks_exact(4)) {
        for j in 0..4 {
            let bj = bk[j];
            acc[j][0] += ak[0] * bj;
            acc[j][1] += ak[1] * bj;
            acc[j][2] += ak[2] * bj;
            acc[j][3] += ak[3] * bj;
        }
    }
    if variant == KernelVariant::Corrupted {
        acc[0][0] += CORRUPTION;
    }
    for (j, col) in acc.iter().enumerate().take(n_eff) {
        for (i, v) in col.iter().enumerate().take(m_eff) {
            *c.offset(i as isize * rs + j as isize * cs) += v;
        }
    }
}

#[allow(clippy::too_many_arguments)]
unsafe fn kernel_generic(
    k: usize,
    a: *const f64,
    b: *const f64,
    c: *mut f64,
    rs: isize,
    cs: isize,
    m_eff: usize,
    n_eff: usize,
    mr: usize,
    nr: usize,
    variant: KernelVariant,
) {
    let mut acc = [[0.0f64; MAX_REGISTER_BLOCK]; MAX_REGISTER_BLOCK];
    let a = std::slice::from_raw_parts(a, mr * k);
    let b = std::slice::from_raw_parts(b, nr * k);
    for (ak, bk) in a.chunks_exact(mr).zip(b.chunks_exact(nr)) {
        for j in 0..nr {
            for i in 0..mr {
                acc[j][i] += ak[i] * bk[j];
            }
        }
    }
    if variant == KernelVariant::Corrupted {
        acc[0][0] += CORRUPTION;
    }
    for (j, col) in acc.iter().enumerate().take(n_eff) {
        for (i, v) in col.iter().enumerate().take(m_eff) {
            *c.offset(i as isize * rs + j as isize * cs) += v;
        }
    }
}

/// Safe entry point: `a_panel` is one packed `mr × k` slab, `b_panel` one
/// packed `k × nr` slab.
pub fn micro_kernel(
    a_panel: &[f64],
    b_panel: &[f64],
    mut c: MatMut<'_>,
    m_eff: usize,
    n_eff: usize,
    mr: usize,
    nr: usize,
) {
    assert!(mr >= 1 && nr >= 1 && mr <= MAX_REGISTER_BLOCK && nr <= MAX_REGISTER_BLOCK);
    assert!(m_eff <= mr && n_eff <= nr);
    assert!(a_panel.len().is_multiple_of(mr));
    let k = a_panel.len() / mr;
    assert_eq!(b_panel.len(), k * nr, "panel depths differ");
    assert!(c.rows() >= m_eff && c.cols() >= n_eff);
    let (rs, cs) = (c.row_stride(), c.col_stride());
    unsafe {
        micro_kernel_raw(
            k,
            a_panel.as_ptr(),
            b_panel.as_ptr(),
            c.as_mut_ptr(),
            rs,
            cs,
            m_eff,
            n_eff,
            mr,
            nr,
            KernelVariant::Reference,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{relative_error, DenseMatrix};
    use crate::oracle::oracle_gemm;
    use crate::pack::{pack_a, pack_b, BlockingParams, PackShape};

    #[test]
    fn zero_depth_leaves_c() {
        let mut c = DenseMatrix::random(4, 4, 1);
        let before = c.clone();
        micro_kernel(&[], &[], c.as_mut(), 4, 4, 4, 4);
        assert_eq!(c, before);
    }

    #[test]
    fn unit_vector_rank_one() {
        let mut c = DenseMatrix::zeros(4, 4);
        micro_kernel(&[1.0, 0.0, 0.0, 0.0], &[1.0, 2.0, 3.0, 4.0], c.as_mut(), 4, 4, 4, 4);
        for j in 0..4 {
            assert_eq!(c[(0, j)], (j + 1) as f64);
            for i in 1..4 {
                assert_eq!(c[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn matches_oracle_at_kc_depth() {
        let p = BlockingParams::default();
        let a = DenseMatrix::random(4, 352, 11);
        let b = DenseMatrix::random(352, 4, 12);
        let mut c = DenseMatrix::random(4, 4, 13);
        let mut want = c.clone();
        oracle_gemm(want.as_mut(), a.as_ref(), b.as_ref()).unwrap();
        let pa = pack_a(a.as_ref(), PackShape::Dense, &p);
        let pb = pack_b(b.as_ref(), PackShape::Dense, &p);
        micro_kernel(&pa.data, &pb.data, c.as_mut(), 4, 4, 4, 4);
        assert!(relative_error(c.as_ref(), want.as_ref()) <= 1e-13);
    }

    #[test]
    fn padded_lanes_do_not_leak() {
        // 3x2 effective tile inside a packed 4x4: padded vs exact-size runs agree
        let p = BlockingParams::default();
        let a = DenseMatrix::random(3, 9, 1);
        let b = DenseMatrix::random(9, 2, 2);
        let pa = pack_a(a.as_ref(), PackShape::Dense, &p);
        let pb = pack_b(b.as_ref(), PackShape::Dense, &p);
        let mut big = DenseMatrix::from_fn(5, 5, |_, _| 7.0);
        micro_kernel(&pa.data, &pb.data, big.view_mut(0, 0, 3, 2), 3, 2, 4, 4);
        let mut want = DenseMatrix::from_fn(3, 2, |_, _| 7.0);
        oracle_gemm(want.as_mut(), a.as_ref(), b.as_ref()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i < 3 && j < 2 {
                    assert!((big[(i, j)] - want[(i, j)]).abs() < 1e-14);
                } else {
                    assert_eq!(big[(i, j)], 7.0);
                }
            }
        }
    }

    #[test]
    fn generic_register_block() {
        let p = BlockingParams { mr: 3, nr: 5, ..Default::default() };
        let a = DenseMatrix::random(3, 17, 4);
        let b = DenseMatrix::random(17, 5, 5);
        let pa = pack_a(a.as_ref(), PackShape::Dense, &p);
        let pb = pack_b(b.as_ref(), PackShape::Dense, &p);
        let mut c = DenseMatrix::zeros(3, 5);
        micro_kernel(&pa.data, &pb.data, c.as_mut(), 3, 5, 3, 5);
        let mut want = DenseMatrix::zeros(3, 5);
        oracle_gemm(want.as_mut(), a.as_ref(), b.as_ref()).unwrap();
        assert!(relative_error(c.as_ref(), want.as_ref()) <= 1e-14);
    }
}
