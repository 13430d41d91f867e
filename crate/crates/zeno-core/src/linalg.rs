//! Dense complex linear algebra sized for this crate's Hilbert spaces
//! (dimension ≤ 36): matrix exponential, linear solves, a general complex
//! eigensolver, and null-space extraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::{Operator, StateVector};
use crate::{Error, Result, C64};

/// Padé(13,13) numerator coefficients for the matrix exponential
/// (scaling-and-squaring method).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm threshold below which the Padé(13) approximant is accurate to
/// double precision without scaling.
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential `exp(A)` via scaling-and-squaring with a Padé(13)
/// approximant.
pub fn expm(a: &Operator) -> Operator {
    let norm = a.one_norm();
    let squarings = if norm > PADE13_THETA {
        libm::ceil(libm::log2(norm / PADE13_THETA)) as u32
    } else {
        0
    };
    let scaled = a.scaled(C64::new(libm::exp2(-(squarings as f64)), 0.0));
    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

fn pade13(a: &Operator) -> Operator {
    let n = a.dim();
    let eye = Operator::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let re = |x: f64| C64::new(x, 0.0);
    let w = a6
        .scaled(re(PADE13[13]))
        .add(&a4.scaled(re(PADE13[11])))
        .add(&a2.scaled(re(PADE13[9])));
    let u_inner = a6
        .matmul(&w)
        .add(&a6.scaled(re(PADE13[7])))
        .add(&a4.scaled(re(PADE13[5])))
        .add(&a2.scaled(re(PADE13[3])))
        .add(&eye.scaled(re(PADE13[1])));
    let u = a.matmul(&u_inner);

    let w2 = a6
        .scaled(re(PADE13[12]))
        .add(&a4.scaled(re(PADE13[10])))
        .add(&a2.scaled(re(PADE13[8])));
    let v = a6
        .matmul(&w2)
        .add(&a6.scaled(re(PADE13[6])))
        .add(&a4.scaled(re(PADE13[4])))
        .add(&a2.scaled(re(PADE13[2])))
        .add(&eye.scaled(re(PADE13[0])));

    let num = v.add(&u);
    let den = v.sub(&u);
    solve(&den, &num).expect("Padé denominator is well-conditioned by construction")
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Operator, b: &Operator) -> Result<Operator> {
    let n = a.dim();
    assert_eq!(n, b.dim(), "solve: dimension mismatch");
    let mut lhs: Vec<C64> = a.data().to_vec();
    let mut rhs: Vec<C64> = b.data().to_vec();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lhs[col * n + col].norm();
        for row in (col + 1)..n {
            let mag = lhs[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        if pivot_row != col {
            for j in 0..n {
                lhs.swap(col * n + j, pivot_row * n + j);
                rhs.swap(col * n + j, pivot_row * n + j);
            }
        }
        let pivot = lhs[col * n + col];
        for row in (col + 1)..n {
            let factor = lhs[row * n + col] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = lhs[col * n + j];
                lhs[row * n + j] -= factor * v;
            }
            for j in 0..n {
                let v = rhs[col * n + j];
                rhs[row * n + j] -= factor * v;
            }
        }
    }

    let mut x = Operator::zeros(n);
    for col in (0..n).rev() {
        let pivot = lhs[col * n + col];
        for j in 0..n {
            let mut sum = rhs[col * n + j];
            for k in (col + 1)..n {
                sum -= lhs[col * n + k] * x.get(k, j);
            }
            x.set(col, j, sum / pivot);
        }
    }
    Ok(x)
}

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form followed by the shifted QR iteration with deflation.
///
/// The returned order is unspecified.
pub fn eigenvalues(a: &Operator) -> Result<Vec<C64>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a.get(0, 0)]);
    }
    let mut h = hessenberg(a);
    let scale = h.one_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n;
    let mut iters_since_deflation = 0usize;
    let mut total_iters = 0usize;

    while hi > 0 {
        // Zero negligible subdiagonal entries.
        for i in 1..hi {
            let mut tol = eps * (h.get(i - 1, i - 1).norm() + h.get(i, i).norm());
            if tol == 0.0 {
                tol = eps * scale;
            }
            if h.get(i, i - 1).norm() <= tol {
                h.set(i, i - 1, C64::new(0.0, 0.0));
            }
        }
        if hi == 1 || h.get(hi - 1, hi - 2).norm_sqr() == 0.0 {
            eigs.push(h.get(hi - 1, hi - 1));
            hi -= 1;
            iters_since_deflation = 0;
            continue;
        }
        if hi == 2 || h.get(hi - 2, hi - 3).norm_sqr() == 0.0 {
            let (l1, l2) = eig2x2(
                h.get(hi - 2, hi - 2),
                h.get(hi - 2, hi - 1),
                h.get(hi - 1, hi - 2),
                h.get(hi - 1, hi - 1),
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            iters_since_deflation = 0;
            continue;
        }

        let mut lo = hi - 1;
        while lo > 0 && h.get(lo, lo - 1).norm_sqr() != 0.0 {
            lo -= 1;
        }

        total_iters += 1;
        iters_since_deflation += 1;
        if total_iters > 100 * n {
            return Err(Error::EigenNoConvergence);
        }

        let shift = if iters_since_deflation.is_multiple_of(16) {
            // Exceptional shift to break rare limit cycles.
            h.get(hi - 1, hi - 1) + C64::new(h.get(hi - 1, hi - 2).norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let mean = (a + d) * C64::new(0.5, 0.0);
    let diff = (a - d) * C64::new(0.5, 0.0);
    let disc = (diff * diff + b * c).sqrt();
    (mean + disc, mean - disc)
}

fn wilkinson_shift(h: &Operator, hi: usize) -> C64 {
    let a = h.get(hi - 2, hi - 2);
    let b = h.get(hi - 2, hi - 1);
    let c = h.get(hi - 1, hi - 2);
    let d = h.get(hi - 1, hi - 1);
    let (l1, l2) = eig2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step `H − σI = QR`, `H ← RQ + σI`, restricted to
/// the active window `[lo, hi)`. Givens rotations keep Hessenberg form.
fn qr_step(h: &mut Operator, lo: usize, hi: usize, shift: C64) {
    for i in lo..hi {
        let v = h.get(i, i) - shift;
        h.set(i, i, v);
    }
    // Rotation k zeroes the subdiagonal entry (k+1, k).
    let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let f = h.get(k, k);
        let g = h.get(k + 1, k);
        let (c, s) = givens(f, g);
        rotations.push((c, s));
        for col in k..hi {
            let top = h.get(k, col);
            let bottom = h.get(k + 1, col);
            h.set(k, col, top * c + bottom * s);
            h.set(k + 1, col, bottom * c - top * s.conj());
        }
    }
    // Right-multiply by the adjoint rotations: H ← R Q.
    for (k, (c, s)) in (lo..hi - 1).zip(rotations) {
        let row_end = (k + 2).min(hi);
        for row in lo..row_end {
            let left = h.get(row, k);
            let right = h.get(row, k + 1);
            h.set(row, k, left * c + right * s.conj());
            h.set(row, k + 1, right * c - left * s);
        }
    }
    for i in lo..hi {
        let v = h.get(i, i) + shift;
        h.set(i, i, v);
    }
}

/// Complex Givens rotation: returns `(c, s)` with `c` real such that
/// `[[c, s], [-s̄, c]] · [f, g]ᵀ = [r, 0]ᵀ`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = libm::sqrt(fn_ * fn_ + gn * gn);
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &Operator) -> Operator {
    let n = a.dim();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut col: Vec<C64> = (0..m).map(|i| h.get(k + 1 + i, k)).collect();
        let norm = libm::sqrt(col.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = if col[0].norm() > 0.0 {
            col[0] / col[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        col[0] -= alpha;
        let vnorm_sq: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq <= f64::MIN_POSITIVE {
            continue;
        }
        let two_over = 2.0 / vnorm_sq;
        // H ← P H with P = I − 2vv†/‖v‖² acting on rows k+1.. .
        for col_idx in k..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..m {
                dot += col[i].conj() * h.get(k + 1 + i, col_idx);
            }
            dot *= two_over;
            for i in 0..m {
                let v = h.get(k + 1 + i, col_idx) - col[i] * dot;
                h.set(k + 1 + i, col_idx, v);
            }
        }
        // H ← H P acting on columns k+1.. .
        for row in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..m {
                dot += h.get(row, k + 1 + i) * col[i];
            }
            dot *= two_over;
            for i in 0..m {
                let v = h.get(row, k + 1 + i) - dot * col[i].conj();
                h.set(row, k + 1 + i, v);
            }
        }
        // Entries below the first subdiagonal are now zero by construction.
        h.set(k + 1, k, alpha);
        for i in 1..m {
            h.set(k + 1 + i, k, C64::new(0.0, 0.0));
        }
    }
    h
}

/// Orthonormalize states by modified Gram–Schmidt, dropping vectors whose
/// residual norm falls below `drop_tol`.
pub fn orthonormalize(states: &[StateVector], drop_tol: f64) -> Vec<StateVector> {
    let mut basis: Vec<StateVector> = Vec::new();
    for s in states {
        let mut v = s.clone();
        for b in &basis {
            let overlap = crate::hilbert::inner_product(b, &v)
                .expect("orthonormalize: dimension mismatch");
            v = v.sub(&b.scaled(overlap));
        }
        let n = v.norm();
        if n > drop_tol {
            v = v.scaled(C64::new(1.0 / n, 0.0));
            basis.push(v);
        }
    }
    basis
}

/// Orthonormal basis of the joint null space of the stacked operators:
/// all `x` with `Aᵢ x = 0` for every block `Aᵢ`.
///
/// Entries with magnitude below `tol` (relative to the largest entry) are
/// treated as zero during elimination.
pub fn kernel_basis(blocks: &[&Operator], tol: f64) -> Vec<StateVector> {
    assert!(!blocks.is_empty(), "kernel_basis: no constraint blocks");
    let n = blocks[0].dim();
    for b in blocks {
        assert_eq!(b.dim(), n, "kernel_basis: inconsistent dimensions");
    }
    let m = n * blocks.len();
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(m);
    for b in blocks {
        for r in 0..n {
            rows.push((0..n).map(|c| b.get(r, c)).collect());
        }
    }
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        // Zero constraints: the kernel is the whole space.
        return (0..n)
            .map(|i| {
                let mut v = StateVector::zeros(n);
                v.amps_mut()[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
    }
    let cutoff = tol * scale;

    // Row echelon form with partial pivoting; record pivot columns.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let mut best = rank;
        let mut best_mag = 0.0;
        for r in rank..m {
            let mag = rows[r][col].norm();
            if mag > best_mag {
                best_mag = mag;
                best = r;
            }
        }
        if best_mag <= cutoff {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank][col];
        for c in 0..n {
            rows[rank][c] /= pivot;
        }
        for r in 0..m {
            if r == rank {
                continue;
            }
            let factor = rows[r][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let v = rows[rank][c];
                rows[r][c] -= factor * v;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }

    // Free columns parameterize the kernel.
    let mut kernel: Vec<StateVector> = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = StateVector::zeros(n);
        v.amps_mut()[free] = C64::new(1.0, 0.0);
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v.amps_mut()[pc] = -rows[row][free];
        }
        kernel.push(v);
    }
    orthonormalize(&kernel, 1e-12)
}
