//! Complex Hermitian eigensolver.
//!
//! Two kernels behind one entry point:
//!
//! - cyclic Jacobi with complex rotations (off-diagonal tolerance 1e-12,
//!   at most 100 sweeps) for dimensions up to [`JACOBI_MAX_DIM`];
//! - Householder tridiagonalization followed by implicit-shift QL for
//!   larger matrices, where Jacobi sweeps become too expensive. The QL
//!   stage is a port of the classic EISPACK/JAMA `tql2` routine.
//!
//! Both kernels return ascending eigenvalues and an orthonormal set of
//! eigenvectors and are cross-checked against each other in the tests.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::matrix::HermitianMatrix;
use super::NumericsError;

/// Largest dimension handled by the Jacobi kernel in [`hermitian_eigh`].
pub const JACOBI_MAX_DIM: usize = 128;

const JACOBI_OFFDIAG_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition A = V Λ V†.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Row-major n×n; column j is the eigenvector of `eigenvalues[j]`.
    vectors: Vec<C64>,
    dim: usize,
}

impl Eigh {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component i of eigenvector j.
    #[inline]
    pub fn vector_component(&self, i: usize, j: usize) -> C64 {
        self.vectors[i * self.dim + j]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.vector_component(i, j)).collect()
    }

    /// Σ_{j ∈ cols} v_j v_j†, restricted to the given row subset.
    pub fn projector_on_rows(&self, cols: &[usize], rows: &[usize]) -> Vec<C64> {
        let m = rows.len();
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for &j in cols {
            for (a, &ra) in rows.iter().enumerate() {
                let va = self.vector_component(ra, j);
                for (b, &rb) in rows.iter().enumerate() {
                    out[a * m + b] += va * self.vector_component(rb, j).conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a complex Hermitian matrix; dispatches on size.
pub fn hermitian_eigh(a: &HermitianMatrix) -> Result<Eigh, NumericsError> {
    let scale = a.as_complex().max_abs().max(1.0);
    let defect = a.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(NumericsError::NotHermitian {
            defect,
            tol: 1e-12 * scale,
        });
    }
    if a.dim() <= JACOBI_MAX_DIM {
        jacobi_eigh(a)
    } else {
        tridiag_eigh(a)
    }
}

/// Cyclic Jacobi diagonalization with complex plane rotations.
pub fn jacobi_eigh(a: &HermitianMatrix) -> Result<Eigh, NumericsError> {
    let n = a.dim();
    let mut m: Vec<C64> = a.as_complex().data().to_vec();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let norm = a.frobenius_norm();
    if n == 1 || norm == 0.0 {
        let eigenvalues = (0..n).map(|i| m[i * n + i].re).collect();
        return Ok(Eigh {
            eigenvalues,
            vectors: v,
            dim: n,
        });
    }
    let stop = JACOBI_OFFDIAG_TOL * norm;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r <= stop / (n as f64) {
                    continue;
                }
                let phase = apq / r;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // rotation zeroing the (p,q) element: t solves t² − 2τt − 1 = 0,
                // smaller-magnitude root for stability
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = t * c;
                let s = phase * sigma;
                let sc = s.conj();

                // columns p,q of every row
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    let new_ip = c * aip - sc * aiq;
                    let new_iq = s * aip + c * aiq;
                    m[i * n + p] = new_ip;
                    m[i * n + q] = new_iq;
                    m[p * n + i] = new_ip.conj();
                    m[q * n + i] = new_iq.conj();
                }
                let d = c * c * app - 2.0 * c * sigma * r + sigma * sigma * aqq;
                let e = sigma * sigma * app + 2.0 * c * sigma * r + c * c * aqq;
                m[p * n + p] = C64::new(d, 0.0);
                m[q * n + q] = C64::new(e, 0.0);
                m[p * n + q] = C64::new(0.0, 0.0);
                m[q * n + p] = C64::new(0.0, 0.0);

                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - sc * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        // final check after the last sweep
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() > stop {
            return Err(NumericsError::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    Ok(sorted(eigenvalues, v, n))
}

fn sorted(eigenvalues: Vec<f64>, vectors: Vec<C64>, n: usize) -> Eigh {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].partial_cmp(&eigenvalues[j]).unwrap());
    let mut ev = Vec::with_capacity(n);
    let mut vv = vec![C64::new(0.0, 0.0); n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        ev.push(eigenvalues[old_j]);
        for i in 0..n {
            vv[i * n + new_j] = vectors[i * n + old_j];
        }
    }
    Eigh {
        eigenvalues: ev,
        vectors: vv,
        dim: n,
    }
}

/// Householder reduction to real symmetric tridiagonal form followed by
/// implicit-shift QL. Used above [`JACOBI_MAX_DIM`].
pub fn tridiag_eigh(a: &HermitianMatrix) -> Result<Eigh, NumericsError> {
    let n = a.dim();
    let mut m: Vec<C64> = a.as_complex().data().to_vec();

    // Householder vectors (stored per step) and scalars.
    let mut hh: Vec<(usize, Vec<C64>, f64)> = Vec::with_capacity(n.saturating_sub(2));
    let mut d = vec![0.0f64; n];
    let mut e = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];

    for k in 0..n.saturating_sub(2) {
        // column k below the diagonal
        let mut x = vec![C64::new(0.0, 0.0); n - k - 1];
        for (idx, xi) in x.iter_mut().enumerate() {
            *xi = m[(k + 1 + idx) * n + k];
        }
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            e[k] = C64::new(0.0, 0.0);
            d[k] = m[k * n + k].re;
            continue;
        }
        let x0 = x[0];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * xnorm
        } else {
            C64::new(-xnorm, 0.0)
        };
        let mut vvec = x;
        vvec[0] -= alpha;
        let vsq = vvec.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vsq == 0.0 {
            e[k] = alpha;
            d[k] = m[k * n + k].re;
            continue;
        }
        let beta = 2.0 / vsq;

        // p = beta * A_sub * v  (Hermitian sub-block rows/cols k+1..n)
        let nsub = n - k - 1;
        let mut p = vec![C64::new(0.0, 0.0); nsub];
        for i in 0..nsub {
            let row = &m[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let mut acc = C64::new(0.0, 0.0);
            for (av, vv) in row.iter().zip(&vvec) {
                acc += av * vv;
            }
            p[i] = beta * acc;
        }
        // w = p − (beta/2)(v†p) v ; v†Av is real so v†p real up to rounding
        let vdp: C64 = vvec.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kappa = 0.5 * beta * vdp.re;
        let w: Vec<C64> = p
            .iter()
            .zip(&vvec)
            .map(|(pi, vi)| pi - kappa * vi)
            .collect();

        // A_sub ← A_sub − v w† − w v†   (parallel over rows for large blocks)
        let update_row = |i: usize, rowbuf: &mut [C64]| {
            let vi = vvec[i];
            let wi = w[i];
            for ((aij, vj), wj) in rowbuf.iter_mut().zip(&vvec).zip(&w) {
                *aij -= vi * wj.conj() + wi * vj.conj();
            }
        };
        if nsub >= 256 {
            m[(k + 1) * n..]
                .par_chunks_mut(n)
                .take(nsub)
                .enumerate()
                .for_each(|(i, row)| {
                    update_row(i, &mut row[k + 1..n]);
                });
        } else {
            for i in 0..nsub {
                let row = &mut m[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
                update_row(i, row);
            }
        }

        d[k] = m[k * n + k].re;
        e[k] = alpha;
        hh.push((k, vvec, beta));
    }
    if n >= 2 {
        e[n - 2] = m[(n - 1) * n + (n - 2)];
        d[n - 2] = m[(n - 2) * n + (n - 2)].re;
    }
    d[n - 1] = m[(n - 1) * n + (n - 1)].re;

    // phases making the subdiagonal real
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut er = vec![0.0f64; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        let ek = e[k];
        let r = ek.norm();
        er[k] = r;
        phases[k + 1] = if r > 0.0 {
            phases[k] * (ek / r)
        } else {
            phases[k]
        };
    }

    // V ← (H_0 H_1 … H_{n-3}) · diag(phases)
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = phases[i];
    }
    for (k, vvec, beta) in hh.iter().rev() {
        let k = *k;
        // update block rows k+1.., cols k+1..
        let nsub = n - k - 1;
        let mut z = vec![C64::new(0.0, 0.0); nsub];
        for (i, vi) in vvec.iter().enumerate() {
            let vrow = &v[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let vic = vi.conj();
            for (zj, vj) in z.iter_mut().zip(vrow) {
                *zj += vic * vj;
            }
        }
        let apply = |i: usize, row: &mut [C64]| {
            let f = *beta * vvec[i];
            for (vj, zj) in row.iter_mut().zip(&z) {
                *vj -= f * zj;
            }
        };
        if nsub >= 256 {
            v[(k + 1) * n..]
                .par_chunks_mut(n)
                .take(nsub)
                .enumerate()
                .for_each(|(i, row)| {
                    apply(i, &mut row[k + 1..n]);
                });
        } else {
            for i in 0..nsub {
                let row = &mut v[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
                apply(i, row);
            }
        }
    }

    tql2(&mut d, &mut er, &mut v, n)?;
    Ok(sorted(d, v, n))
}

/// Implicit-shift QL for a real symmetric tridiagonal matrix, accumulating
/// the (complex) eigenvector matrix. Ported from EISPACK `tql2`.
fn tql2(d: &mut [f64], e: &mut [f64], v: &mut [C64], n: usize) -> Result<(), NumericsError> {
    if n == 1 {
        return Ok(());
    }
    let mut ework = vec![0.0f64; n];
    ework[..n - 1].copy_from_slice(&e[..n - 1]);

    let eps = f64::EPSILON;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + ework[l].abs());
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm < n - 1 {
                if ework[mm].abs() <= eps * tst1 {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(NumericsError::NoConvergence { sweeps: 50 });
            }

            // implicit shift
            let g = d[l];
            let mut p = (d[l + 1] - g) / (2.0 * ework[l]);
            let mut r = p.hypot(1.0);
            if p < 0.0 {
                r = -r;
            }
            d[l] = ework[l] / (p + r);
            d[l + 1] = ework[l] * (p + r);
            let dl1 = d[l + 1];
            let h = g - d[l];
            for i in l + 2..n {
                d[i] -= h;
            }
            f += h;

            // QL sweep: rotations recorded, applied to V rows in parallel
            p = d[mm];
            let mut c = 1.0f64;
            let mut c2 = c;
            let mut c3 = c;
            let el1 = ework[l + 1];
            let mut s = 0.0f64;
            let mut s2 = 0.0f64;
            let mut rots: Vec<(f64, f64)> = Vec::with_capacity(mm - l);
            for i in (l..mm).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let g = c * ework[i];
                let h = c * p;
                let rr = p.hypot(ework[i]);
                ework[i + 1] = s * rr;
                s = ework[i] / rr;
                c = p / rr;
                p = c * d[i] - s * g;
                d[i + 1] = h + s * (c * g + s * d[i]);
                rots.push((c, s));
            }
            p = -s * s2 * c3 * el1 * ework[l] / dl1;
            ework[l] = s * p;
            d[l] = c * p;

            // rotations touch column pairs (i, i+1), i = mm-1 … l
            let apply_rows = |rows: &mut [C64]| {
                for row in rows.chunks_mut(n) {
                    let mut idx = mm;
                    for &(c, s) in &rots {
                        let i = idx - 1;
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                        idx -= 1;
                    }
                }
            };
            if n >= 512 && rots.len() >= 32 {
                v.par_chunks_mut(n * 64).for_each(&apply_rows);
            } else {
                apply_rows(v);
            }

            if ework[l].abs() <= eps * tst1 {
                break;
            }
        }
        d[l] += f;
        ework[l] = 0.0;
    }
    Ok(())
}

/// Reconstruction residual max |VΛV† − A| over entries; test helper.
pub fn reconstruction_error(a: &HermitianMatrix, eig: &Eigh) -> f64 {
    let n = a.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += eig.vector_component(i, k)
                    * eig.eigenvalues[k]
                    * eig.vector_component(j, k).conj();
            }
            worst = worst.max((acc - a.get(i, j)).norm());
        }
    }
    worst
}

/// max |V†V − 1| entry; test helper.
pub fn orthonormality_error(eig: &Eigh) -> f64 {
    let n = eig.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += eig.vector_component(i, a).conj() * eig.vector_component(i, b);
            }
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((acc - expect).norm());
        }
    }
    worst
}
