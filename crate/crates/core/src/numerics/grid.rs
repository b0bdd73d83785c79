//! Uniform Brillouin-zone grids and deterministic reductions.
//!
//! Grid averages use compensated (Kahan) summation over a fixed
//! lexicographic point order. Evaluation may run in parallel, but the
//! points are always grouped into fixed-size chunks whose partial sums
//! are combined sequentially in chunk order, so results are
//! bit-identical regardless of thread count.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::NumericsError;

const REDUCTION_CHUNK: usize = 4096;
/// Point count above which chunk evaluation goes through rayon.
const PARALLEL_THRESHOLD: usize = 16384;

/// Uniform grid k_i = 2π n_i / L_i over [0, 2π) per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct BzGrid {
    sizes: Vec<usize>,
}

impl BzGrid {
    /// Same number of points on every axis.
    pub fn uniform(dims: usize, points_per_axis: usize) -> Self {
        assert!(dims == 0 || points_per_axis > 0);
        Self {
            sizes: vec![points_per_axis; dims],
        }
    }

    pub fn with_sizes(sizes: Vec<usize>) -> Self {
        assert!(sizes.iter().all(|&l| l > 0));
        Self { sizes }
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total number of grid points (1 for a zero-dimensional grid).
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.sizes[axis] as f64
    }

    /// Writes the momentum of the flat lexicographic index (last axis
    /// fastest) into `out`.
    #[inline]
    pub fn momentum_into(&self, flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dims());
        let mut rem = flat;
        for axis in (0..self.dims()).rev() {
            let l = self.sizes[axis];
            let idx = rem % l;
            rem /= l;
            out[axis] = 2.0 * std::f64::consts::PI * idx as f64 / l as f64;
        }
    }

    pub fn momentum(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims()];
        self.momentum_into(flat, &mut out);
        out
    }

    /// Flat index from per-axis indices.
    pub fn flat_index(&self, indices: &[usize]) -> usize {
        let mut flat = 0;
        for (axis, &idx) in indices.iter().enumerate() {
            flat = flat * self.sizes[axis] + idx;
        }
        flat
    }
}

/// Compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Mean of a vector-valued map over the grid: (1/ΠL_i) Σ_k f(k).
///
/// `f` fills `out` (length `width`) for the momentum `k`. Deterministic:
/// fixed lexicographic order, compensated summation.
pub fn grid_mean_vec<F>(grid: &BzGrid, width: usize, f: F) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    grid_mean_and_min(grid, width, |k, out| {
        f(k, out);
        0.0
    })
    .0
}

/// Like [`grid_mean_vec`], but `f` additionally returns a scalar whose
/// minimum over the grid is tracked (used for fiber gap detection).
pub fn grid_mean_and_min<F>(grid: &BzGrid, width: usize, f: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64], &mut [f64]) -> f64 + Sync,
{
    assert!(!grid.is_empty(), "grid must be non-empty");
    let total = grid.len();
    let n_chunks = total.div_ceil(REDUCTION_CHUNK);
    let eval_chunk = |chunk: usize| {
        let lo = chunk * REDUCTION_CHUNK;
        let hi = ((chunk + 1) * REDUCTION_CHUNK).min(total);
        let mut acc = vec![KahanSum::new(); width];
        let mut min = f64::INFINITY;
        let mut k = vec![0.0f64; grid.dims()];
        let mut val = vec![0.0f64; width];
        for flat in lo..hi {
            grid.momentum_into(flat, &mut k);
            min = min.min(f(&k, &mut val));
            for (a, &v) in acc.iter_mut().zip(val.iter()) {
                a.add(v);
            }
        }
        (acc, min)
    };
    let partials: Vec<(Vec<KahanSum>, f64)> = if total >= PARALLEL_THRESHOLD {
        (0..n_chunks).into_par_iter().map(eval_chunk).collect()
    } else {
        (0..n_chunks).map(eval_chunk).collect()
    };
    let mut sums = vec![KahanSum::new(); width];
    let mut min = f64::INFINITY;
    for (part, pmin) in &partials {
        min = min.min(*pmin);
        for (t, p) in sums.iter_mut().zip(part.iter()) {
            t.add(p.value());
        }
    }
    let norm = grid.len() as f64;
    (sums.iter().map(|t| t.value() / norm).collect(), min)
}

/// Mean of a scalar map over the grid; the transverse-momentum average
/// (1/L^{D−D_s}) Σ_{k_⊥} f(k_⊥).
pub fn perp_sum<F>(grid: &BzGrid, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid_mean_vec(grid, 1, |k, out| out[0] = f(k))[0]
}

/// Element type for [`periodic_gradient`].
pub trait GradientValue: Copy + Send + Sync {
    fn diff_scaled(next: Self, prev: Self, inv_two_h: f64) -> Self;
}

impl GradientValue for f64 {
    #[inline]
    fn diff_scaled(next: Self, prev: Self, inv_two_h: f64) -> Self {
        (next - prev) * inv_two_h
    }
}

impl GradientValue for C64 {
    #[inline]
    fn diff_scaled(next: Self, prev: Self, inv_two_h: f64) -> Self {
        (next - prev) * inv_two_h
    }
}

/// Central difference along `axis` with periodic wraparound, O(Δk²).
///
/// `field` holds one value per grid point in lexicographic order.
pub fn periodic_gradient<T: GradientValue>(
    field: &[T],
    grid: &BzGrid,
    axis: usize,
) -> Result<Vec<T>, NumericsError> {
    if axis >= grid.dims() {
        return Err(NumericsError::BadAxis {
            axis,
            dims: grid.dims(),
        });
    }
    let l = grid.sizes()[axis];
    if l < 3 {
        return Err(NumericsError::GridTooCoarse { axis, points: l });
    }
    assert_eq!(field.len(), grid.len(), "field length must match grid");

    // stride of `axis` in the lexicographic (last axis fastest) layout
    let stride: usize = grid.sizes()[axis + 1..].iter().product();
    let block = stride * l;
    let inv_two_h = 1.0 / (2.0 * grid.spacing(axis));

    let mut out = Vec::with_capacity(field.len());
    for flat in 0..field.len() {
        let within = flat % block;
        let idx = within / stride;
        let base = flat - idx * stride;
        let next = base + ((idx + 1) % l) * stride;
        let prev = base + ((idx + l - 1) % l) * stride;
        out.push(T::diff_scaled(field[next], field[prev], inv_two_h));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_average_is_exact() {
        let grid = BzGrid::uniform(2, 10);
        let v = perp_sum(&grid, |_| 1.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn cosine_averages_to_zero() {
        let grid = BzGrid::uniform(1, 128);
        let v = perp_sum(&grid, |k| k[0].cos());
        assert!(v.abs() < 1e-14, "got {v}");
    }

    #[test]
    fn qwz_fiber_norm_at_m1() {
        // |d(0,k_y)| = t_y for the (sin kx, t_y sin ky, 1 − cos kx − t_y cos ky)
        // map at kx = 0, so <1/|d|> = 1/t_y.
        let ty = 0.37;
        let grid = BzGrid::uniform(1, 512);
        let v = perp_sum(&grid, |k| {
            let d = [0.0, ty * k[0].sin(), 1.0 - 1.0 - ty * k[0].cos()];
            1.0 / (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        });
        assert!((v - 1.0 / ty).abs() < 1e-13 / ty, "got {v}");
    }

    #[test]
    fn deterministic_reduction() {
        let grid = BzGrid::uniform(2, 200); // 40000 points, goes parallel
        let f = |k: &[f64]| (3.1 * k[0]).sin() * (1.7 * k[1]).cos() + 0.01 * k[0];
        let a = perp_sum(&grid, f);
        let b = perp_sum(&grid, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let grid = BzGrid::uniform(2, 8);
        let field = vec![2.5f64; grid.len()];
        let g = periodic_gradient(&field, &grid, 0).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_of_sine() {
        let grid = BzGrid::uniform(1, 256);
        let field: Vec<f64> = (0..grid.len()).map(|i| grid.momentum(i)[0].sin()).collect();
        let g = periodic_gradient(&field, &grid, 0).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let k = grid.momentum(i)[0];
            assert!((gi - k.cos()).abs() < 1e-3, "at k={k}: {gi} vs {}", k.cos());
        }
    }

    #[test]
    fn gradient_of_complex_exponential() {
        let grid = BzGrid::uniform(1, 256);
        let field: Vec<C64> = (0..grid.len())
            .map(|i| (C64::new(0.0, 1.0) * grid.momentum(i)[0]).exp())
            .collect();
        let g = periodic_gradient(&field, &grid, 0).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let k = grid.momentum(i)[0];
            let expect = C64::new(0.0, 1.0) * (C64::new(0.0, 1.0) * k).exp();
            assert!((gi - expect).norm() < 1e-3);
        }
    }

    #[test]
    fn gradient_rejects_coarse_axis() {
        let grid = BzGrid::with_sizes(vec![2, 8]);
        let field = vec![0.0f64; grid.len()];
        assert!(periodic_gradient(&field, &grid, 0).is_err());
        assert!(periodic_gradient(&field, &grid, 1).is_ok());
    }

    #[test]
    fn gradient_multi_axis_stride() {
        // f(kx,ky) = sin ky, gradient along axis 1
        let grid = BzGrid::with_sizes(vec![4, 64]);
        let field: Vec<f64> = (0..grid.len()).map(|i| grid.momentum(i)[1].sin()).collect();
        let g = periodic_gradient(&field, &grid, 1).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let k = grid.momentum(i)[1];
            assert!((gi - k.cos()).abs() < 2e-2);
        }
        // and along axis 0 it vanishes
        let g0 = periodic_gradient(&field, &grid, 0).unwrap();
        assert!(g0.iter().all(|&x| x.abs() < 1e-14));
    }

    #[test]
    fn linearity_of_mean() {
        let grid = BzGrid::uniform(1, 64);
        let f = |k: &[f64]| k[0].sin() + 0.2;
        let g = |k: &[f64]| (2.0 * k[0]).cos() - 1.0;
        let lhs = perp_sum(&grid, |k| 2.0 * f(k) + 3.0 * g(k));
        let rhs = 2.0 * perp_sum(&grid, f) + 3.0 * perp_sum(&grid, g);
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn zero_dimensional_grid_single_point() {
        let grid = BzGrid::uniform(0, 1);
        assert_eq!(grid.len(), 1);
        let v = perp_sum(&grid, |k| {
            assert!(k.is_empty());
            42.0
        });
        assert_eq!(v, 42.0);
    }
}
