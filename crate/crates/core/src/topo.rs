//! ℤ topological invariants, weak indices, gap scans, and the
//! gap-closing inheritance check.
//!
//! The invariant of an (n+1)-component unit d-vector field over an
//! n-dimensional Brillouin zone is
//!
//!   ν_n = (1/S_n) ∫ dⁿk det[d̂, ∂_1 d̂, …, ∂_n d̂],
//!
//! with S_n the area of the n-sphere — the degree of the map T^n → S^n.
//! Derivatives are central differences; if the discretized integral
//! rounds poorly the grid is doubled once and Richardson-extrapolated.
//! The sign convention is fixed by the row order of the determinant;
//! tests pin jump locations and magnitudes, not the overall sign.

use rayon::prelude::*;
use thiserror::Error;

use num_complex::Complex64 as C64;

use crate::entmap::{qh4d_descendant_gap, PerpAverager};
use crate::models::DiracModel;
use crate::numerics::{periodic_gradient, BzGrid, KahanSum, NumericsError};

#[derive(Debug, Error)]
pub enum TopoError {
    #[error("d-vector gap {min:.3e} below the floor {floor:.3e}; invariant undefined")]
    GapBelowFloor { min: f64, floor: f64 },
    #[error("invariant did not round after refinement: raw value {raw}")]
    RefinementFailed { raw: f64 },
    #[error("model is metallic (min |Q| = {min:.3e}); winding numbers undefined")]
    Metallic { min: f64 },
    #[error("weak indices need a chiral two-band model with d_z ≡ 0 (max |d_z| = {0:.3e})")]
    NotChiral(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Minimum |d| tolerated on the invariant grid.
pub const GAP_FLOOR: f64 = 1e-6;
const ROUNDING_BUDGET: f64 = 0.05;

/// Default invariant grid (points per axis) for an n-dimensional integral.
pub fn default_invariant_points(n: usize) -> usize {
    match n {
        0 => 1,
        1 => 400,
        2 => 100,
        3 => 40,
        _ => 16,
    }
}

/// Discretized invariant with integer rounding and an error estimate.
#[derive(Clone, Copy, Debug)]
pub struct TopoResult {
    pub nu_raw: f64,
    pub nu: i64,
    pub error: f64,
    pub n: usize,
    /// Set when the grid had to be doubled and Richardson-extrapolated.
    pub refined: bool,
}

/// Area of the n-dimensional unit sphere, 2π^{(n+1)/2} / Γ((n+1)/2).
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        5 => PI * PI * PI,
        _ => {
            // recurrence S_n = 2π S_{n−2} / (n − 1)
            2.0 * PI * sphere_area(n - 2) / (n - 1) as f64
        }
    }
}

/// Raw discretized invariant on a fixed grid; also returns min |d|.
pub fn invariant_nu_raw<F>(d_field: &F, n: usize, points_per_axis: usize) -> (f64, f64)
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let comps = n + 1;
    let grid = BzGrid::uniform(n, points_per_axis);
    let len = grid.len();

    // normalized field, one Vec per component; parallel fill, indexed writes
    let mut fields: Vec<Vec<f64>> = vec![vec![0.0; len]; comps];
    let mut norms = vec![0.0f64; len];
    {
        let mut slices: Vec<&mut [f64]> = fields.iter_mut().map(|v| v.as_mut_slice()).collect();
        // transpose access: chunk the flat index range
        const CH: usize = 2048;
        let chunks: Vec<(usize, Vec<Vec<f64>>, Vec<f64>)> = (0..len.div_ceil(CH))
            .into_par_iter()
            .map(|c| {
                let lo = c * CH;
                let hi = ((c + 1) * CH).min(len);
                let mut out = vec![vec![0.0; hi - lo]; comps];
                let mut nrm = vec![0.0; hi - lo];
                let mut k = vec![0.0; n];
                let mut d = vec![0.0; comps];
                for flat in lo..hi {
                    grid.momentum_into(flat, &mut k);
                    d_field(&k, &mut d);
                    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                    nrm[flat - lo] = norm;
                    for (mu, val) in d.iter().enumerate() {
                        out[mu][flat - lo] = val / norm;
                    }
                }
                (lo, out, nrm)
            })
            .collect();
        for (lo, out, nrm) in chunks {
            for (mu, col) in out.iter().enumerate() {
                slices[mu][lo..lo + col.len()].copy_from_slice(col);
            }
            norms[lo..lo + nrm.len()].copy_from_slice(&nrm);
        }
    }
    let min_gap = norms.iter().cloned().fold(f64::INFINITY, f64::min);

    if n == 0 {
        // ν_0 = d̂_0 / S_0
        return (fields[0][0] / sphere_area(0), min_gap);
    }

    // ∂_axis d̂_mu
    let mut grads: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for axis in 0..n {
        let mut per_comp = Vec::with_capacity(comps);
        for f in &fields {
            per_comp.push(periodic_gradient(f, &grid, axis).expect("grid has ≥ 3 points"));
        }
        grads.push(per_comp);
    }

    // Σ det[d̂, ∂_1 d̂, …, ∂_n d̂] over the grid, chunked Kahan
    const CH: usize = 4096;
    let partials: Vec<f64> = (0..len.div_ceil(CH))
        .into_par_iter()
        .map(|c| {
            let lo = c * CH;
            let hi = ((c + 1) * CH).min(len);
            let mut acc = KahanSum::new();
            let mut mat = vec![0.0f64; comps * comps];
            for flat in lo..hi {
                for mu in 0..comps {
                    mat[mu] = fields[mu][flat];
                }
                for axis in 0..n {
                    for mu in 0..comps {
                        mat[(axis + 1) * comps + mu] = grads[axis][mu][flat];
                    }
                }
                acc.add(det_small(&mut mat, comps));
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    let dk: f64 = (0..n).map(|axis| grid.spacing(axis)).product();
    (total.value() * dk / sphere_area(n), min_gap)
}

/// In-place LU determinant with partial pivoting for small dense systems.
fn det_small(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in (col + 1)..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for row in (col + 1)..n {
            let factor = m[row * n + col] / d;
            if factor != 0.0 {
                for j in col..n {
                    m[row * n + j] -= factor * m[col * n + j];
                }
            }
        }
    }
    det
}

/// Degree of the map k → d̂(k).
///
/// A raw integral that merely rounds within the budget is not enough: an
/// unconverged value drifts continuously and can pass near a wrong
/// integer. Acceptance therefore also demands stability against a halved
/// grid; otherwise the grid is doubled and Richardson-extrapolated
/// (central differences are O(h²)), and the extrapolation must agree
/// with the fine grid's own rounding.
pub fn invariant_nu<F>(
    d_field: F,
    n: usize,
    points_per_axis: usize,
) -> Result<TopoResult, TopoError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let (raw, min_gap) = invariant_nu_raw(&d_field, n, points_per_axis);
    if min_gap <= GAP_FLOOR {
        return Err(TopoError::GapBelowFloor {
            min: min_gap,
            floor: GAP_FLOOR,
        });
    }
    let nu = raw.round();
    if (raw - nu).abs() < ROUNDING_BUDGET && points_per_axis / 2 >= 3 {
        let (raw_half, _) = invariant_nu_raw(&d_field, n, points_per_axis / 2);
        if (raw - raw_half).abs() < 0.02 {
            return Ok(TopoResult {
                nu_raw: raw,
                nu: nu as i64,
                error: (raw - nu).abs(),
                n,
                refined: false,
            });
        }
    }
    let (raw2, _) = invariant_nu_raw(&d_field, n, 2 * points_per_axis);
    let extrapolated = (4.0 * raw2 - raw) / 3.0;
    let nu2 = extrapolated.round();
    let error = (extrapolated - nu2).abs();
    if error < ROUNDING_BUDGET && raw2.round() == nu2 {
        Ok(TopoResult {
            nu_raw: extrapolated,
            nu: nu2 as i64,
            error,
            n,
            refined: true,
        })
    } else {
        Err(TopoError::RefinementFailed { raw: extrapolated })
    }
}

/// Invariant of the d_s-dimensional descendant of the 4D model
/// (d_s = 4 is the parent). Uses the default invariant and transverse grids.
pub fn qh4d_descendant_invariant(m: f64, d_s: usize) -> Result<TopoResult, TopoError> {
    assert!((1..=4).contains(&d_s));
    let points = default_invariant_points(d_s);
    if d_s == 4 {
        let model = DiracModel::qh4d(m);
        invariant_nu(
            move |k, out| {
                model.d_into(k, out);
            },
            4,
            points,
        )
    } else {
        let transverse = crate::entmap::default_transverse(4 - d_s);
        let avg = PerpAverager::unit_hopping(&transverse);
        invariant_nu(
            move |k_s, out| {
                let mass: f64 = m - k_s.iter().map(|k| k.cos()).sum::<f64>();
                let sin_sq: f64 = k_s.iter().map(|k| k.sin().powi(2)).sum();
                let (_, delta_m) = avg.average_fast(mass, sin_sq);
                out[0] = mass - delta_m;
                for (i, k) in k_s.iter().enumerate() {
                    out[i + 1] = k.sin();
                }
            },
            d_s,
            points,
        )
    }
}

/// Direction-resolved winding numbers of a chiral two-band model,
/// ν_j = −i ∫ d²k/(2π)² Q⁻¹ ∂_j Q with Q = d_x + i d_y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakIndices {
    pub nu_x: i64,
    pub nu_y: i64,
}

const WINDING_GRID: usize = 256;

fn q_field(model: &DiracModel, grid: &BzGrid) -> Result<Vec<C64>, TopoError> {
    let mut q = Vec::with_capacity(grid.len());
    let mut k = vec![0.0; 2];
    let mut d = vec![0.0; model.components()];
    let mut max_dz = 0.0f64;
    let mut min_q = f64::INFINITY;
    for flat in 0..grid.len() {
        grid.momentum_into(flat, &mut k);
        model.d_into(&k, &mut d);
        max_dz = max_dz.max(d[2].abs());
        let qk = C64::new(d[0], d[1]);
        min_q = min_q.min(qk.norm());
        q.push(qk);
    }
    if max_dz > 1e-12 {
        return Err(TopoError::NotChiral(max_dz));
    }
    if min_q <= GAP_FLOOR {
        return Err(TopoError::Metallic { min: min_q });
    }
    Ok(q)
}

/// Weak indices by the discretized log-derivative integral. A raw value
/// that does not round within the budget signals a gapless (metallic)
/// model whose winding is ill-defined.
pub fn weak_indices(model: &DiracModel) -> Result<WeakIndices, TopoError> {
    let grid = BzGrid::uniform(2, WINDING_GRID);
    let q = q_field(model, &grid)?;
    let mut nu = [0i64; 2];
    for axis in 0..2 {
        let dq = periodic_gradient(&q, &grid, axis)?;
        let mut acc = KahanSum::new();
        for (qk, dqk) in q.iter().zip(&dq) {
            acc.add((dqk / qk).im);
        }
        // −i ∫ d²k/(2π)² … = mean of Im(Q⁻¹∂Q) over the zone
        let raw = acc.value() / grid.len() as f64;
        let rounded = raw.round();
        if (raw - rounded).abs() > ROUNDING_BUDGET {
            return Err(TopoError::Metallic {
                min: (raw - rounded).abs(),
            });
        }
        nu[axis] = rounded as i64;
    }
    Ok(WeakIndices {
        nu_x: nu[0],
        nu_y: nu[1],
    })
}

/// Weak indices by phase accumulation along each axis. Every transverse
/// line carries an exactly integer winding; if the lines disagree the
/// model is in the metallic window and the index is rejected. Agrees with
/// [`weak_indices`] on gapped models.
pub fn weak_indices_phase(model: &DiracModel) -> Result<WeakIndices, TopoError> {
    let grid = BzGrid::uniform(2, WINDING_GRID);
    let q = q_field(model, &grid)?;
    let l = WINDING_GRID;
    let mut nu = [0i64; 2];
    for axis in 0..2 {
        let mut line_winding: Option<i64> = None;
        for line in 0..l {
            let mut arg = 0.0;
            for i in 0..l {
                let (cur, next) = if axis == 0 {
                    (q[i * l + line], q[((i + 1) % l) * l + line])
                } else {
                    (q[line * l + i], q[line * l + (i + 1) % l])
                };
                arg += (next / cur).arg();
            }
            let w = (arg / (2.0 * std::f64::consts::PI)).round() as i64;
            match line_winding {
                None => line_winding = Some(w),
                Some(prev) if prev != w => {
                    return Err(TopoError::Metallic { min: 0.0 });
                }
                _ => {}
            }
        }
        nu[axis] = line_winding.unwrap_or(0);
    }
    Ok(WeakIndices {
        nu_x: nu[0],
        nu_y: nu[1],
    })
}

/// Interpolated locations where a gap function of `m` dips below the
/// detection threshold on a uniform scan.
pub fn gap_scan<F>(min_gap: F, m_start: f64, m_end: f64, step: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    const THRESHOLD: f64 = 1e-3;
    let count = ((m_end - m_start) / step).round() as usize + 1;
    let ms: Vec<f64> = (0..count).map(|i| m_start + step * i as f64).collect();
    let gaps: Vec<f64> = ms.par_iter().map(|&m| min_gap(m)).collect();

    let mut critical = Vec::new();
    let mut i = 0;
    while i < count {
        if gaps[i] < THRESHOLD {
            // contiguous sub-threshold run → one critical point
            let mut j = i;
            let mut best = i;
            while j < count && gaps[j] < THRESHOLD {
                if gaps[j] < gaps[best] {
                    best = j;
                }
                j += 1;
            }
            let mut loc = ms[best];
            if best > 0 && best + 1 < count {
                let s1 = (gaps[best] - gaps[best - 1]) / step;
                let s2 = (gaps[best + 1] - gaps[best]) / step;
                if s1 < 0.0 && s2 > 0.0 {
                    let shift = -0.5 * gaps[best] * (1.0 / s1 + 1.0 / s2);
                    loc += shift.clamp(-0.5 * step, 0.5 * step);
                }
            }
            critical.push(loc);
            i = j;
        } else {
            i += 1;
        }
    }
    critical
}

/// Gap function of the 4D-descendant family for [`gap_scan`]: minimum of
/// the ESH gap over the high-symmetry-containing k_s grid.
pub fn qh4d_descendant_min_gap(m: f64, d_s: usize, ks_points: usize) -> f64 {
    if d_s == 4 {
        let grid = BzGrid::uniform(4, ks_points);
        return DiracModel::qh4d(m).min_gap(&grid);
    }
    let transverse = crate::entmap::default_transverse(4 - d_s);
    let avg = PerpAverager::unit_hopping(&transverse);
    let grid = BzGrid::uniform(d_s, ks_points);
    let mut k = vec![0.0; d_s];
    let mut best = f64::INFINITY;
    for flat in 0..grid.len() {
        grid.momentum_into(flat, &mut k);
        best = best.min(qh4d_descendant_gap(m, &k, Some(&avg)));
    }
    best
}

/// Same, for the 1D ESH of the QWZ model.
pub fn qwz_esh_min_gap(m: f64, t_y: f64, ks_points: usize, transverse_points: usize) -> f64 {
    let transverse = BzGrid::uniform(1, transverse_points);
    let avg = PerpAverager::with_amplitudes(&transverse, &[t_y]);
    let mut best = f64::INFINITY;
    for i in 0..ks_points {
        let k = 2.0 * std::f64::consts::PI * i as f64 / ks_points as f64;
        let a = avg.average(m - k.cos(), k.sin().powi(2));
        let mass = m - k.cos() - a.delta_m;
        best = best.min((mass * mass + k.sin().powi(2)).sqrt());
    }
    best
}

/// Outcome of the gap-closing inheritance check.
#[derive(Clone, Debug)]
pub enum InheritanceVerdict {
    /// Preconditions hold and |⟨d̂⟩_⊥| vanished: the subsystem correlation
    /// matrix has an eigenvalue ½ within the stated tolerance.
    Pass { b_norm: f64 },
    /// Preconditions do not apply at this momentum (not a failure).
    Inapplicable(String),
    /// Preconditions hold but the averaged vector stayed finite.
    Fail { b_norm: f64 },
}

/// Checks that a gapless momentum q0 of the decoupled lower-dimensional
/// Hamiltonian forces a correlation-matrix eigenvalue ½: writes
/// d(q0, k_⊥) = h(q0) + f(k_⊥), requires h(q0) = 0 and the parity
/// conditions on f (each component odd under joint k_⊥ negation, or
/// sign-flipping under the joint π shift), then evaluates B = ⟨d̂⟩_⊥.
pub fn appendix_a_check(
    model: &DiracModel,
    kept_axes: &[usize],
    transverse: &BzGrid,
    q0: &[f64],
) -> InheritanceVerdict {
    let dims = model.dims();
    let n = model.components();
    let traced: Vec<usize> = (0..dims).filter(|a| !kept_axes.contains(a)).collect();
    assert_eq!(transverse.dims(), traced.len());
    assert_eq!(q0.len(), kept_axes.len());

    // decoupled restriction: constant + kept-axis harmonics only
    let mut h = vec![0.0; n];
    let mut k_full = vec![0.0; dims];
    for (&axis, &v) in kept_axes.iter().zip(q0) {
        k_full[axis] = v;
    }
    model.d_into(&k_full, &mut h);
    for t in model.harmonics() {
        if traced.contains(&t.axis) {
            h[t.comp] -= t.cos_coeff; // harmonic value at k_⊥ = 0
        }
    }
    let h_norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    if h_norm > 1e-10 {
        return InheritanceVerdict::Inapplicable(format!(
            "decoupled Hamiltonian is not gapless at q0 (|h| = {h_norm:.3e})"
        ));
    }
    if transverse.sizes().iter().any(|l| l % 2 != 0) {
        return InheritanceVerdict::Inapplicable("parity check needs even transverse grids".into());
    }

    // f_i(k_⊥) on the grid, with the parity classification
    let len = transverse.len();
    let mut f_vals = vec![vec![0.0f64; len]; n];
    let mut k_perp = vec![0.0; traced.len()];
    let mut d = vec![0.0; n];
    for flat in 0..len {
        transverse.momentum_into(flat, &mut k_perp);
        for (&axis, &v) in traced.iter().zip(&k_perp) {
            k_full[axis] = v;
        }
        model.d_into(&k_full, &mut d);
        for (comp, &di) in d.iter().enumerate() {
            f_vals[comp][flat] = di - h[comp];
        }
    }
    let neg_index = |flat: usize| -> usize {
        let mut rem = flat;
        let mut factors = vec![0usize; traced.len()];
        for axis in (0..traced.len()).rev() {
            factors[axis] = rem % transverse.sizes()[axis];
            rem /= transverse.sizes()[axis];
        }
        let mut idx = 0;
        for (axis, &fi) in factors.iter().enumerate() {
            let l = transverse.sizes()[axis];
            idx = idx * l + (l - fi) % l;
        }
        idx
    };
    let shift_index = |flat: usize| -> usize {
        let mut rem = flat;
        let mut factors = vec![0usize; traced.len()];
        for axis in (0..traced.len()).rev() {
            factors[axis] = rem % transverse.sizes()[axis];
            rem /= transverse.sizes()[axis];
        }
        let mut idx = 0;
        for (axis, &fi) in factors.iter().enumerate() {
            let l = transverse.sizes()[axis];
            idx = idx * l + (fi + l / 2) % l;
        }
        idx
    };

    const PARITY_TOL: f64 = 1e-10;
    for comp in 0..n {
        let vals = &f_vals[comp];
        let odd = (0..len).all(|i| (vals[neg_index(i)] + vals[i]).abs() <= PARITY_TOL);
        let pi_flip = (0..len).all(|i| (vals[shift_index(i)] + vals[i]).abs() <= PARITY_TOL);
        if !(odd || pi_flip) {
            return InheritanceVerdict::Inapplicable(format!(
                "component {comp} is neither odd under k_⊥ → −k_⊥ nor sign-flipping under the π shift"
            ));
        }
    }
    // |f| symmetry under both transformations (denominator of the average)
    let norm_at = |i: usize| -> f64 {
        (0..n)
            .map(|c| f_vals[c][i] * f_vals[c][i])
            .sum::<f64>()
            .sqrt()
    };
    let min_f = (0..len).map(norm_at).fold(f64::INFINITY, f64::min);
    if min_f <= crate::entmap::FIBER_GAP_FLOOR {
        return InheritanceVerdict::Inapplicable("transverse fiber itself is gapless".into());
    }
    for i in 0..len {
        if (norm_at(neg_index(i)) - norm_at(i)).abs() > PARITY_TOL
            || (norm_at(shift_index(i)) - norm_at(i)).abs() > PARITY_TOL
        {
            return InheritanceVerdict::Inapplicable("|f| is not symmetric on the fiber".into());
        }
    }

    // B = ⟨d̂⟩_⊥ at q0
    let mut acc = vec![KahanSum::new(); n];
    for i in 0..len {
        let norm = norm_at(i);
        for (comp, a) in acc.iter_mut().enumerate() {
            a.add(f_vals[comp][i] / norm);
        }
    }
    let b_norm = acc
        .iter()
        .map(|a| (a.value() / len as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    if b_norm < 1e-8 {
        InheritanceVerdict::Pass { b_norm }
    } else {
        InheritanceVerdict::Fail { b_norm }
    }
}
