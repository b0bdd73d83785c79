//! The entanglement-temperature mapping.
//!
//! Tracing the ground state of a gapped Dirac model over the momenta
//! perpendicular to a kept-axis subsystem produces a correlation matrix
//! ½(𝟙 − F d_s·Γ), where
//!
//! - F(k_s)   = ⟨1/|d|⟩_⊥ (transverse average of the inverse gap),
//! - d_s(k_s) = ⟨d/|d|⟩_⊥ / F (the effective subsystem d-vector),
//!
//! and the unique temperature making this the thermal correlation matrix
//! of H_s = d_s·Γ is T = |d_s| / (2 arctanh(|d_s|·F)). The averaged mass
//! component picks up a shift δm relative to the decoupled restriction;
//! at a high-symmetry momentum the shift vanishes exactly where the
//! decoupled mass does, which pins the critical couplings and lets a
//! subsystem of a gapped parent look like a hot gapless system.

use rayon::prelude::*;
use thiserror::Error;

use crate::models::DiracModel;
use crate::numerics::{adaptive_simpson, grid_mean_and_min, BzGrid};

#[derive(Debug, Error)]
pub enum EntmapError {
    #[error("transverse averaging needs a lattice model; use continuum_temperature for `{0}`")]
    ContinuumModel(String),
    #[error("kept axes must form a nonempty proper subset of 0..{dims}")]
    BadKeptAxes { dims: usize },
    #[error("transverse grid is {got}-dimensional but {expected} axes are traced")]
    TransverseMismatch { got: usize, expected: usize },
    #[error(
        "gapless transverse fiber: min |d| = {min_gap:.3e} at the requested subsystem momentum"
    )]
    GaplessFiber { min_gap: f64 },
    #[error("parent model is gapless at m = {0}; the trace is undefined there")]
    GaplessParent(f64),
    #[error("subsystem dimension {0} out of range 0..=3 for the 4D model")]
    BadSubsystemDim(usize),
    #[error("cutoff too small: need Λ ≥ 10·√(k_x²+m²) = {required:.3}, got {got:.3}")]
    CutoffTooSmall { required: f64, got: f64 },
}

/// Fiber gap below which the transverse trace is rejected as gapless.
pub const FIBER_GAP_FLOOR: f64 = 1e-9;

/// Which axes a translation-invariant subsystem keeps, and the grid used
/// for the perpendicular momentum average.
#[derive(Clone, Debug)]
pub struct SubsystemSpec {
    kept_axes: Vec<usize>,
    transverse: BzGrid,
}

impl SubsystemSpec {
    /// `kept_axes` must be a nonempty proper subset of the model axes.
    pub fn new(
        model_dims: usize,
        kept_axes: Vec<usize>,
        transverse: BzGrid,
    ) -> Result<Self, EntmapError> {
        let valid = !kept_axes.is_empty()
            && kept_axes.len() < model_dims
            && kept_axes.iter().all(|&a| a < model_dims)
            && kept_axes.windows(2).all(|w| w[0] < w[1]);
        if !valid {
            return Err(EntmapError::BadKeptAxes { dims: model_dims });
        }
        let traced = model_dims - kept_axes.len();
        if transverse.dims() != traced {
            return Err(EntmapError::TransverseMismatch {
                got: transverse.dims(),
                expected: traced,
            });
        }
        Ok(Self {
            kept_axes,
            transverse,
        })
    }

    /// Keeps the given axes with the default transverse grid.
    pub fn keep(model_dims: usize, kept_axes: Vec<usize>) -> Result<Self, EntmapError> {
        let traced = model_dims.saturating_sub(kept_axes.len());
        Self::new(model_dims, kept_axes, default_transverse(traced))
    }

    pub fn kept_axes(&self) -> &[usize] {
        &self.kept_axes
    }

    pub fn transverse(&self) -> &BzGrid {
        &self.transverse
    }

    pub fn traced_axes(&self, model_dims: usize) -> Vec<usize> {
        (0..model_dims)
            .filter(|a| !self.kept_axes.contains(a))
            .collect()
    }
}

/// Default transverse grids: 512 for one traced axis, 64² for two,
/// 24³ for three, 16⁴ for four.
pub fn default_transverse(traced: usize) -> BzGrid {
    let l = match traced {
        0 => 1,
        1 => 512,
        2 => 64,
        3 => 24,
        _ => 16,
    };
    BzGrid::uniform(traced, l)
}

/// Per-subsystem-momentum record of the mapping.
#[derive(Clone, Debug)]
pub struct EshResult {
    /// Subsystem momentum (kept axes, in axis order).
    pub k_s: Vec<f64>,
    /// Effective subsystem d-vector d_s = ⟨d/|d|⟩_⊥ / F.
    pub d: Vec<f64>,
    /// F = ⟨1/|d|⟩_⊥, units of inverse energy.
    pub f_factor: f64,
    /// Mass shift: (plain transverse average of the mass component) − (d_s mass component).
    pub delta_m: f64,
    /// Entanglement temperature; 0 when `clamped`.
    pub temperature: f64,
    /// Set when F·|d_s| reached the decoupled limit and T was clamped to 0.
    pub clamped: bool,
}

impl EshResult {
    pub fn d_norm(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// T from F and |d_s|; flags the decoupled limit F|d_s| → 1.
pub fn entanglement_temperature(d_norm: f64, f_factor: f64) -> (f64, bool) {
    solve_temperature(d_norm, f_factor)
}

fn solve_temperature(d_norm: f64, f_factor: f64) -> (f64, bool) {
    let x = (f_factor * d_norm).min(1.0);
    if x >= 1.0 - 1e-12 {
        return (0.0, true);
    }
    if x < 1e-6 {
        // arctanh(x) = x(1 + x²/3 + …); finite limit T → 1/(2F) at x → 0
        (1.0 / (2.0 * f_factor * (1.0 + x * x / 3.0)), false)
    } else {
        let xc = x.min(1.0 - 1e-15);
        let arctanh = 0.5 * ((1.0 + xc) / (1.0 - xc)).ln();
        (d_norm / (2.0 * arctanh), false)
    }
}

fn esh_with_axes(
    model: &DiracModel,
    kept_axes: &[usize],
    transverse: &BzGrid,
    k_s: &[f64],
    limiting: bool,
) -> Result<EshResult, EntmapError> {
    if !model.is_lattice() {
        return Err(EntmapError::ContinuumModel(model.name().to_string()));
    }
    let dims = model.dims();
    let n = model.components();
    let traced: Vec<usize> = (0..dims).filter(|a| !kept_axes.contains(a)).collect();
    assert_eq!(k_s.len(), kept_axes.len());
    assert_eq!(transverse.dims(), traced.len());
    let mass = model.mass_component();

    // one pass: [d̂ components, 1/|d|, raw mass component, weight],
    // min |d| tracked; fiber points at the gap floor carry zero weight
    // in the limiting mode
    let width = n + 3;
    let (mut means, min_gap) = grid_mean_and_min(transverse, width, |k_perp, out| {
        let mut k = vec![0.0; dims];
        for (&axis, &v) in kept_axes.iter().zip(k_s) {
            k[axis] = v;
        }
        for (&axis, &v) in traced.iter().zip(k_perp) {
            k[axis] = v;
        }
        let mut d = vec![0.0; n];
        model.d_into(&k, &mut d);
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= FIBER_GAP_FLOOR {
            out.fill(0.0);
            return norm;
        }
        for (o, di) in out.iter_mut().zip(&d) {
            *o = di / norm;
        }
        out[n] = 1.0 / norm;
        out[n + 1] = d[mass];
        out[n + 2] = 1.0;
        norm
    });
    if min_gap <= FIBER_GAP_FLOOR && !limiting {
        return Err(EntmapError::GaplessFiber { min_gap });
    }
    // renormalize by the included weight (1 unless points were excluded)
    let weight = means[n + 2];
    for v in means.iter_mut() {
        *v /= weight;
    }

    let f_factor = means[n];
    let naive_mass = means[n + 1];
    let d: Vec<f64> = means[..n].iter().map(|a| a / f_factor).collect();
    let d_norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let delta_m = naive_mass - d[mass];
    let (temperature, clamped) = solve_temperature(d_norm, f_factor);
    Ok(EshResult {
        k_s: k_s.to_vec(),
        d,
        f_factor,
        delta_m,
        temperature,
        clamped,
    })
}

/// Effective subsystem Hamiltonian record at one subsystem momentum.
pub fn esh(
    model: &DiracModel,
    spec: &SubsystemSpec,
    k_s: &[f64],
) -> Result<EshResult, EntmapError> {
    esh_with_axes(model, &spec.kept_axes, &spec.transverse, k_s, false)
}

/// Like [`esh`], but a fiber crossing a parent gap zero is averaged in
/// the limiting sense (the isolated singular points carry zero weight)
/// instead of being rejected. Identical to [`esh`] on gapped fibers.
pub fn esh_limiting(
    model: &DiracModel,
    spec: &SubsystemSpec,
    k_s: &[f64],
) -> Result<EshResult, EntmapError> {
    esh_with_axes(model, &spec.kept_axes, &spec.transverse, k_s, true)
}

/// [`esh`] over every momentum of a kept-axis grid, in grid order.
pub fn esh_over_grid(
    model: &DiracModel,
    spec: &SubsystemSpec,
    ks_grid: &BzGrid,
) -> Result<Vec<EshResult>, EntmapError> {
    assert_eq!(ks_grid.dims(), spec.kept_axes.len());
    (0..ks_grid.len())
        .into_par_iter()
        .map(|flat| esh(model, spec, &ks_grid.momentum(flat)))
        .collect()
}

/// Mean of T(k_s) over the kept grid; the flag warns that at least one
/// momentum hit the clamped decoupled limit.
pub fn constant_temperature(results: &[EshResult]) -> (f64, bool) {
    assert!(!results.is_empty());
    let mut acc = crate::numerics::KahanSum::new();
    let mut warn = false;
    for r in results {
        acc.add(r.temperature);
        warn |= r.clamped;
    }
    (acc.value() / results.len() as f64, warn)
}

/// Entanglement temperature of the 1D subsystem of the 2D massive
/// continuum Dirac model, by the large-cutoff closed form and by adaptive
/// quadrature of the transverse average.
#[derive(Clone, Copy, Debug)]
pub struct ContinuumTemperature {
    /// Λ / (2 ln(2Λ/√(k_x²+m²))).
    pub closed_form: f64,
    /// |d_1D| / (2 arctanh(|d_1D|·F)) with F integrated numerically.
    pub quadrature: f64,
}

pub fn continuum_temperature(
    k_x: f64,
    m: f64,
    cutoff: f64,
) -> Result<ContinuumTemperature, EntmapError> {
    let a = (k_x * k_x + m * m).sqrt();
    if cutoff < 10.0 * a {
        return Err(EntmapError::CutoffTooSmall {
            required: 10.0 * a,
            got: cutoff,
        });
    }
    let closed_form = cutoff / (2.0 * (2.0 * cutoff / a).ln());
    // F = (1/2Λ) ∫ dk_y / √(k_x² + k_y² + m²)
    let integral = adaptive_simpson(
        &|ky: f64| 1.0 / (a * a + ky * ky).sqrt(),
        -cutoff,
        cutoff,
        1e-12,
    );
    let f_factor = integral / (2.0 * cutoff);
    let (quadrature, _) = solve_temperature(a, f_factor);
    Ok(ContinuumTemperature {
        closed_form,
        quadrature,
    })
}

/// Precomputed transverse tables for models whose fiber norm is
/// |d(k_s, k_⊥)|² = (M − C(k_⊥))² + S_s² + S²(k_⊥), with M the naive
/// restricted mass and S_s² the kept-axis sine weight. Both the QWZ model
/// and the whole 4D descendant family have this form, so m- and k-scans
/// can drop the per-point trigonometry. Averages use compensated
/// summation in grid order; cross-checked against [`esh`] in the tests.
#[derive(Clone, Debug)]
pub struct PerpAverager {
    cos_sum: Vec<f64>,
    sin_sq: Vec<f64>,
}

/// Result of one fast fiber average.
#[derive(Clone, Copy, Debug)]
pub struct PerpAverage {
    /// F = ⟨1/|d|⟩_⊥.
    pub f_factor: f64,
    /// δm = ⟨C(k_⊥)/|d|⟩_⊥ / F; the ESH mass component is M − δm.
    pub delta_m: f64,
    /// min |d| over the fiber (0 when points were excluded).
    pub min_gap: f64,
    /// Grid points excluded because |d| hit the gap floor. When nonzero
    /// the averages are the limiting values approached from nearby fibers.
    pub excluded: usize,
}

impl PerpAverager {
    /// Traced axes all hop with amplitude 1 (the 4D model family).
    pub fn unit_hopping(transverse: &BzGrid) -> Self {
        Self::with_amplitudes(transverse, &vec![1.0; transverse.dims()])
    }

    /// One table entry per transverse grid point:
    /// C = Σ_j t_j cos k_j and S² = Σ_j t_j² sin² k_j.
    pub fn with_amplitudes(transverse: &BzGrid, amplitudes: &[f64]) -> Self {
        assert_eq!(amplitudes.len(), transverse.dims());
        let len = transverse.len();
        let mut cos_sum = Vec::with_capacity(len);
        let mut sin_sq = Vec::with_capacity(len);
        let mut k = vec![0.0; transverse.dims()];
        for flat in 0..len {
            transverse.momentum_into(flat, &mut k);
            let mut c = 0.0;
            let mut s2 = 0.0;
            for (&t, &ki) in amplitudes.iter().zip(&k) {
                let (s, co) = ki.sin_cos();
                c += t * co;
                s2 += t * t * s * s;
            }
            cos_sum.push(c);
            sin_sq.push(s2);
        }
        Self { cos_sum, sin_sq }
    }

    /// Fiber average at naive mass `mass` and kept sine weight `kept_sin_sq`.
    ///
    /// Fiber points where |d| reaches the gap floor (a parent gap closing
    /// sitting on the fiber) are excluded, which yields the limit of the
    /// average from neighboring fibers; `excluded` reports how many.
    pub fn average(&self, mass: f64, kept_sin_sq: f64) -> PerpAverage {
        let floor_sq = FIBER_GAP_FLOOR * FIBER_GAP_FLOOR;
        let mut f = crate::numerics::KahanSum::new();
        let mut g = crate::numerics::KahanSum::new();
        let mut min_sq = f64::INFINITY;
        let mut excluded = 0usize;
        for (&c, &s2) in self.cos_sum.iter().zip(&self.sin_sq) {
            let t = mass - c;
            let norm_sq = t * t + kept_sin_sq + s2;
            min_sq = min_sq.min(norm_sq);
            if norm_sq <= floor_sq {
                excluded += 1;
                continue;
            }
            let inv = 1.0 / norm_sq.sqrt();
            f.add(inv);
            g.add(c * inv);
        }
        let n = (self.cos_sum.len() - excluded) as f64;
        let f_factor = f.value() / n;
        PerpAverage {
            f_factor,
            delta_m: g.value() / n / f_factor,
            min_gap: min_sq.sqrt(),
            excluded,
        }
    }

    /// Plain-summation variant of [`Self::average`] returning only
    /// (F, δm). The serial fixed-order loop stays deterministic; the
    /// compensation is dropped because invariant integrals only need the
    /// averages to their 0.05 rounding budget, and the fiber loop
    /// dominates the ν(m) sweeps.
    pub fn average_fast(&self, mass: f64, kept_sin_sq: f64) -> (f64, f64) {
        let floor_sq = FIBER_GAP_FLOOR * FIBER_GAP_FLOOR;
        let mut f = 0.0f64;
        let mut g = 0.0f64;
        let mut included = 0usize;
        for (&c, &s2) in self.cos_sum.iter().zip(&self.sin_sq) {
            let t = mass - c;
            let norm_sq = t * t + kept_sin_sq + s2;
            if norm_sq <= floor_sq {
                continue;
            }
            let inv = norm_sq.sqrt().recip();
            f += inv;
            g += c * inv;
            included += 1;
        }
        let f_factor = f / included as f64;
        (f_factor, g / included as f64 / f_factor)
    }
}

/// Fast ESH gap of the 4D model's d_s-dimensional descendant at one
/// subsystem momentum (`averager = None` means the parent itself).
/// Evaluated in the limiting sense when a parent gap closing crosses the
/// fiber, so the scan stays defined through those momenta.
pub fn qh4d_descendant_gap(m: f64, k_s: &[f64], averager: Option<&PerpAverager>) -> f64 {
    let mass: f64 = m - k_s.iter().map(|k| k.cos()).sum::<f64>();
    let sin_sq: f64 = k_s.iter().map(|k| k.sin().powi(2)).sum();
    match averager {
        None => (mass * mass + sin_sq).sqrt(),
        Some(avg) => {
            let a = avg.average(mass, sin_sq);
            let mass_esh = mass - a.delta_m;
            (mass_esh * mass_esh + sin_sq).sqrt()
        }
    }
}

/// ESH family of the 4D quantum Hall model: keeps the first `d_s` axes
/// and averages over the remaining 4 − d_s momenta.
///
/// The resulting d-vector involves only the first d_s + 1 Γ matrices;
/// higher components vanish by parity of the traced sines.
pub fn esh_4d_descendants(
    m: f64,
    d_s: usize,
    ks_points: usize,
    transverse: Option<BzGrid>,
) -> Result<Vec<EshResult>, EntmapError> {
    if d_s > 3 {
        return Err(EntmapError::BadSubsystemDim(d_s));
    }
    for critical in [0.0, 2.0, -2.0, 4.0, -4.0] {
        if (m - critical).abs() < 1e-12 {
            return Err(EntmapError::GaplessParent(m));
        }
    }
    let model = DiracModel::qh4d(m);
    let kept: Vec<usize> = (0..d_s).collect();
    let transverse = transverse.unwrap_or_else(|| default_transverse(4 - d_s));
    if transverse.dims() != 4 - d_s {
        return Err(EntmapError::TransverseMismatch {
            got: transverse.dims(),
            expected: 4 - d_s,
        });
    }
    let ks_grid = BzGrid::uniform(d_s, ks_points.max(1));
    (0..ks_grid.len())
        .into_par_iter()
        .map(|flat| esh_with_axes(&model, &kept, &transverse, &ks_grid.momentum(flat), false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn qwz_spec(transverse_l: usize) -> SubsystemSpec {
        SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, transverse_l)).unwrap()
    }

    /// Dense-grid reference for the QWZ transverse sums, written directly
    /// from the averaging definitions (independent of the esh code path).
    fn qwz_reference(m: f64, t_y: f64, k_x: f64, l: usize) -> (Vec<f64>, f64, f64, f64) {
        let mut avg = [0.0f64; 3];
        let mut f = 0.0;
        let mut mass_cos = 0.0;
        for i in 0..l {
            let ky = 2.0 * PI * i as f64 / l as f64;
            let d = [k_x.sin(), t_y * ky.sin(), m - k_x.cos() - t_y * ky.cos()];
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            for (a, di) in avg.iter_mut().zip(&d) {
                *a += di / norm / l as f64;
            }
            f += 1.0 / norm / l as f64;
            mass_cos += ky.cos() / norm / l as f64;
        }
        let d1d: Vec<f64> = avg.iter().map(|a| a / f).collect();
        let delta_m = t_y * mass_cos / f;
        let dn = d1d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x = f * dn;
        let t = if x < 1e-12 {
            1.0 / (2.0 * f)
        } else {
            dn / ((1.0 + x) / (1.0 - x)).ln()
        };
        (d1d, f, delta_m, t)
    }

    #[test]
    fn hot_gapless_point() {
        // m = 1, k_x = 0: the fiber is t_y(0, sin, −cos), so d_1D = 0,
        // δm = 0, F = 1/t_y.
        for t_y in [1.0, 0.5, 0.2] {
            let model = DiracModel::qwz(1.0, 1.0, t_y);
            let r = esh(&model, &qwz_spec(512), &[0.0]).unwrap();
            assert!(r.d_norm() < 1e-12, "d_1D = {:?}", r.d);
            assert!(r.delta_m.abs() < 1e-12);
            assert!((r.f_factor - 1.0 / t_y).abs() < 1e-12 / t_y);
            assert!((r.temperature - t_y / 2.0).abs() < 1e-10);
            assert!(!r.clamped);
        }
    }

    #[test]
    fn decoupled_chain_limit() {
        let model = DiracModel::qwz(1.4, 1.0, 1e-9);
        let r = esh(&model, &qwz_spec(512), &[0.9]).unwrap();
        assert!(r.clamped);
        assert_eq!(r.temperature, 0.0);
        assert!(r.delta_m.abs() < 1e-8);
        let expect = [0.9f64.sin(), 0.0, 1.4 - 0.9f64.cos()];
        for (a, b) in r.d.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-7, "{:?} vs {:?}", r.d, expect);
        }
    }

    #[test]
    fn matches_dense_grid_reference() {
        let (m, t_y, k_x) = (1.4, 0.2, PI);
        let l = 4096;
        let model = DiracModel::qwz(m, 1.0, t_y);
        let r = esh(&model, &qwz_spec(l), &[k_x]).unwrap();
        let (d_ref, f_ref, dm_ref, t_ref) = qwz_reference(m, t_y, k_x, l);
        for (a, b) in r.d.iter().zip(&d_ref) {
            assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", r.d, d_ref);
        }
        assert!((r.f_factor - f_ref).abs() < 1e-8);
        assert!((r.delta_m - dm_ref).abs() < 1e-8);
        assert!((r.temperature - t_ref).abs() < 1e-8);
        // traced odd direction drops out
        assert!(r.d[1].abs() < 1e-12);
    }

    #[test]
    fn f_d_product_bounded() {
        for (m, t_y, k_x) in [(0.5, 0.7, 0.3), (1.4, 1.0, 2.0), (2.5, 0.2, PI / 2.0)] {
            let model = DiracModel::qwz(m, 1.0, t_y);
            let r = esh(&model, &qwz_spec(256), &[k_x]).unwrap();
            let x = r.f_factor * r.d_norm();
            assert!((0.0..=1.0 + 1e-14).contains(&x), "F|d| = {x}");
        }
    }

    #[test]
    fn temperature_monotone_in_ty() {
        let mut last = 0.0;
        for i in 1..=20 {
            let t_y = 0.1 * i as f64;
            let model = DiracModel::qwz(1.4, 1.0, t_y);
            let r = esh(&model, &qwz_spec(512), &[0.7]).unwrap();
            assert!(r.temperature > last, "T not increasing at t_y = {t_y}");
            last = r.temperature;
        }
    }

    #[test]
    fn delta_m_vanishes_with_ty() {
        let ks: Vec<f64> = (0..32).map(|i| 2.0 * PI * i as f64 / 32.0).collect();
        let mut prev = f64::INFINITY;
        for t_y in [0.5, 0.1, 0.01] {
            let model = DiracModel::qwz(1.4, 1.0, t_y);
            let worst = ks
                .iter()
                .map(|&k| esh(&model, &qwz_spec(256), &[k]).unwrap().delta_m.abs())
                .fold(0.0, f64::max);
            assert!(worst < prev);
            prev = worst;
        }
        assert!(prev < 5e-4, "max |δm| at t_y = 0.01 is {prev}");
    }

    #[test]
    fn constant_temperature_mean() {
        let model = DiracModel::qwz(1.0, 1.0, 1.0);
        let spec = qwz_spec(512);
        let grid = BzGrid::uniform(1, 64);
        let results = esh_over_grid(&model, &spec, &grid).unwrap();
        let (mean, warn) = constant_temperature(&results);
        assert!(!warn);
        let direct: f64 = results.iter().map(|r| r.temperature).sum::<f64>() / results.len() as f64;
        assert!((mean - direct).abs() < 1e-14);
    }

    #[test]
    fn continuum_closed_form_vs_quadrature() {
        let r = continuum_temperature(0.0, 1.0, 100.0).unwrap();
        assert!((r.closed_form - 100.0 / (2.0 * 200.0f64.ln())).abs() < 1e-12);
        let rel = (r.closed_form - r.quadrature).abs() / r.quadrature;
        assert!(
            rel < 0.02,
            "closed {} vs quadrature {}",
            r.closed_form,
            r.quadrature
        );
    }

    #[test]
    fn continuum_weak_momentum_dependence() {
        let m = 1.0;
        let t0 = continuum_temperature(0.0, m, 200.0).unwrap().quadrature;
        for i in 1..=5 {
            let kx = m / 10.0 * i as f64 / 5.0;
            let t = continuum_temperature(kx, m, 200.0).unwrap().quadrature;
            assert!((t - t0).abs() / t0 < 0.01);
        }
    }

    #[test]
    fn continuum_cutoff_precondition() {
        assert!(continuum_temperature(0.0, 1.0, 5.0).is_err());
        assert!(continuum_temperature(3.0, 4.0, 49.0).is_err());
        assert!(continuum_temperature(3.0, 4.0, 50.0).is_ok());
    }

    #[test]
    fn descendants_use_leading_gammas_only() {
        for d_s in 0..=3usize {
            let results = esh_4d_descendants(
                0.5,
                d_s,
                if d_s == 0 { 1 } else { 8 },
                Some(BzGrid::uniform(4 - d_s, 12)),
            )
            .unwrap();
            for r in &results {
                for (mu, &comp) in r.d.iter().enumerate() {
                    if mu > d_s {
                        assert!(comp.abs() < 1e-12, "component {mu} = {comp} at d_s = {d_s}");
                    }
                }
            }
        }
    }

    #[test]
    fn descendant_mass_shift_vanishes_at_critical_momenta() {
        // δm(Q) = 0 exactly where the naive mass m − Σcos Q_i vanishes,
        // which pins the critical values at m_c = Σcos Q_i. Away from
        // there the shift is finite.
        let cases: [(f64, usize, Vec<f64>); 3] = [
            (1.0, 1, vec![0.0]),
            (-1.0, 1, vec![PI]),
            (3.0, 3, vec![0.0, 0.0, 0.0]),
        ];
        for (m, d_s, q) in cases {
            let model = DiracModel::qh4d(m);
            let kept: Vec<usize> = (0..d_s).collect();
            let spec = SubsystemSpec::new(
                4,
                kept,
                BzGrid::uniform(4 - d_s, if d_s == 3 { 256 } else { 16 }),
            )
            .unwrap();
            let r = esh(&model, &spec, &q).unwrap();
            assert!(
                r.delta_m.abs() < 1e-10,
                "δm = {} at m = {m}, Q = {q:?}",
                r.delta_m
            );
        }
        // generic point: the shift is nonzero
        let model = DiracModel::qh4d(0.5);
        let spec = SubsystemSpec::new(4, vec![0], BzGrid::uniform(3, 16)).unwrap();
        let r = esh(&model, &spec, &[0.0]).unwrap();
        assert!(
            r.delta_m.abs() > 1e-3,
            "expected a finite shift, got {}",
            r.delta_m
        );
    }

    #[test]
    fn descendant_gapless_at_m3() {
        // D_s = 3, m = 3: ESH closes at k_s = 0
        let results = esh_4d_descendants(3.0, 3, 2, Some(BzGrid::uniform(1, 64))).unwrap();
        let r0 = &results[0];
        assert_eq!(r0.k_s, vec![0.0, 0.0, 0.0]);
        assert!(r0.d_norm() < 1e-10, "|d_3D(0)| = {}", r0.d_norm());
    }

    #[test]
    fn descendant_vs_dense_reference() {
        // D_s = 1 record at k = π/3 against a direct dense transverse sum
        let (m, k) = (0.5, PI / 3.0);
        let l = 24usize;
        let model = DiracModel::qh4d(m);
        let spec = SubsystemSpec::new(4, vec![0], BzGrid::uniform(3, l)).unwrap();
        let r = esh(&model, &spec, &[k]).unwrap();

        // reference written against the raw definition
        let mut avg = [0.0f64; 5];
        let mut f = 0.0;
        for i in 0..l {
            for j in 0..l {
                for kk in 0..l {
                    let ks = [
                        k,
                        2.0 * PI * i as f64 / l as f64,
                        2.0 * PI * j as f64 / l as f64,
                        2.0 * PI * kk as f64 / l as f64,
                    ];
                    let d = [
                        m - ks.iter().map(|x| x.cos()).sum::<f64>(),
                        ks[0].sin(),
                        ks[1].sin(),
                        ks[2].sin(),
                        ks[3].sin(),
                    ];
                    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                    for (a, di) in avg.iter_mut().zip(&d) {
                        *a += di / norm;
                    }
                    f += 1.0 / norm;
                }
            }
        }
        let total = (l * l * l) as f64;
        f /= total;
        let d_ref: Vec<f64> = avg.iter().map(|a| a / total / f).collect();
        let dn_ref = d_ref.iter().map(|v| v * v).sum::<f64>().sqrt();
        let t_ref = dn_ref / ((1.0 + f * dn_ref) / (1.0 - f * dn_ref)).ln();

        assert!((r.f_factor - f).abs() < 1e-8);
        for (a, b) in r.d.iter().zip(&d_ref) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((r.temperature - t_ref).abs() < 1e-8);
        let naive_mass = m - k.cos();
        assert!((r.delta_m - (naive_mass - r.d[0])).abs() < 1e-12);
    }

    #[test]
    fn descendants_reject_gapless_parent() {
        for m in [0.0, 2.0, -2.0, 4.0, -4.0] {
            assert!(esh_4d_descendants(m, 1, 4, None).is_err());
        }
        assert!(esh_4d_descendants(5.0, 4, 4, None).is_err());
    }

    #[test]
    fn default_transverse_grids_are_converged() {
        // doubling the default grid moves T by less than 1e-6
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let coarse = esh(&model, &qwz_spec(512), &[0.7]).unwrap();
        let fine = esh(&model, &qwz_spec(1024), &[0.7]).unwrap();
        assert!((coarse.temperature - fine.temperature).abs() < 1e-6);

        let qh = DiracModel::qh4d(0.5);
        for (d_s, l) in [(2usize, 64usize), (1, 24)] {
            let kept: Vec<usize> = (0..d_s).collect();
            let k_s = vec![0.9; d_s];
            let a = esh(
                &qh,
                &SubsystemSpec::new(4, kept.clone(), BzGrid::uniform(4 - d_s, l)).unwrap(),
                &k_s,
            )
            .unwrap();
            let b = esh(
                &qh,
                &SubsystemSpec::new(4, kept, BzGrid::uniform(4 - d_s, 2 * l)).unwrap(),
                &k_s,
            )
            .unwrap();
            assert!(
                (a.temperature - b.temperature).abs() < 1e-6,
                "D_s = {d_s}: ΔT = {}",
                (a.temperature - b.temperature).abs()
            );
        }
    }

    #[test]
    fn subsystem_spec_validation() {
        assert!(SubsystemSpec::new(2, vec![], BzGrid::uniform(2, 4)).is_err());
        assert!(SubsystemSpec::new(2, vec![0, 1], BzGrid::uniform(0, 1)).is_err());
        assert!(SubsystemSpec::new(2, vec![2], BzGrid::uniform(1, 4)).is_err());
        assert!(SubsystemSpec::new(2, vec![0], BzGrid::uniform(2, 4)).is_err());
        assert!(SubsystemSpec::new(3, vec![0, 2], BzGrid::uniform(1, 4)).is_ok());
    }

    #[test]
    fn fast_averager_matches_esh() {
        // QWZ: traced axis with amplitude t_y
        let (m, t_y, k_x) = (1.4, 0.5, 0.9);
        let model = DiracModel::qwz(m, 1.0, t_y);
        let r = esh(&model, &qwz_spec(512), &[k_x]).unwrap();
        let avg = PerpAverager::with_amplitudes(&BzGrid::uniform(1, 512), &[t_y]);
        let a = avg.average(m - k_x.cos(), k_x.sin().powi(2));
        assert!((a.f_factor - r.f_factor).abs() < 1e-12);
        assert!((a.delta_m - r.delta_m).abs() < 1e-12);

        // 4D descendant, d_s = 2
        let grid = BzGrid::uniform(2, 32);
        let m4 = 0.7;
        let model4 = DiracModel::qh4d(m4);
        let spec = SubsystemSpec::new(4, vec![0, 1], grid.clone()).unwrap();
        let k_s = [0.4, 2.0];
        let r4 = esh(&model4, &spec, &k_s).unwrap();
        let gap = qh4d_descendant_gap(m4, &k_s, Some(&PerpAverager::unit_hopping(&grid)));
        assert!(
            (gap - r4.d_norm()).abs() < 1e-12,
            "{gap} vs {}",
            r4.d_norm()
        );
    }

    #[test]
    fn gapless_fiber_rejected() {
        // m = 2 QWZ: the fiber at k_x = 0 contains |d| = 0 at k_y = 0
        let model = DiracModel::qwz(2.0, 1.0, 1.0);
        let err = esh(&model, &qwz_spec(64), &[0.0]);
        assert!(matches!(err, Err(EntmapError::GaplessFiber { .. })));
    }
}
