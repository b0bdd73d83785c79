//! Correlation matrices and derived quantities.
//!
//! The stored object is 𝒞 = ⟨c†c⟩* restricted to the subsystem — note
//! this is the transpose of the common ⟨c†c⟩ convention; spectra and
//! traces are unaffected. At half filling the ground-state correlation
//! matrix is the conjugated projector onto negative-energy modes.
//!
//! Momentum-space blocks come from the transverse-averaged form
//! ½(𝟙 − F d_s·Γ); real-space matrices from exact diagonalization of a
//! finite lattice. For fully periodic parents two cheaper exact routes
//! are provided: `window_corr` (inverse Fourier transform of the
//! momentum blocks onto a finite window) and `row_corr_blocks_ed`
//! (numerical diagonalization of the transverse chain at every kept
//! momentum), both cross-checked against the dense path in the tests.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::clifford::CliffordRep;
use crate::entmap::{EntmapError, EshResult, SubsystemSpec};
use crate::models::{realspace_hamiltonian, Boundary, DiracModel, LatticeGeometry, ModelError};
use crate::numerics::{
    grid_mean_and_min, hermitian_eigh, BzGrid, ComplexMatrix, HermitianMatrix, NumericsError,
};

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("zero-energy mode (|E| = {0:.3e}) makes half filling ambiguous")]
    ZeroMode(f64),
    #[error("thermal correlation at T = 0 needs |d| > 0")]
    IllDefinedOccupation,
    #[error("correlation eigenvalue {0} is at the boundary; entanglement energies diverge")]
    EigenvalueAtBoundary(f64),
    #[error("window of {window} cells does not fit a ring of {ring}")]
    WindowTooLong { window: usize, ring: usize },
    #[error("row ED path requires a two-dimensional lattice model")]
    NotTwoDimensional,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Entmap(#[from] EntmapError),
}

/// Where a correlation matrix lives.
#[derive(Clone, Debug)]
pub enum CorrContext {
    /// One 2ⁿ×2ⁿ block at a fixed subsystem momentum.
    MomentumBlock { k_s: Vec<f64> },
    /// Real-space subsystem, dimension 2ⁿ·(#subsystem sites).
    RealSpace { sites: usize },
}

/// Hermitian matrix with spectrum in [0, 1].
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    pub matrix: HermitianMatrix,
    pub context: CorrContext,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, NumericsError> {
        Ok(hermitian_eigh(&self.matrix)?.eigenvalues)
    }

    /// How far the spectrum leaves [0, 1]; 0 for a valid correlation matrix.
    pub fn bounds_defect(&self) -> Result<f64, NumericsError> {
        let eig = self.eigenvalues()?;
        let mut worst = 0.0f64;
        for xi in eig {
            worst = worst.max(-xi).max(xi - 1.0);
        }
        Ok(worst.max(0.0))
    }
}

/// Fermi-Dirac occupation with T = 0 handled as a sharp step.
pub fn fermi_dirac(energy: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        if energy < 0.0 {
            1.0
        } else if energy > 0.0 {
            0.0
        } else {
            0.5
        }
    } else {
        1.0 / ((energy / temperature).exp() + 1.0)
    }
}

/// Momentum-block correlation matrix ½(𝟙 − F d_s·Γ) of an ESH record.
pub fn corr_momentum(esh: &EshResult, rep: &CliffordRep) -> CorrelationMatrix {
    let scaled: Vec<f64> = esh.d.iter().map(|di| -0.5 * esh.f_factor * di).collect();
    let mut m = rep.contract(&scaled);
    let half = HermitianMatrix::identity(rep.matrix_dim());
    m.axpy(0.5, &half);
    CorrelationMatrix {
        matrix: m,
        context: CorrContext::MomentumBlock {
            k_s: esh.k_s.clone(),
        },
    }
}

/// Thermal correlation matrix ½ Σ_η (𝟙 + η d̂·Γ) n_F(η|d|) of the Dirac
/// Hamiltonian d·Γ at temperature `t` (equivalently ½(𝟙 − tanh(|d|/2T) d̂·Γ)).
pub fn thermal_corr(d: &[f64], t: f64, rep: &CliffordRep) -> Result<CorrelationMatrix, CorrError> {
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    if t == 0.0 && norm == 0.0 {
        return Err(CorrError::IllDefinedOccupation);
    }
    let weight = if norm == 0.0 {
        0.0
    } else if t == 0.0 {
        1.0
    } else {
        (norm / (2.0 * t)).tanh()
    };
    let scaled: Vec<f64> = d
        .iter()
        .map(|di| {
            if norm == 0.0 {
                0.0
            } else {
                -0.5 * weight * di / norm
            }
        })
        .collect();
    let mut m = rep.contract(&scaled);
    m.axpy(0.5, &HermitianMatrix::identity(rep.matrix_dim()));
    Ok(CorrelationMatrix {
        matrix: m,
        context: CorrContext::MomentumBlock { k_s: Vec::new() },
    })
}

/// Ground-state correlation matrix of a finite lattice restricted to the
/// geometry's subsystem sites, computed by exact diagonalization.
pub fn realspace_corr(
    model: &DiracModel,
    geom: &LatticeGeometry,
) -> Result<CorrelationMatrix, CorrError> {
    let h = realspace_hamiltonian(model, geom)?;
    let eig = hermitian_eigh(&h)?;
    for &e in &eig.eigenvalues {
        if e.abs() < 1e-12 {
            return Err(CorrError::ZeroMode(e.abs()));
        }
    }
    let filled: Vec<usize> = (0..eig.dim())
        .filter(|&j| eig.eigenvalues[j] < 0.0)
        .collect();
    let b = model.rep().matrix_dim();
    let rows: Vec<usize> = geom
        .subsystem()
        .iter()
        .flat_map(|&site| (0..b).map(move |orb| site * b + orb))
        .collect();
    let p = eig.projector_on_rows(&filled, &rows);
    let data: Vec<C64> = p.iter().map(|z| z.conj()).collect();
    let matrix = HermitianMatrix::from_entries(rows.len(), data)?;
    Ok(CorrelationMatrix {
        matrix,
        context: CorrContext::RealSpace {
            sites: geom.subsystem().len(),
        },
    })
}

/// Correlation matrix of a `window_len`-cell open segment along
/// `kept_axis`, embedded in a fully periodic parent with `ring_len` cells
/// on that axis: the inverse Fourier transform of the momentum blocks,
/// C_{x,x'} = (1/L) Σ_k e^{−ik(x−x')} C(k).
pub fn window_corr(
    model: &DiracModel,
    kept_axis: usize,
    ring_len: usize,
    window_len: usize,
    transverse: &BzGrid,
) -> Result<CorrelationMatrix, CorrError> {
    if window_len > ring_len {
        return Err(CorrError::WindowTooLong {
            window: window_len,
            ring: ring_len,
        });
    }
    let spec = SubsystemSpec::new(model.dims(), vec![kept_axis], transverse.clone())?;
    // limiting averages keep isolated parent gap zeros on a fiber finite,
    // so sweeps may pass through critical parameter points
    let blocks: Vec<HermitianMatrix> = (0..ring_len)
        .into_par_iter()
        .map(|i| {
            let k = 2.0 * std::f64::consts::PI * i as f64 / ring_len as f64;
            crate::entmap::esh_limiting(model, &spec, &[k])
                .map(|r| corr_momentum(&r, model.rep()).matrix)
        })
        .collect::<Result<_, _>>()?;
    let b = model.rep().matrix_dim();
    let dim = b * window_len;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for x in 0..window_len {
        for xp in 0..window_len {
            let mut block = vec![C64::new(0.0, 0.0); b * b];
            for (i, cb) in blocks.iter().enumerate() {
                let k = 2.0 * std::f64::consts::PI * i as f64 / ring_len as f64;
                let phase = C64::from_polar(1.0, -k * (x as f64 - xp as f64));
                for a in 0..b {
                    for bb in 0..b {
                        block[a * b + bb] += phase * cb.get(a, bb);
                    }
                }
            }
            for a in 0..b {
                for bb in 0..b {
                    data[(x * b + a) * dim + xp * b + bb] = block[a * b + bb] / ring_len as f64;
                }
            }
        }
    }
    let matrix = HermitianMatrix::from_entries(dim, data)?;
    Ok(CorrelationMatrix {
        matrix,
        context: CorrContext::RealSpace { sites: window_len },
    })
}

/// Exact-diagonalization route for a full row of an L_kept×L_perp fully
/// periodic 2D lattice: Fourier transforms the kept axis analytically and
/// diagonalizes the transverse chain numerically at every kept momentum.
/// Returns the 2ⁿ×2ⁿ correlation block per kept momentum (grid order).
pub fn row_corr_blocks_ed(
    model: &DiracModel,
    kept_axis: usize,
    l_kept: usize,
    l_perp: usize,
) -> Result<Vec<CorrelationMatrix>, CorrError> {
    if model.dims() != 2 {
        return Err(CorrError::NotTwoDimensional);
    }
    let b = model.rep().matrix_dim();
    (0..l_kept)
        .into_par_iter()
        .map(|i| {
            let k = 2.0 * std::f64::consts::PI * i as f64 / l_kept as f64;
            let chain = transverse_chain_model(model, kept_axis, k)?;
            let geom = LatticeGeometry::new(
                vec![l_perp],
                vec![Boundary::Periodic],
                vec![0], // any single row; translation invariance along the chain
            )?;
            let block = realspace_corr(&chain, &geom)?;
            debug_assert_eq!(block.dim(), b);
            Ok(CorrelationMatrix {
                matrix: block.matrix,
                context: CorrContext::MomentumBlock { k_s: vec![k] },
            })
        })
        .collect()
}

/// 1D chain model along the traced axis at fixed kept momentum: kept-axis
/// harmonics fold into the on-site d-vector, traced-axis harmonics stay hops.
fn transverse_chain_model(
    model: &DiracModel,
    kept_axis: usize,
    k: f64,
) -> Result<DiracModel, CorrError> {
    use crate::models::HarmonicTerm;
    let traced_axis = 1 - kept_axis;
    let n = model.components();
    let mut onsite = vec![0.0; n];
    // reuse d(k) with the traced momentum at an arbitrary reference (0)
    // minus the traced-axis harmonics, i.e. evaluate kept-axis + constant parts
    let mut k_full = [0.0f64; 2];
    k_full[kept_axis] = k;
    let mut d_at = vec![0.0; n];
    model.d_into(&k_full, &mut d_at);
    // subtract traced-axis harmonics at momentum 0 to isolate the on-site part
    let mut terms_1d = Vec::new();
    for t in model.harmonics() {
        if t.axis == traced_axis {
            d_at[t.comp] -= t.cos_coeff; // cos(0) = 1, sin(0) = 0
            terms_1d.push(HarmonicTerm {
                comp: t.comp,
                axis: 0,
                range: t.range,
                cos_coeff: t.cos_coeff,
                sin_coeff: t.sin_coeff,
            });
        }
    }
    onsite.copy_from_slice(&d_at);
    Ok(DiracModel::from_harmonics(
        format!("{}-chain", model.name()),
        1,
        model.rep().clone(),
        model.mass_component(),
        onsite,
        terms_1d,
    )?)
}

/// ΔN² = Tr[C(1−C)] = Σ_i ξ_i(1−ξ_i); Tr C² is evaluated as the squared
/// Frobenius norm, exact for Hermitian C.
pub fn particle_variance(c: &CorrelationMatrix) -> f64 {
    let tr = c.matrix.trace();
    let tr_sq = c.matrix.frobenius_norm().powi(2);
    tr - tr_sq
}

/// Entanglement Hamiltonian H_E = ln((1−C)/C) through the eigenbasis.
pub fn entanglement_hamiltonian(c: &CorrelationMatrix) -> Result<HermitianMatrix, CorrError> {
    let eig = hermitian_eigh(&c.matrix)?;
    let n = c.dim();
    for &xi in &eig.eigenvalues {
        if !(1e-12..=1.0 - 1e-12).contains(&xi) {
            return Err(CorrError::EigenvalueAtBoundary(xi));
        }
    }
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (l, &xi) in eig.eigenvalues.iter().enumerate() {
                let e = ((1.0 - xi) / xi).ln();
                acc += eig.vector_component(i, l) * e * eig.vector_component(j, l).conj();
            }
            data[i * n + j] = acc;
        }
    }
    Ok(HermitianMatrix::from_entries(n, data)?)
}

/// Time-dependent correlation operator of the subsystem:
/// ⟨e^{−iE_filled t} (filled-band projector)⟩_⊥ with E_filled = −|d|.
/// Equals the static block at t = 0 and is generally non-Hermitian after.
#[derive(Clone, Debug)]
pub struct TimeCorrelation {
    pub matrix: ComplexMatrix,
    pub time: f64,
}

pub fn time_corr(
    model: &DiracModel,
    spec: &SubsystemSpec,
    k_s: &[f64],
    t: f64,
) -> Result<TimeCorrelation, CorrError> {
    if !model.is_lattice() {
        return Err(CorrError::Entmap(EntmapError::ContinuumModel(
            model.name().to_string(),
        )));
    }
    let dims = model.dims();
    let n = model.components();
    let b = model.rep().matrix_dim();
    let kept = spec.kept_axes();
    let traced = spec.traced_axes(dims);
    let width = 2 * b * b;
    let gammas = model.rep().clone();

    let (means, min_gap) = grid_mean_and_min(spec.transverse(), width, |k_perp, out| {
        let mut k = vec![0.0; dims];
        for (&axis, &v) in kept.iter().zip(k_s) {
            k[axis] = v;
        }
        for (&axis, &v) in traced.iter().zip(k_perp) {
            k[axis] = v;
        }
        let mut d = vec![0.0; n];
        model.d_into(&k, &mut d);
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        // filled projector ½(𝟙 − d̂·Γ) times the phase e^{+i|d|t}
        let phase = C64::from_polar(1.0, norm * t);
        for a in 0..b {
            for bb in 0..b {
                let mut p = if a == bb {
                    C64::new(0.5, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                for (mu, &dm) in d.iter().enumerate() {
                    p -= 0.5 * dm / norm * gammas.gamma(mu).get(a, bb);
                }
                let v = phase * p;
                out[2 * (a * b + bb)] = v.re;
                out[2 * (a * b + bb) + 1] = v.im;
            }
        }
        norm
    });
    if min_gap <= crate::entmap::FIBER_GAP_FLOOR {
        return Err(CorrError::Entmap(EntmapError::GaplessFiber { min_gap }));
    }
    let mut m = ComplexMatrix::zeros(b);
    for a in 0..b {
        for bb in 0..b {
            m.set(
                a,
                bb,
                C64::new(means[2 * (a * b + bb)], means[2 * (a * b + bb) + 1]),
            );
        }
    }
    Ok(TimeCorrelation { matrix: m, time: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entmap::esh;
    use crate::models::line_sites;
    use std::f64::consts::PI;

    fn qwz_spec(l: usize) -> SubsystemSpec {
        SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, l)).unwrap()
    }

    #[test]
    fn hot_block_is_maximally_mixed() {
        let model = DiracModel::qwz(1.0, 1.0, 1.0);
        let r = esh(&model, &qwz_spec(512), &[0.0]).unwrap();
        let c = corr_momentum(&r, model.rep());
        for xi in c.eigenvalues().unwrap() {
            assert!((xi - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_limit_is_projector() {
        let model = DiracModel::qwz(1.4, 1.0, 1e-9);
        let r = esh(&model, &qwz_spec(512), &[0.9]).unwrap();
        let c = corr_momentum(&r, model.rep());
        let eig = c.eigenvalues().unwrap();
        assert!(eig[0].abs() < 1e-9);
        assert!((eig[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn block_eigenvalues_are_fermi_dirac() {
        let model = DiracModel::qwz(1.4, 1.0, 0.2);
        let r = esh(&model, &qwz_spec(512), &[PI / 2.0]).unwrap();
        let c = corr_momentum(&r, model.rep());
        let eig = c.eigenvalues().unwrap();
        let e = r.d_norm();
        let expect_lo = fermi_dirac(e, r.temperature);
        let expect_hi = fermi_dirac(-e, r.temperature);
        assert!((eig[0] - expect_lo).abs() < 1e-12);
        assert!((eig[1] - expect_hi).abs() < 1e-12);
    }

    #[test]
    fn thermal_matches_subsystem_block() {
        for (m, t_y, k_x) in [(1.0, 1.0, 0.4), (1.4, 0.5, 2.0), (2.5, 0.2, PI)] {
            let model = DiracModel::qwz(m, 1.0, t_y);
            let r = esh(&model, &qwz_spec(512), &[k_x]).unwrap();
            let sub = corr_momentum(&r, model.rep());
            let th = thermal_corr(&r.d, r.temperature, model.rep()).unwrap();
            let diff = sub
                .matrix
                .as_complex()
                .sub(th.matrix.as_complex())
                .max_abs();
            assert!(
                diff < 1e-12,
                "entrywise gap {diff} at (m,t_y,k) = ({m},{t_y},{k_x})"
            );
        }
    }

    #[test]
    fn thermal_limits() {
        let rep = crate::clifford::build_gammas(1, 3).unwrap();
        // infinite temperature → ½·𝟙
        let hot = thermal_corr(&[0.3, -0.2, 0.9], 1e9, &rep).unwrap();
        let half_id = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        let diff = hot.matrix.as_complex().sub(&half_id).max_abs();
        assert!(diff < 1e-9);
        // zero temperature → projector onto the negative band
        let cold = thermal_corr(&[0.0, 0.0, 1.0], 0.0, &rep).unwrap();
        assert_eq!(cold.matrix.get(0, 0), C64::new(0.0, 0.0));
        assert_eq!(cold.matrix.get(1, 1), C64::new(1.0, 0.0));
        // rejected case
        assert!(thermal_corr(&[0.0, 0.0, 0.0], 0.0, &rep).is_err());
    }

    #[test]
    fn full_lattice_subsystem_is_pure() {
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let geom = LatticeGeometry::periodic_full(vec![4, 4]);
        let c = realspace_corr(&model, &geom).unwrap();
        for xi in c.eigenvalues().unwrap() {
            assert!(xi.abs() < 1e-10 || (xi - 1.0).abs() < 1e-10);
        }
        // half filling: trace = number of filled modes
        assert!((c.matrix.trace() - 16.0).abs() < 1e-10);
    }

    #[test]
    fn periodic_row_matches_momentum_blocks() {
        // small lattice: dense ED against the transverse-averaged blocks
        let l = 10usize;
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let geom = LatticeGeometry::new(
            vec![l, l],
            vec![Boundary::Periodic, Boundary::Periodic],
            line_sites(&[l, l], 0, &[3], l),
        )
        .unwrap();
        let c = realspace_corr(&model, &geom).unwrap();
        let mut ed = c.eigenvalues().unwrap();

        let spec = qwz_spec(l);
        let mut blocks = Vec::new();
        for i in 0..l {
            let k = 2.0 * PI * i as f64 / l as f64;
            let r = esh(&model, &spec, &[k]).unwrap();
            blocks.extend(corr_momentum(&r, model.rep()).eigenvalues().unwrap());
        }
        blocks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ed.iter().zip(&blocks) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn open_lattice_row_spectrum_interior() {
        let model = DiracModel::qwz(1.0, 1.0, 0.5);
        let geom = LatticeGeometry::new(
            vec![5, 10],
            vec![Boundary::Open, Boundary::Open],
            line_sites(&[5, 10], 0, &[5], 5),
        )
        .unwrap();
        let c = realspace_corr(&model, &geom).unwrap();
        assert_eq!(c.dim(), 10);
        for xi in c.eigenvalues().unwrap() {
            assert!(xi > 0.0 && xi < 1.0);
        }
    }

    #[test]
    fn zero_modes_make_filling_ambiguous() {
        // m = 2 QWZ on a periodic torus containing k = (0,0): exact zero
        // eigenvalues, so half filling is rejected
        let model = DiracModel::qwz(2.0, 1.0, 1.0);
        let geom = LatticeGeometry::periodic_full(vec![4, 4]);
        assert!(matches!(
            realspace_corr(&model, &geom),
            Err(CorrError::ZeroMode(_))
        ));
    }

    #[test]
    fn window_matches_dense_ed() {
        let (lx, ly, w) = (12usize, 12usize, 6usize);
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let window = window_corr(&model, 0, lx, w, &BzGrid::uniform(1, ly)).unwrap();

        let geom = LatticeGeometry::new(
            vec![lx, ly],
            vec![Boundary::Periodic, Boundary::Periodic],
            line_sites(&[lx, ly], 0, &[0], w),
        )
        .unwrap();
        let dense = realspace_corr(&model, &geom).unwrap();
        let diff = window
            .matrix
            .as_complex()
            .sub(dense.matrix.as_complex())
            .max_abs();
        assert!(diff < 1e-10, "window vs dense ED: {diff}");
    }

    #[test]
    fn row_blocks_ed_match_transverse_average() {
        let (lx, ly) = (8usize, 40usize);
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let blocks = row_corr_blocks_ed(&model, 0, lx, ly).unwrap();
        let spec = SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, ly)).unwrap();
        for (i, block) in blocks.iter().enumerate() {
            let k = 2.0 * PI * i as f64 / lx as f64;
            let r = esh(&model, &spec, &[k]).unwrap();
            let reference = corr_momentum(&r, model.rep());
            let diff = block
                .matrix
                .as_complex()
                .sub(reference.matrix.as_complex())
                .max_abs();
            assert!(diff < 1e-10, "block {i}: {diff}");
        }
    }

    #[test]
    fn variance_identities() {
        let rep = crate::clifford::build_gammas(1, 3).unwrap();
        // C = ½·𝟙 on M = 2 modes → M/4
        let half = thermal_corr(&[0.0, 0.0, 0.0], 1e9, &rep).unwrap();
        assert!((particle_variance(&half) - 0.5).abs() < 1e-14);
        // projector → 0
        let proj = thermal_corr(&[0.0, 0.0, 1.0], 0.0, &rep).unwrap();
        assert!(particle_variance(&proj).abs() < 1e-14);
    }

    #[test]
    fn variance_matches_eigenvalue_sum() {
        let model = DiracModel::qwz(0.7, 1.0, 0.5);
        let r = esh(&model, &qwz_spec(256), &[1.1]).unwrap();
        let c = corr_momentum(&r, model.rep());
        let direct = particle_variance(&c);
        let from_eig: f64 = c.eigenvalues().unwrap().iter().map(|x| x * (1.0 - x)).sum();
        assert!((direct - from_eig).abs() < 1e-12);
        assert!(direct >= 0.0);
    }

    #[test]
    fn entanglement_hamiltonian_logit() {
        let rep = crate::clifford::build_gammas(1, 3).unwrap();
        // ξ = n_F(E;T) → H_E eigenvalue E/T
        let (d, t) = ([0.3, -0.1, 0.7], 0.8);
        let c = thermal_corr(&d, t, &rep).unwrap();
        let he = entanglement_hamiltonian(&c).unwrap();
        let eig = hermitian_eigh(&he).unwrap();
        let e = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((eig.eigenvalues[0] + e / t).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - e / t).abs() < 1e-12);

        // C = ½·𝟙 → H_E = 0
        let half = thermal_corr(&[0.0, 0.0, 0.0], 1e9, &rep).unwrap();
        let he0 = entanglement_hamiltonian(&half).unwrap();
        assert!(he0.as_complex().max_abs() < 1e-12);

        // boundary rejection
        let proj = thermal_corr(&[0.0, 0.0, 1.0], 0.0, &rep).unwrap();
        assert!(entanglement_hamiltonian(&proj).is_err());
    }

    #[test]
    fn entanglement_hamiltonian_composes_with_esh() {
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let r = esh(&model, &qwz_spec(512), &[0.8]).unwrap();
        let c = corr_momentum(&r, model.rep());
        let he = entanglement_hamiltonian(&c).unwrap();
        let eig = hermitian_eigh(&he).unwrap();
        let beta_e = r.d_norm() / r.temperature;
        assert!((eig.eigenvalues[0] + beta_e).abs() < 1e-10);
        assert!((eig.eigenvalues[1] - beta_e).abs() < 1e-10);
    }

    #[test]
    fn time_corr_at_zero_is_static() {
        let model = DiracModel::qwz(1.4, 1.0, 1.0);
        let spec = qwz_spec(256);
        let r = esh(&model, &spec, &[0.7]).unwrap();
        let static_block = corr_momentum(&r, model.rep());
        let tc = time_corr(&model, &spec, &[0.7], 0.0).unwrap();
        let diff = tc.matrix.sub(static_block.matrix.as_complex()).max_abs();
        assert!(diff < 1e-14, "t = 0 gap {diff}");
    }

    #[test]
    fn flat_fiber_pure_phase() {
        // m = 1, k_x = 0: |d| = t_y on the whole fiber
        let t_y = 0.7;
        let model = DiracModel::qwz(1.0, 1.0, t_y);
        let spec = qwz_spec(256);
        let t = 3.3;
        let c0 = time_corr(&model, &spec, &[0.0], 0.0).unwrap();
        let ct = time_corr(&model, &spec, &[0.0], t).unwrap();
        let expect = c0.matrix.scale(C64::from_polar(1.0, t_y * t));
        let diff = ct.matrix.sub(&expect).max_abs();
        assert!(diff < 1e-12, "phase law gap {diff}");
    }

    #[test]
    fn long_time_departure_from_thermal() {
        let model = DiracModel::qwz(1.4, 1.0, 1.0);
        let spec = qwz_spec(512);
        let k = 0.9;
        let r = esh(&model, &spec, &[k]).unwrap();
        let th = thermal_corr(&r.d, r.temperature, model.rep()).unwrap();

        // transverse bandwidth on the fiber
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..512 {
            let ky = 2.0 * PI * i as f64 / 512.0;
            let e = model.d_norm(&[k, ky]);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        let t = 5.0 / (hi - lo);

        let frob = |m: &ComplexMatrix| m.frobenius_norm();
        let d0 = frob(
            &time_corr(&model, &spec, &[k], 0.0)
                .unwrap()
                .matrix
                .sub(th.matrix.as_complex()),
        );
        let dt = frob(
            &time_corr(&model, &spec, &[k], t)
                .unwrap()
                .matrix
                .sub(th.matrix.as_complex()),
        );
        assert!(dt > 10.0 * d0, "departure {dt} vs static {d0}");
        assert!(dt > 0.05, "departure should be of order one, got {dt}");
    }
}
