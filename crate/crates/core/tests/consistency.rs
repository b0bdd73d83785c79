//! Cross-route consistency: dense real-space diagonalization, the
//! per-momentum transverse-chain route, and the analytic momentum-space
//! blocks must describe the same subsystem.

use std::f64::consts::PI;

use subtherm::correlations::{
    corr_momentum, particle_variance, realspace_corr, row_corr_blocks_ed,
};
use subtherm::entmap::{esh, SubsystemSpec};
use subtherm::models::{line_sites, Boundary, DiracModel, LatticeGeometry};
use subtherm::numerics::BzGrid;

fn qwz_spec(l: usize) -> SubsystemSpec {
    SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, l)).unwrap()
}

/// Dense ED of the L×L torus equals the transverse-chain ED blocks.
#[test]
fn dense_ed_equals_chain_blocks() {
    for l in [8usize, 16] {
        let model = DiracModel::qwz(1.4, 1.0, 0.5);
        let geom = LatticeGeometry::new(
            vec![l, l],
            vec![Boundary::Periodic, Boundary::Periodic],
            line_sites(&[l, l], 0, &[l / 2], l),
        )
        .unwrap();
        let dense = realspace_corr(&model, &geom).unwrap();
        let mut dense_eigs = dense.eigenvalues().unwrap();
        dense_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let blocks = row_corr_blocks_ed(&model, 0, l, l).unwrap();
        let mut block_eigs: Vec<f64> = blocks
            .iter()
            .flat_map(|b| b.eigenvalues().unwrap())
            .collect();
        block_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for (a, b) in dense_eigs.iter().zip(&block_eigs) {
            assert!((a - b).abs() < 1e-10, "L = {l}: {a} vs {b}");
        }
    }
}

/// Finite transverse size converges to the momentum-space spectra with a
/// monotonically shrinking gap through L = 8, 16, 32, 64.
#[test]
fn transverse_convergence_is_monotone() {
    let model = DiracModel::qwz(1.4, 1.0, 0.5);
    let converged = qwz_spec(512);
    let mut last = f64::INFINITY;
    for l in [8usize, 16, 32, 64] {
        let blocks = row_corr_blocks_ed(&model, 0, l, l).unwrap();
        let mut worst = 0.0f64;
        for (i, block) in blocks.iter().enumerate() {
            let k = 2.0 * PI * i as f64 / l as f64;
            let reference = corr_momentum(&esh(&model, &converged, &[k]).unwrap(), model.rep());
            let a = block.eigenvalues().unwrap();
            let b = reference.eigenvalues().unwrap();
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
        assert!(worst < last, "distance {worst} did not shrink at L = {l}");
        last = worst;
    }
    assert!(
        last < 1e-3,
        "L = 64 should be close to converged, got {last}"
    );
}

/// The 40×40 torus row: numerically diagonalized transverse chains match
/// the analytic transverse-averaged blocks at the matched grid.
#[test]
fn torus_40_row_spectra_match_momentum_space() {
    let model = DiracModel::qwz(1.4, 1.0, 0.5);
    let l = 40usize;
    let blocks = row_corr_blocks_ed(&model, 0, l, l).unwrap();
    let spec = qwz_spec(l);
    let mut worst = 0.0f64;
    for (i, block) in blocks.iter().enumerate() {
        let k = 2.0 * PI * i as f64 / l as f64;
        let reference = corr_momentum(&esh(&model, &spec, &[k]).unwrap(), model.rep());
        let a = block.eigenvalues().unwrap();
        let b = reference.eigenvalues().unwrap();
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    assert!(worst < 1e-8, "max spectral deviation {worst}");
}

/// ΔN² of the 64-site chain: analytic eigenvalue formula, momentum-block
/// eigenvalues, and the 64×64 transverse-chain ED value agree.
#[test]
fn variance_routes_agree_at_64() {
    let model = DiracModel::qwz(1.0, 1.0, 0.5);
    let l = 64usize;
    let spec = qwz_spec(l);

    let mut analytic = 0.0;
    let mut from_blocks = 0.0;
    for i in 0..l {
        let k = 2.0 * PI * i as f64 / l as f64;
        let r = esh(&model, &spec, &[k]).unwrap();
        let x = r.f_factor * r.d_norm();
        analytic += 0.5 * (1.0 - x * x);
        from_blocks += particle_variance(&corr_momentum(&r, model.rep()));
    }
    assert!((analytic - from_blocks).abs() < 1e-12);

    let ed: f64 = row_corr_blocks_ed(&model, 0, l, l)
        .unwrap()
        .iter()
        .map(particle_variance)
        .sum();
    assert!(
        (analytic - ed).abs() < 1e-6,
        "analytic {analytic} vs ED {ed}"
    );
}

/// Variance additivity: the full-ring subsystem variance equals the sum
/// of per-momentum block variances (dense route, small torus).
#[test]
fn variance_additivity_over_blocks() {
    let l = 10usize;
    let model = DiracModel::qwz(0.7, 1.0, 0.5);
    let geom = LatticeGeometry::new(
        vec![l, l],
        vec![Boundary::Periodic, Boundary::Periodic],
        line_sites(&[l, l], 0, &[0], l),
    )
    .unwrap();
    let dense = realspace_corr(&model, &geom).unwrap();
    let total = particle_variance(&dense);

    let spec = qwz_spec(l);
    let mut blocks = 0.0;
    for i in 0..l {
        let k = 2.0 * PI * i as f64 / l as f64;
        blocks += particle_variance(&corr_momentum(
            &esh(&model, &spec, &[k]).unwrap(),
            model.rep(),
        ));
    }
    assert!((total - blocks).abs() < 1e-9, "{total} vs {blocks}");
}
