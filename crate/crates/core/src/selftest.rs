//! Deterministic invariant suite behind the `selftest` CLI command:
//! Clifford algebra closure, eigensolver reconstruction, correlation
//! spectrum bounds, the particle-variance identity, and grid-refinement
//! stability of the topological invariant. Random inputs are seeded.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::build_gammas;
use crate::correlations::{corr_momentum, particle_variance, realspace_corr};
use crate::entmap::{esh, SubsystemSpec};
use crate::models::{DiracModel, LatticeGeometry};
use crate::numerics::{
    hermitian_eigh, orthonormality_error, reconstruction_error, BzGrid, HermitianMatrix,
};
use crate::topo::invariant_nu_raw;

/// One pass/fail line of the suite.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let mut m = HermitianMatrix::zeros(n);
    for i in 0..n {
        m.set_pair(i, i, C64::new(rng.gen_range(-1.0..1.0), 0.0));
        for j in (i + 1)..n {
            m.set_pair(
                i,
                j,
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    m
}

fn clifford_algebra() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        let rep = build_gammas(n, 2 * n + 1).expect("representation exists");
        worst = worst.max(rep.algebra_defect());
    }
    CheckResult {
        name: "clifford-algebra",
        passed: worst < 1e-12,
        detail: format!("max anticommutator defect {worst:.3e} over n = 1..3"),
    }
}

fn eigensolver_reconstruction() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for &n in &[4usize, 16, 64, 160] {
        let a = random_hermitian(n, &mut rng);
        match hermitian_eigh(&a) {
            Ok(eig) => {
                let scale = a.frobenius_norm().max(1.0);
                worst = worst.max(reconstruction_error(&a, &eig) / scale);
                worst = worst.max(orthonormality_error(&eig));
                let tr: f64 = eig.eigenvalues.iter().sum();
                worst = worst.max((tr - a.trace()).abs() / (n as f64 * scale));
            }
            Err(e) => {
                return CheckResult {
                    name: "eigensolver-reconstruction",
                    passed: false,
                    detail: format!("solver failed at dim {n}: {e}"),
                }
            }
        }
    }
    CheckResult {
        name: "eigensolver-reconstruction",
        passed: worst < 1e-10,
        detail: format!("max relative residual {worst:.3e} over dims 4..160"),
    }
}

fn correlation_bounds() -> CheckResult {
    let mut worst = 0.0f64;
    // momentum blocks over a parameter sample
    for (m, t_y) in [(0.5, 0.2), (1.0, 1.0), (1.4, 0.5), (2.5, 1.0)] {
        let model = DiracModel::qwz(m, 1.0, t_y);
        let spec = SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, 128)).unwrap();
        for i in 0..16 {
            let k = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            let r = esh(&model, &spec, &[k]).unwrap();
            let c = corr_momentum(&r, model.rep());
            worst = worst.max(c.bounds_defect().unwrap());
        }
    }
    // real-space subsystem
    let model = DiracModel::qwz(1.4, 1.0, 0.5);
    let geom = LatticeGeometry::new(
        vec![6, 6],
        vec![crate::models::Boundary::Open, crate::models::Boundary::Open],
        crate::models::line_sites(&[6, 6], 0, &[3], 6),
    )
    .unwrap();
    let c = realspace_corr(&model, &geom).unwrap();
    worst = worst.max(c.bounds_defect().unwrap());
    CheckResult {
        name: "correlation-bounds",
        passed: worst < 1e-10,
        detail: format!("max excursion of ξ outside [0,1]: {worst:.3e}"),
    }
}

fn variance_identity() -> CheckResult {
    let mut worst = 0.0f64;
    let mut min_var = f64::INFINITY;
    for (m, t_y, k) in [(0.5, 0.3, 0.7), (1.0, 1.0, 0.0), (1.4, 0.5, 2.1)] {
        let model = DiracModel::qwz(m, 1.0, t_y);
        let spec = SubsystemSpec::new(2, vec![0], BzGrid::uniform(1, 128)).unwrap();
        let r = esh(&model, &spec, &[k]).unwrap();
        let c = corr_momentum(&r, model.rep());
        let direct = particle_variance(&c);
        let from_eig: f64 = c.eigenvalues().unwrap().iter().map(|x| x * (1.0 - x)).sum();
        worst = worst.max((direct - from_eig).abs());
        min_var = min_var.min(direct);
    }
    CheckResult {
        name: "variance-identity",
        passed: worst < 1e-12 && min_var >= 0.0,
        detail: format!("max |Tr C(1−C) − Σξ(1−ξ)| = {worst:.3e}, min ΔN² = {min_var:.3e}"),
    }
}

fn invariant_stability() -> CheckResult {
    let model = DiracModel::qwz(1.0, 1.0, 1.0);
    let field = |k: &[f64], out: &mut [f64]| model.d_into(k, out);
    let (a, _) = invariant_nu_raw(&field, 2, 100);
    let (b, _) = invariant_nu_raw(&field, 2, 200);
    let drift2 = (a - b).abs();
    let circle = |k: &[f64], out: &mut [f64]| {
        out[0] = k[0].cos();
        out[1] = k[0].sin();
    };
    let (c, _) = invariant_nu_raw(&circle, 1, 400);
    let (d, _) = invariant_nu_raw(&circle, 1, 800);
    let drift1 = (c - d).abs();
    let worst = drift1.max(drift2);
    CheckResult {
        name: "invariant-grid-stability",
        passed: worst < 0.01,
        detail: format!("max ν drift under grid doubling {worst:.3e}"),
    }
}

/// Runs the whole suite in a fixed order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        clifford_algebra(),
        eigensolver_reconstruction(),
        correlation_bounds(),
        variance_identity(),
        invariant_stability(),
    ]
}
