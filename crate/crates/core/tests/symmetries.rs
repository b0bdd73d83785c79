//! Discrete-symmetry verdicts of the model zoo and of the dimensional
//! hierarchy of effective subsystem Hamiltonians.
//!
//! The d-dimensional descendant of the 4D model uses only the first
//! d + 1 Γ matrices; probing it with the canonical operators in its
//! minimal representation reproduces the first-generation class sequence
//! AII → DIII → D → BDI → AI as the dimension drops.

use subtherm::clifford::{
    build_gammas, check_symmetry, chiral_4x4, class_label, particle_hole_4x4, pauli_op,
    time_reversal_4x4, SymmetryKind, SymmetryOp,
};
use subtherm::entmap::{default_transverse, PerpAverager};
use subtherm::models::DiracModel;
use subtherm::numerics::{BzGrid, ComplexMatrix};

/// d-vector of the d_s-dimensional descendant at one momentum (mass
/// first), with the transverse mass shift included.
fn descendant_d(m: f64, k_s: &[f64], avg: Option<&PerpAverager>) -> Vec<f64> {
    let mass: f64 = m - k_s.iter().map(|k| k.cos()).sum::<f64>();
    let shift = avg.map_or(0.0, |a| {
        a.average(mass, k_s.iter().map(|k| k.sin().powi(2)).sum())
            .delta_m
    });
    let mut d = vec![mass - shift];
    d.extend(k_s.iter().map(|k| k.sin()));
    d
}

#[test]
fn qh4d_time_reversal_holds() {
    let model = DiracModel::qh4d(1.0);
    let grid = BzGrid::uniform(4, 4);
    let t = time_reversal_4x4();
    let check = check_symmetry(|k| model.bloch(k), &grid, &t).unwrap();
    assert!(check.passes, "violation {}", check.max_violation);
    assert_eq!(t.square_sign(), Some(-1));

    // but neither particle-hole nor chiral: sin k_4 Γ^4 breaks both
    let p = particle_hole_4x4();
    assert!(
        !check_symmetry(|k| model.bloch(k), &grid, &p)
            .unwrap()
            .passes
    );
    let c = chiral_4x4();
    assert!(
        !check_symmetry(|k| model.bloch(k), &grid, &c)
            .unwrap()
            .passes
    );
}

#[test]
fn esh_3d_gains_particle_hole_and_chiral() {
    let m = 1.5;
    let rep = build_gammas(2, 5).unwrap();
    let transverse = default_transverse(1);
    let avg = PerpAverager::unit_hopping(&transverse);
    let h = |k: &[f64]| rep.contract(&descendant_d(m, k, Some(&avg)));
    let grid = BzGrid::uniform(3, 4);

    let t = check_symmetry(h, &grid, &time_reversal_4x4()).unwrap();
    let p = check_symmetry(h, &grid, &particle_hole_4x4()).unwrap();
    let c = check_symmetry(h, &grid, &chiral_4x4()).unwrap();
    assert!(t.passes, "TRS violation {}", t.max_violation);
    assert!(p.passes, "PHS violation {}", p.max_violation);
    assert!(c.passes, "chiral violation {}", c.max_violation);

    let label = class_label(
        time_reversal_4x4().square_sign().unwrap(),
        particle_hole_4x4().square_sign().unwrap(),
        true,
    );
    assert_eq!(label, Some("DIII"));
}

#[test]
fn esh_2d_class_d_in_minimal_representation() {
    // two traced axes; minimal 2×2 carrier with (s1, s2, mass)·(σx, σy, σz)
    let m = 1.5;
    let rep = build_gammas(1, 3).unwrap();
    let transverse = BzGrid::uniform(2, 16);
    let avg = PerpAverager::unit_hopping(&transverse);
    let h = |k: &[f64]| {
        let d = descendant_d(m, k, Some(&avg));
        rep.contract(&[d[1], d[2], d[0]])
    };
    let grid = BzGrid::uniform(2, 4);

    // particle-hole σ_x𝒦 with square +1
    let p = pauli_op(SymmetryKind::ParticleHole, 1);
    assert!(check_symmetry(h, &grid, &p).unwrap().passes);
    assert_eq!(p.square_sign(), Some(1));
    // no time reversal among the Pauli-type candidates, no chiral
    for mu in 0..=3 {
        let t = pauli_op(SymmetryKind::TimeReversal, mu);
        assert!(
            !check_symmetry(h, &grid, &t).unwrap().passes,
            "TRS candidate σ_{mu}"
        );
    }
    for mu in 1..=3 {
        let c = pauli_op(SymmetryKind::Chiral, mu);
        assert!(!check_symmetry(h, &grid, &c).unwrap().passes);
    }
    assert_eq!(class_label(0, 1, false), Some("D"));
}

#[test]
fn esh_1d_class_bdi_in_minimal_representation() {
    let m = 0.5;
    let rep = build_gammas(1, 3).unwrap();
    let transverse = BzGrid::uniform(3, 8);
    let avg = PerpAverager::unit_hopping(&transverse);
    let h = |k: &[f64]| {
        let d = descendant_d(m, k, Some(&avg));
        rep.contract(&[d[1], 0.0, d[0]])
    };
    let grid = BzGrid::uniform(1, 6);

    let t = pauli_op(SymmetryKind::TimeReversal, 3); // σ_z𝒦
    let p = pauli_op(SymmetryKind::ParticleHole, 1); // σ_x𝒦
    let c = pauli_op(SymmetryKind::Chiral, 2); // σ_y
    assert!(check_symmetry(&h, &grid, &t).unwrap().passes);
    assert!(check_symmetry(&h, &grid, &p).unwrap().passes);
    assert!(check_symmetry(&h, &grid, &c).unwrap().passes);
    assert_eq!(t.square_sign(), Some(1));
    assert_eq!(p.square_sign(), Some(1));
    assert_eq!(class_label(1, 1, true), Some("BDI"));
}

#[test]
fn esh_0d_class_ai_in_minimal_representation() {
    // single momentum, single mass component on the 1×1 carrier
    let m = 0.5;
    let rep = build_gammas(0, 1).unwrap();
    let transverse = BzGrid::uniform(4, 8);
    let avg = PerpAverager::unit_hopping(&transverse);
    let h = |_k: &[f64]| rep.contract(&descendant_d(m, &[], Some(&avg))[..1]);
    let grid = BzGrid::uniform(0, 1);

    let id = ComplexMatrix::identity(1);
    let t = SymmetryOp::new(SymmetryKind::TimeReversal, id.clone()).unwrap();
    assert!(check_symmetry(&h, &grid, &t).unwrap().passes);
    assert_eq!(t.square_sign(), Some(1));
    // a 1×1 unitary is a phase: it can never flip the sign of a finite mass
    let p = SymmetryOp::new(SymmetryKind::ParticleHole, id.clone()).unwrap();
    assert!(!check_symmetry(&h, &grid, &p).unwrap().passes);
    let c = SymmetryOp::new(SymmetryKind::Chiral, id).unwrap();
    assert!(!check_symmetry(&h, &grid, &c).unwrap().passes);
    assert_eq!(class_label(1, 0, false), Some("AI"));
}

#[test]
fn qwz_has_no_chiral_symmetry() {
    let model = DiracModel::qwz(1.0, 1.0, 1.0);
    let grid = BzGrid::uniform(2, 6);
    let c = pauli_op(SymmetryKind::Chiral, 3); // σ_z mass term survives conjugation
    let check = check_symmetry(|k| model.bloch(k), &grid, &c).unwrap();
    assert!(!check.passes);
    assert!(check.max_violation > 0.5);
}

#[test]
fn wti_chiral_symmetry_holds() {
    let model = DiracModel::wti(1.0, 4.0, 1.0);
    let grid = BzGrid::uniform(2, 6);
    let c = pauli_op(SymmetryKind::Chiral, 3);
    let check = check_symmetry(|k| model.bloch(k), &grid, &c).unwrap();
    assert!(check.passes, "violation {}", check.max_violation);
}

#[test]
fn symmetry_check_needs_even_grid() {
    let model = DiracModel::qwz(1.0, 1.0, 1.0);
    let grid = BzGrid::uniform(2, 5);
    let t = pauli_op(SymmetryKind::TimeReversal, 3);
    assert!(check_symmetry(|k| model.bloch(k), &grid, &t).is_err());
}

/// The descendant family's symmetry pattern reproduces the
/// first-generation class column as the subsystem dimension drops.
#[test]
fn descendant_class_sequence() {
    let expected = ["AI", "BDI", "D", "DIII", "AII"];
    // verdicts assembled from the individual operator tests above
    let verdicts: [(i8, i8, bool); 5] = [
        (1, 0, false),  // 0D
        (1, 1, true),   // 1D
        (0, 1, false),  // 2D
        (-1, 1, true),  // 3D
        (-1, 0, false), // 4D
    ];
    for (d, (trs, phs, chiral)) in verdicts.into_iter().enumerate() {
        assert_eq!(
            class_label(trs, phs, chiral),
            Some(expected[d]),
            "dimension {d}"
        );
    }
}
