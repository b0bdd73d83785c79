//! Clifford (Γ) matrix representations and discrete symmetry operators.
//!
//! A rank-N representation is a set of mutually anticommuting Hermitian
//! unitaries {Γ^μ, Γ^ν} = 2δ^{μν}𝟙 of dimension 2ⁿ, which requires
//! N ≤ 2n+1. The n = 1 representation is the Pauli triple and the
//! n = 2, N = 5 representation is the τ⊗σ basis
//! (τ_z⊗σ_0, τ_y⊗σ_x, τ_y⊗σ_y, τ_y⊗σ_z, τ_x⊗σ_0); higher ranks are
//! generated recursively from it.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{BzGrid, ComplexMatrix, HermitianMatrix};

#[derive(Debug, Error)]
pub enum CliffordError {
    #[error(
        "no {requested}-element Clifford representation in dimension 2^{n}: N must be ≤ {max}"
    )]
    TooManyGammas {
        requested: usize,
        n: usize,
        max: usize,
    },
    #[error("symmetry operator must be unitary: defect {0:.3e}")]
    NotUnitary(f64),
    #[error("symmetry check needs an even number of points per axis so that −k stays on the grid; axis {axis} has {points}")]
    OddGrid { axis: usize, points: usize },
}

/// 2ⁿ-dimensional representation of N anticommuting Hermitian unitaries.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    n: usize,
    gammas: Vec<HermitianMatrix>,
}

impl CliffordRep {
    pub fn half_log_dim(&self) -> usize {
        self.n
    }

    pub fn matrix_dim(&self) -> usize {
        1 << self.n
    }

    pub fn count(&self) -> usize {
        self.gammas.len()
    }

    pub fn gamma(&self, mu: usize) -> &HermitianMatrix {
        &self.gammas[mu]
    }

    pub fn gammas(&self) -> &[HermitianMatrix] {
        &self.gammas
    }

    /// Σ_μ d_μ Γ^μ.
    pub fn contract(&self, d: &[f64]) -> HermitianMatrix {
        assert!(
            d.len() <= self.gammas.len(),
            "more components than Γ matrices"
        );
        let mut h = HermitianMatrix::zeros(self.matrix_dim());
        for (c, g) in d.iter().zip(&self.gammas) {
            h.axpy(*c, g);
        }
        h
    }

    /// max entry of {Γ^μ, Γ^ν} − 2δ^{μν}𝟙 over all pairs.
    pub fn algebra_defect(&self) -> f64 {
        let dim = self.matrix_dim();
        let mut worst = 0.0f64;
        for (mu, ga) in self.gammas.iter().enumerate() {
            for (nu, gb) in self.gammas.iter().enumerate() {
                let ab = ga.as_complex().mul(gb.as_complex());
                let ba = gb.as_complex().mul(ga.as_complex());
                let mut anti = ab.add(&ba);
                if mu == nu {
                    let id = ComplexMatrix::identity(dim).scale(C64::new(2.0, 0.0));
                    anti = anti.sub(&id);
                }
                worst = worst.max(anti.max_abs());
            }
        }
        worst
    }
}

fn pauli() -> [HermitianMatrix; 3] {
    let mut sx = HermitianMatrix::zeros(2);
    sx.set_pair(0, 1, C64::new(1.0, 0.0));
    let mut sy = HermitianMatrix::zeros(2);
    sy.set_pair(0, 1, C64::new(0.0, -1.0));
    let mut sz = HermitianMatrix::zeros(2);
    sz.set_pair(0, 0, C64::new(1.0, 0.0));
    sz.set_pair(1, 1, C64::new(-1.0, 0.0));
    [sx, sy, sz]
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for ia in 0..na {
        for ja in 0..na {
            let av = a.get(ia, ja);
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..nb {
                for jb in 0..nb {
                    out.set(ia * nb + ib, ja * nb + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    out
}

fn kron_h(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_entries(
        a.dim() * b.dim(),
        kron(a.as_complex(), b.as_complex()).data().to_vec(),
    )
    .expect("Kronecker product of Hermitian factors is Hermitian")
}

/// Builds the first `n_gammas` matrices of the 2ⁿ-dimensional representation.
pub fn build_gammas(n: usize, n_gammas: usize) -> Result<CliffordRep, CliffordError> {
    let max = 2 * n + 1;
    if n_gammas > max {
        return Err(CliffordError::TooManyGammas {
            requested: n_gammas,
            n,
            max,
        });
    }
    let full = full_rep(n);
    Ok(CliffordRep {
        n,
        gammas: full.into_iter().take(n_gammas).collect(),
    })
}

fn full_rep(n: usize) -> Vec<HermitianMatrix> {
    match n {
        0 => vec![HermitianMatrix::identity(1)],
        1 => pauli().to_vec(),
        2 => {
            let [sx, sy, sz] = pauli();
            let s0 = HermitianMatrix::identity(2);
            let [tx, ty, tz] = pauli();
            vec![
                kron_h(&tz, &s0),
                kron_h(&ty, &sx),
                kron_h(&ty, &sy),
                kron_h(&ty, &sz),
                kron_h(&tx, &s0),
            ]
        }
        _ => {
            // Γ'^0 = τ_z⊗1, Γ'^{i+1} = τ_y⊗Γ^i, Γ'^{2n+2} = τ_x⊗1
            let prev = full_rep(n - 1);
            let id = HermitianMatrix::identity(1 << (n - 1));
            let [tx, ty, tz] = pauli();
            let mut out = Vec::with_capacity(2 * n + 1);
            out.push(kron_h(&tz, &id));
            for g in &prev {
                out.push(kron_h(&ty, g));
            }
            out.push(kron_h(&tx, &id));
            out
        }
    }
}

/// Discrete symmetry type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    /// U H(k)* U† = H(−k)
    TimeReversal,
    /// U H(k)* U† = −H(−k)
    ParticleHole,
    /// U H(k) U† = −H(k)
    Chiral,
}

/// Symmetry operator: unitary part plus an antiunitarity flag (complex
/// conjugation 𝒦 for time reversal and particle-hole).
#[derive(Clone, Debug)]
pub struct SymmetryOp {
    pub kind: SymmetryKind,
    unitary: ComplexMatrix,
}

impl SymmetryOp {
    pub fn new(kind: SymmetryKind, unitary: ComplexMatrix) -> Result<Self, CliffordError> {
        let defect = unitary.unitarity_defect();
        if defect > 1e-12 {
            return Err(CliffordError::NotUnitary(defect));
        }
        Ok(Self { kind, unitary })
    }

    pub fn antiunitary(&self) -> bool {
        matches!(
            self.kind,
            SymmetryKind::TimeReversal | SymmetryKind::ParticleHole
        )
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// Sign of (U𝒦)² = U U* for antiunitary operators; `None` for chiral
    /// or when U U* is not ±𝟙.
    pub fn square_sign(&self) -> Option<i8> {
        if !self.antiunitary() {
            return None;
        }
        let sq = self.unitary.mul(&self.unitary.conjugate());
        let n = sq.dim();
        for sign in [1.0f64, -1.0] {
            let mut ok = true;
            'outer: for i in 0..n {
                for j in 0..n {
                    let expect = if i == j {
                        C64::new(sign, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    if (sq.get(i, j) - expect).norm() > 1e-10 {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                return Some(sign as i8);
            }
        }
        None
    }
}

/// Outcome of a symmetry check over the Brillouin zone.
#[derive(Clone, Copy, Debug)]
pub struct SymmetryCheck {
    pub passes: bool,
    pub max_violation: f64,
}

const SYMMETRY_TOL: f64 = 1e-10;

/// Verifies the defining relation of `op` for the Bloch map `h` on every
/// grid momentum. The grid must have an even number of points per axis.
pub fn check_symmetry<F>(
    h: F,
    grid: &BzGrid,
    op: &SymmetryOp,
) -> Result<SymmetryCheck, CliffordError>
where
    F: Fn(&[f64]) -> HermitianMatrix,
{
    for (axis, &l) in grid.sizes().iter().enumerate() {
        if l % 2 != 0 {
            return Err(CliffordError::OddGrid { axis, points: l });
        }
    }
    let u = &op.unitary;
    let udag = u.adjoint();
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    let dims = grid.dims();
    let mut k = vec![0.0; dims];
    let mut minus_k = vec![0.0; dims];
    for flat in 0..grid.len() {
        grid.momentum_into(flat, &mut k);
        for (mk, &ki) in minus_k.iter_mut().zip(&k) {
            *mk = if ki == 0.0 {
                0.0
            } else {
                2.0 * std::f64::consts::PI - ki
            };
        }
        let hk = h(&k);
        scale = scale.max(hk.as_complex().max_abs());
        let transformed = match op.kind {
            SymmetryKind::TimeReversal | SymmetryKind::ParticleHole => {
                u.mul(&hk.as_complex().conjugate()).mul(&udag)
            }
            SymmetryKind::Chiral => u.mul(hk.as_complex()).mul(&udag),
        };
        let reference = match op.kind {
            SymmetryKind::TimeReversal => h(&minus_k).into_complex(),
            SymmetryKind::ParticleHole => h(&minus_k).into_complex().scale(C64::new(-1.0, 0.0)),
            SymmetryKind::Chiral => hk.into_complex().scale(C64::new(-1.0, 0.0)),
        };
        worst = worst.max(transformed.sub(&reference).max_abs());
    }
    Ok(SymmetryCheck {
        passes: worst <= SYMMETRY_TOL * scale,
        max_violation: worst,
    })
}

/// Tenfold-way label from the (TRS sign, PHS sign, chiral) presence triple.
/// Signs are −1, 0 (absent), +1.
pub fn class_label(trs: i8, phs: i8, chiral: bool) -> Option<&'static str> {
    match (trs, phs, chiral) {
        (0, 0, false) => Some("A"),
        (0, 0, true) => Some("AIII"),
        (1, 0, false) => Some("AI"),
        (1, 1, true) => Some("BDI"),
        (0, 1, false) => Some("D"),
        (-1, 1, true) => Some("DIII"),
        (-1, 0, false) => Some("AII"),
        (-1, -1, true) => Some("CII"),
        (0, -1, false) => Some("C"),
        (1, -1, true) => Some("CI"),
        _ => None,
    }
}

/// The τ⊗σ-basis time-reversal operator iτ_z⊗σ_y 𝒦.
pub fn time_reversal_4x4() -> SymmetryOp {
    let [_, sy, sz] = pauli();
    let u = kron(sz.as_complex(), sy.as_complex()).scale(C64::new(0.0, 1.0));
    SymmetryOp::new(SymmetryKind::TimeReversal, u).unwrap()
}

/// The τ⊗σ-basis particle-hole operator τ_y⊗σ_y 𝒦.
pub fn particle_hole_4x4() -> SymmetryOp {
    let [_, sy, _] = pauli();
    let u = kron(sy.as_complex(), sy.as_complex());
    SymmetryOp::new(SymmetryKind::ParticleHole, u).unwrap()
}

/// The τ⊗σ-basis chiral operator τ_x⊗σ_0.
pub fn chiral_4x4() -> SymmetryOp {
    let [sx, _, _] = pauli();
    let id = ComplexMatrix::identity(2);
    let u = kron(sx.as_complex(), &id);
    SymmetryOp::new(SymmetryKind::Chiral, u).unwrap()
}

/// Pauli-basis symmetry operator σ_μ (μ = 0 for the identity) with the
/// given kind; convenience for two-band models.
pub fn pauli_op(kind: SymmetryKind, mu: usize) -> SymmetryOp {
    let u = match mu {
        0 => ComplexMatrix::identity(2),
        1..=3 => pauli()[mu - 1].as_complex().clone(),
        _ => panic!("Pauli index must be 0..=3"),
    };
    SymmetryOp::new(kind, u).unwrap()
}
