//! Model zoo: Dirac d-vector maps over a Brillouin zone (or cutoff
//! continuum) together with their Clifford representation, plus finite
//! real-space Hamiltonians.
//!
//! Lattice models are stored as harmonic coefficient tables
//! d_μ(k) = onsite_μ + Σ_t [c_t cos(r_t k_{a_t}) + s_t sin(r_t k_{a_t})],
//! which every nearest-neighbor model in the zoo fits. The same table
//! drives both Bloch evaluation and the analytic inverse Fourier
//! transform to real-space hoppings (cos → symmetric hop, sin →
//! antisymmetric·i, constant → on-site), so no numerical FFT enters.
//! The table also serves as the hook for user-defined d-vectors,
//! including longer-range harmonics.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Deserialize;
use thiserror::Error;

use crate::clifford::{build_gammas, CliffordRep};
use crate::numerics::{BzGrid, HermitianMatrix};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("continuum Dirac model needs a finite mass |m| > 0")]
    MasslessContinuum,
    #[error("continuum cutoff must be positive, got {0}")]
    BadCutoff(f64),
    #[error("operation requires a lattice model; `{0}` is a continuum model")]
    NotLattice(String),
    #[error("harmonic term refers to component {comp} or axis {axis} out of range")]
    BadTerm { comp: usize, axis: usize },
    #[error(
        "model has {components} d-components but the representation holds {gammas} Γ matrices"
    )]
    RepMismatch { components: usize, gammas: usize },
    #[error("subsystem site {site} outside the {total}-site lattice")]
    SiteOutOfRange { site: usize, total: usize },
    #[error("duplicate subsystem site {0}")]
    DuplicateSite(usize),
    #[error("geometry is {geom}-dimensional but the model is {model}-dimensional")]
    DimensionMismatch { geom: usize, model: usize },
    #[error("unknown model name `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` does not accept parameter `{param}`")]
    UnknownParam { model: String, param: String },
}

/// One harmonic of one d-component along one axis:
/// cos_coeff·cos(range·k_axis) + sin_coeff·sin(range·k_axis).
#[derive(Clone, Copy, Debug)]
pub struct HarmonicTerm {
    pub comp: usize,
    pub axis: usize,
    pub range: usize,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

#[derive(Clone, Debug)]
enum ModelKind {
    Lattice,
    Continuum { cutoff: f64 },
}

/// A gapped Dirac model H(k) = d(k)·Γ.
#[derive(Clone, Debug)]
pub struct DiracModel {
    name: String,
    dims: usize,
    components: usize,
    rep: CliffordRep,
    kind: ModelKind,
    mass_component: usize,
    onsite: Vec<f64>,
    terms: Vec<HarmonicTerm>,
    params: Vec<(&'static str, f64)>,
}

impl DiracModel {
    /// Qi-Wu-Zhang Chern insulator:
    /// d = (t_x sin k_x, t_y sin k_y, m − t_x cos k_x − t_y cos k_y).
    pub fn qwz(m: f64, t_x: f64, t_y: f64) -> Self {
        Self {
            name: "qwz".into(),
            dims: 2,
            components: 3,
            rep: build_gammas(1, 3).unwrap(),
            kind: ModelKind::Lattice,
            mass_component: 2,
            onsite: vec![0.0, 0.0, m],
            terms: vec![
                HarmonicTerm {
                    comp: 0,
                    axis: 0,
                    range: 1,
                    cos_coeff: 0.0,
                    sin_coeff: t_x,
                },
                HarmonicTerm {
                    comp: 1,
                    axis: 1,
                    range: 1,
                    cos_coeff: 0.0,
                    sin_coeff: t_y,
                },
                HarmonicTerm {
                    comp: 2,
                    axis: 0,
                    range: 1,
                    cos_coeff: -t_x,
                    sin_coeff: 0.0,
                },
                HarmonicTerm {
                    comp: 2,
                    axis: 1,
                    range: 1,
                    cos_coeff: -t_y,
                    sin_coeff: 0.0,
                },
            ],
            params: vec![("m", m), ("t_x", t_x), ("t_y", t_y)],
        }
    }

    /// 4D quantum Hall model:
    /// d = (m − Σ_i cos k_i) ê_0 + Σ_i sin k_i ê_i, i = 1..4.
    pub fn qh4d(m: f64) -> Self {
        let mut terms = Vec::with_capacity(8);
        for axis in 0..4 {
            terms.push(HarmonicTerm {
                comp: 0,
                axis,
                range: 1,
                cos_coeff: -1.0,
                sin_coeff: 0.0,
            });
            terms.push(HarmonicTerm {
                comp: axis + 1,
                axis,
                range: 1,
                cos_coeff: 0.0,
                sin_coeff: 1.0,
            });
        }
        Self {
            name: "qh4d".into(),
            dims: 4,
            components: 5,
            rep: build_gammas(2, 5).unwrap(),
            kind: ModelKind::Lattice,
            mass_component: 0,
            onsite: vec![m, 0.0, 0.0, 0.0, 0.0],
            terms,
            params: vec![("m", m)],
        }
    }

    /// Vertical stack of SSH chains (weak topological insulator):
    /// d = (t_x + t'_x cos k_x + 2 t_y cos k_y, t'_x sin k_x, 0).
    pub fn wti(t_x: f64, t_x_prime: f64, t_y: f64) -> Self {
        Self {
            name: "wti".into(),
            dims: 2,
            components: 3,
            rep: build_gammas(1, 3).unwrap(),
            kind: ModelKind::Lattice,
            mass_component: 0,
            onsite: vec![t_x, 0.0, 0.0],
            terms: vec![
                HarmonicTerm {
                    comp: 0,
                    axis: 0,
                    range: 1,
                    cos_coeff: t_x_prime,
                    sin_coeff: 0.0,
                },
                HarmonicTerm {
                    comp: 0,
                    axis: 1,
                    range: 1,
                    cos_coeff: 2.0 * t_y,
                    sin_coeff: 0.0,
                },
                HarmonicTerm {
                    comp: 1,
                    axis: 0,
                    range: 1,
                    cos_coeff: 0.0,
                    sin_coeff: t_x_prime,
                },
            ],
            params: vec![("t_x", t_x), ("t_x_prime", t_x_prime), ("t_y", t_y)],
        }
    }

    /// 2D massive continuum Dirac model d = (k_x, k_y, m) with momenta
    /// confined to [−Λ, Λ] per axis.
    pub fn continuum_dirac(m: f64, cutoff: f64) -> Result<Self, ModelError> {
        if m == 0.0 {
            return Err(ModelError::MasslessContinuum);
        }
        if cutoff <= 0.0 {
            return Err(ModelError::BadCutoff(cutoff));
        }
        Ok(Self {
            name: "continuum_dirac".into(),
            dims: 2,
            components: 3,
            rep: build_gammas(1, 3).unwrap(),
            kind: ModelKind::Continuum { cutoff },
            mass_component: 2,
            onsite: vec![0.0, 0.0, m],
            terms: Vec::new(),
            params: vec![("m", m), ("lambda", cutoff)],
        })
    }

    /// User-supplied lattice model from a harmonic coefficient table.
    pub fn from_harmonics(
        name: impl Into<String>,
        dims: usize,
        rep: CliffordRep,
        mass_component: usize,
        onsite: Vec<f64>,
        terms: Vec<HarmonicTerm>,
    ) -> Result<Self, ModelError> {
        let components = onsite.len();
        if components > rep.count() {
            return Err(ModelError::RepMismatch {
                components,
                gammas: rep.count(),
            });
        }
        for t in &terms {
            if t.comp >= components || t.axis >= dims || t.range == 0 {
                return Err(ModelError::BadTerm {
                    comp: t.comp,
                    axis: t.axis,
                });
            }
        }
        if mass_component >= components {
            return Err(ModelError::BadTerm {
                comp: mass_component,
                axis: 0,
            });
        }
        Ok(Self {
            name: name.into(),
            dims,
            components,
            rep,
            kind: ModelKind::Lattice,
            mass_component,
            onsite,
            terms,
            params: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    /// Index of the d-component that absorbs the traced-cosine mass shift.
    pub fn mass_component(&self) -> usize {
        self.mass_component
    }

    /// Harmonic coefficient table (empty for continuum models).
    pub fn harmonics(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, ModelKind::Lattice)
    }

    pub fn continuum_cutoff(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Continuum { cutoff } => Some(cutoff),
            ModelKind::Lattice => None,
        }
    }

    /// d(k), written into `out` (length `components`).
    pub fn d_into(&self, k: &[f64], out: &mut [f64]) {
        debug_assert_eq!(k.len(), self.dims);
        debug_assert_eq!(out.len(), self.components);
        match self.kind {
            ModelKind::Lattice => {
                out.copy_from_slice(&self.onsite);
                for t in &self.terms {
                    let arg = t.range as f64 * k[t.axis];
                    let (s, c) = arg.sin_cos();
                    out[t.comp] += t.cos_coeff * c + t.sin_coeff * s;
                }
            }
            ModelKind::Continuum { .. } => {
                out[0] = k[0];
                out[1] = k[1];
                out[2] = self.onsite[2];
            }
        }
    }

    pub fn d(&self, k: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        self.d_into(k, &mut out);
        out
    }

    pub fn d_norm(&self, k: &[f64]) -> f64 {
        let d = self.d(k);
        d.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Bloch Hamiltonian d(k)·Γ.
    pub fn bloch(&self, k: &[f64]) -> HermitianMatrix {
        self.rep.contract(&self.d(k))
    }

    /// min_k |d(k)| over a lattice grid (half the smallest direct gap).
    pub fn min_gap(&self, grid: &BzGrid) -> f64 {
        assert_eq!(grid.dims(), self.dims);
        let mut k = vec![0.0; self.dims];
        let mut best = f64::INFINITY;
        for flat in 0..grid.len() {
            grid.momentum_into(flat, &mut k);
            best = best.min(self.d_norm(&k));
        }
        best
    }
}

/// Boundary condition per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Finite real-space lattice with an ordered subsystem site list.
#[derive(Clone, Debug)]
pub struct LatticeGeometry {
    sizes: Vec<usize>,
    boundary: Vec<Boundary>,
    subsystem: Vec<usize>,
}

impl LatticeGeometry {
    pub fn new(
        sizes: Vec<usize>,
        boundary: Vec<Boundary>,
        subsystem: Vec<usize>,
    ) -> Result<Self, ModelError> {
        assert_eq!(sizes.len(), boundary.len());
        let total: usize = sizes.iter().product();
        let mut seen = vec![false; total];
        for &s in &subsystem {
            if s >= total {
                return Err(ModelError::SiteOutOfRange { site: s, total });
            }
            if seen[s] {
                return Err(ModelError::DuplicateSite(s));
            }
            seen[s] = true;
        }
        Ok(Self {
            sizes,
            boundary,
            subsystem,
        })
    }

    /// Fully periodic lattice whose subsystem is every site.
    pub fn periodic_full(sizes: Vec<usize>) -> Self {
        let total = sizes.iter().product();
        let boundary = vec![Boundary::Periodic; sizes.len()];
        Self {
            sizes,
            boundary,
            subsystem: (0..total).collect(),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn boundary(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn subsystem(&self) -> &[usize] {
        &self.subsystem
    }

    pub fn n_sites(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Lexicographic site index, last axis fastest.
    pub fn site_index(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for (axis, &c) in coords.iter().enumerate() {
            debug_assert!(c < self.sizes[axis]);
            idx = idx * self.sizes[axis] + c;
        }
        idx
    }

    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for axis in (0..self.sizes.len()).rev() {
            out[axis] = site % self.sizes[axis];
            site /= self.sizes[axis];
        }
        out
    }
}

/// Site indices of a line of `len` cells along `axis`, the other axes held
/// at the `others` coordinates (in axis order, skipping `axis`).
pub fn line_sites(sizes: &[usize], axis: usize, others: &[usize], len: usize) -> Vec<usize> {
    let geom = LatticeGeometry::periodic_full(sizes.to_vec());
    let mut coords = vec![0usize; sizes.len()];
    let mut oi = 0;
    for a in 0..sizes.len() {
        if a != axis {
            coords[a] = others[oi];
            oi += 1;
        }
    }
    (0..len)
        .map(|x| {
            coords[axis] = x;
            geom.site_index(&coords)
        })
        .collect()
}

/// Real-space Hamiltonian of a lattice model on a finite geometry,
/// dimension 2ⁿ·(#sites); basis index = site·2ⁿ + orbital.
pub fn realspace_hamiltonian(
    model: &DiracModel,
    geom: &LatticeGeometry,
) -> Result<HermitianMatrix, ModelError> {
    if !model.is_lattice() {
        return Err(ModelError::NotLattice(model.name.clone()));
    }
    if geom.sizes().len() != model.dims() {
        return Err(ModelError::DimensionMismatch {
            geom: geom.sizes().len(),
            model: model.dims(),
        });
    }
    let b = model.rep.matrix_dim();
    let n_sites = geom.n_sites();
    let dim = b * n_sites;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];

    // adds amp·Γ on the (si, sj) block and its Hermitian image on (sj, si)
    let add_hop = |data: &mut Vec<C64>, si: usize, sj: usize, amp: C64, gamma: &HermitianMatrix| {
        for a in 0..b {
            for bb in 0..b {
                let g = gamma.get(a, bb);
                if g.norm_sqr() == 0.0 {
                    continue;
                }
                let v = amp * g;
                data[(si * b + a) * dim + sj * b + bb] += v;
                data[(sj * b + bb) * dim + si * b + a] += v.conj();
            }
        }
    };
    // on-site blocks are Hermitian by themselves
    let add_onsite = |data: &mut Vec<C64>, si: usize, c: f64, gamma: &HermitianMatrix| {
        for a in 0..b {
            for bb in 0..b {
                let g = gamma.get(a, bb);
                if g.norm_sqr() != 0.0 {
                    data[(si * b + a) * dim + si * b + bb] += c * g;
                }
            }
        }
    };

    for site in 0..n_sites {
        let coords = geom.coords(site);
        for (mu, &c) in model.onsite.iter().enumerate() {
            if c != 0.0 {
                add_onsite(&mut data, site, c, model.rep.gamma(mu));
            }
        }
        // hopping blocks: c·cos(r k) + s·sin(r k) → (c/2 − i s/2) on x → x+r ê
        for t in &model.terms {
            let l = geom.sizes()[t.axis];
            let target = coords[t.axis] + t.range;
            let wrapped = target % l;
            let crosses = target >= l;
            if crosses && geom.boundary()[t.axis] == Boundary::Open {
                continue;
            }
            let mut tc = coords.clone();
            tc[t.axis] = wrapped;
            let tsite = geom.site_index(&tc);
            if tsite == site {
                // self-wrap (L divides the range): sin part cancels
                add_onsite(&mut data, site, t.cos_coeff, model.rep.gamma(t.comp));
            } else {
                let amp = C64::new(0.5 * t.cos_coeff, -0.5 * t.sin_coeff);
                add_hop(&mut data, site, tsite, amp, model.rep.gamma(t.comp));
            }
        }
    }
    Ok(HermitianMatrix::from_entries(dim, data).expect("construction is Hermitian by symmetry"))
}

/// Model selection from a JSON-style config document. Besides the zoo
/// names, `"custom"` accepts a user-supplied d-vector table.
#[derive(Clone, Debug, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub custom: Option<CustomModelConfig>,
}

/// Harmonic d-vector table for user-defined lattice models:
/// d_μ(k) = onsite_μ + Σ_t [cos_t·cos(range_t·k_{axis_t}) + sin_t·sin(…)].
/// The representation is the smallest 2ⁿ carrier with 2n+1 ≥ #components.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModelConfig {
    pub dims: usize,
    pub mass_component: usize,
    pub onsite: Vec<f64>,
    #[serde(default)]
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub comp: usize,
    pub axis: usize,
    #[serde(default = "one")]
    pub range: usize,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

fn one() -> usize {
    1
}

impl ModelConfig {
    pub fn build(&self) -> Result<DiracModel, ModelError> {
        let get = |key: &str, default: f64| -> f64 { *self.params.get(key).unwrap_or(&default) };
        let allowed: &[&str] = match self.name.as_str() {
            "qwz" => &["m", "t_x", "t_y"],
            "qh4d" => &["m"],
            "wti" => &["t_x", "t_x_prime", "t_y"],
            "continuum_dirac" => &["m", "lambda"],
            "custom" => &[],
            _ => return Err(ModelError::UnknownModel(self.name.clone())),
        };
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ModelError::UnknownParam {
                    model: self.name.clone(),
                    param: key.clone(),
                });
            }
        }
        match self.name.as_str() {
            "qwz" => Ok(DiracModel::qwz(
                get("m", 1.0),
                get("t_x", 1.0),
                get("t_y", 1.0),
            )),
            "qh4d" => Ok(DiracModel::qh4d(get("m", 1.0))),
            "wti" => Ok(DiracModel::wti(
                get("t_x", 1.0),
                get("t_x_prime", 4.0),
                get("t_y", 1.0),
            )),
            "continuum_dirac" => DiracModel::continuum_dirac(get("m", 1.0), get("lambda", 100.0)),
            "custom" => {
                let table = self
                    .custom
                    .as_ref()
                    .ok_or_else(|| ModelError::UnknownModel("custom (no table given)".into()))?;
                let components = table.onsite.len();
                if components == 0 {
                    return Err(ModelError::BadTerm { comp: 0, axis: 0 });
                }
                // smallest carrier: N anticommuting gammas need N ≤ 2n+1
                let n = components.saturating_sub(1).div_ceil(2);
                let rep = build_gammas(n, components).map_err(|_| ModelError::BadTerm {
                    comp: components,
                    axis: 0,
                })?;
                let terms = table
                    .terms
                    .iter()
                    .map(|t| HarmonicTerm {
                        comp: t.comp,
                        axis: t.axis,
                        range: t.range,
                        cos_coeff: t.cos,
                        sin_coeff: t.sin,
                    })
                    .collect();
                DiracModel::from_harmonics(
                    "custom",
                    table.dims,
                    rep,
                    table.mass_component,
                    table.onsite.clone(),
                    terms,
                )
            }
            _ => unreachable!(),
        }
    }
}

/// Geometry selection from a JSON-style config document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub sizes: Vec<usize>,
    pub boundary: Vec<Boundary>,
    pub subsystem: SubsystemConfig,
}

/// Either an explicit site list or a line of cells along one axis.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SubsystemConfig {
    Sites {
        sites: Vec<usize>,
    },
    Line {
        axis: usize,
        others: Vec<usize>,
        length: usize,
    },
}

impl GeometryConfig {
    pub fn build(&self) -> Result<LatticeGeometry, ModelError> {
        if self.boundary.len() != self.sizes.len() {
            return Err(ModelError::DimensionMismatch {
                geom: self.boundary.len(),
                model: self.sizes.len(),
            });
        }
        let subsystem = match &self.subsystem {
            SubsystemConfig::Sites { sites } => sites.clone(),
            SubsystemConfig::Line {
                axis,
                others,
                length,
            } => {
                if *axis >= self.sizes.len() || others.len() + 1 != self.sizes.len() {
                    return Err(ModelError::DimensionMismatch {
                        geom: others.len() + 1,
                        model: self.sizes.len(),
                    });
                }
                line_sites(&self.sizes, *axis, others, *length)
            }
        };
        LatticeGeometry::new(self.sizes.clone(), self.boundary.clone(), subsystem)
    }
}
