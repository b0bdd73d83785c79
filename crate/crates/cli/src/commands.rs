//! Command implementations. Every command writes CSV artifacts plus a
//! manifest; figure commands add one SVG.

use std::f64::consts::PI;

use serde_json::json;
use subtherm::correlations::{
    corr_momentum, fermi_dirac, particle_variance, realspace_corr, thermal_corr, time_corr,
    window_corr,
};
use subtherm::entmap::{
    entanglement_temperature, esh_limiting, EshResult, PerpAverager, SubsystemSpec,
};
use subtherm::models::{line_sites, Boundary, DiracModel, LatticeGeometry};
use subtherm::numerics::BzGrid;
use subtherm::topo::{
    gap_scan, qh4d_descendant_invariant, qh4d_descendant_min_gap, weak_indices, weak_indices_phase,
};

use crate::output::{color, OutputSet, Panel, Series, Svg};
use crate::CliError;

fn num_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// ESH curve of `model` along one kept axis. Figure sweeps evaluate
/// fibers crossing a parent gap zero in the limiting sense; the data
/// commands keep the strict gapped-fiber contract.
fn esh_curve(
    model: &DiracModel,
    axis: usize,
    kept_points: usize,
    transverse_points: Option<usize>,
    limiting: bool,
) -> Result<Vec<EshResult>, CliError> {
    let traced = model.dims() - 1;
    let transverse = match transverse_points {
        Some(l) => BzGrid::uniform(traced, l),
        None => subtherm::entmap::default_transverse(traced),
    };
    let spec = SubsystemSpec::new(model.dims(), vec![axis], transverse).map_err(num_err)?;
    (0..kept_points)
        .map(|i| {
            let k = 2.0 * PI * i as f64 / kept_points as f64;
            if limiting {
                esh_limiting(model, &spec, &[k]).map_err(num_err)
            } else {
                subtherm::entmap::esh(model, &spec, &[k]).map_err(num_err)
            }
        })
        .collect()
}

pub fn cmd_esh(
    out: &mut OutputSet,
    model: &DiracModel,
    axis: usize,
    kept_points: usize,
    transverse_points: Option<usize>,
) -> Result<serde_json::Value, CliError> {
    let curve = esh_curve(model, axis, kept_points, transverse_points, false)?;
    let mut header: Vec<String> = vec!["k_s".into()];
    header.extend((0..model.components()).map(|i| format!("d_{i}")));
    header.extend(["F", "delta_m", "T"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .map(|r| {
            let mut row = vec![r.k_s[0]];
            row.extend(&r.d);
            row.extend([r.f_factor, r.delta_m, r.temperature]);
            row
        })
        .collect();
    out.csv("esh.csv", &header_refs, &rows)?;
    out.svg(
        "esh.svg",
        &Svg {
            columns: 2,
            panels: vec![
                Panel {
                    title: "entanglement temperature".into(),
                    x_label: "k_s".into(),
                    y_label: "T".into(),
                    series: vec![Series {
                        points: curve.iter().map(|r| (r.k_s[0], r.temperature)).collect(),
                        color: color(0),
                    }],
                },
                Panel {
                    title: "mass shift".into(),
                    x_label: "k_s".into(),
                    y_label: "delta m".into(),
                    series: vec![Series {
                        points: curve.iter().map(|r| (r.k_s[0], r.delta_m)).collect(),
                        color: color(1),
                    }],
                },
            ],
        },
    )?;
    Ok(json!({
        "model": model.name(),
        "params": model.params().iter().map(|(k, v)| (k.to_string(), v)).collect::<std::collections::BTreeMap<_, _>>(),
        "axis": axis,
        "kept_points": kept_points,
    }))
}

pub fn cmd_corr_spectrum(
    out: &mut OutputSet,
    model: &DiracModel,
    axis: usize,
    kept_points: usize,
    transverse_points: Option<usize>,
) -> Result<serde_json::Value, CliError> {
    let curve = esh_curve(model, axis, kept_points, transverse_points, false)?;
    let mut rows = Vec::new();
    for r in &curve {
        let eig = corr_momentum(r, model.rep())
            .eigenvalues()
            .map_err(num_err)?;
        let e = r.d_norm();
        // ascending ξ pairs with descending energy
        let b = model.rep().matrix_dim();
        for (i, &xi) in eig.iter().enumerate() {
            let energy = if i < b / 2 { e } else { -e };
            rows.push(vec![
                r.k_s[0],
                xi,
                energy,
                fermi_dirac(energy, r.temperature),
            ]);
        }
    }
    out.csv(
        "corr_spectrum.csv",
        &["k", "xi", "energy", "occupation"],
        &rows,
    )?;
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[2], r[1])).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out.svg(
        "corr_spectrum.svg",
        &Svg {
            columns: 1,
            panels: vec![Panel {
                title: "correlation spectrum".into(),
                x_label: "E".into(),
                y_label: "xi".into(),
                series: vec![Series {
                    points: pts,
                    color: color(0),
                }],
            }],
        },
    )?;
    Ok(json!({ "model": model.name(), "axis": axis, "kept_points": kept_points }))
}

/// Momentum-space ΔN² of a QWZ chain, with the constant-mean-T thermal curve.
fn qwz_variance_curve(
    m_values: &[f64],
    t_y: f64,
    chain: usize,
    transverse_points: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let transverse = BzGrid::uniform(1, transverse_points);
    let avg = PerpAverager::with_amplitudes(&transverse, &[t_y]);
    let mut exact = Vec::with_capacity(m_values.len());
    let mut thermal = Vec::with_capacity(m_values.len());
    let mut mean_t = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut records = Vec::with_capacity(chain);
        for i in 0..chain {
            let k = 2.0 * PI * i as f64 / chain as f64;
            let a = avg.average(m - k.cos(), k.sin().powi(2));
            let mass = m - k.cos() - a.delta_m;
            let d_norm = (mass * mass + k.sin().powi(2)).sqrt();
            let (t, _) = entanglement_temperature(d_norm, a.f_factor);
            records.push((d_norm, a.f_factor, t));
        }
        let tbar = records.iter().map(|r| r.2).sum::<f64>() / chain as f64;
        let mut ve = 0.0;
        let mut vt = 0.0;
        for &(d_norm, f, _) in &records {
            let x = f * d_norm;
            ve += 0.5 * (1.0 - x * x);
            let nf = fermi_dirac(d_norm, tbar);
            vt += 2.0 * nf * (1.0 - nf);
        }
        exact.push(ve);
        thermal.push(vt);
        mean_t.push(tbar);
    }
    (exact, thermal, mean_t)
}

fn qwz_hoppings(model: &DiracModel) -> Result<(f64, f64), CliError> {
    if model.name() != "qwz" {
        return Err(CliError::Config(format!(
            "variance-scan sweeps the qwz mass; model `{}` is not supported",
            model.name()
        )));
    }
    let get = |key: &str, default: f64| {
        model
            .params()
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    Ok((get("t_x", 1.0), get("t_y", 1.0)))
}

pub fn cmd_variance_scan(
    out: &mut OutputSet,
    model: &DiracModel,
    m_range: (f64, f64, f64),
    chain: usize,
    transverse_points: usize,
) -> Result<serde_json::Value, CliError> {
    let (_, t_y) = qwz_hoppings(model)?;
    let ms = crate::config::range_values(m_range);
    let (exact, thermal, mean_t) = qwz_variance_curve(&ms, t_y, chain, transverse_points);
    let rows: Vec<Vec<f64>> = ms
        .iter()
        .zip(&exact)
        .zip(&thermal)
        .zip(&mean_t)
        .map(|(((&m, &e), &t), &tb)| vec![m, e, t, tb])
        .collect();
    out.csv(
        "variance.csv",
        &["m", "variance", "thermal_variance", "mean_T"],
        &rows,
    )?;
    out.svg(
        "variance.svg",
        &Svg {
            columns: 1,
            panels: vec![Panel {
                title: format!("subsystem particle-number variance, t_y={t_y}"),
                x_label: "m".into(),
                y_label: "dN^2".into(),
                series: vec![
                    Series {
                        points: ms.iter().cloned().zip(exact.iter().cloned()).collect(),
                        color: color(0),
                    },
                    Series {
                        points: ms.iter().cloned().zip(thermal.iter().cloned()).collect(),
                        color: color(1),
                    },
                ],
            }],
        },
    )?;
    Ok(
        json!({ "t_y": t_y, "chain": chain, "transverse_points": transverse_points,
               "m": { "start": m_range.0, "stop": m_range.1, "step": m_range.2 } }),
    )
}

/// Finite-lattice ΔN²(m) by dense diagonalization of the configured
/// geometry's subsystem.
pub fn cmd_variance_scan_lattice(
    out: &mut OutputSet,
    model: &DiracModel,
    m_range: (f64, f64, f64),
    geom: &LatticeGeometry,
) -> Result<serde_json::Value, CliError> {
    let (t_x, t_y) = qwz_hoppings(model)?;
    let ms = crate::config::range_values(m_range);
    let mut rows = Vec::with_capacity(ms.len());
    for &m in &ms {
        let swept = DiracModel::qwz(m, t_x, t_y);
        let c = realspace_corr(&swept, geom).map_err(num_err)?;
        rows.push(vec![m, particle_variance(&c)]);
    }
    out.csv("variance.csv", &["m", "variance"], &rows)?;
    out.svg(
        "variance.svg",
        &Svg {
            columns: 1,
            panels: vec![Panel {
                title: format!(
                    "lattice particle-number variance, {:?} sites, t_y={t_y}",
                    geom.sizes()
                ),
                x_label: "m".into(),
                y_label: "dN^2".into(),
                series: vec![Series {
                    points: rows.iter().map(|r| (r[0], r[1])).collect(),
                    color: color(0),
                }],
            }],
        },
    )?;
    Ok(json!({
        "t_x": t_x, "t_y": t_y,
        "sizes": geom.sizes(), "subsystem_sites": geom.subsystem().len(),
        "m": { "start": m_range.0, "stop": m_range.1, "step": m_range.2 },
    }))
}

pub fn cmd_topo(
    out: &mut OutputSet,
    dims: &[usize],
    m_range: (f64, f64, f64),
) -> Result<serde_json::Value, CliError> {
    let ms = crate::config::range_values(m_range);
    let mut panels = Vec::new();
    // 0D: sign of the averaged mass, ν_0 = d̂/S_0 = ±½
    let zero_d_averager = PerpAverager::unit_hopping(&subtherm::entmap::default_transverse(4));
    for &d in dims {
        let mut rows = Vec::new();
        for &m in &ms {
            if d == 0 {
                let a = zero_d_averager.average(m, 0.0);
                let mass = m - a.delta_m;
                if mass.abs() > 1e-9 {
                    rows.push(vec![m, 0.5 * mass.signum(), mass.signum()]);
                }
            } else if let Ok(r) = qh4d_descendant_invariant(m, d) {
                rows.push(vec![m, r.nu_raw, r.nu as f64]);
            }
            // critical masses are skipped: the invariant is undefined there
        }
        let name = format!("topo_nu{d}.csv");
        out.csv(&name, &["m", "nu_raw", "nu"], &rows)?;
        panels.push(Panel {
            title: format!("nu_{d}(m)"),
            x_label: "m".into(),
            y_label: "nu".into(),
            series: vec![Series {
                points: rows.iter().map(|r| (r[0], r[1])).collect(),
                color: color(d),
            }],
        });

        // critical points from the gap scan
        let criticals = gap_scan(|m| qh4d_descendant_min_gap(m, d.max(1), 8), -5.0, 5.0, 0.01);
        let crit_rows: Vec<Vec<f64>> = criticals.iter().map(|&mc| vec![mc]).collect();
        out.csv(&format!("topo_criticals_d{d}.csv"), &["m_c"], &crit_rows)?;
    }
    out.svg("topo.svg", &Svg { columns: 2, panels })?;
    let grids: std::collections::BTreeMap<String, serde_json::Value> = dims
        .iter()
        .map(|&d| {
            (
                format!("nu_{d}"),
                json!({
                    "invariant_points_per_axis": subtherm::topo::default_invariant_points(d),
                    "transverse": if d == 0 || d == 4 { None } else {
                        Some(subtherm::entmap::default_transverse(4 - d).sizes().to_vec())
                    },
                }),
            )
        })
        .collect();
    Ok(json!({ "dims": dims, "grids": grids,
               "m": { "start": m_range.0, "stop": m_range.1, "step": m_range.2 } }))
}

pub fn cmd_wti(
    out: &mut OutputSet,
    t_x: f64,
    t_x_prime: f64,
    t_y: f64,
    ring: usize,
    window: usize,
) -> Result<serde_json::Value, CliError> {
    let model = DiracModel::wti(t_x, t_x_prime, t_y);
    let w = weak_indices(&model).map_err(num_err)?;
    let w_phase = weak_indices_phase(&model).map_err(num_err)?;
    out.csv(
        "weak_indices.csv",
        &["nu_x", "nu_y", "nu_x_phase", "nu_y_phase"],
        &[vec![
            w.nu_x as f64,
            w.nu_y as f64,
            w_phase.nu_x as f64,
            w_phase.nu_y as f64,
        ]],
    )?;

    let transverse = BzGrid::uniform(1, ring);
    let x_cut = window_corr(&model, 0, ring, window, &transverse).map_err(num_err)?;
    let y_cut = window_corr(&model, 1, ring, window, &transverse).map_err(num_err)?;
    let xs = x_cut.eigenvalues().map_err(num_err)?;
    let ys = y_cut.eigenvalues().map_err(num_err)?;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(&ys)
        .enumerate()
        .map(|(i, (&a, &b))| vec![i as f64, a, b])
        .collect();
    out.csv(
        "window_spectra.csv",
        &["mode", "xi_x_cut", "xi_y_cut"],
        &rows,
    )?;
    Ok(json!({ "t_x": t_x, "t_x_prime": t_x_prime, "t_y": t_y,
               "ring": ring, "window": window,
               "weak_indices": [w.nu_x, w.nu_y] }))
}

pub fn cmd_time_corr(
    out: &mut OutputSet,
    model: &DiracModel,
    axis: usize,
    k: f64,
    t_max: f64,
    steps: usize,
    transverse_points: Option<usize>,
) -> Result<serde_json::Value, CliError> {
    let traced = model.dims() - 1;
    let transverse = match transverse_points {
        Some(l) => BzGrid::uniform(traced, l),
        None => subtherm::entmap::default_transverse(traced),
    };
    let spec = SubsystemSpec::new(model.dims(), vec![axis], transverse).map_err(num_err)?;
    let r = subtherm::entmap::esh(model, &spec, &[k]).map_err(num_err)?;
    let th = thermal_corr(&r.d, r.temperature, model.rep()).map_err(num_err)?;
    let static_block = corr_momentum(&r, model.rep());

    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        let c = time_corr(model, &spec, &[k], t).map_err(num_err)?;
        let to_thermal = c.matrix.sub(th.matrix.as_complex()).frobenius_norm();
        let to_static = c
            .matrix
            .sub(static_block.matrix.as_complex())
            .frobenius_norm();
        rows.push(vec![t, to_thermal, to_static]);
    }
    out.csv(
        "time_corr.csv",
        &["t", "dist_thermal", "dist_static"],
        &rows,
    )?;
    out.svg(
        "time_corr.svg",
        &Svg {
            columns: 1,
            panels: vec![Panel {
                title: "departure of C(t) from the thermal form".into(),
                x_label: "t".into(),
                y_label: "Frobenius distance".into(),
                series: vec![
                    Series {
                        points: rows.iter().map(|r| (r[0], r[1])).collect(),
                        color: color(0),
                    },
                    Series {
                        points: rows.iter().map(|r| (r[0], r[2])).collect(),
                        color: color(1),
                    },
                ],
            }],
        },
    )?;
    Ok(json!({ "model": model.name(), "k": k, "t_max": t_max, "steps": steps }))
}

/// Mass-shift and temperature curves of the QWZ subsystem mapping.
pub fn cmd_fig2(out: &mut OutputSet) -> Result<serde_json::Value, CliError> {
    let kept = 256usize;
    let m_set = [0.5, 1.0, 1.4, 2.5];
    let ty_set = [0.2, 0.5, 1.0];
    let curve = |m: f64, t_y: f64| -> Result<Vec<EshResult>, CliError> {
        esh_curve(&DiracModel::qwz(m, 1.0, t_y), 0, kept, Some(512), true)
    };

    let mut panels = Vec::new();
    // (a)/(c): vary m at t_y = 1; (b)/(d): vary t_y at m = 1.4
    for (panel, quantity) in [("a", "delta_m"), ("b", "delta_m"), ("c", "T"), ("d", "T")] {
        let (labels, curves): (Vec<String>, Vec<Vec<EshResult>>) = if panel == "a" || panel == "c" {
            let mut cs = Vec::new();
            for &m in &m_set {
                cs.push(curve(m, 1.0)?);
            }
            (m_set.iter().map(|m| format!("m={m}")).collect(), cs)
        } else {
            let mut cs = Vec::new();
            for &t_y in &ty_set {
                cs.push(curve(1.4, t_y)?);
            }
            (ty_set.iter().map(|t| format!("t_y={t}")).collect(), cs)
        };
        let mut header: Vec<String> = vec!["k_x".into()];
        header.extend(labels.iter().cloned());
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<f64>> = (0..kept)
            .map(|i| {
                let mut row = vec![curves[0][i].k_s[0]];
                for c in &curves {
                    row.push(if quantity == "delta_m" {
                        c[i].delta_m
                    } else {
                        c[i].temperature
                    });
                }
                row
            })
            .collect();
        out.csv(&format!("fig2_{panel}.csv"), &header_refs, &rows)?;
        panels.push(Panel {
            title: format!("({panel}) {quantity} vs k_x"),
            x_label: "k_x".into(),
            y_label: quantity.into(),
            series: curves
                .iter()
                .enumerate()
                .map(|(i, c)| Series {
                    points: c
                        .iter()
                        .map(|r| {
                            (
                                r.k_s[0],
                                if quantity == "delta_m" {
                                    r.delta_m
                                } else {
                                    r.temperature
                                },
                            )
                        })
                        .collect(),
                    color: color(i),
                })
                .collect(),
        });
    }
    out.svg("fig2.svg", &Svg { columns: 2, panels })?;
    Ok(json!({ "kept_points": kept, "transverse_points": 512,
               "panel_ac_masses": m_set, "panel_bd_hoppings": ty_set }))
}

/// Correlation spectra against the constant-temperature Fermi-Dirac curve.
pub fn cmd_fig3(out: &mut OutputSet) -> Result<serde_json::Value, CliError> {
    let kept = 64usize;
    let mut panels = Vec::new();
    for (panel, m) in [("a", 1.0), ("b", 1.4)] {
        let mut rows = Vec::new();
        let mut series = Vec::new();
        for (ci, t_y) in [1.0, 0.2].into_iter().enumerate() {
            let curve = esh_curve(&DiracModel::qwz(m, 1.0, t_y), 0, kept, Some(512), true)?;
            // constant fit temperature: the value at the hot momentum k = 0;
            // the plain k-mean curve is emitted alongside for comparison
            let t_fit = curve[0].temperature;
            let t_mean = curve.iter().map(|r| r.temperature).sum::<f64>() / curve.len() as f64;
            let mut pts = Vec::new();
            for r in &curve {
                let e = r.d_norm();
                let x = r.f_factor * e;
                for (sign, xi) in [(1.0, 0.5 * (1.0 - x)), (-1.0, 0.5 * (1.0 + x))] {
                    rows.push(vec![
                        t_y,
                        r.k_s[0],
                        sign * e,
                        xi,
                        fermi_dirac(sign * e, t_fit),
                        fermi_dirac(sign * e, t_mean),
                    ]);
                    pts.push((sign * e, xi));
                }
            }
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            series.push(Series {
                points: pts,
                color: color(ci),
            });
            // smooth Fermi-Dirac reference curve
            let emax = curve.iter().map(|r| r.d_norm()).fold(0.0, f64::max);
            let fd: Vec<(f64, f64)> = (0..200)
                .map(|i| {
                    let e = -emax + 2.0 * emax * i as f64 / 199.0;
                    (e, fermi_dirac(e, t_fit))
                })
                .collect();
            series.push(Series {
                points: fd,
                color: color(ci + 2),
            });
        }
        out.csv(
            &format!("fig3_{panel}.csv"),
            &[
                "t_y",
                "k",
                "energy",
                "xi",
                "fermi_dirac_fit",
                "fermi_dirac_mean_t",
            ],
            &rows,
        )?;
        panels.push(Panel {
            title: format!("({panel}) m = {m}"),
            x_label: "E".into(),
            y_label: "xi".into(),
            series,
        });
    }
    out.svg("fig3.svg", &Svg { columns: 2, panels })?;
    Ok(
        json!({ "kept_points": kept, "transverse_points": 512, "masses": [1.0, 1.4], "hoppings": [1.0, 0.2] }),
    )
}

/// Topological invariant of the 4D model and its descendants over m.
pub fn cmd_fig4(out: &mut OutputSet, m_step: f64) -> Result<serde_json::Value, CliError> {
    cmd_topo(out, &[1, 2, 3, 4], (-5.0, 5.0, m_step))
}

/// Correlation spectra and particle-number variances of QWZ subsystems.
pub fn cmd_fig5(out: &mut OutputSet, panel: Option<&str>) -> Result<serde_json::Value, CliError> {
    let chain = 64usize;
    let ms: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
    let wanted = |p: &str| panel.is_none_or(|sel| sel == p);
    let mut panels = Vec::new();

    // (a)/(b): subsystem correlation spectra over the mass sweep
    for (p, t_y) in [("a", 1.0), ("b", 0.5)] {
        if !wanted(p) {
            continue;
        }
        let mut rows = Vec::new();
        let mut series: Vec<Series> = (0..2 * chain)
            .map(|i| Series {
                points: Vec::new(),
                color: color(i % 2),
            })
            .collect();
        for &m in &ms {
            let curve = esh_curve(&DiracModel::qwz(m, 1.0, t_y), 0, chain, Some(512), true)?;
            let mut eigs = Vec::with_capacity(2 * chain);
            for r in &curve {
                let x = r.f_factor * r.d_norm();
                eigs.push(0.5 * (1.0 - x));
                eigs.push(0.5 * (1.0 + x));
            }
            eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (i, &xi) in eigs.iter().enumerate() {
                rows.push(vec![m, i as f64, xi]);
                series[i].points.push((m, xi));
            }
        }
        out.csv(&format!("fig5_{p}.csv"), &["m", "mode", "xi"], &rows)?;
        panels.push(Panel {
            title: format!("({p}) spectra, t_y = {t_y}"),
            x_label: "m".into(),
            y_label: "xi".into(),
            series,
        });
    }

    // (c)/(d): momentum-space variance with the constant-mean-T curve
    for (p, t_y) in [("c", 1.0), ("d", 0.5)] {
        if !wanted(p) {
            continue;
        }
        let (exact, thermal, mean_t) = qwz_variance_curve(&ms, t_y, chain, 512);
        let rows: Vec<Vec<f64>> = ms
            .iter()
            .zip(&exact)
            .zip(&thermal)
            .zip(&mean_t)
            .map(|(((&m, &e), &t), &tb)| vec![m, e, t, tb])
            .collect();
        out.csv(
            &format!("fig5_{p}.csv"),
            &["m", "variance", "thermal_variance", "mean_T"],
            &rows,
        )?;
        panels.push(Panel {
            title: format!("({p}) dN^2, t_y = {t_y}"),
            x_label: "m".into(),
            y_label: "dN^2".into(),
            series: vec![
                Series {
                    points: ms.iter().cloned().zip(exact).collect(),
                    color: color(0),
                },
                Series {
                    points: ms.iter().cloned().zip(thermal).collect(),
                    color: color(1),
                },
            ],
        });
    }

    // (e)/(f): open 5×10 lattice by dense diagonalization
    for (p, t_y) in [("e", 1.0), ("f", 0.5)] {
        if !wanted(p) {
            continue;
        }
        let geom = LatticeGeometry::new(
            vec![5, 10],
            vec![Boundary::Open, Boundary::Open],
            line_sites(&[5, 10], 0, &[5], 5),
        )
        .map_err(num_err)?;
        let mut rows = Vec::new();
        for &m in &ms {
            let model = DiracModel::qwz(m, 1.0, t_y);
            let c = realspace_corr(&model, &geom).map_err(num_err)?;
            rows.push(vec![m, particle_variance(&c)]);
        }
        out.csv(&format!("fig5_{p}.csv"), &["m", "variance"], &rows)?;
        panels.push(Panel {
            title: format!("({p}) open 5x10, t_y = {t_y}"),
            x_label: "m".into(),
            y_label: "dN^2".into(),
            series: vec![Series {
                points: rows.iter().map(|r| (r[0], r[1])).collect(),
                color: color(0),
            }],
        });
    }

    out.svg("fig5.svg", &Svg { columns: 2, panels })?;
    Ok(json!({ "chain": chain, "transverse_points": 512,
               "m": { "start": -3.0, "stop": 3.0, "step": 0.05 },
               "panel": panel }))
}

/// Window correlation spectra of the SSH stack across its phase diagram.
pub fn cmd_fig6(out: &mut OutputSet) -> Result<serde_json::Value, CliError> {
    let (t_x, t_y) = (1.0, 0.2);
    let (ring, window) = (60usize, 30usize);
    let sweeps: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect(); // t'_x ∈ [0, 3]
    let transverse = BzGrid::uniform(1, ring);
    let mut panels = Vec::new();
    for (p, axis) in [("a", 0usize), ("b", 1usize)] {
        let mut rows = Vec::new();
        let mut series: Vec<Series> = (0..2 * window)
            .map(|_| Series {
                points: Vec::new(),
                color: color(0),
            })
            .collect();
        for &t_xp in &sweeps {
            let model = DiracModel::wti(t_x, t_xp, t_y);
            let c = window_corr(&model, axis, ring, window, &transverse).map_err(num_err)?;
            let eig = c.eigenvalues().map_err(num_err)?;
            for (i, &xi) in eig.iter().enumerate() {
                rows.push(vec![t_xp, i as f64, xi]);
                series[i].points.push((t_xp, xi));
            }
        }
        out.csv(
            &format!("fig6_{p}.csv"),
            &["t_x_prime", "mode", "xi"],
            &rows,
        )?;
        panels.push(Panel {
            title: format!(
                "({p}) {}-cut window spectra",
                if axis == 0 { "x" } else { "y" }
            ),
            x_label: "t'_x".into(),
            y_label: "xi".into(),
            series,
        });
    }
    out.svg("fig6.svg", &Svg { columns: 2, panels })?;
    Ok(
        json!({ "t_x": t_x, "t_y": t_y, "ring": ring, "window": window,
               "t_x_prime": { "start": 0.0, "stop": 3.0, "step": 0.05 } }),
    )
}

pub fn cmd_selftest() -> Result<(), CliError> {
    let results = subtherm::selftest::run_all();
    let mut ok = true;
    for r in &results {
        println!(
            "{}: {} — {}",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        );
        ok &= r.passed;
    }
    if ok {
        println!("selftest: all {} checks passed", results.len());
        Ok(())
    } else {
        Err(CliError::Numerical("selftest failed".into()))
    }
}

/// Writes artifacts for one command and the closing manifest.
pub fn finish(out: OutputSet, command: &str, inputs: serde_json::Value) -> Result<(), CliError> {
    let dir = out.dir().display().to_string();
    out.manifest(command, &inputs)?;
    println!("{command}: artifacts in {dir}");
    Ok(())
}
