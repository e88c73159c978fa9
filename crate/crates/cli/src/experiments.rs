use std::f64::consts::LN_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use iprep_core::adiabatic::{
    adiabatic_time, depth_estimate, doubling_search, fidelity_sweep, trotter_convergence, write_fidelity_csv,
    HamiltonianFamily, RgParentFamily, Schedule,
};
use iprep_core::ed::{
    entanglement_entropy_real, joint_charge_spectrum, loglog_slope, magnetization_for_downs, max_multiset_deviation,
    sector_basis, write_entropy_csv, write_gap_csv, xxz_sector_gap_with_limit, JointOptions,
};
use iprep_core::rg::{
    fmt_f64, full_spectrum_scan, residual_sq, smale_lower_bound, write_scan_csv, write_scan_sidecar, BetheState,
    GapScan, RgModelSpec, ScanOptions,
};
use iprep_core::tba::{tba_sweep, write_tba_csv, zero_field_fermi_velocity, zero_field_zeta_sq, TbaInput};
use iprep_core::xy::{
    dispersion, gram, liom_gap_bound, liom_matrices, liom_parent_operator, momenta, summarize_spectrum,
    write_point_csv, xy_parent_spectrum, OccupationPattern, Parity, XyPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Files written so far and the assertions evaluated on them.
pub struct Outcome {
    dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub assertions: Vec<Assertion>,
    pub metrics: serde_json::Map<String, Value>,
}

impl Outcome {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            assertions: Vec::new(),
            metrics: Default::default(),
        }
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.files.push(PathBuf::from(name));
        Ok(BufWriter::new(f))
    }

    fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> iprep_core::Result<()>,
    {
        let mut w = self.file(name)?;
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let w = self.file(name)?;
        let mut c = csv::Writer::from_writer(w);
        c.write_record(header)?;
        for r in rows {
            c.write_record(r)?;
        }
        c.flush()?;
        Ok(())
    }

    fn assert(&mut self, name: &str, passed: bool, detail: String) {
        self.assertions.push(Assertion { name: name.into(), passed, detail });
    }

    fn metric(&mut self, name: &str, v: impl Serialize) {
        self.metrics.insert(name.into(), serde_json::to_value(v).expect("metric serializes"));
    }
}

pub fn run(v: &Validated, out: &mut Outcome) -> Result<()> {
    match &v.params {
        Params::GapScaling(p) => gap_scaling(v, p, out),
        Params::Flow(p) => eigenvalue_flow(v, p, out),
        Params::XyParent(p) => xy_parent(v, p, out),
        Params::Liom(p) => liom_bound(v, p, out),
        Params::Tba(p) => tba(p, out),
        Params::EdGaps(p) => ed_gaps(p, out),
        Params::Smale(p) => smale(v, p, out),
        Params::Adiabatic(p) => adiabatic(v, p, out),
        Params::Entanglement(p) => entanglement(v, p, out),
    }
}

fn scan(v: &Validated, spec: &RgModelSpec, g_max: f64, fractions: &[f64], limit: usize) -> Result<GapScan> {
    let opts = ScanOptions {
        limit,
        checkpoints: fractions.iter().map(|f| f * g_max).collect(),
    };
    Ok(full_spectrum_scan(spec, g_max, &v.policy(spec), &opts)?)
}

fn check_limit(what: &'static str, got: usize, limit: usize) -> Result<()> {
    if got > limit {
        return Err(iprep_core::Error::SizeLimit { what, got, limit }.into());
    }
    Ok(())
}

fn recorded(scan: &GapScan) -> Vec<(f64, Vec<BetheState>)> {
    let mut all = scan.checkpoints.clone();
    all.push((scan.g_target, scan.final_states.clone()));
    all
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn gap_scaling(v: &Validated, p: &GapScalingParams, out: &mut Outcome) -> Result<()> {
    let mut rows = Vec::new();
    let (mut ns, mut mins) = (Vec::new(), Vec::new());
    let mut violations = 0;
    check_limit("scan sites", p.n_max, p.scan_limit)?;
    for n in p.n_min..=p.n_max {
        let spec = p.model.spec(n, v.seed())?;
        let s = scan(v, &spec, spec.default_g_target(), &[], p.scan_limit)?;
        out.write(&format!("scans/N{n}.csv"), |w| write_scan_csv(&s, w))?;
        out.write(&format!("scans/N{n}.json"), |w| write_scan_sidecar(&s, w))?;
        let (min, g_min) = s.path_minimum();
        violations += s.bound_violations;
        rows.push(vec![
            n.to_string(),
            fmt_f64(min),
            fmt_f64(g_min),
            fmt_f64(s.final_gap()),
            fmt_f64(s.g_target),
            s.bound_violations.to_string(),
        ]);
        ns.push(n as f64);
        mins.push(min);
    }
    out.csv("gaps.csv", &["N", "min_path_gap", "g_at_min", "final_gap", "g_target", "bound_violations"], &rows)?;
    let fit = loglog_slope(&ns, &mins)?;
    out.json("fit.json", &fit)?;
    let worst = ns.iter().zip(&mins).map(|(n, g)| (n * g - 1.0).abs()).fold(0.0, f64::max);
    out.metric("slope", fit.slope);
    out.assert(
        "slope_in_range",
        (p.slope_range[0]..=p.slope_range[1]).contains(&fit.slope),
        format!("slope {} in {:?}", fit.slope, p.slope_range),
    );
    out.assert("points_near_inverse_n", worst < p.point_tolerance, format!("max |N gap - 1| = {worst:e}"));
    out.assert("magnetization_bound", violations == 0, format!("{violations} violations"));
    Ok(())
}

fn eigenvalue_flow(v: &Validated, p: &FlowParams, out: &mut Outcome) -> Result<()> {
    let spec = p.model.spec(p.n, v.seed())?;
    let g_max = p.g_max.unwrap_or_else(|| spec.default_g_target());
    let fractions: Vec<f64> = (1..p.points).map(|k| k as f64 / p.points as f64).collect();
    let s = scan(v, &spec, g_max, &fractions, p.scan_limit)?;
    out.write("scan.csv", |w| write_scan_csv(&s, w))?;
    out.write("scan.json", |w| write_scan_sidecar(&s, w))?;
    let mut header: Vec<String> = vec!["g".into(), "seed".into(), "M".into()];
    header.extend((1..=p.n).map(|k| format!("q_{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    let (mut worst_res, mut worst_ed): (f64, f64) = (0.0, 0.0);
    let tol = v.policy(&spec).residual_tol;
    for (g, states) in recorded(&s) {
        for st in &states {
            worst_res = worst_res.max(residual_sq(st, &spec));
            let mut row = vec![fmt_f64(g), st.seed.to_string(), st.m.to_string()];
            row.extend(st.q.iter().map(|x| fmt_f64(*x)));
            rows.push(row);
        }
        if p.n <= p.ed_check_max_n {
            let roots: Vec<Vec<f64>> = states.iter().map(|s| s.q.clone()).collect();
            let ed = joint_charge_spectrum(&spec, g, &JointOptions::default())?;
            worst_ed = worst_ed.max(max_multiset_deviation(&roots, &ed.vectors));
        }
    }
    out.csv("flow.csv", &header, &rows)?;
    out.assert("residuals", worst_res < tol, format!("max squared residual {worst_res:e}"));
    if p.n <= p.ed_check_max_n {
        out.assert("matches_exact_diagonalization", worst_ed < 1e-8, format!("max deviation {worst_ed:e}"));
    }
    Ok(())
}

fn draw_point(rng: &mut ChaCha8Rng, gamma: [f64; 2], h: [f64; 2], margin: f64) -> Result<XyPoint> {
    for _ in 0..10_000 {
        let g = rng.random_range(gamma[0]..gamma[1]);
        let hv = rng.random_range(h[0]..h[1]);
        if (hv - 1.0).abs() > margin && g.abs() > 1e-9 {
            return Ok(XyPoint::new(g, hv)?);
        }
    }
    anyhow::bail!("no in-phase point found in the requested ranges")
}

fn xy_parent(v: &Validated, p: &XyParentParams, out: &mut Outcome) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(v.seed().expect("validated seed"));
    let mut rows = Vec::new();
    let (mut gap_err, mut int_err, mut degenerate): (f64, f64, usize) = (0.0, 0.0, 0);
    for _ in 0..p.points {
        let pt = draw_point(&mut rng, p.gamma_range, p.h_range, p.critical_margin)?;
        for _ in 0..p.patterns_per_point {
            let pattern = OccupationPattern::random(p.n, &pt, &mut rng)?;
            let s = xy_parent_spectrum(&pattern, p.n, &pt)?;
            gap_err = gap_err.max((s.gap - 1.0).abs()).max(s.ground.abs());
            int_err = int_err.max(s.max_integer_deviation);
            degenerate += usize::from(s.ground_degeneracy != 1);
            rows.push((pt.gamma, pt.h, s.gap));
        }
    }
    out.write("gaps.csv", |w| write_point_csv(&rows, w))?;
    out.assert("gap_is_one", gap_err < p.tolerance, format!("max |gap - 1| = {gap_err:e}"));
    out.assert("integer_spectrum", int_err < p.tolerance, format!("max deviation {int_err:e}"));
    out.assert("unique_ground_state", degenerate == 0, format!("{degenerate} degenerate"));
    Ok(())
}

fn liom_bound(v: &Validated, p: &LiomParams, out: &mut Outcome) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(v.seed().expect("validated seed"));
    let mut bound_rows = Vec::new();
    let mut dense_rows = Vec::new();
    let (mut off, mut diag): (f64, f64) = (0.0, 0.0);
    let (mut below, mut total) = (0, 0);
    for _ in 0..p.points {
        let pt = draw_point(&mut rng, p.gamma_range, p.h_range, p.critical_margin)?;
        let (ap, am) = liom_matrices(p.n, &pt)?;
        for (parity, a) in [(Parity::Even, ap), (Parity::Odd, am)] {
            let g = gram(&a);
            let ps = momenta::<f64>(p.n, parity)?.momenta;
            for i in 0..p.n {
                for j in 0..p.n {
                    if i == j {
                        diag = diag.max((g[(i, i)] - p.n as f64 / 2.0 * dispersion(ps[i], &pt).powi(2)).abs());
                    } else {
                        off = off.max(g[(i, j)].abs());
                    }
                }
            }
        }
        let bound = liom_gap_bound(p.n, &pt)?;
        bound_rows.push((pt.gamma, pt.h, bound.grid));
        if p.n <= p.dense_max_n {
            for _ in 0..p.patterns_per_point {
                let pattern = OccupationPattern::random(p.n, &pt, &mut rng)?;
                let s = summarize_spectrum(liom_parent_operator(&pattern, p.n, &pt)?.to_dense()?.eigenvalues());
                // A degenerate ground level means no gap above the target.
                let gap = if s.ground_degeneracy == 1 { s.gap } else { 0.0 };
                below += usize::from(bound.grid <= gap + 1e-9);
                total += 1;
                dense_rows.push(vec![
                    fmt_f64(pt.gamma),
                    fmt_f64(pt.h),
                    fmt_f64(bound.grid),
                    fmt_f64(gap),
                    s.ground_degeneracy.to_string(),
                ]);
            }
        }
    }
    out.write("bound.csv", |w| write_point_csv(&bound_rows, w))?;
    if !dense_rows.is_empty() {
        out.csv("dense_check.csv", &["gamma", "h", "bound", "dense_gap", "ground_degeneracy"], &dense_rows)?;
    }
    out.metric("gram_max_off_diagonal", off);
    out.metric("gram_max_diagonal_deviation", diag);
    out.assert(
        "gram_diagonal",
        off < 1e-10 && diag < 1e-10,
        format!("max off-diagonal {off:e}, max |diag - (N/2) eps^2| {diag:e}"),
    );
    if total > 0 {
        out.assert("bound_below_dense_gap", below == total, format!("{below}/{total}"));
    }
    Ok(())
}

fn tba(p: &TbaParams, out: &mut Outcome) -> Result<()> {
    let inputs: Vec<TbaInput> = p
        .deltas
        .iter()
        .flat_map(|&d| p.fields.iter().map(move |&h| (d, h)))
        .map(|(d, h)| TbaInput { grid: p.grid, boundary: p.boundary, ..TbaInput::new(d, h) })
        .collect();
    let rows = tba_sweep(&inputs)?;
    out.write("tba.csv", |w| write_tba_csv(&rows, w))?;
    let worst_res = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let positive = rows.iter().all(|r| r.observables.v_f > 0.0 && r.observables.zeta_sq > 0.0);
    let zero_dev = rows
        .iter()
        .filter(|r| r.h == 0.0)
        .map(|r| {
            (r.observables.v_f - zero_field_fermi_velocity(r.delta))
                .abs()
                .max((r.observables.zeta_sq - zero_field_zeta_sq(r.delta)).abs())
        })
        .fold(0.0, f64::max);
    out.assert("converged", worst_res < 1e-10, format!("max residual {worst_res:e}"));
    out.assert("positive_observables", positive, String::new());
    if rows.iter().any(|r| r.h == 0.0) {
        out.assert(
            "zero_field_closed_forms",
            zero_dev < p.zero_field_tolerance,
            format!("max deviation {zero_dev:e}"),
        );
    }
    Ok(())
}

fn ed_gaps(p: &EdGapParams, out: &mut Outcome) -> Result<()> {
    for &n in &p.sizes {
        let downs = (n as f64 * p.down_fraction).round() as usize;
        check_limit("sector dimension", sector_basis(n, magnetization_for_downs(n, downs))?.dim(), p.max_sector_dim)?;
    }
    let mut recs = Vec::new();
    for &n in &p.sizes {
        let downs = (n as f64 * p.down_fraction).round() as usize;
        recs.push(xxz_sector_gap_with_limit(n, magnetization_for_downs(n, downs), p.delta, p.max_sector_dim)?);
    }
    out.write("gaps.csv", |w| write_gap_csv(&recs, w))?;
    let xs: Vec<f64> = recs.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = recs.iter().map(|r| r.gap).collect();
    out.assert("gaps_positive", ys.iter().all(|g| *g > 0.0), String::new());
    if ys.iter().all(|g| *g > 0.0) {
        let fit = loglog_slope(&xs, &ys)?;
        out.json("fit.json", &fit)?;
        out.metric("slope", fit.slope);
        if let Some(want) = p.expected_slope {
            out.assert(
                "slope",
                (fit.slope - want).abs() < p.slope_tolerance,
                format!("slope {} vs {want} +- {}", fit.slope, p.slope_tolerance),
            );
        }
    }
    Ok(())
}

fn smale(v: &Validated, p: &SmaleParams, out: &mut Outcome) -> Result<()> {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let (mut same_viol, mut any_viol) = (0, 0);
    // Per N: smallest bound and smallest same-sector separation over all checkpoints.
    let mut per_n: Vec<(f64, f64)> = Vec::new();
    check_limit("scan sites", p.n_max, p.scan_limit)?;
    for n in p.n_min..=p.n_max {
        let spec = p.model.spec(n, v.seed())?;
        let gt = spec.default_g_target();
        let s = scan(v, &spec, gt, &p.checkpoints, p.scan_limit)?;
        let (mut n_bound, mut n_sep) = (f64::INFINITY, f64::INFINITY);
        for (g, states) in recorded(&s) {
            let (mut min_bound, mut min_sep) = (f64::INFINITY, f64::INFINITY);
            for a in &states {
                let b = smale_lower_bound(a, &spec).value;
                let near = |same: bool| {
                    states
                        .iter()
                        .filter(|t| t.seed != a.seed && (!same || t.m == a.m))
                        .map(|t| dist(&a.q, &t.q))
                        .fold(f64::INFINITY, f64::min)
                };
                let (ns, na) = (near(true), near(false));
                same_viol += usize::from(b > ns);
                any_viol += usize::from(b > na);
                min_bound = min_bound.min(b);
                min_sep = min_sep.min(ns);
                rows.push(vec![
                    n.to_string(),
                    fmt_f64(g),
                    a.seed.to_string(),
                    a.m.to_string(),
                    fmt_f64(b),
                    fmt_f64(ns),
                    fmt_f64(na),
                ]);
            }
            n_bound = n_bound.min(min_bound);
            n_sep = n_sep.min(min_sep);
            summary.push(vec![n.to_string(), fmt_f64(g), fmt_f64(min_bound), fmt_f64(min_sep)]);
        }
        per_n.push((n_bound, n_sep));
    }
    let (first, last) = (per_n[0], per_n[per_n.len() - 1]);
    let (bound_drop, sep_drop) = (first.0 / last.0, first.1 / last.1);
    out.metric("bound_drop", bound_drop);
    out.metric("separation_drop", sep_drop);
    out.csv(
        "smale.csv",
        &["N", "g", "seed", "M", "smale_bound", "nearest_same_sector", "nearest_any"],
        &rows,
    )?;
    out.csv("summary.csv", &["N", "g", "min_bound", "min_same_sector_distance"], &summary)?;
    out.metric("cross_sector_violations", any_viol);
    out.assert("bound_below_same_sector_distance", same_viol == 0, format!("{same_viol} violations"));
    out.assert(
        "bound_shrinks_faster_than_separation",
        per_n.len() < 2 || bound_drop > 2.0 * sep_drop,
        format!(
            "N={}..{}: smallest bound drops x{bound_drop:.2}, smallest separation x{sep_drop:.2}",
            p.n_min, p.n_max
        ),
    );
    Ok(())
}

fn adiabatic(v: &Validated, p: &AdiabaticParams, out: &mut Outcome) -> Result<()> {
    let spec = p.model.spec(p.n, v.seed())?;
    let policy = v.policy(&spec);
    let s = full_spectrum_scan(&spec, p.g_end, &policy, &ScanOptions::default())?;
    let (gap_min, _) = s.path_minimum();
    let step = s
        .steps
        .iter()
        .min_by(|a, b| a.min_gap.total_cmp(&b.min_gap))
        .context("empty scan")?;
    let fam = RgParentFamily::new(spec, step.argmin_seed_a, p.g_end, policy)?;
    let psi0 = fam.initial_state();
    let target = fam.exact_state(p.g_end)?;

    let search = doubling_search(&psi0, &fam, &Schedule::new(0.0, p.g_end, p.t_start)?, &target, p.dt, p.threshold, p.max_doublings)?;
    out.write("doubling.csv", |w| write_fidelity_csv(&search, w))?;
    let found = search.last().context("empty search")?;
    out.assert(
        "threshold_reached",
        found.final_fidelity >= p.threshold,
        format!("F = {} at T = {}", found.final_fidelity, found.total_time),
    );

    let t0 = found.total_time / (1u64 << p.sweep_doublings) as f64;
    let times: Vec<f64> = (0..=p.sweep_doublings).map(|k| t0 * (1u64 << k) as f64).collect();
    let sweep = fidelity_sweep(&psi0, &fam, &Schedule::new(0.0, p.g_end, t0)?, &target, &times, p.dt)?;
    out.write("sweep.csv", |w| write_fidelity_csv(&sweep, w))?;
    let inf: Vec<f64> = sweep.iter().map(|q| 1.0 - q.final_fidelity).collect();
    out.assert(
        "infidelity_monotone",
        inf.windows(2).all(|w| w[1] <= 1.05 * w[0]),
        format!("{inf:?}"),
    );

    if p.trotter_levels > 0 {
        let sch = Schedule::new(0.0, p.g_end, p.trotter_time)?;
        let tc = trotter_convergence(&psi0, &fam, &sch, &target, p.trotter_base_steps, p.trotter_levels, p.trotter_reference_factor)?;
        let rows: Vec<Vec<String>> = tc
            .iter()
            .map(|t| {
                vec![t.steps.to_string(), fmt_f64(t.dt), fmt_f64(t.infidelity), fmt_f64(t.state_error), fmt_f64(t.fidelity_shift)]
            })
            .collect();
        out.csv("trotter.csv", &["steps", "dt", "infidelity", "state_error", "fidelity_shift"], &rows)?;
        let window = &tc[tc.len() - 4.min(tc.len())..];
        let dts: Vec<f64> = window.iter().map(|t| t.dt).collect();
        let inf_slope = loglog_slope(&dts, &window.iter().map(|t| t.infidelity).collect::<Vec<_>>())?.slope;
        let angle_slope = loglog_slope(&dts, &window.iter().map(|t| t.state_error).collect::<Vec<_>>())?.slope;
        out.metric("state_error_slope", angle_slope);
        out.assert(
            "first_order_convergence",
            (0.8..=1.2).contains(&inf_slope),
            format!("infidelity-vs-dt slope {inf_slope}; state angle slope {angle_slope}"),
        );
    }

    // Runtime and depth scaling figures from the parent operator along the path.
    let g_mid = p.g_end / 2.0;
    let h = 1e-3 * p.g_end;
    let hm = fam.at(g_mid - h)?;
    let h0 = fam.at(g_mid)?;
    let hp = fam.at(g_mid + h)?;
    let mut d1 = hp.clone();
    d1.add_scaled(&hm, -1.0);
    let mut d2 = hp;
    d2.add_scaled(&hm, 1.0);
    d2.add_scaled(&h0, -2.0);
    let norm_d1 = d1.norm1() / (2.0 * h);
    let norm_d2 = d2.norm1() / (h * h);
    let (strings, max_b) = fam.at(p.g_end)?.support_count();
    let t_ad = adiabatic_time(norm_d1, norm_d2, gap_min, p.error_budget)?;
    let depth = depth_estimate(p.n as f64, strings as f64, t_ad, max_b, p.error_budget);
    out.json(
        "estimates.json",
        &json!({
            "gap_min": gap_min,
            "norm_d1": norm_d1,
            "norm_d2": norm_d2,
            "strings": strings,
            "max_b": max_b,
            "error_budget": p.error_budget,
            "adiabatic_time": t_ad,
            "depth_estimate": depth,
            "found_time": found.total_time,
        }),
    )?;
    Ok(())
}

fn entanglement(v: &Validated, p: &EntanglementParams, out: &mut Outcome) -> Result<()> {
    let spec = p.model.spec(p.n, v.seed())?;
    let sub: Vec<usize> = p.subsystem.clone().unwrap_or_else(|| (1..=p.n / 2).collect());
    let js = joint_charge_spectrum(&spec, p.g, &JointOptions::default())?;
    let mut s = Vec::with_capacity(js.vectors.len());
    for i in 0..js.vectors.len() {
        let col: Vec<f64> = js.eigenvectors.column(i).iter().copied().collect();
        s.push(entanglement_entropy_real(&col, p.n, &sub)?);
    }
    out.write("entropy.csv", |w| write_entropy_csv(p.n, &s, w))?;
    let cap = sub.len().min(p.n - sub.len()) as f64 * LN_2;
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    out.metric("min", lo);
    out.metric("max", hi);
    out.metric("mean", mean);
    out.assert("state_count", s.len() == 1 << p.n, format!("{} states", s.len()));
    out.assert("entropy_bounds", lo >= -1e-12 && hi <= cap + 1e-12, format!("[{lo}, {hi}] within [0, {cap}]"));
    Ok(())
}
