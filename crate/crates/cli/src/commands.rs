use frachs::extension::{extend, extension_energy, recommended_height, trace_defect};
use frachs::fracops::{seminorm_sq, shift_cells};
use frachs::functionals::{gamma_h, Problem};
use frachs::grid::io::{write_csv, write_fxv1};
use frachs::profiles::{bubble, named, ProfileKind};
use frachs::solvers::{
    minimize_hardy_ratio, minimize_quotient, monotone_from, mountain_pass, representable_shifts,
    translate_scan, MinimizerConfig, MinimizerStatus,
};
use frachs::{Field, ProblemParams};
use serde_json::json;

use crate::config::{
    parse_minimize, parse_mountain_pass, Command, ExtensionSolver, HardyConstantSolver, QuotientSolver,
    RunConfig, ScanSource, TranslateScanSolver,
};
use crate::error::CliError;
use crate::output::{csv, num, Outcome};

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::HardyConstant => hardy_constant(cfg),
        Command::Quotient => quotient(cfg),
        Command::Minimize => minimize(cfg),
        Command::TranslateScan => scan(cfg),
        Command::MountainPass => pass(cfg),
        Command::ExtensionCheck => extension_check(cfg),
        Command::Sweep => unreachable!("sweeps are dispatched by the sweep module"),
    }
}

fn profile_name(p: ProfileKind) -> String {
    serde_json::to_value(p).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn head(cfg: &RunConfig) -> Vec<String> {
    let p = cfg.problem;
    vec![
        p.n.to_string(),
        num(p.alpha),
        num(p.s),
        num(p.gamma),
        cfg.grid.npts.to_string(),
        num(cfg.grid.half_length),
    ]
}

fn field_files(stem: &str, u: &Field) -> Result<Vec<(String, Vec<u8>)>, CliError> {
    let mut text = Vec::new();
    write_csv(u, &mut text)?;
    let mut bin = Vec::new();
    write_fxv1(u, &mut bin)?;
    Ok(vec![(format!("{stem}.csv"), text), (format!("{stem}.fxv1"), bin)])
}

fn hardy_constant(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver: HardyConstantSolver = cfg.solver()?;
    let n = cfg.problem.n;
    let alphas = if solver.alphas.is_empty() { vec![cfg.problem.alpha] } else { solver.alphas.clone() };
    for &a in &alphas {
        ProblemParams::new(n, a, 0.0, 0.0)?;
    }
    let grid = solver.minimize.as_ref().map(|_| cfg.grid()).transpose()?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &a in &alphas {
        let gh = gamma_h(n, a);
        let ratio = match (&solver.minimize, &grid) {
            (Some(hc), Some(g)) => {
                let init = named(ProfileKind::RandomSmooth, g, a, cfg.seed)?;
                Some(minimize_hardy_ratio(&init, a, hc)?.ratio)
            }
            _ => None,
        };
        let fmt = |x: Option<f64>| x.map(num).unwrap_or_default();
        rows.push(vec![n.to_string(), num(a), num(gh), fmt(ratio), fmt(ratio.map(|r| r / gh))]);
        entries.push(json!({"alpha": a, "gamma_h": gh, "ratio": ratio}));
    }
    let values: Vec<f64> = alphas.iter().map(|&a| gamma_h(n, a)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let joined = alphas.iter().map(|&a| num(a)).collect::<Vec<_>>().join(";");
    Ok(Outcome {
        converged: true,
        note: None,
        result: json!({"n": n, "table": entries}),
        summary: vec![n.to_string(), joined, num(lo), num(hi)],
        files: vec![("hardy_constant.csv".into(), csv("hardy-constant", "hardy_constant.csv", &rows))],
    })
}

fn quotient(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver: QuotientSolver = cfg.solver()?;
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    let u = named(solver.profile, &grid, params.alpha, cfg.seed)?;
    let problem = Problem::new(&grid, &params)?;
    let q = problem.quotient(&u)?;
    let e = problem.energy(&u)?;
    let mut summary = head(cfg);
    summary.push(profile_name(solver.profile));
    summary.extend(
        [q.spectral, q.hardy, q.hs_term, q.sob_term, q.quotient, e.energy, e.nehari_residual].map(num),
    );
    Ok(Outcome {
        converged: true,
        note: None,
        result: json!({"profile": solver.profile, "quotient": q, "energy": e}),
        summary,
        files: Vec::new(),
    })
}

fn status_name(s: MinimizerStatus) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn minimize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = parse_minimize(cfg)?;
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    let init = named(solver.init, &grid, params.alpha, cfg.seed)?;
    let out = minimize_quotient(&init, &params, &solver.config)?;
    let converged = out.status == MinimizerStatus::Converged;
    // the initial row and a final symmetrization row carry no residual
    let iterations = out.history.iter().filter(|h| h.residual.is_finite()).count();
    let r = out.report;
    let mut summary = head(cfg);
    summary.push(status_name(out.status));
    summary.push(iterations.to_string());
    summary.extend([r.quotient, r.spectral, r.hardy, r.hs_term, r.sob_term, out.boundary_mass].map(num));
    let history: Vec<Vec<String>> = out
        .history
        .iter()
        .map(|h| vec![h.iter.to_string(), num(h.quotient), num(h.residual), num(h.boundary_mass)])
        .collect();
    let mut files = vec![("history.csv".to_string(), csv("minimize", "history.csv", &history))];
    files.extend(field_files("field", &out.field)?);
    let normalization = if solver.config.renormalize { "hs_term = 1" } else { "none" };
    Ok(Outcome {
        converged,
        note: (!converged).then(|| format!("minimizer stopped with status {}", status_name(out.status))),
        result: json!({
            "init": solver.init,
            "status": out.status,
            "iterations": iterations,
            "report": r,
            "boundary_mass": out.boundary_mass,
            "normalization": normalization,
            "history": out.history,
        }),
        summary,
        files,
    })
}

/// Moves the largest |u| to the node just right of the origin.
fn centered(u: &Field) -> Result<Field, CliError> {
    let g = u.grid();
    let v = u.values();
    let peak = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    let idx = g.multi_index(peak);
    let half = (g.points_per_axis() / 2) as i64;
    let steps: Vec<i64> = idx[..g.dim()].iter().map(|&i| half - i as i64).collect();
    Ok(shift_cells(u, &steps)?)
}

fn scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver: TranslateScanSolver = cfg.solver()?;
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    if params.s != 0.0 {
        return Err(CliError::Validation(format!(
            "hypothesis `s = 0` violated: the translation scan needs s = 0, got s = {}",
            params.s
        )));
    }
    let free = ProblemParams::new(params.n, params.alpha, 0.0, 0.0)?;
    let (source, reference) = match solver.source {
        ScanSource::Bubble => {
            let b = bubble(&grid, params.alpha, 1.0, None);
            let q = Problem::new(&grid, &free)?.quotient(&b)?.quotient;
            (b, q)
        }
        ScanSource::Extremal => {
            let init = named(ProfileKind::RandomSmooth, &grid, params.alpha, cfg.seed)?;
            let out = minimize_quotient(&init, &free, &MinimizerConfig::default())?;
            (centered(&out.field)?, out.report.quotient)
        }
    };
    let deltas = match &solver.deltas {
        Some(d) => d.clone(),
        None => representable_shifts(&source, &params, solver.step_cells as f64 * grid.dx()),
    };
    let rows = translate_scan(&source, &params, &deltas)?;
    let q: Vec<f64> = rows.iter().map(|r| r.quotient).collect();
    let from = monotone_from(&q, false);
    let (delta0, last) = match (rows.get(from), rows.last()) {
        (Some(a), Some(b)) => (a.delta, b.quotient),
        _ => (f64::NAN, f64::NAN),
    };
    let mut summary = head(cfg);
    summary.push(if solver.source == ScanSource::Bubble { "bubble" } else { "extremal" }.into());
    summary.push(rows.len().to_string());
    summary.push(from.to_string());
    summary.extend([delta0, last, reference, last / reference].map(num));
    let table: Vec<Vec<String>> =
        rows.iter().map(|r| vec![num(r.delta), num(r.quotient), num(r.retained)]).collect();
    Ok(Outcome {
        converged: true,
        note: None,
        result: json!({
            "source": solver.source,
            "rows": rows,
            "monotone_from": from,
            "delta0": delta0,
            "final_quotient": last,
            "reference": reference,
        }),
        summary,
        files: vec![("scan.csv".into(), csv("translate-scan", "scan.csv", &table))],
    })
}

fn pass(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = parse_mountain_pass(cfg)?;
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    let seed = named(solver.init, &grid, params.alpha, cfg.seed)?;
    let rep = mountain_pass(&seed, &params, &solver.config)?;
    let problem = Problem::new(&grid, &params)?;
    let mut path_rows = Vec::new();
    let mut path_energy = Vec::new();
    for (i, p) in rep.path.iter().enumerate() {
        let e = problem.energy(p)?.energy;
        path_rows.push(vec![i.to_string(), num(problem.metric_norm_sq(p).sqrt()), num(e)]);
        path_energy.push(e);
    }
    let relative = rep.ps_residual / rep.maximizer_norm;
    let iterations = rep.history.last().map_or(0, |h| h.iter);
    let mut summary = head(cfg);
    summary.push(rep.converged.to_string());
    summary.push(iterations.to_string());
    summary.extend(
        [
            rep.c_est,
            rep.c_star,
            rep.constants.s0,
            rep.constants.ss,
            rep.ps_residual,
            relative,
            rep.nehari_pairing,
            rep.theta,
            rep.zeta,
            rep.mu,
            rep.positive_mass_fraction,
            rep.geometry.rho,
            rep.geometry.t0,
        ]
        .map(num),
    );
    let history: Vec<Vec<String>> =
        rep.history.iter().map(|h| vec![h.iter.to_string(), num(h.energy), num(h.residual)]).collect();
    let mut files = vec![
        ("history.csv".to_string(), csv("mountain-pass", "history.csv", &history)),
        ("path.csv".to_string(), csv("mountain-pass", "path.csv", &path_rows)),
    ];
    files.extend(field_files("maximizer", &rep.maximizer)?);
    let note = (!rep.converged).then(|| {
        if rep.c_est >= rep.c_star {
            format!("c_est = {:e} is not below c* = {:e}", rep.c_est, rep.c_star)
        } else {
            format!("residual {relative:e} above tol {:e}", solver.config.tol)
        }
    });
    Ok(Outcome {
        converged: rep.converged,
        note,
        result: json!({
            "init": solver.init,
            "converged": rep.converged,
            "c_est": rep.c_est,
            "c_star": rep.c_star,
            "constants": rep.constants,
            "ps_residual": rep.ps_residual,
            "maximizer_norm": rep.maximizer_norm,
            "relative_residual": relative,
            "nehari_pairing": rep.nehari_pairing,
            "theta": rep.theta,
            "zeta": rep.zeta,
            "mu": rep.mu,
            "positive_mass_fraction": rep.positive_mass_fraction,
            "geometry": rep.geometry,
            "path_energy": path_energy,
            "normalization": "sign chosen so the positive part carries most Hardy-Sobolev mass",
            "history": rep.history,
        }),
        summary,
        files,
    })
}

fn extension_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver: ExtensionSolver = cfg.solver()?;
    let (params, grid) = (cfg.params()?, cfg.grid()?);
    let u = named(solver.profile, &grid, params.alpha, cfg.seed)?;
    let height = solver.height.unwrap_or_else(|| recommended_height(&grid));
    let w = extend(&u, params.alpha, height, solver.levels)?;
    let semi = seminorm_sq(&u, params.alpha);
    let energy = extension_energy(&w);
    let rel = (energy - semi).abs() / semi;
    let defect = trace_defect(&w, &u)?;
    let mut summary = head(cfg);
    summary.push(profile_name(solver.profile));
    summary.push(solver.levels.to_string());
    summary.extend([height, semi, energy, rel, defect].map(num));
    summary.push(w.short_strip().to_string());
    let mut files = Vec::new();
    if solver.write_profiles {
        let mut buf = Vec::new();
        w.write_profiles_csv(&mut buf)?;
        files.push(("profiles.csv".to_string(), buf));
    }
    Ok(Outcome {
        converged: true,
        note: None,
        result: json!({
            "profile": solver.profile,
            "levels": solver.levels,
            "height": height,
            "seminorm_sq": semi,
            "extension_energy": energy,
            "rel_err": rel,
            "trace_defect": defect,
            "short_strip": w.short_strip(),
        }),
        summary,
        files,
    })
}
