use newton_ensemble::amoeba::{amoeba_points, tentacle_trials};
use newton_ensemble::ensemble::{zero_statistics, Sampler, SampleStream};
use newton_ensemble::oracles::{compare, OracleCase};
use newton_ensemble::szego::KernelEvaluator;
use newton_ensemble::{LatticePolytope, PolytopeSpec, RegionSolver, Tolerances};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Coords, Format, PolytopeArgs, ToleranceArgs};
use crate::output::{emit, render, validate_file, Artifact, Provenance, Table};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let command = &cli.command;
    if let Command::Validate { files } = command {
        return validate(files);
    }
    let config = serde_json::to_value(cli).map_err(CliError::io)?;
    let provenance = Provenance::new(command.name(), config, command.seed(), cli.global.deterministic);
    let requested = cli.global.format;
    let (artifact, check) = match command {
        Command::Info { poly } => (info(&load(poly, true)?, json_only(requested)?)?, None),
        Command::Regions { poly, grid, coords, tol } => {
            let p = load(poly, false)?;
            let points = parse_grid(grid, p.dim(), *coords)?;
            (table_artifact(regions(&p, &points, tol)?, requested)?, None)
        }
        Command::Decay { poly, s, coords, action_steps, tol } => {
            json_only(requested)?;
            let p = load(poly, false)?;
            (decay(&p, &parse_point(s, p.dim(), *coords)?, *action_steps, tol)?, None)
        }
        Command::Mass { poly, n, grid, coords } => {
            let p = load(poly, false)?;
            let points = parse_grid(grid, p.dim(), *coords)?;
            (table_artifact(mass(&p, *n, &points)?, requested)?, None)
        }
        Command::Converge { poly, s, coords, n_min, n_max, n_step, tol } => {
            let p = load(poly, false)?;
            let s = parse_point(s, p.dim(), *coords)?;
            if *n_min < 1 || n_max < n_min || *n_step < 1 {
                return Err(CliError::Config("need 1 <= Nmin <= Nmax and Nstep >= 1".into()));
            }
            let ns: Vec<i64> = (*n_min..=*n_max).step_by(*n_step as usize).collect();
            (table_artifact(converge(&p, &s, &ns, tol)?, requested)?, None)
        }
        Command::McZeros { poly, n, trials, seed } => {
            let p = load(poly, false)?;
            positive_n(*n)?;
            let stats = zero_statistics(&p, *n, *trials, *seed)?;
            match requested.unwrap_or(Format::Json) {
                Format::Json => (Artifact::Json(serde_json::to_value(&stats).map_err(CliError::io)?), None),
                Format::Csv => {
                    let mut cols = vec!["trial".to_string()];
                    cols.extend(axis_names("s", p.dim()));
                    cols.extend(["class".to_string(), "face_dim".to_string()]);
                    let mut table = Table::new(cols);
                    for z in &stats.points {
                        let mut row = vec![z.trial.to_string()];
                        row.extend(z.s.iter().map(f64::to_string));
                        row.push(label(&z.class));
                        row.push(z.face_dim.to_string());
                        table.rows.push(row);
                    }
                    (Artifact::Csv(table), None)
                }
            }
        }
        Command::Amoeba { poly, n, trials, seed, trial, grid, coords, phases } => {
            let p = load(poly, false)?;
            positive_n(*n)?;
            match requested.unwrap_or(Format::Json) {
                Format::Json => {
                    let summary = tentacle_trials(&p, *n, *trials, *seed)?;
                    (Artifact::Json(serde_json::to_value(&summary).map_err(CliError::io)?), None)
                }
                Format::Csv => {
                    let s1: Vec<f64> = parse_grid(grid, 1, *coords)?.into_iter().map(|s| s[0] / 2.0).collect();
                    let f = Sampler::new(&p, *n)?.draw(&mut SampleStream::new(*seed, *trial));
                    let sample = amoeba_points(&f, &s1, *phases)?;
                    let mut table = Table::new(axis_names("s", 2));
                    table.rows = sample.points.iter().map(|[a, b]| vec![(2.0 * a).to_string(), (2.0 * b).to_string()]).collect();
                    (Artifact::Csv(table), None)
                }
            }
        }
        Command::OracleCheck { case, grid, margin } => {
            json_only(requested)?;
            if margin.is_nan() || *margin < 0.0 {
                return Err(CliError::Config("margin must be nonnegative".into()));
            }
            let case = parse_case(case)?;
            let points: Vec<[f64; 2]> = parse_grid(grid, 2, Coords::S)?.into_iter().map(|s| [s[0], s[1]]).collect();
            let r = compare(case, &points, *margin)?;
            let passed = r.passed();
            let mut value = serde_json::to_value(&r).map_err(CliError::io)?;
            value["passed"] = json!(passed);
            let check = (!passed).then(|| format!("{} disagrees with its oracle", r.case));
            (Artifact::Json(value), check)
        }
        Command::Validate { .. } => unreachable!(),
    };
    emit(&render(&artifact, &provenance)?, cli.global.output.as_deref())?;
    match check {
        Some(msg) => Err(CliError::Check(msg)),
        None => Ok(()),
    }
}

fn load(args: &PolytopeArgs, polytope_query: bool) -> Result<LatticePolytope> {
    let text = std::fs::read_to_string(&args.polytope)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.polytope.display())))?;
    let spec: PolytopeSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.polytope.display())))?;
    let poly = spec.build()?;
    let report = poly.is_delzant();
    if !report.is_delzant {
        if !args.allow_non_delzant {
            return Err(CliError::Config(format!(
                "polytope is not Delzant at {:?}: {}",
                report.failing_vertex.unwrap_or_default(),
                report.reason.unwrap_or_default()
            )));
        }
        if !polytope_query {
            return Err(CliError::Config("--allow-non-delzant only permits polytope queries (info)".into()));
        }
    }
    Ok(poly)
}

fn json_only(requested: Option<Format>) -> Result<Format> {
    match requested {
        Some(Format::Csv) => Err(CliError::Config("this command writes JSON only".into())),
        _ => Ok(Format::Json),
    }
}

fn positive_n(n: i64) -> Result<()> {
    if n < 1 {
        return Err(CliError::Config("N must be at least 1".into()));
    }
    Ok(())
}

fn to_s(value: f64, coords: Coords) -> Result<f64> {
    match coords {
        Coords::S => Ok(value),
        Coords::Moduli if value > 0.0 => Ok(2.0 * value.ln()),
        Coords::Moduli => Err(CliError::Config(format!("modulus {value} is not positive"))),
    }
}

fn parse_f64(text: &str) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| CliError::Config(format!("not a number: {text:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("not finite: {text:?}")));
    }
    Ok(v)
}

pub fn parse_point(text: &str, dim: usize, coords: Coords) -> Result<Vec<f64>> {
    let s: Vec<f64> = text.split(',').map(|t| parse_f64(t).and_then(|v| to_s(v, coords))).collect::<Result<_>>()?;
    if s.len() != dim {
        return Err(CliError::Config(format!("point has {} coordinates, polytope dimension is {dim}", s.len())));
    }
    Ok(s)
}

/// Cartesian product of `a:b:n` axes joined by `x`, first axis outermost.
pub fn parse_grid(text: &str, dim: usize, coords: Coords) -> Result<Vec<Vec<f64>>> {
    let axes: Vec<Vec<f64>> = text
        .split('x')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            let [a, b, n] = parts[..] else {
                return Err(CliError::Config(format!("grid axis {axis:?} is not a:b:n")));
            };
            let (a, b) = (parse_f64(a)?, parse_f64(b)?);
            let n: usize = n.trim().parse().map_err(|_| CliError::Config(format!("bad point count in {axis:?}")))?;
            if n < 2 {
                return Err(CliError::Config(format!("grid axis {axis:?} needs n >= 2")));
            }
            (0..n).map(|k| to_s(a + (b - a) * k as f64 / (n - 1) as f64, coords)).collect()
        })
        .collect::<Result<_>>()?;
    if axes.len() != dim {
        return Err(CliError::Config(format!("grid has {} axes, polytope dimension is {dim}", axes.len())));
    }
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points.into_iter().flat_map(|p| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    Ok(points)
}

fn parse_case(text: &str) -> Result<OracleCase> {
    match text.to_ascii_lowercase().as_str() {
        "square" => Ok(OracleCase::Square),
        "trapezoid" | "f1" => Ok(OracleCase::Trapezoid),
        other => other
            .strip_prefix('f')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n >= 2)
            .map(OracleCase::Hirzebruch)
            .ok_or_else(|| CliError::Config(format!("unknown oracle case {text:?}"))),
    }
}

fn tolerances(t: &ToleranceArgs) -> Result<Tolerances> {
    let given = [t.residual_tol, t.feasibility_tol, t.transition_tol, t.hessian_step];
    if let Some(bad) = given.into_iter().flatten().find(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Config(format!("tolerance {bad} must be positive and finite")));
    }
    let d = Tolerances::default();
    Ok(Tolerances {
        residual: t.residual_tol.unwrap_or(d.residual),
        feasibility: t.feasibility_tol.unwrap_or(d.feasibility),
        transition: t.transition_tol.unwrap_or(d.transition),
        hessian_step: t.hessian_step.unwrap_or(d.hessian_step),
        max_iterations: t.max_iterations.unwrap_or(d.max_iterations),
    })
}

fn axis_names(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("{prefix}_{j}")).collect()
}

fn label(v: &impl serde::Serialize) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn table_artifact(table: Table, requested: Option<Format>) -> Result<Artifact> {
    Ok(match requested.unwrap_or(Format::Csv) {
        Format::Csv => Artifact::Csv(table),
        Format::Json => {
            let cell = |c: &String| match c.as_str() {
                "true" => json!(true),
                "false" => json!(false),
                _ => c.parse::<f64>().map(|v| json!(v)).unwrap_or_else(|_| json!(c)),
            };
            let rows: Vec<Vec<Value>> = table.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            Artifact::Json(json!({ "columns": table.columns, "rows": rows }))
        }
    })
}

fn info(poly: &LatticePolytope, _format: Format) -> Result<Artifact> {
    let volume = poly.volume();
    let faces: Vec<Value> = poly
        .faces()
        .iter()
        .map(|f| {
            let mut v = serde_json::to_value(f).unwrap_or(Value::Null);
            v["on_simplex_boundary"] = json!(poly.face_on_simplex_boundary(f));
            v
        })
        .collect();
    let mut out = json!({
        "dim": poly.dim(),
        "p": poly.degree(),
        "vertices": poly.vertices(),
        "facets": poly.facets(),
        "delzant": poly.is_delzant(),
        "volume": volume.to_string(),
        "volume_f64": *volume.numer() as f64 / *volume.denom() as f64,
        "lattice_points": poly.lattice_points(1)?.len(),
        "faces": faces,
    });
    if poly.dim() == 2 {
        out["boundary"] = serde_json::to_value(poly.boundary_decomposition()?).map_err(CliError::io)?;
    }
    Ok(Artifact::Json(out))
}

fn regions(poly: &LatticePolytope, points: &[Vec<f64>], tol: &ToleranceArgs) -> Result<Table> {
    let solver = RegionSolver::with_tolerances(poly, tolerances(tol)?)?;
    let m = poly.dim();
    let mut cols = axis_names("s", m);
    cols.extend(["face", "face_dim", "allowed", "transition", "accepting", "slack", "b"].map(String::from));
    cols.extend(axis_names("q", m));
    cols.extend(axis_names("tau", m));
    cols.push("residual".into());
    let rows = points
        .par_iter()
        .map(|s| {
            let r = solver.solve(s)?;
            let mut row: Vec<String> = s.iter().map(f64::to_string).collect();
            row.extend([
                r.face.0.to_string(),
                r.face_dim.to_string(),
                r.allowed.to_string(),
                r.transition.to_string(),
                r.accepting.to_string(),
                r.slack.to_string(),
                r.b.to_string(),
            ]);
            row.extend(r.q.iter().map(f64::to_string));
            row.extend(r.tau.iter().map(f64::to_string));
            row.push(r.residual.to_string());
            Ok(row)
        })
        .collect::<std::result::Result<Vec<_>, newton_ensemble::Error>>()?;
    Ok(Table { columns: cols, rows })
}

fn decay(poly: &LatticePolytope, s: &[f64], action_steps: Option<usize>, tol: &ToleranceArgs) -> Result<Artifact> {
    let solver = RegionSolver::with_tolerances(poly, tolerances(tol)?)?;
    let region = solver.solve(s)?;
    let action = match action_steps {
        Some(steps) => Some(solver.decay_b_action(s, steps)?),
        None => None,
    };
    let (psi, psi_error) = match solver.psi_hessian(s) {
        Ok(h) => (serde_json::to_value(h).map_err(CliError::io)?, Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    Ok(Artifact::Json(json!({
        "s": s,
        "region": region,
        "b": region.b,
        "b_action": action,
        "u_infty": solver.u_infty(s)?,
        "grad_b": solver.grad_b(s)?,
        "psi_hessian": psi,
        "psi_hessian_error": psi_error,
    })))
}

fn mass(poly: &LatticePolytope, n: i64, points: &[Vec<f64>]) -> Result<Table> {
    positive_n(n)?;
    let kernel = KernelEvaluator::new(poly, n)?;
    let mut cols = axis_names("s", poly.dim());
    cols.extend(["log_pi", "mass_density", "quarter_mass_density"].map(String::from));
    let rows = points
        .par_iter()
        .map(|s| {
            let k = kernel.kernel_diag(s);
            let density = kernel.mass_density(s);
            let mut row: Vec<String> = s.iter().map(f64::to_string).collect();
            row.extend([k.log_value.to_string(), density.to_string(), (0.25 * density).to_string()]);
            row
        })
        .collect();
    Ok(Table { columns: cols, rows })
}

fn converge(poly: &LatticePolytope, s: &[f64], ns: &[i64], tol: &ToleranceArgs) -> Result<Table> {
    let b = RegionSolver::with_tolerances(poly, tolerances(tol)?)?.decay_b(s)?;
    let cols = ["N", "log_pi", "rate", "b", "gap"].map(String::from).to_vec();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let log_pi = KernelEvaluator::new(poly, n)?.kernel_diag(s).log_value;
            let rate = -log_pi / n as f64;
            Ok(vec![n.to_string(), log_pi.to_string(), rate.to_string(), b.to_string(), (rate - b).to_string()])
        })
        .collect::<std::result::Result<Vec<_>, newton_ensemble::Error>>()?;
    Ok(Table { columns: cols, rows })
}

fn validate(files: &[std::path::PathBuf]) -> Result<()> {
    if files.is_empty() {
        return Err(CliError::Config("no files given".into()));
    }
    let mut bad = 0;
    for path in files {
        match validate_file(path) {
            Ok(summary) => println!("ok {}: {summary}", path.display()),
            Err(reason) => {
                bad += 1;
                println!("invalid {}: {reason}", path.display());
            }
        }
    }
    if bad > 0 {
        return Err(CliError::Check(format!("{bad} of {} files invalid", files.len())));
    }
    Ok(())
}
