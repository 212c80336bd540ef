use std::io::{self, Write};
use std::path::Path;

use cuspflow_core::conformal::evaluate;
use cuspflow_core::flow::write_trace_csv;
use cuspflow_core::{
    certify_jacobians, cusp_report, euler_characteristic, integrate_flow, newton, sig17, validate,
    FlowOptions, SolveOptions,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Command, Format};
use crate::error::CliError;
use crate::files::{emit, read_indexed, read_surface, read_surface_unchecked};

fn stdout_err(e: io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

pub fn dispatch(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { surface } => run_validate(surface, out),
        Command::Lengths {
            surface,
            factors,
            format,
        } => run_lengths(surface, factors.as_deref(), *format, out),
        Command::Flow {
            surface,
            t_end,
            cusp_tol,
            length_cap,
            rel_tol,
            abs_tol,
            sample_dt,
            out: path,
        } => {
            let opts = FlowOptions {
                t_end: *t_end,
                cusp_tol: *cusp_tol,
                length_cap: *length_cap,
                rel_tol: *rel_tol,
                abs_tol: *abs_tol,
                sample_dt: *sample_dt,
                ..Default::default()
            };
            run_flow(surface, &opts, path.as_deref(), out)
        }
        Command::Prescribe {
            surface,
            target,
            tol,
            max_iter,
            out: path,
        } => {
            let opts = SolveOptions {
                grad_tol: *tol,
                max_iter: *max_iter,
                ..Default::default()
            };
            run_prescribe(surface, target, &opts, path.as_deref(), out)
        }
        Command::CheckJacobian {
            surface,
            samples,
            seed,
        } => run_check_jacobian(surface, *samples, *seed, out),
    }
}

fn run_validate(surface: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let (tri, l0) = read_surface_unchecked(surface)?;
    let report = validate(&tri, &l0);
    if !report.ok() {
        writeln!(out, "{report}").map_err(stdout_err)?;
        return Err(CliError::Invalid {
            path: surface.to_path_buf(),
            report: report.to_string(),
        });
    }
    writeln!(
        out,
        "ok, n={}, F={}, E={}, chi={}",
        tri.n_boundaries(),
        tri.faces().len(),
        tri.edges().len(),
        euler_characteristic(&tri)
    )
    .map_err(stdout_err)
}

#[derive(Serialize)]
struct Row {
    kind: &'static str,
    id: Option<u64>,
    slot: Option<u8>,
    value: f64,
}

fn run_lengths(
    surface: &Path,
    factors: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (tri, l0) = read_surface(surface)?;
    let w = match factors {
        Some(p) => read_indexed(p, tri.n_boundaries())?,
        None => vec![0.0; tri.n_boundaries()],
    };
    let geom = evaluate(&tri, &l0, &w).map_err(|source| CliError::Core {
        path: Some(factors.unwrap_or(surface).to_path_buf()),
        source,
    })?;

    let mut rows = Vec::new();
    for (e, &len) in tri.edges().iter().zip(&geom.edge_lengths) {
        rows.push(Row {
            kind: "edge",
            id: Some(e.id.into()),
            slot: None,
            value: len,
        });
    }
    for (f, arcs) in tri.faces().iter().zip(&geom.arcs) {
        for (t, &a) in arcs.iter().enumerate() {
            rows.push(Row {
                kind: "arc",
                id: Some(f.id.into()),
                slot: Some(t as u8 + 1),
                value: a,
            });
        }
    }
    for (i, &b) in geom.boundary.iter().enumerate() {
        rows.push(Row {
            kind: "boundary",
            id: Some(i as u64 + 1),
            slot: None,
            value: b,
        });
    }
    let chi = euler_characteristic(&tri);

    match format {
        Format::Csv => {
            let opt = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
            let mut text = String::from("kind,id,slot,value\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    r.kind,
                    opt(r.id),
                    opt(r.slot.map(u64::from)),
                    sig17(r.value)
                ));
            }
            text.push_str(&format!("chi,,,{chi}\n"));
            out.write_all(text.as_bytes()).map_err(stdout_err)
        }
        Format::Json => {
            let mut values: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| serde_json::to_value(r).expect("rows serialize"))
                .collect();
            values
                .push(serde_json::json!({ "kind": "chi", "id": null, "slot": null, "value": chi }));
            let text = serde_json::to_string_pretty(&values).expect("values serialize");
            writeln!(out, "{text}").map_err(stdout_err)
        }
    }
}

fn run_flow(
    surface: &Path,
    opts: &FlowOptions,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    opts.check()
        .map_err(|source| CliError::Core { path: None, source })?;
    let (tri, l0) = read_surface(surface)?;
    writeln!(
        out,
        "# flow surface={} n={}",
        surface.display(),
        tri.n_boundaries()
    )
    .map_err(stdout_err)?;
    writeln!(out, "# options {opts}").map_err(stdout_err)?;
    let trace = integrate_flow(&tri, &l0, opts).map_err(CliError::core(surface))?;
    let rows = match opts.sample_dt {
        Some(dt) => trace.sampled(dt),
        None => trace.rows.clone(),
    };
    emit(path, out, |w| write_trace_csv(w, &rows))?;
    let last = trace.last();
    if let Some(p) = path {
        writeln!(out, "# trace {} ({} rows)", p.display(), rows.len()).map_err(stdout_err)?;
    }
    writeln!(
        out,
        "# stop t={} reason=\"{}\" accepted={} rejected={} error_estimate={:e}",
        sig17(last.t),
        trace.stop,
        trace.rows.len() - 1,
        trace.rejected_steps,
        trace.error_estimate
    )
    .map_err(stdout_err)?;
    let violations = trace.monotonicity_violations();
    if !violations.is_empty() {
        writeln!(
            out,
            "# warning: monotonicity violated at {} accepted steps",
            violations.len()
        )
        .map_err(stdout_err)?;
    }
    let report = cusp_report(&tri, &l0, &last.w).map_err(CliError::core(surface))?;
    writeln!(out, "# cusp_report {report}").map_err(stdout_err)
}

fn write_factors(w: &mut dyn Write, values: &[f64]) -> io::Result<()> {
    writeln!(w, "boundary_index,w")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, sig17(*v))?;
    }
    Ok(())
}

fn run_prescribe(
    surface: &Path,
    target_path: &Path,
    opts: &SolveOptions,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    opts.check()
        .map_err(|source| CliError::Core { path: None, source })?;
    let (tri, l0) = read_surface(surface)?;
    let target = read_indexed(target_path, tri.n_boundaries())?;
    writeln!(
        out,
        "# prescribe surface={} target={}",
        surface.display(),
        target_path.display()
    )
    .map_err(stdout_err)?;
    writeln!(out, "# options {opts}").map_err(stdout_err)?;
    let start = vec![0.0; tri.n_boundaries()];
    let result = newton(&tri, &l0, &target, &start, opts).map_err(CliError::core(target_path))?;
    writeln!(out, "# iteration 0 residual={:e}", result.initial_residual).map_err(stdout_err)?;
    for (k, it) in result.history.iter().enumerate() {
        writeln!(
            out,
            "# iteration {} residual={:e} step={:e} gain={:e} kind={:?}",
            k + 1,
            it.residual,
            it.step,
            it.gain,
            it.kind
        )
        .map_err(stdout_err)?;
    }
    if !result.converged {
        let partial: Vec<String> = result.w.iter().map(|v| sig17(*v)).collect();
        writeln!(out, "# partial w {}", partial.join(",")).map_err(stdout_err)?;
        return Err(CliError::Core {
            path: None,
            source: cuspflow_core::Error::MaxIterations {
                iterations: result.iterations(),
                residual: result.residual,
            },
        });
    }
    writeln!(
        out,
        "# converged iterations={} residual={:e}",
        result.iterations(),
        result.residual
    )
    .map_err(stdout_err)?;
    emit(path, out, |w| write_factors(w, &result.w))
}

fn run_check_jacobian(
    surface: &Path,
    samples: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let (tri, l0) = read_surface(surface)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check = certify_jacobians(&mut rng, &tri, &l0, samples).map_err(CliError::core(surface))?;
    use cuspflow_core::diagnostics::{FD_TOL, SYMMETRY_TOL};
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    let lines = [
        format!(
            "# check-jacobian surface={} samples={samples} seed={seed}",
            surface.display()
        ),
        format!(
            "symmetry {:e} (tol {SYMMETRY_TOL:e}) {}",
            check.symmetry,
            mark(check.symmetry <= SYMMETRY_TOL)
        ),
        format!(
            "finite_difference {:e} (tol {FD_TOL:e}) {}",
            check.finite_difference,
            mark(check.finite_difference <= FD_TOL)
        ),
        format!(
            "max_eigenvalue {:e} (< 0) {}",
            check.max_eigenvalue,
            mark(check.max_eigenvalue < 0.0)
        ),
    ];
    for l in lines {
        writeln!(out, "{l}").map_err(stdout_err)?;
    }
    if check.passes() {
        Ok(())
    } else {
        Err(CliError::Check(format!("Jacobian check failed: {check}")))
    }
}
