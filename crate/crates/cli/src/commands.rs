use std::path::Path;

use num_complex::Complex64;
use schur_dilation::dilation::{pairing_closed_form, DilationReport, InvariantReport};
use schur_dilation::linalg::seeded_vectors;
use schur_dilation::representation::{validate, UNITARY_TOL};
use schur_dilation::schur::{cp_check, norm_bounds, NormOptions};
use schur_dilation::search::{default_ladder, search_ladder, Method};
use schur_dilation::{
    build_multiplier, gauge_normalize, instances, schur_apply, search, CMatrix, DilationSystem, SchurMultiplier,
    SearchConfig, SearchResult, TraceRepresentation, TracialAlgebra,
};
use serde::Serialize;
use serde_json::Value;

use crate::complex::parse_complex;
use crate::report::{read_json, read_value, CliError, CliResult, ExitCode, Sink};
use crate::{Cli, Command, DilateCmd, GenCmd, MethodArg, RepCmd, RoundtripArgs, SchurCmd, SearchArgs};

pub fn run(cli: &Cli, sink: &Sink) -> CliResult<()> {
    match &cli.command {
        Command::Gen(cmd) => gen(cmd, sink),
        Command::Rep(cmd) => rep(cmd, sink),
        Command::Search(args) => search_cmd(args, sink),
        Command::Dilate(cmd) => dilate(cmd, cli.dim_cap, sink),
        Command::Schur(cmd) => schur(cmd, sink),
        Command::Roundtrip(args) => roundtrip(args, cli.dim_cap, sink),
    }
}

fn parse_spec(spec: &str) -> CliResult<TracialAlgebra> {
    Ok(TracialAlgebra::parse_spec(spec)?)
}

fn emit_rep_or_table(rep: &TraceRepresentation, as_rep: bool, sink: &Sink) -> CliResult<()> {
    if as_rep {
        sink.emit(rep)
    } else {
        sink.emit(&build_multiplier(rep))
    }
}

fn gen(cmd: &GenCmd, sink: &Sink) -> CliResult<()> {
    match cmd {
        GenCmd::Omega { omega, rep } => {
            let w = parse_complex(omega).map_err(|e| CliError::validation("invalid_input", e))?;
            if (w.norm() - 1.0).abs() > 1e-12 {
                return Err(CliError::validation("invalid_input", format!("|omega| = {} is not 1", w.norm())));
            }
            let r = instances::omega_rep(w)?;
            if !*rep {
                // the table is written from ω directly; it coincides with build_multiplier(r)
                debug_assert_eq!(build_multiplier(&r), instances::omega(w));
            }
            emit_rep_or_table(&r, *rep, sink)
        }
        GenCmd::Allones { n, rep } => emit_rep_or_table(&instances::allones_rep(*n)?, *rep, sink),
        GenCmd::IdentityFourier { n, rep } => emit_rep_or_table(&instances::identity_fourier_rep(*n)?, *rep, sink),
        GenCmd::Pauli { rep } => emit_rep_or_table(&instances::pauli_rep(), *rep, sink),
        GenCmd::Planted { n, spec, seed, rep } => {
            let alg = parse_spec(spec)?;
            emit_rep_or_table(&instances::planted_rep(*n, &alg, *seed)?, *rep, sink)
        }
    }
}

/// A representation, or the best representation of a search result.
fn load_rep(path: &Path) -> CliResult<TraceRepresentation> {
    let rep = load_rep_unchecked(path)?;
    rep.check(UNITARY_TOL)?;
    Ok(rep)
}

/// A representation, or the best one from a search result.
fn load_rep_unchecked(path: &Path) -> CliResult<TraceRepresentation> {
    let value = read_value(path)?;
    if value.get("best_rep").is_some() {
        Ok(from_value::<SearchResult>(value, path)?.best_rep)
    } else {
        from_value(value, path)
    }
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::validation("invalid_json", format!("{}: {e}", path.display())))
}

fn load_multiplier(path: &Path) -> CliResult<SchurMultiplier> {
    read_json(path)
}

fn rep(cmd: &RepCmd, sink: &Sink) -> CliResult<()> {
    match cmd {
        RepCmd::BuildMultiplier { input } => sink.emit(&build_multiplier(&load_rep(input)?)),
        RepCmd::Validate { input, tol } => {
            check_tol(*tol)?;
            let report = validate(&load_rep_unchecked(input)?, *tol);
            sink.emit(&report)?;
            if report.pass {
                sink.note("representation valid");
                Ok(())
            } else {
                Err(CliError::validation(
                    "invalid_representation",
                    format!(
                        "non-unitary indices {:?}, normalisation residual {:.3e}",
                        report.flagged, report.normalization_residual
                    ),
                ))
            }
        }
        RepCmd::Gauge { input } => sink.emit(&gauge_normalize(&load_rep(input)?)),
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation("invalid_input", format!("tolerance must be positive, got {tol}")))
    }
}

fn search_cmd(args: &SearchArgs, sink: &Sink) -> CliResult<()> {
    check_tol(args.target)?;
    let m = load_multiplier(&args.input)?;
    let cfg = SearchConfig {
        algebra: parse_spec(&args.spec)?,
        restarts: args.restarts,
        max_iters: args.max_iters,
        step_size: args.step_size,
        seed: args.seed,
        target_residual: args.target,
        method: match args.method {
            MethodArg::Lm => Method::LevenbergMarquardt,
            MethodArg::Gradient => Method::Gradient,
        },
    };
    let result = if args.ladder {
        let attempts = search_ladder(&m, &default_ladder(), &cfg)?;
        for a in &attempts {
            sink.note(format!(
                "blocks {:?}: residual {:.3e}{}",
                a.best_rep.algebra().blocks(),
                a.residual,
                if a.converged { " (converged)" } else { "" }
            ));
        }
        attempts.into_iter().last().expect("non-empty ladder")
    } else {
        search(&m, &cfg)?
    };
    sink.emit(&result)?;
    sink.note(format!(
        "best residual {:.3e} from restart {} over blocks {:?}",
        result.residual,
        result.best_restart,
        result.best_rep.algebra().blocks()
    ));
    if result.converged {
        Ok(())
    } else {
        Err(CliError::non_convergence(format!(
            "no witness found at this algebra: residual {:.3e} > target {:.1e}",
            result.residual, result.target_residual
        )))
    }
}

fn load_system(path: &Path, window: Option<usize>, cap: usize) -> CliResult<DilationSystem> {
    let value = read_value(path)?;
    if value.get("v").is_some() && value.get("window").is_some() {
        let sys: DilationSystem = from_value(value, path)?;
        if sys.dim() > cap {
            return Err(schur_dilation::Error::DimensionCap { dim: sys.dim(), cap }.into());
        }
        if let Some(k) = window {
            if k != sys.window() {
                return Err(CliError::validation(
                    "invalid_input",
                    format!("--K {k} disagrees with the stored window {}", sys.window()),
                ));
            }
        }
        return Ok(sys);
    }
    let window = window.ok_or_else(|| {
        CliError::validation("invalid_input", "--K is required when the input is not a dilation system")
    })?;
    Ok(DilationSystem::build_with_cap(&load_rep(path)?, window, cap)?)
}

#[derive(Serialize)]
struct PairReport {
    k: usize,
    window: usize,
    within_window: bool,
    closed_form: Complex64,
    big_space: Complex64,
    difference: f64,
    pass: bool,
}

fn dilate(cmd: &DilateCmd, cap: usize, sink: &Sink) -> CliResult<()> {
    match cmd {
        DilateCmd::Build { input, window } => {
            let sys = DilationSystem::build_with_cap(&load_rep(input)?, *window, cap)?;
            sink.emit(&sys)?;
            sink.note(format!("dilation built: ambient dimension {}, window K = {}", sys.dim(), sys.window()));
            Ok(())
        }
        DilateCmd::Verify { input, window, kmax, tol, samples, seed } => {
            check_tol(*tol)?;
            let sys = load_system(input, *window, cap)?;
            let report = sys.verify(kmax.unwrap_or(sys.window()), *tol, *samples, *seed)?;
            sink.emit(&report.entries)?;
            sink.note(report.summary().trim_end());
            verdict(&report)
        }
        DilateCmd::Pair { input, window, k, seed, tol } => {
            check_tol(*tol)?;
            let sys = load_system(input, *window, cap)?;
            let vs = seeded_vectors(sys.n(), 4, *seed);
            let (u, v, a, b) = (&vs[0], &vs[1], &vs[2], &vs[3]);
            let closed = pairing_closed_form(sys.representation(), *k, u, v, a, b)?;
            let big = sys.big_space_pairing(*k, u, v, a, b)?;
            let difference = (closed - big).norm();
            let report = PairReport {
                k: *k,
                window: sys.window(),
                within_window: sys.within_window(*k),
                closed_form: closed,
                big_space: big,
                difference,
                pass: difference <= *tol,
            };
            sink.emit(&report)?;
            sink.note(format!("k = {k}: |closed form - big-space pairing| = {difference:.3e}"));
            if report.within_window && !report.pass {
                return Err(CliError::validation(
                    "pairing_mismatch",
                    format!("difference {difference:.3e} > {tol:.1e}"),
                ));
            }
            if !report.within_window {
                sink.note(format!("k = {k} lies outside the window K = {}; reported only", sys.window()));
            }
            Ok(())
        }
    }
}

fn verdict(report: &DilationReport) -> CliResult<()> {
    if report.pass {
        Ok(())
    } else {
        Err(CliError::validation(
            "dilation_failed",
            format!("max residual {:.3e} exceeds {:.1e}", report.max_residual(), report.tol),
        ))
    }
}

fn schur(cmd: &SchurCmd, sink: &Sink) -> CliResult<()> {
    match cmd {
        SchurCmd::Apply { multiplier, matrix } => {
            let m = load_multiplier(multiplier)?;
            let a: CMatrix = read_json(matrix)?;
            sink.emit(&schur_apply(&m, &a)?)
        }
        SchurCmd::Norm { multiplier, tol, seed } => {
            check_tol(*tol)?;
            let m = load_multiplier(multiplier)?;
            let opts = NormOptions { tol: *tol, seed: *seed, ..NormOptions::default() };
            let bounds = norm_bounds(&m, &opts);
            sink.emit(&bounds)?;
            sink.note(format!("{:.9} <= ||T|| <= {:.9}", bounds.lower, bounds.upper));
            Ok(())
        }
        SchurCmd::CpCheck { multiplier, tol } => {
            check_tol(*tol)?;
            let check = cp_check(&load_multiplier(multiplier)?, *tol);
            sink.emit(&check)?;
            sink.note(if check.positive { "completely positive" } else { "not completely positive" });
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SearchSummary {
    residual: f64,
    converged: bool,
    target_residual: f64,
    best_restart: usize,
    restart_residuals: Vec<f64>,
    iterations: Vec<usize>,
}

#[derive(Serialize)]
struct RoundtripReport {
    schema: &'static str,
    n: usize,
    blocks: Vec<usize>,
    window: usize,
    seed: u64,
    planted: TraceRepresentation,
    multiplier: SchurMultiplier,
    search: SearchSummary,
    found: TraceRepresentation,
    dilation: Option<DilationReport>,
    invariants: Option<InvariantReport>,
    pass: bool,
}

/// Random members per invariant check in `roundtrip`.
const INVARIANT_SAMPLES: usize = 5;
const INVARIANT_TOL: f64 = 1e-10;

fn roundtrip(args: &RoundtripArgs, cap: usize, sink: &Sink) -> CliResult<()> {
    check_tol(args.tol)?;
    check_tol(args.target)?;
    let alg = parse_spec(&args.spec)?;
    let planted = instances::planted_rep(args.n, &alg, args.seed)?;
    let m = build_multiplier(&planted);
    sink.note(format!("planted {} unitaries over blocks {:?}", args.n, alg.blocks()));

    let cfg = SearchConfig {
        restarts: args.restarts,
        seed: args.seed,
        target_residual: args.target,
        ..SearchConfig::new(alg.clone())
    };
    let result = search(&m, &cfg)?;
    sink.note(format!("search residual {:.3e} (target {:.1e})", result.residual, args.target));
    let found = gauge_normalize(&result.best_rep);
    let summary = SearchSummary {
        residual: result.residual,
        converged: result.converged,
        target_residual: result.target_residual,
        best_restart: result.best_restart,
        restart_residuals: result.restarts.iter().map(|t| t.residual).collect(),
        iterations: result.restarts.iter().map(|t| t.iterations).collect(),
    };
    let mut report = RoundtripReport {
        schema: "schurdil-roundtrip/1",
        n: args.n,
        blocks: alg.blocks().to_vec(),
        window: args.window,
        seed: args.seed,
        planted,
        multiplier: m,
        search: summary,
        found,
        dilation: None,
        invariants: None,
        pass: false,
    };
    if !result.converged {
        sink.emit(&report)?;
        return Err(CliError::non_convergence(format!(
            "search stopped at residual {:.3e} > target {:.1e}",
            result.residual, args.target
        )));
    }

    let sys = DilationSystem::build_with_cap(&report.found, args.window, cap)?;
    let dil = sys.verify(args.window, args.tol, args.samples, args.seed)?;
    sink.note(dil.summary().trim_end());
    let inv = sys.invariants(INVARIANT_SAMPLES, args.seed)?;
    sink.note(format!("automorphism invariants: max defect {:.3e}", inv.max()));
    let dil_pass = dil.pass;
    let inv_pass = inv.max() <= INVARIANT_TOL;
    report.pass = dil_pass && inv_pass;
    report.dilation = Some(dil);
    report.invariants = Some(inv);
    sink.emit(&report)?;
    if report.pass {
        Ok(())
    } else if !dil_pass {
        Err(CliError::validation("dilation_failed", "dilation residual above tolerance"))
    } else {
        Err(CliError {
            code: ExitCode::Validation,
            kind: "invariant_failed".into(),
            message: "automorphism invariant above tolerance".into(),
        })
    }
}
