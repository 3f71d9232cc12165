use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use areadist::inner::{build_inner_grid, max_level, verify_indefinite_sphere, GridError};
use areadist::io::{inner_mesh, outer_mesh, write_atomic, write_inner_csv, write_outer_csv, PolygonFile};
use areadist::outer::{integrability_residual, max_outer_levels, propagate_outer, verify_definite_sphere};
use areadist::random::{random_closed_polygon, random_open_polyline};
use areadist::smooth::charts::inner_f;
use areadist::smooth::hessian::{gradient_fd, DEFAULT_STEP};
use areadist::smooth::{
    asymptotic_coeffs, default_probe, grad_f, grad_outer, hessian_det_residual, inner_closed, isothermal_tangent_check,
    pick_invariant_inner, projections_pi, refinement_experiment, AnalyticCurve, AnalyticError, SampleRegion, Side,
};
use areadist::{min_chord_area, ConvexPolyline, Vec2, VerificationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Command, Failure, Format, OutputArgs, Status, Which, WithStatus};

pub fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Inner { input, levels, out } => inner(&input, levels, &out),
        Command::Outer {
            input,
            levels,
            tol,
            out,
        } => outer(&input, levels, tol, &out),
        Command::Verify {
            which,
            input,
            levels,
            tol,
            fd_tol,
            curve,
            samples,
            seed,
        } => {
            let reports = match which {
                Which::Inner => verify_grids(input.as_deref(), samples, seed, |p| verify_inner(p, levels, tol))?,
                Which::Outer => verify_grids(input.as_deref(), samples, seed, |p| verify_outer(p, levels, tol))?,
                Which::Smooth => vec![verify_smooth(&curve.0, tol, fd_tol).status(Status::Validation)?],
            };
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().all(VerificationReport::passed) {
                Ok(())
            } else {
                Err(anyhow!("verification failed")).status(Status::Verify)
            }
        }
        Command::SampleCurve {
            curve,
            samples,
            range,
            closed,
            out,
        } => sample_curve(&curve.0, samples, range.map(|r| (r.0, r.1)), closed, out.as_deref()),
        Command::Refine { curve, samples, t_max } => refine(&curve.0, &samples, t_max),
        Command::Chord {
            input,
            point,
            angular_samples,
            iters,
        } => {
            let poly = load(&input)?;
            let r = min_chord_area(&poly, Vec2::new(point.0, point.1), angular_samples, iters)
                .status(Status::Validation)?;
            println!("half area        {}", r.half_area);
            println!("chord            {} -> {}", r.endpoint_a, r.endpoint_b);
            println!("direction        {}", r.theta);
            println!("midpoint offset  {:e}", r.midpoint_residual);
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<ConvexPolyline, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .status(Status::Parse)?;
    let file = PolygonFile::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .status(Status::Parse)?;
    file.to_polyline()
        .with_context(|| format!("validating {}", path.display()))
        .status(Status::Validation)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(bytes).context("writing to standard output"),
    }
    .status(Status::Parse)
}

/// Summaries go to stdout when the data goes to a file, stderr otherwise.
fn summary(to_file: bool, text: &str) {
    if to_file {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn grid_status(e: &GridError) -> Status {
    match e {
        GridError::LevelOutOfRange { .. } => Status::Level,
        _ => Status::Validation,
    }
}

fn build_inner(poly: &ConvexPolyline, levels: Option<usize>) -> Result<areadist::InnerGrid, Failure> {
    let levels = levels.unwrap_or_else(|| max_level(poly));
    build_inner_grid(poly, levels).map_err(|e| Failure {
        status: grid_status(&e),
        error: e.into(),
    })
}

fn shape(poly: &ConvexPolyline) -> String {
    format!(
        "N = {} ({})",
        poly.len(),
        if poly.is_closed() { "closed" } else { "open" }
    )
}

fn inner(input: &Path, levels: Option<usize>, out: &OutputArgs) -> Result<(), Failure> {
    let poly = load(input)?;
    let start = Instant::now();
    let grid = build_inner(&poly, levels)?;
    let elapsed = start.elapsed();
    let mut buf = Vec::new();
    match out.format() {
        Format::Csv => write_inner_csv(&grid, &mut buf),
        Format::Obj => inner_mesh(&grid).write_obj(&mut buf),
        Format::None => Ok(()),
    }
    .status(Status::Parse)?;
    if out.format() != Format::None {
        emit(out.path(), &buf)?;
    }
    summary(
        out.path().is_some() || out.format() == Format::None,
        &format!(
            "inner grid: {}, levels {}, {} cells, max f {}, build time {:.3} ms",
            shape(&poly),
            grid.max_level(),
            grid.cell_count(),
            grid.max_f(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
    Ok(())
}

fn outer(input: &Path, levels: usize, tol: f64, out: &OutputArgs) -> Result<(), Failure> {
    let poly = load(input)?;
    let start = Instant::now();
    let grid = propagate_outer(&poly, levels).status(Status::Level)?;
    let elapsed = start.elapsed();
    let mut notes = vec![format!(
        "outer grid: {}, levels {}, max |F| {}, build time {:.3} ms",
        shape(&poly),
        grid.levels(),
        grid.max_abs_f(),
        elapsed.as_secs_f64() * 1e3
    )];
    notes.push(format!("integrability residual {:e}", integrability_residual(&grid)));
    notes.push(verify_definite_sphere(&grid, tol).to_report(tol).to_string());
    let mut buf = Vec::new();
    match out.format() {
        Format::Csv => write_outer_csv(&grid, &mut buf).status(Status::Parse)?,
        Format::Obj => {
            let (mesh, worst) = outer_mesh(&grid, tol).status(Status::Verify)?;
            notes.push(format!("planarity audit: PASS (worst quad {worst:e}, tol {tol:e})"));
            mesh.write_obj(&mut buf).status(Status::Parse)?;
        }
        Format::None => {}
    }
    if out.format() != Format::None {
        emit(out.path(), &buf)?;
    }
    summary(out.path().is_some() || out.format() == Format::None, &notes.join("\n"));
    Ok(())
}

fn verify_grids(
    input: Option<&Path>,
    samples: usize,
    seed: u64,
    check: impl Fn(&ConvexPolyline) -> Result<VerificationReport, Failure>,
) -> Result<Vec<VerificationReport>, Failure> {
    let polys = match input {
        Some(path) => vec![load(path)?],
        None => {
            if samples < 3 {
                return Err(anyhow!("need at least 3 samples, got {samples}")).status(Status::Validation);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            vec![
                random_open_polyline(&mut rng, samples, 1.0),
                random_closed_polygon(&mut rng, samples, 1.0),
            ]
        }
    };
    polys
        .iter()
        .map(|p| {
            let mut r = check(p)?;
            r.title = format!("{} on {}", r.title, shape(p));
            Ok(r)
        })
        .collect()
}

fn verify_inner(poly: &ConvexPolyline, levels: Option<usize>, tol: f64) -> Result<VerificationReport, Failure> {
    let grid = build_inner(poly, levels)?;
    let mut r = verify_indefinite_sphere(&grid, tol).to_report(tol);
    r.note(format!("levels {}", grid.max_level()));
    Ok(r)
}

fn verify_outer(poly: &ConvexPolyline, levels: Option<usize>, tol: f64) -> Result<VerificationReport, Failure> {
    let levels = levels.unwrap_or_else(|| max_outer_levels(poly).unwrap_or(5).min(5));
    let grid = propagate_outer(poly, levels).status(Status::Level)?;
    let mut r = verify_definite_sphere(&grid, tol).to_report(tol);
    r.note(format!("levels {levels}"));
    Ok(r)
}

fn verify_smooth(curve: &AnalyticCurve, tol: f64, fd_tol: f64) -> Result<VerificationReport, AnalyticError> {
    let mut r = VerificationReport::new(format!("smooth identities on the {curve}"));
    let inner_region = SampleRegion::guarded(curve, Side::Inner)?;
    let outer_region = SampleRegion::guarded(curve, Side::Outer)?;

    for (side, region, label) in [
        (Side::Inner, &inner_region, "det D²f + 1 (inner)"),
        (Side::Outer, &outer_region, "det D²F - 1 (outer)"),
    ] {
        let h = hessian_det_residual(curve, side, region, DEFAULT_STEP)?;
        r.check(label, h.max_residual, fd_tol);
        r.note(format!(
            "{label}: {} samples, {} skipped by the ω guard",
            h.checked, h.skipped
        ));
    }

    let (mut grad_in, mut coeffs, mut proj, mut closed) = (0f64, 0f64, 0f64, 0f64);
    for (u, v) in inner_region.points() {
        grad_in = grad_in.max((grad_f(curve, u, v)? - gradient_fd(curve, Side::Inner, u, v, DEFAULT_STEP)?).norm());
        let c = asymptotic_coeffs(curve, u, v)?;
        coeffs = coeffs.max(c.a_v).max(c.b_u).max(c.omega_plus_f_uv);
        let (p1, p2) = projections_pi(curve, u, v)?;
        proj = proj.max((p1 - curve.point(v)).norm()).max((p2 - curve.point(u)).norm());
        closed = closed.max((inner_closed(curve, u, v)?.f - inner_f(curve, u, v)).abs());
    }
    let mut grad_out = 0f64;
    for (s, t) in outer_region.points() {
        grad_out =
            grad_out.max((grad_outer(curve, s, t)? - gradient_fd(curve, Side::Outer, s, t, DEFAULT_STEP)?).norm());
    }
    r.check("inner gradient vs finite differences", grad_in, fd_tol)
        .check("outer gradient vs finite differences", grad_out, fd_tol)
        .check("a_v, b_u, ω + f_uv", coeffs, fd_tol)
        .check("projections π₁ = C(v), π₂ = C(u)", proj, tol)
        .check("closed form vs generic inner distance", closed, tol);

    if let Some((u0, v0)) = default_probe(curve) {
        r.note(format!(
            "Pick invariant at ({u0:.4}, {v0:.4}): {:.6}",
            pick_invariant_inner(curve, u0, v0)?
        ));
        r.extend(isothermal_tangent_check(curve, u0, v0, 2000)?.to_report(fd_tol));
    }
    Ok(r)
}

fn sample_curve(
    curve: &AnalyticCurve,
    samples: usize,
    range: Option<(f64, f64)>,
    closed: Option<bool>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (a0, b0, c0) = curve.default_range();
    let (a, b) = range.unwrap_or((a0, b0));
    let closed = closed.unwrap_or(c0);
    let pts = curve.sample(samples, a, b, closed).status(Status::Validation)?;
    let file = PolygonFile::from_points(&pts, closed);
    file.to_polyline()
        .with_context(|| format!("{samples} samples of the {curve} over [{a}, {b}]"))
        .status(Status::Validation)?;
    emit(out, file.to_json().as_bytes())
}

fn refine(curve: &AnalyticCurve, samples: &[usize], t_max: f64) -> Result<(), Failure> {
    let rows = refinement_experiment(curve, t_max, samples).status(Status::Validation)?;
    println!(
        "{:>8} {:>12} {:>7} {:>14} {:>14} {:>12}",
        "samples", "spacing", "levels", "max |dF|", "max |dP|", "F at top"
    );
    for row in rows {
        println!(
            "{:>8} {:>12.6} {:>7} {:>14.6e} {:>14.6e} {:>12.6}",
            row.samples, row.spacing, row.levels, row.max_f_error, row.max_point_error, row.f_top
        );
    }
    Ok(())
}
