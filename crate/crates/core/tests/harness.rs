mod common;

use std::fs;
use std::path::Path;

use kinexp::harness::*;
use kinexp::integrator::{ClampMode, SolverError};
use kinexp::io::*;
use kinexp::kinetics::ReverseRateConvention;

use common::*;

fn load(name: &str) -> Job {
    Job::load(&fixture(name), &Overrides::default()).unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_writes_solution_and_steps() {
    let job = load("toy_ignition.cfg");
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_run(&job, dir.path()).unwrap();
    assert_eq!(header(&dir.path().join("solution.csv")), "t,T,Y_F,Y_O,Y_P");
    assert_eq!(header(&dir.path().join("steps.csv")), "t,h,accepted,err_est,krylov_dim,substeps,cpu_ns");

    let steps: Vec<StepRow> = read_csv(fs::File::open(dir.path().join("steps.csv")).unwrap()).unwrap();
    assert_eq!(steps.len(), out.records.len());
    assert_eq!(steps.iter().filter(|s| s.accepted).count(), out.accepted_steps());
    assert!(steps.iter().all(|s| s.krylov_dim > 0 || !s.err_est.is_finite()));

    // samples = 0: every accepted state, starting with the initial one.
    let (species, rows) = read_solution(fs::File::open(dir.path().join("solution.csv")).unwrap()).unwrap();
    assert_eq!(species, ["F", "O", "P"]);
    assert_eq!(rows.len(), out.trajectory.len());
    assert_eq!(rows[0], (0.0, job.initial.clone()));
    assert_eq!(rows.last().unwrap().1, out.y.as_slice());
}

#[test]
fn sampled_solution_has_requested_rows() {
    let mut job = load("toy_ignition.cfg");
    job.config.output.samples = 10;
    let dir = tempfile::tempdir().unwrap();
    cmd_run(&job, dir.path()).unwrap();
    let (_, rows) = read_solution(fs::File::open(dir.path().join("solution.csv")).unwrap()).unwrap();
    let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
    assert_eq!(ts, job.config.sample_times());
}

#[test]
fn solver_failure_keeps_partial_output() {
    let mut job = load("toy_ignition.cfg");
    job.config.max_steps = 5;
    let dir = tempfile::tempdir().unwrap();
    let err = cmd_run(&job, dir.path()).unwrap_err();
    assert!(matches!(err, HarnessError::Solver(SolverError::TooManySteps { .. })));
    assert_eq!(err.exit_code(), 3);
    let (_, rows) = read_solution(fs::File::open(dir.path().join("solution.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
}

#[test]
fn load_errors_map_to_exit_codes() {
    let missing = Job::load(Path::new("/nonexistent/run.cfg"), &Overrides::default()).unwrap_err();
    assert!(matches!(missing, HarnessError::Io { .. }));
    assert_eq!(missing.exit_code(), 4);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "[run]\ntemperature = hot\n").unwrap();
    let e = Job::load(&bad, &Overrides::default()).unwrap_err();
    assert!(matches!(e, HarnessError::Parse { .. }));
    assert_eq!(e.exit_code(), 2);

    // Benchmark mechanisms are not shipped.
    let e = Job::load(&fixture("benchmarks/gri30.cfg"), &Overrides::default()).unwrap_err();
    assert_eq!(e.exit_code(), 4);

    let unknown = dir.path().join("unknown.cfg");
    let text = read_fixture("toy_ignition.cfg").replace("toy_ignition.mech", &fixture("toy_ignition.mech").display().to_string());
    fs::write(&unknown, text.replace("F = 0.05\nO = 0.95", "F = 0.05\nQ = 0.95")).unwrap();
    let e = Job::load(&unknown, &Overrides::default()).unwrap_err();
    assert!(matches!(e, HarnessError::Config(_)));
    assert_eq!(e.exit_code(), 2);

    let no_sweep = load("toy_ignition.cfg");
    assert_eq!(cmd_sweep(&no_sweep, false, dir.path()).unwrap_err().exit_code(), 2);
}

#[test]
fn overrides_apply() {
    let overrides = Overrides {
        mechanism: Some(fixture("toy_ignition.mech")),
        clamp_mode: Some(ClampMode::Piecewise),
        reverse_rate: Some(ReverseRateConvention::Multiply),
    };
    let job = Job::load(&fixture("toy_sweep.cfg"), &overrides).unwrap();
    assert_eq!(job.config.controller.clamp_mode, ClampMode::Piecewise);
    assert_eq!(job.config.reverse_rate, ReverseRateConvention::Multiply);
    assert_eq!(job.mechanism_path, fixture("toy_ignition.mech"));
}

#[test]
fn sweep_parallel_matches_sequential() {
    let job = load("toy_sweep.cfg");
    let plan = job.config.sweep.clone().unwrap();
    let seq = sweep_rows(&job, &plan, false).unwrap();
    let par = sweep_rows(&job, &plan, true).unwrap();
    assert_eq!(seq.len(), plan.points.len());
    for ((s, p), &(atol, rtol)) in seq.iter().zip(&par).zip(&plan.points) {
        assert_eq!((s.atol, s.rtol), (atol, rtol));
        assert_eq!(s.status, "ok");
        assert_eq!((s.err_2norm, s.err_scaled), (p.err_2norm, p.err_scaled));
        assert!(s.cpu_s > 0.0);
    }
    let dir = tempfile::tempdir().unwrap();
    cmd_sweep(&job, false, dir.path()).unwrap();
    let back: Vec<SweepRow> = read_csv(fs::File::open(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(back.len(), seq.len());
    assert_eq!(back.iter().map(|r| r.err_2norm).collect::<Vec<_>>(), seq.iter().map(|r| r.err_2norm).collect::<Vec<_>>());
}

#[test]
fn sweep_reference_failure_and_bad_plan_are_errors() {
    let mut job = load("toy_sweep.cfg");
    let plan = job.config.sweep.clone().unwrap();
    job.config.controller.h_min = 1e-6;
    let e = sweep_rows(&job, &plan, false).unwrap_err();
    assert_eq!(e.exit_code(), 3, "{e}");

    let job = load("toy_sweep.cfg");
    let inverted = SweepPlan { reference: (1e-6, 1e-6), points: vec![(1e-8, 1e-8)] };
    let e = sweep_rows(&job, &inverted, false).unwrap_err();
    assert!(matches!(e, HarnessError::Config(_)));
}

#[test]
fn spectrum_rows_cover_accepted_steps() {
    let job = load("toy_ignition.cfg");
    let dir = tempfile::tempdir().unwrap();
    let rows = cmd_spectrum(&job, 1, dir.path()).unwrap();
    let out = job.integrate().unwrap();
    assert_eq!(rows.len(), out.accepted_steps());
    assert_eq!(header(&dir.path().join("spectrum.csv")), "t,alpha,beta,omega,norm_step_cost,h,max_real,status");
    for r in &rows {
        assert_eq!(r.status, "ok");
        assert!(r.norm_step_cost.is_finite() && r.norm_step_cost > 0.0);
        let (a, b, o) = (r.alpha.unwrap(), r.beta.unwrap(), r.omega.unwrap());
        assert!(a >= 0.0 && b >= 0.0);
        assert_eq!(o, a * b);
    }

    let decimated = spectrum_rows(&job, &out, 10);
    assert_eq!(decimated.len(), rows.len());
    for (k, r) in decimated.iter().enumerate() {
        assert_eq!(r.status == "ok", k % 10 == 0);
        assert_eq!(r.alpha.is_some(), k % 10 == 0);
    }
}

#[test]
fn accepted_steps_fold_rejected_time() {
    let job = load("toy_ignition.cfg");
    let out = job.integrate().unwrap();
    let acc = accepted_steps(&out.records);
    assert_eq!(acc.len(), out.accepted_steps());
    let total: f64 = out.records.iter().map(|r| r.cpu_seconds).sum();
    let folded: f64 = acc.iter().map(|r| r.cpu_seconds).sum();
    assert!((total - folded).abs() <= 1e-12 * total);
}

#[test]
fn dead_mechanism_spectrum_is_constant() {
    let job = load("dead.cfg");
    let out = job.integrate().unwrap();
    let rows = spectrum_rows(&job, &out, 1);
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!((r.alpha, r.beta, r.omega), (Some(0.0), Some(0.0), Some(0.0)));
    }
}

#[test]
fn toy_spectrum_peaks_during_ignition() {
    let job = load("toy_ignition.cfg");
    let out = job.integrate().unwrap();
    let rows = spectrum_rows(&job, &out, 1);
    // The toy Jacobian spectrum is real throughout, so beta and Omega vanish.
    // The explosive mode (max_real) peaks at ignition; alpha climbs through
    // the transient and then holds at the burned-state value.
    assert!(rows.iter().all(|r| r.beta == Some(0.0) && r.omega == Some(0.0)));

    let tr = &out.trajectory;
    let (t_peak, _) = tr
        .windows(2)
        .map(|w| (0.5 * (w[0].0 + w[1].0), ((w[1].1[0] - w[0].1[0]) / (w[1].0 - w[0].0)).abs()))
        .fold((0.0, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    let t_explosive = rows.iter().max_by(|a, b| a.max_real.unwrap().total_cmp(&b.max_real.unwrap())).unwrap().t;
    let window = 0.2 * job.config.t_final;
    assert!((t_explosive - t_peak).abs() <= window, "max_real peaks at {t_explosive:e}, dT/dt at {t_peak:e}");
    let (first, last) = (rows[0].alpha.unwrap(), rows.last().unwrap().alpha.unwrap());
    assert!(last > 100.0 * first, "alpha {first:e} -> {last:e}");
}
