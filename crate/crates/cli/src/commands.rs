//! One driver per subcommand. Every driver consumes an effective
//! configuration, runs its checks against the core library, and returns a
//! report plus an outcome. Residual failures are verdicts, not errors: the
//! report is still persisted and the exit code distinguishes the cases.

use std::time::Instant;

use rand_chacha::ChaCha12Rng;
use sovlab_core::chain::{self, ChainParams};
use sovlab_core::fusion::{ProjectorKind, TransferTower};
use sovlab_core::gl12::{bethe, qsc, reference, solver};
use sovlab_core::hubbard::sov::{self as hsov, HubbardSource};
use sovlab_core::hubbard::{rmatrix, transfer as htransfer};
use sovlab_core::linalg::max_abs;
use sovlab_core::sampling::{complex_in_disc, stream_rng};
use sovlab_core::sov::{self, SourceCovector, SovBasis};
use sovlab_core::{C64, Error};

use crate::config::{from_c, to_c, RunConfig, SourceSpec};
use crate::report::{fmt_c, fmt_f, RunReport, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ResidualFailure,
    Incomplete,
}

pub struct Completed {
    pub report: RunReport,
    pub outcome: Outcome,
}

impl Completed {
    fn finish(mut report: RunReport, incomplete: bool) -> Completed {
        let outcome = if incomplete {
            Outcome::Incomplete
        } else if report.all_pass() {
            Outcome::Pass
        } else {
            Outcome::ResidualFailure
        };
        if incomplete {
            report.notes.push(
                "run flagged incomplete: some expected solutions were not reached".into(),
            );
        }
        Completed { report, outcome }
    }
}

fn core_err(context: &str, e: Error) -> CliError {
    match e {
        Error::Capacity(_) | Error::Incomplete(_) => {
            CliError::Incomplete(format!("{context}: {e}"))
        }
        other => CliError::Config(format!("{context}: {other}")),
    }
}

/// Sample-point stream: supplied probes are consumed first (in order), then
/// fresh draws from the run seed. Everything handed out is recorded so the
/// persisted config replays the run exactly.
struct Probes {
    supplied: std::vec::IntoIter<C64>,
    rng: ChaCha12Rng,
    consumed: Vec<C64>,
}

impl Probes {
    fn new(cfg: &RunConfig) -> Probes {
        Probes {
            supplied: cfg
                .probes
                .iter()
                .map(|&p| to_c(p))
                .collect::<Vec<_>>()
                .into_iter(),
            rng: stream_rng(cfg.seed, 90),
            consumed: Vec::new(),
        }
    }

    fn next(&mut self, offset: C64) -> C64 {
        let z = self
            .supplied
            .next()
            .unwrap_or_else(|| complex_in_disc(&mut self.rng, 0.8) + offset);
        self.consumed.push(z);
        z
    }

    /// Writes the consumed stream back into the report's config snapshot.
    fn record(self, report: &mut RunReport) {
        report.config.probes = self.consumed.iter().map(|&z| from_c(z)).collect();
    }
}

const LAMBDA_OFF: C64 = C64::new(0.2, 0.1);
const MU_OFF: C64 = C64::new(-0.3, 0.2);
const XI_OFF: C64 = C64::new(0.5, -0.3);

fn time<T>(report: &mut RunReport, phase: &str, f: impl FnOnce() -> T) -> T {
    let t0 = Instant::now();
    let out = f();
    report
        .timings
        .insert(phase.to_string(), t0.elapsed().as_secs_f64());
    out
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyTarget {
    /// Graded Yang–Baxter equation for the configured signature.
    Ybe,
    /// Fused-tower identities: projector vs interpolation, bilinear, two-form.
    Fusion,
    /// Boundary relation tying the tower to the quantum Berezinian block.
    InnerBoundary,
    /// Shastry R-matrix relations for the Hubbard chain.
    Shastry,
}

pub fn run_verify(cfg: RunConfig, target: VerifyTarget) -> Result<Completed, CliError> {
    let mut report = RunReport::new(
        match target {
            VerifyTarget::Ybe => "verify ybe",
            VerifyTarget::Fusion => "verify fusion",
            VerifyTarget::InnerBoundary => "verify inner-boundary",
            VerifyTarget::Shastry => "verify shastry",
        },
        cfg.clone(),
    );
    let tol = cfg.tolerances.residual;
    let mut probes = Probes::new(&cfg);
    match target {
        VerifyTarget::Ybe => {
            let sig = cfg.signature()?;
            let eta = to_c(cfg.eta);
            let mut table = Table::new(&["sample", "lambda", "mu", "residual"]);
            let mut worst: f64 = 0.0;
            time(&mut report, "ybe", || -> Result<(), CliError> {
                for i in 0..cfg.samples {
                    let lambda = probes.next(LAMBDA_OFF);
                    let mu = probes.next(MU_OFF);
                    let r = chain::ybe_residual(sig, eta, lambda, mu)
                        .map_err(|e| core_err("yang-baxter check", e))?;
                    worst = worst.max(r);
                    table.push(vec![i.to_string(), fmt_c(lambda), fmt_c(mu), fmt_f(r)]);
                }
                Ok(())
            })?;
            report.table("residuals", table);
            report.le("graded-yang-baxter", worst, tol);
        }
        VerifyTarget::Fusion => {
            let params = cfg.chain_params()?;
            let tower =
                TransferTower::new(&params).map_err(|e| core_err("building the fused tower", e))?;
            let mut table = Table::new(&["sample", "lambda", "check", "residual"]);
            let mut route: f64 = 0.0;
            let mut bilinear: f64 = 0.0;
            let mut two_form: f64 = 0.0;
            time(&mut report, "fusion", || -> Result<(), CliError> {
                for i in 0..cfg.samples {
                    let lambda = probes.next(LAMBDA_OFF);
                    for (kind, label) in [
                        (ProjectorKind::Symmetric, "projector-sym"),
                        (ProjectorKind::Antisymmetric, "projector-anti"),
                    ] {
                        let via_proj = tower
                            .projector_route(2, kind, lambda)
                            .map_err(|e| core_err("projector route", e))?;
                        let via_interp = match kind {
                            ProjectorKind::Symmetric => tower.column(2, lambda),
                            ProjectorKind::Antisymmetric => tower.row(2, lambda),
                        }
                        .map_err(|e| core_err("interpolation route", e))?;
                        let diff = &via_proj - &via_interp;
                        let r = max_abs(&diff) / max_abs(&via_proj).max(1.0);
                        route = route.max(r);
                        table.push(vec![
                            i.to_string(),
                            fmt_c(lambda),
                            label.into(),
                            fmt_f(r),
                        ]);
                    }
                    let rb = tower
                        .bilinear_residual(1, 1, lambda)
                        .map_err(|e| core_err("bilinear identity", e))?;
                    bilinear = bilinear.max(rb);
                    table.push(vec![
                        i.to_string(),
                        fmt_c(lambda),
                        "bilinear-1-1".into(),
                        fmt_f(rb),
                    ]);
                    let rt = tower
                        .two_form_residual(2, 2, lambda)
                        .map_err(|e| core_err("two-form identity", e))?;
                    two_form = two_form.max(rt);
                    table.push(vec![
                        i.to_string(),
                        fmt_c(lambda),
                        "two-form-2-2".into(),
                        fmt_f(rt),
                    ]);
                }
                Ok(())
            })?;
            report.table("residuals", table);
            report.le("projector-vs-interpolation", route, tol);
            report.le("bilinear-identity", bilinear, tol);
            report.le("two-form-identity", two_form, tol);
        }
        VerifyTarget::InnerBoundary => {
            let params = cfg.chain_params()?;
            let tower =
                TransferTower::new(&params).map_err(|e| core_err("building the fused tower", e))?;
            let mut table = Table::new(&["sample", "lambda", "residual"]);
            let mut worst: f64 = 0.0;
            time(&mut report, "inner-boundary", || -> Result<(), CliError> {
                for i in 0..cfg.samples {
                    let lambda = probes.next(LAMBDA_OFF);
                    let r = tower
                        .inner_boundary_residual(lambda)
                        .map_err(|e| core_err("inner-boundary relation", e))?;
                    worst = worst.max(r);
                    table.push(vec![i.to_string(), fmt_c(lambda), fmt_f(r)]);
                }
                Ok(())
            })?;
            report.table("residuals", table);
            report.le("inner-boundary", worst, tol);
        }
        VerifyTarget::Shastry => {
            let hp = cfg.hubbard_params()?;
            let mut table = Table::new(&["sample", "check", "lambda", "mu", "residual"]);
            let worst = time(&mut report, "shastry", || {
                shastry_relations(&hp, &mut probes, cfg.samples, &mut table)
            })?;
            report.table("residuals", table);
            report.le("equal-point-reduction", worst.0, tol);
            report.le("shastry-yang-baxter", worst.1, tol);
            report.le("unitarity", worst.2, tol);
            report.le("scalar-yang-baxter", worst.3, tol);
        }
    }
    probes.record(&mut report);
    Ok(Completed::finish(report, false))
}

/// Shared Shastry relation sweep: equal-point reduction, the decorated YBE,
/// unitarity, and the scalar twist relation. Returns the four worst
/// residuals; evaluation at a trigonometric pole is surfaced as a config
/// error naming the offending points.
fn shastry_relations(
    hp: &sovlab_core::hubbard::HubbardParams,
    probes: &mut Probes,
    samples: usize,
    table: &mut Table,
) -> Result<(f64, f64, f64, f64), CliError> {
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..samples {
        let lambda = probes.next(LAMBDA_OFF);
        let mu = probes.next(MU_OFF);
        let xi = probes.next(XI_OFF);
        let at = |what: &str, pts: String, e: Error| match e {
            Error::Evaluation(msg) => {
                CliError::Config(format!("{what} cannot be evaluated at {pts}: {msg}"))
            }
            other => core_err(what, other),
        };
        let r_eq = rmatrix::equal_point_residual(lambda, hp.eta, hp.branch)
            .map_err(|e| at("equal-point reduction", format!("lambda={}", fmt_c(lambda)), e))?;
        worst.0 = worst.0.max(r_eq);
        table.push(vec![
            i.to_string(),
            "equal-point".into(),
            fmt_c(lambda),
            String::new(),
            fmt_f(r_eq),
        ]);
        let r_ybe = rmatrix::ybe_residual(lambda, mu, xi, hp.eta, hp.branch).map_err(|e| {
            at(
                "yang-baxter relation",
                format!("(lambda, mu, nu) = ({}, {}, {})", fmt_c(lambda), fmt_c(mu), fmt_c(xi)),
                e,
            )
        })?;
        worst.1 = worst.1.max(r_ybe);
        table.push(vec![
            i.to_string(),
            "yang-baxter".into(),
            fmt_c(lambda),
            fmt_c(mu),
            fmt_f(r_ybe),
        ]);
        let r_uni = rmatrix::unitarity_residual(lambda, mu, hp.eta, hp.branch).map_err(|e| {
            at(
                "unitarity relation",
                format!("(lambda, mu) = ({}, {})", fmt_c(lambda), fmt_c(mu)),
                e,
            )
        })?;
        worst.2 = worst.2.max(r_uni);
        table.push(vec![
            i.to_string(),
            "unitarity".into(),
            fmt_c(lambda),
            fmt_c(mu),
            fmt_f(r_uni),
        ]);
        let r_sc = rmatrix::scalar_ybe_residual(&hp.twist.k, lambda, mu, hp.eta, hp.branch)
            .map_err(|e| {
                at(
                    "scalar twist relation",
                    format!("(lambda, mu) = ({}, {})", fmt_c(lambda), fmt_c(mu)),
                    e,
                )
            })?;
        worst.3 = worst.3.max(r_sc);
        table.push(vec![
            i.to_string(),
            "scalar-ybe".into(),
            fmt_c(lambda),
            fmt_c(mu),
            fmt_f(r_sc),
        ]);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Method {
    /// Newton runs on the closure/null defect system.
    #[default]
    Closure,
    /// Per-node cubic factorization (singular twist only).
    Cubic,
    /// Brute-force joint diagonalization of the node transfer matrices.
    Diag,
}

fn require_gl12(params: &ChainParams) -> Result<(), CliError> {
    if (params.sig.m, params.sig.n) != (1, 2) {
        return Err(CliError::Config(
            "spectrum solvers cover the gl(1|2) chain; set \"model\": {\"gl\": {\"m\": 1, \"n\": 2}}"
                .into(),
        ));
    }
    Ok(())
}

/// Greedy nearest matching of `got` tuples onto `reference` tuples; returns
/// the per-row normalized distance and how many reference rows were hit.
fn match_rows(reference: &[Vec<C64>], got: &[Vec<C64>], scale: f64) -> Vec<(usize, f64)> {
    let mut used = vec![false; reference.len()];
    let mut out = Vec::with_capacity(got.len());
    for tuple in got {
        let mut best: Option<(usize, f64)> = None;
        for (j, r) in reference.iter().enumerate() {
            if used[j] || r.len() != tuple.len() {
                continue;
            }
            let d = tuple
                .iter()
                .zip(r)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("reference spectrum cannot be empty");
        used[j] = true;
        out.push((j, d / scale));
    }
    out
}

pub fn run_spectrum(cfg: RunConfig, method: Method) -> Result<Completed, CliError> {
    let mut report = RunReport::new("spectrum", cfg.clone());
    let params = cfg.chain_params()?;
    require_gl12(&params)?;
    let tol = cfg.tolerances.residual;
    let expected = solver::expected_count(params.n_sites());
    let scale = solver::node_scale(&params).map_err(|e| core_err("node scale", e))?;

    let diag = time(&mut report, "diagonalization", || {
        solver::diagonalization_spectrum(&params, cfg.seed)
    })
    .map_err(|e| core_err("joint diagonalization", e))?;

    let opts = solver::SolveOptions {
        seed: cfg.seed,
        tol: cfg.tolerances.residual.min(1e-8),
        starts_per_target: 30,
        max_rounds: 4,
    };
    let (tuples, complete) = match method {
        Method::Closure => {
            let s = time(&mut report, "closure-solver", || {
                solver::closure_spectrum(&params, &opts)
            })
            .map_err(|e| core_err("closure solver", e))?;
            (s.tuples, s.complete)
        }
        Method::Cubic => {
            let s = time(&mut report, "cubic-solver", || {
                solver::cubic_spectrum(&params, &opts)
            })
            .map_err(|e| core_err("cubic solver", e))?;
            (s.tuples, s.complete)
        }
        Method::Diag => (diag.tuples.clone(), diag.tuples.len() == expected),
    };

    // Separated basis for eigenvector reconstruction; failure to certify one
    // is reported as a note, not a fatal error.
    let basis = time(&mut report, "sov-basis", || {
        sov::default_source(&params, cfg.seed, cfg.tolerances.rank)
    });
    let basis = match basis {
        Ok((_, b)) => Some(b),
        Err(e) => {
            report
                .notes
                .push(format!("eigenvector reconstruction skipped: {e}"));
            None
        }
    };
    let vec_probes = sovlab_core::sampling::probe_points(cfg.seed, 91, 3, &params.xi, params.eta);

    let k = &params.twist.diag;
    let k_scale = k[1].norm().max(k[2].norm()).max(1.0);
    let qsc_applicable = k[0].norm() < 1e-10 * k_scale;

    let n = params.n_sites();
    let mut columns: Vec<String> = vec!["index".into()];
    columns.extend((1..=n).map(|a| format!("x{a}")));
    columns.extend(
        [
            "match_residual",
            "eigvec_residual",
            "qsc_residual",
            "bethe_residual",
            "admissible",
        ]
        .map(String::from),
    );
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };

    let matches = match_rows(&diag.tuples, &tuples, scale);
    let mut worst_match: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    let mut worst_qsc: f64 = 0.0;
    let mut worst_bethe: f64 = 0.0;
    let mut all_admissible = true;

    time(&mut report, "per-state-checks", || -> Result<(), CliError> {
        for (i, tuple) in tuples.iter().enumerate() {
            let (_, dist) = matches[i];
            worst_match = worst_match.max(dist);
            let mut row = vec![i.to_string()];
            row.extend(tuple.iter().map(|&x| fmt_c(x)));
            row.push(fmt_f(dist));
            match &basis {
                Some(b) => {
                    let (_, r) = sov::reconstruct_eigenvector(&params, b, tuple, &vec_probes)
                        .map_err(|e| core_err("eigenvector reconstruction", e))?;
                    worst_vec = worst_vec.max(r);
                    row.push(fmt_f(r));
                }
                None => row.push(String::new()),
            }
            if qsc_applicable {
                let q = qsc::build_with(&params, tuple, -k[1], cfg.seed)
                    .map_err(|e| core_err("q-function construction", e))?;
                let rq = q
                    .functional_residual
                    .max(q.node_residual)
                    .max(q.vanishing_residual);
                worst_qsc = worst_qsc.max(rq);
                row.push(fmt_f(rq));
                let roots = bethe::khat_roots(&params, tuple, &q)
                    .map_err(|e| core_err("root extraction", e))?;
                let (r1, r2) = bethe::bethe_residuals(&params, &roots);
                worst_bethe = worst_bethe.max(r1.max(r2));
                row.push(fmt_f(r1.max(r2)));
                let adm = bethe::admissible(&params, &roots, tol);
                all_admissible &= adm;
                row.push(adm.to_string());
            } else {
                row.extend([String::new(), String::new(), String::new()]);
            }
            table.push(row);
        }
        Ok(())
    })?;
    report.table("spectrum", table);

    let incomplete = !complete || tuples.len() != expected;
    if incomplete {
        report.notes.push(format!(
            "solver reached {} of {} expected states",
            tuples.len(),
            expected
        ));
    }
    report.le("spectrum-vs-diagonalization", worst_match, tol);
    if basis.is_some() {
        report.le("eigenvector-residual", worst_vec, tol);
    }
    if qsc_applicable {
        report.le("qsc-residual", worst_qsc, tol);
        report.le("bethe-residual", worst_bethe, tol);
        if !all_admissible {
            report
                .notes
                .push("an inadmissible root configuration appeared".into());
            report.le("admissibility", 1.0, 0.0);
        }
    } else {
        report.notes.push(
            "q-function and root columns need the singular twist k1 = 0; skipped".into(),
        );
    }
    Ok(Completed::finish(report, incomplete))
}

// ---------------------------------------------------------------------------
// sov-rank

pub fn run_sov_rank(cfg: RunConfig) -> Result<Completed, CliError> {
    let mut report = RunReport::new("sov-rank", cfg.clone());
    let tol = cfg.tolerances.rank;
    let mut table = Table::new(&["model", "source", "sigma_min", "sigma_max", "ratio"]);
    let ratio = match &cfg.model {
        crate::config::ModelSpec::Gl { .. } => {
            let params = cfg.chain_params()?;
            let (label, basis): (String, SovBasis) = match cfg.source {
                SourceSpec::Ones => {
                    let src = SourceCovector::ones(params.sig, params.n_sites());
                    let b = time(&mut report, "basis", || SovBasis::build(&params, &src))
                        .map_err(|e| core_err("separated basis", e))?;
                    ("ones".into(), b)
                }
                SourceSpec::Random => {
                    let (_, b) = time(&mut report, "basis", || {
                        sov::default_source(&params, cfg.seed, tol)
                    })
                    .map_err(|e| core_err("separated basis", e))?;
                    ("random-hunt".into(), b)
                }
            };
            table.push(vec![
                format!("gl({}|{})", params.sig.m, params.sig.n),
                label,
                fmt_f(basis.sigma_min),
                fmt_f(basis.sigma_max),
                fmt_f(basis.condition_ratio()),
            ]);
            basis.condition_ratio()
        }
        crate::config::ModelSpec::Hubbard { .. } => {
            let hp = cfg.hubbard_params()?;
            let (label, basis) = match cfg.source {
                SourceSpec::Ones => {
                    let src = HubbardSource::ones(hp.n_sites());
                    let b = time(&mut report, "basis", || hsov::sov_basis(&hp, &src, cfg.seed))
                        .map_err(|e| core_err("separated basis", e))?;
                    ("ones".to_string(), b)
                }
                SourceSpec::Random => {
                    let (_, b) = time(&mut report, "basis", || {
                        hsov::default_basis(&hp, cfg.seed, tol)
                    })
                    .map_err(|e| core_err("separated basis", e))?;
                    ("random-hunt".to_string(), b)
                }
            };
            let (lo, hi) = match basis.certificate {
                hsov::RankCertificate::FullSvd {
                    sigma_min,
                    sigma_max,
                } => (sigma_min, sigma_max),
                hsov::RankCertificate::RandomProbe {
                    sigma_min_est,
                    sigma_max_est,
                } => (sigma_min_est, sigma_max_est),
            };
            table.push(vec![
                "hubbard".into(),
                label,
                fmt_f(lo),
                fmt_f(hi),
                fmt_f(basis.certificate.ratio()),
            ]);
            basis.certificate.ratio()
        }
    };
    report.table("certificate", table);
    report.ge("rank-certificate", ratio, tol);
    Ok(Completed::finish(report, false))
}

// ---------------------------------------------------------------------------
// qsc

pub fn run_qsc(cfg: RunConfig) -> Result<Completed, CliError> {
    let mut report = RunReport::new("qsc", cfg.clone());
    let params = cfg.chain_params()?;
    require_gl12(&params)?;
    let k = &params.twist.diag;
    if k[0].norm() >= 1e-10 * k[1].norm().max(k[2].norm()).max(1.0) {
        return Err(CliError::Config(
            "the q-function construction needs the singular twist: set the first \
             eigenvalue k1 = 0"
                .into(),
        ));
    }
    let tol = cfg.tolerances.residual;
    let expected = solver::expected_count(params.n_sites());
    let diag = time(&mut report, "diagonalization", || {
        solver::diagonalization_spectrum(&params, cfg.seed)
    })
    .map_err(|e| core_err("joint diagonalization", e))?;

    let mut table = Table::new(&[
        "index",
        "phi_degree",
        "phi_roots",
        "functional",
        "node",
        "vanishing",
        "root_separation",
        "wavefunction",
        "level1_roots",
        "level2_roots",
        "bethe_residual",
        "admissible",
    ]);
    let mut worst_q: f64 = 0.0;
    let mut worst_wave: f64 = 0.0;
    let mut worst_bethe: f64 = 0.0;
    let mut all_admissible = true;
    time(&mut report, "q-functions", || -> Result<(), CliError> {
        for (i, tuple) in diag.tuples.iter().enumerate() {
            let q = qsc::build_with(&params, tuple, -k[1], cfg.seed)
                .map_err(|e| core_err("q-function construction", e))?;
            let wave = qsc::wavefunction_residual(&params, tuple, &q);
            let roots = bethe::khat_roots(&params, tuple, &q)
                .map_err(|e| core_err("root extraction", e))?;
            let (r1, r2) = bethe::bethe_residuals(&params, &roots);
            let adm = bethe::admissible(&params, &roots, tol);
            worst_q = worst_q
                .max(q.functional_residual)
                .max(q.node_residual)
                .max(q.vanishing_residual);
            worst_wave = worst_wave.max(wave);
            worst_bethe = worst_bethe.max(r1.max(r2));
            all_admissible &= adm;
            let join = |v: &[C64]| {
                v.iter()
                    .map(|&z| fmt_c(z))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            table.push(vec![
                i.to_string(),
                (q.phi.len() - 1).to_string(),
                join(&q.roots),
                fmt_f(q.functional_residual),
                fmt_f(q.node_residual),
                fmt_f(q.vanishing_residual),
                fmt_f(q.root_separation),
                fmt_f(wave),
                join(&roots.level1),
                join(&roots.level2),
                fmt_f(r1.max(r2)),
                adm.to_string(),
            ]);
        }
        Ok(())
    })?;
    report.table("qfunctions", table);

    let incomplete = diag.tuples.len() != expected;
    report.le("qsc-residual", worst_q, tol);
    report.le("wavefunction-residual", worst_wave, tol);
    report.le("bethe-residual", worst_bethe, tol);
    if !all_admissible {
        report.le("admissibility", 1.0, 0.0);
    }
    Ok(Completed::finish(report, incomplete))
}

// ---------------------------------------------------------------------------
// hubbard

pub fn run_hubbard(cfg: RunConfig) -> Result<Completed, CliError> {
    let mut report = RunReport::new("hubbard", cfg.clone());
    let hp = cfg.hubbard_params()?;
    let tol = cfg.tolerances.residual;
    let mut probes = Probes::new(&cfg);

    let mut relations = Table::new(&["sample", "check", "lambda", "mu", "residual"]);
    let worst = time(&mut report, "relations", || {
        shastry_relations(&hp, &mut probes, cfg.samples, &mut relations)
    })?;
    report.table("relations", relations);
    report.le("equal-point-reduction", worst.0, tol);
    report.le("shastry-yang-baxter", worst.1, tol);
    report.le("unitarity", worst.2, tol);
    report.le("scalar-yang-baxter", worst.3, tol);

    if hp.dim() <= 256 {
        let mut table = Table::new(&["sample", "lambda", "mu", "residual"]);
        let mut worst_comm: f64 = 0.0;
        time(&mut report, "commutation", || -> Result<(), CliError> {
            for i in 0..cfg.samples.min(4) {
                let lambda = probes.next(LAMBDA_OFF);
                let mu = probes.next(MU_OFF);
                let r = htransfer::commutation_residual(&hp, lambda, mu)
                    .map_err(|e| core_err("transfer commutation", e))?;
                worst_comm = worst_comm.max(r);
                table.push(vec![i.to_string(), fmt_c(lambda), fmt_c(mu), fmt_f(r)]);
            }
            Ok(())
        })?;
        report.table("commutation", table);
        report.le("transfer-commutation", worst_comm, tol);
    } else {
        report
            .notes
            .push("transfer commutation skipped: state space larger than 256".into());
    }

    let basis = time(&mut report, "basis", || match cfg.source {
        SourceSpec::Ones => {
            hsov::sov_basis(&hp, &HubbardSource::ones(hp.n_sites()), cfg.seed)
        }
        SourceSpec::Random => hsov::default_basis(&hp, cfg.seed, cfg.tolerances.rank).map(|p| p.1),
    })
    .map_err(|e| core_err("separated basis", e))?;
    let mut cert = Table::new(&["source", "ratio"]);
    cert.push(vec![
        match cfg.source {
            SourceSpec::Ones => "ones".into(),
            SourceSpec::Random => "random-hunt".into(),
        },
        fmt_f(basis.certificate.ratio()),
    ]);
    report.table("certificate", cert);
    report.ge("rank-certificate", basis.certificate.ratio(), cfg.tolerances.rank);

    probes.record(&mut report);
    Ok(Completed::finish(report, false))
}

// ---------------------------------------------------------------------------
// reproduce-appendix-b

pub fn run_reproduce(cfg: RunConfig) -> Result<Completed, CliError> {
    let mut report = RunReport::new("reproduce-appendix-b", cfg.clone());
    let params = cfg.chain_params()?;
    require_gl12(&params)?;
    if params.n_sites() != 2 {
        return Err(CliError::Config(
            "the reference table is defined for exactly 2 sites".into(),
        ));
    }
    if params.xi[0].norm() > 1e-12 {
        return Err(CliError::Config(
            "the reference table pins the first inhomogeneity at 0; \
             set \"inhomogeneities\": [[0.0, 0.0], [..]]"
                .into(),
        ));
    }
    let k = [
        params.twist.diag[0],
        params.twist.diag[1],
        params.twist.diag[2],
    ];
    let closed_polys = reference::reference_polynomials(params.eta, params.xi[1], k);
    let closed_tuples = reference::reference_tuples(params.eta, params.xi[1], k);
    let scale = solver::node_scale(&params).map_err(|e| core_err("node scale", e))?;

    let opts = solver::SolveOptions {
        seed: cfg.seed,
        tol: cfg.tolerances.residual.min(1e-9),
        starts_per_target: 30,
        max_rounds: 4,
    };
    let solved = time(&mut report, "closure-solver", || {
        solver::closure_spectrum(&params, &opts)
    })
    .map_err(|e| core_err("closure solver", e))?;
    let diag = time(&mut report, "diagonalization", || {
        solver::diagonalization_spectrum(&params, cfg.seed)
    })
    .map_err(|e| core_err("joint diagonalization", e))?;

    let closed_vecs: Vec<Vec<C64>> = closed_tuples.iter().map(|t| t.to_vec()).collect();
    let solver_match = match_rows(&closed_vecs, &solved.tuples, scale);
    let diag_match = match_rows(&closed_vecs, &diag.tuples, scale);

    // Rows in closed-form order: for each reference state, the matched
    // solver and diagonalization tuples with their normalized mismatches.
    let mut by_closed_solver: Vec<Option<(usize, f64)>> = vec![None; closed_vecs.len()];
    for (i, &(j, d)) in solver_match.iter().enumerate() {
        by_closed_solver[j] = Some((i, d));
    }
    let mut by_closed_diag: Vec<Option<(usize, f64)>> = vec![None; closed_vecs.len()];
    for (i, &(j, d)) in diag_match.iter().enumerate() {
        by_closed_diag[j] = Some((i, d));
    }

    let mut table = Table::new(&[
        "state",
        "c0",
        "c1",
        "c2",
        "x1_closed",
        "x2_closed",
        "x1_solver",
        "x2_solver",
        "solver_mismatch",
        "diag_mismatch",
    ]);
    let mut worst_solver: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    for (j, poly) in closed_polys.iter().enumerate() {
        let (solver_cells, d_solver) = match by_closed_solver[j] {
            Some((i, d)) => {
                worst_solver = worst_solver.max(d);
                (
                    [fmt_c(solved.tuples[i][0]), fmt_c(solved.tuples[i][1])],
                    fmt_f(d),
                )
            }
            None => ([String::new(), String::new()], "unmatched".into()),
        };
        let d_diag = match by_closed_diag[j] {
            Some((_, d)) => {
                worst_diag = worst_diag.max(d);
                fmt_f(d)
            }
            None => "unmatched".into(),
        };
        table.push(vec![
            j.to_string(),
            fmt_c(poly[0]),
            fmt_c(poly[1]),
            fmt_c(poly[2]),
            fmt_c(closed_tuples[j][0]),
            fmt_c(closed_tuples[j][1]),
            solver_cells[0].clone(),
            solver_cells[1].clone(),
            d_solver,
            d_diag,
        ]);
    }
    report.table("reference", table);

    let bound = cfg.tolerances.residual.min(1e-9);
    let incomplete = !solved.complete
        || by_closed_solver.iter().any(Option::is_none)
        || by_closed_diag.iter().any(Option::is_none);
    report.le("closed-form-vs-solver", worst_solver, bound);
    report.le("closed-form-vs-diagonalization", worst_diag, bound);
    Ok(Completed::finish(report, incomplete))
}
