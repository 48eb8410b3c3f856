use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use landau_core::asymptotics::{coefficients, heat_level_cutoff, heat_trace_check, trace_formula_check};
use landau_core::kernels::{heat_kernel, projection_kernel, resolvent_kernel, KernelSample, ResolventMode};
use landau_core::specfun::{
    bessel, elliptic_k, gamma_digamma, gamma_u, gauss_legendre, kummer_m, laguerre, tricomi_m, BesselKind, GammaWant,
    TruncationBudget,
};
use landau_core::spectra::{compute_clusters, ClusterResult, Truncation};
use landau_lab::config::{Format, RunConfig};
use landau_lab::report::{sig15, Cell, Report};
use landau_lab::suite;
use num_complex::Complex64 as C;
use serde_json::json;

#[derive(Parser)]
#[command(name = "landau-lab", version, about = "Eigenvalue clusters of the perturbed Landau Hamiltonian")]
struct Cli {
    /// TOML (or .json) run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads
    #[arg(long, global = true, env = "LANDAU_LAB_JOBS")]
    jobs: Option<usize>,
    /// Re-run with N_max + 10 and fail if any moment moves by more than 1e-6
    #[arg(long, global = true)]
    check_truncation: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a special function
    #[command(subcommand)]
    Sf(Sf),
    /// Evaluate a kernel of the Landau Hamiltonian at a point pair
    Kernel(KernelArgs),
    /// Cluster widths and moments
    Clusters,
    /// Closed-form asymptotic coefficients
    Coefficients,
    /// Tail-corrected trace formula
    TraceFormula,
    /// Heat-trace expansion residuals
    HeatTrace,
    /// Run the full verification suite
    Verify,
    /// Print the effective configuration as canonical TOML
    Config,
}

#[derive(Subcommand)]
enum Sf {
    Laguerre {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        alpha: u32,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    Bessel {
        #[arg(long, value_enum, default_value = "j")]
        kind: Kind,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        x: f64,
    },
    /// ln Γ(z) or ψ(z)
    Gamma {
        #[arg(long, allow_negative_numbers = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        im: f64,
        #[arg(long)]
        digamma: bool,
    },
    /// Kummer M(a, 1; ζ)
    KummerM(ParamA),
    /// Γ(a) U(a, 1; ζ)
    GammaU(ParamA),
    /// Bessel-series expansion of M(a, 1; ζ) with its tail bound
    TricomiM {
        #[command(flatten)]
        p: ParamA,
        #[arg(long, default_value_t = 40)]
        terms: usize,
    },
    EllipticK {
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
    },
    GaussLegendre {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        hi: f64,
    },
}

#[derive(Args)]
struct ParamA {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a_im: f64,
    #[arg(long)]
    zeta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    J,
    Y,
    Jdot,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Projection,
    Heat,
    Resolvent,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(value_enum)]
    kind: KernelKind,
    /// Landau level (projection)
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Time (heat)
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Spectral parameter (resolvent)
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    z_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z_im: f64,
    /// Replace the closed form by an eigenfunction sum of this many levels
    #[arg(long)]
    eigen_sum: Option<usize>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [0.0, 0.0])]
    x: Vec<f64>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [1.0, 0.0])]
    y: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let truncation = e
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(landau_core::Error::TruncationInsufficient(_))));
            ExitCode::from(if truncation { 2 } else { 1 })
        }
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Cmd::Sf(sf) = &cli.cmd {
        run_sf(sf)?;
        return Ok(ExitCode::SUCCESS);
    }
    if let Cmd::Kernel(k) = &cli.cmd {
        run_kernel(k)?;
        return Ok(ExitCode::SUCCESS);
    }
    let cfg = load_config(&cli)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let out = cfg.out.clone();
    let emit = |r: Report| r.emit(cfg.format, out.as_deref());
    match cli.cmd {
        Cmd::Clusters => emit(clusters_report(&cfg, cli.check_truncation)?)?,
        Cmd::Coefficients => emit(coefficients_report(&cfg)?)?,
        Cmd::TraceFormula => emit(trace_formula_report(&cfg, cli.check_truncation)?)?,
        Cmd::HeatTrace => emit(heat_trace_report(&cfg)?)?,
        Cmd::Config => print!("{}", cfg.to_toml()?),
        Cmd::Verify => return verify(&cfg),
        Cmd::Sf(_) | Cmd::Kernel(_) => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn complex_line(z: C) -> String {
    if z.im == 0.0 {
        sig15(z.re)
    } else {
        format!("{} {}", sig15(z.re), sig15(z.im))
    }
}

fn run_sf(sf: &Sf) -> anyhow::Result<()> {
    let budget = TruncationBudget::default();
    let one = C::new(1.0, 0.0);
    match sf {
        Sf::Laguerre { n, alpha, t } => println!("{}", sig15(laguerre(*n, *alpha, *t))),
        Sf::Bessel { kind, m, x } => {
            let kind = match kind {
                Kind::J => BesselKind::J,
                Kind::Y => BesselKind::Y,
                Kind::Jdot => BesselKind::Jdot,
            };
            println!("{}", sig15(bessel(kind, *m, *x)?));
        }
        Sf::Gamma { re, im, digamma } => {
            let want = if *digamma { GammaWant::Psi } else { GammaWant::LnGamma };
            println!("{}", complex_line(gamma_digamma(C::new(*re, *im), want)?));
        }
        Sf::KummerM(p) => println!("{}", complex_line(kummer_m(C::new(p.a, p.a_im), one, p.zeta, &budget, false)?.value)),
        Sf::GammaU(p) => println!("{}", complex_line(gamma_u(C::new(p.a, p.a_im), p.zeta, &budget)?)),
        Sf::TricomiM { p, terms } => {
            let (v, bound) = tricomi_m(C::new(p.a, p.a_im), p.zeta, *terms)?;
            println!("{}", complex_line(v));
            println!("tail bound {}", sig15(bound));
        }
        Sf::EllipticK { m } => println!("{}", sig15(elliptic_k(*m)?)),
        Sf::GaussLegendre { n, lo, hi } => {
            let rule = gauss_legendre(*n, *lo, *hi)?;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                println!("{} {}", sig15(*x), sig15(*w));
            }
        }
    }
    Ok(())
}

fn run_kernel(k: &KernelArgs) -> anyhow::Result<()> {
    let x = [k.x[0], k.x[1]];
    let y = [k.y[0], k.y[1]];
    let s: KernelSample = match k.kind {
        KernelKind::Projection => projection_kernel(k.n, x, y, k.b)?,
        KernelKind::Heat => heat_kernel(k.t, x, y, k.b)?,
        KernelKind::Resolvent => {
            let mode = k.eigen_sum.map_or(ResolventMode::ClosedForm, ResolventMode::EigenSum);
            resolvent_kernel(C::new(k.z_re, k.z_im), x, y, k.b, mode)?
        }
    };
    println!("{} {}", sig15(s.value.re), sig15(s.value.im));
    if s.underflow {
        eprintln!("note: modulus underflows; value reported as zero");
    }
    Ok(())
}

fn truncation_meta(r: &mut Report, cfg: &RunConfig, t: Truncation) {
    r.meta("truncation", json!({ "n_max": t.n_max, "k_max": t.k_max }));
    r.meta("b", json!(cfg.b));
    r.meta("potential", serde_json::to_value(&cfg.potential).unwrap_or_default());
}

fn clusters_with_check(cfg: &RunConfig, check: bool) -> anyhow::Result<(Vec<ClusterResult>, Truncation)> {
    let v = cfg.potential()?;
    let t = cfg.truncation(&v);
    let clusters = compute_clusters(&v, cfg.b, cfg.n_range(), t)?;
    if check {
        let wider = Truncation { n_max: t.n_max + 10, ..t };
        let again = compute_clusters(&v, cfg.b, cfg.n_range(), wider)?;
        for (a, b) in clusters.iter().zip(&again) {
            let moved = (a.moments[0] - b.moments[0]).abs();
            if moved > 1e-6 {
                return Err(landau_core::Error::TruncationInsufficient(format!(
                    "μ_{} moves by {moved:e} when N_max goes {} → {}",
                    a.n, t.n_max, wider.n_max
                ))
                .into());
            }
        }
    }
    Ok((clusters, t))
}

fn clusters_report(cfg: &RunConfig, check: bool) -> anyhow::Result<Report> {
    let (clusters, t) = clusters_with_check(cfg, check)?;
    let mut r = Report::new("clusters", &["n", "width", "width_sqrt_n", "mu0", "mu1", "mu2"]);
    for c in &clusters {
        r.push(vec![
            Cell::Int(c.n as i64),
            Cell::Real(c.width),
            Cell::Real(c.width * (c.n as f64).sqrt()),
            Cell::Real(c.moments[0]),
            Cell::Real(c.moments[1]),
            Cell::Real(c.moments[2]),
        ]);
    }
    truncation_meta(&mut r, cfg, t);
    r.detail = Some(serde_json::to_value(&clusters)?);
    Ok(r)
}

fn coefficients_report(cfg: &RunConfig) -> anyhow::Result<Report> {
    let v = cfg.potential()?;
    let c = coefficients(&v, cfg.b)?;
    let mut r = Report::new(
        "coefficients",
        &["alpha0", "alpha3", "alpha0_1", "minus_4b_alpha3", "identity_gap", "newton_energy", "integral_v2"],
    );
    r.push(vec![
        Cell::Real(c.alpha0),
        Cell::Real(c.alpha3),
        Cell::Real(c.alpha0_1),
        Cell::Real(-4.0 * c.b * c.alpha3),
        Cell::Real(c.identity_gap()),
        Cell::Real(c.newton_energy),
        Cell::Real(v.integral_v2()),
    ]);
    r.meta("b", json!(cfg.b));
    r.meta("potential", serde_json::to_value(&cfg.potential)?);
    Ok(r)
}

fn trace_formula_report(cfg: &RunConfig, check: bool) -> anyhow::Result<Report> {
    if cfg.n_range[0] != 0 {
        bail!("the trace formula needs clusters from n = 0; set n_range = [0, N]");
    }
    let v = cfg.potential()?;
    let coeffs = coefficients(&v, cfg.b)?;
    let (clusters, t) = clusters_with_check(cfg, check)?;
    let rep = trace_formula_check(&v, &clusters, &coeffs, cfg.fit_window())?;
    let mut r = Report::new(
        "trace_formula",
        &["n_top", "partial_sum", "lhs_estimate", "rhs", "gap", "fitted_alpha3", "lhs_closed_form_tail", "gap_closed_form_tail"],
    );
    r.push(vec![
        Cell::Int(rep.n_top as i64),
        Cell::Real(rep.partial_sum),
        Cell::Real(rep.lhs_estimate),
        Cell::Real(rep.rhs),
        Cell::Real(rep.gap),
        Cell::Real(rep.fitted_alpha3),
        Cell::Real(rep.lhs_closed_form_tail),
        Cell::Real(rep.gap_closed_form_tail),
    ]);
    truncation_meta(&mut r, cfg, t);
    r.meta("fit_window", json!(cfg.fit_window));
    Ok(r)
}

fn heat_trace_report(cfg: &RunConfig) -> anyhow::Result<Report> {
    let v = cfg.potential()?;
    let t_min = cfg.t_list.iter().cloned().fold(f64::INFINITY, f64::min);
    // the heat trace sums every level, so the cluster-range cutoff does not apply
    let t = Truncation {
        n_max: cfg
            .truncation
            .map_or(heat_level_cutoff(t_min, cfg.b), |t| t.n_max),
        k_max: cfg.truncation(&v).k_max,
    };
    let rows = heat_trace_check(&v, cfg.b, &cfg.t_list, t)?;
    let mut r = Report::new("heat_trace", &["t", "lhs", "model", "residual"]);
    for row in &rows {
        r.push(vec![Cell::Real(row.t), Cell::Real(row.lhs), Cell::Real(row.model), Cell::Real(row.residual)]);
    }
    truncation_meta(&mut r, cfg, t);
    Ok(r)
}

fn verify(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let results = suite::run(cfg, |c| println!("{c}"))?;
    let failed = results.iter().filter(|c| !c.pass).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("verify.json"), serde_json::to_vec_pretty(&results)?)?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
