//! Command dispatcher behind the `orbitlab` binary. [`run`] returns the exit
//! code and output instead of printing, so the whole CLI is testable in-process.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use orbitlab::error::ErrorKind;
use orbitlab::finite_gabor::{self, FiniteWH, SubgroupSpec};
use orbitlab::kernels::{self, Verdict};
use orbitlab::lattice::{self, DensityVerdict};
use orbitlab::linalg::Subspace;
use orbitlab::polarization;
use orbitlab::rational::{self, Rational};
use orbitlab::schrodinger::{self, GridSpec, SchrodingerRep, StateVector};
use orbitlab::workspace::{self, Workspace};
use orbitlab::{coadjoint, Error, LieAlgebra};
use serde_json::{json, Value};

/// Workspace files shipped with the binary, used when `--algebra` names one
/// of them and no such file exists on disk.
pub const PRESETS: &[(&str, &str)] = &[
    ("heisenberg.json", include_str!("../presets/heisenberg.json")),
    ("h2.json", include_str!("../presets/h2.json")),
    ("engel.json", include_str!("../presets/engel.json")),
    ("free2step3.json", include_str!("../presets/free2step3.json")),
];

#[derive(Debug, Parser)]
#[command(name = "orbitlab", version, about = "Coadjoint orbits, projective kernels and density checks")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// CSV output (subsystem curves, finite scans).
    #[arg(long, global = true)]
    csv: bool,
    /// Seed for every sampling step.
    #[arg(long, global = true, env = "ORBITLAB_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Workspace JSON file, or the name of a bundled one.
    #[arg(long)]
    algebra: String,
}

#[derive(Debug, Args)]
struct OrbitArgs {
    #[command(flatten)]
    ws: AlgebraArgs,
    /// Functional name from the workspace.
    #[arg(long)]
    ell: String,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Central character λ, as `p/q`.
    #[arg(long, default_value = "1")]
    lambda: String,
    #[arg(long = "grid-R", default_value_t = schrodinger::DEFAULT_HALF_WIDTH)]
    grid_r: f64,
    #[arg(long = "grid-N", default_value_t = schrodinger::DEFAULT_SAMPLES)]
    grid_n: usize,
    /// gaussian, hermite:K, translated:A, smooth[:SEED], rough[:SEED]
    #[arg(long, default_value = "gaussian")]
    eta: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check antisymmetry, Jacobi and nilpotency.
    Validate(AlgebraArgs),
    /// Orbit dimension, flatness, formal dimension and projective kernel.
    Analyze(OrbitArgs),
    /// Vergne polarization subordinate to the functional.
    Polarize(OrbitArgs),
    /// Projective kernel by orbit sampling.
    Pker(OrbitArgs),
    /// Coherent-state classification.
    Classify(OrbitArgs),
    /// Density product covol(p(Γ)) · d_π for a lattice.
    Density {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long)]
        lattice: String,
        /// Rescale the invariant measure on G/pker by this factor.
        #[arg(long, default_value = "1")]
        scale: String,
    },
    /// Normalized moment map J/2π of a grid state.
    MomentMap(GridArgs),
    /// Symplectic and complex orbit tests.
    OrbitTest(GridArgs),
    /// Formal dimension by quadrature of the matrix coefficient.
    Admissibility(GridArgs),
    /// Completeness indicators for a lattice-orbit subsystem.
    Subsystem {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 48)]
        probes: usize,
    },
    /// Finite Weyl-Heisenberg model on C^n.
    GaborFinite {
        #[arg(long)]
        n: usize,
        /// Exhaustive scan over all n' <= n.
        #[arg(long)]
        scan: bool,
        /// Subgroup generators, e.g. "gen=(1,1)" or "gen=(1,0),(0,2)".
        #[arg(long)]
        subgroup: Option<String>,
        #[arg(long, default_value = "gaussian")]
        eta: String,
    },
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Hypothesis => 3,
        ErrorKind::Numeric => 4,
        ErrorKind::Internal => 5,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(e.kind()), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn load(arg: &str) -> Result<Workspace, Error> {
    let path = Path::new(arg);
    if path.exists() {
        return workspace::load_workspace(path);
    }
    match PRESETS.iter().find(|(name, _)| *name == arg) {
        Some((name, text)) => workspace::parse_workspace(text, name),
        None => Err(Error::Input(format!("{arg}: no such file or bundled workspace"))),
    }
}

fn emit(json: bool, value: Value, text: String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&value).expect("serializable");
        s.push('\n');
        s
    } else {
        text
    }
}

fn fmt_vector(names: &[String], v: &[Rational]) -> String {
    let mut s = String::new();
    for (name, c) in names.iter().zip(v) {
        if *c == rational::zero() {
            continue;
        }
        let neg = c < &rational::zero();
        let mag = rational::abs(c);
        let term = if mag == rational::one() { name.clone() } else { format!("{} {name}", rational::format(&mag)) };
        if s.is_empty() {
            s = if neg { format!("-{term}") } else { term };
        } else {
            let _ = write!(s, " {} {term}", if neg { '-' } else { '+' });
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn fmt_subspace(names: &[String], s: &Subspace) -> String {
    let parts: Vec<String> = s.basis().iter().map(|v| fmt_vector(names, v)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn subspace_json(names: &[String], s: &Subspace) -> Value {
    Value::Array(s.basis().iter().map(|v| Value::String(fmt_vector(names, v))).collect())
}

fn rat_json(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn tuple(v: &[Rational]) -> String {
    format!("({})", v.iter().map(rational::format).collect::<Vec<_>>().join(", "))
}

fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn header(ws: &Workspace) -> String {
    format!("algebra: {} (dim {}, class {})\n", ws.source, ws.algebra.dim(), ws.algebra.class())
}

fn dispatch(cli: &Cli) -> Result<String, Error> {
    let seed = cli.seed.unwrap_or(kernels::DEFAULT_SEED);
    let csv_ok = matches!(cli.command, Command::Subsystem { .. } | Command::GaborFinite { scan: true, .. });
    if cli.csv && !csv_ok {
        return Err(Error::Input("--csv is available for subsystem and gabor-finite --scan only".into()));
    }
    match &cli.command {
        Command::Validate(a) => validate(cli, a),
        Command::Analyze(o) => analyze(cli, o, seed),
        Command::Polarize(o) => polarize(cli, o),
        Command::Pker(o) => pker(cli, o, seed),
        Command::Classify(o) => classify(cli, o, seed),
        Command::Density { orbit, lattice, scale } => density(cli, orbit, lattice, scale, seed),
        Command::MomentMap(g) => moment_map(cli, g, seed),
        Command::OrbitTest(g) => orbit_test(cli, g, seed),
        Command::Admissibility(g) => admissibility(cli, g, seed),
        Command::Subsystem { grid, alpha, beta, probes } => subsystem(cli, grid, alpha, beta, *probes, seed),
        Command::GaborFinite { n, scan, subgroup, eta } => gabor_finite(cli, *n, *scan, subgroup.as_deref(), eta, seed),
    }
}

fn validate(cli: &Cli, a: &AlgebraArgs) -> Result<String, Error> {
    let ws = load(&a.algebra)?;
    let r = ws.algebra.validate();
    let value = json!({
        "source": ws.source,
        "dim": ws.algebra.dim(),
        "basis": ws.algebra.names(),
        "antisymmetry_violations": r.antisymmetry_violations.len(),
        "jacobi_violations": r.jacobi_violations.len(),
        "nilpotency_class": r.nilpotency_class,
        "functionals": ws.functionals.keys().collect::<Vec<_>>(),
        "lattices": ws.lattices.keys().collect::<Vec<_>>(),
        "valid": r.ok(),
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "basis: {}", ws.algebra.names().join(", "));
    let _ = writeln!(t, "antisymmetry: ok");
    let _ = writeln!(t, "jacobi: ok");
    let _ = writeln!(t, "nilpotency_class: {}", ws.algebra.class());
    let _ = writeln!(t, "functionals: {}", ws.functionals.keys().cloned().collect::<Vec<_>>().join(", "));
    let _ = writeln!(t, "lattices: {}", ws.lattices.keys().cloned().collect::<Vec<_>>().join(", "));
    Ok(emit(cli.json, value, t))
}

fn orbit_inputs(o: &OrbitArgs) -> Result<(Workspace, coadjoint::Functional), Error> {
    let ws = load(&o.ws.algebra)?;
    let ell = ws.functional(&o.ell)?.clone();
    Ok((ws, ell))
}

fn analyze(cli: &Cli, o: &OrbitArgs, seed: u64) -> Result<String, Error> {
    let (ws, ell) = orbit_inputs(o)?;
    let alg = &ws.algebra;
    let names = alg.names();
    let a = coadjoint::analyze(alg, &ell)?;
    let stab = coadjoint::stabilizer(alg, &ell)?.algebra;
    let k = kernels::projective_kernel_seeded(alg, &ell, seed)?;
    let d_pi = if a.square_integrable { Some(a.formal_dimension.clone()) } else { None };
    let value = json!({
        "source": ws.source,
        "ell": { "name": o.ell, "coords": ell.coords.iter().map(rat_json).collect::<Vec<_>>() },
        "orbit_dim": a.orbit_dim,
        "stabilizer": subspace_json(names, &stab),
        "flat": a.flat,
        "pfaffian": rat_json(&a.pfaffian),
        "d_pi": d_pi.as_ref().map(rat_json),
        "square_integrable": a.square_integrable,
        "pker": subspace_json(names, &k.pker),
        "normalization": a.normalization_tag,
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "ell: {} = {}", o.ell, tuple(&ell.coords));
    let _ = writeln!(t, "orbit_dim: {}", a.orbit_dim);
    let _ = writeln!(t, "stabilizer: {}", fmt_subspace(names, &stab));
    let _ = writeln!(t, "flat: {}", a.flat);
    match &d_pi {
        Some(d) => {
            let _ = writeln!(t, "d_pi: {}", rational::format(d));
        }
        None if a.orbit_dim == 0 => {
            let _ = writeln!(t, "d_pi: none (character)");
        }
        None => {
            let _ = writeln!(t, "d_pi: none (orbit not flat)");
        }
    }
    let _ = writeln!(t, "pker: {}", fmt_subspace(names, &k.pker));
    let _ = writeln!(t, "normalization: {}", a.normalization_tag);
    Ok(emit(cli.json, value, t))
}

fn polarize(cli: &Cli, o: &OrbitArgs) -> Result<String, Error> {
    let (ws, ell) = orbit_inputs(o)?;
    let names = ws.algebra.names();
    let p = polarization::vergne_polarization(&ws.algebra, &ell)?;
    let value = json!({
        "source": ws.source,
        "ell": o.ell,
        "polarization": subspace_json(names, &p.subalgebra),
        "dim": p.subalgebra.dim(),
        "subordinate": p.subordinate_ok,
        "subalgebra": p.subalgebra_ok,
        "dimension": p.dimension_ok,
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "ell: {} = {}", o.ell, tuple(&ell.coords));
    let _ = writeln!(t, "polarization: {}", fmt_subspace(names, &p.subalgebra));
    let _ = writeln!(t, "dim: {}", p.subalgebra.dim());
    let _ = writeln!(t, "checks: subordinate {}, subalgebra {}, dimension {}", p.subordinate_ok, p.subalgebra_ok, p.dimension_ok);
    let _ = writeln!(t, "character: exp X -> e^(2 pi i ell(X)) on the polarization");
    Ok(emit(cli.json, value, t))
}

fn pker(cli: &Cli, o: &OrbitArgs, seed: u64) -> Result<String, Error> {
    let (ws, ell) = orbit_inputs(o)?;
    let names = ws.algebra.names();
    let k = kernels::projective_kernel_seeded(&ws.algebra, &ell, seed)?;
    let center = ws.algebra.center();
    let value = json!({
        "source": ws.source,
        "ell": o.ell,
        "pker": subspace_json(names, &k.pker),
        "dim": k.pker.dim(),
        "center_dim": center.dim(),
        "equals_stabilizer": k.equals_stabilizer,
        "samples": k.samples_used,
        "seed": seed,
        "scope": kernels::SCOPE_NOTE,
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "pker: {}", fmt_subspace(names, &k.pker));
    let _ = writeln!(t, "dim: {} (center dim {})", k.pker.dim(), center.dim());
    let _ = writeln!(t, "equals_stabilizer: {}", k.equals_stabilizer);
    let _ = writeln!(t, "samples: {} (seed {seed})", k.samples_used);
    let _ = writeln!(t, "scope: {}", kernels::SCOPE_NOTE);
    Ok(emit(cli.json, value, t))
}

fn classify(cli: &Cli, o: &OrbitArgs, seed: u64) -> Result<String, Error> {
    let (ws, ell) = orbit_inputs(o)?;
    let names = ws.algebra.names();
    let v = kernels::classify_representation_seeded(&ws.algebra, &ell, seed)?;
    let (kind, pker, d_pi) = match &v {
        Verdict::Character => ("character", None, None),
        Verdict::CoherentState { pker, d_pi } => ("coherent_state", Some(pker), Some(d_pi)),
        Verdict::NotCoherentState { pker } => ("not_coherent_state", Some(pker), None),
    };
    let value = json!({
        "source": ws.source,
        "ell": o.ell,
        "verdict": kind,
        "summary": v.summary(),
        "pker": pker.map(|p| subspace_json(names, p)),
        "d_pi": d_pi.map(rat_json),
        "scope": kernels::SCOPE_NOTE,
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "verdict: {}", v.summary());
    let _ = writeln!(t, "scope: {}", kernels::SCOPE_NOTE);
    if let Some(p) = pker {
        let _ = writeln!(t, "pker: {}", fmt_subspace(names, p));
    }
    if let Some(d) = d_pi {
        let _ = writeln!(t, "d_pi: {}", rational::format(d));
    }
    Ok(emit(cli.json, value, t))
}

fn density(cli: &Cli, o: &OrbitArgs, lattice_name: &str, scale: &str, seed: u64) -> Result<String, Error> {
    let (ws, ell) = orbit_inputs(o)?;
    let l = ws.lattice(lattice_name)?;
    let scale = rational::parse(scale)?;
    let r = lattice::density_report_seeded(&ws.algebra, &ell, l, &scale, seed)?;
    let verdict = match r.verdict {
        DensityVerdict::IncompleteByTheorem => "IncompleteByTheorem",
        DensityVerdict::NotExcluded => "NotExcluded",
    };
    let value = json!({
        "source": ws.source,
        "ell": o.ell,
        "lattice": lattice_name,
        "covol_g": rat_json(&r.covol_g),
        "covol_g_exact": r.covol_g_exact,
        "covol_quotient": rat_json(&r.covol_quotient),
        "d_pi": rat_json(&r.d_pi),
        "product": rat_json(&r.product),
        "measure_scale": rat_json(&r.measure_scale),
        "verdict": verdict,
    });
    let mut t = header(&ws);
    let _ = writeln!(t, "lattice: {lattice_name}");
    let exact = if r.covol_g_exact { "exact" } else { "determinant; class >= 3, see Monte-Carlo check" };
    let _ = writeln!(t, "covol(G/Gamma): {} ({exact})", rational::format(&r.covol_g));
    let _ = writeln!(t, "covol(p(Gamma)): {}", rational::format(&r.covol_quotient));
    let _ = writeln!(t, "d_pi: {}", rational::format(&r.d_pi));
    let _ = writeln!(t, "product: {}", rational::format(&r.product));
    let line = match r.verdict {
        DensityVerdict::IncompleteByTheorem => format!(
            "verdict: IncompleteByTheorem (covol(p(Gamma)) * d_pi = {} > 1 violates covol(p(Gamma)) * d_pi <= 1)",
            rational::format(&r.product)
        ),
        DensityVerdict::NotExcluded => format!(
            "verdict: NotExcluded (covol(p(Gamma)) * d_pi = {} <= 1; necessary condition only)",
            rational::format(&r.product)
        ),
    };
    let _ = writeln!(t, "{line}");
    Ok(emit(cli.json, value, t))
}

fn grid_inputs(g: &GridArgs, seed: u64) -> Result<(SchrodingerRep, StateVector, Rational), Error> {
    let lambda = rational::parse(&g.lambda)?;
    let grid = GridSpec::new(g.grid_r, g.grid_n)?;
    let rep = SchrodingerRep::new(&lambda, grid)?;
    let eta = parse_eta(grid, &g.eta, seed)?;
    Ok((rep, eta, lambda))
}

fn parse_eta(grid: GridSpec, spec: &str, seed: u64) -> Result<StateVector, Error> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    let bad = || Error::Input(format!("bad --eta '{spec}'"));
    match (kind, arg) {
        ("gaussian", None) => Ok(schrodinger::gaussian(grid)),
        ("hermite", Some(k)) => Ok(schrodinger::hermite(grid, k.parse().map_err(|_| bad())?)),
        ("translated", Some(a)) => Ok(schrodinger::translated_gaussian(grid, a.parse().map_err(|_| bad())?)),
        ("smooth", a) => Ok(schrodinger::random_smooth(grid, a.map(str::parse).transpose().map_err(|_| bad())?.unwrap_or(seed))),
        ("rough", a) => Ok(schrodinger::random_rough(grid, a.map(str::parse).transpose().map_err(|_| bad())?.unwrap_or(seed))),
        _ => Err(bad()),
    }
}

fn grid_header(g: &GridArgs, rep: &SchrodingerRep) -> String {
    let grid = rep.grid();
    format!("lambda: {}  eta: {}  grid: R = {}, N = {}\n", g.lambda, g.eta, grid.half_width, grid.samples)
}

fn moment_map(cli: &Cli, g: &GridArgs, seed: u64) -> Result<String, Error> {
    let (rep, eta, _) = grid_inputs(g, seed)?;
    let j = rep.moment_map(&eta)?;
    let value = json!({
        "lambda": g.lambda,
        "eta": g.eta,
        "grid": { "R": rep.grid().half_width, "N": rep.grid().samples },
        "normalized": j.values.iter().map(|&v| f64_json(v)).collect::<Vec<_>>(),
        "raw": j.raw.iter().map(|&v| f64_json(v)).collect::<Vec<_>>(),
        "tail_warning": j.tail_warning,
    });
    let mut t = grid_header(g, &rep);
    let _ = writeln!(t, "J/2pi: X = {:.10}, Y = {:.10}, Z = {:.10}", j.values[0], j.values[1], j.values[2]);
    let _ = writeln!(t, "J raw: X = {:.10}, Y = {:.10}, Z = {:.10}", j.raw[0], j.raw[1], j.raw[2]);
    if j.tail_warning {
        let _ = writeln!(t, "warning: heavy spectral or boundary tails; derivative pairings unreliable");
    }
    Ok(emit(cli.json, value, t))
}

fn orbit_test(cli: &Cli, g: &GridArgs, seed: u64) -> Result<String, Error> {
    let (rep, eta, _) = grid_inputs(g, seed)?;
    let s = rep.symplectic_orbit_test(&eta)?;
    let c = rep.complex_orbit_test(&eta)?;
    let value = json!({
        "lambda": g.lambda,
        "eta": g.eta,
        "symplectic": {
            "moment": s.moment.iter().map(|&v| f64_json(v)).collect::<Vec<_>>(),
            "affine_residual": f64_json(s.affine_residual),
            "membership": s.membership_ok,
            "stabilizer_dim": s.stabilizer_dim,
            "pker_dim": s.pker_dim,
            "pass": s.pass,
        },
        "complex": {
            "dim_s": c.dim_s,
            "dim_s_plus_conj": c.dim_s_plus_conj,
            "relative_singular_values": c.singular_values.iter().map(|&v| f64_json(v)).collect::<Vec<_>>(),
            "complex_orbit": c.complex,
        },
    });
    let mut t = grid_header(g, &rep);
    let pf = |b: bool| if b { "PASS" } else { "FAIL" };
    let _ = writeln!(t, "symplectic: {}", pf(s.pass));
    let _ = writeln!(t, "  J/2pi in ell + pker^perp: {} (residual {:.3e})", pf(s.membership_ok), s.affine_residual);
    let _ = writeln!(t, "  stabilizer dim {} vs pker dim {}: {}", s.stabilizer_dim, s.pker_dim, pf(s.stabilizer_ok));
    let _ = writeln!(t, "complex: dim s = {}, dim(s + conj s) = {}", c.dim_s, c.dim_s_plus_conj);
    let _ = writeln!(t, "  verdict: {}", if c.complex { "complex orbit" } else { "not complex" });
    Ok(emit(cli.json, value, t))
}

fn admissibility(cli: &Cli, g: &GridArgs, seed: u64) -> Result<String, Error> {
    let (rep, eta, lambda) = grid_inputs(g, seed)?;
    let d = rep.admissibility_constant(&eta)?;
    let exact = rational::abs(&lambda);
    let rel = (d - rational::to_f64(&exact)).abs() / rational::to_f64(&exact);
    let value = json!({
        "lambda": g.lambda,
        "eta": g.eta,
        "quadrature": f64_json(d),
        "exact": rat_json(&exact),
        "relative_error": f64_json(rel),
    });
    let mut t = grid_header(g, &rep);
    let _ = writeln!(t, "d (quadrature): {d:.8}");
    let _ = writeln!(t, "d (Pfaffian): {}", rational::format(&exact));
    let _ = writeln!(t, "relative error: {rel:.3e}");
    Ok(emit(cli.json, value, t))
}

fn parse_real(s: &str) -> Result<f64, Error> {
    if let Ok(r) = rational::parse(s) {
        return Ok(rational::to_f64(&r));
    }
    s.trim().parse::<f64>().map_err(|_| Error::Input(format!("cannot parse number '{s}'")))
}

fn subsystem(cli: &Cli, g: &GridArgs, alpha: &str, beta: &str, probes: usize, seed: u64) -> Result<String, Error> {
    let (rep, eta, _) = grid_inputs(g, seed)?;
    let a = parse_real(alpha)?;
    let b = parse_real(beta)?;
    let r = rep.subsystem_completeness(a, b, &eta, probes)?;
    if cli.csv {
        return Ok(r.to_csv());
    }
    let value = json!({
        "lambda": g.lambda,
        "alpha": f64_json(a),
        "beta": f64_json(b),
        "lattice_points": r.lattice_points,
        "levels": r.levels.iter().map(|l| json!({
            "probes": l.probes,
            "radius": f64_json(l.radius),
            "sigma_min": f64_json(l.sigma_min),
        })).collect::<Vec<_>>(),
        "signal": format!("{:?}", r.signal),
    });
    let mut t = grid_header(g, &rep);
    let _ = writeln!(t, "lattice: alpha = {a}, beta = {b}, {} points, alpha*beta = {:.6}", r.lattice_points, a * b);
    for l in &r.levels {
        let _ = writeln!(t, "  probes {:>3}  radius {:.3}  sigma_min {:.6e}", l.probes, l.radius, l.sigma_min);
    }
    let _ = writeln!(t, "signal: {:?}", r.signal);
    Ok(emit(cli.json, value, t))
}

fn parse_generators(spec: &str) -> Result<Vec<(usize, usize)>, Error> {
    let bad = || Error::Input(format!("bad --subgroup '{spec}', expected gen=(a,b),(c,d)"));
    let body = spec.trim().strip_prefix("gen=").ok_or_else(bad)?;
    let mut gens = Vec::new();
    for part in body.split(')') {
        let part = part.trim().trim_start_matches([',', ';']).trim();
        if part.is_empty() {
            continue;
        }
        let inner = part.strip_prefix('(').ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        gens.push((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
    }
    if gens.is_empty() {
        return Err(bad());
    }
    Ok(gens)
}

fn gabor_finite(cli: &Cli, n: usize, scan: bool, subgroup: Option<&str>, eta: &str, seed: u64) -> Result<String, Error> {
    if scan {
        let r = finite_gabor::density_scan(n, seed)?;
        if cli.csv {
            return Ok(r.to_csv());
        }
        let value = json!({
            "n_max": r.n_max,
            "seed": r.seed,
            "subgroups": r.entries.len(),
            "violations": r.violations,
            "sufficiency_candidates": r.sufficiency_candidates,
            "sufficiency_hits": r.sufficiency_hits,
            "entries": r.entries.iter().map(|e| json!({
                "n": e.n,
                "index": e.subgroup_index,
                "order": e.order,
                "generators": e.generators,
                "density_product": e.density_product,
                "complete_windows": e.complete_windows,
                "panel_size": e.panel_size,
            })).collect::<Vec<_>>(),
        });
        let mut t = format!("finite scan: n <= {n}, seed {seed}\n");
        for m in 2..=n {
            let rows: Vec<_> = r.entries.iter().filter(|e| e.n == m).collect();
            let complete = rows.iter().filter(|e| e.any_complete()).count();
            let _ = writeln!(t, "  n = {m}: {} subgroups, {complete} with a complete panel window", rows.len());
        }
        let _ = writeln!(t, "necessity (complete => |Lambda| >= n): {} violations", r.violations);
        let _ = writeln!(
            t,
            "subgroups with |Lambda| >= n completed by some panel window: {} of {}",
            r.sufficiency_hits, r.sufficiency_candidates
        );
        return Ok(emit(cli.json, value, t));
    }
    let wh = FiniteWH::new(n)?;
    match subgroup {
        Some(spec) => {
            let gens = parse_generators(spec)?;
            let s = SubgroupSpec::generated(n, &gens);
            let window = finite_gabor::named_window(n, eta, seed)?;
            let rank = finite_gabor::system_rank(&wh, &s, &window)?;
            let product = s.density_product(&rational::one());
            let value = json!({
                "n": n,
                "generators": s.generators,
                "order": s.order,
                "eta": eta,
                "rank": rank,
                "complete": rank == n,
                "density_product": rat_json(&product),
            });
            let mut t = format!("n = {n}, subgroup generated by {:?}, order {}\n", s.generators, s.order);
            let _ = writeln!(t, "eta: {eta}");
            let _ = writeln!(t, "rank: {rank} of {n} ({})", if rank == n { "complete" } else { "incomplete" });
            let _ = writeln!(t, "covol * d = n/|Lambda| = {}", rational::format(&product));
            Ok(emit(cli.json, value, t))
        }
        None => {
            let subs = finite_gabor::enumerate_subgroups(n)?;
            let value = json!({
                "n": n,
                "subgroups": subs.len(),
                "expected": finite_gabor::subgroup_count(n),
                "orders": subs.iter().map(|s| s.order).collect::<Vec<_>>(),
            });
            let t = format!(
                "n = {n}: {} subgroups of Z_n x Z_n (divisor-sum count {})\n",
                subs.len(),
                finite_gabor::subgroup_count(n)
            );
            Ok(emit(cli.json, value, t))
        }
    }
}

/// Algebra from a bundled workspace, for tests and examples.
pub fn preset_algebra(name: &str) -> Result<LieAlgebra, Error> {
    Ok(load(name)?.algebra)
}
