use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use ncq::assembly::Method;
use ncq::config::RunConfig;
use ncq::experiments::{fit_gaussian_dip, hom_basis, run_hom_on, CorrelationCurve, HomCase, HomConfig};
use ncq::modes::{check_orthonormality, default_omega_floor, fold_dispersion, solve_modes};
use ncq::tmm::{band_frequency, design_scan};
use ncq::{validate, Error, Result};

#[derive(Parser)]
#[command(name = "ncq", version, about = "Bloch-mode quantization and two-photon correlation experiments")]
struct Cli {
    /// TOML configuration; built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `solver.method`.
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Omit the timestamp header line from generated files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for sweeps (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the mode basis and check its orthonormality.
    Modes,
    /// Folded dispersion over a Bloch-phase sweep, with the analytic bands.
    Dispersion,
    /// Slab reflectance/transmittance scan.
    Design,
    /// Two-photon delay sweep and dip visibility.
    Hom,
    /// Run the aggregated self-checks.
    Validate,
}

struct Output {
    dir: PathBuf,
    timestamp: bool,
}

impl Output {
    fn header(&self) -> String {
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            format!("# generated_unix_s={secs}\n")
        } else {
            String::new()
        }
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        fs::write(&path, format!("{}{}", self.header(), body))?;
        Ok(path)
    }

    fn write_script(&self, name: &str, body: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        Ok(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let method = cli.method.unwrap_or(cfg.solver.method);
    let out = Output { dir: cli.out.clone(), timestamp: !cli.no_timestamp };
    match cli.command {
        Command::Modes => cmd_modes(&cfg, method, &out),
        Command::Dispersion => cmd_dispersion(&cfg, method, &out),
        Command::Design => cmd_design(&cfg, &out),
        Command::Hom => cmd_hom(&cfg, method, &out),
        Command::Validate => cmd_validate(&cfg, &out),
    }
}

fn cmd_modes(cfg: &RunConfig, method: Method, out: &Output) -> Result<ExitCode> {
    let sys = cfg.system(method, cfg.solver.theta0)?;
    let floor = cfg.solver.omega_floor.unwrap_or_else(|| default_omega_floor(&sys));
    let basis = solve_modes(&sys, floor)?;
    let mut csv = String::from("p,kappa_rad_per_m,omega_rad_per_s,residual\n");
    for p in 0..basis.len() {
        writeln!(csv, "{p},{:e},{:e},{:e}", basis.kappa[p], basis.omega[p], basis.residual[p]).unwrap();
    }
    out.write("modes.csv", &csv)?;
    let o = check_orthonormality(&basis);
    out.write("orthonormality.csv", &format!("max_offdiag,max_diag_deviation\n{:e},{:e}\n", o.max_offdiag, o.max_diag_deviation))?;
    println!("{} modes ({method}); max off-diagonal {:e}, max diagonal deviation {:e}", basis.len(), o.max_offdiag, o.max_diag_deviation);
    Ok(ExitCode::SUCCESS)
}

fn cmd_dispersion(cfg: &RunConfig, method: Method, out: &Output) -> Result<ExitCode> {
    let sweep = cfg.theta0_sweep()?;
    let systems: Result<Vec<_>> = sweep.iter().map(|&t| cfg.system(method, t)).collect();
    let diagram = fold_dispersion(&systems?, cfg.dispersion.bands)?;
    let mut csv = String::from("theta0_rad,band,kappa_rad_per_m,omega_rad_per_s\n");
    for p in &diagram.points {
        writeln!(csv, "{:e},{},{:e},{:e}", p.theta0, p.band, p.kappa, p.omega).unwrap();
    }
    out.write("dispersion_numeric.csv", &csv)?;

    let m = &cfg.medium;
    let c = cfg.constants().c();
    let kmax = std::f64::consts::PI / m.rx;
    let n = cfg.dispersion.tmm_points.max(2);
    let mut csv = String::from("band,kappa_rad_per_m,omega_rad_per_s\n");
    for band in 0..cfg.dispersion.bands {
        for i in 0..n {
            let k = -kmax + 2.0 * kmax * i as f64 / (n - 1) as f64;
            if let Some(w) = band_frequency(m.eps_s, m.rs, m.rx, k.abs(), band, c) {
                writeln!(csv, "{band},{k:e},{w:e}").unwrap();
            }
        }
    }
    out.write("dispersion_tmm.csv", &csv)?;
    out.write_script("plot_dispersion.py", PLOT_DISPERSION)?;
    println!("{} folded points over {} Bloch phases ({method})", diagram.points.len(), sweep.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_design(cfg: &RunConfig, out: &Output) -> Result<ExitCode> {
    let rows = design_scan(cfg.medium.eps_s, cfg.medium.rs, &cfg.design_kappas());
    let mut csv = String::from("kappa,R2,T2,phase_diff_deg\n");
    for r in &rows {
        writeln!(csv, "{:e},{:e},{:e},{:e}", r.kappa, r.r2, r.t2, r.phase_diff_deg).unwrap();
    }
    out.write("design.csv", &csv)?;
    out.write_script("plot_design.py", PLOT_DESIGN)?;
    println!("{} design points", rows.len());
    Ok(ExitCode::SUCCESS)
}

fn curve_csv(curve: &CorrelationCurve) -> String {
    let mut csv = String::from("tau_s,delta_x0_m,g2\n");
    for p in &curve.points {
        writeln!(csv, "{:e},{:e},{:e}", p.tau, p.delta_x0, p.g2).unwrap();
    }
    csv
}

fn summary_line(label: &str, curve: &CorrelationCurve) -> String {
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_else(|| "nan".into());
    let fit = fit_gaussian_dip(
        &curve.points.iter().map(|p| p.delta_x0).collect::<Vec<_>>(),
        &curve.points.iter().map(|p| p.g2).collect::<Vec<_>>(),
    )
    .map(|f| format!("{:e}", f.r_squared))
    .unwrap_or_else(|| "nan".into());
    format!(
        "{label},{},{},{:e},{:e},{fit}\n",
        fmt(curve.visibility),
        fmt(curve.baseline),
        curve.dip,
        curve.dip_tau
    )
}

fn cmd_hom(cfg: &RunConfig, method: Method, out: &Output) -> Result<ExitCode> {
    let base: HomConfig = cfg.hom_config(method);
    let cases = cfg.hom_cases()?;
    let basis = hom_basis(&base)?;
    let mut summary = String::from("case,visibility,baseline,dip_g2,dip_tau_s,gaussian_fit_r2\n");
    let mut visibilities = Vec::new();
    if cases.is_empty() {
        let curve = run_hom_on(&base, basis)?;
        out.write("hom.csv", &curve_csv(&curve))?;
        summary.push_str(&summary_line("configured", &curve));
    } else {
        for case in &cases {
            let (l, r) = case.shapes();
            let cfg_case = HomConfig { left_shape: l, right_shape: r, ..base.clone() };
            let curve = run_hom_on(&cfg_case, basis.clone())?;
            let name = if cases.len() == 1 { "hom.csv".to_string() } else { format!("hom_case_{}.csv", case.label()) };
            out.write(&name, &curve_csv(&curve))?;
            summary.push_str(&summary_line(case.label(), &curve));
            visibilities.push((*case, curve.visibility));
        }
    }
    let a = visibilities.iter().find(|(c, _)| *c == HomCase::A).and_then(|(_, v)| *v);
    let c = visibilities.iter().find(|(c, _)| *c == HomCase::C).and_then(|(_, v)| *v);
    if let (Some(a), Some(c)) = (a, c) {
        let rel = (c - a).abs() / a;
        writeln!(summary, "# case C visibility differs from case A by {:.2}% (comparable: {})", 100.0 * rel, rel <= 0.15).unwrap();
    }
    out.write("hom_summary.csv", &summary)?;
    out.write_script("plot_hom.py", PLOT_HOM)?;
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(cfg: &RunConfig, out: &Output) -> Result<ExitCode> {
    let report = validate::run(cfg)?;
    let mut text = String::new();
    for c in &report.checks {
        writeln!(
            text,
            "{} [{}] {}: observed {:e} (limit {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.module,
            c.invariant,
            c.observed,
            c.limit
        )
        .unwrap();
    }
    print!("{text}");
    write_report(out, &text)?;
    if report.all_passed() {
        println!("validation passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("validation FAILED ({} checks)", report.failures().count());
        Ok(ExitCode::from(1))
    }
}

fn write_report(out: &Output, text: &str) -> Result<()> {
    out.write("validate.txt", text).map(|_| ())
}

const PLOT_DISPERSION: &str = r##"import csv, sys
import matplotlib.pyplot as plt

def rows(name):
    with open(name) as f:
        return [r for r in csv.DictReader(l for l in f if not l.startswith("#"))]

num = rows("dispersion_numeric.csv")
tmm = rows("dispersion_tmm.csv")
fig, ax = plt.subplots(figsize=(5, 6))
for band in sorted({r["band"] for r in tmm}):
    pts = [(float(r["kappa_rad_per_m"]), float(r["omega_rad_per_s"])) for r in tmm if r["band"] == band]
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "k-", lw=1)
ax.plot([float(r["kappa_rad_per_m"]) for r in num], [float(r["omega_rad_per_s"]) for r in num], "ro", ms=3, label="numerical")
ax.set_xlabel("kappa (rad/m)")
ax.set_ylabel("omega (rad/s)")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "dispersion.png", dpi=150)
"##;

const PLOT_DESIGN: &str = r##"import csv, sys
import matplotlib.pyplot as plt

with open("design.csv") as f:
    rows = [r for r in csv.DictReader(l for l in f if not l.startswith("#"))]
k = [float(r["kappa"]) for r in rows]
fig, (a, b) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
a.plot(k, [float(r["R2"]) for r in rows], label="|R|^2")
a.plot(k, [float(r["T2"]) for r in rows], label="|T|^2")
a.legend()
b.plot(k, [float(r["phase_diff_deg"]) for r in rows])
b.set_ylabel("arg R - arg T (deg)")
b.set_xlabel("kappa (rad/m)")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "design.png", dpi=150)
"##;

const PLOT_HOM: &str = r##"import csv, glob, sys
import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(6, 4))
for name in sorted(glob.glob("hom*.csv")):
    if name == "hom_summary.csv":
        continue
    with open(name) as f:
        rows = [r for r in csv.DictReader(l for l in f if not l.startswith("#"))]
    ax.plot([float(r["delta_x0_m"]) for r in rows], [float(r["g2"]) for r in rows], "o-", ms=3, label=name)
ax.set_xlabel("delta x0 = c tau (m)")
ax.set_ylabel("g2")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "hom.png", dpi=150)
"##;
