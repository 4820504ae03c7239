mod args;
mod emit;
mod error;
mod uspec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robpareto::distro::to_robust;
use robpareto::efficiency::{classify, EfficiencyReport};
use robpareto::fixtures::{self, TableShape};
use robpareto::geometry::Tolerances;
use robpareto::model::{CandidateSet, Instance, SimplexGrid};
use robpareto::phantom::PhantomConfig;
use robpareto::scalarize::Scalarizer;
use robpareto::schema::{instance_to_json, parse_instance};
use robpareto::solve::{minimize_scalarized, SolveOptions, SolveResult};

use args::{Cli, Command, Globals, PhantomArgs, ScalarizeArgs, Source, SweepArgs};
use emit::{num, out, objective_header, write_atomic, RunManifest, Table};
use error::CliError;

const THREADS_ENV: &str = "ROBPARETO_THREADS";

/// Settings shared by every subcommand.
struct Run {
    globals: Globals,
    tol: Tolerances,
    threads: Option<usize>,
    started: Instant,
    outputs: Vec<String>,
    source: String,
    scalarizers: Vec<String>,
}

impl Run {
    fn emit_dir(&self) -> Option<&Path> {
        self.globals.emit.as_deref()
    }

    fn write(&mut self, dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
        let path = dir.join(name);
        write_atomic(&path, content.as_bytes())?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn write_manifest(&mut self, command: &str) -> Result<(), CliError> {
        let Some(dir) = self.globals.emit.clone() else {
            return Ok(());
        };
        let manifest = RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            source: self.source.clone(),
            scalarizers: self.scalarizers.clone(),
            step: self.globals.step,
            eq_tol: self.globals.eq_tol,
            strict_tol: self.globals.strict_tol,
            tolerances: self.tol,
            seed: self.globals.seed,
            threads: self.threads,
            outputs: self.outputs.clone(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write(&dir, &format!("{command}.manifest.json"), &(text + "\n"))
    }
}

fn tolerances(cli: &Globals) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for (value, slot, name) in [
        (cli.eq_tol, &mut tol.eq_tol, "--eq-tol"),
        (cli.strict_tol, &mut tol.strict_tol, "--strict-tol"),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Input(format!("{name} must be a nonnegative number")));
            }
            *slot = v;
        }
    }
    Ok(tol)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Some(n))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn phantom_config(spec: Option<&str>, step: Option<f64>) -> Result<PhantomConfig, CliError> {
    let mut cfg = match spec {
        None | Some("default") => PhantomConfig::default(),
        Some(path) => serde_json::from_str(&read(Path::new(path))?)
            .map_err(|e| CliError::Input(format!("{path}: invalid phantom configuration: {e}")))?,
    };
    if let Some(s) = step {
        cfg.step = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Per-objective maxima of `|f|` over all candidate images.
fn image_scales(instance: &Instance) -> Result<Vec<f64>, CliError> {
    let mut scale = vec![0.0f64; instance.n()];
    for d in instance.decisions()? {
        for p in instance.image(&d)?.points() {
            for (s, v) in scale.iter_mut().zip(p.values()) {
                *s = s.max(v.abs());
            }
        }
    }
    Ok(scale.into_iter().map(|s| if s > 0.0 { s } else { 1.0 }).collect())
}

fn load(run: &mut Run, src: &Source) -> Result<Instance, CliError> {
    let step = run.globals.step;
    let c = &src.choice;
    let instance = if let Some(name) = &c.builtin {
        run.source = format!("builtin:{name}");
        let inst = if name == "random" {
            let mut rng = ChaCha8Rng::seed_from_u64(run.globals.seed);
            fixtures::random_table(&mut rng, TableShape::default())
        } else {
            fixtures::builtin(name, step)?
        };
        scale_if(inst, src.scaled)?
    } else if let Some(path) = &c.instance {
        run.source = format!("file:{}", path.display());
        let loaded = parse_instance(&read(path)?)?;
        let mut inst = match &loaded.ambiguity {
            Some((amb, constraint)) => to_robust(&loaded.instance, amb, constraint.as_ref())?,
            None => loaded.instance,
        };
        if let (Some(s), CandidateSet::Simplex(g)) = (step, inst.candidates()) {
            let grid = SimplexGrid::new(g.dim, s)?;
            inst = inst.with_candidates(CandidateSet::Simplex(grid))?;
        }
        scale_if(inst, src.scaled)?
    } else {
        let spec = c.phantom.as_deref();
        run.source = format!("phantom:{}", spec.unwrap_or("default"));
        let cfg = phantom_config(spec, step)?;
        if src.scaled {
            cfg.generate_scaled()?
        } else {
            cfg.generate()?
        }
    };
    if instance.decisions()?.is_empty() {
        return Err(CliError::Empty("instance has no candidates".into()));
    }
    Ok(instance)
}

fn scale_if(instance: Instance, scaled: bool) -> Result<Instance, CliError> {
    if !scaled {
        return Ok(instance);
    }
    let factors = image_scales(&instance)?;
    Ok(instance.rescaled(&factors)?)
}

fn classification_csv(report: &EfficiencyReport) -> Result<String, CliError> {
    let mut t = Table::new(&[
        "candidate",
        "robust_efficient",
        "convex_hull_efficient",
        "objectivewise_efficient",
        "set_valued_minimizer",
        "dominator",
    ])?;
    for r in &report.rows {
        // First dominator among the robust, convex hull and objectivewise labels.
        let dominator = [&r.robust_dominator, &r.convex_hull_dominator, &r.objectivewise_dominator]
            .into_iter()
            .find_map(|d| d.as_ref())
            .map_or(String::new(), |d| d.label.clone());
        t.row(&[
            r.candidate.clone(),
            r.robust_efficient.to_string(),
            r.convex_hull_efficient.to_string(),
            r.objectivewise_efficient.to_string(),
            r.set_valued_minimizer.to_string(),
            dominator,
        ])?;
    }
    t.into_string()
}

fn cmd_classify(run: &mut Run, src: &Source) -> Result<(), CliError> {
    let inst = load(run, src)?;
    let csv = classification_csv(&classify(&inst, &run.tol)?)?;
    out(&csv)?;
    if let Some(dir) = run.emit_dir().map(Path::to_path_buf) {
        run.write(&dir, "classify.csv", &csv)?;
    }
    run.write_manifest("classify")
}

fn solve_options(passes: Option<usize>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(p) = passes {
        opts.refine_passes = p;
    }
    opts
}

fn cmd_scalarize(run: &mut Run, a: &ScalarizeArgs) -> Result<(), CliError> {
    let inst = load(run, &a.source)?;
    let u = uspec::parse(&a.spec, &inst)?;
    run.scalarizers.push(u.to_string());
    let r = minimize_scalarized(&inst, &u, &solve_options(a.passes))?;
    let mut t = Table::new(&["candidate", "value", "method", "evaluations", "scalarizer"])?;
    t.row(&[
        r.best.label(),
        num(r.value),
        r.method.as_str().to_string(),
        r.evaluations.to_string(),
        u.to_string(),
    ])?;
    let summary = t.into_string()?;
    out(&summary)?;
    let trace = if a.trace {
        let mut header = vec!["scenario".to_string()];
        header.extend(objective_header(inst.n()));
        header.push("value".into());
        let mut t = Table::new(&header)?;
        for (s, y) in inst.image(&r.best)?.iter() {
            let mut row = vec![s.to_string()];
            row.extend(y.values().iter().map(|v| num(*v)));
            row.push(num(u.apply(y)?));
            t.row(&row)?;
        }
        let trace = t.into_string()?;
        out(&format!("\n{trace}"))?;
        Some(trace)
    } else {
        None
    };
    if let Some(dir) = run.emit_dir().map(Path::to_path_buf) {
        run.write(&dir, "scalarize.csv", &summary)?;
        if let Some(trace) = trace {
            run.write(&dir, "scalarize_trace.csv", &trace)?;
        }
    }
    run.write_manifest("scalarize")
}

fn p_tag(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        num(p)
    }
}

fn parse_p_list(raw: &str) -> Result<Vec<f64>, CliError> {
    let ps = raw
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(uspec::parse_number)
        .collect::<Result<Vec<_>, _>>()?;
    if ps.is_empty() {
        return Err(CliError::Input("--p needs at least one exponent".into()));
    }
    Ok(ps)
}

fn cmd_sweep(run: &mut Run, a: &SweepArgs) -> Result<(), CliError> {
    let ps = parse_p_list(&a.p)?;
    let inst = load(run, &a.source)?;
    let n = inst.n();
    let weights = match &a.weights {
        Some(w) => uspec::vector(&w.split(',').map(str::to_string).collect::<Vec<_>>(), n, "--w")?,
        None => vec![1.0; n],
    };
    let family = ps
        .iter()
        .map(|p| Scalarizer::weighted_pnorm(weights.clone(), *p, None))
        .collect::<Result<Vec<_>, _>>()?;
    run.scalarizers = family.iter().map(Scalarizer::to_string).collect();
    let opts = solve_options(a.passes);
    let dir = run.emit_dir().map_or_else(|| PathBuf::from("."), Path::to_path_buf);

    let mut summary = Table::new(&["p", "candidate", "value", "method", "evaluations", "inf_radius", "one_norm_worst"])?;
    let mut files = Vec::new();
    for (p, u) in ps.iter().zip(&family) {
        let r: SolveResult = minimize_scalarized(&inst, u, &opts)?;
        let img = inst.image(&r.best)?;
        let max_of = |f: &dyn Fn(&[f64]) -> f64| img.points().iter().map(|y| f(y.values())).fold(0.0, f64::max);
        let radius = max_of(&|y| y.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let one = max_of(&|y| y.iter().map(|v| v.abs()).sum());
        summary.row(&[
            p_tag(*p),
            r.best.label(),
            num(r.value),
            r.method.as_str().to_string(),
            r.evaluations.to_string(),
            num(radius),
            num(one),
        ])?;

        let mut header = vec!["scenario".to_string()];
        header.extend(objective_header(n));
        let mut pts = Table::new(&header)?;
        for (s, y) in img.iter() {
            let mut row = vec![s.to_string()];
            row.extend(y.values().iter().map(|v| num(*v)));
            pts.row(&row)?;
        }
        files.push((format!("sweep_p{}.csv", p_tag(*p)), pts.into_string()?));
        if n == 2 {
            let title = format!("optimal image, {u}, worst case {:.4}", r.value);
            files.push((format!("sweep_p{}.svg", p_tag(*p)), emit::scatter_svg(&img, u, r.value, &title)?));
        }
    }
    let summary = summary.into_string()?;
    run.write(&dir, "sweep.csv", &summary)?;
    for (name, content) in files {
        run.write(&dir, &name, &content)?;
    }
    out(&summary)?;
    if n != 2 {
        eprintln!("note: scatter plots need two objectives; skipped for n = {n}");
    }
    run.write_manifest("sweep")
}

fn cmd_phantom(run: &mut Run, a: &PhantomArgs) -> Result<(), CliError> {
    let cfg_path = a.config.as_ref().map(|p| p.display().to_string());
    run.source = format!("phantom:{}", cfg_path.as_deref().unwrap_or("default"));
    let cfg = phantom_config(cfg_path.as_deref(), run.globals.step)?;
    let inst = if a.scaled { cfg.generate_scaled()? } else { cfg.generate()? };
    let json = instance_to_json(&inst) + "\n";
    let target = a.out.clone().or_else(|| run.emit_dir().map(|d| d.join("phantom.json")));
    match target {
        Some(path) => {
            write_atomic(&path, json.as_bytes())?;
            run.outputs.push(path.display().to_string());
        }
        None => out(&json)?,
    }
    run.write_manifest("phantom")
}

fn cmd_report(run: &mut Run, src: &Source) -> Result<(), CliError> {
    let dir = run
        .emit_dir()
        .map(Path::to_path_buf)
        .ok_or_else(|| CliError::Input("report needs --emit".into()))?;
    let inst = load(run, src)?;
    run.write(&dir, "instance.json", &(instance_to_json(&inst) + "\n"))?;

    let mut header = vec!["candidate".to_string(), "scenario".to_string()];
    header.extend(objective_header(inst.n()));
    let mut images = Table::new(&header)?;
    for d in inst.decisions()? {
        let label = d.label();
        for (s, y) in inst.image(&d)?.iter() {
            let mut row = vec![label.clone(), s.to_string()];
            row.extend(y.values().iter().map(|v| num(*v)));
            images.row(&row)?;
        }
    }
    run.write(&dir, "images.csv", &images.into_string()?)?;

    let report = classify(&inst, &run.tol)?;
    run.write(&dir, "classify.csv", &classification_csv(&report)?)?;
    run.write_manifest("report")?;
    out(&format!("wrote {} files to {}\n", run.outputs.len(), dir.display()))?;
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let Cli { globals, command } = cli;
    let tol = tolerances(&globals)?;
    if let Some(s) = globals.step {
        if !(s.is_finite() && s > 0.0 && s <= 1.0) {
            return Err(CliError::Input("--step must lie in (0, 1]".into()));
        }
    }
    let threads = thread_cap()?;
    let mut run = Run {
        globals,
        tol,
        threads,
        started: Instant::now(),
        outputs: Vec::new(),
        source: String::new(),
        scalarizers: Vec::new(),
    };
    match &command {
        Command::Classify(src) => cmd_classify(&mut run, src),
        Command::Scalarize(a) => cmd_scalarize(&mut run, a),
        Command::Sweep(a) => cmd_sweep(&mut run, a),
        Command::Phantom(a) => cmd_phantom(&mut run, a),
        Command::Report(src) => cmd_report(&mut run, src),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
