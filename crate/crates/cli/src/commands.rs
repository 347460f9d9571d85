use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ionframe::bench::{
    evaluate, gamma_label, panel_criteria, parse_criteria, run_fidelity_panel, run_wigner_rows, wigner_criteria,
    write_atomic, Criterion, FidelitySpec, RunReport, WignerSpec, GAMMA_GRID,
};
use ionframe::tomography::{fit_q, q_exact, simulate_probability, wigner_point, Slice, TomographyConfig};
use ionframe::ModelParams;
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::config::Settings;
use crate::{FidelityArgs, QfitArgs, WignerArgs};

fn load_criteria(path: &Path) -> Result<Vec<Criterion>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading criteria {}", path.display()))?;
    Ok(parse_criteria(&text)?)
}

fn write_outputs(out: &Path, files: &[(String, String)]) -> Result<()> {
    for (name, contents) in files {
        let path = out.join(name);
        write_atomic(&path, contents.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn tomography_config(s: &Settings) -> TomographyConfig {
    let d = TomographyConfig::default();
    TomographyConfig {
        eta: s.eta.unwrap_or(d.eta),
        cutoff: s.cutoff.unwrap_or(d.cutoff),
        k_max: s.kmax.unwrap_or(d.k_max),
        omega_t_max: s.tmax.unwrap_or(d.omega_t_max),
        samples: s.samples.unwrap_or(d.samples),
    }
}

pub fn fidelity(args: &FidelityArgs) -> Result<u8> {
    let s = args.shared.resolve(Settings { omega: args.omega, delta: args.delta, ..Default::default() })?;
    let base = match &args.panel {
        Some(panel) => FidelitySpec::panel(panel)?,
        None => {
            let (Some(omega), Some(delta)) = (s.omega, s.delta) else {
                bail!("give --panel or both --omega and --delta");
            };
            FidelitySpec::custom("custom", ModelParams::new(omega, delta), 800.0)
        }
    };
    let mut params = base.params;
    params.omega = s.omega.unwrap_or(params.omega);
    params.delta = s.delta.unwrap_or(params.delta);
    params.eta = s.eta.unwrap_or(params.eta);
    params.cutoff = s.cutoff.unwrap_or(params.cutoff);
    let spec = FidelitySpec {
        name: args.name.clone().unwrap_or(base.name),
        params,
        t_max: s.tmax.unwrap_or(base.t_max),
        samples: s.samples.or(base.samples),
        kinds: base.kinds,
    };
    spec.validate()?;
    let criteria = match (&args.criteria, &args.panel) {
        (Some(path), _) => load_criteria(path)?,
        (None, Some(panel)) => panel_criteria(panel),
        (None, None) => Vec::new(),
    };

    let run = run_fidelity_panel(&spec)?;
    let metrics = run.metrics();
    let eval = evaluate(&metrics, &criteria);
    let config = json!({
        "command": "fidelity",
        "panel": args.panel,
        "config_file": args.shared.config,
        "overrides": s,
        "spec": spec,
        "samples": spec.grid()?.samples(),
    });
    let report = RunReport::new(&spec.name, config, metrics, &eval, run.seconds);
    write_outputs(
        &args.out,
        &[(format!("{}.csv", spec.name), run.to_csv()?), (format!("{}.report.json", spec.name), report.to_json()?)],
    )?;

    println!(
        "{}: Omega = {}, delta = {}, eta = {}, N = {}, nu t <= {} ({:.1} s)",
        spec.name, spec.params.omega, spec.params.delta, spec.params.eta, spec.params.cutoff, spec.t_max, run.seconds
    );
    println!("{:<8}  {:>10}  {:>10}  {:>10}", "model", "min", "mean", "final");
    for series in &run.series {
        let show = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<8}  {:>10}  {:>10}  {:>10}",
            series.kind.name(),
            show(series.min_coarse()),
            show(series.mean_coarse()),
            show(series.final_coarse())
        );
    }
    if !criteria.is_empty() {
        print!("\n{}", eval.table());
    }
    Ok(eval.status() as u8)
}

pub fn wigner(args: &WignerArgs) -> Result<u8> {
    let s = args.shared.resolve(Settings { gamma: args.gamma.clone(), kmax: args.kmax, ..Default::default() })?;
    let spec = WignerSpec {
        name: args.name.clone(),
        state: args.state,
        gammas: s.gamma.clone().unwrap_or_else(|| GAMMA_GRID.to_vec()),
        regimes: args.regime.regimes(),
        slices: args.slice.slices(),
        extent: args.extent,
        points: args.points,
        config: tomography_config(&s),
    };
    spec.validate()?;

    let run = run_wigner_rows(&spec)?;
    let metrics = run.metrics();
    let criteria = match &args.criteria {
        Some(path) => load_criteria(path)?,
        // the built-in checks describe the cat-state reproduction
        None if spec.state == WignerSpec::fig1().state => {
            wigner_criteria(&spec.gammas).into_iter().filter(|c| metrics.contains_key(&c.metric)).collect()
        }
        None => Vec::new(),
    };
    let eval = evaluate(&metrics, &criteria);
    let config = json!({
        "command": "wigner",
        "config_file": args.shared.config,
        "overrides": s,
        "spec": spec,
    });
    let report = RunReport::new(&spec.name, config, metrics, &eval, run.seconds);

    let mut files = Vec::new();
    for &g in &spec.gammas {
        files.push((format!("{}_gamma{}.csv", spec.name, gamma_label(g)), run.to_csv_gamma(g)?));
    }
    files.push((format!("{}.report.json", spec.name), report.to_json()?));
    write_outputs(&args.out, &files)?;

    println!("{}: {} ({:.1} s)", spec.name, spec.state, run.seconds);
    println!("{:<6}  {:>8}  {:>10}  {:>10}  {:>10}", "regime", "gamma", "linf", "min w re", "min w im");
    for b in &run.blocks {
        let show = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<6}  {:>8}  {:>10.5}  {:>10}  {:>10}",
            b.regime.name(),
            gamma_label(b.gamma),
            b.linf(),
            show(b.min_w(Slice::Real)),
            show(b.min_w(Slice::Imag))
        );
        for f in &b.failures {
            eprintln!("warning: {} gamma {}: {f}", b.regime.name(), gamma_label(b.gamma));
        }
    }
    if !criteria.is_empty() {
        print!("\n{}", eval.table());
    }
    Ok(eval.status() as u8)
}

pub fn qfit(args: &QfitArgs) -> Result<u8> {
    let s = args.shared.resolve(Settings { gamma: args.gamma.map(|g| vec![g]), kmax: args.kmax, ..Default::default() })?;
    let gamma = match s.gamma.as_deref() {
        None => 0.0,
        Some([g]) => *g,
        Some(list) => bail!("qfit takes a single dephasing rate, got {}", list.len()),
    };
    let config = tomography_config(&s);
    config.validate()?;
    let phi = args.state.state(config.fock()?)?;
    let exact = q_exact(&phi, args.alpha, config.k_max)?;
    let w_exact = wigner_point(&exact).w;
    let w_analytic = args.state.analytic_wigner(args.alpha);

    for regime in args.regime.regimes() {
        let series = simulate_probability(&phi, args.alpha, regime, gamma, &config)?;
        let fit = fit_q(&series, config.k_max)?;
        println!("{} at alpha = {}, regime {regime}, gamma = {gamma}", args.state, show_complex(args.alpha));
        println!("{:>3}  {:>12}  {:>12}  {:>10}", "k", "q_fit", "q_exact", "diff");
        for (k, (a, b)) in fit.q.iter().zip(&exact.q).enumerate() {
            println!("{k:>3}  {a:>12.6}  {b:>12.6}  {:>10.2e}", a - b);
        }
        println!("sum q_fit     {:.6}", fit.total());
        println!("residual rms  {:.6e}", fit.residual);
        println!("W fit         {:.6}", wigner_point(&fit).w);
        println!("W exact       {w_exact:.6}");
        println!("W analytic    {w_analytic:.6}");
        println!();
    }
    Ok(0)
}

fn show_complex(z: C64) -> String {
    if z.im == 0.0 {
        z.re.to_string()
    } else {
        z.to_string()
    }
}

