//! Subcommand implementations.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use varband::density::{beurling_densities, trace_convergence_report, CentersSpec, PointSet};
use varband::kernel::{KernelEvaluator, KernelMode};
use varband::linalg::symmetric_eigen;
use varband::sampling::{density_sweep, kernel_gram};
use varband::spectral::{kappa_of, JEvaluator, JMode, SpectralSet, J_QUAD_TARGET};
use varband::transfer::{connection_table, wronskian_identities};
use varband::{BandwidthProfile, Error};

use crate::output::{companion_path, config_hash, sig15, write_json, write_text, Csv};
use crate::{CliResult, ConfigArgs, Failure, JModeArg, KernelModeArg, KernelOutput};

type Profile = BandwidthProfile<f64>;
type Spectrum = SpectralSet<f64>;

fn load_json_value(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn load_profile(path: &Path) -> CliResult<(Profile, serde_json::Value)> {
    let value = load_json_value(path)?;
    let profile: Profile = serde_json::from_value(value.clone())
        .map_err(|e| Failure::Validation(format!("{} (field `profile`): {e}", path.display())))?;
    Ok((profile, value))
}

fn load_spectrum(path: &Path) -> CliResult<(Spectrum, serde_json::Value)> {
    let value = load_json_value(path)?;
    let sset: Spectrum = serde_json::from_value(value.clone())
        .map_err(|e| Failure::Validation(format!("{} (field `spectrum`): {e}", path.display())))?;
    Ok((sset, value))
}

fn require_spectrum(config: &ConfigArgs) -> CliResult<(Spectrum, serde_json::Value)> {
    let path = config.spectrum.as_ref().ok_or_else(|| {
        Failure::Validation("this command needs --spectrum <file>".to_string())
    })?;
    load_spectrum(path)
}

/// `start:stop:count` → inclusive linspace.
fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::Validation(format!(
            "grid `{spec}` must be start:stop:count"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::Validation(format!("grid start `{}` is not a number", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::Validation(format!("grid stop `{}` is not a number", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Failure::Validation(format!("grid count `{}` is not an integer", parts[2])))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::Validation(format!("grid `{spec}` is not finite")));
    }
    if n == 0 || (n > 1 && hi <= lo) {
        return Err(Failure::Validation(format!("grid `{spec}` is empty")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn load_points(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| {
        Failure::Validation(format!("{}: no points in file", path.display()))
    })?;

    let mut points = Vec::new();
    if let Ok(v) = first.trim().parse::<f64>() {
        points.push(v);
        for (i, line) in lines {
            points.push(line.trim().parse::<f64>().map_err(|_| {
                Failure::Validation(format!("{}:{}: not a number", path.display(), i + 1))
            })?);
        }
    } else {
        // CSV with a header containing an `x` column
        let col = first
            .split(',')
            .position(|h| h.trim() == "x")
            .ok_or_else(|| {
                Failure::Validation(format!(
                    "{}: header has no `x` column and first line is not a number",
                    path.display()
                ))
            })?;
        for (i, line) in lines {
            let cell = line.split(',').nth(col).ok_or_else(|| {
                Failure::Validation(format!("{}:{}: missing column {col}", path.display(), i + 1))
            })?;
            points.push(cell.trim().parse::<f64>().map_err(|_| {
                Failure::Validation(format!("{}:{}: not a number", path.display(), i + 1))
            })?);
        }
    }
    Ok(points)
}

fn kernel_evaluator(
    profile: Profile,
    sset: Spectrum,
    kernel_mode: KernelModeArg,
    j_mode: JModeArg,
) -> CliResult<KernelEvaluator<f64>> {
    let km = match kernel_mode {
        KernelModeArg::Auto => None,
        KernelModeArg::Generic => Some(KernelMode::Generic),
        KernelModeArg::Closed => Some(KernelMode::ClosedFormN2),
    };
    let jm = match j_mode {
        JModeArg::Auto => None,
        JModeArg::Series => Some(JMode::Series),
        JModeArg::Quadrature => Some(JMode::Quadrature),
    };
    Ok(KernelEvaluator::with_modes(profile, sset, km, jm)?)
}

fn meta(command: &str, config_value: serde_json::Value, seed: Option<u64>) -> serde_json::Value {
    let hash = config_hash(&config_value);
    let mut m = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_hash": hash,
    });
    if let Some(s) = seed {
        m["seed"] = json!(s);
    }
    m
}

pub fn kappa(config: ConfigArgs, grid: &str, cosine_out: Option<PathBuf>) -> CliResult<()> {
    let (profile, profile_value) = load_profile(&config.profile)?;
    let us = parse_grid(grid)?;
    let table = connection_table(&profile);
    let kappa = kappa_of(&profile, &table)?;

    let mut csv = Csv::new(&["u", "kappa"]);
    for &u in &us {
        csv.row(&[sig15(u), sig15(kappa.eval(u))]);
    }
    write_text(config.out.as_deref(), &csv.finish())?;

    let view = kappa.cosine_view();
    let cosine = json!({
        "meta": meta("kappa", json!({"profile": profile_value, "grid": grid}), None),
        "constant": view.constant,
        "terms": view.terms.iter().map(|&(c, f)| json!({"coefficient": c, "frequency": f})).collect::<Vec<_>>(),
        "lower_bound": kappa.lower_bound(),
    });
    let cosine_path = match (&cosine_out, &config.out) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(out)) => Some(companion_path(out, ".cosine.json")),
        (None, None) => None,
    };
    if let Some(path) = cosine_path {
        write_json(Some(&path), &cosine)?;
    }
    Ok(())
}

pub fn jfun(config: ConfigArgs, s_range: &str, j_mode: JModeArg) -> CliResult<()> {
    let (profile, _) = load_profile(&config.profile)?;
    let (sset, _) = require_spectrum(&config)?;
    let ss = parse_grid(s_range)?;
    let table = connection_table(&profile);
    let kappa = kappa_of(&profile, &table)?;
    let jev = match j_mode {
        JModeArg::Auto => JEvaluator::new(&profile, kappa, sset)?,
        JModeArg::Series => JEvaluator::with_mode(&profile, kappa, sset, JMode::Series)?,
        JModeArg::Quadrature => JEvaluator::with_mode(&profile, kappa, sset, JMode::Quadrature)?,
    };

    let mut csv = Csv::new(&["s", "re_j", "im_j", "m_used", "bound"]);
    for &s in &ss {
        let (value, m_used, bound) = match jev.mode() {
            JMode::Series => {
                let (v, m, b) = jev.j_series(s, 1e-10)?;
                (v, m, b)
            }
            JMode::Quadrature => (jev.j_quadrature(s)?, 0, J_QUAD_TARGET),
        };
        csv.row(&[
            sig15(s),
            sig15(value.re),
            sig15(value.im),
            m_used.to_string(),
            sig15(bound),
        ]);
    }
    write_text(config.out.as_deref(), &csv.finish())
}

pub fn kernel(
    config: ConfigArgs,
    mode: KernelOutput,
    grid: &str,
    x0: f64,
    kernel_mode: KernelModeArg,
    j_mode: JModeArg,
) -> CliResult<()> {
    let (profile, _) = load_profile(&config.profile)?;
    let (sset, _) = require_spectrum(&config)?;
    let pts = parse_grid(grid)?;
    let ev = kernel_evaluator(profile, sset, kernel_mode, j_mode)?;

    let text = match mode {
        KernelOutput::Grid => {
            let values = ev.grid(&pts, &pts)?;
            let mut csv = Csv::new(&["x", "y", "k"]);
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    csv.row(&[sig15(x), sig15(y), sig15(values[i * pts.len() + j])]);
                }
            }
            csv.finish()
        }
        KernelOutput::Slice => {
            let mut csv = Csv::new(&["y", "k"]);
            for &y in &pts {
                csv.row(&[sig15(y), sig15(ev.eval(x0, y)?)]);
            }
            csv.finish()
        }
        KernelOutput::Diag => {
            let mut csv = Csv::new(&["y", "k"]);
            for &y in &pts {
                csv.row(&[sig15(y), sig15(ev.diagonal(y)?)]);
            }
            csv.finish()
        }
    };
    write_text(config.out.as_deref(), &text)
}

pub fn density(
    config: ConfigArgs,
    points: &Path,
    radii: &[f64],
    center_spacing: Option<f64>,
) -> CliResult<()> {
    let (profile, profile_value) = load_profile(&config.profile)?;
    let (sset, spectrum_value) = require_spectrum(&config)?;
    let pts = load_points(points)?;
    let set = PointSet::new(pts);
    let report = beurling_densities(
        &profile,
        &sset,
        &set,
        radii,
        CentersSpec {
            spacing: center_spacing,
        },
    );

    let value = json!({
        "meta": meta(
            "density",
            json!({
                "profile": profile_value,
                "spectrum": spectrum_value,
                "radii": radii,
                "center_spacing": center_spacing,
                "points": set.len(),
            }),
            None,
        ),
        "radii": report.rows.iter().map(|r| r.r).collect::<Vec<_>>(),
        "lower": report.rows.iter().map(|r| r.lower).collect::<Vec<_>>(),
        "upper": report.rows.iter().map(|r| r.upper).collect::<Vec<_>>(),
        "critical": report.critical,
        "rel": report.rel,
        "rows": report.rows.iter().map(|r| json!({
            "r": r.r,
            "lower": r.lower,
            "upper": r.upper,
            "centers": r.centers,
            "skipped": r.skipped,
        })).collect::<Vec<_>>(),
    });
    write_json(config.out.as_deref(), &value)
}

pub fn trace(config: ConfigArgs, radii: &[f64], quad_points: usize) -> CliResult<()> {
    let (profile, _) = load_profile(&config.profile)?;
    let (sset, _) = require_spectrum(&config)?;
    let ev = kernel_evaluator(profile, sset, KernelModeArg::Auto, JModeArg::Auto)?;
    let report = trace_convergence_report(&ev, radii, quad_points)?;

    let mut csv = Csv::new(&["r", "trace", "error", "bound_ratio"]);
    for row in &report.rows {
        csv.row(&[
            sig15(row.r),
            sig15(row.trace),
            sig15(row.error),
            sig15(row.bound_ratio),
        ]);
    }
    write_text(config.out.as_deref(), &csv.finish())
}

pub fn sweep(
    config: ConfigArgs,
    factors: &[f64],
    windows: &[f64],
    trials: usize,
    seed: u64,
) -> CliResult<()> {
    let (profile, profile_value) = load_profile(&config.profile)?;
    let (sset, spectrum_value) = require_spectrum(&config)?;
    let ev = kernel_evaluator(profile, sset, KernelModeArg::Auto, JModeArg::Auto)?;
    let rows = density_sweep(&ev, factors, windows, trials, seed)?;

    let value = json!({
        "meta": meta(
            "sweep",
            json!({
                "profile": profile_value,
                "spectrum": spectrum_value,
                "factors": factors,
                "windows": windows,
                "trials": trials,
            }),
            Some(seed),
        ),
        "critical": ev.spectral_set().critical_density(),
        "rows": rows.iter().map(|r| json!({
            "factor": r.factor,
            "window": r.window,
            "trial": r.trial,
            "A_hat": r.a_hat,
            "B_hat": r.b_hat,
            "lambda_min": r.lambda_min,
            "seed": r.seed,
        })).collect::<Vec<_>>(),
    });
    write_json(config.out.as_deref(), &value)
}

struct Check {
    name: &'static str,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
    skipped: bool,
}

impl Check {
    fn measured(name: &'static str, max_residual: f64, tolerance: f64) -> Self {
        Check {
            name,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            skipped: false,
        }
    }

    fn failed(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            skipped: false,
        }
    }

    fn skipped(name: &'static str) -> Self {
        Check {
            name,
            max_residual: 0.0,
            tolerance: 0.0,
            pass: true,
            skipped: true,
        }
    }
}

pub fn verify(config: ConfigArgs, seed: u64, corrupt: bool) -> CliResult<()> {
    let (profile, profile_value) = load_profile(&config.profile)?;
    let (sset, spectrum_value) = require_spectrum(&config)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = connection_table(&profile);
    if corrupt {
        table.perturb_for_tests(1e-3);
    }

    let mut checks: Vec<Check> = Vec::new();

    // coefficient identities on 50 seeded spectral points
    let us: Vec<f64> = (0..50).map(|_| rng.gen_range(1e-3..20.0)).collect();
    let mut cross_wronskian: f64 = 0.0;
    let mut normalization: f64 = 0.0;
    let mut hid: f64 = 0.0;
    let mut conjugate_wronskian: f64 = 0.0;
    let mut kappa_chain: f64 = 0.0;
    let mut l_product: f64 = 0.0;
    let mut r_product: f64 = 0.0;
    for &u in &us {
        let res = wronskian_identities(&profile, &table, u)?;
        cross_wronskian = cross_wronskian.max(res.cross_wronskian);
        normalization = normalization.max(res.normalization);
        hid = hid.max(res.mixed_modulus);
        conjugate_wronskian = conjugate_wronskian.max(res.conjugate_wronskian);
        kappa_chain = kappa_chain.max(res.kappa_chain);
        l_product = l_product.max(res.l_product);
        r_product = r_product.max(res.r_product);
    }
    let tol = 1e-9;
    checks.push(Check::measured("cross_wronskian", cross_wronskian, tol));
    checks.push(Check::measured("normalization", normalization, tol));
    checks.push(Check::measured("mixed_modulus", hid, tol));
    checks.push(Check::measured("conjugate_wronskian", conjugate_wronskian, tol));
    checks.push(Check::measured("kappa_chain", kappa_chain, tol));
    checks.push(Check::measured("l_product", l_product, tol));
    checks.push(Check::measured("r_product", r_product, tol));

    // two routes to κ must agree (done inside kappa_of)
    let kappa_ok = match kappa_of(&profile, &table) {
        Ok(_) => {
            checks.push(Check::measured("kappa_consistency", 0.0, 1e-11));
            true
        }
        Err(Error::InternalConsistency(_)) => {
            checks.push(Check::failed("kappa_consistency", 1e-11));
            false
        }
        Err(e) => return Err(e.into()),
    };

    if kappa_ok {
        let ev = KernelEvaluator::new(profile.clone(), sset.clone())?;

        // kernel symmetry on seeded pairs
        let mut sym: f64 = 0.0;
        for _ in 0..50 {
            let x = rng.gen_range(-10.0..10.0);
            let y = rng.gen_range(-10.0..10.0);
            sym = sym.max((ev.eval(x, y)? - ev.eval(y, x)?).abs());
        }
        checks.push(Check::measured("symmetry", sym, 1e-10));

        // Gram positive semidefiniteness on 20 seeded points
        let pts: Vec<f64> = (0..20).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let gram = kernel_gram(&ev, &pts)?;
        let eig = symmetric_eigen(&gram)?;
        let psd_residual = (-eig.lambda_min()).max(0.0);
        checks.push(Check::measured(
            "gram_psd",
            psd_residual,
            1e-8 * eig.lambda_max().max(f64::MIN_POSITIVE),
        ));

        // series truncation bound against quadrature, where the series applies
        let jev = ev.j_evaluator();
        if jev.series_data().is_some() {
            let mut worst: f64 = 0.0;
            for &s in &[0.0, 3.7, 11.1] {
                let truth = jev.j_quadrature(s)?;
                let (_, m, _) = jev.j_series(s, 1e-10)?;
                for mp in 0..=m {
                    let partial = jev.j_series_partial(s, mp)?;
                    let bound = jev.series_bound(mp)?;
                    let excess = (partial - truth).norm() - (bound + 1e-9);
                    worst = worst.max(excess);
                }
            }
            checks.push(Check::measured("series_bound", worst.max(0.0), 0.0));
        } else {
            checks.push(Check::skipped("series_bound"));
        }
    } else {
        checks.push(Check::skipped("symmetry"));
        checks.push(Check::skipped("gram_psd"));
        checks.push(Check::skipped("series_bound"));
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let value = json!({
        "meta": meta(
            "verify",
            json!({
                "profile": profile_value,
                "spectrum": spectrum_value,
                "corrupt": corrupt,
            }),
            Some(seed),
        ),
        "pass": all_pass,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "max_residual": c.max_residual,
            "tolerance": c.tolerance,
            "pass": c.pass,
            "skipped": c.skipped,
        })).collect::<Vec<_>>(),
    });
    write_json(config.out.as_deref(), &value)?;

    if all_pass {
        Ok(())
    } else {
        let failing: Vec<&str> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect();
        Err(Failure::Verification(format!(
            "failing checks: {}",
            failing.join(", ")
        )))
    }
}
