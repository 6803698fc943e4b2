use std::fs;
use std::path::Path;
use std::time::Instant;

use sgd_outage::approx::{tv_distance_and_bounds, ApproxMethod, TvDiagnostics};
use sgd_outage::experiments::bench::{doubling_sizes, fitted_slopes, run_benchmark, BenchMethod};
use sgd_outage::experiments::{averaged_error_study, improvement_sweep, sop_sweep};
use sgd_outage::pbd::tail_recursive;
use sgd_outage::sgd::{sop_equal_capacity_with, ExactMethod, SgdScenario, TailResult};

use crate::scenario::{ScenarioFile, DEFAULT_SEED};
use crate::table::{Cell, Format, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Study {
    Errors,
    SopSweep,
    ImproveSweep,
}

impl Study {
    fn file_stem(self) -> &'static str {
        match self {
            Study::Errors => "errors",
            Study::SopSweep => "sop_sweep",
            Study::ImproveSweep => "improvement_sweep",
        }
    }
}

fn default_method(s: &SgdScenario) -> ExactMethod {
    if s.common_capacity().is_some() {
        ExactMethod::Recursive
    } else {
        ExactMethod::General
    }
}

pub fn sop(path: &Path, method: Option<ExactMethod>) -> Result<Table, CliError> {
    let file = ScenarioFile::load(path)?;
    let base = file.scenario()?;
    let method = method.unwrap_or_else(|| default_method(&base));

    let mut table = Table::new(&[
        "system",
        "method",
        "n_gateways",
        "r",
        "ceil_r",
        "threshold",
        "sop",
        "availability",
        "improvement_factor",
    ])
    .meta("method", method.label())
    .meta("scenario", path.display());

    let start = Instant::now();
    let base_result = sop_equal_capacity_with(&base, method)?;
    push_sop_row(&mut table, "base", &base, &base_result, 1.0);
    if let Some(ext) = file.extended_scenario(&base)? {
        let ext_result = sop_equal_capacity_with(&ext, method)?;
        let factor = if ext_result.sop > 0.0 {
            base_result.sop / ext_result.sop
        } else {
            f64::NAN
        };
        push_sop_row(&mut table, "extended", &ext, &ext_result, factor);
    }
    eprintln!("wall time: {:.6} s", start.elapsed().as_secs_f64());
    Ok(table)
}

fn push_sop_row(
    table: &mut Table,
    system: &str,
    s: &SgdScenario,
    result: &TailResult,
    factor: f64,
) {
    let (r, ceil_r, threshold) = match s.demand_ratio() {
        Ok(d) => (d.r.into(), d.ceil_r.into(), d.threshold.into()),
        Err(_) => (Cell::Missing, Cell::Missing, Cell::Missing),
    };
    table.push(vec![
        system.into(),
        result.method.label().into(),
        s.n_gateways().into(),
        r,
        ceil_r,
        threshold,
        result.sop.into(),
        result.availability.into(),
        factor.into(),
    ]);
}

pub fn approx(
    path: &Path,
    methods: Option<&[ApproxMethod]>,
    threshold: Option<usize>,
) -> Result<Table, CliError> {
    let file = ScenarioFile::load(path)?;
    let scenario = file.scenario()?;
    let p = scenario.outage_probs();
    let threshold = match threshold {
        Some(l) => l,
        None => scenario.demand_ratio()?.threshold,
    };
    let exact = tail_recursive(p, threshold)?;
    let tv = tv_distance_and_bounds(p)?;
    let methods = methods.unwrap_or(&ApproxMethod::ALL);

    let mut table = Table::new(&[
        "method",
        "threshold",
        "value",
        "applicable",
        "exact",
        "abs_error",
        "tv_distance",
        "tv_bound",
        "tv_bound_kind",
    ])
    .meta("method", "recursive (exact reference)")
    .meta("scenario", path.display());

    for &m in methods {
        let r = m.evaluate(p, threshold)?;
        let diag: Option<TvDiagnostics> = match m {
            ApproxMethod::Ba => tv.binomial,
            ApproxMethod::Pa => Some(tv.poisson),
            _ => None,
        };
        let (dist, bound, kind): (Cell, Cell, Cell) = match diag {
            Some(d) => (d.tv_distance.into(), d.bound.into(), format!("{:?}", d.bound_kind).into()),
            None => (Cell::Missing, Cell::Missing, Cell::Missing),
        };
        let err = if r.applicable { Cell::from((r.value - exact).abs()) } else { Cell::Missing };
        table.push(vec![
            m.label().into(),
            threshold.into(),
            r.value.into(),
            r.applicable.into(),
            exact.into(),
            err,
            dist,
            bound,
            kind,
        ]);
    }
    Ok(table)
}

pub fn study(
    spec_path: Option<&Path>,
    which: &[Study],
    out_dir: &Path,
    format: Format,
    seed: Option<u64>,
) -> Result<Table, CliError> {
    let file = match spec_path {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default(),
    };
    let exp = file.experiment(seed)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut summary = Table::new(&["study", "file", "rows", "summary"])
        .meta("seed", exp.spec.seed)
        .meta("n_configs", exp.spec.n_configs)
        .meta("prob_range", format!("({}, {})", exp.spec.prob_low, exp.spec.prob_high));
    let mut seen = Vec::new();
    for &study in which {
        if seen.contains(&study) {
            continue;
        }
        seen.push(study);
        let (table, note) = match study {
            Study::Errors => errors_table(&exp)?,
            Study::SopSweep => sop_sweep_table(&exp)?,
            Study::ImproveSweep => improvement_table(&exp)?,
        };
        let path = out_dir.join(format!("{}.{}", study.file_stem(), format.extension()));
        fs::write(&path, table.render(format))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        summary.push(vec![
            study.file_stem().into(),
            path.display().to_string().into(),
            table.rows.len().into(),
            note.into(),
        ]);
    }
    Ok(summary)
}

fn experiment_table(exp: &crate::scenario::Experiment, columns: &[&'static str], method: &str) -> Table {
    Table::new(columns)
        .meta("method", method)
        .meta("seed", exp.spec.seed)
        .meta("n_configs", exp.spec.n_configs)
        .meta("prob_range", format!("({}, {})", exp.spec.prob_low, exp.spec.prob_high))
}

fn errors_table(exp: &crate::scenario::Experiment) -> Result<(Table, String), CliError> {
    let rows = averaged_error_study(&exp.spec, &exp.n_values)?;
    let mut table = experiment_table(
        exp,
        &["n_gateways", "method", "max_ae", "rmse", "mean_ae", "n_configs", "evaluations"],
        "BA,PA,NA,RNA,CB vs recursive",
    );
    for r in &rows {
        table.push(vec![
            r.n_gateways.into(),
            r.report.method.label().into(),
            r.report.max_ae.into(),
            r.report.rmse.into(),
            r.report.mean_ae.into(),
            r.n_configs.into(),
            r.report.eval_set_size.into(),
        ]);
    }
    let mut by_mae: Vec<(ApproxMethod, f64)> = ApproxMethod::ALL
        .iter()
        .filter_map(|&m| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.report.method == m)
                .map(|r| r.report.mean_ae)
                .collect();
            (!v.is_empty()).then(|| (m, v.iter().sum::<f64>() / v.len() as f64))
        })
        .collect();
    by_mae.sort_by(|a, b| a.1.total_cmp(&b.1));
    let note = by_mae
        .iter()
        .map(|(m, v)| format!("{m}={v:.3e}"))
        .collect::<Vec<_>>()
        .join(" < ");
    Ok((table, format!("mean MAE ordering: {note}")))
}

fn extremes<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn sop_sweep_table(exp: &crate::scenario::Experiment) -> Result<(Table, String), CliError> {
    let rows = sop_sweep(&exp.spec, &exp.ceil_r_values, &exp.n_values)?;
    let mut table = experiment_table(exp, &["n_gateways", "ceil_r", "sop", "n_configs"], "recursive");
    for r in &rows {
        table.push(vec![r.n_gateways.into(), r.ceil_r.into(), r.value.into(), r.n_configs.into()]);
    }
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (lo, hi) = extremes(values.iter());
    Ok((table, format!("SOP range [{lo:.3e}, {hi:.3e}]")))
}

fn improvement_table(exp: &crate::scenario::Experiment) -> Result<(Table, String), CliError> {
    let rows = improvement_sweep(&exp.spec, exp.base_n, &exp.k_values, &exp.ceil_r_values)?;
    let mut table = experiment_table(
        exp,
        &["base_n", "extra_gateways", "ceil_r", "improvement_factor", "n_configs", "censored"],
        "recursive",
    );
    for r in &rows {
        table.push(vec![
            r.n_gateways.into(),
            r.extra_gateways.into(),
            r.ceil_r.into(),
            r.value.into(),
            r.n_configs.into(),
            r.censored.into(),
        ]);
    }
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (lo, hi) = extremes(values.iter());
    let censored: usize = rows.iter().map(|r| r.censored).sum();
    Ok((table, format!("I_g range [{lo:.3e}, {hi:.3e}], {censored} censored")))
}

pub fn bench(n_min: usize, n_max: usize, repetitions: usize, seed: Option<u64>) -> Result<Table, CliError> {
    if n_min == 0 || n_max < n_min {
        return Err(CliError::Grid(format!("need 1 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let sizes = doubling_sizes(n_min, n_max);
    let rows = run_benchmark(&BenchMethod::ALL, &sizes, repetitions, seed);
    let slopes = fitted_slopes(&rows);
    let slope_of = |m: BenchMethod| {
        slopes
            .iter()
            .find(|(s, _)| *s == m)
            .map_or(f64::NAN, |&(_, v)| v)
    };
    let mut table = Table::new(&["method", "n_gateways", "median_seconds", "fitted_exponent"])
        .meta("method", "recursive_L1,recursive_Lhalf,cfe,fft_pmf")
        .meta("seed", seed)
        .meta("repetitions", repetitions);
    for r in &rows {
        table.push(vec![
            r.method.label().into(),
            r.n_gateways.into(),
            r.median_seconds.into(),
            slope_of(r.method).into(),
        ]);
    }
    for (m, s) in &slopes {
        eprintln!("{}: fitted exponent {s:.2}", m.label());
    }
    Ok(table)
}
