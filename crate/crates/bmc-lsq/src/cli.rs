//! Orchestration behind the command-line subcommands: each run reads a
//! validated configuration, executes one pipeline, and writes CSV outputs
//! with JSON sidecars. Every output records the configuration hash, and all
//! randomness derives from the master seed, so reruns are byte-identical.

use std::path::{Path, PathBuf};

use crate::basis::{select_centers, GaussianBasis};
use crate::config::RunConfig;
use crate::constants::ErgodicityProfile;
use crate::csvio::{config_hash, fmt_f64, write_meta_sidecar, CsvDoc};
use crate::error::Result;
use crate::estimator::fit;
use crate::experiments::concentration::{run_concentration, TestFunction};
use crate::experiments::figures::{
    figure_error_boxplot, figure_estimator_curves, figure_point_boxplot, figure_surface,
    linspace, GenerationStudy, ParameterMode,
};
use crate::experiments::rate::run_rate_study;
use crate::kernels::{simulate_tree, TwoPointModel};
use crate::quadrature::QuadratureGrid;
use crate::rng::{derive_seed, stream};
use crate::selection::cross_validate;
use crate::tree::triangles_of_generation;

fn base_meta<'a>(cfg: &RunConfig, command: &str) -> Vec<(&'a str, String)> {
    vec![
        ("command", command.to_string()),
        ("config_hash", config_hash(&cfg.to_canonical_toml())),
        ("seed", cfg.run.seed.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
    ]
}

fn doc_with_hash(cfg: &RunConfig, header: &str) -> CsvDoc {
    CsvDoc::new(header).with_meta("config_hash", config_hash(&cfg.to_canonical_toml()))
}

/// `simulate`: one tree sample in the binary layout plus its sidecar.
pub fn run_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let kernel = cfg.kernel_model()?;
    let init = cfg.initial_law()?;
    let n = cfg.sample.generation;
    let seed = derive_seed(cfg.run.seed, "simulate-tree", 0, 0);
    let sample = simulate_tree(&kernel, &init, n + 1, seed)?;
    let path = out_dir.join("sample.bmct");
    sample.save(&path)?;
    let mut meta = base_meta(cfg, "simulate");
    meta.push(("generation", n.to_string()));
    meta.push(("depth", (n + 1).to_string()));
    meta.push(("tree_seed", seed.to_string()));
    meta.push(("nodes", sample.values().len().to_string()));
    let meta_path = write_meta_sidecar(&path, &meta)?;
    Ok(vec![path, meta_path])
}

/// `fit`: one ridge fit at the configured `(lambda, tau)`.
pub fn run_fit(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let kernel = cfg.kernel_model()?;
    let init = cfg.initial_law()?;
    let n = cfg.sample.generation;
    let master = cfg.run.seed;
    let sample = simulate_tree(&kernel, &init, n + 1, derive_seed(master, "fit-tree", 0, 0))?;
    let triangles = triangles_of_generation(&sample, n)?;
    let d = cfg.basis.d_max.min(triangles.len());
    let centers = select_centers(&triangles, d, &mut stream(master, "fit-centers", 0, 0))?;
    let basis = GaussianBasis::new(cfg.basis.tau, centers)?;
    let fitted = fit(&triangles, basis, cfg.fit.lambda)?;

    let path = out_dir.join("fit.csv");
    let mut text = format!("# config_hash={}\n", config_hash(&cfg.to_canonical_toml()));
    text.push_str(&fitted.to_csv(n, master));
    std::fs::write(&path, text)?;
    let mut meta = base_meta(cfg, "fit");
    meta.push(("generation", n.to_string()));
    meta.push(("d", d.to_string()));
    meta.push(("lambda", fmt_f64(cfg.fit.lambda)));
    meta.push(("tau", fmt_f64(cfg.basis.tau)));
    meta.push((
        "positive_coefficients",
        fitted.beta().iter().filter(|&&b| b > 0.0).count().to_string(),
    ));
    let meta_path = write_meta_sidecar(&path, &meta)?;
    Ok(vec![path, meta_path])
}

/// `cv`: the full grid search; prints the selected cell.
pub fn run_cv(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let kernel = cfg.kernel_model()?;
    let init = cfg.initial_law()?;
    let n = cfg.sample.generation;
    let master = cfg.run.seed;
    let sample = simulate_tree(&kernel, &init, n + 1, derive_seed(master, "cv-tree", 0, 0))?;
    let grid = cfg.cv_grid()?;
    let report = cross_validate(&sample, n, &grid, derive_seed(master, "cv", 0, 0))?;

    let mut doc = doc_with_hash(cfg, "lambda,tau,fold,score");
    for row in &report.per_fold {
        doc.push_row(&[
            fmt_f64(row.lambda),
            fmt_f64(row.tau),
            row.fold.to_string(),
            fmt_f64(row.score),
        ]);
    }
    for row in &report.mean_scores {
        doc.push_row(&[
            fmt_f64(row.lambda),
            fmt_f64(row.tau),
            "mean".to_string(),
            fmt_f64(row.score),
        ]);
    }
    let path = out_dir.join("cv_report.csv");
    doc.write(&path)?;
    let mut meta = base_meta(cfg, "cv");
    meta.push(("generation", n.to_string()));
    meta.push(("selected_lambda", fmt_f64(report.best_lambda)));
    meta.push(("selected_tau", fmt_f64(report.best_tau)));
    meta.push(("floored_terms", report.floored_terms.to_string()));
    let meta_path = write_meta_sidecar(&path, &meta)?;
    println!(
        "selected lambda = {}, tau = {}",
        fmt_f64(report.best_lambda),
        fmt_f64(report.best_tau)
    );
    Ok(vec![path, meta_path])
}

fn parameter_mode(cfg: &RunConfig) -> ParameterMode {
    if cfg.experiment.reselect_cv_per_replication {
        ParameterMode::ReselectPerReplication
    } else {
        ParameterMode::ReuseSelected
    }
}

fn write_generation_study(
    cfg: &RunConfig,
    study: &GenerationStudy,
    out_dir: &Path,
    stem: &str,
    command: &str,
    value_column: &str,
    extra_meta: Vec<(&'static str, String)>,
) -> Result<Vec<PathBuf>> {
    let mut doc = doc_with_hash(cfg, &format!("generation,rep,{value_column}"));
    for row in &study.rows {
        doc.push_row(&[
            row.generation.to_string(),
            row.rep.to_string(),
            fmt_f64(row.value),
        ]);
    }
    let rows_path = out_dir.join(format!("{stem}.csv"));
    doc.write(&rows_path)?;

    let mut summary = doc_with_hash(cfg, "generation,min,q1,median,q3,max");
    for s in &study.summaries {
        summary.push_row(&[
            s.generation.to_string(),
            fmt_f64(s.min),
            fmt_f64(s.q1),
            fmt_f64(s.median),
            fmt_f64(s.q3),
            fmt_f64(s.max),
        ]);
    }
    let summary_path = out_dir.join(format!("{stem}_summary.csv"));
    summary.write(&summary_path)?;

    let mut meta = base_meta(cfg, command);
    meta.push(("replications", cfg.experiment.replications.to_string()));
    meta.push((
        "parameter_mode",
        match parameter_mode(cfg) {
            ParameterMode::ReuseSelected => "reuse_selected".to_string(),
            ParameterMode::ReselectPerReplication => "reselect_per_replication".to_string(),
        },
    ));
    let selected: Vec<String> = study
        .selected
        .iter()
        .map(|(n, l, t)| format!("n={n}:lambda={}:tau={}", fmt_f64(*l), fmt_f64(*t)))
        .collect();
    meta.push(("selected_cells", selected.join(";")));
    for (k, v) in extra_meta {
        meta.push((k, v));
    }
    let meta_path = write_meta_sidecar(&rows_path, &meta)?;
    Ok(vec![rows_path, summary_path, meta_path])
}

/// `figures {1|2|3|4}`: the data behind each figure of the numerical study.
pub fn run_figure(which: u8, cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let truth = cfg.nbar_model()?;
    let protocol = cfg.fit_protocol()?;
    let cv = cfg.cv_grid()?;
    let master = cfg.run.seed;
    let exp = &cfg.experiment;
    match which {
        1 => {
            let z_grid = linspace(exp.box_lo, exp.box_hi, exp.z_points);
            let data = figure_estimator_curves(
                &protocol,
                &truth,
                &cv,
                parameter_mode(cfg),
                exp.curves_generation,
                exp.replications,
                exp.slice_x,
                exp.point[1],
                &z_grid,
                master,
            )?;
            let mut doc = doc_with_hash(cfg, "series,z,value");
            for (zi, &z) in data.z.iter().enumerate() {
                doc.push_row(&["truth".to_string(), fmt_f64(z), fmt_f64(data.truth[zi])]);
            }
            for (rep, curve) in data.curves.iter().enumerate() {
                for (zi, &z) in data.z.iter().enumerate() {
                    doc.push_row(&[rep.to_string(), fmt_f64(z), fmt_f64(curve[zi])]);
                }
            }
            let path = out_dir.join("figure1_curves.csv");
            doc.write(&path)?;
            let mut meta = base_meta(cfg, "figures 1");
            meta.push(("generation", exp.curves_generation.to_string()));
            meta.push(("replications", exp.replications.to_string()));
            meta.push(("selected_lambda", fmt_f64(data.selected.0)));
            meta.push(("selected_tau", fmt_f64(data.selected.1)));
            let meta_path = write_meta_sidecar(&path, &meta)?;
            Ok(vec![path, meta_path])
        }
        2 => {
            let study = figure_point_boxplot(
                &protocol,
                &cv,
                parameter_mode(cfg),
                &exp.generations,
                exp.replications,
                (exp.point[0], exp.point[1], exp.point[2]),
                master,
            )?;
            let truth_value = truth.density(exp.point[0], exp.point[1], exp.point[2]);
            write_generation_study(
                cfg,
                &study,
                out_dir,
                "figure2_point",
                "figures 2",
                "estimate",
                vec![
                    (
                        "point",
                        format!(
                            "({},{},{})",
                            fmt_f64(exp.point[0]),
                            fmt_f64(exp.point[1]),
                            fmt_f64(exp.point[2])
                        ),
                    ),
                    ("truth_value", fmt_f64(truth_value)),
                ],
            )
        }
        3 => {
            let data = figure_surface(
                &protocol,
                &truth,
                &cv,
                exp.surface_generation,
                exp.slice_x,
                exp.box_lo,
                exp.box_hi,
                exp.surface_points,
                master,
            )?;
            let mut doc = doc_with_hash(cfg, "y,z,truth,estimate");
            for (i, &y) in data.y.iter().enumerate() {
                for (j, &z) in data.z.iter().enumerate() {
                    doc.push_row(&[
                        fmt_f64(y),
                        fmt_f64(z),
                        fmt_f64(data.truth[i][j]),
                        fmt_f64(data.estimate[i][j]),
                    ]);
                }
            }
            let path = out_dir.join("figure3_surface.csv");
            doc.write(&path)?;
            let mut meta = base_meta(cfg, "figures 3");
            meta.push(("generation", exp.surface_generation.to_string()));
            meta.push(("slice_x", fmt_f64(exp.slice_x)));
            meta.push(("selected_lambda", fmt_f64(data.selected.0)));
            meta.push(("selected_tau", fmt_f64(data.selected.1)));
            let meta_path = write_meta_sidecar(&path, &meta)?;
            Ok(vec![path, meta_path])
        }
        4 => {
            let grid = QuadratureGrid::square(exp.box_lo, exp.box_hi, exp.quad_points)?;
            let study = figure_error_boxplot(
                &protocol,
                &truth,
                &cv,
                parameter_mode(cfg),
                &exp.generations,
                exp.replications,
                exp.slice_x,
                &grid,
                master,
            )?;
            write_generation_study(
                cfg,
                &study,
                out_dir,
                "figure4_error",
                "figures 4",
                "slice_error",
                vec![("slice_x", fmt_f64(exp.slice_x))],
            )
        }
        other => Err(crate::error::Error::Precondition(format!(
            "figure index must be 1..=4, got {other}"
        ))),
    }
}

/// `concentration`: tail table of the two-point lab.
pub fn run_concentration_cmd(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let section = &cfg.concentration;
    let model = TwoPointModel::new(section.a)?;
    let table = run_concentration(
        &model,
        TestFunction::Identity,
        section.n,
        section.replications,
        &section.deltas,
        cfg.run.seed,
    )?;
    let mut doc = doc_with_hash(cfg, "delta,empirical,shape,calibrated");
    for row in &table.rows {
        doc.push_row(&[
            fmt_f64(row.delta),
            fmt_f64(row.empirical),
            fmt_f64(row.shape),
            fmt_f64(row.calibrated),
        ]);
    }
    let path = out_dir.join("concentration.csv");
    doc.write(&path)?;
    let mut meta = base_meta(cfg, "concentration");
    meta.push(("test_function", TestFunction::Identity.id().to_string()));
    meta.push(("alpha", fmt_f64(table.alpha)));
    meta.push(("c1", fmt_f64(table.c1)));
    meta.push(("c2", fmt_f64(table.c2)));
    meta.push(("v_n", fmt_f64(table.v_n)));
    meta.push(("fitted_c", fmt_f64(table.fitted_c)));
    meta.push(("dominance_fraction", fmt_f64(table.dominance_fraction())));
    let meta_path = write_meta_sidecar(&path, &meta)?;
    Ok(vec![path, meta_path])
}

/// `rate`: the ergodicity-rate sweep with fitted decay slopes.
pub fn run_rate_cmd(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let study = run_rate_study(&cfg.rate_config()?, cfg.run.seed)?;
    let mut rows = doc_with_hash(cfg, "a,n,rep,slice_error");
    for r in &study.rows {
        rows.push_row(&[
            fmt_f64(r.a),
            r.n.to_string(),
            r.rep.to_string(),
            fmt_f64(r.error),
        ]);
    }
    let rows_path = out_dir.join("rate_rows.csv");
    rows.write(&rows_path)?;

    let mut medians = doc_with_hash(cfg, "a,n,median_error");
    for m in &study.medians {
        medians.push_row(&[fmt_f64(m.a), m.n.to_string(), fmt_f64(m.median_error)]);
    }
    let medians_path = out_dir.join("rate_medians.csv");
    medians.write(&medians_path)?;

    let mut slopes = doc_with_hash(cfg, "a,log_median_slope");
    for s in &study.slopes {
        slopes.push_row(&[fmt_f64(s.a), fmt_f64(s.slope)]);
    }
    let slopes_path = out_dir.join("rate_slopes.csv");
    slopes.write(&slopes_path)?;

    let mut meta = base_meta(cfg, "rate");
    meta.push((
        "a_interpretation",
        "drift slope; used as the tagged-chain contraction proxy for the ergodicity rate"
            .to_string(),
    ));
    let selected: Vec<String> = study
        .selected
        .iter()
        .map(|(a, n, l, t)| {
            format!("a={}:n={n}:lambda={}:tau={}", fmt_f64(*a), fmt_f64(*l), fmt_f64(*t))
        })
        .collect();
    meta.push(("selected_cells", selected.join(";")));
    let meta_path = write_meta_sidecar(&rows_path, &meta)?;
    Ok(vec![rows_path, medians_path, slopes_path, meta_path])
}

/// `constants`: the derived-constants table for one ergodicity profile.
pub fn constants_report(profile: &ErgodicityProfile) -> String {
    let mut out = format!(
        "alpha = {}, R = {}, n = {}, gamma = {}\n",
        fmt_f64(profile.alpha),
        fmt_f64(profile.r),
        profile.n,
        fmt_f64(profile.gamma)
    );
    out.push_str("(c1 and c2 evaluated at unit function bounds)\n");
    for (name, value) in profile.table() {
        out.push_str(&format!("{name} = {}\n", fmt_f64(value)));
    }
    out
}
