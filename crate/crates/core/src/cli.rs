//! Command-line front end: meta-feature extraction, meta-target derivation,
//! ensemble training, recommendation, and the cross-validation study.
//! Exit codes: 0 success, 1 data error, 2 usage or configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::ensemble::{
    filter_matrix, train_model_matrix, validate_matrix, write_recommendation_csv, BundleManifest,
    EnsembleBundle, FilterMode,
};
use crate::error::{Error, Result};
use crate::eval::{run_cross_validation, split_half_stratified, write_cv_report, XvalConfig};
use crate::learners::TreeParams;
use crate::metadata::feature_combinations;
use crate::metafeatures::{
    extract_all, read_feature_table, write_feature_table, write_imputation_flags,
    MetaFeatureGroupSet,
};
use crate::metatarget::{
    derive_meta_target, load_accuracy_matrix, read_meta_targets, write_meta_targets, MetaTarget,
};
use crate::rng::rng_for;
use crate::tabular::{generate_datasetoids, load_dataset, save_csv, DataFormat};

#[derive(Parser)]
#[command(
    name = "metarec",
    version,
    about = "Recommends classification algorithms for tabular datasets with an ensemble of meta-level decision trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared across subcommands; file config fills anything left unset.
#[derive(Args, Debug, Clone, Default)]
struct CommonOpts {
    /// Root seed; all randomness derives from it
    #[arg(long)]
    seed: Option<u64>,
    /// Significance level for every statistical test
    #[arg(long)]
    alpha: Option<f64>,
    /// Filter mode: all | accurate | diverse | accurate-and-diverse
    #[arg(long)]
    mode: Option<String>,
    /// JSON config file with flat keys (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the five meta-feature families from every dataset in a directory
    Extract {
        /// Directory of CSV/ARFF datasets
        datasets_dir: PathBuf,
        /// Output meta-feature table (a .flags.csv sidecar is written next to it)
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Derive meta-targets from accuracy-matrix CSVs
    Targets {
        /// Directory of accuracy matrices (header = algorithm names, rows = runs)
        accuracy_dir: PathBuf,
        /// Output meta-target CSV
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Estimate accuracy matrices for datasets with the internal demo candidates
    Estimate {
        /// Directory of CSV/ARFF datasets
        datasets_dir: PathBuf,
        /// Output directory (one accuracy CSV per dataset)
        #[arg(long)]
        out: PathBuf,
        /// Candidate learner specs (tree, tree:min_leaf=16, nb, 1nn, stump, majority)
        #[arg(long, value_delimiter = ',')]
        candidates: Option<Vec<String>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Train the model matrix on meta-data and persist an ensemble bundle
    Train {
        /// Meta-feature table CSV (from `extract`)
        #[arg(long)]
        features: PathBuf,
        /// Meta-target CSV (from `targets`)
        #[arg(long)]
        targets: PathBuf,
        /// Bundle output directory
        #[arg(long)]
        out: PathBuf,
        /// Probability threshold for binary picks
        #[arg(long)]
        pick_threshold: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Recommend algorithms for one new dataset from a trained bundle
    Recommend {
        /// Trained bundle directory
        #[arg(long)]
        bundle: PathBuf,
        /// The new classification problem (CSV or ARFF)
        #[arg(long)]
        data: PathBuf,
        /// Output CSV; omitted = print to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Probability threshold for binary picks (overrides the bundle)
        #[arg(long)]
        pick_threshold: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the repeated cross-validation study on meta-data
    Xval {
        /// Meta-feature table CSV
        #[arg(long)]
        features: PathBuf,
        /// Meta-target CSV
        #[arg(long)]
        targets: PathBuf,
        /// Report output directory (one subdirectory per filter mode)
        #[arg(long)]
        out: PathBuf,
        /// Repetitions (default 5)
        #[arg(long)]
        repetitions: Option<usize>,
        /// Folds (default 10)
        #[arg(long)]
        folds: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generate datasetoids by exchanging each nominal attribute with the target
    Datasetoids {
        /// A dataset file or a directory of datasets
        input: PathBuf,
        /// Output directory for the generated CSVs
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flat JSON config mirroring the command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    alpha: Option<f64>,
    mode: Option<String>,
    pick_threshold: Option<f64>,
    min_leaf: Option<usize>,
    max_depth: Option<usize>,
    candidates: Option<Vec<String>>,
    repetitions: Option<usize>,
    folds: Option<usize>,
}

/// Effective settings after merging flags over file config over defaults.
#[derive(Debug, Clone)]
struct RunConfig {
    seed: u64,
    alpha: f64,
    mode: Option<FilterMode>,
    pick_threshold: f64,
    tree_params: TreeParams,
    candidates: Vec<String>,
    repetitions: usize,
    folds: usize,
}

impl RunConfig {
    fn resolve(common: &CommonOpts) -> Result<RunConfig> {
        let file: FileConfig = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let alpha = common.alpha.or(file.alpha).unwrap_or(0.05);
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::Config(format!("alpha {alpha} outside (0,1)")));
        }
        let mode = match common.mode.as_deref().or(file.mode.as_deref()) {
            Some(m) => Some(FilterMode::from_str(m)?),
            None => None,
        };
        let pick_threshold = file.pick_threshold.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&pick_threshold) {
            return Err(Error::Config(format!(
                "pick threshold {pick_threshold} outside [0,1]"
            )));
        }
        let tree_params = TreeParams {
            min_leaf: file.min_leaf.unwrap_or(2),
            max_depth: file.max_depth,
        };
        if tree_params.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be >= 1".into()));
        }
        let repetitions = file.repetitions.unwrap_or(5);
        let folds = file.folds.unwrap_or(10);
        if repetitions < 1 || folds < 2 {
            return Err(Error::Config("need repetitions >= 1 and folds >= 2".into()));
        }
        Ok(RunConfig {
            seed: common.seed.or(file.seed).unwrap_or(0),
            alpha,
            mode,
            pick_threshold,
            tree_params,
            candidates: file
                .candidates
                .unwrap_or_else(|| vec!["tree".into(), "tree:min_leaf=16".into(), "nb".into(), "1nn".into(), "stump".into()]),
            repetitions,
            folds,
        })
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Extract {
            datasets_dir,
            out,
            common,
        } => cmd_extract(&datasets_dir, &out, &RunConfig::resolve(&common)?),
        Command::Targets {
            accuracy_dir,
            out,
            common,
        } => cmd_targets(&accuracy_dir, &out, &RunConfig::resolve(&common)?),
        Command::Estimate {
            datasets_dir,
            out,
            candidates,
            common,
        } => {
            let mut config = RunConfig::resolve(&common)?;
            if let Some(c) = candidates {
                config.candidates = c;
            }
            cmd_estimate(&datasets_dir, &out, &config)
        }
        Command::Train {
            features,
            targets,
            out,
            pick_threshold,
            common,
        } => {
            let mut config = RunConfig::resolve(&common)?;
            if let Some(p) = pick_threshold {
                config.pick_threshold = p;
            }
            cmd_train(&features, &targets, &out, &config)
        }
        Command::Recommend {
            bundle,
            data,
            out,
            pick_threshold,
            common,
        } => cmd_recommend(
            &bundle,
            &data,
            out.as_deref(),
            pick_threshold,
            &RunConfig::resolve(&common)?,
        ),
        Command::Xval {
            features,
            targets,
            out,
            repetitions,
            folds,
            common,
        } => {
            let mut config = RunConfig::resolve(&common)?;
            if let Some(r) = repetitions {
                config.repetitions = r;
            }
            if let Some(f) = folds {
                config.folds = f;
            }
            cmd_xval(&features, &targets, &out, &config)
        }
        Command::Datasetoids { input, out } => cmd_datasetoids(&input, &out),
    }
}

fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("arff"))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no .csv or .arff files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn cmd_extract(datasets_dir: &Path, out: &Path, config: &RunConfig) -> Result<i32> {
    let files = dataset_files(datasets_dir)?;
    let mut sets = Vec::new();
    let mut failures = 0;
    for path in &files {
        let result = load_dataset(path, DataFormat::from_path(path))
            .and_then(|d| extract_all(&d, config.seed));
        match result {
            Ok(set) => sets.push(set),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    write_feature_table(&sets, out)?;
    write_imputation_flags(&sets, &flags_sidecar(out))?;
    eprintln!(
        "extracted {} of {} datasets -> {}",
        sets.len(),
        files.len(),
        out.display()
    );
    Ok(if failures > 0 { 1 } else { 0 })
}

fn flags_sidecar(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("features");
    out.with_file_name(format!("{stem}.flags.csv"))
}

fn cmd_targets(accuracy_dir: &Path, out: &Path, config: &RunConfig) -> Result<i32> {
    let files = dataset_files_with_ext(accuracy_dir, "csv")?;
    let mut names: Option<Vec<String>> = None;
    let mut rows: Vec<(String, MetaTarget)> = Vec::new();
    let mut failures = 0;
    for path in &files {
        let problem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("problem")
            .to_string();
        let outcome = load_accuracy_matrix(path).and_then(|acc| {
            if let Some(expected) = &names {
                if acc.names() != expected.as_slice() {
                    return Err(Error::MalformedInput(format!(
                        "algorithm names differ from {:?}",
                        expected
                    )));
                }
            }
            let derived = derive_meta_target(&acc, config.alpha)?;
            Ok((acc.names().to_vec(), derived))
        });
        match outcome {
            Ok((matrix_names, derived)) => {
                if derived.used_wilcoxon_fallback {
                    eprintln!("{problem}: k = 2, Wilcoxon signed-rank fallback used");
                }
                names.get_or_insert(matrix_names);
                rows.push((problem, derived.target));
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    let Some(names) = names else {
        return Err(Error::MalformedInput(
            "no accuracy matrix could be loaded".into(),
        ));
    };
    write_meta_targets(&rows, &names, out)?;
    eprintln!(
        "derived {} of {} meta-targets -> {}",
        rows.len(),
        files.len(),
        out.display()
    );
    Ok(if failures > 0 { 1 } else { 0 })
}

fn dataset_files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case(ext))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no .{ext} files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn cmd_estimate(datasets_dir: &Path, out: &Path, config: &RunConfig) -> Result<i32> {
    let specs = config
        .candidates
        .iter()
        .map(|s| crate::metatarget::LearnerSpec::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let files = dataset_files(datasets_dir)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut failures = 0;
    let mut written = 0;
    for path in &files {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("problem");
        let result = load_dataset(path, DataFormat::from_path(path)).and_then(|d| {
            let acc = crate::metatarget::estimate_accuracy_matrix(&d, &specs, config.seed)?;
            let mut csv = acc.names().join(",");
            csv.push('\n');
            for run in 0..acc.runs() {
                let row: Vec<String> = (0..acc.k())
                    .map(|j| format!("{}", acc.value(j, run)))
                    .collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            crate::metafeatures::write_atomic(&out.join(format!("{stem}.csv")), &csv)
        });
        match result {
            Ok(()) => written += 1,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    eprintln!(
        "estimated {written} of {} accuracy matrices -> {}",
        files.len(),
        out.display()
    );
    Ok(if failures > 0 { 1 } else { 0 })
}

/// Joins a feature table and a target table by problem name, keeping the
/// feature-table order.
fn join_meta_data(
    features_path: &Path,
    targets_path: &Path,
) -> Result<(Vec<MetaFeatureGroupSet>, Vec<MetaTarget>, Vec<String>)> {
    let features = read_feature_table(features_path)?;
    let (names, target_rows) = read_meta_targets(targets_path)?;
    let mut targets = Vec::with_capacity(features.len());
    for set in &features {
        let found = target_rows
            .iter()
            .find(|(problem, _)| *problem == set.problem)
            .ok_or_else(|| {
                Error::LengthMismatch(format!("no meta-target for problem {}", set.problem))
            })?;
        targets.push(found.1.clone());
    }
    Ok((features, targets, names))
}

fn cmd_train(
    features_path: &Path,
    targets_path: &Path,
    out: &Path,
    config: &RunConfig,
) -> Result<i32> {
    let (features, targets, names) = join_meta_data(features_path, targets_path)?;
    if features.len() < 4 {
        return Err(Error::TooFewInstances(format!(
            "training needs >= 4 meta-instances, got {}",
            features.len()
        )));
    }
    let mode = config.mode.unwrap_or(FilterMode::AccurateAndDiverse);
    let indices: Vec<usize> = (0..features.len()).collect();
    let (train_idx, valid_idx) = split_half_stratified(
        &indices,
        &targets,
        rng_for(config.seed, &[0x7472_6169, 0x6e]),
    );
    let gather_f =
        |idx: &[usize]| -> Vec<MetaFeatureGroupSet> { idx.iter().map(|&i| features[i].clone()).collect() };
    let gather_t = |idx: &[usize]| -> Vec<MetaTarget> { idx.iter().map(|&i| targets[i].clone()).collect() };

    let combos = feature_combinations(5)?;
    let matrix = train_model_matrix(
        &gather_f(&train_idx),
        &gather_t(&train_idx),
        &combos,
        &config.tree_params,
        &names,
    )?;
    let records = validate_matrix(&matrix, &gather_f(&valid_idx), &gather_t(&valid_idx))?;
    let flags = filter_matrix(&records, config.alpha, mode)?;
    let kept: usize = (0..matrix.k()).map(|j| flags.kept_in_column(j)).sum();
    let bundle = EnsembleBundle {
        manifest: BundleManifest {
            algorithm_names: names,
            combos: matrix.combos.clone(),
            alpha: config.alpha,
            mode,
            pick_threshold: config.pick_threshold,
            tree_params: config.tree_params,
            seed: config.seed,
        },
        matrix,
        flags,
    };
    bundle.save(out)?;
    eprintln!(
        "trained {}x{} model matrix ({} models kept, mode {mode}) -> {}",
        bundle.matrix.t(),
        bundle.matrix.k(),
        kept,
        out.display()
    );
    Ok(0)
}

fn cmd_recommend(
    bundle_dir: &Path,
    data: &Path,
    out: Option<&Path>,
    pick_threshold: Option<f64>,
    config: &RunConfig,
) -> Result<i32> {
    let bundle = EnsembleBundle::load(bundle_dir)?;
    let d = load_dataset(data, DataFormat::from_path(data))?;
    let features = extract_all(&d, config.seed)?;
    let probs = crate::ensemble::ensemble_predict(&bundle.matrix, &bundle.flags, &features)?;
    let rec = crate::ensemble::recommend(
        &probs,
        pick_threshold.unwrap_or(bundle.manifest.pick_threshold),
    );
    match out {
        Some(path) => {
            write_recommendation_csv(&rec, &bundle.matrix.algorithm_names, path)?;
            eprintln!("recommendation -> {}", path.display());
        }
        None => {
            println!("algorithm,probability,pick,rank");
            for (j, name) in bundle.matrix.algorithm_names.iter().enumerate() {
                println!(
                    "{name},{},{},{}",
                    rec.probabilities[j], rec.picks[j], rec.ranks[j]
                );
            }
        }
    }
    Ok(0)
}

fn cmd_xval(
    features_path: &Path,
    targets_path: &Path,
    out: &Path,
    config: &RunConfig,
) -> Result<i32> {
    let (features, targets, names) = join_meta_data(features_path, targets_path)?;
    let modes: Vec<FilterMode> = match config.mode {
        Some(mode) => vec![mode],
        None => FilterMode::ALL_MODES.to_vec(),
    };
    for mode in modes {
        let xval_config = XvalConfig {
            alpha: config.alpha,
            pick_threshold: config.pick_threshold,
            tree_params: config.tree_params,
            mode,
            seed: config.seed,
            repetitions: config.repetitions,
            folds: config.folds,
        };
        let report = run_cross_validation(&features, &targets, &names, &xval_config)?;
        let mode_dir = out.join(mode.name());
        write_cv_report(&report, &mode_dir)?;
        let en = report.aggregate("En").expect("ensemble aggregate present");
        eprintln!(
            "mode {mode}: mean RL {:.4}, mean AP {:.4}, mean kept/column {:.2} -> {}",
            en.mean_ranking_loss,
            en.mean_average_precision,
            report.mean_kept_per_column,
            mode_dir.display()
        );
    }
    Ok(0)
}

fn cmd_datasetoids(input: &Path, out: &Path) -> Result<i32> {
    let files = if input.is_dir() {
        dataset_files(input)?
    } else {
        vec![input.to_path_buf()]
    };
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut failures = 0;
    let mut written = 0;
    for path in &files {
        match load_dataset(path, DataFormat::from_path(path)) {
            Ok(d) => {
                for oid in generate_datasetoids(&d) {
                    let file = out.join(format!("{}.csv", oid.name()));
                    save_csv(&oid, &file)?;
                    written += 1;
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    eprintln!("wrote {written} datasetoids -> {}", out.display());
    Ok(if failures > 0 { 1 } else { 0 })
}
