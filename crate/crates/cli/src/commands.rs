//! Subcommand implementations. Every run prints its effective config to
//! stderr before doing work; results and artifacts go to stdout and the
//! output directory.

use std::path::Path;

use serde_json::json;

use tdprune_core::dataset::{
    generate_synthetic, load_csv, load_schema, normalize, save_csv, save_schema, split,
    SplitFractions, SyntheticConfig, TemporalDataset,
};
use tdprune_core::error::{Error, Result};
use tdprune_core::explain::{
    explain_all, global_heatmap, lime_explain, rank_features, CoalitionBudget, ExplainConfig,
    GlobalImportance,
};
use tdprune_core::model::{metrics, train, RegressorConfig, RegressorKind, TrainedModel};
use tdprune_core::pipeline::{
    emit_report, parse_report, run_pipeline, HeatmapDocument, PipelineConfig, PrunePlanDocument,
    ReportFormat, REPORT_SCHEMA_VERSION,
};
use tdprune_core::prune::{
    plan_feature_prune, plan_sample_prune, score_samples, FeaturePruneConfig, PrunePlan,
    SamplePruneConfig,
};
use tdprune_core::rng::derive_seed;

use crate::{Cli, Command};

pub fn run(cli: Cli, overrides: &[(String, String)]) -> Result<()> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Train(args) => train_cmd(args),
        Command::Explain(args) => explain(args),
        Command::Prune(args) => prune(args),
        Command::Pipeline(args) => pipeline(args, overrides),
        Command::Report(args) => report(args),
    }
}

fn print_effective(label: &str, value: &impl serde::Serialize) {
    match serde_json::to_string(value) {
        Ok(json) => eprintln!("effective config ({label}): {json}"),
        Err(e) => eprintln!("effective config ({label}): <unserializable: {e}>"),
    }
}

fn parse_kind(raw: &str) -> Result<RegressorKind> {
    match raw {
        "ridge" => Ok(RegressorKind::Ridge),
        "mlp" => Ok(RegressorKind::Mlp),
        "gridconv" => Ok(RegressorKind::Gridconv),
        other => Err(Error::config(format!("unknown model kind '{other}'"))),
    }
}

fn load_dataset_dir(dir: &Path) -> Result<TemporalDataset> {
    let schema = load_schema(&dir.join("schema.json"))?;
    load_csv(&dir.join("features.csv"), &dir.join("targets.csv"), &schema)
}

fn write_json_file(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn generate(args: crate::GenerateArgs) -> Result<()> {
    let config = SyntheticConfig {
        n_samples: args.samples,
        t_steps: args.t_steps,
        n_structured: args.structured,
        n_noise: args.noise,
        noise_sigma: args.sigma,
        seed: args.seed,
    };
    print_effective("generate", &config);
    let dataset = generate_synthetic(&config)?;
    std::fs::create_dir_all(&args.out)?;
    save_csv(
        &dataset,
        &args.out.join("features.csv"),
        &args.out.join("targets.csv"),
    )?;
    save_schema(&dataset.features, &args.out.join("schema.json"))?;
    println!(
        "wrote {} samples x {} features (T={}) to {}",
        dataset.n_samples(),
        dataset.features.len(),
        dataset.t_steps(),
        args.out.display()
    );
    Ok(())
}

fn train_cmd(args: crate::TrainArgs) -> Result<()> {
    let config = RegressorConfig {
        kind: parse_kind(&args.model)?,
        seed: args.seed,
        ..RegressorConfig::default()
    };
    print_effective("train", &json!({ "data": args.data, "model": config }));

    let dataset = load_dataset_dir(&args.data)?;
    let (normalized, _) = normalize(&dataset)?;
    let (train_ds, val_ds, test_ds) = split(
        &normalized,
        &SplitFractions::default(),
        derive_seed(args.seed, "split"),
    )?;
    let (model, train_report) = train(&train_ds, &val_ds, &config)?;
    let preds = model.predict_dataset(&test_ds)?;
    let test_metrics = metrics(&test_ds.targets(), &preds)?;

    let out = args.out.unwrap_or_else(|| args.data.clone());
    std::fs::create_dir_all(&out)?;
    model.save(&out.join("model.json"))?;
    write_json_file(
        &out.join("train_metrics.json"),
        &json!({
            "test_metrics": test_metrics,
            "train_report": train_report,
        }),
    )?;
    println!(
        "trained {} in {:.2}s ({} epochs, halted by {:?}); test mse {:.6}, r2 {:.4}, mae {:.6}",
        args.model,
        train_report.wall_time_seconds,
        train_report.epochs_run,
        train_report.halted_by,
        test_metrics.mse,
        test_metrics.r2,
        test_metrics.mae
    );
    println!("model written to {}", out.join("model.json").display());
    Ok(())
}

/// Long-format CSV of a global heatmap, ready for external plotting.
fn heatmap_csv(global: &GlobalImportance, dataset: &TemporalDataset) -> String {
    let mut out = String::from("feature,time_index,abs_mean,signed_mean\n");
    let temporal = dataset.temporal_specs();
    for (c, spec) in temporal.iter().enumerate() {
        for t in 0..global.abs_mean.rows() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                spec.name,
                t,
                global.abs_mean.get(t, c),
                global.signed_mean.get(t, c)
            ));
        }
    }
    for (i, spec) in dataset.static_specs().iter().enumerate() {
        out.push_str(&format!(
            "{},0,{},{}\n",
            spec.name, global.abs_mean_static[i], global.signed_mean_static[i]
        ));
    }
    out
}

fn explain(args: crate::ExplainArgs) -> Result<()> {
    let budget = if args.exhaustive {
        CoalitionBudget::Exhaustive
    } else {
        CoalitionBudget::Sampled(args.coalitions.unwrap_or(1024))
    };
    let config = ExplainConfig {
        n_coalitions: budget,
        background_size: args.background,
        seed: derive_seed(args.seed, "explain"),
        ..ExplainConfig::default()
    };
    print_effective(
        "explain",
        &json!({ "data": args.data, "model_file": args.model_file, "method": args.method, "explain": config }),
    );

    let dataset = load_dataset_dir(&args.data)?;
    let (normalized, _) = normalize(&dataset)?;
    let (train_ds, val_ds, _) = split(
        &normalized,
        &SplitFractions::default(),
        derive_seed(args.seed, "split"),
    )?;
    let model = TrainedModel::load(&args.model_file)?;
    let out = args.out.unwrap_or_else(|| args.data.clone());
    std::fs::create_dir_all(&out)?;

    match args.method.as_str() {
        "shap" => {
            let background: Vec<_> = train_ds
                .samples
                .iter()
                .take(args.background)
                .cloned()
                .collect();
            let maps = explain_all(&model, &val_ds.samples, &background, &config)?;
            let global = global_heatmap(&maps)?;
            write_json_file(&out.join("attributions.json"), &maps)?;
            write_json_file(
                &out.join("global_heatmap.json"),
                &HeatmapDocument {
                    schema_version: REPORT_SCHEMA_VERSION,
                    config: config.clone(),
                    global: global.clone(),
                },
            )?;
            std::fs::write(
                out.join("global_heatmap.csv"),
                heatmap_csv(&global, &dataset),
            )?;
            let ranking = rank_features(&global);
            let names: Vec<&str> = {
                let t = dataset.temporal_specs();
                let s = dataset.static_specs();
                t.into_iter().chain(s).map(|f| f.name.as_str()).collect()
            };
            println!(
                "explained {} validation samples; top features: {}",
                maps.len(),
                ranking
                    .iter()
                    .take(5)
                    .map(|(i, score)| format!("{} ({score:.4})", names[*i]))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!(
                "heatmap written to {}",
                out.join("global_heatmap.json").display()
            );
        }
        "lime" => {
            let mut docs = Vec::with_capacity(val_ds.n_samples());
            let mut fidelity_sum = 0.0;
            for sample in &val_ds.samples {
                let lime = lime_explain(&model, sample, &config)?;
                fidelity_sum += lime.fidelity_r2;
                docs.push(json!({
                    "sample_id": sample.id,
                    "fidelity_r2": lime.fidelity_r2,
                    "intercept": lime.intercept,
                    "degenerate": lime.degenerate,
                    "map": lime.map,
                }));
            }
            write_json_file(&out.join("lime_explanations.json"), &docs)?;
            println!(
                "explained {} validation samples with LIME; mean fidelity r2 {:.4}",
                docs.len(),
                fidelity_sum / docs.len().max(1) as f64
            );
        }
        other => return Err(Error::config(format!("unknown method '{other}'"))),
    }
    Ok(())
}

fn prune(args: crate::PruneArgs) -> Result<()> {
    let feature_config = match args.strategy.as_str() {
        "selective" => {
            if args.top_k.is_some() {
                return Err(Error::config("--top-k conflicts with --strategy selective"));
            }
            FeaturePruneConfig::Selective {
                tau: args.tau.unwrap_or(0.05),
            }
        }
        "max" => {
            if args.tau.is_some() {
                return Err(Error::config("--tau conflicts with --strategy max"));
            }
            FeaturePruneConfig::Max {
                top_k: args
                    .top_k
                    .ok_or_else(|| Error::config("--strategy max requires --top-k"))?,
            }
        }
        other => return Err(Error::config(format!("unknown strategy '{other}'"))),
    };
    print_effective(
        "prune",
        &json!({ "heatmap": args.heatmap, "feature": feature_config, "sample_q": args.sample_q }),
    );

    let doc: HeatmapDocument = serde_json::from_str(&std::fs::read_to_string(&args.heatmap)?)?;
    let feature_plan = plan_feature_prune(&doc.global, &feature_config)?;

    let plan = match args.sample_q {
        None => feature_plan,
        Some(q) => {
            let data = args
                .data
                .as_ref()
                .ok_or_else(|| Error::config("--sample-q requires --data for residual scoring"))?;
            let dataset = load_dataset_dir(data)?;
            let (normalized, _) = normalize(&dataset)?;
            let pruned = tdprune_core::prune::apply(&normalized, &feature_plan)?.dataset;
            let sample_config = SamplePruneConfig {
                quantile_q: q,
                folds: 5,
                seed: derive_seed(args.seed, "sample_prune"),
            };
            let model_config = RegressorConfig {
                kind: parse_kind(&args.model)?,
                seed: derive_seed(args.seed, "sample_score"),
                ..RegressorConfig::default()
            };
            let scores = score_samples(&pruned, &model_config, &sample_config)?;
            let sample_plan = plan_sample_prune(&scores, &sample_config)?;
            PrunePlan::combine(feature_plan, Some(sample_plan))
        }
    };

    let out = args
        .out
        .unwrap_or_else(|| args.heatmap.with_file_name("prune_plan.json"));
    write_json_file(
        &out,
        &PrunePlanDocument {
            plan: plan.clone(),
            size_retained_percent: None,
            size_removed_percent: None,
        },
    )?;
    println!(
        "plan removes {} features and {} samples; written to {}",
        plan.features_removed.len(),
        plan.samples_removed.len(),
        out.display()
    );
    Ok(())
}

/// Apply one dotted-path override onto the config JSON tree. The value
/// is parsed as JSON when possible, else taken as a string.
fn apply_override(tree: &mut serde_json::Value, path: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str(raw).unwrap_or(serde_json::Value::String(raw.to_string()));
    let mut node = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            Error::config(format!("config path '{path}' does not address an object"))
        })?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Ok(())
}

fn pipeline(args: crate::PipelineArgs, overrides: &[(String, String)]) -> Result<()> {
    if args.print_default_config {
        let config = PipelineConfig::default_synthetic("out");
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(());
    }
    let config_path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::config("pipeline requires --config (or --print-default-config)"))?;

    let mut tree: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(config_path)?)?;
    for (path, raw) in overrides {
        apply_override(&mut tree, path, raw)?;
    }
    let mut config: PipelineConfig = serde_json::from_value(tree)?;
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    print_effective("pipeline", &config);

    let report = run_pipeline(&config)?;
    print!("{}", emit_report(&report, ReportFormat::Markdown)?);
    println!("artifacts written to {}", config.output_dir.display());
    Ok(())
}

fn report(args: crate::ReportArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    print_effective(
        "report",
        &json!({ "in": args.input, "format": args.format }),
    );
    let report = parse_report(&std::fs::read_to_string(&args.input)?)?;
    let rendered = emit_report(&report, format)?;
    match args.out {
        Some(path) => {
            std::fs::write(&path, &rendered)?;
            println!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(())
}
