use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use condec::bench::{run_bench, BenchConfig, Method};
use condec::gradcheck::{run_grad_check, GradCheckConfig};
use condec::lattice_io::{read_lattices, read_transitions, LatticeRecord};
use condec::{
    build_transition_mask, crf_nll, entity_f1, greedy_decode, log_partition, mask_to_scores,
    read_conll, token_cross_entropy, validate_sequence, write_conll, Corpus, CrfParams,
    DynamicsOptions, ReadOptions, TagDynamicsReport, TagVocabulary, TransitionMatrix,
    ViterbiWorkspace,
};

use crate::args::*;

/// How a command that ran to completion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The command's own check failed: violations found, gradients off,
    /// or gold and prediction do not line up.
    Failed,
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(file)))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_options(scheme: condec::Scheme, columns: &ColumnArgs) -> ReadOptions {
    ReadOptions {
        scheme,
        token_column: columns.token_column,
        label_column: columns.label_column,
    }
}

fn read_corpus(path: &Path, options: &ReadOptions) -> Result<Corpus> {
    read_conll(open_input(path)?, options).with_context(|| format!("reading {}", path.display()))
}

fn json_line(out: &mut dyn Write, value: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn load_transitions(path: &Path, labels: &[String]) -> Result<TransitionMatrix<f64>> {
    let file = read_transitions(open_input(path)?)
        .with_context(|| format!("reading {}", path.display()))?;
    if file.labels != labels {
        bail!(
            "{}: transition labels {:?} differ from lattice labels {:?}",
            path.display(),
            file.labels,
            labels
        );
    }
    Ok(file.matrix)
}

pub fn decode(args: &DecodeArgs) -> Result<Status> {
    let records = read_lattices(open_input(&args.input)?)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mut out = open_output(args.out.output.as_deref())?;
    let Some(first) = records.first() else {
        out.flush()?;
        return Ok(Status::Success);
    };
    let labels = &first.labels;

    let transitions = match args.mode {
        DecodeMode::Greedy => None,
        DecodeMode::Viterbi => {
            let path = args
                .transitions
                .as_deref()
                .context("--transitions is required in viterbi mode")?;
            Some(load_transitions(path, labels)?)
        }
        DecodeMode::Constrained => {
            if args.transitions.is_some() {
                bail!("--transitions only applies to viterbi mode");
            }
            let vocab = TagVocabulary::new(labels.iter().cloned(), args.scheme)?;
            let mask = build_transition_mask(args.scheme, &vocab)?;
            Some(mask_to_scores(&mask, args.illegal_score)?)
        }
    };

    let decoded: Vec<Result<condec::Path>> = records
        .par_iter()
        .enumerate()
        .map_init(ViterbiWorkspace::new, |ws, (i, rec)| {
            let lattice = rec.lattice()?;
            let path = match &transitions {
                None => greedy_decode(&lattice),
                Some(tr) => ws
                    .decode(&lattice, tr)
                    .with_context(|| format!("record {}", i + 1))?,
            };
            Ok(path)
        })
        .collect();

    for (k, (rec, path)) in records.iter().zip(decoded).enumerate() {
        let path = path?;
        let predicted: Vec<&str> = path
            .tag_indices
            .iter()
            .map(|&t| rec.labels[t].as_str())
            .collect();
        if args.out.json {
            json_line(
                &mut out,
                &json!({ "record": k + 1, "labels": predicted, "path_score": path.path_score }),
            )?;
        } else {
            if k > 0 {
                writeln!(out)?;
            }
            for (tok, label) in rec.token_strings().iter().zip(&predicted) {
                writeln!(out, "{tok} {label}")?;
            }
        }
    }
    out.flush()?;
    log::info!("decoded {} records", records.len());
    Ok(Status::Success)
}

pub fn convert(args: &ConvertArgs) -> Result<Status> {
    let corpus = read_corpus(&args.input, &read_options(args.from, &args.columns))?;
    let converted = corpus.convert(args.to)?;
    write_conll(&converted, open_output(args.output.as_deref())?)?;
    Ok(Status::Success)
}

pub fn validate(args: &ValidateArgs) -> Result<Status> {
    let corpus = read_corpus(&args.input, &read_options(args.scheme, &args.columns))?;
    let mut out = open_output(args.out.output.as_deref())?;
    let mut total = 0;
    for (k, s) in corpus.sentences().iter().enumerate() {
        for v in validate_sequence(&s.labels, args.scheme)? {
            total += 1;
            if args.out.json {
                json_line(
                    &mut out,
                    &json!({ "sentence": k + 1, "position": v.position, "from": v.from, "to": v.to }),
                )?;
            } else {
                writeln!(out, "sentence {}: {v}", k + 1)?;
            }
        }
    }
    out.flush()?;
    eprintln!(
        "{total} violation(s) in {} sentence(s) under {}",
        corpus.len(),
        args.scheme
    );
    Ok(if total == 0 {
        Status::Success
    } else {
        Status::Failed
    })
}

pub fn eval(args: &EvalArgs) -> Result<Status> {
    let gold = read_corpus(&args.gold, &read_options(args.scheme, &args.columns))?;
    let pred_scheme = args.pred_scheme.unwrap_or(args.scheme);
    let pred = read_corpus(&args.pred, &read_options(pred_scheme, &args.columns))?;
    let report = match entity_f1(&gold, &pred) {
        Ok(r) => r,
        Err(e @ condec::Error::Shape(_)) => {
            eprintln!("error: {e}");
            return Ok(Status::Failed);
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = open_output(args.out.output.as_deref())?;
    if args.out.json {
        for (ty, s) in &report.per_type {
            json_line(&mut out, &json!({ "type": ty, "scores": s }))?;
        }
        json_line(
            &mut out,
            &json!({ "type": "overall", "tokens": report.tokens, "scores": report.overall }),
        )?;
    } else {
        out.write_all(report.to_table().as_bytes())?;
    }
    out.flush()?;
    Ok(Status::Success)
}

/// Files read for one `analyze` input: the file itself, or the training
/// split (or every split) of a dataset directory.
fn dataset_files(input: &Path, all_splits: bool) -> Result<Vec<PathBuf>> {
    if !input.is_dir() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("listing {}", input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            all_splits
                || p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.to_ascii_lowercase().starts_with("train"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!(
            "{} has no {} files",
            input.display(),
            if all_splits { "regular" } else { "train*" }
        );
    }
    Ok(files)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Status> {
    let options = read_options(args.scheme, &args.columns);
    let mut files = Vec::new();
    for input in &args.inputs {
        files.extend(dataset_files(input, args.all_splits)?);
    }
    let parts = files
        .iter()
        .map(|f| read_corpus(f, &options))
        .collect::<Result<Vec<_>>>()?;
    let corpus = Corpus::concat(parts)?;
    let dyn_options = DynamicsOptions {
        case_fold: args.case_fold,
        ambiguity: args.ambiguity.into(),
    };
    let report = condec::analyze(&corpus, args.target_scheme, &dyn_options)?;
    let name = args.name.clone().unwrap_or_else(|| {
        let p = &args.inputs[0];
        p.file_stem().or(p.file_name()).map_or_else(
            || p.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        )
    });
    let split = if args.inputs.iter().any(|p| p.is_dir()) {
        if args.all_splits {
            "all"
        } else {
            "train"
        }
    } else {
        "as given"
    };

    let mut out = open_output(args.out.output.as_deref())?;
    if args.out.json {
        let mut v = serde_json::to_value(&report)?;
        let obj = v.as_object_mut().expect("report serializes to an object");
        obj.insert("name".into(), json!(name));
        obj.insert("files".into(), json!(files));
        obj.insert("split".into(), json!(split));
        obj.insert(
            "docstart_lines_excluded".into(),
            json!(corpus.docstart_lines()),
        );
        json_line(&mut out, &v)?;
    } else {
        writeln!(out, "{}", TagDynamicsReport::table_header())?;
        writeln!(out, "{}", report.table_row(&name))?;
        writeln!(
            out,
            "# scheme {}, split {}, {}, ambiguity by {}, {} sentences, {} tokens, {} -DOCSTART- lines excluded",
            report.scheme,
            split,
            if report.case_fold { "case-folded" } else { "case-sensitive" },
            match report.ambiguity_mode {
                condec::AmbiguityMode::Occurrences => "occurrences",
                condec::AmbiguityMode::Forms => "forms",
            },
            report.sentences,
            report.tokens,
            corpus.docstart_lines()
        )?;
    }
    out.flush()?;
    Ok(Status::Success)
}

pub fn bench(args: &BenchArgs) -> Result<Status> {
    let methods: Vec<Method> = if args.methods.is_empty() {
        Method::ALL.to_vec()
    } else {
        args.methods.iter().map(|&m| m.into()).collect()
    };
    let config = BenchConfig {
        seed: args.seed,
        lengths: args.lengths.clone(),
        tag_counts: args.tags.clone(),
        sentences: args.sentences,
        repetitions: args.reps,
        methods,
    };
    let rows = run_bench(&config)?;
    let mut out = open_output(args.out.output.as_deref())?;
    if args.out.json {
        for r in &rows {
            json_line(&mut out, &serde_json::to_value(r)?)?;
        }
    } else {
        writeln!(
            out,
            "{:<20} {:>5} {:>5} {:>12} {:>14} {:>10} {:>18}",
            "method", "N", "T", "median_s", "tokens/s", "x greedy", "digest"
        )?;
        for r in &rows {
            writeln!(
                out,
                "{:<20} {:>5} {:>5} {:>12.6} {:>14.0} {:>10} {:>18x}",
                r.method.name(),
                r.len,
                r.num_tags,
                r.median_seconds,
                r.tokens_per_second,
                r.relative_to_greedy
                    .map_or("-".to_string(), |x| format!("{x:.2}")),
                r.digest
            )?;
        }
    }
    out.flush()?;
    Ok(Status::Success)
}

pub fn grad_check(args: &GradCheckArgs) -> Result<Status> {
    let config = GradCheckConfig {
        instances: args.instances,
        seed: args.seed,
        max_len: args.max_len,
        max_tags: args.max_tags,
        step: args.step,
        tolerance: args.tolerance,
        flip_sign: args.inject_sign_flip,
    };
    let checks = run_grad_check(&config)?;
    let mut out = open_output(args.out.output.as_deref())?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let worst = checks.iter().map(|c| c.max_rel_error).fold(0.0, f64::max);
    if args.out.json {
        for c in &checks {
            json_line(&mut out, &serde_json::to_value(c)?)?;
        }
    } else {
        writeln!(
            out,
            "{} instances, {failed} failed, max relative error {worst:.3e} (tolerance {:e})",
            checks.len(),
            config.tolerance
        )?;
    }
    out.flush()?;
    Ok(if failed == 0 {
        Status::Success
    } else {
        Status::Failed
    })
}

fn loss_record(rec: &LatticeRecord, params: &CrfParams<f64>) -> Result<Value> {
    let gold = rec.gold.as_ref().context("record has no gold labels")?;
    let idx = gold
        .iter()
        .map(|g| {
            rec.labels
                .iter()
                .position(|l| l == g)
                .with_context(|| format!("gold label {g:?} is not among the lattice labels"))
        })
        .collect::<Result<Vec<_>>>()?;
    let lattice = rec.lattice()?;
    Ok(json!({
        "len": rec.len(),
        "crf_nll": crf_nll(&lattice, params, &idx)?,
        "log_partition": log_partition(&lattice, params)?,
        "token_cross_entropy": token_cross_entropy(&lattice, &idx)?,
    }))
}

pub fn loss(args: &LossArgs) -> Result<Status> {
    let records = read_lattices(open_input(&args.input)?)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mut out = open_output(args.output.as_deref())?;
    let Some(first) = records.first() else {
        out.flush()?;
        return Ok(Status::Success);
    };
    let labels = &first.labels;
    let transitions = match &args.transitions {
        Some(p) => load_transitions(p, labels)?,
        None => TransitionMatrix::zeros(labels.len()),
    };
    let params = match args.mask {
        Some(scheme) => {
            let vocab = TagVocabulary::new(labels.iter().cloned(), scheme)?;
            CrfParams::constrained(
                transitions,
                build_transition_mask(scheme, &vocab)?,
                args.illegal_score,
            )?
        }
        None => CrfParams::new(transitions)?,
    };
    let rows: Vec<Result<Value>> = records
        .par_iter()
        .map(|r| loss_record(r, &params))
        .collect();
    for (k, row) in rows.into_iter().enumerate() {
        let mut v = row.with_context(|| format!("record {}", k + 1))?;
        v.as_object_mut()
            .expect("object")
            .insert("record".into(), json!(k + 1));
        json_line(&mut out, &v)?;
    }
    out.flush()?;
    Ok(Status::Success)
}
