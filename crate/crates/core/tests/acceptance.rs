//! Acceptance suite. Runs every criterion in sequence, prints one status
//! line per criterion and exits nonzero if any criterion fails.
//!
//! Criteria 7 and 8 need real corpora. Point `CONDEC_DATA` at a directory
//! containing any of `conll2003/`, `wnut17/`, `ontonotes/` and `snips/`,
//! each holding CoNLL-format `train*` (and for WNUT-17 `test*`) files;
//! without it those criteria are skipped.

mod common;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_paths, brute_argmax, brute_log_z, brute_marginals, brute_nll, random_rows, Rows};
use condec::bench::{run_bench, BenchConfig, BenchRow, Method};
use condec::synth::iobes_vocabulary;
use condec::{
    analyze, build_transition_mask, constrained_decode, convert_scheme, crf_nll_gradients,
    encode_spans, entity_f1, extract_spans, forward_backward, greedy_decode, log_partition,
    read_conll_path, validate_sequence, viterbi, Corpus, CrfParams, DynamicsOptions,
    EmissionLattice, ReadOptions, Scheme, Span, TagVocabulary, TransitionMatrix, CRF_ILLEGAL_SCORE,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass(m) => write!(f, "PASS  {m}"),
            Outcome::Fail(m) => write!(f, "FAIL  {m}"),
            Outcome::Skip(m) => write!(f, "SKIP  {m}"),
        }
    }
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn lattice(rows: &Rows) -> EmissionLattice<f64> {
    EmissionLattice::from_rows(rows.clone()).unwrap()
}

fn matrix(rows: &Rows) -> TransitionMatrix<f64> {
    TransitionMatrix::from_rows(rows.clone()).unwrap()
}

fn viterbi_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_diff = 0.0f64;
    for k in 0..200 {
        let n = rng.gen_range(1..=6);
        let t = rng.gen_range(1..=5);
        let em = random_rows(&mut rng, n, t, 3.0);
        let tr = random_rows(&mut rng, t + 2, t + 2, 3.0);
        let got = viterbi(&lattice(&em), &matrix(&tr)).unwrap();
        let (path, score) = brute_argmax(&em, &tr).unwrap();
        if got.tag_indices != path {
            return Outcome::Fail(format!(
                "instance {k}: path {:?} but brute force gives {path:?}",
                got.tag_indices
            ));
        }
        max_diff = max_diff.max((got.path_score - score).abs());
    }
    check(
        max_diff <= 1e-12,
        format!("200 instances, N<=6, T<=5: paths identical, max score difference {max_diff:.1e} (limit 1e-12)"),
    )
}

fn constrained_legality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vocab = TagVocabulary::from_types(["PER", "LOC", "ORG", "MISC"], Scheme::Iobes).unwrap();
    let mask = build_transition_mask(Scheme::Iobes, &vocab).unwrap();
    let t = vocab.len();
    let total = 10_000;
    let (mut constrained_bad, mut greedy_bad) = (0, 0);
    for _ in 0..total {
        let n = rng.gen_range(1..=40);
        let l = lattice(&random_rows(&mut rng, n, t, 3.0));
        let labels = |p: &[usize]| vocab.decode(p).unwrap();
        let c = constrained_decode(&l, &mask).unwrap();
        if !validate_sequence(&labels(&c.tag_indices), Scheme::Iobes)
            .unwrap()
            .is_empty()
        {
            constrained_bad += 1;
        }
        let g = greedy_decode(&l);
        if !validate_sequence(&labels(&g.tag_indices), Scheme::Iobes)
            .unwrap()
            .is_empty()
        {
            greedy_bad += 1;
        }
    }
    let share = greedy_bad as f64 / total as f64;
    check(
        constrained_bad == 0 && share >= 0.30,
        format!(
            "{total} IOBES lattices, 4 types, N<=40: constrained outputs with violations {constrained_bad}, \
             greedy outputs with violations {:.1}% (need >= 30%)",
            100.0 * share
        ),
    )
}

fn partition_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut max_z, mut max_m) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let n = rng.gen_range(1..=5);
        let t = rng.gen_range(1..=4);
        let em = random_rows(&mut rng, n, t, 3.0);
        let raw = matrix(&random_rows(&mut rng, t + 2, t + 2, 3.0));
        // every other instance is a masked CRF over an IOBES vocabulary
        let params = if k % 2 == 0 {
            CrfParams::new(raw).unwrap()
        } else {
            let vocab = iobes_vocabulary(t);
            let mask = build_transition_mask(Scheme::Iobes, &vocab).unwrap();
            CrfParams::constrained(raw, mask, CRF_ILLEGAL_SCORE).unwrap()
        };
        let tr = params.transitions().rows();
        let l = lattice(&em);
        let expected = brute_log_z(&em, &tr);
        let got = log_partition(&l, &params).unwrap();
        // relative error of Z itself is |exp(got - expected) - 1|
        max_z = max_z.max((got - expected).exp_m1().abs());

        let m = forward_backward(&l, &params).unwrap();
        let (unary, pairwise) = brute_marginals(&em, &tr);
        for (i, row) in unary.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                max_m = max_m.max((m.unary(i, y) - p).abs());
            }
        }
        for (i, block) in pairwise.iter().enumerate() {
            for (f, row) in block.iter().enumerate() {
                for (y, &p) in row.iter().enumerate() {
                    max_m = max_m.max((m.pairwise(i, f, y) - p).abs());
                }
            }
        }
    }
    check(
        max_z <= 1e-9 && max_m <= 1e-9,
        format!(
            "200 instances, N<=5, T<=4: max relative error of Z {max_z:.1e}, max marginal error {max_m:.1e} (limit 1e-9)"
        ),
    )
}

fn gradient_check() -> Outcome {
    const STEP: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    // Entries whose true value is exactly zero (e.g. every entry when T = 1)
    // have no meaningful relative error; the floor holds them to 1e-13
    // absolute, far below any nonzero gradient seen here.
    const FLOOR: f64 = 1e-8;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(FLOOR);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let t = rng.gen_range(1..=4);
        let em = random_rows(&mut rng, n, t, 2.0);
        let tr = random_rows(&mut rng, t + 2, t + 2, 1.0);
        let gold: Vec<usize> = (0..n).map(|_| rng.gen_range(0..t)).collect();
        let grads =
            crf_nll_gradients(&lattice(&em), &CrfParams::new(matrix(&tr)).unwrap(), &gold).unwrap();

        for i in 0..n {
            for y in 0..t {
                let at = |d: f64| {
                    let mut e = em.clone();
                    e[i][y] += d;
                    brute_nll(&e, &tr, &gold)
                };
                let numeric = (at(STEP) - at(-STEP)) / (2.0 * STEP);
                worst = worst.max(rel(grads.d_emissions[i][y], numeric));
                compared += 1;
            }
        }
        for f in 0..t + 2 {
            for y in 0..t + 2 {
                let at = |d: f64| {
                    let mut m = tr.clone();
                    m[f][y] += d;
                    brute_nll(&em, &m, &gold)
                };
                let numeric = (at(STEP) - at(-STEP)) / (2.0 * STEP);
                worst = worst.max(rel(grads.d_transitions[f][y], numeric));
                compared += 1;
            }
        }
    }
    check(
        worst <= 1e-5,
        format!("100 instances, {compared} partial derivatives: max relative error {worst:.1e} (limit 1e-5)"),
    )
}

fn random_spans<R: Rng>(rng: &mut R) -> (Vec<Span>, usize) {
    let len = rng.gen_range(1..=15);
    let mut spans = Vec::new();
    let mut pos = 0;
    while pos < len {
        if rng.gen_bool(0.4) {
            pos += 1;
            continue;
        }
        let end = rng.gen_range(pos + 1..=len.min(pos + 4));
        let ty = ["A", "B", "C"][rng.gen_range(0..3)];
        spans.push(Span::new(ty, pos, end));
        pos = end;
    }
    (spans, len)
}

fn scheme_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut adjacent_same_type = 0;
    for k in 0..1000 {
        let (spans, len) = random_spans(&mut rng);
        if spans
            .windows(2)
            .any(|w| w[0].end == w[1].start && w[0].entity_type == w[1].entity_type)
        {
            adjacent_same_type += 1;
        }
        for from in Scheme::ALL {
            let labels = encode_spans(&spans, len, from).unwrap();
            if extract_spans(&labels, from).unwrap() != spans {
                return Outcome::Fail(format!(
                    "set {k}: {from} encoding {labels:?} does not decode to {spans:?}"
                ));
            }
            if !validate_sequence(&labels, from).unwrap().is_empty() {
                return Outcome::Fail(format!("set {k}: {from} encoding {labels:?} is illegal"));
            }
            for to in Scheme::ALL {
                let converted = convert_scheme(&labels, from, to).unwrap();
                if extract_spans(&converted, to).unwrap() != spans {
                    return Outcome::Fail(format!(
                        "set {k}: {from}->{to} changed the spans of {labels:?}"
                    ));
                }
            }
        }
    }
    Outcome::Pass(format!(
        "1000 span sets ({adjacent_same_type} with adjacent same-type spans): encode/extract identity and \
         span-preserving conversion for all 9 scheme pairs"
    ))
}

fn conlleval_data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data/conlleval")
        .join(file)
}

/// `(type, tp, fp, fn, precision, recall, FB1)` as printed by the
/// conlleval reference script on the bundled files.
type Expected = [(
    &'static str,
    usize,
    usize,
    usize,
    &'static str,
    &'static str,
    &'static str,
); 5];

const CONLLEVAL_BIO: Expected = [
    ("LOC", 1, 2, 1, "33.33", "50.00", "40.00"),
    ("MISC", 3, 2, 1, "60.00", "75.00", "66.67"),
    ("ORG", 2, 2, 1, "50.00", "66.67", "57.14"),
    ("PER", 0, 5, 4, "0.00", "0.00", "0.00"),
    ("overall", 6, 11, 7, "35.29", "46.15", "40.00"),
];

const CONLLEVAL_IOBES: Expected = [
    ("LOC", 2, 1, 0, "66.67", "100.00", "80.00"),
    ("MISC", 2, 1, 0, "66.67", "100.00", "80.00"),
    ("ORG", 2, 2, 2, "50.00", "50.00", "50.00"),
    ("PER", 0, 4, 2, "0.00", "0.00", "0.00"),
    ("overall", 6, 8, 4, "42.86", "60.00", "50.00"),
];

fn evaluator_oracle() -> Outcome {
    let mut mismatches = Vec::new();
    for (name, scheme, expected) in [
        ("bio", Scheme::Bio, CONLLEVAL_BIO),
        ("iobes", Scheme::Iobes, CONLLEVAL_IOBES),
    ] {
        let opts = ReadOptions::with_scheme(scheme);
        let gold = read_conll_path(conlleval_data(&format!("{name}_gold.conll")), &opts).unwrap();
        let pred = read_conll_path(conlleval_data(&format!("{name}_pred.conll")), &opts).unwrap();
        let report = entity_f1(&gold, &pred).unwrap();
        if report.per_type.len() != 4 {
            mismatches.push(format!("{name}: {} types", report.per_type.len()));
        }
        for (ty, tp, fp, fneg, p, r, f) in expected {
            let s = if ty == "overall" {
                Some(&report.overall)
            } else {
                report.per_type.get(ty)
            };
            let Some(s) = s else {
                mismatches.push(format!("{name}/{ty}: missing"));
                continue;
            };
            let got = (
                s.counts.true_positives,
                s.counts.false_positives,
                s.counts.false_negatives,
                format!("{:.2}", 100.0 * s.precision),
                format!("{:.2}", 100.0 * s.recall),
                format!("{:.2}", 100.0 * s.f1),
            );
            let want = (tp, fp, fneg, p.to_string(), r.to_string(), f.to_string());
            if got != want {
                mismatches.push(format!("{name}/{ty}: got {got:?}, conlleval {want:?}"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "BIO and IOBES micro-corpora: counts and 2-decimal percentages equal conlleval for 4 types + overall".into()
        } else {
            mismatches.join("; ")
        },
    )
}

fn data_root() -> Option<PathBuf> {
    std::env::var_os("CONDEC_DATA")
        .map(PathBuf::from)
        .filter(|p| p.is_dir())
}

/// First file in `dir` whose name starts with `split`.
fn split_file(dir: &Path, split: &str) -> Option<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.to_ascii_lowercase().starts_with(split))
        })
        .collect();
    files.sort();
    files.into_iter().next()
}

fn read_bio(path: &Path) -> condec::Result<Corpus> {
    read_conll_path(path, &ReadOptions::with_scheme(Scheme::Bio))
}

fn table7_ingestion() -> Outcome {
    let Some(root) = data_root() else {
        return Outcome::Skip(
            "CONDEC_DATA not set; no CoNLL-2003 or WNUT-17 files to count".into(),
        );
    };
    let targets = [
        ("conll2003", "train", 14_987, 204_567),
        ("wnut17", "train", 3_394, 62_730),
        ("wnut17", "test", 1_287, 23_394),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (dataset, split, sentences, tokens) in targets {
        let Some(path) = split_file(&root.join(dataset), split) else {
            continue;
        };
        let c = match read_bio(&path) {
            Ok(c) => c,
            Err(e) => {
                ok = false;
                notes.push(format!("{dataset}/{split}: {e}"));
                continue;
            }
        };
        let (s, t, d) = (c.len(), c.num_tokens(), c.docstart_lines());
        let verdict = if (s, t) == (sentences, tokens) {
            "exact"
        } else if (s + d, t + d) == (sentences, tokens) {
            "exact once each -DOCSTART- line counts as a one-token sentence"
        } else {
            ok = false;
            "MISMATCH"
        };
        notes.push(format!(
            "{dataset}/{split}: {s} sentences, {t} tokens, {d} -DOCSTART- (want {sentences}/{tokens}) {verdict}"
        ));
    }
    if notes.is_empty() {
        return Outcome::Skip(format!(
            "no conll2003/ or wnut17/ split files under {}",
            root.display()
        ));
    }
    check(ok, notes.join("; "))
}

struct Row {
    dataset: &'static str,
    scheme: Scheme,
    tag_types: usize,
    columns: [f64; 4],
}

const TABLE4: [Row; 5] = [
    Row {
        dataset: "wnut17",
        scheme: Scheme::Iobes,
        tag_types: 6,
        columns: [3.6, 74.3, 82.9, 97.0],
    },
    Row {
        dataset: "conll2003",
        scheme: Scheme::Iobes,
        tag_types: 4,
        columns: [8.8, 71.2, 58.3, 94.0],
    },
    Row {
        dataset: "conll2003",
        scheme: Scheme::Bio,
        tag_types: 4,
        columns: [7.4, 59.6, 68.5, 57.4],
    },
    Row {
        dataset: "ontonotes",
        scheme: Scheme::Iobes,
        tag_types: 18,
        columns: [14.9, 15.9, 16.2, 55.9],
    },
    Row {
        dataset: "snips",
        scheme: Scheme::Iobes,
        tag_types: 39,
        columns: [24.5, 26.7, 32.4, 91.1],
    },
];

fn table4_reproduction() -> Outcome {
    const TOLERANCE: f64 = 1.5;
    let Some(root) = data_root() else {
        return Outcome::Skip("CONDEC_DATA not set; no corpora to analyze".into());
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for row in &TABLE4 {
        let Some(path) = split_file(&root.join(row.dataset), "train") else {
            continue;
        };
        let report =
            read_bio(&path).and_then(|c| analyze(&c, row.scheme, &DynamicsOptions::default()));
        let r = match report {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                notes.push(format!("{} ({}): {e}", row.dataset, row.scheme));
                continue;
            }
        };
        let got = [
            r.ambiguity_pct,
            r.strictly_dominated_pct,
            r.easy_first_pct,
            r.easy_last_pct,
        ];
        let within = got
            .iter()
            .zip(row.columns)
            .all(|(g, w)| (g - w).abs() <= TOLERANCE)
            && r.tag_types == row.tag_types;
        ok &= within;
        notes.push(format!(
            "{} train ({}): {} types, {:.1}/{:.1}/{:.1}/{:.1} vs {}/{:?} {}",
            row.dataset,
            row.scheme,
            r.tag_types,
            got[0],
            got[1],
            got[2],
            got[3],
            row.tag_types,
            row.columns,
            if within { "ok" } else { "OUTSIDE +-1.5" }
        ));
    }
    if notes.is_empty() {
        return Outcome::Skip(format!(
            "no train files for wnut17/, conll2003/, ontonotes/ or snips/ under {}",
            root.display()
        ));
    }
    check(ok, notes.join("; "))
}

fn median_of(rows: &[BenchRow], method: Method, len: usize, num_tags: usize) -> f64 {
    rows.iter()
        .find(|r| r.method == method && r.len == len && r.num_tags == num_tags)
        .map(|r| r.median_seconds)
        .expect("benchmark row present")
}

fn asymptotics() -> Outcome {
    let quadratic = run_bench(&BenchConfig {
        seed: 9,
        lengths: vec![40],
        tag_counts: vec![32, 64],
        sentences: 100,
        repetitions: 7,
        methods: vec![Method::Viterbi],
    })
    .unwrap();
    let t_ratio = median_of(&quadratic, Method::Viterbi, 40, 64)
        / median_of(&quadratic, Method::Viterbi, 40, 32);

    let linear = run_bench(&BenchConfig {
        seed: 9,
        lengths: vec![1000, 2000],
        tag_counts: vec![16],
        sentences: 200,
        repetitions: 11,
        methods: vec![Method::Greedy],
    })
    .unwrap();
    let n_ratio =
        median_of(&linear, Method::Greedy, 2000, 16) / median_of(&linear, Method::Greedy, 1000, 16);

    check(
        (3.0..=5.0).contains(&t_ratio) && (1.5..=2.5).contains(&n_ratio),
        format!(
            "Viterbi time T=32->64 x{t_ratio:.2} (need 3-5); greedy time N=1000->2000 x{n_ratio:.2} (need 1.5-2.5)"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("viterbi oracle equivalence", viterbi_oracle),
        ("constrained legality", constrained_legality),
        ("partition-function oracle", partition_oracle),
        ("gradient check", gradient_check),
        ("scheme round-trips", scheme_round_trips),
        ("evaluator oracle", evaluator_oracle),
        ("dataset ingestion counts", table7_ingestion),
        ("tag dynamics reproduction", table4_reproduction),
        ("asymptotic behavior", asymptotics),
        ("trained-model F1 tables", || {
            Outcome::Skip(
                "needs the neural training stack; the machinery behind it is covered by 1-6".into(),
            )
        }),
    ];
    // keep the brute-force enumerator honest before relying on it
    assert_eq!(all_paths(2, 3).len(), 9);

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        if matches!(outcome, Outcome::Fail(_)) {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name:<28} {outcome} [{:.1}s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
