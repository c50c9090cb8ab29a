//! Seeded throughput measurements for the decoding and partition kernels.

use std::hint::black_box;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crf::{log_partition, CrfParams};
use crate::decode::{greedy_decode, ViterbiWorkspace};
use crate::error::{Error, Result};
use crate::lattice::EmissionLattice;
use crate::mask::{build_transition_mask, mask_to_scores, TransitionMatrix};
use crate::synth::{iobes_vocabulary, random_lattice, random_transitions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Greedy,
    Viterbi,
    ConstrainedViterbi,
    LogPartition,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Greedy,
        Method::Viterbi,
        Method::ConstrainedViterbi,
        Method::LogPartition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Viterbi => "viterbi",
            Method::ConstrainedViterbi => "constrained-viterbi",
            Method::LogPartition => "log-partition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub seed: u64,
    pub lengths: Vec<usize>,
    pub tag_counts: Vec<usize>,
    pub sentences: usize,
    pub repetitions: usize,
    pub methods: Vec<Method>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            lengths: vec![20, 40],
            tag_counts: vec![4, 8, 16, 32],
            sentences: 200,
            repetitions: 5,
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub len: usize,
    pub num_tags: usize,
    pub sentences: usize,
    pub repetitions: usize,
    /// Median wall-clock seconds for one pass over all sentences.
    pub median_seconds: f64,
    pub tokens_per_second: f64,
    /// `median_seconds` divided by the greedy median for the same shape.
    pub relative_to_greedy: Option<f64>,
    /// FNV-1a digest of the outputs; equal seeds give equal digests.
    pub digest: u64,
}

fn fnv(digest: u64, value: u64) -> u64 {
    value.to_le_bytes().iter().fold(digest, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

struct Shape {
    len: usize,
    num_tags: usize,
    lattices: Vec<EmissionLattice<f64>>,
    transitions: TransitionMatrix<f64>,
    constrained: TransitionMatrix<f64>,
    crf: CrfParams<f64>,
}

impl Shape {
    fn new(seed: u64, len: usize, num_tags: usize, sentences: usize) -> Result<Self> {
        let shape_seed = seed ^ ((len as u64) << 32) ^ num_tags as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(shape_seed);
        let lattices = (0..sentences)
            .map(|_| random_lattice(&mut rng, len, num_tags, 3.0))
            .collect();
        let transitions = random_transitions(&mut rng, num_tags, 1.0);
        let vocab = iobes_vocabulary(num_tags);
        let mask = build_transition_mask(vocab.scheme(), &vocab)?;
        Ok(Shape {
            len,
            num_tags,
            lattices,
            constrained: mask_to_scores(&mask, f64::NEG_INFINITY)?,
            crf: CrfParams::new(transitions.clone())?,
            transitions,
        })
    }

    /// One pass over every lattice; returns seconds and an output digest.
    fn run(&self, method: Method, workspace: &mut ViterbiWorkspace<f64>) -> Result<(f64, u64)> {
        let mut d = FNV_OFFSET;
        let start = Instant::now();
        for lattice in &self.lattices {
            match method {
                Method::Greedy => {
                    let p = greedy_decode(black_box(lattice));
                    d = p.tag_indices.iter().fold(d, |h, &t| fnv(h, t as u64));
                }
                Method::Viterbi => {
                    let p = workspace.decode(black_box(lattice), &self.transitions)?;
                    d = p.tag_indices.iter().fold(d, |h, &t| fnv(h, t as u64));
                }
                Method::ConstrainedViterbi => {
                    let p = workspace.decode(black_box(lattice), &self.constrained)?;
                    d = p.tag_indices.iter().fold(d, |h, &t| fnv(h, t as u64));
                }
                Method::LogPartition => {
                    let z = log_partition(black_box(lattice), &self.crf)?;
                    d = fnv(d, z.to_bits());
                }
            }
        }
        Ok((start.elapsed().as_secs_f64(), d))
    }
}

/// Times every method on every `(length, tag count)` combination.
///
/// Lattice contents depend only on the seed and the shape. Repetitions
/// are interleaved across shapes and methods so that slow drift in machine
/// load affects every measurement alike.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.sentences == 0
        || config.repetitions == 0
        || config
            .lengths
            .iter()
            .chain(&config.tag_counts)
            .any(|&d| d == 0)
    {
        return Err(Error::Config(
            "benchmark dimensions must be positive".into(),
        ));
    }
    let mut shapes = Vec::new();
    for &len in &config.lengths {
        for &num_tags in &config.tag_counts {
            shapes.push(Shape::new(config.seed, len, num_tags, config.sentences)?);
        }
    }
    let m = config.methods.len();
    let mut times = vec![Vec::with_capacity(config.repetitions); shapes.len() * m];
    let mut digests = vec![FNV_OFFSET; shapes.len() * m];
    let mut workspace = ViterbiWorkspace::new();
    for rep in 0..config.repetitions {
        for (si, shape) in shapes.iter().enumerate() {
            for (mi, &method) in config.methods.iter().enumerate() {
                let (secs, digest) = shape.run(method, &mut workspace)?;
                times[si * m + mi].push(secs);
                if rep == 0 {
                    digests[si * m + mi] = digest;
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(shapes.len() * m);
    let mut times = times.into_iter();
    for (si, shape) in shapes.iter().enumerate() {
        let mut greedy_median = None;
        for (mi, &method) in config.methods.iter().enumerate() {
            let median_seconds = median(times.next().expect("one series per cell"));
            if method == Method::Greedy {
                greedy_median = Some(median_seconds);
            }
            let tokens = (shape.len * config.sentences) as f64;
            rows.push(BenchRow {
                method,
                len: shape.len,
                num_tags: shape.num_tags,
                sentences: config.sentences,
                repetitions: config.repetitions,
                median_seconds,
                tokens_per_second: tokens / median_seconds.max(f64::MIN_POSITIVE),
                relative_to_greedy: greedy_median
                    .map(|g| median_seconds / g.max(f64::MIN_POSITIVE)),
                digest: digests[si * m + mi],
            });
        }
    }
    Ok(rows)
}
