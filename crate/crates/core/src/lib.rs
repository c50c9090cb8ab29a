//! Constrained decoding for sequence labeling.
//!
//! The crate builds transition legality masks from span encoding schemes
//! (IOB1, BIO, IOBES), decodes emission lattices greedily, with Viterbi, or
//! with Viterbi restricted to legal transitions, and implements the full
//! linear-chain CRF likelihood (log-partition, marginals, gradients) next to
//! the token-level cross-entropy loss. Around that sit CoNLL corpus I/O,
//! scheme conversion, entity-level F1 and corpus tag-dynamics diagnostics.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choice.
//!
//! ```
//! use condec::{build_transition_mask, constrained_decode, Lattice, Scheme, TagVocabulary};
//!
//! let vocab = TagVocabulary::from_types(["LOC"], Scheme::Iobes).unwrap();
//! let mask = build_transition_mask(Scheme::Iobes, &vocab).unwrap();
//! // O, B-LOC, I-LOC, E-LOC, S-LOC; greedy would pick the illegal [O, E-LOC]
//! let lattice = Lattice::from_rows(vec![
//!     vec![2.0, 1.5, 0.0, 0.0, 0.0],
//!     vec![0.0, 0.0, 0.0, 3.0, 0.0],
//! ]).unwrap();
//! let best = constrained_decode(&lattice, &mask).unwrap();
//! assert_eq!(vocab.decode(&best.tag_indices).unwrap(), ["B-LOC", "E-LOC"]);
//! ```

pub mod bench;
pub mod corpus;
pub mod crf;
pub mod decode;
pub mod dynamics;
pub mod error;
pub mod eval;
pub mod gradcheck;
pub mod lattice;
pub mod lattice_io;
pub mod mask;
pub mod scalar;
pub mod scheme;
pub mod spans;
pub mod synth;
pub mod vocab;

pub use corpus::{read_conll, read_conll_path, write_conll, Corpus, ReadOptions, Sentence};
pub use crf::{
    crf_nll, crf_nll_gradients, forward_backward, log_partition, token_cross_entropy, CrfGradients,
    CrfParams, Marginals,
};
pub use decode::{
    constrained_decode, greedy_decode, score_path, viterbi, DecodedPath, ViterbiWorkspace,
};
pub use dynamics::{analyze, AmbiguityMode, DynamicsOptions, TagDynamicsReport};
pub use error::{Error, Result};
pub use eval::{entity_f1, EvalReport};
pub use lattice::EmissionLattice;
pub use mask::{
    build_transition_mask, mask_to_scores, TransitionMask, TransitionMatrix, CRF_ILLEGAL_SCORE,
};
pub use scalar::{log_sum_exp, Scalar};
pub use scheme::{is_legal_transition, parse_tag, Prefix, Scheme, Tag};
pub use spans::{convert_scheme, encode_spans, extract_spans, validate_sequence, Span, Violation};
pub use vocab::TagVocabulary;

pub type Lattice = EmissionLattice<f64>;
pub type Lattice32 = EmissionLattice<f32>;
pub type Transitions = TransitionMatrix<f64>;
pub type Transitions32 = TransitionMatrix<f32>;
pub type Path = DecodedPath<f64>;
pub type Path32 = DecodedPath<f32>;
pub type Crf = CrfParams<f64>;
pub type Crf32 = CrfParams<f32>;
