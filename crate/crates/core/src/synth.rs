//! Seeded random lattices and transition matrices for benchmarks and
//! self-checks.

use rand::Rng;

use crate::lattice::EmissionLattice;
use crate::mask::TransitionMatrix;
use crate::scheme::Scheme;
use crate::vocab::TagVocabulary;

/// `len × num_tags` lattice with entries uniform in `[-scale, scale)`.
pub fn random_lattice<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    num_tags: usize,
    scale: f64,
) -> EmissionLattice<f64> {
    let scores = (0..len * num_tags)
        .map(|_| rng.gen_range(-scale..scale))
        .collect();
    EmissionLattice::from_flat(len, num_tags, scores).expect("dimensions are positive")
}

/// Finite transition matrix with entries uniform in `[-scale, scale)`.
pub fn random_transitions<R: Rng + ?Sized>(
    rng: &mut R,
    num_tags: usize,
    scale: f64,
) -> TransitionMatrix<f64> {
    let n = num_tags + 2;
    let scores = (0..n * n).map(|_| rng.gen_range(-scale..scale)).collect();
    TransitionMatrix::from_flat(num_tags, scores).expect("sizes match")
}

/// An IOBES vocabulary with exactly `num_tags` labels: `O`, then full
/// B/I/E/S groups for as many types as fit, then single-token `S-` types
/// for the remainder. Every prefix of this construction has a dead-end
/// free mask.
pub fn iobes_vocabulary(num_tags: usize) -> TagVocabulary {
    assert!(num_tags >= 1, "need at least one tag");
    let mut labels = vec!["O".to_string()];
    let mut k = 0;
    while labels.len() + 4 <= num_tags {
        for p in ["B", "I", "E", "S"] {
            labels.push(format!("{p}-T{k}"));
        }
        k += 1;
    }
    while labels.len() < num_tags {
        labels.push(format!("S-T{k}"));
        k += 1;
    }
    TagVocabulary::new(labels, Scheme::Iobes).expect("generated labels are valid")
}
