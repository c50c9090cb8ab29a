//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works on plain nested vectors and enumerates all `T^N`
//! tag sequences, so it shares no code with the library.

#![allow(dead_code)]

use rand::Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn random_rows<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Rows {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect()
}

/// Every sequence in lexicographic order.
pub fn all_paths(len: usize, num_tags: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(num_tags.pow(len as u32));
    let mut cur = vec![0; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < num_tags {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Sequence score with `GO = T` and `EOS = T + 1` in the transition table.
pub fn path_score(em: &Rows, tr: &Rows, path: &[usize]) -> f64 {
    let t = em[0].len();
    let mut prev = t;
    let mut s = 0.0;
    for (i, &y) in path.iter().enumerate() {
        s += tr[prev][y];
        s += em[i][y];
        prev = y;
    }
    s + tr[prev][t + 1]
}

/// First maximizer in lexicographic order; `None` if every path is −∞.
pub fn brute_argmax(em: &Rows, tr: &Rows) -> Option<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for p in all_paths(em.len(), em[0].len()) {
        let s = path_score(em, tr, &p);
        if s == f64::NEG_INFINITY {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((p, s));
        }
    }
    best
}

fn log_sum(scores: &[f64]) -> f64 {
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
}

pub fn brute_log_z(em: &Rows, tr: &Rows) -> f64 {
    let scores: Vec<f64> = all_paths(em.len(), em[0].len())
        .iter()
        .map(|p| path_score(em, tr, p))
        .collect();
    log_sum(&scores)
}

pub fn brute_nll(em: &Rows, tr: &Rows, gold: &[usize]) -> f64 {
    brute_log_z(em, tr) - path_score(em, tr, gold)
}

/// `(unary[i][y], pairwise[i][f][y])` where `pairwise[i]` covers the
/// transition into token `i + 1`.
pub fn brute_marginals(em: &Rows, tr: &Rows) -> (Rows, Vec<Rows>) {
    let (n, t) = (em.len(), em[0].len());
    let log_z = brute_log_z(em, tr);
    let mut unary = vec![vec![0.0; t]; n];
    let mut pairwise = vec![vec![vec![0.0; t]; t]; n.saturating_sub(1)];
    for p in all_paths(n, t) {
        let w = (path_score(em, tr, &p) - log_z).exp();
        for (i, &y) in p.iter().enumerate() {
            unary[i][y] += w;
        }
        for (i, pair) in p.windows(2).enumerate() {
            pairwise[i][pair[0]][pair[1]] += w;
        }
    }
    (unary, pairwise)
}

fn split(label: &str) -> (&str, &str) {
    match label.split_once('-') {
        Some((p, ty)) => (p, ty),
        None => (label, ""),
    }
}

/// Transition legality written directly from the scheme definitions.
/// Boundary tags are spelled `<GO>` and `<EOS>`.
pub fn legal(scheme: &str, from: &str, to: &str) -> bool {
    // sentences are never empty, so GO never reaches EOS directly
    if to == "<GO>" || from == "<EOS>" || (from == "<GO>" && to == "<EOS>") {
        return false;
    }
    let (fp, ft) = split(from);
    let (tp, tt) = split(to);
    match scheme {
        "iobes" => match fp {
            "B" | "I" => matches!(tp, "I" | "E") && ft == tt,
            _ => matches!(tp, "O" | "B" | "S" | "<EOS>"),
        },
        "bio" => match tp {
            "I" => matches!(fp, "B" | "I") && ft == tt,
            _ => true,
        },
        "iob1" => match tp {
            "B" => matches!(fp, "B" | "I") && ft == tt,
            _ => true,
        },
        other => panic!("unknown scheme {other}"),
    }
}

/// True when the labels admit no legal sentence of some length, or some
/// label (or `<GO>`) can never be followed by a real label. Lengths are
/// checked by plain iteration up to `2^T + 1`, beyond which the sets of
/// reachable labels must have repeated.
pub fn has_dead_end(scheme: &str, labels: &[String]) -> bool {
    let t = labels.len();
    if t == 0 {
        return true;
    }
    let next =
        |from: &str| -> Vec<bool> { labels.iter().map(|to| legal(scheme, from, to)).collect() };
    if !next("<GO>").contains(&true) || labels.iter().any(|l| !next(l).contains(&true)) {
        return true;
    }
    let mut reachable = next("<GO>");
    for _ in 0..=(1usize << t.min(16)) {
        if !(0..t).any(|i| reachable[i] && legal(scheme, &labels[i], "<EOS>")) {
            return true;
        }
        let mut after = vec![false; t];
        for i in (0..t).filter(|&i| reachable[i]) {
            for (j, ok) in next(&labels[i]).into_iter().enumerate() {
                after[j] |= ok;
            }
        }
        reachable = after;
    }
    false
}
