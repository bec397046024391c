//! ROUGE-1/2/L and METEOR between a hypothesis title and a reference title.
//!
//! All functions work on already-normalized token slices. Stemming for ROUGE
//! is applied by the caller through [`stem_all`].

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::textprep::{ngram_counts, stem};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }
}

pub(crate) fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

pub fn stem_all(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| stem(t)).collect()
}

/// Longest common subsequence length, two-row dynamic program.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_n(hyp: &[String], reference: &[String], n: usize) -> Result<PrfScore> {
    let h = ngram_counts(hyp, n)?;
    let r = ngram_counts(reference, n)?;
    let (h_total, r_total) = (h.total(), r.total());
    if h_total == 0 || r_total == 0 {
        return Ok(PrfScore::zero());
    }
    let overlap = h.overlap(&r) as f64;
    Ok(PrfScore::from_pr(
        overlap / h_total as f64,
        overlap / r_total as f64,
    ))
}

/// Sentence-level ROUGE-L from whole-sequence LCS.
pub fn rouge_l(hyp: &[String], reference: &[String]) -> PrfScore {
    if hyp.is_empty() || reference.is_empty() {
        return PrfScore::zero();
    }
    let lcs = lcs_length(hyp, reference) as f64;
    PrfScore::from_pr(lcs / hyp.len() as f64, lcs / reference.len() as f64)
}

/// Unigram alignment between hypothesis and reference positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// `(hyp_pos, ref_pos)` pairs sorted by hypothesis position.
    pub pairs: Vec<(usize, usize)>,
    pub chunks: usize,
    pub exact_matches: usize,
    pub stem_matches: usize,
    /// False only when the chunk search hit its node budget.
    pub optimal: bool,
}

impl Alignment {
    pub fn matches(&self) -> usize {
        self.pairs.len()
    }
}

/// Number of chunks: maximal runs of pairs adjacent in both sequences.
/// `pairs` must be sorted by hypothesis position.
pub fn count_chunks(pairs: &[(usize, usize)]) -> usize {
    let mut chunks = 0;
    let mut last: Option<(usize, usize)> = None;
    for &(h, r) in pairs {
        match last {
            Some((lh, lr)) if lh + 1 == h && lr + 1 == r => {}
            _ => chunks += 1,
        }
        last = Some((h, r));
    }
    chunks
}

/// Staged METEOR alignment: exact matches first, then Snowball-stem matches
/// among the leftovers. Each stage takes the maximum number of matches and,
/// among those, the fewest chunks over the alignment built so far; remaining
/// ties go to the lexicographically smallest `(hyp, ref)` pair sequence.
pub fn meteor_align(hyp: &[String], reference: &[String]) -> Alignment {
    let mut fixed: Vec<Option<usize>> = vec![None; hyp.len()];

    let (exact, exact_optimal) = stage(hyp, reference, &fixed, |t: &String| t.clone());
    let exact_matches = exact.iter().filter(|m| m.is_some()).count();
    fixed = exact;

    let (stemmed, stem_optimal) = stage(hyp, reference, &fixed, |t: &String| stem(t));
    let total = stemmed.iter().filter(|m| m.is_some()).count();

    let pairs: Vec<(usize, usize)> = stemmed
        .iter()
        .enumerate()
        .filter_map(|(h, r)| r.map(|r| (h, r)))
        .collect();
    Alignment {
        chunks: count_chunks(&pairs),
        pairs,
        exact_matches,
        stem_matches: total - exact_matches,
        optimal: exact_optimal && stem_optimal,
    }
}

/// One matching stage. `fixed` holds matches from earlier stages; returns the
/// combined assignment `hyp_pos -> ref_pos` and whether it is proven optimal.
fn stage<K, F>(hyp: &[String], reference: &[String], fixed: &[Option<usize>], key: F) -> (Vec<Option<usize>>, bool)
where
    K: Eq + Hash + Clone,
    F: Fn(&String) -> K,
{
    let mut ref_taken = vec![false; reference.len()];
    for r in fixed.iter().flatten() {
        ref_taken[*r] = true;
    }

    let mut class_ids: HashMap<K, usize> = HashMap::new();
    let mut ref_class = vec![None; reference.len()];
    for (r, tok) in reference.iter().enumerate() {
        if !ref_taken[r] {
            let next = class_ids.len();
            ref_class[r] = Some(*class_ids.entry(key(tok)).or_insert(next));
        }
    }
    let hyp_class: Vec<Option<usize>> = hyp
        .iter()
        .zip(fixed)
        .map(|(tok, f)| match f {
            None => class_ids.get(&key(tok)).copied(),
            Some(_) => None,
        })
        .collect();

    let classes = class_ids.len();
    let mut ref_count = vec![0usize; classes];
    for c in ref_class.iter().flatten() {
        ref_count[*c] += 1;
    }
    let mut hyp_left = vec![0usize; classes];
    for c in hyp_class.iter().flatten() {
        hyp_left[*c] += 1;
    }
    let need: Vec<usize> = (0..classes).map(|c| ref_count[c].min(hyp_left[c])).collect();

    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (r, c) in ref_class.iter().enumerate() {
        if let Some(c) = c {
            candidates[*c].push(r);
        }
    }
    let mut fixed_suffix = vec![0usize; hyp.len() + 1];
    for i in (0..hyp.len()).rev() {
        fixed_suffix[i] = fixed_suffix[i + 1] + usize::from(fixed[i].is_some());
    }

    let mut fixed_owner = vec![None; reference.len()];
    for (i, r) in fixed.iter().enumerate() {
        if let Some(r) = r {
            fixed_owner[*r] = Some(i);
        }
    }

    let mut search = ChunkSearch {
        fixed,
        hyp_class: &hyp_class,
        ref_class: &ref_class,
        fixed_owner,
        candidates: &candidates,
        fixed_suffix,
        need_total: need.iter().sum(),
        need,
        hyp_left,
        ref_used: ref_taken,
        current: fixed.to_vec(),
        phase: Phase::Optimize,
        best: None,
        best_chunks: usize::MAX,
        seen: HashMap::new(),
        nodes: 0,
        exhausted: false,
    };
    search.descend(0, None, 0);
    if search.exhausted {
        let best = search.best.unwrap_or_else(|| greedy_fill(fixed, &hyp_class, &candidates));
        return (best, false);
    }
    // Second pass in lexicographic order stops at the first optimal alignment.
    let optimum = search.best.take();
    search.phase = Phase::TieBreak;
    search.seen.clear();
    search.nodes = 0;
    search.descend(0, None, 0);
    match search.best {
        Some(best) => (best, true),
        None => (optimum.expect("optimize pass found an alignment"), false),
    }
}

/// Leftmost-first assignment, used only if the search budget runs out before
/// any complete alignment was found.
fn greedy_fill(fixed: &[Option<usize>], hyp_class: &[Option<usize>], candidates: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut next = vec![0usize; candidates.len()];
    fixed
        .iter()
        .zip(hyp_class)
        .map(|(f, c)| match (f, c) {
            (Some(r), _) => Some(*r),
            (None, Some(c)) => {
                let r = candidates[*c].get(next[*c]).copied();
                next[*c] += 1;
                r
            }
            (None, None) => None,
        })
        .collect()
}

/// Search nodes per stage before settling for the best alignment found.
/// Never reached by titles of natural text; repetitive inputs far beyond
/// title length can hit it.
const NODE_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Optimize,
    TieBreak,
}

type SearchState = (usize, Vec<u128>, Option<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum LinkKey {
    Class(usize),
    Fixed(usize),
}

/// Depth-first branch and bound over hypothesis positions in order.
///
/// The number of matches in a stage is fixed, so chunks = matches - links,
/// where a link joins `(i, r)` and `(i + 1, r + 1)`. The bound caps the links
/// still available ahead. The future depends only on the position, the set
/// of used reference tokens and the reference token that would extend the
/// current chunk, so a state revisited with no fewer chunks is dropped.
struct ChunkSearch<'a> {
    fixed: &'a [Option<usize>],
    hyp_class: &'a [Option<usize>],
    ref_class: &'a [Option<usize>],
    fixed_owner: Vec<Option<usize>>,
    candidates: &'a [Vec<usize>],
    fixed_suffix: Vec<usize>,
    need: Vec<usize>,
    need_total: usize,
    hyp_left: Vec<usize>,
    ref_used: Vec<bool>,
    current: Vec<Option<usize>>,
    phase: Phase,
    best: Option<Vec<Option<usize>>>,
    best_chunks: usize,
    seen: HashMap<SearchState, usize>,
    nodes: usize,
    exhausted: bool,
}

impl ChunkSearch<'_> {
    fn compatible(&self, i: usize, r: usize) -> bool {
        match self.fixed[i] {
            Some(fr) => fr == r,
            None => !self.ref_used[r] && self.hyp_class[i].is_some() && self.hyp_class[i] == self.ref_class[r],
        }
    }

    /// Class of reference token `r` as seen from position `pos`: free tokens
    /// keep their class, tokens reserved by a later fixed match are private
    /// to that match.
    fn ref_key(&self, r: usize, pos: usize) -> Option<LinkKey> {
        match self.fixed_owner[r] {
            Some(i) if i >= pos => Some(LinkKey::Fixed(r)),
            Some(_) => None,
            None if self.ref_used[r] => None,
            None => self.ref_class[r].map(LinkKey::Class),
        }
    }

    fn hyp_key(&self, i: usize) -> Option<LinkKey> {
        match self.fixed[i] {
            Some(r) => Some(LinkKey::Fixed(r)),
            None => self.hyp_class[i].map(LinkKey::Class),
        }
    }

    /// Chunks can only be saved by links, and every future link needs a
    /// hypothesis bigram and a free reference bigram of the same classes.
    fn lower_bound(&self, pos: usize, last: Option<(usize, usize)>, chunks: usize) -> usize {
        let remaining = self.need_total + self.fixed_suffix[pos];
        if remaining == 0 {
            return chunks;
        }
        let n_ref = self.ref_used.len();
        let mut links = 0;
        if let Some((lh, lr)) = last {
            if lh + 1 == pos && lr + 1 < n_ref && self.compatible(pos, lr + 1) {
                links += 1;
            }
        }
        // (hyp bigram, hyp count, free ref count); at most one entry per position.
        let mut bigrams: Vec<((LinkKey, LinkKey), usize, usize)> = Vec::new();
        for i in pos + 1..self.fixed.len() {
            if let (Some(a), Some(b)) = (self.hyp_key(i - 1), self.hyp_key(i)) {
                match bigrams.iter_mut().find(|e| e.0 == (a, b)) {
                    Some(e) => e.1 += 1,
                    None => bigrams.push(((a, b), 1, 0)),
                }
            }
        }
        if !bigrams.is_empty() {
            for r in 0..n_ref.saturating_sub(1) {
                if let (Some(a), Some(b)) = (self.ref_key(r, pos), self.ref_key(r + 1, pos)) {
                    if let Some(e) = bigrams.iter_mut().find(|e| e.0 == (a, b)) {
                        e.2 += 1;
                    }
                }
            }
            links += bigrams.iter().map(|&(_, h, r)| h.min(r)).sum::<usize>();
        }
        chunks + remaining - links.min(remaining)
    }

    fn pruned(&self, bound: usize) -> bool {
        match self.phase {
            Phase::Optimize => bound >= self.best_chunks,
            Phase::TieBreak => self.best.is_some() || bound > self.best_chunks,
        }
    }

    /// Records the visit; false when the state was already reached with no
    /// more chunks.
    fn first_visit(&mut self, pos: usize, last: Option<(usize, usize)>, chunks: usize) -> bool {
        let adjacent = last.filter(|&(lh, _)| lh + 1 == pos).map(|(_, lr)| lr);
        let mut mask = vec![0u128; self.ref_used.len().div_ceil(128)];
        for (r, _) in self.ref_used.iter().enumerate().filter(|(_, u)| **u) {
            mask[r / 128] |= 1 << (r % 128);
        }
        match self.seen.entry((pos, mask, adjacent)) {
            Entry::Occupied(e) if *e.get() <= chunks => false,
            Entry::Occupied(mut e) => {
                e.insert(chunks);
                true
            }
            Entry::Vacant(e) => {
                e.insert(chunks);
                true
            }
        }
    }

    fn descend(&mut self, pos: usize, last: Option<(usize, usize)>, chunks: usize) {
        if self.nodes >= NODE_BUDGET {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if self.pruned(self.lower_bound(pos, last, chunks)) || !self.first_visit(pos, last, chunks) {
            return;
        }
        if pos == self.fixed.len() {
            self.best_chunks = chunks;
            self.best = Some(self.current.clone());
            return;
        }
        let step = |r: usize| match last {
            Some((lh, lr)) if lh + 1 == pos && lr + 1 == r => chunks,
            _ => chunks + 1,
        };

        if let Some(r) = self.fixed[pos] {
            self.descend(pos + 1, Some((pos, r)), step(r));
            return;
        }
        let Some(class) = self.hyp_class[pos] else {
            self.descend(pos + 1, last, chunks);
            return;
        };

        self.hyp_left[class] -= 1;
        if self.need[class] > 0 {
            self.need[class] -= 1;
            self.need_total -= 1;
            let mut order: Vec<usize> = self.candidates[class].clone();
            if self.phase == Phase::Optimize {
                // Try the chunk-extending candidate first.
                if let Some((lh, lr)) = last {
                    if lh + 1 == pos {
                        if let Some(k) = order.iter().position(|&r| r == lr + 1) {
                            order[..=k].rotate_right(1);
                        }
                    }
                }
            }
            for r in order {
                if self.ref_used[r] {
                    continue;
                }
                self.ref_used[r] = true;
                self.current[pos] = Some(r);
                self.descend(pos + 1, Some((pos, r)), step(r));
                self.current[pos] = None;
                self.ref_used[r] = false;
            }
            self.need[class] += 1;
            self.need_total += 1;
        }
        if self.hyp_left[class] >= self.need[class] {
            self.descend(pos + 1, last, chunks);
        }
        self.hyp_left[class] += 1;
    }
}

/// METEOR parameters of the original metric definition.
const RECALL_WEIGHT: f64 = 9.0;
const PENALTY_WEIGHT: f64 = 0.5;
const PENALTY_EXPONENT: i32 = 3;

pub fn meteor_from_alignment(alignment: &Alignment, hyp_len: usize, ref_len: usize) -> f64 {
    let m = alignment.matches();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let precision = m / hyp_len as f64;
    let recall = m / ref_len as f64;
    let f_mean = (1.0 + RECALL_WEIGHT) * precision * recall / (recall + RECALL_WEIGHT * precision);
    let penalty = PENALTY_WEIGHT * (alignment.chunks as f64 / m).powi(PENALTY_EXPONENT);
    f_mean * (1.0 - penalty)
}

pub fn meteor_score(hyp: &[String], reference: &[String]) -> f64 {
    let alignment = meteor_align(hyp, reference);
    meteor_from_alignment(&alignment, hyp.len(), reference.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn toks(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// Exhaustive LCS: try every subsequence of `a` by bitmask.
    fn lcs_brute(a: &[String], b: &[String]) -> usize {
        let is_subseq = |sub: &[&String]| {
            let mut it = b.iter();
            sub.iter().all(|x| it.any(|y| y == *x))
        };
        (0u32..(1 << a.len()))
            .filter_map(|mask| {
                let sub: Vec<&String> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| &a[i]).collect();
                is_subseq(&sub).then_some(sub.len())
            })
            .max()
            .unwrap_or(0)
    }

    /// Every one-to-one exact-match alignment of maximum size, with its chunks.
    fn exact_alignments(hyp: &[String], reference: &[String]) -> Vec<Vec<(usize, usize)>> {
        fn go(
            pos: usize,
            hyp: &[String],
            reference: &[String],
            used: &mut Vec<bool>,
            cur: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            if pos == hyp.len() {
                out.push(cur.clone());
                return;
            }
            go(pos + 1, hyp, reference, used, cur, out);
            for r in 0..reference.len() {
                if !used[r] && reference[r] == hyp[pos] {
                    used[r] = true;
                    cur.push((pos, r));
                    go(pos + 1, hyp, reference, used, cur, out);
                    cur.pop();
                    used[r] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(0, hyp, reference, &mut vec![false; reference.len()], &mut Vec::new(), &mut out);
        let best = out.iter().map(Vec::len).max().unwrap_or(0);
        out.retain(|a| a.len() == best);
        out
    }

    #[test]
    fn lcs_examples() {
        let a = toks(&["a", "b", "c", "d"]);
        let b = toks(&["a", "c", "b", "d"]);
        assert_eq!(lcs_brute(&a, &b), 3);
        assert_eq!(lcs_length(&a, &b), 3);
        assert_eq!(lcs_length(&a, &a), 4);
        assert_eq!(lcs_length(&a, &toks(&["x", "y"])), 0);
        assert_eq!(lcs_length::<String>(&[], &a), 0);
    }

    #[test]
    fn rouge_examples() {
        let s = rouge_n(&toks(&["a", "b", "c"]), &toks(&["a", "c", "d"]), 1).unwrap();
        assert_relative_eq!(s.precision, 2.0 / 3.0);
        assert_relative_eq!(s.recall, 2.0 / 3.0);
        assert_relative_eq!(s.f1, 2.0 / 3.0);

        let five = toks(&["a", "b", "c", "d", "e"]);
        assert_eq!(rouge_n(&five, &five, 2).unwrap().f1, 1.0);
        assert_eq!(rouge_n(&toks(&["a"]), &five, 2).unwrap(), PrfScore::zero());
        assert!(rouge_n(&five, &five, 0).is_err());

        let l = rouge_l(&toks(&["a", "b", "c", "d"]), &toks(&["a", "c", "b", "d"]));
        assert_relative_eq!(l.precision, 0.75);
        assert_relative_eq!(l.recall, 0.75);
        assert_relative_eq!(l.f1, 0.75);
        assert_eq!(rouge_l(&five, &five).f1, 1.0);
        assert_eq!(rouge_l(&five, &toks(&["z"])).f1, 0.0);
        assert_eq!(rouge_l(&[], &five), PrfScore::zero());
    }

    #[test]
    fn meteor_alignment_examples() {
        let abc = toks(&["a", "b", "c"]);
        let id = meteor_align(&abc, &abc);
        assert_eq!((id.matches(), id.chunks), (3, 1));

        let cab = meteor_align(&toks(&["c", "a", "b"]), &abc);
        assert_eq!(cab.pairs, vec![(0, 2), (1, 0), (2, 1)]);
        assert_eq!(cab.chunks, 2);
        let oracle_min = exact_alignments(&toks(&["c", "a", "b"]), &abc)
            .iter()
            .map(|a| count_chunks(a))
            .min()
            .unwrap();
        assert_eq!(oracle_min, 2);

        let st = meteor_align(&toks(&["titles"]), &toks(&["title"]));
        assert_eq!((st.exact_matches, st.stem_matches, st.chunks), (0, 1, 1));
    }

    #[test]
    fn long_repetitive_input_keeps_maximum_matching() {
        let hyp: Vec<String> = (0..48).map(|i| if (i * 7 + i / 3) % 2 == 0 { "a" } else { "b" }.to_string()).collect();
        let reference: Vec<String> = (0..48).map(|i| if (i * 5 + i / 4) % 3 == 0 { "a" } else { "b" }.to_string()).collect();
        let count = |v: &[String], w: &str| v.iter().filter(|t| *t == w).count();
        let expected = count(&hyp, "a").min(count(&reference, "a")) + count(&hyp, "b").min(count(&reference, "b"));
        let alignment = meteor_align(&hyp, &reference);
        assert_eq!(alignment.matches(), expected);
        assert_eq!(alignment.chunks, count_chunks(&alignment.pairs));
    }

    #[test]
    fn meteor_prefers_contiguous_duplicates() {
        // The second "a" pairs with the "a" that continues the "a b" run.
        let hyp = toks(&["x", "a", "b"]);
        let reference = toks(&["a", "y", "a", "b"]);
        let al = meteor_align(&hyp, &reference);
        assert_eq!(al.pairs, vec![(1, 2), (2, 3)]);
        assert_eq!(al.chunks, 1);
    }

    #[test]
    fn meteor_tie_break_is_leftmost() {
        let al = meteor_align(&toks(&["a", "a"]), &toks(&["a"]));
        assert_eq!(al.pairs, vec![(0, 0)]);
    }

    #[test]
    fn meteor_score_examples() {
        let abc = toks(&["a", "b", "c"]);
        assert!((meteor_score(&abc, &abc) - (1.0 - 1.0 / 54.0)).abs() < 1e-12);
        assert_eq!(meteor_score(&abc, &toks(&["x", "y"])), 0.0);
        let one = toks(&["a"]);
        assert!((meteor_score(&one, &one) - 0.5).abs() < 1e-12);
        assert_eq!(meteor_score(&[], &abc), 0.0);
    }

    proptest! {
        #[test]
        fn lcs_matches_brute_force(
            a in proptest::collection::vec("[a-e]", 0..=10),
            b in proptest::collection::vec("[a-e]", 0..=10),
        ) {
            let l = lcs_length(&a, &b);
            prop_assert_eq!(l, lcs_brute(&a, &b));
            prop_assert!(l <= a.len().min(b.len()));
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            a2.push("z".into());
            b2.push("z".into());
            prop_assert_eq!(lcs_length(&a2, &b2), l + 1);
        }

        #[test]
        fn rouge_swap_exchanges_pr(
            a in proptest::collection::vec("[a-d]", 0..8),
            b in proptest::collection::vec("[a-d]", 0..8),
            n in 1usize..=2,
        ) {
            let ab = rouge_n(&a, &b, n).unwrap();
            let ba = rouge_n(&b, &a, n).unwrap();
            prop_assert_eq!(ab.precision, ba.recall);
            prop_assert_eq!(ab.recall, ba.precision);
            prop_assert!((ab.f1 - ba.f1).abs() < 1e-15);
        }

        #[test]
        fn meteor_exact_stage_is_chunk_optimal(
            hyp in proptest::collection::vec("[a-c]", 0..=6),
            reference in proptest::collection::vec("[a-c]", 0..=6),
        ) {
            let al = meteor_align(&hyp, &reference);
            let all = exact_alignments(&hyp, &reference);
            let best = all.iter().map(|a| count_chunks(a)).min().unwrap_or(0);
            prop_assert_eq!(al.matches(), all[0].len());
            prop_assert_eq!(al.chunks, best);
            let winner = all.iter().filter(|a| count_chunks(a) == best).min().unwrap();
            prop_assert_eq!(&al.pairs, winner);
        }

        #[test]
        fn meteor_bounds(
            hyp in proptest::collection::vec("(title|titles|model|models|a)", 0..10),
            reference in proptest::collection::vec("(title|titles|model|models|a)", 0..10),
        ) {
            let al = meteor_align(&hyp, &reference);
            if al.matches() > 0 {
                prop_assert!(al.chunks >= 1 && al.chunks <= al.matches());
            }
            let s = meteor_score(&hyp, &reference);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
