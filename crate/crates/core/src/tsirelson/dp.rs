//! Interval dynamic program for `‖·‖_T`.
//!
//! Subproblems are runs `[a, b]` of consecutive support positions. A run is
//! either evaluated by its largest entry (a leaf) or split with parameter
//! `n`: the positions with index ≥ n + 1 are cut into at most `n` successive
//! groups, at least two of them, and the run's value is half the sum of the
//! group values. For a fixed first admissible position `i` the largest usable
//! budget is `n = idx[i] - 1`, so only those `n` are tried.

use super::cert::{CertNode, Part};
use super::Magnitude;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct DpStats {
    pub memo_entries: usize,
    pub expansions: u64,
}

#[derive(Debug, Clone, Copy)]
enum Choice {
    Leaf(usize),
    Split { start: usize, n: u64, first_end: usize, budget: usize },
}

pub(crate) struct Solved<S> {
    pub value: S,
    pub tree: Option<CertNode>,
    pub stats: DpStats,
}

struct Table<S> {
    k: usize,
    value: Vec<Option<(S, Choice)>>,
    // best cover of [a, b] by at most q successive groups, q = 1..=len;
    // the `Option` is the end of the first group when there are ≥ 2 groups
    atmost: Vec<Vec<(S, Option<usize>)>>,
}

impl<S: Magnitude> Table<S> {
    fn id(&self, a: usize, b: usize) -> usize {
        a * self.k + b
    }

    fn value(&self, a: usize, b: usize) -> &S {
        &self.value[self.id(a, b)].as_ref().expect("computed bottom-up").0
    }

    fn atmost(&self, a: usize, b: usize, q: usize) -> &(S, Option<usize>) {
        let row = &self.atmost[self.id(a, b)];
        &row[q.min(row.len()) - 1]
    }
}

pub(crate) fn solve<S: Magnitude>(indices: &[u64], mags: &[S], want_tree: bool) -> Solved<S> {
    let k = indices.len();
    debug_assert_eq!(k, mags.len());
    debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
    if k == 0 {
        return Solved {
            value: S::zero(),
            tree: want_tree.then_some(CertNode::Leaf(1)),
            stats: DpStats::default(),
        };
    }

    let mut t: Table<S> = Table {
        k,
        value: vec![None; k * k],
        atmost: vec![Vec::new(); k * k],
    };
    let mut expansions = 0u64;

    for len in 1..=k {
        for a in 0..=(k - len) {
            let b = a + len - 1;

            let mut leaf = a;
            for p in a + 1..=b {
                if mags[p] > mags[leaf] {
                    leaf = p;
                }
            }
            let mut best = mags[leaf].clone();
            let mut choice = Choice::Leaf(leaf);

            for i in a..b {
                let n = indices[i] - 1;
                if n < 2 {
                    continue;
                }
                let avail = b - i + 1;
                let budget = usize::try_from(n).map_or(avail, |n| n.min(avail));
                for j in i..b {
                    expansions += 1;
                    let cand = t.value(i, j).clone() + t.atmost(j + 1, b, budget - 1).0.clone();
                    let cand = cand.half();
                    // On a tie a split beats a leaf: its certificate says more.
                    if cand > best || (matches!(choice, Choice::Leaf(_)) && cand >= best) {
                        best = cand;
                        choice = Choice::Split { start: i, n, first_end: j, budget };
                    }
                }
            }
            let id = t.id(a, b);
            t.value[id] = Some((best, choice));

            let mut row: Vec<(S, Option<usize>)> = Vec::with_capacity(len);
            row.push((t.value(a, b).clone(), None));
            for q in 2..=len {
                let mut best = row[q - 2].clone();
                for j in a..b {
                    let cand = t.value(a, j).clone() + t.atmost(j + 1, b, q - 1).0.clone();
                    if cand > best.0 {
                        best = (cand, Some(j));
                    }
                }
                row.push(best);
            }
            t.atmost[id] = row;
        }
    }

    let memo_entries = t.value.iter().filter(|v| v.is_some()).count()
        + t.atmost.iter().map(Vec::len).sum::<usize>();
    let tree = want_tree.then(|| build(&t, indices, 0, k - 1));
    Solved {
        value: t.value(0, k - 1).clone(),
        tree,
        stats: DpStats { memo_entries, expansions },
    }
}

fn build<S: Magnitude>(t: &Table<S>, indices: &[u64], a: usize, b: usize) -> CertNode {
    let (_, choice) = t.value[t.id(a, b)].as_ref().expect("computed");
    match *choice {
        Choice::Leaf(p) => CertNode::Leaf(indices[p]),
        Choice::Split { start, n, first_end, budget } => {
            let mut groups = vec![(start, first_end)];
            let mut l = first_end + 1;
            let mut q = budget - 1;
            loop {
                match t.atmost(l, b, q).1 {
                    None => {
                        groups.push((l, b));
                        break;
                    }
                    Some(j) => {
                        groups.push((l, j));
                        l = j + 1;
                        q -= 1;
                    }
                }
            }
            let parts = groups
                .into_iter()
                .map(|(l, r)| Part {
                    lo: indices[l],
                    hi: indices[r],
                    child: build(t, indices, l, r),
                })
                .collect();
            CertNode::Split { n, parts }
        }
    }
}
