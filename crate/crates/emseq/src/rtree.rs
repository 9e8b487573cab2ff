//! The set R_n of repeated words and its trie T_n.
//!
//! R_n holds every nonempty word occurring at least twice in the prefix
//! x_1^n. T_n is the trie over those words in which reading edge labels
//! from a vertex to the root spells the vertex's word, i.e. children
//! prepend a bit; the subtree below the vertex for `x` holds exactly the
//! words ending with `x`. Reported cardinalities exclude the empty word
//! and the root vertex.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::{BitSequence, Word};
use crate::error::EmError;
use crate::index::{lpf_table, WordClassKind};

/// First two occurrence starts and the total count of one repeated word.
#[derive(Clone, Copy, Debug)]
pub struct RnWordInfo {
    pub first_start: u64,
    pub second_start: u64,
    pub count: u64,
}

/// Nonempty words occurring at least twice in x_1^n.
pub struct RnSet {
    n: u64,
    words: HashMap<u64, RnWordInfo>,
    max_len: u32,
}

impl RnSet {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of words (empty word excluded).
    pub fn len(&self) -> u64 {
        self.words.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Length of the longest repeated word.
    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains_key(&w.key())
    }

    pub fn info(&self, w: &Word) -> Option<&RnWordInfo> {
        self.words.get(&w.key())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, &RnWordInfo)> {
        self.words.iter().map(|(k, v)| (Word::from_key(*k), v))
    }

    /// Word keys in ascending (length, bits) order, for deterministic walks.
    pub fn sorted_keys(&self) -> Vec<u64> {
        let mut keys: Vec<u64> = self.words.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    /// Number of member words ending with the given suffix.
    pub fn count_ending_with(&self, x: &Word) -> u64 {
        self.iter().filter(|(w, _)| w.ends_with(x)).count() as u64
    }

    pub fn count_last_bit(&self, bit: u8) -> u64 {
        self.iter().filter(|(w, _)| w.last_bit() == bit).count() as u64
    }

    /// Good/bad/boundary class from the stored first two occurrences.
    pub fn class_of(&self, seq: &BitSequence, info: &RnWordInfo) -> WordClassKind {
        if info.first_start == 1 {
            WordClassKind::Boundary
        } else if seq.get(info.first_start - 1) != seq.get(info.second_start - 1) {
            WordClassKind::Good
        } else {
            WordClassKind::Bad
        }
    }

    /// Count of bad words (first two occurrences preceded by the same bit).
    pub fn bad_word_count(&self, seq: &BitSequence) -> u64 {
        self.words
            .values()
            .filter(|info| self.class_of(seq, info) == WordClassKind::Bad)
            .count() as u64
    }
}

/// R_n together with the largest index x for which the b+(x) occurrence
/// still fits inside the prefix. With the empty word excluded the identity
/// is `|R_n| = x - 2`: both b+(1) and b+(2) are empty, the rest are the
/// distinct members of R_n.
pub struct RnBuild {
    pub set: RnSet,
    pub x_index: u64,
}

impl RnBuild {
    /// True when the b+ construction identity holds.
    pub fn identity_holds(&self) -> bool {
        self.set.len() == self.x_index.saturating_sub(2)
    }
}

/// Builds R_n by per-length counting passes. `seq` may be longer than `n`;
/// the extra bits sharpen the b+ lengths used for the x index.
pub fn build_rn(seq: &BitSequence, n: u64) -> Result<RnBuild, EmError> {
    if n < 1 || n > seq.len() {
        return Err(EmError::Range { k: 1, n, len: seq.len() });
    }
    let mut words = HashMap::new();
    let mut max_len = 0u32;
    let mut len = 1u32;
    while (len as u64) <= n {
        assert!(len <= 63, "repeated word longer than 63 bits");
        let mut seen: HashMap<u64, RnWordInfo> = HashMap::new();
        for start in 1..=(n - len as u64 + 1) {
            let key = (1u64 << len) | seq.window(start, len);
            seen.entry(key)
                .and_modify(|info| {
                    if info.count == 1 {
                        info.second_start = start;
                    }
                    info.count += 1;
                })
                .or_insert(RnWordInfo {
                    first_start: start,
                    second_start: 0,
                    count: 1,
                });
        }
        let mut any = false;
        for (key, info) in seen {
            if info.count >= 2 {
                any = true;
                max_len = len;
                words.insert(key, info);
            }
        }
        if !any {
            break;
        }
        len += 1;
    }
    let lpf = lpf_table(seq, n);
    let x_index = (1..=n)
        .rev()
        .find(|&i| i + lpf[i as usize] <= n + 1)
        .unwrap_or(0);
    Ok(RnBuild {
        set: RnSet { n, words, max_len },
        x_index,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TnNode {
    /// Word spelled vertex-to-root; `None` for the root.
    pub word: Option<Word>,
    pub parent: Option<u32>,
    /// Children on prepended bit 0 / 1.
    pub children: [Option<u32>; 2],
    pub depth: u32,
}

/// Trie over R_n; vertex ids are dense, root is id 0.
pub struct TnTree {
    nodes: Vec<TnNode>,
}

pub const ROOT: u32 = 0;

impl TnTree {
    pub fn nodes(&self) -> &[TnNode] {
        &self.nodes
    }

    /// Vertex count excluding the root; equals |R_n|.
    pub fn non_root_count(&self) -> u64 {
        self.nodes.len() as u64 - 1
    }

    pub fn vertex_of(&self, w: &Word) -> Option<u32> {
        let mut cur = ROOT;
        for d in 1..=w.len() {
            let bit = w.bit(w.len() - d + 1);
            cur = self.nodes[cur as usize].children[bit as usize]?;
        }
        Some(cur)
    }

    /// Both one-bit left-extensions present, i.e. both children exist.
    pub fn is_balanced(&self, v: u32) -> bool {
        let n = &self.nodes[v as usize];
        n.children[0].is_some() && n.children[1].is_some()
    }

    fn child_count(&self, v: u32) -> usize {
        self.nodes[v as usize]
            .children
            .iter()
            .filter(|c| c.is_some())
            .count()
    }

    /// Exactly one child; the root is never counted as unary.
    pub fn is_unary(&self, v: u32) -> bool {
        v != ROOT && self.child_count(v) == 1
    }

    /// Number of R_n words ending with `x`: the vertex for `x` plus all of
    /// its descendants.
    pub fn subtree_count(&self, x: &Word) -> u64 {
        let Some(top) = self.vertex_of(x) else {
            return 0;
        };
        let mut count = 0u64;
        let mut stack = vec![top];
        while let Some(v) = stack.pop() {
            count += 1;
            for c in self.nodes[v as usize].children.into_iter().flatten() {
                stack.push(c);
            }
        }
        count
    }

    /// Maximal chains of unary vertices. Each unary vertex contributes the
    /// edge to its single child, so a chain of k unary vertices has k edges.
    pub fn strands(&self) -> StrandStats {
        let mut strand_of: Vec<Option<u32>> = vec![None; self.nodes.len()];
        let mut strands = Vec::new();
        for v in 1..self.nodes.len() as u32 {
            if !self.is_unary(v) {
                continue;
            }
            let parent = self.nodes[v as usize].parent.unwrap();
            if self.is_unary(parent) {
                continue; // not a chain head
            }
            let id = strands.len() as u32;
            let mut edges = 0u32;
            let mut cur = v;
            loop {
                strand_of[cur as usize] = Some(id);
                edges += 1;
                let child = self.nodes[cur as usize]
                    .children
                    .into_iter()
                    .flatten()
                    .next()
                    .unwrap();
                if self.is_unary(child) {
                    cur = child;
                } else {
                    break;
                }
            }
            strands.push(Strand { top: v, edges });
        }
        let mut histogram = BTreeMap::new();
        let mut over_two = 0u64;
        let mut excess_edges = 0u64;
        for s in &strands {
            *histogram.entry(s.edges).or_insert(0u64) += 1;
            if s.edges > 2 {
                over_two += 1;
                excess_edges += u64::from(s.edges - 2);
            }
        }
        StrandStats {
            strands,
            strand_of,
            histogram,
            over_two,
            excess_edges,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Strand {
    /// Topmost vertex of the chain.
    pub top: u32,
    pub edges: u32,
}

pub struct StrandStats {
    pub strands: Vec<Strand>,
    /// Strand id per vertex; `None` for non-unary vertices.
    pub strand_of: Vec<Option<u32>>,
    /// Edge count -> number of strands.
    pub histogram: BTreeMap<u32, u64>,
    /// Strands with more than 2 edges.
    pub over_two: u64,
    /// Total edges beyond 2 per strand.
    pub excess_edges: u64,
}

/// Builds the trie; R_n is suffix-closed, so inserting each word's suffix
/// chain never leaves the set.
pub fn build_tn(rn: &RnSet) -> TnTree {
    let mut tree = TnTree {
        nodes: vec![TnNode {
            word: None,
            parent: None,
            children: [None, None],
            depth: 0,
        }],
    };
    for key in rn.sorted_keys() {
        let w = Word::from_key(key);
        let mut cur = ROOT;
        for d in 1..=w.len() {
            let bit = w.bit(w.len() - d + 1);
            cur = match tree.nodes[cur as usize].children[bit as usize] {
                Some(c) => c,
                None => {
                    let id = tree.nodes.len() as u32;
                    tree.nodes.push(TnNode {
                        word: Some(w.suffix(d)),
                        parent: Some(cur),
                        children: [None, None],
                        depth: d,
                    });
                    tree.nodes[cur as usize].children[bit as usize] = Some(id);
                    id
                }
            };
        }
    }
    tree
}

/// Aggregate tree statistics, serialized as the JSON analysis artifact.
#[derive(Debug, Serialize)]
pub struct TreeStats {
    pub n: u64,
    /// Vertex count of T_n excluding the root.
    pub non_root_vertices: u64,
    /// |zeta_n*|: vertices (root included) on root-paths of words whose four
    /// two-bit right-extensions all lie in R_n.
    pub gamma: u64,
    pub leaves: u64,
    pub unary: u64,
    /// j_xy = |T_n(xy)| - gamma per length-2 suffix.
    pub j: BTreeMap<String, i64>,
    /// max(0, j_xy - 7*gamma) per suffix.
    pub eq10_residual: BTreeMap<String, i64>,
    /// Strand edge count -> number of strands.
    pub strand_histogram: BTreeMap<String, u64>,
    pub strand_count: u64,
    pub strands_over_two_edges: u64,
    pub excess_strand_edges: u64,
    pub bad_word_count: u64,
    /// Words w with both right-extensions w0, w1 in R_n.
    pub tn_star_size: u64,
    pub zeta_realization: String,
}

/// Computes the zeta statistics plus strand and balance accounting.
pub fn zeta_stats(tree: &TnTree, rn: &RnSet, seq: &BitSequence) -> TreeStats {
    // zeta_n membership: all four two-bit right-extensions repeated.
    let four_ext = |append: &dyn Fn(u8, u8) -> Word| -> bool {
        (0..4u8).all(|i| rn.contains(&append(i & 1, i >> 1)))
    };
    let mut marked = vec![false; tree.nodes.len()];
    let mut any_zeta = false;
    // empty word candidate
    if (0..4u8).all(|i| rn.contains(&Word::new(u64::from(i), 2))) {
        any_zeta = true;
    }
    for key in rn.sorted_keys() {
        let z = Word::from_key(key);
        if z.len() + 2 > 63 {
            continue;
        }
        if !four_ext(&|b1, b2| z.append(b1).append(b2)) {
            continue;
        }
        any_zeta = true;
        let mut cur = tree.vertex_of(&z).expect("zeta word in trie");
        while !marked[cur as usize] {
            marked[cur as usize] = true;
            match tree.nodes[cur as usize].parent {
                Some(p) => cur = p,
                None => break,
            }
        }
    }
    if any_zeta {
        marked[ROOT as usize] = true;
    }
    let gamma = marked.iter().filter(|&&m| m).count() as u64;
    let mut leaves = 0u64;
    let mut unary = 0u64;
    for v in 0..tree.nodes.len() {
        if !marked[v] {
            continue;
        }
        let marked_children = tree.nodes[v]
            .children
            .into_iter()
            .flatten()
            .filter(|&c| marked[c as usize])
            .count();
        match marked_children {
            0 => leaves += 1,
            1 => unary += 1,
            _ => {}
        }
    }

    let mut j = BTreeMap::new();
    let mut eq10 = BTreeMap::new();
    for bits in 0..4u64 {
        let xy = Word::new(bits, 2);
        let count = tree.subtree_count(&xy) as i64;
        let jv = count - gamma as i64;
        j.insert(xy.to_string(), jv);
        eq10.insert(xy.to_string(), (jv - 7 * gamma as i64).max(0));
    }

    let strands = tree.strands();
    let strand_histogram = strands
        .histogram
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();

    let tn_star_size = rn
        .iter()
        .filter(|(w, _)| {
            w.len() < 63 && rn.contains(&w.append(0)) && rn.contains(&w.append(1))
        })
        .count() as u64;

    TreeStats {
        n: rn.n(),
        non_root_vertices: tree.non_root_count(),
        gamma,
        leaves,
        unary,
        j,
        eq10_residual: eq10,
        strand_histogram,
        strand_count: strands.strands.len() as u64,
        strands_over_two_edges: strands.over_two,
        excess_strand_edges: strands.excess_edges,
        bad_word_count: rn.bad_word_count(seq),
        tn_star_size,
        zeta_realization: "vertices on root-paths of words whose four two-bit right-extensions \
                           lie in R_n, root included; gamma counts this set"
            .to_string(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DotOptions {
    pub color_balance: bool,
    pub max_depth: Option<u32>,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            color_balance: true,
            max_depth: None,
        }
    }
}

/// Deterministic DOT rendering: vertices in word-lexicographic order,
/// children 0 before 1, balanced vertices green, unbalanced red, strand
/// edges dashed.
pub fn export_dot(tree: &TnTree, options: &DotOptions) -> String {
    let depth_ok =
        |d: u32| options.max_depth.is_none_or(|m| d <= m);
    let name = |v: u32| -> String {
        match tree.nodes[v as usize].word {
            Some(w) => w.to_string(),
            None => "lambda".to_string(),
        }
    };
    let mut order: Vec<u32> = (0..tree.nodes.len() as u32)
        .filter(|&v| depth_ok(tree.nodes[v as usize].depth))
        .collect();
    order.sort_by_key(|&v| name(v));
    // root sorts first regardless of its label
    order.retain(|&v| v != ROOT);
    order.insert(0, ROOT);

    let strands = tree.strands();
    let mut out = String::new();
    out.push_str("digraph tn {\n");
    out.push_str("  node [shape=circle, fontsize=10];\n");
    for &v in &order {
        let color = if v == ROOT {
            "lightgray"
        } else if tree.is_balanced(v) {
            "palegreen"
        } else {
            "lightcoral"
        };
        if options.color_balance {
            let _ = writeln!(
                out,
                "  \"{}\" [style=filled, fillcolor={}];",
                name(v),
                color
            );
        } else {
            let _ = writeln!(out, "  \"{}\";", name(v));
        }
    }
    for &v in &order {
        for bit in 0..2usize {
            if let Some(c) = tree.nodes[v as usize].children[bit] {
                if !depth_ok(tree.nodes[c as usize].depth) {
                    continue;
                }
                let dashed = strands.strand_of[v as usize].is_some();
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"{}];",
                    name(v),
                    name(c),
                    bit,
                    if dashed { ", style=dashed" } else { "" }
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
