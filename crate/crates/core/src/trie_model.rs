//! Prefix-trie parametrization of string sorting cost.
//!
//! For a string set `S` the trie has one node per prefix of a member of `S`,
//! including the empty prefix. The thickness of a node is the number of
//! members it prefixes. If a comparison-based sort spends `f(m)` key
//! comparisons on average for `m` keys, then sorting `S` with symbol-by-symbol
//! comparisons costs `Σ_w f(thickness(w))` over all nodes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::probe::StringKey;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieNode {
    pub prefix: Vec<u8>,
    pub thickness: usize,
    /// Whether the prefix is itself a member of the set.
    pub terminal: bool,
    children: BTreeMap<u8, usize>,
}

impl TrieNode {
    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Nodes are stored in preorder; when non-empty, node 0 is the empty prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixTrie {
    nodes: Vec<TrieNode>,
}

impl PrefixTrie {
    pub fn nodes(&self) -> &[TrieNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Option<&TrieNode> {
        self.nodes.first()
    }

    pub fn get(&self, prefix: &[u8]) -> Option<&TrieNode> {
        let mut idx = 0;
        self.nodes.first()?;
        for b in prefix {
            idx = *self.nodes[idx].children.get(b)?;
        }
        Some(&self.nodes[idx])
    }

    pub fn children<'a>(&'a self, node: &'a TrieNode) -> impl Iterator<Item = &'a TrieNode> + 'a {
        node.children.values().map(move |&i| &self.nodes[i])
    }

    pub fn thicknesses(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.thickness).collect()
    }

    /// Counts of nodes by `(depth, thickness)`.
    pub fn histogram(&self) -> BTreeMap<(usize, usize), usize> {
        let mut h = BTreeMap::new();
        for n in &self.nodes {
            *h.entry((n.depth(), n.thickness)).or_insert(0) += 1;
        }
        h
    }

    /// `depth,thickness,nodes` rows of [`PrefixTrie::histogram`].
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("depth,thickness,nodes\n");
        for ((d, t), c) in self.histogram() {
            out.push_str(&format!("{d},{t},{c}\n"));
        }
        out
    }

    pub fn predict_cost(&self, f: &CostFunction) -> Result<f64> {
        self.nodes.iter().map(|n| f.eval(n.thickness)).sum()
    }

    /// `Σ Q(thickness)` in exact arithmetic.
    pub fn predict_q_exact(&self) -> BigRational {
        self.nodes
            .iter()
            .map(|n| quicksort_cost_exact(n.thickness))
            .fold(BigRational::from_integer(BigInt::from(0)), |a, b| a + b)
    }
}

/// Trie over all prefixes of `strings`. Duplicates are rejected.
pub fn build_trie(strings: &[StringKey]) -> Result<PrefixTrie> {
    let mut seen = HashSet::with_capacity(strings.len());
    for s in strings {
        if !seen.insert(s.as_bytes()) {
            return Err(Error::DuplicateString(
                String::from_utf8_lossy(s.as_bytes()).into_owned(),
            ));
        }
    }
    let mut sorted: Vec<&[u8]> = seen.into_iter().collect();
    sorted.sort_unstable();
    let mut trie = PrefixTrie::default();
    if sorted.is_empty() {
        return Ok(trie);
    }
    trie.nodes.push(TrieNode {
        prefix: Vec::new(),
        thickness: 0,
        terminal: false,
        children: BTreeMap::new(),
    });
    // Lexicographic insertion order makes node creation order a preorder.
    for s in sorted {
        let mut idx = 0;
        trie.nodes[0].thickness += 1;
        for (depth, &b) in s.iter().enumerate() {
            idx = match trie.nodes[idx].children.get(&b) {
                Some(&next) => next,
                None => {
                    let next = trie.nodes.len();
                    trie.nodes.push(TrieNode {
                        prefix: s[..=depth].to_vec(),
                        thickness: 0,
                        terminal: false,
                        children: BTreeMap::new(),
                    });
                    trie.nodes[idx].children.insert(b, next);
                    next
                }
            };
            trie.nodes[idx].thickness += 1;
        }
        trie.nodes[idx].terminal = true;
    }
    Ok(trie)
}

/// The sub-trie of nodes with thickness above one. Thickness never grows
/// with depth, so the kept set is prefix-closed.
pub fn reduced_trie(t: &PrefixTrie) -> PrefixTrie {
    let mut remap = vec![usize::MAX; t.nodes.len()];
    let mut nodes = Vec::new();
    for (i, n) in t.nodes.iter().enumerate() {
        if n.thickness > 1 {
            remap[i] = nodes.len();
            nodes.push(n.clone());
        }
    }
    for n in &mut nodes {
        n.children = n
            .children
            .iter()
            .filter(|&(_, &c)| remap[c] != usize::MAX)
            .map(|(&b, &c)| (b, remap[c]))
            .collect();
    }
    PrefixTrie { nodes }
}

/// Newline-separated byte strings. A trailing newline is allowed; a `\r`
/// before a newline is dropped. Empty lines and duplicates are rejected.
pub fn parse_corpus(bytes: &[u8]) -> Result<Vec<StringKey>> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in body.split(|&b| b == b'\n').enumerate() {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.is_empty() {
            return Err(Error::EmptyCorpusLine { line: i + 1 });
        }
        if !seen.insert(line) {
            return Err(Error::DuplicateString(
                String::from_utf8_lossy(line).into_owned(),
            ));
        }
        out.push(StringKey(line.to_vec()));
    }
    Ok(out)
}

/// Expected key comparisons per input size.
#[derive(Clone)]
pub enum CostFunction {
    /// First-pivot quicksort: `2(n+1)H_n - 4n`.
    Quicksort,
    /// `n log2 n`.
    NLogN,
    Zero,
    /// `table[n]`; sizes past the end are an error.
    Table(Vec<f64>),
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Quicksort => f.write_str("Quicksort"),
            CostFunction::NLogN => f.write_str("NLogN"),
            CostFunction::Zero => f.write_str("Zero"),
            CostFunction::Table(t) => f.debug_tuple("Table").field(&t.len()).finish(),
            CostFunction::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl CostFunction {
    pub fn eval(&self, n: usize) -> Result<f64> {
        Ok(match self {
            CostFunction::Quicksort => quicksort_cost(n),
            CostFunction::NLogN => {
                if n == 0 {
                    0.0
                } else {
                    n as f64 * (n as f64).log2()
                }
            }
            CostFunction::Zero => 0.0,
            CostFunction::Table(t) => *t
                .get(n)
                .ok_or_else(|| Error::OutOfRange(format!("cost table has no entry for n = {n}")))?,
            CostFunction::Custom(f) => f(n),
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "q" | "quicksort" => Ok(CostFunction::Quicksort),
            "r" | "nlogn" => Ok(CostFunction::NLogN),
            "zero" => Ok(CostFunction::Zero),
            _ => Err(Error::Unknown {
                kind: "cost function",
                name: name.to_string(),
            }),
        }
    }
}

pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// `Q(n) = 2(n+1)H_n - 4n`.
pub fn quicksort_cost(n: usize) -> f64 {
    2.0 * (n as f64 + 1.0) * harmonic(n) - 4.0 * n as f64
}

pub fn quicksort_cost_exact(n: usize) -> BigRational {
    let h = (1..=n).fold(BigRational::from_integer(BigInt::from(0)), |acc, i| {
        acc + BigRational::new(BigInt::from(1), BigInt::from(i))
    });
    h * BigInt::from(2 * (n + 1)) - BigRational::from_integer(BigInt::from(4 * n))
}
