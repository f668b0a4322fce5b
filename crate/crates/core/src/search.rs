//! Exhaustive search for maximal k-wise intersecting families and `f(n, k)`,
//! the smallest size such a family can have.
//!
//! A maximal family is upward closed, hence the up-closure of the antichain
//! of its minimal members. The search walks antichains in increasing mask
//! order, a depth-first tree in which every node is a distinct antichain and
//! children add a larger, incomparable generator. A family over `[n]`,
//! `n ≤ 7`, is a `u128` bitmap indexed by subset mask.
//!
//! For generators `G`, the up-closure is k-wise intersecting iff `G` is, and
//! a set can join it iff it meets every intersection of at most `k - 1`
//! generators. The node state keeps the bitmap of such sets (`open`), so
//! pruning, child generation and the maximality test are all word operations.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{balanced_linked_cubes, even_lift, generalized_linked, principal_star, Partition};
use crate::disjointness::weak_lower_bound;
use crate::error::{Error, Result};
use crate::family::{permute_bits, FamilyFile, GroundSet, SetFamily, SubsetMask};
use crate::intersecting::{is_maximal, saturate, KParameter};

/// Largest `n` the bitmap search supports.
pub const MAX_SEARCH_N: u32 = 7;
/// Largest `n` accepted by the exhaustive (non-pruned) enumeration.
pub const MAX_EXHAUSTIVE_N: u32 = 6;
/// Largest `n` for exact canonical forms.
pub const MAX_CANONICAL_N: u32 = 8;
/// Default cap on visited search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

fn require_canonical_range(n: u32) -> Result<()> {
    if n > MAX_CANONICAL_N {
        Err(Error::TooLarge { what: "canonical forms", n, max: MAX_CANONICAL_N })
    } else {
        Ok(())
    }
}

/// Lexicographically least member sequence over all relabelings of `[n]`.
pub fn canonical_form(f: &SetFamily) -> Result<SetFamily> {
    let n = f.n();
    require_canonical_range(n)?;
    let mut best: Option<Vec<SubsetMask>> = None;
    let mut image = Vec::with_capacity(f.len());
    for perm in (0..n).permutations(n as usize) {
        image.clear();
        image.extend(f.iter().map(|m| SubsetMask::from_bits(permute_bits(m.bits(), &perm))));
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image.clone());
        }
    }
    SetFamily::new(f.ground(), best.unwrap_or_default())
}

/// Number of relabelings of `[n]` that map `F` onto itself.
pub fn automorphism_count(f: &SetFamily) -> Result<u64> {
    let n = f.n();
    require_canonical_range(n)?;
    let mut count = 0;
    let mut image = Vec::with_capacity(f.len());
    for perm in (0..n).permutations(n as usize) {
        image.clear();
        image.extend(f.iter().map(|m| SubsetMask::from_bits(permute_bits(m.bits(), &perm))));
        image.sort_unstable();
        if image == f.members() {
            count += 1;
        }
    }
    Ok(count)
}

/// Orders bitmap families like their sorted member sequences.
fn sequence_cmp(a: u128, b: u128) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if a == b {
        return Equal;
    }
    let x = (a ^ b).trailing_zeros();
    // Both agree below x. The side holding x is smaller unless the other side has ended.
    if a >> x & 1 == 1 {
        if b >> x == 0 {
            Greater
        } else {
            Less
        }
    } else if a >> x == 0 {
        Less
    } else {
        Greater
    }
}

/// Mask images under every permutation of `[n]`, for bitmap families.
struct Relabelings {
    tables: Vec<Vec<u8>>,
}

impl Relabelings {
    fn new(n: u32) -> Self {
        let tables = (0..n)
            .permutations(n as usize)
            .map(|perm| (0..1u32 << n).map(|m| permute_bits(m, &perm) as u8).collect())
            .collect();
        Relabelings { tables }
    }

    fn apply(table: &[u8], family: u128) -> u128 {
        let mut out = 0u128;
        let mut rest = family;
        while rest != 0 {
            let m = rest.trailing_zeros();
            rest &= rest - 1;
            out |= 1u128 << table[m as usize];
        }
        out
    }

    fn canonical(&self, family: u128) -> u128 {
        self.tables
            .iter()
            .map(|t| Self::apply(t, family))
            .min_by(|&a, &b| sequence_cmp(a, b))
            .unwrap_or(family)
    }
}

fn bits_to_family(ground: GroundSet, bits: u128) -> SetFamily {
    let mut members = Vec::with_capacity(bits.count_ones() as usize);
    let mut rest = bits;
    while rest != 0 {
        members.push(SubsetMask::from_bits(rest.trailing_zeros()));
        rest &= rest - 1;
    }
    SetFamily::new(ground, members).expect("bitmap members are distinct and in range")
}

#[cfg(test)]
fn family_to_bits(f: &SetFamily) -> u128 {
    f.iter().fold(0u128, |acc, m| acc | 1u128 << m.bits())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Visit every k-wise intersecting antichain.
    Exhaustive,
    /// Skip subtrees whose family already exceeds the best construction size.
    BranchAndBound,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub symmetry: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Tree depth at which subtrees become independent parallel tasks.
    pub split_depth: u32,
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Exhaustive,
            symmetry: false,
            workers: None,
            split_depth: 2,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub wall_time_s: f64,
    pub symmetry: bool,
    pub mode: SearchMode,
}

/// Result of [`enumerate_maximal`].
#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Every maximal family (or one canonical representative per isomorphism
    /// class with symmetry on), ordered by member sequence.
    pub families: Vec<SetFamily>,
    /// With symmetry on, the number of labeled families in each class.
    pub class_sizes: Option<Vec<u64>>,
    /// Number of labeled maximal families visited.
    pub labeled_count: u64,
    /// False when the node budget ran out.
    pub complete: bool,
    pub stats: SearchStats,
}

impl IntoIterator for Enumeration {
    type Item = SetFamily;
    type IntoIter = std::vec::IntoIter<SetFamily>;
    fn into_iter(self) -> Self::IntoIter {
        self.families.into_iter()
    }
}

/// Per-mask lookup tables over `2^[n]`.
struct Tables {
    /// Masks meeting `y`.
    meets: Vec<u128>,
    /// Supersets of `y`.
    above: Vec<u128>,
    /// Subsets of `y`.
    below: Vec<u128>,
    nonempty: u128,
}

impl Tables {
    fn new(n: u32) -> Self {
        let size = 1u32 << n;
        let set = |pred: &dyn Fn(u32) -> bool| (0..size).filter(|&x| pred(x)).fold(0u128, |a, x| a | 1u128 << x);
        let meets = (0..size).map(|y| set(&|x| x & y != 0)).collect();
        let above = (0..size).map(|y| set(&|x| x & y == y)).collect();
        let below = (0..size).map(|y| set(&|x| x & y == x)).collect();
        let nonempty = set(&|x| x != 0);
        Tables { meets, above, below, nonempty }
    }
}

/// One node: an antichain of generators and what it determines.
#[derive(Clone, Copy)]
struct Node {
    last: u32,
    depth: u32,
    /// Up-closure of the generators.
    family: u128,
    /// Union of the down-sets of the generators.
    shadow: u128,
    /// Sets meeting every intersection of at most k - 1 generators.
    open: u128,
    /// `levels[j]`: intersections of at most `j + 1` generators, `j + 1 ≤ k - 2`.
    levels: [u128; 5],
}

struct Walker<'a> {
    k: u32,
    tables: &'a Tables,
    size_cap: u32,
    budget: u64,
    nodes: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

impl Walker<'_> {
    fn root(&self) -> Node {
        Node { last: 0, depth: 0, family: 0, shadow: 0, open: self.tables.nonempty, levels: [0; 5] }
    }

    fn children(&self, node: &Node) -> u128 {
        let later = if node.depth == 0 { u128::MAX } else { u128::MAX << node.last << 1 };
        node.open & !node.family & !node.shadow & later
    }

    fn child(&self, node: &Node, g: u32) -> Node {
        let t = self.tables;
        let mut next = *node;
        next.last = g;
        next.depth += 1;
        next.family |= t.above[g as usize];
        next.shadow |= t.below[g as usize];
        // New intersections of at most k - 1 generators: g, and g meet each stored level.
        let mut open = next.open & t.meets[g as usize];
        let stored = (self.k as usize).saturating_sub(2);
        if stored > 0 {
            let top = node.levels[stored - 1];
            let mut rest = top;
            while rest != 0 {
                let x = rest.trailing_zeros();
                rest &= rest - 1;
                open &= t.meets[(x & g) as usize];
            }
            for j in (1..stored).rev() {
                let mut add = 1u128 << g;
                let mut rest = node.levels[j - 1];
                while rest != 0 {
                    let x = rest.trailing_zeros();
                    rest &= rest - 1;
                    add |= 1u128 << (x & g);
                }
                next.levels[j] |= add;
            }
            next.levels[0] |= 1u128 << g;
        }
        next.open = open;
        next
    }

    fn is_maximal(node: &Node) -> bool {
        node.open & !node.family == 0
    }

    /// Counts the node; false once the budget is spent.
    fn tick(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn visit(&self, node: &Node, out: &mut Vec<u128>) {
        if !self.tick() {
            return;
        }
        if Self::is_maximal(node) {
            out.push(node.family);
            return;
        }
        let mut cand = self.children(node);
        while cand != 0 {
            let g = cand.trailing_zeros();
            cand &= cand - 1;
            let child = self.child(node, g);
            if child.family.count_ones() <= self.size_cap {
                self.visit(&child, out);
            }
        }
    }

    /// Visits nodes shallower than `depth` inline and returns the frontier at `depth`.
    fn split(&self, node: &Node, depth: u32, out: &mut Vec<u128>, frontier: &mut Vec<Node>) {
        if node.depth == depth {
            frontier.push(*node);
            return;
        }
        if !self.tick() {
            return;
        }
        if Self::is_maximal(node) {
            out.push(node.family);
            return;
        }
        let mut cand = self.children(node);
        while cand != 0 {
            let g = cand.trailing_zeros();
            cand &= cand - 1;
            let child = self.child(node, g);
            if child.family.count_ones() <= self.size_cap {
                self.split(&child, depth, out, frontier);
            }
        }
    }
}

/// Raw walk: all maximal families (as bitmaps, sorted) of size at most `size_cap`.
fn walk(n: u32, k: KParameter, size_cap: u32, config: &SearchConfig) -> Result<(Vec<u128>, u64, bool)> {
    if n > MAX_SEARCH_N {
        return Err(Error::TooLarge { what: "antichain search", n, max: MAX_SEARCH_N });
    }
    if k.get() > 7 {
        return Err(Error::KRange(k.get()));
    }
    let tables = Tables::new(n);
    let nodes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let walker = Walker { k: k.get(), tables: &tables, size_cap, budget: config.node_budget, nodes: &nodes, exhausted: &exhausted };
    let mut found = Vec::new();
    let mut frontier = Vec::new();
    walker.split(&walker.root(), config.split_depth, &mut found, &mut frontier);
    let tasks = crate::parallel::with_workers(config.workers, || {
        frontier
            .par_iter()
            .map(|node| {
                let mut out = Vec::new();
                walker.visit(node, &mut out);
                out
            })
            .collect::<Vec<_>>()
    })?;
    found.extend(tasks.into_iter().flatten());
    found.sort_unstable_by(|&a, &b| sequence_cmp(a, b));
    let visited = nodes.load(Ordering::Relaxed).min(config.node_budget);
    Ok((found, visited, !exhausted.load(Ordering::Relaxed)))
}

fn group_classes(n: u32, families: &[u128], workers: Option<usize>) -> Result<BTreeMap<CanonKey, u64>> {
    let relabel = Relabelings::new(n);
    let canon: Vec<u128> =
        crate::parallel::with_workers(workers, || families.par_iter().map(|&f| relabel.canonical(f)).collect())?;
    let mut classes = BTreeMap::new();
    for c in canon {
        *classes.entry(CanonKey(c)).or_insert(0) += 1;
    }
    Ok(classes)
}

/// Bitmap wrapper ordered by member sequence.
#[derive(Clone, Copy, PartialEq, Eq)]
struct CanonKey(u128);

impl Ord for CanonKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        sequence_cmp(self.0, other.0)
    }
}

impl PartialOrd for CanonKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Every maximal k-wise intersecting family over `[n]`, each exactly once, or
/// one canonical representative per isomorphism class when `config.symmetry`
/// is set. Branch-and-bound mode restricts to families no larger than the
/// best construction.
pub fn enumerate_maximal(n: u32, k: KParameter, config: &SearchConfig) -> Result<Enumeration> {
    let start = Instant::now();
    let ground = GroundSet::new(n)?;
    let cap = match config.mode {
        SearchMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::TooLarge { what: "exhaustive enumeration", n, max: MAX_EXHAUSTIVE_N });
            }
            u32::MAX
        }
        SearchMode::BranchAndBound => best_construction(ground, k)?.0.len() as u32,
    };
    let (found, nodes, complete) = walk(n, k, cap, config)?;
    let labeled_count = found.len() as u64;
    let (families, class_sizes) = if config.symmetry {
        let classes = group_classes(n, &found, config.workers)?;
        let fams = classes.keys().map(|c| bits_to_family(ground, c.0)).collect();
        (fams, Some(classes.into_values().collect()))
    } else {
        (found.into_iter().map(|b| bits_to_family(ground, b)).collect(), None)
    };
    Ok(Enumeration {
        families,
        class_sizes,
        labeled_count,
        complete,
        stats: SearchStats {
            nodes,
            wall_time_s: start.elapsed().as_secs_f64(),
            symmetry: config.symmetry,
            mode: config.mode,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Exact,
    BoundOnly,
}

/// Outcome of [`min_maximal_size`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: u32,
    pub k: u32,
    pub status: SearchStatus,
    /// `f(n, k)` when exact; otherwise the smallest maximal size seen, if any.
    pub f_value: Option<u64>,
    /// Maximal families visited: labeled, or isomorphism classes with symmetry on.
    /// In branch-and-bound mode only those no larger than `upper_bound` are visited.
    pub num_maximal: u64,
    /// Minimum-size families, one canonical form per isomorphism class.
    pub minimizers: Vec<FamilyFile>,
    /// Counting lower bound on `f(n, k)`.
    pub lower_bound: u64,
    /// Size of the best certified-maximal construction.
    pub upper_bound: u64,
    pub upper_bound_source: String,
    /// For `k = 3`, whether every minimizer is a balanced pair of linked cubes.
    pub minimizers_are_balanced_linked_cubes: Option<bool>,
    pub stats: SearchStats,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Smallest `m ≥ 1` with `2^n - m ≤ Σ_{j=1}^{k-1} C(m, j)`.
///
/// Every `A ∉ F` in a maximal family has at most `k - 1` members whose
/// intersection, after adding `A^c` to each, is exactly `A^c`; this is an
/// injection from `F^c` into nonempty subfamilies of size below `k`. For
/// `k = 3` the sharper pairing bound is [`weak_lower_bound`].
pub fn counting_lower_bound(n: u32, k: KParameter) -> u64 {
    let target = 1u128 << n;
    let reach = |m: u128| {
        let mut total = m;
        let mut binom = 1u128;
        for j in 1..k.get() as u128 {
            if m < j {
                break;
            }
            binom = binom * (m + 1 - j) / j;
            total += binom;
        }
        total
    };
    (1u64..).find(|&m| reach(u128::from(m)) >= target).expect("m = 2^n suffices")
}

fn lower_bound_for(n: u32, k: KParameter) -> u64 {
    if k.get() == 3 {
        weak_lower_bound(n)
    } else {
        counting_lower_bound(n, k)
    }
}

fn certify(f: SetFamily, k: KParameter, name: String) -> Result<(SetFamily, String)> {
    if is_maximal(&f, k) {
        Ok((f, name))
    } else {
        Ok((saturate(&f, k)?, format!("saturated {name}")))
    }
}

/// The smallest certified-maximal family among the explicit constructions
/// at `(n, k)`, with a description of where it came from.
pub fn best_construction(ground: GroundSet, k: KParameter) -> Result<(SetFamily, String)> {
    let n = ground.n();
    let mut best = (principal_star(ground, 1)?, "principal star".to_string());
    let mut consider = |cand: (SetFamily, String)| {
        if cand.0.len() <= best.0.len() {
            best = cand;
        }
    };
    match k.get() {
        2 => {}
        3 => {
            if n >= 2 {
                let f = balanced_linked_cubes(ground)?;
                consider(certify(f, k, "balanced linked cubes".into())?);
            }
        }
        kk if kk % 2 == 1 => {
            let blocks = kk.div_ceil(2);
            if n >= blocks {
                let f = generalized_linked(&Partition::balanced(ground, blocks)?)?;
                consider(certify(f, k, format!("generalized linked cubes, {blocks} blocks"))?);
            }
        }
        kk => {
            if n >= 2 {
                let below = KParameter::new(kk - 1)?;
                let (fprime, name) = best_construction(GroundSet::new(n - 1)?, below)?;
                let lifted = even_lift(&fprime, k)?;
                consider(certify(lifted, k, format!("even lift of {name} on [{}]", n - 1))?);
            }
        }
    }
    Ok(best)
}

/// Computes `f(n, k)` with all minimizers up to isomorphism.
pub fn min_maximal_size(n: u32, k: KParameter, config: &SearchConfig) -> Result<SearchReport> {
    let ground = GroundSet::new(n)?;
    let (incumbent, source) = best_construction(ground, k)?;
    let enumeration = enumerate_maximal(n, k, config)?;
    let start = Instant::now();
    let f_value = enumeration.families.iter().map(|f| f.len() as u64).min();
    let minimum: Vec<&SetFamily> = enumeration.families.iter().filter(|f| Some(f.len() as u64) == f_value).collect();
    let mut canon: Vec<SetFamily> = if config.symmetry {
        minimum.into_iter().cloned().collect()
    } else {
        minimum.into_iter().map(canonical_form).collect::<Result<_>>()?
    };
    canon.sort_by(|a, b| a.members().cmp(b.members()));
    canon.dedup();
    let linked_check = (k.get() == 3 && n >= 2 && !canon.is_empty())
        .then(|| -> Result<bool> {
            let target = canonical_form(&balanced_linked_cubes(ground)?)?;
            Ok(canon.iter().all(|c| *c == target))
        })
        .transpose()?;
    let num_maximal = if config.symmetry { enumeration.families.len() as u64 } else { enumeration.labeled_count };
    let mut stats = enumeration.stats;
    stats.wall_time_s += start.elapsed().as_secs_f64();
    Ok(SearchReport {
        n,
        k: k.get(),
        status: if enumeration.complete { SearchStatus::Exact } else { SearchStatus::BoundOnly },
        f_value,
        num_maximal,
        minimizers: canon.iter().map(SetFamily::to_file).collect(),
        lower_bound: lower_bound_for(n, k),
        upper_bound: incumbent.len() as u64,
        upper_bound_source: source,
        minimizers_are_balanced_linked_cubes: linked_check,
        stats,
    })
}

/// Bracket `lower ≤ f(n, k) ≤ upper` for `k ≥ 4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop5Window {
    pub n: u32,
    pub k: u32,
    pub lower: f64,
    pub upper: u64,
    pub construction: String,
}

pub fn prop5_window(n: u32, k: KParameter) -> Result<Prop5Window> {
    if k.get() < 4 {
        return Err(Error::Parameter(format!("window is defined for k ≥ 4, got {}", k.get())));
    }
    let ground = GroundSet::new(n)?;
    let (family, construction) = best_construction(ground, k)?;
    Ok(Prop5Window { n, k: k.get(), lower: counting_lower_bound(n, k) as f64, upper: family.len() as u64, construction })
}

/// Appends `(n, k, f, #minimizers, mode, status, runtime)` to a CSV ledger,
/// writing the header when the file is new.
pub fn append_ledger_row(path: impl AsRef<Path>, report: &SearchReport) -> Result<()> {
    let path = path.as_ref();
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(["n", "k", "f", "minimizers", "mode", "symmetry", "status", "runtime_s"])?;
    }
    let mode = match report.stats.mode {
        SearchMode::Exhaustive => "exhaustive",
        SearchMode::BranchAndBound => "branch-and-bound",
    };
    let status = match report.status {
        SearchStatus::Exact => "exact",
        SearchStatus::BoundOnly => "bound-only",
    };
    w.write_record([
        report.n.to_string(),
        report.k.to_string(),
        report.f_value.map(|f| f.to_string()).unwrap_or_default(),
        report.minimizers.len().to_string(),
        mode.to_string(),
        report.stats.symmetry.to_string(),
        status.to_string(),
        format!("{:.3}", report.stats.wall_time_s),
    ])?;
    w.flush()?;
    Ok(())
}

/// Bitmap route to the canonical form, for cross-checking [`canonical_form`].
#[cfg(test)]
fn canonical_bits_of(f: &SetFamily) -> u128 {
    Relabelings::new(f.n()).canonical(family_to_bits(f))
}
