//! Disjoint pairs, the disjointness graph, the injection certificate for
//! maximal 3-wise intersecting families, and the entropy and distance
//! diagnostics built on top of them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily, SubsetMask};
use crate::intersecting::{require_maximal, KParameter};

/// Number of unordered pairs `{A, B}` of members with `A ∩ B = ∅`. The
/// degenerate pair `{∅}` counts once when `∅ ∈ F`.
pub fn dp(f: &SetFamily) -> u64 {
    let masks: Vec<u32> = f.iter().map(SubsetMask::bits).collect();
    let m = masks.len() as u64;
    let pairs = m * m.saturating_sub(1) / 2;
    let transform_cost = 16 * u64::from(f.n()) << f.n();
    if pairs > transform_cost {
        dp_by_transform(f.n(), &masks)
    } else {
        dp_pairwise(&masks)
    }
}

/// [`dp`] on a pool of `workers` threads.
pub fn dp_with_workers(f: &SetFamily, workers: usize) -> Result<u64> {
    crate::parallel::with_workers(Some(workers), || dp(f))
}

fn dp_pairwise(masks: &[u32]) -> u64 {
    let distinct: u64 = (0..masks.len())
        .into_par_iter()
        .map(|i| {
            let a = masks[i];
            masks[i + 1..].iter().filter(|&&b| a & b == 0).count() as u64
        })
        .sum();
    distinct + u64::from(masks.first() == Some(&0))
}

/// Counts through `g(X) = #{B ∈ F : B ⊆ X}`: the sum of `g(A^c)` over members
/// counts ordered disjoint pairs, with `(∅, ∅)` the only diagonal term.
fn dp_by_transform(n: u32, masks: &[u32]) -> u64 {
    let size = 1usize << n;
    let mut below = vec![0u32; size];
    for &m in masks {
        below[m as usize] = 1;
    }
    for i in 0..n {
        let bit = 1usize << i;
        let chunk = (2 * bit).max(1 << 14);
        below.par_chunks_mut(chunk).for_each(|block| {
            for base in (0..block.len()).step_by(2 * bit) {
                for j in base..base + bit {
                    block[j + bit] += block[j];
                }
            }
        });
    }
    let full = (size - 1) as u32;
    let ordered: u64 = masks.par_iter().map(|&a| u64::from(below[(a ^ full) as usize])).sum();
    let empty = u64::from(masks.first() == Some(&0));
    (ordered + empty) / 2
}

/// Simple graph on the members of `F`, with an edge between distinct disjoint members.
#[derive(Clone, Debug)]
pub struct DisjointnessGraph {
    family: SetFamily,
    words: usize,
    adjacency: Vec<u64>,
}

impl DisjointnessGraph {
    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn vertex_count(&self) -> usize {
        self.family.len()
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adjacency[i * self.words..(i + 1) * self.words]
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&j| self.are_adjacent(i, j))
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.vertex_count()).map(|i| self.degree(i) as u64).sum::<u64>() / 2
    }
}

pub fn build_disjointness_graph(f: &SetFamily) -> DisjointnessGraph {
    let m = f.len();
    let words = m.div_ceil(64).max(1);
    let masks = f.members();
    let mut adjacency = vec![0u64; m * words];
    adjacency.par_chunks_mut(words).enumerate().for_each(|(i, row)| {
        let a = masks[i];
        for (j, &b) in masks.iter().enumerate() {
            if i != j && a.is_disjoint(b) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
    });
    DisjointnessGraph { family: f.clone(), words, adjacency }
}

pub const MAX_CLIQUE: usize = 8;

/// Number of `r`-vertex cliques, `2 ≤ r ≤ 8`.
pub fn clique_count(g: &DisjointnessGraph, r: usize) -> Result<u64> {
    if !(2..=MAX_CLIQUE).contains(&r) {
        return Err(Error::CliqueSize(r));
    }
    let m = g.vertex_count();
    let total = (0..m)
        .into_par_iter()
        .map(|i| {
            // Neighbours of i with a larger index, so each clique is counted once.
            let mut cand: Vec<u64> = g.row(i).to_vec();
            for (w, word) in cand.iter_mut().enumerate() {
                let lo = w * 64;
                if lo + 63 <= i {
                    *word = 0;
                } else if lo <= i {
                    *word &= !((2u64 << (i - lo)) - 1);
                }
            }
            let mut scratch = vec![vec![0u64; g.words]; r];
            extend_cliques(g, &cand, r - 1, &mut scratch)
        })
        .sum();
    Ok(total)
}

fn extend_cliques(g: &DisjointnessGraph, cand: &[u64], remaining: usize, scratch: &mut [Vec<u64>]) -> u64 {
    if remaining == 1 {
        return cand.iter().map(|w| u64::from(w.count_ones())).sum();
    }
    let (next, rest) = scratch.split_first_mut().expect("scratch has one buffer per level");
    let mut total = 0;
    for (w, &word) in cand.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let j = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            // Later candidates that are also neighbours of j.
            let row = g.row(j);
            let mut any = false;
            for (t, slot) in next.iter_mut().enumerate() {
                let later = if t < w {
                    0
                } else if t == w {
                    cand[t] & bits
                } else {
                    cand[t]
                };
                *slot = later & row[t];
                any |= *slot != 0;
            }
            if any {
                total += extend_cliques(g, next, remaining - 1, rest);
            }
        }
    }
    total
}

/// One entry `A ↦ {P, Q}` of the injection certificate, `P ≤ Q` by mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertificateEntry {
    pub a: SubsetMask,
    pub p: SubsetMask,
    pub q: SubsetMask,
}

/// Maps every `A ∈ F^c` to a disjoint pair `{P, Q}` of members of `F̄` with `P ∪ Q = A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionCertificate {
    ground: GroundSet,
    entries: Vec<CertificateEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    #[serde(rename = "A")]
    a: Vec<u32>,
    #[serde(rename = "P")]
    p: Vec<u32>,
    #[serde(rename = "Q")]
    q: Vec<u32>,
}

impl InjectionCertificate {
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn entries(&self) -> &[CertificateEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks the certificate against `F`: its domain is exactly `F^c`, each
    /// image is a disjoint pair of `F̄` whose union is `A`, and images are distinct.
    pub fn validate(&self, f: &SetFamily) -> Result<()> {
        if f.ground() != self.ground {
            return Err(Error::GroundMismatch(f.n(), self.ground.n()));
        }
        let bad = |msg: String| Err(Error::Certificate(msg));
        let co = f.co_family();
        if co.len() != self.entries.len() {
            return bad(format!("{} entries for |F^c| = {}", self.entries.len(), co.len()));
        }
        let mut images = Vec::with_capacity(self.entries.len());
        for (e, a) in self.entries.iter().zip(co.iter()) {
            if e.a != a {
                return bad(format!("entry for {} where {} was expected", e.a, a));
            }
            for x in [e.p, e.q] {
                if !f.contains(x.complement(self.ground)) {
                    return bad(format!("{x} is not the complement of a member"));
                }
            }
            if !e.p.is_disjoint(e.q) {
                return bad(format!("{} and {} intersect", e.p, e.q));
            }
            if e.p | e.q != e.a {
                return bad(format!("{} ∪ {} ≠ {}", e.p, e.q, e.a));
            }
            if (e.p == e.q) != e.a.is_empty() {
                return bad(format!("degenerate pair for {}", e.a));
            }
            images.push((e.p, e.q));
        }
        images.sort_unstable();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return bad("two sets share an image pair".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let records: Vec<EntryRecord> = self
            .entries
            .iter()
            .map(|e| EntryRecord { a: e.a.elements(), p: e.p.elements(), q: e.q.elements() })
            .collect();
        serde_json::to_string(&records).expect("certificate serialization is infallible")
    }

    pub fn from_json(ground: GroundSet, text: &str) -> Result<Self> {
        let records: Vec<EntryRecord> = serde_json::from_str(text)?;
        let entries = records
            .iter()
            .map(|r| Ok(CertificateEntry { a: ground.subset(&r.a)?, p: ground.subset(&r.p)?, q: ground.subset(&r.q)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(InjectionCertificate { ground, entries })
    }
}

/// Builds the injection `F^c → disjoint pairs of F̄` for a maximal 3-wise
/// intersecting family.
///
/// For `A ∈ F^c`, take the first `(B₀, C₀)` in mask order with
/// `B₀ ∩ C₀ ⊆ A^c`, lift to `B' = B₀ ∪ A^c`, `C' = C₀ ∪ A^c` so that
/// `B' ∩ C' = A^c`, then grow `B'' = B' ∪ (A \ C')` so that `B'' ∪ C' = [n]`.
/// The image is `{B''^c, C'^c}`.
pub fn observation1_certificate(f: &SetFamily) -> Result<InjectionCertificate> {
    require_maximal(f, KParameter::new(3)?)?;
    let ground = f.ground();
    let full = ground.full();
    let members = f.to_bitmap();
    let co: Vec<SubsetMask> = f.co_family().iter().collect();
    let entries = co
        .par_iter()
        .map(|&a| {
            let ac = a.complement(ground);
            // F is upward closed, so some C₀ ⊆ X exists iff X ∈ F.
            let b0 = f
                .iter()
                .find(|&b| members.contains((b & a).complement(ground).bits()))
                .ok_or(Error::NotMaximal { k: 3, addable: a })?;
            let allowed = (b0 & a).complement(ground);
            let c0 = f.iter().find(|c| c.is_subset_of(allowed)).expect("allowed ∈ F has a member below it");
            let b1 = b0 | ac;
            let c1 = c0 | ac;
            let b2 = b1 | a.difference(c1);
            debug_assert_eq!(b2 & c1, ac);
            debug_assert_eq!(b2 | c1, full);
            let (p, q) = (b2.complement(ground), c1.complement(ground));
            Ok(CertificateEntry { a, p: p.min(q), q: p.max(q) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InjectionCertificate { ground, entries })
}

/// `2^n - m - 1 ≤ C(m, 2)`.
pub fn weak_bound_holds(n: u32, m: u64) -> bool {
    let lhs = (1u128 << n).saturating_sub(u128::from(m) + 1);
    let m = u128::from(m);
    lhs <= m * m.saturating_sub(1) / 2
}

/// Smallest `m` with `2^n - m - 1 ≤ C(m, 2)`; a lower bound on the size of
/// any maximal 3-wise intersecting family over `[n]`.
pub fn weak_lower_bound(n: u32) -> u64 {
    (1..).find(|&m| weak_bound_holds(n, m)).expect("m = 2^n satisfies the bound")
}

/// Evaluates the counting inequality on a maximal 3-wise intersecting family.
pub fn weak_bound_check(f: &SetFamily) -> Result<bool> {
    require_maximal(f, KParameter::new(3)?)?;
    Ok(weak_bound_holds(f.n(), f.len() as u64))
}

/// `h(p) = -p log₂ p - (1-p) log₂(1-p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `Σᵢ h(pᵢ)` where `pᵢ` is the fraction of members containing `i`.
/// `|F| ≤ 2^bound` for every nonempty `F`.
pub fn entropy_bound(f: &SetFamily) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let m = f.len() as f64;
    let mut counts = vec![0u64; f.n() as usize];
    for a in f.iter() {
        let mut rest = a.bits();
        while rest != 0 {
            counts[rest.trailing_zeros() as usize] += 1;
            rest &= rest - 1;
        }
    }
    Ok(counts.iter().map(|&c| binary_entropy(c as f64 / m)).sum())
}

/// Relative slack used when comparing `|F|` with `2^bound`.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

pub fn entropy_bound_holds(f: &SetFamily) -> Result<bool> {
    let bound = entropy_bound(f)?;
    Ok(f.len() as f64 <= bound.exp2() * (1.0 + ENTROPY_TOLERANCE))
}

fn require_even_half(ground: GroundSet) -> Result<()> {
    if ground.n() % 2 == 1 {
        Err(Error::Parameter(format!("n = {} must be even", ground.n())))
    } else {
        Ok(())
    }
}

/// Number of proper subsets of `Y` or of `Y^c` missing from `F̄`.
pub fn dichotomy_check(f: &SetFamily, y: SubsetMask) -> Result<u64> {
    let ground = f.ground();
    require_even_half(ground)?;
    ground.check(y)?;
    if y.len() != ground.n() / 2 {
        return Err(Error::Parameter(format!("|Y| = {} but n/2 = {}", y.len(), ground.n() / 2)));
    }
    require_maximal(f, KParameter::new(3)?)?;
    let yc = y.complement(ground);
    let missing = |x: SubsetMask| !f.contains(x.complement(ground));
    let from_y = y.submasks().filter(|&x| x != y && missing(x)).count() as u64;
    // ∅ is a proper subset of both; count it once.
    let from_yc = yc.submasks().filter(|&x| x != yc && !x.is_empty() && missing(x)).count() as u64;
    Ok(from_y + from_yc)
}

/// The dichotomy threshold `2^((n-2)/2)` for even `n`.
pub fn dichotomy_threshold(n: u32) -> u64 {
    1u64 << ((n - 2) / 2)
}

/// `|F Δ L(S)|` for the pair of linked cubes `L(S)`; equal to the distance
/// between `F̄` and the proper subsets of `S` and of `S^c`.
pub fn linked_distance(f: &SetFamily, s: SubsetMask) -> u64 {
    let ground = f.ground();
    let sc = s.complement(ground);
    let linked_len = (1u64 << (ground.n() - s.len())) + (1u64 << s.len()) - 3;
    let shared = f
        .iter()
        .filter(|&a| s.is_proper_subset_of(a) || sc.is_proper_subset_of(a))
        .count() as u64;
    f.len() as u64 + linked_len - 2 * shared
}

/// The balanced `S` (first in mask order) whose pair of linked cubes is
/// closest to `F`, and that distance.
pub fn stability_distance(f: &SetFamily) -> Result<(SubsetMask, u64)> {
    let ground = f.ground();
    require_even_half(ground)?;
    require_maximal(f, KParameter::new(3)?)?;
    let best = ground
        .subsets_of_size(ground.n() / 2)
        .map(|s| (linked_distance(f, s), s))
        .min()
        .expect("n ≥ 2 has a balanced subset");
    Ok((best.1, best.0))
}
