//! k-wise intersecting families: the predicate, addable sets, maximality and
//! greedy saturation.
//!
//! Everything here is driven by the minimal elements of
//! `{∩G : G ⊆ F, 1 ≤ |G| ≤ j}`. Replacing a member by a minimal member below
//! it only shrinks an intersection, so these levels can be grown one member at
//! a time from the minimal members of `F`: level `j` is the minimal part of
//! level `j - 1` together with its pairwise meets with the minimal members.
//! `F` is k-wise intersecting iff level `k` avoids `∅`, and a set `A ∉ F` can
//! be added iff it meets every element of level `k - 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitmap::MaskBitmap;
use crate::error::{Error, Result};
use crate::family::{minimal_elements, GroundSet, SetFamily, SubsetMask};

pub const MAX_K: u32 = 7;

/// The intersection arity `k`, `2 ≤ k ≤ 7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct KParameter(u32);

impl KParameter {
    pub fn new(k: u32) -> Result<Self> {
        if (2..=MAX_K).contains(&k) {
            Ok(KParameter(k))
        } else {
            Err(Error::KRange(k))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for KParameter {
    type Error = Error;
    fn try_from(k: u32) -> Result<Self> {
        KParameter::new(k)
    }
}

impl From<KParameter> for u32 {
    fn from(k: KParameter) -> u32 {
        k.0
    }
}

/// Minimal elements of all intersections of at most `depth` distinct members,
/// given the minimal members. Collapses to `[0]` once `∅` appears.
pub(crate) fn minimal_intersections(n: u32, minimal_members: &[u32], depth: u32) -> Vec<u32> {
    let mut level = minimal_members.to_vec();
    if level.is_empty() || level[0] == 0 {
        return level;
    }
    for _ in 1..depth {
        let meets = level.iter().flat_map(|&x| minimal_members.iter().map(move |&b| x & b));
        let next = minimal_elements(n, level.iter().copied().chain(meets));
        if next == level {
            break;
        }
        level = next;
        if level[0] == 0 {
            break;
        }
    }
    level
}

fn raw_minimal_members(f: &SetFamily) -> Vec<u32> {
    f.minimal_members().into_iter().map(|m| m.bits()).collect()
}

pub fn is_k_wise_intersecting(f: &SetFamily, k: KParameter) -> bool {
    if f.is_empty() {
        return true;
    }
    if f.contains_empty_set() {
        return false;
    }
    let level = minimal_intersections(f.n(), &raw_minimal_members(f), k.0);
    level.first() != Some(&0)
}

fn require_intersecting(f: &SetFamily, k: KParameter) -> Result<()> {
    if is_k_wise_intersecting(f, k) {
        Ok(())
    } else {
        Err(Error::NotIntersecting { k: k.0 })
    }
}

fn blocker_masks(f: &SetFamily, k: KParameter) -> Vec<u32> {
    minimal_intersections(f.n(), &raw_minimal_members(f), k.0 - 1)
}

/// Inclusion-minimal intersections of at most `k - 1` members.
///
/// A set outside `F` can be added iff it meets every returned set.
pub fn minimal_blockers(f: &SetFamily, k: KParameter) -> Result<SetFamily> {
    require_intersecting(f, k)?;
    let masks = blocker_masks(f, k).into_iter().map(SubsetMask::from_bits).collect();
    Ok(SetFamily::from_sorted_unchecked(f.ground(), masks))
}

fn addable_bitmap(f: &SetFamily, blockers: &[u32]) -> MaskBitmap {
    let full = f.ground().full().bits();
    // Sets that miss some blocker are exactly the subsets of some blocker complement.
    let mut excluded = MaskBitmap::from_masks(f.n(), blockers.iter().map(|b| b ^ full));
    excluded.insert(0);
    excluded.close_downward();
    excluded.union_with(&f.to_bitmap());
    excluded.invert();
    excluded
}

/// All `A ∉ F` such that `F ∪ {A}` stays k-wise intersecting.
pub fn addable_sets(f: &SetFamily, k: KParameter) -> Result<SetFamily> {
    require_intersecting(f, k)?;
    let bm = addable_bitmap(f, &blocker_masks(f, k));
    Ok(SetFamily::from_bitmap(f.ground(), &bm))
}

pub fn is_maximal(f: &SetFamily, k: KParameter) -> bool {
    is_k_wise_intersecting(f, k) && addable_bitmap(f, &blocker_masks(f, k)).is_empty()
}

/// Succeeds iff `F` is maximal k-wise intersecting; otherwise names the
/// smallest addable set.
pub fn require_maximal(f: &SetFamily, k: KParameter) -> Result<()> {
    require_intersecting(f, k)?;
    let bm = addable_bitmap(f, &blocker_masks(f, k));
    let first = bm.iter().next();
    match first {
        None => Ok(()),
        Some(a) => Err(Error::NotMaximal { k: k.0, addable: SubsetMask::from_bits(a) }),
    }
}

/// Saturation order: larger sets first, ties by increasing mask.
pub fn saturation_order(ground: GroundSet) -> Vec<SubsetMask> {
    let mut order: Vec<u32> = (0..1u32 << ground.n()).collect();
    order.sort_unstable_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m));
    order.into_iter().map(SubsetMask::from_bits).collect()
}

/// Extends `F` to a maximal k-wise intersecting family by repeatedly adding
/// the first addable set in [`saturation_order`].
///
/// Addable sets of a superfamily are addable sets of the family, so one pass
/// over the order reaches the same result as restarting after every insertion.
pub fn saturate(f: &SetFamily, k: KParameter) -> Result<SetFamily> {
    require_intersecting(f, k)?;
    let n = f.n();
    let mut members = f.to_bitmap();
    let mut minimal = raw_minimal_members(f);
    let mut blockers = minimal_intersections(n, &minimal, k.0 - 1);
    for a in saturation_order(f.ground()) {
        let a = a.bits();
        if a == 0 || members.contains(a) || !blockers.iter().all(|&b| b & a != 0) {
            continue;
        }
        members.insert(a);
        minimal.push(a);
        minimal = minimal_elements(n, minimal);
        blockers = minimal_intersections(n, &minimal, k.0 - 1);
    }
    Ok(SetFamily::from_bitmap(f.ground(), &members))
}

/// A random k-wise intersecting family: `draws` uniformly random nonempty
/// masks, each kept only if the family stays k-wise intersecting.
pub fn random_intersecting_family<R: Rng + ?Sized>(
    ground: GroundSet,
    k: KParameter,
    draws: usize,
    rng: &mut R,
) -> SetFamily {
    let n = ground.n();
    let full = ground.full().bits();
    let mut minimal: Vec<u32> = Vec::new();
    let mut blockers: Vec<u32> = Vec::new();
    let mut chosen: Vec<SubsetMask> = Vec::new();
    for _ in 0..draws {
        let a = rng.gen_range(1..=full);
        if !blockers.iter().all(|&b| b & a != 0) {
            continue;
        }
        chosen.push(SubsetMask::from_bits(a));
        minimal.push(a);
        minimal = minimal_elements(n, minimal);
        blockers = minimal_intersections(n, &minimal, k.0 - 1);
    }
    SetFamily::collect(ground, chosen).expect("masks drawn inside the ground set")
}
