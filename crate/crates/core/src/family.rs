//! Subsets of `[n]` as bitmasks and families of such subsets.
//!
//! Element `i` of `[n] = {1, ..., n}` is bit `i - 1`. Families keep their
//! members strictly increasing by mask value, so every family-valued result
//! has one canonical layout and serializes byte-for-byte reproducibly.

use std::fmt;
use std::fs;
use std::ops::{BitAnd, BitOr, BitXor};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitmap::MaskBitmap;
use crate::error::{Error, Result};

/// Largest supported ground set size.
pub const MAX_N: u32 = 24;

/// The ground set `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSet {
    n: u32,
}

impl GroundSet {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_N).contains(&n) {
            Ok(GroundSet { n })
        } else {
            Err(Error::GroundSize(n))
        }
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n
    }

    /// The mask of `[n]` itself.
    #[inline]
    pub fn full(self) -> SubsetMask {
        SubsetMask((1u32 << self.n) - 1)
    }

    /// `2^n`, the number of subsets.
    #[inline]
    pub fn subset_count(self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn fits(self, mask: SubsetMask) -> bool {
        mask.0 >> self.n == 0
    }

    pub fn check(self, mask: SubsetMask) -> Result<SubsetMask> {
        if self.fits(mask) {
            Ok(mask)
        } else {
            Err(Error::MaskRange { mask: mask.0, n: self.n })
        }
    }

    /// Builds a mask from 1-based elements, rejecting repeats and out-of-range values.
    pub fn subset(self, elements: &[u32]) -> Result<SubsetMask> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > self.n {
                return Err(Error::Element { element: e, n: self.n });
            }
            let b = 1u32 << (e - 1);
            if bits & b != 0 {
                return Err(Error::RepeatedElement(e));
            }
            bits |= b;
        }
        Ok(SubsetMask(bits))
    }

    /// All masks of size `size`, increasing.
    pub fn subsets_of_size(self, size: u32) -> impl Iterator<Item = SubsetMask> {
        (0..1u32 << self.n).filter(move |m| m.count_ones() == size).map(SubsetMask)
    }
}

/// A subset of `[n]`; bit `i - 1` is set iff element `i` belongs to it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Number of elements.
    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= 32 && self.0 >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset_of(self, other: SubsetMask) -> bool {
        self != other && self.is_subset_of(other)
    }

    #[inline]
    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn complement(self, ground: GroundSet) -> SubsetMask {
        SubsetMask(self.0 ^ ground.full().0)
    }

    #[inline]
    pub fn difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    /// 1-based elements, increasing.
    pub fn elements(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len() as usize);
        let mut rest = self.0;
        while rest != 0 {
            out.push(rest.trailing_zeros() + 1);
            rest &= rest - 1;
        }
        out
    }

    /// Every submask, including the empty set and `self`, in increasing order.
    pub fn submasks(self) -> impl Iterator<Item = SubsetMask> {
        let top = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == top { None } else { Some(((cur | !top).wrapping_add(1)) & top) };
            Some(SubsetMask(cur))
        })
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: Self) -> Self {
        SubsetMask(self.0 & rhs.0)
    }
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: Self) -> Self {
        SubsetMask(self.0 | rhs.0)
    }
}

impl BitXor for SubsetMask {
    type Output = SubsetMask;
    fn bitxor(self, rhs: Self) -> Self {
        SubsetMask(self.0 ^ rhs.0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// A duplicate-free family of subsets of `[n]`, members sorted by mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FamilyFile", into = "FamilyFile")]
pub struct SetFamily {
    ground: GroundSet,
    members: Vec<SubsetMask>,
}

impl SetFamily {
    /// Builds a family, rejecting duplicates and masks outside `[n]`.
    pub fn new(ground: GroundSet, mut members: Vec<SubsetMask>) -> Result<Self> {
        for &m in &members {
            ground.check(m)?;
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet(w[0]));
        }
        Ok(SetFamily { ground, members })
    }

    /// Builds a family from arbitrary masks, silently merging duplicates.
    pub fn collect(ground: GroundSet, members: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        let mut members: Vec<SubsetMask> = members.into_iter().collect();
        for &m in &members {
            ground.check(m)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { ground, members })
    }

    pub(crate) fn from_sorted_unchecked(ground: GroundSet, members: Vec<SubsetMask>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|&m| ground.fits(m)));
        SetFamily { ground, members }
    }

    pub(crate) fn from_bitmap(ground: GroundSet, bm: &MaskBitmap) -> Self {
        SetFamily { ground, members: bm.iter().map(SubsetMask).collect() }
    }

    pub(crate) fn to_bitmap(&self) -> MaskBitmap {
        MaskBitmap::from_masks(self.ground.n, self.members.iter().map(|m| m.0))
    }

    pub fn empty(ground: GroundSet) -> Self {
        SetFamily { ground, members: Vec::new() }
    }

    /// All `2^n` subsets of `[n]`.
    pub fn power_set(ground: GroundSet) -> Self {
        SetFamily { ground, members: (0..1u32 << ground.n).map(SubsetMask).collect() }
    }

    /// Builds a family from 1-based element lists.
    pub fn from_element_lists(ground: GroundSet, sets: &[Vec<u32>]) -> Result<Self> {
        let masks = sets.iter().map(|s| ground.subset(s)).collect::<Result<Vec<_>>>()?;
        Self::new(ground, masks)
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.ground.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn contains_empty_set(&self) -> bool {
        self.members.first() == Some(&SubsetMask::EMPTY)
    }

    /// Returns a new family with `mask` added.
    pub fn with(&self, mask: SubsetMask) -> Result<Self> {
        self.ground.check(mask)?;
        let mut members = self.members.clone();
        if let Err(pos) = members.binary_search(&mask) {
            members.insert(pos, mask);
        }
        Ok(SetFamily { ground: self.ground, members })
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.ground == other.ground && self.members.iter().all(|&m| other.contains(m))
    }

    /// `{A^c : A ∈ F}`.
    pub fn complement_family(&self) -> SetFamily {
        let mut members: Vec<SubsetMask> = self.members.iter().map(|m| m.complement(self.ground)).collect();
        members.sort_unstable();
        SetFamily { ground: self.ground, members }
    }

    /// `2^[n] \ F`.
    pub fn co_family(&self) -> SetFamily {
        let mut bm = self.to_bitmap();
        bm.invert();
        SetFamily::from_bitmap(self.ground, &bm)
    }

    /// Smallest superset-closed family containing `F`.
    pub fn upward_closure(&self) -> SetFamily {
        let mut bm = self.to_bitmap();
        bm.close_upward();
        SetFamily::from_bitmap(self.ground, &bm)
    }

    /// Smallest subset-closed family containing `F`.
    pub fn downward_closure(&self) -> SetFamily {
        let mut bm = self.to_bitmap();
        bm.close_downward();
        SetFamily::from_bitmap(self.ground, &bm)
    }

    pub fn is_upward_closed(&self) -> bool {
        let bm = self.to_bitmap();
        bm.strict_supersets_one_step().is_subset_of(&bm)
    }

    pub fn is_downward_closed(&self) -> bool {
        // F is downward closed iff 2^[n] \ F is upward closed.
        let mut outside = self.to_bitmap();
        outside.invert();
        outside.strict_supersets_one_step().is_subset_of(&outside)
    }

    /// Inclusion-minimal members, increasing by mask.
    pub fn minimal_members(&self) -> Vec<SubsetMask> {
        minimal_elements(self.ground.n, self.members.iter().map(|m| m.0))
            .into_iter()
            .map(SubsetMask)
            .collect()
    }

    /// Applies `relabel` to every element (`relabel[i]` is the image of element `i + 1`, 0-based).
    pub fn relabel(&self, relabel: &[u32]) -> Result<SetFamily> {
        if relabel.len() != self.ground.n as usize {
            return Err(Error::Parameter(format!("relabeling of length {} for n = {}", relabel.len(), self.ground.n)));
        }
        let mut seen = 0u32;
        for &r in relabel {
            if r >= self.ground.n || seen >> r & 1 == 1 {
                return Err(Error::Parameter("relabeling is not a permutation".into()));
            }
            seen |= 1 << r;
        }
        let members = self.members.iter().map(|m| SubsetMask(permute_bits(m.0, relabel)));
        SetFamily::collect(self.ground, members)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile { n: self.ground.n, sets: self.members.iter().map(|m| m.elements()).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("family serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

#[inline]
pub(crate) fn permute_bits(mask: u32, relabel: &[u32]) -> u32 {
    let mut out = 0;
    let mut rest = mask;
    while rest != 0 {
        let b = rest.trailing_zeros();
        out |= 1 << relabel[b as usize];
        rest &= rest - 1;
    }
    out
}

/// Inclusion-minimal elements of a collection of masks over `[n]`, sorted and deduplicated.
pub(crate) fn minimal_elements(n: u32, masks: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut v: Vec<u32> = masks.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    if v.first() == Some(&0) {
        return vec![0];
    }
    // Pairwise scan when it is cheaper than two passes over 2^n bits.
    let dense_cost = (n as usize + 2) << n.saturating_sub(6);
    if v.len().saturating_mul(v.len()) / 4 <= dense_cost {
        v.sort_unstable_by_key(|m| (m.count_ones(), *m));
        let mut kept: Vec<u32> = Vec::new();
        for m in v {
            if !kept.iter().any(|&k| k & m == k) {
                kept.push(m);
            }
        }
        kept.sort_unstable();
        kept
    } else {
        let bm = MaskBitmap::from_masks(n, v.iter().copied());
        let mut above = bm.clone();
        above.close_upward();
        let above = above.strict_supersets_one_step();
        v.into_iter().filter(|&m| !above.contains(m)).collect()
    }
}

/// On-disk family format: `{"n": 4, "sets": [[1, 2], [3]]}` with 1-based elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub n: u32,
    pub sets: Vec<Vec<u32>>,
}

impl TryFrom<FamilyFile> for SetFamily {
    type Error = Error;

    fn try_from(file: FamilyFile) -> Result<Self> {
        let ground = GroundSet::new(file.n)?;
        SetFamily::from_element_lists(ground, &file.sets)
    }
}

impl From<SetFamily> for FamilyFile {
    fn from(f: SetFamily) -> Self {
        f.to_file()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn fam(n: u32, sets: &[&[u32]]) -> SetFamily {
        let lists: Vec<Vec<u32>> = sets.iter().map(|s| s.to_vec()).collect();
        SetFamily::from_element_lists(g(n), &lists).unwrap()
    }

    #[test]
    fn ground_set_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(25).is_err());
        assert_eq!(g(24).full().bits(), (1 << 24) - 1);
    }

    #[test]
    fn subset_rejects_bad_elements() {
        assert!(matches!(g(3).subset(&[4]), Err(Error::Element { element: 4, n: 3 })));
        assert!(matches!(g(3).subset(&[0]), Err(Error::Element { .. })));
        assert!(matches!(g(3).subset(&[2, 2]), Err(Error::RepeatedElement(2))));
        assert_eq!(g(3).subset(&[3, 1]).unwrap().bits(), 0b101);
    }

    #[test]
    fn duplicate_sets_rejected() {
        let err = SetFamily::from_element_lists(g(3), &[vec![1, 2], vec![2, 1]]).unwrap_err();
        assert!(matches!(err, Error::DuplicateSet(_)));
        assert!(SetFamily::from_json(r#"{"n":2,"sets":[[1],[1]]}"#).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(fam(2, &[&[]]).complement_family(), fam(2, &[&[1, 2]]));
        let f = fam(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 3, 4], &[1, 3, 4], &[2, 3, 4]]);
        assert_eq!(f.complement_family(), fam(4, &[&[4], &[3], &[], &[2], &[1]]));
        assert!(SetFamily::empty(g(3)).complement_family().is_empty());
    }

    #[test]
    fn co_family_examples() {
        assert!(SetFamily::power_set(g(2)).co_family().is_empty());
        assert_eq!(SetFamily::empty(g(1)).co_family(), fam(1, &[&[], &[1]]));
        let f = fam(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 3, 4], &[1, 3, 4], &[2, 3, 4]]);
        assert_eq!(f.co_family().len(), 11);
    }

    #[test]
    fn closure_examples() {
        assert_eq!(fam(2, &[&[1]]).upward_closure(), fam(2, &[&[1], &[1, 2]]));
        assert_eq!(fam(2, &[&[1, 2]]).upward_closure(), fam(2, &[&[1, 2]]));
        assert_eq!(
            fam(3, &[&[1], &[2]]).upward_closure(),
            fam(3, &[&[1], &[2], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]])
        );
        assert!(fam(2, &[&[1, 2]]).is_upward_closed());
        assert!(fam(2, &[&[], &[1]]).is_downward_closed());
        assert!(!fam(2, &[&[1]]).is_upward_closed());
        assert!(!fam(2, &[&[1]]).is_downward_closed());
        assert!(SetFamily::empty(g(3)).is_upward_closed());
        assert!(SetFamily::empty(g(3)).is_downward_closed());
    }

    #[test]
    fn submasks_enumerates_all() {
        let m = SubsetMask::from_bits(0b1011);
        let subs: Vec<u32> = m.submasks().map(|s| s.bits()).collect();
        assert_eq!(subs, vec![0, 1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(SubsetMask::EMPTY.submasks().count(), 1);
    }

    #[test]
    fn json_roundtrip_and_format() {
        let f = fam(3, &[&[], &[1, 3], &[2]]);
        let text = f.to_json();
        assert_eq!(text, r#"{"n":3,"sets":[[],[2],[1,3]]}"#);
        assert_eq!(SetFamily::from_json(&text).unwrap(), f);
        let via_serde: SetFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(via_serde, f);
    }

    #[test]
    fn minimal_elements_both_paths() {
        let masks = [0b0110u32, 0b0010, 0b1100, 0b1110, 0b1000];
        assert_eq!(minimal_elements(4, masks), vec![0b0010, 0b1000]);
        // Large enough to take the bitmap path.
        let many: Vec<u32> = (1..1u32 << 10).collect();
        let mins = minimal_elements(10, many);
        assert_eq!(mins, (0..10).map(|i| 1u32 << i).collect::<Vec<_>>());
    }

    #[test]
    fn display_uses_one_based_elements() {
        assert_eq!(fam(3, &[&[], &[1, 3]]).to_string(), "{{}, {1,3}}");
    }
}
