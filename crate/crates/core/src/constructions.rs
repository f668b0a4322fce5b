//! Explicit families: linked cubes, series of cubes, their multi-block
//! generalization, the even lift, and principal stars.
//!
//! Constructors emit exactly the defined family. None of them saturates, so
//! small-n cases that fail to be maximal stay visible to the checkers.

use crate::bitmap::MaskBitmap;
use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily, SubsetMask};
use crate::intersecting::{require_maximal, KParameter};

/// A partition of `[n]` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    ground: GroundSet,
    blocks: Vec<SubsetMask>,
}

impl Partition {
    pub fn new(ground: GroundSet, blocks: Vec<SubsetMask>) -> Result<Self> {
        let mut seen = SubsetMask::EMPTY;
        for &b in &blocks {
            ground.check(b)?;
            if b.is_empty() {
                return Err(Error::Partition("empty block".into()));
            }
            if !b.is_disjoint(seen) {
                return Err(Error::Partition(format!("block {b} overlaps an earlier block")));
            }
            seen = seen | b;
        }
        if seen != ground.full() {
            return Err(Error::Partition(format!("blocks cover {seen}, not all of [{}]", ground.n())));
        }
        Ok(Partition { ground, blocks })
    }

    pub fn from_element_lists(ground: GroundSet, blocks: &[Vec<u32>]) -> Result<Self> {
        let masks = blocks.iter().map(|b| ground.subset(b)).collect::<Result<Vec<_>>>()?;
        Self::new(ground, masks)
    }

    /// Consecutive blocks of sizes `⌈n/parts⌉` then `⌊n/parts⌋`.
    pub fn balanced(ground: GroundSet, parts: u32) -> Result<Self> {
        let n = ground.n();
        if parts == 0 || parts > n {
            return Err(Error::Partition(format!("cannot split [{n}] into {parts} nonempty blocks")));
        }
        let (base, extra) = (n / parts, n % parts);
        let mut start = 0;
        let blocks = (0..parts)
            .map(|i| {
                let size = base + u32::from(i < extra);
                let block = ((1u32 << size) - 1) << start;
                start += size;
                SubsetMask::from_bits(block)
            })
            .collect();
        Self::new(ground, blocks)
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn blocks(&self) -> &[SubsetMask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Every block has size `⌊n/k⌋` or `⌈n/k⌉`.
    pub fn is_balanced(&self) -> bool {
        let (n, k) = (self.ground.n(), self.blocks.len() as u32);
        let (lo, hi) = (n / k, n.div_ceil(k));
        self.blocks.iter().all(|b| (lo..=hi).contains(&b.len()))
    }
}

/// `{A : S ⊊ A} ∪ {B : S^c ⊊ B}`.
pub fn linked_cubes(ground: GroundSet, s: SubsetMask) -> Result<SetFamily> {
    ground.check(s)?;
    if s.is_empty() || s == ground.full() {
        return Err(Error::Parameter(format!("linked cubes need ∅ ⊊ S ⊊ [n], got S = {s}")));
    }
    let p = Partition::new(ground, vec![s, s.complement(ground)])?;
    generalized_linked(&p)
}

/// Linked cubes with `S = {1, ..., ⌊n/2⌋}`.
pub fn balanced_linked_cubes(ground: GroundSet) -> Result<SetFamily> {
    let half = ground.n() / 2;
    linked_cubes(ground, SubsetMask::from_bits((1u32 << half) - 1))
}

pub fn is_balanced_linked(ground: GroundSet, s: SubsetMask) -> bool {
    let n = ground.n();
    (n / 2..=n.div_ceil(2)).contains(&s.len())
}

/// `2^(n-|S|) + 2^|S| - 3`.
pub fn linked_cubes_size(n: u32, s_len: u32) -> u64 {
    (1u64 << (n - s_len)) + (1u64 << s_len) - 3
}

/// `∪ᵢ 2^{Sᵢ}`.
pub fn series_of_cubes(p: &Partition) -> SetFamily {
    let mut bm = MaskBitmap::new(p.ground.n());
    for b in &p.blocks {
        for sub in b.submasks() {
            bm.insert(sub.bits());
        }
    }
    SetFamily::from_bitmap(p.ground, &bm)
}

/// `k·2^(n/k) - k + 1`, the size of a balanced series of `k` cubes when `k | n`.
pub fn series_of_cubes_size(n: u32, k: u32) -> Option<u64> {
    (k > 0 && n % k == 0).then(|| u64::from(k) * (1u64 << (n / k)) - u64::from(k) + 1)
}

/// `∪ᵢ {A : A ⊋ [n] \ Sᵢ}` over the blocks `Sᵢ` of `p`; `(2ℓ-1)`-wise
/// intersecting for `ℓ` blocks.
pub fn generalized_linked(p: &Partition) -> Result<SetFamily> {
    if p.len() < 2 {
        return Err(Error::Partition("need at least two blocks".into()));
    }
    let mut bm = MaskBitmap::new(p.ground.n());
    for &b in &p.blocks {
        let rest = b.complement(p.ground);
        for sub in b.submasks().skip(1) {
            bm.insert((rest | sub).bits());
        }
    }
    Ok(SetFamily::from_bitmap(p.ground, &bm))
}

/// `Σᵢ 2^|Sᵢ| - 2ℓ + 1`; the blocks' families share only `[n]`.
pub fn generalized_linked_size(p: &Partition) -> u64 {
    let l = p.len() as u64;
    p.blocks.iter().map(|b| 1u64 << b.len()).sum::<u64>() + 1 - 2 * l
}

/// Lifts a maximal `(k-1)`-wise intersecting family on `[n-1]` to
/// `{A ∪ {n} : A ∈ F'} ∪ {[n-1]}` on `[n]`.
///
/// Only the precondition is checked. Whether the result is maximal k-wise is
/// for the caller to verify.
pub fn even_lift(fprime: &SetFamily, k: KParameter) -> Result<SetFamily> {
    if k.get() < 3 {
        return Err(Error::Parameter("even lift needs k ≥ 3".into()));
    }
    require_maximal(fprime, KParameter::new(k.get() - 1)?)?;
    let ground = GroundSet::new(fprime.n() + 1)?;
    let top = SubsetMask::from_bits(1 << fprime.n());
    let lifted = fprime.iter().map(|a| a | top);
    SetFamily::collect(ground, lifted.chain(std::iter::once(fprime.ground().full())))
}

/// All subsets containing `element`.
pub fn principal_star(ground: GroundSet, element: u32) -> Result<SetFamily> {
    let e = ground.subset(&[element])?;
    let rest = e.complement(ground);
    SetFamily::collect(ground, rest.submasks().map(|s| s | e))
}
