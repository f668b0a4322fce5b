//! Dense bitmap over the power set `2^[n]`, one bit per subset mask.
//!
//! Closures are computed with the word-parallel subset-sum transform: for
//! each element `i`, every mask without `i` propagates to (or from) the mask
//! with `i`. Positions below bit 6 are shifts inside a word, the rest are
//! whole-word strides.

/// For element `i < 6`, the bit positions of a word whose index lacks bit `i`.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MaskBitmap {
    n: u32,
    words: Vec<u64>,
}

impl MaskBitmap {
    pub(crate) fn new(n: u32) -> Self {
        let bits = 1usize << n;
        MaskBitmap { n, words: vec![0; bits.div_ceil(64)] }
    }

    pub(crate) fn from_masks(n: u32, masks: impl IntoIterator<Item = u32>) -> Self {
        let mut bm = Self::new(n);
        for m in masks {
            bm.insert(m);
        }
        bm
    }

    /// Bits that are valid positions in the last (or only) word.
    fn tail_mask(&self) -> u64 {
        if self.n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << self.n)) - 1
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, mask: u32) {
        self.words[(mask >> 6) as usize] |= 1 << (mask & 63);
    }

    #[inline]
    pub(crate) fn contains(&self, mask: u32) -> bool {
        self.words[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }

    #[cfg(test)]
    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set masks in increasing order.
    pub(crate) fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(((wi as u32) << 6) | b)
            })
        })
    }

    pub(crate) fn union_with(&mut self, other: &MaskBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub(crate) fn invert(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        let tail = self.tail_mask();
        if let Some(last) = self.words.last_mut() {
            *last &= tail;
        }
    }

    pub(crate) fn is_subset_of(&self, other: &MaskBitmap) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Replace the set by its closure under taking supersets.
    pub(crate) fn close_upward(&mut self) {
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let low = LOW_HALF[i as usize];
                for w in &mut self.words {
                    *w |= (*w & low) << shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for block in self.words.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (h, l) in hi.iter_mut().zip(lo.iter()) {
                        *h |= *l;
                    }
                }
            }
        }
    }

    /// Replace the set by its closure under taking subsets.
    pub(crate) fn close_downward(&mut self) {
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let low = LOW_HALF[i as usize];
                for w in &mut self.words {
                    *w |= (*w >> shift) & low;
                }
            } else {
                let stride = 1usize << (i - 6);
                for block in self.words.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (l, h) in lo.iter_mut().zip(hi.iter()) {
                        *l |= *h;
                    }
                }
            }
        }
    }

    /// Masks `X ∪ {i}` for every member `X` and element `i ∉ X`.
    pub(crate) fn strict_supersets_one_step(&self) -> MaskBitmap {
        let mut out = MaskBitmap::new(self.n);
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let low = LOW_HALF[i as usize];
                for (o, w) in out.words.iter_mut().zip(&self.words) {
                    *o |= (*w & low) << shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for (oblock, block) in out.words.chunks_mut(2 * stride).zip(self.words.chunks(2 * stride)) {
                    for j in 0..stride {
                        oblock[stride + j] |= block[j];
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_up(n: u32, masks: &[u32]) -> Vec<u32> {
        (0..1u32 << n).filter(|&x| masks.iter().any(|&m| m & x == m)).collect()
    }

    fn brute_down(n: u32, masks: &[u32]) -> Vec<u32> {
        (0..1u32 << n).filter(|&x| masks.iter().any(|&m| m & x == x)).collect()
    }

    #[test]
    fn closures_match_brute_force() {
        for n in 1..=8 {
            let full = (1u32 << n) - 1;
            let seeds = [vec![0], vec![full], vec![1, full ^ 1], vec![3 & full, 5 & full, 6 & full]];
            for s in &seeds {
                let mut up = MaskBitmap::from_masks(n, s.iter().copied());
                up.close_upward();
                assert_eq!(up.iter().collect::<Vec<_>>(), brute_up(n, s), "n={n} up {s:?}");
                let mut down = MaskBitmap::from_masks(n, s.iter().copied());
                down.close_downward();
                assert_eq!(down.iter().collect::<Vec<_>>(), brute_down(n, s), "n={n} down {s:?}");
            }
        }
    }

    #[test]
    fn invert_respects_tail() {
        let mut bm = MaskBitmap::from_masks(2, [1]);
        bm.invert();
        assert_eq!(bm.iter().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(bm.count(), 3);
    }

    #[test]
    fn one_step_supersets() {
        let bm = MaskBitmap::from_masks(7, [0, 0b100_0001]);
        let up = bm.strict_supersets_one_step();
        let expect: Vec<u32> = {
            let mut v: Vec<u32> = (0..7).map(|i| 1 << i).collect();
            v.extend((1..6).map(|i| 0b100_0001 | 1 << i));
            v.sort();
            v
        };
        assert_eq!(up.iter().collect::<Vec<_>>(), expect);
    }
}
