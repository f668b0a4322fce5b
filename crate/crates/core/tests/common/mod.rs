//! Independent oracles that follow the definitions literally, sharing no code
//! paths with the library beyond the value types.

#![allow(dead_code)]

use itertools::Itertools;
use kwise::{GroundSet, KParameter, SetFamily, SubsetMask};

pub fn g(n: u32) -> GroundSet {
    GroundSet::new(n).unwrap()
}

pub fn k(k: u32) -> KParameter {
    KParameter::new(k).unwrap()
}

pub fn fam(n: u32, sets: &[&[u32]]) -> SetFamily {
    let lists: Vec<Vec<u32>> = sets.iter().map(|s| s.to_vec()).collect();
    SetFamily::from_element_lists(g(n), &lists).unwrap()
}

pub fn from_bits(n: u32, masks: impl IntoIterator<Item = u32>) -> SetFamily {
    SetFamily::collect(g(n), masks.into_iter().map(SubsetMask::from_bits)).unwrap()
}

/// Every subfamily of exactly `min(k, |F|)` members shares an element.
pub fn direct_k_wise(f: &SetFamily, k: u32) -> bool {
    let members: Vec<u32> = f.iter().map(|m| m.bits()).collect();
    if members.is_empty() {
        return true;
    }
    let size = (k as usize).min(members.len());
    members.iter().combinations(size).all(|c| c.iter().fold(u32::MAX, |acc, &&m| acc & m) != 0)
}

/// Sets outside `F` whose addition keeps the family k-wise intersecting.
pub fn direct_addable(f: &SetFamily, k: u32) -> Vec<u32> {
    (0..1u32 << f.n())
        .filter(|&a| {
            let m = SubsetMask::from_bits(a);
            !f.contains(m) && direct_k_wise(&f.with(m).unwrap(), k)
        })
        .collect()
}

pub fn direct_maximal(f: &SetFamily, k: u32) -> bool {
    direct_k_wise(f, k) && direct_addable(f, k).is_empty()
}

pub fn brute_dp(f: &SetFamily) -> u64 {
    let m = f.members();
    let mut count = 0;
    for i in 0..m.len() {
        for j in i..m.len() {
            if m[i].bits() & m[j].bits() == 0 {
                count += 1;
            }
        }
    }
    count
}

pub fn brute_triangles(f: &SetFamily) -> u64 {
    let m: Vec<u32> = f.iter().map(|x| x.bits()).collect();
    let mut count = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i] & m[j] != 0 {
                continue;
            }
            for l in j + 1..m.len() {
                if m[l] & m[i] == 0 && m[l] & m[j] == 0 {
                    count += 1;
                }
            }
        }
    }
    count
}

pub fn brute_upward_closure(f: &SetFamily) -> Vec<u32> {
    (0..1u32 << f.n()).filter(|&x| f.iter().any(|m| m.bits() & x == m.bits())).collect()
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All families over `[n]` that are maximal k-wise intersecting, by checking
/// each of the `2^(2^n)` families against the definition.
pub fn brute_maximal_families(n: u32, k: u32) -> Vec<SetFamily> {
    let subsets = 1u32 << n;
    assert!(subsets <= 16);
    (0u64..1u64 << subsets)
        .filter_map(|bits| {
            let f = from_bits(n, (0..subsets).filter(|&x| bits >> x & 1 == 1));
            direct_maximal(&f, k).then_some(f)
        })
        .collect()
}

/// `|{X ⊊ S} ∪ {X ⊊ S^c}  Δ  F̄|`, computed by building both families.
pub fn brute_linked_distance(f: &SetFamily, s: u32) -> u64 {
    let full = (1u32 << f.n()) - 1;
    let sc = full ^ s;
    let target: Vec<u32> =
        (0..=full).filter(|&x| (x & s == x && x != s) || (x & sc == x && x != sc)).collect();
    let fbar: Vec<u32> = f.iter().map(|m| m.bits() ^ full).collect();
    let in_target = |x: &u32| target.contains(x);
    let in_fbar = |x: &u32| fbar.contains(x);
    (target.iter().filter(|x| !in_fbar(x)).count() + fbar.iter().filter(|x| !in_target(x)).count()) as u64
}
