//! The unit group `U(F_2[G]) = 1 + Δ(G)` of a finite 2-group, enumerated
//! explicitly.

use crate::error::{Error, Result};
use crate::group::{exact_log, GroupTable, DEFAULT_ELEMENT_CAP};

/// Default cap on the number of units enumerated.
pub const DEFAULT_UNIT_CAP: u64 = 1 << 15;

/// Group algebras with more basis elements than this are never enumerated.
const MAX_BASIS: usize = 24;

/// Units of `F_2[G]` as bitmasks over the group elements; a mask is a unit
/// iff its weight is odd.
pub struct UnitGroup {
    basis: usize,
    /// `shift[x][k][b]`: left translation by `x` of byte `k` holding `b`.
    shift: Vec<[[u32; 256]; 3]>,
    generators: Vec<u32>,
}

/// A subgroup of [`UnitGroup`] kept as a membership bitmap.
struct UnitSubgroup {
    mask: Vec<u64>,
    members: Vec<u32>,
    gens: Vec<u32>,
}

impl UnitSubgroup {
    fn trivial(basis: usize) -> Self {
        let mut mask = vec![0u64; (1usize << basis).div_ceil(64)];
        mask[0] |= 2; // the identity is the mask with only bit 0 set
        UnitSubgroup {
            mask,
            members: vec![1],
            gens: Vec::new(),
        }
    }

    fn contains(&self, u: u32) -> bool {
        (self.mask[u as usize >> 6] >> (u & 63)) & 1 == 1
    }

    fn insert(&mut self, u: u32) -> bool {
        let (w, b) = (u as usize >> 6, u & 63);
        let fresh = (self.mask[w] >> b) & 1 == 0;
        self.mask[w] |= 1 << b;
        fresh
    }

    fn order(&self) -> usize {
        self.members.len()
    }
}

impl UnitGroup {
    /// Requires `G` to be a 2-group with `2^{|G|-1} ≤ cap`.
    pub fn new(g: &GroupTable, cap: u64) -> Result<UnitGroup> {
        let n = g.order();
        if exact_log(n as u64, 2).is_none() {
            return Err(Error::AlgebraMismatch(format!(
                "unit enumeration needs a 2-group, got |G| = {n}"
            )));
        }
        let log_size = n - 1;
        if n > MAX_BASIS || (1u64 << log_size) > cap {
            return Err(Error::UnitGroupTooLarge { log_size, cap });
        }
        let shift = (0..n)
            .map(|x| {
                let mut t = [[0u32; 256]; 3];
                for (k, table) in t.iter_mut().enumerate() {
                    for (b, slot) in table.iter_mut().enumerate() {
                        let mut out = 0u32;
                        for bit in 0..8 {
                            let y = 8 * k + bit;
                            if y < n && (b >> bit) & 1 == 1 {
                                out |= 1 << g.mul(x, y);
                            }
                        }
                        *slot = out;
                    }
                }
                t
            })
            .collect();
        let mut units = UnitGroup {
            basis: n,
            shift,
            generators: Vec::new(),
        };
        units.generators = units.find_generators();
        Ok(units)
    }

    pub fn order(&self) -> u64 {
        1 << (self.basis - 1)
    }

    pub fn identity(&self) -> u32 {
        1
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let mut out = 0;
        let mut rest = a;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let t = &self.shift[x];
            out ^= t[0][(b & 0xff) as usize] | t[1][((b >> 8) & 0xff) as usize] | t[2][(b >> 16) as usize];
        }
        out
    }

    pub fn inv(&self, a: u32) -> u32 {
        let mut prev = 1;
        let mut x = a;
        while x != 1 {
            prev = x;
            x = self.mul(x, a);
        }
        prev
    }

    pub fn comm(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    fn conj(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(b), a), b)
    }

    fn all_units(&self) -> impl Iterator<Item = u32> + '_ {
        (1u32..(1u32 << self.basis)).filter(|u| u.count_ones() % 2 == 1)
    }

    fn adjoin(&self, h: &mut UnitSubgroup, x: u32) -> bool {
        if h.contains(x) {
            return false;
        }
        h.gens.push(x);
        let old = h.members.len();
        for i in 0..old {
            let y = self.mul(h.members[i], x);
            if h.insert(y) {
                h.members.push(y);
            }
        }
        let mut cursor = old;
        while cursor < h.members.len() {
            let e = h.members[cursor];
            for k in 0..h.gens.len() {
                let y = self.mul(e, h.gens[k]);
                if h.insert(y) {
                    h.members.push(y);
                }
            }
            cursor += 1;
        }
        true
    }

    /// Greedy generating set: scan units in increasing mask order and keep
    /// each one outside the span of those already kept.
    fn find_generators(&self) -> Vec<u32> {
        let mut h = UnitSubgroup::trivial(self.basis);
        let total = self.order() as usize;
        for u in self.all_units() {
            if h.order() == total {
                break;
            }
            self.adjoin(&mut h, u);
        }
        h.gens
    }

    fn normal_closure(&self, seeds: impl IntoIterator<Item = u32>) -> UnitSubgroup {
        let mut h = UnitSubgroup::trivial(self.basis);
        for s in seeds {
            self.adjoin(&mut h, s);
        }
        let mut i = 0;
        while i < h.gens.len() {
            let x = h.gens[i];
            for &y in &self.generators {
                let z = self.conj(x, y);
                self.adjoin(&mut h, z);
            }
            i += 1;
        }
        h
    }

    /// Nilpotency class via `γ_{i+1} = ⟨(x, y) : x ∈ X_i, y ∈ Y⟩^U` where
    /// `X_i` generates `γ_i` and `Y` generates `U`.
    pub fn class_by_generators(&self) -> Result<usize> {
        let mut gens = self.generators.clone();
        let mut order = self.order() as usize;
        let mut class = 0;
        while order > 1 {
            let seeds: Vec<u32> = gens
                .iter()
                .flat_map(|&x| self.generators.iter().map(move |&y| (x, y)))
                .map(|(x, y)| self.comm(x, y))
                .collect();
            let next = self.normal_closure(seeds);
            if next.order() == order {
                return Err(Error::Consistency("unit group is not nilpotent".into()));
            }
            order = next.order();
            gens = next.gens;
            class += 1;
        }
        Ok(class)
    }

    /// Materializes the unit group as a multiplication table, with units
    /// numbered in increasing mask order.
    pub fn to_table(&self) -> Result<GroupTable> {
        let order = self.order() as usize;
        if order > DEFAULT_ELEMENT_CAP {
            return Err(Error::GroupTooLarge {
                cap: DEFAULT_ELEMENT_CAP,
            });
        }
        let units: Vec<u32> = self.all_units().collect();
        let mut index = vec![u32::MAX; 1 << self.basis];
        for (i, &u) in units.iter().enumerate() {
            index[u as usize] = i as u32;
        }
        let mult = units
            .iter()
            .map(|&a| units.iter().map(|&b| index[self.mul(a, b) as usize] as usize).collect())
            .collect();
        let gens = self.generators.iter().map(|&u| index[u as usize] as usize).collect();
        GroupTable::from_parts(mult, gens)
    }

    /// `cl(U(F_2[G]))`: through the tabulated group's lower central series
    /// when the table fits the element cap, otherwise by generators.
    pub fn class(&self) -> Result<usize> {
        if self.order() as usize <= DEFAULT_ELEMENT_CAP {
            let table = self.to_table()?;
            table
                .lower_central_series()
                .class()
                .ok_or_else(|| Error::Consistency("unit group is not nilpotent".into()))
        } else {
            self.class_by_generators()
        }
    }
}
