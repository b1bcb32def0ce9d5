use crate::error::{Error, Result};
use crate::group::table::GroupTable;

/// A subgroup of a [`GroupTable`], stored as a sorted member list plus a
/// membership mask over the parent's element indices.
#[derive(Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.members.len() <= 16 {
            write!(f, "Subgroup{:?}", self.members)
        } else {
            write!(f, "Subgroup(order {})", self.members.len())
        }
    }
}

impl Subgroup {
    pub fn trivial(g: &GroupTable) -> Subgroup {
        let mut mask = vec![false; g.order()];
        mask[0] = true;
        Subgroup { members: vec![0], mask }
    }

    pub fn whole(g: &GroupTable) -> Subgroup {
        Subgroup {
            members: (0..g.order()).collect(),
            mask: vec![true; g.order()],
        }
    }

    /// Wraps a mask that is already known to describe a subgroup.
    pub(crate) fn from_mask(mask: Vec<bool>) -> Subgroup {
        let members = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        Subgroup { members, mask }
    }

    /// Validates that `members` is a subgroup of `g`.
    pub fn from_members(g: &GroupTable, members: &[usize]) -> Result<Subgroup> {
        let mut mask = vec![false; g.order()];
        for &x in members {
            g.check_index(x)?;
            mask[x] = true;
        }
        let s = Subgroup::from_mask(mask);
        if !s.contains(0) {
            return Err(Error::Consistency("identity missing from subgroup".into()));
        }
        for &a in &s.members {
            if !s.contains(g.inv(a)) {
                return Err(Error::Consistency(format!("{a} has no inverse in the set")));
            }
            for &b in &s.members {
                if !s.contains(g.mul(a, b)) {
                    return Err(Error::Consistency("set not closed under products".into()));
                }
            }
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Order of the parent group.
    pub fn parent_order(&self) -> usize {
        self.mask.len()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub(crate) fn check_parent(&self, g: &GroupTable) -> Result<()> {
        if self.mask.len() == g.order() {
            Ok(())
        } else {
            Err(Error::ParentMismatch {
                expected: g.order(),
                found: self.mask.len(),
            })
        }
    }
}

/// Incrementally grows a subgroup by adjoining elements.
pub(crate) struct Closure<'g> {
    group: &'g GroupTable,
    mask: Vec<bool>,
    members: Vec<usize>,
    gens: Vec<usize>,
}

impl<'g> Closure<'g> {
    pub(crate) fn new(group: &'g GroupTable) -> Self {
        let mut mask = vec![false; group.order()];
        mask[0] = true;
        Closure {
            group,
            mask,
            members: vec![0],
            gens: Vec::new(),
        }
    }

    /// Adjoins `x`; returns false when it was already a member.
    pub(crate) fn add(&mut self, x: usize) -> bool {
        if self.mask[x] {
            return false;
        }
        let g = self.group;
        self.gens.push(x);
        let old = self.members.len();
        // Old members only need the new generator; new members need all.
        for i in 0..old {
            let y = g.mul(self.members[i], x);
            if !self.mask[y] {
                self.mask[y] = true;
                self.members.push(y);
            }
        }
        let mut cursor = old;
        while cursor < self.members.len() {
            let e = self.members[cursor];
            for &s in &self.gens {
                let y = g.mul(e, s);
                if !self.mask[y] {
                    self.mask[y] = true;
                    self.members.push(y);
                }
            }
            cursor += 1;
        }
        true
    }

    pub(crate) fn finish(self) -> Subgroup {
        let mut members = self.members;
        members.sort_unstable();
        Subgroup {
            members,
            mask: self.mask,
        }
    }
}

impl GroupTable {
    /// The smallest subgroup containing `seed`.
    pub fn subgroup_closure(&self, seed: &[usize]) -> Result<Subgroup> {
        let mut c = Closure::new(self);
        for &x in seed {
            self.check_index(x)?;
            c.add(x);
        }
        Ok(c.finish())
    }

    /// `⟨(a, b) : a ∈ A, b ∈ B⟩` with `(a, b) = a⁻¹b⁻¹ab`.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        a.check_parent(self)?;
        b.check_parent(self)?;
        let mut hit = vec![false; self.order()];
        for &x in a.members() {
            for &y in b.members() {
                hit[self.comm(x, y)] = true;
            }
        }
        let mut c = Closure::new(self);
        for (z, _) in hit.iter().enumerate().filter(|(_, &h)| h) {
            c.add(z);
        }
        Ok(c.finish())
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let whole = Subgroup::whole(self);
        self.commutator_subgroup(&whole, &whole).expect("same parent")
    }

    /// `⟨h^q : h ∈ H⟩`.
    pub fn power_subgroup(&self, h: &Subgroup, q: u64) -> Result<Subgroup> {
        h.check_parent(self)?;
        let mut c = Closure::new(self);
        for &x in h.members() {
            c.add(self.pow(x, q));
        }
        Ok(c.finish())
    }

    /// The product set `AB`, refused unless one factor is normal in `G`.
    pub fn subgroup_product(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        a.check_parent(self)?;
        b.check_parent(self)?;
        if !self.is_normal(a) && !self.is_normal(b) {
            return Err(Error::ProductNotSubgroup);
        }
        let mut mask = vec![false; self.order()];
        for &x in a.members() {
            for &y in b.members() {
                mask[self.mul(x, y)] = true;
            }
        }
        Ok(Subgroup::from_mask(mask))
    }

    /// Normality in `G`, tested against conjugation by the generators.
    pub fn is_normal(&self, h: &Subgroup) -> bool {
        let gens: Vec<usize> = if self.generators().is_empty() && self.order() > 1 {
            (0..self.order()).collect()
        } else {
            self.generators().to_vec()
        };
        h.members()
            .iter()
            .all(|&x| gens.iter().all(|&s| h.contains(self.conj(x, s))))
    }

    pub fn is_abelian_subgroup(&self, h: &Subgroup) -> bool {
        let m = h.members();
        m.iter()
            .enumerate()
            .all(|(i, &x)| m[i + 1..].iter().all(|&y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn center(&self) -> Subgroup {
        let gens: Vec<usize> = if self.generators().is_empty() {
            (0..self.order()).collect()
        } else {
            self.generators().to_vec()
        };
        let mask = (0..self.order())
            .map(|x| gens.iter().all(|&s| self.mul(x, s) == self.mul(s, x)))
            .collect();
        Subgroup::from_mask(mask)
    }

    pub fn is_central(&self, x: usize) -> bool {
        self.generators().iter().all(|&s| self.mul(x, s) == self.mul(s, x))
    }
}

/// `γ_1 ⊇ γ_2 ⊇ …`. For a nilpotent group the last term is trivial; otherwise
/// the last two terms coincide.
#[derive(Clone, Debug)]
pub struct CentralSeries {
    terms: Vec<Subgroup>,
    nilpotent: bool,
}

impl CentralSeries {
    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotent
    }

    /// Nilpotency class, `None` when the series stabilizes above `{1}`.
    pub fn class(&self) -> Option<usize> {
        self.nilpotent.then(|| self.terms.len() - 1)
    }

    /// `γ_i` with 1-based `i`; terms past the end of a nilpotent series are
    /// trivial, past the end of a stalled series they repeat.
    pub fn gamma(&self, i: usize) -> &Subgroup {
        assert!(i >= 1, "lower central series is 1-indexed");
        let idx = (i - 1).min(self.terms.len() - 1);
        &self.terms[idx]
    }
}

impl GroupTable {
    pub fn lower_central_series(&self) -> CentralSeries {
        let whole = Subgroup::whole(self);
        let mut terms = vec![whole.clone()];
        loop {
            let last = terms.last().expect("nonempty");
            if last.is_trivial() {
                return CentralSeries { terms, nilpotent: true };
            }
            let next = self.commutator_subgroup(last, &whole).expect("same parent");
            let stalled = next == *last;
            terms.push(next);
            if stalled {
                return CentralSeries {
                    terms,
                    nilpotent: false,
                };
            }
        }
    }
}
