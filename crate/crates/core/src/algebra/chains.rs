use crate::algebra::echelon::Echelon;
use crate::algebra::row::{Gf2Row, GfpRow, Row};
use crate::algebra::{GroupAlgebra, SubspaceBasis};
use crate::error::{Error, Result};
use crate::group::{GroupTable, Subgroup};
use crate::lie_dim::{DimensionSeries, LieContext, SeriesMethod};

/// Default largest `|G|` for which the direct ideal chains are computed.
pub const DEFAULT_ORACLE_CAP: usize = 256;

/// Left and right translations of `F_p[G]` by a set of group elements, as
/// permutations of the basis.
pub(crate) struct Translations {
    pairs: Vec<(Vec<u16>, Vec<u16>)>,
}

impl Translations {
    pub(crate) fn generators(g: &GroupTable) -> Self {
        let gens: Vec<usize> = if g.generators().is_empty() {
            (1..g.order()).collect()
        } else {
            g.generators().to_vec()
        };
        Self::of(g, &gens)
    }

    pub(crate) fn all_elements(g: &GroupTable) -> Self {
        Self::of(g, &(1..g.order()).collect::<Vec<_>>())
    }

    fn of(g: &GroupTable, elements: &[usize]) -> Self {
        let pairs = elements
            .iter()
            .map(|&x| (g.left_translation(x), g.right_translation(x)))
            .collect();
        Translations { pairs }
    }
}

/// `[v, x] = v·x - x·v` given the left and right translations by `x`.
fn bracket<R: Row>(v: &R, left: &[u16], right: &[u16]) -> R {
    let mut out = v.permuted(right);
    let lv = v.permuted(left);
    out.axpy(v.characteristic() - 1, &lv);
    out
}

/// Closes the span of `seeds` under the basis permutations `perms`. Every
/// vector appended to the basis is permuted once, so the result is the
/// smallest invariant subspace containing the seeds.
fn invariant_closure<R: Row>(len: usize, p: u8, seeds: impl IntoIterator<Item = R>, perms: &[&[u16]]) -> Echelon<R> {
    let mut e = Echelon::new(len, p);
    let mut queue: Vec<R> = Vec::new();
    for s in seeds {
        if let Some(r) = e.insert(s) {
            queue.push(r.clone());
        }
    }
    while let Some(v) = queue.pop() {
        if e.dim() == len {
            break;
        }
        for perm in perms {
            if let Some(r) = e.insert(v.permuted(perm)) {
                queue.push(r.clone());
            }
        }
    }
    e
}

/// The smallest two-sided ideal containing the seeds.
pub(crate) fn ideal_closure<R: Row>(
    len: usize,
    p: u8,
    seeds: impl IntoIterator<Item = R>,
    gens: &Translations,
) -> Echelon<R> {
    let perms: Vec<&[u16]> = gens
        .pairs
        .iter()
        .flat_map(|(l, r)| [l.as_slice(), r.as_slice()])
        .collect();
    invariant_closure(len, p, seeds, &perms)
}

/// Conjugation by each generator of `G`, as basis permutations.
fn conjugations(g: &GroupTable) -> Vec<Vec<u16>> {
    let gens: Vec<usize> = if g.generators().is_empty() {
        (1..g.order()).collect()
    } else {
        g.generators().to_vec()
    };
    gens.iter()
        .map(|&x| (0..g.order()).map(|y| g.conj(y, x) as u16).collect())
        .collect()
}

/// One representative of each conjugacy class of size greater than one.
fn noncentral_class_reps(n: usize, conj: &[Vec<u16>]) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        seen[x] = true;
        let mut orbit = vec![x];
        let mut i = 0;
        while i < orbit.len() {
            for c in conj {
                let y = c[orbit[i]] as usize;
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        if orbit.len() > 1 {
            reps.push(x);
        }
    }
    reps
}

/// Result of a Lie power chain computation.
#[derive(Clone, Debug)]
pub struct ChainResult {
    /// Dimensions of the 2nd, 3rd, … powers, ending with 0.
    pub dims: Vec<usize>,
    /// First `m` whose power vanishes.
    pub index: usize,
    /// The powers themselves, starting from the first (`R` itself).
    pub terms: Vec<SubspaceBasis>,
}

impl ChainResult {
    /// The `k`-th power (1-based); zero past the end.
    pub fn term(&self, k: usize) -> Option<&SubspaceBasis> {
        self.terms.get(k - 1)
    }
}

fn finish<R: Row>(terms: Vec<Echelon<R>>) -> ChainResult
where
    SubspaceBasis: From<Echelon<R>>,
{
    let dims = terms.iter().skip(1).map(Echelon::dim).collect();
    let index = terms.len();
    ChainResult {
        dims,
        index,
        terms: terms.into_iter().map(SubspaceBasis::from).collect(),
    }
}

/// `R^(k) = ideal{[v, x] : v ∈ R^(k-1), x ∈ X}`. With `X` the generators of
/// `G` this equals the ideal over all of `G`, since
/// `[v, xy] = [v, x]y + x[v, y]`.
fn upper_chain<R: Row>(g: &GroupTable, p: u8, bound: usize, brackets: &Translations) -> Result<Vec<Echelon<R>>> {
    let n = g.order();
    let gens = Translations::generators(g);
    let mut terms: Vec<Echelon<R>> = vec![Echelon::full(n, p)];
    loop {
        let k = terms.len() + 1;
        let prev = terms.last().expect("nonempty");
        let seeds: Vec<R> = prev
            .rows()
            .iter()
            .flat_map(|v| brackets.pairs.iter().map(move |(l, r)| bracket(v, l, r)))
            .collect();
        let cur = ideal_closure(n, p, seeds, &gens);
        let done = cur.dim() == 0;
        terms.push(cur);
        if done {
            return Ok(terms);
        }
        if k >= bound {
            return Err(Error::Consistency(format!(
                "upper Lie power R^({k}) is nonzero although |G'| + 1 = {bound}"
            )));
        }
    }
}

/// `R^[k]` is the ideal generated by `W_k = span{[w, x] : w ∈ W_(k-1), x ∈ G}`,
/// `W_1 = R`; the bracket runs over all of `G` because `W_k` is only a Lie
/// span, not an ideal.
///
/// Each `W_k` is stable under conjugation, and `[w, y⁻¹xy] = y⁻¹[ywy⁻¹, x]y`,
/// so it suffices to bracket with noncentral class representatives and close
/// under conjugation. `naive` brackets with every element instead.
fn lower_chain<R: Row>(g: &GroupTable, p: u8, bound: usize, naive: bool) -> Result<Vec<Echelon<R>>> {
    let n = g.order();
    let gens = Translations::generators(g);
    let conj = conjugations(g);
    let conj_refs: Vec<&[u16]> = conj.iter().map(Vec::as_slice).collect();
    let brackets = if naive {
        Translations::all_elements(g)
    } else {
        Translations::of(g, &noncentral_class_reps(n, &conj))
    };
    let mut terms: Vec<Echelon<R>> = vec![Echelon::full(n, p)];
    let mut lie_span: Echelon<R> = Echelon::full(n, p);
    loop {
        let k = terms.len() + 1;
        let seeds = lie_span
            .rows()
            .iter()
            .flat_map(|v| brackets.pairs.iter().map(move |(l, r)| bracket(v, l, r)));
        let next = if naive {
            let mut e = Echelon::new(n, p);
            for s in seeds {
                e.insert(s);
            }
            e
        } else {
            invariant_closure(n, p, seeds, &conj_refs)
        };
        let ideal = ideal_closure(n, p, next.rows().iter().cloned(), &gens);
        let done = ideal.dim() == 0;
        terms.push(ideal);
        if done {
            return Ok(terms);
        }
        if k >= bound {
            return Err(Error::Consistency(format!(
                "lower Lie power R^[{k}] is nonzero although |G'| + 1 = {bound}"
            )));
        }
        lie_span = next;
    }
}

impl<'g> GroupAlgebra<'g> {
    fn gate(&self, cap: usize) -> Result<LieContext<'g>> {
        if self.dim() > cap {
            return Err(Error::OracleOutOfRange { order: self.dim(), cap });
        }
        LieContext::gated(self.group, self.p as u64)
    }

    /// The lower Lie powers `R^[k]` until the first zero; `index` is `t_L`.
    pub fn lower_lie_chain(&self, cap: usize) -> Result<ChainResult> {
        self.lower_chain_with(cap, false)
    }

    /// As [`Self::lower_lie_chain`] but bracketing each `W_(k-1)` with every
    /// group element.
    pub fn lower_lie_chain_all_elements(&self, cap: usize) -> Result<ChainResult> {
        self.lower_chain_with(cap, true)
    }

    fn lower_chain_with(&self, cap: usize, naive: bool) -> Result<ChainResult> {
        let ctx = self.gate(cap)?;
        let bound = ctx.derived_order() as usize + 1;
        Ok(if self.p == 2 {
            finish(lower_chain::<Gf2Row>(self.group, 2, bound, naive)?)
        } else {
            finish(lower_chain::<GfpRow>(self.group, self.p, bound, naive)?)
        })
    }

    /// The upper Lie powers `R^(k)` until the first zero; `index` is `t^L`.
    pub fn upper_lie_chain(&self, cap: usize) -> Result<ChainResult> {
        self.upper_chain_with(cap, &Translations::generators(self.group))
    }

    /// As [`Self::upper_lie_chain`] but bracketing with every group element
    /// instead of the generators only.
    pub fn upper_lie_chain_all_elements(&self, cap: usize) -> Result<ChainResult> {
        self.upper_chain_with(cap, &Translations::all_elements(self.group))
    }

    fn upper_chain_with(&self, cap: usize, brackets: &Translations) -> Result<ChainResult> {
        let ctx = self.gate(cap)?;
        let bound = ctx.derived_order() as usize + 1;
        Ok(if self.p == 2 {
            finish(upper_chain::<Gf2Row>(self.group, 2, bound, brackets)?)
        } else {
            finish(upper_chain::<GfpRow>(self.group, self.p, bound, brackets)?)
        })
    }

    /// `D_(m) = {g : g - 1 ∈ R^(m)}` read off a computed upper chain.
    pub fn dimension_subgroups_direct(&self, upper: &ChainResult) -> Result<DimensionSeries> {
        let g = self.group;
        let one = self.one();
        let mut terms = Vec::new();
        for power in &upper.terms {
            let members: Vec<usize> = (0..g.order())
                .filter(|&x| power.contains(&self.basis(x).sub(&one)))
                .collect();
            let sub = Subgroup::from_members(g, &members)?;
            let done = sub.is_trivial();
            terms.push(sub);
            if done {
                return Ok(DimensionSeries::new(self.p as u64, terms, SeriesMethod::Direct));
            }
        }
        Err(Error::Consistency(
            "upper chain ended before the dimension series".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Generators, Matrix, Permutation};

    fn perm_group(degree: usize, gens: &[Vec<Vec<u32>>]) -> GroupTable {
        let ps = gens
            .iter()
            .map(|c| Permutation::from_cycles(degree, c).unwrap())
            .collect();
        GroupTable::build(&Generators::Permutations(ps), 4096).unwrap()
    }

    fn d8() -> GroupTable {
        perm_group(4, &[vec![vec![1, 2, 3, 4]], vec![vec![1, 3]]])
    }

    fn d16() -> GroupTable {
        perm_group(
            8,
            &[
                vec![vec![1, 2, 3, 4, 5, 6, 7, 8]],
                vec![vec![2, 8], vec![3, 7], vec![4, 6]],
            ],
        )
    }

    #[test]
    fn abelian_group_has_index_two() {
        let g = perm_group(6, &[vec![vec![1, 2, 3, 4]], vec![vec![5, 6]]]);
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let lower = a.lower_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
        let upper = a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!((lower.index, upper.index), (2, 2));
        assert_eq!(lower.dims, vec![0]);
    }

    #[test]
    fn dihedral_eight_indices() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        assert_eq!(a.lower_lie_chain(DEFAULT_ORACLE_CAP).unwrap().index, 3);
        assert_eq!(a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap().index, 3);
    }

    #[test]
    fn generator_brackets_give_the_same_upper_chain() {
        for g in [d8(), d16()] {
            let a = GroupAlgebra::new(&g, 2).unwrap();
            let fast = a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
            let slow = a.upper_lie_chain_all_elements(DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(fast.dims, slow.dims);
            for (x, y) in fast.terms.iter().zip(&slow.terms) {
                assert!(x.is_subspace_of(y) && y.is_subspace_of(x));
            }
        }
    }

    #[test]
    fn class_representatives_give_the_same_lower_chain() {
        let x = Matrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let y = Matrix::from_rows(3, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let heis3 = GroupTable::build(&Generators::Matrices(vec![x, y]), 4096).unwrap();
        for (g, p) in [(d8(), 2), (d16(), 2), (heis3, 3)] {
            let a = GroupAlgebra::new(&g, p).unwrap();
            let fast = a.lower_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
            let slow = a.lower_lie_chain_all_elements(DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(fast.dims, slow.dims);
            for (x, y) in fast.terms.iter().zip(&slow.terms) {
                assert!(x.is_subspace_of(y) && y.is_subspace_of(x));
            }
        }
    }

    #[test]
    fn lower_powers_lie_inside_upper_powers() {
        let g = d16();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let lower = a.lower_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
        let upper = a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(upper.index, 5);
        assert!(lower.index <= upper.index);
        for (k, l) in lower.terms.iter().enumerate() {
            if let Some(u) = upper.terms.get(k) {
                assert!(l.is_subspace_of(u), "R^[{}] not inside R^({})", k + 1, k + 1);
            }
        }
        for w in upper.terms.windows(2) {
            assert!(w[1].is_subspace_of(&w[0]));
        }
    }

    #[test]
    fn direct_dimension_subgroups_of_d16() {
        let g = d16();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let upper = a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap();
        let direct = a.dimension_subgroups_direct(&upper).unwrap();
        assert_eq!(direct.orders(), vec![16, 4, 2, 1]);
        assert_eq!(direct.term(2).unwrap(), &g.derived_subgroup());
    }

    #[test]
    fn heisenberg_three_in_characteristic_three() {
        let x = Matrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let y = Matrix::from_rows(3, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let g = GroupTable::build(&Generators::Matrices(vec![x, y]), 4096).unwrap();
        let a = GroupAlgebra::new(&g, 3).unwrap();
        // Cyclic G' of order 3 gives the maximal index |G'| + 1.
        assert_eq!(a.upper_lie_chain(DEFAULT_ORACLE_CAP).unwrap().index, 4);
        assert_eq!(a.lower_lie_chain(DEFAULT_ORACLE_CAP).unwrap().index, 4);
    }

    #[test]
    fn oracle_cap_and_gate_are_enforced() {
        let g = d16();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        assert_eq!(
            a.upper_lie_chain(8).unwrap_err(),
            Error::OracleOutOfRange { order: 16, cap: 8 }
        );
        let s3 = perm_group(3, &[vec![vec![1, 2, 3]], vec![vec![1, 2]]]);
        let a = GroupAlgebra::new(&s3, 3).unwrap();
        assert!(matches!(a.lower_lie_chain(256), Err(Error::NotLieNilpotent(_))));
    }
}
