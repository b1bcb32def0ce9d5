//! Lie dimension subgroups `D_(m)(G)` and the upper Lie nilpotency index of
//! `F_p[G]` obtained from them through Jennings' formula.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{exact_log, factorize, CentralSeries, GroupTable, Subgroup};

/// A group that has passed the Lie nilpotency gate for characteristic `p`:
/// `G` is nilpotent and `G'` is a `p`-group.
#[derive(Clone, Debug)]
pub struct LieContext<'g> {
    group: &'g GroupTable,
    p: u64,
    lcs: CentralSeries,
    /// `n` with `|G'| = p^n`.
    n: u32,
    /// `l` with `exp(G') = p^l`.
    exp_log: u32,
}

/// Outcome of the gate, kept as a status rather than an error so that
/// non-nilpotent input can be reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStatus {
    LieNilpotent,
    NotNilpotent,
    CommutatorNotPGroup,
}

impl fmt::Display for GateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateStatus::LieNilpotent => "Lie nilpotent",
            GateStatus::NotNilpotent => "not Lie nilpotent (G is not nilpotent)",
            GateStatus::CommutatorNotPGroup => "not Lie nilpotent (G' is not a p-group)",
        })
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p) == vec![(p, 1)]
}

/// The characteristic to analyze `G` in: the prime dividing `|G'|` when `G'`
/// is a nontrivial prime-power group, else the smallest prime dividing `|G|`
/// (2 for the trivial group). For `G'` of mixed order no characteristic
/// passes the gate and the smallest prime of `|G'|` is returned.
pub fn natural_characteristic(g: &GroupTable, derived: &Subgroup) -> u64 {
    let source = if derived.is_trivial() {
        g.order()
    } else {
        derived.order()
    };
    factorize(source as u64).first().map(|&(q, _)| q).unwrap_or(2)
}

impl<'g> LieContext<'g> {
    /// Evaluates the gate: `F_p[G]` is Lie nilpotent iff `G` is nilpotent and
    /// `G'` is a finite `p`-group.
    pub fn new(group: &'g GroupTable, p: u64) -> std::result::Result<Self, GateStatus> {
        assert!(is_prime(p), "characteristic {p} is not prime");
        let lcs = group.lower_central_series();
        if !lcs.is_nilpotent() {
            return Err(GateStatus::NotNilpotent);
        }
        let derived = lcs.gamma(2);
        let n = exact_log(derived.order() as u64, p).ok_or(GateStatus::CommutatorNotPGroup)?;
        let exp_log = exact_log(group.exponent(derived), p).expect("exponent of a p-group");
        Ok(LieContext {
            group,
            p,
            lcs,
            n,
            exp_log,
        })
    }

    /// [`LieContext::new`] with the gate failure turned into an error.
    pub fn gated(group: &'g GroupTable, p: u64) -> Result<Self> {
        Self::new(group, p).map_err(|s| Error::NotLieNilpotent(s.to_string()))
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn exp_log(&self) -> u32 {
        self.exp_log
    }

    pub fn derived_order(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn lower_central_series(&self) -> &CentralSeries {
        &self.lcs
    }

    pub fn class(&self) -> usize {
        self.lcs.class().expect("gated groups are nilpotent")
    }

    pub fn derived(&self) -> &Subgroup {
        self.lcs.gamma(2)
    }

    /// Terms beyond this count signal an engine bug.
    fn term_cap(&self) -> usize {
        self.derived_order() as usize + 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMethod {
    Recursive,
    Product,
    Direct,
}

/// `D_(1) ⊇ D_(2) ⊇ … ⊇ D_(T) = {1}`, stored up to the first trivial term.
#[derive(Clone, Debug)]
pub struct DimensionSeries {
    p: u64,
    terms: Vec<Subgroup>,
    method: SeriesMethod,
}

impl DimensionSeries {
    pub(crate) fn new(p: u64, terms: Vec<Subgroup>, method: SeriesMethod) -> Self {
        DimensionSeries { p, terms, method }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn method(&self) -> SeriesMethod {
        self.method
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    /// `D_(m)` for `m ≥ 1`; trivial past the stored terms.
    pub fn term(&self, m: usize) -> Option<&Subgroup> {
        assert!(m >= 1, "dimension subgroups are 1-indexed");
        self.terms.get(m - 1)
    }

    pub fn is_trivial_at(&self, m: usize) -> bool {
        self.term(m).is_none_or(Subgroup::is_trivial)
    }

    /// Term-by-term equality of the subgroups, ignoring the method tag.
    pub fn same_terms(&self, other: &DimensionSeries) -> bool {
        self.terms == other.terms
    }

    pub fn orders(&self) -> Vec<usize> {
        self.terms.iter().map(Subgroup::order).collect()
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `D_(m+1) = ∏_{(j-1)p^i ≥ m} γ_j(G)^{p^i}`.
///
/// For fixed `j` the factor with the least admissible `i` contains the
/// others, and factors with `j > cl(G)` or `p^i ≥ exp(G')` are trivial.
pub fn dimension_series_product(ctx: &LieContext) -> DimensionSeries {
    let g = ctx.group;
    let p = ctx.p;
    let cl = ctx.class();
    let exp = p.pow(ctx.exp_log);
    let mut powers: HashMap<(usize, u32), Subgroup> = HashMap::new();
    let mut terms = vec![Subgroup::whole(g)];
    let mut m = 1usize;
    while !terms.last().expect("nonempty").is_trivial() {
        assert!(terms.len() <= ctx.term_cap(), "dimension series failed to terminate");
        let mut acc = Subgroup::trivial(g);
        for j in 2..=cl {
            // least i with (j-1) p^i >= m
            let (mut i, mut q) = (0u32, 1u64);
            while ((j - 1) as u64) * q < m as u64 {
                i += 1;
                q *= p;
            }
            if q >= exp && q > 1 {
                continue;
            }
            let factor = powers
                .entry((j, i))
                .or_insert_with(|| g.power_subgroup(ctx.lcs.gamma(j), q).expect("same parent"));
            acc = g.subgroup_product(&acc, factor).expect("verbal subgroups are normal");
        }
        terms.push(acc);
        m += 1;
    }
    DimensionSeries::new(p, terms, SeriesMethod::Product)
}

/// `D_(1) = G`, `D_(2) = G'`, `D_(m+1) = (D_(m), G) · D_(⌈m/p⌉+1)^p` for `m ≥ 2`.
pub fn dimension_series_recursive(ctx: &LieContext) -> DimensionSeries {
    let g = ctx.group;
    let whole = Subgroup::whole(g);
    let mut terms = vec![whole.clone(), ctx.derived().clone()];
    if terms[1].is_trivial() {
        return DimensionSeries::new(ctx.p, terms, SeriesMethod::Recursive);
    }
    let mut m = 2usize;
    loop {
        assert!(terms.len() <= ctx.term_cap(), "dimension series failed to terminate");
        let comm = g.commutator_subgroup(&terms[m - 1], &whole).expect("same parent");
        let back = ceil_div(m, ctx.p as usize) + 1;
        let pow = g.power_subgroup(&terms[back - 1], ctx.p).expect("same parent");
        let next = g.subgroup_product(&comm, &pow).expect("both factors normal");
        let done = next.is_trivial();
        terms.push(next);
        if done {
            return DimensionSeries::new(ctx.p, terms, SeriesMethod::Recursive);
        }
        m += 1;
    }
}

/// The Jennings exponents `d_(k)`, `p^{d_(k)} = [D_(k) : D_(k+1)]`, for
/// `k ≥ 2`. Zero entries are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSequence {
    pub p: u64,
    pub n: u32,
    pub exp_log: u32,
    pub d: BTreeMap<usize, u32>,
}

impl DSequence {
    pub fn from_entries(p: u64, n: u32, exp_log: u32, entries: &[(usize, u32)]) -> DSequence {
        let d = entries.iter().copied().filter(|&(_, v)| v > 0).collect();
        DSequence { p, n, exp_log, d }
    }

    pub fn get(&self, k: usize) -> u32 {
        self.d.get(&k).copied().unwrap_or(0)
    }

    pub fn sum(&self) -> u32 {
        self.d.values().sum()
    }

    /// Largest `k` with `d_(k) ≠ 0`, or 1 when all vanish.
    pub fn top(&self) -> usize {
        self.d.keys().next_back().copied().unwrap_or(1)
    }
}

pub fn d_sequence(ctx: &LieContext, series: &DimensionSeries) -> Result<DSequence> {
    let p = series.p;
    let mut d = BTreeMap::new();
    let terms = series.terms();
    for k in 2..terms.len() {
        let (big, small) = (terms[k - 1].order() as u64, terms[k].order() as u64);
        if big % small != 0 {
            return Err(Error::Consistency(format!("D_({}) is not contained in D_({k})", k + 1)));
        }
        let e = exact_log(big / small, p).ok_or_else(|| {
            Error::Consistency(format!(
                "[D_({k}) : D_({})] = {} is not a power of {p}",
                k + 1,
                big / small
            ))
        })?;
        if e > 0 {
            d.insert(k, e);
        }
    }
    Ok(DSequence {
        p,
        n: ctx.n,
        exp_log: ctx.exp_log,
        d,
    })
}

/// `t^L(KG) = 2 + (p-1) Σ_{m≥1} m · d_(m+1)`.
pub fn upper_index_jennings(ds: &DSequence) -> u64 {
    let weighted: u64 = ds.d.iter().map(|(&k, &v)| (k as u64 - 1) * v as u64).sum();
    2 + (ds.p - 1) * weighted
}

/// Largest divisor of `x` coprime to `p`.
pub fn coprime_part(mut x: u64, p: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    while x.is_multiple_of(p) {
        x /= p;
    }
    x
}

fn is_power_of(m: u64, p: u64) -> bool {
    exact_log(m, p).is_some()
}

/// Which of Shalev's constraints on Jennings sequences failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShalevClause {
    /// `d_(m+1) = 0` with `m` a power of `p` forces `D_(m+1) = 1`.
    PowerOfP,
    /// `d_(m+1) = 0` with `p^{l-1} | m` forces `D_(m+1) = 1`.
    ExponentDivides,
    /// For `p ≥ 5`, a non-maximal index is at most `p^{n-1} + 2p - 1`.
    NonMaximalBound,
    /// A zero below `pm` forces `d_(pm+1) ≤ d_(m+1)`.
    Monotone,
    /// Zeros propagate to every `l ≥ m` with `ν_{p'}(l) ≥ ν_{p'}(m)`.
    CoprimePart,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShalevViolation {
    pub clause: ShalevClause,
    pub m: usize,
    pub detail: String,
}

/// Audits a computed d-sequence against Shalev's theorems. On a correct
/// engine the result is empty.
pub fn shalev_checks(ds: &DSequence, series: &DimensionSeries) -> Vec<ShalevViolation> {
    let p = ds.p;
    let mut out = Vec::new();
    let horizon = (ds.top().max(series.terms().len()) + 1) * p as usize;
    let exp_step = p.pow(ds.exp_log.saturating_sub(1));
    for m in 1..=horizon {
        if ds.get(m + 1) != 0 {
            continue;
        }
        let trivial = series.is_trivial_at(m + 1);
        if is_power_of(m as u64, p) && !trivial {
            out.push(ShalevViolation {
                clause: ShalevClause::PowerOfP,
                m,
                detail: format!("d_({}) = 0 and m = {m} is a power of {p}, but D_({}) ≠ 1", m + 1, m + 1),
            });
        }
        if ds.exp_log >= 1 && (m as u64).is_multiple_of(exp_step) && !trivial {
            out.push(ShalevViolation {
                clause: ShalevClause::ExponentDivides,
                m,
                detail: format!(
                    "d_({}) = 0 and p^(l-1) = {exp_step} divides {m}, but D_({}) ≠ 1",
                    m + 1,
                    m + 1
                ),
            });
        }
        let nu = coprime_part(m as u64, p);
        for l in m..=horizon {
            if coprime_part(l as u64, p) >= nu && ds.get(l + 1) != 0 {
                out.push(ShalevViolation {
                    clause: ShalevClause::CoprimePart,
                    m,
                    detail: format!("d_({}) = 0 but d_({}) = {}", m + 1, l + 1, ds.get(l + 1)),
                });
            }
        }
    }
    for m in 1..=horizon {
        let pm = p as usize * m;
        let has_zero_below = (1..pm).any(|l| ds.get(l + 1) == 0);
        if has_zero_below && ds.get(pm + 1) > ds.get(m + 1) {
            out.push(ShalevViolation {
                clause: ShalevClause::Monotone,
                m,
                detail: format!(
                    "d_({}) = {} > d_({}) = {}",
                    pm + 1,
                    ds.get(pm + 1),
                    m + 1,
                    ds.get(m + 1)
                ),
            });
        }
    }
    // For p ≥ 5 the lower and upper indices coincide, so the bound can be
    // checked on the Jennings value.
    if p >= 5 {
        let t = upper_index_jennings(ds);
        let maximal = p.pow(ds.n) + 1;
        let bound = p.pow(ds.n.saturating_sub(1)) + 2 * p - 1;
        if t < maximal && t > bound {
            out.push(ShalevViolation {
                clause: ShalevClause::NonMaximalBound,
                m: 0,
                detail: format!("t = {t} is below p^n + 1 = {maximal} but above {bound}"),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Generators, Permutation};

    fn perm_group(degree: usize, gens: &[Vec<Vec<u32>>]) -> GroupTable {
        let ps = gens
            .iter()
            .map(|c| Permutation::from_cycles(degree, c).unwrap())
            .collect();
        GroupTable::build(&Generators::Permutations(ps), 4096).unwrap()
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
    fn jennings_formula_on_lemma_sequences() {
        let cases: &[(u64, &[(usize, u32)], u64)] = &[
            (2, &[(2, 3)], 5),
            (5, &[(2, 2)], 10),
            (2, &[(2, 1), (3, 2)], 7),
            (3, &[(2, 2)], 6),
            (2, &[(2, 2), (3, 1)], 6),
            (5, &[(2, 1), (3, 1)], 14),
        ];
        for &(p, entries, expected) in cases {
            let ds = DSequence::from_entries(p, 0, 0, entries);
            assert_eq!(upper_index_jennings(&ds), expected, "p={p} {entries:?}");
        }
    }

    #[test]
    fn d16_series_by_both_formulas() {
        let g = d16();
        let ctx = LieContext::gated(&g, 2).unwrap();
        let prod = dimension_series_product(&ctx);
        let rec = dimension_series_recursive(&ctx);
        assert_eq!(prod.orders(), vec![16, 4, 2, 1]);
        assert!(prod.same_terms(&rec));
        let ds = d_sequence(&ctx, &prod).unwrap();
        assert_eq!(ds.d, BTreeMap::from([(2, 1), (3, 1)]));
        assert_eq!(ds.sum(), ctx.n());
        assert_eq!(upper_index_jennings(&ds), 5);
        assert!(shalev_checks(&ds, &prod).is_empty());
    }

    #[test]
    fn abelian_group_has_trivial_second_term() {
        let g = perm_group(6, &[vec![vec![1, 2, 3, 4]], vec![vec![5, 6]]]);
        let ctx = LieContext::gated(&g, 2).unwrap();
        let prod = dimension_series_product(&ctx);
        assert_eq!(prod.orders(), vec![8, 1]);
        assert!(prod.same_terms(&dimension_series_recursive(&ctx)));
        let ds = d_sequence(&ctx, &prod).unwrap();
        assert!(ds.d.is_empty());
        assert_eq!(upper_index_jennings(&ds), 2);
    }

    #[test]
    fn gate_rejects_non_nilpotent_and_wrong_characteristic() {
        let s3 = perm_group(3, &[vec![vec![1, 2, 3]], vec![vec![1, 2]]]);
        assert_eq!(LieContext::new(&s3, 3).unwrap_err(), GateStatus::NotNilpotent);
        let d8 = perm_group(4, &[vec![vec![1, 2, 3, 4]], vec![vec![1, 3]]]);
        assert_eq!(LieContext::new(&d8, 3).unwrap_err(), GateStatus::CommutatorNotPGroup);
        let err = LieContext::gated(&s3, 2).unwrap_err();
        assert!(err.to_string().starts_with("KG not Lie nilpotent"));
    }

    #[test]
    fn corrupted_sequence_violates_power_of_p_clause() {
        let g = d16();
        let ctx = LieContext::gated(&g, 2).unwrap();
        let series = dimension_series_product(&ctx);
        // d_(3) forced to zero while D_(3) is still nontrivial.
        let ds = DSequence::from_entries(2, 2, 2, &[(2, 1)]);
        let v = shalev_checks(&ds, &series);
        assert!(
            v.iter().any(|x| x.clause == ShalevClause::PowerOfP && x.m == 2),
            "{v:?}"
        );
    }

    #[test]
    fn coprime_part_examples() {
        assert_eq!(coprime_part(12, 2), 3);
        assert_eq!(coprime_part(12, 3), 4);
        assert_eq!(coprime_part(7, 5), 7);
        assert_eq!(coprime_part(25, 5), 1);
    }

    #[test]
    fn ceil_division_is_exact() {
        assert_eq!(ceil_div(2, 2), 1);
        assert_eq!(ceil_div(3, 2), 2);
        assert_eq!(ceil_div(7, 3), 3);
        assert_eq!(ceil_div(9, 3), 3);
    }
}
