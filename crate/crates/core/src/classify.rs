//! Structural conditions for the three exceptional index values, the
//! matching d-sequence shapes, and per-group verification of both
//! directions of each characterization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{GroupAlgebra, UnitGroup, DEFAULT_ORACLE_CAP};
use crate::error::{Error, Result};
use crate::group::{AbelianType, GroupTable, Subgroup};
use crate::lie_dim::{
    d_sequence, dimension_series_product, dimension_series_recursive, natural_characteristic, shalev_checks,
    upper_index_jennings, DSequence, GateStatus, LieContext,
};

/// Which of the three exceptional values a condition pins down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `|G'| - 4p + 5`
    First,
    /// `|G'| - 3p + 4`
    Second,
    /// `|G'| - 2p + 3`
    Third,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::First, Target::Second, Target::Third];

    pub fn value(self, p: u64, derived_order: u64) -> i64 {
        let (q, c) = match self {
            Target::First => (4, 5),
            Target::Second => (3, 4),
            Target::Third => (2, 3),
        };
        derived_order as i64 - q * p as i64 + c
    }

    pub fn formula(self) -> &'static str {
        match self {
            Target::First => "|G'|-4p+5",
            Target::Second => "|G'|-3p+4",
            Target::Third => "|G'|-2p+3",
        }
    }

    /// The target `t` equals, if any.
    pub fn of_index(t: u64, p: u64, derived_order: u64) -> Option<Target> {
        Target::ALL.into_iter().find(|x| x.value(p, derived_order) == t as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "T1.i")]
    T1i,
    #[serde(rename = "T1.ii")]
    T1ii,
    #[serde(rename = "T2.i")]
    T2i,
    #[serde(rename = "T2.ii")]
    T2ii,
    #[serde(rename = "T2.iii")]
    T2iii,
    #[serde(rename = "T3.i")]
    T3i,
    #[serde(rename = "T3.ii")]
    T3ii,
    #[serde(rename = "T3.iii")]
    T3iii,
}

impl ConditionId {
    pub const ALL: [ConditionId; 8] = [
        ConditionId::T1i,
        ConditionId::T1ii,
        ConditionId::T2i,
        ConditionId::T2ii,
        ConditionId::T2iii,
        ConditionId::T3i,
        ConditionId::T3ii,
        ConditionId::T3iii,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::T1i => "T1.i",
            ConditionId::T1ii => "T1.ii",
            ConditionId::T2i => "T2.i",
            ConditionId::T2ii => "T2.ii",
            ConditionId::T2iii => "T2.iii",
            ConditionId::T3i => "T3.i",
            ConditionId::T3ii => "T3.ii",
            ConditionId::T3iii => "T3.iii",
        }
    }

    pub fn target(self) -> Target {
        match self {
            ConditionId::T1i | ConditionId::T1ii => Target::First,
            ConditionId::T2i | ConditionId::T2ii | ConditionId::T2iii => Target::Second,
            _ => Target::Third,
        }
    }

    pub fn describe(self, reading: Reading) -> &'static str {
        match (self, reading) {
            (ConditionId::T1i, _) => "p = 2, cl(G) = 2, G' = C2 x C2 x C2",
            (ConditionId::T1ii, _) => "p = 5, cl(G) = 2, G' = C5 x C5",
            (ConditionId::T2i, _) => "p = 2, cl(G) = 3, G' = C2 x C2 x C2, gamma_3 cyclic",
            (ConditionId::T2ii, Reading::Stated) => "p = 2, G' = C4 x C2, (G')^2 in gamma_3",
            (ConditionId::T2ii, Reading::Corrected) => "p = 2, G' = C4 x C2, gamma_3 in (G')^2",
            (ConditionId::T2iii, _) => "p = 5, cl(G) = 3, G' = C5 x C5",
            (ConditionId::T3i, _) => "p = 2, cl(G) = 3, G' = C2 x C2 x C2, gamma_3 = C2 x C2",
            (ConditionId::T3ii, Reading::Stated) => {
                "p = 2, G' = C4 x C2, gamma_3 = Omega_1(G') or gamma_3 of order 2 other than (G')^2"
            }
            (ConditionId::T3ii, Reading::Corrected) => {
                "p = 2, cl(G) = 3, G' = C4 x C2, gamma_3 = Omega_1(G') or gamma_3 of order 2 other than (G')^2"
            }
            (ConditionId::T3iii, Reading::Stated) => "p = 3, cl(G) = 3, G' = C3 x C3",
            (ConditionId::T3iii, Reading::Corrected) => "p = 3, cl(G) = 2, G' = C3 x C3",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Spec(format!("unknown condition id {s:?}")))
    }
}

/// How the conditions are read. `Stated` takes the conditions word for word;
/// `Corrected` differs in three places, each forced by the d-sequence
/// computation:
/// - T2.ii: `γ_3 ⊆ (G')^2` instead of `(G')^2 ⊆ γ_3` (`D_(3) = γ_3 (G')^2`
///   must have order 2);
/// - T3.ii: `cl(G) = 3` added (when `γ_3 = Ω_1(G')` is not central,
///   `D_(4) = γ_4 ≠ 1`);
/// - T3.iii: `cl(G) = 2` instead of `cl(G) = 3` (`d_(2) = 2` forces
///   `γ_3 ⊆ D_(3) = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    Stated,
    Corrected,
}

/// Invariant description of `γ_3(G)` inside `G'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gamma3 {
    pub order: usize,
    pub is_cyclic: bool,
    pub equals_gprime_squared: bool,
    pub equals_omega1: bool,
}

/// The data every condition predicate reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub p: u64,
    pub cl: usize,
    /// `None` when `G'` is nonabelian.
    pub gprime_type: Option<AbelianType>,
    pub gamma3: Gamma3,
    pub gamma3_type: Option<AbelianType>,
    /// `(G')^2 ⊆ γ_3(G)`.
    pub squares_in_gamma3: bool,
    /// `γ_3(G) ⊆ (G')^2`.
    pub gamma3_in_squares: bool,
}

pub fn structure(ctx: &LieContext) -> Structure {
    let g = ctx.group();
    let lcs = ctx.lower_central_series();
    let gp = lcs.gamma(2);
    let g3 = lcs.gamma(3);
    let gprime_type = g.abelian_type(gp).ok();
    let omega1 = gprime_type.as_ref().map(|_| g.omega1(gp, ctx.p()).expect("abelian"));
    let squared = g.power_subgroup(gp, 2).expect("same parent");
    Structure {
        p: ctx.p(),
        cl: ctx.class(),
        gamma3: Gamma3 {
            order: g3.order(),
            is_cyclic: g.is_cyclic(g3),
            equals_gprime_squared: *g3 == squared,
            equals_omega1: omega1.as_ref() == Some(g3),
        },
        gamma3_type: g.abelian_type(g3).ok(),
        squares_in_gamma3: squared.is_subset_of(g3),
        gamma3_in_squares: g3.is_subset_of(&squared),
        gprime_type,
    }
}

fn has_type(t: &Option<AbelianType>, factors: &[u64]) -> bool {
    t.as_ref().is_some_and(|t| t.factors() == factors)
}

pub fn conditions_for(s: &Structure, reading: Reading) -> BTreeSet<ConditionId> {
    let g = &s.gprime_type;
    let g3 = &s.gamma3;
    let stated = reading == Reading::Stated;
    let e8 = has_type(g, &[2, 2, 2]);
    let c42 = has_type(g, &[4, 2]);
    let e25 = has_type(g, &[5, 5]);
    let mut out = BTreeSet::new();
    let mut put = |ok: bool, id| {
        if ok {
            out.insert(id);
        }
    };
    put(s.p == 2 && s.cl == 2 && e8, ConditionId::T1i);
    put(s.p == 5 && s.cl == 2 && e25, ConditionId::T1ii);
    put(s.p == 2 && s.cl == 3 && e8 && g3.is_cyclic, ConditionId::T2i);
    let t2ii = if stated {
        s.squares_in_gamma3
    } else {
        s.gamma3_in_squares
    };
    put(s.p == 2 && c42 && t2ii, ConditionId::T2ii);
    put(s.p == 5 && s.cl == 3 && e25, ConditionId::T2iii);
    put(
        s.p == 2 && s.cl == 3 && e8 && has_type(&s.gamma3_type, &[2, 2]),
        ConditionId::T3i,
    );
    // ⟨a^2⟩ = (G')^2 is characteristic in ⟨a⟩ × ⟨b⟩ = C4 x C2; the other two
    // order-2 subgroups ⟨b⟩, ⟨a^2 b⟩ form one automorphism orbit and
    // ⟨a^2⟩ × ⟨b⟩ = Ω_1(G').
    let t3ii = g3.equals_omega1 || (g3.order == 2 && !g3.equals_gprime_squared);
    put(s.p == 2 && c42 && t3ii && (stated || s.cl == 3), ConditionId::T3ii);
    let t3iii_class = if stated { 3 } else { 2 };
    put(
        s.p == 3 && s.cl == t3iii_class && has_type(g, &[3, 3]),
        ConditionId::T3iii,
    );
    out
}

/// Conditions matched under the corrected reading.
pub fn condition_match(ctx: &LieContext) -> BTreeSet<ConditionId> {
    conditions_for(&structure(ctx), Reading::Corrected)
}

/// The exact d-vectors that realize each exceptional value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LemmaCase {
    #[serde(rename = "L2.i")]
    L2i,
    #[serde(rename = "L2.ii")]
    L2ii,
    #[serde(rename = "L2.iii")]
    L2iii,
    #[serde(rename = "L4.i")]
    L4i,
    #[serde(rename = "L4.ii")]
    L4ii,
    #[serde(rename = "L4.iii")]
    L4iii,
    #[serde(rename = "L7.i")]
    L7i,
    #[serde(rename = "L7.ii")]
    L7ii,
}

impl LemmaCase {
    pub const ALL: [LemmaCase; 8] = [
        LemmaCase::L2i,
        LemmaCase::L2ii,
        LemmaCase::L2iii,
        LemmaCase::L4i,
        LemmaCase::L4ii,
        LemmaCase::L4iii,
        LemmaCase::L7i,
        LemmaCase::L7ii,
    ];

    /// `(p, n, nonzero d entries)`.
    pub fn shape(self) -> (u64, u32, &'static [(usize, u32)]) {
        match self {
            LemmaCase::L2i => (2, 3, &[(2, 3)]),
            LemmaCase::L2ii => (3, 3, &[(2, 1), (4, 1), (6, 1)]),
            LemmaCase::L2iii => (5, 2, &[(2, 2)]),
            LemmaCase::L4i => (2, 3, &[(2, 2), (3, 1)]),
            LemmaCase::L4ii => (3, 3, &[(2, 1), (4, 1), (7, 1)]),
            LemmaCase::L4iii => (5, 2, &[(2, 1), (3, 1)]),
            LemmaCase::L7i => (2, 3, &[(2, 1), (3, 2)]),
            LemmaCase::L7ii => (3, 2, &[(2, 2)]),
        }
    }

    pub fn target(self) -> Target {
        match self {
            LemmaCase::L2i | LemmaCase::L2ii | LemmaCase::L2iii => Target::First,
            LemmaCase::L4i | LemmaCase::L4ii | LemmaCase::L4iii => Target::Second,
            LemmaCase::L7i | LemmaCase::L7ii => Target::Third,
        }
    }

    /// Shapes that are arithmetically possible but excluded for actual
    /// groups.
    pub fn is_excluded(self) -> bool {
        matches!(self, LemmaCase::L2ii | LemmaCase::L4ii)
    }
}

impl fmt::Display for LemmaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

pub fn lemma_d_match(p: u64, n: u32, ds: &DSequence) -> BTreeSet<LemmaCase> {
    LemmaCase::ALL
        .into_iter()
        .filter(|c| {
            let (cp, cn, entries) = c.shape();
            cp == p && cn == n && ds.d.len() == entries.len() && entries.iter().all(|&(k, v)| ds.get(k) == v)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Ran,
    Skipped,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::NotApplicable => "not applicable",
        })
    }
}

/// One verified property, with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: if passed { String::new() } else { detail.into() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct AnalysisReport {
    pub name: String,
    pub order: usize,
    pub p: u64,
    pub n: Option<u32>,
    pub l: Option<u32>,
    pub cl: Option<usize>,
    pub gate: GateStatus,
    pub gprime_type: Option<AbelianType>,
    pub gamma3: Option<Gamma3>,
    pub d_sequence: Option<BTreeMap<usize, u32>>,
    pub tU_jennings: Option<u64>,
    pub tU_direct: Option<u64>,
    pub tL_direct: Option<u64>,
    pub unit_class: Option<u64>,
    pub matches: Vec<ConditionId>,
    /// Conditions matched when read word for word.
    pub stated_matches: Vec<ConditionId>,
    pub verdict: Verdict,
    pub oracle: OracleStatus,
    pub series: Option<Vec<usize>>,
    pub lemma_cases: Vec<LemmaCase>,
    pub checks: Vec<Check>,
}

impl AnalysisReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `|G'|`, when the gate passed.
    pub fn derived_order(&self) -> Option<u64> {
        self.n.map(|n| self.p.pow(n))
    }

    /// The target attained by the upper index, if any.
    pub fn upper_target(&self) -> Option<Target> {
        Target::of_index(self.tU_jennings?, self.p, self.derived_order()?)
    }

    /// The target attained by the lower index, if the oracle ran.
    pub fn lower_target(&self) -> Option<Target> {
        Target::of_index(self.tL_direct?, self.p, self.derived_order()?)
    }

    /// Appends a check and refreshes the verdict.
    pub fn push_check(&mut self, check: Check) {
        self.checks.push(check);
        self.refresh_verdict();
    }

    fn refresh_verdict(&mut self) {
        if self.gate == GateStatus::LieNilpotent || !self.checks.is_empty() {
            self.verdict = if self.checks.iter().all(|c| c.passed) {
                Verdict::Consistent
            } else {
                Verdict::Inconsistent
            };
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    /// Characteristic; `None` picks the prime of `G'`.
    pub p: Option<u64>,
    /// Largest `|G|` the direct ideal oracle runs on.
    pub oracle_cap: usize,
    /// Fail instead of skipping when `|G|` exceeds `oracle_cap`.
    pub require_oracle: bool,
    /// Enumerate `U(F_2[G])` when it has at most this many elements.
    pub unit_cap: Option<u64>,
    /// Fail instead of skipping when the unit group exceeds `unit_cap`.
    pub require_units: bool,
    /// Random triples for the commutator identity.
    pub identity_samples: usize,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            p: None,
            oracle_cap: DEFAULT_ORACLE_CAP,
            require_oracle: false,
            unit_cap: None,
            require_units: false,
            identity_samples: 1000,
            seed: 0x5eed,
        }
    }
}

/// `(xy, z) = (x, z) · ((x, z), y) · (y, z)` on sampled triples, or on all
/// triples when there are fewer than `samples`.
pub fn commutator_identity_check(g: &GroupTable, samples: usize, seed: u64) -> Check {
    let n = g.order();
    let holds = |x: usize, y: usize, z: usize| {
        let xz = g.comm(x, z);
        g.comm(g.mul(x, y), z) == g.mul(g.mul(xz, g.comm(xz, y)), g.comm(y, z))
    };
    let mut bad = None;
    let mut tried = 0usize;
    if n.checked_pow(3).is_some_and(|c| c <= samples) {
        'all: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    tried += 1;
                    if !holds(x, y, z) {
                        bad = Some((x, y, z));
                        break 'all;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        for _ in 0..samples {
            let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            tried += 1;
            if !holds(x, y, z) {
                bad = Some((x, y, z));
                break;
            }
        }
    }
    Check::new(
        "commutator_identity",
        bad.is_none(),
        format!("fails at {bad:?} after {tried} triples"),
    )
}

fn lcs_checks(g: &GroupTable, terms: &[Subgroup]) -> Check {
    let bad = terms
        .windows(2)
        .position(|w| !w[1].is_subset_of(&w[0]) || !g.is_normal(&w[1]));
    Check::new(
        "lower_central_series",
        bad.is_none(),
        format!(
            "gamma_{} is not a normal subgroup of gamma_{}",
            bad.map_or(0, |i| i + 2),
            bad.map_or(0, |i| i + 1)
        ),
    )
}

/// Full analysis of one group. Errors only for resource caps the caller
/// asked to enforce.
pub fn analyze(name: &str, g: &GroupTable, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let derived = g.derived_subgroup();
    let p = opts.p.unwrap_or_else(|| natural_characteristic(g, &derived));
    let mut report = AnalysisReport {
        name: name.into(),
        order: g.order(),
        p,
        n: None,
        l: None,
        cl: g.lower_central_series().class(),
        gate: GateStatus::LieNilpotent,
        gprime_type: None,
        gamma3: None,
        d_sequence: None,
        tU_jennings: None,
        tU_direct: None,
        tL_direct: None,
        unit_class: None,
        matches: Vec::new(),
        stated_matches: Vec::new(),
        verdict: Verdict::NotApplicable,
        oracle: OracleStatus::NotApplicable,
        series: None,
        lemma_cases: Vec::new(),
        checks: Vec::new(),
    };
    report
        .checks
        .push(commutator_identity_check(g, opts.identity_samples, opts.seed));
    report.checks.push(lcs_checks(g, g.lower_central_series().terms()));
    let ctx = match LieContext::new(g, p) {
        Ok(ctx) => ctx,
        Err(status) => {
            report.gate = status;
            report.verdict = if report.checks.iter().all(|c| c.passed) {
                Verdict::NotApplicable
            } else {
                Verdict::Inconsistent
            };
            return Ok(report);
        }
    };
    let s = structure(&ctx);
    let derived_order = ctx.derived_order();
    report.n = Some(ctx.n());
    report.l = Some(ctx.exp_log());
    report.gprime_type = s.gprime_type.clone();
    report.gamma3 = Some(s.gamma3.clone());
    report.matches = conditions_for(&s, Reading::Corrected).into_iter().collect();
    report.stated_matches = conditions_for(&s, Reading::Stated).into_iter().collect();

    let product = dimension_series_product(&ctx);
    let recursive = dimension_series_recursive(&ctx);
    let ds = d_sequence(&ctx, &recursive)?;
    let t_jen = upper_index_jennings(&ds);
    report.series = Some(recursive.orders());
    report.d_sequence = Some(ds.d.clone());
    report.tU_jennings = Some(t_jen);
    report.lemma_cases = lemma_d_match(p, ctx.n(), &ds).into_iter().collect();

    let mut checks = Vec::new();
    checks.push(Check::new(
        "series_product_vs_recursive",
        product.same_terms(&recursive),
        format!("product {:?} vs recursive {:?}", product.orders(), recursive.orders()),
    ));
    checks.push(Check::new(
        "series_base_terms",
        recursive.term(1).is_some_and(|t| t.order() == g.order()) && recursive.term(2) == Some(ctx.derived()),
        "D_(1) != G or D_(2) != G'",
    ));
    checks.push(Check::new(
        "d_sum",
        ds.sum() == ctx.n(),
        format!("sum of d = {} but n = {}", ds.sum(), ctx.n()),
    ));
    checks.push(Check::new(
        "jennings_bounds",
        (2..=derived_order + 1).contains(&t_jen),
        format!("t^L = {t_jen} outside [2, {}]", derived_order + 1),
    ));
    if g.is_cyclic(ctx.derived()) {
        checks.push(Check::new(
            "cyclic_derived_maximal",
            t_jen == derived_order + 1,
            format!("G' cyclic but t^L = {t_jen} != |G'| + 1"),
        ));
    }
    let violations = shalev_checks(&ds, &recursive);
    checks.push(Check::new(
        "shalev",
        violations.is_empty(),
        violations
            .iter()
            .map(|v| format!("{:?} at m = {}: {}", v.clause, v.m, v.detail))
            .collect::<Vec<_>>()
            .join("; "),
    ));
    checks.push(Check::new(
        "no_nonabelian_derived_of_order_8",
        !(derived_order == 8 && s.gprime_type.is_none()),
        "nilpotent group with nonabelian commutator subgroup of order 8",
    ));

    // Direct oracle.
    if g.order() <= opts.oracle_cap {
        let alg = GroupAlgebra::new(g, p)?;
        let upper = alg.upper_lie_chain(opts.oracle_cap)?;
        let lower = alg.lower_lie_chain(opts.oracle_cap)?;
        let direct = alg.dimension_subgroups_direct(&upper)?;
        let (tu, tl) = (upper.index as u64, lower.index as u64);
        report.oracle = OracleStatus::Ran;
        report.tU_direct = Some(tu);
        report.tL_direct = Some(tl);
        checks.push(Check::new(
            "oracle_upper_index",
            tu == t_jen,
            format!("direct t^L = {tu} but Jennings gives {t_jen}"),
        ));
        checks.push(Check::new(
            "series_direct",
            direct.same_terms(&recursive),
            format!("direct {:?} vs recursive {:?}", direct.orders(), recursive.orders()),
        ));
        let inclusions = (1..=upper.terms.len().max(lower.terms.len())).all(|k| match (lower.term(k), upper.term(k)) {
            (Some(l), Some(u)) => l.is_subspace_of(u),
            (Some(l), None) => l.is_zero(),
            _ => true,
        });
        checks.push(Check::new(
            "lower_in_upper",
            inclusions,
            "some R^[k] is not inside R^(k)",
        ));
        let descending = |c: &crate::algebra::ChainResult| c.terms.windows(2).all(|w| w[1].is_subspace_of(&w[0]));
        checks.push(Check::new(
            "chains_descending",
            descending(&upper) && descending(&lower),
            "a Lie power chain is not descending",
        ));
        checks.push(Check::new(
            "lower_le_upper",
            tl <= tu,
            format!("t_L = {tl} > t^L = {tu}"),
        ));
        if p >= 5 {
            checks.push(Check::new(
                "large_p_equal",
                tl == tu,
                format!("p = {p} but t_L = {tl} != t^L = {tu}"),
            ));
        }
    } else if opts.require_oracle {
        return Err(Error::OracleOutOfRange {
            order: g.order(),
            cap: opts.oracle_cap,
        });
    } else {
        report.oracle = OracleStatus::Skipped;
    }

    // Units.
    if let Some(cap) = opts.unit_cap {
        match UnitGroup::new(g, cap) {
            Ok(units) if p == 2 => {
                let c = units.class()? as u64;
                report.unit_class = Some(c);
                if let Some(tl) = report.tL_direct {
                    checks.push(Check::new(
                        "unit_class",
                        c + 1 == tl,
                        format!("cl(U) = {c} but t_L - 1 = {}", tl - 1),
                    ));
                }
            }
            Err(e) if opts.require_units => return Err(e),
            _ if opts.require_units => {
                return Err(Error::AlgebraMismatch(
                    "unit groups are enumerated over F_2 only".into(),
                ))
            }
            _ => {}
        }
    }

    report.checks.extend(checks);
    report.checks.extend(iff_checks(&report));
    report.checks.extend(lemma_checks(&report));
    report.refresh_verdict();
    Ok(report)
}

/// Both directions of each characterization, for every index computed.
pub fn iff_checks(r: &AnalysisReport) -> Vec<Check> {
    let Some(order) = r.derived_order() else {
        return Vec::new();
    };
    let p = r.p;
    let matched: BTreeSet<Target> = r.matches.iter().map(|c| c.target()).collect();
    let mut out = vec![Check::new(
        "single_target",
        matched.len() <= 1,
        format!("conditions for several targets match: {:?}", r.matches),
    )];
    let indices = [
        ("tU_jennings", r.tU_jennings),
        ("tU_direct", r.tU_direct),
        ("tL_direct", r.tL_direct),
    ];
    for (label, t) in indices {
        let Some(t) = t else { continue };
        for c in &r.matches {
            let v = c.target().value(p, order);
            out.push(Check::new(
                &format!("{c}_implies_{label}"),
                t as i64 == v,
                format!(
                    "{c} matches, so {} = {v} expected, but {label} = {t}",
                    c.target().formula()
                ),
            ));
        }
        if let Some(hit) = Target::of_index(t, p, order) {
            out.push(Check::new(
                &format!("{label}_implies_condition"),
                matched.contains(&hit),
                format!("{label} = {t} = {} but no matching condition", hit.formula()),
            ));
        }
    }
    if !r.matches.is_empty() {
        if let (Some(u), Some(l)) = (r.tU_direct, r.tL_direct) {
            out.push(Check::new(
                "matched_indices_equal",
                u == l,
                format!("t^L = {u} but t_L = {l}"),
            ));
        }
    }
    out
}

/// d-sequence shapes: attaining a target is equivalent to realizing one of
/// its shapes, and the excluded shapes never occur.
pub fn lemma_checks(r: &AnalysisReport) -> Vec<Check> {
    if r.tU_jennings.is_none() {
        return Vec::new();
    }
    let hit = r.upper_target();
    let shape_targets: BTreeSet<Target> = r.lemma_cases.iter().map(|c| c.target()).collect();
    let expected: BTreeSet<Target> = hit.into_iter().collect();
    let excluded: Vec<_> = r.lemma_cases.iter().filter(|c| c.is_excluded()).collect();
    vec![
        Check::new(
            "lemma_shape",
            shape_targets == expected && r.lemma_cases.len() == expected.len(),
            format!("target {hit:?} but d-sequence shapes {:?}", r.lemma_cases),
        ),
        Check::new(
            "lemma_excluded_shape",
            excluded.is_empty(),
            format!("excluded shape {excluded:?} realized"),
        ),
    ]
}

/// One target value across a corpus: who attains it and who matches its
/// conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub target: Target,
    pub formula: String,
    /// Groups whose Jennings upper index equals the target.
    pub attained_upper: Vec<String>,
    /// Groups whose direct lower index equals the target.
    pub attained_lower: Vec<String>,
    /// Groups matching one of the target's conditions.
    pub matched: Vec<String>,
    /// Matched groups the direct oracle ran on.
    pub matched_with_oracle: Vec<String>,
    pub upper_iff: bool,
    pub lower_iff: bool,
}

/// Corpus-wide view of the characterizations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub groups: usize,
    pub gated: usize,
    pub oracle_ran: usize,
    pub inconsistent: Vec<String>,
    pub targets: Vec<TargetSummary>,
    /// Condition id to the groups witnessing it.
    pub coverage: BTreeMap<ConditionId, Vec<String>>,
    /// Conditions without a witness: only the "index forces condition"
    /// direction is exercised for them.
    pub one_directional: Vec<ConditionId>,
    /// Nilpotency classes seen among groups matching T2.ii.
    pub t2ii_classes: BTreeSet<usize>,
    /// Excluded d-sequence shapes that occurred.
    pub excluded_shapes: Vec<String>,
    /// Groups on which the word-for-word reading of the conditions
    /// disagrees with the computed index.
    pub errata: Vec<Erratum>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Erratum {
    pub group: String,
    pub stated_matches: Vec<ConditionId>,
    pub matches: Vec<ConditionId>,
    pub tU: u64,
    /// The exceptional value `tU` equals, if any.
    pub attains: Option<Target>,
}

/// The erratum a report exhibits, if the stated conditions predict a
/// different target from the one computed.
pub fn erratum(r: &AnalysisReport) -> Option<Erratum> {
    let t = r.tU_jennings?;
    let attains = r.upper_target();
    let predicted: BTreeSet<Target> = r.stated_matches.iter().map(|c| c.target()).collect();
    (predicted != attains.into_iter().collect()).then(|| Erratum {
        group: r.name.clone(),
        stated_matches: r.stated_matches.clone(),
        matches: r.matches.clone(),
        tU: t,
        attains,
    })
}

impl CorpusSummary {
    pub fn is_clean(&self) -> bool {
        self.inconsistent.is_empty()
            && self.excluded_shapes.is_empty()
            && self.targets.iter().all(|t| t.upper_iff && t.lower_iff)
    }
}

pub fn summarize(reports: &[AnalysisReport]) -> CorpusSummary {
    let mut sorted: Vec<&AnalysisReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let names = |f: &dyn Fn(&AnalysisReport) -> bool| -> Vec<String> {
        sorted.iter().filter(|r| f(r)).map(|r| r.name.clone()).collect()
    };
    let targets = Target::ALL
        .into_iter()
        .map(|t| {
            let matches_t = |r: &AnalysisReport| r.matches.iter().any(|c| c.target() == t);
            let attained_upper = names(&|r| r.upper_target() == Some(t));
            let attained_lower = names(&|r| r.lower_target() == Some(t));
            let matched = names(&matches_t);
            let matched_with_oracle = names(&|r| matches_t(r) && r.oracle == OracleStatus::Ran);
            TargetSummary {
                target: t,
                formula: t.formula().into(),
                upper_iff: attained_upper == matched,
                lower_iff: attained_lower == matched_with_oracle,
                attained_upper,
                attained_lower,
                matched,
                matched_with_oracle,
            }
        })
        .collect();
    let coverage: BTreeMap<ConditionId, Vec<String>> = ConditionId::ALL
        .into_iter()
        .map(|c| (c, names(&|r| r.matches.contains(&c))))
        .collect();
    CorpusSummary {
        groups: sorted.len(),
        gated: sorted.iter().filter(|r| r.gate == GateStatus::LieNilpotent).count(),
        oracle_ran: sorted.iter().filter(|r| r.oracle == OracleStatus::Ran).count(),
        inconsistent: names(&|r| r.verdict == Verdict::Inconsistent),
        targets,
        one_directional: coverage.iter().filter(|(_, v)| v.is_empty()).map(|(c, _)| *c).collect(),
        coverage,
        t2ii_classes: sorted
            .iter()
            .filter(|r| r.matches.contains(&ConditionId::T2ii))
            .filter_map(|r| r.cl)
            .collect(),
        excluded_shapes: sorted
            .iter()
            .flat_map(|r| {
                r.lemma_cases
                    .iter()
                    .filter(|c| c.is_excluded())
                    .map(move |c| format!("{}: {c}", r.name))
            })
            .collect(),
        errata: sorted.iter().filter_map(|r| erratum(r)).collect(),
    }
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

    fn d8() -> GroupTable {
        perm_group(4, &[vec![vec![1, 2, 3, 4]], vec![vec![1, 3]]])
    }

    #[test]
    fn targets_are_distinct() {
        for p in [2u64, 3, 5, 7] {
            for n in 1..4 {
                let o = p.pow(n);
                let v: BTreeSet<i64> = Target::ALL.iter().map(|t| t.value(p, o)).collect();
                assert_eq!(v.len(), 3);
            }
        }
        assert_eq!(Target::First.value(2, 8), 5);
        assert_eq!(Target::Second.value(2, 8), 6);
        assert_eq!(Target::Third.value(3, 9), 6);
        assert_eq!(Target::First.value(5, 25), 10);
    }

    #[test]
    fn lemma_shapes() {
        let ds = DSequence::from_entries(2, 3, 1, &[(2, 3)]);
        assert_eq!(lemma_d_match(2, 3, &ds), [LemmaCase::L2i].into());
        let ds = DSequence::from_entries(5, 2, 1, &[(2, 1), (3, 1)]);
        assert_eq!(lemma_d_match(5, 2, &ds), [LemmaCase::L4iii].into());
        let ds = DSequence::from_entries(2, 3, 1, &[(2, 1), (3, 2)]);
        assert_eq!(lemma_d_match(2, 3, &ds), [LemmaCase::L7i].into());
        let ds = DSequence::from_entries(2, 3, 1, &[(2, 1), (3, 1), (4, 1)]);
        assert!(lemma_d_match(2, 3, &ds).is_empty());
        // Every shape evaluates to its own target through Jennings' formula.
        for c in LemmaCase::ALL {
            let (p, n, e) = c.shape();
            let ds = DSequence::from_entries(p, n, 1, e);
            assert_eq!(upper_index_jennings(&ds) as i64, c.target().value(p, p.pow(n)), "{c}");
        }
    }

    #[test]
    fn condition_ids_round_trip() {
        for c in ConditionId::ALL {
            assert_eq!(c.as_str().parse::<ConditionId>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
    }

    #[test]
    fn q8_matches_nothing() {
        let q8 = perm_group(
            8,
            &[
                vec![vec![1, 2, 4, 7], vec![3, 6, 8, 5]],
                vec![vec![1, 3, 4, 8], vec![2, 5, 7, 6]],
            ],
        );
        assert_eq!(q8.order(), 8);
        let ctx = LieContext::gated(&q8, 2).unwrap();
        assert!(condition_match(&ctx).is_empty());
        let r = analyze("Q8", &q8, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.tU_jennings, Some(3));
        assert_eq!(r.tU_direct, Some(3));
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.checks);
    }

    #[test]
    fn d8_report_with_units() {
        let opts = AnalyzeOptions {
            unit_cap: Some(1 << 10),
            ..Default::default()
        };
        let r = analyze("D8", &d8(), &opts).unwrap();
        assert_eq!(
            (r.tU_jennings, r.tU_direct, r.tL_direct, r.unit_class),
            (Some(3), Some(3), Some(3), Some(2))
        );
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.checks);
        assert!(r.checks.iter().any(|c| c.name == "unit_class" && c.passed));
    }

    #[test]
    fn s3_is_reported_not_failed() {
        let s3 = perm_group(3, &[vec![vec![1, 2, 3]], vec![vec![1, 2]]]);
        let r = analyze("S3", &s3, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.gate, GateStatus::NotNilpotent);
        assert_eq!(r.tU_jennings, None);
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn oracle_requirement_is_enforced() {
        let opts = AnalyzeOptions {
            oracle_cap: 4,
            require_oracle: true,
            ..Default::default()
        };
        assert_eq!(
            analyze("D8", &d8(), &opts).unwrap_err(),
            Error::OracleOutOfRange { order: 8, cap: 4 }
        );
        let opts = AnalyzeOptions {
            oracle_cap: 4,
            ..Default::default()
        };
        assert_eq!(analyze("D8", &d8(), &opts).unwrap().oracle, OracleStatus::Skipped);
    }

    #[test]
    fn broken_report_is_inconsistent() {
        let mut r = analyze("D8", &d8(), &AnalyzeOptions::default()).unwrap();
        r.matches = vec![ConditionId::T1i];
        let checks = iff_checks(&r);
        assert!(checks.iter().any(|c| !c.passed && c.name == "T1.i_implies_tU_jennings"));
    }
}
