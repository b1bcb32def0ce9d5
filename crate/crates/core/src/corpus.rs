//! Group specification documents and the built-in families.

use serde::{Deserialize, Serialize};

use crate::classify::{AnalysisReport, Check};
use crate::error::{Error, Result};
use crate::group::{exact_log, factorize, AbelianType, Generators, GroupTable, Matrix, Permutation};
use crate::lie_dim::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Perm,
    Matrix,
    Product,
    Family,
}

/// Values a corpus file pins for regression.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tL: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tU: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cl: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gprime_type: Option<AbelianType>,
}

/// One group document. Cycles use 1-based points; matrices are lists of
/// rows of residues mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: String,
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Vec<u32>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<GroupSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

fn spec_err(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Spec(format!("{name}: {msg}"))
}

/// Parses and validates a document. Syntax errors carry line and column.
pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let spec: GroupSpec = serde_json::from_str(text).map_err(|e| Error::Spec(format!("parse error: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

impl GroupSpec {
    fn empty(name: &str, kind: SpecKind) -> GroupSpec {
        GroupSpec {
            name: name.into(),
            kind,
            description: None,
            degree: None,
            dim: None,
            p: None,
            generators: None,
            factors: None,
            family: None,
            params: None,
            expected: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs serialize")
    }

    /// Checks the fields without building the group.
    pub fn validate(&self) -> Result<()> {
        let name = &self.name;
        let need = |field: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(spec_err(name, format!("kind {:?} requires \"{field}\"", self.kind)))
            }
        };
        let forbid = |field: &str, present: bool| {
            if present {
                Err(spec_err(
                    name,
                    format!("\"{field}\" is not allowed for kind {:?}", self.kind),
                ))
            } else {
                Ok(())
            }
        };
        match self.kind {
            SpecKind::Perm => {
                need("degree", self.degree.is_some())?;
                need("generators", self.generators.is_some())?;
                forbid("factors", self.factors.is_some())?;
                self.permutations().map(|_| ())
            }
            SpecKind::Matrix => {
                need("p", self.p.is_some())?;
                need("generators", self.generators.is_some())?;
                forbid("factors", self.factors.is_some())?;
                self.matrices().map(|_| ())
            }
            SpecKind::Product => {
                need("factors", self.factors.as_ref().is_some_and(|f| !f.is_empty()))?;
                forbid("generators", self.generators.is_some())?;
                self.factors.iter().flatten().try_for_each(GroupSpec::validate)
            }
            SpecKind::Family => {
                need("family", self.family.is_some())?;
                forbid("generators", self.generators.is_some())?;
                let fam = self.family.as_deref().unwrap_or_default();
                family_spec(name, fam, self.params.as_deref().unwrap_or_default(), usize::MAX).map(|_| ())
            }
        }
    }

    fn permutations(&self) -> Result<Vec<Permutation>> {
        let degree = self.degree.unwrap_or(0);
        if degree == 0 || degree > u16::MAX as usize {
            return Err(spec_err(&self.name, format!("degree {degree} out of range")));
        }
        let gens = self.generators.as_deref().unwrap_or_default();
        if gens.is_empty() {
            return Err(spec_err(&self.name, "no generators"));
        }
        gens.iter()
            .enumerate()
            .map(|(i, cycles)| {
                Permutation::from_cycles(degree, cycles)
                    .map_err(|e| spec_err(&self.name, format!("generator {}: {e}", i + 1)))
            })
            .collect()
    }

    fn matrices(&self) -> Result<Vec<Matrix>> {
        let p = self.p.unwrap_or(0);
        if !is_prime(p as u64) {
            return Err(spec_err(&self.name, format!("p = {p} is not prime")));
        }
        let gens = self.generators.as_deref().unwrap_or_default();
        if gens.is_empty() {
            return Err(spec_err(&self.name, "no generators"));
        }
        gens.iter()
            .enumerate()
            .map(|(i, rows)| {
                if let Some(d) = self.dim {
                    if rows.len() != d {
                        return Err(spec_err(
                            &self.name,
                            format!("generator {}: {} rows but dim {d}", i + 1, rows.len()),
                        ));
                    }
                }
                Matrix::from_rows(p, rows).map_err(|e| spec_err(&self.name, format!("generator {}: {e}", i + 1)))
            })
            .collect()
    }

    /// Materializes the group, refusing more than `cap` elements.
    pub fn build(&self, cap: usize) -> Result<GroupTable> {
        match self.kind {
            SpecKind::Perm => GroupTable::build(&Generators::Permutations(self.permutations()?), cap),
            SpecKind::Matrix => GroupTable::build(&Generators::Matrices(self.matrices()?), cap),
            SpecKind::Product => {
                let factors = self.factors.as_deref().unwrap_or_default();
                let mut acc = GroupTable::trivial();
                for f in factors {
                    acc = GroupTable::direct_product(&acc, &f.build(cap)?, cap)?;
                }
                Ok(acc)
            }
            SpecKind::Family => {
                let fam = self.family.as_deref().unwrap_or_default();
                family_spec(&self.name, fam, self.params.as_deref().unwrap_or_default(), cap)?.build(cap)
            }
        }
    }

    /// Compares the pinned values against a report.
    pub fn pin_checks(&self, report: &AnalysisReport) -> Vec<Check> {
        let Some(e) = &self.expected else { return Vec::new() };
        let mut out = Vec::new();
        let mut pin = |field: &str, want: Option<String>, got: Option<String>| {
            if let Some(w) = want {
                let passed = got.as_ref() == Some(&w);
                out.push(Check {
                    name: format!("pin_{field}"),
                    passed,
                    detail: if passed {
                        String::new()
                    } else {
                        format!("expected {w}, computed {got:?}")
                    },
                });
            }
        };
        let s = |x: Option<u64>| x.map(|v| v.to_string());
        pin("tL", s(e.tL), s(report.tL_direct));
        pin("tU", s(e.tU), s(report.tU_jennings));
        pin("cl", e.cl.map(|c| c.to_string()), report.cl.map(|c| c.to_string()));
        pin(
            "gprime_type",
            e.gprime_type.as_ref().map(ToString::to_string),
            report.gprime_type.as_ref().map(ToString::to_string),
        );
        out
    }
}

/// Names accepted by [`family`].
pub const FAMILIES: [&str; 9] = [
    "cyclic",
    "elementary",
    "dihedral",
    "quaternion",
    "semidihedral",
    "modular_maximal_cyclic",
    "unitriangular",
    "wreath_cyclic",
    "heisenberg",
];

/// Canonical generators for a family member, named after the family.
pub fn family(name: &str, params: &[u64], cap: usize) -> Result<GroupSpec> {
    let label = format!(
        "{name}({})",
        params.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    );
    family_spec(&label, name, params, cap)
}

fn family_spec(label: &str, name: &str, params: &[u64], cap: usize) -> Result<GroupSpec> {
    let bad = |msg: String| spec_err(label, msg);
    let arity = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(bad(format!(
                "family {name} takes {k} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let within = |order: u64| {
        if order as u128 <= cap as u128 {
            Ok(())
        } else {
            Err(Error::GroupTooLarge { cap })
        }
    };
    let two_power = |order: u64, min: u64| {
        if order >= min && exact_log(order, 2).is_some() {
            Ok(())
        } else {
            Err(bad(format!(
                "family {name} needs a power of 2 that is at least {min}, got {order}"
            )))
        }
    };
    let prime = |p: u64| {
        if is_prime(p) && p < 256 {
            Ok(())
        } else {
            Err(bad(format!("{p} is not a supported prime")))
        }
    };
    let mut spec = match name {
        "cyclic" => {
            arity(1)?;
            let n = params[0];
            if n == 0 {
                return Err(bad("order must be positive".into()));
            }
            within(n)?;
            perm_spec(label, n as usize, vec![vec![(1..=n as u32).collect()]])
        }
        "elementary" => {
            arity(2)?;
            let (p, k) = (params[0], params[1]);
            prime(p)?;
            if k == 0 || k > 16 {
                return Err(bad(format!("rank {k} out of range")));
            }
            within(p.saturating_pow(k as u32))?;
            let gens = (0..k as u32)
                .map(|i| vec![(1..=p as u32).map(|x| i * p as u32 + x).collect()])
                .collect();
            perm_spec(label, (p * k) as usize, gens)
        }
        "dihedral" => {
            arity(1)?;
            let order = params[0];
            if order < 6 || order % 2 == 1 {
                return Err(bad(format!("dihedral order must be even and at least 6, got {order}")));
            }
            within(order)?;
            let m = (order / 2) as u32;
            let reflection = (2..=m / 2 + 1)
                .filter(|&i| i < m + 2 - i)
                .map(|i| vec![i, m + 2 - i])
                .collect();
            perm_spec(label, m as usize, vec![vec![(1..=m).collect()], reflection])
        }
        "quaternion" => {
            arity(1)?;
            two_power(params[0], 8)?;
            within(params[0])?;
            let m = params[0] / 2;
            metacyclic(label, m, 2, m / 2, m - 1)
        }
        "semidihedral" => {
            arity(1)?;
            two_power(params[0], 16)?;
            within(params[0])?;
            let m = params[0] / 2;
            metacyclic(label, m, 2, 0, m / 2 - 1)
        }
        "modular_maximal_cyclic" => {
            let (order, p) = match params {
                [order] => (*order, factorize(*order).first().map_or(0, |f| f.0)),
                [order, p] => (*order, *p),
                _ => return Err(bad(format!("family {name} takes 1 or 2 parameters"))),
            };
            prime(p)?;
            let k = exact_log(order, p).ok_or_else(|| bad(format!("{order} is not a power of {p}")))?;
            if k < 3 || (p == 2 && k < 4) {
                return Err(bad(format!("order {order} too small for the modular group")));
            }
            within(order)?;
            let m = order / p;
            metacyclic(label, m, p, 0, 1 + m / p)
        }
        "unitriangular" => {
            arity(2)?;
            let (n, p) = (params[0], params[1]);
            prime(p)?;
            if !(2..=12).contains(&n) {
                return Err(bad(format!("dimension {n} out of range")));
            }
            within(p.checked_pow((n * (n - 1) / 2) as u32).unwrap_or(u64::MAX))?;
            let gens = (0..n as usize - 1)
                .map(|i| elementary_matrix(n as usize, i, i + 1))
                .collect();
            matrix_spec(label, n as usize, p as u32, gens)
        }
        "wreath_cyclic" => {
            arity(1)?;
            let p = params[0];
            prime(p)?;
            within(p.checked_pow(p as u32 + 1).unwrap_or(u64::MAX))?;
            let p = p as u32;
            let base = vec![(1..=p).collect()];
            let top = (1..=p).map(|i| (0..p).map(|b| b * p + i).collect()).collect();
            perm_spec(label, (p * p) as usize, vec![base, top])
        }
        "heisenberg" => {
            // Affine maps (i, j) -> (i + 1, j) and (i, j) -> (i, j + i) of F_p^2.
            arity(1)?;
            let p = params[0];
            prime(p)?;
            within(p.pow(3))?;
            let p = p as u32;
            let pt = |i: u32, j: u32| (i % p) * p + (j % p);
            let shift: Vec<u32> = (0..p * p).map(|x| pt(x / p + 1, x % p)).collect();
            let shear: Vec<u32> = (0..p * p).map(|x| pt(x / p, x % p + x / p)).collect();
            perm_spec(label, (p * p) as usize, vec![cycles_of(&shift), cycles_of(&shear)])
        }
        _ => return Err(bad(format!("unknown family {name:?}; known: {}", FAMILIES.join(", ")))),
    };
    spec.name = label.to_string();
    Ok(spec)
}

fn perm_spec(name: &str, degree: usize, generators: Vec<Vec<Vec<u32>>>) -> GroupSpec {
    let mut s = GroupSpec::empty(name, SpecKind::Perm);
    s.degree = Some(degree);
    s.generators = Some(generators);
    s
}

fn matrix_spec(name: &str, dim: usize, p: u32, generators: Vec<Vec<Vec<u32>>>) -> GroupSpec {
    let mut s = GroupSpec::empty(name, SpecKind::Matrix);
    s.dim = Some(dim);
    s.p = Some(p);
    s.generators = Some(generators);
    s
}

/// `I + E_{ij}` (0-based) as rows.
fn elementary_matrix(n: usize, i: usize, j: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|r| (0..n).map(|c| u32::from(r == c || (r, c) == (i, j))).collect())
        .collect()
}

/// 1-based nontrivial cycles of a 0-based image list.
fn cycles_of(images: &[u32]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; images.len()];
    let mut out = Vec::new();
    for start in 0..images.len() {
        if seen[start] || images[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x as u32 + 1);
            x = images[x] as usize;
        }
        out.push(cycle);
    }
    out
}

/// Right regular representation of `⟨a, b | a^m, b^s = a^t, b a b^-1 = a^r⟩`
/// on the normal forms `a^i b^j`.
fn metacyclic(name: &str, m: u64, s: u64, t: u64, r: u64) -> GroupSpec {
    let (m, s) = (m as usize, s as usize);
    let idx = |i: usize, j: usize| j * m + i;
    // a^i b^j · a^k b^l = a^{i + k r^j} b^{j + l}, with b^s = a^t.
    let mul = |(i, j): (usize, usize), (k, l): (usize, usize)| {
        let rj = (0..j).fold(1u64, |acc, _| acc * r % m as u64);
        let mut e = (i as u64 + k as u64 * rj) % m as u64;
        let mut b = j + l;
        if b >= s {
            b -= s;
            e = (e + t) % m as u64;
        }
        (e as usize, b)
    };
    let right = |g: (usize, usize)| -> Vec<u32> {
        let mut images = vec![0u32; m * s];
        for j in 0..s {
            for i in 0..m {
                let (e, b) = mul((i, j), g);
                images[idx(i, j)] = idx(e, b) as u32;
            }
        }
        images
    };
    perm_spec(
        name,
        m * s,
        vec![cycles_of(&right((1 % m, 0))), cycles_of(&right((0, 1 % s)))],
    )
}
