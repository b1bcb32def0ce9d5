use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::subgroup::{Closure, Subgroup};
use crate::group::table::{lcm, GroupTable};

/// Isomorphism type of a finite abelian group as its multiset of prime-power
/// cyclic factors, sorted by decreasing size.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianType {
    factors: Vec<u64>,
}

impl AbelianType {
    pub fn new(mut factors: Vec<u64>) -> AbelianType {
        factors.retain(|&f| f > 1);
        factors.sort_unstable_by(|a, b| b.cmp(a));
        AbelianType { factors }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(|q| format!("C{q}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Some(k)` when `n = p^k`.
pub fn exact_log(n: u64, p: u64) -> Option<u32> {
    if n == 0 || p < 2 {
        return None;
    }
    let (mut n, mut k) = (n, 0);
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

/// Structural facts about a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupInfo {
    pub order: usize,
    pub is_abelian: bool,
    pub is_cyclic: bool,
    pub is_normal: bool,
    pub exponent: u64,
}

impl GroupTable {
    /// Invariant type of an abelian subgroup from its order profile: for each
    /// prime `q`, the counts `#{h : h^{q^k} = 1}` determine the number of
    /// cyclic factors of each exponent in the Sylow `q`-part.
    pub fn abelian_type(&self, h: &Subgroup) -> Result<AbelianType> {
        h.check_parent(self)?;
        if !self.is_abelian_subgroup(h) {
            return Err(Error::NonabelianSubgroup);
        }
        let mut factors = Vec::new();
        for (q, e) in factorize(h.order() as u64) {
            // rank[k] = log_q #{h : h^{q^k} = 1}
            let mut rank = vec![0u32];
            let mut qk = 1u64;
            for _ in 0..e {
                qk *= q;
                let count = h
                    .members()
                    .iter()
                    .filter(|&&x| qk.is_multiple_of(self.element_order(x) as u64))
                    .count() as u64;
                let log = exact_log(count, q)
                    .ok_or_else(|| Error::Consistency(format!("{count} elements of order dividing {qk}")))?;
                rank.push(log);
            }
            // at_least[k] = #{factors q^j with j >= k}
            let at_least: Vec<u32> = (1..rank.len()).map(|k| rank[k] - rank[k - 1]).collect();
            for k in 0..at_least.len() {
                let next = at_least.get(k + 1).copied().unwrap_or(0);
                for _ in 0..at_least[k] - next {
                    factors.push(q.pow(k as u32 + 1));
                }
            }
        }
        let t = AbelianType::new(factors);
        if t.order() != h.order() as u64 {
            return Err(Error::Consistency(format!(
                "abelian type {t} does not multiply to {}",
                h.order()
            )));
        }
        Ok(t)
    }

    pub fn is_cyclic(&self, h: &Subgroup) -> bool {
        h.members().iter().any(|&x| self.element_order(x) as usize == h.order())
    }

    pub fn exponent(&self, h: &Subgroup) -> u64 {
        h.members().iter().fold(1u32, |acc, &x| lcm(acc, self.element_order(x))) as u64
    }

    /// `Ω_1(H) = ⟨h : h^p = 1⟩` for an abelian subgroup `H`.
    pub fn omega1(&self, h: &Subgroup, p: u64) -> Result<Subgroup> {
        h.check_parent(self)?;
        if !self.is_abelian_subgroup(h) {
            return Err(Error::NonabelianSubgroup);
        }
        let mut c = Closure::new(self);
        for &x in h.members() {
            if p.is_multiple_of(self.element_order(x) as u64) {
                c.add(x);
            }
        }
        Ok(c.finish())
    }

    pub fn subgroup_info(&self, h: &Subgroup) -> Result<SubgroupInfo> {
        h.check_parent(self)?;
        Ok(SubgroupInfo {
            order: h.order(),
            is_abelian: self.is_abelian_subgroup(h),
            is_cyclic: self.is_cyclic(h),
            is_normal: self.is_normal(h),
            exponent: self.exponent(h),
        })
    }
}
