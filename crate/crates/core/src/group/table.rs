use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Default upper bound on the number of elements of a materialized group.
pub const DEFAULT_ELEMENT_CAP: usize = 4096;

/// Hard ceiling imposed by the 2-byte element indices in the table.
pub const MAX_ELEMENT_CAP: usize = u16::MAX as usize + 1;

/// A permutation of `{0, .., degree-1}` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u16>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u16).collect())
    }

    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidGenerator(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation of the given degree from disjoint cycles written
    /// with 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Self> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (pos, &pt) in cycle.iter().enumerate() {
                if pt == 0 || pt as usize > degree {
                    return Err(Error::InvalidGenerator(format!("point {pt} outside 1..={degree}")));
                }
                let i = pt as usize - 1;
                if used[i] {
                    return Err(Error::InvalidGenerator(format!("repeated point {pt}")));
                }
                used[i] = true;
                let next = cycle[(pos + 1) % cycle.len()] as usize - 1;
                images[i] = next as u16;
            }
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.0
    }

    /// `self` followed by `other` (points are acted on from the right).
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    /// Disjoint-cycle notation with 1-based points, `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.0.len()];
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{}", i + 1);
                i = self.0[i] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// A square matrix over the prime field `F_p`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    p: u32,
    entries: Vec<u32>,
}

impl Matrix {
    pub fn identity(dim: usize, p: u32) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix { dim, p, entries }
    }

    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidGenerator("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidGenerator(format!(
                    "non-square matrix: row of length {} in a {dim}-row matrix",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&x| x % p));
        }
        let m = Matrix { dim, p, entries };
        if m.determinant() == 0 {
            return Err(Error::InvalidGenerator("matrix is not invertible".into()));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let p = self.p as u64;
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k] as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let e = &mut entries[i * n + j];
                    *e = ((*e as u64 + a * other.entries[k * n + j] as u64) % p) as u32;
                }
            }
        }
        Matrix {
            dim: n,
            p: self.p,
            entries,
        }
    }

    fn determinant(&self) -> u32 {
        let n = self.dim;
        let p = self.p as u64;
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = (p - det) % p;
            }
            let pv = a[col * n + col];
            det = det * pv % p;
            let inv = mod_pow(pv, p - 2, p);
            for r in col + 1..n {
                let f = a[r * n + col] * inv % p;
                if f == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = (a[r * n + j] + (p - f) * a[col * n + j]) % p;
                }
            }
        }
        det as u32
    }
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Generators for [`GroupTable::build`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generators {
    Permutations(Vec<Permutation>),
    Matrices(Vec<Matrix>),
}

/// A finite group as a complete multiplication table. Element 0 is the
/// identity.
#[derive(Clone)]
pub struct GroupTable {
    order: usize,
    mult: Vec<u16>,
    inv: Vec<u16>,
    elem_order: Vec<u32>,
    generators: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl std::fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupTable")
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish_non_exhaustive()
    }
}

impl GroupTable {
    /// Closes the generators under composition and tabulates the result.
    pub fn build(generators: &Generators, cap: usize) -> Result<GroupTable> {
        let cap = cap.min(MAX_ELEMENT_CAP);
        match generators {
            Generators::Permutations(perms) => {
                let first = perms
                    .first()
                    .ok_or_else(|| Error::InvalidGenerator("no generators".into()))?;
                let degree = first.degree();
                if perms.iter().any(|g| g.degree() != degree) {
                    return Err(Error::InvalidGenerator("permutations of different degrees".into()));
                }
                let (mut table, elements) = close(
                    Permutation::identity(degree),
                    perms,
                    |a: &Permutation, b: &Permutation| a.then(b),
                    cap,
                )?;
                table.labels = Some(elements.iter().map(Permutation::cycle_string).collect());
                Ok(table)
            }
            Generators::Matrices(mats) => {
                let first = mats
                    .first()
                    .ok_or_else(|| Error::InvalidGenerator("no generators".into()))?;
                let (dim, p) = (first.dim(), first.p());
                if mats.iter().any(|m| m.dim() != dim || m.p() != p) {
                    return Err(Error::InvalidGenerator(
                        "matrices of different dimension or characteristic".into(),
                    ));
                }
                if mats.iter().any(|m| m.determinant() == 0) {
                    return Err(Error::InvalidGenerator("matrix is not invertible".into()));
                }
                let (table, _) = close(Matrix::identity(dim, p), mats, Matrix::mul, cap)?;
                Ok(table)
            }
        }
    }

    /// The direct product `G × H`; the pair `(g, h)` has index `g·|H| + h`.
    pub fn direct_product(g: &GroupTable, h: &GroupTable, cap: usize) -> Result<GroupTable> {
        let (ng, nh) = (g.order, h.order);
        let order = ng * nh;
        if order > cap.min(MAX_ELEMENT_CAP) {
            return Err(Error::GroupTooLarge {
                cap: cap.min(MAX_ELEMENT_CAP),
            });
        }
        let mut mult = vec![0u16; order * order];
        for x in 0..order {
            let (xg, xh) = (x / nh, x % nh);
            let row = &mut mult[x * order..(x + 1) * order];
            for (y, slot) in row.iter_mut().enumerate() {
                let (yg, yh) = (y / nh, y % nh);
                *slot = (g.mul(xg, yg) * nh + h.mul(xh, yh)) as u16;
            }
        }
        let inv = (0..order)
            .map(|x| (g.inv(x / nh) * nh + h.inv(x % nh)) as u16)
            .collect();
        let elem_order = (0..order)
            .map(|x| lcm(g.element_order(x / nh), h.element_order(x % nh)))
            .collect();
        let generators = g
            .generators
            .iter()
            .map(|&a| a * nh)
            .chain(h.generators.iter().copied())
            .collect();
        let labels = match (&g.labels, &h.labels) {
            (Some(lg), Some(lh)) => Some(
                (0..order)
                    .map(|x| format!("[{}, {}]", lg[x / nh], lh[x % nh]))
                    .collect(),
            ),
            _ => None,
        };
        Ok(GroupTable {
            order,
            mult,
            inv,
            elem_order,
            generators,
            labels,
        })
    }

    /// Assembles a table from raw parts, validating the group axioms
    /// (associativity is checked exhaustively up to order 64, sampled above).
    pub fn from_parts(mult: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<GroupTable> {
        let order = mult.len();
        if order == 0 || order > MAX_ELEMENT_CAP {
            return Err(Error::InvalidGenerator(format!("unsupported order {order}")));
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in &mult {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(Error::InvalidGenerator("malformed multiplication table".into()));
            }
            flat.extend(row.iter().map(|&x| x as u16));
        }
        let mut inv = vec![0u16; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| flat[x * order + y] == 0)
                .ok_or_else(|| Error::InvalidGenerator(format!("element {x} has no inverse")))?;
            inv[x] = y as u16;
        }
        let mut table = GroupTable {
            order,
            mult: flat,
            inv,
            elem_order: vec![1; order],
            generators,
            labels: None,
        };
        table.elem_order = (0..order).map(|x| table.compute_order(x)).collect();
        if table.generators.iter().any(|&g| g >= order) {
            return Err(Error::InvalidElement { index: order, order });
        }
        table.check_axioms(4096).map_err(Error::InvalidGenerator)?;
        Ok(table)
    }

    /// The trivial group.
    pub fn trivial() -> GroupTable {
        GroupTable {
            order: 1,
            mult: vec![0],
            inv: vec![0],
            elem_order: vec![1],
            generators: Vec::new(),
            labels: Some(vec!["()".into()]),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// The commutator `(a, b) = a⁻¹b⁻¹ab`.
    #[inline]
    pub fn comm(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// `b⁻¹ a b`.
    #[inline]
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(b), a), b)
    }

    pub fn pow(&self, a: usize, mut exp: u64) -> usize {
        exp %= self.elem_order[a] as u64;
        let mut base = a;
        let mut acc = 0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> u32 {
        self.elem_order[a]
    }

    /// Indices of the generators the group was built from.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => format!("#{a}"),
        }
    }

    pub fn check_index(&self, a: usize) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                index: a,
                order: self.order,
            })
        }
    }

    /// Left translation by `g` as a permutation of element indices.
    pub fn left_translation(&self, g: usize) -> Vec<u16> {
        (0..self.order).map(|x| self.mult[g * self.order + x]).collect()
    }

    /// Right translation by `g` as a permutation of element indices.
    pub fn right_translation(&self, g: usize) -> Vec<u16> {
        (0..self.order).map(|x| self.mult[x * self.order + g]).collect()
    }

    /// Checks identity, inverse and Latin-square properties exhaustively and
    /// associativity on up to `assoc_budget` triples (all triples when the
    /// order is at most 64).
    pub fn check_axioms(&self, assoc_budget: usize) -> std::result::Result<(), String> {
        let n = self.order;
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(format!("element 0 is not an identity for {x}"));
            }
            if self.mul(x, self.inv(x)) != 0 {
                return Err(format!("inv[{x}] is not an inverse"));
            }
        }
        let mut seen = vec![u32::MAX; n];
        for x in 0..n {
            for y in 0..n {
                let z = self.mul(x, y);
                if seen[z] == x as u32 {
                    return Err(format!("row {x} is not a permutation"));
                }
                seen[z] = x as u32;
            }
        }
        seen.fill(u32::MAX);
        for y in 0..n {
            for x in 0..n {
                let z = self.mul(x, y);
                if seen[z] == y as u32 {
                    return Err(format!("column {y} is not a permutation"));
                }
                seen[z] = y as u32;
            }
        }
        let assoc = |x: usize, y: usize, z: usize| self.mul(self.mul(x, y), z) == self.mul(x, self.mul(y, z));
        if n <= 64 {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if !assoc(x, y, z) {
                            return Err(format!("associativity fails at ({x}, {y}, {z})"));
                        }
                    }
                }
            }
        } else {
            // Deterministic stride walk over triples.
            let mut state = 0x9e37_79b9_7f4a_7c15u64;
            for _ in 0..assoc_budget {
                let mut next = || {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state % n as u64) as usize
                };
                let (x, y, z) = (next(), next(), next());
                if !assoc(x, y, z) {
                    return Err(format!("associativity fails at ({x}, {y}, {z})"));
                }
            }
        }
        Ok(())
    }

    fn compute_order(&self, a: usize) -> u32 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
            if k as usize > self.order {
                break;
            }
        }
        k
    }
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Breadth-first closure of `generators` under right multiplication, then
/// tabulation of all products by following each element's BFS word.
fn close<E, F>(identity: E, generators: &[E], compose: F, cap: usize) -> Result<(GroupTable, Vec<E>)>
where
    E: Clone + Eq + Hash,
    F: Fn(&E, &E) -> E,
{
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<E, usize> = HashMap::from([(identity, 0)]);
    // right[x * k + i] = x · gen_i
    let k = generators.len();
    let mut right: Vec<u16> = Vec::new();
    // parent[y] = (x, i) with y = x · gen_i
    let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
    let mut cursor = 0;
    while cursor < elements.len() {
        for (i, g) in generators.iter().enumerate() {
            let y = compose(&elements[cursor], g);
            let idx = match index.get(&y) {
                Some(&idx) => idx,
                None => {
                    let idx = elements.len();
                    if idx >= cap {
                        return Err(Error::GroupTooLarge { cap });
                    }
                    index.insert(y.clone(), idx);
                    elements.push(y);
                    parent.push((cursor, i));
                    idx
                }
            };
            right.push(idx as u16);
        }
        cursor += 1;
    }
    let order = elements.len();
    let mut mult = vec![0u16; order * order];
    for x in 0..order {
        mult[x * order] = x as u16;
    }
    for y in 1..order {
        let (py, gi) = parent[y];
        for x in 0..order {
            let xpy = mult[x * order + py] as usize;
            mult[x * order + y] = right[xpy * k + gi];
        }
    }
    let mut inv = vec![0u16; order];
    for x in 0..order {
        let row = &mult[x * order..(x + 1) * order];
        inv[x] = row.iter().position(|&z| z == 0).expect("Latin square row") as u16;
    }
    let mut gens: Vec<usize> = generators.iter().map(|g| index[g]).filter(|&i| i != 0).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut table = GroupTable {
        order,
        mult,
        inv,
        elem_order: Vec::new(),
        generators: gens,
        labels: None,
    };
    table.elem_order = (0..order).map(|x| table.compute_order(x)).collect();
    Ok((table, elements))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(degree: usize, gens: &[&[&[u32]]]) -> Generators {
        Generators::Permutations(
            gens.iter()
                .map(|cycles| {
                    let cycles: Vec<Vec<u32>> = cycles.iter().map(|c| c.to_vec()).collect();
                    Permutation::from_cycles(degree, &cycles).unwrap()
                })
                .collect(),
        )
    }

    #[test]
    fn dihedral_eight_from_square_symmetries() {
        let g = GroupTable::build(&perms(4, &[&[&[1, 2, 3, 4]], &[&[1, 3]]]), 4096).unwrap();
        assert_eq!(g.order(), 8);
        g.check_axioms(0).unwrap();
        assert_eq!(g.label(0), "()");
    }

    #[test]
    fn identity_generator_gives_trivial_group() {
        let g = GroupTable::build(&perms(3, &[&[]]), 4096).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.generators().is_empty());
    }

    #[test]
    fn dihedral_sixteen_matches_closure_oracle() {
        let gens = perms(8, &[&[&[1, 2, 3, 4, 5, 6, 7, 8]], &[&[2, 8], &[3, 7], &[4, 6]]]);
        let g = GroupTable::build(&gens, 4096).unwrap();
        // Independent oracle: naive fixpoint over a set of image vectors.
        let Generators::Permutations(ps) = &gens else {
            unreachable!()
        };
        let mut set = std::collections::HashSet::new();
        set.insert(Permutation::identity(8));
        loop {
            let cur: Vec<_> = set.iter().cloned().collect();
            let before = set.len();
            for a in &cur {
                for b in ps {
                    set.insert(a.then(b));
                }
            }
            if set.len() == before {
                break;
            }
        }
        assert_eq!(set.len(), 16);
        assert_eq!(g.order(), 16);
        g.check_axioms(0).unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        // S_5 has 120 elements.
        let err = GroupTable::build(&perms(5, &[&[&[1, 2, 3, 4, 5]], &[&[1, 2]]]), 100).unwrap_err();
        assert_eq!(err, Error::GroupTooLarge { cap: 100 });
        assert!(err.is_resource_cap());
    }

    #[test]
    fn repeated_point_is_rejected() {
        let err = Permutation::from_cycles(3, &[vec![1, 1, 2]]).unwrap_err();
        assert!(err.to_string().contains("repeated point"));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let err = Matrix::from_rows(3, &[vec![1, 2], vec![2, 4]]).unwrap_err();
        assert!(matches!(err, Error::InvalidGenerator(_)));
        let err = Matrix::from_rows(3, &[vec![1, 2], vec![2]]).unwrap_err();
        assert!(err.to_string().contains("non-square"));
    }

    #[test]
    fn heisenberg_three_from_matrices() {
        let x = Matrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let y = Matrix::from_rows(3, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let g = GroupTable::build(&Generators::Matrices(vec![x, y]), 4096).unwrap();
        assert_eq!(g.order(), 27);
        g.check_axioms(0).unwrap();
    }

    #[test]
    fn direct_product_with_trivial_factor() {
        let d8 = GroupTable::build(&perms(4, &[&[&[1, 2, 3, 4]], &[&[1, 3]]]), 4096).unwrap();
        let c1 = GroupTable::trivial();
        let p = GroupTable::direct_product(&d8, &c1, 4096).unwrap();
        assert_eq!(p.order(), 8);
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(p.mul(x, y), d8.mul(x, y));
            }
        }
        let sq = GroupTable::direct_product(&d8, &d8, 4096).unwrap();
        assert_eq!(sq.order(), 64);
        sq.check_axioms(0).unwrap();
        assert!(GroupTable::direct_product(&sq, &sq, 4095).is_err());
    }

    #[test]
    fn power_and_order() {
        let d8 = GroupTable::build(&perms(4, &[&[&[1, 2, 3, 4]], &[&[1, 3]]]), 4096).unwrap();
        let r = (0..8).find(|&x| d8.element_order(x) == 4).unwrap();
        assert_eq!(d8.pow(r, 4), 0);
        assert_eq!(d8.element_order(d8.pow(r, 2)), 2);
        assert_eq!(d8.pow(r, 5), r);
    }
}
