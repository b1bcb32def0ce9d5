//! The group algebra `F_p[G]` over a tabulated group: vector arithmetic,
//! subspaces, two-sided ideals, and the lower and upper Lie power chains.

mod chains;
mod echelon;
mod row;
mod units;

use crate::error::{Error, Result};
use crate::group::GroupTable;
use echelon::Echelon;
use row::{Gf2Row, GfpRow, Row};

pub use chains::{ChainResult, DEFAULT_ORACLE_CAP};
pub use units::{UnitGroup, DEFAULT_UNIT_CAP};

/// An element of `F_p[G]`: one residue per group element, indexed like the
/// group table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraVector {
    p: u8,
    coeffs: Vec<u8>,
}

impl AlgebraVector {
    pub fn new(p: u8, coeffs: Vec<u8>) -> AlgebraVector {
        let coeffs = coeffs.into_iter().map(|c| c % p).collect();
        AlgebraVector { p, coeffs }
    }

    pub fn zero(p: u8, len: usize) -> AlgebraVector {
        AlgebraVector {
            p,
            coeffs: vec![0; len],
        }
    }

    /// The basis vector of group element `g`.
    pub fn basis(p: u8, len: usize, g: usize) -> AlgebraVector {
        let mut v = Self::zero(p, len);
        v.coeffs[g] = 1;
        v
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Sum of the coefficients (the augmentation map).
    pub fn augmentation(&self) -> u8 {
        (self.coeffs.iter().map(|&c| c as u32).sum::<u32>() % self.p as u32) as u8
    }

    pub fn add(&self, other: &AlgebraVector) -> AlgebraVector {
        let p = self.p as u16;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        AlgebraVector { p: self.p, coeffs }
    }

    pub fn sub(&self, other: &AlgebraVector) -> AlgebraVector {
        let p = self.p as u16;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u16 + p - b as u16) % p) as u8)
            .collect();
        AlgebraVector { p: self.p, coeffs }
    }

    pub fn scale(&self, c: u8) -> AlgebraVector {
        let p = self.p as u16;
        let coeffs = self.coeffs.iter().map(|&a| (a as u16 * c as u16 % p) as u8).collect();
        AlgebraVector { p: self.p, coeffs }
    }
}

/// A subspace of `F_p[G]` in fully reduced row echelon form.
#[derive(Clone, Debug)]
pub struct SubspaceBasis(Basis);

#[derive(Clone, Debug)]
enum Basis {
    Gf2(Echelon<Gf2Row>),
    Gfp(Echelon<GfpRow>),
}

macro_rules! with_basis {
    ($self:expr, $e:ident => $body:expr) => {
        match &$self.0 {
            Basis::Gf2($e) => $body,
            Basis::Gfp($e) => $body,
        }
    };
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        with_basis!(self, e => e.dim())
    }

    pub fn ambient_dim(&self) -> usize {
        with_basis!(self, e => e.len())
    }

    pub fn p(&self) -> u8 {
        with_basis!(self, e => e.p())
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Basis rows ordered by strictly increasing pivot column.
    pub fn rows(&self) -> Vec<AlgebraVector> {
        let p = self.p();
        with_basis!(self, e => e
            .sorted_rows()
            .into_iter()
            .map(|r| AlgebraVector { p, coeffs: r.to_dense() })
            .collect())
    }

    pub fn contains(&self, v: &AlgebraVector) -> bool {
        match &self.0 {
            Basis::Gf2(e) => e.contains(&Gf2Row::from_dense(2, &v.coeffs)),
            Basis::Gfp(e) => e.contains(&GfpRow::from_dense(e.p(), &v.coeffs)),
        }
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        match (&self.0, &other.0) {
            (Basis::Gf2(a), Basis::Gf2(b)) => a.is_subspace_of(b),
            (Basis::Gfp(a), Basis::Gfp(b)) => a.p() == b.p() && a.is_subspace_of(b),
            _ => false,
        }
    }

    /// Whether the echelon form is fully reduced with unit pivots.
    pub fn is_reduced(&self) -> bool {
        with_basis!(self, e => e.check())
    }
}

impl From<Echelon<Gf2Row>> for SubspaceBasis {
    fn from(e: Echelon<Gf2Row>) -> Self {
        SubspaceBasis(Basis::Gf2(e))
    }
}

impl From<Echelon<GfpRow>> for SubspaceBasis {
    fn from(e: Echelon<GfpRow>) -> Self {
        SubspaceBasis(Basis::Gfp(e))
    }
}

/// `F_p[G]` for a tabulated group `G` and a prime `p < 256`.
#[derive(Clone, Copy, Debug)]
pub struct GroupAlgebra<'g> {
    group: &'g GroupTable,
    p: u8,
}

impl<'g> GroupAlgebra<'g> {
    pub fn new(group: &'g GroupTable, p: u64) -> Result<Self> {
        if !crate::lie_dim::is_prime(p) || p > 251 {
            return Err(Error::AlgebraMismatch(format!("unsupported characteristic {p}")));
        }
        Ok(GroupAlgebra { group, p: p as u8 })
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.group.order()
    }

    pub fn basis(&self, g: usize) -> AlgebraVector {
        AlgebraVector::basis(self.p, self.dim(), g)
    }

    pub fn one(&self) -> AlgebraVector {
        self.basis(0)
    }

    fn check(&self, v: &AlgebraVector) -> Result<()> {
        if v.p != self.p || v.len() != self.dim() {
            return Err(Error::AlgebraMismatch(format!(
                "vector over F_{} of length {} used in F_{}[G] with |G| = {}",
                v.p,
                v.len(),
                self.p,
                self.dim()
            )));
        }
        Ok(())
    }

    /// `(ab)_g = Σ_{xy = g} a_x b_y`.
    pub fn multiply(&self, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
        self.check(a)?;
        self.check(b)?;
        let p = self.p as u32;
        let mut acc = vec![0u32; self.dim()];
        for (x, &ax) in a.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (y, &by) in b.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
                let z = self.group.mul(x, y);
                acc[z] = (acc[z] + ax as u32 * by as u32) % p;
            }
        }
        Ok(AlgebraVector {
            p: self.p,
            coeffs: acc.into_iter().map(|c| c as u8).collect(),
        })
    }

    /// `[a, b] = ab - ba`.
    pub fn lie_bracket(&self, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
        Ok(self.multiply(a, b)?.sub(&self.multiply(b, a)?))
    }

    /// The two-sided ideal generated by `span`.
    pub fn ideal_closure(&self, span: &[AlgebraVector]) -> Result<SubspaceBasis> {
        for v in span {
            self.check(v)?;
        }
        let gens = chains::Translations::generators(self.group);
        Ok(if self.p == 2 {
            let seeds = span.iter().map(|v| Gf2Row::from_dense(2, &v.coeffs));
            chains::ideal_closure::<Gf2Row>(self.dim(), 2, seeds, &gens).into()
        } else {
            let seeds = span.iter().map(|v| GfpRow::from_dense(self.p, &v.coeffs));
            chains::ideal_closure::<GfpRow>(self.dim(), self.p, seeds, &gens).into()
        })
    }

    /// Linear span of `vectors`.
    pub fn span(&self, vectors: &[AlgebraVector]) -> Result<SubspaceBasis> {
        for v in vectors {
            self.check(v)?;
        }
        Ok(if self.p == 2 {
            let mut e = Echelon::new(self.dim(), 2);
            for v in vectors {
                e.insert(Gf2Row::from_dense(2, &v.coeffs));
            }
            e.into()
        } else {
            let mut e = Echelon::new(self.dim(), self.p);
            for v in vectors {
                e.insert(GfpRow::from_dense(self.p, &v.coeffs));
            }
            e.into()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Generators, Permutation};
    use proptest::prelude::*;

    fn d8() -> GroupTable {
        let ps = vec![
            Permutation::from_cycles(4, &[vec![1, 2, 3, 4]]).unwrap(),
            Permutation::from_cycles(4, &[vec![1, 3]]).unwrap(),
        ];
        GroupTable::build(&Generators::Permutations(ps), 4096).unwrap()
    }

    fn find(g: &GroupTable, label: &str) -> usize {
        (0..g.order()).find(|&x| g.label(x) == label).unwrap()
    }

    #[test]
    fn basis_products_follow_the_table() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(a.multiply(&a.basis(x), &a.basis(y)).unwrap(), a.basis(g.mul(x, y)));
            }
            assert_eq!(a.multiply(&a.one(), &a.basis(x)).unwrap(), a.basis(x));
        }
    }

    #[test]
    fn square_of_one_plus_rotation_in_characteristic_two() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let r = find(&g, "(1 2 3 4)");
        let v = a.one().add(&a.basis(r));
        let sq = a.multiply(&v, &v).unwrap();
        assert_eq!(sq, a.one().add(&a.basis(g.mul(r, r))));
    }

    #[test]
    fn brackets() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let r = find(&g, "(1 2 3 4)");
        let s = find(&g, "(1 3)");
        let v = a.basis(r).add(&a.basis(s));
        assert!(a.lie_bracket(&v, &v).unwrap().is_zero());
        let r2 = g.mul(r, r);
        assert!(a.lie_bracket(&a.basis(r), &a.basis(r2)).unwrap().is_zero());
        let rs = a.lie_bracket(&a.basis(r), &a.basis(s)).unwrap();
        assert_eq!(rs.weight(), 2);
        assert_eq!(rs, a.basis(g.mul(r, s)).add(&a.basis(g.mul(s, r))));
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        let bad = AlgebraVector::zero(3, 8);
        assert!(matches!(a.multiply(&a.one(), &bad), Err(Error::AlgebraMismatch(_))));
        assert!(GroupAlgebra::new(&g, 4).is_err());
    }

    #[test]
    fn ideal_closure_examples() {
        let g = d8();
        let a = GroupAlgebra::new(&g, 2).unwrap();
        assert!(a.ideal_closure(&[]).unwrap().is_zero());
        assert_eq!(a.ideal_closure(&[a.one()]).unwrap().dim(), 8);

        // Δ(G')·KG: oracle is the span of all (z - 1)·x over z ∈ G', x ∈ G.
        let derived = g.derived_subgroup();
        let seeds: Vec<_> = derived.members().iter().map(|&z| a.basis(z).sub(&a.one())).collect();
        let ideal = a.ideal_closure(&seeds).unwrap();
        let mut products = Vec::new();
        for s in &seeds {
            for x in 0..8 {
                products.push(a.multiply(s, &a.basis(x)).unwrap());
                products.push(a.multiply(&a.basis(x), s).unwrap());
            }
        }
        let oracle = a.span(&products).unwrap();
        assert_eq!(oracle.dim(), 4);
        assert_eq!(ideal.dim(), 4);
        assert!(ideal.is_subspace_of(&oracle) && oracle.is_subspace_of(&ideal));
        assert!(ideal.is_reduced());
        let rows = ideal.rows();
        let pivots: Vec<_> = rows
            .iter()
            .map(|r| r.coeffs().iter().position(|&c| c != 0).unwrap())
            .collect();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
    }

    fn vec_strategy(p: u8, n: usize) -> impl Strategy<Value = AlgebraVector> {
        prop::collection::vec(0..p, n).prop_map(move |c| AlgebraVector::new(p, c))
    }

    proptest! {
        #[test]
        fn ring_axioms_in_f3_d8(
            x in vec_strategy(3, 8), y in vec_strategy(3, 8), z in vec_strategy(3, 8)
        ) {
            let g = d8();
            let a = GroupAlgebra::new(&g, 3).unwrap();
            let xy_z = a.multiply(&a.multiply(&x, &y).unwrap(), &z).unwrap();
            let x_yz = a.multiply(&x, &a.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(xy_z, x_yz);
            let lhs = a.multiply(&x, &y.add(&z)).unwrap();
            let rhs = a.multiply(&x, &y).unwrap().add(&a.multiply(&x, &z).unwrap());
            prop_assert_eq!(lhs, rhs);
            prop_assert!(a.lie_bracket(&x, &x).unwrap().is_zero());
            let b1 = a.lie_bracket(&x.add(&y), &z).unwrap();
            let b2 = a.lie_bracket(&x, &z).unwrap().add(&a.lie_bracket(&y, &z).unwrap());
            prop_assert_eq!(b1, b2);
        }
    }
}
