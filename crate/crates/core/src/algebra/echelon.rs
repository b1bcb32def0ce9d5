use crate::algebra::row::{inverse_mod, Row};

/// A subspace of `F_p^N` held in fully reduced row echelon form: each row
/// has a leading 1 whose column is zero in every other row.
#[derive(Clone, Debug)]
pub(crate) struct Echelon<R: Row> {
    len: usize,
    p: u8,
    rows: Vec<R>,
    pivots: Vec<usize>,
    pivot_row: Vec<u32>,
}

const NO_ROW: u32 = u32::MAX;

impl<R: Row> Echelon<R> {
    pub(crate) fn new(len: usize, p: u8) -> Self {
        Echelon {
            len,
            p,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![NO_ROW; len],
        }
    }

    /// The whole space, with the unit vectors as basis.
    pub(crate) fn full(len: usize, p: u8) -> Self {
        let mut e = Self::new(len, p);
        for i in 0..len {
            let mut r = R::zero(len, p);
            r.set(i, 1);
            e.pivot_row[i] = i as u32;
            e.pivots.push(i);
            e.rows.push(r);
        }
        e
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn p(&self) -> u8 {
        self.p
    }

    pub(crate) fn rows(&self) -> &[R] {
        &self.rows
    }

    /// Subtracts the span's component along every pivot column.
    pub(crate) fn reduce(&self, v: &mut R) {
        let p = self.p;
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let c = v.get(col);
            if c != 0 {
                v.axpy(p - c, row);
            }
        }
    }

    pub(crate) fn contains(&self, v: &R) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` to the span. Returns the reduced, normalized vector that was
    /// appended, or `None` when `v` was already in the span.
    pub(crate) fn insert(&mut self, mut v: R) -> Option<&R> {
        self.reduce(&mut v);
        let lead = v.leading()?;
        let lc = v.get(lead);
        if lc != 1 {
            v.scale(inverse_mod(lc, self.p));
        }
        let p = self.p;
        for r in &mut self.rows {
            let c = r.get(lead);
            if c != 0 {
                r.axpy(p - c, &v);
            }
        }
        self.pivot_row[lead] = self.rows.len() as u32;
        self.pivots.push(lead);
        self.rows.push(v);
        self.rows.last()
    }

    pub(crate) fn is_subspace_of(&self, other: &Echelon<R>) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Rows ordered by increasing pivot column.
    pub(crate) fn sorted_rows(&self) -> Vec<&R> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_unstable_by_key(|&i| self.pivots[i]);
        idx.into_iter().map(|i| &self.rows[i]).collect()
    }

    /// Whether the RREF invariants hold.
    pub(crate) fn check(&self) -> bool {
        self.rows.iter().zip(&self.pivots).all(|(r, &c)| {
            r.get(c) == 1
                && r.leading() == Some(c)
                && self.pivot_row[c] != NO_ROW
                && self.pivots.iter().filter(|&&d| d != c).all(|&d| r.get(d) == 0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::row::{Gf2Row, GfpRow};
    use proptest::prelude::*;

    /// Rank by plain Gaussian elimination on dense rows.
    fn rank_oracle(p: u8, rows: &[Vec<u8>]) -> usize {
        let p = p as u32;
        let mut m: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&x| x as u32 % p).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = (1..p).find(|&x| x * m[rank][c] % p == 1).unwrap();
            for j in 0..cols {
                m[rank][j] = m[rank][j] * inv % p;
            }
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let f = m[r][c];
                    for j in 0..cols {
                        m[r][j] = (m[r][j] + (p - f) * m[rank][j]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn rows_strategy(p: u8) -> impl Strategy<Value = Vec<Vec<u8>>> {
        (1usize..12).prop_flat_map(move |cols| prop::collection::vec(prop::collection::vec(0..p, cols), 0..14))
    }

    proptest! {
        #[test]
        fn gf2_rank_matches_oracle(rows in rows_strategy(2)) {
            let cols = rows.first().map_or(1, Vec::len);
            let mut e: Echelon<Gf2Row> = Echelon::new(cols, 2);
            for r in &rows {
                e.insert(Gf2Row::from_dense(2, r));
            }
            prop_assert_eq!(e.dim(), rank_oracle(2, &rows));
            prop_assert!(e.check());
            for r in &rows {
                prop_assert!(e.contains(&Gf2Row::from_dense(2, r)));
            }
        }

        #[test]
        fn gf5_rank_matches_oracle(rows in rows_strategy(5)) {
            let cols = rows.first().map_or(1, Vec::len);
            let mut e: Echelon<GfpRow> = Echelon::new(cols, 5);
            for r in &rows {
                e.insert(GfpRow::from_dense(5, r));
            }
            prop_assert_eq!(e.dim(), rank_oracle(5, &rows));
            prop_assert!(e.check());
        }
    }

    #[test]
    fn full_space_contains_everything() {
        let e: Echelon<GfpRow> = Echelon::full(4, 3);
        assert_eq!(e.dim(), 4);
        assert!(e.contains(&GfpRow::from_dense(3, &[2, 1, 0, 2])));
        assert!(e.check());
    }
}
