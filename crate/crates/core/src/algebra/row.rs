//! Coefficient rows over `F_p`: bit-packed for `p = 2`, one byte per entry
//! otherwise.

pub(crate) trait Row: Clone + PartialEq + std::fmt::Debug {
    fn zero(len: usize, p: u8) -> Self;
    fn len(&self) -> usize;
    fn get(&self, i: usize) -> u8;
    fn set(&mut self, i: usize, v: u8);
    fn is_zero(&self) -> bool;
    fn leading(&self) -> Option<usize>;
    /// `self += c · other`.
    fn axpy(&mut self, c: u8, other: &Self);
    fn scale(&mut self, c: u8);
    fn for_each_nonzero(&self, f: impl FnMut(usize, u8));
    fn characteristic(&self) -> u8;

    fn from_dense(p: u8, coeffs: &[u8]) -> Self {
        let mut r = Self::zero(coeffs.len(), p);
        for (i, &c) in coeffs.iter().enumerate() {
            if c % p != 0 {
                r.set(i, c % p);
            }
        }
        r
    }

    fn to_dense(&self) -> Vec<u8> {
        let mut out = vec![0; self.len()];
        self.for_each_nonzero(|i, c| out[i] = c);
        out
    }

    /// The row with entry `i` moved to position `perm[i]`.
    fn permuted(&self, perm: &[u16]) -> Self {
        let mut out = Self::zero(self.len(), self.characteristic());
        self.for_each_nonzero(|i, c| out.set(perm[i] as usize, c));
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Gf2Row {
    len: usize,
    words: Vec<u64>,
}

impl Row for Gf2Row {
    fn zero(len: usize, p: u8) -> Self {
        debug_assert_eq!(p, 2);
        Gf2Row {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn get(&self, i: usize) -> u8 {
        ((self.words[i >> 6] >> (i & 63)) & 1) as u8
    }

    #[inline]
    fn set(&mut self, i: usize, v: u8) {
        let bit = 1u64 << (i & 63);
        if v & 1 == 1 {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
    }

    #[inline]
    fn axpy(&mut self, c: u8, other: &Self) {
        if c & 1 == 1 {
            for (a, b) in self.words.iter_mut().zip(&other.words) {
                *a ^= b;
            }
        }
    }

    fn scale(&mut self, c: u8) {
        if c & 1 == 0 {
            self.words.fill(0);
        }
    }

    fn for_each_nonzero(&self, mut f: impl FnMut(usize, u8)) {
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                f(k * 64 + b, 1);
                w &= w - 1;
            }
        }
    }

    fn characteristic(&self) -> u8 {
        2
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct GfpRow {
    p: u8,
    data: Vec<u8>,
}

impl Row for GfpRow {
    fn zero(len: usize, p: u8) -> Self {
        GfpRow { p, data: vec![0; len] }
    }

    fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn get(&self, i: usize) -> u8 {
        self.data[i]
    }

    #[inline]
    fn set(&mut self, i: usize, v: u8) {
        self.data[i] = v;
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn leading(&self) -> Option<usize> {
        self.data.iter().position(|&x| x != 0)
    }

    fn axpy(&mut self, c: u8, other: &Self) {
        let p = self.p as u16;
        let c = c as u16 % p;
        if c == 0 {
            return;
        }
        // c·x mod p for every residue x
        let mut table = [0u8; 256];
        for x in 0..p {
            table[x as usize] = (c * x % p) as u8;
        }
        let p = self.p;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            let s = *a as u16 + table[b as usize] as u16;
            *a = if s >= p as u16 { (s - p as u16) as u8 } else { s as u8 };
        }
    }

    fn scale(&mut self, c: u8) {
        let p = self.p as u16;
        for a in &mut self.data {
            *a = (*a as u16 * c as u16 % p) as u8;
        }
    }

    fn for_each_nonzero(&self, mut f: impl FnMut(usize, u8)) {
        for (i, &x) in self.data.iter().enumerate() {
            if x != 0 {
                f(i, x);
            }
        }
    }

    fn characteristic(&self) -> u8 {
        self.p
    }
}

pub(crate) fn inverse_mod(a: u8, p: u8) -> u8 {
    let (a, p) = (a as u32 % p as u32, p as u32);
    debug_assert!(a != 0);
    let mut acc = 1u32;
    let (mut base, mut e) = (a, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_and_byte_rows_agree() {
        let dense = [1u8, 0, 1, 1, 0, 0, 1];
        let a = Gf2Row::from_dense(2, &dense);
        let b = GfpRow::from_dense(2, &dense);
        assert_eq!(a.to_dense(), b.to_dense());
        assert_eq!(a.leading(), Some(0));
        let mut a2 = a.clone();
        a2.axpy(1, &a);
        assert!(a2.is_zero());
    }

    #[test]
    fn gfp_axpy_wraps() {
        let mut a = GfpRow::from_dense(5, &[4, 1, 0]);
        let b = GfpRow::from_dense(5, &[3, 3, 3]);
        a.axpy(2, &b);
        assert_eq!(a.to_dense(), vec![0, 2, 1]);
    }

    #[test]
    fn inverses() {
        for p in [2u8, 3, 5, 7, 251] {
            for a in 1..p {
                assert_eq!(a as u32 * inverse_mod(a, p) as u32 % p as u32, 1);
            }
        }
    }

    #[test]
    fn permutation_moves_entries() {
        let r = Gf2Row::from_dense(2, &[1, 0, 0, 1]);
        let q = r.permuted(&[2, 0, 3, 1]);
        assert_eq!(q.to_dense(), vec![0, 1, 1, 0]);
    }
}
