//! Dense matrices over a tabulated ring, division-free determinants, and the
//! packed `u128` keys used to hash group elements.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c).0)?;
            }
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn scalar(n: usize, k: Elem) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, k);
        }
        m
    }

    /// The matrix unit with a single `k` at `(r, c)`.
    pub fn unit(rows: usize, cols: usize, r: usize, c: usize, k: Elem) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        m.set(r, c, k);
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    /// Builds a matrix from small integers reduced into the ring.
    pub fn from_ints(ring: &Ring, rows: &[&[i64]]) -> Mat {
        let v: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|&k| ring.from_int(k)).collect()).collect();
        Mat::from_rows(&v)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == if r == c { Elem::ONE } else { Elem::ZERO }))
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn add(&self, ring: &Ring, o: &Mat) -> Mat {
        debug_assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| ring.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, ring: &Ring, o: &Mat) -> Mat {
        debug_assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| ring.sub(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, ring: &Ring) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| ring.neg(a)).collect() }
    }

    pub fn scale(&self, ring: &Ring, k: Elem) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| ring.mul(a, k)).collect() }
    }

    /// Entrywise involution, no transpose.
    pub fn conj_entries(&self, ring: &Ring) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| ring.conj(a)).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn conj_transpose(&self, ring: &Ring) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, ring.conj(self.get(r, c)));
            }
        }
        t
    }

    pub fn mul(&self, ring: &Ring, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, o.cols);
        let (n, oc) = (self.cols, o.cols);
        if n == 0 || oc == 0 {
            return out;
        }
        for (arow, dst) in self.data.chunks_exact(n).zip(out.data.chunks_exact_mut(oc)) {
            for (&a, brow) in arow.iter().zip(o.data.chunks_exact(oc)) {
                if a.is_zero() {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        *d = ring.add(*d, ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, ring: &Ring, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Elem::ZERO;
                for (k, &x) in v.iter().enumerate() {
                    acc = ring.add(acc, ring.mul(self.get(r, k), x));
                }
                acc
            })
            .collect()
    }

    /// Copies `src` into this matrix at offset `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, src: &Mat) {
        for r in 0..src.rows {
            for c in 0..src.cols {
                self.set(r0 + r, c0 + c, src.get(r, c));
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let mut m = Mat::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    /// Characteristic polynomial coefficients `c` with
    /// `det(tI - A) = sum_k c[k] t^(n-k)`, by Berkowitz's division-free method.
    pub fn charpoly(&self, ring: &Ring) -> Vec<Elem> {
        assert!(self.is_square());
        let n = self.rows;
        let mut c = vec![Elem::ONE];
        for r in 0..n {
            // Leading r x r block M, row R = A[r, ..r], column S = A[..r, r], corner a.
            let a = self.get(r, r);
            let mut t = vec![Elem::ZERO; r + 2];
            t[0] = Elem::ONE;
            t[1] = ring.neg(a);
            // v = M^k S, starting at k = 0.
            let mut v: Vec<Elem> = (0..r).map(|i| self.get(i, r)).collect();
            for k in 0..r {
                let mut dot = Elem::ZERO;
                for (i, &vi) in v.iter().enumerate() {
                    dot = ring.add(dot, ring.mul(self.get(r, i), vi));
                }
                t[k + 2] = ring.neg(dot);
                if k + 1 < r {
                    let mut nv = vec![Elem::ZERO; r];
                    for (i, slot) in nv.iter_mut().enumerate() {
                        let mut acc = Elem::ZERO;
                        for (j, &vj) in v.iter().enumerate() {
                            acc = ring.add(acc, ring.mul(self.get(i, j), vj));
                        }
                        *slot = acc;
                    }
                    v = nv;
                }
            }
            // Lower-triangular Toeplitz product: new[i] = sum_{j<=i} t[i-j] c[j].
            let mut nc = vec![Elem::ZERO; r + 2];
            for (i, slot) in nc.iter_mut().enumerate() {
                let mut acc = Elem::ZERO;
                for (j, &cj) in c.iter().enumerate() {
                    if j <= i && i - j < t.len() {
                        acc = ring.add(acc, ring.mul(t[i - j], cj));
                    }
                }
                *slot = acc;
            }
            c = nc;
        }
        c
    }

    pub fn det(&self, ring: &Ring) -> Elem {
        let n = self.rows;
        let c = self.charpoly(ring);
        if n % 2 == 0 {
            c[n]
        } else {
            ring.neg(c[n])
        }
    }

    /// Inverse through Cayley-Hamilton; `None` when the determinant is not a unit.
    pub fn inverse(&self, ring: &Ring) -> Option<Mat> {
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let c = self.charpoly(ring);
        let cn_inv = ring.inv(c[n])?;
        let mut b = Mat::identity(n);
        for &ck in c.iter().take(n).skip(1) {
            b = self.mul(ring, &b);
            for i in 0..n {
                let cur = b.get(i, i);
                b.set(i, i, ring.add(cur, ck));
            }
        }
        Some(b.scale(ring, ring.neg(cn_inv)))
    }

    pub fn is_invertible(&self, ring: &Ring) -> bool {
        self.is_square() && ring.is_unit(self.det(ring))
    }

    pub fn show(&self, ring: &Ring) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| ring.show(self.get(r, c))).collect()).collect()
    }
}

/// `[a, b] = a b a^-1 b^-1`, given the inverses.
pub fn commutator(ring: &Ring, a: &Mat, a_inv: &Mat, b: &Mat, b_inv: &Mat) -> Mat {
    a.mul(ring, b).mul(ring, a_inv).mul(ring, b_inv)
}

/// Packs square matrices over a fixed ring into a `u128`, row-major,
/// `bits` per entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyCodec {
    pub dim: usize,
    pub bits: u32,
}

pub type GroupKey = u128;

impl KeyCodec {
    pub fn new(ring: &Ring, dim: usize) -> Result<KeyCodec> {
        let bits = ring.bits().max(1);
        if dim * dim * bits as usize > 128 {
            return Err(Error::CarrierTooLarge(format!(
                "{dim}x{dim} matrices need {} bits, keys hold 128",
                dim * dim * bits as usize
            )));
        }
        Ok(KeyCodec { dim, bits })
    }

    #[inline]
    pub fn encode_slice(&self, data: &[u8]) -> GroupKey {
        let mut k: u128 = 0;
        for &e in data.iter().rev() {
            k = (k << self.bits) | e as u128;
        }
        k
    }

    pub fn encode(&self, m: &Mat) -> GroupKey {
        debug_assert_eq!(m.rows(), self.dim);
        let mut k: u128 = 0;
        for &e in m.data().iter().rev() {
            k = (k << self.bits) | e.0 as u128;
        }
        k
    }

    #[inline]
    pub fn decode_into(&self, mut k: GroupKey, out: &mut [u8]) {
        let mask = (1u128 << self.bits) - 1;
        for slot in out.iter_mut() {
            *slot = (k & mask) as u8;
            k >>= self.bits;
        }
    }

    pub fn decode(&self, k: GroupKey) -> Mat {
        let mut buf = vec![0u8; self.dim * self.dim];
        self.decode_into(k, &mut buf);
        Mat::from_vec(self.dim, self.dim, buf.into_iter().map(Elem).collect())
    }
}

/// A matrix `1 + N` with `N` stored as its nonzero entries, for cheap
/// right multiplication of dense elements.
#[derive(Clone, Debug)]
pub struct SparseGen {
    pub dim: usize,
    /// `(k, j, v)`: entry `N[k][j] = v`.
    pub entries: Vec<(usize, usize, Elem)>,
}

impl SparseGen {
    pub fn from_mat(ring: &Ring, g: &Mat) -> SparseGen {
        let n = g.rows();
        let nm = g.sub(ring, &Mat::identity(n));
        let mut entries = Vec::new();
        for k in 0..n {
            for j in 0..n {
                let v = nm.get(k, j);
                if !v.is_zero() {
                    entries.push((k, j, v));
                }
            }
        }
        SparseGen { dim: n, entries }
    }

    /// `out = src * (1 + N)` on row-major byte buffers.
    #[inline]
    pub fn right_mul(&self, ring: &Ring, src: &[u8], out: &mut [u8]) {
        out.copy_from_slice(src);
        let n = self.dim;
        for &(k, j, v) in &self.entries {
            for r in 0..n {
                let a = Elem(src[r * n + k]);
                if !a.is_zero() {
                    let cur = Elem(out[r * n + j]);
                    out[r * n + j] = ring.add(cur, ring.mul(a, v)).0;
                }
            }
        }
    }
}
