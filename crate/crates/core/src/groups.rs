//! Exact finite matrix groups by breadth-first closure over packed keys.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::matrix::{GroupKey, KeyCodec, Mat, SparseGen};
use crate::ring::Ring;

/// Default element cap for closures.
pub const DEFAULT_GROUP_CAP: usize = 4_000_000;

/// A fully enumerated subgroup of `GL(d, K)`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    ring: Ring,
    codec: KeyCodec,
    gens: Vec<Mat>,
    sparse: Vec<SparseGen>,
    /// Discovery order, used as the BFS queue.
    elems: Vec<GroupKey>,
    set: FxHashSet<GroupKey>,
    cap: usize,
}

impl FiniteGroup {
    /// The trivial subgroup of `GL(dim, K)`.
    pub fn trivial(ring: &Ring, dim: usize, cap: usize) -> Result<FiniteGroup> {
        let codec = KeyCodec::new(ring, dim)?;
        let id = codec.encode(&Mat::identity(dim));
        let mut set = FxHashSet::default();
        set.insert(id);
        Ok(FiniteGroup { ring: ring.clone(), codec, gens: Vec::new(), sparse: Vec::new(), elems: vec![id], set, cap: cap.max(1) })
    }

    /// `<gens>`.
    pub fn generate(ring: &Ring, dim: usize, gens: &[Mat], cap: usize) -> Result<FiniteGroup> {
        let mut g = FiniteGroup::trivial(ring, dim, cap)?;
        g.extend(gens)?;
        Ok(g)
    }

    /// Smallest subgroup containing `seed` and normalized by every element
    /// of `normalizers`.
    pub fn normal_closure(ring: &Ring, dim: usize, seed: &[Mat], normalizers: &[Mat], cap: usize) -> Result<FiniteGroup> {
        let mut g = FiniteGroup::generate(ring, dim, seed, cap)?;
        g.normalize(normalizers)?;
        Ok(g)
    }

    /// Enlarges the group to its normal closure under `normalizers`.
    ///
    /// A finite subgroup `H` with `n h n^-1` in `H` for each generator `h`
    /// satisfies `n H n^-1 = H`, so checking generators until nothing new
    /// appears is enough.
    pub fn normalize(&mut self, normalizers: &[Mat]) -> Result<()> {
        let invs: Vec<Mat> = normalizers.iter().map(|n| n.inverse(&self.ring).ok_or(Error::NotInvertible)).collect::<Result<_>>()?;
        let mut checked = 0;
        while checked < self.gens.len() {
            let h = self.gens[checked].clone();
            checked += 1;
            for (n, ni) in normalizers.iter().zip(&invs) {
                let c = n.mul(&self.ring, &h).mul(&self.ring, ni);
                if !self.contains(&c) {
                    self.extend(std::slice::from_ref(&c))?;
                }
            }
        }
        Ok(())
    }

    /// Adds generators and recloses. Only products involving a new
    /// generator can leave the old group, so the queue starts from
    /// `G * g_new` rather than from scratch.
    pub fn extend(&mut self, new_gens: &[Mat]) -> Result<()> {
        let n = self.codec.dim;
        let mut src = vec![0u8; n * n];
        let mut out = vec![0u8; n * n];
        for g in new_gens {
            if g.rows() != n || !g.is_square() {
                return Err(Error::DimensionMismatch(format!("generator is {}x{}, group acts on dimension {n}", g.rows(), g.cols())));
            }
            if !g.is_invertible(&self.ring) {
                return Err(Error::NotInvertible);
            }
            if self.contains(g) {
                continue;
            }
            self.gens.push(g.clone());
            let sg = SparseGen::from_mat(&self.ring, g);
            let start = self.elems.len();
            let old = self.elems.len();
            for idx in 0..old {
                self.codec.decode_into(self.elems[idx], &mut src);
                sg.right_mul(&self.ring, &src, &mut out);
                self.insert(self.codec.encode_slice(&out))?;
            }
            self.sparse.push(sg);
            let mut head = start;
            while head < self.elems.len() {
                self.codec.decode_into(self.elems[head], &mut src);
                head += 1;
                for s in &self.sparse {
                    s.right_mul(&self.ring, &src, &mut out);
                    let k = self.codec.encode_slice(&out);
                    if self.set.insert(k) {
                        if self.elems.len() >= self.cap {
                            return Err(Error::CapExceeded { what: "group closure".into(), cap: self.cap });
                        }
                        self.elems.push(k);
                    }
                }
            }
        }
        Ok(())
    }

    fn insert(&mut self, k: GroupKey) -> Result<()> {
        if self.set.insert(k) {
            if self.elems.len() >= self.cap {
                return Err(Error::CapExceeded { what: "group closure".into(), cap: self.cap });
            }
            self.elems.push(k);
        }
        Ok(())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.codec.dim
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    /// The non-redundant generators actually used.
    pub fn generators(&self) -> &[Mat] {
        &self.gens
    }

    pub fn contains(&self, g: &Mat) -> bool {
        g.rows() == self.codec.dim && g.is_square() && self.set.contains(&self.codec.encode(g))
    }

    pub fn contains_key(&self, k: GroupKey) -> bool {
        self.set.contains(&k)
    }

    pub fn keys(&self) -> &[GroupKey] {
        &self.elems
    }

    pub fn codec(&self) -> KeyCodec {
        self.codec
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat> + '_ {
        self.elems.iter().map(|&k| self.codec.decode(k))
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.codec == other.codec && self.order() <= other.order() && self.gens.iter().all(|g| other.contains(g))
    }

    pub fn equal(&self, other: &FiniteGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// Whether `n G n^-1 = G` for each given matrix.
    pub fn is_normalized_by(&self, normalizers: &[Mat]) -> bool {
        normalizers.iter().all(|n| match n.inverse(&self.ring) {
            Some(ni) => self.gens.iter().all(|h| self.contains(&n.mul(&self.ring, h).mul(&self.ring, &ni))),
            None => false,
        })
    }

    /// Hex keys in sorted order, for diffing runs.
    pub fn dump_hex(&self) -> Vec<String> {
        let mut ks = self.elems.clone();
        ks.sort_unstable();
        ks.iter().map(|k| format!("{k:032x}")).collect()
    }
}

/// `|GL(d, F_q)|`, or `None` on overflow.
pub fn gl_order(q: u128, d: u32) -> Option<u128> {
    let qd = q.checked_pow(d)?;
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = acc.checked_mul(qd - q.checked_pow(i)?)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::EndoContext;
    use crate::forms::{build_standard_space, BlockProfile, ParamChoice, DEFAULT_PARAM_CAP};
    use crate::ring::RingSpec;
    use proptest::prelude::*;

    fn f2() -> Ring {
        Ring::new(&RingSpec::modular(2, 1)).unwrap()
    }

    #[test]
    fn trivial_and_cyclic() {
        let k = f2();
        let g = FiniteGroup::generate(&k, 3, &[], 10).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.contains(&Mat::identity(3)));
        // A 3-cycle permutation matrix.
        let p = Mat::from_ints(&k, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let c = FiniteGroup::generate(&k, 3, &[p.clone()], 10).unwrap();
        assert_eq!(c.order(), 3);
        assert!(g.is_subgroup_of(&c));
        assert!(c.equal(&c));
        let t = Mat::from_ints(&k, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let gl = FiniteGroup::generate(&k, 3, &[p, t], 1000).unwrap();
        assert_eq!(gl.order() as u128, gl_order(2, 3).unwrap());
        assert!(matches!(FiniteGroup::generate(&k, 3, gl.generators(), 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn normal_closure_of_a_transvection() {
        let k = f2();
        let p = Mat::from_ints(&k, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let t = Mat::from_ints(&k, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        // GL(3,2) is simple, so one transvection normally generates it.
        let nc = FiniteGroup::normal_closure(&k, 3, &[t.clone()], &[p.clone(), t.clone()], 1000).unwrap();
        assert_eq!(nc.order(), 168);
        let plain = FiniteGroup::normal_closure(&k, 3, &[t.clone()], &[], 1000).unwrap();
        assert_eq!(plain.order(), 2);
        assert!(nc.is_normalized_by(&[p, t]));
    }

    #[test]
    fn hyperbolic_plane_unitary_group() {
        let k = f2();
        let s = build_standard_space(&k, &BlockProfile::simple(1, 0), &Mat::identity(0), &ParamChoice::Minimal, DEFAULT_PARAM_CAP).unwrap();
        let keys = s.unitary_group_keys(100).unwrap();
        let codec = KeyCodec::new(&k, 2).unwrap();
        let mats: Vec<Mat> = keys.iter().map(|&x| codec.decode(x)).collect();
        let g = FiniteGroup::generate(&k, 2, &mats, 100).unwrap();
        assert_eq!(g.order(), 2);
        let _ = EndoContext::new(&s).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn closure_is_idempotent_and_divides_gl(entries in proptest::collection::vec(0u8..2, 18)) {
            let k = f2();
            let a = Mat::from_vec(3, 3, entries[..9].iter().map(|&e| crate::ring::Elem(e)).collect());
            let b = Mat::from_vec(3, 3, entries[9..].iter().map(|&e| crate::ring::Elem(e)).collect());
            let gens: Vec<Mat> = [a, b].into_iter().filter(|m| m.is_invertible(&k)).collect();
            let g = FiniteGroup::generate(&k, 3, &gens, 1000).unwrap();
            prop_assert_eq!(gl_order(2, 3).unwrap() % g.order() as u128, 0);
            let all: Vec<Mat> = g.elements().collect();
            let again = FiniteGroup::generate(&k, 3, &all, 1000).unwrap();
            prop_assert!(again.equal(&g));
            for x in &all {
                prop_assert!(g.contains(&x.inverse(&k).unwrap()));
            }
        }
    }
}
