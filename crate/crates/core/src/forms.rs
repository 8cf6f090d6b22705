//! Hermitian forms on free modules, odd form parameters inside `Heis(B)`,
//! quotient-valued quadratic maps, orthogonal sums and metabolic spaces.
//!
//! Conventions. Vectors are columns and `B(m, m') = conj(m)^T b m'`. The
//! hermitian condition is `B(m', m) = conj(B(m, m')) lambda`, so entrywise
//! `b[j][i] = conj(b[i][j]) lambda`. In a standard space the basis is ordered
//! by block index `-l, ..., l`, and for `i > 0` the pairing is
//! `b[e_i][e_-i] = 1`, `b[e_-i][e_i] = lambda`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::Range;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{GroupKey, KeyCodec, Mat};
use crate::quad::{AlgebraBinding, QuadRing, QuadStructure, UniversalStructure};
use crate::report::{Check, Report};
use crate::ring::{Elem, Ring};

/// Default cap on the size of an odd form parameter.
pub const DEFAULT_PARAM_CAP: usize = 1 << 20;

/// Hyperbolic rank `l` and block ranks `(r_0, ..., r_l)`; block `-i` has rank `r_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub l: usize,
    pub ranks: Vec<usize>,
}

impl BlockProfile {
    pub fn new(l: usize, ranks: Vec<usize>) -> Result<BlockProfile> {
        if l == 0 {
            return Err(Error::DimensionMismatch("hyperbolic rank l must be at least 1".into()));
        }
        if ranks.len() != l + 1 {
            return Err(Error::DimensionMismatch(format!("expected {} block ranks (r_0..r_l), got {}", l + 1, ranks.len())));
        }
        let p = BlockProfile { l, ranks };
        if p.dim() == 0 {
            return Err(Error::DimensionMismatch("total dimension is zero".into()));
        }
        Ok(p)
    }

    /// `r_0 = r0` and every hyperbolic block of rank 1.
    pub fn simple(l: usize, r0: usize) -> BlockProfile {
        let mut ranks = vec![1; l + 1];
        ranks[0] = r0;
        BlockProfile { l, ranks }
    }

    pub fn rank(&self, i: i32) -> usize {
        self.ranks[i.unsigned_abs() as usize]
    }

    pub fn dim(&self) -> usize {
        self.ranks[0] + 2 * self.ranks[1..].iter().sum::<usize>()
    }

    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        let l = self.l as i32;
        -l..=l
    }

    /// Hyperbolic block indices `+-1, ..., +-l`.
    pub fn nonzero_blocks(&self) -> impl Iterator<Item = i32> {
        self.blocks().filter(|&i| i != 0)
    }

    pub fn offset(&self, i: i32) -> usize {
        let l = self.l as i32;
        (-l..i).map(|j| self.rank(j)).sum()
    }

    pub fn range(&self, i: i32) -> Range<usize> {
        let o = self.offset(i);
        o..o + self.rank(i)
    }

    pub fn block_of(&self, idx: usize) -> i32 {
        self.blocks().find(|&i| self.range(i).contains(&idx)).expect("index inside the module")
    }

    /// Index of the basis vector paired with `idx` in the opposite block.
    pub fn partner(&self, idx: usize) -> usize {
        let i = self.block_of(idx);
        self.offset(-i) + (idx - self.offset(i))
    }
}

/// A sesquilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    pub ring: Ring,
    pub b: Mat,
}

impl HermitianForm {
    pub fn new(ring: &Ring, b: Mat) -> Result<HermitianForm> {
        if !b.is_square() {
            return Err(Error::DimensionMismatch(format!("Gram matrix is {}x{}", b.rows(), b.cols())));
        }
        Ok(HermitianForm { ring: ring.clone(), b })
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn eval(&self, m: &[Elem], m2: &[Elem]) -> Result<Elem> {
        let d = self.dim();
        if m.len() != d || m2.len() != d {
            return Err(Error::DimensionMismatch(format!("vectors of length {} and {} against dimension {d}", m.len(), m2.len())));
        }
        Ok(self.eval_unchecked(m, m2))
    }

    #[inline]
    pub fn eval_unchecked(&self, m: &[Elem], m2: &[Elem]) -> Elem {
        let k = &self.ring;
        let mut acc = Elem::ZERO;
        for (i, &a) in m.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ca = k.conj(a);
            for (j, &c) in m2.iter().enumerate() {
                let bij = self.b.get(i, j);
                if !bij.is_zero() && !c.is_zero() {
                    acc = k.add(acc, k.mul(k.mul(ca, bij), c));
                }
            }
        }
        acc
    }

    /// `B(e_j, e_i) = conj(B(e_i, e_j)) lambda` on all basis pairs.
    pub fn check_hermitian(&self) -> bool {
        let k = &self.ring;
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.b.get(j, i) == k.mul(k.conj(self.b.get(i, j)), k.lambda())))
    }

    pub fn check_nondegenerate(&self) -> bool {
        self.b.is_invertible(&self.ring)
    }
}

/// An element `(m, r)` of `Heis(B)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisVec {
    pub m: Vec<Elem>,
    pub r: Elem,
}

impl HeisVec {
    pub fn zero(d: usize) -> HeisVec {
        HeisVec { m: vec![Elem::ZERO; d], r: Elem::ZERO }
    }

    pub fn new(m: Vec<Elem>, r: Elem) -> HeisVec {
        HeisVec { m, r }
    }

    pub fn basis(d: usize, i: usize) -> HeisVec {
        let mut m = vec![Elem::ZERO; d];
        m[i] = Elem::ONE;
        HeisVec { m, r: Elem::ZERO }
    }
}

impl HermitianForm {
    /// `(m, r) + (m', r') = (m + m', r + r' - B(m, m'))`.
    pub fn heis_add(&self, a: &HeisVec, b: &HeisVec) -> HeisVec {
        let k = &self.ring;
        let m = a.m.iter().zip(&b.m).map(|(&x, &y)| k.add(x, y)).collect();
        HeisVec { m, r: k.sub(k.add(a.r, b.r), self.eval_unchecked(&a.m, &b.m)) }
    }

    pub fn heis_neg(&self, a: &HeisVec) -> HeisVec {
        let k = &self.ring;
        HeisVec { m: a.m.iter().map(|&x| k.neg(x)).collect(), r: k.sub(k.neg(a.r), self.eval_unchecked(&a.m, &a.m)) }
    }

    /// `(m, r) . k = (m k, conj(k) r k)`.
    pub fn heis_act(&self, a: &HeisVec, s: Elem) -> HeisVec {
        let k = &self.ring;
        HeisVec { m: a.m.iter().map(|&x| k.mul(x, s)).collect(), r: k.mul(k.mul(k.conj(s), a.r), s) }
    }

    /// `tr(m, r) = B(m, m) + r + conj(r) lambda`.
    pub fn heis_tr(&self, a: &HeisVec) -> Elem {
        let k = &self.ring;
        k.add(self.eval_unchecked(&a.m, &a.m), k.add(a.r, k.mul(k.conj(a.r), k.lambda())))
    }

    /// Generators of `L_min = {(0, r - conj(r) lambda)}`.
    pub fn lmin_generators(&self) -> Vec<HeisVec> {
        let k = &self.ring;
        let d = self.dim();
        k.zn_basis()
            .into_iter()
            .map(|r| HeisVec { m: vec![Elem::ZERO; d], r: k.sub(r, k.mul(k.conj(r), k.lambda())) })
            .collect()
    }

    /// Every element of `Heis(B)`, in a fixed order.
    pub fn heis_elements(&self) -> Vec<HeisVec> {
        let d = self.dim();
        let q = self.ring.order();
        let total = q.saturating_pow(d as u32 + 1);
        (0..total)
            .map(|mut idx| {
                let mut m = Vec::with_capacity(d);
                for _ in 0..d {
                    m.push(Elem((idx % q) as u8));
                    idx /= q;
                }
                HeisVec { m, r: Elem(idx as u8) }
            })
            .collect()
    }
}

/// An odd form parameter: a subgroup `L_min <= L <= L_max` stable under the action.
#[derive(Clone, Debug)]
pub struct OddFormParameter {
    /// Generators supplied by the caller (without `L_min`).
    pub generators: Vec<HeisVec>,
    elems: HashSet<HeisVec>,
}

impl OddFormParameter {
    /// Smallest odd form parameter containing `generators`.
    pub fn closure(form: &HermitianForm, generators: &[HeisVec], cap: usize) -> Result<OddFormParameter> {
        let d = form.dim();
        let k = &form.ring;
        for g in generators {
            if g.m.len() != d {
                return Err(Error::DimensionMismatch(format!("generator of length {} in dimension {d}", g.m.len())));
            }
            let t = form.heis_tr(g);
            if !t.is_zero() {
                return Err(Error::NotInLMax(format!("generator {} has tr = {}", show_heis(k, g), k.show(t))));
            }
        }
        let mut seeds: Vec<HeisVec> = Vec::new();
        let mut seen = HashSet::new();
        for g in generators.iter().chain(form.lmin_generators().iter()) {
            for s in k.elements() {
                let h = form.heis_act(g, s);
                if seen.insert(h.clone()) {
                    seeds.push(h);
                }
            }
        }
        let mut elems = HashSet::new();
        let zero = HeisVec::zero(d);
        elems.insert(zero.clone());
        let mut queue = VecDeque::from([zero]);
        while let Some(e) = queue.pop_front() {
            for s in &seeds {
                let n = form.heis_add(&e, s);
                if !elems.contains(&n) {
                    if elems.len() >= cap {
                        return Err(Error::Overflow(format!("odd form parameter closure exceeds the cap of {cap} elements")));
                    }
                    elems.insert(n.clone());
                    queue.push_back(n);
                }
            }
        }
        if let Some(bad) = elems.iter().find(|h| !form.heis_tr(h).is_zero()) {
            return Err(Error::NotInLMax(format!("closure element {} has nonzero trace", show_heis(k, bad))));
        }
        Ok(OddFormParameter { generators: generators.to_vec(), elems })
    }

    /// `L_max = Ker(tr)`, by enumeration of `Heis(B)`.
    pub fn maximal(form: &HermitianForm, cap: usize) -> Result<OddFormParameter> {
        let total = (form.ring.order() as u128).saturating_pow(form.dim() as u32 + 1);
        if total > cap as u128 * 16 {
            return Err(Error::Overflow(format!("Heis(B) has {total} elements, too many to enumerate")));
        }
        let elems: HashSet<HeisVec> = form.heis_elements().into_iter().filter(|h| form.heis_tr(h).is_zero()).collect();
        if elems.len() > cap {
            return Err(Error::Overflow(format!("maximal parameter has {} elements, cap is {cap}", elems.len())));
        }
        let mut generators: Vec<HeisVec> = elems.iter().cloned().collect();
        generators.sort();
        Ok(OddFormParameter { generators, elems })
    }

    pub fn contains(&self, h: &HeisVec) -> bool {
        self.elems.contains(h)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in sorted order.
    pub fn elements(&self) -> Vec<HeisVec> {
        let mut v: Vec<HeisVec> = self.elems.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn set(&self) -> &HashSet<HeisVec> {
        &self.elems
    }
}

pub fn show_heis(k: &Ring, h: &HeisVec) -> String {
    let m: Vec<String> = h.m.iter().map(|&x| k.show(x)).collect();
    format!("([{}], {})", m.join(" "), k.show(h.r))
}

/// How the odd form parameter of a standard space is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamChoice {
    /// Generated by `(e_i, 0)` for hyperbolic basis vectors and `L_min`.
    Minimal,
    /// `Ker(tr)`.
    Maximal,
    /// Minimal plus the given generators.
    Generators(Vec<HeisVec>),
}

/// A free quadratic module `(M, B, L)`; the quadratic map sends `m` to the
/// class of `(m, 0)` in `Heis(B) / L`.
#[derive(Clone, Debug)]
pub struct QuadraticSpace {
    pub ring: Ring,
    pub profile: Option<BlockProfile>,
    pub form: HermitianForm,
    pub param: OddFormParameter,
}

impl QuadraticSpace {
    /// Validates the form and closes `generators` into an odd form parameter.
    pub fn new(ring: &Ring, profile: Option<BlockProfile>, b: Mat, generators: &[HeisVec], cap: usize) -> Result<QuadraticSpace> {
        let form = HermitianForm::new(ring, b)?;
        if let Some(p) = &profile {
            if p.dim() != form.dim() {
                return Err(Error::DimensionMismatch(format!("profile dimension {} vs form dimension {}", p.dim(), form.dim())));
            }
        }
        if !form.check_hermitian() {
            return Err(Error::NotHermitian(format!("Gram matrix {:?} fails b[j][i] = conj(b[i][j]) lambda", form.b)));
        }
        let param = OddFormParameter::closure(&form, generators, cap)?;
        Ok(QuadraticSpace { ring: ring.clone(), profile, form, param })
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn profile(&self) -> &BlockProfile {
        self.profile.as_ref().expect("space carries a block profile")
    }

    pub fn eval(&self, m: &[Elem], m2: &[Elem]) -> Result<Elem> {
        self.form.eval(m, m2)
    }

    pub fn check_nondegenerate(&self) -> bool {
        self.form.check_nondegenerate()
    }

    /// Whether `h` and `h2` lie in the same class of `Heis(B) / L`.
    pub fn same_class(&self, h: &HeisVec, h2: &HeisVec) -> bool {
        self.param.contains(&self.form.heis_add(&self.form.heis_neg(h2), h))
    }

    /// Canonical representative: the least element of `h + L`.
    pub fn canonical(&self, h: &HeisVec) -> HeisVec {
        self.param.set().iter().map(|l| self.form.heis_add(h, l)).min().expect("L contains zero")
    }

    /// `q~(m)` as a canonical coset representative.
    pub fn qtilde(&self, m: &[Elem]) -> HeisVec {
        self.canonical(&HeisVec { m: m.to_vec(), r: Elem::ZERO })
    }

    /// `q~(m)` computed from the basis values alone, expanding `m` in the
    /// given order of basis indices with `q~(x k) = q~(x).k` and
    /// `q~(x + y) = q~(x) + phi(B(x, y)) + q~(y)`. Returns a (noncanonical)
    /// element of the class.
    pub fn qtilde_expand(&self, m: &[Elem], order: &[usize]) -> HeisVec {
        let d = self.dim();
        let k = &self.ring;
        let mut acc = HeisVec::zero(d);
        let mut partial = vec![Elem::ZERO; d];
        for &i in order {
            if m[i].is_zero() {
                continue;
            }
            let mut piece = vec![Elem::ZERO; d];
            piece[i] = m[i];
            let basis_val = self.form.heis_act(&HeisVec::basis(d, i), m[i]);
            let cross = self.form.eval_unchecked(&partial, &piece);
            acc = self.form.heis_add(&self.form.heis_add(&acc, &HeisVec { m: vec![Elem::ZERO; d], r: cross }), &basis_val);
            partial[i] = k.add(partial[i], m[i]);
        }
        acc
    }

    /// Preserves `B` on basis pairs and `q~` on basis vectors. With `B`
    /// preserved, the quadratic identities extend the basis check to all vectors.
    pub fn is_isometry(&self, g: &Mat) -> Result<bool> {
        let k = &self.ring;
        let d = self.dim();
        if g.rows() != d || g.cols() != d {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix on a {d}-dimensional space", g.rows(), g.cols())));
        }
        if !g.is_invertible(k) {
            return Err(Error::NotInvertible);
        }
        Ok(self.is_isometry_unchecked(g))
    }

    pub fn is_isometry_unchecked(&self, g: &Mat) -> bool {
        let k = &self.ring;
        let d = self.dim();
        if g.conj_transpose(k).mul(k, &self.form.b).mul(k, g) != self.form.b {
            return false;
        }
        (0..d).all(|j| self.column_in_param(j, &g.column(j)))
    }

    /// Whether column `v = g e_j` satisfies `q~(v) = q~(e_j)`, i.e.
    /// `(v - e_j, B(e_j, v) - B(e_j, e_j))` lies in `L`.
    pub fn column_in_param(&self, j: usize, v: &[Elem]) -> bool {
        let k = &self.ring;
        let d = self.dim();
        let mut diff = v.to_vec();
        diff[j] = k.sub(diff[j], Elem::ONE);
        let ej = HeisVec::basis(d, j).m;
        let r = k.sub(self.form.eval_unchecked(&ej, v), self.form.b.get(j, j));
        self.param.contains(&HeisVec { m: diff, r })
    }

    /// Randomized full-vector guard: `q~(g m) = q~(m)` and `B` preserved on
    /// `trials` random pairs.
    pub fn isometry_guard(&self, g: &Mat, trials: usize, seed: u64) -> bool {
        let k = &self.ring;
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = k.order();
        for _ in 0..trials {
            let m: Vec<Elem> = (0..d).map(|_| Elem(rng.gen_range(0..q) as u8)).collect();
            let m2: Vec<Elem> = (0..d).map(|_| Elem(rng.gen_range(0..q) as u8)).collect();
            let gm = g.mul_vec(k, &m);
            let gm2 = g.mul_vec(k, &m2);
            if self.form.eval_unchecked(&gm, &gm2) != self.form.eval_unchecked(&m, &m2) {
                return false;
            }
            let a = HeisVec { m: gm, r: Elem::ZERO };
            let b = HeisVec { m, r: Elem::ZERO };
            if !self.same_class(&a, &b) {
                return false;
            }
        }
        true
    }

    /// Conjugates the space by a basis permutation: new basis vector `i` is
    /// old basis vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> QuadraticSpace {
        let d = self.dim();
        let mut b = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                b.set(i, j, self.form.b.get(perm[i], perm[j]));
            }
        }
        let map = |h: &HeisVec| HeisVec { m: perm.iter().map(|&p| h.m[p]).collect(), r: h.r };
        let elems: HashSet<HeisVec> = self.param.set().iter().map(map).collect();
        let generators = self.param.generators.iter().map(map).collect();
        QuadraticSpace {
            ring: self.ring.clone(),
            profile: None,
            form: HermitianForm { ring: self.ring.clone(), b },
            param: OddFormParameter { generators, elems },
        }
    }

    /// Same Gram matrix and the same odd form parameter.
    pub fn same_as(&self, other: &QuadraticSpace) -> bool {
        self.ring == other.ring && self.form.b == other.form.b && self.param.set() == other.param.set()
    }

    /// Every isometry, by column backtracking with the form and parameter
    /// conditions pruning partial matrices.
    pub fn unitary_group_keys(&self, cap: usize) -> Result<Vec<GroupKey>> {
        let k = &self.ring;
        let d = self.dim();
        let codec = KeyCodec::new(k, d)?;
        let q = k.order();
        let total = (q as u128).saturating_pow(d as u32);
        if total > 1 << 24 {
            return Err(Error::CarrierTooLarge(format!("{total} candidate columns")));
        }
        let all: Vec<Vec<Elem>> = (0..total as usize)
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let e = Elem((idx % q) as u8);
                        idx /= q;
                        e
                    })
                    .collect()
            })
            .collect();
        let cands: Vec<Vec<&Vec<Elem>>> = (0..d)
            .map(|j| {
                all.iter()
                    .filter(|v| self.form.eval_unchecked(v, v) == self.form.b.get(j, j) && self.column_in_param(j, v))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut cols: Vec<&Vec<Elem>> = Vec::with_capacity(d);
        self.backtrack(&cands, &mut cols, &mut out, &codec, cap)?;
        Ok(out)
    }

    fn backtrack<'a>(
        &self,
        cands: &'a [Vec<&'a Vec<Elem>>],
        cols: &mut Vec<&'a Vec<Elem>>,
        out: &mut Vec<GroupKey>,
        codec: &KeyCodec,
        cap: usize,
    ) -> Result<()> {
        let d = self.dim();
        let j = cols.len();
        if j == d {
            if out.len() >= cap {
                return Err(Error::CapExceeded { what: "unitary group enumeration".into(), cap });
            }
            let mut data = vec![0u8; d * d];
            for (c, v) in cols.iter().enumerate() {
                for r in 0..d {
                    data[r * d + c] = v[r].0;
                }
            }
            out.push(codec.encode_slice(&data));
            return Ok(());
        }
        for &v in &cands[j] {
            let ok = (0..j).all(|i| self.form.eval_unchecked(cols[i], v) == self.form.b.get(i, j));
            if ok {
                cols.push(v);
                self.backtrack(cands, cols, out, codec, cap)?;
                cols.pop();
            }
        }
        Ok(())
    }
}

/// Standard space `P_0 + hyp(P_1) + ... + hyp(P_l)` over `ring`.
pub fn build_standard_space(ring: &Ring, profile: &BlockProfile, odd_block: &Mat, param: &ParamChoice, cap: usize) -> Result<QuadraticSpace> {
    let d = profile.dim();
    let r0 = profile.ranks[0];
    if odd_block.rows() != r0 || odd_block.cols() != r0 {
        return Err(Error::DimensionMismatch(format!("odd block is {}x{}, r_0 = {r0}", odd_block.rows(), odd_block.cols())));
    }
    let odd = HermitianForm::new(ring, odd_block.clone())?;
    if !odd.check_hermitian() {
        return Err(Error::NotHermitian("odd block".into()));
    }
    if !odd.check_nondegenerate() {
        return Err(Error::Degenerate("odd block is not invertible".into()));
    }
    let mut b = Mat::zeros(d, d);
    b.paste(profile.offset(0), profile.offset(0), odd_block);
    for i in 1..=profile.l as i32 {
        for t in 0..profile.rank(i) {
            let (p, n) = (profile.offset(i) + t, profile.offset(-i) + t);
            b.set(p, n, Elem::ONE);
            b.set(n, p, ring.lambda());
        }
    }
    let hyper: Vec<HeisVec> = (0..d).filter(|&x| profile.block_of(x) != 0).map(|x| HeisVec::basis(d, x)).collect();
    match param {
        ParamChoice::Maximal => {
            let form = HermitianForm::new(ring, b)?;
            if !form.check_hermitian() {
                return Err(Error::NotHermitian("assembled form".into()));
            }
            let p = OddFormParameter::maximal(&form, cap)?;
            for h in &hyper {
                if !p.contains(h) {
                    return Err(Error::NotInLMax(format!("hyperbolic basis vector {}", show_heis(ring, h))));
                }
            }
            Ok(QuadraticSpace { ring: ring.clone(), profile: Some(profile.clone()), form, param: p })
        }
        ParamChoice::Minimal => QuadraticSpace::new(ring, Some(profile.clone()), b, &hyper, cap),
        ParamChoice::Generators(extra) => {
            let mut gens = hyper;
            gens.extend(extra.iter().cloned());
            QuadraticSpace::new(ring, Some(profile.clone()), b, &gens, cap)
        }
    }
}

/// `met(P) = P + dual(P)` in coordinates `(p, c)`, with Gram matrix
/// `[[b_P, 1], [lambda, 0]]`. The dual coordinate `c` stands for the
/// conjugate of a functional, so `B((p, 0), (0, c)) = conj(p)^T c`.
pub fn metabolic(p: &QuadraticSpace, cap: usize) -> Result<QuadraticSpace> {
    let k = &p.ring;
    let n = p.dim();
    let mut b = Mat::zeros(2 * n, 2 * n);
    b.paste(0, 0, &p.form.b);
    for i in 0..n {
        b.set(i, n + i, Elem::ONE);
        b.set(n + i, i, k.lambda());
    }
    let embed = |h: &HeisVec| {
        let mut m = h.m.clone();
        m.extend(std::iter::repeat_n(Elem::ZERO, n));
        HeisVec { m, r: h.r }
    };
    let mut gens: Vec<HeisVec> = p.param.elements().iter().map(embed).collect();
    gens.extend((0..n).map(|i| HeisVec::basis(2 * n, n + i)));
    let space = QuadraticSpace::new(k, None, b, &gens, cap)?;
    if p.check_nondegenerate() || !space.check_nondegenerate() {
        // A metabolic space is always nondegenerate; a failure here is a bug.
        debug_assert!(space.check_nondegenerate());
    }
    Ok(space)
}

/// Block-diagonal orthogonal sum; the parameter is the sum of the embedded parameters.
pub fn orthogonal_sum(spaces: &[QuadraticSpace], ring: &Ring, cap: usize) -> Result<QuadraticSpace> {
    for s in spaces {
        if s.ring != *ring {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", s.ring, ring)));
        }
    }
    let d: usize = spaces.iter().map(|s| s.dim()).sum();
    let mut b = Mat::zeros(d, d);
    let mut gens = Vec::new();
    let mut off = 0;
    for s in spaces {
        b.paste(off, off, &s.form.b);
        for h in s.param.elements() {
            let mut m = vec![Elem::ZERO; d];
            m[off..off + s.dim()].copy_from_slice(&h.m);
            gens.push(HeisVec { m, r: h.r });
        }
        off += s.dim();
    }
    QuadraticSpace::new(ring, None, b, &gens, cap)
}

/// `Heis(B) / L` as a quadratic structure on `K`, with canonical representatives.
pub struct FormQuotient<'a> {
    space: &'a QuadraticSpace,
    canon: HashMap<HeisVec, HeisVec>,
}

impl<'a> FormQuotient<'a> {
    pub fn new(space: &'a QuadraticSpace) -> Result<FormQuotient<'a>> {
        let total = (space.ring.order() as u128).saturating_pow(space.dim() as u32 + 1);
        if total > 1 << 18 {
            return Err(Error::CarrierTooLarge(format!("Heis(B) has {total} elements")));
        }
        let mut canon = HashMap::new();
        for h in space.form.heis_elements() {
            if canon.contains_key(&h) {
                continue;
            }
            let coset: Vec<HeisVec> = space.param.set().iter().map(|l| space.form.heis_add(&h, l)).collect();
            let rep = coset.iter().min().unwrap().clone();
            for c in coset {
                canon.insert(c, rep.clone());
            }
        }
        Ok(FormQuotient { space, canon })
    }

    fn cl(&self, h: HeisVec) -> HeisVec {
        self.canon[&h].clone()
    }
}

impl QuadStructure for FormQuotient<'_> {
    type A = HeisVec;

    fn ring(&self) -> &Ring {
        &self.space.ring
    }

    fn elements(&self) -> Vec<HeisVec> {
        let mut v: Vec<HeisVec> = self.canon.values().cloned().collect::<HashSet<_>>().into_iter().collect();
        v.sort();
        v
    }

    fn zero(&self) -> HeisVec {
        self.cl(HeisVec::zero(self.space.dim()))
    }

    fn add(&self, a: &HeisVec, b: &HeisVec) -> HeisVec {
        self.cl(self.space.form.heis_add(a, b))
    }

    fn neg(&self, a: &HeisVec) -> HeisVec {
        self.cl(self.space.form.heis_neg(a))
    }

    fn phi(&self, r: Elem) -> HeisVec {
        self.cl(HeisVec { m: vec![Elem::ZERO; self.space.dim()], r })
    }

    fn tr(&self, a: &HeisVec) -> Elem {
        self.space.form.heis_tr(a)
    }

    fn act(&self, a: &HeisVec, r: Elem) -> HeisVec {
        self.cl(self.space.form.heis_act(a, r))
    }

    fn show(&self, a: &HeisVec) -> String {
        format!("[{}]", show_heis(&self.space.ring, a))
    }
}

fn all_vectors(k: &Ring, d: usize) -> Vec<Vec<Elem>> {
    let q = k.order();
    let total = q.saturating_pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let e = Elem((idx % q) as u8);
                    idx /= q;
                    e
                })
                .collect()
        })
        .collect()
}

/// Structural checks of a constructed space: form conditions, the parameter
/// sandwich, the quadratic identities, and the vanishing of `q` on
/// hyperbolic basis vectors.
pub fn verify_space(space: &QuadraticSpace, seed: u64) -> Report {
    let k = &space.ring;
    let form = &space.form;
    let d = space.dim();
    let mut rep = Report::new("space");
    rep.push(Check::single("hermitian", form.check_hermitian(), || format!("{:?}", form.b)));
    rep.push(Check::single("nondegenerate", form.check_nondegenerate(), || format!("det = {}", k.show(form.b.det(k)))));

    let mut c = Check::new("L_min <= L <= L_max");
    for g in form.lmin_generators() {
        c.case(space.param.contains(&g), || format!("L_min generator {} missing", show_heis(k, &g)));
    }
    for h in space.param.set() {
        c.case(form.heis_tr(h).is_zero(), || format!("{} has nonzero trace", show_heis(k, h)));
    }
    rep.push(c);

    let mut c = Check::new("L is a subgroup stable under the action");
    let el = space.param.elements();
    let step = (el.len() / 64).max(1);
    for a in el.iter().step_by(step) {
        for b in el.iter().step_by(step) {
            c.case(space.param.contains(&form.heis_add(a, b)), || format!("{} + {}", show_heis(k, a), show_heis(k, b)));
        }
        for s in k.elements() {
            c.case(space.param.contains(&form.heis_act(a, s)), || format!("{} . {}", show_heis(k, a), k.show(s)));
        }
    }
    rep.push(c);

    let q = k.order();
    let exhaustive = (q as u128).saturating_pow(d as u32) <= 1 << 16;
    let vectors: Vec<Vec<Elem>> = if exhaustive {
        all_vectors(k, d)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..crate::quad::SAMPLED_TRIALS).map(|_| (0..d).map(|_| Elem(rng.gen_range(0..q) as u8)).collect()).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut c = Check::new("commutators of Heis(B) lie in L_min");
    let lmin = OddFormParameter::closure(form, &[], DEFAULT_PARAM_CAP).expect("L_min closes");
    for _ in 0..256.min(vectors.len() * vectors.len()) {
        let a = HeisVec { m: vectors[rng.gen_range(0..vectors.len())].clone(), r: Elem(rng.gen_range(0..q) as u8) };
        let b = HeisVec { m: vectors[rng.gen_range(0..vectors.len())].clone(), r: Elem(rng.gen_range(0..q) as u8) };
        let ab = form.heis_add(&a, &b);
        let ba = form.heis_add(&b, &a);
        let cm = form.heis_add(&ab, &form.heis_neg(&ba));
        c.case(lmin.contains(&cm), || format!("{}, {}", show_heis(k, &a), show_heis(k, &b)));
    }
    rep.push(c);

    let mut c = Check::new("quadratic map identities");
    let order_fwd: Vec<usize> = (0..d).collect();
    let order_rev: Vec<usize> = (0..d).rev().collect();
    for (n, m) in vectors.iter().enumerate() {
        let m2 = &vectors[(n * 7 + 3) % vectors.len()];
        let s = Elem(rng.gen_range(0..q) as u8);
        let qm = HeisVec { m: m.clone(), r: Elem::ZERO };
        // q~(m k) = q~(m).k
        let mk: Vec<Elem> = m.iter().map(|&x| k.mul(x, s)).collect();
        let ok1 = space.same_class(&HeisVec { m: mk, r: Elem::ZERO }, &form.heis_act(&qm, s));
        // q~(m + m') = q~(m) + phi(B(m, m')) + q~(m')
        let sum: Vec<Elem> = m.iter().zip(m2).map(|(&a, &b)| k.add(a, b)).collect();
        let rhs = form.heis_add(
            &form.heis_add(&qm, &HeisVec { m: vec![Elem::ZERO; d], r: form.eval_unchecked(m, m2) }),
            &HeisVec { m: m2.clone(), r: Elem::ZERO },
        );
        let ok2 = space.same_class(&HeisVec { m: sum, r: Elem::ZERO }, &rhs);
        // tr(q~(m)) = B(m, m)
        let ok3 = form.heis_tr(&qm) == form.eval_unchecked(m, m);
        // basis expansion is independent of the order
        let ok4 = space.same_class(&space.qtilde_expand(m, &order_fwd), &qm) && space.same_class(&space.qtilde_expand(m, &order_rev), &qm);
        c.case(ok1 && ok2 && ok3 && ok4, || format!("m = {m:?}, m' = {m2:?}, k = {}", k.show(s)));
    }
    rep.push(c.with_note(if exhaustive { "exhaustive" } else { "sampled" }));

    if let Some(p) = &space.profile {
        let mut c = Check::new("q vanishes on hyperbolic basis vectors");
        for x in 0..d {
            if p.block_of(x) != 0 {
                c.case(space.param.contains(&HeisVec::basis(d, x)), || format!("basis vector {x}"));
            }
        }
        rep.push(c);
    }

    // QF7: the form q(a_K, m) = a_K q~(m) respects products in A_K.
    if let Ok(fq) = FormQuotient::new(space) {
        let u = UniversalStructure::new(k);
        let bind = AlgebraBinding::new(&u, &fq);
        let ak = u.elements();
        let mut c = Check::new("QF7");
        for m in vectors.iter().take(512) {
            let qm = fq.act(&HeisVec { m: m.clone(), r: Elem::ZERO }, Elem::ONE);
            for a in &ak {
                for a2 in &ak {
                    let lhs = bind.left_act(&u.mul(a, a2), &qm);
                    let rhs = bind.left_act(a, &bind.left_act(a2, &qm));
                    c.case(lhs == rhs, || format!("m = {m:?}"));
                }
            }
        }
        rep.push(c.with_note("checked, not assumed"));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{verify_qa, verify_qs, ActionMutation};
    use crate::ring::RingSpec;

    fn z(n: u32) -> Ring {
        Ring::new(&RingSpec::modular(n, 1)).unwrap()
    }

    fn plane(k: &Ring, param: ParamChoice) -> QuadraticSpace {
        build_standard_space(k, &BlockProfile::simple(1, 0), &Mat::zeros(0, 0), &param, DEFAULT_PARAM_CAP).unwrap()
    }

    #[test]
    fn eval_and_hermitian_examples() {
        let f2 = z(2);
        let p = plane(&f2, ParamChoice::Minimal);
        // Basis order is (e_-1, e_1).
        let e1 = [Elem(0), Elem(1)];
        let em1 = [Elem(1), Elem(0)];
        assert_eq!(p.eval(&e1, &em1).unwrap(), Elem::ONE);
        assert_eq!(p.eval(&[Elem(0); 2], &e1).unwrap(), Elem::ZERO);
        assert!(p.eval(&e1, &[Elem(0)]).is_err());
        let bad = HermitianForm::new(&f2, Mat::from_ints(&f2, &[&[0, 1], &[0, 0]])).unwrap();
        assert!(!bad.check_hermitian());
        assert!(HermitianForm::new(&f2, Mat::zeros(3, 3)).unwrap().check_hermitian());
        let z4 = z(4);
        assert!(HermitianForm::new(&z4, Mat::from_ints(&z4, &[&[0, 1], &[1, 0]])).unwrap().check_nondegenerate());
        assert!(!HermitianForm::new(&z4, Mat::scalar(2, z4.from_int(2))).unwrap().check_nondegenerate());
        assert!(HermitianForm::new(&z4, Mat::zeros(0, 0)).unwrap().check_nondegenerate());
    }

    #[test]
    fn sesquilinear_in_both_arguments() {
        let k = Ring::new(&RingSpec::quad_ext(3, 2, [1, 0])).unwrap();
        let form = HermitianForm::new(&k, Mat::identity(2)).unwrap();
        for a in k.elements() {
            for s in k.elements() {
                let m = [a, k.one()];
                let m2 = [k.one(), s];
                let ms: Vec<Elem> = m.iter().map(|&x| k.mul(x, s)).collect();
                assert_eq!(form.eval_unchecked(&ms, &m2), k.mul(k.conj(s), form.eval_unchecked(&m, &m2)));
            }
        }
    }

    #[test]
    fn parameter_closure_examples() {
        let f2 = z(2);
        let min = plane(&f2, ParamChoice::Minimal);
        let max = plane(&f2, ParamChoice::Maximal);
        assert_eq!(max.param.len(), 8);
        // Minimal: generated by (e_1, 0), (e_-1, 0): four classes of m, r = B-corrections.
        assert!(min.param.len() < 8);
        let id = HermitianForm::new(&f2, Mat::identity(1)).unwrap();
        let err = OddFormParameter::closure(&id, &[HeisVec::basis(1, 0)], 100).unwrap_err();
        assert!(matches!(err, Error::NotInLMax(_)));
        let lmin = OddFormParameter::closure(&id, &[], 100).unwrap();
        assert_eq!(lmin.len(), 1);
        let big = OddFormParameter::closure(&max.form, &max.param.elements(), 4);
        assert!(matches!(big, Err(Error::Overflow(_))));
    }

    #[test]
    fn hyperbolic_plane_unitary_group() {
        let f2 = z(2);
        let p = plane(&f2, ParamChoice::Minimal);
        let u = p.unitary_group_keys(100).unwrap();
        assert_eq!(u.len(), 2);
        // Independent oracle: test all of GL(2, 2).
        let mut count = 0;
        for bits in 0u8..16 {
            let g = Mat::from_vec(2, 2, (0..4).map(|i| Elem((bits >> i) & 1)).collect());
            if g.is_invertible(&f2) && p.is_isometry(&g).unwrap() {
                count += 1;
            }
        }
        assert_eq!(count, 2);
        let swap = Mat::from_ints(&f2, &[&[0, 1], &[1, 0]]);
        assert!(p.is_isometry(&swap).unwrap());
        let tv = Mat::from_ints(&f2, &[&[1, 1], &[0, 1]]);
        assert!(!p.is_isometry(&tv).unwrap());
        assert!(matches!(p.is_isometry(&Mat::zeros(2, 2)), Err(Error::NotInvertible)));
    }

    #[test]
    fn standard_space_shapes() {
        let f2 = z(2);
        let s = build_standard_space(&f2, &BlockProfile::simple(3, 0), &Mat::zeros(0, 0), &ParamChoice::Minimal, DEFAULT_PARAM_CAP).unwrap();
        assert_eq!(s.dim(), 6);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(s.form.b.get(i, j), if i + j == 5 { Elem::ONE } else { Elem::ZERO });
            }
        }
        let odd = build_standard_space(&f2, &BlockProfile::simple(2, 1), &Mat::identity(1), &ParamChoice::Minimal, DEFAULT_PARAM_CAP).unwrap();
        assert_eq!(odd.dim(), 5);
        assert!(verify_space(&odd, 1).all_passed(), "{:?}", verify_space(&odd, 1));
    }

    #[test]
    fn doubly_even_weight() {
        let f2 = z(2);
        let s = QuadraticSpace::new(&f2, None, Mat::identity(4), &[], 16).unwrap();
        assert_eq!(s.param.len(), 1);
        let ones = [Elem::ONE; 4];
        let q = s.qtilde(&ones);
        assert!(s.form.heis_tr(&q).is_zero());
        // Additive order of q~(1,1,1,1) divides 4.
        let mut acc = HeisVec::zero(4);
        for _ in 0..4 {
            acc = s.form.heis_add(&acc, &q);
        }
        assert!(s.same_class(&acc, &HeisVec::zero(4)));
        // Weight one vector: tr = 1, so the class is not zero.
        assert!(!s.form.heis_tr(&s.qtilde(&[Elem::ONE, Elem::ZERO, Elem::ZERO, Elem::ZERO])).is_zero());
    }

    #[test]
    fn metabolic_examples() {
        let f2 = z(2);
        let line = QuadraticSpace::new(&f2, None, Mat::identity(1), &[], 16).unwrap();
        let met = metabolic(&line, DEFAULT_PARAM_CAP).unwrap();
        assert_eq!(met.form.b, Mat::from_ints(&f2, &[&[1, 1], &[1, 0]]));
        assert!(met.check_nondegenerate());
        assert!(verify_space(&met, 0).all_passed());

        let f3 = z(3);
        let l3 = QuadraticSpace::new(&f3, None, Mat::identity(1), &[], 16).unwrap();
        let mm = metabolic(&metabolic(&l3, DEFAULT_PARAM_CAP).unwrap(), DEFAULT_PARAM_CAP).unwrap();
        assert_eq!(mm.dim(), 4);
        assert!(mm.check_nondegenerate());

        // Zero form with q = 0 gives the hyperbolic plane with (p, c) = (e_1, e_-1).
        let zero = QuadraticSpace::new(&f2, None, Mat::zeros(1, 1), &[HeisVec::basis(1, 0)], 16).unwrap();
        let hyp = metabolic(&zero, DEFAULT_PARAM_CAP).unwrap();
        let std = plane(&f2, ParamChoice::Minimal);
        assert!(hyp.permuted(&[1, 0]).same_as(&std));
    }

    #[test]
    fn orthogonal_sum_examples() {
        let f2 = z(2);
        let p1 = plane(&f2, ParamChoice::Minimal);
        let empty = QuadraticSpace::new(&f2, None, Mat::zeros(0, 0), &[], 4).unwrap();
        assert!(orthogonal_sum(&[p1.clone(), empty], &f2, 1 << 10).unwrap().same_as(&p1));
        let sum = orthogonal_sum(&[p1.clone(), p1.clone()], &f2, 1 << 10).unwrap();
        let l2 = build_standard_space(&f2, &BlockProfile::simple(2, 0), &Mat::zeros(0, 0), &ParamChoice::Minimal, 1 << 10).unwrap();
        // Sum basis (a_-1, a_1, b_-1, b_1); standard order (e_-2, e_-1, e_1, e_2).
        assert!(sum.permuted(&[2, 0, 1, 3]).same_as(&l2));
        assert!(sum.check_nondegenerate());
        assert!(matches!(orthogonal_sum(&[p1], &z(3), 4), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn isometries_form_a_group_and_pass_the_guard() {
        let f3 = z(3);
        let s = build_standard_space(&f3, &BlockProfile::simple(1, 1), &Mat::identity(1), &ParamChoice::Minimal, 1 << 12).unwrap();
        let keys = s.unitary_group_keys(1 << 12).unwrap();
        let codec = KeyCodec::new(&f3, 3).unwrap();
        let set: HashSet<GroupKey> = keys.iter().copied().collect();
        for &a in keys.iter().take(8) {
            let ga = codec.decode(a);
            assert!(s.isometry_guard(&ga, 200, 3));
            for &b in &keys {
                let gb = codec.decode(b);
                assert!(set.contains(&codec.encode(&ga.mul(&f3, &gb))));
            }
        }
    }

    #[test]
    fn quotient_structure_is_a_quadratic_algebra() {
        let f2 = z(2);
        let line = QuadraticSpace::new(&f2, None, Mat::identity(1), &[], 16).unwrap();
        let fq = FormQuotient::new(&line).unwrap();
        assert!(verify_qs(&fq, 0).all_passed());
        let u = UniversalStructure::new(&f2);
        assert!(verify_qa(&AlgebraBinding::new(&u, &fq), 0).all_passed());
        let broken = verify_qa(&AlgebraBinding::new(&u, &fq).with_mutation(ActionMutation::IgnoreAction), 0);
        assert!(!broken.passed("QA5"));
        assert!(broken.get("QA5").unwrap().witness.is_some());
    }

    #[test]
    fn spaces_pass_structural_checks() {
        for (n, param) in [(2, ParamChoice::Minimal), (2, ParamChoice::Maximal), (4, ParamChoice::Minimal), (3, ParamChoice::Maximal)] {
            let k = z(n);
            let s = build_standard_space(&k, &BlockProfile::simple(2, 0), &Mat::zeros(0, 0), &param, 1 << 16).unwrap();
            let rep = verify_space(&s, 7);
            assert!(rep.all_passed(), "{n} {param:?}: {:?}", rep.failures().collect::<Vec<_>>());
        }
    }
}
