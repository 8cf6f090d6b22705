//! The endomorphism algebra `C = End(P)` of a standard space with its
//! adjoint and block idempotents, the doubled algebra `A = C x C`, the
//! group `H = e_0 C x C x C e_0`, and elementary transvections.
//!
//! Elements of `H` keep all three components as full `d x d` matrices; `x`
//! is supported on the rows of block 0 and `z` on its columns.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forms::{BlockProfile, QuadraticSpace};
use crate::matrix::Mat;
use crate::report::{Check, Report};
use crate::ring::{Elem, Ring};

/// An element `(p, q)` of `A = C x C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleElem {
    pub p: Mat,
    pub q: Mat,
}

/// An element `(x, y, z)` of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HElem {
    pub x: Mat,
    pub y: Mat,
    pub z: Mat,
}

/// Seeded defects for detector-sensitivity runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EndoMutation {
    #[default]
    None,
    /// Adjoint computed as the plain conjugate transpose, ignoring `b`.
    NaiveAdjoint,
    /// `pi(x, y, z) = (x, conj(z))` instead of `(x, -conj(z))`.
    PiSign,
    /// `y + z x' + y'` replaced by `y - z x' + y'` in the group law of `H`.
    HAddSign,
    /// `phi` replaced by the zero map.
    ZeroPhi,
}

/// Matrix positions of a block pair, row-major.
fn positions(p: &BlockProfile, rows: i32, cols: i32) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for r in p.range(rows) {
        for c in p.range(cols) {
            v.push((r, c));
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct EndoContext {
    pub space: QuadraticSpace,
    ring: Ring,
    profile: BlockProfile,
    b_inv: Mat,
    idem: Vec<Mat>,
    mutation: EndoMutation,
}

impl EndoContext {
    pub fn new(space: &QuadraticSpace) -> Result<EndoContext> {
        EndoContext::with_mutation(space, EndoMutation::None)
    }

    pub fn with_mutation(space: &QuadraticSpace, mutation: EndoMutation) -> Result<EndoContext> {
        let ring = space.ring.clone();
        let profile = space
            .profile
            .clone()
            .ok_or_else(|| Error::DimensionMismatch("the space has no block profile".into()))?;
        let b_inv = space.form.b.inverse(&ring).ok_or_else(|| Error::Degenerate("Gram matrix is not invertible".into()))?;
        let d = profile.dim();
        let idem = profile
            .blocks()
            .map(|i| {
                let mut e = Mat::zeros(d, d);
                for x in profile.range(i) {
                    e.set(x, x, Elem::ONE);
                }
                e
            })
            .collect();
        Ok(EndoContext { space: space.clone(), ring, profile, b_inv, idem, mutation })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn profile(&self) -> &BlockProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn l(&self) -> i32 {
        self.profile.l as i32
    }

    pub fn mutation(&self) -> EndoMutation {
        self.mutation
    }

    /// Hyperbolic indices `-l..-1, 1..l`.
    pub fn hyperbolic(&self) -> Vec<i32> {
        self.profile.nonzero_blocks().collect()
    }

    pub fn e(&self, i: i32) -> &Mat {
        &self.idem[(i + self.l()) as usize]
    }

    fn sum_idem(&self, f: impl Fn(i32) -> bool) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for i in self.profile.blocks().filter(|&i| f(i)) {
            for x in self.profile.range(i) {
                m.set(x, x, Elem::ONE);
            }
        }
        m
    }

    pub fn e_plus(&self) -> Mat {
        self.sum_idem(|i| i > 0)
    }

    pub fn e_minus(&self) -> Mat {
        self.sum_idem(|i| i < 0)
    }

    /// `1 - e_0`.
    pub fn e_hyp(&self) -> Mat {
        self.sum_idem(|i| i != 0)
    }

    pub fn one(&self) -> Mat {
        Mat::identity(self.dim())
    }

    pub fn zero(&self) -> Mat {
        Mat::zeros(self.dim(), self.dim())
    }

    /// `b^-1 conj(a)^T b`.
    pub fn adjoint(&self, a: &Mat) -> Mat {
        let k = &self.ring;
        let ct = a.conj_transpose(k);
        match self.mutation {
            EndoMutation::NaiveAdjoint => ct,
            _ => self.b_inv.mul(k, &ct).mul(k, &self.space.form.b),
        }
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        a.mul(&self.ring, b)
    }

    pub fn add(&self, a: &Mat, b: &Mat) -> Mat {
        a.add(&self.ring, b)
    }

    pub fn sub(&self, a: &Mat, b: &Mat) -> Mat {
        a.sub(&self.ring, b)
    }

    pub fn neg(&self, a: &Mat) -> Mat {
        a.neg(&self.ring)
    }

    /// `e_i a e_j`.
    pub fn block(&self, a: &Mat, i: i32, j: i32) -> Mat {
        let mut out = self.zero();
        for r in self.profile.range(i) {
            for c in self.profile.range(j) {
                out.set(r, c, a.get(r, c));
            }
        }
        out
    }

    pub fn in_block(&self, a: &Mat, i: i32, j: i32) -> bool {
        self.block(a, i, j) == *a
    }

    /// Every element of `e_i C e_j`.
    pub fn block_elements(&self, i: i32, j: i32) -> Vec<Mat> {
        self.elements_on(&positions(&self.profile, i, j))
    }

    fn elements_on(&self, pos: &[(usize, usize)]) -> Vec<Mat> {
        let q = self.ring.order();
        let total = q.saturating_pow(pos.len() as u32);
        (0..total)
            .map(|mut idx| {
                let mut m = self.zero();
                for &(r, c) in pos {
                    m.set(r, c, Elem((idx % q) as u8));
                    idx /= q;
                }
                m
            })
            .collect()
    }

    /// Additive generators of `e_i C e_j` over `Z/n`: matrix units times the
    /// `Z/n`-basis of `K`.
    pub fn block_basis(&self, i: i32, j: i32) -> Vec<Mat> {
        let d = self.dim();
        let mut out = Vec::new();
        for (r, c) in positions(&self.profile, i, j) {
            for k in self.ring.zn_basis() {
                out.push(Mat::unit(d, d, r, c, k));
            }
        }
        out
    }

    pub fn random_block(&self, rng: &mut ChaCha8Rng, i: i32, j: i32) -> Mat {
        let q = self.ring.order();
        let mut m = self.zero();
        for (r, c) in positions(&self.profile, i, j) {
            m.set(r, c, Elem(rng.gen_range(0..q) as u8));
        }
        m
    }

    pub fn random_matrix(&self, rng: &mut ChaCha8Rng) -> Mat {
        let q = self.ring.order();
        let d = self.dim();
        Mat::from_vec(d, d, (0..d * d).map(|_| Elem(rng.gen_range(0..q) as u8)).collect())
    }

    // ---- the doubled algebra ----

    pub fn a_zero(&self) -> DoubleElem {
        DoubleElem { p: self.zero(), q: self.zero() }
    }

    pub fn a_one(&self) -> DoubleElem {
        self.diag(&self.one())
    }

    /// Diagonal embedding `c -> (c, c)`.
    pub fn diag(&self, c: &Mat) -> DoubleElem {
        DoubleElem { p: c.clone(), q: c.clone() }
    }

    pub fn scalar(&self, k: Elem) -> DoubleElem {
        self.diag(&Mat::scalar(self.dim(), k))
    }

    pub fn zeta(&self) -> DoubleElem {
        DoubleElem { p: self.zero(), q: self.one() }
    }

    pub fn a_add(&self, a: &DoubleElem, b: &DoubleElem) -> DoubleElem {
        DoubleElem { p: self.add(&a.p, &b.p), q: self.add(&a.q, &b.q) }
    }

    pub fn a_sub(&self, a: &DoubleElem, b: &DoubleElem) -> DoubleElem {
        DoubleElem { p: self.sub(&a.p, &b.p), q: self.sub(&a.q, &b.q) }
    }

    pub fn a_neg(&self, a: &DoubleElem) -> DoubleElem {
        DoubleElem { p: self.neg(&a.p), q: self.neg(&a.q) }
    }

    pub fn a_mul(&self, a: &DoubleElem, b: &DoubleElem) -> DoubleElem {
        DoubleElem { p: self.mul(&a.p, &b.p), q: self.mul(&a.q, &b.q) }
    }

    /// `conj(p, q) = (adj(q), adj(p))`.
    pub fn a_conj(&self, a: &DoubleElem) -> DoubleElem {
        DoubleElem { p: self.adjoint(&a.q), q: self.adjoint(&a.p) }
    }

    pub fn a_block(&self, a: &DoubleElem, i: i32, j: i32) -> DoubleElem {
        DoubleElem { p: self.block(&a.p, i, j), q: self.block(&a.q, i, j) }
    }

    pub fn a_in_block(&self, a: &DoubleElem, i: i32, j: i32) -> bool {
        self.in_block(&a.p, i, j) && self.in_block(&a.q, i, j)
    }

    pub fn a_is_zero(&self, a: &DoubleElem) -> bool {
        a.p.is_zero() && a.q.is_zero()
    }

    /// Every element of `e_i A e_j`.
    pub fn a_block_elements(&self, i: i32, j: i32) -> Vec<DoubleElem> {
        let c = self.block_elements(i, j);
        let mut out = Vec::with_capacity(c.len() * c.len());
        for p in &c {
            for q in &c {
                out.push(DoubleElem { p: p.clone(), q: q.clone() });
            }
        }
        out
    }

    pub fn a_block_basis(&self, i: i32, j: i32) -> Vec<DoubleElem> {
        let z = self.zero();
        let mut out = Vec::new();
        for m in self.block_basis(i, j) {
            out.push(DoubleElem { p: m.clone(), q: z.clone() });
            out.push(DoubleElem { p: z.clone(), q: m });
        }
        out
    }

    pub fn random_a(&self, rng: &mut ChaCha8Rng) -> DoubleElem {
        DoubleElem { p: self.random_matrix(rng), q: self.random_matrix(rng) }
    }

    pub fn random_a_block(&self, rng: &mut ChaCha8Rng, i: i32, j: i32) -> DoubleElem {
        DoubleElem { p: self.random_block(rng, i, j), q: self.random_block(rng, i, j) }
    }

    // ---- the group H ----

    pub fn h_zero(&self) -> HElem {
        HElem { x: self.zero(), y: self.zero(), z: self.zero() }
    }

    /// `(x, y, z) + (x', y', z') = (x + x', y + z x' + y', z + z')`.
    pub fn h_add(&self, h: &HElem, h2: &HElem) -> HElem {
        let zx = self.mul(&h.z, &h2.x);
        let mid = match self.mutation {
            EndoMutation::HAddSign => self.sub(&h.y, &zx),
            _ => self.add(&h.y, &zx),
        };
        HElem { x: self.add(&h.x, &h2.x), y: self.add(&mid, &h2.y), z: self.add(&h.z, &h2.z) }
    }

    /// `-(x, y, z) = (-x, z x - y, -z)`.
    pub fn h_neg(&self, h: &HElem) -> HElem {
        let zx = self.mul(&h.z, &h.x);
        let y = match self.mutation {
            EndoMutation::HAddSign => self.sub(&self.neg(&zx), &h.y),
            _ => self.sub(&zx, &h.y),
        };
        HElem { x: self.neg(&h.x), y, z: self.neg(&h.z) }
    }

    /// `h - h2 = h + (-h2)`.
    pub fn h_sub(&self, h: &HElem, h2: &HElem) -> HElem {
        self.h_add(h, &self.h_neg(h2))
    }

    /// `(x, y, z) . (p, q) = (x p, adj(q) y p, adj(q) z)`.
    pub fn h_act(&self, h: &HElem, a: &DoubleElem) -> HElem {
        self.h_act_adj(h, &a.p, &self.adjoint(&a.q))
    }

    /// [`h_act`](Self::h_act) with `adj(q)` already computed, for loops
    /// that act by one element many times.
    pub fn h_act_adj(&self, h: &HElem, p: &Mat, qb: &Mat) -> HElem {
        HElem { x: self.mul(&h.x, p), y: self.mul(&self.mul(qb, &h.y), p), z: self.mul(qb, &h.z) }
    }

    /// `pi(x, y, z) = (x, -adj(z))`.
    pub fn pi(&self, h: &HElem) -> DoubleElem {
        let zb = self.adjoint(&h.z);
        let q = match self.mutation {
            EndoMutation::PiSign => zb,
            _ => self.neg(&zb),
        };
        DoubleElem { p: h.x.clone(), q }
    }

    /// `phi(p, q) = (0, p - adj(q), 0)`.
    pub fn phi(&self, a: &DoubleElem) -> HElem {
        if self.mutation == EndoMutation::ZeroPhi {
            return self.h_zero();
        }
        HElem { x: self.zero(), y: self.sub(&a.p, &self.adjoint(&a.q)), z: self.zero() }
    }

    /// `tr(x, y, z) = (y, adj(z x - y))`.
    pub fn tr(&self, h: &HElem) -> DoubleElem {
        let zx = self.mul(&h.z, &h.x);
        DoubleElem { p: h.y.clone(), q: self.adjoint(&self.sub(&zx, &h.y)) }
    }

    /// Integer multiple `k h = h + ... + h` (`k >= 0`).
    pub fn h_times(&self, h: &HElem, k: u64) -> HElem {
        let mut acc = self.h_zero();
        let mut base = h.clone();
        let mut k = k;
        // Powers of a single element commute, so square-and-multiply is exact.
        while k > 0 {
            if k & 1 == 1 {
                acc = self.h_add(&acc, &base);
            }
            base = self.h_add(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn h_is_zero(&self, h: &HElem) -> bool {
        h.x.is_zero() && h.y.is_zero() && h.z.is_zero()
    }

    /// `h . e_i`, the component in the carrier `X_i`.
    pub fn h_component(&self, h: &HElem, i: i32) -> HElem {
        self.h_act(h, &self.diag(self.e(i)))
    }

    /// Whether `h` lies in `X_i = e_0 C e_i x e_-i C e_i x e_-i C e_0`.
    pub fn h_in_carrier(&self, h: &HElem, i: i32) -> bool {
        self.in_block(&h.x, 0, i) && self.in_block(&h.y, -i, i) && self.in_block(&h.z, -i, 0)
    }

    fn carrier_positions(&self, i: i32) -> [Vec<(usize, usize)>; 3] {
        [positions(&self.profile, 0, i), positions(&self.profile, -i, i), positions(&self.profile, -i, 0)]
    }

    pub fn carrier_size(&self, i: i32) -> u128 {
        let n: usize = self.carrier_positions(i).iter().map(|p| p.len()).sum();
        (self.ring.order() as u128).saturating_pow(n as u32)
    }

    /// Every element of `X_i` (`i` may be 0, giving `H . e_0`).
    pub fn carrier_elements(&self, i: i32) -> Vec<HElem> {
        let [px, py, pz] = self.carrier_positions(i);
        let xs = self.elements_on(&px);
        let ys = self.elements_on(&py);
        let zs = self.elements_on(&pz);
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for x in &xs {
            for y in &ys {
                for z in &zs {
                    out.push(HElem { x: x.clone(), y: y.clone(), z: z.clone() });
                }
            }
        }
        out
    }

    pub fn random_carrier(&self, rng: &mut ChaCha8Rng, i: i32) -> HElem {
        HElem { x: self.random_block(rng, 0, i), y: self.random_block(rng, -i, i), z: self.random_block(rng, -i, 0) }
    }

    /// A random element of `H`.
    pub fn random_h(&self, rng: &mut ChaCha8Rng) -> HElem {
        let q = self.ring.order();
        let d = self.dim();
        let mut x = self.zero();
        let mut z = self.zero();
        for r in self.profile.range(0) {
            for c in 0..d {
                x.set(r, c, Elem(rng.gen_range(0..q) as u8));
                z.set(c, r, Elem(rng.gen_range(0..q) as u8));
            }
        }
        HElem { x, y: self.random_matrix(rng), z }
    }

    // ---- transvections ----

    /// `t_ij(x) = 1 + x` for `x` in `e_i C e_j`, `i != j`.
    pub fn t_elem(&self, i: i32, j: i32, x: &Mat) -> Result<Mat> {
        if i == j || i.abs() > self.l() || j.abs() > self.l() {
            return Err(Error::BadBlock(format!("t_{{{i},{j}}} needs i != j within -l..l")));
        }
        if !self.in_block(x, i, j) {
            return Err(Error::BadBlock(format!("argument not supported in block ({i}, {j})")));
        }
        Ok(self.add(&self.one(), x))
    }

    fn check_short(&self, i: i32, j: i32) -> Result<()> {
        if i == 0 || j == 0 || i == j || i == -j || i.abs() > self.l() || j.abs() > self.l() {
            return Err(Error::BadBlock(format!("tau_{{{i},{j}}} needs 0 != i != +-j != 0")));
        }
        Ok(())
    }

    /// `tau_ij(p, q) = 1 + p - adj(q)` for `(p, q)` in `e_i A e_j`.
    pub fn tau_short(&self, i: i32, j: i32, a: &DoubleElem) -> Result<Mat> {
        self.check_short(i, j)?;
        if !self.a_in_block(a, i, j) {
            return Err(Error::BadBlock(format!("argument not supported in block ({i}, {j})")));
        }
        Ok(self.sub(&self.add(&self.one(), &a.p), &self.adjoint(&a.q)))
    }

    /// `tau_i(x, y, z) = 1 + x + y + z` for `(x, y, z)` in `X_i`.
    pub fn tau_ultra(&self, i: i32, h: &HElem) -> Result<Mat> {
        if i == 0 || i.abs() > self.l() {
            return Err(Error::BadBlock(format!("tau_{i} needs i != 0")));
        }
        if !self.h_in_carrier(h, i) {
            return Err(Error::BadBlock(format!("argument not in the carrier X_{i}")));
        }
        Ok(self.add(&self.add(&self.add(&self.one(), &h.x), &h.y), &h.z))
    }

    // ---- alpha and epsilon ----

    /// `alpha(g) = (g, adj(g^-1))`.
    pub fn alpha(&self, g: &Mat) -> Result<DoubleElem> {
        let gi = g.inverse(&self.ring).ok_or(Error::NotInvertible)?;
        Ok(self.alpha_with_inverse(g, &gi))
    }

    pub fn alpha_with_inverse(&self, g: &Mat, g_inv: &Mat) -> DoubleElem {
        DoubleElem { p: g.clone(), q: self.adjoint(g_inv) }
    }

    /// `eps = (e_0, e_+, -e_0)`.
    pub fn epsilon(&self) -> HElem {
        HElem { x: self.e(0).clone(), y: self.e_plus(), z: self.neg(self.e(0)) }
    }

    /// `eps . alpha(g) - eps`.
    pub fn eps_defect(&self, g: &Mat) -> Result<HElem> {
        let a = self.alpha(g)?;
        Ok(self.eps_defect_alpha(&a))
    }

    pub fn eps_defect_alpha(&self, a: &DoubleElem) -> HElem {
        let eps = self.epsilon();
        self.h_sub(&self.h_act(&eps, a), &eps)
    }

    pub fn commutator(&self, a: &Mat, b: &Mat) -> Result<Mat> {
        let k = &self.ring;
        let ai = a.inverse(k).ok_or(Error::NotInvertible)?;
        let bi = b.inverse(k).ok_or(Error::NotInvertible)?;
        Ok(crate::matrix::commutator(k, a, &ai, b, &bi))
    }

    pub fn show_h(&self, h: &HElem) -> String {
        format!("(x = {:?}, y = {:?}, z = {:?})", h.x, h.y, h.z)
    }

    pub fn show_a(&self, a: &DoubleElem) -> String {
        format!("({:?}, {:?})", a.p, a.q)
    }
}

/// Adjoint axioms: additivity, anti-multiplicativity, the square being
/// conjugation by `lambda`, the defining form identity on basis pairs, and
/// `adj(e_i) = e_-i`.
pub fn verify_adjoint(ctx: &EndoContext, seed: u64, trials: usize) -> Report {
    let k = ctx.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new("adjoint");
    let lam = Mat::scalar(ctx.dim(), k.lambda());
    let lam_inv = Mat::scalar(ctx.dim(), k.inv(k.lambda()).expect("lambda is a unit"));
    let mut c = Check::new("additive and anti-multiplicative");
    let mut c2 = Check::new("adj(adj(a)) = lambda a lambda^-1");
    for _ in 0..trials {
        let a = ctx.random_matrix(&mut rng);
        let b = ctx.random_matrix(&mut rng);
        let ok = ctx.adjoint(&ctx.add(&a, &b)) == ctx.add(&ctx.adjoint(&a), &ctx.adjoint(&b))
            && ctx.adjoint(&ctx.mul(&a, &b)) == ctx.mul(&ctx.adjoint(&b), &ctx.adjoint(&a));
        c.case(ok, || format!("a = {a:?}, b = {b:?}"));
        let ok2 = ctx.adjoint(&ctx.adjoint(&a)) == ctx.mul(&ctx.mul(&lam, &a), &lam_inv);
        c2.case(ok2, || format!("a = {a:?}"));
    }
    rep.push(c);
    rep.push(c2);
    let d = ctx.dim();
    let form = &ctx.space.form;
    let mut c = Check::new("B(a m, m') = B(m, adj(a) m')");
    for _ in 0..trials.min(200) {
        let a = ctx.random_matrix(&mut rng);
        let adj = ctx.adjoint(&a);
        for i in 0..d {
            for j in 0..d {
                let ei = crate::forms::HeisVec::basis(d, i).m;
                let ej = crate::forms::HeisVec::basis(d, j).m;
                let lhs = form.eval_unchecked(&a.mul_vec(k, &ei), &ej);
                let rhs = form.eval_unchecked(&ei, &adj.mul_vec(k, &ej));
                c.case(lhs == rhs, || format!("a = {a:?}, basis pair ({i}, {j})"));
            }
        }
    }
    rep.push(c);
    let mut c = Check::new("adj(e_i) = e_-i");
    for i in ctx.profile().blocks() {
        c.case(ctx.adjoint(ctx.e(i)) == *ctx.e(-i), || format!("i = {i}"));
    }
    rep.push(c);
    rep
}

/// NQ1 to NQ10 on `trials` random tuples from `H` and `A`.
pub fn verify_nq(ctx: &EndoContext, seed: u64, trials: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new("NQ");
    let mut cs: Vec<Check> = (1..=10).map(|n| Check::new(format!("NQ{n}"))).collect();
    let minus_one = ctx.a_neg(&ctx.a_one());
    let zero_h = ctx.h_zero();
    for _ in 0..trials.max(1) {
        let h = ctx.random_h(&mut rng);
        let h2 = ctx.random_h(&mut rng);
        let a = ctx.random_a(&mut rng);
        let a2 = ctx.random_a(&mut rng);
        let wit = || format!("h = {}, h' = {}, a = {}, a' = {}", ctx.show_h(&h), ctx.show_h(&h2), ctx.show_a(&a), ctx.show_a(&a2));
        let (ph, ph2) = (ctx.pi(&h), ctx.pi(&h2));
        let (th, th2) = (ctx.tr(&h), ctx.tr(&h2));

        // NQ1
        let comm = ctx.h_sub(&ctx.h_sub(&ctx.h_add(&h, &h2), &h), &h2);
        let rhs = ctx.phi(&ctx.a_neg(&ctx.a_mul(&ctx.a_conj(&ph), &ph2)));
        let fa = ctx.phi(&a);
        let ok = comm == rhs && ctx.h_add(&h, &fa) == ctx.h_add(&fa, &h);
        cs[0].case(ok, wit);

        // NQ2
        let ok = ctx.phi(&ctx.a_conj(&a)) == ctx.h_neg(&fa) && ctx.h_neg(&fa) == ctx.phi(&ctx.a_neg(&a));
        cs[1].case(ok, wit);

        // NQ3
        cs[2].case(ctx.a_is_zero(&ctx.pi(&fa)), wit);

        // NQ4
        let cross = ctx.a_mul(&ctx.a_conj(&ph), &ph2);
        let ok = ctx.tr(&ctx.h_add(&h, &h2)) == ctx.a_add(&ctx.a_sub(&th, &cross), &th2)
            && ctx.a_is_zero(&ctx.tr(&zero_h))
            && ctx.tr(&ctx.h_neg(&h)) == ctx.a_sub(&ctx.a_neg(&ctx.a_mul(&ctx.a_conj(&ph), &ph)), &th);
        cs[3].case(ok, wit);

        // NQ5
        cs[4].case(ctx.a_conj(&th) == ctx.tr(&ctx.h_neg(&h)), wit);

        // NQ6
        let lhs = ctx.h_act(&h, &ctx.a_add(&a, &a2));
        let corr = ctx.phi(&ctx.a_mul(&ctx.a_mul(&ctx.a_conj(&a2), &th), &a));
        let rhs = ctx.h_add(&ctx.h_add(&ctx.h_act(&h, &a), &corr), &ctx.h_act(&h, &a2));
        let ok = lhs == rhs
            && ctx.h_is_zero(&ctx.h_act(&h, &ctx.a_zero()))
            && ctx.h_act(&h, &minus_one) == ctx.h_sub(&ctx.phi(&th), &h);
        cs[5].case(ok, wit);

        // NQ7
        let ok = ctx.h_act(&fa, &a2) == ctx.phi(&ctx.a_mul(&ctx.a_mul(&ctx.a_conj(&a2), &a), &a2));
        cs[6].case(ok, wit);

        // NQ8
        let ok = ctx.tr(&ctx.h_act(&h, &a)) == ctx.a_mul(&ctx.a_mul(&ctx.a_conj(&a), &th), &a);
        cs[7].case(ok, wit);

        // NQ9
        cs[8].case(ctx.pi(&ctx.h_act(&h, &a)) == ctx.a_mul(&ph, &a), wit);

        // NQ10
        let ok = ctx.tr(&fa) == ctx.a_sub(&a, &ctx.a_conj(&a)) && ctx.phi(&th) == ctx.h_add(&h, &ctx.h_act(&h, &minus_one));
        cs[9].case(ok, wit);
    }
    for c in cs {
        rep.push(c.with_note(format!("{} sampled tuples", trials.max(1))));
    }
    rep
}

/// Runs `f` on every pair from `xs` and `ys`, or on `budget` seeded random
/// pairs when the product is larger. Returns whether the run was exhaustive.
fn pairs<A, B>(xs: &[A], ys: &[B], budget: usize, rng: &mut ChaCha8Rng, mut f: impl FnMut(&A, &B)) -> bool {
    if xs.is_empty() || ys.is_empty() {
        return true;
    }
    if xs.len() * ys.len() <= budget {
        for x in xs {
            for y in ys {
                f(x, y);
            }
        }
        true
    } else {
        for _ in 0..budget {
            f(&xs[rng.gen_range(0..xs.len())], &ys[rng.gen_range(0..ys.len())]);
        }
        false
    }
}

/// LT1 to LT4 for `t_ij`, all index tuples, element pairs per block up to `budget`.
pub fn verify_lt(ctx: &EndoContext, seed: u64, budget: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = ctx.l();
    let idx: Vec<i32> = (-l..=l).filter(|&i| ctx.profile().rank(i) > 0).collect();
    let mut rep = Report::new("LT");
    let mut cs: Vec<Check> = (1..=4).map(|n| Check::new(format!("LT{n}"))).collect();
    let mut exhaustive = true;
    let one = ctx.one();
    let t = |i, j, x: &Mat| ctx.t_elem(i, j, x).expect("valid block");
    let comm = |a: &Mat, b: &Mat| ctx.commutator(a, b).expect("transvections are invertible");
    for &i in &idx {
        for &j in &idx {
            if i == j {
                continue;
            }
            let bij = ctx.block_elements(i, j);
            exhaustive &= pairs(&bij, &bij, budget, &mut rng, |x, y| {
                let ok = ctx.mul(&t(i, j, x), &t(i, j, y)) == t(i, j, &ctx.add(x, y));
                cs[0].case(ok, || format!("i = {i}, j = {j}, x = {x:?}, y = {y:?}"));
            });
            for &k in &idx {
                if k == i {
                    continue;
                }
                if k != j {
                    let bjk = ctx.block_elements(j, k);
                    exhaustive &= pairs(&bij, &bjk, budget, &mut rng, |x, y| {
                        let ok = comm(&t(i, j, x), &t(j, k, y)) == t(i, k, &ctx.mul(x, y));
                        cs[1].case(ok, || format!("i = {i}, j = {j}, k = {k}, x = {x:?}, y = {y:?}"));
                    });
                    // LT3: [t_ji(x), t_kj(y)] = t_ki(-y x)
                    let bji = ctx.block_elements(j, i);
                    let bkj = ctx.block_elements(k, j);
                    exhaustive &= pairs(&bji, &bkj, budget, &mut rng, |x, y| {
                        let ok = comm(&t(j, i, x), &t(k, j, y)) == t(k, i, &ctx.neg(&ctx.mul(y, x)));
                        cs[2].case(ok, || format!("i = {i}, j = {j}, k = {k}, x = {x:?}, y = {y:?}"));
                    });
                }
            }
            // LT4: [t_ij(x), t_kl(y)] = 1 for j != k and l != i.
            for &k in &idx {
                for &m in &idx {
                    if k == m || j == k || m == i {
                        continue;
                    }
                    let bkm = ctx.block_elements(k, m);
                    exhaustive &= pairs(&bij, &bkm, budget, &mut rng, |x, y| {
                        let ok = comm(&t(i, j, x), &t(k, m, y)) == one;
                        cs[3].case(ok, || format!("({i},{j}), ({k},{m}), x = {x:?}, y = {y:?}"));
                    });
                }
            }
        }
    }
    let note = if exhaustive { "exhaustive per block" } else { "sampled per block" };
    for c in cs {
        rep.push(c.with_note(note));
    }
    rep
}

/// T1 to T8 as matrix identities, all admissible index tuples, element
/// pairs per block exhaustive up to `budget` and sampled beyond it.
pub fn verify_t(ctx: &EndoContext, seed: u64, budget: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hyp = ctx.hyperbolic();
    let mut rep = Report::new("T");
    let mut cs: Vec<Check> = (1..=8).map(|n| Check::new(format!("T{n}"))).collect();
    let mut exhaustive = true;
    let one = Some(ctx.one());
    // A defective context can push arguments out of their blocks; that
    // surfaces as `None` and counts as a failed case rather than a panic.
    let ts = |i, j, a: &DoubleElem| ctx.tau_short(i, j, a).ok();
    let tu = |i, h: &HElem| ctx.tau_ultra(i, h).ok();
    let comm = |a: Option<Mat>, b: Option<Mat>| ctx.commutator(&a?, &b?).ok();
    let prod = |a: Option<Mat>, b: Option<Mat>| Some(ctx.mul(&a?, &b?));
    let eq = |a: Option<Mat>, b: Option<Mat>| a.is_some() && a == b;
    let short = |i: i32, j: i32| i != j && i != -j;
    let minus_one = ctx.a_neg(&ctx.a_one());

    let ablocks = |i: i32, j: i32| ctx.a_block_elements(i, j);
    let carriers: Vec<(i32, Vec<HElem>)> = hyp.iter().map(|&i| (i, ctx.carrier_elements(i))).collect();
    let carrier = |i: i32| &carriers.iter().find(|(k, _)| *k == i).unwrap().1;

    for &i in &hyp {
        let xi = carrier(i);
        // T1 for tau_i.
        exhaustive &= pairs(xi, xi, budget, &mut rng, |h, h2| {
            let ok = eq(prod(tu(i, h), tu(i, h2)), tu(i, &ctx.h_add(h, h2)));
            cs[0].case(ok, || format!("tau_{i}: h = {}, h' = {}", ctx.show_h(h), ctx.show_h(h2)));
        });
        for &j in &hyp {
            if !short(i, j) {
                // T6 needs i != +-j; T5 uses tau_{-i,j}, tau_{j,i}, needing j != +-i as well.
                continue;
            }
            let aij = ablocks(i, j);
            // T1 and T2 for tau_ij.
            exhaustive &= pairs(&aij, &aij, budget, &mut rng, |a, a2| {
                let ok = eq(prod(ts(i, j, a), ts(i, j, a2)), ts(i, j, &ctx.a_add(a, a2)));
                cs[0].case(ok, || format!("tau_{{{i},{j}}}: a = {}, a' = {}", ctx.show_a(a), ctx.show_a(a2)));
            });
            for a in &aij {
                let ok = eq(ts(i, j, a), ts(-j, -i, &ctx.a_neg(&ctx.a_conj(a))));
                cs[1].case(ok, || format!("i = {i}, j = {j}, a = {}", ctx.show_a(a)));
            }
            // T3
            for &k in &hyp {
                for &m in &hyp {
                    if !short(k, m) {
                        continue;
                    }
                    if i != m && m != -j && j != k && k != -i {
                        let akm = ablocks(k, m);
                        exhaustive &= pairs(&aij, &akm, budget, &mut rng, |a, a2| {
                            let ok = eq(comm(ts(i, j, a), ts(k, m, a2)), one.clone());
                            cs[2].case(ok, || format!("({i},{j}), ({k},{m}), a = {}, a' = {}", ctx.show_a(a), ctx.show_a(a2)));
                        });
                    }
                }
            }
            // T4
            for &k in &hyp {
                if !short(j, k) || k == i || k == -i {
                    continue;
                }
                let ajk = ablocks(j, k);
                exhaustive &= pairs(&aij, &ajk, budget, &mut rng, |a, a2| {
                    let ok = eq(comm(ts(i, j, a), ts(j, k, a2)), ts(i, k, &ctx.a_mul(a, a2)));
                    cs[3].case(ok, || format!("first form, i = {i}, j = {j}, k = {k}"));
                });
                // [tau_ji(a), tau_kj(a')] = tau_ki(-a' a)
                let aji = ablocks(j, i);
                let akj = ablocks(k, j);
                exhaustive &= pairs(&aji, &akj, budget, &mut rng, |a, a2| {
                    let ok = eq(comm(ts(j, i, a), ts(k, j, a2)), ts(k, i, &ctx.a_neg(&ctx.a_mul(a2, a))));
                    cs[3].case(ok, || format!("second form, i = {i}, j = {j}, k = {k}"));
                });
            }
            // T5: [tau_{-i,j}(a), tau_{j,i}(a')] = tau_i(phi(a a'))
            let amij = ablocks(-i, j);
            let aji = ablocks(j, i);
            exhaustive &= pairs(&amij, &aji, budget, &mut rng, |a, a2| {
                let ok = eq(comm(ts(-i, j, a), ts(j, i, a2)), tu(i, &ctx.phi(&ctx.a_mul(a, a2))));
                cs[4].case(ok, || format!("i = {i}, j = {j}, a = {}, a' = {}", ctx.show_a(a), ctx.show_a(a2)));
            });
            // T6: [tau_i(h), tau_j(h')] = tau_{-i,j}(-conj(pi(h)) pi(h'))
            let xj = carrier(j);
            exhaustive &= pairs(xi, xj, budget, &mut rng, |h, h2| {
                let arg = ctx.a_neg(&ctx.a_mul(&ctx.a_conj(&ctx.pi(h)), &ctx.pi(h2)));
                let ok = eq(comm(tu(i, h), tu(j, h2)), ts(-i, j, &arg));
                cs[5].case(ok, || format!("i = {i}, j = {j}, h = {}, h' = {}", ctx.show_h(h), ctx.show_h(h2)));
            });
            // T8: [tau_i(h), tau_ij(a)] = tau_{-i,j}(tr(h) a) tau_j(-(h . (-a)))
            exhaustive &= pairs(xi, &aij, budget, &mut rng, |h, a| {
                let first = ts(-i, j, &ctx.a_mul(&ctx.tr(h), a));
                let second = tu(j, &ctx.h_neg(&ctx.h_act(h, &ctx.a_mul(&minus_one, a))));
                let ok = eq(comm(tu(i, h), ts(i, j, a)), prod(first, second));
                cs[7].case(ok, || format!("i = {i}, j = {j}, h = {}, a = {}", ctx.show_h(h), ctx.show_a(a)));
            });
        }
        // T7: [tau_i(h), tau_jk(a)] = 1 for j != i != -k.
        for &j in &hyp {
            for &k in &hyp {
                if !short(j, k) || j == i || i == -k {
                    continue;
                }
                let ajk = ablocks(j, k);
                exhaustive &= pairs(xi, &ajk, budget, &mut rng, |h, a| {
                    let ok = eq(comm(tu(i, h), ts(j, k, a)), one.clone());
                    cs[6].case(ok, || format!("i = {i}, ({j},{k}), h = {}, a = {}", ctx.show_h(h), ctx.show_a(a)));
                });
            }
        }
    }
    let note = if exhaustive { "exhaustive per block" } else { "sampled per block" };
    for c in cs {
        rep.push(c.with_note(note));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{build_standard_space, ParamChoice, DEFAULT_PARAM_CAP};
    use crate::ring::RingSpec;

    fn ctx(n: u32, l: usize, r0: usize, param: ParamChoice) -> EndoContext {
        let k = Ring::new(&RingSpec::modular(n, 1)).unwrap();
        let odd = Mat::identity(r0);
        let s = build_standard_space(&k, &BlockProfile::simple(l, r0), &odd, &param, DEFAULT_PARAM_CAP).unwrap();
        EndoContext::new(&s).unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let c = ctx(2, 1, 0, ParamChoice::Minimal);
        assert_eq!(c.adjoint(&c.one()), c.one());
        // Basis (e_-1, e_1): the unit at (e_1, e_-1) is mirrored across the antidiagonal onto itself.
        let u = Mat::from_ints(c.ring(), &[&[0, 0], &[1, 0]]);
        assert_eq!(c.adjoint(&u), u);
        let u2 = Mat::from_ints(c.ring(), &[&[1, 0], &[0, 0]]);
        assert_eq!(c.adjoint(&u2), Mat::from_ints(c.ring(), &[&[0, 0], &[0, 1]]));
        let c3 = ctx(3, 3, 1, ParamChoice::Minimal);
        assert!(verify_adjoint(&c3, 1, 100).all_passed());
    }

    #[test]
    fn h_group_law() {
        let c = ctx(2, 1, 1, ParamChoice::Minimal);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let h = c.random_h(&mut rng);
            assert_eq!(c.h_add(&c.h_zero(), &h), h);
            assert!(c.h_is_zero(&c.h_add(&c.h_neg(&h), &h)));
            assert!(c.h_is_zero(&c.h_act(&h, &c.a_zero())));
            assert_eq!(c.h_act(&h, &c.a_one()), h);
        }
        // A nonabelian pair in the small carrier.
        let all: Vec<HElem> = (0..64).map(|_| c.random_h(&mut rng)).collect();
        assert!(all.iter().any(|h| all.iter().any(|h2| c.h_add(h, h2) != c.h_add(h2, h))));
        let e = c.epsilon();
        assert_eq!(c.pi(&e), c.diag(c.e(0)));
        assert_eq!(c.tr(&e), c.a_sub(&c.diag(&c.e_plus()), &c.zeta()));
    }

    #[test]
    fn relation_suites_pass() {
        for (r0, p) in [(0, ParamChoice::Minimal), (1, ParamChoice::Maximal)] {
            let c = ctx(2, 3, r0, p);
            let t = verify_t(&c, 1, 1 << 12);
            assert!(t.all_passed(), "{:?}", t.failures().collect::<Vec<_>>());
            let lt = verify_lt(&c, 1, 1 << 12);
            assert!(lt.all_passed(), "{:?}", lt.failures().collect::<Vec<_>>());
        }
        let c = ctx(4, 3, 1, ParamChoice::Minimal);
        let nq = verify_nq(&c, 2, 500);
        assert!(nq.all_passed(), "{:?}", nq.failures().collect::<Vec<_>>());
    }

    #[test]
    fn mutations_are_detected() {
        let k = Ring::new(&RingSpec::modular(4, 1)).unwrap();
        let s = build_standard_space(&k, &BlockProfile::simple(2, 1), &Mat::identity(1), &ParamChoice::Minimal, DEFAULT_PARAM_CAP).unwrap();
        let pi = EndoContext::with_mutation(&s, EndoMutation::PiSign).unwrap();
        let r = verify_nq(&pi, 0, 200);
        assert!(!r.passed("NQ4"));
        assert!(r.get("NQ4").unwrap().witness.is_some());
        let hs = EndoContext::with_mutation(&s, EndoMutation::HAddSign).unwrap();
        assert!(!verify_nq(&hs, 0, 200).all_passed());
        let zp = EndoContext::with_mutation(&s, EndoMutation::ZeroPhi).unwrap();
        assert!(!verify_nq(&zp, 0, 200).passed("NQ10"));
        // A non-symmetric odd block makes the naive adjoint differ from the true one.
        let f3 = Ring::new(&RingSpec::modular(3, 1)).unwrap();
        let s3 = build_standard_space(&f3, &BlockProfile::simple(2, 1), &Mat::scalar(1, f3.from_int(2)), &ParamChoice::Minimal, DEFAULT_PARAM_CAP).unwrap();
        let naive = EndoContext::with_mutation(&s3, EndoMutation::NaiveAdjoint).unwrap();
        assert!(!verify_t(&naive, 0, 64).passed("T2"));
    }

    #[test]
    fn transvection_preconditions() {
        let c = ctx(2, 3, 1, ParamChoice::Minimal);
        let a = c.a_zero();
        assert_eq!(c.tau_short(1, 2, &a).unwrap(), c.one());
        assert!(matches!(c.tau_short(3, -3, &a), Err(Error::BadBlock(_))));
        assert!(matches!(c.tau_short(0, 1, &a), Err(Error::BadBlock(_))));
        assert!(matches!(c.t_elem(1, 1, &c.zero()), Err(Error::BadBlock(_))));
        let wrong = c.diag(c.e(1));
        assert!(matches!(c.tau_short(1, 2, &wrong), Err(Error::BadBlock(_))));
        assert_eq!(c.tau_ultra(1, &c.h_zero()).unwrap(), c.one());
    }
}
