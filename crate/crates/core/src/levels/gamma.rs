//! Exact subgroups of `H` and blockwise submodules of `A`.
//!
//! `H` is a central extension of the abelian group of `(x, z)` pairs by the
//! additive group of `y` values, and every commutator lands in the centre.
//! A subgroup is therefore stored as Howell rows for its `(x, z)` projection,
//! each carrying an element of the subgroup that lifts it, together with the
//! `Z/n`-module of `y` values of its central elements. Membership reduces the
//! projection using the lifts and tests what is left in the central module.

use num_bigint::BigUint;

use crate::endo::{DoubleElem, EndoContext, HElem};
use crate::howell::ZnModule;
use crate::matrix::Mat;
use crate::ring::Elem;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = xgcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

fn push_coords(ctx: &EndoContext, out: &mut Vec<u32>, e: Elem) {
    let w = ctx.ring().width();
    out.extend_from_slice(&ctx.ring().coords(e)[..w]);
}

/// Coordinates of the `(x, z)` part of an `H` element.
pub fn proj_coords(ctx: &EndoContext, h: &HElem) -> Vec<u32> {
    let p = ctx.profile();
    let d = ctx.dim();
    let mut v = Vec::new();
    for r in p.range(0) {
        for c in 0..d {
            push_coords(ctx, &mut v, h.x.get(r, c));
        }
    }
    for r in 0..d {
        for c in p.range(0) {
            push_coords(ctx, &mut v, h.z.get(r, c));
        }
    }
    v
}

pub fn y_coords(ctx: &EndoContext, y: &Mat) -> Vec<u32> {
    let mut v = Vec::with_capacity(y.data().len() * ctx.ring().width());
    for &e in y.data() {
        push_coords(ctx, &mut v, e);
    }
    v
}

pub fn y_from_coords(ctx: &EndoContext, v: &[u32]) -> Mat {
    let w = ctx.ring().width();
    let d = ctx.dim();
    Mat::from_vec(d, d, v.chunks(w).map(|c| ctx.ring().from_coords(c)).collect())
}

/// A subgroup of `H` with exact membership.
#[derive(Clone, Debug)]
pub struct GammaGroup {
    n: u32,
    proj_dim: usize,
    rows: Vec<(Vec<u32>, HElem)>,
    central: ZnModule,
}

impl GammaGroup {
    pub fn trivial(ctx: &EndoContext) -> GammaGroup {
        let n = ctx.ring().modulus();
        let w = ctx.ring().width();
        let d = ctx.dim();
        let r0 = ctx.profile().rank(0);
        GammaGroup { n, proj_dim: 2 * r0 * d * w, rows: Vec::new(), central: ZnModule::zero(n, d * d * w) }
    }

    pub fn generated(ctx: &EndoContext, gens: &[HElem]) -> GammaGroup {
        let mut g = GammaGroup::trivial(ctx);
        g.extend(ctx, gens);
        g
    }

    /// Adds generators; returns whether the group grew.
    pub fn extend(&mut self, ctx: &EndoContext, gens: &[HElem]) -> bool {
        let mut grew = false;
        for h in gens {
            grew |= self.insert(ctx, h);
        }
        grew
    }

    /// Subtracts lifts until the projection is reduced. Returns the
    /// remaining projection and the correspondingly shifted element.
    fn reduce(&self, ctx: &EndoContext, h: &HElem) -> (Vec<u32>, HElem) {
        let n = self.n as u64;
        let mut r = proj_coords(ctx, h);
        let mut h = h.clone();
        for (b, lift) in &self.rows {
            let c = b.iter().position(|&x| x != 0).expect("rows are nonzero");
            let q = r[c] as u64 / b[c] as u64;
            if q != 0 {
                for (x, &y) in r.iter_mut().zip(b) {
                    *x = ((*x as u64 + n * n - q * y as u64 % n) % n) as u32;
                }
                h = ctx.h_add(&h, &ctx.h_times(lift, n - q % n));
            }
        }
        (r, h)
    }

    pub fn contains(&self, ctx: &EndoContext, h: &HElem) -> bool {
        let (r, rest) = self.reduce(ctx, h);
        r.iter().all(|&x| x == 0) && self.central.contains(&y_coords(ctx, &rest.y))
    }

    pub fn insert(&mut self, ctx: &EndoContext, h: &HElem) -> bool {
        let (r, rest) = self.reduce(ctx, h);
        if r.iter().all(|&x| x == 0) {
            return self.central.insert(&y_coords(ctx, &rest.y));
        }
        let mut pool = self.rows.clone();
        pool.push((r, rest));
        self.rebuild(ctx, pool);
        true
    }

    /// Howell elimination of the projection with every row operation
    /// mirrored on the lifts. Lifts whose projection dies, `n`-fold
    /// multiples and commutators of the final lifts feed the central module.
    fn rebuild(&mut self, ctx: &EndoContext, mut pool: Vec<(Vec<u32>, HElem)>) {
        let n = self.n as u64;
        let ni = n as i64;
        let mult = |h: &HElem, k: i64| ctx.h_times(h, k.rem_euclid(ni) as u64);
        let mut central: Vec<HElem> = Vec::new();
        for (_, h) in &pool {
            central.push(ctx.h_times(h, n));
        }
        let mut kept = Vec::with_capacity(pool.len());
        for (v, h) in pool.drain(..) {
            if v.iter().all(|&x| x == 0) {
                central.push(h);
            } else {
                kept.push((v, h));
            }
        }
        pool = kept;
        let mut basis: Vec<(Vec<u32>, HElem)> = Vec::new();
        for c in 0..self.proj_dim {
            let mut piv: Option<(Vec<u32>, HElem)> = None;
            let mut rest = Vec::with_capacity(pool.len());
            for (row, hr) in pool.drain(..) {
                if row[c] == 0 {
                    rest.push((row, hr));
                    continue;
                }
                match piv.take() {
                    None => piv = Some((row, hr)),
                    Some((p, hp)) => {
                        let a = p[c] as i64;
                        let b = row[c] as i64;
                        let (g, s, t) = xgcd(a, b);
                        let (ag, bg) = (a / g, b / g);
                        let comb = |x: i64, y: i64, u: u32, v: u32| (x * u as i64 + y * v as i64).rem_euclid(ni) as u32;
                        let np: Vec<u32> = p.iter().zip(&row).map(|(&u, &v)| comb(s, t, u, v)).collect();
                        let nr: Vec<u32> = p.iter().zip(&row).map(|(&u, &v)| comb(-bg, ag, u, v)).collect();
                        let hnp = ctx.h_add(&mult(&hp, s), &mult(&hr, t));
                        let hnr = ctx.h_add(&mult(&hp, -bg), &mult(&hr, ag));
                        central.push(ctx.h_times(&hnp, n));
                        central.push(ctx.h_times(&hnr, n));
                        if nr.iter().any(|&x| x != 0) {
                            rest.push((nr, hnr));
                        } else {
                            central.push(hnr);
                        }
                        piv = Some((np, hnp));
                    }
                }
            }
            pool = rest;
            let Some((mut p, mut hp)) = piv else { continue };
            if p[c] == 0 {
                if p.iter().any(|&x| x != 0) {
                    pool.push((p, hp));
                } else {
                    central.push(hp);
                }
                continue;
            }
            let a = p[c] as u64;
            let g = gcd(a, n);
            let u = (1..n).find(|&u| gcd(u, n) == 1 && (u * a) % n == g).unwrap_or(1);
            for x in p.iter_mut() {
                *x = ((*x as u64 * u) % n) as u32;
            }
            hp = ctx.h_times(&hp, u);
            central.push(ctx.h_times(&hp, n));
            let sat: Vec<u32> = p.iter().map(|&x| ((x as u64 * (n / g)) % n) as u32).collect();
            let hsat = ctx.h_times(&hp, n / g);
            if sat.iter().any(|&x| x != 0) {
                pool.push((sat, hsat));
            } else {
                central.push(hsat);
            }
            for (b, hb) in basis.iter_mut() {
                let q = b[c] as u64 / g;
                if q != 0 {
                    for (x, &y) in b.iter_mut().zip(&p) {
                        *x = ((*x as u64 + n * n - q * y as u64 % n) % n) as u32;
                    }
                    *hb = ctx.h_add(hb, &ctx.h_times(&hp, n - q % n));
                    central.push(ctx.h_times(hb, n));
                }
            }
            basis.push((p, hp));
        }
        for (i, (_, a)) in basis.iter().enumerate() {
            for (_, b) in &basis[i + 1..] {
                central.push(ctx.h_sub(&ctx.h_sub(&ctx.h_add(a, b), a), b));
            }
        }
        for h in &central {
            debug_assert!(h.x.is_zero() && h.z.is_zero(), "central candidate has a nonzero projection");
            self.central.insert(&y_coords(ctx, &h.y));
        }
        self.rows = basis;
    }

    pub fn order(&self) -> BigUint {
        let proj: BigUint = self
            .rows
            .iter()
            .map(|(b, _)| {
                let p = *b.iter().find(|&&x| x != 0).unwrap();
                BigUint::from(self.n / p)
            })
            .product();
        proj * self.central.order()
    }

    /// Lifts of the projection rows followed by the central generators.
    pub fn generators(&self, ctx: &EndoContext) -> Vec<HElem> {
        let mut out: Vec<HElem> = self.rows.iter().map(|(_, h)| h.clone()).collect();
        for r in self.central.rows() {
            out.push(HElem { x: ctx.zero(), y: y_from_coords(ctx, r), z: ctx.zero() });
        }
        out
    }

    /// Every element; distinct coefficient tuples give distinct elements.
    pub fn elements(&self, ctx: &EndoContext) -> Vec<HElem> {
        let n = self.n as u64;
        let mut acc = vec![ctx.h_zero()];
        for (b, lift) in &self.rows {
            let p = *b.iter().find(|&&x| x != 0).unwrap() as u64;
            let mut next = Vec::with_capacity(acc.len() * (n / p) as usize);
            for h in &acc {
                let mut cur = h.clone();
                for _ in 0..n / p {
                    next.push(cur.clone());
                    cur = ctx.h_add(&cur, lift);
                }
            }
            acc = next;
        }
        let ys = self.central.elements();
        let mut out = Vec::with_capacity(acc.len() * ys.len());
        for h in &acc {
            for y in &ys {
                out.push(ctx.h_add(h, &HElem { x: ctx.zero(), y: y_from_coords(ctx, y), z: ctx.zero() }));
            }
        }
        out
    }

    pub fn is_subgroup_of(&self, ctx: &EndoContext, other: &GammaGroup) -> bool {
        self.generators(ctx).iter().all(|h| other.contains(ctx, h))
    }

    pub fn equal(&self, ctx: &EndoContext, other: &GammaGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(ctx, other)
    }

    /// The image `G . a` under the endomorphism `h -> h . a`.
    pub fn act(&self, ctx: &EndoContext, a: &DoubleElem) -> GammaGroup {
        let gens: Vec<HElem> = self.generators(ctx).iter().map(|h| ctx.h_act(h, a)).collect();
        GammaGroup::generated(ctx, &gens)
    }

    /// `G . e_i`.
    pub fn component(&self, ctx: &EndoContext, i: i32) -> GammaGroup {
        self.act(ctx, &ctx.diag(ctx.e(i)))
    }

    /// `G . (1 - e_0)`.
    pub fn hyperbolic_part(&self, ctx: &EndoContext) -> GammaGroup {
        self.act(ctx, &ctx.diag(&ctx.e_hyp()))
    }
}

/// A submodule of `A` that splits along the blocks `e_i A e_j`, each
/// stored in Howell form over coordinates `(p entries, q entries)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IModule {
    l: i32,
    blocks: Vec<ZnModule>,
}

fn block_positions(ctx: &EndoContext, i: i32, j: i32) -> Vec<(usize, usize)> {
    let p = ctx.profile();
    let mut v = Vec::new();
    for r in p.range(i) {
        for c in p.range(j) {
            v.push((r, c));
        }
    }
    v
}

pub fn a_block_coords(ctx: &EndoContext, a: &DoubleElem, i: i32, j: i32) -> Vec<u32> {
    let p = ctx.profile();
    let (ri, rj) = (p.range(i), p.range(j));
    let mut v = Vec::with_capacity(2 * ri.len() * rj.len() * ctx.ring().width());
    for m in [&a.p, &a.q] {
        for r in ri.clone() {
            for c in rj.clone() {
                push_coords(ctx, &mut v, m.get(r, c));
            }
        }
    }
    v
}

/// Whether both components of `a` vanish on block `(i, j)`.
fn a_block_is_zero(ctx: &EndoContext, a: &DoubleElem, i: i32, j: i32) -> bool {
    let p = ctx.profile();
    let (ri, rj) = (p.range(i), p.range(j));
    ri.clone().all(|r| rj.clone().all(|c| a.p.get(r, c).is_zero() && a.q.get(r, c).is_zero()))
}

pub fn a_from_block_coords(ctx: &EndoContext, v: &[u32], i: i32, j: i32) -> DoubleElem {
    let w = ctx.ring().width();
    let pos = block_positions(ctx, i, j);
    let mut a = ctx.a_zero();
    let mut it = v.chunks(w);
    for &(r, c) in &pos {
        a.p.set(r, c, ctx.ring().from_coords(it.next().unwrap()));
    }
    for &(r, c) in &pos {
        a.q.set(r, c, ctx.ring().from_coords(it.next().unwrap()));
    }
    a
}

impl IModule {
    pub fn zero(ctx: &EndoContext) -> IModule {
        let l = ctx.l();
        let n = ctx.ring().modulus();
        let w = ctx.ring().width();
        let mut blocks = Vec::new();
        for i in -l..=l {
            for j in -l..=l {
                let dim = 2 * ctx.profile().rank(i) * ctx.profile().rank(j) * w;
                blocks.push(ZnModule::zero(n, dim));
            }
        }
        IModule { l, blocks }
    }

    fn idx(&self, i: i32, j: i32) -> usize {
        ((i + self.l) * (2 * self.l + 1) + (j + self.l)) as usize
    }

    pub fn block(&self, i: i32, j: i32) -> &ZnModule {
        &self.blocks[self.idx(i, j)]
    }

    fn block_pairs(&self) -> impl Iterator<Item = (i32, i32)> {
        let l = self.l;
        (-l..=l).flat_map(move |i| (-l..=l).map(move |j| (i, j)))
    }

    pub fn contains(&self, ctx: &EndoContext, a: &DoubleElem) -> bool {
        self.block_pairs().all(|(i, j)| {
            let b = self.block(i, j);
            if b.is_zero() {
                a_block_is_zero(ctx, a, i, j)
            } else {
                a_block_is_zero(ctx, a, i, j) || b.contains(&a_block_coords(ctx, a, i, j))
            }
        })
    }

    pub fn insert(&mut self, ctx: &EndoContext, a: &DoubleElem) -> bool {
        let mut grew = false;
        for (i, j) in self.block_pairs().collect::<Vec<_>>() {
            let v = a_block_coords(ctx, a, i, j);
            let k = self.idx(i, j);
            grew |= self.blocks[k].insert(&v);
        }
        grew
    }

    pub fn block_generators(&self, ctx: &EndoContext, i: i32, j: i32) -> Vec<DoubleElem> {
        self.block(i, j).rows().iter().map(|r| a_from_block_coords(ctx, r, i, j)).collect()
    }

    pub fn generators(&self, ctx: &EndoContext) -> Vec<DoubleElem> {
        self.block_pairs().flat_map(|(i, j)| self.block_generators(ctx, i, j)).collect()
    }

    pub fn block_elements(&self, ctx: &EndoContext, i: i32, j: i32) -> Vec<DoubleElem> {
        self.block(i, j).elements().iter().map(|r| a_from_block_coords(ctx, r, i, j)).collect()
    }

    /// Keeps only the blocks `(i, j)` accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(i32, i32) -> bool) -> IModule {
        let mut out = self.clone();
        for (i, j) in self.block_pairs() {
            if !keep(i, j) {
                let k = out.idx(i, j);
                out.blocks[k] = ZnModule::zero(self.blocks[k].modulus(), self.blocks[k].dim());
            }
        }
        out
    }

    pub fn is_submodule_of(&self, other: &IModule) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.is_submodule_of(b))
    }

    pub fn order(&self) -> BigUint {
        self.blocks.iter().map(|b| b.order()).product()
    }

    pub fn block_order(&self, i: i32, j: i32) -> BigUint {
        self.block(i, j).order()
    }
}
