//! The level groups `EU(P, L)`, `U(P, L)` and `GU'(P, L)`.

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::roots::Root;
use super::{AugLevel, LevelSpace};
use crate::endo::{DoubleElem, HElem};
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::matrix::{GroupKey, Mat};

/// The roots `+-e_l +- e_i` for `1 - l <= i <= l - 1`, where `i = 0`
/// contributes `+-e_l`.
pub fn boundary_roots(l: usize) -> Vec<Root> {
    let mut out = Vec::new();
    for s in [1, -1] {
        out.push(Root::unit(l, l - 1, s));
        for i in 0..l - 1 {
            for t in [1, -1] {
                let mut v = vec![0; l];
                v[l - 1] = s;
                v[i] = t;
                out.push(Root(v));
            }
        }
    }
    out
}

/// Group constructions over a fixed level space with a closure cap.
pub struct LevelGroups<'a> {
    pub space: &'a LevelSpace,
    pub cap: usize,
}

impl<'a> LevelGroups<'a> {
    pub fn new(space: &'a LevelSpace, cap: usize) -> LevelGroups<'a> {
        LevelGroups { space, cap }
    }

    fn short_pairs(&self) -> Vec<(i32, i32)> {
        let hyp = self.space.ctx.hyperbolic();
        let mut out = Vec::new();
        for &i in &hyp {
            for &j in &hyp {
                if i != j && i != -j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `tau_ij(E_rc k)` for diagonal matrix units and `tau_i(Lambda_i)`.
    pub fn eu_gens(&self) -> Result<Vec<Mat>> {
        let c = &self.space.ctx;
        let d = c.dim();
        let p = c.profile();
        let mut out = Vec::new();
        for (i, j) in self.short_pairs() {
            for r in p.range(i) {
                for col in p.range(j) {
                    for k in c.ring().zn_basis() {
                        out.push(c.tau_short(i, j, &c.diag(&Mat::unit(d, d, r, col, k)))?);
                    }
                }
            }
        }
        for (i, els) in &self.space.lambda.blocks {
            let g = super::GammaGroup::generated(c, els);
            for h in g.generators(c) {
                out.push(c.tau_ultra(*i, &h)?);
            }
        }
        Ok(out)
    }

    /// `tau_ij(a)` for generators `a` of `I_ij` and `tau_i(h)` for
    /// generators `h` of `Gamma . e_i`.
    pub fn eul_gens(&self, lvl: &AugLevel) -> Result<Vec<Mat>> {
        let c = &self.space.ctx;
        let mut out = Vec::new();
        for (i, j) in self.short_pairs() {
            for a in lvl.i.block_generators(c, i, j) {
                out.push(c.tau_short(i, j, &a)?);
            }
        }
        for i in c.hyperbolic() {
            for h in lvl.gamma.component(c, i).generators(c) {
                out.push(c.tau_ultra(i, &h)?);
            }
        }
        Ok(out)
    }

    pub fn eu(&self) -> Result<FiniteGroup> {
        let c = &self.space.ctx;
        FiniteGroup::generate(c.ring(), c.dim(), &self.eu_gens()?, self.cap)
    }

    /// `EU(P, L)`, the normal closure of `EU(L)` under `EU(P)`.
    pub fn eu_level(&self, lvl: &AugLevel) -> Result<FiniteGroup> {
        let c = &self.space.ctx;
        FiniteGroup::normal_closure(c.ring(), c.dim(), &self.eul_gens(lvl)?, &self.eu_gens()?, self.cap)
    }

    /// The normal closure of the boundary root subgroups `U_alpha(L)`
    /// under `EU(P, Lhat)`, which is generated by `EU(Lhat)`.
    pub fn boundary_group(&self, lvl: &AugLevel) -> Result<FiniteGroup> {
        let c = &self.space.ctx;
        let hat = self.space.enveloping(lvl)?;
        let mut seed = Vec::new();
        for r in boundary_roots(self.space.l() as usize) {
            seed.extend(self.space.root_subgroup_gens(&r, lvl)?);
        }
        FiniteGroup::normal_closure(c.ring(), c.dim(), &seed, &self.eul_gens(&hat)?, self.cap)
    }

    /// `[EU(P, L), EU(P)]`, as the normal closure under `EU(P)` of the
    /// commutators of the normal generators of `EU(P, L)` with the
    /// generators of `EU(P)`.
    pub fn perfection_group(&self, lvl: &AugLevel) -> Result<FiniteGroup> {
        let c = &self.space.ctx;
        let xs = self.eul_gens(lvl)?;
        let ys = self.eu_gens()?;
        let mut seed = Vec::new();
        for x in &xs {
            for y in &ys {
                seed.push(c.commutator(x, y)?);
            }
        }
        FiniteGroup::normal_closure(c.ring(), c.dim(), &seed, &ys, self.cap)
    }

    /// All of `U(P)`, enumerated column by column and then regenerated
    /// from a few of its own elements so the result carries generators.
    pub fn unitary(&self, seed: u64) -> Result<FiniteGroup> {
        let c = &self.space.ctx;
        let keys = c.space.unitary_group_keys(self.cap)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        subgroup_from_keys(self.space, &keys, self.cap, &mut rng)
    }

    /// `U(P, L)` inside an enumerated `U(P)`.
    pub fn principal(&self, lvl: &AugLevel, up: &FiniteGroup, seed: u64) -> Result<FiniteGroup> {
        let codec = up.codec();
        let keys: Vec<GroupKey> = up.keys().iter().copied().filter(|&k| self.space.principal_member(lvl, &codec.decode(k))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        subgroup_from_keys(self.space, &keys, self.cap, &mut rng)
    }
}

/// The group on a key set known to be a subgroup, built by adding missing
/// elements in random order as generators. Fails if the closure grows past
/// the set, which means the set was not closed.
fn subgroup_from_keys(space: &LevelSpace, keys: &[GroupKey], cap: usize, rng: &mut ChaCha8Rng) -> Result<FiniteGroup> {
    let c = &space.ctx;
    let mut g = FiniteGroup::trivial(c.ring(), c.dim(), cap)?;
    let codec = g.codec();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.shuffle(rng);
    for idx in order {
        if !g.contains_key(keys[idx]) {
            g.extend(&[codec.decode(keys[idx])])?;
            if g.order() > keys.len() {
                return Err(Error::NotALevel(format!("the given set of {} elements is not a group", keys.len())));
            }
        }
    }
    Ok(g)
}

impl LevelSpace {
    /// `alpha(g) - 1 in I` and `eps . alpha(g) - eps in Gamma`.
    pub fn principal_member(&self, lvl: &AugLevel, g: &Mat) -> bool {
        let c = &self.ctx;
        let Ok(a) = c.alpha(g) else { return false };
        lvl.i.contains(c, &c.a_sub(&a, &c.a_one())) && lvl.gamma.contains(c, &c.eps_defect_alpha(&a))
    }
}

/// Membership in `GU'(P, L)` through its three families of equations,
/// with the generating sets prepared once.
pub struct GuOracle<'a> {
    space: &'a LevelSpace,
    lvl: AugLevel,
    fam1: Vec<DoubleElem>,
    fam2: Vec<DoubleElem>,
    fam3: Vec<HElem>,
    /// Extra test points: random sums of generators.
    sums2: Vec<DoubleElem>,
    sums3: Vec<HElem>,
}

impl<'a> GuOracle<'a> {
    /// `samples` random sums are added to every family; pairwise sums of
    /// generators are always included for the two nonlinear families
    /// when `pairwise` is set.
    pub fn new(space: &'a LevelSpace, lvl: &AugLevel, samples: usize, pairwise: bool, seed: u64) -> Result<GuOracle<'a>> {
        let c = &space.ctx;
        let hat = space.enveloping(lvl)?;
        let mut fam1 = hat.i.generators(c);
        for k in c.ring().zn_basis() {
            fam1.push(c.scalar(k));
        }
        let hyp = c.diag(&c.e_hyp());
        let fam2: Vec<DoubleElem> = hat.i.generators(c).iter().map(|b| c.a_mul(&hyp, b)).filter(|b| !c.a_is_zero(b)).collect();
        let fam3 = hat.gamma.generators(c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sums2 = Vec::new();
        let mut sums3 = Vec::new();
        if pairwise {
            for (x, a) in fam2.iter().enumerate() {
                for b in &fam2[x..] {
                    sums2.push(c.a_add(a, b));
                }
            }
            for (x, a) in fam3.iter().enumerate() {
                for b in &fam3[x..] {
                    sums3.push(c.h_add(a, b));
                }
            }
        }
        for _ in 0..samples {
            if !fam2.is_empty() {
                let mut a = c.a_zero();
                for _ in 0..rng.gen_range(2..=4) {
                    a = c.a_add(&a, &fam2[rng.gen_range(0..fam2.len())]);
                }
                sums2.push(a);
            }
            if !fam3.is_empty() {
                let mut h = c.h_zero();
                for _ in 0..rng.gen_range(2..=4) {
                    h = c.h_add(&h, &fam3[rng.gen_range(0..fam3.len())]);
                }
                sums3.push(h);
            }
        }
        Ok(GuOracle { space, lvl: lvl.clone(), fam1, fam2, fam3, sums2, sums3 })
    }

    /// Number of test points per sign of `g`.
    pub fn size(&self) -> usize {
        self.fam1.len() + self.fam2.len() + self.fam3.len() + self.sums2.len() + self.sums3.len()
    }

    /// `None` if `g` passes, otherwise a description of the first failed equation.
    pub fn violation(&self, g: &Mat) -> Option<String> {
        let c = &self.space.ctx;
        let Some(gi) = g.inverse(c.ring()) else { return Some("g is not invertible".into()) };
        let ag = c.alpha_with_inverse(g, &gi);
        let agi = c.alpha_with_inverse(&gi, g);
        let eps = c.epsilon();
        for (sign, a_s, a_ms) in [("+", &ag, &agi), ("-", &agi, &ag)] {
            let conj = |a: &DoubleElem| c.a_mul(&c.a_mul(a_s, a), a_ms);
            let qb_ms = c.adjoint(&a_ms.q);
            // Family 1 is additive in a, so generators suffice.
            for a in &self.fam1 {
                if !self.lvl.i.contains(c, &c.a_sub(&conj(a), a)) {
                    return Some(format!("family 1, sign {sign}, a = {}", c.show_a(a)));
                }
            }
            for a in self.fam2.iter().chain(&self.sums2) {
                let lhs = c.h_sub(&c.h_act(&eps, &conj(a)), &c.h_act(&eps, &c.a_mul(a, a_ms)));
                if !self.lvl.gamma.contains(c, &lhs) {
                    return Some(format!("family 2, sign {sign}, a = {}", c.show_a(a)));
                }
            }
            for h in self.fam3.iter().chain(&self.sums3) {
                let p = c.pi(h);
                let t = c.h_sub(&c.h_act(&eps, &conj(&p)), &c.h_act(&eps, &c.a_mul(&p, a_ms)));
                let t = c.h_sub(&c.h_add(&t, &c.h_act_adj(h, &a_ms.p, &qb_ms)), h);
                if !self.lvl.gamma.contains(c, &t) {
                    return Some(format!("family 3, sign {sign}, h = {}", c.show_h(h)));
                }
            }
        }
        None
    }

    pub fn member(&self, g: &Mat) -> bool {
        self.violation(g).is_none()
    }
}
