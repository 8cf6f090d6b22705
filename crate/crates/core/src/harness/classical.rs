//! Classical groups inside the unitary framework: identification of `U(P)`
//! with split orthogonal or symplectic groups, the odd orthogonal space with
//! `P_0 = K`, and the overgroup data `(a, b, W)` read off from levels near
//! the level of `EO(2l + 1, K)`.

use num_bigint::BigUint;
use std::collections::BTreeSet;

use crate::endo::{EndoContext, HElem};
use crate::error::{Error, Result};
use crate::forms::{build_standard_space, BlockProfile, ParamChoice, QuadraticSpace, DEFAULT_PARAM_CAP};
use crate::groups::FiniteGroup;
use crate::levels::{hyp_diag_basis, AugLevel, LevelGroups, LevelSpace};
use crate::matrix::Mat;
use crate::ring::{Elem, Ring};

/// Positions `(pos(i), pos(-i))` of the hyperbolic pairs, one per unit of
/// rank. Only rank-one hyperbolic blocks are supported.
pub fn hyperbolic_pairs(profile: &BlockProfile) -> Result<Vec<(usize, usize)>> {
    let l = profile.l as i32;
    let mut out = Vec::new();
    for i in 1..=l {
        if profile.rank(i) != 1 {
            return Err(Error::BadBlock(format!("hyperbolic block {i} has rank {}, expected 1", profile.rank(i))));
        }
        out.push((profile.range(i).start, profile.range(-i).start));
    }
    Ok(out)
}

/// `Q(v) = sum v_i v_{-i}` over the hyperbolic pairs.
pub fn split_quadratic(k: &Ring, pairs: &[(usize, usize)], v: &[Elem]) -> Elem {
    pairs.iter().fold(k.zero(), |acc, &(a, b)| k.add(acc, k.mul(v[a], v[b])))
}

/// The polar form `B(u, v) = sum u_i v_{-i} + u_{-i} v_i`.
pub fn split_polar(k: &Ring, pairs: &[(usize, usize)], u: &[Elem], v: &[Elem]) -> Elem {
    pairs.iter().fold(k.zero(), |acc, &(a, b)| k.add(acc, k.add(k.mul(u[a], v[b]), k.mul(u[b], v[a]))))
}

/// The alternating form `w(u, v) = sum u_i v_{-i} - u_{-i} v_i`.
pub fn split_symplectic(k: &Ring, pairs: &[(usize, usize)], u: &[Elem], v: &[Elem]) -> Elem {
    pairs.iter().fold(k.zero(), |acc, &(a, b)| k.add(acc, k.sub(k.mul(u[a], v[b]), k.mul(u[b], v[a]))))
}

fn all_vectors(k: &Ring, d: usize) -> Vec<Vec<Elem>> {
    let q = k.order();
    (0..q.saturating_pow(d as u32))
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

/// Matrix of `x -> x + c(x) v` where `c` is a linear form given by its values on the basis.
fn rank_one_update(k: &Ring, d: usize, coeff: impl Fn(usize) -> Elem, v: &[Elem]) -> Mat {
    let mut m = Mat::identity(d);
    for col in 0..d {
        let c = coeff(col);
        for (row, &vr) in v.iter().enumerate() {
            m.set(row, col, k.add(m.get(row, col), k.mul(vr, c)));
        }
    }
    m
}

fn basis(d: usize, i: usize, k: &Ring) -> Vec<Elem> {
    let mut e = vec![k.zero(); d];
    e[i] = k.one();
    e
}

/// Reflections `x -> x - B(x, v) Q(v)^{-1} v` in every anisotropic vector
/// with `Q(v)` a unit. These generate the split orthogonal group when `2`
/// is invertible.
pub fn orthogonal_reflections(k: &Ring, pairs: &[(usize, usize)]) -> Result<Vec<Mat>> {
    if !k.is_unit(k.from_int(2)) {
        return Err(Error::InvalidRing("reflections need 2 to be invertible".into()));
    }
    let d = 2 * pairs.len();
    let mut out = Vec::new();
    for v in all_vectors(k, d) {
        let Some(qi) = k.inv(split_quadratic(k, pairs, &v)) else { continue };
        out.push(rank_one_update(k, d, |col| k.neg(k.mul(split_polar(k, pairs, &basis(d, col, k), &v), qi)), &v));
    }
    Ok(out)
}

/// Transvections `x -> x + w(x, v) v` for every vector `v`.
pub fn symplectic_transvections(k: &Ring, pairs: &[(usize, usize)]) -> Vec<Mat> {
    let d = 2 * pairs.len();
    all_vectors(k, d)
        .into_iter()
        .filter(|v| v.iter().any(|e| !e.is_zero()))
        .map(|v| rank_one_update(k, d, |col| split_symplectic(k, pairs, &basis(d, col, k), &v), &v))
        .collect()
}

/// Outcome of comparing an enumerated `U(P)` with the two textbook groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identification {
    pub unitary_order: usize,
    pub orthogonal_order: usize,
    pub symplectic_order: usize,
    pub is_orthogonal: bool,
    pub is_symplectic: bool,
}

impl Identification {
    pub fn verdict(&self) -> &'static str {
        match (self.is_orthogonal, self.is_symplectic) {
            (true, true) => "O = Sp",
            (true, false) => "O",
            (false, true) => "Sp",
            (false, false) => "neither",
        }
    }
}

/// Enumerates `U(P)` for the hyperbolic space of rank `l` over `k` and
/// compares it as a set with the closures of the textbook generators.
pub fn identify(k: &Ring, l: usize, param: &ParamChoice, cap: usize) -> Result<Identification> {
    let prof = BlockProfile::simple(l, 0);
    let space = build_standard_space(k, &prof, &Mat::identity(0), param, DEFAULT_PARAM_CAP)?;
    let pairs = hyperbolic_pairs(&prof)?;
    let d = space.dim();
    let keys: BTreeSet<_> = space.unitary_group_keys(cap)?.into_iter().collect();
    let same = |g: &FiniteGroup| g.order() == keys.len() && g.keys().iter().all(|x| keys.contains(x));
    let o = FiniteGroup::generate(k, d, &orthogonal_reflections(k, &pairs)?, cap)?;
    let sp = FiniteGroup::generate(k, d, &symplectic_transvections(k, &pairs), cap)?;
    Ok(Identification {
        unitary_order: keys.len(),
        orthogonal_order: o.order(),
        symplectic_order: sp.order(),
        is_orthogonal: same(&o),
        is_symplectic: same(&sp),
    })
}

/// The odd orthogonal space: `P_0 = K` with `B(x, y) = xy`, hyperbolic
/// blocks of rank one, and the minimal odd form parameter.
pub fn odd_orthogonal_space(k: &Ring, l: usize) -> Result<QuadraticSpace> {
    build_standard_space(k, &BlockProfile::simple(l, 1), &Mat::identity(1), &ParamChoice::Minimal, DEFAULT_PARAM_CAP)
}

/// Elementwise comparison of `U(P)` for the odd orthogonal space with
/// `{1 (+) h : h in O(Q_hyp)}`, where `O(Q_hyp)` is found by brute force
/// over all matrices of the hyperbolic part.
#[derive(Clone, Debug)]
pub struct OddOrthogonalCheck {
    pub unitary_order: usize,
    pub stabilizer_order: usize,
    /// Elements of `U(P)` that move `e_0`, shown as matrices.
    pub moving_e0: Vec<String>,
    /// Elements of `U(P)` whose hyperbolic part does not preserve `Q_hyp`.
    pub not_orthogonal: Vec<String>,
    /// Elements `1 (+) h` missing from `U(P)`.
    pub missing: Vec<String>,
}

impl OddOrthogonalCheck {
    pub fn holds(&self) -> bool {
        self.unitary_order == self.stabilizer_order && self.moving_e0.is_empty() && self.not_orthogonal.is_empty() && self.missing.is_empty()
    }
}

pub fn check_odd_orthogonal(k: &Ring, l: usize, cap: usize) -> Result<OddOrthogonalCheck> {
    let space = odd_orthogonal_space(k, l)?;
    let prof = space.profile().clone();
    let d = space.dim();
    let p0 = prof.range(0).start;
    let hyp: Vec<usize> = (0..d).filter(|&x| x != p0).collect();
    let h = hyp.len();
    let total = (k.order() as u128).saturating_pow((h * h) as u32);
    if total > 1 << 20 {
        return Err(Error::CapExceeded { what: "matrices of the hyperbolic part".into(), cap: 1 << 20 });
    }
    let full_pairs = hyperbolic_pairs(&prof)?;
    // Pairs re-indexed into the hyperbolic coordinates.
    let local = |x: usize| hyp.iter().position(|&y| y == x).expect("hyperbolic position");
    let pairs: Vec<(usize, usize)> = full_pairs.iter().map(|&(a, b)| (local(a), local(b))).collect();
    let vecs = all_vectors(k, h);

    let keys: BTreeSet<_> = space.unitary_group_keys(cap)?.into_iter().collect();
    let group = FiniteGroup::trivial(k, d, cap)?;
    let codec = group.codec();
    let mut out = OddOrthogonalCheck { unitary_order: keys.len(), stabilizer_order: 0, moving_e0: vec![], not_orthogonal: vec![], missing: vec![] };
    let show = |g: &Mat| format!("{:?}", g.show(k));

    let preserves = |m: &Mat| -> bool {
        vecs.iter().all(|v| split_quadratic(k, &pairs, &m.mul_vec(k, v)) == split_quadratic(k, &pairs, v))
    };

    for &key in &keys {
        let g = codec.decode(key);
        let col0 = g.column(p0);
        if (0..d).any(|r| col0[r] != if r == p0 { k.one() } else { k.zero() }) {
            out.moving_e0.push(show(&g));
            continue;
        }
        let hpart = Mat::from_vec(h, h, hyp.iter().flat_map(|&r| hyp.iter().map(move |&c| (r, c))).map(|(r, c)| g.get(r, c)).collect());
        let row0_zero = hyp.iter().all(|&c| g.get(p0, c).is_zero());
        if !row0_zero || !preserves(&hpart) {
            out.not_orthogonal.push(show(&g));
        }
    }

    let q = k.order();
    for idx in 0..total {
        let mut t = idx;
        let data: Vec<Elem> = (0..h * h)
            .map(|_| {
                let e = Elem((t % q as u128) as u8);
                t /= q as u128;
                e
            })
            .collect();
        let m = Mat::from_vec(h, h, data);
        if !m.is_invertible(k) || !preserves(&m) {
            continue;
        }
        out.stabilizer_order += 1;
        let mut g = Mat::identity(d);
        for (a, &r) in hyp.iter().enumerate() {
            for (b, &c) in hyp.iter().enumerate() {
                g.set(r, c, m.get(a, b));
            }
        }
        if !keys.contains(&codec.encode(&g)) && out.missing.len() < 5 {
            out.missing.push(show(&g));
        }
    }
    Ok(out)
}

/// Generators of `EO(2l + 1, K)` for the odd orthogonal space: the
/// elementary unitary generators together with the Eichler elements
/// `1 + E_{0,-i} - 2 E_{i,0} - E_{i,-i}`.
pub fn eo_odd_generators(space: &LevelSpace) -> Result<Vec<Mat>> {
    let c = &space.ctx;
    let prof = c.profile();
    let k = c.ring();
    let d = c.dim();
    if prof.rank(0) != 1 {
        return Err(Error::BadBlock("the odd orthogonal space needs P_0 of rank one".into()));
    }
    let pos = |i: i32| prof.range(i).start;
    let mut gens = LevelGroups::new(space, usize::MAX).eu_gens()?;
    for i in c.hyperbolic() {
        let mut g = Mat::identity(d);
        g.set(pos(0), pos(-i), k.one());
        g.set(pos(i), pos(0), k.from_int(-2));
        g.set(pos(i), pos(-i), k.from_int(-1));
        gens.push(g);
    }
    Ok(gens)
}

/// `gamma(x) = (x, -conj(x) x, 2 conj(x))` for a row `x` of `e_0 C (1 - e_0)`.
pub fn gamma_of_row(c: &EndoContext, x: &Mat) -> HElem {
    let ax = c.adjoint(x);
    HElem { x: x.clone(), y: c.neg(&c.mul(&ax, x)), z: c.add(&ax, &ax) }
}

/// Rows `x` of `e_0 C (1 - e_0)` given by their hyperbolic entries.
pub fn e0_rows(c: &EndoContext) -> Vec<Mat> {
    let prof = c.profile();
    let d = c.dim();
    let p0 = prof.range(0).start;
    let cols: Vec<usize> = (0..d).filter(|&x| prof.block_of(x) != 0).collect();
    all_vectors(c.ring(), cols.len())
        .into_iter()
        .map(|v| {
            let mut m = c.zero();
            for (&col, e) in cols.iter().zip(v) {
                m.set(p0, col, e);
            }
            m
        })
        .collect()
}

/// `L_1`, generated by `L_0` and `gamma(x)` for the unit rows `x`.
pub fn l1_level(space: &LevelSpace) -> Result<AugLevel> {
    let c = &space.ctx;
    let prof = c.profile();
    let d = c.dim();
    let mut gs = space.lambda.gens.clone();
    for r in prof.range(0) {
        for col in (0..d).filter(|&x| prof.block_of(x) != 0) {
            gs.push(gamma_of_row(c, &Mat::unit(d, d, r, col, c.ring().one())));
        }
    }
    space.generate(&hyp_diag_basis(c), &gs)
}

/// Membership bitmap of the ideal generated by `gens`.
pub fn ideal(k: &Ring, gens: impl IntoIterator<Item = Elem>) -> Vec<bool> {
    let mut inside = vec![false; k.order()];
    inside[k.zero().index()] = true;
    let mut queue = vec![k.zero()];
    let mut seeds: Vec<Elem> = Vec::new();
    for g in gens {
        for r in k.elements() {
            seeds.push(k.mul(g, r));
        }
    }
    while let Some(x) = queue.pop() {
        for &s in &seeds {
            let y = k.add(x, s);
            if !inside[y.index()] {
                inside[y.index()] = true;
                queue.push(y);
            }
        }
    }
    inside
}

pub fn show_ideal(k: &Ring, i: &[bool]) -> String {
    let els: Vec<String> = k.elements().filter(|e| i[e.index()]).map(|e| k.show(e)).collect();
    format!("{{{}}}", els.join(", "))
}

fn ideal_le(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

/// Coordinates `(x, y, z)` of an element of `H . e_1`.
fn e1_coords(c: &EndoContext, h: &HElem) -> (Elem, Elem, Elem) {
    let p = c.profile();
    let (p0, p1, m1) = (p.range(0).start, p.range(1).start, p.range(-1).start);
    (h.x.get(p0, p1), h.y.get(m1, p1), h.z.get(m1, p0))
}

/// `(a, b)` for a level between `L_0` and `L_1`: `a` from the first
/// coordinates of `e_0 I (1 - e_0)` and `b` from the `x` coordinates of
/// `Gamma . e_1`.
pub fn between_data(space: &LevelSpace, lvl: &AugLevel) -> (Vec<bool>, Vec<bool>) {
    let c = &space.ctx;
    let k = c.ring();
    let p0 = c.profile().range(0).start;
    let mut a_gens = Vec::new();
    for j in c.hyperbolic() {
        for x in lvl.i.block_generators(c, 0, j) {
            for col in c.profile().range(j) {
                a_gens.push(x.p.get(p0, col));
            }
        }
    }
    let b_gens: Vec<Elem> = lvl.gamma.component(c, 1).generators(c).iter().map(|h| e1_coords(c, h).0).collect();
    (ideal(k, a_gens), ideal(k, b_gens))
}

/// Overgroup data of a level containing `L_1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AboveData {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    /// Pairs `(y, z)` with `(0, y, z)` in `Gamma . e_1`.
    pub w: BTreeSet<(u8, u8)>,
}

/// `a` from the second coordinates of `(1 - e_0) I (1 - e_0)` beyond the
/// diagonal, `b` from the second coordinates of `e_0 I (1 - e_0)` with
/// vanishing first coordinate, and `W` as the part of `Gamma . e_1` with
/// `x = 0`.
pub fn above_data(space: &LevelSpace, lvl: &AugLevel) -> Result<AboveData> {
    let c = &space.ctx;
    let k = c.ring();
    let prof = c.profile();
    let (p0, p1) = (prof.range(0).start, prof.range(1).start);
    let mut a_gens = Vec::new();
    for x in lvl.i.block_elements(c, 1, 1) {
        if x.p.is_zero() {
            a_gens.push(x.q.get(p1, p1));
        }
    }
    let mut b_gens = Vec::new();
    for x in lvl.i.block_elements(c, 0, 1) {
        if x.p.is_zero() {
            b_gens.push(x.q.get(p0, p1));
        }
    }
    let comp = lvl.gamma.component(c, 1);
    if comp.order() > BigUint::from(1u32 << 20) {
        return Err(Error::CarrierTooLarge(format!("Gamma . e_1 has {} elements", comp.order())));
    }
    let mut w = BTreeSet::new();
    for h in comp.elements(c) {
        let (x, y, z) = e1_coords(c, &h);
        if x.is_zero() {
            w.insert((y.0, z.0));
        }
    }
    Ok(AboveData { a: ideal(k, a_gens), b: ideal(k, b_gens), w })
}

/// The constraints on `(a, b, W)`, each as `(name, holds, witness)`.
pub fn above_constraints(k: &Ring, data: &AboveData) -> Vec<(&'static str, bool, String)> {
    let (a, b, w) = (&data.a, &data.b, &data.w);
    let two_a = ideal(k, k.elements().filter(|e| a[e.index()]).map(|e| k.add(e, e)));
    let mut out = Vec::new();
    out.push(("2a <= b", ideal_le(&two_a, b), format!("2a = {}, b = {}", show_ideal(k, &two_a), show_ideal(k, b))));
    out.push(("b <= a", ideal_le(b, a), format!("b = {}, a = {}", show_ideal(k, b), show_ideal(k, a))));
    let wit = |bad: Option<String>| bad.unwrap_or_default();
    let bad = k.elements().find(|y| a[y.index()] && !w.contains(&(y.0, 0))).map(|y| format!("(0, {}, 0) missing", k.show(y)));
    out.push(("0 x a x 0 <= W", bad.is_none(), wit(bad)));
    let bad = w
        .iter()
        .find(|&&(y, z)| !a[k.add(Elem(y), Elem(y)).index()] || !b[z as usize])
        .map(|&(y, z)| format!("(0, {}, {}) in W", k.show(Elem(y)), k.show(Elem(z))));
    out.push(("W <= {(0, y, z) : 2y in a, z in b}", bad.is_none(), wit(bad)));
    let bad = k.elements().find(|z| b[z.index()] && !w.iter().any(|&(_, wz)| wz == z.0)).map(|z| format!("no y for z = {}", k.show(z)));
    out.push(("every z in b has some (0, y, z) in W", bad.is_none(), wit(bad)));
    let mut bad = None;
    'outer: for &(y, z) in w {
        for s in k.elements() {
            let img = (k.mul(k.mul(s, s), Elem(y)).0, k.mul(s, Elem(z)).0);
            if !w.contains(&img) {
                bad = Some(format!("(0, {}, {}) times {}", k.show(Elem(y)), k.show(Elem(z)), k.show(s)));
                break 'outer;
            }
            if a[s.index()] && !w.contains(&(0, k.mul(s, Elem(z)).0)) {
                bad = Some(format!("(0, 0, {} {}) missing", k.show(s), k.show(Elem(z))));
                break 'outer;
            }
        }
    }
    out.push(("W closed under (0, k^2 y, k z) and (0, 0, a z)", bad.is_none(), wit(bad)));
    out
}

/// Adds a generated level unless it is already present. Seeds whose
/// closure would violate the `e_0` condition generate no level; the same
/// block data is reached through `Gamma` instead.
fn push_new(space: &LevelSpace, lvl: Result<AugLevel>, found: &mut Vec<AugLevel>) -> Result<()> {
    match lvl {
        Ok(lvl) => {
            if !found.iter().any(|m| space.same_class(m, &lvl)) {
                found.push(lvl);
            }
            Ok(())
        }
        Err(Error::NotALevel(_)) => Ok(()),
        Err(e) => Err(e),
    }
}

/// Closes a family of levels under pairwise joins, deduplicating by equality.
fn join_closure(space: &LevelSpace, mut levels: Vec<AugLevel>, cap: usize) -> Result<Vec<AugLevel>> {
    let c = &space.ctx;
    let mut x = 0;
    while x < levels.len() {
        for y in 0..x {
            let mut si = levels[x].i.generators(c);
            si.extend(levels[y].i.generators(c));
            let mut sg = levels[x].gamma.generators(c);
            sg.extend(levels[y].gamma.generators(c));
            let j = space.generate(&si, &sg)?;
            if !levels.iter().any(|m| space.same_class(m, &j)) {
                levels.push(j);
                if levels.len() > cap {
                    return Err(Error::CapExceeded { what: "levels in the join closure".into(), cap });
                }
            }
        }
        x += 1;
    }
    Ok(levels)
}

/// Every level between `lo` and `hi` reachable as a join of levels
/// generated by `lo` and one block element of `hi`.
pub fn levels_between(space: &LevelSpace, lo: &AugLevel, hi: &AugLevel, cap: usize) -> Result<Vec<AugLevel>> {
    let c = &space.ctx;
    let lo_i = lo.i.generators(c);
    let lo_g = lo.gamma.generators(c);
    let mut found: Vec<AugLevel> = vec![lo.clone()];
    let push = |lvl, found: &mut Vec<AugLevel>| push_new(space, lvl, found);
    let l = space.l();
    for i in -l..=l {
        for j in -l..=l {
            if i != 0 && j != 0 {
                continue;
            }
            for a in hi.i.block_elements(c, i, j) {
                if lo.i.contains(c, &a) {
                    continue;
                }
                let mut s = lo_i.clone();
                s.push(a);
                push(space.generate(&s, &lo_g), &mut found)?;
            }
        }
    }
    for i in c.profile().blocks() {
        let comp = hi.gamma.component(c, i);
        if comp.order() > BigUint::from(1u32 << 16) {
            return Err(Error::CarrierTooLarge(format!("Gamma . e_{i} has {} elements", comp.order())));
        }
        for h in comp.elements(c) {
            if lo.gamma.contains(c, &h) {
                continue;
            }
            let mut g = lo_g.clone();
            g.push(h);
            push(space.generate(&lo_i, &g), &mut found)?;
        }
    }
    join_closure(space, found, cap)
}

/// Levels obtained from `base` by adding one simple element: matrix units
/// in the second coordinate of `A`, and `(0, y, 0)`, `(0, 0, z)` in `H . e_1`;
/// closed under joins.
pub fn levels_above(space: &LevelSpace, base: &AugLevel, cap: usize) -> Result<Vec<AugLevel>> {
    let c = &space.ctx;
    let k = c.ring();
    let d = c.dim();
    let prof = c.profile();
    let (p0, p1, m1) = (prof.range(0).start, prof.range(1).start, prof.range(-1).start);
    let bi = base.i.generators(c);
    let bg = base.gamma.generators(c);
    let mut found = vec![base.clone()];
    let nonzero: Vec<Elem> = k.elements().filter(|e| !e.is_zero()).collect();
    for &s in &nonzero {
        let z = c.zero();
        let a_seeds = [
            crate::endo::DoubleElem { p: z.clone(), q: Mat::unit(d, d, p1, p1, s) },
            crate::endo::DoubleElem { p: z.clone(), q: Mat::unit(d, d, p0, p1, s) },
        ];
        for a in a_seeds {
            let mut si = bi.clone();
            si.push(a);
            push_new(space, space.generate(&si, &bg), &mut found)?;
        }
        let h_seeds = [
            HElem { x: z.clone(), y: Mat::unit(d, d, m1, p1, s), z: z.clone() },
            HElem { x: z.clone(), y: z.clone(), z: Mat::unit(d, d, m1, p0, s) },
        ];
        for h in h_seeds {
            let mut sg = bg.clone();
            sg.push(h);
            push_new(space, space.generate(&bi, &sg), &mut found)?;
        }
    }
    join_closure(space, found, cap)
}

/// Number of ideals of `k`.
pub fn ideal_count(k: &Ring) -> usize {
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    for x in k.elements() {
        for y in k.elements() {
            seen.insert(ideal(k, [x, y]));
        }
    }
    seen.len()
}
