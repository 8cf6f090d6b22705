//! Heisenberg groups of rings, quadratic structures, quadratic rings and the
//! quadratic algebra binding, with exhaustive axiom verifiers.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::ring::{Elem, Ring};

/// Carriers up to this size are verified exhaustively.
pub const EXHAUSTIVE_CARRIER: usize = 1 << 16;
/// Random trials for larger carriers.
pub const SAMPLED_TRIALS: usize = 10_000;

/// An element `(x, y)` of `Heis(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisElem {
    pub x: Elem,
    pub y: Elem,
}

impl HeisElem {
    pub const ZERO: HeisElem = HeisElem { x: Elem::ZERO, y: Elem::ZERO };

    pub fn new(x: Elem, y: Elem) -> HeisElem {
        HeisElem { x, y }
    }
}

/// `(x, y) + (x', y') = (x + x', y + y' - conj(x) x')`.
pub fn heis_add(k: &Ring, h: HeisElem, h2: HeisElem) -> HeisElem {
    HeisElem { x: k.add(h.x, h2.x), y: k.sub(k.add(h.y, h2.y), k.mul(k.conj(h.x), h2.x)) }
}

pub fn heis_neg(k: &Ring, h: HeisElem) -> HeisElem {
    HeisElem { x: k.neg(h.x), y: k.sub(k.neg(h.y), k.mul(k.conj(h.x), h.x)) }
}

/// `(x, y) * (x', y') = (x x', conj(x) y' x + conj(x') y x' + y y' + conj(y) y')`.
pub fn heis_mul(k: &Ring, h: HeisElem, h2: HeisElem) -> HeisElem {
    let (x, y, x2, y2) = (h.x, h.y, h2.x, h2.y);
    let t1 = k.mul(k.mul(k.conj(x), y2), x);
    let t2 = k.mul(k.mul(k.conj(x2), y), x2);
    let t3 = k.mul(y, y2);
    let t4 = k.mul(k.conj(y), y2);
    HeisElem { x: k.mul(x, x2), y: k.add(k.add(t1, t2), k.add(t3, t4)) }
}

/// `(x, y) . k = (x k, conj(k) y k)`.
pub fn heis_act(k: &Ring, h: HeisElem, s: Elem) -> HeisElem {
    HeisElem { x: k.mul(h.x, s), y: k.mul(k.mul(k.conj(s), h.y), s) }
}

/// `tr(x, y) = conj(x) x + y + conj(y)`.
pub fn heis_tr(k: &Ring, h: HeisElem) -> Elem {
    k.add(k.mul(k.conj(h.x), h.x), k.add(h.y, k.conj(h.y)))
}

pub fn heis_phi(s: Elem) -> HeisElem {
    HeisElem { x: Elem::ZERO, y: s }
}

/// A quadratic structure `(A, phi, tr)` on a commutative ring with involution.
pub trait QuadStructure {
    type A: Clone + Eq + Hash + Debug;

    fn ring(&self) -> &Ring;
    /// All carrier elements, each exactly once.
    fn elements(&self) -> Vec<Self::A>;
    fn zero(&self) -> Self::A;
    fn add(&self, a: &Self::A, b: &Self::A) -> Self::A;
    fn neg(&self, a: &Self::A) -> Self::A;
    fn phi(&self, r: Elem) -> Self::A;
    fn tr(&self, a: &Self::A) -> Elem;
    /// Right action of the multiplicative monoid.
    fn act(&self, a: &Self::A, r: Elem) -> Self::A;

    fn show(&self, a: &Self::A) -> String {
        format!("{a:?}")
    }
}

/// A quadratic structure whose carrier is also a commutative ring.
pub trait QuadRing: QuadStructure {
    fn mul(&self, a: &Self::A, b: &Self::A) -> Self::A;
    fn one(&self) -> Self::A;
}

/// Seeded defects used to show that the verifiers can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StructureMutation {
    #[default]
    None,
    /// `tr` replaced by the zero map.
    ZeroTrace,
    /// Carrier multiplication (and its unit) replaced by zero.
    ZeroMul,
}

fn canonical_table(k: &Ring, subgroup: &HashSet<Elem>) -> Vec<Elem> {
    k.elements().map(|y| subgroup.iter().map(|&c| k.add(y, c)).min().expect("subgroup contains 0")).collect()
}

/// `A_K = Heis(K)^ab = Heis(K) / {(0, k - conj(k))}`, with the least
/// member of each coset as its representative.
#[derive(Clone, Debug)]
pub struct UniversalStructure {
    ring: Ring,
    canon: Vec<Elem>,
    mutation: StructureMutation,
}

impl UniversalStructure {
    pub fn new(ring: &Ring) -> UniversalStructure {
        UniversalStructure::with_mutation(ring, StructureMutation::None)
    }

    pub fn with_mutation(ring: &Ring, mutation: StructureMutation) -> UniversalStructure {
        let comm: HashSet<Elem> = ring.elements().map(|k| ring.sub(k, ring.conj(k))).collect();
        UniversalStructure { ring: ring.clone(), canon: canonical_table(ring, &comm), mutation }
    }

    /// Class of a Heisenberg element.
    pub fn class(&self, h: HeisElem) -> HeisElem {
        HeisElem { x: h.x, y: self.canon[h.y.index()] }
    }

    pub fn order(&self) -> usize {
        self.elements().len()
    }
}

impl QuadStructure for UniversalStructure {
    type A = HeisElem;

    fn ring(&self) -> &Ring {
        &self.ring
    }

    fn elements(&self) -> Vec<HeisElem> {
        let mut ys: Vec<Elem> = self.canon.clone();
        ys.sort();
        ys.dedup();
        let mut out = Vec::new();
        for x in self.ring.elements() {
            for &y in &ys {
                out.push(HeisElem { x, y });
            }
        }
        out
    }

    fn zero(&self) -> HeisElem {
        HeisElem::ZERO
    }

    fn add(&self, a: &HeisElem, b: &HeisElem) -> HeisElem {
        self.class(heis_add(&self.ring, *a, *b))
    }

    fn neg(&self, a: &HeisElem) -> HeisElem {
        self.class(heis_neg(&self.ring, *a))
    }

    fn phi(&self, r: Elem) -> HeisElem {
        self.class(heis_phi(r))
    }

    fn tr(&self, a: &HeisElem) -> Elem {
        match self.mutation {
            StructureMutation::ZeroTrace => Elem::ZERO,
            _ => heis_tr(&self.ring, *a),
        }
    }

    fn act(&self, a: &HeisElem, r: Elem) -> HeisElem {
        self.class(heis_act(&self.ring, *a, r))
    }

    fn show(&self, a: &HeisElem) -> String {
        format!("[({}, {})]", self.ring.show(a.x), self.ring.show(a.y))
    }
}

impl QuadRing for UniversalStructure {
    fn mul(&self, a: &HeisElem, b: &HeisElem) -> HeisElem {
        match self.mutation {
            StructureMutation::ZeroMul => HeisElem::ZERO,
            _ => self.class(heis_mul(&self.ring, *a, *b)),
        }
    }

    fn one(&self) -> HeisElem {
        match self.mutation {
            StructureMutation::ZeroMul => HeisElem::ZERO,
            _ => self.class(HeisElem { x: Elem::ONE, y: Elem::ZERO }),
        }
    }
}

/// The Bak-style structure `K / Lambda_min` with `tr(r) = r + conj(r) lambda`.
#[derive(Clone, Debug)]
pub struct BakStructure {
    ring: Ring,
    canon: Vec<Elem>,
    mutation: StructureMutation,
}

impl BakStructure {
    pub fn new(ring: &Ring) -> BakStructure {
        BakStructure::with_mutation(ring, StructureMutation::None)
    }

    pub fn with_mutation(ring: &Ring, mutation: StructureMutation) -> BakStructure {
        let l = ring.lambda();
        let lmin: HashSet<Elem> = ring.elements().map(|r| ring.sub(r, ring.mul(ring.conj(r), l))).collect();
        BakStructure { ring: ring.clone(), canon: canonical_table(ring, &lmin), mutation }
    }
}

impl QuadStructure for BakStructure {
    type A = Elem;

    fn ring(&self) -> &Ring {
        &self.ring
    }

    fn elements(&self) -> Vec<Elem> {
        let mut v = self.canon.clone();
        v.sort();
        v.dedup();
        v
    }

    fn zero(&self) -> Elem {
        Elem::ZERO
    }

    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.canon[self.ring.add(*a, *b).index()]
    }

    fn neg(&self, a: &Elem) -> Elem {
        self.canon[self.ring.neg(*a).index()]
    }

    fn phi(&self, r: Elem) -> Elem {
        self.canon[r.index()]
    }

    fn tr(&self, a: &Elem) -> Elem {
        match self.mutation {
            StructureMutation::ZeroTrace => Elem::ZERO,
            _ => self.ring.add(*a, self.ring.mul(self.ring.conj(*a), self.ring.lambda())),
        }
    }

    fn act(&self, a: &Elem, r: Elem) -> Elem {
        let k = &self.ring;
        self.canon[k.mul(k.mul(k.conj(r), *a), r).index()]
    }

    fn show(&self, a: &Elem) -> String {
        format!("[{}]", self.ring.show(*a))
    }
}

/// The zero structure `A = 0`. It is a quadratic structure only when
/// `r + conj(r) lambda` vanishes identically, as over `F_2` with `lambda = 1`.
#[derive(Clone, Debug)]
pub struct ZeroStructure {
    ring: Ring,
}

impl ZeroStructure {
    pub fn new(ring: &Ring) -> ZeroStructure {
        ZeroStructure { ring: ring.clone() }
    }
}

impl QuadStructure for ZeroStructure {
    type A = ();

    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn elements(&self) -> Vec<()> {
        vec![()]
    }
    fn zero(&self) {}
    fn add(&self, _: &(), _: &()) {}
    fn neg(&self, _: &()) {}
    fn phi(&self, _: Elem) {}
    fn tr(&self, _: &()) -> Elem {
        Elem::ZERO
    }
    fn act(&self, _: &(), _: Elem) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ActionMutation {
    #[default]
    None,
    /// `a_K . a_R := a_R`.
    IgnoreAction,
}

/// The unique left `A_K`-module structure on a quadratic structure over `K`,
/// `[(x, y)] . a = a . x + phi(y tr(a))`.
pub struct AlgebraBinding<'a, S: QuadStructure> {
    pub base: &'a UniversalStructure,
    pub target: &'a S,
    pub mutation: ActionMutation,
}

impl<'a, S: QuadStructure> AlgebraBinding<'a, S> {
    pub fn new(base: &'a UniversalStructure, target: &'a S) -> Self {
        AlgebraBinding { base, target, mutation: ActionMutation::None }
    }

    pub fn with_mutation(mut self, m: ActionMutation) -> Self {
        self.mutation = m;
        self
    }

    pub fn left_act(&self, ak: &HeisElem, ar: &S::A) -> S::A {
        match self.mutation {
            ActionMutation::IgnoreAction => ar.clone(),
            ActionMutation::None => {
                let r = self.target;
                let k = r.ring();
                r.add(&r.act(ar, ak.x), &r.phi(k.mul(ak.y, r.tr(ar))))
            }
        }
    }
}

/// Calls `f` on index tuples: every tuple when the product of `sizes` fits
/// the exhaustive budget (or `force_exhaustive`), otherwise `SAMPLED_TRIALS`
/// seeded random tuples. Returns whether the run was exhaustive.
pub(crate) fn visit_tuples(sizes: &[usize], exhaustive: bool, seed: u64, mut f: impl FnMut(&[usize])) -> bool {
    if sizes.contains(&0) {
        return true;
    }
    if exhaustive {
        let mut idx = vec![0usize; sizes.len()];
        loop {
            f(&idx);
            let mut p = 0;
            loop {
                if p == sizes.len() {
                    return true;
                }
                idx[p] += 1;
                if idx[p] < sizes[p] {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = vec![0usize; sizes.len()];
        for _ in 0..SAMPLED_TRIALS {
            for (slot, &s) in idx.iter_mut().zip(sizes) {
                *slot = rng.gen_range(0..s);
            }
            f(&idx);
        }
        false
    }
}

fn mode_note(exhaustive: bool) -> &'static str {
    if exhaustive {
        "exhaustive"
    } else {
        "sampled"
    }
}

/// QS1 to QS4, the derived identity `phi(tr(a)) = a + a.(-1)`, and the module
/// axioms the definition presupposes.
pub fn verify_qs<S: QuadStructure>(s: &S, seed: u64) -> Report {
    let k = s.ring();
    let lam = k.lambda();
    let a_all = s.elements();
    let r_all: Vec<Elem> = k.elements().collect();
    let ex = a_all.len() <= EXHAUSTIVE_CARRIER;
    let na = a_all.len();
    let nr = r_all.len();
    let mut rep = Report::new("QS");
    let sh = |a: &S::A| s.show(a);
    let minus_one = k.neg(Elem::ONE);

    let mut c = Check::new("QS1");
    for &r in &r_all {
        let rb = k.mul(k.conj(r), lam);
        c.case(s.phi(r) == s.phi(rb), || format!("r = {}", k.show(r)));
    }
    rep.push(c);

    let mut c = Check::new("QS2");
    for &r in &r_all {
        let want = k.add(r, k.mul(k.conj(r), lam));
        let got = s.tr(&s.phi(r));
        c.case(got == want, || format!("r = {}: tr(phi(r)) = {} but r + conj(r) lambda = {}", k.show(r), k.show(got), k.show(want)));
    }
    rep.push(c);

    let mut c = Check::new("QS3");
    visit_tuples(&[na], ex, seed, |i| {
        let t = s.tr(&a_all[i[0]]);
        c.case(t == k.mul(k.conj(t), lam), || format!("a = {}", sh(&a_all[i[0]])));
    });
    rep.push(c.with_note(mode_note(ex)));

    let mut c = Check::new("QS4");
    visit_tuples(&[na, nr, nr], ex, seed ^ 4, |i| {
        let (a, r, r2) = (&a_all[i[0]], r_all[i[1]], r_all[i[2]]);
        let lhs = s.act(a, k.add(r, r2));
        let mid = s.phi(k.mul(k.mul(k.conj(r2), s.tr(a)), r));
        let rhs = s.add(&s.add(&s.act(a, r), &mid), &s.act(a, r2));
        c.case(lhs == rhs, || format!("a = {}, r = {}, r' = {}", sh(a), k.show(r), k.show(r2)));
    });
    rep.push(c.with_note(mode_note(ex)));

    let mut c = Check::new("phi(tr(a)) = a + a.(-1)");
    visit_tuples(&[na], ex, seed, |i| {
        let a = &a_all[i[0]];
        c.case(s.phi(s.tr(a)) == s.add(a, &s.act(a, minus_one)), || format!("a = {}", sh(a)));
    });
    rep.push(c);

    let mut c = Check::new("carrier is an abelian group");
    visit_tuples(&[na, na], ex, seed ^ 7, |i| {
        let (a, b) = (&a_all[i[0]], &a_all[i[1]]);
        let ok = s.add(a, b) == s.add(b, a) && s.add(a, &s.zero()) == *a && s.add(a, &s.neg(a)) == s.zero();
        c.case(ok, || format!("a = {}, b = {}", sh(a), sh(b)));
    });
    rep.push(c);

    let mut c = Check::new("phi and tr are additive");
    for &r in &r_all {
        for &r2 in &r_all {
            c.case(s.phi(k.add(r, r2)) == s.add(&s.phi(r), &s.phi(r2)), || format!("phi at {}, {}", k.show(r), k.show(r2)));
        }
    }
    visit_tuples(&[na, na], ex, seed ^ 11, |i| {
        let (a, b) = (&a_all[i[0]], &a_all[i[1]]);
        c.case(s.tr(&s.add(a, b)) == k.add(s.tr(a), s.tr(b)), || format!("tr at {}, {}", sh(a), sh(b)));
    });
    rep.push(c);

    let mut c = Check::new("phi and tr are equivariant");
    for &r in &r_all {
        for &t in &r_all {
            let ok = s.phi(k.mul(k.mul(k.conj(t), r), t)) == s.act(&s.phi(r), t);
            c.case(ok, || format!("phi at r = {}, k = {}", k.show(r), k.show(t)));
        }
    }
    visit_tuples(&[na, nr], ex, seed ^ 13, |i| {
        let (a, t) = (&a_all[i[0]], r_all[i[1]]);
        let ok = s.tr(&s.act(a, t)) == k.mul(k.mul(k.conj(t), s.tr(a)), t);
        c.case(ok, || format!("tr at a = {}, k = {}", sh(a), k.show(t)));
    });
    rep.push(c);

    let mut c = Check::new("monoid action");
    visit_tuples(&[na, nr, nr], ex, seed ^ 17, |i| {
        let (a, t, u) = (&a_all[i[0]], r_all[i[1]], r_all[i[2]]);
        let ok = s.act(a, Elem::ONE) == *a && s.act(&s.act(a, t), u) == s.act(a, k.mul(t, u));
        c.case(ok, || format!("a = {}, k = {}, k' = {}", sh(a), k.show(t), k.show(u)));
    });
    visit_tuples(&[na, na, nr], ex, seed ^ 19, |i| {
        let (a, b, t) = (&a_all[i[0]], &a_all[i[1]], r_all[i[2]]);
        let ok = s.act(&s.add(a, b), t) == s.add(&s.act(a, t), &s.act(b, t));
        c.case(ok, || format!("additivity at a = {}, b = {}, k = {}", sh(a), sh(b), k.show(t)));
    });
    rep.push(c);
    rep
}

/// QR1 to QR4 together with the commutative ring axioms of the carrier.
pub fn verify_qr<Q: QuadRing>(q: &Q, seed: u64) -> Report {
    let k = q.ring();
    let a_all = q.elements();
    let r_all: Vec<Elem> = k.elements().collect();
    let na = a_all.len();
    let nr = r_all.len();
    let ex = na <= EXHAUSTIVE_CARRIER;
    let sh = |a: &Q::A| q.show(a);
    let mut rep = Report::new("QR");

    let mut c = Check::new("QR1");
    visit_tuples(&[na, na, nr], ex, seed, |i| {
        let (a, b, t) = (&a_all[i[0]], &a_all[i[1]], r_all[i[2]]);
        c.case(q.mul(a, &q.act(b, t)) == q.act(&q.mul(a, b), t), || format!("a = {}, a' = {}, k = {}", sh(a), sh(b), k.show(t)));
    });
    rep.push(c);

    let mut c = Check::new("QR2");
    visit_tuples(&[na, nr], ex, seed ^ 2, |i| {
        let (a, t) = (&a_all[i[0]], r_all[i[1]]);
        c.case(q.mul(a, &q.phi(t)) == q.phi(k.mul(q.tr(a), t)), || format!("a = {}, k = {}", sh(a), k.show(t)));
    });
    rep.push(c);

    let one = q.one();
    rep.push(Check::single("QR3", q.tr(&one) == Elem::ONE, || format!("tr(1) = {}", k.show(q.tr(&one)))));

    let mut c = Check::new("QR4");
    visit_tuples(&[na, na], ex, seed ^ 4, |i| {
        let (a, b) = (&a_all[i[0]], &a_all[i[1]]);
        c.case(q.tr(&q.mul(a, b)) == k.mul(q.tr(a), q.tr(b)), || format!("a = {}, a' = {}", sh(a), sh(b)));
    });
    rep.push(c);

    let mut c = Check::new("carrier is a commutative ring");
    visit_tuples(&[na, na, na], ex, seed ^ 5, |i| {
        let (a, b, d) = (&a_all[i[0]], &a_all[i[1]], &a_all[i[2]]);
        let ok = q.mul(a, b) == q.mul(b, a)
            && q.mul(&q.mul(a, b), d) == q.mul(a, &q.mul(b, d))
            && q.mul(a, &q.add(b, d)) == q.add(&q.mul(a, b), &q.mul(a, d))
            && q.mul(&one, a) == *a;
        c.case(ok, || format!("a = {}, b = {}, c = {}", sh(a), sh(b), sh(d)));
    });
    rep.push(c);
    rep
}

/// QA1 to QA5 together with the module axioms of the left action.
pub fn verify_qa<S: QuadStructure>(b: &AlgebraBinding<'_, S>, seed: u64) -> Report {
    let kq = b.base;
    let r = b.target;
    let k = r.ring();
    let ak_all = kq.elements();
    let ar_all = r.elements();
    let r_all: Vec<Elem> = k.elements().collect();
    let (nk, nar, nr) = (ak_all.len(), ar_all.len(), r_all.len());
    let ex = nk * nar <= EXHAUSTIVE_CARRIER;
    let shk = |a: &HeisElem| kq.show(a);
    let shr = |a: &S::A| r.show(a);
    let mut rep = Report::new("QA");

    let mut c = Check::new("QA1");
    visit_tuples(&[nk, nar, nr], ex, seed, |i| {
        let (ak, ar, t) = (&ak_all[i[0]], &ar_all[i[1]], r_all[i[2]]);
        let ok = b.left_act(ak, &r.act(ar, t)) == r.act(&b.left_act(ak, ar), t);
        c.case(ok, || format!("a_K = {}, a_R = {}, r = {}", shk(ak), shr(ar), k.show(t)));
    });
    rep.push(c);

    let mut c = Check::new("QA2");
    visit_tuples(&[nk, nar, nr], ex, seed ^ 2, |i| {
        let (ak, ar, t) = (&ak_all[i[0]], &ar_all[i[1]], r_all[i[2]]);
        let ok = b.left_act(&kq.act(ak, t), ar) == r.act(&b.left_act(ak, ar), t);
        c.case(ok, || format!("a_K = {}, a_R = {}, k = {}", shk(ak), shr(ar), k.show(t)));
    });
    rep.push(c);

    let mut c = Check::new("QA3");
    visit_tuples(&[nk, nr], ex, seed ^ 3, |i| {
        let (ak, t) = (&ak_all[i[0]], r_all[i[1]]);
        let ok = b.left_act(ak, &r.phi(t)) == r.phi(k.mul(kq.tr(ak), t));
        c.case(ok, || format!("a_K = {}, r = {}", shk(ak), k.show(t)));
    });
    rep.push(c);

    let mut c = Check::new("QA4");
    visit_tuples(&[nr, nar], ex, seed ^ 4, |i| {
        let (t, ar) = (r_all[i[0]], &ar_all[i[1]]);
        let ok = b.left_act(&kq.phi(t), ar) == r.phi(k.mul(t, r.tr(ar)));
        c.case(ok, || format!("k = {}, a_R = {}", k.show(t), shr(ar)));
    });
    rep.push(c);

    let mut c = Check::new("QA5");
    visit_tuples(&[nk, nar], ex, seed ^ 5, |i| {
        let (ak, ar) = (&ak_all[i[0]], &ar_all[i[1]]);
        let lhs = r.tr(&b.left_act(ak, ar));
        let rhs = k.mul(kq.tr(ak), r.tr(ar));
        c.case(lhs == rhs, || {
            format!("a_K = {}, a_R = {}: tr(a_K a_R) = {} but tr(a_K) tr(a_R) = {}", shk(ak), shr(ar), k.show(lhs), k.show(rhs))
        });
    });
    rep.push(c);

    let mut c = Check::new("left module axioms");
    let one = kq.one();
    visit_tuples(&[nk, nk, nar], ex, seed ^ 6, |i| {
        let (ak, ak2, ar) = (&ak_all[i[0]], &ak_all[i[1]], &ar_all[i[2]]);
        let ok = b.left_act(&one, ar) == *ar
            && b.left_act(&kq.mul(ak, ak2), ar) == b.left_act(ak, &b.left_act(ak2, ar))
            && b.left_act(&kq.add(ak, ak2), ar) == r.add(&b.left_act(ak, ar), &b.left_act(ak2, ar));
        c.case(ok, || format!("a_K = {}, a_K' = {}, a_R = {}", shk(ak), shk(ak2), shr(ar)));
    });
    visit_tuples(&[nk, nar, nar], ex, seed ^ 7, |i| {
        let (ak, ar, ar2) = (&ak_all[i[0]], &ar_all[i[1]], &ar_all[i[2]]);
        let ok = b.left_act(ak, &r.add(ar, ar2)) == r.add(&b.left_act(ak, ar), &b.left_act(ak, ar2));
        c.case(ok, || format!("additivity at a_K = {}, a_R = {}, a_R' = {}", shk(ak), shr(ar), shr(ar2)));
    });
    rep.push(c);
    rep
}

/// Group axioms of `Heis(K)`, the commutant claim, and the ring laws of `A_K`.
pub fn verify_heis(k: &Ring) -> Report {
    let mut rep = Report::new("Heis");
    let hs: Vec<HeisElem> = k.elements().flat_map(|x| k.elements().map(move |y| HeisElem { x, y })).collect();
    let comm: HashSet<Elem> = k.elements().map(|t| k.sub(t, k.conj(t))).collect();
    let u = UniversalStructure::new(k);
    let show = |h: &HeisElem| format!("({}, {})", k.show(h.x), k.show(h.y));
    let ex = hs.len() <= 256;

    let mut c = Check::new("group axioms");
    visit_tuples(&[hs.len(); 3], ex, 1, |i| {
        let (a, b, d) = (hs[i[0]], hs[i[1]], hs[i[2]]);
        let ok = heis_add(k, heis_add(k, a, b), d) == heis_add(k, a, heis_add(k, b, d))
            && heis_add(k, HeisElem::ZERO, a) == a
            && heis_add(k, heis_neg(k, a), a) == HeisElem::ZERO;
        c.case(ok, || format!("{}, {}, {}", show(&a), show(&b), show(&d)));
    });
    rep.push(c.with_note(mode_note(ex)));

    let mut c = Check::new("commutators lie in {(0, k - conj k)}");
    visit_tuples(&[hs.len(); 2], true, 2, |i| {
        let (a, b) = (hs[i[0]], hs[i[1]]);
        let cm = heis_add(k, heis_add(k, a, b), heis_neg(k, heis_add(k, b, a)));
        c.case(cm.x.is_zero() && comm.contains(&cm.y), || format!("{}, {}", show(&a), show(&b)));
    });
    rep.push(c);

    let mut c = Check::new("tr is additive and multiplicative");
    visit_tuples(&[hs.len(); 2], true, 3, |i| {
        let (a, b) = (hs[i[0]], hs[i[1]]);
        let ok = heis_tr(k, heis_add(k, a, b)) == k.add(heis_tr(k, a), heis_tr(k, b))
            && heis_tr(k, heis_mul(k, a, b)) == k.mul(heis_tr(k, a), heis_tr(k, b));
        c.case(ok, || format!("{}, {}", show(&a), show(&b)));
    });
    rep.push(c);

    let mut c = Check::new("product is associative and distributes over a sum in the left factor");
    visit_tuples(&[hs.len(); 3], ex, 4, |i| {
        let (a, b, d) = (hs[i[0]], hs[i[1]], hs[i[2]]);
        let ok = heis_mul(k, heis_add(k, b, d), a) == heis_add(k, heis_mul(k, b, a), heis_mul(k, d, a))
            && heis_mul(k, heis_mul(k, a, b), d) == heis_mul(k, a, heis_mul(k, b, d))
            && heis_mul(k, HeisElem { x: Elem::ONE, y: Elem::ZERO }, a) == a;
        c.case(ok, || format!("{}, {}, {}", show(&a), show(&b), show(&d)));
    });
    rep.push(c.with_note(mode_note(ex)));

    let mut c = Check::new("A_K product is commutative and well defined");
    let classes = u.elements();
    visit_tuples(&[classes.len(); 2], true, 5, |i| {
        let (a, b) = (classes[i[0]], classes[i[1]]);
        let mut ok = u.mul(&a, &b) == u.mul(&b, &a);
        for &t in &comm {
            let a2 = heis_add(k, a, heis_phi(t));
            ok &= u.class(heis_mul(k, a2, b)) == u.mul(&a, &b) && u.class(heis_mul(k, b, a2)) == u.mul(&b, &a);
        }
        c.case(ok, || format!("{}, {}", show(&a), show(&b)));
    });
    rep.push(c);
    rep
}

/// The image `a + b T` of a Heisenberg element in `Z[T]/(T^2 - 2T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Poly2 {
    pub a: i128,
    pub b: i128,
}

/// Operations of `Heis(Z)` with trivial involution, in checked integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisZ {
    pub x: i128,
    pub y: i128,
}

fn ovf(what: &str) -> Error {
    Error::Overflow(format!("{what} left the 128-bit range"))
}

impl HeisZ {
    pub fn add(self, o: HeisZ) -> Result<HeisZ> {
        let xx = self.x.checked_mul(o.x).ok_or_else(|| ovf("x x'"))?;
        Ok(HeisZ {
            x: self.x.checked_add(o.x).ok_or_else(|| ovf("x + x'"))?,
            y: self.y.checked_add(o.y).and_then(|s| s.checked_sub(xx)).ok_or_else(|| ovf("y + y' - x x'"))?,
        })
    }

    pub fn mul(self, o: HeisZ) -> Result<HeisZ> {
        let m = |a: i128, b: i128| a.checked_mul(b).ok_or_else(|| ovf("product"));
        let t1 = m(m(self.x, self.x)?, o.y)?;
        let t2 = m(m(o.x, o.x)?, self.y)?;
        let t3 = m(m(2, self.y)?, o.y)?;
        let y = t1.checked_add(t2).and_then(|s| s.checked_add(t3)).ok_or_else(|| ovf("sum"))?;
        Ok(HeisZ { x: m(self.x, o.x)?, y })
    }

    /// `(x, y) -> x + (y + C(x, 2)) T`.
    pub fn to_poly(self) -> Result<Poly2> {
        let c2 = self.x.checked_mul(self.x - 1).ok_or_else(|| ovf("binomial"))? / 2;
        Ok(Poly2 { a: self.x, b: self.y.checked_add(c2).ok_or_else(|| ovf("binomial"))? })
    }
}

impl Poly2 {
    pub fn add(self, o: Poly2) -> Result<Poly2> {
        Ok(Poly2 {
            a: self.a.checked_add(o.a).ok_or_else(|| ovf("sum"))?,
            b: self.b.checked_add(o.b).ok_or_else(|| ovf("sum"))?,
        })
    }

    /// Product modulo `T^2 - 2T`: `(a + bT)(c + eT) = ac + (ae + bc + 2be) T`.
    pub fn mul(self, o: Poly2) -> Result<Poly2> {
        let m = |a: i128, b: i128| a.checked_mul(b).ok_or_else(|| ovf("product"));
        let lin = m(self.a, o.b)?
            .checked_add(m(self.b, o.a)?)
            .and_then(|s| m(2, m(self.b, o.b).ok()?).ok().and_then(|t| s.checked_add(t)))
            .ok_or_else(|| ovf("product"))?;
        Ok(Poly2 { a: m(self.a, o.a)?, b: lin })
    }
}

/// Outcome of comparing the polynomial image on one pair of elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyCheck {
    pub image: Poly2,
    pub additive: bool,
    pub multiplicative: bool,
}

/// Image of `(x, y)` and both homomorphism identities against `(x2, y2)`.
pub fn heis_poly_check(h: HeisZ, h2: HeisZ) -> Result<PolyCheck> {
    const BOUND: i128 = 1_000_000;
    for v in [h.x, h.y, h2.x, h2.y] {
        if v.abs() > BOUND {
            return Err(Error::Overflow(format!("input {v} exceeds the supported bound {BOUND}")));
        }
    }
    let (p, p2) = (h.to_poly()?, h2.to_poly()?);
    let additive = h.add(h2)?.to_poly()? == p.add(p2)?;
    let multiplicative = h.mul(h2)?.to_poly()? == p.mul(p2)?;
    Ok(PolyCheck { image: p, additive, multiplicative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use proptest::prelude::*;

    fn z(n: u32) -> Ring {
        Ring::new(&RingSpec::modular(n, 1)).unwrap()
    }

    fn h(k: &Ring, x: i64, y: i64) -> HeisElem {
        HeisElem::new(k.from_int(x), k.from_int(y))
    }

    #[test]
    fn heisenberg_values() {
        let k = z(4);
        assert_eq!(heis_add(&k, h(&k, 1, 0), h(&k, 1, 0)), h(&k, 2, 3));
        assert_eq!(heis_neg(&k, h(&k, 1, 0)), h(&k, 3, 3));
        assert_eq!(heis_act(&k, h(&k, 1, 1), k.from_int(2)), h(&k, 2, 0));
        let f2 = z(2);
        assert_eq!(heis_mul(&f2, h(&f2, 0, 1), h(&f2, 0, 1)), h(&f2, 0, 0));
        let z5 = z(5);
        assert_eq!(heis_mul(&z5, h(&z5, 1, 1), h(&z5, 1, 1)), h(&z5, 1, 4));
    }

    #[test]
    fn universal_orders() {
        let f2 = UniversalStructure::new(&z(2));
        assert_eq!(f2.order(), 4);
        // (1, 0) has additive order 4, so A_K is cyclic of order 4.
        let g = h(&z(2), 1, 0);
        let mut acc = HeisElem::ZERO;
        let mut ord = 0;
        loop {
            acc = f2.add(&acc, &g);
            ord += 1;
            if acc == HeisElem::ZERO {
                break;
            }
        }
        assert_eq!(ord, 4);
        assert_eq!(UniversalStructure::new(&z(4)).order(), 16);
        let sw = Ring::new(&RingSpec::swap_product(2, [1, 1])).unwrap();
        assert_eq!(UniversalStructure::new(&sw).order(), 8);
    }

    #[test]
    fn axioms_hold_for_universal_structures() {
        let rings = [z(2), z(3), z(4), Ring::new(&RingSpec::swap_product(2, [1, 1])).unwrap()];
        for k in &rings {
            let u = UniversalStructure::new(k);
            assert!(verify_qs(&u, 1).all_passed(), "{k:?}: {:?}", verify_qs(&u, 1));
            assert!(verify_qr(&u, 1).all_passed(), "{k:?}");
            assert!(verify_qa(&AlgebraBinding::new(&u, &u), 1).all_passed(), "{k:?}");
            let hr = verify_heis(k);
            assert!(hr.all_passed(), "{k:?}: {:?}", hr.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn bak_structure_passes_and_zero_trace_fails() {
        let k = z(4);
        assert!(verify_qs(&BakStructure::new(&k), 0).all_passed());
        let bad = verify_qs(&BakStructure::with_mutation(&k, StructureMutation::ZeroTrace), 0);
        let qs2 = bad.get("QS2").unwrap();
        assert!(!qs2.passed);
        assert!(qs2.witness.as_deref().unwrap().starts_with("r = 1:"), "{qs2:?}");
    }

    #[test]
    fn zero_multiplication_breaks_qr3() {
        let u = UniversalStructure::with_mutation(&z(2), StructureMutation::ZeroMul);
        let rep = verify_qr(&u, 0);
        assert!(!rep.passed("QR3"));
    }

    #[test]
    fn zero_structure_is_an_algebra_over_f2() {
        let k = z(2);
        let u = UniversalStructure::new(&k);
        let zs = ZeroStructure::new(&k);
        assert!(verify_qs(&zs, 0).all_passed());
        assert!(verify_qa(&AlgebraBinding::new(&u, &zs), 0).all_passed());
        // Over Z/3 the zero structure violates QS2.
        assert!(!verify_qs(&ZeroStructure::new(&z(3)), 0).passed("QS2"));
    }

    #[test]
    fn poly_image_values() {
        assert_eq!(HeisZ { x: 2, y: 0 }.to_poly().unwrap(), Poly2 { a: 2, b: 1 });
        assert_eq!(HeisZ { x: 0, y: 1 }.to_poly().unwrap(), Poly2 { a: 0, b: 1 });
        let one_one = HeisZ { x: 1, y: 1 };
        let sq = one_one.mul(one_one).unwrap();
        assert_eq!(sq, HeisZ { x: 1, y: 4 });
        let p = one_one.to_poly().unwrap();
        assert_eq!(p.mul(p).unwrap(), Poly2 { a: 1, b: 4 });
        assert!(matches!(heis_poly_check(HeisZ { x: 2_000_000, y: 0 }, one_one), Err(Error::Overflow(_))));
    }

    proptest! {
        #[test]
        fn poly_map_is_a_ring_homomorphism(x in -1000i128..=1000, y in -1000i128..=1000, x2 in -1000i128..=1000, y2 in -1000i128..=1000) {
            let r = heis_poly_check(HeisZ { x, y }, HeisZ { x: x2, y: y2 }).unwrap();
            prop_assert!(r.additive && r.multiplicative);
        }

        #[test]
        fn phi_and_tr_are_equivariant(n in 2u32..7, r in 0u8..7, s in 0u8..7, x in 0u8..7) {
            let k = z(n);
            let (r, s, x) = (Elem(r % n as u8), Elem(s % n as u8), Elem(x % n as u8));
            let u = UniversalStructure::new(&k);
            prop_assert_eq!(u.phi(k.mul(k.mul(k.conj(s), r), s)), u.act(&u.phi(r), s));
            let a = HeisElem::new(x, r);
            prop_assert_eq!(u.tr(&u.act(&a, s)), k.mul(k.mul(k.conj(s), u.tr(&a)), s));
        }
    }
}
