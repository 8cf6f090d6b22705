//! Finite commutative rings with involution.
//!
//! Every ring is small enough to be tabulated: elements are stored as a
//! one-byte index into precomputed addition, multiplication, negation and
//! involution tables. The index of the element with residues `(a, b)` is
//! `a + n * b`, so the index is itself a canonical encoding.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a finite commutative ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingKind {
    /// `Z/n` with the identity involution.
    Modular { n: u32 },
    /// `Z/n x Z/n` with the swap involution `(a, b) -> (b, a)`.
    SwapProduct { n: u32 },
    /// `Z/n[t]/(t^2 - d)` with conjugation `t -> -t`.
    QuadExt { n: u32, d: u32 },
}

impl RingKind {
    pub fn modulus(&self) -> u32 {
        match *self {
            RingKind::Modular { n } | RingKind::SwapProduct { n } | RingKind::QuadExt { n, .. } => n,
        }
    }

    /// Number of `Z/n` residues per element.
    pub fn width(&self) -> usize {
        match self {
            RingKind::Modular { .. } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Modular { n } => write!(f, "Z/{n}"),
            RingKind::SwapProduct { n } => write!(f, "Z/{n} x Z/{n}"),
            RingKind::QuadExt { n, d } => write!(f, "Z/{n}[t]/(t^2-{d})"),
        }
    }
}

/// Ring description plus the symmetry `lambda`, given by residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub kind: RingKind,
    pub lambda: Vec<u32>,
}

impl RingSpec {
    pub fn modular(n: u32, lambda: u32) -> Self {
        RingSpec { kind: RingKind::Modular { n }, lambda: vec![lambda] }
    }

    pub fn swap_product(n: u32, lambda: [u32; 2]) -> Self {
        RingSpec { kind: RingKind::SwapProduct { n }, lambda: lambda.to_vec() }
    }

    pub fn quad_ext(n: u32, d: u32, lambda: [u32; 2]) -> Self {
        RingSpec { kind: RingKind::QuadExt { n, d }, lambda: lambda.to_vec() }
    }
}

/// A ring element: index into the ring's tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u8);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    kind: RingKind,
    n: u32,
    order: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    conj: Vec<u8>,
    inv: Vec<Option<u8>>,
    lambda: u8,
}

/// A finite commutative ring with involution and symmetry `lambda`.
///
/// Cheap to clone; the tables are shared.
#[derive(Clone)]
pub struct Ring(Arc<Tables>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({}, lambda={})", self.0.kind, self.show(self.lambda()))
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.kind == other.0.kind && self.0.lambda == other.0.lambda)
    }
}

impl Eq for Ring {}

// The swap product is indexed by `(a, b - a)` rather than `(a, b)`, so that
// index 1 is the identity `(1, 1)` for every kind.
fn residues_of(kind: RingKind, idx: usize) -> [u32; 2] {
    let n = kind.modulus() as usize;
    let (a, b) = (idx % n, idx / n);
    match kind {
        RingKind::SwapProduct { .. } => [a as u32, ((a + b) % n) as u32],
        _ => [a as u32, b as u32],
    }
}

fn index_of(kind: RingKind, r: [u32; 2]) -> usize {
    let n = kind.modulus();
    let (a, b) = (r[0] % n, r[1] % n);
    let second = match kind {
        RingKind::SwapProduct { .. } => (b + n - a) % n,
        _ => b,
    };
    a as usize + n as usize * second as usize
}

impl Ring {
    /// Builds and validates a ring. Fails when `lambda` is not a unit with
    /// `conj(lambda) = lambda^-1`, or when the involution table breaks an axiom.
    pub fn new(spec: &RingSpec) -> Result<Ring> {
        let kind = spec.kind;
        let n = kind.modulus();
        if n < 2 {
            return Err(Error::InvalidRing(format!("modulus must be at least 2, got {n}")));
        }
        let order = (n as usize).pow(kind.width() as u32);
        if order > 256 {
            return Err(Error::InvalidRing(format!("{kind} has {order} elements, at most 256 are supported")));
        }
        let nn = n as u64;
        let mut add = vec![0u8; order * order];
        let mut mul = vec![0u8; order * order];
        let mut neg = vec![0u8; order];
        let mut conj = vec![0u8; order];
        for x in 0..order {
            let [a, b] = residues_of(kind, x);
            let (a, b) = (a as u64, b as u64);
            neg[x] = index_of(kind, [((nn - a) % nn) as u32, ((nn - b) % nn) as u32]) as u8;
            conj[x] = match kind {
                RingKind::Modular { .. } => x as u8,
                RingKind::SwapProduct { .. } => index_of(kind, [b as u32, a as u32]) as u8,
                RingKind::QuadExt { .. } => index_of(kind, [a as u32, ((nn - b) % nn) as u32]) as u8,
            };
            for y in 0..order {
                let [c, e] = residues_of(kind, y);
                let (c, e) = (c as u64, e as u64);
                add[x * order + y] = index_of(kind, [((a + c) % nn) as u32, ((b + e) % nn) as u32]) as u8;
                let prod = match kind {
                    RingKind::Modular { .. } => [(a * c) % nn, 0],
                    RingKind::SwapProduct { .. } => [(a * c) % nn, (b * e) % nn],
                    RingKind::QuadExt { d, .. } => {
                        let d = d as u64 % nn;
                        [(a * c + (b * e) % nn * d) % nn, (a * e + b * c) % nn]
                    }
                };
                mul[x * order + y] = index_of(kind, [prod[0] as u32, prod[1] as u32]) as u8;
            }
        }
        let one = match kind {
            RingKind::SwapProduct { .. } => index_of(kind, [1, 1]),
            _ => index_of(kind, [1, 0]),
        };
        debug_assert_eq!(one, 1);
        let mut inv = vec![None; order];
        for x in 0..order {
            inv[x] = (0..order).find(|&y| mul[x * order + y] as usize == one).map(|y| y as u8);
        }
        if spec.lambda.len() != kind.width() {
            return Err(Error::InvalidLambda(format!(
                "lambda needs {} residue(s), got {}",
                kind.width(),
                spec.lambda.len()
            )));
        }
        let mut lr = [0u32; 2];
        for (slot, &v) in lr.iter_mut().zip(&spec.lambda) {
            *slot = v % n;
        }
        let lambda = index_of(kind, lr) as u8;
        let ring = Ring(Arc::new(Tables { kind, n, order, add, mul, neg, conj, inv, lambda }));
        ring.validate_involution()?;
        let l = Elem(lambda);
        match ring.inv(l) {
            None => {
                return Err(Error::InvalidLambda(format!("lambda = {} is not a unit", ring.show(l))));
            }
            Some(li) if ring.conj(l) != li => {
                return Err(Error::InvalidLambda(format!(
                    "conj(lambda) = {} differs from lambda^-1 = {}",
                    ring.show(ring.conj(l)),
                    ring.show(li)
                )));
            }
            Some(_) => {}
        }
        Ok(ring)
    }

    fn validate_involution(&self) -> Result<()> {
        if self.conj(self.one()) != self.one() {
            return Err(Error::InvalidInvolution("involution does not fix 1".into()));
        }
        for x in self.elements() {
            if self.conj(self.conj(x)) != x {
                return Err(Error::InvalidInvolution(format!("conj(conj({})) != itself", self.show(x))));
            }
            for y in self.elements() {
                if self.conj(self.add(x, y)) != self.add(self.conj(x), self.conj(y)) {
                    return Err(Error::InvalidInvolution(format!(
                        "not additive at ({}, {})",
                        self.show(x),
                        self.show(y)
                    )));
                }
                if self.conj(self.mul(x, y)) != self.mul(self.conj(y), self.conj(x)) {
                    return Err(Error::InvalidInvolution(format!(
                        "not multiplicative at ({}, {})",
                        self.show(x),
                        self.show(y)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> RingKind {
        self.0.kind
    }

    /// Characteristic modulus `n`.
    pub fn modulus(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    /// Residues per element when viewed as a `Z/n`-module.
    pub fn width(&self) -> usize {
        self.0.kind.width()
    }

    /// Bits needed to store one element index.
    pub fn bits(&self) -> u32 {
        usize::BITS - (self.0.order - 1).leading_zeros()
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    #[inline]
    pub fn lambda(&self) -> Elem {
        Elem(self.0.lambda)
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        Elem(self.0.add[x.index() * self.0.order + y.index()])
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        Elem(self.0.mul[x.index() * self.0.order + y.index()])
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        Elem(self.0.neg[x.index()])
    }

    /// The involution `x -> conj(x)`.
    #[inline]
    pub fn conj(&self, x: Elem) -> Elem {
        Elem(self.0.conj[x.index()])
    }

    #[inline]
    pub fn inv(&self, x: Elem) -> Option<Elem> {
        self.0.inv[x.index()].map(Elem)
    }

    pub fn is_unit(&self, x: Elem) -> bool {
        self.0.inv[x.index()].is_some()
    }

    /// The image of an integer under `Z -> K`.
    pub fn from_int(&self, k: i64) -> Elem {
        let r = k.rem_euclid(self.0.n as i64) as u32;
        let second = if matches!(self.0.kind, RingKind::SwapProduct { .. }) { r } else { 0 };
        Elem(index_of(self.0.kind, [r, second]) as u8)
    }

    /// `k * x` for an integer `k`.
    pub fn scale_int(&self, k: i64, x: Elem) -> Elem {
        self.mul(self.from_int(k), x)
    }

    pub fn from_residues(&self, r: &[u32]) -> Result<Elem> {
        if r.len() != self.width() {
            return Err(Error::InvalidRing(format!(
                "{} expects {} residue(s) per element, got {}",
                self.0.kind,
                self.width(),
                r.len()
            )));
        }
        let mut rr = [0u32; 2];
        rr[..r.len()].copy_from_slice(r);
        Ok(Elem(index_of(self.0.kind, rr) as u8))
    }

    pub fn residues(&self, x: Elem) -> Vec<u32> {
        residues_of(self.0.kind, x.index())[..self.width()].to_vec()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.order).map(|i| Elem(i as u8))
    }

    /// Coordinates of `x` in the additive basis `zn_basis()`; linear over `Z/n`.
    pub fn coords(&self, x: Elem) -> [u32; 2] {
        let n = self.0.n as usize;
        [(x.index() % n) as u32, (x.index() / n) as u32]
    }

    /// Inverse of [`Ring::coords`]; only the first `width()` entries are read.
    pub fn from_coords(&self, c: &[u32]) -> Elem {
        let n = self.0.n;
        let hi = if self.width() == 2 { c[1] % n } else { 0 };
        Elem(((c[0] % n) + n * hi) as u8)
    }

    /// A `Z/n`-basis of the ring: `1` and, for two-residue kinds, `(0, 1)`.
    pub fn zn_basis(&self) -> Vec<Elem> {
        match self.0.kind {
            RingKind::Modular { .. } => vec![self.one()],
            _ => vec![self.one(), Elem(self.0.n as u8)],
        }
    }

    /// `herm(K) = {k : k = conj(k)}`.
    pub fn hermitian_part(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.conj(x) == x).collect()
    }

    /// The unit group, by exhaustive inverse search.
    pub fn units(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    pub fn show(&self, x: Elem) -> String {
        let r = self.residues(x);
        if r.len() == 1 {
            r[0].to_string()
        } else {
            format!("({},{})", r[0], r[1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> Ring {
        Ring::new(&RingSpec::modular(n, 1)).unwrap()
    }

    #[test]
    fn modular_four_is_valid() {
        let r = z(4);
        assert_eq!(r.order(), 4);
        assert_eq!(r.conj(Elem(3)), Elem(3));
        assert_eq!(r.units(), vec![Elem(1), Elem(3)]);
        assert_eq!(r.hermitian_part().len(), 4);
    }

    #[test]
    fn non_unit_lambda_rejected() {
        let err = Ring::new(&RingSpec::modular(4, 2)).unwrap_err();
        assert!(matches!(err, Error::InvalidLambda(_)), "{err:?}");
    }

    #[test]
    fn lambda_must_satisfy_conj_inverse() {
        // In Z/3[i], lambda = i has conj(i) = -i = i^-1, so it is allowed.
        assert!(Ring::new(&RingSpec::quad_ext(3, 2, [0, 1])).is_ok());
        // In Z/3 x Z/3 with swap, lambda = (2, 1): conj = (1, 2), inverse = (2, 1).
        let err = Ring::new(&RingSpec::swap_product(3, [2, 1])).unwrap_err();
        assert!(matches!(err, Error::InvalidLambda(_)));
    }

    #[test]
    fn swap_product() {
        let r = Ring::new(&RingSpec::swap_product(2, [1, 1])).unwrap();
        let x = r.from_residues(&[1, 0]).unwrap();
        assert_eq!(r.residues(r.conj(x)), vec![0, 1]);
        let herm: Vec<_> = r.hermitian_part().iter().map(|&h| r.residues(h)).collect();
        assert_eq!(herm, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(r.units().len(), 1);
        let r3 = Ring::new(&RingSpec::swap_product(3, [1, 1])).unwrap();
        let y = r3.from_residues(&[1, 2]).unwrap();
        assert_eq!(r3.residues(r3.conj(y)), vec![2, 1]);
    }

    #[test]
    fn gaussian_integers_mod_three() {
        let r = Ring::new(&RingSpec::quad_ext(3, 2, [1, 0])).unwrap();
        let one_plus_i = r.from_residues(&[1, 1]).unwrap();
        assert_eq!(r.residues(r.conj(one_plus_i)), vec![1, 2]);
        let herm: Vec<_> = r.hermitian_part().iter().map(|&h| r.residues(h)).collect();
        assert_eq!(herm, vec![vec![0, 0], vec![1, 0], vec![2, 0]]);
        // Z/3[i] is the field with 9 elements.
        assert_eq!(r.units().len(), 8);
    }

    #[test]
    fn involution_axioms_hold_exhaustively() {
        let rings = [
            RingSpec::modular(6, 5),
            RingSpec::swap_product(4, [3, 3]),
            RingSpec::quad_ext(4, 3, [1, 0]),
            RingSpec::quad_ext(5, 2, [1, 0]),
        ];
        for spec in &rings {
            let r = Ring::new(spec).unwrap();
            for x in r.elements() {
                assert_eq!(r.conj(r.conj(x)), x);
                for y in r.elements() {
                    assert_eq!(r.conj(r.add(x, y)), r.add(r.conj(x), r.conj(y)));
                    assert_eq!(r.conj(r.mul(x, y)), r.mul(r.conj(y), r.conj(x)));
                }
            }
            let herm = r.hermitian_part();
            for &a in &herm {
                for &b in &herm {
                    assert!(herm.contains(&r.add(a, b)) && herm.contains(&r.mul(a, b)));
                }
            }
            let units = r.units();
            for &a in &units {
                for &b in &units {
                    assert!(units.contains(&r.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn coordinates_are_additive() {
        for spec in [RingSpec::modular(6, 1), RingSpec::swap_product(3, [1, 1]), RingSpec::quad_ext(3, 2, [1, 0])] {
            let r = Ring::new(&spec).unwrap();
            let n = r.modulus();
            for x in r.elements() {
                assert_eq!(r.from_coords(&r.coords(x)), x);
                for y in r.elements() {
                    let (cx, cy, cs) = (r.coords(x), r.coords(y), r.coords(r.add(x, y)));
                    for k in 0..r.width() {
                        assert_eq!((cx[k] + cy[k]) % n, cs[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn bits_per_element() {
        assert_eq!(z(2).bits(), 1);
        assert_eq!(z(3).bits(), 2);
        assert_eq!(z(4).bits(), 2);
        assert_eq!(Ring::new(&RingSpec::quad_ext(3, 2, [1, 0])).unwrap().bits(), 4);
    }
}
