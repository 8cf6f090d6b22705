//! Submodules of `(Z/n)^m` in Howell normal form.
//!
//! The Howell form is the echelon form over `Z/n` that also records the
//! "saturation" rows `(n/g) * row`, so membership is decided by plain
//! reduction and two spans are equal exactly when their forms are equal.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Extended Euclid on nonnegative integers: `(g, s, t)` with `s a + t b = g`.
fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = xgcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZnModule {
    n: u32,
    dim: usize,
    /// Howell basis, one row per pivot, pivots strictly increasing.
    rows: Vec<Vec<u32>>,
}

impl ZnModule {
    pub fn zero(n: u32, dim: usize) -> ZnModule {
        ZnModule { n, dim, rows: Vec::new() }
    }

    /// The whole ambient module `(Z/n)^dim`.
    pub fn full(n: u32, dim: usize) -> ZnModule {
        let rows = (0..dim)
            .map(|i| {
                let mut r = vec![0; dim];
                r[i] = 1;
                r
            })
            .collect();
        ZnModule { n, dim, rows }
    }

    pub fn span<I, V>(n: u32, dim: usize, gens: I) -> ZnModule
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[u32]>,
    {
        let mut m = ZnModule::zero(n, dim);
        let mut pool: Vec<Vec<u32>> = Vec::new();
        for g in gens {
            let g = g.as_ref();
            assert_eq!(g.len(), dim, "generator has the wrong length");
            pool.push(g.iter().map(|&x| x % n).collect());
        }
        m.rebuild(pool);
        m
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn pivot(&self, row: &[u32]) -> Option<usize> {
        row.iter().position(|&x| x != 0)
    }

    /// Recomputes the Howell form of the span of `pool`.
    fn rebuild(&mut self, mut pool: Vec<Vec<u32>>) {
        let n = self.n as u64;
        let ni = n as i64;
        pool.retain(|r| r.iter().any(|&x| x != 0));
        let mut basis: Vec<Vec<u32>> = Vec::new();
        for c in 0..self.dim {
            // Fold every pool row with a nonzero entry in column c into one pivot row.
            let mut piv: Option<Vec<u32>> = None;
            let mut rest = Vec::with_capacity(pool.len());
            for row in pool.drain(..) {
                if row[c] == 0 {
                    rest.push(row);
                    continue;
                }
                match piv.take() {
                    None => piv = Some(row),
                    Some(p) => {
                        let a = p[c] as i64;
                        let b = row[c] as i64;
                        let (g, s, t) = xgcd(a, b);
                        let (ag, bg) = (a / g, b / g);
                        let comb = |x: i64, y: i64, u: u32, v: u32| -> u32 {
                            (x * u as i64 + y * v as i64).rem_euclid(ni) as u32
                        };
                        let np: Vec<u32> = p.iter().zip(&row).map(|(&u, &v)| comb(s, t, u, v)).collect();
                        let nr: Vec<u32> = p.iter().zip(&row).map(|(&u, &v)| comb(-bg, ag, u, v)).collect();
                        if nr.iter().any(|&x| x != 0) {
                            rest.push(nr);
                        }
                        piv = Some(np);
                    }
                }
            }
            pool = rest;
            let Some(mut p) = piv else { continue };
            if p[c] == 0 {
                // The pivot vanished mod n; whatever is left goes back in the pool.
                if p.iter().any(|&x| x != 0) {
                    pool.push(p);
                }
                continue;
            }
            let a = p[c] as u64;
            let g = gcd(a, n);
            let u = (1..n).find(|&u| gcd(u, n) == 1 && (u * a) % n == g).expect("a normalizing unit exists");
            for x in p.iter_mut() {
                *x = ((*x as u64 * u) % n) as u32;
            }
            // Saturation row: (n/g) * p kills column c but may survive further right.
            let sat: Vec<u32> = p.iter().map(|&x| ((x as u64 * (n / g)) % n) as u32).collect();
            if sat.iter().any(|&x| x != 0) {
                pool.push(sat);
            }
            // Reduce the column above the new pivot.
            for b in basis.iter_mut() {
                let q = b[c] as u64 / g;
                if q != 0 {
                    for (x, &y) in b.iter_mut().zip(&p) {
                        *x = ((*x as u64 + n * n - q * y as u64 % n) % n) as u32;
                    }
                }
            }
            basis.push(p);
        }
        debug_assert!(pool.iter().all(|r| r.iter().all(|&x| x == 0)));
        self.rows = basis;
    }

    /// Remainder of `v` after reduction by the basis; zero iff `v` is a member.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let n = self.n as u64;
        let mut r: Vec<u32> = v.iter().map(|&x| x % self.n).collect();
        for b in &self.rows {
            let c = self.pivot(b).expect("basis rows are nonzero");
            let p = b[c] as u64;
            let q = r[c] as u64 / p;
            if q != 0 {
                for (x, &y) in r.iter_mut().zip(b) {
                    *x = ((*x as u64 + n * n - q * y as u64 % n) % n) as u32;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds a generator; returns whether the module grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        if self.contains(v) {
            return false;
        }
        let mut pool = self.rows.clone();
        pool.push(v.iter().map(|&x| x % self.n).collect());
        self.rebuild(pool);
        true
    }

    pub fn sum(&self, other: &ZnModule) -> ZnModule {
        assert_eq!((self.n, self.dim), (other.n, other.dim));
        let mut m = self.clone();
        let pool: Vec<Vec<u32>> = self.rows.iter().chain(&other.rows).cloned().collect();
        m.rebuild(pool);
        m
    }

    pub fn is_submodule_of(&self, other: &ZnModule) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Number of elements, the product of `n / pivot` over the basis.
    pub fn order(&self) -> BigUint {
        self.rows
            .iter()
            .map(|r| {
                let p = r[self.pivot(r).unwrap()];
                BigUint::from(self.n / p)
            })
            .product()
    }

    /// Every element, by enumerating coefficient tuples `0 <= c_i < n / p_i`.
    /// In Howell form distinct tuples give distinct elements.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let n = self.n as u64;
        let mut out = vec![vec![0u32; self.dim]];
        for b in &self.rows {
            let p = b[self.pivot(b).unwrap()];
            let range = self.n / p;
            let mut next = Vec::with_capacity(out.len() * range as usize);
            for v in &out {
                for k in 0..range as u64 {
                    next.push(v.iter().zip(b).map(|(&x, &y)| ((x as u64 + k * y as u64) % n) as u32).collect());
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Span by brute-force closure under addition, the independent oracle.
    fn brute_span(n: u32, gens: &[Vec<u32>], dim: usize) -> BTreeSet<Vec<u32>> {
        let mut set = BTreeSet::new();
        set.insert(vec![0; dim]);
        let mut frontier = vec![vec![0; dim]];
        while let Some(v) = frontier.pop() {
            for g in gens {
                let w: Vec<u32> = v.iter().zip(g).map(|(&a, &b)| (a + b) % n).collect();
                if set.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        set
    }

    proptest! {
        #[test]
        fn howell_span_matches_brute_force(
            n in prop::sample::select(vec![2u32, 3, 4, 6, 8, 9, 12]),
            dim in 1usize..4,
            raw in proptest::collection::vec(proptest::collection::vec(0u32..12, 3), 0..4),
        ) {
            let gens: Vec<Vec<u32>> = raw.iter().map(|r| r[..dim].iter().map(|&x| x % n).collect()).collect();
            let m = ZnModule::span(n, dim, &gens);
            let oracle = brute_span(n, &gens, dim);
            let elems: BTreeSet<Vec<u32>> = m.elements().into_iter().collect();
            prop_assert_eq!(BigUint::from(elems.len()), m.order());
            prop_assert_eq!(&elems, &oracle);
            for v in &oracle {
                prop_assert!(m.contains(v));
            }
            // Canonical: a reshuffled generating set gives the same form.
            let mut rev = gens.clone();
            rev.reverse();
            rev.extend(oracle.iter().take(3).cloned());
            prop_assert_eq!(ZnModule::span(n, dim, &rev), m);
        }

        #[test]
        fn nonmembers_reduce_nonzero(
            n in prop::sample::select(vec![4u32, 6, 8]),
            raw in proptest::collection::vec(proptest::collection::vec(0u32..8, 3), 0..3),
            probe in proptest::collection::vec(0u32..8, 3),
        ) {
            let gens: Vec<Vec<u32>> = raw.iter().map(|r| r.iter().map(|&x| x % n).collect()).collect();
            let m = ZnModule::span(n, 3, &gens);
            let probe: Vec<u32> = probe.iter().map(|&x| x % n).collect();
            prop_assert_eq!(m.contains(&probe), brute_span(n, &gens, 3).contains(&probe));
        }
    }

    #[test]
    fn saturation_row_is_needed() {
        // Over Z/4, span{(2, 1)} contains (0, 2) = 2 * (2, 1).
        let m = ZnModule::span(4, 2, [[2u32, 1]]);
        assert!(m.contains(&[0, 2]));
        assert!(!m.contains(&[0, 1]));
        assert_eq!(m.order(), BigUint::from(4u8));
    }

    #[test]
    fn sum_and_inclusion() {
        let a = ZnModule::span(4, 2, [[2u32, 0]]);
        let b = ZnModule::span(4, 2, [[0u32, 1]]);
        let s = a.sum(&b);
        assert!(a.is_submodule_of(&s) && b.is_submodule_of(&s));
        assert_eq!(s.order(), BigUint::from(8u8));
        assert_eq!(ZnModule::full(4, 2).order(), BigUint::from(16u8));
    }
}
