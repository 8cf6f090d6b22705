//! The root system `BC_l`, root subgroups `U_alpha(L)` and the commutator
//! containments between them.

use num_bigint::BigUint;
use std::fmt;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AugLevel, LevelSpace};
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::matrix::{commutator, Mat};
use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RootKind {
    /// `+-e_i +- e_j`.
    Short,
    /// `+-e_k`.
    Ultrashort,
    /// `+-2 e_k`.
    Long,
}

/// A vector of `Z^l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root(pub Vec<i32>);

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            write!(f, "{sign}{mag}e{}", k + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Which transvections a root subgroup is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootTarget {
    /// `tau_ij(I_ij)`.
    Short(i32, i32),
    /// `tau_a(Gamma . e_a)`.
    Ultra(i32),
    /// `tau_a(phi(I_{-a,a}))`.
    Long(i32),
}

impl Root {
    pub fn unit(l: usize, k: usize, c: i32) -> Root {
        let mut v = vec![0; l];
        v[k] = c;
        Root(v)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&k| self.0[k] != 0).collect()
    }

    /// `None` outside `BC_l`.
    pub fn kind(&self) -> Option<RootKind> {
        let s = self.support();
        match s.as_slice() {
            [k] => match self.0[*k].abs() {
                1 => Some(RootKind::Ultrashort),
                2 => Some(RootKind::Long),
                _ => None,
            },
            [p, q] if self.0[*p].abs() == 1 && self.0[*q].abs() == 1 => Some(RootKind::Short),
            _ => None,
        }
    }

    pub fn combine(&self, i: i32, other: &Root, j: i32) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| i * a + j * b).collect())
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|a| -a).collect())
    }

    /// `other = c * self` for some `c < 0`.
    pub fn negatively_proportional(&self, other: &Root) -> bool {
        // Both are nonzero, so compare cross products and one sign.
        let n = self.0.len();
        for a in 0..n {
            for b in 0..n {
                if self.0[a] * other.0[b] != self.0[b] * other.0[a] {
                    return false;
                }
            }
        }
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum::<i32>() < 0
    }

    /// The transvection blocks behind this root, with `e_{-k} = -e_k`.
    pub fn target(&self) -> Option<RootTarget> {
        let s = self.support();
        let v = &self.0;
        match self.kind()? {
            RootKind::Short => {
                let (p, q) = (s[0], s[1]);
                Some(RootTarget::Short((p as i32 + 1) * v[p], -v[q] * (q as i32 + 1)))
            }
            RootKind::Ultrashort => Some(RootTarget::Ultra(-v[s[0]] * (s[0] as i32 + 1))),
            RootKind::Long => Some(RootTarget::Long(-(v[s[0]] / 2) * (s[0] as i32 + 1))),
        }
    }
}

/// All roots of `BC_l`.
pub fn bc_roots(l: usize) -> Vec<Root> {
    let mut out = Vec::new();
    for p in 0..l {
        for q in p + 1..l {
            for sp in [1, -1] {
                for sq in [1, -1] {
                    let mut v = vec![0; l];
                    v[p] = sp;
                    v[q] = sq;
                    out.push(Root(v));
                }
            }
        }
    }
    for k in 0..l {
        for c in [1, -1, 2, -2] {
            out.push(Root::unit(l, k, c));
        }
    }
    out
}

impl LevelSpace {
    /// Generators of `U_alpha(L)` as matrices.
    pub fn root_subgroup_gens(&self, root: &Root, lvl: &AugLevel) -> Result<Vec<Mat>> {
        let c = &self.ctx;
        let t = root.target().ok_or_else(|| Error::BadBlock(format!("{root} is not a root of BC_l")))?;
        Ok(match t {
            RootTarget::Short(i, j) => lvl.i.block_generators(c, i, j).iter().map(|a| c.tau_short(i, j, a)).collect::<Result<_>>()?,
            RootTarget::Ultra(a) => lvl.gamma.component(c, a).generators(c).iter().map(|h| c.tau_ultra(a, h)).collect::<Result<_>>()?,
            RootTarget::Long(a) => lvl.i.block_generators(c, -a, a).iter().map(|x| c.tau_ultra(a, &c.phi(x))).collect::<Result<_>>()?,
        })
    }

    /// Every element of `U_alpha(L)`.
    pub fn root_subgroup_elements(&self, root: &Root, lvl: &AugLevel) -> Result<Vec<Mat>> {
        let c = &self.ctx;
        let t = root.target().ok_or_else(|| Error::BadBlock(format!("{root} is not a root of BC_l")))?;
        let mut out: Vec<Mat> = match t {
            RootTarget::Short(i, j) => lvl.i.block_elements(c, i, j).iter().map(|a| c.tau_short(i, j, a)).collect::<Result<_>>()?,
            RootTarget::Ultra(a) => {
                let comp = lvl.gamma.component(c, a);
                if comp.order() > BigUint::from(super::MAX_CARRIER) {
                    return Err(Error::CarrierTooLarge(format!("U_{root} has {} elements", comp.order())));
                }
                comp.elements(c).iter().map(|h| c.tau_ultra(a, h)).collect::<Result<_>>()?
            }
            RootTarget::Long(a) => lvl.i.block_elements(c, -a, a).iter().map(|x| c.tau_ultra(a, &c.phi(x))).collect::<Result<_>>()?,
        };
        out.sort_by(|x, y| x.data().cmp(y.data()));
        out.dedup();
        Ok(out)
    }

    /// `[U_alpha(L), U_beta(Lhat)]` inside the group generated by the
    /// `U_{i alpha + j beta}(L)` with `i, j >= 1`, for every ordered pair of
    /// roots that are not negatively proportional, together with
    /// `U_{2e}(L) <= U_e(L)`. Pairs of elements are exhaustive when there
    /// are at most `budget` of them per root pair and sampled otherwise.
    pub fn verify_chevalley(&self, lvl: &AugLevel, seed: u64, budget: usize, cap: usize) -> Result<Report> {
        let c = &self.ctx;
        let k = c.ring();
        let d = c.dim();
        let l = self.l() as usize;
        let hat = self.enveloping(lvl)?;
        let roots = bc_roots(l);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rep = Report::new("Chevalley containments");
        let mut small = Vec::new();
        let mut big = Vec::new();
        for r in &roots {
            let xs = self.root_subgroup_elements(r, lvl)?;
            let xi: Vec<Mat> = xs.iter().map(|x| x.inverse(k).ok_or(Error::NotInvertible)).collect::<Result<_>>()?;
            small.push((xs, xi));
            let ys = self.root_subgroup_elements(r, &hat)?;
            let yi: Vec<Mat> = ys.iter().map(|x| x.inverse(k).ok_or(Error::NotInvertible)).collect::<Result<_>>()?;
            big.push((ys, yi));
        }
        let mut ch = Check::new("[U_a(L), U_b(Lhat)] <= prod U_{ia+jb}(L)");
        let mut sampled = false;
        let mut pairs_checked = 0usize;
        for (ai, a) in roots.iter().enumerate() {
            for (bi, b) in roots.iter().enumerate() {
                if a.negatively_proportional(b) {
                    continue;
                }
                let mut gens = Vec::new();
                for i in 1..=3 {
                    for j in 1..=3 {
                        let r = a.combine(i, b, j);
                        if r.kind().is_some() {
                            gens.extend(self.root_subgroup_gens(&r, lvl)?);
                        }
                    }
                }
                let target = FiniteGroup::generate(k, d, &gens, cap)?;
                let (xs, xi) = &small[ai];
                let (ys, yi) = &big[bi];
                let total = xs.len() * ys.len();
                let test = |x: usize, y: usize, ch: &mut Check| {
                    let comm = commutator(k, &xs[x], &xi[x], &ys[y], &yi[y]);
                    ch.case(target.contains(&comm), || format!("alpha = {a}, beta = {b}, x = {:?}, y = {:?}", xs[x].show(k), ys[y].show(k)));
                };
                if total <= budget {
                    for x in 0..xs.len() {
                        for y in 0..ys.len() {
                            test(x, y, &mut ch);
                        }
                    }
                } else {
                    sampled = true;
                    for _ in 0..budget {
                        let x = rng.gen_range(0..xs.len());
                        let y = rng.gen_range(0..ys.len());
                        test(x, y, &mut ch);
                    }
                }
                pairs_checked += 1;
            }
        }
        let note = format!("{pairs_checked} root pairs, {}", if sampled { "element pairs sampled where large" } else { "all element pairs" });
        rep.push(ch.with_note(note));
        let mut ch = Check::new("U_2e(L) <= U_e(L)");
        for r in roots.iter().filter(|r| r.kind() == Some(RootKind::Ultrashort)) {
            let twice = r.combine(2, r, 0);
            let g = FiniteGroup::generate(k, d, &self.root_subgroup_gens(r, lvl)?, cap)?;
            for x in self.root_subgroup_gens(&twice, lvl)? {
                ch.case(g.contains(&x), || format!("root {r}: {:?}", x.show(k)));
            }
        }
        rep.push(ch);
        Ok(rep)
    }
}
