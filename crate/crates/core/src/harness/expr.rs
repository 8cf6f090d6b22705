//! Level constructor expressions such as `scale(l0, 2)` or `join(l0, short(1, -2))`.

use std::fmt;

use super::classical::l1_level;
use crate::endo::HElem;
use crate::error::{Error, Result};
use crate::levels::{hyp_diag_basis, AugLevel, LevelSpace};
use crate::matrix::Mat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelExpr {
    Zero,
    /// The level of `EU(P)`.
    L0,
    Full,
    /// `L_0` together with every `(0, y, 0)` in the hyperbolic carriers.
    Central,
    /// The level of `EO(2l + 1, K)` on a space with `r_0 = 1`.
    L1,
    /// Generated by one element `(0, 0, z)` of `X_{-l}`, where `z` maps
    /// into the odd part. Meets `L_0` only in zero.
    Odd,
    /// Generated by the single matrix unit `diag(E_{pos(i), pos(j)})`.
    Short(i32, i32),
    Scale(Box<LevelExpr>, i64),
    Floor(Box<LevelExpr>),
    Ceil(Box<LevelExpr>),
    Env(Box<LevelExpr>),
    Join(Box<LevelExpr>, Box<LevelExpr>),
}

impl fmt::Display for LevelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelExpr::Zero => write!(f, "zero"),
            LevelExpr::L0 => write!(f, "l0"),
            LevelExpr::Full => write!(f, "full"),
            LevelExpr::Central => write!(f, "central"),
            LevelExpr::L1 => write!(f, "l1"),
            LevelExpr::Odd => write!(f, "odd"),
            LevelExpr::Short(i, j) => write!(f, "short({i}, {j})"),
            LevelExpr::Scale(e, k) => write!(f, "scale({e}, {k})"),
            LevelExpr::Floor(e) => write!(f, "floor({e})"),
            LevelExpr::Ceil(e) => write!(f, "ceil({e})"),
            LevelExpr::Env(e) => write!(f, "env({e})"),
            LevelExpr::Join(a, b) => write!(f, "join({a}, {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Open,
    Close,
    Comma,
}

fn lex(s: &str) -> std::result::Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut x = 0;
    while x < cs.len() {
        let ch = cs[x];
        match ch {
            ' ' | '\t' => x += 1,
            '(' => {
                out.push(Tok::Open);
                x += 1;
            }
            ')' => {
                out.push(Tok::Close);
                x += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                x += 1;
            }
            '-' | '0'..='9' => {
                let start = x;
                x += 1;
                while x < cs.len() && cs[x].is_ascii_digit() {
                    x += 1;
                }
                let t: String = cs[start..x].iter().collect();
                out.push(Tok::Int(t.parse().map_err(|_| format!("bad integer '{t}' at column {}", start + 1))?));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = x;
                while x < cs.len() && (cs[x].is_ascii_alphanumeric() || cs[x] == '_') {
                    x += 1;
                }
                out.push(Tok::Ident(cs[start..x].iter().collect()));
            }
            other => return Err(format!("unexpected character '{other}' at column {}", x + 1)),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    at: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> std::result::Result<(), String> {
        match self.next() {
            Some(got) if got == t => Ok(()),
            got => Err(format!("expected {t:?}, found {got:?}")),
        }
    }

    fn int(&mut self) -> std::result::Result<i64, String> {
        match self.next() {
            Some(Tok::Int(k)) => Ok(k),
            got => Err(format!("expected an integer, found {got:?}")),
        }
    }

    fn expr(&mut self) -> std::result::Result<LevelExpr, String> {
        let name = match self.next() {
            Some(Tok::Ident(s)) => s,
            got => return Err(format!("expected a level constructor, found {got:?}")),
        };
        let unary = |p: &mut Parser| -> std::result::Result<Box<LevelExpr>, String> {
            p.expect(Tok::Open)?;
            let e = p.expr()?;
            p.expect(Tok::Close)?;
            Ok(Box::new(e))
        };
        Ok(match name.as_str() {
            "zero" => LevelExpr::Zero,
            "l0" => LevelExpr::L0,
            "full" => LevelExpr::Full,
            "central" => LevelExpr::Central,
            "l1" => LevelExpr::L1,
            "odd" => LevelExpr::Odd,
            "floor" => LevelExpr::Floor(unary(self)?),
            "ceil" => LevelExpr::Ceil(unary(self)?),
            "env" => LevelExpr::Env(unary(self)?),
            "short" => {
                self.expect(Tok::Open)?;
                let i = self.int()?;
                self.expect(Tok::Comma)?;
                let j = self.int()?;
                self.expect(Tok::Close)?;
                LevelExpr::Short(i as i32, j as i32)
            }
            "scale" => {
                self.expect(Tok::Open)?;
                let e = self.expr()?;
                self.expect(Tok::Comma)?;
                let k = self.int()?;
                self.expect(Tok::Close)?;
                LevelExpr::Scale(Box::new(e), k)
            }
            "join" => {
                self.expect(Tok::Open)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::Close)?;
                LevelExpr::Join(Box::new(a), Box::new(b))
            }
            other => return Err(format!("unknown level constructor '{other}'")),
        })
    }
}

impl LevelExpr {
    pub fn parse(s: &str) -> std::result::Result<LevelExpr, String> {
        let mut p = Parser { toks: lex(s)?, at: 0 };
        let e = p.expr()?;
        if p.at != p.toks.len() {
            return Err(format!("trailing input after '{e}'"));
        }
        Ok(e)
    }

    pub fn eval(&self, s: &LevelSpace) -> Result<AugLevel> {
        let c = &s.ctx;
        match self {
            LevelExpr::Zero => Ok(s.zero_level()),
            LevelExpr::L0 => s.l0(),
            LevelExpr::Full => s.full_level(),
            LevelExpr::Central => {
                let mut gs = s.lambda.gens.clone();
                for i in c.hyperbolic() {
                    if c.carrier_size(i) > crate::levels::MAX_CARRIER {
                        return Err(Error::CarrierTooLarge(format!("carrier X_{i} has {} elements", c.carrier_size(i))));
                    }
                    gs.extend(c.carrier_elements(i).into_iter().filter(|h: &HElem| h.x.is_zero() && h.z.is_zero()));
                }
                s.generate(&hyp_diag_basis(c), &gs)
            }
            LevelExpr::L1 => {
                if c.profile().rank(0) != 1 {
                    return Err(Error::BadBlock("l1 needs r_0 = 1".into()));
                }
                l1_level(s)
            }
            LevelExpr::Odd => {
                if c.profile().rank(0) == 0 {
                    return Err(Error::BadBlock("odd needs r_0 >= 1".into()));
                }
                let l = s.l();
                let seed = c
                    .carrier_elements(-l)
                    .into_iter()
                    .find(|h| h.x.is_zero() && h.y.is_zero() && !h.z.is_zero())
                    .ok_or_else(|| Error::BadBlock(format!("no element (0, 0, z) in X_{}", -l)))?;
                s.generate(&[], &[seed])
            }
            LevelExpr::Short(i, j) => {
                let l = s.l();
                if *i == 0 || *j == 0 || i.abs() > l || j.abs() > l || *i == *j || *i == -*j {
                    return Err(Error::BadBlock(format!("short({i}, {j}) needs hyperbolic i != +-j")));
                }
                let p = c.profile();
                let d = c.dim();
                let a = c.diag(&Mat::unit(d, d, p.range(*i).start, p.range(*j).start, c.ring().one()));
                s.generate(&[a], &[])
            }
            LevelExpr::Scale(e, k) => Ok(s.scale(&e.eval(s)?, c.ring().from_int(*k))),
            LevelExpr::Floor(e) => s.floor(&e.eval(s)?),
            LevelExpr::Ceil(e) => s.ceil(&e.eval(s)?),
            LevelExpr::Env(e) => s.enveloping(&e.eval(s)?),
            LevelExpr::Join(a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                let mut si = a.i.generators(c);
                si.extend(b.i.generators(c));
                let mut sg = a.gamma.generators(c);
                sg.extend(b.gamma.generators(c));
                s.generate(&si, &sg)
            }
        }
    }
}
